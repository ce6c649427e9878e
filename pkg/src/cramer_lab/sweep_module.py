"""Sweeps of an experiment over a list of sizes.

Responsibilities:
- Run the same experiment (kind, family, seeds) at each ``x`` in turn.
- Report progress with tagged console lines and a run summary.
- Optionally compute the same count for the true primes, for
  side-by-side display.
- Write plot-ready CSV tables.
"""

import csv
import dataclasses
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import LabError
from .experiments import Experiment, ExperimentKind, required_range, run_ensemble
from .poly_arith import evaluate_array
from .prime_engine import shared_table

SWEEP_COLUMNS = ["x", "observed", "predicted", "ratio", "expected", "stddev"]
# Largest polynomial value for which the true-prime column is computed.
ACTUAL_VALUE_LIMIT = 10**8


def actual_count(experiment: Experiment) -> Optional[int]:
    """The experiment's count with the random set replaced by the primes,
    or ``None`` when the values involved exceed ``ACTUAL_VALUE_LIMIT``."""
    x = experiment.x
    if experiment.kind is ExperimentKind.PRIME_DENSITY:
        return shared_table(x).pi(x) if x >= 2 else 0

    if experiment.kind is ExperimentKind.GOLDBACH:
        if x < 4:
            return 0
        table = shared_table(x)
        primes = table.primes(x - 2)
        flags = np.zeros(x + 1, dtype=bool)
        flags[primes] = True
        seg = flags[2 : x - 1]
        return int(np.count_nonzero(seg & seg[::-1]))

    needed = required_range(experiment.family, x, 2)
    if needed is None:
        return 0
    if needed[1] > ACTUAL_VALUE_LIMIT:
        return None
    table = shared_table(needed[1])
    flags = np.zeros(needed[1] + 1, dtype=bool)
    flags[table.primes(needed[1])] = True
    n = np.arange(1, x + 1, dtype=np.int64)
    hit = np.ones(n.size, dtype=bool)
    for f in experiment.family.members:
        v = evaluate_array(f, n)
        ok = v >= 2
        hit &= ok & flags[np.where(ok, v, 0)]
    return int(np.count_nonzero(hit))


def run_sweep(
    experiment: Experiment,
    xs: Sequence[int],
    seeds: Sequence[int],
    workers: Optional[int] = None,
    with_actual: bool = False,
) -> List[Dict]:
    """Run ``experiment`` at each size in ``xs``.

    A point whose run fails with a :class:`LabError` is reported and
    skipped; the sweep continues with the next point.

    Returns:
        List[Dict]: One row per completed point with the keys of
        ``SWEEP_COLUMNS`` (plus ``actual`` when requested).
    """
    print(f"[Sweep] Running {experiment.kind.value} at {len(xs)} point(s) with {len(seeds)} seed(s).")

    rows: List[Dict] = []
    skipped = 0
    for x in xs:
        print(f"[Sweep] Point x = {x}")
        try:
            point = dataclasses.replace(experiment, x=int(x))
            report = run_ensemble(point, seeds, workers)
        except LabError as exc:
            print(f"[Sweep] Skipping x = {x}: {exc}")
            skipped += 1
            continue

        row = {
            "x": point.x,
            "observed": report.mean,
            "predicted": report.predicted,
            "ratio": report.ratio,
            "expected": report.expected,
            "stddev": report.stddev,
        }
        if with_actual:
            row["actual"] = actual_count(point)
        rows.append(row)
        print(f"[Sweep] observed = {report.mean:.6g}, predicted = {report.predicted:.6g}, ratio = {report.ratio}")

    print(f"[Sweep] Run summary: points={len(xs)}, completed={len(rows)}, skipped={skipped}")
    return rows


def write_sweep_csv(rows: Sequence[Dict], path: str) -> None:
    """Write sweep rows as CSV with a header line."""
    columns = list(SWEEP_COLUMNS)
    if any("actual" in row for row in rows):
        columns.append("actual")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: row.get(key) for key in columns})
