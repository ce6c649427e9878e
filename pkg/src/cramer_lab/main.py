"""Entry point for the cramer-lab command line.

Sub-commands:

- ``constants``: C_2(T), C_f(T) for a family, Mertens-type residuals.
- ``sample``: write a seeded sample (manifest, bitset, member list).
- ``experiment bh|goldbach|primes``: seed ensembles with predictions and
  Kim-Vu certificates, optionally swept over several sizes.
- ``rerun``: repeat the run described by a report file.
- ``history``: list runs stored with ``--store``.
- ``demo``: a small end-to-end demonstration.

Exit codes: 0 success, 1 usage, 2 validation, 3 resource.

Run as ``python -m cramer_lab.main`` with ``src`` on the path.
"""

import argparse
import dataclasses
import logging
import sys
from typing import Any, Dict, List, Optional

import mpmath

from .artifacts import read_report, stable_json_dumps, write_report, write_report_csv, write_sample
from .errors import LabError, UsageError, ValidationError
from .experiments import DEFAULT_TRUNCATION, Experiment, ExperimentKind, run_ensemble
from .input_module import RunConfig, build_run_config
from .poly_arith import irreducibility_screen, parse_family
from .ratio_analyzer import analyze_ratio
from .sampler import ModelParameters, sample_range
from .singular_series import c2_tail_bound, compute_C2, compute_Cf, lemma2_check
from .storage import get_ratio_stats, get_ratio_trend, initialize_storage, list_runs, save_report
from .sweep_module import run_sweep, write_sweep_csv

_BOOKKEEPING = ("command", "kind", "config", "verbose", "report")


class LabArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises :class:`UsageError` instead of exiting."""

    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


def _flags(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k not in _BOOKKEEPING}


def _config(args: argparse.Namespace, kind: Optional[str] = None) -> RunConfig:
    return build_run_config(args.command, _flags(args), getattr(args, "config", None), kind)


def _print_json(payload: Dict[str, Any], out: Optional[str]) -> None:
    text = stable_json_dumps(payload)
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"Report written to {out}")
    else:
        print(text, end="")


def cmd_constants(config: RunConfig) -> Dict[str, Any]:
    """Print C_2(T), C_f(T) for a family and Mertens-type residuals."""
    T = config.truncation or DEFAULT_TRUNCATION
    report: Dict[str, Any] = {"T": T}

    if config.c2 or not config.family:
        value = compute_C2(T)
        report["C_2"] = float(value)
        report["C_2_tail_bound"] = c2_tail_bound(T)
        print(f"C_2(T={T:g}) = {mpmath.nstr(value, 15)}  (tail <= {c2_tail_bound(T):.3g})")

    family = None
    if config.family:
        family = parse_family(config.family)
        estimate = compute_Cf(family, T)
        family = estimate.family
        report["family"] = str(family)
        report["admissibility"] = family.note
        report["C_f"] = float(estimate.value)
        report["C_f_tail_error"] = estimate.tail_error
        report["C_f_tail_error_rigorous"] = False
        report["converged_fast"] = estimate.converged_fast
        report["irreducibility"] = {str(f): str(irreducibility_screen(f)) for f in family.members}
        print(f"Family {family}: admissible ({family.note})")
        for member, verdict in report["irreducibility"].items():
            print(f"  {member}: {verdict}")
        print(
            f"C_f(T={T:g}) = {mpmath.nstr(estimate.value, 15)}  "
            f"(heuristic tail {estimate.tail_error:.3g}, fast={estimate.converged_fast})"
        )

    if config.lemma2 or config.k is not None:
        k = config.k or (family.k if family is not None else 1)
        residuals = lemma2_check(k, T, family)
        report["lemma2"] = {
            "k": residuals.k,
            "residual_i": residuals.residual_i,
            "residual_ii": residuals.residual_ii,
            "reference_truncation": residuals.reference_truncation,
        }
        print(f"Lemma residuals (k={k}): (i) {residuals.residual_i:.6g}, (ii) {residuals.residual_ii}")

    if config.out:
        _print_json(report, config.out)
    return report


def cmd_sample(config: RunConfig) -> Dict[str, Any]:
    """Write a seeded sample to ``--out``."""
    if config.range is None:
        raise UsageError("sample needs --range lo:hi.")
    if not config.out:
        raise UsageError("sample needs --out DIR.")
    lo, hi = config.range
    params = ModelParameters(seed=config.seeds[0], n_min=config.n_min)
    sample = sample_range(lo, hi, params, config.workers)
    manifest = write_sample(sample, config.out, config.members)
    print(f"[Sample] seed={params.seed} range=[{lo}, {hi}] members={manifest['members']} -> {config.out}")
    return manifest


def _experiment_from_config(config: RunConfig) -> Experiment:
    kind = config.experiment_kind
    if kind is None:
        raise UsageError("experiment needs a kind: bh, goldbach or primes.")
    if kind is ExperimentKind.GOLDBACH:
        size = config.n if config.n is not None else config.x
        flag = "--N"
    else:
        size = config.x
        flag = "--x"
    if size is None and not config.sweep:
        raise UsageError(f"experiment {config.kind} needs {flag}.")
    family = parse_family(config.family) if config.family else None
    return Experiment(
        kind=kind,
        x=size if size is not None else config.sweep[0],
        family=family,
        n_min=config.n_min,
        truncation=config.truncation or DEFAULT_TRUNCATION,
        normalization=config.normalization,
        prime_form=config.prime_form,
        kimvu_lambda=config.lam,
    )


def cmd_experiment(config: RunConfig) -> Any:
    """Run an ensemble (or a sweep) and emit JSON or CSV."""
    experiment = _experiment_from_config(config)

    if config.sweep:
        rows = run_sweep(experiment, config.sweep, config.seeds, config.workers, config.actual)
        if config.out:
            write_sweep_csv(rows, config.out)
            print(f"[Sweep] CSV written to {config.out}")
        return rows

    print(f"[Experiment] {experiment.kind.value} {experiment.params()} seeds={len(config.seeds)}")
    report = run_ensemble(experiment, config.seeds, config.workers)
    analysis = analyze_ratio(report.mean, report.predicted)
    print(
        f"[Experiment] mean = {report.mean:.6g} (stddev {report.stddev:.4g}), "
        f"predicted = {report.predicted:.6g}, expected = {report.expected:.6g}, "
        f"ratio = {analysis['ratio']}"
    )
    if report.certificate is not None:
        cert = report.certificate
        print(
            f"[Experiment] Kim-Vu threshold = {cert.threshold:.6g}, "
            f"max deviation = {max(cert.deviations):.6g}, violations = {cert.violations}"
        )

    if config.out:
        if config.format == "csv":
            write_report_csv(report, config.out)
        else:
            write_report(report, config.out)
        print(f"[Experiment] Report written to {config.out}")
    if config.store:
        initialize_storage(config.store)
        run_id = save_report(report)
        print(f"[Experiment] Stored as run {run_id} in {config.store}")
    return report


def cmd_rerun(report_path: str, config: RunConfig) -> bool:
    """Repeat a stored report and compare the result byte for byte."""
    original = read_report(report_path)
    again = run_ensemble(original.experiment(), original.seeds, config.workers)
    identical = again.to_json() == original.to_json()
    print(f"[Rerun] {report_path}: {'identical' if identical else 'DIFFERS'}")
    if config.out:
        write_report(again, config.out)
    if not identical:
        raise ValidationError(f"Re-run of {report_path} does not reproduce the report.")
    return identical


def cmd_history(config: RunConfig) -> List[Dict[str, Any]]:
    if not config.db:
        raise UsageError("history needs --db PATH.")
    resolved = config.experiment_kind
    kind = resolved.value if resolved else None
    initialize_storage(config.db)
    runs = list_runs(kind)
    if not runs:
        print("No runs stored yet.")
        return runs
    print("Stored runs:")
    for run in runs:
        print(
            f"- [run {run['id']}] {run['kind']} {run['params']} "
            f"mean={run['mean']:.6g} predicted={run['predicted']:.6g} ratio={run['ratio']}"
        )
    stats = get_ratio_stats(kind)
    if stats:
        print(
            f"Ratio over {stats['count']} run(s): min={stats['min_ratio']:.4f}, "
            f"max={stats['max_ratio']:.4f}, avg={stats['avg_ratio']:.4f}, "
            f"trend={get_ratio_trend(kind, config.window)}"
        )
    return runs


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value file with the same keys as the long flags")
    parser.add_argument("--out", help="output path")
    parser.add_argument("--workers", help="thread count (results do not depend on it)")
    parser.add_argument("--n-min", dest="n_min", help="start of the support (default 16)")


def build_parser() -> argparse.ArgumentParser:
    parser = LabArgumentParser(prog="cramer-lab", description="Cramer-Granville prime model laboratory")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=LabArgumentParser)

    constants = sub.add_parser("constants", help="singular series and Mertens-type residuals")
    _add_common(constants)
    constants.add_argument("--c2", action="store_true", default=None, help="print C_2(T)")
    constants.add_argument("--family", help='comma-separated family, e.g. "x,x+2"')
    constants.add_argument("--T", dest="truncation", help="Euler-product truncation")
    constants.add_argument("--k", help="k for the Mertens residual")
    constants.add_argument("--lemma2", action="store_true", default=None, help="print Mertens-type residuals")

    sample = sub.add_parser("sample", help="write a seeded sample")
    _add_common(sample)
    sample.add_argument("--range", help="lo:hi")
    sample.add_argument("--seed", help="64-bit seed")
    sample.add_argument("--members", action="store_true", default=None, help="force the member list")
    sample.add_argument("--no-members", dest="members", action="store_false", help="skip the member list")

    experiment = sub.add_parser("experiment", help="run a seed ensemble")
    experiment.add_argument("kind", help="bh, goldbach or primes")
    _add_common(experiment)
    experiment.add_argument("--family", help='comma-separated family, e.g. "x,x+2"')
    experiment.add_argument("--x", help="size x")
    experiment.add_argument("--N", dest="n", help="even N for goldbach")
    experiment.add_argument("--seeds", help="number of seeds (default 1)")
    experiment.add_argument("--base-seed", dest="base_seed", help="first seed (default 0)")
    experiment.add_argument("--seed-list", dest="seed_list", help="explicit comma-separated seeds")
    experiment.add_argument("--T", dest="truncation", help="Euler-product truncation")
    experiment.add_argument("--format", help="json or csv")
    experiment.add_argument("--store", help="SQLite history file")
    experiment.add_argument("--lambda", dest="lambda", help="Kim-Vu lambda override")
    experiment.add_argument("--normalization", help="product or sum")
    experiment.add_argument("--prime-form", dest="prime_form", help="mertens or asymptotic")
    experiment.add_argument("--sweep", help="comma-separated sizes; writes a CSV table")
    experiment.add_argument("--actual", action="store_true", default=None, help="add true-prime counts to sweeps")

    rerun = sub.add_parser("rerun", help="repeat the run of a report file")
    rerun.add_argument("report", help="report JSON")
    rerun.add_argument("--out", help="write the new report here")
    rerun.add_argument("--workers", help="thread count")

    history = sub.add_parser("history", help="list stored runs")
    history.add_argument("--db", help="SQLite history file")
    history.add_argument("--kind", help="filter by experiment kind")
    history.add_argument("--window", help="runs considered for the trend")

    sub.add_parser("demo", help="small end-to-end demonstration")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        if args.command is None:
            parser.print_help()
            return 1

        if args.command == "constants":
            cmd_constants(_config(args))
        elif args.command == "sample":
            cmd_sample(_config(args))
        elif args.command == "experiment":
            cmd_experiment(_config(args, args.kind.lower()))
        elif args.command == "rerun":
            cmd_rerun(args.report, _config(args))
        elif args.command == "history":
            flags = _flags(args)
            config = dataclasses.replace(build_run_config("history", flags), kind=args.kind)
            cmd_history(config)
        elif args.command == "demo":
            from .demo import run_demo

            run_demo()
    except LabError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
