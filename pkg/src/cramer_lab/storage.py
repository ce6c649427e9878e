"""Storage layer for experiment run history.

Responsibilities:
- Persist experiment runs (kind, parameters, prediction, ratio,
  ensemble statistics and manifest).
- Store per-seed observations of each run.
- Provide ratio statistics and trend direction over stored runs.

This implementation uses SQLite via the built-in :mod:`sqlite3` module and
stores data in a local database file.
"""

import json
import sqlite3
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from .experiments import CountReport

_DB_PATH = "cramer_lab.db"


def _get_connection() -> sqlite3.Connection:
    """Create a new SQLite connection using the configured database path."""

    return sqlite3.connect(_DB_PATH)


def initialize_storage(db_path: Optional[str] = None) -> None:
    """Initialize the storage backend.

    Creates the ``runs`` and ``observations`` tables if they do not exist.

    Args:
        db_path (Optional[str]): Optional path to the SQLite database file.
            If omitted, a default file name is used in the current
            working directory.
    """

    global _DB_PATH
    if db_path:
        _DB_PATH = db_path

    conn = _get_connection()
    cur = conn.cursor()

    cur.execute(
        """
        CREATE TABLE IF NOT EXISTS runs (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            kind TEXT NOT NULL,
            params TEXT NOT NULL,
            predicted REAL NOT NULL,
            ratio REAL,
            mean REAL NOT NULL,
            stddev REAL NOT NULL,
            expected REAL,
            violations INTEGER,
            manifest TEXT NOT NULL,
            created_at TEXT NOT NULL
        )
        """
    )

    cur.execute(
        """
        CREATE TABLE IF NOT EXISTS observations (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            run_id INTEGER NOT NULL,
            seed TEXT NOT NULL,
            observed INTEGER NOT NULL,
            FOREIGN KEY (run_id) REFERENCES runs (id)
        )
        """
    )

    conn.commit()
    conn.close()


def save_report(report: CountReport) -> int:
    """Save a run and its per-seed observations.

    Seeds are stored as text since they may exceed SQLite's signed 64-bit
    integers.

    Returns:
        int: The unique ID of the stored run.
    """

    conn = _get_connection()
    cur = conn.cursor()
    now = datetime.now(timezone.utc).isoformat()
    violations = report.certificate.violations if report.certificate else None

    cur.execute(
        """
        INSERT INTO runs (kind, params, predicted, ratio, mean, stddev, expected,
                          violations, manifest, created_at)
        VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
        """,
        (
            report.kind.value,
            json.dumps(report.params, sort_keys=True),
            report.predicted,
            report.ratio,
            report.mean,
            report.stddev,
            report.expected,
            violations,
            json.dumps(report.manifest, sort_keys=True),
            now,
        ),
    )
    run_id = int(cur.lastrowid)

    cur.executemany(
        "INSERT INTO observations (run_id, seed, observed) VALUES (?, ?, ?)",
        [(run_id, str(seed), int(count)) for seed, count in zip(report.seeds, report.observed)],
    )

    conn.commit()
    conn.close()
    return run_id


def list_runs(kind: Optional[str] = None) -> List[Dict[str, Any]]:
    """List stored runs, oldest first, optionally filtered by kind."""

    conn = _get_connection()
    cur = conn.cursor()

    query = "SELECT id, kind, params, predicted, ratio, mean, stddev, expected, violations, created_at FROM runs"
    params: List[Any] = []
    if kind:
        query += " WHERE kind = ?"
        params.append(kind)
    query += " ORDER BY id"

    cur.execute(query, params)
    rows = cur.fetchall()
    conn.close()

    runs: List[Dict[str, Any]] = []
    for row in rows:
        runs.append(
            {
                "id": row[0],
                "kind": row[1],
                "params": json.loads(row[2]),
                "predicted": row[3],
                "ratio": row[4],
                "mean": row[5],
                "stddev": row[6],
                "expected": row[7],
                "violations": row[8],
                "created_at": row[9],
            }
        )
    return runs


def get_observations(run_id: int) -> List[Dict[str, Any]]:
    """Return the per-seed observations of a run in seed order."""

    conn = _get_connection()
    cur = conn.cursor()
    cur.execute(
        "SELECT seed, observed FROM observations WHERE run_id = ? ORDER BY id",
        (run_id,),
    )
    rows = cur.fetchall()
    conn.close()
    return [{"seed": int(row[0]), "observed": row[1]} for row in rows]


def get_ratio_stats(kind: Optional[str] = None) -> Optional[Dict[str, Any]]:
    """Compute min, max and average ratio over stored runs.

    Returns:
        Optional[Dict[str, Any]]: ``None`` if no run with a ratio exists.
    """

    conn = _get_connection()
    cur = conn.cursor()
    query = "SELECT MIN(ratio), MAX(ratio), AVG(ratio), COUNT(ratio) FROM runs WHERE ratio IS NOT NULL"
    params: List[Any] = []
    if kind:
        query += " AND kind = ?"
        params.append(kind)
    cur.execute(query, params)
    row = cur.fetchone()
    conn.close()

    if row is None or row[3] == 0:
        return None

    return {
        "min_ratio": row[0],
        "max_ratio": row[1],
        "avg_ratio": row[2],
        "count": row[3],
    }


def get_ratio_trend(kind: Optional[str] = None, window: int = 5) -> str:
    """Estimate how the ratio moved over the most recent runs.

    Args:
        kind (Optional[str]): Restrict to one experiment kind.
        window (int): Number of most recent runs to consider.

    Returns:
        str: ``"up"``, ``"down"``, or ``"stable"`` based on how the latest
        ratio compares to the oldest ratio in the selected window.
    """

    if window <= 1:
        window = 2

    runs = [run for run in list_runs(kind) if run["ratio"] is not None][-window:]
    if len(runs) < 2:
        return "stable"

    first = float(runs[0]["ratio"])
    last = float(runs[-1]["ratio"])
    threshold = max(abs(first) * 0.01, 0.001)

    delta = last - first
    if delta > threshold:
        return "up"
    if delta < -threshold:
        return "down"
    return "stable"
