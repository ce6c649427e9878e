"""Run artefacts: sample manifests and bitsets, member lists and report
files.

A sample directory holds:

- ``manifest.json``: seed, range, n_min, clamp policy, versions and the
  SHA-256 of the bitset;
- ``sample.bits``: the packed membership bitset (big-endian bits, bit ``i``
  standing for ``lo + i``);
- ``members.txt``: one member per line (small ranges only).

All JSON is written with sorted keys so identical runs give identical
bytes.
"""

import csv
import hashlib
import json
import os
import platform
from typing import Any, Dict, Optional

import mpmath
import numpy as np

from . import __version__
from .errors import UsageError, ValidationError
from .experiments import CountReport
from .sampler import CLAMP_POLICY, ModelParameters, SampledSet

MANIFEST_NAME = "manifest.json"
BITSET_NAME = "sample.bits"
MEMBERS_NAME = "members.txt"
DEFAULT_MEMBER_LIST_LIMIT = 10**6


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def stable_json_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def versions() -> Dict[str, str]:
    return {
        "cramer_lab": __version__,
        "numpy": np.__version__,
        "mpmath": mpmath.__version__,
        "python": platform.python_version(),
    }


def sample_manifest(sample: SampledSet, bitset: bytes) -> Dict[str, Any]:
    return {
        "seed": sample.params.seed,
        "range": [sample.lo, sample.hi],
        "n_min": sample.params.n_min,
        "clamp_policy": CLAMP_POLICY,
        "members": sample.count(),
        "bitset": {"file": BITSET_NAME, "sha256": sha256_hex(bitset), "bit_order": "big"},
        "versions": versions(),
    }


def write_sample(
    sample: SampledSet,
    out_dir: str,
    member_list: Optional[bool] = None,
    member_list_limit: int = DEFAULT_MEMBER_LIST_LIMIT,
) -> Dict[str, Any]:
    """Write manifest, bitset and (for small ranges) member list.

    Args:
        sample (SampledSet): The sample to export.
        out_dir (str): Target directory, created if needed.
        member_list (Optional[bool]): Force the member list on or off; by
            default it is written when the range has at most
            ``member_list_limit`` integers.

    Returns:
        Dict[str, Any]: The manifest written.
    """
    os.makedirs(out_dir, exist_ok=True)
    bitset = sample.packed()
    manifest = sample_manifest(sample, bitset)

    with open(os.path.join(out_dir, BITSET_NAME), "wb") as f:
        f.write(bitset)
    with open(os.path.join(out_dir, MANIFEST_NAME), "w", encoding="utf-8") as f:
        f.write(stable_json_dumps(manifest))

    if member_list is None:
        member_list = sample.hi - sample.lo + 1 <= member_list_limit
    if member_list:
        with open(os.path.join(out_dir, MEMBERS_NAME), "w", encoding="utf-8") as f:
            for n in sample.members().tolist():
                f.write(f"{n}\n")
    return manifest


def read_manifest(path: str) -> Dict[str, Any]:
    """Read a sample manifest from a file or a sample directory."""
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST_NAME)
    if not os.path.exists(path):
        raise UsageError(f"Manifest not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def load_sample(path: str) -> SampledSet:
    """Load a sample written by :func:`write_sample`.

    Raises:
        UsageError: If the manifest is missing.
        ValidationError: If the bitset does not match its recorded hash.
    """
    manifest_path = os.path.join(path, MANIFEST_NAME) if os.path.isdir(path) else path
    manifest = read_manifest(manifest_path)
    bitset_path = os.path.join(os.path.dirname(manifest_path), manifest["bitset"]["file"])
    with open(bitset_path, "rb") as f:
        data = f.read()
    if sha256_hex(data) != manifest["bitset"]["sha256"]:
        raise ValidationError(f"Bitset {bitset_path} does not match the hash in its manifest.")
    lo, hi = manifest["range"]
    params = ModelParameters(seed=manifest["seed"], n_min=manifest["n_min"])
    return SampledSet.from_packed(params, lo, hi, data)


def write_report(report: CountReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(report.to_json())


def read_report(path: str) -> CountReport:
    if not os.path.exists(path):
        raise UsageError(f"Report not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return CountReport.from_json(f.read())


def write_report_csv(report: CountReport, path: str) -> None:
    """Per-seed table ``(x, seed, observed, predicted)``."""
    size = report.params.get("x", report.params.get("N"))
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["x", "seed", "observed", "predicted"])
        for seed, observed in zip(report.seeds, report.observed):
            writer.writerow([size, seed, observed, repr(report.predicted)])
