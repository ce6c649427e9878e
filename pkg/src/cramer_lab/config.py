"""Runtime settings for cramer-lab.

Settings are resolved the same way for every entry point: an explicit
argument wins, then an environment variable, then the built-in default.

- ``CRAMER_LAB_MEMORY_BUDGET``: byte budget for sieves and samples
  (plain integer or a ``K``/``M``/``G`` suffix, default 2 GiB).
- ``CRAMER_LAB_WORKERS``: default worker count for thread pools.
- ``CRAMER_LAB_PRECISION_BITS``: working precision of Euler products.
"""

import os
import re
from typing import Dict, Optional

from .errors import UsageError

MEMORY_BUDGET_ENV = "CRAMER_LAB_MEMORY_BUDGET"
WORKERS_ENV = "CRAMER_LAB_WORKERS"
PRECISION_ENV = "CRAMER_LAB_PRECISION_BITS"

DEFAULT_MEMORY_BUDGET = 2 * 1024**3
DEFAULT_WORKERS = 1
DEFAULT_PRECISION_BITS = 113
MIN_PRECISION_BITS = 80

_SIZE_PATTERN = re.compile(r"^\s*(\d+)\s*([KMG]?)i?B?\s*$", re.IGNORECASE)
_SIZE_UNITS = {"": 1, "K": 1024, "M": 1024**2, "G": 1024**3}


def parse_byte_size(raw: str) -> int:
    """Parse a byte count such as ``"512M"`` or ``"2147483648"``.

    Raises:
        UsageError: If the text is not a size.
    """
    match = _SIZE_PATTERN.match(raw)
    if not match:
        raise UsageError(f"Invalid byte size: {raw!r}")
    return int(match.group(1)) * _SIZE_UNITS[match.group(2).upper()]


def get_memory_budget(override: Optional[int] = None) -> int:
    """Return the memory budget in bytes."""
    if override is not None:
        return int(override)
    raw = os.getenv(MEMORY_BUDGET_ENV)
    if not raw:
        return DEFAULT_MEMORY_BUDGET
    return parse_byte_size(raw)


def get_default_workers() -> int:
    raw = os.getenv(WORKERS_ENV)
    if not raw:
        return DEFAULT_WORKERS
    try:
        return max(1, int(raw))
    except ValueError:
        return DEFAULT_WORKERS


def get_precision_bits() -> int:
    """Return the working precision of Euler products, at least 80 bits."""
    raw = os.getenv(PRECISION_ENV)
    if not raw:
        return DEFAULT_PRECISION_BITS
    try:
        bits = int(raw)
    except ValueError:
        return DEFAULT_PRECISION_BITS
    return max(MIN_PRECISION_BITS, bits)


def load_key_value_file(path: str) -> Dict[str, str]:
    """Read a ``key = value`` text file.

    Blank lines and lines starting with ``#`` are ignored. Keys are
    normalised to lowercase with dashes turned into underscores, so a file
    may use the long flag spelling (``base-seed = 7``).

    Raises:
        UsageError: If the file is missing or a line has no ``=``.
    """
    if not os.path.exists(path):
        raise UsageError(f"Config file not found: {path}")

    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise UsageError(f"{path}:{lineno}: expected 'key = value', got {text!r}")
            key, value = text.split("=", 1)
            key = key.strip().lower().replace("-", "_")
            values[key] = value.strip().strip('"').strip("'")
    return values
