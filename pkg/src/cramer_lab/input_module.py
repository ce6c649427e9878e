"""Input module for turning command-line flags and config files into a
validated run configuration.

Responsibilities:
- Parse numbers written as ``1000000``, ``1e6``, ``10^6`` or ``2**20``.
- Parse ranges (``2:1e6``), seed lists and size lists.
- Merge a ``key = value`` config file with command-line flags (flags win)
  and reject unknown keys.
- Represent the result as a :class:`RunConfig`.
"""

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Any, Callable, Dict, Optional, Tuple

from .config import load_key_value_file
from .errors import ValidationError
from .experiments import ExperimentKind, Normalization, PrimeForm
from .sampler import DEFAULT_N_MIN, MAX_SAMPLE_VALUE

KIND_ALIASES = {
    "bh": ExperimentKind.BATEMAN_HORN,
    "bateman_horn": ExperimentKind.BATEMAN_HORN,
    "goldbach": ExperimentKind.GOLDBACH,
    "primes": ExperimentKind.PRIME_DENSITY,
    "prime_density": ExperimentKind.PRIME_DENSITY,
}
FORMATS = ("json", "csv")
# Config-file spellings that differ from the canonical key.
KEY_ALIASES = {"t": "truncation", "lam": "lambda"}


def resolve_kind(text: Optional[str]) -> Optional[ExperimentKind]:
    """Map ``"bh"``, ``"BH"``, ``"bateman-horn"`` and the like to a kind.

    Returns None for empty input; unknown names raise ValidationError.
    """
    if not text:
        return None
    key = str(text).strip().lower().replace("-", "_")
    if key not in KIND_ALIASES:
        raise ValidationError(
            f"Unknown experiment kind {text!r}; expected one of {', '.join(sorted(KIND_ALIASES))}."
        )
    return KIND_ALIASES[key]


_POWER = re.compile(r"^(\d+)\s*(?:\^|\*\*)\s*(\d+)$")


def parse_number(raw: Any, name: str = "value") -> int:
    """Parse a non-negative integer, allowing ``1e6`` and ``2^20`` forms.

    Raises:
        ValidationError: If the text is not an integral number.
    """
    if isinstance(raw, int) and not isinstance(raw, bool):
        value = raw
    else:
        text = str(raw).strip().replace("_", "")
        match = _POWER.match(text)
        if match:
            value = int(match.group(1)) ** int(match.group(2))
        else:
            try:
                number = Decimal(text)
            except InvalidOperation as exc:
                raise ValidationError(f"Invalid {name}: {raw!r} is not a number.") from exc
            if not number.is_finite() or number != number.to_integral_value():
                raise ValidationError(f"Invalid {name}: {raw!r} is not an integer.")
            value = int(number)
    if value < 0:
        raise ValidationError(f"Invalid {name}: {raw!r} is negative.")
    return value


def parse_real(raw: Any, name: str = "value") -> float:
    try:
        value = float(str(raw).strip())
    except ValueError as exc:
        raise ValidationError(f"Invalid {name}: {raw!r} is not a number.") from exc
    if value != value or value in (float("inf"), float("-inf")):
        raise ValidationError(f"Invalid {name}: {raw!r} is not finite.")
    return value


def parse_range(raw: Any) -> Tuple[int, int]:
    """Parse ``"lo:hi"`` into an integer pair with ``lo <= hi``."""
    text = str(raw)
    if ":" not in text:
        raise ValidationError(f"Invalid range {raw!r}: expected 'lo:hi'.")
    lo_text, hi_text = text.split(":", 1)
    lo, hi = parse_number(lo_text, "range start"), parse_number(hi_text, "range end")
    if hi < lo:
        raise ValidationError(f"Invalid range {raw!r}: end lies below start.")
    if hi > MAX_SAMPLE_VALUE:
        raise ValidationError(f"Invalid range {raw!r}: end exceeds {MAX_SAMPLE_VALUE}.")
    return lo, hi


def parse_list(raw: Any, name: str = "list") -> Tuple[int, ...]:
    """Parse a comma-separated list of numbers."""
    if isinstance(raw, (list, tuple)):
        return tuple(parse_number(v, name) for v in raw)
    parts = [p for p in str(raw).split(",") if p.strip()]
    if not parts:
        raise ValidationError(f"Invalid {name}: {raw!r} is empty.")
    return tuple(parse_number(p, name) for p in parts)


def parse_bool(raw: Any, name: str = "flag") -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in {"1", "true", "yes", "on"}:
        return True
    if text in {"0", "false", "no", "off"}:
        return False
    raise ValidationError(f"Invalid {name}: {raw!r} is not a boolean.")


def _choice(options) -> Callable[[Any], str]:
    def parse(raw: Any) -> str:
        text = str(raw).strip().lower()
        if text not in options:
            raise ValidationError(f"Invalid choice {raw!r}; expected one of {', '.join(options)}.")
        return text

    return parse


_PARSERS: Dict[str, Callable[[Any], Any]] = {
    "family": lambda raw: str(raw).strip(),
    "x": lambda raw: parse_number(raw, "x"),
    "n": lambda raw: parse_number(raw, "N"),
    "truncation": lambda raw: parse_real(raw, "truncation T"),
    "seeds": lambda raw: parse_number(raw, "seed count"),
    "seed_list": lambda raw: parse_list(raw, "seed"),
    "base_seed": lambda raw: parse_number(raw, "base seed"),
    "seed": lambda raw: parse_number(raw, "seed"),
    "range": parse_range,
    "out": str,
    "format": _choice(FORMATS),
    "store": str,
    "db": str,
    "workers": lambda raw: parse_number(raw, "worker count"),
    "members": lambda raw: parse_bool(raw, "members"),
    "c2": lambda raw: parse_bool(raw, "c2"),
    "lemma2": lambda raw: parse_bool(raw, "lemma2"),
    "k": lambda raw: parse_number(raw, "k"),
    "lambda": lambda raw: parse_real(raw, "lambda"),
    "normalization": _choice([n.value for n in Normalization]),
    "prime_form": _choice([f.value for f in PrimeForm]),
    "n_min": lambda raw: parse_number(raw, "n_min"),
    "sweep": lambda raw: parse_list(raw, "sweep size"),
    "actual": lambda raw: parse_bool(raw, "actual"),
    "kind": lambda raw: str(raw).strip().lower(),
    "window": lambda raw: parse_number(raw, "window"),
}
CONFIG_KEYS = frozenset(_PARSERS)


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration of one CLI command."""

    command: str
    kind: Optional[str] = None
    family: Optional[str] = None
    x: Optional[int] = None
    n: Optional[int] = None
    truncation: Optional[float] = None
    seeds: Tuple[int, ...] = (0,)
    range: Optional[Tuple[int, int]] = None
    out: Optional[str] = None
    format: str = "json"
    store: Optional[str] = None
    db: Optional[str] = None
    workers: Optional[int] = None
    members: Optional[bool] = None
    c2: bool = False
    lemma2: bool = False
    k: Optional[int] = None
    lam: Optional[float] = None
    normalization: str = Normalization.PRODUCT.value
    prime_form: str = PrimeForm.MERTENS.value
    n_min: int = DEFAULT_N_MIN
    sweep: Tuple[int, ...] = ()
    actual: bool = False
    window: int = 5

    @property
    def experiment_kind(self) -> Optional[ExperimentKind]:
        return resolve_kind(self.kind)


def _normalise_key(key: str) -> str:
    key = key.strip().lower().replace("-", "_")
    return KEY_ALIASES.get(key, key)


def _resolve_seeds(values: Dict[str, Any]) -> Tuple[int, ...]:
    """Explicit list, else a single seed, else ``base_seed .. base_seed+count-1``."""
    if "seed_list" in values:
        return values["seed_list"]
    if "seed" in values:
        return (values["seed"],)
    count = values.get("seeds", 1)
    if count < 1:
        raise ValidationError("Seed count must be at least 1.")
    base = values.get("base_seed", 0)
    return tuple(range(base, base + count))


def build_run_config(
    command: str,
    flags: Dict[str, Any],
    config_path: Optional[str] = None,
    kind: Optional[str] = None,
) -> RunConfig:
    """Merge a config file with command-line flags into a :class:`RunConfig`.

    Args:
        command (str): Sub-command name.
        flags (Dict[str, Any]): Flag values; ``None`` means "not given".
        config_path (Optional[str]): Optional ``key = value`` file.
        kind (Optional[str]): Experiment kind for the ``experiment`` command.

    Raises:
        ValidationError: For unknown keys or invalid values.
        UsageError: If the config file is missing or malformed.
    """
    raw: Dict[str, Any] = {}
    if config_path:
        for key, value in load_key_value_file(config_path).items():
            key = _normalise_key(key)
            if key not in CONFIG_KEYS:
                raise ValidationError(f"Unknown key {key!r} in config file {config_path}.")
            raw[key] = value
    for key, value in flags.items():
        key = _normalise_key(key)
        if key not in CONFIG_KEYS:
            raise ValidationError(f"Unknown option {key!r}.")
        if value is not None:
            raw[key] = value

    values = {key: _PARSERS[key](value) for key, value in raw.items()}
    if kind is not None:
        values["kind"] = kind
    if command == "experiment":
        resolve_kind(values.get("kind"))

    seeds = _resolve_seeds(values)
    for key in ("seed_list", "seed", "seeds", "base_seed"):
        values.pop(key, None)
    if "lambda" in values:
        values["lam"] = values.pop("lambda")
    if "sweep" in values:
        values["sweep"] = tuple(values["sweep"])

    return RunConfig(command=command, seeds=seeds, **values)
