"""The random set of the model: membership probabilities and seeded samples.

An integer ``n >= n_min`` joins the set independently with probability
``min(1, M(T(n)) / log n)`` when it is coprime to every prime ``p <= T(n)``
and with probability 0 otherwise, where ``T(n) = log n / log log log n``
and ``M(T) = prod_{p <= T} (1 - 1/p)^{-1}``.

The Bernoulli draw for ``n`` compares a counter-based uniform ``u(seed, n)``
with the probability of ``n``. The uniform is a keyed 64-bit mix of the
seed and ``n`` (splitmix64 finaliser), so membership of ``n`` never depends
on the range being sampled, the evaluation order or the number of workers.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .config import MEMORY_BUDGET_ENV, get_default_workers, get_memory_budget
from .errors import DomainError, ResourceError, ValidationError
from .prime_engine import MAX_UINT64, primes_up_to

logger = logging.getLogger(__name__)

DEFAULT_N_MIN = 16
CLAMP_POLICY = "min(p, 1)"
# Numbers per vectorised chunk (probabilities, draws, sums).
CHUNK = 1 << 20
# Largest integer a sample can reach; hi + 1 must still fit in int64.
MAX_SAMPLE_VALUE = (1 << 63) - 2
# T(n) <= T(16) < 142 for every n >= 16 that fits in 63 bits.
_SMALL_PRIMES = primes_up_to(160)
_MERTENS_TABLE = np.empty(len(_SMALL_PRIMES) + 1, dtype=np.float64)

_running = Fraction(1)
_MERTENS_TABLE[0] = 1.0
for _i, _p in enumerate(_SMALL_PRIMES.tolist(), start=1):
    _running *= Fraction(_p, _p - 1)
    _MERTENS_TABLE[_i] = float(_running)
del _running, _i, _p

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@dataclass(frozen=True)
class ModelParameters:
    """Parameters of one realisation of the random set.

    Attributes:
        seed (int): 64-bit unsigned seed of the counter-based draws.
        n_min (int): Start of the support; probabilities vanish below it.
    """

    seed: int = 0
    n_min: int = DEFAULT_N_MIN

    def __post_init__(self) -> None:
        if int(self.seed) != self.seed or not 0 <= self.seed <= MAX_UINT64:
            raise ValidationError(f"Seed must be an unsigned 64-bit integer, got {self.seed!r}.")
        if int(self.n_min) != self.n_min or self.n_min < DEFAULT_N_MIN:
            raise ValidationError(f"n_min must be an integer >= {DEFAULT_N_MIN}, got {self.n_min!r}.")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "n_min", int(self.n_min))

    @property
    def clamp_policy(self) -> str:
        return CLAMP_POLICY

    def with_seed(self, seed: int) -> "ModelParameters":
        return ModelParameters(seed=seed, n_min=self.n_min)


def threshold_T(x: float) -> float:
    """``T(x) = log x / log log log x``.

    Raises:
        DomainError: If ``x < 16`` (the triple logarithm is undefined or
            not positive there).
    """
    if x < DEFAULT_N_MIN:
        raise DomainError(f"T(x) needs x >= {DEFAULT_N_MIN}, got {x}.")
    log_x = math.log(x)
    return log_x / math.log(math.log(log_x))


def mertens_at(T: float) -> float:
    """``prod_{p <= T} (1 - 1/p)^{-1}`` from the small-prime table, for
    ``T < 160``."""
    if T >= 160:
        raise DomainError(f"mertens_at covers T < 160 only, got {T}.")
    return float(_MERTENS_TABLE[int(np.searchsorted(_SMALL_PRIMES, T, side="right"))])


def _as_values(values) -> np.ndarray:
    try:
        return np.asarray(values, dtype=np.int64)
    except OverflowError as exc:
        raise DomainError(f"Values must lie below 2^63: {exc}.") from exc


def probabilities_at(values: np.ndarray, n_min: int = DEFAULT_N_MIN) -> np.ndarray:
    """Membership probabilities for an array of integers.

    Values below ``n_min`` (including zero and negatives) get probability 0.

    Raises:
        DomainError: If a value does not fit in 63 bits.
    """
    values = _as_values(values)
    supported = values >= n_min
    safe = np.where(supported, values, n_min).astype(np.float64)

    log_n = np.log(safe)
    T = log_n / np.log(np.log(log_n))
    count = np.searchsorted(_SMALL_PRIMES, T, side="right")

    coprime = supported.copy()
    for i, p in enumerate(_SMALL_PRIMES.tolist()):
        active = count > i
        if not active.any():
            break
        coprime &= ~(active & (values % p == 0))

    raw = _MERTENS_TABLE[count] / log_n
    clamped = coprime & (raw > 1.0)
    if clamped.any():
        logger.debug("Clamped %d probabilities to 1.", int(np.count_nonzero(clamped)))
    return np.where(coprime, np.minimum(raw, 1.0), 0.0)


def membership_probability(n: int, params: Optional[ModelParameters] = None) -> float:
    """Probability that ``n`` belongs to the random set."""
    n_min = params.n_min if params is not None else DEFAULT_N_MIN
    return float(probabilities_at([int(n)], n_min)[0])


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniforms_at(values: np.ndarray, seed: int) -> np.ndarray:
    """Counter-based uniforms in ``[0, 1)`` keyed by ``(seed, n)``."""
    values = _as_values(values)
    with np.errstate(over="ignore"):
        key = _mix64(np.array([seed], dtype=np.uint64))[0]
        z = _mix64(values.astype(np.uint64) * _GOLDEN + key)
    return (z >> np.uint64(11)).astype(np.float64) * (2.0**-53)


def draw_at(values: np.ndarray, params: ModelParameters) -> np.ndarray:
    """Membership indicators of ``values`` in the realisation ``params``."""
    values = _as_values(values)
    return uniforms_at(values, params.seed) < probabilities_at(values, params.n_min)


@dataclass(frozen=True, eq=False)
class SampledSet:
    """An immutable realisation of the random set restricted to ``[lo, hi]``.

    Attributes:
        params (ModelParameters): Seed and support of the realisation.
        lo (int): First integer covered.
        hi (int): Last integer covered.
        membership (np.ndarray): Read-only boolean array; entry ``i`` is the
            indicator of ``lo + i``.
    """

    params: ModelParameters
    lo: int
    hi: int
    membership: np.ndarray

    def __post_init__(self) -> None:
        if self.membership.shape != (self.hi - self.lo + 1,):
            raise ValidationError(
                f"Membership array of length {self.membership.size} does not match [{self.lo}, {self.hi}]."
            )
        self.membership.setflags(write=False)

    def covers(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi

    def require(self, lo: int, hi: int) -> None:
        """Raise unless the sample covers ``[lo, hi]``.

        Raises:
            ValidationError: Stating the required range.
        """
        if not self.covers(lo, hi):
            raise ValidationError(
                f"Sample covers [{self.lo}, {self.hi}] but [{lo}, {hi}] is required."
            )

    def contains(self, n: int) -> bool:
        self.require(n, n)
        return bool(self.membership[n - self.lo])

    def __contains__(self, n: int) -> bool:
        return self.covers(n, n) and bool(self.membership[n - self.lo])

    def contains_many(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.int64)
        if values.size:
            self.require(int(values.min()), int(values.max()))
        return self.membership[values - self.lo]

    def indicator(self, lo: int, hi: int) -> np.ndarray:
        """Read-only view of the indicators of ``[lo, hi]``."""
        self.require(lo, hi)
        return self.membership[lo - self.lo : hi - self.lo + 1]

    def members(self) -> np.ndarray:
        return np.flatnonzero(self.membership).astype(np.int64) + self.lo

    def count(self, lo: Optional[int] = None, hi: Optional[int] = None) -> int:
        lo = self.lo if lo is None else max(lo, self.lo)
        hi = self.hi if hi is None else min(hi, self.hi)
        if hi < lo:
            return 0
        return int(np.count_nonzero(self.indicator(lo, hi)))

    def restrict(self, lo: int, hi: int) -> "SampledSet":
        return SampledSet(self.params, lo, hi, self.indicator(lo, hi).copy())

    def packed(self) -> bytes:
        """Big-endian packed bitset, bit ``i`` standing for ``lo + i``."""
        return np.packbits(self.membership).tobytes()

    @classmethod
    def from_packed(cls, params: ModelParameters, lo: int, hi: int, data: bytes) -> "SampledSet":
        size = hi - lo + 1
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=size)
        return cls(params, lo, hi, bits.astype(bool))

    def same_as(self, other: "SampledSet") -> bool:
        return (
            self.params == other.params
            and self.lo == other.lo
            and self.hi == other.hi
            and np.array_equal(self.membership, other.membership)
        )


def _check_range(lo: int, hi: int) -> None:
    if lo < 2 or hi < lo:
        raise DomainError(f"Sample range must satisfy 2 <= lo <= hi, got [{lo}, {hi}].")
    if hi > MAX_SAMPLE_VALUE:
        raise DomainError(f"Sample range must end at or below {MAX_SAMPLE_VALUE}, got {hi}.")


def _check_budget(size: int, bytes_per_item: int, what: str) -> None:
    budget = get_memory_budget()
    needed = size * bytes_per_item + 16 * min(size, CHUNK)
    if needed > budget:
        raise ResourceError(
            f"{what} of {size} integers needs about {needed} bytes, which exceeds the "
            f"memory budget of {budget} bytes (raise {MEMORY_BUDGET_ENV})."
        )


def _chunk_starts(lo: int, hi: int) -> Iterable[int]:
    return range(lo, hi + 1, CHUNK)


class SamplingFrame:
    """Probabilities of ``[lo, hi]`` computed once and reused for many seeds.

    Args:
        lo (int): First integer, ``>= 2``.
        hi (int): Last integer.
        n_min (int): Start of the support.
        workers (Optional[int]): Threads used to fill chunks; the result
            does not depend on it.

    Raises:
        DomainError: If the range is empty, starts below 2 or ends above
            :data:`MAX_SAMPLE_VALUE`.
        ResourceError: If the frame would exceed the memory budget.
    """

    def __init__(self, lo: int, hi: int, n_min: int = DEFAULT_N_MIN, workers: Optional[int] = None) -> None:
        lo, hi = int(lo), int(hi)
        _check_range(lo, hi)
        _check_budget(hi - lo + 1, 9, "A sampling frame")
        self.lo = lo
        self.hi = hi
        self.n_min = int(n_min)
        self.workers = workers or get_default_workers()
        self.probabilities = np.empty(hi - lo + 1, dtype=np.float64)
        self._map(self._fill_probabilities)
        self.probabilities.setflags(write=False)

    def _map(self, task) -> None:
        starts = list(_chunk_starts(self.lo, self.hi))
        if self.workers > 1 and len(starts) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                list(pool.map(task, starts))
        else:
            for start in starts:
                task(start)

    def _fill_probabilities(self, start: int) -> None:
        stop = min(start + CHUNK, self.hi + 1)
        values = np.arange(start, stop, dtype=np.int64)
        self.probabilities[start - self.lo : stop - self.lo] = probabilities_at(values, self.n_min)

    def expected_count(self) -> float:
        return math.fsum(self.probabilities.tolist())

    def draw(self, seed: int) -> SampledSet:
        params = ModelParameters(seed=seed, n_min=self.n_min)
        membership = np.empty(self.hi - self.lo + 1, dtype=bool)

        def fill(start: int) -> None:
            stop = min(start + CHUNK, self.hi + 1)
            values = np.arange(start, stop, dtype=np.int64)
            window = slice(start - self.lo, stop - self.lo)
            membership[window] = uniforms_at(values, params.seed) < self.probabilities[window]

        self._map(fill)
        return SampledSet(params, self.lo, self.hi, membership)


def sample_range(lo: int, hi: int, params: ModelParameters, workers: Optional[int] = None) -> SampledSet:
    """Sample the realisation ``params`` over ``[lo, hi]``.

    Membership of each ``n`` depends only on ``(params.seed, n)``, so any
    sub-range of a sample equals the sample of that sub-range.

    Raises:
        DomainError: If ``lo < 2``, ``hi < lo`` or ``hi > MAX_SAMPLE_VALUE``.
        ResourceError: If the bitset would exceed the memory budget.
    """
    lo, hi = int(lo), int(hi)
    _check_range(lo, hi)
    _check_budget(hi - lo + 1, 1, "A sample")
    workers = workers or get_default_workers()
    membership = np.empty(hi - lo + 1, dtype=bool)

    def fill(start: int) -> None:
        stop = min(start + CHUNK, hi + 1)
        values = np.arange(start, stop, dtype=np.int64)
        membership[start - lo : stop - lo] = draw_at(values, params)

    starts = list(_chunk_starts(lo, hi))
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    else:
        for start in starts:
            fill(start)

    logger.info("Sampled [%d, %d] with seed %d.", lo, hi, params.seed)
    return SampledSet(params, lo, hi, membership)


def _range_sum(lo: int, hi: int, n_min: int, term) -> float:
    partials = []
    for start in range(max(lo, 0), hi + 1, CHUNK):
        stop = min(start + CHUNK, hi + 1)
        p = probabilities_at(np.arange(start, stop, dtype=np.int64), n_min)
        partials.append(math.fsum(term(p).tolist()))
    return math.fsum(partials)


def expected_count(lo: int, hi: int, params: Optional[ModelParameters] = None) -> float:
    """Exact ``sum_{lo <= n <= hi}`` of membership probabilities; 0 for an
    empty range."""
    n_min = params.n_min if params is not None else DEFAULT_N_MIN
    if hi < lo:
        return 0.0
    return _range_sum(int(lo), int(hi), n_min, lambda p: p)


def count_variance(lo: int, hi: int, params: Optional[ModelParameters] = None) -> float:
    """``sum p (1 - p)`` over ``[lo, hi]``: the variance of the member count."""
    n_min = params.n_min if params is not None else DEFAULT_N_MIN
    if hi < lo:
        return 0.0
    return _range_sum(int(lo), int(hi), n_min, lambda p: p * (1.0 - p))
