"""Prime engine: sieving, prime counting, primorials, factorisation and
Mertens-type products.

Every other module consumes primes through this one. The central object is
:class:`PrimeTable`, an immutable odd-only bitset built by a segmented
sieve of Eratosthenes, with cumulative popcount checkpoints so that
``pi(n)`` costs one checkpoint lookup plus a short partial popcount.

Euler products are accumulated in log-space at extended precision with
:mod:`mpmath`. Primes are grouped into chunks whose factors are multiplied
exactly as Python integers, so the only rounding happens once per chunk in
the logarithm.
"""

import math
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from sympy import factorint, isprime

from .config import MEMORY_BUDGET_ENV, get_memory_budget, get_precision_bits
from .errors import DomainError, ResourceError

# Odd numbers per sieve segment; a multiple of BLOCK_ODDS (and of 8).
SEGMENT_ODDS = 1 << 20
# Odd numbers per pi checkpoint block.
BLOCK_ODDS = 1 << 12
# Primes per exact sub-product in log-space accumulation.
PRODUCT_CHUNK = 256
# Trial division bound used by factorize before handing off to sympy.
TRIAL_DIVISION_LIMIT = 1 << 20

MAX_UINT64 = (1 << 64) - 1


_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


class PrimeTable:
    """Immutable primality bitset for the odd integers up to ``limit``.

    Bit ``i`` (big-endian within each byte) stands for the odd number
    ``2*i + 1``. ``checkpoints[b]`` is the number of odd primes whose index
    is below ``b * BLOCK_ODDS``.

    Instances are safe to share between threads; the only lazily built
    state is the prime list, which is guarded by a lock.
    """

    def __init__(self, limit: int, packed: np.ndarray, checkpoints: np.ndarray) -> None:
        self.limit = int(limit)
        self._n_odd = (self.limit + 1) // 2
        self._packed = packed
        self._packed.setflags(write=False)
        self._checkpoints = checkpoints
        self._checkpoints.setflags(write=False)
        self._primes: Optional[np.ndarray] = None
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"PrimeTable(limit={self.limit})"

    @property
    def nbytes(self) -> int:
        return int(self._packed.nbytes + self._checkpoints.nbytes)

    def _check_range(self, n: int) -> None:
        if n > self.limit:
            raise DomainError(f"{n} lies beyond the sieve limit {self.limit}.")

    def is_prime(self, n: int) -> bool:
        n = int(n)
        self._check_range(n)
        if n < 2:
            return False
        if n == 2:
            return True
        if n % 2 == 0:
            return False
        i = (n - 1) >> 1
        return bool((int(self._packed[i >> 3]) >> (7 - (i & 7))) & 1)

    def pi(self, x: float) -> int:
        """Return the number of primes ``<= x``."""
        n = math.floor(x)
        self._check_range(n)
        if n < 2:
            return 0
        if n < 3:
            return 1

        end = ((n - 1) >> 1) + 1  # odd indices 0 .. end-1 are <= n
        block = end // BLOCK_ODDS
        count = int(self._checkpoints[block])

        start_byte = (block * BLOCK_ODDS) >> 3
        full_byte = end >> 3
        if full_byte > start_byte:
            count += int(_POPCOUNT[self._packed[start_byte:full_byte]].sum())
        rem = end & 7
        if rem:
            count += int(_POPCOUNT[int(self._packed[full_byte]) >> (8 - rem)])

        return 1 + count

    def _all_primes(self) -> np.ndarray:
        with self._lock:
            if self._primes is None:
                bits = np.unpackbits(self._packed)[: self._n_odd]
                odd_index = np.flatnonzero(bits)
                primes = np.empty(odd_index.size + 1, dtype=np.int64)
                primes[0] = 2
                primes[1:] = 2 * odd_index.astype(np.int64) + 1
                primes.setflags(write=False)
                self._primes = primes
            return self._primes

    def primes(self, upto: Optional[float] = None) -> np.ndarray:
        """Return the primes ``<= upto`` (default: the whole table) in
        increasing order as a read-only ``int64`` array."""
        everything = self._all_primes()
        if upto is None:
            return everything
        return everything[: self.pi(upto)]

    def __iter__(self) -> Iterator[int]:
        return iter(self._all_primes().tolist())

    def __len__(self) -> int:
        return self.pi(self.limit)


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p : limit + 1 : p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def sieve_bytes_needed(limit: int) -> int:
    """Estimate the peak memory of :func:`sieve` for ``limit``."""
    n_odd = (int(limit) + 1) // 2
    packed = (n_odd + 7) // 8
    checkpoints = 8 * (n_odd // BLOCK_ODDS + 2)
    segment = min(n_odd, SEGMENT_ODDS)
    return packed + checkpoints + segment


def sieve(limit: int, memory_budget: Optional[int] = None) -> PrimeTable:
    """Build a :class:`PrimeTable` for all integers up to ``limit``.

    Args:
        limit (int): Largest integer the table must answer for (``>= 2``).
        memory_budget (Optional[int]): Byte budget; defaults to the
            configured budget.

    Raises:
        DomainError: If ``limit < 2``.
        ResourceError: If the table would exceed the memory budget.
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"Sieve limit must be at least 2, got {limit}.")

    budget = get_memory_budget(memory_budget)
    needed = sieve_bytes_needed(limit)
    if needed > budget:
        raise ResourceError(
            f"Sieving to {limit} needs about {needed} bytes, which exceeds the "
            f"memory budget of {budget} bytes (raise {MEMORY_BUDGET_ENV})."
        )

    n_odd = (limit + 1) // 2
    odd_base = [q for q in _simple_sieve(math.isqrt(limit)).tolist() if q > 2]
    packed = np.zeros((n_odd + 7) // 8, dtype=np.uint8)
    block_counts: List[np.ndarray] = []

    for s in range(0, n_odd, SEGMENT_ODDS):
        e = min(s + SEGMENT_ODDS, n_odd)
        mask = np.ones(e - s, dtype=bool)
        low = 2 * s + 1
        high = 2 * (e - 1) + 1

        for q in odd_base:
            q2 = q * q
            if q2 > high:
                break
            start = max(q2, ((low + q - 1) // q) * q)
            if start % 2 == 0:
                start += q
            if start > high:
                continue
            mask[(start - low) // 2 :: q] = False

        if s == 0:
            mask[0] = False  # 1 is not prime

        packed[s >> 3 : (s >> 3) + (e - s + 7) // 8] = np.packbits(mask)

        n_blocks = -(-(e - s) // BLOCK_ODDS)
        padded = np.zeros(n_blocks * BLOCK_ODDS, dtype=bool)
        padded[: e - s] = mask
        block_counts.append(padded.reshape(n_blocks, BLOCK_ODDS).sum(axis=1))

    counts = np.concatenate(block_counts).astype(np.int64)
    checkpoints = np.zeros(counts.size + 1, dtype=np.int64)
    np.cumsum(counts, out=checkpoints[1:])
    return PrimeTable(limit, packed, checkpoints)


_SHARED_TABLE: Optional[PrimeTable] = None
_SHARED_LOCK = threading.Lock()
_SHARED_MINIMUM = 1 << 16


def shared_table(limit: float) -> PrimeTable:
    """Return a process-wide :class:`PrimeTable` covering at least ``limit``.

    The table only grows: a request beyond the current limit replaces it
    with one at least twice as large.
    """
    global _SHARED_TABLE
    wanted = max(int(math.floor(limit)), _SHARED_MINIMUM)
    with _SHARED_LOCK:
        current = _SHARED_TABLE
        if current is None or current.limit < wanted:
            grown = wanted if current is None else max(wanted, 2 * current.limit)
            try:
                _SHARED_TABLE = sieve(grown)
            except ResourceError:
                _SHARED_TABLE = sieve(wanted)
        return _SHARED_TABLE


def primes_up_to(T: float) -> np.ndarray:
    """Return the primes ``<= T`` as an ``int64`` array."""
    if T < 2:
        return np.array([], dtype=np.int64)
    return shared_table(T).primes(T)


def primorial(T: float) -> int:
    """Return ``P_T``, the exact product of all primes ``<= T``.

    Raises:
        DomainError: If ``T < 2``.
    """
    if T < 2:
        raise DomainError(f"primorial needs T >= 2, got {T}.")
    return math.prod(primes_up_to(T).tolist())


def log_prime_product(
    columns: Sequence[Tuple[np.ndarray, int]],
    chunk: int = PRODUCT_CHUNK,
) -> Tuple[mpmath.mpf, List[mpmath.mpf]]:
    """Return ``log prod_j prod_i values_i[j] ** exponent_i`` in log-space.

    Each column is a pair ``(values, exponent)`` of equal-length positive
    integer arrays. Values are multiplied exactly in chunks of ``chunk``
    entries, and the chunk logarithms are summed in a fixed order, so the
    result only depends on the inputs and the working precision. Must be
    called inside an :func:`mpmath.workprec` block.

    Returns:
        Tuple[mpf, List[mpf]]: The total log and the running total after
        each chunk.
    """
    length = len(columns[0][0]) if columns else 0
    running = mpmath.mpf(0)
    partial: List[mpmath.mpf] = []
    for s in range(0, length, chunk):
        term = mpmath.mpf(0)
        for values, exponent in columns:
            if exponent == 0:
                continue
            product = math.prod(values[s : s + chunk].tolist())
            term += exponent * mpmath.log(product)
        running += term
        partial.append(running)
    return running, partial


class MertensKind(str, Enum):
    INVERSE = "inverse"  # prod (1 - 1/p)^-k
    DIRECT = "direct"  # prod (1 - 1/p)^k


@dataclass(frozen=True)
class MertensProduct:
    """A finite product over primes ``p <= truncation`` of ``(1 - 1/p)^{-k}``
    (inverse) or ``(1 - 1/p)^{k}`` (direct)."""

    truncation: float
    k: int
    kind: MertensKind
    value: mpmath.mpf
    log_value: mpmath.mpf

    def __float__(self) -> float:
        return float(self.value)


def mertens_product(T: float, k: int, kind: MertensKind = MertensKind.INVERSE) -> MertensProduct:
    """Compute ``prod_{p <= T} (1 - 1/p)^{-k}`` or its reciprocal.

    For ``kind=inverse`` the value approximates ``e^{k gamma} (log T)^k``
    (Mertens' third theorem).

    Raises:
        DomainError: If ``T < 2`` or ``k < 1``.
    """
    if T < 2:
        raise DomainError(f"Mertens product needs T >= 2, got {T}.")
    if int(k) != k or k < 1:
        raise DomainError(f"Mertens product needs an integer k >= 1, got {k}.")
    kind = MertensKind(kind)
    k = int(k)

    primes = primes_up_to(T)
    with mpmath.workprec(get_precision_bits()):
        log_direct, _ = log_prime_product([(primes - 1, 1), (primes, -1)])
        sign = 1 if kind is MertensKind.DIRECT else -1
        log_value = sign * k * log_direct
        value = mpmath.exp(log_value)
    return MertensProduct(truncation=float(T), k=k, kind=kind, value=value, log_value=log_value)


def is_prime_deterministic(n: int) -> bool:
    """Primality via sympy, deterministic below 2^64."""
    n = int(n)
    if n < 2:
        return False
    return bool(isprime(n))


def factorize(n: int) -> List[Tuple[int, int]]:
    """Return the prime factorisation of ``n`` as sorted ``(prime, exponent)``
    pairs.

    Trial division runs against the sieve up to ``min(sqrt(n), 2^20)``;
    a remaining composite cofactor is handed to :func:`sympy.factorint`.

    Raises:
        DomainError: If ``n`` is not in ``[1, 2^64)``.
    """
    n = int(n)
    if n < 1 or n > MAX_UINT64:
        raise DomainError(f"factorize needs 1 <= n < 2^64, got {n}.")

    factors: Dict[int, int] = {}
    bound = min(math.isqrt(n), TRIAL_DIVISION_LIMIT)
    if bound >= 2:
        for p in shared_table(bound).primes(bound).tolist():
            if p * p > n:
                break
            if n % p == 0:
                exponent = 0
                while n % p == 0:
                    n //= p
                    exponent += 1
                factors[p] = exponent

    if n > 1:
        if is_prime_deterministic(n):
            factors[n] = factors.get(n, 0) + 1
        else:
            for prime, exponent in factorint(n).items():
                factors[int(prime)] = factors.get(int(prime), 0) + int(exponent)
    return sorted(factors.items())


def prime_divisors(n: int) -> List[int]:
    return [p for p, _ in factorize(n)]
