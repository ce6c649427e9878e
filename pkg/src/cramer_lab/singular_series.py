"""Truncated Euler products: the Bateman-Horn constant C_f, the twin-prime
constant C_2, the Goldbach local factor and Mertens-type residual checks.

All products are accumulated in log-space at the configured working
precision (see :func:`cramer_lab.config.get_precision_bits`) through
:func:`cramer_lab.prime_engine.log_prime_product`, so the result depends
only on the inputs and never on how the prime range is partitioned.

Tail errors are heuristic. They are reported next to every value and are
not guaranteed bounds.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import mpmath
import numpy as np

from .config import get_precision_bits
from .errors import DomainError, InadmissibleFamilyError
from .poly_arith import Admissibility, PolynomialFamily, check_admissibility, family_root_count
from .prime_engine import MertensKind, log_prime_product, mertens_product, prime_divisors, primes_up_to

logger = logging.getLogger(__name__)

# Largest truncation used for the C_f reference value in lemma2_check.
REFERENCE_TRUNCATION_CAP = 10**7


@dataclass(frozen=True)
class SingularSeriesEstimate:
    """``C_f`` truncated at ``p <= truncation``.

    Attributes:
        family (PolynomialFamily): The family the constant belongs to.
        truncation (float): The cut-off ``T``.
        value (mpf): ``prod_{p <= T} (1 - 1/p)^{-k} (1 - omega_f(p)/p)``.
        log_value (mpf): Natural log of ``value``.
        tail_error (float): Heuristic size of ``|C_f - value|``.
        converged_fast (bool): True when ``omega_f(p) = k`` for every prime
            in ``(sqrt(T), T]``; the tail then shrinks like ``1/(T log T)``.
    """

    family: PolynomialFamily
    truncation: float
    value: mpmath.mpf
    log_value: mpmath.mpf
    tail_error: float
    converged_fast: bool

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class GoldbachLocalFactor:
    """``prod_{p | N, p >= 3} (p - 1)/(p - 2)``, kept exactly and as a float."""

    N: int
    odd_prime_divisors: Tuple[int, ...]
    exact: Fraction
    value: float


@dataclass(frozen=True)
class Lemma2Residuals:
    """Scaled deviations of Mertens-type products from their main terms.

    ``residual_i`` is
    ``|prod_{p<=T}(1-1/p)^{-k} - e^{k gamma} log^k T| / log^{k-1} T``.
    ``residual_ii`` (family supplied) is
    ``|prod_{p<=T}(1-omega_f(p)/p) - C_f e^{-k gamma} log^{-k} T| * log^{k+1} T``
    with ``C_f`` taken at ``reference_truncation``.
    """

    k: int
    truncation: float
    residual_i: float
    residual_ii: Optional[float] = None
    reference_truncation: Optional[float] = None

    def as_pair(self) -> Tuple[float, Optional[float]]:
        return self.residual_i, self.residual_ii


def ensure_admissible(family: PolynomialFamily) -> PolynomialFamily:
    """Run the admissibility check if needed and raise on a fixed prime
    divisor.

    Raises:
        InadmissibleFamilyError: Naming the obstructing prime.
    """
    if family.admissible is Admissibility.UNCHECKED:
        family = check_admissibility(family)
    if family.admissible is Admissibility.NO:
        raise InadmissibleFamilyError(family.obstruction, str(family))
    return family


def family_root_counts(family: PolynomialFamily, primes: np.ndarray) -> np.ndarray:
    """``omega_f(p)`` for each prime of ``primes``, as an ``int64`` array."""
    return np.array([family_root_count(family, p) for p in primes.tolist()], dtype=np.int64)


def _calibrated_tail(primes: np.ndarray, log_factors: np.ndarray, T: float) -> float:
    """Estimate ``c`` in a ``c / log T`` tail from the last decade.

    The running log-product over ``p in [T/10, T]`` oscillates around its
    limit with amplitude about ``c / log p``; ``c`` is the largest observed
    ``|partial - final| * log p`` in that window.
    """
    running = np.cumsum(log_factors)
    window = primes >= T / 10.0
    if not window.any():
        return 0.0
    spread = np.abs(running[window] - running[-1]) * np.log(primes[window].astype(np.float64))
    return float(spread.max())


def compute_Cf(family: PolynomialFamily, T: float) -> SingularSeriesEstimate:
    """Truncated Bateman-Horn constant of an admissible family.

    Args:
        family (PolynomialFamily): Distinct members ``f_1..f_k``.
        T (float): Truncation, ``T >= 2``.

    Returns:
        SingularSeriesEstimate: Value, log-value and heuristic tail error.

    Raises:
        DomainError: If ``T < 2``.
        InadmissibleFamilyError: If some ``omega_f(p) = p``.
    """
    if T < 2:
        raise DomainError(f"C_f truncation must be at least 2, got {T}.")
    family = ensure_admissible(family)
    k = family.k

    primes = primes_up_to(T)
    omegas = family_root_counts(family, primes)

    with mpmath.workprec(get_precision_bits()):
        log_value, _ = log_prime_product([(primes, k - 1), (primes - omegas, 1), (primes - 1, -k)])
        value = mpmath.exp(log_value)

    beyond_sqrt = primes > math.sqrt(T)
    converged_fast = bool(np.all(omegas[beyond_sqrt] == k))

    log_T = math.log(T)
    if converged_fast:
        tail_error = float(value) * k * (k - 1) / (T * log_T)
    else:
        p = primes.astype(np.float64)
        log_factors = (k - 1) * np.log(p) + np.log(p - omegas) - k * np.log(p - 1)
        tail_error = float(value) * _calibrated_tail(primes, log_factors, T) / log_T

    logger.debug(
        "C_f(%s; T=%g) = %s (tail %.3g, fast=%s)", family, T, mpmath.nstr(value, 12), tail_error, converged_fast
    )
    return SingularSeriesEstimate(
        family=family,
        truncation=float(T),
        value=value,
        log_value=log_value,
        tail_error=tail_error,
        converged_fast=converged_fast,
    )


def compute_C2(T: float) -> mpmath.mpf:
    """``prod_{3 <= p <= T} (1 - 1/(p-1)^2)``, the truncated twin-prime
    constant.

    Raises:
        DomainError: If ``T < 3``.
    """
    if T < 3:
        raise DomainError(f"C_2 truncation must be at least 3, got {T}.")
    primes = primes_up_to(T)[1:]
    with mpmath.workprec(get_precision_bits()):
        log_value, _ = log_prime_product([(primes, 1), (primes - 2, 1), (primes - 1, -2)])
        return mpmath.exp(log_value)


def c2_tail_bound(T: float) -> float:
    """Upper bound for ``sum_{p > T} 1/(p-1)^2`` (and so for the relative
    error of :func:`compute_C2`)."""
    return 1.0 / (T - 1.0)


def goldbach_local_factor(N: int) -> GoldbachLocalFactor:
    """Local factor ``prod_{p | N, p >= 3} (p-1)/(p-2)`` for even ``N``.

    Raises:
        DomainError: If ``N`` is odd or below 4.
    """
    N = int(N)
    if N % 2 != 0:
        raise DomainError(f"Goldbach local factor needs an even N, got {N}.")
    if N < 4:
        raise DomainError(f"Goldbach local factor needs N >= 4, got {N}.")

    odd = tuple(p for p in prime_divisors(N) if p > 2)
    exact = Fraction(1)
    for p in odd:
        exact *= Fraction(p - 1, p - 2)
    return GoldbachLocalFactor(N=N, odd_prime_divisors=odd, exact=exact, value=float(exact))


def lemma2_check(
    k: int,
    T: float,
    family: Optional[PolynomialFamily] = None,
    reference_T: Optional[float] = None,
) -> Lemma2Residuals:
    """Scaled residuals of the Mertens-type asymptotics at truncation ``T``.

    Both residuals are expected to stay ``O(1)`` as ``T`` grows. When a
    family is supplied the second residual uses the family's own ``k`` and
    ``C_f`` computed at ``reference_T`` (default ``min(100 T, 10^7)``, never
    below ``T``).

    Raises:
        DomainError: If ``k < 1`` or ``T < 100``.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"lemma2_check needs an integer k >= 1, got {k}.")
    if T < 100:
        raise DomainError(f"lemma2_check needs T >= 100, got {T}.")
    k = int(k)

    with mpmath.workprec(get_precision_bits()):
        log_T = mpmath.log(T)
        product = mertens_product(T, k, MertensKind.INVERSE).value
        main = mpmath.exp(k * mpmath.euler) * log_T**k
        residual_i = float(abs(product - main) / log_T ** (k - 1))

    if family is None:
        return Lemma2Residuals(k=k, truncation=float(T), residual_i=residual_i)

    family = ensure_admissible(family)
    kf = family.k
    if reference_T is None:
        reference_T = max(float(T), min(100.0 * T, float(REFERENCE_TRUNCATION_CAP)))
    reference = compute_Cf(family, reference_T)

    primes = primes_up_to(T)
    omegas = family_root_counts(family, primes)
    with mpmath.workprec(get_precision_bits()):
        log_T = mpmath.log(T)
        log_direct, _ = log_prime_product([(primes - omegas, 1), (primes, -1)])
        direct = mpmath.exp(log_direct)
        main = reference.value * mpmath.exp(-kf * mpmath.euler) * log_T ** (-kf)
        residual_ii = float(abs(direct - main) * log_T ** (kf + 1))

    return Lemma2Residuals(
        k=k,
        truncation=float(T),
        residual_i=residual_i,
        residual_ii=residual_ii,
        reference_truncation=float(reference_T),
    )
