"""Integer polynomials, root counts modulo primes and admissibility.

Polynomials over the integers are stored constant term first. Arithmetic
in F_p[x] goes through :mod:`sympy.polys.galoistools`, whose dense lists
run highest degree first; :func:`reduce_mod` does the conversion.

Root counts come in three flavours:

- :func:`count_roots_bruteforce` scans every residue (vectorised).
- :func:`count_roots_frobenius` computes ``deg gcd(x^p - x, f mod p)``.
- :func:`count_roots` dispatches between the two, with closed forms for
  linear and quadratic reductions.
"""

import itertools
import logging
import math
import operator
import re
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sympy import Poly, Symbol
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_degree,
    gf_from_int_poly,
    gf_gcd,
    gf_irreducible_p,
    gf_monic,
    gf_pow_mod,
    gf_sub,
)

from .errors import DomainError, ValidationError
from .prime_engine import factorize, is_prime_deterministic, primes_up_to

logger = logging.getLogger(__name__)

# Primes at or below this are always counted by exhaustive scan.
BRUTE_FORCE_MAX_PRIME = 64
# int64 Horner on residues stays exact while p * p < 2^63.
_EXHAUSTIVE_SCAN_MAX_PRIME = 3_037_000_499
_SCAN_CHUNK = 1 << 20
# Above this degree the screen does not factor over the integers.
FACTOR_DEGREE_LIMIT = 12

_X = Symbol("x")
_GF_X = [ZZ.one, ZZ.zero]


@dataclass(frozen=True)
class IntPolynomial:
    """A non-constant integer polynomial with positive leading coefficient.

    Attributes:
        coefficients (Tuple[int, ...]): Coefficients, constant term first,
            without trailing zeros.
    """

    coefficients: Tuple[int, ...]

    def __post_init__(self) -> None:
        try:
            coeffs = [operator.index(c) for c in self.coefficients]
        except TypeError as exc:
            raise ValidationError(
                f"Polynomial coefficients must be integers, got {self.coefficients!r}."
            ) from exc
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise ValidationError(f"Polynomial must have degree >= 1, got {coeffs or [0]}.")
        if coeffs[-1] <= 0:
            raise ValidationError(
                f"Leading coefficient must be positive, got {coeffs[-1]} in {_format(coeffs)}."
            )
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[-1]

    @cached_property
    def content(self) -> int:
        return math.gcd(*self.coefficients)

    def primitive_part(self) -> "IntPolynomial":
        c = self.content
        if c == 1:
            return self
        return IntPolynomial(tuple(a // c for a in self.coefficients))

    def __call__(self, n: int) -> int:
        return evaluate(self, n)

    def __str__(self) -> str:
        return _format(self.coefficients)


def _format(coeffs: Sequence[int]) -> str:
    terms: List[str] = []
    for power in range(len(coeffs) - 1, -1, -1):
        c = coeffs[power]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        magnitude = abs(c)
        if power == 0:
            body = str(magnitude)
        else:
            head = "" if magnitude == 1 else str(magnitude)
            body = head + ("x" if power == 1 else f"x^{power}")
        terms.append(sign + body)
    if not terms:
        return "0"
    text = "".join(terms)
    return text[1:] if text.startswith("+") else text


def evaluate(f: IntPolynomial, n: int) -> int:
    """Exact Horner evaluation of ``f`` at ``n``."""
    acc = 0
    for c in reversed(f.coefficients):
        acc = acc * n + c
    return acc


def evaluate_array(f: IntPolynomial, values: np.ndarray) -> np.ndarray:
    """Horner evaluation over an ``int64`` array.

    The caller guarantees that every intermediate fits in 63 bits (see
    :func:`max_abs_value`).
    """
    acc = np.zeros(values.shape, dtype=np.int64)
    for c in reversed(f.coefficients):
        acc = acc * values + c
    return acc


def max_abs_value(f: IntPolynomial, x: int) -> int:
    """Upper bound for ``|f(n)|`` (and every Horner partial) over ``0 <= n <= x``."""
    return sum(abs(c) * x**i for i, c in enumerate(f.coefficients))


_TERM = re.compile(r"^(\d*)\*?(x(?:(?:\^|\*\*)(\d+))?)?$")


def parse_polynomial(text: str) -> IntPolynomial:
    """Parse standard notation such as ``"x^2+x+1"`` or ``"2x^3-5"``.

    Raises:
        ValidationError: Naming the offending token, for non-integer
            coefficients or malformed terms.
    """
    compact = re.sub(r"\s+", "", text).lower()
    if not compact:
        raise ValidationError("Empty polynomial.")

    tokens = re.findall(r"[+-]?[^+-]+", compact)
    if "".join(tokens) != compact:
        raise ValidationError(f"Cannot parse polynomial {text!r}: stray sign.")

    coeffs: dict = {}
    for token in tokens:
        sign = -1 if token.startswith("-") else 1
        body = token.lstrip("+-")
        match = _TERM.match(body)
        if not match or (not match.group(1) and match.group(2) is None):
            raise ValidationError(
                f"Cannot parse term {token!r} in {text!r}; coefficients must be integers."
            )
        coeff = int(match.group(1)) if match.group(1) else 1
        if match.group(2) is None:
            power = 0
        else:
            power = int(match.group(3)) if match.group(3) else 1
        coeffs[power] = coeffs.get(power, 0) + sign * coeff

    degree = max(coeffs)
    return IntPolynomial(tuple(coeffs.get(i, 0) for i in range(degree + 1)))


def poly_multiply(f: IntPolynomial, g: IntPolynomial) -> IntPolynomial:
    out = [0] * (f.degree + g.degree + 1)
    for i, a in enumerate(f.coefficients):
        for j, b in enumerate(g.coefficients):
            out[i + j] += a * b
    return IntPolynomial(tuple(out))


def as_poly(f: IntPolynomial) -> Poly:
    """``f`` as a :class:`sympy.Poly` over the integers."""
    return Poly(list(reversed(f.coefficients)), _X, domain=ZZ)


def from_poly(poly: Poly) -> IntPolynomial:
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    if coeffs[-1] < 0:
        coeffs = [-c for c in coeffs]
    return IntPolynomial(tuple(coeffs))


def reduce_mod(f: IntPolynomial, p: int) -> list:
    """``f mod p`` as a galoistools list, highest degree first, stripped."""
    return gf_from_int_poly(ZZ.map(list(reversed(f.coefficients))), p)


# --- root counting --------------------------------------------------------


@dataclass(frozen=True)
class RootCount:
    """Number of residues ``l`` in ``[0, p)`` with ``f(l) = 0 mod p``."""

    p: int
    omega: int


def _require_prime(p: int) -> None:
    if not is_prime_deterministic(p):
        raise DomainError(f"{p} is not prime.")


def count_roots_bruteforce(f: IntPolynomial, p: int) -> RootCount:
    """Count roots of ``f`` modulo ``p`` by scanning every residue.

    If every coefficient is divisible by ``p`` the count is ``p``.

    Raises:
        DomainError: If ``p`` is not prime or too large to scan.
    """
    p = int(p)
    _require_prime(p)
    g = reduce_mod(f, p)
    if not g:
        return RootCount(p, p)
    if gf_degree(g) == 0:
        return RootCount(p, 0)
    if p > _EXHAUSTIVE_SCAN_MAX_PRIME:
        raise DomainError(f"Prime {p} is too large for an exhaustive root scan.")

    residues = [int(c) for c in g]
    omega = 0
    for start in range(0, p, _SCAN_CHUNK):
        ell = np.arange(start, min(start + _SCAN_CHUNK, p), dtype=np.int64)
        acc = np.zeros(ell.shape, dtype=np.int64)
        for c in residues:
            acc = (acc * ell + c) % p
        omega += int(np.count_nonzero(acc == 0))
    return RootCount(p, omega)


def count_roots_frobenius(f: IntPolynomial, p: int) -> RootCount:
    """Count distinct roots of ``f`` modulo ``p`` as
    ``deg gcd(x^p - x, f mod p)``.

    A leading coefficient divisible by ``p`` is handled by reducing first;
    a nonzero constant reduction has no roots.

    Raises:
        DomainError: If ``p`` is not prime, or if ``f = 0 mod p`` (use
            :func:`count_roots_bruteforce`, which returns ``p``).
    """
    p = int(p)
    _require_prime(p)
    g = reduce_mod(f, p)
    if not g:
        raise DomainError(
            f"{f} vanishes identically modulo {p}; use the brute-force count."
        )
    if gf_degree(g) == 0:
        return RootCount(p, 0)

    _, g = gf_monic(g, p, ZZ)
    frobenius = gf_pow_mod(_GF_X, p, g, p, ZZ)
    common = gf_gcd(g, gf_sub(frobenius, _GF_X, p, ZZ), p, ZZ)
    return RootCount(p, gf_degree(common))


def count_roots(f: IntPolynomial, p: int) -> RootCount:
    """Count distinct roots of ``f`` modulo ``p`` with the cheapest exact
    method: exhaustive scan for ``p <= 64`` or ``f = 0 mod p``, closed forms
    for linear and quadratic reductions, Frobenius gcd otherwise."""
    p = int(p)
    if p <= BRUTE_FORCE_MAX_PRIME:
        return count_roots_bruteforce(f, p)

    g = reduce_mod(f, p)
    if not g:
        return RootCount(p, p)
    degree = gf_degree(g)
    if degree == 0:
        return RootCount(p, 0)
    if degree == 1:
        return RootCount(p, 1)
    if degree == 2 and p % 2 == 1:
        a, b, c = (int(v) for v in g)
        disc = (b * b - 4 * a * c) % p
        if disc == 0:
            return RootCount(p, 1)
        return RootCount(p, 2 if pow(disc, (p - 1) // 2, p) == 1 else 0)
    return count_roots_frobenius(f, p)


def resultant(f: IntPolynomial, g: IntPolynomial) -> int:
    """Resultant of ``f`` and ``g`` over the integers."""
    return int(as_poly(f).resultant(as_poly(g)))


# --- families -------------------------------------------------------------


class Admissibility(str, Enum):
    YES = "yes"
    NO = "no"
    UNCHECKED = "unchecked"


@dataclass(frozen=True)
class PolynomialFamily:
    """An ordered family ``f_1, ..., f_k`` of distinct polynomials.

    Attributes:
        members (Tuple[IntPolynomial, ...]): The ``f_i``.
        admissible (Admissibility): Set by :func:`check_admissibility`.
        obstruction (Optional[int]): The prime ``p`` with
            ``omega_f(p) = p`` when not admissible.
        note (str): Justification recorded by the admissibility check.
    """

    members: Tuple[IntPolynomial, ...]
    admissible: Admissibility = Admissibility.UNCHECKED
    obstruction: Optional[int] = None
    note: str = ""

    def __post_init__(self) -> None:
        members = tuple(self.members)
        if not members:
            raise ValidationError("A polynomial family needs at least one member.")
        if len(set(members)) != len(members):
            raise ValidationError(f"Family members must be distinct: {_join(members)}.")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "admissible", Admissibility(self.admissible))

    @property
    def k(self) -> int:
        return len(self.members)

    @cached_property
    def product(self) -> IntPolynomial:
        result = self.members[0]
        for member in self.members[1:]:
            result = poly_multiply(result, member)
        return result

    @property
    def product_degree(self) -> int:
        """``deg f = sum of deg f_i``."""
        return sum(m.degree for m in self.members)

    @property
    def degree_product(self) -> int:
        """``prod of deg f_i``."""
        return math.prod(m.degree for m in self.members)

    @cached_property
    def resultant_bound(self) -> float:
        """Largest ``|Res(f_i, f_j)|`` over member pairs; above it the roots
        of distinct members never collide modulo ``p``."""
        bound = 0
        for f, g in itertools.combinations(self.members, 2):
            r = abs(resultant(f, g))
            if r == 0:
                return math.inf
            bound = max(bound, r)
        return bound

    def __str__(self) -> str:
        return _join(self.members)


def _join(members: Sequence[IntPolynomial]) -> str:
    return ",".join(str(m) for m in members)


def parse_family(text: str) -> PolynomialFamily:
    """Parse a comma-separated family such as ``"x,x+2"``."""
    parts = [part for part in text.split(",")]
    if any(not part.strip() for part in parts):
        raise ValidationError(f"Empty member in family {text!r}.")
    return PolynomialFamily(tuple(parse_polynomial(part) for part in parts))


def member_root_counts(family: PolynomialFamily, p: int) -> Tuple[RootCount, ...]:
    """The per-member counts ``omega_i(p)``."""
    return tuple(count_roots(m, p) for m in family.members)


def family_root_count(family: PolynomialFamily, p: int) -> int:
    """``omega_f(p)`` for the product ``f`` of the family.

    Above the resultant bound the member root sets are disjoint modulo
    ``p``, so the count is the sum of the member counts.
    """
    p = int(p)
    if p > family.resultant_bound:
        counts = member_root_counts(family, p)
        if all(c.omega < p for c in counts):
            return sum(c.omega for c in counts)
    return count_roots(family.product, p).omega


def check_admissibility(family: PolynomialFamily) -> PolynomialFamily:
    """Decide whether ``omega_f(p) < p`` for every prime ``p``.

    A prime dividing ``content(f)`` has ``omega_f(p) = p`` outright. Of the
    rest only ``p <= deg f`` need a scan: for larger ``p``, ``f mod p`` is a
    nonzero polynomial of degree at most ``deg f < p`` and so has fewer
    than ``p`` roots. Candidates are checked smallest first.

    Returns:
        PolynomialFamily: A copy with ``admissible`` (and ``obstruction``,
        ``note``) set.

    Raises:
        ValidationError: If members repeat.
    """
    if len(set(family.members)) != len(family.members):
        raise ValidationError(f"Family members must be distinct: {family}.")

    f = family.product
    content_primes = {p for p, _ in factorize(f.content)} if f.content > 1 else set()
    candidates = sorted(content_primes.union(primes_up_to(f.degree).tolist()))

    for p in candidates:
        if p in content_primes or count_roots_bruteforce(f, p).omega == p:
            return replace(
                family,
                admissible=Admissibility.NO,
                obstruction=p,
                note=f"omega_f({p}) = {p}",
            )

    note = (
        f"scanned primes p <= {f.degree}; content is 1, so for larger p "
        f"omega_f(p) <= deg f = {f.degree} < p"
    )
    return replace(family, admissible=Admissibility.YES, obstruction=None, note=note)


# --- irreducibility screen ------------------------------------------------


class ScreenStatus(str, Enum):
    CERTIFIED = "certified_irreducible"
    INCONCLUSIVE = "inconclusive"
    REDUCIBLE = "reducible"


@dataclass(frozen=True)
class ScreenVerdict:
    status: ScreenStatus
    prime: Optional[int] = None
    witness: Tuple[IntPolynomial, ...] = ()
    method: str = ""

    def __str__(self) -> str:
        if self.status is ScreenStatus.REDUCIBLE:
            return f"reducible({''.join(f'({w})' for w in self.witness)})"
        if self.status is ScreenStatus.CERTIFIED and self.prime is not None:
            return f"certified_irreducible({self.prime})"
        return self.status.value


def irreducibility_screen(f: IntPolynomial, prime_budget: int = 100) -> ScreenVerdict:
    """Cheap screen for irreducibility over the rationals.

    Degree one is certified outright. Otherwise a prime ``p <= prime_budget``
    not dividing the leading coefficient with ``f mod p`` irreducible
    certifies ``f``. Failing that, polynomials up to
    :data:`FACTOR_DEGREE_LIMIT` are factored over the integers: more than
    one factor gives a reducible verdict with the factors as witness, a
    single one certifies. Anything else is inconclusive.
    """
    if f.content != 1:
        logger.warning("Dividing out content %d of %s before screening.", f.content, f)
        f = f.primitive_part()

    if f.degree == 1:
        return ScreenVerdict(ScreenStatus.CERTIFIED, method="degree one")

    for p in primes_up_to(prime_budget).tolist():
        if f.leading % p == 0:
            continue
        if gf_irreducible_p(reduce_mod(f, p), p, ZZ):
            return ScreenVerdict(ScreenStatus.CERTIFIED, prime=p, method=f"irreducible modulo {p}")

    if f.degree <= FACTOR_DEGREE_LIMIT:
        _, factors = as_poly(f).factor_list()
        witness = tuple(from_poly(g) for g, multiplicity in factors for _ in range(multiplicity))
        if len(witness) > 1:
            return ScreenVerdict(ScreenStatus.REDUCIBLE, witness=witness, method="factorisation over Z")
        return ScreenVerdict(ScreenStatus.CERTIFIED, method="factorisation over Z")

    logger.warning("Irreducibility of %s is inconclusive within prime budget %d.", f, prime_budget)
    return ScreenVerdict(ScreenStatus.INCONCLUSIVE, method=f"no certificate for p <= {prime_budget}")
