"""Numerical integration of the main-term integrals.

Two independent integrators are provided:

- :func:`integrate_adaptive_simpson`, recursive adaptive Simpson with
  Richardson correction (the production path);
- :func:`refine_composite_simpson`, composite Simpson on a logarithmic
  grid with step halving until successive results agree (the refinement
  oracle used to cross-check the first).
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

ABS_TOLERANCE = 1e-12
REL_TOLERANCE = 1e-9
MAX_DEPTH = 60
_PILOT_PANELS = 64


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int

    def __float__(self) -> float:
        return self.value


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 3.0 * (fa + 4.0 * fm + fb)


def integrate_adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    abs_tol: float = ABS_TOLERANCE,
    rel_tol: float = REL_TOLERANCE,
    max_depth: int = MAX_DEPTH,
) -> QuadratureResult:
    """Adaptive Simpson's rule.

    The global tolerance is ``max(abs_tol, rel_tol * |I0|)`` where ``I0`` is
    a 64-panel composite Simpson pilot estimate. Each bisection halves the
    tolerance handed to its children; recursion stops at ``max_depth``.

    Args:
        f: Scalar integrand.
        a: Lower bound.
        b: Upper bound.
        abs_tol: Absolute floor of the tolerance.
        rel_tol: Relative target.
        max_depth: Bisection cap.

    Returns:
        QuadratureResult: Value, accumulated error estimate and number of
        integrand evaluations.
    """
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    if a > b:
        flipped = integrate_adaptive_simpson(f, b, a, abs_tol, rel_tol, max_depth)
        return QuadratureResult(-flipped.value, flipped.error_estimate, flipped.evaluations)

    evaluations = 0

    def call(t: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return float(f(t))

    grid = np.linspace(a, b, 2 * _PILOT_PANELS + 1)
    values = [call(t) for t in grid.tolist()]
    h = (b - a) / (2 * _PILOT_PANELS)
    pilot = h / 3.0 * (values[0] + values[-1] + 4.0 * sum(values[1:-1:2]) + 2.0 * sum(values[2:-1:2]))
    tol = max(abs_tol, rel_tol * abs(pilot))

    def adaptive(lo: float, hi: float, flo: float, fmid: float, fhi: float, whole: float, depth: int, tol: float):
        mid = (lo + hi) / 2.0
        half = (hi - lo) / 2.0
        flm = call((lo + mid) / 2.0)
        frm = call((mid + hi) / 2.0)
        left = _simpson(flo, flm, fmid, half / 2.0)
        right = _simpson(fmid, frm, fhi, half / 2.0)
        error = (left + right - whole) / 15.0
        if depth >= max_depth or abs(error) < tol:
            return left + right + error, abs(error)
        lv, le = adaptive(lo, mid, flo, flm, fmid, left, depth + 1, tol / 2.0)
        rv, re_ = adaptive(mid, hi, fmid, frm, fhi, right, depth + 1, tol / 2.0)
        return lv + rv, le + re_

    fa, fm, fb = values[0], values[_PILOT_PANELS], values[-1]
    value, error = adaptive(a, b, fa, fm, fb, _simpson(fa, fm, fb, (b - a) / 2.0), 0, tol)
    return QuadratureResult(value, error, evaluations)


def refine_composite_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-11,
    start_panels: int = 64,
    max_panels: int = 1 << 22,
) -> QuadratureResult:
    """Composite Simpson in ``u = log t`` with step halving.

    ``f`` must accept numpy arrays. The number of panels doubles until two
    successive estimates ``S_n``, ``S_2n`` satisfy
    ``|S_2n - S_n| / 15 <= rel_tol * |S_2n|``; the Richardson-corrected
    ``S_2n + (S_2n - S_n)/15`` is returned.

    Raises:
        DomainError: If ``a <= 0`` (no logarithmic substitution).
    """
    if a <= 0:
        raise DomainError(f"Logarithmic substitution needs a > 0, got {a}.")
    u0, u1 = math.log(a), math.log(b)

    def estimate(panels: int) -> float:
        u = np.linspace(u0, u1, 2 * panels + 1)
        t = np.exp(u)
        g = np.asarray(f(t), dtype=np.float64) * t
        h = (u1 - u0) / (2 * panels)
        return float(h / 3.0 * (g[0] + g[-1] + 4.0 * g[1:-1:2].sum() + 2.0 * g[2:-1:2].sum()))

    panels = start_panels
    previous = estimate(panels)
    evaluations = 2 * panels + 1
    while True:
        panels *= 2
        current = estimate(panels)
        evaluations += 2 * panels + 1
        delta = (current - previous) / 15.0
        if abs(delta) <= rel_tol * abs(current) or panels >= max_panels:
            return QuadratureResult(current + delta, abs(delta), evaluations)
        previous = current


def log_power_integrand(k: int) -> Callable:
    """``t -> 1 / (log t)^k`` for scalars or arrays."""

    def integrand(t):
        return 1.0 / np.log(t) ** k

    return integrand


def goldbach_integrand(N: float) -> Callable:
    """``t -> 1 / (log t * log(N - t))`` for scalars or arrays."""

    def integrand(t):
        return 1.0 / (np.log(t) * np.log(N - t))

    return integrand


def li_k(x: float, k: int, lower: float = 2.0) -> float:
    """``int_lower^x dt / (log t)^k`` by adaptive Simpson."""
    if x < lower:
        raise DomainError(f"Upper limit {x} lies below the lower limit {lower}.")
    return integrate_adaptive_simpson(log_power_integrand(k), lower, x).value


def li_k_refined(x: float, k: int, lower: float = 2.0) -> float:
    """Refinement-oracle counterpart of :func:`li_k`."""
    return refine_composite_simpson(log_power_integrand(k), lower, x).value


def goldbach_integral(N: float) -> float:
    """``int_2^{N-2} dt / (log t log(N - t))`` by adaptive Simpson."""
    if N < 8:
        raise DomainError(f"Goldbach integral needs N >= 8, got {N}.")
    return integrate_adaptive_simpson(goldbach_integrand(N), 2.0, N - 2.0).value


def goldbach_integral_refined(N: float) -> float:
    """Refinement-oracle counterpart of :func:`goldbach_integral`, using the
    symmetry ``t -> N - t`` to integrate over ``[2, N/2]`` only."""
    if N < 8:
        raise DomainError(f"Goldbach integral needs N >= 8, got {N}.")
    return 2.0 * refine_composite_simpson(goldbach_integrand(N), 2.0, N / 2.0).value
