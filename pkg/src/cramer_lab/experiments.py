"""Observed-versus-predicted experiments on samples of the random set.

Three counted quantities are supported:

- ``bateman_horn``: ``#{n <= x : f_1(n), ..., f_k(n) all members}``
- ``goldbach``: ordered representations ``N = n + (N - n)`` by members
- ``prime_density``: primes ``p <= x`` that are members

Each has an asymptotic prediction (a singular series times a quadrature
or a Stieltjes sum), an exact model expectation (a finite sum of
membership probabilities) and a Kim-Vu concentration certificate over a
seed ensemble. :func:`run_ensemble` ties them together into a
:class:`CountReport`.
"""

import json
import logging
import math
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from . import __version__
from .config import get_default_workers
from .errors import DomainError, ValidationError
from .poly_arith import PolynomialFamily, evaluate_array, max_abs_value, parse_family
from .prime_engine import PrimeTable, shared_table
from .quadrature import goldbach_integral, li_k
from .sampler import (
    CHUNK,
    CLAMP_POLICY,
    DEFAULT_N_MIN,
    ModelParameters,
    SampledSet,
    SamplingFrame,
    draw_at,
    mertens_at,
    probabilities_at,
    threshold_T,
)
from .singular_series import (
    GoldbachLocalFactor,
    SingularSeriesEstimate,
    compute_C2,
    compute_Cf,
    goldbach_local_factor,
)

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION = 1e6
MIN_CERTIFICATE_SEEDS = 30
# Polynomial values (and Horner partials) must stay below this.
_VALUE_LIMIT = 1 << 62


class ExperimentKind(str, Enum):
    BATEMAN_HORN = "bateman_horn"
    GOLDBACH = "goldbach"
    PRIME_DENSITY = "prime_density"


class Normalization(str, Enum):
    PRODUCT = "product"  # C_f / prod deg f_i
    SUM = "sum"  # C_f / deg f


class PrimeForm(str, Enum):
    MERTENS = "mertens"  # prod_{p <= T(x)} (1 - 1/p)^-1
    ASYMPTOTIC = "asymptotic"  # e^gamma log T(x)


# --- counting -------------------------------------------------------------


def _check_values_fit(family: PolynomialFamily, x: int) -> None:
    for f in family.members:
        if max_abs_value(f, x) >= _VALUE_LIMIT:
            raise ValidationError(f"Values of {f} on [1, {x}] do not fit in 62 bits.")


def _chunks(first: int, last: int):
    for start in range(first, last + 1, CHUNK):
        yield np.arange(start, min(start + CHUNK, last + 1), dtype=np.int64)


def required_range(family: PolynomialFamily, x: int, n_min: int = DEFAULT_N_MIN) -> Optional[Tuple[int, int]]:
    """Smallest and largest value ``>= n_min`` taken by any ``f_i`` on
    ``[1, x]``, or ``None`` if there is none."""
    _check_values_fit(family, x)
    lo: Optional[int] = None
    hi: Optional[int] = None
    for n in _chunks(1, x):
        for f in family.members:
            v = evaluate_array(f, n)
            v = v[v >= n_min]
            if v.size:
                vmin, vmax = int(v.min()), int(v.max())
                lo = vmin if lo is None else min(lo, vmin)
                hi = vmax if hi is None else max(hi, vmax)
    if lo is None:
        return None
    return lo, hi


def count_bateman_horn(sample: SampledSet, family: PolynomialFamily, x: int) -> int:
    """``#{1 <= n <= x : f_i(n) >= 2 and f_i(n) in the sample for all i}``.

    Raises:
        ValidationError: If the sample does not cover the values involved
            (the message states the required range).
    """
    x = int(x)
    if x < 1:
        return 0
    n_min = sample.params.n_min
    needed = required_range(family, x, n_min)
    if needed is None:
        return 0
    sample.require(*needed)

    total = 0
    for n in _chunks(1, x):
        hit = np.ones(n.size, dtype=bool)
        for f in family.members:
            v = evaluate_array(f, n)
            eligible = v >= n_min
            index = np.where(eligible, v, sample.lo) - sample.lo
            hit &= eligible & sample.membership[index]
        total += int(np.count_nonzero(hit))
    return total


def count_bateman_horn_sparse(family: PolynomialFamily, x: int, params: ModelParameters) -> int:
    """Same count as :func:`count_bateman_horn`, drawing membership directly
    at the polynomial values instead of reading a dense sample."""
    x = int(x)
    if x < 1:
        return 0
    _check_values_fit(family, x)
    total = 0
    for n in _chunks(1, x):
        hit = np.ones(n.size, dtype=bool)
        for f in family.members:
            hit &= draw_at(evaluate_array(f, n), params)
        total += int(np.count_nonzero(hit))
    return total


def count_goldbach(sample: SampledSet, N: int) -> int:
    """Ordered count ``sum_{2 <= n <= N-2} 1(n) 1(N - n)``.

    Raises:
        DomainError: If ``N`` is odd.
        ValidationError: If the sample does not cover the range involved.
    """
    N = int(N)
    if N % 2 != 0:
        raise DomainError(f"Goldbach counts need an even N, got {N}.")
    low = max(2, sample.params.n_min)
    high = N - low
    if high < low:
        return 0
    seg = sample.indicator(low, high)
    return int(np.count_nonzero(seg & seg[::-1]))


def count_prime_members(sample: SampledSet, primes: PrimeTable, x: int) -> int:
    """``#{p <= x prime : p in the sample}``.

    Raises:
        ValidationError: If the table or the sample does not reach ``x``.
    """
    x = int(x)
    if x < 2:
        return 0
    if primes.limit < x:
        raise ValidationError(f"Prime table covers [2, {primes.limit}] but [2, {x}] is required.")
    ps = primes.primes(x)
    ps = ps[ps >= sample.params.n_min]
    if not ps.size:
        return 0
    return int(np.count_nonzero(sample.contains_many(ps)))


# --- predictions ----------------------------------------------------------


def predict_bateman_horn(
    family: PolynomialFamily,
    x: float,
    Cf: SingularSeriesEstimate,
    normalization: Normalization = Normalization.PRODUCT,
) -> float:
    """``(C_f / d) * int_2^x dt / (log t)^k`` with ``d = prod deg f_i``
    (``normalization="product"``) or ``d = deg f`` (``"sum"``).

    Raises:
        DomainError: If ``x < 100``.
    """
    if x < 100:
        raise DomainError(f"Bateman-Horn predictions need x >= 100, got {x}.")
    normalization = Normalization(normalization)
    divisor = family.degree_product if normalization is Normalization.PRODUCT else family.product_degree
    return float(Cf.value) / divisor * li_k(x, family.k)


def predict_goldbach(N: int, C2: float, local: GoldbachLocalFactor) -> float:
    """``2 C_2 * local * int_2^{N-2} dt / (log t log(N - t))``.

    Raises:
        DomainError: If ``N`` is odd or below 100.
        ValidationError: If ``local`` belongs to another ``N``.
    """
    N = int(N)
    if N % 2 != 0:
        raise DomainError(f"Goldbach predictions need an even N, got {N}.")
    if N < 100:
        raise DomainError(f"Goldbach predictions need N >= 100, got {N}.")
    if local.N != N:
        raise ValidationError(f"Local factor was computed for N={local.N}, not {N}.")
    return 2.0 * float(C2) * local.value * goldbach_integral(N)


def prime_reciprocal_log_sum(x: float, table: Optional[PrimeTable] = None) -> float:
    """``sum_{sqrt(x) < p <= x} 1/log p``."""
    x = int(math.floor(x))
    table = table if table is not None and table.limit >= x else shared_table(x)
    ps = table.primes(x)[table.pi(math.isqrt(x)) :]
    return math.fsum((1.0 / np.log(ps.astype(np.float64))).tolist())


def prime_density_factor(x: float, form: PrimeForm = PrimeForm.MERTENS) -> float:
    """The factor in front of the Stieltjes sum: ``M(T(x))`` or
    ``e^gamma log T(x)``."""
    T = threshold_T(x)
    if PrimeForm(form) is PrimeForm.MERTENS:
        return mertens_at(T)
    return math.exp(float(mpmath.euler)) * math.log(T)


def predict_prime_members(
    x: float,
    form: PrimeForm = PrimeForm.MERTENS,
    table: Optional[PrimeTable] = None,
) -> float:
    """Predicted number of primes ``<= x`` in the random set.

    Raises:
        DomainError: If ``x < 1000``.
    """
    if x < 1000:
        raise DomainError(f"Prime-density predictions need x >= 1000, got {x}.")
    return prime_density_factor(x, form) * prime_reciprocal_log_sum(x, table)


# --- exact expectations ---------------------------------------------------


def expected_bateman_horn(family: PolynomialFamily, x: int, params: Optional[ModelParameters] = None) -> float:
    """Exact expectation of :func:`count_bateman_horn`.

    Each ``n`` contributes the product of the probabilities of the distinct
    values among ``f_1(n), ..., f_k(n)``.
    """
    n_min = params.n_min if params is not None else DEFAULT_N_MIN
    x = int(x)
    if x < 1:
        return 0.0
    _check_values_fit(family, x)
    partials = []
    for n in _chunks(1, x):
        weight = np.ones(n.size, dtype=np.float64)
        seen: List[np.ndarray] = []
        for f in family.members:
            v = evaluate_array(f, n)
            p = probabilities_at(v, n_min)
            for earlier in seen:
                p = np.where(v == earlier, 1.0, p)
            weight *= p
            seen.append(v)
        partials.append(math.fsum(weight.tolist()))
    return math.fsum(partials)


def expected_goldbach(N: int, params: Optional[ModelParameters] = None) -> float:
    """Exact expectation of :func:`count_goldbach`; the middle term
    ``n = N/2`` contributes ``p(N/2)``."""
    n_min = params.n_min if params is not None else DEFAULT_N_MIN
    N = int(N)
    if N % 2 != 0:
        raise DomainError(f"Goldbach counts need an even N, got {N}.")
    if N < 4:
        return 0.0
    probs = probabilities_at(np.arange(0, N + 1, dtype=np.int64), n_min)
    terms = probs[2 : N - 1] * probs[N - 2 : 1 : -1]
    terms[N // 2 - 2] = probs[N // 2]
    return math.fsum(terms.tolist())


def expected_prime_members(x: int, params: Optional[ModelParameters] = None, table: Optional[PrimeTable] = None) -> float:
    """Exact expectation of :func:`count_prime_members`."""
    n_min = params.n_min if params is not None else DEFAULT_N_MIN
    x = int(x)
    if x < 2:
        return 0.0
    table = table if table is not None and table.limit >= x else shared_table(x)
    return math.fsum(probabilities_at(table.primes(x), n_min).tolist())


# --- Kim-Vu certificates --------------------------------------------------


def kimvu_threshold(k: int, lam: float, E: float, E_prime: float) -> float:
    """``8^k sqrt(k!) lam^k sqrt(E' E)``."""
    return 8.0**k * math.sqrt(math.factorial(k)) * lam**k * math.sqrt(E_prime * E)


@dataclass(frozen=True)
class KimVuCertificate:
    """Empirical check of the Kim-Vu deviation bound over a seed ensemble.

    ``expectation`` is the ensemble mean standing in for ``E(Y)``;
    ``tail_bound`` is ``n_vars^(k-1) e^(-lam)`` without the implied constant.
    """

    k: int
    n_vars: int
    lam: float
    E: float
    E_prime: float
    threshold: float
    expectation: float
    deviations: Tuple[float, ...]
    violations: int
    tail_bound: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "n_vars": self.n_vars,
            "lambda": self.lam,
            "E": self.E,
            "E_prime": self.E_prime,
            "threshold": self.threshold,
            "expectation": self.expectation,
            "deviations": list(self.deviations),
            "violations": self.violations,
            "tail_bound": self.tail_bound,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KimVuCertificate":
        return cls(
            k=data["k"],
            n_vars=data["n_vars"],
            lam=data["lambda"],
            E=data["E"],
            E_prime=data["E_prime"],
            threshold=data["threshold"],
            expectation=data["expectation"],
            deviations=tuple(data["deviations"]),
            violations=data["violations"],
            tail_bound=data["tail_bound"],
        )


def certify_observations(
    k: int,
    n_vars: int,
    lam: float,
    E_prime: float,
    observations: Sequence[int],
) -> KimVuCertificate:
    """Build a certificate from per-seed counts ``Y_s``."""
    if not observations:
        raise ValidationError("A certificate needs at least one observation.")
    mean = math.fsum(observations) / len(observations)
    E = max(mean, E_prime)
    threshold = kimvu_threshold(k, lam, E, E_prime)
    deviations = tuple(abs(y - mean) for y in observations)
    return KimVuCertificate(
        k=k,
        n_vars=n_vars,
        lam=lam,
        E=E,
        E_prime=E_prime,
        threshold=threshold,
        expectation=mean,
        deviations=deviations,
        violations=sum(1 for d in deviations if d > threshold),
        tail_bound=float(n_vars) ** (k - 1) * math.exp(-lam),
    )


# --- experiments and ensembles --------------------------------------------


@dataclass(frozen=True)
class Experiment:
    """One experiment configuration.

    Attributes:
        kind (ExperimentKind): Which quantity is counted.
        x (int): ``x`` for ``bateman_horn`` and ``prime_density``; ``N`` for
            ``goldbach``.
        family (Optional[PolynomialFamily]): Required for ``bateman_horn``.
        n_min (int): Start of the support of the random set.
        truncation (float): Euler-product truncation for ``C_f`` or ``C_2``.
        normalization (Normalization): Bateman-Horn divisor.
        prime_form (PrimeForm): Prime-density factor.
        kimvu_lambda (Optional[float]): Override of the certificate ``lambda``.
    """

    kind: ExperimentKind
    x: int
    family: Optional[PolynomialFamily] = None
    n_min: int = DEFAULT_N_MIN
    truncation: float = DEFAULT_TRUNCATION
    normalization: Normalization = Normalization.PRODUCT
    prime_form: PrimeForm = PrimeForm.MERTENS
    kimvu_lambda: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ExperimentKind(self.kind))
        object.__setattr__(self, "normalization", Normalization(self.normalization))
        object.__setattr__(self, "prime_form", PrimeForm(self.prime_form))
        if int(self.x) != self.x:
            raise ValidationError(f"Experiment size must be an integer, got {self.x!r}.")
        object.__setattr__(self, "x", int(self.x))
        object.__setattr__(self, "truncation", float(self.truncation))
        ModelParameters(seed=0, n_min=self.n_min)
        if self.kind is ExperimentKind.BATEMAN_HORN and self.family is None:
            raise ValidationError("A Bateman-Horn experiment needs a polynomial family.")
        if self.kind is ExperimentKind.GOLDBACH and self.x % 2 != 0:
            raise DomainError(f"Goldbach experiments need an even N, got {self.x}.")

    def params(self) -> Dict[str, Any]:
        size_key = "N" if self.kind is ExperimentKind.GOLDBACH else "x"
        out: Dict[str, Any] = {size_key: self.x, "n_min": self.n_min, "truncation": self.truncation}
        if self.kind is ExperimentKind.BATEMAN_HORN:
            out["family"] = str(self.family)
            out["normalization"] = self.normalization.value
        if self.kind is ExperimentKind.PRIME_DENSITY:
            out["prime_form"] = self.prime_form.value
        if self.kimvu_lambda is not None:
            out["kimvu_lambda"] = self.kimvu_lambda
        return out

    @classmethod
    def from_params(cls, kind: str, params: Dict[str, Any]) -> "Experiment":
        kind = ExperimentKind(kind)
        size = params["N"] if kind is ExperimentKind.GOLDBACH else params["x"]
        family = parse_family(params["family"]) if "family" in params else None
        return cls(
            kind=kind,
            x=size,
            family=family,
            n_min=params.get("n_min", DEFAULT_N_MIN),
            truncation=params.get("truncation", DEFAULT_TRUNCATION),
            normalization=params.get("normalization", Normalization.PRODUCT),
            prime_form=params.get("prime_form", PrimeForm.MERTENS),
            kimvu_lambda=params.get("kimvu_lambda"),
        )


@dataclass(frozen=True)
class Prediction:
    value: float
    details: Dict[str, Any] = field(default_factory=dict)


def predict(experiment: Experiment) -> Prediction:
    """Asymptotic prediction for an experiment, with the constants used."""
    kind = experiment.kind
    if kind is ExperimentKind.BATEMAN_HORN:
        Cf = compute_Cf(experiment.family, experiment.truncation)
        value = predict_bateman_horn(Cf.family, experiment.x, Cf, experiment.normalization)
        return Prediction(
            value,
            {
                "C_f": float(Cf.value),
                "C_f_tail_error": Cf.tail_error,
                "C_f_tail_error_rigorous": False,
                "converged_fast": Cf.converged_fast,
            },
        )
    if kind is ExperimentKind.GOLDBACH:
        C2 = compute_C2(experiment.truncation)
        local = goldbach_local_factor(experiment.x)
        value = predict_goldbach(experiment.x, C2, local)
        return Prediction(value, {"C_2": float(C2), "local_factor": local.value})

    value = predict_prime_members(experiment.x, experiment.prime_form)
    other = PrimeForm.ASYMPTOTIC if experiment.prime_form is PrimeForm.MERTENS else PrimeForm.MERTENS
    return Prediction(
        value,
        {
            "T": threshold_T(experiment.x),
            f"predicted_{other.value}": prime_density_factor(experiment.x, other) * prime_reciprocal_log_sum(experiment.x),
        },
    )


def expected(experiment: Experiment) -> float:
    """Exact model expectation of the experiment's count."""
    params = ModelParameters(seed=0, n_min=experiment.n_min)
    if experiment.kind is ExperimentKind.BATEMAN_HORN:
        return expected_bateman_horn(experiment.family, experiment.x, params)
    if experiment.kind is ExperimentKind.GOLDBACH:
        return expected_goldbach(experiment.x, params)
    return expected_prime_members(experiment.x, params)


def _validate_seeds(seeds: Sequence[int]) -> Tuple[int, ...]:
    if not seeds:
        raise ValidationError("At least one seed is required.")
    return tuple(ModelParameters(seed=s).seed for s in seeds)


def observe(experiment: Experiment, seeds: Sequence[int], workers: Optional[int] = None) -> List[int]:
    """Per-seed counts, in seed order. Bateman-Horn counts draw membership
    at the polynomial values; the other kinds share one sampling frame."""
    seeds = _validate_seeds(seeds)
    workers = workers or get_default_workers()
    parallel = workers > 1 and len(seeds) > 1
    inner_workers = 1 if parallel else workers
    n_min = experiment.n_min

    if experiment.kind is ExperimentKind.BATEMAN_HORN:

        def task(seed: int) -> int:
            return count_bateman_horn_sparse(experiment.family, experiment.x, ModelParameters(seed, n_min))

    else:
        frame = SamplingFrame(2, max(experiment.x, 2), n_min, inner_workers)
        if experiment.kind is ExperimentKind.GOLDBACH:

            def task(seed: int) -> int:
                return count_goldbach(frame.draw(seed), experiment.x)

        else:
            table = shared_table(experiment.x)

            def task(seed: int) -> int:
                return count_prime_members(frame.draw(seed), table, experiment.x)

    if parallel:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(task, seeds))
    return [task(seed) for seed in seeds]


def kimvu_parameters(experiment: Experiment) -> Tuple[int, int, float, float]:
    """``(k, n_vars, lam, E')`` for an experiment's certificate."""
    log_x = math.log(experiment.x)
    if experiment.kind is ExperimentKind.BATEMAN_HORN:
        k = experiment.family.k
        lam, E_prime = (k + 1) * log_x, float(k)
    elif experiment.kind is ExperimentKind.GOLDBACH:
        k, lam, E_prime = 2, 2 * log_x, 2.0
    else:
        k, lam, E_prime = 1, 2 * log_x, 1.0
    if experiment.kimvu_lambda is not None:
        lam = float(experiment.kimvu_lambda)
    return k, experiment.x, lam, E_prime


def kimvu_certificate(
    experiment: Experiment,
    seeds: Sequence[int],
    observations: Optional[Sequence[int]] = None,
    workers: Optional[int] = None,
) -> KimVuCertificate:
    """Kim-Vu certificate for an experiment over ``seeds``.

    Raises:
        ValidationError: With fewer than 30 seeds.
    """
    if len(seeds) < MIN_CERTIFICATE_SEEDS:
        raise ValidationError(
            f"A Kim-Vu certificate needs at least {MIN_CERTIFICATE_SEEDS} seeds, got {len(seeds)}."
        )
    if observations is None:
        observations = observe(experiment, seeds, workers)
    k, n_vars, lam, E_prime = kimvu_parameters(experiment)
    return certify_observations(k, n_vars, lam, E_prime, observations)


def build_manifest(experiment: Experiment) -> Dict[str, Any]:
    """Everything besides params and seeds needed to reproduce a run."""
    return {
        "versions": {
            "cramer_lab": __version__,
            "numpy": np.__version__,
            "mpmath": mpmath.__version__,
            "python": platform.python_version(),
        },
        "n_min": experiment.n_min,
        "T_truncation": experiment.truncation,
        "clamp_policy": CLAMP_POLICY,
        "tail_error_note": "heuristic, not a rigorous bound",
    }


@dataclass(frozen=True)
class CountReport:
    """Result of an ensemble run. ``ratio`` is ``mean / predicted``."""

    kind: ExperimentKind
    params: Dict[str, Any]
    seeds: Tuple[int, ...]
    observed: Tuple[int, ...]
    predicted: float
    ratio: Optional[float]
    mean: float
    stddev: float
    expected: float
    prediction_details: Dict[str, Any]
    certificate: Optional[KimVuCertificate]
    manifest: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "params": dict(self.params),
            "seeds": list(self.seeds),
            "observed": list(self.observed),
            "predicted": self.predicted,
            "ratio": self.ratio,
            "mean": self.mean,
            "stddev": self.stddev,
            "expected": self.expected,
            "prediction_details": dict(self.prediction_details),
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "manifest": self.manifest,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CountReport":
        certificate = data.get("certificate")
        return cls(
            kind=ExperimentKind(data["kind"]),
            params=dict(data["params"]),
            seeds=tuple(data["seeds"]),
            observed=tuple(data["observed"]),
            predicted=data["predicted"],
            ratio=data["ratio"],
            mean=data["mean"],
            stddev=data["stddev"],
            expected=data["expected"],
            prediction_details=dict(data.get("prediction_details", {})),
            certificate=KimVuCertificate.from_dict(certificate) if certificate else None,
            manifest=data["manifest"],
        )

    @classmethod
    def from_json(cls, text: str) -> "CountReport":
        return cls.from_dict(json.loads(text))

    def experiment(self) -> Experiment:
        return Experiment.from_params(self.kind, self.params)


def run_ensemble(experiment: Experiment, seeds: Sequence[int], workers: Optional[int] = None) -> CountReport:
    """Count per seed, aggregate, and attach prediction, exact expectation
    and (with 30 or more seeds) a Kim-Vu certificate.

    Raises:
        LabError: Propagated from prediction, sampling or counting.
    """
    seeds = _validate_seeds(seeds)
    prediction = predict(experiment)
    observations = observe(experiment, seeds, workers)

    mean = math.fsum(observations) / len(observations)
    stddev = float(np.std(np.array(observations, dtype=np.float64), ddof=1)) if len(observations) > 1 else 0.0
    ratio = mean / prediction.value if prediction.value > 0 else None

    certificate = None
    if len(seeds) >= MIN_CERTIFICATE_SEEDS:
        certificate = kimvu_certificate(experiment, seeds, observations=observations)

    logger.info(
        "%s %s: mean %.6g over %d seeds, predicted %.6g.",
        experiment.kind.value,
        experiment.params(),
        mean,
        len(seeds),
        prediction.value,
    )
    return CountReport(
        kind=experiment.kind,
        params=experiment.params(),
        seeds=seeds,
        observed=tuple(observations),
        predicted=prediction.value,
        ratio=ratio,
        mean=mean,
        stddev=stddev,
        expected=expected(experiment),
        prediction_details=prediction.details,
        certificate=certificate,
        manifest=build_manifest(experiment),
    )


def rerun(report: CountReport, workers: Optional[int] = None) -> CountReport:
    """Repeat the run a report describes."""
    return run_ensemble(report.experiment(), report.seeds, workers)
