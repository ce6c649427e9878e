"""Basic tests for cramer-lab.

These tests use simple ``assert`` statements and can be run with::

    python tests_basic.py

They cover:
- sieving, prime counting, factorisation and Mertens products,
- polynomial parsing, root counting, resultants and admissibility,
- singular series and Goldbach local factors,
- membership probabilities and seeded sampling,
- quadrature, counting oracles, predictions and certificates,
- ratio analysis, storage, config parsing, artefacts and the CLI.
"""

import dataclasses
import math
import os
import sys
import tempfile
from fractions import Fraction

import mpmath
import numpy as np

PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))
SRC_PATH = os.path.join(PROJECT_ROOT, "src")
if SRC_PATH not in sys.path:
    sys.path.insert(0, SRC_PATH)


from cramer_lab.artifacts import load_sample, write_sample
from cramer_lab.config import MEMORY_BUDGET_ENV, parse_byte_size
from cramer_lab.errors import DomainError, InadmissibleFamilyError, ResourceError, UsageError, ValidationError
from cramer_lab.experiments import (
    CountReport,
    Experiment,
    ExperimentKind,
    Normalization,
    count_bateman_horn,
    count_bateman_horn_sparse,
    count_goldbach,
    count_prime_members,
    expected_bateman_horn,
    expected_goldbach,
    kimvu_certificate,
    kimvu_threshold,
    predict_bateman_horn,
    predict_goldbach,
    predict_prime_members,
    run_ensemble,
)
from cramer_lab.input_module import build_run_config, parse_number, parse_range
from cramer_lab.main import cmd_constants, cmd_history, main as cli_main
from cramer_lab.poly_arith import (
    Admissibility,
    IntPolynomial,
    PolynomialFamily,
    ScreenStatus,
    check_admissibility,
    count_roots,
    count_roots_bruteforce,
    count_roots_frobenius,
    family_root_count,
    irreducibility_screen,
    parse_family,
    parse_polynomial,
    resultant,
)
from cramer_lab.prime_engine import (
    MertensKind,
    factorize,
    is_prime_deterministic,
    mertens_product,
    primorial,
    shared_table,
    sieve,
)
from cramer_lab.quadrature import (
    goldbach_integral,
    goldbach_integral_refined,
    goldbach_integrand,
    integrate_adaptive_simpson,
    li_k,
    li_k_refined,
)
from cramer_lab.ratio_analyzer import analyze_ratio
from cramer_lab.sampler import (
    MAX_SAMPLE_VALUE,
    ModelParameters,
    SampledSet,
    count_variance,
    expected_count,
    membership_probability,
    probabilities_at,
    sample_range,
    threshold_T,
    uniforms_at,
)
from cramer_lab.singular_series import compute_C2, compute_Cf, goldbach_local_factor, lemma2_check
from cramer_lab.storage import (
    get_observations,
    get_ratio_stats,
    get_ratio_trend,
    initialize_storage,
    list_runs,
    save_report,
)
from cramer_lab.sweep_module import run_sweep, write_sweep_csv


def _raises(exc_type, fn, *args, **kwargs):
    try:
        fn(*args, **kwargs)
    except exc_type as exc:
        return exc
    raise AssertionError(f"{fn.__name__} did not raise {exc_type.__name__}")


# --- prime engine ---------------------------------------------------------


def _trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def test_sieve_and_pi() -> None:
    table = sieve(100)
    assert table.pi(100) == 25
    assert table.pi(2) == 1
    assert table.pi(1) == 0
    assert table.pi(30.7) == 10
    assert table.primes(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert table.is_prime(97) and not table.is_prime(91) and table.is_prime(2)
    assert len(table) == 25
    _raises(DomainError, table.pi, 101)
    _raises(DomainError, sieve, 1)
    _raises(ResourceError, sieve, 10**6, memory_budget=1000)

    big = shared_table(10**7)
    assert big.pi(10**6) == 78498
    assert big.pi(10**7) == 664579

    steps = {big.pi(n) - big.pi(n - 1) for n in range(3, 20001)}
    assert steps == {0, 1}


def test_factorize_and_primality() -> None:
    assert factorize(1) == []
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(999966000289) == [(999983, 2)]
    assert factorize(2**64 - 1) == [(3, 1), (5, 1), (17, 1), (257, 1), (641, 1), (65537, 1), (6700417, 1)]
    _raises(DomainError, factorize, 0)
    assert factorize((2**31 - 1) ** 2) == [(2147483647, 2)]
    assert factorize((2**31 - 1) * (2**32 - 5)) == [(2147483647, 1), (4294967291, 1)]
    assert is_prime_deterministic(2**61 - 1)
    assert not is_prime_deterministic(561)
    assert all(is_prime_deterministic(n) == _trial_division_is_prime(n) for n in range(10**5 + 1))

    assert primorial(2) == 2
    assert primorial(10) == 210
    assert primorial(13) == 30030
    factors = factorize(primorial(47))
    assert len(factors) == shared_table(47).pi(47) == 15
    assert all(e == 1 for _, e in factors)
    _raises(DomainError, primorial, 1.5)


def test_mertens_product() -> None:
    assert abs(float(mertens_product(2, 1).value) - 2.0) < 1e-15
    assert abs(float(mertens_product(10, 1).value) - 4.375) < 1e-12
    assert abs(float(mertens_product(10, 2, "direct").value) - 1 / 4.375**2) < 1e-15

    inverse = mertens_product(1e6, 3, MertensKind.INVERSE)
    direct = mertens_product(1e6, 3, MertensKind.DIRECT)
    assert abs(float(inverse.value * direct.value) - 1.0) < 1e-15

    mertens = float(mertens_product(1e5, 1, MertensKind.INVERSE).value)
    assert abs(mertens / (math.exp(float(mpmath.euler)) * math.log(1e5)) - 1.0) < 1e-3


# --- polynomials ----------------------------------------------------------


def test_parse_polynomial() -> None:
    assert parse_polynomial("x^2+x+1").coefficients == (1, 1, 1)
    assert parse_polynomial("2x^3-5").coefficients == (-5, 0, 0, 2)
    assert parse_polynomial("x**2 - 1").coefficients == (-1, 0, 1)
    assert str(parse_polynomial("2x^3-5")) == "2x^3-5"
    assert str(parse_polynomial("x+2")) == "x+2"
    exc = _raises(ValidationError, parse_polynomial, "1.5x+1")
    assert "1.5x" in str(exc)
    _raises(ValidationError, parse_polynomial, "-x+1")
    _raises(ValidationError, parse_polynomial, "3")
    assert parse_polynomial("x^2+x+1")(2) == 7


def test_root_counts() -> None:
    x2p1 = parse_polynomial("x^2+1")
    cyclo = parse_polynomial("x^2+x+1")
    assert count_roots_bruteforce(x2p1, 5).omega == 2
    assert count_roots_bruteforce(x2p1, 3).omega == 0
    assert count_roots_bruteforce(x2p1, 2).omega == 1
    assert count_roots_frobenius(x2p1, 2).omega == 1
    assert count_roots_frobenius(cyclo, 7).omega == 2
    assert count_roots_frobenius(cyclo, 5).omega == 0
    assert count_roots_frobenius(cyclo, 3).omega == 1

    vanishing = IntPolynomial((2, 2))
    assert count_roots_bruteforce(vanishing, 2).omega == 2
    assert count_roots(vanishing, 2).omega == 2
    _raises(DomainError, count_roots_frobenius, vanishing, 2)
    _raises(DomainError, count_roots_bruteforce, x2p1, 9)


def test_root_count_oracle_small() -> None:
    rng = np.random.RandomState(3)
    primes = shared_table(300).primes(300).tolist()
    for _ in range(25):
        degree = int(rng.randint(1, 5))
        coeffs = [int(c) for c in rng.randint(-50, 51, size=degree + 1)]
        coeffs[-1] = abs(coeffs[-1]) or 1
        f = IntPolynomial(tuple(coeffs))
        for p in primes:
            brute = count_roots_bruteforce(f, p).omega
            assert count_roots(f, p).omega == brute
            if brute < p:
                assert count_roots_frobenius(f, p).omega == brute


def test_resultant_and_family_counts() -> None:
    x = parse_polynomial("x")
    assert abs(resultant(x, parse_polynomial("x+2"))) == 2
    assert abs(resultant(x, parse_polynomial("x^2+1"))) == 1
    assert resultant(parse_polynomial("x-1"), parse_polynomial("x^2-1")) == 0

    twins = parse_family("x,x+2")
    assert twins.resultant_bound == 2
    assert family_root_count(twins, 2) == 1
    assert family_root_count(twins, 3) == 2
    assert family_root_count(twins, 101) == 2


def test_root_count_bounds_and_sum_rule() -> None:
    primes = shared_table(200).primes(200).tolist()
    for text in ("x,x+2", "x,x+6", "x+1,x+3,x+7", "x,x^2+x+1", "x^2+1,x+1", "x^2+x+1,x^2+3"):
        family = parse_family(text)
        f = family.product
        for p in primes:
            brute = count_roots_bruteforce(f, p).omega
            assert brute <= min(f.degree, p), (text, p)
            if p > family.resultant_bound:
                members = sum(count_roots_bruteforce(m, p).omega for m in family.members)
                assert brute == members, (text, p)
                assert family_root_count(family, p) == brute


def test_admissibility() -> None:
    assert check_admissibility(parse_family("x,x+2")).admissible is Admissibility.YES
    bad = check_admissibility(parse_family("x,x+1"))
    assert bad.admissible is Admissibility.NO and bad.obstruction == 2
    triple = check_admissibility(parse_family("x,x+2,x+4"))
    assert triple.admissible is Admissibility.NO and triple.obstruction == 3
    content = check_admissibility(PolynomialFamily((IntPolynomial((2, 2)),)))
    assert content.obstruction == 2
    assert check_admissibility(parse_family("x^2+x+1")).admissible is Admissibility.YES
    _raises(ValidationError, parse_family, "x,x")

    for text in ("x,x^2+x+1", "x^2+x+1,x"):
        assert check_admissibility(parse_family(text)).admissible is Admissibility.YES
    for text in ("x+4,x,x+2", "x+2,x+4,x"):
        reordered = check_admissibility(parse_family(text))
        assert reordered.admissible is Admissibility.NO and reordered.obstruction == 3

    for prime in (100003, 1000003):
        big = check_admissibility(parse_family(f"{prime}x+{2 * prime}"))
        assert big.admissible is Admissibility.NO and big.obstruction == prime
    small_first = check_admissibility(parse_family("x,x+1,1000003x+1000003"))
    assert small_first.obstruction == 2


def test_irreducibility_screen() -> None:
    verdict = irreducibility_screen(parse_polynomial("x^2+x+1"))
    assert verdict.status is ScreenStatus.CERTIFIED and verdict.prime == 2
    assert str(verdict) == "certified_irreducible(2)"

    verdict = irreducibility_screen(parse_polynomial("x^2-1"))
    assert verdict.status is ScreenStatus.REDUCIBLE
    assert {str(w) for w in verdict.witness} == {"x-1", "x+1"}
    assert str(irreducibility_screen(parse_polynomial("x^2+2x+1"))) == "reducible((x+1)(x+1))"

    verdict = irreducibility_screen(parse_polynomial("x^4+3x^2+2"))
    assert verdict.status is ScreenStatus.REDUCIBLE
    assert {str(w) for w in verdict.witness} == {"x^2+1", "x^2+2"}

    assert irreducibility_screen(parse_polynomial("x")).status is ScreenStatus.CERTIFIED
    verdict = irreducibility_screen(parse_polynomial("2x^2+2"))
    assert verdict.status is ScreenStatus.CERTIFIED and verdict.prime == 3

    # reducible modulo every prime, irreducible over the integers
    verdict = irreducibility_screen(parse_polynomial("x^4+1"))
    assert verdict.status is ScreenStatus.CERTIFIED and verdict.prime is None
    assert str(verdict) == "certified_irreducible"

    square = parse_polynomial("x^14+2x^8+2x^7+x^2+2x+1")
    assert irreducibility_screen(square).status is ScreenStatus.INCONCLUSIVE


# --- singular series ------------------------------------------------------


def test_singular_series_constants() -> None:
    assert compute_Cf(parse_family("x"), 1e3).value == 1

    c2 = compute_C2(1e4)
    assert abs(float(compute_C2(3)) - 0.75) < 1e-15
    assert abs(float(c2) - 0.66016) < 1e-4
    assert abs(float(compute_C2(1e6)) - float(c2)) < 2e-5

    twins = compute_Cf(parse_family("x,x+2"), 1e4)
    assert abs(float(twins.value) - 1.32032) < 1e-3
    assert abs(float(twins.value / (2 * c2)) - 1.0) < 1e-12
    assert twins.converged_fast

    swapped = compute_Cf(parse_family("x+2,x"), 1e4)
    assert swapped.value == twins.value

    exc = _raises(InadmissibleFamilyError, compute_Cf, parse_family("x,x+1"), 1e3)
    assert exc.prime == 2

    slow = compute_Cf(parse_family("x^2+x+1"), 1e4)
    assert not slow.converged_fast and slow.tail_error > 0


def test_cauchy_behaviour_twins() -> None:
    family = parse_family("x,x+2")
    gaps = []
    for T in (1e3, 1e4, 1e5):
        gaps.append(abs(float(compute_Cf(family, 2 * T).value - compute_Cf(family, T).value)))
    assert gaps[0] >= gaps[1] >= gaps[2]


def test_goldbach_local_factor() -> None:
    assert goldbach_local_factor(30).exact == Fraction(8, 3)
    assert goldbach_local_factor(6).value == 2.0
    assert goldbach_local_factor(1024).value == 1.0
    expected = Fraction(1)
    for p in (3, 5, 7, 11):
        expected *= Fraction(p - 1, p - 2)
    assert goldbach_local_factor(2 * 3 * 5 * 7 * 11).exact == expected
    _raises(DomainError, goldbach_local_factor, 31)


def test_lemma2_residuals() -> None:
    assert lemma2_check(1, 1e6).residual_i <= 1.0
    assert lemma2_check(2, 1e5).residual_i <= 5.0
    smoke = lemma2_check(1, 100)
    assert math.isfinite(smoke.residual_i) and smoke.residual_i > 0
    with_family = lemma2_check(2, 1e3, parse_family("x,x+2"), reference_T=1e5)
    assert math.isfinite(with_family.residual_ii)
    _raises(DomainError, lemma2_check, 1, 50)


# --- sampler --------------------------------------------------------------


def test_threshold_and_probability() -> None:
    assert abs(threshold_T(1e6) - 14.311) < 1e-3
    assert abs(threshold_T(math.exp(math.exp(math.e))) - math.exp(math.e)) < 1e-9
    _raises(DomainError, threshold_T, 15)

    assert abs(membership_probability(101) - 0.94797) < 1e-4
    assert membership_probability(10**6 + 2) == 0.0
    assert membership_probability(10**6 + 5) == 0.0
    assert abs(membership_probability(10**6 + 1) - 0.37737) < 1e-4
    assert membership_probability(15) == 0.0
    assert membership_probability(53) == 1.0

    _raises(ValidationError, ModelParameters, 0, 15)
    _raises(ValidationError, ModelParameters, -1)
    _raises(ValidationError, ModelParameters, 2**64)

    u = uniforms_at(np.arange(1, 10**5), 12345)
    assert u.min() >= 0.0 and u.max() < 1.0


def test_no_clamping_above_ten_thousand() -> None:
    step = 10**6
    for start in range(10**4, 10**7, step):
        p = probabilities_at(np.arange(start, min(start + step, 10**7 + 1), dtype=np.int64))
        assert p.max() < 1.0, start


def test_range_limits() -> None:
    assert parse_range(f"2:{MAX_SAMPLE_VALUE}") == (2, MAX_SAMPLE_VALUE)
    _raises(ValidationError, parse_range, "2:2^63")
    _raises(DomainError, sample_range, 2**63 - 10, 2**63, ModelParameters())
    _raises(DomainError, membership_probability, 2**63)
    _raises(DomainError, uniforms_at, [2**64], 1)
    top = probabilities_at(np.array([MAX_SAMPLE_VALUE], dtype=np.int64))
    assert 0.0 <= top[0] < 1.0


def test_sampling_determinism_and_prefix() -> None:
    params = ModelParameters(seed=7)
    a = sample_range(2, 10**5, params)
    b = sample_range(2, 10**5, params)
    assert a.same_as(b)
    assert a.restrict(2, 5 * 10**4).same_as(sample_range(2, 5 * 10**4, params))
    assert a.restrict(1000, 2000).same_as(sample_range(1000, 2000, params))
    assert np.all(a.members() % 2 == 1)

    for m in a.members().tolist():
        assert math.gcd(m, primorial(threshold_T(m))) == 1

    again = SampledSet.from_packed(params, a.lo, a.hi, a.packed())
    assert again.same_as(a)
    _raises(DomainError, sample_range, 1, 10, params)


def test_expected_count() -> None:
    params = ModelParameters()
    assert expected_count(10, 9, params) == 0.0
    assert expected_count(2, 15, params) == 0.0
    value = expected_count(16, 10**4, params)
    assert value > 0 and value == expected_count(16, 10**4, params)
    assert 0 < count_variance(16, 10**4, params) < value


# --- quadrature -----------------------------------------------------------


def test_quadrature() -> None:
    square = integrate_adaptive_simpson(lambda t: t * t, 0.0, 1.0)
    assert abs(square.value - 1.0 / 3.0) < 1e-12
    assert abs(integrate_adaptive_simpson(lambda t: t * t, 1.0, 0.0).value + 1.0 / 3.0) < 1e-12

    li = li_k(1e6, 1)
    assert abs(li / 78626.5039956821 - 1.0) < 1e-7
    assert abs(li / li_k_refined(1e6, 1) - 1.0) < 1e-8
    assert abs(li_k(1e6, 2) / li_k_refined(1e6, 2) - 1.0) < 1e-8

    N = 10**4
    forward = goldbach_integral(N)
    integrand = goldbach_integrand(N)
    reflected = integrate_adaptive_simpson(lambda t: integrand(N - t), 2.0, N - 2.0).value
    assert abs(forward / reflected - 1.0) < 1e-10
    assert abs(forward / goldbach_integral_refined(N) - 1.0) < 1e-8


# --- experiments ----------------------------------------------------------


def _brute_bateman_horn(sample, family, x):
    total = 0
    for n in range(1, x + 1):
        if all(f(n) >= 2 and f(n) in sample for f in family.members):
            total += 1
    return total


def test_count_oracles() -> None:
    twins = parse_family("x,x+2")
    identity = parse_family("x")
    table = shared_table(10**4)
    for seed in range(5):
        params = ModelParameters(seed=seed)
        sample = sample_range(2, 10**4, params)
        assert count_bateman_horn(sample, twins, 1000) == _brute_bateman_horn(sample, twins, 1000)
        assert count_bateman_horn(sample, twins, 1000) == count_bateman_horn_sparse(twins, 1000, params)
        assert count_bateman_horn(sample, identity, 5000) == sample.count(2, 5000)
        assert count_bateman_horn(sample, identity, 10) == 0

        N = 10**4
        brute = sum(1 for n in range(2, N - 1) if n in sample and (N - n) in sample)
        assert count_goldbach(sample, N) == brute

        primes = count_prime_members(sample, table, 10**4)
        oracle = len(set(sample.members().tolist()) & set(table.primes(10**4).tolist()))
        assert primes == oracle
        assert primes <= min(table.pi(10**4), sample.count(2, 10**4))

    small = sample_range(2, 500, ModelParameters(seed=1))
    exc = _raises(ValidationError, count_bateman_horn, small, twins, 1000)
    assert "required" in str(exc)
    _raises(DomainError, count_goldbach, small, 401)


def test_expectations() -> None:
    params = ModelParameters()
    identity = parse_family("x")
    assert abs(expected_bateman_horn(identity, 10**4, params) / expected_count(2, 10**4, params) - 1) < 1e-12

    N = 2000
    brute = 0.0
    for n in range(2, N - 1):
        if n == N - n:
            brute += membership_probability(n)
        else:
            brute += membership_probability(n) * membership_probability(N - n)
    assert abs(expected_goldbach(N, params) / brute - 1.0) < 1e-12


def test_predictions() -> None:
    twins = parse_family("x,x+2")
    estimate = compute_Cf(twins, 1e4)
    product = predict_bateman_horn(twins, 1e5, estimate)
    summed = predict_bateman_horn(twins, 1e5, estimate, Normalization.SUM)
    assert abs(product / summed - 2.0) < 1e-12
    _raises(DomainError, predict_bateman_horn, twins, 50, estimate)

    c2 = compute_C2(1e4)
    local = goldbach_local_factor(2**10)
    assert predict_goldbach(2**10, c2, local) == 2.0 * float(c2) * goldbach_integral(2**10)
    _raises(DomainError, predict_goldbach, 999, c2, local)

    def scaled(N):
        return goldbach_integral(N) / (N / math.log(N) ** 2)

    # slowly approaches 1 from above, roughly 1 + 2/log N
    assert 1.12 < scaled(10**6) < 1.25
    assert scaled(10**6) < scaled(10**4)

    assert predict_prime_members(2 * 10**4) > predict_prime_members(10**4)
    _raises(DomainError, predict_prime_members, 999)


def test_kimvu() -> None:
    assert kimvu_threshold(1, 1.0, 1.0, 1.0) == 8.0
    assert abs(kimvu_threshold(2, 2.0, 100.0, 2.0) / 5120.0 - 1.0) < 1e-12
    k, lam, E, Ep = 3, 7.5, 40.0, 3.0
    symbolic = (8**k) * math.sqrt(math.factorial(k)) * (lam**k) * math.sqrt(Ep * E)
    assert abs(kimvu_threshold(k, lam, E, Ep) / symbolic - 1.0) < 1e-12

    experiment = Experiment(ExperimentKind.BATEMAN_HORN, 1000, family=parse_family("x"), truncation=1e3)
    _raises(ValidationError, kimvu_certificate, experiment, list(range(10)))


def test_run_ensemble_reports() -> None:
    experiment = Experiment(ExperimentKind.BATEMAN_HORN, 1000, family=parse_family("x"), truncation=1e3)
    single = run_ensemble(experiment, [1])
    assert single.stddev == 0.0
    assert single.ratio == single.mean / single.predicted

    report = run_ensemble(experiment, list(range(30)))
    assert report.certificate is not None and report.certificate.k == 1
    assert CountReport.from_json(report.to_json()) == report
    assert run_ensemble(experiment, list(range(30))).to_json() == report.to_json()

    goldbach = run_ensemble(Experiment(ExperimentKind.GOLDBACH, 1000, truncation=1e3), [3, 4])
    assert goldbach.stddev >= 0 and goldbach.expected > 0
    primes = run_ensemble(Experiment(ExperimentKind.PRIME_DENSITY, 10**4), [5])
    assert "predicted_asymptotic" in primes.prediction_details


def test_ensemble_mean_matches_expectation() -> None:
    identity = parse_family("x")
    x = 10**5
    experiment = Experiment(ExperimentKind.BATEMAN_HORN, x, family=identity, truncation=1e3)
    report = run_ensemble(experiment, list(range(30)))
    sigma = math.sqrt(count_variance(2, x) / 30)
    assert abs(report.mean - expected_count(2, x)) <= 4 * sigma


# --- ratio analysis, storage, sweeps --------------------------------------


def test_analyze_ratio() -> None:
    result = analyze_ratio(96.0, 100.0)
    assert result["within_tolerance"] is True
    assert abs(result["ratio"] - 0.96) < 1e-15
    assert result["difference"] == -4.0

    assert analyze_ratio(90.0, 100.0)["within_tolerance"] is False
    assert analyze_ratio(5.0, 0.0)["ratio"] is None


def test_storage_roundtrip() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        initialize_storage(db_path=os.path.join(tmp, "runs.db"))
        experiment = Experiment(ExperimentKind.BATEMAN_HORN, 1000, family=parse_family("x"), truncation=1e3)
        first = run_ensemble(experiment, [1, 2, 3])
        run_id = save_report(first)
        save_report(run_ensemble(experiment, [4, 5, 6]))

        runs = list_runs("bateman_horn")
        assert len(runs) == 2 and runs[0]["id"] == run_id
        assert runs[0]["params"]["family"] == "x"
        observations = get_observations(run_id)
        assert [o["seed"] for o in observations] == [1, 2, 3]
        assert [o["observed"] for o in observations] == list(first.observed)

        stats = get_ratio_stats("bateman_horn")
        assert stats["count"] == 2
        assert stats["min_ratio"] <= stats["avg_ratio"] <= stats["max_ratio"]
        assert get_ratio_trend("bateman_horn") in {"up", "down", "stable"}
        assert get_ratio_stats("goldbach") is None


def test_sweep() -> None:
    experiment = Experiment(ExperimentKind.PRIME_DENSITY, 10**4)
    rows = run_sweep(experiment, [10**4, 2 * 10**4, 500], [1], with_actual=True)
    assert [row["x"] for row in rows] == [10**4, 2 * 10**4]
    assert rows[0]["actual"] == 1229

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "sweep.csv")
        write_sweep_csv(rows, path)
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
        assert lines[0] == "x,observed,predicted,ratio,expected,stddev,actual"
        assert len(lines) == 3


# --- config, artefacts, CLI -----------------------------------------------


def test_input_parsing() -> None:
    assert parse_number("1e6") == 10**6
    assert parse_number("2^20") == 2**20
    _raises(ValidationError, parse_number, "1.5")
    assert parse_range("2:1e6") == (2, 10**6)
    _raises(ValidationError, parse_range, "10:2")
    assert parse_byte_size("2G") == 2 * 1024**3

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "run.cfg")
        with open(path, "w", encoding="utf-8") as f:
            f.write("# twin run\nfamily = x,x+2\nx = 1e5\nbase-seed = 10\nseeds = 3\n")
        config = build_run_config("experiment", {"x": "1e4", "family": None}, path, kind="bh")
        assert config.x == 10**4 and config.family == "x,x+2"
        assert config.seeds == (10, 11, 12)

        with open(path, "a", encoding="utf-8") as f:
            f.write("colour = blue\n")
        _raises(ValidationError, build_run_config, "experiment", {}, path, "bh")
    _raises(UsageError, build_run_config, "experiment", {}, "/nonexistent/run.cfg", "bh")


def test_sample_artifacts() -> None:
    params = ModelParameters(seed=11)
    sample = sample_range(2, 5000, params)
    with tempfile.TemporaryDirectory() as tmp:
        manifest = write_sample(sample, tmp)
        assert manifest["seed"] == 11 and manifest["range"] == [2, 5000]
        assert load_sample(tmp).same_as(sample)
        with open(os.path.join(tmp, "members.txt"), "r", encoding="utf-8") as f:
            members = [int(line) for line in f]
        assert members == sample.members().tolist()

        with open(os.path.join(tmp, "sample.bits"), "r+b") as f:
            first = f.read(1)
            f.seek(0)
            f.write(bytes([first[0] ^ 0xFF]))
        _raises(ValidationError, load_sample, tmp)


def test_cli_exit_codes() -> None:
    assert cli_main(["experiment", "goldbach", "--N", "999999"]) == 2
    assert cli_main(["constants", "--family", "x,x+1", "--T", "1e3"]) == 2
    assert cli_main(["constants", "--family", "1.5x"]) == 2
    assert cli_main(["no-such-command"]) == 1
    assert cli_main(["constants", "--c2", "--T", "1e4"]) == 0
    report = cmd_constants(build_run_config("constants", {"family": "x", "truncation": "1e3"}))
    assert report["C_f"] == 1.0 and "C_2" not in report

    with tempfile.TemporaryDirectory() as tmp:
        first, second = os.path.join(tmp, "a"), os.path.join(tmp, "b")
        assert cli_main(["sample", "--range", "2:1e4", "--seed", "7", "--out", first]) == 0
        assert cli_main(["sample", "--range", "2:1e4", "--seed", "7", "--out", second]) == 0
        for name in ("manifest.json", "sample.bits", "members.txt"):
            with open(os.path.join(first, name), "rb") as f1, open(os.path.join(second, name), "rb") as f2:
                assert f1.read() == f2.read()
        with open(os.path.join(first, "members.txt"), "r", encoding="utf-8") as f:
            assert all(int(line) % 2 == 1 for line in f)

        report_path = os.path.join(tmp, "report.json")
        args = ["experiment", "bh", "--family", "x,x+2", "--x", "1e4", "--seeds", "3", "--T", "1e3"]
        assert cli_main(args + ["--out", report_path]) == 0
        assert cli_main(["rerun", report_path]) == 0

        previous = os.environ.get(MEMORY_BUDGET_ENV)
        os.environ[MEMORY_BUDGET_ENV] = "1K"
        try:
            assert cli_main(["sample", "--range", "2:1e6", "--seed", "1", "--out", first]) == 3
        finally:
            if previous is None:
                del os.environ[MEMORY_BUDGET_ENV]
            else:
                os.environ[MEMORY_BUDGET_ENV] = previous


def test_history_kind_aliases() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        db = os.path.join(tmp, "runs.db")
        args = ["experiment", "bh", "--family", "x", "--x", "1e3", "--seeds", "2", "--T", "1e3"]
        assert cli_main(args + ["--store", db, "--out", os.path.join(tmp, "r.json")]) == 0

        for kind in ("bh", "BH", "bateman_horn", "Bateman-Horn"):
            config = dataclasses.replace(build_run_config("history", {"db": db}), kind=kind)
            assert len(cmd_history(config)) == 1, kind
        config = dataclasses.replace(build_run_config("history", {"db": db}), kind="goldbach")
        assert cmd_history(config) == []
        assert cli_main(["history", "--db", db, "--kind", "BH"]) == 0
        assert cli_main(["history", "--db", db, "--kind", "twins"]) == 2


def main() -> None:
    test_sieve_and_pi()
    test_factorize_and_primality()
    test_mertens_product()
    test_parse_polynomial()
    test_root_counts()
    test_root_count_oracle_small()
    test_resultant_and_family_counts()
    test_root_count_bounds_and_sum_rule()
    test_admissibility()
    test_irreducibility_screen()
    test_singular_series_constants()
    test_cauchy_behaviour_twins()
    test_goldbach_local_factor()
    test_lemma2_residuals()
    test_threshold_and_probability()
    test_no_clamping_above_ten_thousand()
    test_range_limits()
    test_sampling_determinism_and_prefix()
    test_expected_count()
    test_quadrature()
    test_count_oracles()
    test_expectations()
    test_predictions()
    test_kimvu()
    test_run_ensemble_reports()
    test_ensemble_mean_matches_expectation()
    test_analyze_ratio()
    test_storage_roundtrip()
    test_sweep()
    test_input_parsing()
    test_sample_artifacts()
    test_cli_exit_codes()
    test_history_kind_aliases()
    print("All basic tests passed.")


if __name__ == "__main__":
    main()
