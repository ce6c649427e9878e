"""Desk-scale acceptance checks for cramer-lab.

These are slower than ``tests_basic.py`` (a few minutes in total) and are
run the same way::

    python tests_acceptance.py

They check:
- the twin-prime constant and the twin-family singular series,
- Frobenius root counts against exhaustive scans,
- sampler calibration and window density against membership probabilities,
- ensemble means against the three asymptotic predictions,
- Kim-Vu certificates, brute-force counting oracles and reproducibility.
"""

import math
import os
import sys
from fractions import Fraction

import numpy as np

PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))
SRC_PATH = os.path.join(PROJECT_ROOT, "src")
if SRC_PATH not in sys.path:
    sys.path.insert(0, SRC_PATH)


from cramer_lab.experiments import (
    Experiment,
    ExperimentKind,
    count_bateman_horn,
    count_goldbach,
    count_prime_members,
    prime_reciprocal_log_sum,
    run_ensemble,
)
from cramer_lab.poly_arith import IntPolynomial, count_roots_bruteforce, count_roots_frobenius, parse_family
from cramer_lab.prime_engine import shared_table
from cramer_lab.quadrature import li_k
from cramer_lab.sampler import ModelParameters, SamplingFrame, membership_probability, sample_range, uniforms_at
from cramer_lab.singular_series import compute_C2, compute_Cf, goldbach_local_factor


def test_twin_prime_constant() -> None:
    c2 = compute_C2(1e4)
    assert abs(float(c2) - 0.66016) <= 1e-4

    twins = compute_Cf(parse_family("x,x+2"), 1e4)
    assert abs(float(twins.value / (2 * c2)) - 1.0) <= 1e-12


def test_cauchy_behaviour() -> None:
    for text in ("x,x+2", "x,x+2,x+6"):
        family = parse_family(text)
        gaps = [
            abs(float(compute_Cf(family, 2 * T).value - compute_Cf(family, T).value))
            for T in (1e3, 1e4, 1e5, 1e6)
        ]
        assert all(a >= b for a, b in zip(gaps, gaps[1:])), (text, gaps)


def test_goldbach_local_factor_squarefree() -> None:
    for odd_part in (3 * 5 * 7, 11 * 13, 3 * 17 * 19 * 23):
        expected = Fraction(1)
        for p in (q for q in (3, 5, 7, 11, 13, 17, 19, 23) if odd_part % q == 0):
            expected *= Fraction(p - 1, p - 2)
        assert goldbach_local_factor(2 * odd_part).exact == expected


def test_frobenius_matches_bruteforce() -> None:
    rng = np.random.RandomState(2024)
    primes = shared_table(2000).primes(2000).tolist()
    mismatches = 0
    for _ in range(200):
        degree = int(rng.randint(1, 5))
        coeffs = [int(c) for c in rng.randint(-50, 51, size=degree + 1)]
        coeffs[-1] = abs(coeffs[-1]) or 1
        f = IntPolynomial(tuple(coeffs))
        for p in primes:
            brute = count_roots_bruteforce(f, p).omega
            if brute == p:
                continue
            if count_roots_frobenius(f, p).omega != brute:
                mismatches += 1
    assert mismatches == 0


def _coprime_points(count: int, lo: float, hi: float):
    points = []
    for target in np.geomspace(lo, hi, count).tolist():
        n = int(target) | 1
        while membership_probability(n) == 0.0:
            n += 2
        points.append(n)
    return points


def test_sampler_calibration() -> None:
    points = _coprime_points(20, 1e3, 1e6)
    values = np.array(points, dtype=np.int64)
    probabilities = np.array([membership_probability(n) for n in points])
    seeds = 10**4

    hits = np.zeros(values.size, dtype=np.int64)
    for seed in range(seeds):
        hits += uniforms_at(values, seed) < probabilities

    frequency = hits / seeds
    standard_error = np.sqrt(probabilities * (1.0 - probabilities) / seeds)
    within = np.abs(frequency - probabilities) <= 4.0 * standard_error
    assert int(np.count_nonzero(within)) >= 19


def test_sampler_density_window() -> None:
    frame = SamplingFrame(9 * 10**5, 10**6)
    counts = [int(frame.draw(seed).membership.sum()) for seed in range(100)]
    expected = frame.expected_count()
    sigma = math.sqrt(float(np.sum(frame.probabilities * (1.0 - frame.probabilities))))
    assert abs(float(np.mean(counts)) - expected) <= 4.0 * sigma


def test_bateman_horn_twins() -> None:
    experiment = Experiment(ExperimentKind.BATEMAN_HORN, 10**6, family=parse_family("x,x+2"))
    report = run_ensemble(experiment, list(range(50)), workers=4)
    assert abs(report.ratio - 1.0) <= 0.05, report.ratio


def test_identity_family_ratio() -> None:
    experiment = Experiment(ExperimentKind.BATEMAN_HORN, 10**6, family=parse_family("x"))
    report = run_ensemble(experiment, list(range(50)), workers=4)
    assert abs(report.ratio - 1.0) <= 0.05, report.ratio


def test_prime_reciprocal_log_sum() -> None:
    x = 10**7
    stieltjes = prime_reciprocal_log_sum(x)
    integral = li_k(x, 2, lower=math.sqrt(x))
    assert abs(stieltjes / integral - 1.0) <= 0.01


def test_goldbach_counts() -> None:
    for N in (10**6, 2**20):
        report = run_ensemble(Experiment(ExperimentKind.GOLDBACH, N), list(range(50)), workers=4)
        assert abs(report.ratio - 1.0) <= 0.05, (N, report.ratio)
    assert goldbach_local_factor(2**20).value == 1.0


def test_prime_members() -> None:
    report = run_ensemble(Experiment(ExperimentKind.PRIME_DENSITY, 10**7), [0])
    assert 0.98 <= report.ratio <= 1.02, report.ratio


def test_kimvu_concentration() -> None:
    twins = Experiment(ExperimentKind.BATEMAN_HORN, 10**5, family=parse_family("x,x+2"))
    report = run_ensemble(twins, list(range(200)), workers=4)
    cert = report.certificate
    assert cert.k == 2 and abs(cert.lam - 3 * math.log(10**5)) < 1e-9
    assert cert.violations == 0

    goldbach = run_ensemble(Experiment(ExperimentKind.GOLDBACH, 10**5), list(range(200)), workers=4)
    assert abs(goldbach.certificate.lam - 2 * math.log(10**5)) < 1e-9
    assert goldbach.certificate.violations == 0


def test_counting_oracles() -> None:
    x = 10**4
    twins = parse_family("x,x+2")
    quadratic = parse_family("x^2+1,x+2")
    primes = set(shared_table(x).primes(x).tolist())
    for seed in range(20):
        dense = sample_range(2, 2 * x, ModelParameters(seed=seed))
        members = set(dense.members().tolist())

        brute = sum(1 for n in range(1, x + 1) if n in members and n + 2 in members)
        assert count_bateman_horn(dense, twins, x) == brute

        brute = sum(1 for n in range(1, 101) if n * n + 1 in members and n + 2 in members)
        assert count_bateman_horn(dense, quadratic, 100) == brute

        N = x
        brute = sum(1 for n in range(2, N - 1) if n in members and N - n in members)
        assert count_goldbach(dense, N) == brute

        brute = sum(1 for p in primes if p in members)
        assert count_prime_members(dense, shared_table(x), x) == brute


def test_reproducibility_across_workers() -> None:
    params = ModelParameters(seed=99)
    single = sample_range(2, 3 * 10**6, params, workers=1)
    pooled = sample_range(2, 3 * 10**6, params, workers=4)
    assert single.packed() == pooled.packed()

    experiment = Experiment(ExperimentKind.GOLDBACH, 3 * 10**6, truncation=1e4)
    seeds = list(range(4))
    assert run_ensemble(experiment, seeds, workers=1).to_json() == run_ensemble(experiment, seeds, workers=4).to_json()


def main() -> None:
    test_twin_prime_constant()
    test_cauchy_behaviour()
    test_goldbach_local_factor_squarefree()
    test_frobenius_matches_bruteforce()
    test_sampler_calibration()
    test_sampler_density_window()
    test_bateman_horn_twins()
    test_identity_family_ratio()
    test_prime_reciprocal_log_sum()
    test_goldbach_counts()
    test_prime_members()
    test_kimvu_concentration()
    test_counting_oracles()
    test_reproducibility_across_workers()
    print("All acceptance tests passed.")


if __name__ == "__main__":
    main()
