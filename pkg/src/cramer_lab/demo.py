"""End-to-end demo for cramer-lab.

This module runs a small demonstration that:
- computes the twin-prime constant and the twin-family singular series,
- samples the random set on a short range and shows its first members,
- runs one small ensemble of each experiment kind,
- prints observed versus predicted counts and the ratio verdict.

It is intended for a quick look at the whole pipeline in a few seconds.
"""

from typing import List

import mpmath

from .experiments import Experiment, ExperimentKind, run_ensemble
from .poly_arith import parse_family
from .ratio_analyzer import analyze_ratio
from .sampler import ModelParameters, sample_range
from .singular_series import compute_C2, compute_Cf

DEMO_SEEDS: List[int] = list(range(5))


def run_demo() -> None:
    print("=== cramer-lab: Demo Run ===")
    print(
        "This demo computes two singular series, samples the random set on a\n"
        "short range, and compares small ensemble counts with their predictions.\n"
    )

    twins = parse_family("x,x+2")
    print(f"C_2(T=1e4) = {mpmath.nstr(compute_C2(1e4), 10)}")
    estimate = compute_Cf(twins, 1e4)
    print(f"C_f({twins}; T=1e4) = {mpmath.nstr(estimate.value, 10)}")

    sample = sample_range(2, 10**4, ModelParameters(seed=7))
    first = ", ".join(str(n) for n in sample.members()[:12].tolist())
    print(f"\nSample seed=7 on [2, 10^4]: {sample.count()} members; first: {first}")

    experiments = [
        Experiment(ExperimentKind.BATEMAN_HORN, 10**5, family=twins, truncation=1e4),
        Experiment(ExperimentKind.GOLDBACH, 10**5, truncation=1e4),
        Experiment(ExperimentKind.PRIME_DENSITY, 10**5),
    ]
    for idx, experiment in enumerate(experiments, start=1):
        print()
        print(f"--- Demo experiment {idx}: {experiment.kind.value} {experiment.params()} ---")
        report = run_ensemble(experiment, DEMO_SEEDS)
        analysis = analyze_ratio(report.mean, report.predicted, tolerance=0.1)
        print(f"Observed counts: {list(report.observed)}")
        print(f"Mean = {report.mean:.1f}, exact expectation = {report.expected:.1f}")
        print(f"Predicted = {report.predicted:.1f}, ratio = {analysis['ratio']:.4f}")
        verdict = "within" if analysis["within_tolerance"] else "outside"
        print(f"Ratio is {verdict} 10% of 1.")

    print("\nDemo finished.")
