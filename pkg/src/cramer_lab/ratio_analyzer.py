"""Ratio analyzer for comparing observed counts with predictions.

Responsibilities:
- Compare an observed count (or ensemble mean) with a predicted value.
- Return a clear result structure indicating whether the ratio lies
  within a relative tolerance of 1.
"""

from typing import Dict

DEFAULT_TOLERANCE = 0.05


def analyze_ratio(observed: float, predicted: float, tolerance: float = DEFAULT_TOLERANCE) -> Dict:
    """Analyze how closely an observation matches its prediction.

    Args:
        observed (float): Observed count or ensemble mean.
        predicted (float): Predicted value; must be positive for a ratio.
        tolerance (float): Accepted relative error ``|ratio - 1|``.

    Returns:
        Dict: A dictionary with keys:
            - "ratio" (float | None): observed / predicted, or None when
              predicted is not positive.
            - "relative_error" (float | None): ratio - 1.
            - "difference" (float): observed - predicted.
            - "within_tolerance" (bool)
            - "observed", "predicted", "tolerance" (float)
    """
    observed = float(observed)
    predicted = float(predicted)
    difference = observed - predicted

    if predicted > 0:
        ratio = observed / predicted
        relative_error = ratio - 1.0
        within = abs(relative_error) <= tolerance
    else:
        ratio = None
        relative_error = None
        within = False

    return {
        "ratio": ratio,
        "relative_error": relative_error,
        "difference": difference,
        "within_tolerance": within,
        "observed": observed,
        "predicted": predicted,
        "tolerance": float(tolerance),
    }
