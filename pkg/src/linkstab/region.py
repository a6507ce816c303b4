"""Boundaries and size of the transitional region on the mean PRR curve."""
from __future__ import annotations

from dataclasses import dataclass

from .channel import DeploymentScenario, expected_prr

_PRR_TOL = 1e-6
_MAX_ITER = 200


class RegionNotBracketedError(ValueError):
    pass


@dataclass(frozen=True)
class RegionBounds:
    d_begin: float
    d_end: float
    upper: float = 0.8
    lower: float = 0.2

    def __post_init__(self):
        if not 0 < self.d_begin <= self.d_end:
            raise ValueError("region bounds must satisfy 0 < d_begin <= d_end")
        if not 0 <= self.lower <= self.upper <= 1:
            raise ValueError("thresholds must satisfy 0 <= lower <= upper <= 1")


def _crossing(mean_prr, target, lo, hi, tol):
    # mean_prr is strictly decreasing; keep mean(lo) > target >= mean(hi).
    mid = 0.5 * (lo + hi)
    for _ in range(_MAX_ITER):
        value = mean_prr(mid)
        if hi - lo <= 2 * tol and abs(value - target) <= _PRR_TOL:
            break
        if value > target:
            lo = mid
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
    return mid


def region_bounds(scenario: DeploymentScenario, upper: float = 0.8, lower: float = 0.2,
                  d_max: float = 1000.0, tol: float = 1e-3) -> RegionBounds:
    """Distances where the mean PRR crosses ``upper`` and ``lower``.

    Bisection stops once the returned midpoint is within ``tol`` metres of
    the crossing and its mean PRR is within 1e-6 of the threshold.
    """
    if not 0 < lower <= upper < 1:
        raise ValueError("thresholds must satisfy 0 < lower <= upper < 1")
    d0 = scenario.channel.d0
    if not d_max > d0:
        raise ValueError("d_max must exceed the reference distance")

    def mean_prr(d):
        return expected_prr(d, scenario)[0]

    at_d0, at_max = mean_prr(d0), mean_prr(d_max)
    if not at_d0 > upper:
        raise RegionNotBracketedError(
            f"region not bracketed at the near end: mean PRR {at_d0:.6g} at d0={d0} "
            f"does not exceed upper={upper}")
    if not at_max < lower:
        raise RegionNotBracketedError(
            f"region not bracketed at the far end: mean PRR {at_max:.6g} at d_max={d_max} "
            f"is not below lower={lower}")
    d_begin = _crossing(mean_prr, upper, d0, d_max, tol)
    d_end = d_begin if lower == upper else _crossing(mean_prr, lower, d0, d_max, tol)
    return RegionBounds(d_begin, d_end, upper, lower)


def region_coefficient(bounds: RegionBounds) -> float:
    """Region size relative to where it starts: ``(d_end - d_begin) / d_begin``."""
    return (bounds.d_end - bounds.d_begin) / bounds.d_begin
