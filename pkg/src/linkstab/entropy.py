"""Entropy measures for link organisation, node mobility and route stability.

Conventions: ``0 log 0 = 0`` everywhere; a node with one neighbour has a
normalised entropy of 0.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

_NORM_TOL = 1e-9


def _plogp_sum(p: np.ndarray) -> float:
    nz = p[p > 0]
    return math.fsum(nz * np.log(nz))


def shannon_entropy(probs, base: float = math.e) -> float:
    """``-sum p log p`` in the given base."""
    p = np.asarray(probs, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("empty probability vector")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("probabilities must be finite and non-negative")
    total = math.fsum(p)
    if abs(total - 1.0) > _NORM_TOL:
        raise ValueError(f"probabilities sum to {total!r}, expected 1")
    h = -_plogp_sum(p) / math.log(base)
    return max(h, 0.0)


def link_entropy(joint: Mapping) -> float:
    """Entropy in bits of a distribution over node pairs ``(u, v) -> p``."""
    return shannon_entropy(list(joint.values()), base=2)


@dataclass(frozen=True)
class KinematicSample:
    position: tuple
    velocity: tuple
    timestamp: float

    def __post_init__(self):
        pos = tuple(float(v) for v in self.position)
        vel = tuple(float(v) for v in self.velocity)
        if len(pos) != 2 or len(vel) != 2:
            raise ValueError("position and velocity must be 2D")
        if not all(math.isfinite(v) for v in (*pos, *vel, self.timestamp)):
            raise ValueError("kinematic sample must be finite")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)


@dataclass(frozen=True)
class FeatureWindow:
    dt_values: tuple
    radio_range: float

    def __post_init__(self):
        dts = tuple(float(v) for v in np.atleast_1d(self.dt_values))
        if not dts:
            raise ValueError("feature window needs at least one sample")
        if not self.radio_range > 0:
            raise ValueError("radio_range must be positive")
        object.__setattr__(self, "dt_values", dts)

    @property
    def sample_count(self) -> int:
        return len(self.dt_values)


@dataclass(frozen=True)
class NeighborFeature:
    neighbor_id: object
    a_mn: float

    def __post_init__(self):
        if not (math.isfinite(self.a_mn) and self.a_mn >= 0):
            raise ValueError("feature value must be finite and non-negative")


@dataclass(frozen=True)
class StabilityLink:
    neighbor_id: object
    p: float
    k: float

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError("stability p must lie in [0, 1]")
        if not 0 <= self.k <= 1:
            raise ValueError("link quality k must lie in [0, 1]")


def relative_velocity(vm, vn) -> np.ndarray:
    return np.asarray(vm, dtype=float) - np.asarray(vn, dtype=float)


def relative_position(pm, pn) -> np.ndarray:
    return np.asarray(pm, dtype=float) - np.asarray(pn, dtype=float)


def _aligned(series_m: Sequence[KinematicSample], series_n: Sequence[KinematicSample]):
    if len(series_m) != len(series_n):
        raise ValueError(f"series lengths differ: {len(series_m)} != {len(series_n)}")
    if not series_m:
        raise ValueError("series must contain at least one sample")
    tm = np.array([s.timestamp for s in series_m])
    tn = np.array([s.timestamp for s in series_n])
    if not np.array_equal(tm, tn):
        raise ValueError("series timestamps do not match")
    if np.any(np.diff(tm) <= 0):
        raise ValueError("timestamps must be strictly increasing")
    rel_p = np.array([relative_position(a.position, b.position) for a, b in zip(series_m, series_n)])
    rel_v = np.array([relative_velocity(a.velocity, b.velocity) for a, b in zip(series_m, series_n)])
    return rel_p, rel_v


def speed_feature(series_m, series_n) -> float:
    """Mean relative speed of two nodes over their common samples."""
    _, rel_v = _aligned(series_m, series_n)
    return float(np.mean(np.hypot(rel_v[:, 0], rel_v[:, 1])))


def mobility_feature(series_m, series_n, window: FeatureWindow) -> float:
    """Mean predicted separation ``|p + v dt|`` in units of the radio range."""
    rel_p, rel_v = _aligned(series_m, series_n)
    if window.sample_count != len(rel_p):
        raise ValueError(
            f"window has {window.sample_count} intervals for {len(rel_p)} samples")
    ahead = rel_p + rel_v * np.asarray(window.dt_values)[:, None]
    n = len(rel_p)
    return float(np.sum(np.hypot(ahead[:, 0], ahead[:, 1])) / (n * window.radio_range))


def node_entropy(features: Sequence[NeighborFeature]) -> float:
    """Neighbourhood entropy normalised by the log of the neighbour count."""
    a = np.array([f.a_mn for f in features], dtype=float)
    if a.size == 0:
        raise ValueError("node entropy needs at least one neighbour")
    total = a.sum()
    if total <= 0:
        raise ValueError("degenerate feature set: all features are zero")
    if a.size == 1:
        return 0.0
    p = a / total
    h = -_plogp_sum(p) / math.log(a.size)
    return min(max(h, 0.0), 1.0)


def _check_unit_interval(h_values):
    h = np.asarray(h_values, dtype=float).ravel()
    if np.any((h < 0) | (h > 1)) or not np.all(np.isfinite(h)):
        raise ValueError("entropies must lie in [0, 1]")
    return h


def route_stability_product(h_values) -> float:
    return float(np.prod(_check_unit_interval(h_values)))


def route_stability_log(h_values) -> float:
    """``-sum ln H_i``; infinite (with a warning) when some hop has zero entropy."""
    h = _check_unit_interval(h_values)
    if np.any(h == 0):
        warnings.warn("zero hop entropy makes the route stability infinite", RuntimeWarning,
                      stacklevel=2)
        return math.inf
    return -math.fsum(np.log(h)) + 0.0


def spatiotemporal_entropy(links: Sequence[StabilityLink], base: float = math.e,
                           negated: bool = False) -> float:
    """Quality-weighted ``(1/N) sum k p log p`` over a node's neighbours.

    The value is non-positive; ``negated=True`` returns its magnitude.
    """
    links = list(links)
    if not links:
        raise ValueError("spatiotemporal entropy needs at least one link")
    terms = [l.k * l.p * math.log(l.p) for l in links if l.p > 0]
    value = math.fsum(terms) / (len(links) * math.log(base))
    return abs(value) if negated else value
