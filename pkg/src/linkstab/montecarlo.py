"""Seeded Monte-Carlo sweeps of packet reception rate versus distance.

Each node draws its radio hardware from a stream keyed by the node index and
its shadowing at each distance from a stream keyed by (distance index, node
index), all derived from the master seed. Results therefore do not depend
on execution order or on how many worker threads run the sweep.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import NamedTuple

import numpy as np

from .channel import (
    DeploymentScenario,
    draw_link_hardware,
    packet_reception_rate,
    sample_snr,
)

SWEEP_CSV_HEADER = ("distance_m", "n", "mean_prr", "std_prr", "ci_lo", "ci_hi")

# Stream namespaces: node hardware is shared by all distances of a sweep.
_HW, _SHADOW = 0, 1


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``key`` under the master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


def parallel_map(func, items, workers: int = 1):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


class Summary(NamedTuple):
    mean: float
    std: float
    ci_lo: float
    ci_hi: float


def z_value(confidence_level: float) -> float:
    if not 0 < confidence_level < 1:
        raise ValueError("confidence_level must lie in (0, 1)")
    return NormalDist().inv_cdf(0.5 + confidence_level / 2.0)


def summarize(samples, confidence_level: float = 0.95, bounds=(0.0, 1.0)) -> Summary:
    """Mean, unbiased standard deviation and normal-approximation interval.

    The interval is clamped to ``bounds`` (PRR lives in [0, 1]).
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("cannot summarize an empty sample set")
    mean = float(x.mean())
    std = float(x.std(ddof=1)) if x.size > 1 else 0.0
    half = z_value(confidence_level) * std / math.sqrt(x.size)
    lo, hi = bounds
    return Summary(mean, std, max(lo, mean - half), min(hi, mean + half))


def std_error_of_std(samples) -> float:
    """Delta-method standard error of the sample standard deviation."""
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 2:
        return 0.0
    s = x.std(ddof=1)
    if s == 0.0:
        return 0.0
    # Standardise first so fourth powers of tiny spreads do not underflow.
    kurt = np.mean(((x - x.mean()) / s) ** 4)
    return float(s * math.sqrt(max(kurt - (n - 3) / (n - 1), 0.0) / n) / 2.0)


@dataclass(frozen=True)
class SweepScenario:
    deployment: DeploymentScenario
    distances: tuple
    sims_per_distance: int = 1000
    node_count: int = 1
    seed: int = 0
    confidence_level: float = 0.95

    def __post_init__(self):
        d = np.sort(np.asarray(self.distances, dtype=float).ravel())
        if d.size == 0 or not np.all(d > 0):
            raise ValueError("distances must be positive and non-empty")
        if np.any(np.diff(d) <= 0):
            raise ValueError("distances must be distinct")
        if self.sims_per_distance < 1 or self.node_count < 1:
            raise ValueError("sims_per_distance and node_count must be at least 1")
        if self.sims_per_distance % self.node_count:
            raise ValueError("sims_per_distance must be divisible by node_count")
        z_value(self.confidence_level)
        object.__setattr__(self, "distances", tuple(float(v) for v in d))

    @property
    def sims_per_node(self) -> int:
        return self.sims_per_distance // self.node_count


@dataclass(frozen=True, eq=False)
class DistanceRecord:
    distance: float
    samples: np.ndarray = field(repr=False)
    mean: float
    std: float
    ci_lo: float
    ci_hi: float

    @property
    def n(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True, eq=False)
class SweepResult:
    records: tuple

    @property
    def distances(self) -> np.ndarray:
        return np.array([r.distance for r in self.records])

    @property
    def means(self) -> np.ndarray:
        return np.array([r.mean for r in self.records])

    @property
    def stds(self) -> np.ndarray:
        return np.array([r.std for r in self.records])

    @property
    def ci_widths(self) -> np.ndarray:
        return np.array([r.ci_hi - r.ci_lo for r in self.records])

    def std_band_width(self, threshold: float) -> float:
        """Span of the distances whose standard deviation exceeds ``threshold``."""
        above = self.distances[self.stds > threshold]
        return float(above[-1] - above[0]) if above.size else 0.0

    def csv_rows(self):
        for r in self.records:
            yield (r.distance, r.n, r.mean, r.std, r.ci_lo, r.ci_hi)


def _distance_samples(scenario: SweepScenario, index: int) -> np.ndarray:
    dep = scenario.deployment
    d = scenario.distances[index]
    chunks = []
    for node in range(scenario.node_count):
        hw = draw_link_hardware(dep.hardware, dep.radio, substream(scenario.seed, _HW, node))
        rng = substream(scenario.seed, _SHADOW, index, node)
        gamma = sample_snr(d, dep, hw_instance=hw, rng=rng, size=scenario.sims_per_node)
        chunks.append(np.atleast_1d(
            packet_reception_rate(gamma, dep.radio.frame_bits, dep.radio.modulation)))
    return np.concatenate(chunks)


def run_prr_sweep(scenario: SweepScenario, workers: int = 1) -> SweepResult:
    """PRR samples at every distance; each node keeps its hardware for all its samples."""

    def one(index):
        samples = _distance_samples(scenario, index)
        s = summarize(samples, scenario.confidence_level)
        return DistanceRecord(scenario.distances[index], samples, *s)

    return SweepResult(tuple(parallel_map(one, range(len(scenario.distances)), workers)))


@dataclass(frozen=True, eq=False)
class NodeComparison:
    single: SweepResult
    multi: SweepResult
    std_diff: np.ndarray = field(repr=False)

    @property
    def distances(self) -> np.ndarray:
        return self.single.distances

    def pooled_std_error(self) -> np.ndarray:
        return np.array([
            math.hypot(std_error_of_std(a.samples), std_error_of_std(b.samples))
            for a, b in zip(self.single.records, self.multi.records)
        ])

    def csv_rows(self):
        for a, b, diff in zip(self.single.records, self.multi.records, self.std_diff):
            yield (a.distance, a.n, a.mean, a.std, a.ci_lo, a.ci_hi,
                   b.mean, b.std, b.ci_lo, b.ci_hi, float(diff))


NODE_COMPARE_CSV_HEADER = (
    "distance_m", "n",
    "single_mean_prr", "single_std_prr", "single_ci_lo", "single_ci_hi",
    "multi_mean_prr", "multi_std_prr", "multi_ci_lo", "multi_ci_hi",
    "std_diff",
)


def compare_node_configs(single: SweepScenario, multi: SweepScenario,
                         workers: int = 1) -> NodeComparison:
    """Run both sweeps; ``std_diff`` is multi minus single per distance."""
    if single.deployment != multi.deployment:
        raise ValueError("node comparison needs identical deployments")
    if single.distances != multi.distances:
        raise ValueError("node comparison needs identical distance grids")
    if single.sims_per_distance != multi.sims_per_distance:
        raise ValueError("node comparison needs the same total number of simulations")
    a = run_prr_sweep(single, workers)
    b = run_prr_sweep(multi, workers)
    return NodeComparison(a, b, b.stds - a.stds)
