"""Data-driven routing metrics: ETX, ETD, LD/ELD and geographic forwarder choice."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import DeploymentScenario, packet_reception_rate, sample_snr
from .montecarlo import parallel_map, substream, summarize

RELAY_CSV_HEADER = ("relay_distance_m", "n", "mean_etx", "etx_ci_lo", "etx_ci_hi", "etd",
                    "mean_prr")


@dataclass(frozen=True)
class RetransmissionPolicy:
    max_retx: int = 7
    fail_value: int = 8

    def __post_init__(self):
        if self.max_retx < 1:
            raise ValueError("max_retx must be at least 1")
        if self.fail_value < self.max_retx:
            raise ValueError("fail_value must be at least max_retx")


@dataclass(frozen=True)
class ForwarderCandidate:
    id: object
    etx_estimate: float
    dist_to_dest: float
    latency_estimate: float | None = None

    def __post_init__(self):
        if math.isfinite(self.etx_estimate) and self.etx_estimate < 1:
            raise ValueError("etx_estimate must be at least 1")
        if self.dist_to_dest < 0:
            raise ValueError("dist_to_dest must be non-negative")


def etx_from_pdr(pdr: float) -> float:
    if not 0 <= pdr <= 1:
        raise ValueError("pdr must lie in [0, 1]")
    return math.inf if pdr == 0 else 1.0 / pdr


def expected_attempts(prr: float, policy: RetransmissionPolicy = RetransmissionPolicy()) -> float:
    """Mean of ``simulate_attempts`` in closed form."""
    k = np.arange(1, policy.max_retx + 1)
    q = 1.0 - prr
    return float(np.sum(k * prr * q ** (k - 1)) + policy.fail_value * q**policy.max_retx)


def simulate_attempts_many(prr, policy: RetransmissionPolicy, rng) -> np.ndarray:
    prr = np.atleast_1d(np.asarray(prr, dtype=float))
    if np.any((prr < 0) | (prr > 1)):
        raise ValueError("prr must lie in [0, 1]")
    uniforms = rng.random((prr.size, policy.max_retx))
    return kernels.count_attempts(prr, uniforms, policy.fail_value)


def simulate_attempts(prr: float, policy: RetransmissionPolicy = RetransmissionPolicy(),
                      rng=None) -> int:
    """Transmissions until the first success, or ``fail_value`` if all fail."""
    rng = np.random.default_rng() if rng is None else rng
    return int(simulate_attempts_many(prr, policy, rng)[0])


def _per_progress(numerator: float, l_sd: float, l_rd: float) -> float:
    # Only neighbours strictly closer to the destination make progress.
    progress = l_sd - l_rd
    if progress <= 0 or math.isinf(numerator):
        return math.inf
    return numerator / progress


def etd(etx: float, l_sd: float, l_rd: float) -> float:
    """Expected transmissions per metre of progress towards the destination."""
    return _per_progress(etx, l_sd, l_rd)


def ld(latency: float, l_sd: float, l_rd: float) -> float:
    if latency < 0:
        raise ValueError("latency must be non-negative")
    return _per_progress(latency, l_sd, l_rd)


def eld(expected_latency, l_sd: float, l_rd: float) -> float:
    """Like ``ld`` with the expected latency; accepts latency samples or their mean."""
    return ld(float(np.mean(expected_latency)), l_sd, l_rd)


def mac_latency(attempts, slot: float = 1.0):
    """Latency model used when no measurement exists: one slot per transmission."""
    return np.asarray(attempts) * slot


def select_forwarder(candidates, l_sd: float, metric: str = "etd", slot: float = 1.0):
    """Identifier of the neighbour with the lowest metric, or None if none progresses.

    Ties go to the smallest identifier.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("no forwarder candidates")
    if metric not in ("etd", "eld"):
        raise ValueError(f"unknown metric {metric!r}")
    best = None
    for c in candidates:
        if metric == "etd":
            value = etd(c.etx_estimate, l_sd, c.dist_to_dest)
        else:
            latency = c.latency_estimate
            if latency is None:
                latency = float(mac_latency(c.etx_estimate, slot))
            value = eld(latency, l_sd, c.dist_to_dest)
        if math.isinf(value):
            continue
        if best is None or (value, c.id) < best:
            best = (value, c.id)
    return None if best is None else best[1]


@dataclass(frozen=True)
class RelayExperiment:
    deployment: DeploymentScenario
    l_sd: float = 40.0
    relay_distances: tuple = tuple(float(d) for d in range(1, 40))
    policy: RetransmissionPolicy = RetransmissionPolicy()
    sims: int = 100
    seed: int = 0
    confidence_level: float = 0.95

    def __post_init__(self):
        d = np.asarray(self.relay_distances, dtype=float).ravel()
        if d.size == 0 or np.any(d <= 0) or np.any(np.diff(d) <= 0):
            raise ValueError("relay distances must be positive and strictly ascending")
        if np.any(d >= self.l_sd):
            raise ValueError("every relay distance must be shorter than l_sd")
        if self.sims < 1:
            raise ValueError("sims must be at least 1")
        object.__setattr__(self, "relay_distances", tuple(float(v) for v in d))


@dataclass(frozen=True, eq=False)
class RelayRecord:
    relay_distance: float
    n: int
    mean_etx: float
    etx_ci_lo: float
    etx_ci_hi: float
    etd: float
    mean_prr: float
    attempts: np.ndarray = field(repr=False)
    prr_samples: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class RelaySweepResult:
    records: tuple

    @property
    def relay_distances(self) -> np.ndarray:
        return np.array([r.relay_distance for r in self.records])

    @property
    def mean_etx(self) -> np.ndarray:
        return np.array([r.mean_etx for r in self.records])

    @property
    def etd(self) -> np.ndarray:
        return np.array([r.etd for r in self.records])

    @property
    def mean_prr(self) -> np.ndarray:
        return np.array([r.mean_prr for r in self.records])

    def best_relay(self) -> RelayRecord:
        return min(self.records, key=lambda r: (r.etd, r.relay_distance))

    def csv_rows(self):
        for r in self.records:
            yield (r.relay_distance, r.n, r.mean_etx, r.etx_ci_lo, r.etx_ci_hi, r.etd, r.mean_prr)


def run_relay_sweep(exp: RelayExperiment, workers: int = 1) -> RelaySweepResult:
    """Sender, relay and destination on a line; the relay moves away from the sender.

    Each simulation is a fresh link (hardware and shadowing) whose PRR is
    used for every retransmission of that packet.
    """
    dep = exp.deployment

    def one(index):
        d = exp.relay_distances[index]
        rng = substream(exp.seed, index)
        gamma = sample_snr(d, dep, rng=rng, size=exp.sims)
        prr = np.atleast_1d(packet_reception_rate(gamma, dep.radio.frame_bits,
                                                  dep.radio.modulation))
        attempts = simulate_attempts_many(prr, exp.policy, rng)
        s = summarize(attempts, exp.confidence_level, bounds=(1.0, float(exp.policy.fail_value)))
        return RelayRecord(d, exp.sims, s.mean, s.ci_lo, s.ci_hi,
                           etd(s.mean, exp.l_sd, exp.l_sd - d), float(prr.mean()),
                           attempts, prr)

    return RelaySweepResult(tuple(parallel_map(one, range(len(exp.relay_distances)), workers)))
