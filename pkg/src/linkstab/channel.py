"""Log-normal shadowing channel, NCFSK radio reception and hardware variance.

The received SNR at distance ``d`` is

    gamma_dB = T - PL(d0) - 10 eta log10(d / d0) - R + N(0, sigma_ch)

where ``T`` is the transmitter's actual output power and ``R`` the
receiver's actual noise floor. Without hardware variance ``T`` and ``R``
are the nominal ``P_t`` and ``P_n``. A frame of ``f`` encoded bits is
received with probability ``(1 - ber(gamma)) ** f``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .units import db_to_linear

# Covariance of (output power, noise floor) in dB^2 measured on real radios.
MEASURED_HW_COV = ((6.0, -3.3), (-3.3, 3.7))

# Standard-normal integration grid for expected_prr (trapezoid over +-9 sigma).
_Z_NODES = np.linspace(-9.0, 9.0, 4097)
_Z_WEIGHTS = np.exp(-0.5 * _Z_NODES**2)
_Z_WEIGHTS /= _Z_WEIGHTS.sum()


def _ncfsk_ber(gamma_linear):
    return 0.5 * np.exp(-0.5 * gamma_linear)


class Modulation(enum.Enum):
    """Supported modulations. Register new ones in ``_BER_FUNCTIONS``."""

    NCFSK = "ncfsk"

    def ber(self, gamma_linear):
        return _BER_FUNCTIONS[self](gamma_linear)


_BER_FUNCTIONS = {Modulation.NCFSK: _ncfsk_ber}


class Encoding(enum.Enum):
    NONE = "none"
    MANCHESTER = "manchester"

    @property
    def expansion(self) -> int:
        return 2 if self is Encoding.MANCHESTER else 1


@dataclass(frozen=True)
class ChannelModel:
    pl_d0: float = 55.0
    d0: float = 1.0
    eta: float = 3.0
    sigma_ch: float = 3.8

    def __post_init__(self):
        if not math.isfinite(self.pl_d0):
            raise ValueError("pl_d0 must be finite")
        if not self.d0 > 0:
            raise ValueError("d0 must be positive")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.sigma_ch >= 0:
            raise ValueError("sigma_ch must be non-negative")


@dataclass(frozen=True)
class RadioModel:
    """Nominal radio. ``frame_bits`` is derived from the raw payload and encoding."""

    pt_nominal: float = 0.0
    pn_nominal: float = -105.0
    payload_bits: int = 400
    encoding: Encoding = Encoding.MANCHESTER
    modulation: Modulation = Modulation.NCFSK

    def __post_init__(self):
        if int(self.payload_bits) != self.payload_bits or self.payload_bits < 1:
            raise ValueError("payload_bits must be a positive integer")
        object.__setattr__(self, "payload_bits", int(self.payload_bits))
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        object.__setattr__(self, "modulation", Modulation(self.modulation))

    @classmethod
    def from_payload_bytes(cls, payload_bytes, encoding=Encoding.MANCHESTER, **kwargs):
        return cls(payload_bits=8 * int(payload_bytes), encoding=encoding, **kwargs)

    @property
    def frame_bits(self) -> int:
        return self.payload_bits * self.encoding.expansion


@dataclass(frozen=True)
class HardwareVariability:
    """Bivariate Gaussian spread of (output power, noise floor) around nominal."""

    cov: tuple = MEASURED_HW_COV
    enabled: bool = True
    _factor: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.cov, dtype=float)
        if m.shape != (2, 2) or not np.all(np.isfinite(m)):
            raise ValueError("hardware covariance must be a finite 2x2 matrix")
        if m[0, 1] != m[1, 0]:
            raise ValueError("hardware covariance must be symmetric")
        if m[0, 0] < 0 or m[1, 1] < 0:
            raise ValueError("hardware covariance diagonal must be non-negative")
        eigvals, eigvecs = np.linalg.eigh(m)
        if eigvals.min() < -1e-12 * max(1.0, abs(eigvals).max()):
            raise ValueError("hardware covariance must be positive semi-definite")
        object.__setattr__(self, "cov", tuple(tuple(float(v) for v in row) for row in m))
        object.__setattr__(self, "enabled", bool(self.enabled))
        object.__setattr__(self, "_factor", eigvecs * np.sqrt(np.clip(eigvals, 0.0, None)))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.cov)

    @property
    def sigma_tx2(self) -> float:
        return self.cov[0][0] if self.enabled else 0.0

    @property
    def sigma_rx2(self) -> float:
        return self.cov[1][1] if self.enabled else 0.0


@dataclass(frozen=True)
class RadioInstance:
    t_actual: float
    r_actual: float

    def __post_init__(self):
        if not (math.isfinite(self.t_actual) and math.isfinite(self.r_actual)):
            raise ValueError("radio instance values must be finite")


@dataclass(frozen=True)
class DeploymentScenario:
    channel: ChannelModel = field(default_factory=ChannelModel)
    radio: RadioModel = field(default_factory=RadioModel)
    hardware: HardwareVariability = field(default_factory=HardwareVariability)
    name: str = "custom"

    @property
    def sigma_hw2(self) -> float:
        return self.hardware.sigma_tx2 + self.hardware.sigma_rx2

    @property
    def sigma_t2(self) -> float:
        return self.sigma_hw2 + self.channel.sigma_ch**2

    @property
    def sigma_t(self) -> float:
        return math.sqrt(self.sigma_t2)


PRESETS = {
    "indoor": DeploymentScenario(
        channel=ChannelModel(pl_d0=55.0, d0=1.0, eta=3.0, sigma_ch=3.8),
        radio=RadioModel.from_payload_bytes(50),
        hardware=HardwareVariability(MEASURED_HW_COV, enabled=True),
        name="indoor",
    ),
    "outdoor": DeploymentScenario(
        channel=ChannelModel(pl_d0=55.0, d0=1.0, eta=4.0, sigma_ch=2.0),
        radio=RadioModel.from_payload_bytes(50),
        hardware=HardwareVariability(MEASURED_HW_COV, enabled=True),
        name="outdoor",
    ),
}


def preset(name: str) -> DeploymentScenario:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def _check_distance(d):
    d = np.asarray(d, dtype=float)
    if not np.all(d > 0):
        raise ValueError("distance must be positive")
    return d


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def mean_path_loss(d, channel: ChannelModel):
    """Deterministic part of the log-distance path loss in dB."""
    d = _check_distance(d)
    return _scalar_or_array(channel.pl_d0 + 10.0 * channel.eta * np.log10(d / channel.d0))


def snr_mean(d, scenario: DeploymentScenario):
    """Mean received SNR ``mu(d)`` in dB with nominal radio parameters."""
    radio = scenario.radio
    return _scalar_or_array(
        radio.pt_nominal - np.asarray(mean_path_loss(d, scenario.channel)) - radio.pn_nominal
    )


def _radio_draws(hw: HardwareVariability, nominal: RadioModel, rng, n: int):
    z = rng.standard_normal((n, 2))
    x = z @ hw._factor.T
    return nominal.pt_nominal + x[:, 0], nominal.pn_nominal + x[:, 1]


def draw_radio_hardware(hw: HardwareVariability, nominal: RadioModel, rng) -> RadioInstance:
    """Draw the actual (output power, noise floor) of one physical radio."""
    if not hw.enabled:
        return RadioInstance(nominal.pt_nominal, nominal.pn_nominal)
    t, r = _radio_draws(hw, nominal, rng, 1)
    return RadioInstance(float(t[0]), float(r[0]))


def link_hardware_arrays(hw: HardwareVariability, nominal: RadioModel, rng, n: int):
    """Transmitter powers and receiver noise floors for ``n`` independent links.

    Each link pairs two distinct radios: the output power comes from the
    sender and the noise floor from the receiver, so the within-radio
    correlation of ``hw.cov`` does not enter the SNR.
    """
    if not hw.enabled:
        return np.full(n, float(nominal.pt_nominal)), np.full(n, float(nominal.pn_nominal))
    t_tx, _ = _radio_draws(hw, nominal, rng, n)
    _, r_rx = _radio_draws(hw, nominal, rng, n)
    return t_tx, r_rx


def draw_link_hardware(hw: HardwareVariability, nominal: RadioModel, rng) -> RadioInstance:
    t, r = link_hardware_arrays(hw, nominal, rng, 1)
    return RadioInstance(float(t[0]), float(r[0]))


def sample_snr(d, scenario: DeploymentScenario, hw_instance: RadioInstance | None = None,
               rng=None, size=None):
    """Draw received SNR values in dB.

    With ``hw_instance`` the radio hardware is held fixed and only the
    shadowing is random. Otherwise link hardware is redrawn on every
    sample when hardware variance is enabled.
    """
    rng = np.random.default_rng() if rng is None else rng
    pl = np.asarray(mean_path_loss(d, scenario.channel))
    n = 1 if size is None else int(np.prod(size))
    if hw_instance is not None:
        t, r = hw_instance.t_actual, hw_instance.r_actual
    else:
        t, r = link_hardware_arrays(scenario.hardware, scenario.radio, rng, n)
    shadow = rng.normal(0.0, scenario.channel.sigma_ch, n)
    gamma = t - pl - r + shadow
    if size is None:
        return float(gamma[0])
    return gamma.reshape(size)


def bit_error_rate(gamma_linear, modulation: Modulation = Modulation.NCFSK):
    gamma_linear = np.asarray(gamma_linear, dtype=float)
    if np.any(gamma_linear < 0):
        raise ValueError("SNR ratio must be non-negative")
    return _scalar_or_array(Modulation(modulation).ber(gamma_linear))


def packet_reception_rate(gamma_db, frame_bits: int, modulation: Modulation = Modulation.NCFSK):
    """Probability that all ``frame_bits`` bits of a frame survive."""
    if int(frame_bits) != frame_bits or frame_bits < 1:
        raise ValueError("frame_bits must be a positive integer")
    modulation = Modulation(modulation)
    if modulation is Modulation.NCFSK:
        prr = kernels.ncfsk_prr(gamma_db, frame_bits)
    else:
        beta = modulation.ber(db_to_linear(gamma_db))
        prr = np.exp(frame_bits * np.log1p(-beta))
    return _scalar_or_array(prr)


def expected_prr(d, scenario: DeploymentScenario):
    """Mean and variance of the PRR over the Gaussian SNR at distance ``d``."""
    mu = snr_mean(d, scenario)
    sigma = scenario.sigma_t
    radio = scenario.radio
    if sigma == 0.0:
        return packet_reception_rate(mu, radio.frame_bits, radio.modulation), 0.0
    prr = np.asarray(packet_reception_rate(mu + sigma * _Z_NODES, radio.frame_bits,
                                           radio.modulation))
    mean = float(_Z_WEIGHTS @ prr)
    second = float(_Z_WEIGHTS @ prr**2)
    return mean, max(second - mean * mean, 0.0)
