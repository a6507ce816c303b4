"""Low-power wireless link quality, routing metrics and entropy-based stability."""
from .channel import (
    ChannelModel,
    DeploymentScenario,
    Encoding,
    HardwareVariability,
    Modulation,
    RadioInstance,
    RadioModel,
    bit_error_rate,
    draw_link_hardware,
    draw_radio_hardware,
    expected_prr,
    mean_path_loss,
    packet_reception_rate,
    preset,
    sample_snr,
    snr_mean,
)
from .region import RegionBounds, RegionNotBracketedError, region_bounds, region_coefficient

__version__ = "0.1.0"
