import math
from dataclasses import replace

import numpy as np
import pytest

from linkstab.channel import (
    ChannelModel,
    DeploymentScenario,
    HardwareVariability,
    RadioModel,
    packet_reception_rate,
    preset,
    snr_mean,
)
from linkstab.montecarlo import (
    SweepScenario,
    compare_node_configs,
    run_prr_sweep,
    std_error_of_std,
    summarize,
    z_value,
)
from linkstab.region import region_bounds

GRID = tuple(np.arange(1.0, 40.5, 0.5))


def no_hw(name):
    """Preset without hardware variance, the setting of the simulation-count experiments."""
    return replace(preset(name), hardware=HardwareVariability(enabled=False))


def quiet_scenario():
    return DeploymentScenario(ChannelModel(55.0, 1.0, 3.0, 0.0), RadioModel(),
                              HardwareVariability(enabled=False))


class TestSummarize:
    def test_constant(self):
        s = summarize([0.3] * 25)
        assert s.std == 0.0 and s.ci_lo == s.ci_hi == 0.3

    def test_two_points(self):
        s = summarize([0.0, 1.0])
        assert s.mean == 0.5
        assert s.std == pytest.approx(math.sqrt(0.5), abs=1e-12)

    def test_single_sample(self):
        assert summarize([0.7]) == (0.7, 0.0, 0.7, 0.7)

    def test_z(self):
        assert z_value(0.95) == pytest.approx(1.960, abs=5e-4)

    def test_clamped(self):
        s = summarize([0.0, 0.0, 1.0])
        assert 0.0 <= s.ci_lo <= s.mean <= s.ci_hi <= 1.0

    def test_interval(self):
        x = np.random.default_rng(0).random(400)
        s = summarize(x, 0.9)
        half = z_value(0.9) * x.std(ddof=1) / 20.0
        assert s.ci_hi - s.mean == pytest.approx(half, rel=1e-12)

    def test_empty(self):
        with pytest.raises(ValueError):
            summarize([])


def test_std_error_of_std_matches_bootstrap():
    rng = np.random.default_rng(1)
    x = (rng.random(2000) < 0.3).astype(float)
    boot = [rng.choice(x, x.size).std(ddof=1) for _ in range(2000)]
    assert std_error_of_std(x) == pytest.approx(np.std(boot), rel=0.1)


@pytest.mark.parametrize("scale", [1e-90, 1e-150])
def test_std_error_of_std_scales_without_underflow(scale):
    x = np.random.default_rng(2).standard_normal(500)
    assert std_error_of_std(scale * x) == pytest.approx(scale * std_error_of_std(x), rel=1e-9)


class TestScenario:
    def test_sorts_distances(self):
        s = SweepScenario(quiet_scenario(), (3.0, 1.0, 2.0), 10)
        assert s.distances == (1.0, 2.0, 3.0)

    @pytest.mark.parametrize("kwargs", [
        dict(distances=(1.0, 1.0)),
        dict(distances=(0.0, 1.0)),
        dict(distances=(1.0,), sims_per_distance=10, node_count=3),
        dict(distances=(1.0,), sims_per_distance=0),
        dict(distances=(1.0,), confidence_level=1.5),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SweepScenario(quiet_scenario(), **kwargs)


def test_no_randomness_gives_exact_prr():
    s = quiet_scenario()
    res = run_prr_sweep(SweepScenario(s, GRID, 1, 1, seed=3))
    for r in res.records:
        assert r.n == 1
        assert r.samples[0] == packet_reception_rate(snr_mean(r.distance, s), 800)
        assert r.ci_lo == r.mean == r.ci_hi


def test_record_invariants():
    res = run_prr_sweep(SweepScenario(preset("indoor"), GRID, 200, 10, seed=5))
    for r in res.records:
        assert 0 <= r.mean <= 1 and r.std >= 0
        assert r.ci_lo <= r.mean <= r.ci_hi
        if r.std == 0:
            assert r.ci_lo == r.ci_hi


def test_determinism_and_workers():
    sc = SweepScenario(preset("indoor"), GRID, 100, 10, seed=42)
    a = run_prr_sweep(sc)
    b = run_prr_sweep(sc, workers=4)
    for x, y in zip(a.records, b.records):
        assert np.array_equal(x.samples, y.samples)
    assert list(a.csv_rows()) == list(b.csv_rows())


def test_order_independence():
    dep = preset("outdoor")
    a = run_prr_sweep(SweepScenario(dep, (4.0, 8.0, 12.0), 50, 5, seed=1))
    b = run_prr_sweep(SweepScenario(dep, (12.0, 4.0, 8.0), 50, 5, seed=1))
    assert list(a.csv_rows()) == list(b.csv_rows())


def test_hardware_fixed_per_node():
    # Without shadowing each node contributes one repeated value.
    dep = DeploymentScenario(ChannelModel(55.0, 1.0, 3.0, 0.0), RadioModel(),
                             HardwareVariability())
    res = run_prr_sweep(SweepScenario(dep, (18.0,), 40, 4, seed=9))
    chunks = res.records[0].samples.reshape(4, 10)
    assert np.all(chunks == chunks[:, :1])
    assert len(np.unique(chunks[:, 0])) == 4


@pytest.mark.parametrize("name", ["indoor", "outdoor"])
def test_std_peak_inside_region(name):
    dep = no_hw(name)
    grid = tuple(np.arange(1.0, 60.5, 0.5))
    res = run_prr_sweep(SweepScenario(dep, grid, 500, 1, seed=2))
    b = region_bounds(dep)
    peak = res.distances[np.argmax(res.stds)]
    assert b.d_begin - 0.5 <= peak <= b.d_end + 0.5
    assert res.stds[0] < 0.02 and res.stds[-1] < 0.02


def test_ci_scaling():
    dep = no_hw("indoor")
    b = region_bounds(dep)
    mid = tuple(np.linspace(b.d_begin, b.d_end, 5)[1:4])
    widths = {n: run_prr_sweep(SweepScenario(dep, mid, n, 1, seed=11)).ci_widths.mean()
              for n in (10, 50, 500)}
    for n in (10, 50):
        ratio = widths[n] / widths[500]
        assert 0.7 <= ratio / math.sqrt(500 / n) <= 1.3


class TestCompare:
    def test_self_comparison(self):
        sc = SweepScenario(preset("indoor"), GRID, 100, 10, seed=4)
        cmp = compare_node_configs(sc, sc)
        assert np.all(cmp.std_diff == 0)

    def test_mismatch(self):
        dep = preset("indoor")
        with pytest.raises(ValueError):
            compare_node_configs(SweepScenario(dep, (1.0, 2.0), 100),
                                 SweepScenario(dep, (1.0, 3.0), 100, 10))
        with pytest.raises(ValueError):
            compare_node_configs(SweepScenario(dep, (1.0,), 100),
                                 SweepScenario(dep, (1.0,), 200, 10))
        with pytest.raises(ValueError):
            compare_node_configs(SweepScenario(dep, (1.0,), 100),
                                 SweepScenario(preset("outdoor"), (1.0,), 100, 10))

    def test_multi_node_wider(self):
        dep = preset("indoor")
        cmp = compare_node_configs(SweepScenario(dep, GRID, 1000, 1, seed=21),
                                   SweepScenario(dep, GRID, 1000, 10, seed=22))
        assert cmp.multi.std_band_width(0.05) > cmp.single.std_band_width(0.05)
