import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submimo import ConfigError, Subband
from submimo.waveform import (build_cognitive_plan, build_fdm_plan,
                              conventional_plan, pulse_energy,
                              reference_subbands, spectral_power, synth_pulse)


def full_plan(num_tx=8):
    return build_fdm_plan(num_tx=num_tx, channel_spacing=15e6, signal_band=12e6,
                          guard=3e6, pri=100e-6, pulse_width=4.2e-6)


def test_carrier_layout():
    plan = full_plan()
    carriers = plan.carriers
    assert carriers[0] == pytest.approx(6e6)
    assert carriers[7] == pytest.approx(111e6)
    assert plan.total_bandwidth == pytest.approx(120e6)


def test_single_channel_plan():
    plan = full_plan(num_tx=1)
    assert plan.carriers.tolist() == [6e6]


def test_band_arithmetic_must_close():
    with pytest.raises(ConfigError):
        build_fdm_plan(8, 15e6, 12e6, 2e6, 100e-6, 4.2e-6)


def test_pulse_width_bounds():
    with pytest.raises(ConfigError):
        build_fdm_plan(8, 15e6, 12e6, 3e6, 100e-6, 0.0)
    with pytest.raises(ConfigError):
        build_fdm_plan(8, 15e6, 12e6, 3e6, 100e-6, 2e-4)


def test_reference_subbands():
    bands = reference_subbands()
    assert len(bands) == 8
    for band in bands:
        assert band.width == pytest.approx(375e3)
    assert sum(b.width for b in bands) == pytest.approx(3e6)
    for a, b in zip(bands, bands[1:]):
        assert a.hi <= b.lo


def test_power_scale_of_reference_plan():
    plan = build_cognitive_plan(full_plan(), reference_subbands())
    assert plan.amplitude_scale == pytest.approx(2.0)


def test_full_band_plan_has_unit_scale():
    plan = conventional_plan(full_plan())
    assert plan.amplitude_scale == pytest.approx(1.0)


def test_overlapping_subbands_rejected():
    with pytest.raises(ConfigError):
        build_cognitive_plan(full_plan(), (Subband(1e6, 2e6), Subband(1.5e6, 3e6)))


def test_out_of_channel_subband_rejected():
    with pytest.raises(ConfigError):
        build_cognitive_plan(full_plan(), (Subband(14e6, 16e6),))


@pytest.mark.parametrize("tx", [0, 3, 7])
def test_cognitive_pulse_energy_sits_in_the_slices(tx):
    plan = build_cognitive_plan(full_plan(), reference_subbands())
    pulse = synth_pulse(plan, tx, 120e6)
    offset = tx * plan.base.channel_spacing
    in_slices = sum(
        spectral_power(pulse, Subband(offset + b.lo, offset + b.hi))
        for b in plan.subbands)
    assert in_slices / pulse_energy(pulse) >= 0.99


def test_conventional_pulse_energy_confined_to_signal_band():
    plan = conventional_plan(full_plan())
    pulse = synth_pulse(plan, 0, 120e6)
    in_band = spectral_power(pulse, Subband(0.0, 12e6))
    assert in_band == pytest.approx(pulse_energy(pulse), rel=1e-9)


def test_cognitive_and_conventional_pulses_carry_equal_power():
    base = full_plan()
    cognitive = build_cognitive_plan(base, reference_subbands(), total_power=2.5)
    conventional = conventional_plan(base, total_power=2.5)
    for tx in range(8):
        e_cog = pulse_energy(synth_pulse(cognitive, tx, 120e6))
        e_conv = pulse_energy(synth_pulse(conventional, tx, 120e6))
        assert e_cog == pytest.approx(2.5, rel=1e-9)
        assert abs(e_cog - e_conv) / e_conv < 0.01


def test_full_band_power_integrates_to_total_power():
    plan = conventional_plan(full_plan(), total_power=3.0)
    pulse = synth_pulse(plan, 2, 120e6)
    band = Subband(2 * 15e6, 2 * 15e6 + 12e6)
    assert spectral_power(pulse, band) == pytest.approx(3.0, rel=1e-9)


def test_per_slice_power_matches_flat_spectrum_algebra():
    plan = build_cognitive_plan(full_plan(), reference_subbands(), total_power=1.0)
    pulse = synth_pulse(plan, 0, 120e6)
    scale = plan.amplitude_scale
    for band in plan.subbands:
        power = spectral_power(pulse, Subband(band.lo, band.hi))
        expected = scale ** 2 * (band.width / plan.base.signal_band) * plan.total_power
        assert power == pytest.approx(expected, rel=1e-9)


def test_guard_band_power_is_negligible():
    plan = build_cognitive_plan(full_plan(), reference_subbands())
    pulse = synth_pulse(plan, 1, 120e6)
    offset = plan.base.channel_spacing
    guard = Subband(offset + 13e6, offset + 15e6)
    assert spectral_power(pulse, guard) < 1e-4 * plan.total_power


def test_in_slice_density_boost_is_the_squared_scale():
    base = full_plan()
    cognitive = build_cognitive_plan(base, reference_subbands())
    conventional = conventional_plan(base)
    cog = synth_pulse(cognitive, 0, 120e6)
    conv = synth_pulse(conventional, 0, 120e6)
    bin_hz = 1.0 / base.pri
    for band in cognitive.subbands[:-1]:  # the last slice sits in the guard band
        # compare the density over the slice interior, clear of edge bins
        interior = Subband(band.lo + bin_hz, band.hi - bin_hz)
        ratio = spectral_power(cog, interior) / spectral_power(conv, interior)
        assert ratio == pytest.approx(cognitive.amplitude_scale ** 2, rel=1e-9)


def test_synthesis_is_deterministic():
    plan = build_cognitive_plan(full_plan(), reference_subbands())
    a = synth_pulse(plan, 5, 120e6, phase_seed=99)
    b = synth_pulse(plan, 5, 120e6, phase_seed=99)
    assert np.array_equal(a.samples, b.samples)
    c = synth_pulse(plan, 5, 120e6, phase_seed=100)
    assert not np.array_equal(a.samples, c.samples)


def test_insufficient_sample_rate_rejected():
    plan = build_cognitive_plan(full_plan(), reference_subbands())
    with pytest.raises(ConfigError):
        synth_pulse(plan, 0, 60e6)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=14.0), min_size=1, max_size=6,
                unique=True),
       st.floats(min_value=0.05, max_value=0.9))
def test_power_conservation_for_random_slice_plans(starts, width_mhz):
    starts = sorted(starts)
    bands = []
    prev_hi = 0.0
    for s in starts:
        lo = max(s, prev_hi)
        hi = lo + width_mhz
        if hi > 15.0:
            continue
        bands.append(Subband(lo * 1e6, hi * 1e6))
        prev_hi = hi
    if not bands:
        return
    plan = build_cognitive_plan(full_plan(num_tx=2), bands, total_power=1.0)
    pulse = synth_pulse(plan, 1, 30e6)
    assert pulse_energy(pulse) == pytest.approx(1.0, rel=1e-9)
