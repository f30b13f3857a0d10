import numpy as np
import pytest

from submimo import (NumericalError, Scene, Target, ValidationError,
                     add_noise, oracle_coefficients, synth_received,
                     target_from_range)
from submimo.scene import SPEED_OF_LIGHT
from submimo.waveform import synth_pulse


def make_scene(*triples):
    return Scene(targets=tuple(Target(d, s, a) for d, s, a in triples))


def test_range_delay_conversion():
    t = target_from_range(15e3, 0.0, 1.0)
    assert t.delay == pytest.approx(100e-6)
    assert t.range_m == pytest.approx(15e3)
    assert SPEED_OF_LIGHT == 3.0e8


def test_duplicate_locations_rejected():
    with pytest.raises(ValidationError):
        make_scene((1e-5, 0.2, 1.0), (1e-5, 0.2, 2.0))


def test_empty_scene_synthesizes_silence(desk_env):
    rx = synth_received(Scene(targets=()), desk_env.array, desk_env.plan,
                        desk_env.sample_rate)
    assert np.all(rx.samples == 0)
    assert rx.num_rx == desk_env.array.num_rx


def test_zero_delay_broadside_target_sums_the_pulses(desk_env):
    scene = make_scene((0.0, 0.0, 1.0))
    rx = synth_received(scene, desk_env.array, desk_env.plan, desk_env.sample_rate)
    expected = sum(
        synth_pulse(desk_env.plan, m, desk_env.sample_rate).samples
        for m in range(desk_env.array.num_tx))
    for q in range(rx.num_rx):
        np.testing.assert_allclose(rx.samples[q], expected, atol=1e-12)


def test_synthesis_is_linear_in_the_scene(desk_env):
    a = make_scene((2e-5, 0.25, 1.0 + 0.5j))
    b = make_scene((6e-5, -0.4, 0.3 - 1.0j))
    both = Scene(targets=a.targets + b.targets)
    rx_a = synth_received(a, desk_env.array, desk_env.plan, desk_env.sample_rate)
    rx_b = synth_received(b, desk_env.array, desk_env.plan, desk_env.sample_rate)
    rx = synth_received(both, desk_env.array, desk_env.plan, desk_env.sample_rate)
    np.testing.assert_allclose(rx.samples, rx_a.samples + rx_b.samples, atol=1e-12)


def test_ambiguous_delay_rejected(desk_env):
    scene = make_scene((100e-6, 0.0, 1.0))
    with pytest.raises(ValidationError):
        synth_received(scene, desk_env.array, desk_env.plan, desk_env.sample_rate)


def test_off_grid_delays_are_supported(desk_env):
    scene = make_scene((13.37e-6, 0.1, 1.0))
    rx = synth_received(scene, desk_env.array, desk_env.plan, desk_env.sample_rate)
    assert np.isfinite(rx.samples).all()
    assert np.linalg.norm(rx.samples) > 0


def test_oracle_of_origin_target_is_all_ones(desk_env):
    scene = make_scene((0.0, 0.0, 1.0))
    coeffs = oracle_coefficients(scene, desk_env.array, desk_env.plan, desk_env.bins)
    for y in coeffs.matrices:
        np.testing.assert_allclose(y, np.ones_like(y))


def test_oracle_scales_with_reflectivity(desk_env):
    base = make_scene((3e-5, 0.3, 1.0), (7e-5, -0.2, 0.5j))
    scaled = Scene(targets=tuple(
        Target(t.delay, t.sin_doa, 2.5j * t.amplitude) for t in base.targets))
    y0 = oracle_coefficients(base, desk_env.array, desk_env.plan, desk_env.bins)
    y1 = oracle_coefficients(scaled, desk_env.array, desk_env.plan, desk_env.bins)
    for a, b in zip(y0.matrices, y1.matrices):
        np.testing.assert_allclose(2.5j * a, b)


def test_oracle_superposition(desk_env):
    a = make_scene((2e-5, 0.25, 1.0))
    b = make_scene((6e-5, -0.4, 0.7j))
    union = Scene(targets=a.targets + b.targets)
    ya = oracle_coefficients(a, desk_env.array, desk_env.plan, desk_env.bins)
    yb = oracle_coefficients(b, desk_env.array, desk_env.plan, desk_env.bins)
    yu = oracle_coefficients(union, desk_env.array, desk_env.plan, desk_env.bins)
    for u, x, y in zip(yu.matrices, ya.matrices, yb.matrices):
        np.testing.assert_allclose(u, x + y, atol=1e-12)


def test_on_grid_oracle_matches_dictionary_outer_product(desk_env):
    n, p = 123, 30
    delay = n * desk_env.plan.pri / len(desk_env.range_grid)
    sin = desk_env.azi_grid.values[p]
    amp = 0.8 - 0.3j
    scene = make_scene((delay, sin, amp))
    coeffs = oracle_coefficients(scene, desk_env.array, desk_env.plan, desk_env.bins)
    dicts = desk_env.dictionaries
    for y, a, b in zip(coeffs.matrices, dicts.range_atoms, dicts.azimuth_atoms):
        np.testing.assert_allclose(y, amp * np.outer(a[:, n], b[:, p]), atol=1e-10)


def test_infinite_snr_is_identity(desk_env):
    scene = make_scene((2e-5, 0.1, 1.0))
    rx = synth_received(scene, desk_env.array, desk_env.plan, desk_env.sample_rate)
    assert add_noise(rx, None, 5) is rx
    assert add_noise(rx, np.inf, 5) is rx


def test_noise_is_deterministic_per_seed(desk_env):
    scene = make_scene((2e-5, 0.1, 1.0))
    rx = synth_received(scene, desk_env.array, desk_env.plan, desk_env.sample_rate)
    a = add_noise(rx, 0.0, 1234)
    b = add_noise(rx, 0.0, 1234)
    c = add_noise(rx, 0.0, 1235)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


def test_noise_on_silence_is_undefined(desk_env):
    rx = synth_received(Scene(targets=()), desk_env.array, desk_env.plan,
                        desk_env.sample_rate)
    with pytest.raises(NumericalError):
        add_noise(rx, 0.0, 1)


def test_empirical_snr_calibration(desk_env):
    scene = make_scene((2e-5, 0.1, 1.0), (5e-5, -0.3, 1.0))
    rx = synth_received(scene, desk_env.array, desk_env.plan, desk_env.sample_rate)
    n_active = int(rx.active_mask.sum())
    signal_power = float(np.mean(np.sum(np.abs(rx.samples) ** 2, axis=1))) / n_active
    ratios = []
    for trial in range(100):
        noisy = add_noise(rx, 0.0, [77, trial])
        noise = noisy.samples - rx.samples
        ratios.append(signal_power / float(np.mean(np.abs(noise) ** 2)))
    snr_db = 10 * np.log10(np.mean(ratios))
    assert abs(snr_db) < 0.5


def test_active_mask_covers_the_pulse_windows(desk_env):
    delay = 2e-5
    scene = make_scene((delay, 0.0, 1.0))
    rx = synth_received(scene, desk_env.array, desk_env.plan, desk_env.sample_rate)
    width = int(round(desk_env.plan.base.pulse_width * desk_env.sample_rate))
    start = int(delay * desk_env.sample_rate)
    assert int(rx.active_mask.sum()) == width
    assert rx.active_mask[start] and rx.active_mask[start + width - 1]
    assert not rx.active_mask[start - 1]
