"""Shared test-side oracles and synthetic solver instances."""

import numpy as np

from submimo.geometry import AzimuthGrid
from submimo.recovery import DictionarySet, RangeGrid
from submimo.xampler import BinSet, CoefficientSet


def brute_force_scores(matrices, dicts):
    """Independent pair scoring: explicit loops, no shared code path."""
    n_r = len(dicts.range_grid)
    n_t = len(dicts.azi_grid)
    scores = np.zeros((n_r, n_t))
    for y, a, b in zip(matrices, dicts.range_atoms, dicts.azimuth_atoms):
        for n in range(n_r):
            for p in range(n_t):
                val = np.vdot(a[:, n], y @ np.conj(b[:, p]))
                scores[n, p] += abs(val) ** 2
    return scores


def random_instance(rng, n_channels=2, n_bins=12, n_rx=3, n_range=25, n_azi=12,
                    total_bins=64):
    """A small synthetic solver instance with structured unit-modulus atoms."""
    kappa = np.sort(rng.choice(total_bins, size=n_bins, replace=False))
    bins = BinSet(indices=tuple(int(k) for k in kappa), per_channel_bins=total_bins)
    rgrid = RangeGrid.from_cells(1e-4, n_range)
    agrid = AzimuthGrid(values=-1.0 + 2.0 * np.arange(n_azi) / n_azi)
    # continuous positions keep the azimuth atoms free of exact grating ties
    vpos = np.sort(rng.uniform(0.0, 20.0, size=n_rx))
    range_atoms, azimuth_atoms = [], []
    for m in range(n_channels):
        phases = np.outer(kappa + m * total_bins, rgrid.delays / 1e-4)
        range_atoms.append(np.exp(-2j * np.pi * phases))
        azimuth_atoms.append(np.exp(2j * np.pi * np.outer(vpos, agrid.values)))
    dicts = DictionarySet(range_atoms=tuple(range_atoms),
                          azimuth_atoms=tuple(azimuth_atoms), bins=bins,
                          tx_indices=tuple(range(n_channels)),
                          range_grid=rgrid, azi_grid=agrid)
    shape = (n_bins, n_rx)
    matrices = tuple(
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        for _ in range(n_channels))
    coeffs = CoefficientSet(matrices=matrices, bins=bins,
                            tx_indices=tuple(range(n_channels)),
                            rx_indices=tuple(range(n_rx)))
    return coeffs, dicts
