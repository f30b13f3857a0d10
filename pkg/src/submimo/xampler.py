"""Software sub-Nyquist receiver: channelization, coset subsampling, bin extraction.

Per transmitter, the receiver isolates one FDM channel (ideal brick-wall
extraction of its 1/pri-spaced Fourier coefficients), decimates the channel
signal with a single low-rate ADC, and reads the selected coefficient set
off the folded low-rate spectrum. Folding is alias-free whenever the
occupied slices are coset bands with respect to the ADC rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .errors import ConfigError, ValidationError
from .waveform import (DEFAULT_PHASE_SEED, CognitivePlan, FdmPlan,
                       _as_cognitive, channel_spectrum)

if TYPE_CHECKING:  # pragma: no cover
    from .scene import ReceivedBaseband

_BIN_EPS = 1e-6


@dataclass(frozen=True)
class BinSet:
    """The selected Fourier coefficient indices within one channel.

    Indices are one-sided channel-offset bins with spacing 1/pri; the same
    set is extracted from every (tx, rx) channel pair.
    """

    indices: tuple[int, ...]
    per_channel_bins: int  # coefficients per channel at the full channel rate

    def __post_init__(self):
        if len(self.indices) == 0:
            raise ValidationError("empty coefficient set")
        if len(set(self.indices)) != len(self.indices):
            raise ValidationError("coefficient indices must be distinct")
        if min(self.indices) < 0 or max(self.indices) >= self.per_channel_bins:
            raise ValidationError("coefficient index outside [0, N)")

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=int)


@dataclass(frozen=True)
class AdcConfig:
    """Low-rate ADC running below the per-channel Nyquist rate."""

    rate: float
    channel_spacing: float

    def __post_init__(self):
        if self.rate <= 0 or self.channel_spacing <= 0:
            raise ConfigError("rates must be positive")

    @property
    def decimation(self) -> int:
        ratio = self.channel_spacing / self.rate
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValidationError(
                f"channel rate {self.channel_spacing} is not an integer "
                f"multiple of the ADC rate {self.rate}")
        return int(round(ratio))


@dataclass(frozen=True)
class CoefficientSet:
    """Extracted coefficient matrices, one K x Q matrix per processed transmitter."""

    matrices: tuple[np.ndarray, ...]
    bins: BinSet
    tx_indices: tuple[int, ...]
    rx_indices: tuple[int, ...]

    def __post_init__(self):
        k, q = len(self.bins), len(self.rx_indices)
        for y in self.matrices:
            if y.shape != (k, q):
                raise ValidationError(f"coefficient matrix shape {y.shape} != ({k}, {q})")

    @property
    def frobenius_norm(self) -> float:
        return float(sum(np.linalg.norm(y) for y in self.matrices))


def subband_bins(plan: CognitivePlan | FdmPlan) -> BinSet:
    """Channel-offset bins whose full 1/pri cell lies inside a subband.

    Only fully-contained bins are selected so every extracted coefficient
    carries full in-slice energy; a slice narrower than one bin contributes
    nothing and an entirely empty selection is an error.
    """
    plan = _as_cognitive(plan)
    pri = plan.base.pri
    n = plan.base.bins_per_channel
    ks: set[int] = set()
    for band in plan.subbands:
        k_first = int(np.ceil(band.lo * pri - _BIN_EPS))
        k_last = int(np.floor(band.hi * pri + _BIN_EPS))  # exclusive cell end
        ks.update(range(k_first, k_last))
    if not ks:
        raise ValidationError("no bin cell fits inside any subband")
    return BinSet(indices=tuple(sorted(ks)), per_channel_bins=n)


def _folded_segments(band, rate: float):
    """Half-open image segments of one slice after folding modulo `rate`."""
    segments = []
    lo = band.lo
    while lo < band.hi - 1e-12:
        hi = min(band.hi, (np.floor(lo / rate) + 1) * rate)
        segments.append((lo % rate, lo % rate + (hi - lo)))
        lo = hi
    return segments


def check_coset(plan: CognitivePlan | FdmPlan, adc: AdcConfig) -> bool:
    """True when no two slices (or parts of one) overlap after folding by the ADC rate."""
    plan = _as_cognitive(plan)
    segments = []
    for band in plan.subbands:
        segments.extend(_folded_segments(band, adc.rate))
    for i, (a_lo, a_hi) in enumerate(segments):
        for b_lo, b_hi in segments[i + 1:]:
            if a_lo < b_hi - 1e-9 and b_lo < a_hi - 1e-9:
                return False
    return True


def channelize(rx: "ReceivedBaseband", plan: CognitivePlan | FdmPlan,
               tx_indices: Sequence[int] | None = None) -> np.ndarray:
    """Split the received frames into per-transmitter channel signals.

    Ideal brick-wall extraction: channel m keeps the coefficient block
    [m*N, (m+1)*N) of the full-rate frame and is reconstructed at the
    channel rate, shifted down to [0, channel_spacing). Returns an array
    of shape (len(tx_indices), num_rx, N).
    """
    plan = _as_cognitive(plan)
    base = plan.base
    n = base.bins_per_channel
    samples = np.atleast_2d(rx.samples)
    n_frame = samples.shape[1]
    if n_frame < base.num_tx * n:
        raise ValidationError("received frame does not cover the full FDM band")
    tx_indices = tuple(tx_indices) if tx_indices is not None else tuple(range(base.num_tx))
    coeffs = np.fft.fft(samples, axis=1) / n_frame
    out = np.empty((len(tx_indices), samples.shape[0], n), dtype=complex)
    for i, m in enumerate(tx_indices):
        if not 0 <= m < base.num_tx:
            raise ValidationError(f"transmit index {m} out of range")
        block = coeffs[:, m * n:(m + 1) * n]
        out[i] = np.fft.ifft(block, axis=1) * n
    return out


def subsample(channel: np.ndarray, adc: AdcConfig) -> np.ndarray:
    """Keep every D-th sample of a channel-rate signal (last axis)."""
    d = adc.decimation
    return np.asarray(channel)[..., ::d]


def extract_coefficients(lowrate: np.ndarray, bins: BinSet, adc: AdcConfig) -> np.ndarray:
    """Read the selected Fourier coefficients off the folded low-rate spectrum.

    With a coset-clean plan each selected bin k lands alone on low-rate bin
    k mod (rate*pri), and the low-rate Fourier-series coefficient there
    equals the full-rate one exactly. Colliding folded positions are a
    coset violation and raise.
    """
    lowrate = np.asarray(lowrate)
    n_low = lowrate.shape[-1]
    folded = bins.as_array % n_low
    if len(set(folded.tolist())) != len(folded):
        raise ValidationError("folded bin collision: subbands are not coset bands")
    coeffs = np.fft.fft(lowrate, axis=-1) / n_low
    return coeffs[..., folded]


def acquire(rx: "ReceivedBaseband", plan: CognitivePlan | FdmPlan, adc: AdcConfig,
            bins: BinSet, active_tx: Iterable[int] | None = None,
            active_rx: Iterable[int] | None = None,
            phase_seed: int = DEFAULT_PHASE_SEED,
            counters: dict | None = None) -> CoefficientSet:
    """Full acquisition chain: channelize, subsample, extract, normalize.

    Only the requested (tx, rx) channels are processed. Each extracted
    coefficient is divided by the known transmitted spectrum value on its
    bin, which aligns all channels to the shared target model: a target at
    (delay, sin DoA, amplitude a) contributes
    a * exp(2j*pi*vpos*sin) * exp(-2j*pi*(k + m*N)*delay/pri) to bin k of
    channel m at receiver q.
    """
    plan_c = _as_cognitive(plan)
    base = plan_c.base
    num_rx = np.atleast_2d(rx.samples).shape[0]
    tx = tuple(active_tx) if active_tx is not None else tuple(range(base.num_tx))
    rxi = tuple(active_rx) if active_rx is not None else tuple(range(num_rx))
    if not tx or not rxi:
        raise ValidationError("empty active channel set")
    if any(not 0 <= q < num_rx for q in rxi):
        raise ValidationError("receive index out of range")

    n = base.bins_per_channel
    channels = channelize(rx, plan_c, tx)[:, rxi, :]
    if counters is not None:
        counters["channelize"] = counters.get("channelize", 0) + len(tx) * len(rxi)
    matrices = []
    for i, m in enumerate(tx):
        low = subsample(channels[i], adc)
        values = extract_coefficients(low, bins, adc)  # (Q', K)
        abs_bins, design = channel_spectrum(plan_c, m, phase_seed)
        lookup = dict(zip(abs_bins.tolist(), design))
        try:
            norm = np.array([lookup[k + m * n] for k in bins.indices])
        except KeyError as missing:
            raise ValidationError(
                f"plan does not transmit on selected bin {missing}") from None
        matrices.append((values / norm).T.copy())
        if counters is not None:
            counters["subsample"] = counters.get("subsample", 0) + len(rxi)
            counters["extract"] = counters.get("extract", 0) + len(rxi)
            counters["normalize"] = counters.get("normalize", 0) + len(rxi)
    return CoefficientSet(matrices=tuple(matrices), bins=bins,
                          tx_indices=tx, rx_indices=rxi)
