"""FDM channel plans, cognitive subband slicing and baseband pulse synthesis.

The transmit band is a one-sided complex baseband [0, M*channel_spacing).
Channel m occupies [m*spacing, m*spacing + signal_band) with the guard above.
A cognitive plan restricts each channel to a set of narrow slices (given as
offsets within the channel) and boosts the in-slice amplitude so the total
transmitted power is unchanged.

Pulses are built in the frequency domain on the 1/pri bin grid: flat
amplitude over every occupied slice, pseudo-random per-bin phase from a
named seed. A slice edge that covers only part of a bin cell contributes
that bin at energy-proportional amplitude, which keeps the per-slice and
total power relations exact despite off-grid slice edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ValidationError

DEFAULT_PHASE_SEED = 0x5D1CE5
_BIN_EPS = 1e-6  # absolute tolerance, in bin units, for slice/bin edge tests


@dataclass(frozen=True)
class FdmPlan:
    """Frequency-division plan for `num_tx` transmitters."""

    num_tx: int
    channel_spacing: float  # Hz per channel including guard
    signal_band: float      # Hz of usable band per channel (B_h)
    guard: float            # Hz between adjacent channels
    pri: float              # pulse repetition interval, seconds
    pulse_width: float      # nominal transmitted pulse duration, seconds

    @property
    def carriers(self) -> np.ndarray:
        """Per-channel carrier frequencies, centered in each signal band."""
        return np.arange(self.num_tx) * self.channel_spacing + self.signal_band / 2

    @property
    def total_bandwidth(self) -> float:
        return self.num_tx * self.channel_spacing

    @property
    def bins_per_channel(self) -> int:
        return int(round(self.channel_spacing * self.pri))


@dataclass(frozen=True)
class Subband:
    """One occupied frequency slice, as offsets within a single channel."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigError(f"empty subband [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class CognitivePlan:
    """An FDM plan restricted to subband slices, with power renormalization.

    `amplitude_scale` is sqrt(signal_band / sum of slice widths): flat
    spectra at that scale make the sliced waveform carry exactly the same
    total power as the full-band one.
    """

    base: FdmPlan
    subbands: tuple[Subband, ...]
    amplitude_scale: float
    total_power: float

    @property
    def pri(self) -> float:
        return self.base.pri

    @property
    def num_tx(self) -> int:
        return self.base.num_tx

    @property
    def occupied_bandwidth(self) -> float:
        return sum(b.width for b in self.subbands)


@dataclass(frozen=True)
class BasebandPulse:
    """One transmitter's baseband pulse over a full PRI frame."""

    samples: np.ndarray
    sample_rate: float
    tx_index: int

    @property
    def pri(self) -> float:
        return len(self.samples) / self.sample_rate


def build_fdm_plan(num_tx: int, channel_spacing: float, signal_band: float,
                   guard: float, pri: float, pulse_width: float) -> FdmPlan:
    """Validated FDM plan; the band arithmetic must close exactly."""
    if num_tx < 1:
        raise ConfigError("need at least one transmitter")
    if abs(signal_band + guard - channel_spacing) > 1e-6 * channel_spacing:
        raise ConfigError(
            f"signal_band + guard must equal channel_spacing "
            f"({signal_band} + {guard} != {channel_spacing})")
    if not 0 < pulse_width <= pri:
        raise ConfigError("pulse_width must lie in (0, pri]")
    n_bins = channel_spacing * pri
    if abs(n_bins - round(n_bins)) > 1e-6:
        raise ConfigError("channel_spacing * pri must be an integer bin count")
    return FdmPlan(num_tx=num_tx, channel_spacing=channel_spacing,
                   signal_band=signal_band, guard=guard, pri=pri,
                   pulse_width=pulse_width)


def reference_subbands() -> tuple[Subband, ...]:
    """The prototype's eight 375 kHz slices (offsets within one channel).

    The slice origins were chosen so the set survives folding by a 7.5 MHz
    ADC without overlap; total occupied width is 3 MHz of the 12 MHz band.
    """
    starts_mhz = (1.63, 2.16, 3.05, 3.88, 5.66, 6.51, 8.64, 12.32)
    return tuple(Subband(lo=s * 1e6, hi=s * 1e6 + 375e3) for s in starts_mhz)


def build_cognitive_plan(base: FdmPlan, subbands, total_power: float = 1.0) -> CognitivePlan:
    """Attach subband slices to an FDM plan and fix the power-conserving scale."""
    slices = tuple(sorted(subbands, key=lambda b: b.lo))
    if not slices:
        raise ConfigError("a cognitive plan needs at least one subband")
    for band in slices:
        if band.lo < 0 or band.hi > base.channel_spacing + 1e-6:
            raise ConfigError(
                f"subband [{band.lo}, {band.hi}] outside the channel "
                f"[0, {base.channel_spacing}]")
    for a, b in zip(slices, slices[1:]):
        if b.lo < a.hi - 1e-9:
            raise ConfigError(f"subbands [{a.lo}, {a.hi}] and [{b.lo}, {b.hi}] overlap")
    occupied = sum(b.width for b in slices)
    scale = float(np.sqrt(base.signal_band / occupied))
    return CognitivePlan(base=base, subbands=slices,
                         amplitude_scale=scale, total_power=total_power)


def conventional_plan(base: FdmPlan, total_power: float = 1.0) -> CognitivePlan:
    """Degenerate cognitive plan occupying the whole signal band (scale 1)."""
    return build_cognitive_plan(base, (Subband(0.0, base.signal_band),), total_power)


def _as_cognitive(plan: CognitivePlan | FdmPlan) -> CognitivePlan:
    if isinstance(plan, FdmPlan):
        return conventional_plan(plan)
    return plan


def _occupied_cells(subbands, pri: float):
    """(bin, energy fraction) pairs for the bins whose cells touch a slice.

    Adjacent slices may share an edge bin; their fractions accumulate.
    """
    cells: dict[int, float] = {}
    for band in subbands:
        k_first = int(np.floor(band.lo * pri + _BIN_EPS))
        k_last = int(np.ceil(band.hi * pri - _BIN_EPS))
        for k in range(k_first, k_last):
            lo_k, hi_k = k / pri, (k + 1) / pri
            frac = (min(hi_k, band.hi) - max(lo_k, band.lo)) * pri
            if frac > _BIN_EPS:
                cells[k] = min(cells.get(k, 0.0) + frac, 1.0)
    return sorted(cells.items())


def channel_spectrum(plan: CognitivePlan | FdmPlan, tx: int,
                     phase_seed: int = DEFAULT_PHASE_SEED):
    """Designed Fourier-series coefficients of transmitter `tx`'s pulse.

    Returns (bins, values): absolute one-sided bin indices (spacing 1/pri
    across the whole multiplexed band) and the complex coefficient on each.
    The same function feeds synthesis and the receiver's per-bin
    normalization, so the two sides agree exactly.
    """
    plan = _as_cognitive(plan)
    base = plan.base
    if not 0 <= tx < base.num_tx:
        raise ValidationError(f"transmit index {tx} out of range")
    cells = _occupied_cells(plan.subbands, base.pri)
    offset = tx * base.bins_per_channel
    bins = np.array([k + offset for k, _ in cells], dtype=int)
    fracs = np.array([f for _, f in cells])
    # flat design: per-bin energy tau*|c|^2 = scale^2 * g^2 * frac with
    # g^2 = P_t / (B_h * tau^2); summed over the slices this is exactly P_t
    g = np.sqrt(plan.total_power / base.signal_band) / base.pri
    rng = np.random.default_rng([phase_seed, tx])
    phases = np.exp(2j * np.pi * rng.random(len(bins)))
    values = plan.amplitude_scale * g * np.sqrt(fracs) * phases
    return bins, values


def synth_pulse(plan: CognitivePlan | FdmPlan, tx: int, sample_rate: float,
                phase_seed: int = DEFAULT_PHASE_SEED) -> BasebandPulse:
    """Synthesize transmitter `tx`'s baseband pulse over one PRI frame.

    The frame's spectrum is exactly the designed one: flat (scaled) slices,
    zero elsewhere, so FDM channels stay perfectly disjoint after
    channelization. Complex sampling means the rate must cover the whole
    one-sided multiplexed band.
    """
    plan = _as_cognitive(plan)
    base = plan.base
    if sample_rate < base.total_bandwidth - 1e-6:
        raise ConfigError(
            f"sample_rate {sample_rate} below the occupied band "
            f"{base.total_bandwidth}")
    n_frame = int(round(sample_rate * base.pri))
    if abs(sample_rate * base.pri - n_frame) > 1e-6:
        raise ConfigError("sample_rate * pri must be an integer sample count")
    bins, values = channel_spectrum(plan, tx, phase_seed)
    coeffs = np.zeros(n_frame, dtype=complex)
    coeffs[bins] = values
    samples = np.fft.ifft(coeffs) * n_frame
    return BasebandPulse(samples=samples, sample_rate=sample_rate, tx_index=tx)


def pulse_energy(pulse: BasebandPulse) -> float:
    """Continuous-time energy of the frame, integral of |h(t)|^2 dt."""
    return float(np.sum(np.abs(pulse.samples) ** 2) / pulse.sample_rate)


def spectral_power(pulse: BasebandPulse, band: Subband) -> float:
    """Power spectral density of the pulse integrated over `band` (absolute Hz).

    The frame's spectrum is a line spectrum on the 1/pri grid; each line at
    k/pri contributes its full power when it lies in [lo, hi). This keeps
    whole-band integration exactly Parseval.
    """
    if band.hi > pulse.sample_rate + 1e-6:
        raise ValidationError("band extends beyond the pulse's Nyquist range")
    n = len(pulse.samples)
    pri = pulse.pri
    coeffs = np.fft.fft(pulse.samples) / n
    k_first = max(int(np.ceil(band.lo * pri - _BIN_EPS)), 0)
    k_last = min(int(np.ceil(band.hi * pri - _BIN_EPS)), n)
    power = np.sum(np.abs(coeffs[k_first:k_last]) ** 2)
    return float(power * pri)
