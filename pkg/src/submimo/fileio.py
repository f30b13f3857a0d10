"""On-disk formats: INI configs, scene lists, I/Q frames, coefficient blobs, CSVs.

All numeric config fields carry SI units in their names. I/Q files are
interleaved little-endian float32 pairs with a plain-text sidecar header;
coefficient sets use a small self-describing binary layout with a CSV
export for inspection.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .errors import ConfigError, ValidationError
from .geometry import ArrayConfig, ArrayMode, build_mode
from .harness import ExperimentConfig, MetricsRecord, SceneSpec
from .recovery import SparseEstimate
from .scene import ReceivedBaseband, Scene, target_from_range
from .waveform import (BasebandPulse, CognitivePlan, FdmPlan, Subband,
                       build_cognitive_plan, build_fdm_plan,
                       reference_subbands)

_COEFF_MAGIC = b"SMCS"
_COEFF_VERSION = 1


def plan_digest(plan: CognitivePlan | FdmPlan) -> str:
    """Short stable digest of a plan's numeric content."""
    base = plan.base if isinstance(plan, CognitivePlan) else plan
    parts = [base.num_tx, base.channel_spacing, base.signal_band, base.guard,
             base.pri, base.pulse_width]
    if isinstance(plan, CognitivePlan):
        parts += [plan.total_power]
        parts += [x for b in plan.subbands for x in (b.lo, b.hi)]
    text = ",".join(f"{p!r}" for p in parts)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# -- I/Q frames --------------------------------------------------------------

def write_iq(path, samples: np.ndarray, header: dict) -> None:
    """Interleaved I/Q float32 (little-endian) plus a key=value sidecar."""
    samples = np.asarray(samples).ravel()
    inter = np.empty(2 * len(samples), dtype="<f4")
    inter[0::2] = samples.real
    inter[1::2] = samples.imag
    inter.tofile(str(path))
    with open(str(path) + ".hdr", "w") as fh:
        for key, value in header.items():
            fh.write(f"{key} = {value}\n")


def read_iq(path) -> tuple[np.ndarray, dict]:
    raw = np.fromfile(str(path), dtype="<f4")
    if len(raw) % 2:
        raise ValidationError(f"odd float count in I/Q file {path}")
    samples = raw[0::2].astype(np.float64) + 1j * raw[1::2].astype(np.float64)
    header: dict = {}
    hdr = Path(str(path) + ".hdr")
    if hdr.exists():
        for line in hdr.read_text().splitlines():
            if "=" in line:
                key, _, value = line.partition("=")
                header[key.strip()] = value.strip()
    return samples, header


def write_received(directory, rx: ReceivedBaseband, plan=None) -> None:
    """One I/Q file per receiver plus a manifest with rates and active spans."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    spans = []
    if rx.active_mask is not None and rx.active_mask.any():
        mask = rx.active_mask.astype(int)
        edges = np.flatnonzero(np.diff(np.concatenate(([0], mask, [0]))))
        spans = [(int(edges[i]), int(edges[i + 1])) for i in range(0, len(edges), 2)]
    lines = [
        f"sample_rate_hz = {rx.sample_rate!r}",
        f"pri_s = {rx.pri!r}",
        f"num_rx = {rx.num_rx}",
        f"active_spans = {';'.join(f'{a}:{b}' for a, b in spans)}",
    ]
    if plan is not None:
        lines.append(f"plan_digest = {plan_digest(plan)}")
    (directory / "received.hdr").write_text("\n".join(lines) + "\n")
    for q in range(rx.num_rx):
        write_iq(directory / f"rx_{q:02d}.iq", rx.samples[q],
                 {"sample_rate_hz": repr(rx.sample_rate), "rx_index": q})


def read_received(directory) -> ReceivedBaseband:
    directory = Path(directory)
    manifest = directory / "received.hdr"
    if not manifest.exists():
        raise ValidationError(f"no received.hdr manifest in {directory}")
    header = {}
    for line in manifest.read_text().splitlines():
        if "=" in line:
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
    num_rx = int(header["num_rx"])
    rate = float(header["sample_rate_hz"])
    pri = float(header["pri_s"])
    frames = [read_iq(directory / f"rx_{q:02d}.iq")[0] for q in range(num_rx)]
    samples = np.stack(frames)
    mask = None
    if header.get("active_spans"):
        mask = np.zeros(samples.shape[1], dtype=bool)
        for span in header["active_spans"].split(";"):
            a, _, b = span.partition(":")
            mask[int(a):int(b)] = True
    return ReceivedBaseband(samples=samples, sample_rate=rate, pri=pri,
                            active_mask=mask)


def write_pulse(path, pulse: BasebandPulse, plan=None) -> None:
    header = {"sample_rate_hz": repr(pulse.sample_rate), "tx_index": pulse.tx_index}
    if plan is not None:
        header["plan_digest"] = plan_digest(plan)
    write_iq(path, pulse.samples, header)


# -- coefficient sets ---------------------------------------------------------

def write_coefficients(path, coeffs) -> None:
    """Binary blob: counts, tx/rx indices, bin list, then complex64 matrices."""
    m = len(coeffs.tx_indices)
    k = len(coeffs.bins)
    q = len(coeffs.rx_indices)
    with open(str(path), "wb") as fh:
        fh.write(_COEFF_MAGIC)
        fh.write(struct.pack("<IIIII", _COEFF_VERSION, m, k, q,
                             coeffs.bins.per_channel_bins))
        fh.write(np.asarray(coeffs.tx_indices, dtype="<i4").tobytes())
        fh.write(np.asarray(coeffs.rx_indices, dtype="<i4").tobytes())
        fh.write(coeffs.bins.as_array.astype("<i4").tobytes())
        for y in coeffs.matrices:
            fh.write(np.ascontiguousarray(y, dtype=np.complex64).tobytes())


def read_coefficients(path):
    from .xampler import BinSet, CoefficientSet
    data = Path(path).read_bytes()
    if data[:4] != _COEFF_MAGIC:
        raise ValidationError(f"{path} is not a coefficient blob")
    version, m, k, q, n = struct.unpack("<IIIII", data[4:24])
    if version != _COEFF_VERSION:
        raise ValidationError(f"unsupported coefficient blob version {version}")
    off = 24
    tx = tuple(np.frombuffer(data, "<i4", m, off).tolist()); off += 4 * m
    rx = tuple(np.frombuffer(data, "<i4", q, off).tolist()); off += 4 * q
    bins = tuple(np.frombuffer(data, "<i4", k, off).tolist()); off += 4 * k
    matrices = []
    for _ in range(m):
        y = np.frombuffer(data, np.complex64, k * q, off).reshape(k, q)
        matrices.append(y.astype(complex))
        off += 8 * k * q
    return CoefficientSet(matrices=tuple(matrices),
                          bins=BinSet(indices=bins, per_channel_bins=n),
                          tx_indices=tx, rx_indices=rx)


def coefficients_to_csv(path, coeffs) -> None:
    with open(str(path), "w") as fh:
        fh.write("tx_index,bin,rx_index,re,im\n")
        for m, y in zip(coeffs.tx_indices, coeffs.matrices):
            for i, k in enumerate(coeffs.bins.indices):
                for j, q in enumerate(coeffs.rx_indices):
                    fh.write(f"{m},{k},{q},{y[i, j].real!r},{y[i, j].imag!r}\n")


# -- array layouts ------------------------------------------------------------

def write_array_config(path, array: ArrayConfig) -> None:
    """INI section with the mode, seed and explicit element slots."""
    parser = configparser.ConfigParser()
    parser["array"] = {
        "mode": array.mode.value,
        "seed": str(array.seed),
        "wavelength_m": repr(array.wavelength),
        "tx_positions": " ".join(map(str, array.tx_positions)),
        "rx_positions": " ".join(map(str, array.rx_positions)),
    }
    with open(str(path), "w") as fh:
        parser.write(fh)


def read_array_config(path) -> ArrayConfig:
    """Rebuild an array layout; explicit positions override the seeded draw."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if not parser.read(str(path)):
        raise ConfigError(f"cannot read array config {path}")
    section = parser["array"]
    mode = parse_mode(section.get("mode", "random"))
    seed = int(section.get("seed", "0"))
    wavelength = float(section.get("wavelength_m", "0.03"))
    built = build_mode(mode, seed=seed, wavelength=wavelength)
    if "tx_positions" in section or "rx_positions" in section:
        tx = tuple(int(x) for x in section.get("tx_positions", "").split())
        rx = tuple(int(x) for x in section.get("rx_positions", "").split())
        return ArrayConfig(mode=mode, wavelength=wavelength,
                           num_tx=built.num_tx, num_rx=built.num_rx,
                           virtual_tx=built.virtual_tx, virtual_rx=built.virtual_rx,
                           tx_positions=tx, rx_positions=rx,
                           aperture_slots=built.aperture_slots, seed=seed)
    return built


# -- scenes and estimates -----------------------------------------------------

def write_scene(path, scene: Scene) -> None:
    """Text rows: range_m sin_doa amplitude phase_deg."""
    with open(str(path), "w") as fh:
        fh.write("# range_m sin_doa amplitude phase_deg\n")
        for t in scene.targets:
            amp = float(abs(t.amplitude))
            ph = float(np.degrees(np.angle(t.amplitude)))
            fh.write(f"{float(t.range_m)!r} {float(t.sin_doa)!r} {amp!r} {ph!r}\n")


def read_scene(path) -> Scene:
    targets = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise ValidationError(f"scene line needs 4 fields, got {raw!r}")
        range_m, sin_doa, amp, phase_deg = map(float, fields)
        targets.append(target_from_range(
            range_m, sin_doa, amp * np.exp(1j * np.radians(phase_deg))))
    return Scene(targets=tuple(targets))


def write_estimate_csv(path, estimate: SparseEstimate) -> None:
    with open(str(path), "w") as fh:
        fh.write("range_cell,azimuth_cell,range_m,sin_doa,re,im\n")
        for j, (n, p) in enumerate(estimate.support):
            a = complex(estimate.amplitudes[j])
            fh.write(f"{n},{p},{float(estimate.ranges_m[j])!r},"
                     f"{float(estimate.sin_doas[j])!r},{a.real!r},{a.imag!r}\n")


def read_estimate_csv(path) -> SparseEstimate:
    support, amps, ranges, sines = [], [], [], []
    lines = Path(path).read_text().splitlines()
    for line in lines[1:]:
        if not line.strip():
            continue
        n, p, r, s, re, im = line.split(",")
        support.append((int(n), int(p)))
        ranges.append(float(r))
        sines.append(float(s))
        amps.append(complex(float(re), float(im)))
    return SparseEstimate(support=tuple(support), amplitudes=np.array(amps),
                          ranges_m=np.array(ranges), sin_doas=np.array(sines),
                          residual_norm=0.0, signal_norm=0.0,
                          residual_history=())


# -- metrics ------------------------------------------------------------------

def write_metrics(directory, record: MetricsRecord) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "metrics.json").write_text(json.dumps(record.to_dict(), indent=2))
    with open(directory / "metrics.csv", "w") as fh:
        fh.write("trial,hits,false_alarms,misses,strict_hits\n")
        for i, r in enumerate(record.reports):
            fh.write(f"{i},{len(r.hits)},{len(r.false_alarms)},"
                     f"{len(r.misses)},{r.strict_hits}\n")


# -- experiment configuration files -------------------------------------------

DEFAULT_CONFIG = """\
[array]
mode = random
seed = 7

[waveform]
channel_spacing_hz = 15e6
signal_band_hz = 12e6
guard_hz = 3e6
pri_s = 100e-6
pulse_width_s = 4.2e-6
total_power_w = 1.0
subbands = reference

[adc]
rate_hz = 7.5e6

[recovery]
profile = desk
residual_tol = 1e-3

[experiment]
trials = 10
seed = 1234
snr_db = -5
num_targets = 10
min_sin_sep = 0.025
min_range_sep_cells = 0
"""


def parse_mode(name: str) -> ArrayMode:
    try:
        return ArrayMode(name.strip().lower())
    except ValueError:
        raise ConfigError(
            f"unknown array mode {name!r}; choose from "
            f"{[m.value for m in ArrayMode]}") from None


def _parse_subbands(text: str):
    text = text.strip()
    if not text or text == "reference":
        return reference_subbands()
    bands = []
    for chunk in text.split(","):
        lo, _, hi = chunk.partition(":")
        bands.append(Subband(float(lo), float(hi)))
    return tuple(bands)


class ToolkitConfig:
    """Parsed INI configuration; builds the runtime objects on demand."""

    def __init__(self, parser: configparser.ConfigParser):
        self.parser = parser

    @classmethod
    def from_file(cls, path) -> "ToolkitConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        read = parser.read(str(path))
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        cfg = cls(parser)
        cfg.mode  # validate eagerly so any subcommand rejects a bad file
        if cfg.profile not in ("desk", "full"):
            raise ConfigError(f"unknown profile {cfg.profile!r}")
        return cfg

    def _get(self, section, option, fallback=None):
        return self.parser.get(section, option, fallback=fallback)

    @property
    def mode(self) -> ArrayMode:
        return parse_mode(self._get("array", "mode", "random"))

    @property
    def array_seed(self) -> int:
        return int(self._get("array", "seed", "0"))

    def array(self) -> ArrayConfig:
        built = build_mode(self.mode, seed=self.array_seed,
                           wavelength=float(self._get("array", "wavelength_m", "0.03")))
        tx_raw = self._get("array", "tx_positions", "")
        rx_raw = self._get("array", "rx_positions", "")
        if tx_raw or rx_raw:
            return ArrayConfig(
                mode=built.mode, wavelength=built.wavelength,
                num_tx=built.num_tx, num_rx=built.num_rx,
                virtual_tx=built.virtual_tx, virtual_rx=built.virtual_rx,
                tx_positions=tuple(int(x) for x in tx_raw.split()) or built.tx_positions,
                rx_positions=tuple(int(x) for x in rx_raw.split()) or built.rx_positions,
                aperture_slots=built.aperture_slots, seed=built.seed)
        return built

    @property
    def profile(self) -> str:
        return self._get("recovery", "profile", "desk")

    @property
    def range_cells(self) -> int | None:
        raw = self._get("recovery", "range_cells", "")
        return int(raw) if raw else None

    def fdm_plan(self, num_tx: int) -> FdmPlan:
        g = lambda opt, dflt: float(self._get("waveform", opt, dflt))
        return build_fdm_plan(
            num_tx=num_tx,
            channel_spacing=g("channel_spacing_hz", "15e6"),
            signal_band=g("signal_band_hz", "12e6"),
            guard=g("guard_hz", "3e6"),
            pri=g("pri_s", "100e-6"),
            pulse_width=g("pulse_width_s", "4.2e-6"),
        )

    def cognitive_plan(self, num_tx: int) -> CognitivePlan:
        return build_cognitive_plan(
            self.fdm_plan(num_tx),
            _parse_subbands(self._get("waveform", "subbands", "reference")),
            total_power=float(self._get("waveform", "total_power_w", "1.0")),
        )

    @property
    def adc_rate(self) -> float:
        return float(self._get("adc", "rate_hz", "7.5e6"))

    def experiment(self) -> ExperimentConfig:
        get = lambda opt, dflt="": self._get("experiment", opt, dflt)
        snr_raw = get("snr_db")
        scene_file = get("scene_file")
        if scene_file:
            scene: Scene | SceneSpec = read_scene(scene_file)
        else:
            pair_raw = get("close_pair_sin_gap")
            scene = SceneSpec(
                num_targets=int(get("num_targets", "10")),
                min_range_sep_cells=int(get("min_range_sep_cells", "0")),
                min_sin_sep=float(get("min_sin_sep", "0") or 0),
                close_pair_sin_gap=float(pair_raw) if pair_raw else None,
            )
        max_raw = get("max_targets")
        return ExperimentConfig(
            mode=self.mode,
            scene=scene,
            profile=self.profile,
            snr_db=float(snr_raw) if snr_raw else None,
            trials=int(get("trials", "1")),
            seed=int(get("seed", "0")),
            max_targets=int(max_raw) if max_raw else None,
        )
