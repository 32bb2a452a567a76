"""Auditory-nerve rate populations: channel map, surrogate generator and file I/O.

The surrogate generator is a deliberately simple stand-in for the outer/middle
ear, transmission-line cochlea, inner hair cell and auditory-nerve stages. It
exists so the CN/IC stages and the analysis chain can be exercised end to end
without the full periphery; it does not reproduce the periphery's level or
hearing-loss dependent behaviour. Populations produced by the full model can
be loaded with :func:`load_population` instead.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal as sps

from .errors import (ConfigError, DataError, DimensionMismatchError, DomainError, HeaderError,
                     TruncatedPayloadError)
from .nuclei import PopulationResponse

GREENWOOD_A = 165.4
GREENWOOD_ALPHA = 2.1
GREENWOOD_K = 0.88


def greenwood_position(cf: float) -> float:
    """Relative cochlear position (0 apex, 1 base) of a characteristic frequency."""
    return math.log10(cf / GREENWOOD_A + GREENWOOD_K) / GREENWOOD_ALPHA


def greenwood_frequency(x):
    return GREENWOOD_A * (10.0 ** (GREENWOOD_ALPHA * np.asarray(x, dtype=float)) - GREENWOOD_K)


@dataclass(frozen=True)
class ChannelMap:
    """Equidistant cochlear positions from ``cf_high_hz`` (channel 1) down to ``cf_low_hz``."""

    n_channels: int = 401
    cf_high_hz: float = 12000.0
    cf_low_hz: float = 112.0

    def __post_init__(self):
        if self.n_channels < 1:
            raise DomainError("need at least one channel")
        if not 0 < self.cf_low_hz < self.cf_high_hz:
            raise DomainError("cf_low_hz must be positive and below cf_high_hz")

    @property
    def cf_hz(self) -> np.ndarray:
        if self.n_channels == 1:
            return np.array([self.cf_high_hz])
        x = np.linspace(greenwood_position(self.cf_high_hz), greenwood_position(self.cf_low_hz),
                        self.n_channels)
        return greenwood_frequency(x)


def greenwood_cf(cmap: ChannelMap, channel: int) -> float:
    """CF in Hz of a 1-based channel index."""
    if not 1 <= channel <= cmap.n_channels:
        raise DomainError(f"channel {channel} outside 1..{cmap.n_channels}")
    return float(cmap.cf_hz[channel - 1])


@dataclass(frozen=True)
class FiberClass:
    spont: float
    saturation: float
    slope: float  # spikes/s per Pa of drive


@dataclass(frozen=True)
class FiberWeights:
    """Fibre counts per spontaneous-rate class and the surrogate rate maps.

    The three classes have staggered thresholds (HSR most sensitive), so the
    summed rate keeps growing with level after the HSR fibres saturate.
    """

    n_hsr: int = 13
    n_msr: int = 3
    n_lsr: int = 3
    hsr: FiberClass = FiberClass(spont=70.0, saturation=250.0, slope=9000.0)
    msr: FiberClass = FiberClass(spont=10.0, saturation=150.0, slope=700.0)
    lsr: FiberClass = FiberClass(spont=1.0, saturation=120.0, slope=60.0)

    def __post_init__(self):
        counts = (self.n_hsr, self.n_msr, self.n_lsr)
        if any(c < 0 for c in counts) or sum(counts) == 0:
            raise DomainError("fibre counts must be non-negative with at least one positive")

    @property
    def classes(self) -> list[tuple[int, FiberClass]]:
        return [(self.n_hsr, self.hsr), (self.n_msr, self.msr), (self.n_lsr, self.lsr)]

    @property
    def spontaneous_sum(self) -> float:
        return sum(n * fc.spont for n, fc in self.classes)


@dataclass(frozen=True)
class SurrogateSettings:
    """Per-channel envelope chain of the surrogate.

    Each channel's bandpass output is weighted by ``(cf/ref_hz)**-tilt_exponent``
    and delayed by ``latency_s + travel_s * (cf/ref_hz)**-travel_exponent``.
    Basal channels therefore respond earlier but need higher levels to be
    driven, so their share of the population sum grows with level; this gives
    the level-dependent wave latencies of a click-evoked response.
    """

    q: float = 4.0
    lowpass_hz: float = 1000.0
    latency_s: float = 0.8e-3
    travel_s: float = 0.5e-3
    travel_exponent: float = 0.5
    tilt_exponent: float = 1.5
    ref_hz: float = 1000.0

    def delay(self, cf: float) -> float:
        return self.latency_s + self.travel_s * (cf / self.ref_hz) ** -self.travel_exponent

    def sensitivity(self, cf: float) -> float:
        return (cf / self.ref_hz) ** -self.tilt_exponent


def _decimation_factor(fs_in: float, fs_out: float) -> int:
    factor = fs_in / fs_out
    if fs_out <= 0 or abs(factor - round(factor)) > 1e-9 or round(factor) < 1:
        raise DomainError(f"fs_out={fs_out:g} must divide fs_in={fs_in:g}")
    return int(round(factor))


def channel_drive(stimulus: np.ndarray, fs_in: float, cf: float, settings: SurrogateSettings) -> np.ndarray:
    """Bandpass at ``cf``, half-wave rectify, lowpass, delay: envelope drive in Pa."""
    b, a = sps.iirpeak(cf, settings.q, fs=fs_in)
    band = sps.lfilter(b, a, stimulus) * settings.sensitivity(cf)
    b_lp, a_lp = sps.butter(1, settings.lowpass_hz, fs=fs_in)
    drive = sps.lfilter(b_lp, a_lp, np.maximum(band, 0.0))
    n_lag = min(int(round(settings.delay(cf) * fs_in)), drive.size)
    if n_lag:
        drive = np.concatenate([np.zeros(n_lag), drive[:drive.size - n_lag]])
    return drive


def drive_to_rate(drive: np.ndarray, weights: FiberWeights) -> np.ndarray:
    rate = np.zeros_like(drive)
    for count, fc in weights.classes:
        if count:
            rate += count * np.clip(fc.spont + fc.slope * drive, 0.0, fc.saturation)
    return rate


def surrogate_an(stimulus, fs_in: float, cmap: ChannelMap = ChannelMap(),
                 weights: FiberWeights = FiberWeights(), fs_out: float = 20e3,
                 settings: SurrogateSettings = SurrogateSettings(),
                 channels=None) -> PopulationResponse:
    """Summed AN rate per channel from a pressure waveform.

    Args:
        stimulus: pressure waveform in Pa at ``fs_in``.
        channels: optional 1-based channel indices to compute (ascending);
            default is every channel of ``cmap``.

    Raises:
        DomainError: if ``fs_out`` does not divide ``fs_in`` or the input rate
            cannot represent the highest CF.
    """
    x = np.asarray(stimulus, dtype=float)
    if x.ndim != 1:
        raise DataError("stimulus must be a 1-D waveform")
    if not np.all(np.isfinite(x)):
        raise DataError("stimulus contains non-finite samples")
    step = _decimation_factor(fs_in, fs_out)
    all_cf = cmap.cf_hz
    idx = np.arange(1, cmap.n_channels + 1) if channels is None else np.asarray(channels, dtype=int)
    if idx.size == 0 or idx.min() < 1 or idx.max() > cmap.n_channels or np.any(np.diff(idx) <= 0):
        raise DomainError("channel indices must be ascending and within the channel map")
    cfs = all_cf[idx - 1]
    if fs_in < 2 * cfs.max():
        raise DomainError(f"fs_in={fs_in:g} below twice the highest CF ({cfs.max():.1f} Hz)")
    n_out = -(-x.size // step)
    data = np.empty((idx.size, n_out))
    for row, cf in enumerate(cfs):
        data[row] = drive_to_rate(channel_drive(x, fs_in, cf, settings), weights)[::step]
    return PopulationResponse(data=data, fs=fs_out, cf_hz=cfs)


# --- binary matrix format -------------------------------------------------

_HEADER_RE = re.compile(r"^VAP1 channels=(\d+) samples=(\d+) fs=(\S+)$")


def write_vap1(data, fs: float, path) -> None:
    """Write a ``channels x samples`` matrix: ASCII header line, then float64 LE row-major."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    header = f"VAP1 channels={data.shape[0]} samples={data.shape[1]} fs={float(fs)!r}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


def store_population(resp: PopulationResponse, path) -> None:
    """Write ``resp`` in the VAP1 binary format.

    The CF axis is not part of the format; :func:`load_population` rebuilds it
    from a :class:`ChannelMap` with the stored channel count.
    """
    write_vap1(resp.data, resp.fs, path)


def parse_vap1_header(line: bytes) -> tuple[int, int, float]:
    try:
        text = line.decode("ascii").rstrip("\n")
    except UnicodeDecodeError as exc:
        raise HeaderError("VAP1 header is not ASCII") from exc
    m = _HEADER_RE.match(text)
    if not m:
        raise HeaderError(f"malformed VAP1 header: {text[:80]!r}")
    try:
        fs = float(m.group(3))
    except ValueError as exc:
        raise HeaderError(f"malformed sampling rate in VAP1 header: {m.group(3)!r}") from exc
    if not fs > 0:
        raise HeaderError("VAP1 sampling rate must be positive")
    return int(m.group(1)), int(m.group(2)), fs


def load_population(path, fmt: str | None = None, cf_hz=None) -> PopulationResponse:
    """Read a population stored as VAP1 (``.vap``/binary) or CSV.

    Args:
        fmt: ``"vap1"`` or ``"csv"``; inferred from the suffix when omitted.
        cf_hz: CF axis to attach; defaults to the Greenwood map with the file's
            channel count.

    Raises:
        HeaderError, TruncatedPayloadError, DimensionMismatchError: for the
            corresponding file defects.
    """
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "vap1"
    if fmt == "csv":
        data, fs = _read_csv_matrix(path)
    elif fmt == "vap1":
        data, fs = _read_vap1(path)
    else:
        raise ConfigError(f"unknown population format {fmt!r}")
    if cf_hz is None:
        cf_hz = ChannelMap(n_channels=data.shape[0]).cf_hz
    cf_hz = np.asarray(cf_hz, dtype=float)
    if cf_hz.size != data.shape[0]:
        raise DimensionMismatchError(f"file has {data.shape[0]} channels, CF axis has {cf_hz.size}")
    return PopulationResponse(data=data, fs=fs, cf_hz=cf_hz)


def _read_vap1(path: Path) -> tuple[np.ndarray, float]:
    with open(path, "rb") as fh:
        header = fh.readline()
        payload = fh.read()
    if not header.endswith(b"\n"):
        raise HeaderError("VAP1 header line is not newline-terminated")
    channels, samples, fs = parse_vap1_header(header)
    expected = channels * samples * 8
    if len(payload) < expected:
        raise TruncatedPayloadError(f"payload has {len(payload)} bytes, header implies {expected}")
    if len(payload) > expected:
        raise DimensionMismatchError(f"payload has {len(payload) - expected} bytes beyond the header dimensions")
    data = np.frombuffer(payload, dtype="<f8").reshape(channels, samples).astype(float)
    return data, fs


def store_population_csv(resp: PopulationResponse, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"# fs={resp.fs!r}\n")
        for row in resp.data:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _read_csv_matrix(path: Path) -> tuple[np.ndarray, float]:
    with open(path, encoding="ascii") as fh:
        first = fh.readline()
        m = re.match(r"^#\s*fs=(\S+)\s*$", first)
        if not m:
            raise HeaderError("CSV population must start with a '# fs=<Hz>' line")
        try:
            fs = float(m.group(1))
        except ValueError as exc:
            raise HeaderError(f"malformed sampling rate in CSV header: {m.group(1)!r}") from exc
        rows = [line.strip() for line in fh if line.strip()]
    try:
        data = [[float(v) for v in row.split(",")] for row in rows]
    except ValueError as exc:
        raise DataError(f"non-numeric value in {path}") from exc
    if not data or any(len(r) != len(data[0]) for r in data):
        raise DimensionMismatchError("CSV rows differ in length")
    return np.array(data), fs
