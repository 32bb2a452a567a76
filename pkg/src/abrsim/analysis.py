"""Population sums, EFR and MTF magnitudes, ABR wave picking."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError, DimensionMismatchError, DomainError
from .nuclei import PopulationResponse

# Returned by efr_magnitude when no non-DC component exists.
UNDEFINED_DB = -math.inf

BROADBAND = (1, 401)
ON_FREQUENCY_4K = (100, 123)
OFF_FREQUENCY_8K = (30, 54)


def channel_rows(channel_range: tuple[int, int], n_channels: int) -> slice:
    """Row slice for an inclusive, 1-based channel interval."""
    first, last = int(channel_range[0]), int(channel_range[1])
    if first > last:
        raise DomainError(f"empty channel interval {first}-{last}")
    if first < 1 or last > n_channels:
        raise DomainError(f"channel interval {first}-{last} outside 1..{n_channels}")
    return slice(first - 1, last)


def sum_channels(resp: PopulationResponse, channel_range=None, weight: float = 1.0) -> np.ndarray:
    """``weight`` times the sum of the rows in ``channel_range`` (all rows by default)."""
    if channel_range is None:
        channel_range = (1, resp.n_channels)
    return weight * resp.data[channel_rows(channel_range, resp.n_channels)].sum(axis=0)


@dataclass(frozen=True)
class EfrWeights:
    """Scaling from AN, CN and IC population sums to volts."""

    a_w1: float
    a_w3: float
    a_w5: float

    def __post_init__(self):
        for v in (self.a_w1, self.a_w3, self.a_w5):
            if not (math.isfinite(v) and v >= 0):
                raise DomainError("EFR weights must be finite and non-negative")


def efr_waveform(an: PopulationResponse, cn: PopulationResponse, ic: PopulationResponse,
                 channel_range, weights: EfrWeights) -> np.ndarray:
    """Weighted sum of the three stage channel-sums over ``channel_range``, in volts."""
    if not (an.data.shape == cn.data.shape == ic.data.shape) or not (an.fs == cn.fs == ic.fs):
        raise DimensionMismatchError("AN, CN and IC populations must share shape and sampling rate")
    return (sum_channels(an, channel_range, weights.a_w1)
            + sum_channels(cn, channel_range, weights.a_w3)
            + sum_channels(ic, channel_range, weights.a_w5))


def max_spectral_amplitude(x, nfft: int) -> float:
    """Largest ``|FFT(x)| / nfft`` over bins 1..nfft//2 (DC excluded)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DataError("expected a 1-D waveform")
    if nfft < x.size:
        raise DomainError(f"nfft={nfft} shorter than the {x.size}-sample waveform")
    if not np.all(np.isfinite(x)):
        raise DataError("waveform contains non-finite samples")
    spectrum = np.abs(np.fft.rfft(x, n=nfft)) / nfft
    peak = float(spectrum[1:].max()) if spectrum.size > 1 else 0.0
    # a constant input leaves only rounding noise outside bin 0
    if peak <= 1e-13 * max(float(spectrum[0]), np.finfo(float).tiny):
        return 0.0
    return peak


def efr_magnitude(r_efr, nfft: int = 4000) -> float:
    """Peak non-DC spectral amplitude of ``r_efr`` in dB re 1 uV.

    Returns :data:`UNDEFINED_DB` (``-inf``) when the waveform has no non-DC
    content, e.g. all zeros or a pure constant.
    """
    peak = max_spectral_amplitude(r_efr, nfft)
    if peak == 0.0:
        return UNDEFINED_DB
    return 20.0 * math.log10(peak / 1e-6)


# --- modulation transfer functions ------------------------------------------

@dataclass(frozen=True)
class MtfCurve:
    fmod_hz: np.ndarray
    magnitude: np.ndarray  # linear, volts or rate units

    @property
    def magnitude_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(self.magnitude / 1e-6)

    @property
    def magnitude_rel(self) -> np.ndarray:
        peak = self.magnitude.max()
        if peak <= 0:
            raise DataError("MTF has no modulation response to normalise")
        return self.magnitude / peak

    @property
    def peak_fmod(self) -> float:
        return float(self.fmod_hz[int(np.argmax(self.magnitude))])


def default_fmod_grid(start: float = 5.0, stop: float = 250.0, step: float = 5.0) -> np.ndarray:
    n = int(round((stop - start) / step)) + 1
    return start + step * np.arange(n)


def mtf(model, template, fmod_grid=None, channel: int = 112, nfft: int = 4000,
        scale: float = 1.0) -> dict[str, MtfCurve]:
    """CN and IC modulation transfer functions at one channel.

    ``model`` must provide ``simulate(spec, channels=[...])`` returning the
    (AN, CN, IC) populations. For each modulation rate the single-channel
    output is mean-removed and the peak of its ``nfft``-point spectrum divided
    by ``nfft`` is recorded, times ``scale``.
    """
    grid = default_fmod_grid() if fmod_grid is None else np.asarray(fmod_grid, dtype=float)
    mags = {"CN": [], "IC": []}
    for fmod in grid:
        _, cn, ic = model.simulate(replace(template, fmod=float(fmod)), channels=[channel])
        for name, resp in (("CN", cn), ("IC", ic)):
            trace = resp.data[0]
            mags[name].append(scale * max_spectral_amplitude(trace - trace.mean(), nfft))
    return {name: MtfCurve(grid.copy(), np.array(vals)) for name, vals in mags.items()}


# --- ABR waves ---------------------------------------------------------------

class Wave(enum.Enum):
    W1 = "W1"
    W3 = "W3"
    W5 = "W5"


class Convention(enum.Enum):
    BASELINE_TO_PEAK = "baseline_to_peak"
    PEAK_TO_PEAK = "peak_to_peak"


WAVE_CONVENTIONS = {
    Wave.W1: Convention.BASELINE_TO_PEAK,
    Wave.W3: Convention.BASELINE_TO_PEAK,
    Wave.W5: Convention.PEAK_TO_PEAK,
}

DEFAULT_WINDOWS = {
    Wave.W1: (0.5e-3, 2.5e-3),
    Wave.W3: (1.5e-3, 4.0e-3),
    Wave.W5: (3.0e-3, 8.0e-3),
}

TROUGH_SPAN_S = 5e-3


@dataclass(frozen=True)
class WaveMetrics:
    wave: Wave
    latency: float  # s after onset
    amplitude: float  # V
    convention: Convention


def wave_metrics(waveform, fs: float, onset: float, window: tuple[float, float],
                 convention: Convention, wave: Wave = Wave.W5,
                 trough_span: float = TROUGH_SPAN_S) -> WaveMetrics:
    """Pick a wave peak inside ``window`` (seconds after ``onset``).

    The waveform is taken to be referenced to the resting state, so the
    baseline is zero. Baseline-to-peak amplitude is the window maximum (zero
    if the window never rises above baseline). Peak-to-peak amplitude is the
    maximum minus the lowest point over ``trough_span`` after it, where a
    trough above baseline counts as baseline. Ties go to the earliest sample.

    Raises:
        DomainError: if the window is empty or lies outside the waveform.
    """
    x = np.asarray(waveform, dtype=float)
    i0 = int(round((onset + window[0]) * fs))
    i1 = min(int(round((onset + window[1]) * fs)) + 1, x.size)
    if window[1] < window[0] or i0 < 0 or i1 <= i0:
        raise DomainError(f"empty analysis window {window} at onset {onset:g} s")
    seg = x[i0:i1]
    j = int(np.argmax(seg))
    peak = float(seg[j])
    latency = (i0 + j) / fs - onset
    if convention is Convention.BASELINE_TO_PEAK:
        amplitude = max(peak, 0.0)
    else:
        k = i0 + j
        span = x[k:min(k + int(round(trough_span * fs)) + 1, x.size)]
        amplitude = peak - min(float(span.min()), 0.0)
    return WaveMetrics(wave=wave, latency=latency, amplitude=amplitude, convention=convention)


def latency_report(metrics, shift: float = 3.5e-3) -> list[WaveMetrics]:
    """Copy of ``metrics`` with ``shift`` added to every latency."""
    return [replace(m, latency=m.latency + shift) for m in metrics]
