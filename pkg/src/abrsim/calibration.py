"""Scaling factors that map population sums to ABR wave voltages.

W-I is read from the AN sum, W-III from the CN sum and W-V from the IC sum,
each to one click of a reference click train. W-I and W-III are measured
baseline-to-peak and W-V peak-to-peak; since every stage is linear in its
scaling factor, ``M = target / measured`` reproduces the target exactly.
"""
from __future__ import annotations

import datetime as _dt
import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .analysis import (DEFAULT_WINDOWS, TROUGH_SPAN_S, WAVE_CONVENTIONS, Convention, EfrWeights, Wave,
                       WaveMetrics, sum_channels, wave_metrics)
from .errors import CalibrationDegenerateError, DataError, DomainError
from .nuclei import PopulationResponse
from .stimuli import StimulusSpec, calibration_click_train, click_onsets


@dataclass(frozen=True)
class CalibrationTargets:
    w1_p: float = 0.15e-6
    w3_p: float = 0.17e-6
    w5_pp: float = 0.61e-6

    def __post_init__(self):
        if not (self.w1_p > 0 and self.w3_p > 0 and self.w5_pp > 0):
            raise DomainError("calibration targets must be positive")

    def for_wave(self, wave: Wave) -> float:
        return {Wave.W1: self.w1_p, Wave.W3: self.w3_p, Wave.W5: self.w5_pp}[wave]


@dataclass(frozen=True)
class ScalingFactors:
    m1: float
    m3: float
    m5: float

    def __post_init__(self):
        if not all(math.isfinite(v) and v > 0 for v in (self.m1, self.m3, self.m5)):
            raise DomainError("scaling factors must be positive and finite")

    def for_wave(self, wave: Wave) -> float:
        return {Wave.W1: self.m1, Wave.W3: self.m3, Wave.W5: self.m5}[wave]

    def as_efr_weights(self) -> EfrWeights:
        return EfrWeights(self.m1, self.m3, self.m5)


# Constants of the full periphery model (v1.2 release). They depend on the
# transmission-line cochlea and are not expected from the surrogate front-end.
REFERENCE_V12 = ScalingFactors(m1=4.2767e-14, m3=5.1435e-14, m5=13.3093e-14)
REFERENCE_V11 = ScalingFactors(m1=6.2755e-14, m3=7.2161e-14, m5=3.5200e-20)


def epoch_onsets(stimulus: StimulusSpec) -> np.ndarray:
    """Click onset times (s), snapped to the stimulus sample grid."""
    return np.round(click_onsets(stimulus) * stimulus.fs) / stimulus.fs


BASELINE_SPAN_S = 1e-3


def epoch_baseline(x: np.ndarray, fs: float, onset: float, span: float = BASELINE_SPAN_S) -> float:
    """Mean of ``x`` over ``span`` seconds up to and including the onset sample."""
    i_on = int(round(onset * fs))
    i0 = max(i_on - int(round(span * fs)), 0)
    return float(np.mean(x[i0:i_on + 1]))


def measure_waves(sums: dict[Wave, np.ndarray], fs: float, onset: float, windows=None,
                  trough_span: float = TROUGH_SPAN_S,
                  baseline_span: float | None = BASELINE_SPAN_S) -> dict[Wave, WaveMetrics]:
    """Wave metrics of one epoch; ``sums[wave]`` is the stage sum that generates ``wave``.

    Each sum is first referenced to its prestimulus mean over ``baseline_span``
    (skipped when ``None``), which removes tails of earlier clicks.
    """
    windows = DEFAULT_WINDOWS if windows is None else windows
    out = {}
    for wave in (Wave.W1, Wave.W3, Wave.W5):
        x = sums[wave]
        if baseline_span is not None:
            x = x - epoch_baseline(x, fs, onset, baseline_span)
        out[wave] = wave_metrics(x, fs, onset, windows[wave], WAVE_CONVENTIONS[wave], wave, trough_span)
    return out


def average_amplitudes(sums: dict[Wave, np.ndarray], fs: float, onsets, epochs, windows=None,
                       trough_span: float = TROUGH_SPAN_S) -> dict[Wave, float]:
    """Mean wave amplitude across 1-based click indices ``epochs``."""
    if len(epochs) == 0:
        raise DomainError("need at least one calibration epoch")
    per_epoch = []
    for k in epochs:
        if not 1 <= k <= len(onsets):
            raise DomainError(f"click #{k} not in a train of {len(onsets)} clicks")
        per_epoch.append(measure_waves(sums, fs, float(onsets[k - 1]), windows, trough_span))
    return {wave: float(np.mean([m[wave].amplitude for m in per_epoch])) for wave in Wave}


def calibrate_sums(sums: dict[Wave, np.ndarray], fs: float, targets: CalibrationTargets = CalibrationTargets(),
                   epochs=(59, 60), stimulus: StimulusSpec | None = None, windows=None,
                   trough_span: float = TROUGH_SPAN_S) -> ScalingFactors:
    """Scaling factors from unit-scaled stage sums (AN for W1, CN for W3, IC for W5).

    Raises:
        CalibrationDegenerateError: if a measured average amplitude is zero.
    """
    stimulus = calibration_click_train() if stimulus is None else stimulus
    for wave, x in sums.items():
        if not np.all(np.isfinite(x)):
            raise DataError(f"non-finite samples in the {wave.value} generator sum")
    measured = average_amplitudes(sums, fs, epoch_onsets(stimulus), epochs, windows, trough_span)
    factors = {}
    for wave, amp in measured.items():
        if not amp > 0:
            raise CalibrationDegenerateError(f"measured {wave.value} amplitude is zero; cannot calibrate")
        factors[wave] = targets.for_wave(wave) / amp
    return ScalingFactors(factors[Wave.W1], factors[Wave.W3], factors[Wave.W5])


def calibrate(an: PopulationResponse, cn: PopulationResponse, ic: PopulationResponse,
              targets: CalibrationTargets = CalibrationTargets(), epochs=(59, 60),
              stimulus: StimulusSpec | None = None, channel_range=None, windows=None,
              trough_span: float = TROUGH_SPAN_S) -> ScalingFactors:
    """Scaling factors from unit-scaled AN, CN and IC populations to the reference train."""
    sums = {Wave.W1: sum_channels(an, channel_range), Wave.W3: sum_channels(cn, channel_range),
            Wave.W5: sum_channels(ic, channel_range)}
    return calibrate_sums(sums, an.fs, targets, epochs, stimulus, windows, trough_span)


def report_pp(metrics: WaveMetrics) -> float:
    """Amplitude expressed peak-to-peak: baseline-to-peak values are doubled."""
    if metrics.convention is Convention.BASELINE_TO_PEAK:
        return 2.0 * metrics.amplitude
    return metrics.amplitude


def write_calibration(path, factors: ScalingFactors, stimulus_hash: str = "", config_hash: str = "",
                      date: str | None = None) -> None:
    date = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if date is None else date
    lines = [f"# stimulus_sha256={stimulus_hash}", f"# config_sha256={config_hash}", f"# date={date}",
             f"m1={factors.m1!r}", f"m3={factors.m3!r}", f"m5={factors.m5!r}"]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_calibration(path) -> ScalingFactors:
    values = {}
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep or key.strip() not in ("m1", "m3", "m5"):
                raise DataError(f"{path}:{lineno}: unexpected calibration line {line!r}")
            try:
                values[key.strip()] = float(value)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad number {value!r}") from exc
    missing = {"m1", "m3", "m5"} - values.keys()
    if missing:
        raise DataError(f"{path}: missing {', '.join(sorted(missing))}")
    return ScalingFactors(**values)


def waveform_hash(x: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(x, dtype="<f8").tobytes()).hexdigest()
