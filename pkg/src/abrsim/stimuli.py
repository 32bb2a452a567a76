"""Click trains and amplitude-modulated tones, rendered in pascals."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import SpecError

P_REF = 20e-6  # Pa


class StimulusKind(enum.Enum):
    CLICK_TRAIN = "click_train"
    AM_TONE = "am_tone"


class Polarity(enum.Enum):
    ALTERNATING_POS_FIRST = "alternating"
    ALL_POSITIVE = "positive"


@dataclass(frozen=True)
class StimulusSpec:
    """Declarative stimulus description.

    Click-train fields: ``rate``, ``duration``, ``click_width``, ``level_db``
    (dB peSPL), ``polarity`` and ``first_onset``. AM-tone fields: ``fc``,
    ``fmod``, ``depth``, ``duration`` (tone only), ``level_db`` (dB SPL, total
    RMS of the ramped tone), ``ramp`` and ``leading_silence``. ``total_duration``
    zero-pads the rendered waveform at the end when it is longer.
    """

    kind: StimulusKind
    fs: float = 100e3
    duration: float = 0.5
    level_db: float = 100.0
    # click train
    rate: float = 20.0
    click_width: float = 80e-6
    polarity: Polarity = Polarity.ALL_POSITIVE
    first_onset: float = 10e-6
    # AM tone
    fc: float = 4000.0
    fmod: float = 100.0
    depth: float = 1.0
    ramp: float = 5e-3
    leading_silence: float = 0.0
    total_duration: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", StimulusKind(self.kind))
        object.__setattr__(self, "polarity", Polarity(self.polarity))
        if not self.fs > 0:
            raise SpecError("sampling rate must be positive")
        if not self.duration > 0:
            raise SpecError("duration must be positive")
        if self.kind is StimulusKind.CLICK_TRAIN:
            if not self.rate > 0:
                raise SpecError("click rate must be positive")
            if self.click_width * self.fs < 1 - 1e-9:
                raise SpecError("click width must span at least one sample")
            if self.first_onset < 0:
                raise SpecError("first click onset must be non-negative")
        else:
            if not 0.0 <= self.depth <= 1.0:
                raise SpecError("modulation depth must lie in [0, 1]")
            if not self.fs > 2 * self.fc:
                raise SpecError("sampling rate must exceed twice the carrier frequency")
            if self.fmod >= self.fc:
                raise SpecError("modulation rate must be below the carrier frequency")
            if self.ramp < 0 or 2 * self.ramp > self.duration:
                raise SpecError("ramps must be non-negative and fit inside the tone")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["polarity"] = self.polarity.value
        return d


def click_train(**kwargs) -> StimulusSpec:
    return StimulusSpec(kind=StimulusKind.CLICK_TRAIN, **kwargs)


def am_tone(**kwargs) -> StimulusSpec:
    return StimulusSpec(kind=StimulusKind.AM_TONE, **kwargs)


def calibration_click_train(fs: float = 100e3) -> StimulusSpec:
    """11.1 Hz alternating-polarity train of 80 us clicks, 6 s, 100 dB peSPL."""
    return click_train(fs=fs, rate=11.1, duration=6.0, click_width=80e-6, level_db=100.0,
                       polarity=Polarity.ALTERNATING_POS_FIRST, first_onset=0.0)


def pespl_to_pa(level_db: float) -> float:
    """Baseline-to-peak click amplitude for a level in dB peSPL.

    The click peak equals the peak-to-peak pressure of a sinusoid at the same
    dB SPL, i.e. ``2 * sqrt(2) * 20 uPa * 10**(level/20)``.
    """
    return 2.0 * math.sqrt(2.0) * P_REF * 10.0 ** (level_db / 20.0)


def spl_to_rms(level_db: float) -> float:
    return P_REF * 10.0 ** (level_db / 20.0)


def _n(seconds: float, fs: float) -> int:
    return int(round(seconds * fs))


def click_onsets(spec: StimulusSpec) -> np.ndarray:
    """Onset times (s): one click per repetition period, ``floor(duration * rate)`` clicks.

    Raises:
        SpecError: if any onset (or the end of any click) falls beyond the duration.
    """
    n_clicks = int(math.floor(spec.duration * spec.rate + 1e-9))
    onsets = spec.first_onset + np.arange(n_clicks) / spec.rate
    if n_clicks == 0 or onsets[-1] + spec.click_width > spec.duration + 1e-12:
        raise SpecError("click onset lies beyond the train duration")
    return onsets


def click_polarities(spec: StimulusSpec, n_clicks: int) -> np.ndarray:
    if spec.polarity is Polarity.ALTERNATING_POS_FIRST:
        return np.where(np.arange(n_clicks) % 2 == 0, 1.0, -1.0)
    return np.ones(n_clicks)


def render_click_train(spec: StimulusSpec) -> np.ndarray:
    if spec.kind is not StimulusKind.CLICK_TRAIN:
        raise SpecError("render_click_train needs a click-train spec")
    n_total = max(_n(spec.duration, spec.fs), _n(spec.total_duration, spec.fs))
    width = _n(spec.click_width, spec.fs)
    amp = pespl_to_pa(spec.level_db)
    onsets = click_onsets(spec)
    out = np.zeros(n_total)
    for onset, sign in zip(onsets, click_polarities(spec, onsets.size)):
        i0 = _n(onset, spec.fs)
        out[i0:i0 + width] = sign * amp
    return out


def raised_cosine_ramps(n: int, n_ramp: int) -> np.ndarray:
    window = np.ones(n)
    if n_ramp > 0:
        flank = np.sin(0.5 * np.pi * (np.arange(n_ramp) + 0.5) / n_ramp) ** 2
        window[:n_ramp] = flank
        window[n - n_ramp:] = flank[::-1]
    return window


def render_am_tone(spec: StimulusSpec) -> np.ndarray:
    """Sinusoidally amplitude-modulated tone with raised-cosine ramps.

    The amplitude is set so that the RMS of the ramped tone (leading silence
    and end padding excluded) matches ``level_db`` dB SPL.
    """
    if spec.kind is not StimulusKind.AM_TONE:
        raise SpecError("render_am_tone needs an AM-tone spec")
    n_tone = _n(spec.duration, spec.fs)
    t = np.arange(n_tone) / spec.fs
    tone = (1.0 + spec.depth * np.cos(2 * np.pi * spec.fmod * t)) * np.sin(2 * np.pi * spec.fc * t)
    tone *= raised_cosine_ramps(n_tone, _n(spec.ramp, spec.fs))
    tone *= spl_to_rms(spec.level_db) / np.sqrt(np.mean(tone**2))
    n_lead = _n(spec.leading_silence, spec.fs)
    n_total = max(n_lead + n_tone, _n(spec.total_duration, spec.fs))
    out = np.zeros(n_total)
    out[n_lead:n_lead + n_tone] = tone
    return out


def render(spec: StimulusSpec) -> np.ndarray:
    if spec.kind is StimulusKind.CLICK_TRAIN:
        return render_click_train(spec)
    return render_am_tone(spec)
