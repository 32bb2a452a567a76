"""Flat ``section.key = value`` experiment configuration.

Every key has a default (see :data:`DEFAULTS`); unknown keys are rejected.
Lists are comma separated and channel ranges are written ``first-last``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from pathlib import Path

from .analysis import Wave
from .calibration import CalibrationTargets
from .errors import ConfigError
from .frontend import ChannelMap, FiberClass, FiberWeights, SurrogateSettings
from .nuclei import NucleusParams
from .pipeline import Model
from .stimuli import StimulusSpec

DEFAULTS: dict[str, str] = {
    # stimulus (used by `stim` and `simulate`)
    "stimulus.kind": "click_train",
    "stimulus.fs": "100000",
    "stimulus.duration": "0.5",
    "stimulus.level_db": "100",
    "stimulus.rate": "20",
    "stimulus.click_width": "80e-6",
    "stimulus.polarity": "positive",
    "stimulus.first_onset": "10e-6",
    "stimulus.fc": "4000",
    "stimulus.fmod": "98",
    "stimulus.depth": "0.85",
    "stimulus.ramp": "2.5e-3",
    "stimulus.leading_silence": "0",
    "stimulus.total_duration": "0",
    # front-end
    "frontend.source": "surrogate",
    "frontend.an_path": "",
    "frontend.an_format": "vap1",
    "frontend.reference": "rest",
    "frontend.fs_out": "20000",
    "frontend.n_channels": "401",
    "frontend.cf_high_hz": "12000",
    "frontend.cf_low_hz": "112",
    "frontend.q": "4",
    "frontend.lowpass_hz": "1000",
    "frontend.latency_s": "0.8e-3",
    "frontend.travel_s": "0.5e-3",
    "frontend.travel_exponent": "0.5",
    "frontend.tilt_exponent": "1.5",
    "frontend.ref_hz": "1000",
    "frontend.n_hsr": "13",
    "frontend.n_msr": "3",
    "frontend.n_lsr": "3",
    "frontend.spont_hsr": "70",
    "frontend.spont_msr": "10",
    "frontend.spont_lsr": "1",
    "frontend.sat_hsr": "250",
    "frontend.sat_msr": "150",
    "frontend.sat_lsr": "120",
    "frontend.slope_hsr": "9000",
    "frontend.slope_msr": "700",
    "frontend.slope_lsr": "60",
    # nuclei
    "nuclei.version": "1.2",
    "nuclei.bug_mode": "",
    "nuclei.kernel_variant": "",
    "cn.tau_exc_s": "0.5e-3",
    "cn.tau_inh_s": "2e-3",
    "cn.s_inh": "0.6",
    "cn.delay_s": "1e-3",
    "cn.gain_a": "1.5",
    "ic.tau_exc_s": "0.5e-3",
    "ic.tau_inh_s": "2e-3",
    "ic.s_inh": "1.5",
    "ic.delay_s": "2e-3",
    "ic.gain_a": "1",
    # analysis
    "analysis.nfft": "4000",
    "analysis.mtf_channel": "112",
    "analysis.fmod_start": "5",
    "analysis.fmod_stop": "250",
    "analysis.fmod_step": "5",
    "analysis.mtf_fc": "4000",
    "analysis.mtf_duration_s": "0.2",
    "analysis.mtf_level_db": "70",
    "analysis.mtf_ramp_s": "5e-3",
    "analysis.mtf_depth": "1",
    "analysis.w1_window_ms": "0.5,2.5",
    "analysis.w3_window_ms": "1.5,4.0",
    "analysis.w5_window_ms": "3.0,8.0",
    "analysis.w5_trough_ms": "5",
    "analysis.epoch_ms": "25",
    "analysis.report_shift_s": "3.5e-3",
    "analysis.click_levels_db": "60,70,80,90,100",
    "analysis.click_epochs": "1,10",
    "analysis.click_rate": "20",
    "analysis.click_duration_s": "0.5",
    "analysis.click_first_onset_s": "10e-6",
    "analysis.range_broadband": "1-401",
    "analysis.range_on": "100-123",
    "analysis.range_off": "30-54",
    "analysis.efr_levels_db": "40,50,60,70,80,90",
    "analysis.efr_trace_level_db": "70",
    "analysis.efr_fc": "4000",
    "analysis.efr_fmod": "98",
    "analysis.efr_depth": "0.85",
    "analysis.efr_duration_s": "0.1",
    "analysis.efr_ramp_s": "2.5e-3",
    "analysis.efr_silence_s": "0.02",
    "analysis.efr_window_s": "0.2",
    # calibration
    "calibration.w1_p": "0.15e-6",
    "calibration.w3_p": "0.17e-6",
    "calibration.w5_pp": "0.61e-6",
    "calibration.epochs": "59,60",
    "calibration.rate": "11.1",
    "calibration.duration_s": "6",
    "calibration.level_db": "100",
    "calibration.click_width": "80e-6",
    # io
    "io.calibration_path": "",
}


def parse_text(text: str, source: str = "<config>") -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value', got {raw.strip()!r}")
        if key not in DEFAULTS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved configuration: defaults overlaid with the user's values."""

    values: tuple[tuple[str, str], ...]

    @classmethod
    def from_mapping(cls, overrides: dict[str, object] | None = None) -> "ExperimentConfig":
        merged = dict(DEFAULTS)
        for key, value in (overrides or {}).items():
            if key not in DEFAULTS:
                raise ConfigError(f"unknown key {key!r}")
            merged[key] = str(value)
        cfg = cls(tuple(sorted(merged.items())))
        cfg.validate()
        return cfg

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "ExperimentConfig":
        return cls.from_mapping(parse_text(text, source))

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text, str(path))

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        merged = dict(self.values)
        merged.update({k.replace("__", "."): str(v) for k, v in overrides.items()})
        return ExperimentConfig.from_mapping(merged)

    def canonical_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.values)

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    # --- typed access --------------------------------------------------

    def raw(self, key: str) -> str:
        return dict(self.values)[key]

    def text(self, key: str) -> str:
        return self.raw(key)

    def number(self, key: str) -> float:
        try:
            return float(self.raw(key))
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {self.raw(key)!r}") from None

    def integer(self, key: str) -> int:
        value = self.number(key)
        if value != int(value):
            raise ConfigError(f"{key}: expected an integer, got {self.raw(key)!r}")
        return int(value)

    def floats(self, key: str) -> list[float]:
        try:
            return [float(v) for v in self.raw(key).split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"{key}: expected comma-separated numbers, got {self.raw(key)!r}") from None

    def ints(self, key: str) -> list[int]:
        vals = self.floats(key)
        if any(v != int(v) for v in vals):
            raise ConfigError(f"{key}: expected integers")
        return [int(v) for v in vals]

    def channel_range(self, key: str) -> tuple[int, int]:
        parts = self.raw(key).split("-")
        try:
            first, last = (int(p) for p in parts)
        except ValueError:
            raise ConfigError(f"{key}: expected 'first-last', got {self.raw(key)!r}") from None
        if not 1 <= first <= last <= self.integer("frontend.n_channels"):
            raise ConfigError(f"{key}: channel range {first}-{last} not within the channel map")
        return first, last

    def window(self, key: str) -> tuple[float, float]:
        vals = self.floats(key)
        if len(vals) != 2 or vals[0] > vals[1]:
            raise ConfigError(f"{key}: expected 'start,stop' in ms")
        return vals[0] * 1e-3, vals[1] * 1e-3

    # --- builders ------------------------------------------------------

    def validate(self) -> None:
        self.model()
        self.stimulus()
        self.wave_windows()
        self.targets()
        for key in ("analysis.range_broadband", "analysis.range_on", "analysis.range_off"):
            self.channel_range(key)
        for key in ("analysis.click_levels_db", "analysis.efr_levels_db"):
            if not self.floats(key):
                raise ConfigError(f"{key}: at least one level required")
        if self.integer("analysis.nfft") < 1:
            raise ConfigError("analysis.nfft must be positive")
        epoch = self.number("analysis.epoch_ms") * 1e-3
        for wave, (_, stop) in self.wave_windows().items():
            span = self.number("analysis.w5_trough_ms") * 1e-3 if wave is Wave.W5 else 0.0
            if stop + span > epoch + 1e-12:
                raise ConfigError(f"{wave.value} search window does not fit in the {epoch * 1e3:g} ms epoch")
        for key in ("analysis.click_rate", "calibration.rate"):
            if epoch > 1.0 / self.number(key) + 1e-12:
                raise ConfigError(f"analysis.epoch_ms exceeds the inter-click interval set by {key}")

    def nucleus(self, section: str) -> NucleusParams:
        return NucleusParams(tau_exc=self.number(f"{section}.tau_exc_s"), tau_inh=self.number(f"{section}.tau_inh_s"),
                             s_inh=self.number(f"{section}.s_inh"), delay=self.number(f"{section}.delay_s"),
                             gain_a=self.number(f"{section}.gain_a"))

    def model(self) -> Model:
        weights = FiberWeights(
            n_hsr=self.integer("frontend.n_hsr"), n_msr=self.integer("frontend.n_msr"), n_lsr=self.integer("frontend.n_lsr"),
            hsr=FiberClass(self.number("frontend.spont_hsr"), self.number("frontend.sat_hsr"),
                           self.number("frontend.slope_hsr")),
            msr=FiberClass(self.number("frontend.spont_msr"), self.number("frontend.sat_msr"),
                           self.number("frontend.slope_msr")),
            lsr=FiberClass(self.number("frontend.spont_lsr"), self.number("frontend.sat_lsr"),
                           self.number("frontend.slope_lsr")))
        settings = SurrogateSettings(
            q=self.number("frontend.q"), lowpass_hz=self.number("frontend.lowpass_hz"),
            latency_s=self.number("frontend.latency_s"), travel_s=self.number("frontend.travel_s"),
            travel_exponent=self.number("frontend.travel_exponent"),
            tilt_exponent=self.number("frontend.tilt_exponent"), ref_hz=self.number("frontend.ref_hz"))
        cmap = ChannelMap(self.integer("frontend.n_channels"), self.number("frontend.cf_high_hz"),
                          self.number("frontend.cf_low_hz"))
        model = Model(cmap=cmap, weights=weights, settings=settings, cn=self.nucleus("cn"), ic=self.nucleus("ic"),
                      fs_abr=self.number("frontend.fs_out"), source=self.text("frontend.source"),
                      an_path=self.text("frontend.an_path"), an_format=self.text("frontend.an_format") or None,
                      reference=self.text("frontend.reference"))
        model = model.with_version(self.text("nuclei.version"))
        # explicit overrides of the release presets
        if self.text("nuclei.kernel_variant"):
            variant = self.text("nuclei.kernel_variant")
            model = replace(model, cn=replace(model.cn, kernel_variant=variant),
                            ic=replace(model.ic, kernel_variant=variant))
        if self.text("nuclei.bug_mode"):
            model = replace(model, ic=replace(model.ic, bug_mode=self.text("nuclei.bug_mode")))
        return model

    def stimulus(self) -> StimulusSpec:
        kw = dict(kind=self.text("stimulus.kind"), fs=self.number("stimulus.fs"),
                  duration=self.number("stimulus.duration"), level_db=self.number("stimulus.level_db"),
                  rate=self.number("stimulus.rate"), click_width=self.number("stimulus.click_width"),
                  polarity=self.text("stimulus.polarity"), first_onset=self.number("stimulus.first_onset"),
                  fc=self.number("stimulus.fc"), fmod=self.number("stimulus.fmod"), depth=self.number("stimulus.depth"),
                  ramp=self.number("stimulus.ramp"), leading_silence=self.number("stimulus.leading_silence"),
                  total_duration=self.number("stimulus.total_duration"))
        try:
            return StimulusSpec(**kw)
        except ValueError as exc:
            raise ConfigError(f"stimulus: {exc}") from None

    def wave_windows(self) -> dict[Wave, tuple[float, float]]:
        return {Wave.W1: self.window("analysis.w1_window_ms"), Wave.W3: self.window("analysis.w3_window_ms"),
                Wave.W5: self.window("analysis.w5_window_ms")}

    def targets(self) -> CalibrationTargets:
        return CalibrationTargets(self.number("calibration.w1_p"), self.number("calibration.w3_p"),
                                  self.number("calibration.w5_pp"))

