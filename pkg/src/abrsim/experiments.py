"""Batch experiments: MTF sweep, click level series, EFR level series, calibration.

Each ``run_*`` function takes an :class:`~abrsim.config.ExperimentConfig` and
returns ``{file name: text}``. CSV outputs start with a ``# config_sha256=``
comment and are byte-for-byte reproducible for a given configuration.
"""
from __future__ import annotations

import numpy as np

from . import stimuli
from .analysis import (MtfCurve, Wave, default_fmod_grid, efr_magnitude, latency_report,
                       max_spectral_amplitude, mtf)
from .calibration import (ScalingFactors, calibrate_sums, epoch_onsets, measure_waves, read_calibration,
                          waveform_hash, write_calibration)
from .config import ExperimentConfig
from .pipeline import Model


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def csv_text(cfg: ExperimentConfig, header: list[str], rows) -> str:
    lines = [f"# config_sha256={cfg.sha256}", ",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _generator_sums(sums) -> dict[Wave, np.ndarray]:
    an, cn, ic = sums
    return {Wave.W1: an, Wave.W3: cn, Wave.W5: ic}


# --- calibration -----------------------------------------------------------

def calibration_stimulus(cfg: ExperimentConfig) -> stimuli.StimulusSpec:
    return stimuli.click_train(fs=cfg.number("stimulus.fs"), rate=cfg.number("calibration.rate"),
                               duration=cfg.number("calibration.duration_s"),
                               click_width=cfg.number("calibration.click_width"),
                               level_db=cfg.number("calibration.level_db"),
                               polarity=stimuli.Polarity.ALTERNATING_POS_FIRST, first_onset=0.0)


def calibrate_model(cfg: ExperimentConfig, model: Model | None = None) -> ScalingFactors:
    """Run the reference click train through ``model`` and derive M1, M3, M5."""
    model = cfg.model() if model is None else model
    spec = calibration_stimulus(cfg)
    broadband = cfg.channel_range("analysis.range_broadband")
    sums = model.simulate_sums(spec, {"bb": broadband})["bb"]
    return calibrate_sums(_generator_sums(sums), model.fs_abr, cfg.targets(), cfg.ints("calibration.epochs"),
                          spec, cfg.wave_windows(), cfg.number("analysis.w5_trough_ms") * 1e-3)


def run_calibration(cfg: ExperimentConfig, path, date: str | None = None) -> ScalingFactors:
    factors = calibrate_model(cfg)
    stim_hash = waveform_hash(stimuli.render(calibration_stimulus(cfg)))
    write_calibration(path, factors, stimulus_hash=stim_hash, config_hash=cfg.sha256, date=date)
    return factors


def scaling_factors(cfg: ExperimentConfig, model: Model | None = None) -> ScalingFactors:
    """Factors from ``io.calibration_path`` if set, else from a fresh calibration run."""
    path = cfg.text("io.calibration_path")
    if path:
        return read_calibration(path)
    return calibrate_model(cfg, model)


# --- experiments -------------------------------------------------------------

def mtf_template(cfg: ExperimentConfig) -> stimuli.StimulusSpec:
    return stimuli.am_tone(fs=cfg.number("stimulus.fs"), fc=cfg.number("analysis.mtf_fc"),
                           duration=cfg.number("analysis.mtf_duration_s"),
                           level_db=cfg.number("analysis.mtf_level_db"), ramp=cfg.number("analysis.mtf_ramp_s"),
                           depth=cfg.number("analysis.mtf_depth"), fmod=cfg.number("analysis.fmod_start"))


def mtf_curves(cfg: ExperimentConfig, model: Model | None = None, factors: ScalingFactors | None = None):
    """CN and IC MTF magnitudes in volts at the configured channel."""
    model = cfg.model() if model is None else model
    factors = scaling_factors(cfg, model) if factors is None else factors
    grid = default_fmod_grid(cfg.number("analysis.fmod_start"), cfg.number("analysis.fmod_stop"),
                             cfg.number("analysis.fmod_step"))
    curves = mtf(model, mtf_template(cfg), grid, cfg.integer("analysis.mtf_channel"), cfg.integer("analysis.nfft"))
    return {"CN": MtfCurve(grid, curves["CN"].magnitude * factors.m3),
            "IC": MtfCurve(grid, curves["IC"].magnitude * factors.m5)}


def run_mtf_experiment(cfg: ExperimentConfig) -> dict[str, str]:
    curves = mtf_curves(cfg)
    rows = []
    for stage in ("CN", "IC"):
        c = curves[stage]
        rows += [(stage, f, db, rel) for f, db, rel in zip(c.fmod_hz, c.magnitude_db, c.magnitude_rel)]
    return {"mtf.csv": csv_text(cfg, ["stage", "param", "value_db", "value_rel"], rows)}


def click_stimulus(cfg: ExperimentConfig, level_db: float) -> stimuli.StimulusSpec:
    return stimuli.click_train(fs=cfg.number("stimulus.fs"), rate=cfg.number("analysis.click_rate"),
                               duration=cfg.number("analysis.click_duration_s"),
                               click_width=cfg.number("stimulus.click_width"), level_db=level_db,
                               polarity=stimuli.Polarity.ALL_POSITIVE,
                               first_onset=cfg.number("analysis.click_first_onset_s"))


def click_metrics(cfg: ExperimentConfig, model: Model | None = None, factors: ScalingFactors | None = None):
    """``{(wave, epoch, level): WaveMetrics}`` with amplitudes in volts."""
    model = cfg.model() if model is None else model
    factors = scaling_factors(cfg, model) if factors is None else factors
    broadband = cfg.channel_range("analysis.range_broadband")
    windows = cfg.wave_windows()
    trough = cfg.number("analysis.w5_trough_ms") * 1e-3
    out = {}
    for level in sorted(cfg.floats("analysis.click_levels_db")):
        spec = click_stimulus(cfg, level)
        sums = _generator_sums(model.simulate_sums(spec, {"bb": broadband})["bb"])
        scaled = {w: factors.for_wave(w) * x for w, x in sums.items()}
        onsets = epoch_onsets(spec)
        for epoch in cfg.ints("analysis.click_epochs"):
            for wave, m in measure_waves(scaled, model.fs_abr, float(onsets[epoch - 1]), windows, trough).items():
                out[(wave, epoch, level)] = m
    return out


def run_click_experiment(cfg: ExperimentConfig) -> dict[str, str]:
    metrics = click_metrics(cfg)
    shift = cfg.number("analysis.report_shift_s")
    rows = []
    for (wave, epoch, level) in sorted(metrics, key=lambda k: (k[0].value, k[1], k[2])):
        m = metrics[(wave, epoch, level)]
        shifted = latency_report([m], shift)[0]
        rows.append((wave.value, epoch, level, m.latency, m.amplitude, shifted.latency))
    header = ["wave", "epoch", "level_db", "latency_s", "amplitude_v", "latency_reported_s"]
    return {"clicks.csv": csv_text(cfg, header, rows)}


EFR_RANGES = (("broadband", "analysis.range_broadband"), ("on", "analysis.range_on"),
              ("off", "analysis.range_off"))


def efr_stimulus(cfg: ExperimentConfig, level_db: float) -> stimuli.StimulusSpec:
    return stimuli.am_tone(fs=cfg.number("stimulus.fs"), fc=cfg.number("analysis.efr_fc"),
                           fmod=cfg.number("analysis.efr_fmod"), depth=cfg.number("analysis.efr_depth"),
                           duration=cfg.number("analysis.efr_duration_s"), ramp=cfg.number("analysis.efr_ramp_s"),
                           leading_silence=cfg.number("analysis.efr_silence_s"),
                           total_duration=cfg.number("analysis.efr_window_s"), level_db=level_db)


def efr_components(cfg: ExperimentConfig, level_db: float, model: Model | None = None,
                   factors: ScalingFactors | None = None) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Scaled (AN, CN, IC) channel sums in volts for each EFR summation range."""
    model = cfg.model() if model is None else model
    factors = scaling_factors(cfg, model) if factors is None else factors
    ranges = {name: cfg.channel_range(key) for name, key in EFR_RANGES}
    sums = model.simulate_sums(efr_stimulus(cfg, level_db), ranges)
    return {name: (factors.m1 * an, factors.m3 * cn, factors.m5 * ic) for name, (an, cn, ic) in sums.items()}


def run_efr_experiment(cfg: ExperimentConfig) -> dict[str, str]:
    model = cfg.model()
    factors = scaling_factors(cfg, model)
    nfft = cfg.integer("analysis.nfft")
    levels = sorted(cfg.floats("analysis.efr_levels_db"))
    trace_level = cfg.number("analysis.efr_trace_level_db")
    by_level = {lv: efr_components(cfg, lv, model, factors) for lv in sorted(set(levels) | {trace_level})}
    rows = []
    for name, _ in EFR_RANGES:
        mags = [max_spectral_amplitude(sum(by_level[lv][name]), nfft) for lv in levels]
        peak = max(mags)
        for lv, mag in zip(levels, mags):
            rows.append((name, lv, efr_magnitude(sum(by_level[lv][name]), nfft), mag / peak if peak > 0 else 0.0))
    an, cn, ic = by_level[trace_level]["broadband"]
    t = np.arange(an.size) / model.fs_abr
    trace_rows = zip(t, an + cn + ic, an, cn, ic)
    return {"efr_magnitude.csv": csv_text(cfg, ["range", "param", "value_db", "value_rel"], rows),
            "efr_trace.csv": csv_text(cfg, ["time_s", "r_efr_v", "an_v", "cn_v", "ic_v"], trace_rows)}


def run_simulation(cfg: ExperimentConfig):
    """AN, CN and IC populations for the configured stimulus."""
    return cfg.model().simulate(cfg.stimulus())
