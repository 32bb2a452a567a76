"""Acceptance criteria, one test per criterion.

Each check returns ``(passed, detail)``; the pytest wrapper records a one-line
verdict that ``conftest.py`` prints in the terminal summary. Running this file
directly prints the same lines without pytest.
"""
import functools
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from abrsim import experiments
from abrsim.alpha_filters import alpha_coefficients, impulse_response, passband_gain_db
from abrsim.analysis import Wave, efr_magnitude
from abrsim.calibration import ScalingFactors, epoch_onsets, measure_waves, write_calibration
from abrsim.config import ExperimentConfig
from abrsim.frontend import ChannelMap, greenwood_cf
from abrsim.nuclei import BugMode, NucleusParams, dc_weights, default_cn_params, default_ic_params, nucleus_response
from abrsim.stimuli import pespl_to_pa

FS = 20000.0
RESULTS: dict[int, str] = {}


@functools.cache
def config(version="1.2"):
    return ExperimentConfig.from_mapping({"nuclei.version": version})


@functools.cache
def calibrated(version="1.2"):
    """Factors from the reference click train, and the wall time it took."""
    t0 = time.perf_counter()
    factors = experiments.calibrate_model(config(version))
    return factors, time.perf_counter() - t0


def criterion_1():
    t0 = time.perf_counter()
    worst = 0.0
    for tau in (0.5e-3, 2e-3):
        k = 2 * FS * tau
        m = (k - 1) / (k + 1)
        rows = {"v12": ((1, 2, 1), (1, -2 * m, m * m), 1 / (k + 1) ** 2),
                "v11": ((1, 2, 1), (1, -2 * m, m * m), 1 / k**2)}
        mu = math.exp(-1 / (FS * tau))
        rows["urear"] = ((0, mu, 0), (1, -2 * mu, mu * mu),
                         1 / (FS**2 * tau**2 * (1 - (tau + 1) * math.exp(-1 / tau))))
        for variant, (b, a, c) in rows.items():
            f = alpha_coefficients(FS, tau, variant)
            for got, want in zip(f.b + f.a + (f.scale_c,), b + a + (c,)):
                if want == 0:
                    worst = max(worst, abs(got))
                else:
                    worst = max(worst, abs(got - want) / abs(want))
    elapsed = time.perf_counter() - t0
    return worst <= 1e-12 and elapsed < 1.0, f"max rel err {worst:.1e}, {elapsed * 1e3:.1f} ms"


def criterion_2():
    g12 = [passband_gain_db(alpha_coefficients(FS, t, "v12")) for t in (0.5e-3, 2e-3)]
    g11_2 = passband_gain_db(alpha_coefficients(FS, 2e-3, "v11"))
    g11_05 = passband_gain_db(alpha_coefficients(FS, 0.5e-3, "v11"))
    gur = [passband_gain_db(alpha_coefficients(FS, t, "urear")) for t in (0.5e-3, 2e-3)]
    ok = (all(abs(g) <= 1e-9 for g in g12) and abs(g11_2 - 0.22) <= 0.005 and abs(g11_05 - 0.85) <= 0.005
          and all(abs(g) <= 0.05 for g in gur))
    return ok, (f"V12 {max(map(abs, g12)):.1e} dB, V11 {g11_2:.4f}/{g11_05:.4f} dB, "
                f"UREAR {gur[0]:.4f}/{gur[1]:.4f} dB")


def criterion_3():
    worst = 0.0
    for tau in (0.5e-3, 2e-3):
        h = impulse_response(alpha_coefficients(FS, tau, "v12"), int(round(50 * tau * FS)))
        worst = max(worst, abs(h.sum() - 1.0))
    return worst <= 1e-9, f"|sum - 1| = {worst:.1e}"


def _modulation_amplitude(y, f):
    t = np.arange(y.size) / FS
    basis = np.column_stack([np.cos(2 * np.pi * f * t), np.sin(2 * np.pi * f * t), np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return float(np.hypot(coef[0], coef[1]))


def _alpha_h(f, tau):
    k = 2 * FS * tau
    m = (k - 1) / (k + 1)
    zi = np.exp(-2j * np.pi * f / FS)
    return (1 + zi) ** 2 / (1 - m * zi) ** 2 / (k + 1) ** 2


def criterion_4():
    t0 = time.perf_counter()
    r0, r1 = 400.0, 150.0
    t = np.arange(int(0.6 * FS)) / FS
    keep = int(0.1 * FS)
    worst = 0.0
    for p in (default_cn_params(), default_ic_params()):
        lag_n = round(p.delay * FS)
        for f in np.arange(5.0, 255.0, 5.0):
            y = nucleus_response(r0 + r1 * np.cos(2 * np.pi * f * t), p, FS)
            oracle = p.gain_a * r1 * abs(_alpha_h(f, p.tau_exc)
                                         - p.s_inh * np.exp(-2j * np.pi * f * lag_n / FS) * _alpha_h(f, p.tau_inh))
            worst = max(worst, abs(_modulation_amplitude(y[keep:], f) / oracle - 1))
    elapsed = time.perf_counter() - t0
    return worst <= 0.01 and elapsed < 10.0, f"max rel err {worst:.2e} over 5-250 Hz, {elapsed:.2f} s"


def criterion_5():
    s = 1.5
    bug = NucleusParams(tau_exc=0.5e-3, tau_inh=2e-3, s_inh=s, bug_mode=BugMode.BUG_V11)
    exc, inh = dc_weights(bug, FS)
    ratio_ok = inh / exc == s / 16
    minima = {}
    for version in ("1.2", "1.1"):
        cfg = config(version)
        factors, _ = calibrated(version)
        level = cfg.number("analysis.efr_trace_level_db")
        _, _, ic = experiments.efr_components(cfg, level, factors=factors)["broadband"]
        minima[version] = float(ic.min())
    trace_ok = minima["1.2"] < minima["1.1"]
    return ratio_ok and trace_ok, (f"inh/exc = {inh / exc!r} (S/16 = {s / 16!r}); IC minimum v1.2 "
                                   f"{minima['1.2']:.3e} V vs v1.1 {minima['1.1']:.3e} V")


def criterion_6():
    cfg = config()
    factors, elapsed = calibrated()
    model = cfg.model()
    spec = experiments.calibration_stimulus(cfg)
    an, cn, ic = model.simulate_sums(spec, {"bb": cfg.channel_range("analysis.range_broadband")})["bb"]
    scaled = {Wave.W1: factors.m1 * an, Wave.W3: factors.m3 * cn, Wave.W5: factors.m5 * ic}
    onsets = epoch_onsets(spec)
    targets = cfg.targets()
    errs = {}
    for wave in Wave:
        amps = [measure_waves(scaled, model.fs_abr, float(onsets[k - 1]), cfg.wave_windows())[wave].amplitude
                for k in cfg.ints("calibration.epochs")]
        errs[wave] = abs(np.mean(amps) / targets.for_wave(wave) - 1)
    ok = max(errs.values()) <= 1e-3 and elapsed < 120.0
    return ok, (", ".join(f"{w.value} err {e:.1e}" for w, e in errs.items()) + f"; calibration run {elapsed:.1f} s")


def criterion_7():
    a = pespl_to_pa(100.0)
    return abs(a - 5.657) <= 0.01, f"{a:.4f} Pa"


def criterion_8():
    cfg = config()
    curves = experiments.mtf_curves(cfg, factors=ScalingFactors(1.0, 1.0, 1.0))
    ok, parts = True, []
    for stage, c in curves.items():
        rel = c.magnitude_rel
        edges = (float(rel[0]), float(rel[-1]))
        ok &= 60 <= c.peak_fmod <= 150 and max(edges) < 0.8
        parts.append(f"{stage} peak {c.peak_fmod:g} Hz, edges {edges[0]:.2f}/{edges[1]:.2f}")
    return ok, "; ".join(parts)


def criterion_9():
    cfg = config()
    factors, _ = calibrated()
    metrics = experiments.click_metrics(cfg, factors=factors)
    levels = sorted(cfg.floats("analysis.click_levels_db"))
    epochs = cfg.ints("analysis.click_epochs")
    problems = []
    for epoch in epochs:
        amp = [metrics[(Wave.W5, epoch, lv)].amplitude for lv in levels]
        if np.any(np.diff(amp) < 0):
            problems.append(f"W5 amplitude decreases (click #{epoch})")
        for wave in Wave:
            lat = [metrics[(wave, epoch, lv)].latency for lv in levels]
            if np.any(np.diff(lat) > 0):
                problems.append(f"{wave.value} latency increases (click #{epoch})")
    first, tenth = epochs[0], epochs[-1]
    for wave in Wave:
        for lv in levels:
            if metrics[(wave, tenth, lv)].amplitude > metrics[(wave, first, lv)].amplitude:
                problems.append(f"{wave.value} click #{tenth} > #{first} at {lv:g} dB")
    w5 = [metrics[(Wave.W5, first, lv)] for lv in (levels[0], levels[-1])]
    detail = (f"W5 #1 {w5[0].amplitude * 1e6:.3f}->{w5[1].amplitude * 1e6:.3f} uV, "
              f"{w5[0].latency * 1e3:.2f}->{w5[1].latency * 1e3:.2f} ms")
    return not problems, detail if not problems else "; ".join(problems)


def criterion_10():
    n = 4000
    # 100 Hz is bin 20 of a 4000-point spectrum at 20 kHz
    x = 1e-6 * np.sin(2 * np.pi * 100.0 * np.arange(n) / FS)
    db = efr_magnitude(x, n)
    return abs(db + 6.02) <= 0.01, f"{db:.4f} dB re 1 uV"


def criterion_11():
    cmap = ChannelMap()
    c1, c401, c112 = greenwood_cf(cmap, 1), greenwood_cf(cmap, 401), greenwood_cf(cmap, 112)
    ok = abs(c1 / 12000 - 1) <= 0.01 and abs(c401 / 112 - 1) <= 0.01 and abs(c112 / 4013 - 1) <= 0.02
    return ok, f"ch1 {c1:.1f} Hz, ch401 {c401:.2f} Hz, ch112 {c112:.1f} Hz"


def criterion_12():
    factors, _ = calibrated()
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "calibration.txt"
        write_calibration(path, factors, date="2000-01-01T00:00:00+00:00")
        cfg = config().with_overrides(io__calibration_path=str(path))
        same = {}
        for name, run in (("mtf", experiments.run_mtf_experiment), ("clicks", experiments.run_click_experiment),
                          ("efr", experiments.run_efr_experiment)):
            a, b = run(cfg), run(cfg)
            same[name] = a.keys() == b.keys() and all(a[k].encode() == b[k].encode() for k in a)
    return all(same.values()), ", ".join(f"{k} {'identical' if v else 'DIFFERENT'}" for k, v in same.items())


CRITERIA = {
    1: ("coefficient fidelity", criterion_1),
    2: ("passband gains", criterion_2),
    3: ("unit-area impulse response", criterion_3),
    4: ("nucleus frequency-domain oracle", criterion_4),
    5: ("v1.1 bug reproduction", criterion_5),
    6: ("calibration closure", criterion_6),
    7: ("peSPL arithmetic", criterion_7),
    8: ("MTF shape", criterion_8),
    9: ("click growth properties", criterion_9),
    10: ("EFR magnitude oracle", criterion_10),
    11: ("CF map", criterion_11),
    12: ("determinism", criterion_12),
}


def run_criterion(number):
    name, check = CRITERIA[number]
    passed, detail = check()
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {name}: {detail}"
    RESULTS[number] = line
    return passed, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    passed, line = run_criterion(number)
    print(line)
    assert passed, line


if __name__ == "__main__":
    outcomes = [run_criterion(n) for n in sorted(CRITERIA)]
    for _, line in outcomes:
        print(line)
    sys.exit(0 if all(ok for ok, _ in outcomes) else 1)
