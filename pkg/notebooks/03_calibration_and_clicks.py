# %% [markdown]
# # Calibrating wave amplitudes and click level series
#
# Summed AN, CN and IC rates become ABR waves I, III and V after scaling by
# M1, M3 and M5. The factors are chosen so that clicks #59/#60 of an 11.1 Hz,
# 100 dB peSPL train give 0.15 uV (W-I, baseline to peak), 0.17 uV (W-III)
# and 0.61 uV peak to peak (W-V). Wave latencies are in model time; add
# 3.5 ms before comparing with recorded data.

# %%
from abrsim.analysis import Wave
from abrsim.calibration import REFERENCE_V12
from abrsim.config import ExperimentConfig
from abrsim.experiments import calibrate_model, click_metrics

cfg = ExperimentConfig.from_mapping()
factors = calibrate_model(cfg)  # about 10 s: 401 channels x 6 s
print("surrogate factors:", factors)
print("full-model factors, for reference only:", REFERENCE_V12)

# %% [markdown]
# The surrogate front-end produces different absolute rates than the full
# cochlear model, so its factors differ. Only their role is the same.

# %%
metrics = click_metrics(cfg, factors=factors)
for wave in Wave:
    for epoch in (1, 10):
        row = [metrics[(wave, epoch, lv)] for lv in (60.0, 70.0, 80.0, 90.0, 100.0)]
        lat = " ".join(f"{m.latency * 1e3:5.2f}" for m in row)
        amp = " ".join(f"{m.amplitude * 1e6:5.3f}" for m in row)
        print(f"{wave.value} click #{epoch:<2d} latency ms [{lat}]  amplitude uV [{amp}]")
