# %% [markdown]
# # EFRs to a 98 Hz AM tone, v1.2 against v1.1
#
# The EFR is the weighted sum of AN, CN and IC population responses. Here each
# model version is calibrated on its own and the 70 dB SPL IC contribution is
# compared: with the corrected kernel scaling the IC stage shows much stronger
# inhibition, seen as deeper negative excursions.

# %%
from abrsim.analysis import efr_magnitude
from abrsim.config import ExperimentConfig
from abrsim.experiments import calibrate_model, efr_components

for version in ("1.2", "1.1"):
    cfg = ExperimentConfig.from_mapping({"nuclei.version": version})
    factors = calibrate_model(cfg)
    parts = efr_components(cfg, 70.0, factors=factors)
    an, cn, ic = parts["broadband"]
    print(f"v{version}: IC min {ic.min() * 1e6:+.3f} uV, max {ic.max() * 1e6:+.3f} uV")
    for name, (a, c, i) in parts.items():
        print(f"   {name:9s} EFR {efr_magnitude(a + c + i):6.2f} dB re 1 uV")
