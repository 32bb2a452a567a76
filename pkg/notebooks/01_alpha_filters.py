# %% [markdown]
# # Alpha-kernel IIR sections
#
# The CN and IC stages filter their input with the alpha kernel
# `P(t) = t / tau**2 * exp(-t / tau)`. Discretised by the bilinear transform it
# becomes one second-order section with a double pole at `m`. Three coefficient
# sets exist: the current one (v12), the older one (v11), whose scale factor
# leaves a small passband gain, and the UR EAR impulse-invariant form.

# %%
import numpy as np

from abrsim.alpha_filters import (alpha_coefficients, frequency_response, impulse_response,
                                  passband_gain_db)

fs = 20e3
for tau in (0.5e-3, 2e-3):
    for variant in ("v12", "v11", "urear"):
        f = alpha_coefficients(fs, tau, variant)
        print(f"tau={tau * 1e3:.1f} ms {variant:5s} m={f.pole:.6f} C={f.scale_c:.4e} "
              f"gain={passband_gain_db(f):+.4f} dB")

# %% [markdown]
# The v11 gain is simply `((2 fs tau + 1) / (2 fs tau))**2`, so it shrinks as
# `fs * tau` grows. Next, the discrete impulse response compared with the
# continuous kernel.

# %%
tau = 2e-3
h = impulse_response(alpha_coefficients(fs, tau), 400) * fs
t = np.arange(400) / fs
p = t / tau**2 * np.exp(-t / tau)
print("area over the first 10 tau:", h.sum() / fs)
print("relative L2 error vs analytic kernel:", np.linalg.norm(h - p) / np.linalg.norm(p))
print("peak at", t[np.argmax(h)] * 1e3, "ms (analytic peak at tau)")

# %%
freqs = np.array([0, 10, 50, 100, 200, 500, 1000])
mag = np.abs(frequency_response(alpha_coefficients(fs, tau), freqs))
for f, g in zip(freqs, mag):
    print(f"{f:5d} Hz  {20 * np.log10(g):7.2f} dB")
