"""Discrete alpha-function lowpass filters.

The continuous kernel ``P(t) = t / tau**2 * exp(-t / tau)`` has unit area. Its
Laplace transform ``1 / (s + 1/tau)**2`` is discretised with the bilinear
transform, giving a second-order section with numerator ``[1, 2, 1]`` and a
double pole at ``m = (2 fs tau - 1) / (2 fs tau + 1)``. Three variants differ
in how the section is scaled:

* ``V12`` uses ``C = 1 / (2 fs tau + 1)**2`` and has exactly unit DC gain.
* ``V11`` uses ``C = 1 / (2 fs tau)**2``, i.e. it drops the factor
  ``(2 fs tau)**2 / (2 fs tau + 1)**2`` and overshoots slightly at DC.
* ``UREAR`` is the impulse-invariant form used by the UR EAR toolbox, with
  ``b = [0, m, 0]`` and ``m = exp(-1 / (fs tau))``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DataError, DomainError, InstabilityError


class AlphaVariant(enum.Enum):
    V12 = "v12"
    V11 = "v11"
    UREAR = "urear"

    @classmethod
    def parse(cls, value: "str | AlphaVariant") -> "AlphaVariant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise DomainError(f"unknown alpha variant {value!r} (expected one of {names})") from None


@dataclass(frozen=True)
class BiquadFilter:
    """Second-order section ``C * (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)``.

    ``b`` and ``a`` are stored unscaled so they read exactly like the
    coefficient table; ``scale_c`` is applied at filtering time.
    """

    b: tuple[float, float, float]
    a: tuple[float, float, float]
    scale_c: float
    fs: float
    tau: float
    variant: AlphaVariant = AlphaVariant.V12

    @property
    def pole(self) -> float:
        """The double-pole location ``m``."""
        return -self.a[1] / 2.0

    @property
    def dc_gain(self) -> float:
        # a is always the double pole (1 - m z^-1)^2; the factored form avoids
        # cancellation in 1 + a1 + a2 for long time constants
        return self.scale_c * sum(self.b) / (1.0 - self.pole) ** 2


def pole_parameter(fs: float, tau: float, variant: AlphaVariant) -> float:
    if variant is AlphaVariant.UREAR:
        return math.exp(-1.0 / (fs * tau))
    k = 2.0 * fs * tau
    return (k - 1.0) / (k + 1.0)


def alpha_coefficients(fs: float, tau: float, variant: AlphaVariant | str = AlphaVariant.V12) -> BiquadFilter:
    """Design the alpha-kernel section for sampling rate ``fs`` and time constant ``tau``.

    Args:
        fs: sampling rate in Hz.
        tau: time constant in seconds. The UREAR scale factor also uses
            ``tau`` in seconds inside ``1 - (tau + 1) exp(-1/tau)``.
        variant: which coefficient set to produce.

    Raises:
        DomainError: if ``fs`` or ``tau`` is not a positive finite number.
        InstabilityError: if ``fs * tau <= 0.5``; the bilinear pole leaves
            the interval (0, 1) there.
    """
    variant = AlphaVariant.parse(variant)
    fs = float(fs)
    tau = float(tau)
    if not (math.isfinite(fs) and fs > 0):
        raise DomainError(f"sampling rate must be positive and finite, got {fs!r}")
    if not (math.isfinite(tau) and tau > 0):
        raise DomainError(f"time constant must be positive and finite, got {tau!r}")
    if fs * tau <= 0.5:
        raise InstabilityError(f"fs*tau = {fs * tau:g} <= 0.5: pole parameter is not well defined")

    m = pole_parameter(fs, tau, variant)
    a = (1.0, -2.0 * m, m * m)
    if variant is AlphaVariant.V12:
        b = (1.0, 2.0, 1.0)
        c = 1.0 / (2.0 * fs * tau + 1.0) ** 2
    elif variant is AlphaVariant.V11:
        b = (1.0, 2.0, 1.0)
        c = 1.0 / (2.0 * fs * tau) ** 2
    else:
        b = (0.0, m, 0.0)
        c = 1.0 / (fs**2 * tau**2 * (1.0 - (tau + 1.0) * math.exp(-1.0 / tau)))
    return BiquadFilter(b=b, a=a, scale_c=c, fs=fs, tau=tau, variant=variant)


def passband_gain_db(filt: BiquadFilter) -> float:
    """DC gain of the section in dB, scale factor included."""
    return 20.0 * math.log10(abs(filt.dc_gain))


def frequency_response(filt: BiquadFilter, freqs) -> np.ndarray:
    """Complex gain of the section at each frequency in ``freqs`` (Hz).

    Raises:
        DomainError: if any frequency is negative or at/above Nyquist.
    """
    f = np.atleast_1d(np.asarray(freqs, dtype=float))
    if np.any(~np.isfinite(f)) or np.any(f < 0) or np.any(f >= filt.fs / 2.0):
        raise DomainError(f"frequencies must lie in [0, fs/2) = [0, {filt.fs / 2.0:g})")
    zinv = np.exp(-2j * np.pi * f / filt.fs)
    b0, b1, b2 = filt.b
    num = b0 + b1 * zinv + b2 * zinv**2
    den = (1.0 - filt.pole * zinv) ** 2
    return filt.scale_c * num / den


@numba.njit(cache=True)
def _biquad_rows(x, c0, c1, c2, a1, a2, out):
    # Left-to-right evaluation of the difference equation; kept identical to
    # the pure-Python reference so results are bit-for-bit reproducible.
    n_rows, n = x.shape
    for r in range(n_rows):
        x1 = 0.0
        x2 = 0.0
        y1 = 0.0
        y2 = 0.0
        for i in range(n):
            x0 = x[r, i]
            y0 = c0 * x0 + c1 * x1 + c2 * x2 - a1 * y1 - a2 * y2
            out[r, i] = y0
            x2 = x1
            x1 = x0
            y2 = y1
            y1 = y0
    return out


def scaled_numerator(filt: BiquadFilter) -> tuple[float, float, float]:
    c = filt.scale_c
    return (c * filt.b[0], c * filt.b[1], c * filt.b[2])


def apply_filter(filt: BiquadFilter, signal) -> np.ndarray:
    """Filter ``signal`` along its last axis from zero initial state.

    Works on 1-D series or 2-D ``channels x samples`` arrays; rows are
    independent.

    Raises:
        DataError: if the input contains NaN or infinity.
    """
    x = np.asarray(signal, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DataError("filter input contains non-finite samples")
    shape = x.shape
    x2d = np.ascontiguousarray(x.reshape(-1, shape[-1]) if x.ndim else x.reshape(1, 1))
    c0, c1, c2 = scaled_numerator(filt)
    out = np.empty_like(x2d)
    _biquad_rows(x2d, c0, c1, c2, filt.a[1], filt.a[2], out)
    return out.reshape(shape)


def impulse_response(filt: BiquadFilter, n_samples: int) -> np.ndarray:
    x = np.zeros(n_samples)
    x[0] = 1.0
    return apply_filter(filt, x)
