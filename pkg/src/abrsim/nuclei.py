"""Cochlear-nucleus and inferior-colliculus stages.

Both stages share one form: excitation minus delayed, scaled inhibition, each
path the unit-area alpha kernel convolved with the stage input::

    r_out(t) = A * [P_exc * r_in(t) - S * P_inh * r_in(t - D)]

The IC stage is driven by the CN output (the cascade AN -> CN -> IC).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .alpha_filters import AlphaVariant, alpha_coefficients, apply_filter, frequency_response
from .errors import DataError, DegenerateDelayError, DimensionMismatchError, DomainError


class BugMode(enum.Enum):
    FIXED_V12 = "fixed"
    # v1.1 scaled each path by 1/tau**4 instead of 1/tau**2.
    BUG_V11 = "bug_v11"

    @classmethod
    def parse(cls, value: "str | BugMode") -> "BugMode":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        aliases = {"fixed": cls.FIXED_V12, "fixed_v12": cls.FIXED_V12, "v12": cls.FIXED_V12,
                   "bug_v11": cls.BUG_V11, "bug": cls.BUG_V11, "v11": cls.BUG_V11}
        if text not in aliases:
            raise DomainError(f"unknown bug mode {value!r} (expected 'fixed' or 'bug_v11')")
        return aliases[text]


@dataclass(frozen=True)
class NucleusParams:
    """Parameters of one nucleus stage.

    The inhibition strength, delay and gain defaults are the values commonly
    used for the Nelson & Carney (2004) same-frequency inhibition-excitation
    model (CN: S=0.6, D=1 ms, A=1.5; IC: S=1.5, D=2 ms, A=1). They are chosen
    here as configurable defaults, see :func:`default_cn_params` and
    :func:`default_ic_params`.
    """

    tau_exc: float = 0.5e-3
    tau_inh: float = 2e-3
    s_inh: float = 0.6
    delay: float = 1e-3
    gain_a: float = 1.5
    kernel_variant: AlphaVariant = AlphaVariant.V12
    bug_mode: BugMode = BugMode.FIXED_V12

    def __post_init__(self):
        if not self.tau_exc > 0 or not self.tau_inh > 0:
            raise DomainError("time constants must be positive")
        if not self.delay >= 0:
            raise DomainError("inhibition delay must be non-negative")
        if not self.s_inh >= 0:
            raise DomainError("inhibition strength must be non-negative")
        if not np.isfinite(self.gain_a):
            raise DomainError("stage gain must be finite")
        object.__setattr__(self, "kernel_variant", AlphaVariant.parse(self.kernel_variant))
        object.__setattr__(self, "bug_mode", BugMode.parse(self.bug_mode))

    @property
    def path_scales(self) -> tuple[float, float]:
        """Extra (excitatory, inhibitory) multipliers introduced by the bug mode."""
        if self.bug_mode is BugMode.BUG_V11:
            return 1.0 / self.tau_exc**2, 1.0 / self.tau_inh**2
        return 1.0, 1.0

    def with_version(self, version: str) -> "NucleusParams":
        return replace(self, **version_settings(version))


def default_cn_params(**overrides) -> NucleusParams:
    return NucleusParams(**{**dict(s_inh=0.6, delay=1e-3, gain_a=1.5), **overrides})


def default_ic_params(**overrides) -> NucleusParams:
    return NucleusParams(**{**dict(s_inh=1.5, delay=2e-3, gain_a=1.0), **overrides})


def version_settings(version: str) -> dict:
    """Kernel variant and bug mode of a named model release, for the IC stage.

    The CN stage of v1.1 used the v1.1 kernels but was not affected by the
    scaling bug; use ``bug_mode=FIXED_V12`` there.
    """
    version = str(version).lower().lstrip("v")
    if version in ("1.2", "12"):
        return dict(kernel_variant=AlphaVariant.V12, bug_mode=BugMode.FIXED_V12)
    if version in ("1.1", "11"):
        return dict(kernel_variant=AlphaVariant.V11, bug_mode=BugMode.BUG_V11)
    raise DomainError(f"unknown model version {version!r}")


@dataclass
class PopulationResponse:
    """Rates or voltages for a bank of channels.

    ``data`` is ``channels x samples``; channel index 0 is the highest CF.
    """

    data: np.ndarray
    fs: float
    cf_hz: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        self.cf_hz = np.asarray(self.cf_hz, dtype=float).reshape(-1)
        if self.data.ndim != 2:
            raise DimensionMismatchError(f"population data must be 2-D, got shape {self.data.shape}")
        if self.data.shape[0] != self.cf_hz.size:
            raise DimensionMismatchError(
                f"{self.data.shape[0]} data rows but {self.cf_hz.size} characteristic frequencies")
        if np.any(np.diff(self.cf_hz) >= 0):
            raise DataError("characteristic frequencies must decrease strictly with channel index")
        if not self.fs > 0:
            raise DomainError("sampling rate must be positive")

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def with_data(self, data) -> "PopulationResponse":
        return PopulationResponse(data=data, fs=self.fs, cf_hz=self.cf_hz)


def delay_samples(delay: float, fs: float) -> int:
    return int(round(delay * fs))


def shift_right(x: np.ndarray, n: int) -> np.ndarray:
    """Delay along the last axis by ``n`` samples, zero-filling the front."""
    if n == 0:
        return x
    out = np.zeros_like(x)
    out[..., n:] = x[..., :-n]
    return out


def nucleus_response(signal, params: NucleusParams, fs: float) -> np.ndarray:
    """Excitation minus delayed inhibition for a 1-D series or a ``channels x samples`` array.

    Raises:
        DegenerateDelayError: if the quantised delay is not shorter than the signal.
        DataError: if the input is not finite.
    """
    x = np.asarray(signal, dtype=float)
    n_delay = delay_samples(params.delay, fs)
    if n_delay >= x.shape[-1]:
        raise DegenerateDelayError(
            f"inhibition delay of {n_delay} samples is not shorter than the {x.shape[-1]}-sample input")
    h_exc = alpha_coefficients(fs, params.tau_exc, params.kernel_variant)
    h_inh = alpha_coefficients(fs, params.tau_inh, params.kernel_variant)
    g_exc, g_inh = params.path_scales
    exc = apply_filter(h_exc, x)
    inh = apply_filter(h_inh, shift_right(x, n_delay))
    return params.gain_a * (g_exc * exc - params.s_inh * g_inh * inh)


def stage_transfer(params: NucleusParams, fs: float, freqs) -> np.ndarray:
    """Complex gain of a nucleus stage, ``A (g_e H_exc - S g_i e^{-j 2 pi f D} H_inh)``.

    The delay enters through its quantised sample count, matching
    :func:`nucleus_response`.
    """
    f = np.asarray(freqs, dtype=float)
    h_exc = frequency_response(alpha_coefficients(fs, params.tau_exc, params.kernel_variant), f)
    h_inh = frequency_response(alpha_coefficients(fs, params.tau_inh, params.kernel_variant), f)
    g_exc, g_inh = params.path_scales
    lag = np.exp(-2j * np.pi * f * delay_samples(params.delay, fs) / fs)
    return params.gain_a * (g_exc * h_exc - params.s_inh * g_inh * lag * h_inh)


def dc_weights(params: NucleusParams, fs: float) -> tuple[float, float]:
    """DC weights of the excitatory and inhibitory paths, gain ``A`` included."""
    h_exc = alpha_coefficients(fs, params.tau_exc, params.kernel_variant)
    h_inh = alpha_coefficients(fs, params.tau_inh, params.kernel_variant)
    g_exc, g_inh = params.path_scales
    return (params.gain_a * g_exc * h_exc.dc_gain,
            params.gain_a * params.s_inh * g_inh * h_inh.dc_gain)


def cn_stage(an: PopulationResponse, params: NucleusParams) -> PopulationResponse:
    return an.with_data(nucleus_response(an.data, params, an.fs))


def ic_stage(cn: PopulationResponse, params: NucleusParams) -> PopulationResponse:
    return cn.with_data(nucleus_response(cn.data, params, cn.fs))
