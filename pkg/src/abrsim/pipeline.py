"""Front-end -> CN -> IC cascade."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import frontend
from .errors import ConfigError, DimensionMismatchError
from .frontend import ChannelMap, FiberWeights, SurrogateSettings
from .nuclei import (BugMode, NucleusParams, PopulationResponse, default_cn_params, default_ic_params,
                     nucleus_response, version_settings)
from .stimuli import StimulusSpec, render

CHUNK_CHANNELS = 32


@dataclass
class Model:
    """Configured cascade.

    With ``source="surrogate"`` AN rates come from :func:`frontend.surrogate_an`;
    with ``source="file"`` the population stored at ``an_path`` is used and the
    stimulus argument of :meth:`simulate` is ignored.

    With ``reference="rest"`` the resting AN rate is subtracted before the
    nuclei, so every stage reports the stimulus-evoked change from rest. For
    the surrogate the resting rate is the weighted spontaneous sum; for a file
    it is each channel's first sample.
    """

    cmap: ChannelMap = field(default_factory=ChannelMap)
    weights: FiberWeights = field(default_factory=FiberWeights)
    settings: SurrogateSettings = field(default_factory=SurrogateSettings)
    cn: NucleusParams = field(default_factory=default_cn_params)
    ic: NucleusParams = field(default_factory=default_ic_params)
    fs_abr: float = 20e3
    source: str = "surrogate"
    an_path: str = ""
    an_format: str | None = None
    reference: str = "rest"

    def __post_init__(self):
        if self.source not in ("surrogate", "file"):
            raise ConfigError(f"unknown front-end source {self.source!r}")
        if self.reference not in ("rest", "none"):
            raise ConfigError(f"unknown reference {self.reference!r}")
        if self.source == "file" and not self.an_path:
            raise ConfigError("front-end source 'file' needs an AN population path")

    def with_version(self, version: str) -> "Model":
        """Same model with the named release's kernels and IC scaling.

        v1.1 used the v1.1 kernels in both stages and the 1/tau**4 path scaling
        in the IC stage only.
        """
        ic = replace(self.ic, **version_settings(version))
        cn = replace(self.cn, kernel_variant=ic.kernel_variant, bug_mode=BugMode.FIXED_V12)
        return replace(self, cn=cn, ic=ic)

    def auditory_nerve(self, stimulus, fs_in: float | None = None, channels=None) -> PopulationResponse:
        if self.source == "file":
            an = frontend.load_population(self.an_path, self.an_format)
            if channels is not None:
                rows = np.asarray(channels, dtype=int) - 1
                an = PopulationResponse(an.data[rows], an.fs, an.cf_hz[rows])
            return an
        if isinstance(stimulus, StimulusSpec):
            fs_in = stimulus.fs
            stimulus = render(stimulus)
        if fs_in is None:
            raise ConfigError("fs_in is required for a raw stimulus waveform")
        return frontend.surrogate_an(stimulus, fs_in, self.cmap, self.weights, self.fs_abr,
                                     self.settings, channels=channels)

    def evoked(self, an: PopulationResponse) -> PopulationResponse:
        if self.reference == "none":
            return an
        if self.source == "surrogate":
            return an.with_data(an.data - self.weights.spontaneous_sum)
        return an.with_data(an.data - an.data[:, :1])

    def nuclei(self, an: PopulationResponse) -> tuple[PopulationResponse, PopulationResponse]:
        cn = an.with_data(nucleus_response(an.data, self.cn, an.fs))
        ic = cn.with_data(nucleus_response(cn.data, self.ic, cn.fs))
        return cn, ic

    def simulate(self, stimulus, fs_in: float | None = None, channels=None):
        """Return the (AN, CN, IC) populations for a stimulus spec or waveform."""
        an = self.evoked(self.auditory_nerve(stimulus, fs_in, channels))
        cn, ic = self.nuclei(an)
        return an, cn, ic

    def simulate_sums(self, stimulus, ranges: dict[str, tuple[int, int]], fs_in: float | None = None,
                      chunk: int = CHUNK_CHANNELS) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """Channel sums of AN, CN and IC for each named 1-based channel range.

        Channels are processed in blocks so the full population is never held
        in memory; results match summing :meth:`simulate` output up to rounding.
        """
        if isinstance(stimulus, StimulusSpec):
            fs_in = stimulus.fs
            stimulus = render(stimulus)
        n_total = self.cmap.n_channels
        lo = min(r[0] for r in ranges.values())
        hi = max(r[1] for r in ranges.values())
        if lo < 1 or hi > n_total or any(r[0] > r[1] for r in ranges.values()):
            raise DimensionMismatchError(f"channel ranges must lie within 1..{n_total}")
        if self.source == "file":
            chunk = hi - lo + 1
        sums = {}
        for start in range(lo, hi + 1, chunk):
            block = np.arange(start, min(start + chunk, hi + 1))
            an, cn, ic = self.simulate(stimulus, fs_in, channels=block)
            for name, (first, last) in ranges.items():
                sel = (block >= first) & (block <= last)
                if not sel.any():
                    continue
                parts = [resp.data[sel].sum(axis=0) for resp in (an, cn, ic)]
                if name not in sums:
                    sums[name] = parts
                else:
                    for acc, part in zip(sums[name], parts):
                        acc += part
        return {name: tuple(v) for name, v in sums.items()}
