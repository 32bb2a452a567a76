"""Cochlear-nucleus and inferior-colliculus stages of a human auditory periphery
model, with the alpha-kernel filter designs, ABR calibration and EFR/MTF analysis
built on them."""

from .alpha_filters import (AlphaVariant, BiquadFilter, alpha_coefficients, apply_filter, frequency_response,
                            impulse_response, passband_gain_db)
from .analysis import (Convention, EfrWeights, MtfCurve, Wave, WaveMetrics, efr_magnitude, efr_waveform,
                       latency_report, mtf, sum_channels, wave_metrics)
from .calibration import CalibrationTargets, ScalingFactors, calibrate, report_pp
from .frontend import ChannelMap, FiberWeights, greenwood_cf, load_population, store_population, surrogate_an
from .nuclei import BugMode, NucleusParams, PopulationResponse, cn_stage, ic_stage, nucleus_response
from .pipeline import Model
from .stimuli import Polarity, StimulusKind, StimulusSpec, pespl_to_pa, render_am_tone, render_click_train

__version__ = "0.1.0"
