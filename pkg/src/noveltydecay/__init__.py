"""Simulation and estimation for novelty-discounted multiplicative attention growth."""

from .core import (
    Cohort,
    GrowthParams,
    InvalidTraceError,
    KwwParams,
    LogNormalFit,
    MeanVarSeries,
    ModelError,
    NoveltyCurve,
    StoryTrace,
    mix_seed,
    validate_trace,
)
from .diststats import fit_lognormal, ks_test, qq_points
from .estimate import (
    EstimationError,
    estimate_growth_ratio,
    estimate_novelty,
    mean_variance_series,
)
from .files import ingest_saturation, ingest_traces, write_traces
from .relaxation import fit_kww, half_life, kww_total_integral
from .simulate import ShockFamily, SimConfig, draw_shock, simulate_cohort, simulate_story

__version__ = "0.1.0"
