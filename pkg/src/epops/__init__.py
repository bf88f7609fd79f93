"""Optimal energy-preserving operations on pure-state sector profiles.

Everything a zero-energy-cost channel can do to a pure state is decided by
two weight profiles over energy sectors: the input's and the target's.
This package computes the reachable fidelity-probability region for such
conversions, the filters that attain its boundary, the recursive protocol
that sweeps it, and mixed-state generalizations, together with an
independent Hilbert-space oracle for cross-checking everything on small
dimensions.
"""

from __future__ import annotations

from .channels import (
    SectorFilter,
    deterministic_fidelity,
    filter_fidelity,
    filter_success_probability,
    filtered_profile,
)
from .coarse import CurvePoint, TradeoffCurve, coarse_fidelity, coarse_filter, tradeoff_curve
from .errors import EpopsError
from .optimal import TradeoffPoint, lagrange_filter, omega, optimal_tradeoff_point, ultimate_optimum
from .recursive import (
    ProtocolRound,
    ProtocolRun,
    cumulative,
    run_protocol,
    termination_time,
)
from .spectra import (
    EnergyLabel,
    EnergyProfile,
    RatioTable,
    binomial_profile,
    build_profile,
    common_support,
    poisson_profile,
    ratio_table,
    sine_profile,
    uniform_profile,
)

__version__ = "0.1.0"

__all__ = [
    "EnergyLabel",
    "EnergyProfile",
    "EpopsError",
    "RatioTable",
    "SectorFilter",
    "TradeoffCurve",
    "CurvePoint",
    "TradeoffPoint",
    "ProtocolRound",
    "ProtocolRun",
    "binomial_profile",
    "build_profile",
    "coarse_fidelity",
    "coarse_filter",
    "common_support",
    "cumulative",
    "deterministic_fidelity",
    "filter_fidelity",
    "filter_success_probability",
    "filtered_profile",
    "lagrange_filter",
    "omega",
    "optimal_tradeoff_point",
    "poisson_profile",
    "ratio_table",
    "run_protocol",
    "sine_profile",
    "termination_time",
    "tradeoff_curve",
    "ultimate_optimum",
    "uniform_profile",
    "__version__",
]
