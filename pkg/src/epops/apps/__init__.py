"""Concrete conversion tasks built on the protocol engine."""

from __future__ import annotations

from .amplification import AmplificationResult, amplification_tradeoff
from .cloning import cloning_tradeoff, first_round_fidelity
from .correction import CorrectionResult, correction_tradeoff, haar_average_fidelity
from .estimation import (
    GainPoint,
    asymptotic_gain,
    deterministic_gain,
    estimation_profiles,
    estimation_tradeoff,
    holevo_gain,
)

__all__ = [
    "AmplificationResult",
    "CorrectionResult",
    "GainPoint",
    "amplification_tradeoff",
    "asymptotic_gain",
    "cloning_tradeoff",
    "correction_tradeoff",
    "deterministic_gain",
    "estimation_profiles",
    "estimation_tradeoff",
    "first_round_fidelity",
    "haar_average_fidelity",
    "holevo_gain",
]
