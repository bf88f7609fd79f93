"""Sector filters and the foundational fidelity formulas.

An energy-preserving pure operation, reduced to its Lüders form and
followed by eigenstate alignment, acts on a pure input through a single
number per sector: the transmission probability x_E in [0, 1].  This
module holds that filter type together with the two formulas everything
else builds on: the deterministic alignment fidelity

    F_det = (sum_E sqrt(p_E q_E))^2

and the filtered fidelity

    F = (sum_E sqrt(x_E p_E q_E))^2 / p_succ,    p_succ = sum_E p_E x_E.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Tuple

from .errors import ZeroSuccessProbability
from .spectra import EnergyProfile, build_profile, common_support

_CLIP_SLACK = 1e-12


@dataclass(frozen=True)
class SectorFilter:
    """Per-sector transmission probabilities x_E of a pure filter.

    Absent sectors transmit nothing.  Coefficients within 1e-12 outside
    [0, 1] are clipped (boundary solutions of the Lagrange optimum land at
    1 up to roundoff); anything further out is rejected.
    """

    coefficients: Mapping[int, float]

    def __post_init__(self) -> None:
        cleaned: dict[int, float] = {}
        for index, x in self.coefficients.items():
            if x < -_CLIP_SLACK or x > 1.0 + _CLIP_SLACK:
                raise ValueError(
                    f"filter coefficient {x!r} at sector {index} is outside [0, 1]"
                )
            cleaned[int(index)] = min(max(x, 0.0), 1.0)
        object.__setattr__(self, "coefficients", cleaned)

    def coefficient(self, index: int) -> float:
        return self.coefficients.get(index, 0.0)

    @classmethod
    def identity(cls, profile: EnergyProfile) -> "SectorFilter":
        """Full transmission on every sector of ``profile``."""
        return cls({i: 1.0 for i in profile.support})

    def to_json_dict(self) -> dict:
        """Serialize as ``{"x": {"<index>": coefficient}}``."""
        return {"x": {str(i): x for i, x in sorted(self.coefficients.items())}}

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "SectorFilter":
        return cls({int(i): float(x) for i, x in doc["x"].items()})


def deterministic_fidelity(p: EnergyProfile, q: EnergyProfile) -> float:
    """Best deterministic (unit-probability) fidelity: (sum sqrt(p_E q_E))^2.

    Disjoint spectra simply give zero.
    """
    s = math.fsum(math.sqrt(p.weight(i) * q.weight(i)) for i in common_support(p, q))
    return s * s


def filter_success_probability(p: EnergyProfile, f: SectorFilter) -> float:
    """Probability sum_E p_E x_E that the filter transmits the state."""
    return math.fsum(p.weight(i) * f.coefficient(i) for i in p.support)


def filtered_profile(p: EnergyProfile, f: SectorFilter) -> EnergyProfile:
    """Renormalized profile after the filter: p'_E = p_E x_E / p_succ."""
    p_succ = filter_success_probability(p, f)
    if p_succ <= 0.0:
        raise ZeroSuccessProbability("the filter transmits nothing of this profile")
    pairs = []
    for label, w in p.entries:
        x = f.coefficient(label.index)
        if x > 0.0:
            pairs.append((label.index, label.value, w * x / p_succ))
    return build_profile(pairs)


def filter_fidelity(p: EnergyProfile, q: EnergyProfile, f: SectorFilter) -> float:
    """Fidelity to ``q`` after filtering ``p``, evaluated in closed form.

    Equals ``deterministic_fidelity(filtered_profile(p, f), q)``; both
    routes are the same quadratic form and agree to 1e-12.
    """
    p_succ = filter_success_probability(p, f)
    if p_succ <= 0.0:
        raise ZeroSuccessProbability("the filter transmits nothing of this profile")
    s = math.fsum(
        math.sqrt(f.coefficient(i) * p.weight(i) * q.weight(i))
        for i in common_support(p, q)
    )
    return s * s / p_succ


def luders_probability_identity_check(model, op) -> bool:
    """Check Tr[sqrt(P) rho sqrt(P)] = Tr[M(rho)] with P = sum_k M_k^dag M_k.

    ``model`` is an explicit-matrix sector model and ``op`` a list of Kraus
    matrices on it; the matrix work is delegated to the oracle module.
    Random density matrices are sampled there and the two traces compared
    at 1e-10.
    """
    from . import oracle

    return oracle.luders_identity_holds(model, op)
