"""Single-shot optima: the ultimate fidelity point and the Lagrange tradeoff.

Removing the probability constraint, the best reachable fidelity is

    F_max = sum over common sectors of q_E,

attained with success probability p_max = (min_E p_E/q_E) F_max by the
filter x_E = (min ratio) q_E / p_E.

At a fixed success probability, the optimal filter splits the common
spectrum into a fully transmitted set S0 (x_E = 1) and its complement S1
where x_E is proportional to q_E/p_E.  Choosing S0 reduces to maximizing

    Omega[S0] = sum_{S0} sqrt(p_E q_E) + sqrt((p_succ - p(S0)) q(S1)),

and the fidelity of the winner is Omega^2 / p_succ.  Which S0 wins is not
known in closed form, so the exhaustive mode enumerates every subset (the
spectrum is capped at 24 sectors); the ratio-family mode tries only the
nested prefix unions of the ratio table, the sets realized by coherent
coarse-graining.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .channels import SectorFilter, filter_success_probability
from .errors import (
    DisjointSpectra,
    InfeasibleProbability,
    InvalidPartition,
    NoFeasiblePartition,
    SpectrumTooLarge,
)
from .spectra import EnergyProfile, common_support, ratio_table

_SLACK = 1e-12
_EXHAUSTIVE_CAP = 24
_CHUNK_BITS = 16


@dataclass(frozen=True)
class TradeoffPoint:
    """One point of the fidelity-probability tradeoff.

    ``s0`` is the fully transmitted sector set; the filter follows the
    two-regime structure (x_E = 1 on s0, x_E proportional to q_E/p_E off
    it) and reproduces ``p_succ`` within 1e-10.
    """

    p_succ: float
    fidelity: float
    filter: SectorFilter
    s0: Tuple[int, ...]

    def to_json_dict(self) -> dict:
        doc = {
            "p_succ": self.p_succ,
            "fidelity": self.fidelity,
            "s0": list(self.s0),
        }
        doc.update(self.filter.to_json_dict())
        return doc


def ultimate_optimum(
    p: EnergyProfile, q: EnergyProfile
) -> Tuple[float, float, SectorFilter]:
    """Maximum fidelity, its maximum success probability, and the filter.

    F_max equals the target weight on the common spectrum; the filter
    transmits each common sector with x_E = (min ratio) q_E/p_E, which is
    exactly 1 at the ratio-minimizing sector.
    """
    common = common_support(p, q)
    if not common:
        raise DisjointSpectra("input and target profiles share no sector")
    f_max = math.fsum(q.weight(i) for i in common)
    r_min = min(p.weight(i) / q.weight(i) for i in common)
    p_max = r_min * f_max
    coeffs = {i: r_min * q.weight(i) / p.weight(i) for i in common}
    return f_max, p_max, SectorFilter(coeffs)


def _coefficient(
    p: EnergyProfile, q: EnergyProfile, s0: Iterable[int], p_succ: float
) -> Tuple[Tuple[int, ...], Tuple[int, ...], float]:
    """Validate the partition and return (s0, s1, c) with x_E = c q_E/p_E on s1."""
    common = common_support(p, q)
    s0_t = tuple(sorted(set(s0)))
    if any(i not in common for i in s0_t):
        raise InvalidPartition(f"s0 {s0_t} is not a subset of the common spectrum")
    s1 = tuple(i for i in common if i not in set(s0_t))
    p_s0 = math.fsum(p.weight(i) for i in s0_t)
    q_s1 = math.fsum(q.weight(i) for i in s1)
    excess = p_succ - p_s0
    if excess < -_SLACK * max(1.0, p_succ):
        raise InfeasibleProbability(
            f"requested p_succ={p_succ} is below the weight {p_s0} of s0"
        )
    if not s1:
        if abs(excess) > 1e-10:
            raise InfeasibleProbability(
                f"s0 covers the whole common spectrum but transmits {p_s0}, "
                f"not the requested {p_succ}"
            )
        return s0_t, s1, 0.0
    c = max(excess, 0.0) / q_s1
    return s0_t, s1, c


def lagrange_filter(
    p: EnergyProfile, q: EnergyProfile, s0: Iterable[int], p_succ: float
) -> SectorFilter:
    """The two-regime optimal filter for the partition ``s0`` at ``p_succ``.

    x_E = 1 on s0 and x_E = c q_E/p_E on the rest of the common spectrum,
    with c chosen so the success probability equals ``p_succ``.
    """
    s0_t, s1, c = _coefficient(p, q, s0, p_succ)
    coeffs = {i: 1.0 for i in s0_t}
    for i in s1:
        x = c * q.weight(i) / p.weight(i)
        if x > 1.0 + _SLACK:
            raise InfeasibleProbability(
                f"coefficient {x} at sector {i} exceeds 1; "
                f"p_succ={p_succ} is not reachable with this partition"
            )
        coeffs[i] = min(x, 1.0)
    return SectorFilter(coeffs)


def omega(
    p: EnergyProfile, q: EnergyProfile, s0: Iterable[int], p_succ: float
) -> float:
    """The quantity Omega[S0] whose square over p_succ is the fidelity."""
    s0_t, s1, c = _coefficient(p, q, s0, p_succ)
    for i in s1:
        if c * q.weight(i) / p.weight(i) > 1.0 + _SLACK:
            raise InfeasibleProbability(
                f"coefficient at sector {i} exceeds 1 for this partition"
            )
    aligned = math.fsum(math.sqrt(p.weight(i) * q.weight(i)) for i in s0_t)
    q_s1 = math.fsum(q.weight(i) for i in s1)
    p_s0 = math.fsum(p.weight(i) for i in s0_t)
    return aligned + math.sqrt(max(p_succ - p_s0, 0.0) * q_s1)


def _best_subset_exhaustive(
    pw: np.ndarray, qw: np.ndarray, spq: np.ndarray, ratios: np.ndarray, p_succ: float
) -> Tuple[float, int] | None:
    """Scan all subsets of the common spectrum; return (best Omega, best mask).

    Vectorized in chunks of 2^16 bitmasks.  Ties resolve to the smallest
    subset, then lexicographically by member positions.
    """
    n = len(pw)
    bits = np.arange(n)
    best_omega = -np.inf
    best_members: Tuple[int, ...] | None = None
    best_mask = 0
    for start in range(0, 1 << n, 1 << _CHUNK_BITS):
        stop = min(start + (1 << _CHUNK_BITS), 1 << n)
        masks = np.arange(start, stop, dtype=np.int64)
        member = ((masks[:, None] >> bits[None, :]) & 1).astype(bool)
        p_s0 = member @ pw
        q_s1 = (~member) @ qw
        aligned = member @ spq
        excess = p_succ - p_s0
        min_ratio_s1 = np.where(member, np.inf, ratios[None, :]).min(axis=1)
        c = excess / np.where(q_s1 > 0.0, q_s1, 1.0)
        feasible = excess >= -_SLACK
        feasible &= np.where(
            q_s1 > 0.0,
            c <= min_ratio_s1 * (1.0 + _SLACK),
            np.abs(excess) <= 1e-10,
        )
        if not feasible.any():
            continue
        om = aligned + np.sqrt(np.clip(excess, 0.0, None) * q_s1)
        om = np.where(feasible, om, -np.inf)
        top = float(om.max())
        if top < best_omega:
            continue
        for idx in np.nonzero(om == top)[0]:
            members = tuple(int(b) for b in bits[member[idx]])
            if (
                best_members is None
                or top > best_omega
                or (len(members), members) < (len(best_members), best_members)
            ):
                best_omega = top
                best_members = members
                best_mask = int(masks[idx])
    if best_members is None:
        return None
    return best_omega, best_mask


def optimal_tradeoff_point(
    p: EnergyProfile,
    q: EnergyProfile,
    p_succ: float,
    mode: str = "exhaustive",
) -> TradeoffPoint:
    """Best fidelity point at success probability ``p_succ``.

    ``exhaustive`` enumerates every subset of the common spectrum (capped
    at 24 sectors); ``ratio-family`` tries only the empty set and the
    nested prefix unions of the ratio table.
    """
    if not 0.0 < p_succ <= 1.0 + _SLACK:
        raise ValueError("p_succ must lie in (0, 1]")
    common = common_support(p, q)
    if not common:
        raise DisjointSpectra("input and target profiles share no sector")

    if mode == "exhaustive":
        if len(common) > _EXHAUSTIVE_CAP:
            raise SpectrumTooLarge(
                f"{len(common)} common sectors exceed the exhaustive cap "
                f"of {_EXHAUSTIVE_CAP}; use mode='ratio-family'"
            )
        pw = np.array([p.weight(i) for i in common])
        qw = np.array([q.weight(i) for i in common])
        found = _best_subset_exhaustive(pw, qw, np.sqrt(pw * qw), pw / qw, p_succ)
        if found is None:
            raise NoFeasiblePartition(
                f"no subset of the common spectrum admits p_succ={p_succ}"
            )
        _, mask = found
        s0 = tuple(common[b] for b in range(len(common)) if (mask >> b) & 1)
    elif mode == "ratio-family":
        table = ratio_table(p, q)
        candidates: list[Tuple[int, ...]] = [()]
        candidates.extend(table.unions)
        viable: list[Tuple[float, int, Tuple[int, ...]]] = []
        for cand in candidates:
            try:
                om = omega(p, q, cand, p_succ)
            except (InfeasibleProbability, InvalidPartition):
                continue
            viable.append((om, -len(cand), cand))
        if not viable:
            raise NoFeasiblePartition(
                f"no ratio-family partition admits p_succ={p_succ}"
            )
        best_om = max(v[0] for v in viable)
        tied = [v for v in viable if v[0] == best_om]
        s0 = min((len(c), c) for _, _, c in tied)[1]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    filt = lagrange_filter(p, q, s0, p_succ)
    om = omega(p, q, s0, p_succ)
    achieved = filter_success_probability(p, filt)
    return TradeoffPoint(
        p_succ=achieved, fidelity=om * om / p_succ, filter=filt, s0=tuple(sorted(s0))
    )
