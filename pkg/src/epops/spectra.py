"""Energy-sector profiles and weight-ratio tables.

A pure state with definite sector components is fully described, for every
formula in this package, by its *energy profile*: the probability weight
p_E carried by each energy sector E.  This module provides the profile
type, builders for the standard families (binomial, Poisson, uniform,
sine), and the ratio table r_1 < ... < r_L of distinct values of p_E/q_E
that drives the recursive protocol.

Weights for large parameters are computed in the log domain (log-gamma),
so quantities like the weight 2^-400 at the edge of a 400-copy binomial
profile stay finite and positive instead of underflowing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from .errors import (
    AllZeroWeights,
    DisjointSpectra,
    DuplicateLabel,
    NegativeWeight,
)

#: Weights at or below this value are treated as exactly zero by the generic
#: construction paths (build_profile, JSON loading).  Analytic builders keep
#: every positive weight they compute.
ZERO_THRESHOLD = 1e-15

#: Default relative tolerance for collapsing equal weight ratios into one group.
RATIO_TOLERANCE = 1e-9

_NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, order=True)
class EnergyLabel:
    """Identifier of one energy sector.

    The integer ``index`` is the identity: labels compare (and hash) equal
    iff their indices are equal.  ``value`` is the displayed energy and
    plays no role in any formula.
    """

    index: int
    value: float = field(default=math.nan, compare=False)

    def __post_init__(self) -> None:
        value = float(self.value)
        if math.isnan(value):
            value = float(self.index)
        object.__setattr__(self, "value", value)


@dataclass(frozen=True)
class EnergyProfile:
    """Normalized sector weights of a pure state.

    ``entries`` is ordered by strictly increasing label index, every weight
    is positive, and the weights sum to one within 1e-12.
    """

    entries: Tuple[Tuple[EnergyLabel, float], ...]

    def __post_init__(self) -> None:
        indices = [label.index for label, _ in self.entries]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise DuplicateLabel("labels must be strictly increasing by index")
        weights = [w for _, w in self.entries]
        if any(w < 0.0 for w in weights):
            raise NegativeWeight("profile weights must be nonnegative")
        total = math.fsum(weights)
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise ValueError(
                f"profile weights sum to {total!r}, expected 1 within {_NORMALIZATION_TOL}"
            )
        object.__setattr__(
            self, "_by_index", {label.index: w for label, w in self.entries}
        )

    @property
    def support(self) -> Tuple[int, ...]:
        """Sector indices with nonzero weight, increasing."""
        return tuple(label.index for label, _ in self.entries)

    @property
    def labels(self) -> Tuple[EnergyLabel, ...]:
        return tuple(label for label, _ in self.entries)

    def weight(self, index: int) -> float:
        """Weight at sector ``index`` (zero if the sector is absent)."""
        return self._by_index.get(index, 0.0)

    def as_dict(self) -> dict[int, float]:
        return {label.index: w for label, w in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> str:
        """Serialize as ``{"energies": [{"index", "value", "weight"}, ...]}``."""
        doc = {
            "energies": [
                {"index": label.index, "value": label.value, "weight": w}
                for label, w in self.entries
            ]
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "EnergyProfile":
        """Load a profile from its JSON document.

        Weights need not be pre-normalized; they are cleaned up exactly like
        :func:`build_profile` input.
        """
        doc = json.loads(text)
        pairs = [
            (int(e["index"]), float(e.get("value", e["index"])), float(e["weight"]))
            for e in doc["energies"]
        ]
        return build_profile(pairs)


def _assemble(
    pairs: Iterable[Tuple[int, float, float]], drop_tol: float
) -> EnergyProfile:
    """Normalize, drop (near-)zero sectors, sort by index."""
    seen: dict[int, Tuple[float, float]] = {}
    for index, value, weight in pairs:
        if index in seen:
            raise DuplicateLabel(f"sector index {index} appears twice")
        if weight < -1e-12:
            raise NegativeWeight(f"weight {weight!r} at sector {index} is negative")
        seen[index] = (value, max(weight, 0.0))
    kept = {i: vw for i, vw in seen.items() if vw[1] > drop_tol}
    total = math.fsum(vw[1] for vw in kept.values())
    if total <= 0.0:
        raise AllZeroWeights("every weight is zero (or below the zero threshold)")
    entries = tuple(
        (EnergyLabel(i, kept[i][0]), kept[i][1] / total) for i in sorted(kept)
    )
    return EnergyProfile(entries)


def build_profile(pairs: Iterable[Tuple[int, float, float]]) -> EnergyProfile:
    """Build a profile from ``(index, energy value, weight)`` triples.

    Weights are normalized to sum one; sectors with weight at or below
    :data:`ZERO_THRESHOLD` are removed.
    """
    return _assemble(pairs, ZERO_THRESHOLD)


@dataclass(frozen=True)
class RatioTable:
    """Distinct sorted values of p_E/q_E on the common spectrum.

    ``ratios`` holds r_1 < ... < r_L; ``groups`` the sector sets R_i sharing
    each ratio; ``unions`` the prefix unions U_k = R_1 | ... | R_k.  The
    length L of ``ratios`` is the termination time of the recursive
    protocol.
    """

    ratios: Tuple[float, ...]
    groups: Tuple[Tuple[int, ...], ...]
    unions: Tuple[Tuple[int, ...], ...]
    common: Tuple[int, ...]
    tolerance: float

    @property
    def length(self) -> int:
        return len(self.ratios)

    def union_before(self, k: int) -> Tuple[int, ...]:
        """U_{k-1}, the sectors eroded before round k (empty for k=1)."""
        return self.unions[k - 2] if k >= 2 else ()


def common_support(p: EnergyProfile, q: EnergyProfile) -> Tuple[int, ...]:
    """Sorted sector indices carrying weight in both profiles."""
    qs = set(q.support)
    return tuple(i for i in p.support if i in qs)


def ratio_table(
    p: EnergyProfile, q: EnergyProfile, tol: float = RATIO_TOLERANCE
) -> RatioTable:
    """Group the weight ratios p_E/q_E over the common spectrum.

    Ratios within a relative distance ``tol`` of each other collapse into a
    single group (their representative ratio is the group mean); this keeps
    analytically equal ratios, e.g. from a symmetric binomial profile,
    from inflating the round count.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    common = common_support(p, q)
    if not common:
        raise DisjointSpectra("input and target profiles share no sector")
    order = sorted(common, key=lambda i: (p.weight(i) / q.weight(i), i))
    raw = [p.weight(i) / q.weight(i) for i in order]

    groups: list[list[int]] = []
    members: list[list[float]] = []
    for idx, r in zip(order, raw):
        if members and r - members[-1][0] <= tol * members[-1][0]:
            groups[-1].append(idx)
            members[-1].append(r)
        else:
            groups.append([idx])
            members.append([r])

    ratios = tuple(math.fsum(m) / len(m) for m in members)
    group_tuples = tuple(tuple(sorted(g)) for g in groups)
    unions: list[Tuple[int, ...]] = []
    acc: list[int] = []
    for g in group_tuples:
        acc.extend(g)
        unions.append(tuple(sorted(acc)))
    return RatioTable(
        ratios=ratios,
        groups=group_tuples,
        unions=tuple(unions),
        common=common,
        tolerance=tol,
    )


def binomial_profile(N: int) -> EnergyProfile:
    """Profile of N aligned spins: labels m = -N, -N+2, ..., N.

    The weight at m is C(N, (N-m)/2) / 2^N, evaluated through log-gamma so
    the tails stay positive for large N.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    ms = np.arange(-N, N + 1, 2)
    ks = (N - ms) // 2
    logw = gammaln(N + 1) - gammaln(ks + 1) - gammaln(N - ks + 1) - N * math.log(2.0)
    weights = np.exp(logw)
    weights /= weights.sum()
    return _assemble(
        ((int(m), float(m), float(w)) for m, w in zip(ms, weights)), 0.0
    )


def poisson_profile(r: float, cutoff: int) -> EnergyProfile:
    """Truncated Poisson number profile of a coherent amplitude ``r``.

    Weights are proportional to e^(-r^2) r^(2n) / n! for n = 0..cutoff and
    renormalized over the truncated range.
    """
    if r < 0.0:
        raise ValueError("amplitude r must be nonnegative")
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    if r == 0.0:
        return _assemble([(0, 0.0, 1.0)], 0.0)
    ns = np.arange(cutoff + 1)
    logw = -r * r + 2.0 * ns * math.log(r) - gammaln(ns + 1)
    logw -= logw.max()
    weights = np.exp(logw)
    weights /= weights.sum()
    return _assemble(
        ((int(n), float(n), float(w)) for n, w in zip(ns, weights)), 0.0
    )


def uniform_profile(N: int) -> EnergyProfile:
    """Flat profile over n = 0..N-1 (maximally coherent state)."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    return _assemble(((n, float(n), 1.0 / N) for n in range(N)), 0.0)


def sine_profile(N: int) -> EnergyProfile:
    """Sine-state profile over n = 0..N with weight (2/(N+1)) sin^2(n pi/(N+1)).

    The n = 0 weight is exactly zero and is dropped, so the support is
    1..N.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    ns = np.arange(N + 1)
    amp = np.sin(ns * math.pi / (N + 1))
    weights = 2.0 / (N + 1) * amp * amp
    weights /= weights.sum()
    return _assemble(
        ((int(n), float(n), float(w)) for n, w in zip(ns, weights) if w > 0.0), 0.0
    )
