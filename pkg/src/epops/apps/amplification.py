"""Probabilistic amplification of truncated coherent states.

Raising a coherent amplitude r1 to r2 > r1 converts one truncated Poisson
number profile into another.  The weight ratios form a geometric sequence
e^(r2^2-r1^2) (r1/r2)^(2n), so every sector is its own ratio group and the
protocol runs for cutoff+1 rounds.  Each round's probability has a closed
form, and each round's fidelity obeys an explicit Poisson-tail floor; both
are checked against the generic engine on every call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from ..coarse import TradeoffCurve, tradeoff_curve
from ..errors import CutoffTooSmall
from ..recursive import run_protocol
from ..spectra import EnergyProfile, poisson_profile

_REL_TOL = 1e-8
_LOG_TOL = 1e-6
_TINY = 1e-15


@dataclass(frozen=True)
class RoundAudit:
    """One protocol round next to its closed-form prediction."""

    k: int
    probability: float
    closed_form: float
    fidelity: float
    floor: Optional[float]


@dataclass(frozen=True)
class AmplificationResult:
    r1: float
    r2: float
    cutoff: int
    curve: TradeoffCurve
    audits: Tuple[RoundAudit, ...]
    tail_bound: float

    @property
    def max_probability_deviation(self) -> float:
        """Largest engine-versus-closed-form gap, relative or in the log."""
        worst = 0.0
        for a in self.audits:
            worst = max(worst, _deviation(a.probability, a.closed_form))
        return worst


def _deviation(engine: float, closed: float) -> float:
    if engine == 0.0 and closed == 0.0:
        return 0.0
    if min(engine, closed) < _TINY:
        return abs(math.log(engine) - math.log(closed))
    return abs(engine - closed) / closed


def tail_deficit(r2: float, m: int) -> float:
    """Chernoff bound e^(-r2^2) (r2^2 e / m)^m on the Poisson mass above m."""
    return math.exp(-r2 * r2 + m * (math.log(r2 * r2) + 1.0 - math.log(m)))


def fidelity_floor(r2: float, remaining: int) -> Optional[float]:
    """Poisson-tail lower bound on a round fidelity.

    ``remaining`` is the highest surviving number sector; the floor only
    binds once it exceeds r2^2.  Near the start of the curve the deficit
    sits far below one ulp, so the floor evaluates to exactly 1.0.
    """
    if remaining <= r2 * r2:
        return None
    return 1.0 - tail_deficit(r2, remaining)


def _closed_rounds(
    p: EnergyProfile, q: EnergyProfile, r1: float, r2: float, K: int
) -> list:
    """Per-round (probability, fidelity floor) from the geometric ratios.

    Round k erodes the k-th largest common sector, so the fidelities are
    suffix sums of the target weights over the descending sector list.
    """
    common = sorted(
        (n for n in p.support if q.weight(n) > 0.0), reverse=True
    )
    if r1 == r2:
        return [(1.0, fidelity_floor(r2, common[0]))]
    scale = math.exp(r2 * r2 - r1 * r1)
    base = (r1 / r2) ** 2
    rows = []
    for k, n in enumerate(common[: min(K, len(common))], start=1):
        f = math.fsum(q.weight(m) for m in common[k - 1 :])
        prev = scale * base ** common[k - 2] if k >= 2 else 0.0
        rows.append(((scale * base**n - prev) * f, fidelity_floor(r2, n)))
    return rows


def amplification_tradeoff(
    r1: float, r2: float, cutoff: int, K: int
) -> AmplificationResult:
    """Tradeoff curve for amplifying amplitude r1 to r2 at a number cutoff.

    Runs the generic protocol on the two Poisson profiles, then checks
    every round probability against the geometric closed form (relative
    1e-8, or 1e-6 on the logarithm below 1e-15) and every round fidelity
    against its Poisson-tail floor.
    """
    if r1 < 0.0:
        raise ValueError("r1 must be nonnegative")
    if r2 < r1:
        raise ValueError("r2 must be at least r1")
    if r2 == 0.0:
        raise ValueError("r2 must be positive")
    if cutoff <= r2 * r2:
        raise CutoffTooSmall(
            f"cutoff {cutoff} does not exceed r2^2 = {r2 * r2:g}; "
            "the truncated target would miss its own bulk"
        )
    p = poisson_profile(r1, cutoff)
    q = poisson_profile(r2, cutoff)
    run = run_protocol(p, q, K)
    curve = tradeoff_curve(p, q, K)
    closed = _closed_rounds(p, q, r1, r2, K)
    assert len(closed) == len(run.rounds)
    audits = []
    for r, (cp, floor) in zip(run.rounds, closed):
        dev = _deviation(r.probability, cp)
        limit = _LOG_TOL if min(r.probability, cp) < _TINY else _REL_TOL
        assert dev <= limit, (r.k, r.probability, cp, dev)
        if floor is not None:
            assert r.fidelity >= floor - 1e-12, (r.k, r.fidelity, floor)
        audits.append(
            RoundAudit(
                k=r.k,
                probability=r.probability,
                closed_form=cp,
                fidelity=r.fidelity,
                floor=floor,
            )
        )
    return AmplificationResult(
        r1=r1,
        r2=r2,
        cutoff=cutoff,
        curve=curve,
        audits=tuple(audits),
        tail_bound=tail_deficit(r2, cutoff),
    )
