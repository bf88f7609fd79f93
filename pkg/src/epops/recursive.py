"""Round-by-round probabilistic conversion driven by the ratio table.

Each round applies the best fidelity-first filter to whatever the previous
round left behind.  Round k erodes exactly the sectors whose input/target
weight ratio sits in the k-th ratio group, so after L rounds (L the number
of distinct ratios) nothing is left to remove and the protocol terminates.

The round fidelity is the target weight remaining on the uneroded
spectrum, and the round success probability is the ratio increment
r_k - r_{k-1} times that fidelity.  Cumulative quantities follow by
weighted averaging; a telescoping identity gives the cumulative success
probability in closed form, which `closed_form_probability` exposes so the
two routes can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Tuple

from .errors import RoundOutOfRange
from .spectra import (
    RATIO_TOLERANCE,
    EnergyProfile,
    RatioTable,
    _assemble,
    ratio_table,
)


@dataclass(frozen=True)
class ProtocolRound:
    """One protocol round: its fidelity, probability, filter, and output.

    ``kraus`` maps each input sector to the round's filter weight m_E:
    zero on sectors eroded by earlier rounds, (r_k - r_{k-1}) q_E / p_E on
    the rest.
    """

    k: int
    fidelity: float
    probability: float
    kraus: Mapping[int, float]
    output: EnergyProfile


@dataclass(frozen=True)
class ProtocolRun:
    """A protocol execution: the ratio table and the first K rounds."""

    input: EnergyProfile
    target: EnergyProfile
    table: RatioTable
    rounds: Tuple[ProtocolRound, ...]

    @property
    def terminated(self) -> bool:
        """True when every distinct ratio has had its round."""
        return len(self.rounds) == self.table.length

    def closed_form_probability(self, T: int) -> float:
        """Cumulative success probability via the telescoped form.

        Equals the eroded input weight p(U_{T-1}) plus r_T times the T-th
        round fidelity.  Agrees with summing round probabilities to within
        1e-10; both are kept so tests can compare the routes.
        """
        if not 1 <= T <= len(self.rounds):
            raise RoundOutOfRange(f"T={T} outside 1..{len(self.rounds)}")
        eroded = self.table.union_before(T)
        p_eroded = math.fsum(self.input.weight(i) for i in eroded)
        return p_eroded + self.table.ratios[T - 1] * self.rounds[T - 1].fidelity


def run_protocol(
    p: EnergyProfile,
    q: EnergyProfile,
    K: int,
    tolerance: float = RATIO_TOLERANCE,
) -> ProtocolRun:
    """Execute min(K, L) rounds of the recursive conversion protocol.

    Round k transmits the previously eroded sectors untouched and filters
    the remainder down by r_k q_E / p_E relative to the original weights,
    which erodes the k-th ratio group completely.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    table = ratio_table(p, q, tol=tolerance)
    rounds = []
    previous_ratio = 0.0
    for k in range(1, min(K, table.length) + 1):
        eroded = set(table.union_before(k))
        active = [i for i in p.support if i not in eroded]
        fidelity = math.fsum(q.weight(i) for i in active)
        increment = table.ratios[k - 1] - previous_ratio
        probability = increment * fidelity
        kraus = {}
        for i in p.support:
            if i in eroded:
                kraus[i] = 0.0
            else:
                kraus[i] = increment * q.weight(i) / p.weight(i)
        active_set = set(active)
        output = _assemble(
            [
                (label.index, label.value, w / fidelity)
                for label, w in q.entries
                if label.index in active_set
            ],
            0.0,
        )
        rounds.append(
            ProtocolRound(
                k=k,
                fidelity=fidelity,
                probability=probability,
                kraus=kraus,
                output=output,
            )
        )
        previous_ratio = table.ratios[k - 1]
    return ProtocolRun(input=p, target=q, table=table, rounds=tuple(rounds))


def cumulative(run: ProtocolRun, T: int) -> Tuple[float, float]:
    """Success probability and fidelity after keeping rounds 1..T.

    The probability sums the round probabilities; the fidelity is the
    probability-weighted average of the round fidelities.
    """
    if not 1 <= T <= len(run.rounds):
        raise RoundOutOfRange(f"T={T} outside 1..{len(run.rounds)}")
    probs = [r.probability for r in run.rounds[:T]]
    p_succ = math.fsum(probs)
    fidelity = math.fsum(
        r.probability * r.fidelity for r in run.rounds[:T]
    ) / p_succ
    return p_succ, fidelity


def termination_time(
    p: EnergyProfile, q: EnergyProfile, tolerance: float = RATIO_TOLERANCE
) -> int:
    """Number of rounds until nothing is left to erode."""
    return ratio_table(p, q, tol=tolerance).length
