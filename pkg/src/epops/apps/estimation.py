"""Phase estimation gain of clock states under probabilistic filtering.

The average estimation gain (1 + cos(error))/2 of a state with
nonnegative amplitudes a_n on consecutive number sectors is
1/2 + 1/2 sum a_n a_{n+1}, so every tradeoff computed by the protocol
engine translates directly into a gain-versus-probability curve.  Two
input families are supported: the maximally coherent (flat) state and the
symmetric ensemble of N qubits; both are steered toward the sine state of
matching range, whose gain is optimal for its size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from ..channels import filter_success_probability
from ..coarse import coarse_filter
from ..errors import NotNormalized, NotOdd
from ..recursive import cumulative, run_protocol
from ..spectra import EnergyProfile, _assemble, sine_profile, uniform_profile

_NORM_TOL = 1e-10

MODES = ("maxcoh", "qubits")


@dataclass(frozen=True)
class GainPoint:
    """Estimation gain after T rounds, averaged and coarse-grained."""

    T: int
    p_succ: float
    gain_recursive: float
    gain_coarse: float


def holevo_gain(amplitudes: Sequence[float]) -> float:
    """Average gain of a phase estimate from consecutive-sector amplitudes.

    ``amplitudes`` are the nonnegative amplitudes a_n on a dense run of
    number sectors (insert zeros for missing sectors); their squares must
    sum to one within 1e-10.
    """
    a = np.asarray(amplitudes, dtype=float)
    if a.size == 0:
        raise NotNormalized("no amplitudes given")
    if (a < -1e-12).any():
        raise ValueError("amplitudes must be nonnegative")
    total = float((a * a).sum())
    if abs(total - 1.0) > _NORM_TOL:
        raise NotNormalized(f"squared amplitudes sum to {total}, expected 1")
    return 0.5 + 0.5 * float((a[:-1] * a[1:]).sum())


def _dense_amplitudes(profile: EnergyProfile) -> np.ndarray:
    lo, hi = profile.support[0], profile.support[-1]
    a = np.zeros(hi - lo + 1)
    for i, w in profile.as_dict().items():
        a[i - lo] = math.sqrt(w)
    return a


def _qubit_ensemble_profile(N: int) -> EnergyProfile:
    # Excitation numbers of N symmetric qubits prepared along x.
    ns = np.arange(N + 1)
    logw = gammaln(N + 1) - gammaln(ns + 1) - gammaln(N - ns + 1) - N * math.log(2.0)
    weights = np.exp(logw)
    weights /= weights.sum()
    return _assemble(
        ((int(n), float(n), float(w)) for n, w in zip(ns, weights)), 0.0
    )


def estimation_profiles(mode: str, N: int) -> Tuple[EnergyProfile, EnergyProfile]:
    """Input and target profiles of an estimation mode.

    ``maxcoh`` filters the flat N-level clock toward the sine state on
    1..N-1; ``qubits`` filters the binomial excitation profile of N
    qubits toward the sine state on 1..N.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    if mode == "maxcoh":
        return uniform_profile(N), sine_profile(N - 1)
    if mode == "qubits":
        return _qubit_ensemble_profile(N), sine_profile(N)
    raise ValueError(f"unknown estimation mode {mode!r}; pick one of {MODES}")


def deterministic_gain(mode: str, N: int) -> float:
    """Gain of the unfiltered input state (1 - 1/(2N) for ``maxcoh``)."""
    p, _ = estimation_profiles(mode, N)
    return holevo_gain(_dense_amplitudes(p))


def estimation_tradeoff(mode: str, N: int, K: int) -> List[GainPoint]:
    """Gain against success probability for T = 1..min(K, L) rounds.

    The recursive column averages the per-round output gains with the
    round probabilities; the coarse column evaluates the gain of the
    merged filter's output state directly.
    """
    p, q = estimation_profiles(mode, N)
    run = run_protocol(p, q, K)
    round_gains = [holevo_gain(_dense_amplitudes(r.output)) for r in run.rounds]
    points = []
    for T in range(1, len(run.rounds) + 1):
        p_succ, _ = cumulative(run, T)
        averaged = (
            math.fsum(
                r.probability * g
                for r, g in zip(run.rounds[:T], round_gains[:T])
            )
            / p_succ
        )
        merged = coarse_filter(run, T)
        merged_p = filter_success_probability(p, merged)
        coarse_amplitudes = _filtered_amplitudes(p, merged, merged_p)
        points.append(
            GainPoint(
                T=T,
                p_succ=p_succ,
                gain_recursive=averaged,
                gain_coarse=holevo_gain(coarse_amplitudes),
            )
        )
    return points


def _filtered_amplitudes(
    p: EnergyProfile, merged, p_succ: float
) -> np.ndarray:
    lo, hi = p.support[0], p.support[-1]
    a = np.zeros(hi - lo + 1)
    for i in p.support:
        a[i - lo] = math.sqrt(p.weight(i) * merged.coefficient(i) / p_succ)
    return a


def asymptotic_gain(N: int, T: int) -> Tuple[float, float]:
    """Large-N expansion of the ``maxcoh`` tradeoff after T rounds.

    Returns the predicted cumulative gain and success probability
    through third order in 1/N, leaving O((T/N)^4-scale) remainders.
    Round k > 1 succeeds with probability of order (k-1)/N^2 while its
    output gain deficit stays at order 1/N, so the success probability
    grows quadratically with T but the quadratic terms cancel in the
    probability-weighted gain, which stays at the round-one value
    1 - pi^2/(4N^2) up to a cubic correction.  The pairing of sectors
    n and N-n that underlies the expansion needs an odd level count.
    """
    if N < 1 or T < 1:
        raise ValueError("N and T must be positive")
    if T >= N:
        raise ValueError("the expansion needs T well below N")
    if N % 2 == 0:
        raise NotOdd("the level count N must be odd")
    pi2 = math.pi * math.pi
    scale = pi2 / (N * N)
    cubic = pi2 / (N * N * N)
    gain = 1.0 - 0.25 * scale - cubic * T * (T - 1)
    probability = (
        0.5
        + scale * (0.5 * T * (T - 1) + 0.125)
        - cubic * (2.0 / 3.0) * T * (T - 1) * (2 * T - 1)
    )
    return gain, probability
