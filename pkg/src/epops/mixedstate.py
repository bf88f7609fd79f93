"""Mixed input states: block densities, fidelity bounds, and purification.

A mixed input is described by its sector blocks rho_{E,E'}.  The best
deterministic alignment fidelity to a pure target with weights q_E is
bounded by sum sqrt(q_E q_E') ||rho_{E,E'}||_1, and the bound is attained
exactly when every block is positive semidefinite in a common sector
basis.  Dropping the trace-preservation requirement, the best fidelity at
any nonzero success probability is the top eigenvalue of an alignment
matrix assembled from whitened blocks, and the largest probability
attaining it follows from the top eigenspace.

The concrete application is purifying N thermal spin-1/2 copies toward a
coherent two-level target: collective rotations leave total angular
momentum blocks invariant, so everything reduces to small per-l matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    DisjointSpectra,
    NotBlockPositive,
    NotOdd,
    TooLarge,
)
from .spectra import EnergyLabel, EnergyProfile, build_profile

_HERMITICITY_TOL = 1e-10
_TRACE_TOL = 1e-10
_SUPPORT_CUT = 1e-12
_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class BlockDensity:
    """A density matrix stored as sector blocks.

    ``sectors`` holds (label, dimension) pairs in increasing label order;
    ``blocks`` maps (row label index, column label index) to the
    corresponding block.  Only one of (i, j) / (j, i) needs to be stored;
    the other is the conjugate transpose.  The assembled matrix must be
    Hermitian, positive semidefinite within 1e-10, and of unit trace.
    """

    sectors: Tuple[Tuple[EnergyLabel, int], ...]
    blocks: Mapping[Tuple[int, int], np.ndarray]

    def __post_init__(self) -> None:
        indices = [label.index for label, _ in self.sectors]
        if sorted(set(indices)) != indices:
            raise DimensionMismatch("sector labels must be distinct and sorted")
        if any(d < 1 for _, d in self.sectors):
            raise DimensionMismatch("sector dimensions must be positive")
        dims = dict(self.dims_by_index())
        for (i, j), b in self.blocks.items():
            if i not in dims or j not in dims:
                raise DimensionMismatch(f"block ({i}, {j}) names an unknown sector")
            if b.shape != (dims[i], dims[j]):
                raise DimensionMismatch(
                    f"block ({i}, {j}) has shape {b.shape}, "
                    f"expected {(dims[i], dims[j])}"
                )
        full = self.assemble()
        if np.abs(full - full.conj().T).max() > _HERMITICITY_TOL:
            raise DimensionMismatch("assembled matrix is not Hermitian")
        trace = float(np.trace(full).real)
        if abs(trace - 1.0) > _TRACE_TOL:
            raise ValueError(f"assembled matrix has trace {trace}, expected 1")
        low = float(np.linalg.eigvalsh((full + full.conj().T) / 2).min())
        if low < -_TRACE_TOL:
            raise ValueError(f"assembled matrix has negative eigenvalue {low}")

    def dims_by_index(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((label.index, d) for label, d in self.sectors)

    @property
    def labels(self) -> Tuple[int, ...]:
        return tuple(label.index for label, _ in self.sectors)

    @property
    def dimension(self) -> int:
        return sum(d for _, d in self.sectors)

    def block(self, i: int, j: int) -> np.ndarray:
        dims = dict(self.dims_by_index())
        if (i, j) in self.blocks:
            return np.asarray(self.blocks[(i, j)])
        if (j, i) in self.blocks:
            return np.asarray(self.blocks[(j, i)]).conj().T
        return np.zeros((dims[i], dims[j]), dtype=complex)

    def diag_block(self, i: int) -> np.ndarray:
        return self.block(i, i)

    def sector_trace(self, i: int) -> float:
        return float(np.trace(self.diag_block(i)).real)

    def assemble(self) -> np.ndarray:
        offsets = {}
        at = 0
        for label, d in self.sectors:
            offsets[label.index] = (at, at + d)
            at += d
        full = np.zeros((at, at), dtype=complex)
        for i in self.labels:
            for j in self.labels:
                r0, r1 = offsets[i]
                c0, c1 = offsets[j]
                full[r0:r1, c0:c1] = self.block(i, j)
        return full


def block_density(
    sectors: Sequence[Tuple[int, float, int]],
    blocks: Mapping[Tuple[int, int], np.ndarray],
) -> BlockDensity:
    """Build a block density from (index, energy value, dimension) sectors."""
    secs = tuple(
        (EnergyLabel(int(i), float(v)), int(d))
        for i, v, d in sorted(sectors, key=lambda s: s[0])
    )
    cleaned = {
        (int(i), int(j)): np.asarray(b, dtype=complex) for (i, j), b in blocks.items()
    }
    return BlockDensity(sectors=secs, blocks=cleaned)


def pure_block_density(p: EnergyProfile) -> BlockDensity:
    """The rank-one block density of a pure state with profile ``p``."""
    secs = [(label.index, label.value, 1) for label, _ in p.entries]
    blocks = {}
    for i in p.support:
        for j in p.support:
            if i <= j:
                blocks[(i, j)] = np.array(
                    [[math.sqrt(p.weight(i) * p.weight(j))]], dtype=complex
                )
    return block_density(secs, blocks)


def block_density_from_matrix(
    rho: np.ndarray, sectors: Sequence[Tuple[int, float, int]]
) -> BlockDensity:
    """Slice a full density matrix into labeled sector blocks."""
    ordered = sorted(sectors, key=lambda s: s[0])
    total = sum(d for _, _, d in ordered)
    if rho.shape != (total, total):
        raise DimensionMismatch(
            f"matrix of shape {rho.shape} does not match total dimension {total}"
        )
    offsets = {}
    at = 0
    for i, _, d in ordered:
        offsets[i] = (at, at + d)
        at += d
    blocks = {}
    for i, _, _ in ordered:
        for j, _, _ in ordered:
            if i <= j:
                r0, r1 = offsets[i]
                c0, c1 = offsets[j]
                blocks[(i, j)] = np.asarray(rho[r0:r1, c0:c1], dtype=complex)
    return block_density(ordered, blocks)


def _trace_norm(block: np.ndarray) -> float:
    return float(np.linalg.svd(block, compute_uv=False).sum())


def det_fidelity_bound(rho: BlockDensity, q: EnergyProfile) -> float:
    """Upper bound on the deterministic alignment fidelity.

    Sums sqrt(q_E q_E') times the trace norm of every block; attained
    exactly when the state is block positive.
    """
    total = 0.0
    for i in rho.labels:
        qi = q.weight(i)
        if qi == 0.0:
            continue
        for j in rho.labels:
            qj = q.weight(j)
            if qj == 0.0:
                continue
            total += math.sqrt(qi * qj) * _trace_norm(rho.block(i, j))
    return total


@dataclass(frozen=True)
class BlockPositivity:
    """Outcome of the block positivity test in the stored sector bases.

    ``certified`` True means every block is, up to its leading square
    part, positive semidefinite with nothing outside that square; a False
    value is inconclusive because only the stored bases were tried.
    """

    certified: bool
    note: str


def is_block_positive(rho: BlockDensity, tol: float = 1e-10) -> BlockPositivity:
    """Test block positivity of every sector pair in the stored bases."""
    for i in rho.labels:
        for j in rho.labels:
            b = rho.block(i, j)
            s = min(b.shape)
            square = b[:s, :s]
            if b.shape[0] > s and np.abs(b[s:, :]).max() > tol:
                return BlockPositivity(
                    False,
                    f"block ({i}, {j}) has weight outside its leading square",
                )
            if b.shape[1] > s and np.abs(b[:, s:]).max() > tol:
                return BlockPositivity(
                    False,
                    f"block ({i}, {j}) has weight outside its leading square",
                )
            if np.abs(square - square.conj().T).max() > tol:
                return BlockPositivity(
                    False, f"block ({i}, {j}) is not Hermitian in the stored basis"
                )
            low = float(
                np.linalg.eigvalsh((square + square.conj().T) / 2).min()
            )
            if low < -tol:
                return BlockPositivity(
                    False,
                    f"block ({i}, {j}) has negative eigenvalue {low:.2e}",
                )
    return BlockPositivity(True, "all blocks positive in the stored bases")


def mixed_alignment_fidelity(rho: BlockDensity, q: EnergyProfile) -> float:
    """Deterministic alignment fidelity of a certified block-positive state.

    For such states the trace-norm bound is attained and every block
    contributes its leading-square trace; raises if the certificate is
    not available.
    """
    cert = is_block_positive(rho)
    if not cert.certified:
        raise NotBlockPositive(cert.note)
    total = 0.0
    for i in rho.labels:
        qi = q.weight(i)
        if qi == 0.0:
            continue
        for j in rho.labels:
            qj = q.weight(j)
            if qj == 0.0:
                continue
            b = rho.block(i, j)
            s = min(b.shape)
            total += math.sqrt(qi * qj) * float(np.trace(b[:s, :s]).real)
    return total


def _support_inverse_root(block: np.ndarray) -> np.ndarray:
    """(block^T)^(-1/2) on its numerical support."""
    sym = (block.T + block.T.conj().T) / 2
    vals, vecs = np.linalg.eigh(sym)
    cut = _SUPPORT_CUT * max(float(vals.max()), 0.0)
    inv = np.where(vals > cut, 1.0 / np.sqrt(np.where(vals > cut, vals, 1.0)), 0.0)
    return (vecs * inv) @ vecs.conj().T


@dataclass(frozen=True)
class _Alignment:
    sector_order: Tuple[int, ...]
    ranges: Dict[int, Tuple[int, int]]
    whiteners: Dict[int, np.ndarray]
    matrix: np.ndarray


def _alignment(rho: BlockDensity, q: EnergyProfile) -> _Alignment:
    order = [
        i
        for i in rho.labels
        if q.weight(i) > 0.0 and rho.sector_trace(i) > _SUPPORT_CUT
    ]
    if not order:
        raise DisjointSpectra("state and target profiles share no sector")
    dims = dict(rho.dims_by_index())
    ranges = {}
    at = 0
    for i in order:
        ranges[i] = (at, at + dims[i])
        at += dims[i]
    whiteners = {i: _support_inverse_root(rho.diag_block(i)) for i in order}
    matrix = np.zeros((at, at), dtype=complex)
    for i in order:
        for j in order:
            # Block (i, j) of the full transpose is the conjugate of the
            # stored block, not its blockwise transpose.
            k = whiteners[i] @ np.conj(rho.block(i, j)) @ whiteners[j]
            r0, r1 = ranges[i]
            c0, c1 = ranges[j]
            matrix[r0:r1, c0:c1] = math.sqrt(q.weight(i) * q.weight(j)) * k
    return _Alignment(
        sector_order=tuple(order), ranges=ranges, whiteners=whiteners, matrix=matrix
    )


def ultimate_mixed_fidelity(rho: BlockDensity, q: EnergyProfile) -> float:
    """Best fidelity at any nonzero success probability.

    Top eigenvalue of the whitened alignment matrix; reduces to the pure
    ultimate optimum when every sector is one-dimensional.
    """
    a = _alignment(rho, q)
    return float(np.linalg.eigvalsh(a.matrix).max())


@dataclass(frozen=True)
class MixedProbabilityResult:
    """Largest success probability compatible with the ultimate fidelity.

    ``exact`` is True when the top eigenspace is one-dimensional and the
    value is the true maximum; otherwise the value is the best over a
    sampled family of eigenspace states and is only a lower bound.
    """

    value: float
    fidelity: float
    exact: bool


def _probability_of(
    a: _Alignment, sigma: np.ndarray
) -> float:
    worst = np.inf
    for i in a.sector_order:
        r0, r1 = a.ranges[i]
        sub = sigma[r0:r1, r0:r1]
        if float(np.trace(sub).real) <= 1e-14:
            continue
        t = a.whiteners[i]
        stretched = t @ sub @ t
        top = float(np.linalg.eigvalsh((stretched + stretched.conj().T) / 2).max())
        if top > 0.0:
            worst = min(worst, 1.0 / top)
    return 0.0 if math.isinf(worst) else float(worst)


def ultimate_mixed_probability(
    rho: BlockDensity,
    q: EnergyProfile,
    draws: int = 1000,
    seed: int = 0,
) -> MixedProbabilityResult:
    """Probability of the ultimate fidelity point.

    With a non-degenerate top eigenvector the answer is closed-form
    (and flagged exact); a degenerate eigenspace is searched over its
    eigenprojectors, the uniform mixture, random mixtures, and random
    pure combinations, giving a certified lower bound.
    """
    a = _alignment(rho, q)
    vals, vecs = np.linalg.eigh(a.matrix)
    top = float(vals.max())
    members = np.nonzero(vals >= top * (1.0 - _DEGENERACY_TOL))[0]
    basis = vecs[:, members]
    if len(members) == 1:
        v = basis[:, 0]
        sigma = np.outer(v, v.conj())
        return MixedProbabilityResult(
            value=_probability_of(a, sigma), fidelity=top, exact=True
        )
    rng = np.random.default_rng(seed)
    d = len(members)
    candidates: List[np.ndarray] = []
    for c in range(d):
        v = basis[:, c]
        candidates.append(np.outer(v, v.conj()))
    candidates.append(basis @ basis.conj().T / d)
    for _ in range(draws // 2):
        weights = rng.dirichlet(np.ones(d))
        candidates.append((basis * weights) @ basis.conj().T)
    for _ in range(draws - draws // 2):
        coeff = rng.normal(size=d) + 1j * rng.normal(size=d)
        coeff /= np.linalg.norm(coeff)
        v = basis @ coeff
        candidates.append(np.outer(v, v.conj()))
    best = max(_probability_of(a, sigma) for sigma in candidates)
    return MixedProbabilityResult(value=best, fidelity=top, exact=False)


# --- Collective spin sectors and thermal purification -----------------------


@dataclass(frozen=True)
class SpinSector:
    """One total-angular-momentum sector of N spin-1/2 systems."""

    l: float
    multiplicity: int
    g: np.ndarray  # matrix elements of exp(2 beta Jx) / Z^N, indexed m + l

    def element(self, m: float, m2: float) -> float:
        return float(self.g[int(round(m + self.l)), int(round(m2 + self.l))])


def spin_multiplicities(N: int) -> Dict[float, int]:
    """Exact degeneracy of each total angular momentum l for odd N."""
    if N % 2 == 0:
        raise NotOdd(f"N={N} must be odd")
    out = {}
    for j in range(1, N + 1, 2):
        numerator = (2 * j + 2) * math.comb(N, (N + j) // 2)
        assert numerator % (N + j + 2) == 0
        out[j / 2] = numerator // (N + j + 2)
    return out


def spin_sector_model(N: int, beta: float) -> Tuple[SpinSector, ...]:
    """Per-l matrix elements of the thermal operator, already normalized.

    For each l the tridiagonal Jx restricted to the sector is
    exponentiated by eigendecomposition; at beta = 0 the identity is used
    directly so the off-diagonal elements vanish exactly.
    """
    if N % 2 == 0:
        raise NotOdd(f"N={N} must be odd")
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    z = 2.0 * math.cosh(beta)
    norm = z**N
    sectors = []
    for l, mult in sorted(spin_multiplicities(N).items()):
        size = int(round(2 * l)) + 1
        if beta == 0.0:
            g = np.eye(size) / norm
        else:
            jx = np.zeros((size, size))
            for a in range(size - 1):
                m = -l + a
                coupling = 0.5 * math.sqrt(l * (l + 1) - m * (m + 1))
                jx[a + 1, a] = coupling
                jx[a, a + 1] = coupling
            vals, vecs = np.linalg.eigh(jx)
            g = (vecs * np.exp(2.0 * beta * vals)) @ vecs.T / norm
        sectors.append(SpinSector(l=l, multiplicity=mult, g=g))
    return tuple(sectors)


def coherent_target_profile() -> EnergyProfile:
    """Equal-weight two-level target, sectors labeled 2m for m = +-1/2."""
    return build_profile([(-1, -0.5, 0.5), (1, 0.5, 0.5)])


def thermal_spin_block_density(N: int, beta: float) -> BlockDensity:
    """The thermal N-spin state as an explicit block density.

    Sectors are labeled by 2m; within a sector the basis runs over
    (l, copy) with l decreasing from N/2, so every block pair aligns
    positionally and block positivity is visible in the stored basis.
    Total dimension is 2^N, so N is capped at 9 here; the closed-form
    report has no such cap.
    """
    if N % 2 == 0:
        raise NotOdd(f"N={N} must be odd")
    if N > 9:
        raise TooLarge(f"N={N} assembles a 2^{N} dimensional matrix; cap is 9")
    sectors = spin_sector_model(N, beta)
    by_l = {s.l: s for s in sectors}
    ls = sorted(by_l, reverse=True)
    layout = []
    for twice_m in range(-N, N + 1, 2):
        m = twice_m / 2.0
        dim = sum(by_l[l].multiplicity for l in ls if l >= abs(m) - 1e-9)
        layout.append((twice_m, m, dim))
    blocks = {}
    for ti, mi, _ in layout:
        for tj, mj, _ in layout:
            if ti > tj:
                continue
            rows = [l for l in ls if l >= abs(mi) - 1e-9]
            cols = [l for l in ls if l >= abs(mj) - 1e-9]
            entries = np.zeros(
                (
                    sum(by_l[l].multiplicity for l in rows),
                    sum(by_l[l].multiplicity for l in cols),
                )
            )
            r = 0
            for lr in rows:
                c = 0
                dr = by_l[lr].multiplicity
                for lc in cols:
                    dc = by_l[lc].multiplicity
                    if lr == lc:
                        entries[r : r + dr, c : c + dc] = (
                            by_l[lr].element(mi, mj) * np.eye(dr)
                        )
                    c += dc
                r += dr
            blocks[(ti, tj)] = entries
    return block_density(layout, blocks)


@dataclass(frozen=True)
class PurificationSector:
    """Closed-form per-l data of the thermal purification."""

    l: float
    multiplicity: int
    alignment: float
    fidelity: float
    probability: float


@dataclass(frozen=True)
class PurificationReport:
    """Closed-form purification summary for N thermal spins."""

    N: int
    beta: float
    F_det: float
    F_prob: float
    p_max: float
    best_l: float
    sectors: Tuple[PurificationSector, ...]

    def to_json_dict(self) -> dict:
        return {
            "N": self.N,
            "beta": self.beta,
            "F_det": self.F_det,
            "F_prob": self.F_prob,
            "p_max": self.p_max,
            "best_l": self.best_l,
            "sectors": [
                {
                    "l": s.l,
                    "multiplicity": s.multiplicity,
                    "alignment": s.alignment,
                    "fidelity": s.fidelity,
                    "probability": s.probability,
                }
                for s in self.sectors
            ],
        }


def purification_report(N: int, beta: float) -> PurificationReport:
    """Deterministic and probabilistic purification optima for N spins.

    Works entirely in the per-l closed forms: the deterministic fidelity
    sums the four central matrix elements over sectors, the probabilistic
    optimum picks the l with the best normalized off-diagonal element,
    and its probability carries the full multiplicity of that l.  Ties in
    fidelity (within 1e-12 relative) resolve toward the larger
    probability.
    """
    if N % 2 == 0:
        raise NotOdd(f"N={N} must be odd")
    if N > 21:
        raise TooLarge(f"N={N} exceeds the supported report range (21)")
    sectors = spin_sector_model(N, beta)
    f_det = 0.0
    rows = []
    for s in sectors:
        up = s.element(0.5, 0.5)
        down = s.element(-0.5, -0.5)
        cross = s.element(0.5, -0.5)
        f_det += 0.5 * s.multiplicity * (up + 2.0 * cross + down)
        alignment = cross / math.sqrt(up * down)
        rows.append(
            PurificationSector(
                l=s.l,
                multiplicity=s.multiplicity,
                alignment=alignment,
                fidelity=(1.0 + alignment) / 2.0,
                probability=2.0 * s.multiplicity * down,
            )
        )
    best = rows[0]
    for row in rows[1:]:
        if row.fidelity > best.fidelity * (1.0 + 1e-12):
            best = row
        elif (
            abs(row.fidelity - best.fidelity) <= 1e-12 * max(best.fidelity, 1.0)
            and row.probability > best.probability
        ):
            best = row
    return PurificationReport(
        N=N,
        beta=beta,
        F_det=f_det,
        F_prob=best.fidelity,
        p_max=best.probability,
        best_l=best.l,
        sectors=tuple(rows),
    )
