"""Post-quench expansion of an initial state and the observables built on it.

Everything here assumes the pre- and post-quench Hamiltonians are real
symmetric in the same sector basis, so overlaps c_n = <n|psi_0> are real
and complex numbers only enter through the phases exp(-i E_n t).
Degenerate levels are handled per block: inside a block all phases agree,
so for the Loschmidt echo only the block-total weight matters, while
time-averaged states keep the intra-block coherences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import ModelParams, SparseOperator
from .spectral import EigenData, group_degeneracies

COVERAGE_FLOOR = 1.0 - 1e-4  # default truncation gate on sum(p_n)


class TruncationError(RuntimeError):
    """Computed eigenpairs carry too little of the initial state."""

    def __init__(self, coverage, floor):
        super().__init__(
            f"expansion coverage sum(p_n) = {coverage:.6g} below the gate "
            f"{floor:.6g}; compute more eigenpairs or opt into renormalized "
            f"truncation")
        self.coverage = coverage
        self.floor = floor


@dataclass(frozen=True)
class QuenchSpec:
    """Pre/post parameter pair; only the local field changes."""

    pre: ModelParams
    post: ModelParams

    def __post_init__(self):
        a, b = self.pre, self.post
        same = (a.n_sites == b.n_sites and a.n_subsystem == b.n_subsystem
                and a.j1 == b.j1 and a.j2 == b.j2
                and a.subsystem_offset == b.subsystem_offset)
        if not same:
            raise ValueError("pre and post parameters may differ only in h_s")

    @property
    def is_identity(self) -> bool:
        return self.pre.h_s == self.post.h_s


@dataclass(frozen=True)
class QuenchState:
    """Overlap expansion of psi_0 in the post-quench eigenbasis."""

    eigen: EigenData = field(repr=False)
    psi0: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)   # real overlaps, one per computed pair
    p: np.ndarray = field(repr=False)   # weights c^2
    coverage: float
    le_mean: float                      # sum over blocks of (block weight)^2
    renormalized: bool = False

    @property
    def coverage_deficit(self) -> float:
        return 1.0 - self.coverage

    @property
    def d_eff(self) -> float:
        return 1.0 / self.le_mean

    @property
    def n_modes(self) -> int:
        return len(self.c)

    def block_weights(self) -> np.ndarray:
        return np.array([self.p[g].sum() for g in self.eigen.degeneracy_groups])

    def block_energies(self) -> np.ndarray:
        return self.eigen.block_energies()


def _block_le_mean(p: np.ndarray, groups) -> float:
    return float(sum(float(p[g].sum()) ** 2 for g in groups))


def compute_weights(psi0: np.ndarray, eigen: EigenData,
                    coverage_floor: float = COVERAGE_FLOOR,
                    renormalize: bool = False) -> QuenchState:
    """Expand psi_0 over the computed eigenpairs and gate on coverage.

    Below the gate this raises TruncationError unless ``renormalize`` is
    set, in which case the retained expansion is rescaled to unit norm
    and the deficit stays on record via ``coverage``.
    """
    psi0 = np.asarray(psi0, dtype=float)
    if psi0.shape[0] != eigen.vectors.shape[0]:
        raise ValueError(
            f"psi0 length {psi0.shape[0]} != eigenvector length {eigen.vectors.shape[0]}")
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"psi0 must be normalized, |psi0| = {nrm:.15g}")

    c = eigen.vectors.T @ psi0
    p = c * c
    coverage = float(p.sum())
    renormalized = False
    if coverage < coverage_floor:
        if not renormalize:
            raise TruncationError(coverage, coverage_floor)
        c = c / np.sqrt(coverage)
        p = c * c
        renormalized = True
    le_mean = _block_le_mean(p, eigen.degeneracy_groups)
    return QuenchState(eigen, psi0, c, p, coverage, le_mean, renormalized)


def truncate_by_weight(q: QuenchState, target_coverage: float = COVERAGE_FLOOR,
                       max_modes: int = None) -> QuenchState:
    """Keep the heaviest degeneracy blocks until they carry the target weight.

    Blocks are kept whole so intra-block coherences survive. The result
    is NOT renormalized; its coverage records the deficit, which bounds
    the systematic error of anything sampled from it.
    """
    groups = q.eigen.degeneracy_groups
    weights = np.array([q.p[g].sum() for g in groups])
    order = np.argsort(-weights, kind="stable")
    kept_groups, acc, n_modes = [], 0.0, 0
    for gi in order:
        kept_groups.append(gi)
        acc += weights[gi]
        n_modes += len(groups[gi])
        if acc >= target_coverage:
            break
        if max_modes is not None and n_modes >= max_modes:
            break
    idx = np.sort(np.concatenate([groups[gi] for gi in kept_groups]))
    sub_energies = q.eigen.energies[idx]
    sub_vectors = q.eigen.vectors[:, idx]
    sub = EigenData(sub_energies, sub_vectors, q.eigen.method_tag,
                    group_degeneracies(sub_energies))
    c = q.c[idx]
    p = c * c
    return QuenchState(sub, q.psi0, c, p, float(p.sum()),
                       _block_le_mean(p, sub.degeneracy_groups), q.renormalized)


def evolve_state(q: QuenchState, t: float) -> np.ndarray:
    """|psi(t)> = sum_n c_n exp(-i E_n t) |n>, in the sector basis."""
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    phases = np.exp(-1j * q.eigen.energies * t)
    return q.eigen.vectors @ (q.c * phases)


def loschmidt_echo(q: QuenchState, t: float) -> float:
    """|<psi_0|psi(t)>|^2 from the block-weight cosine expansion."""
    return float(le_series(q, np.array([t]))[0])


def le_series(q: QuenchState, times: np.ndarray, chunk: int = 65536) -> np.ndarray:
    """Loschmidt echo at many times; block weights share one phase each."""
    times = np.asarray(times, dtype=float)
    pb = q.block_weights()
    eb = q.block_energies()
    out = np.empty(len(times))
    for lo in range(0, len(times), chunk):
        ts = times[lo:lo + chunk]
        z = np.exp(-1j * np.outer(ts, eb)) @ pb
        out[lo:lo + chunk] = z.real ** 2 + z.imag ** 2
    return out


def _matrix_elements(q: QuenchState, op: SparseOperator) -> np.ndarray:
    """<n|op|m> over computed eigenpairs, cached per (state, operator)."""
    cache = getattr(q, "_op_cache", None)
    if cache is None:
        cache = {}
        object.__setattr__(q, "_op_cache", cache)
    key = id(op)
    hit = cache.get(key)
    if hit is not None and hit[0] is op:
        return hit[1]
    if op.dim != q.eigen.vectors.shape[0]:
        raise ValueError("operator dimension does not match the eigenbasis")
    o_eig = q.eigen.vectors.T @ (op.matrix @ q.eigen.vectors)
    cache[key] = (op, o_eig)
    return o_eig


def observable_expectation(q: QuenchState, op: SparseOperator, t: float) -> float:
    """<psi(t)|op|psi(t)>; matrix elements are built once per operator."""
    o_eig = _matrix_elements(q, op)
    u = q.c * np.exp(-1j * q.eigen.energies * t)
    val = np.vdot(u, o_eig @ u)
    return float(val.real)


def observable_mean(q: QuenchState, op: SparseOperator) -> float:
    """Infinite-time average of <op>: diagonal terms plus intra-block cross terms."""
    o_eig = _matrix_elements(q, op)
    total = 0.0
    for g in q.eigen.degeneracy_groups:
        cg = q.c[g]
        total += float(cg @ o_eig[np.ix_(g, g)] @ cg)
    return total


def minimum_populated_gap(q: QuenchState, weight_floor: float = 1e-8):
    """Smallest nonzero energy gap among blocks carrying real weight.

    None when fewer than two blocks are populated (identity quench).
    """
    pb = q.block_weights()
    eb = q.block_energies()
    es = np.sort(eb[pb > weight_floor])
    if len(es) < 2:
        return None
    return float(np.diff(es).min())
