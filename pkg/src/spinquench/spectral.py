"""Eigensolvers for sector operators.

Two routes: dense LAPACK diagonalization (exact, used as the oracle and
as the default whenever the sector fits in memory) and a Lanczos
iteration with full reorthogonalization for the lowest k pairs of large
sectors. Degenerate levels are grouped into blocks so downstream
averaging can keep coherences inside each block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .basis import SectorBasis, enumerate_sector
from .operators import ModelParams, SparseOperator, build_hamiltonian

DENSE_DIM_CAP = 20000
# The Majumdar-Ghosh degeneracy is exact; floating point splits it at the
# 1e-13 level while physical gaps sit around 1e-1, so anything in between
# works as the grouping tolerance.
DEGENERACY_RTOL = 1e-9


class ConvergenceError(RuntimeError):
    """Eigensolve failed to converge; carries the offending residuals."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class ResourceError(RuntimeError):
    pass


def degeneracy_tolerance(energies) -> float:
    energies = np.asarray(energies)
    spread = float(energies.max() - energies.min()) if energies.size > 1 else 0.0
    return DEGENERACY_RTOL * max(1.0, spread)


def group_degeneracies(energies: np.ndarray) -> list:
    """Partition ascending energies into blocks of equal (within tol) value."""
    tol = degeneracy_tolerance(energies)
    groups = []
    current = [0]
    for i in range(1, len(energies)):
        if energies[i] - energies[i - 1] <= tol:
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    if current:
        groups.append(current)
    return groups


@dataclass(frozen=True)
class EigenData:
    """Ascending eigenpairs of a real symmetric sector operator.

    vectors[:, n] is the (real, unit-norm) eigenvector of energies[n].
    """

    energies: np.ndarray
    vectors: np.ndarray = field(repr=False)
    method_tag: str
    degeneracy_groups: list = field(default_factory=list)

    @property
    def n_computed(self) -> int:
        return len(self.energies)

    def block_energies(self) -> np.ndarray:
        return np.array([self.energies[g[0]] for g in self.degeneracy_groups])


def _make_eigendata(energies, vectors, method_tag) -> EigenData:
    order = np.argsort(energies, kind="stable")
    energies = np.ascontiguousarray(np.asarray(energies, dtype=float)[order])
    vectors = np.ascontiguousarray(vectors[:, order])
    return EigenData(energies, vectors, method_tag, group_degeneracies(energies))


def dense_diagonalize(op: SparseOperator) -> EigenData:
    """All eigenpairs by LAPACK; guarded against blowing up memory."""
    if op.dim > DENSE_DIM_CAP:
        raise ResourceError(
            f"dense diagonalization capped at dim {DENSE_DIM_CAP}, got {op.dim}")
    dense = op.matrix.toarray()
    energies, vectors = sla.eigh(dense, overwrite_a=True, check_finite=False)
    del dense
    return _make_eigendata(energies, vectors, "dense")


def _residual_norms(op: SparseOperator, energies, vectors) -> np.ndarray:
    r = op.matrix @ vectors - vectors * energies
    return np.linalg.norm(r, axis=0)


class _Deflation:
    """Growing store of converged eigenvectors, kept orthonormal."""

    def __init__(self, dim, capacity):
        self.dim = dim
        self.v = np.empty((capacity, dim))
        self.e = np.empty(capacity)
        self.n = 0

    def grow(self, extra=16):
        self.v = np.vstack([self.v, np.empty((extra, self.dim))])
        self.e = np.concatenate([self.e, np.empty(extra)])

    def project_out(self, u):
        if self.n:
            vs = self.v[:self.n]
            u -= vs.T @ (vs @ u)
        return u

    def add(self, energy, vec):
        """Returns False when vec is already represented in the store."""
        vec = self.project_out(vec.copy())
        nrm = np.linalg.norm(vec)
        if nrm < 0.5:
            return False
        if self.n == len(self.e):
            self.grow()
        self.v[self.n] = vec / nrm
        self.e[self.n] = energy
        self.n += 1
        return True

    def drop_last(self):
        self.n -= 1

    def energies(self):
        return self.e[:self.n].copy()


def lanczos_lowest_k(op: SparseOperator, k: int, seed: int,
                     tol: float = 1e-9, max_applies: int = None) -> EigenData:
    """Lowest k eigenpairs via Lanczos with full reorthogonalization.

    Restarting with fresh random vectors (deflated against every
    converged eigenvector) resolves degenerate multiplets that a single
    Krylov sequence cannot see; a final sweep probes the orthogonal
    complement until its lowest state lies above the k-th level, so no
    multiplicity below E_{k-1} is missed. Deterministic for fixed seed.
    """
    dim = op.dim
    if k < 1 or k > dim:
        raise ValueError(f"k must be in [1, {dim}], got {k}")
    # Literal 10*k applications would starve small-k solves on large
    # sectors, hence the floor.
    if max_applies is None:
        max_applies = max(10 * k, min(dim, 600))

    rng = np.random.default_rng(seed)
    mat = op.matrix
    store = _Deflation(dim, k + 16)
    applies = 0
    restarts_left = 1

    def run_pass(want):
        """One deflated Krylov sequence; returns number of pairs banked."""
        nonlocal applies
        q0 = store.project_out(rng.standard_normal(dim))
        nrm = np.linalg.norm(q0)
        if nrm < 1e-12:
            return 0
        m_cap = min(dim - store.n, max(6 * want + 100, 200), max_applies - applies)
        if m_cap < 1:
            return 0
        Q = np.empty((m_cap, dim))
        Q[0] = q0 / nrm
        alphas = np.empty(m_cap)
        betas = np.empty(m_cap)
        m = 0
        while m < m_cap and applies < max_applies:
            u = mat @ Q[m]
            applies += 1
            alphas[m] = Q[m] @ u
            # full reorthogonalization (twice) against the Krylov block
            # and the converged store; subsumes the three-term recurrence
            for _ in range(2):
                qs = Q[:m + 1]
                u -= qs.T @ (qs @ u)
                u = store.project_out(u)
            beta = np.linalg.norm(u)
            m += 1
            if beta < 1e-13:
                break  # invariant subspace exhausted
            betas[m - 1] = beta
            if m < m_cap:
                Q[m] = u / beta
            if m >= want and m % 10 == 0 and m < m_cap:
                theta, s = sla.eigh_tridiagonal(alphas[:m], betas[:m - 1])
                est = beta * np.abs(s[-1, :want])
                if np.all(est <= 0.1 * tol * np.maximum(1.0, np.abs(theta[:want]))):
                    break
        if m == 0:
            return 0
        theta, s = sla.eigh_tridiagonal(alphas[:m], betas[:m - 1])
        take = min(want, m)
        ritz = Q[:m].T @ s[:, :take]
        res = _residual_norms(op, theta[:take], ritz)
        added = 0
        for i in range(take):
            if res[i] <= tol * max(1.0, abs(theta[i])):
                if store.add(theta[i], ritz[:, i]):
                    added += 1
        return added

    while store.n < k:
        if applies >= max_applies:
            if restarts_left > 0:
                restarts_left -= 1
                max_applies *= 2
            else:
                raise ConvergenceError(
                    f"Lanczos converged {store.n}/{k} pairs within the iteration cap",
                    residuals=_residual_norms(op, store.energies(), store.v[:store.n].T))
        stalled = run_pass(k - store.n) == 0
        if stalled and applies >= max_applies and restarts_left == 0:
            raise ConvergenceError(
                f"Lanczos stalled at {store.n}/{k} pairs",
                residuals=_residual_norms(op, store.energies(), store.v[:store.n].T))

    # Missed-multiplicity sweep over the orthogonal complement.
    for _ in range(k + 10):
        if store.n >= dim:
            break
        energies = store.energies()
        kth = np.sort(energies)[k - 1]
        max_applies += 250  # sweep budget
        if run_pass(1) == 0:
            break
        if store.e[store.n - 1] > kth + degeneracy_tolerance(store.energies()):
            store.drop_last()
            break

    energies = store.energies()
    order = np.argsort(energies, kind="stable")[:k]
    vectors = store.v[:store.n].T[:, order]
    energies = energies[order]
    res = _residual_norms(op, energies, vectors)
    bad = res > 1e-8 * np.maximum(1.0, np.abs(energies))
    if np.any(bad):
        raise ConvergenceError(
            f"{int(bad.sum())} Ritz pairs exceed the residual tolerance",
            residuals=res)
    return _make_eigendata(energies, vectors, "iterative")


@dataclass(frozen=True)
class GroundSearchResult:
    total_sz: float
    n_up: int
    energy: float
    vector: np.ndarray = field(repr=False)
    basis: SectorBasis = field(repr=False)
    per_sector: list = field(default_factory=list)  # (total_sz, n_up, E0, method)
    degenerate: bool = False


def sector_n_up(n_sites: int, total_sz) -> int:
    n_up = total_sz + n_sites / 2
    if abs(n_up - round(n_up)) > 1e-12:
        raise ValueError(f"S_tot^z={total_sz} has no integer up count at N={n_sites}")
    n_up = int(round(n_up))
    if n_up < 0 or n_up > n_sites:
        raise ValueError(f"S_tot^z={total_sz} outside the N={n_sites} ladder")
    return n_up


def ground_state_search(params: ModelParams, sectors, seed: int = 1234,
                        dense_cutoff: int = 4000) -> GroundSearchResult:
    """Lowest state across the listed S_tot^z sectors.

    Small sectors go dense, large ones Lanczos. Ties across sectors (and
    exact in-sector degeneracy) set the ``degenerate`` flag; on a tie the
    representative closest to S_tot^z = 0 wins.
    """
    sectors = list(sectors)
    if not sectors:
        raise ValueError("sectors list must be non-empty")
    per_sector = []
    candidates = []
    for sz in sectors:
        n_up = sector_n_up(params.n_sites, sz)
        basis = enumerate_sector(params.n_sites, n_up)
        h = build_hamiltonian(params, basis)
        if basis.dim <= dense_cutoff:
            eig = dense_diagonalize(h)
        else:
            eig = lanczos_lowest_k(h, min(2, basis.dim), seed)
        pair_gap = (eig.energies[1] - eig.energies[0]
                    if eig.n_computed > 1 else np.inf)
        per_sector.append((sz, n_up, float(eig.energies[0]), eig.method_tag))
        candidates.append((sz, n_up, basis, eig, pair_gap))

    energies = np.array([c[3].energies[0] for c in candidates])
    tol = degeneracy_tolerance(energies) if len(energies) > 1 else 1e-9
    tied = [c for c, e in zip(candidates, energies) if e - energies.min() <= tol]
    winner = min(tied, key=lambda c: abs(c[0]))
    in_sector_degenerate = winner[4] <= degeneracy_tolerance(winner[3].energies)
    sz, n_up, basis, eig, _ = winner
    return GroundSearchResult(sz, n_up, float(eig.energies[0]), eig.vectors[:, 0],
                              basis, per_sector,
                              degenerate=len(tied) > 1 or bool(in_sector_degenerate))


def default_scan_sectors(n_sites: int, max_abs_sz: float = 3) -> list:
    """S_tot^z values within |S_z| <= max_abs_sz that exist on the ladder."""
    out = []
    for n_up in range(n_sites + 1):
        sz = n_up - n_sites / 2
        if abs(sz) <= max_abs_sz + 1e-12:
            out.append(sz if sz % 1 else int(sz))
    return sorted(out, key=lambda s: (abs(s), -s))


def spectrum_scan(params_template: ModelParams, h_grid, n_levels: int,
                  sectors=None, seed: int = 1234, dense_cutoff: int = 4000):
    """Lowest n_levels energies vs local field, unioned over sectors.

    Default sector set is S_tot^z in {0, +-1, +-2, +-3} (clipped to the
    ladder). Returns a list of (h, [E_0..E_{n_levels-1}]) rows.
    """
    h_grid = list(h_grid)
    if not h_grid:
        raise ValueError("h_grid must be non-empty")
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    n = params_template.n_sites
    if sectors is None:
        sectors = default_scan_sectors(n)
    rows = []
    for h in h_grid:
        params = params_template.with_field(h)
        pool = []
        for sz in sectors:
            n_up = sector_n_up(n, sz)
            basis = enumerate_sector(n, n_up)
            hmat = build_hamiltonian(params, basis)
            want = min(n_levels, basis.dim)
            if basis.dim <= dense_cutoff:
                eig = dense_diagonalize(hmat)
            else:
                eig = lanczos_lowest_k(hmat, want, seed)
            pool.extend(eig.energies[:want])
        pool.sort()
        rows.append((float(h), [float(e) for e in pool[:n_levels]]))
    return rows
