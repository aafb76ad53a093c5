"""Reduced states of the leading block of sites and their equilibration.

The subsystem S is always sites 0..N_S-1 (the low bits of each mask).
Inside a fixed-magnetization sector the reduced density matrix is block
diagonal in the subsystem magnetization: configurations a and b of S can
only be coherent when they hold the same number of up spins, because the
environment parts then live in the same occupation class. All the heavy
sampling code works on those blocks and never materializes full-space
objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import SectorBasis
from .quench import QuenchState

MAX_SUBSYSTEM_SITES = 13  # 2^13 x 2^13 reduced matrices are the practical ceiling


@dataclass(frozen=True, eq=False)
class ReducedState:
    """Hermitian reduced density matrix on 2^{n_subsystem} configurations."""

    matrix: np.ndarray = field(repr=False)
    n_subsystem: int

    @property
    def dim_s(self) -> int:
        return 2 ** self.n_subsystem

    @property
    def trace(self) -> float:
        return float(self.matrix.trace().real)

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())


def _popcount(x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape, dtype=np.int64)
    v = x.astype(np.uint64).copy()
    while v.any():
        out += (v & np.uint64(1)).astype(np.int64)
        v >>= np.uint64(1)
    return out


class SubsystemSplit:
    """Index bookkeeping for splitting sector states into (S, environment).

    For each subsystem occupation w, ``perm[w]`` reorders sector indices
    into an (a, e) grid: subsystem configs with popcount w (ascending)
    by environment masks with popcount n_up - w (ascending).
    """

    def __init__(self, basis: SectorBasis, n_subsystem: int):
        if n_subsystem > basis.n_sites:
            raise ValueError(
                f"subsystem of {n_subsystem} sites exceeds the {basis.n_sites}-site ring")
        if n_subsystem > MAX_SUBSYSTEM_SITES:
            raise ValueError(
                f"subsystem of {n_subsystem} sites is past the dense reduced-state cap "
                f"({MAX_SUBSYSTEM_SITES})")
        self.basis = basis
        self.n_s = n_subsystem
        self.n_env = basis.n_sites - n_subsystem
        self.d_s = 2 ** n_subsystem

        states = basis.states
        a = (states & np.uint64(self.d_s - 1)).astype(np.int64)
        e = (states >> np.uint64(n_subsystem)).astype(np.int64)
        w = _popcount(a)

        self.weights = []        # subsystem occupations present in the sector
        self.sub_configs = {}    # w -> ascending subsystem configs
        self.perm = {}           # w -> sector indices as an (n_a, n_e) grid
        for wv in range(min(n_subsystem, basis.n_up) + 1):
            sel = np.nonzero(w == wv)[0]
            if len(sel) == 0:
                continue
            order = np.lexsort((e[sel], a[sel]))
            sel = sel[order]
            configs = np.unique(a[sel])
            n_a = len(configs)
            n_e = len(sel) // n_a
            self.weights.append(wv)
            self.sub_configs[wv] = configs
            self.perm[wv] = sel.reshape(n_a, n_e)

    def scatter(self, psi: np.ndarray, w: int) -> np.ndarray:
        """Amplitude matrix (subsystem config x environment state) at occupation w."""
        return psi[self.perm[w]]

    def assemble(self, blocks: dict) -> np.ndarray:
        """Dense d_S x d_S complex matrix from per-occupation blocks."""
        out = np.zeros((self.d_s, self.d_s), dtype=complex)
        for w, block in blocks.items():
            ix = np.ix_(self.sub_configs[w], self.sub_configs[w])
            out[ix] = block
        return out


def partial_trace(psi: np.ndarray, basis: SectorBasis, n_subsystem: int) -> ReducedState:
    """rho_S = Tr_env |psi><psi| for a sector-basis state vector."""
    psi = np.asarray(psi)
    if psi.shape[0] != basis.dim:
        raise ValueError(f"state length {psi.shape[0]} != sector dim {basis.dim}")
    split = SubsystemSplit(basis, n_subsystem)
    blocks = {}
    for w in split.weights:
        amp = split.scatter(psi, w)
        blocks[w] = amp @ amp.conj().T
    return ReducedState(split.assemble(blocks), n_subsystem)


def _block_sums(q: QuenchState, split: SubsystemSplit):
    """Per-occupation amplitude sums over each degeneracy block.

    Returns {w: (n_a, n_e, n_blocks)} holding sum_{n in B} c_n A_n.
    The time-averaged state is then sum_B G_B G_B^T blockwise, which
    keeps coherences inside degenerate blocks and drops the rest.
    """
    groups = q.eigen.degeneracy_groups
    starts = np.array([g[0] for g in groups])
    weighted = q.eigen.vectors * q.c  # (dim, n_modes)
    # degeneracy groups are contiguous runs over the ascending energies
    summed = np.add.reduceat(weighted, starts, axis=1)  # (dim, n_blocks)
    out = {}
    for w in split.weights:
        n_a, n_e = split.perm[w].shape
        out[w] = summed[split.perm[w].ravel()].reshape(n_a, n_e, summed.shape[1])
    return out


def average_reduced_state(q: QuenchState, basis: SectorBasis,
                          n_subsystem: int) -> ReducedState:
    """Time-averaged rho_S: dephased across blocks, coherent inside them."""
    split = SubsystemSplit(basis, n_subsystem)
    sums = _block_sums(q, split)
    blocks = {w: np.einsum("aeB,beB->ab", g, g, optimize=True)
              for w, g in sums.items()}
    return ReducedState(split.assemble(blocks), n_subsystem)


def environment_average_purity(q: QuenchState, basis: SectorBasis,
                               n_subsystem: int) -> float:
    """Tr(rho_bar_env^2) without materializing the full averaged state.

    The environment-side average is block diagonal in environment
    occupation; its purity is the sum of squared Frobenius norms of the
    per-block Gram matrices of the block-summed amplitudes.
    """
    split = SubsystemSplit(basis, n_subsystem)
    sums = _block_sums(q, split)
    purity = 0.0
    for w, g in sums.items():
        n_a, n_e, n_b = g.shape
        x = g.transpose(0, 2, 1).reshape(n_a * n_b, n_e)
        env_block = x.T @ x
        purity += float((env_block * env_block).sum())
    return purity


def trace_distance(a: ReducedState, b: ReducedState) -> float:
    """Half the sum of |eigenvalues| of the difference (so range [0, 1])."""
    if a.matrix.shape != b.matrix.shape:
        raise ValueError("reduced states have different dimensions")
    lam = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.abs(lam).sum())


@dataclass(frozen=True, eq=False)
class ReducedSeries:
    """Aligned time samples of D_S(t) and m_S(t) plus their analytic means."""

    ds: np.ndarray = field(repr=False)
    ms: np.ndarray = field(repr=False)
    ms_mean_analytic: float
    systematic: float   # coverage-deficit error bar on each D_S sample


def sample_reduced_series(q: QuenchState, basis: SectorBasis, n_subsystem: int,
                          times: np.ndarray, chunk: int = 512) -> ReducedSeries:
    """D_S(t) and m_S(t) on a shared time grid, chunked for dgemm speed.

    Works from the expansion in ``q`` (possibly weight-truncated): both
    rho_S(t) and rho_bar_S then carry the same coverage, their difference
    stays traceless, and the observable bound |<O(t)> - O_bar| <=
    (o_max - o_min) D_S(t) holds sample by sample at float precision.

    The mode matrix is pre-permuted into one contiguous block per
    subsystem occupation and all chunk buffers are reused, so the loop is
    two dgemms plus batched small Hermitian eigensolves per block.
    """
    times = np.asarray(times, dtype=float)
    split = SubsystemSplit(basis, n_subsystem)
    energies = q.eigen.energies
    n_modes = q.n_modes
    weighted = q.eigen.vectors * q.c  # (dim, M)
    blocks_w = {w: np.ascontiguousarray(weighted[split.perm[w].ravel(), :].T)
                for w in split.weights}  # (M, n_a*n_e) each

    sums = _block_sums(q, split)
    rho_bar = {w: np.einsum("aeB,beB->ab", g, g, optimize=True)
               for w, g in sums.items()}
    sz_vals = {w: w - n_subsystem / 2 for w in split.weights}
    ms_mean = sum(sz_vals[w] * rho_bar[w].trace() for w in split.weights)
    ms_mean = float(ms_mean) / n_subsystem

    n_t = len(times)
    chunk = min(chunk, n_t)
    # reusable chunk buffers
    phase = np.empty((chunk, n_modes))
    cos_p = np.empty((chunk, n_modes))
    sin_p = np.empty((chunk, n_modes))
    amp_c = {w: np.empty((chunk, b.shape[1])) for w, b in blocks_w.items()}
    amp_s = {w: np.empty((chunk, b.shape[1])) for w, b in blocks_w.items()}
    gram = {w: np.empty((chunk, len(split.sub_configs[w]), len(split.sub_configs[w])))
            for w in split.weights}
    cross = {w: np.empty_like(g) for w, g in gram.items()}

    ds = np.empty(n_t)
    ms = np.empty(n_t)
    for lo in range(0, n_t, chunk):
        nc = min(chunk, n_t - lo)
        np.multiply.outer(times[lo:lo + nc], energies, out=phase[:nc])
        np.cos(phase[:nc], out=cos_p[:nc])
        np.sin(phase[:nc], out=sin_p[:nc])
        abs_sum = np.zeros(nc)
        ms_sum = np.zeros(nc)
        for w in split.weights:
            n_a, n_e = split.perm[w].shape
            np.dot(cos_p[:nc], blocks_w[w], out=amp_c[w][:nc])
            np.dot(sin_p[:nc], blocks_w[w], out=amp_s[w][:nc])
            cw = amp_c[w][:nc].reshape(nc, n_a, n_e)
            sw = amp_s[w][:nc].reshape(nc, n_a, n_e)
            re = gram[w][:nc]
            np.matmul(cw, cw.transpose(0, 2, 1), out=re)
            re += np.matmul(sw, sw.transpose(0, 2, 1))
            ms_sum += sz_vals[w] * np.trace(re, axis1=1, axis2=2)
            re -= rho_bar[w]
            if n_a == 1:
                abs_sum += np.abs(re[:, 0, 0])
                continue
            im = cross[w][:nc]
            np.matmul(cw, sw.transpose(0, 2, 1), out=im)
            lam = np.linalg.eigvalsh(re + 1j * (im - im.transpose(0, 2, 1)))
            abs_sum += np.abs(lam).sum(axis=1)
        ds[lo:lo + nc] = 0.5 * abs_sum
        ms[lo:lo + nc] = ms_sum / n_subsystem
    return ReducedSeries(ds, ms, ms_mean, systematic=2.0 * q.coverage_deficit)


@dataclass(frozen=True)
class ObservableSeries:
    """A sampled observable with its spectral range and analytic mean."""

    name: str
    samples: np.ndarray = field(repr=False)
    mean_analytic: float = 0.0
    o_min: float = 0.0
    o_max: float = 1.0


@dataclass(frozen=True)
class BoundsReport:
    """Every equilibration bound the run can check, with outcomes."""

    le_mean: float
    d_eff: float
    ds_mean: float
    markov_curve: list          # (epsilon, empirical prob, bound)
    winter_lhs: float
    winter_mid: float
    winter_rhs: float
    eq4_checks: list            # per-observable dicts
    applicable: bool            # False when a populated block is degenerate
    ds_systematic: float = 0.0

    @property
    def markov_ok(self) -> bool:
        return all(prob <= bound + 1e-12 for _, prob, bound in self.markov_curve)

    @property
    def winter_ok(self) -> bool:
        if not self.applicable:
            return True
        return (self.winter_lhs <= self.winter_mid + 1e-9
                and self.winter_mid <= self.winter_rhs + 1e-9)

    def to_dict(self) -> dict:
        return {
            "le_mean": self.le_mean,
            "d_eff": self.d_eff,
            "ds_mean": self.ds_mean,
            "ds_systematic": self.ds_systematic,
            "markov_curve": [
                {"epsilon": e, "prob": p, "bound": b} for e, p, b in self.markov_curve],
            "markov_ok": self.markov_ok,
            "winter": {
                "applicable": self.applicable,
                "lhs_ds_mean": self.winter_lhs,
                "mid": self.winter_mid,
                "rhs": self.winter_rhs,
                "ok": self.winter_ok,
            },
            "eq4_checks": self.eq4_checks,
        }


def check_bounds(q: QuenchState, basis: SectorBasis, n_subsystem: int,
                 ds_samples: np.ndarray, observables=()) -> BoundsReport:
    """Markov curve, observable bound, and the subsystem-size inequalities.

    ``observables`` samples must be aligned with ``ds_samples`` (same time
    grid). The two-sided inequality chain is marked not applicable when
    the ground manifold of the evolution Hamiltonian is degenerate, since
    its proof assumes a non-degenerate ground level.
    """
    ds_samples = np.asarray(ds_samples, dtype=float)
    if ds_samples.size == 0:
        raise ValueError("ds_samples must be non-empty")
    ground_block = q.eigen.degeneracy_groups[0]
    degenerate = len(ground_block) > 1

    ds_mean = float(ds_samples.mean())
    d_s = 2 ** n_subsystem
    env_purity = environment_average_purity(q, basis, n_subsystem)
    winter_mid = 0.5 * np.sqrt(d_s * env_purity)
    winter_rhs = 0.5 * np.sqrt(d_s ** 2 * q.le_mean)

    eps_grid = sorted(set(
        [float(x) for x in np.quantile(ds_samples, [0.1, 0.25, 0.5, 0.75, 0.9, 0.99])
         if x > 0]
        + [ds_mean * f for f in (0.5, 1.0, 2.0, 5.0) if ds_mean > 0]))
    markov = [(eps, float((ds_samples >= eps).mean()), float(ds_mean / eps))
              for eps in eps_grid]

    eq4 = []
    for obs in observables:
        samples = np.asarray(obs.samples, dtype=float)
        if samples.shape != ds_samples.shape:
            raise ValueError(f"observable {obs.name} not aligned with ds_samples")
        width = obs.o_max - obs.o_min
        dev = np.abs(samples - obs.mean_analytic)
        violation = float((dev - width * ds_samples).max())
        eq4.append({
            "name": obs.name,
            "width": width,
            "max_deviation": float(dev.max()),
            "max_violation": violation,
            "ok": bool(violation <= 1e-9),
        })

    return BoundsReport(
        le_mean=q.le_mean,
        d_eff=q.d_eff,
        ds_mean=ds_mean,
        markov_curve=markov,
        winter_lhs=ds_mean,
        winter_mid=float(winter_mid),
        winter_rhs=float(winter_rhs),
        eq4_checks=eq4,
        applicable=not degenerate,
        ds_systematic=2.0 * q.coverage_deficit,
    )
