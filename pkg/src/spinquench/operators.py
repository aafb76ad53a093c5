"""J1-J2 Heisenberg ring with a local field, as sparse sector operators.

The Hamiltonian is

    H = sum_j [ J1 S_j.S_{j+1} + J2 S_j.S_{j+2} ] - h_s * sum_{j in S} S_j^z

with periodic boundaries (site indices mod N) and S a block of
contiguous sites. Spin-1/2 convention S^z = +-1/2, so each exchange bond
contributes +-1/4 on the diagonal and 1/2 on the flip-flop off-diagonal.
Everything conserves total magnetization, so operators are built inside
one SectorBasis and never leave it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .basis import SectorBasis


@dataclass(frozen=True)
class ModelParams:
    """Couplings, local field and subsystem geometry for one ring."""

    n_sites: int
    n_subsystem: int
    j1: float = 1.0
    j2: float = 0.0
    h_s: float = 0.0
    subsystem_offset: int = 0  # first subsystem site; pure gauge at h=0

    def __post_init__(self):
        if self.n_subsystem < 1 or self.n_subsystem > self.n_sites:
            raise ValueError(
                f"n_subsystem must be in [1, {self.n_sites}], got {self.n_subsystem}")
        if self.j1 <= 0:
            warnings.warn("j1 <= 0: outside the antiferromagnetic regime this "
                          "model targets", stacklevel=2)

    @property
    def subsystem_sites(self) -> tuple:
        n = self.n_sites
        return tuple((self.subsystem_offset + i) % n for i in range(self.n_subsystem))

    def with_field(self, h_s: float) -> "ModelParams":
        return ModelParams(self.n_sites, self.n_subsystem, self.j1, self.j2,
                           h_s, self.subsystem_offset)

    def complement(self) -> "ModelParams":
        """Same ring, but the field region swapped to the complement of S."""
        return ModelParams(self.n_sites, self.n_sites - self.n_subsystem,
                           self.j1, self.j2, self.h_s,
                           (self.subsystem_offset + self.n_subsystem) % self.n_sites)


@dataclass(frozen=True)
class SparseOperator:
    """Real symmetric operator in a fixed sector basis (CSR storage)."""

    matrix: sp.csr_matrix = field(repr=False)
    basis_tag: str

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def basis_tag(basis: SectorBasis) -> str:
    return f"N{basis.n_sites}nup{basis.n_up}"


def _check_pair(params: ModelParams, basis: SectorBasis):
    if params.n_sites != basis.n_sites:
        raise ValueError(
            f"params.n_sites={params.n_sites} does not match basis.n_sites={basis.n_sites}")


def _bond_terms(states, a: int, b: int, coupling: float):
    """Diagonal and flip-flop contributions of one exchange bond (a, b)."""
    bits_a = (states >> np.uint64(a)) & np.uint64(1)
    bits_b = (states >> np.uint64(b)) & np.uint64(1)
    same = bits_a == bits_b
    diag = np.where(same, 0.25 * coupling, -0.25 * coupling)
    flip_rows = np.nonzero(~same)[0]
    flipped = states[flip_rows] ^ np.uint64((1 << a) | (1 << b))
    flip_cols = np.searchsorted(states, flipped)
    return diag, flip_rows, flip_cols


def build_hamiltonian(params: ModelParams, basis: SectorBasis) -> SparseOperator:
    """Assemble Eq.-style H in the sector; symmetric by construction.

    The ring sums run literally over j = 0..N-1 for both coupling ranges,
    so N >= 4 is required (below that the {j, j+2 mod N} pairs collapse
    and the sum double-counts bonds in a way nothing downstream expects).
    """
    _check_pair(params, basis)
    n = params.n_sites
    if n < 4:
        raise ValueError(f"build_hamiltonian requires n_sites >= 4, got {n}")

    states = basis.states
    dim = basis.dim
    diag = np.zeros(dim)
    rows_list, cols_list, vals_list = [], [], []

    bonds = [(j, (j + 1) % n, params.j1) for j in range(n)]
    bonds += [(j, (j + 2) % n, params.j2) for j in range(n)]
    for a, b, coupling in bonds:
        if coupling == 0.0:
            continue
        bond_diag, flip_rows, flip_cols = _bond_terms(states, a, b, coupling)
        diag += bond_diag
        rows_list.append(flip_rows)
        cols_list.append(flip_cols)
        vals_list.append(np.full(len(flip_rows), 0.5 * coupling))

    if params.h_s != 0.0:
        # accumulate the Zeeman diagonal exactly like build_subsystem_sz,
        # then apply it in one shot: H(h) == H(0) - h * S_S^z entrywise
        zeeman = np.zeros(dim)
        for j in params.subsystem_sites:
            bits = ((states >> np.uint64(j)) & np.uint64(1)).astype(np.float64)
            zeeman += bits - 0.5
        diag = diag - params.h_s * zeeman

    rows = np.concatenate([np.arange(dim)] + rows_list)
    cols = np.concatenate([np.arange(dim)] + cols_list)
    vals = np.concatenate([diag] + vals_list)
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return SparseOperator(mat, basis_tag(basis))


def build_subsystem_sz(params: ModelParams, basis: SectorBasis) -> SparseOperator:
    """Diagonal operator sum_{j in S} S_j^z in the sector basis."""
    _check_pair(params, basis)
    states = basis.states
    diag = np.zeros(basis.dim)
    for j in params.subsystem_sites:
        bits = ((states >> np.uint64(j)) & np.uint64(1)).astype(np.float64)
        diag += bits - 0.5
    mat = sp.diags(diag, format="csr")
    return SparseOperator(mat, basis_tag(basis))


def apply(op: SparseOperator, v: np.ndarray) -> np.ndarray:
    """Matrix-vector product op @ v."""
    if v.shape[0] != op.dim:
        raise ValueError(f"vector length {v.shape[0]} != operator dim {op.dim}")
    return op.matrix @ v
