"""Fixed-magnetization sector bases for spin-1/2 rings.

Basis states are bitmasks: bit j set means spin j is up (S_j^z = +1/2).
Sites are numbered 0..N-1. A sector collects every N-bit mask with a
fixed number of up spins, ordered by ascending integer value so that
indices are reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

MAX_SITES = 30  # practical cap: 2^30 masks is already past desk scale


@dataclass(frozen=True)
class SectorBasis:
    """Ordered basis of one total-magnetization sector.

    states[i] is the i-th mask in ascending order; lookup is O(log dim)
    via binary search on the sorted mask array.
    """

    n_sites: int
    n_up: int
    states: np.ndarray  # sorted uint64 masks

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def total_sz(self) -> float:
        return self.n_up - self.n_sites / 2

    def index_of(self, mask: int):
        """Ordinal of ``mask`` in this sector, or None if not a member."""
        i = int(np.searchsorted(self.states, mask))
        if i < len(self.states) and int(self.states[i]) == int(mask):
            return i
        return None


def enumerate_sector(n_sites: int, n_up: int) -> SectorBasis:
    """Enumerate all n_sites-bit masks with exactly n_up bits set.

    Masks come out in ascending integer order and there are
    binomial(n_sites, n_up) of them.
    """
    if not (isinstance(n_sites, (int, np.integer)) and isinstance(n_up, (int, np.integer))):
        raise ValueError("n_sites and n_up must be integers")
    if n_sites < 2 or n_sites > MAX_SITES:
        raise ValueError(f"n_sites must be in [2, {MAX_SITES}], got {n_sites}")
    if n_up < 0 or n_up > n_sites:
        raise ValueError(f"n_up must be in [0, {n_sites}], got {n_up}")

    dim = comb(n_sites, n_up)
    states = np.empty(dim, dtype=np.uint64)
    if n_up == 0:
        states[0] = 0
        return SectorBasis(n_sites, n_up, states)

    # Gosper's hack: next integer with the same popcount.
    v = (1 << n_up) - 1
    for i in range(dim):
        states[i] = v
        lo = v & -v
        ripple = v + lo
        v = ripple | (((v ^ ripple) >> 2) // lo)
    return SectorBasis(n_sites, n_up, states)


def lookup(basis: SectorBasis, mask: int):
    """Index of mask in the sector, or None when absent."""
    return basis.index_of(mask)
