"""Independent brute-force constructions used as test oracles.

Everything here works in the full 2^N space via Kronecker products, a
completely different route from the package's bitmask sector code.
Index convention matches the package: bit j of a basis index is site j,
so site 0 is the least significant factor.
"""

import numpy as np

SZ = np.diag([-0.5, 0.5])
SP = np.array([[0.0, 0.0], [1.0, 0.0]])  # raises |down> -> |up>
SM = SP.T


def local_op(op, site, n_sites):
    out = np.eye(1)
    for j in range(n_sites - 1, -1, -1):
        out = np.kron(out, op if j == site else np.eye(2))
    return out


def heisenberg_bond(a, b, n_sites):
    za = local_op(SZ, a, n_sites)
    zb = local_op(SZ, b, n_sites)
    pa = local_op(SP, a, n_sites)
    ma = local_op(SM, a, n_sites)
    pb = local_op(SP, b, n_sites)
    mb = local_op(SM, b, n_sites)
    return za @ zb + 0.5 * (pa @ mb + ma @ pb)


def full_space_hamiltonian(params):
    """Dense 2^N Hamiltonian straight from the coupling sums."""
    n = params.n_sites
    h = np.zeros((2 ** n, 2 ** n))
    for j in range(n):
        if params.j1:
            h += params.j1 * heisenberg_bond(j, (j + 1) % n, n)
        if params.j2:
            h += params.j2 * heisenberg_bond(j, (j + 2) % n, n)
    for j in params.subsystem_sites:
        h -= params.h_s * local_op(SZ, j, n)
    return h


def restrict_to_sector(full_matrix, basis):
    idx = basis.states.astype(int)
    return full_matrix[np.ix_(idx, idx)]


def embed_sector_vector(vec, basis):
    full = np.zeros(2 ** basis.n_sites, dtype=complex)
    full[basis.states.astype(int)] = vec
    return full


def full_space_partial_trace(vec_full, n_sites, n_subsystem):
    """Outer product then trace, with the subsystem on the low bits."""
    m = vec_full.reshape(2 ** (n_sites - n_subsystem), 2 ** n_subsystem)
    return np.einsum("ea,eb->ab", m, m.conj())
