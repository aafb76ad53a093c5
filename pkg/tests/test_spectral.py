import numpy as np
import pytest
import scipy.sparse as sp

from spinquench.basis import enumerate_sector
from spinquench.operators import ModelParams, SparseOperator, build_hamiltonian
from spinquench.spectral import (ConvergenceError, ResourceError,
                                 dense_diagonalize, ground_state_search,
                                 lanczos_lowest_k, spectrum_scan)

from oracles import full_space_hamiltonian, restrict_to_sector


def diag_operator(values):
    return SparseOperator(sp.diags(np.asarray(values, float), format="csr"), "diag")


def mg_sector(n):
    params = ModelParams(n, 4, j2=0.5, h_s=0.0)
    basis = enumerate_sector(n, n // 2)
    return build_hamiltonian(params, basis), basis


def check_invariants(op, eig):
    v = eig.vectors
    gram = v.T @ v
    assert np.abs(gram - np.eye(v.shape[1])).max() < 1e-10
    res = np.linalg.norm(op.matrix @ v - v * eig.energies, axis=0)
    assert np.all(res <= 1e-8 * np.maximum(1.0, np.abs(eig.energies)))
    assert np.all(np.diff(eig.energies) >= -1e-12)


def test_dense_diagonal_matrix():
    eig = dense_diagonalize(diag_operator([3.0, 1.0, 2.0]))
    assert np.allclose(eig.energies, [1.0, 2.0, 3.0])
    assert np.allclose(np.abs(eig.vectors), np.eye(3)[:, [1, 2, 0]])


def test_dense_majumdar_ghosh_degeneracy():
    h, _ = mg_sector(8)
    eig = dense_diagonalize(h)
    assert eig.energies[1] - eig.energies[0] <= 1e-10
    assert eig.degeneracy_groups[0] == [0, 1]
    check_invariants(h, eig)


def test_dense_matches_full_space_oracle():
    params = ModelParams(10, 4, j2=0.0, h_s=0.0)
    basis = enumerate_sector(10, 5)
    h = build_hamiltonian(params, basis)
    eig = dense_diagonalize(h)
    oracle = np.linalg.eigvalsh(restrict_to_sector(full_space_hamiltonian(params), basis))
    assert np.abs(eig.energies - oracle).max() < 1e-10
    check_invariants(h, eig)


def test_dense_resource_guard():
    class Fat:
        dim = 30000
    with pytest.raises(ResourceError):
        dense_diagonalize(Fat())


def test_lanczos_single_lowest_of_diagonal():
    eig = lanczos_lowest_k(diag_operator([5.0, -2.0, 7.0]), 1, seed=0)
    assert eig.energies[0] == pytest.approx(-2.0, abs=1e-10)


@pytest.mark.parametrize("k", [1, 3, 20, 70])
def test_lanczos_agrees_with_dense_incl_degenerate(k):
    h, _ = mg_sector(8)  # dim 70, doubly degenerate bottom
    ref = dense_diagonalize(h)
    eig = lanczos_lowest_k(h, k, seed=11)
    assert np.abs(eig.energies - ref.energies[:k]).max() < 1e-8
    check_invariants(h, eig)


@pytest.mark.parametrize("n_sites,n_up,j2,h_s", [
    (10, 5, 0.0, 0.0), (10, 5, 0.5, 0.0), (10, 4, 1.0, 0.3)])
def test_lanczos_vs_dense_all_k_n10(n_sites, n_up, j2, h_s):
    params = ModelParams(n_sites, 4, j2=j2, h_s=h_s)
    basis = enumerate_sector(n_sites, n_up)
    h = build_hamiltonian(params, basis)
    ref = dense_diagonalize(h)
    for k in (1, 7, basis.dim // 2, basis.dim):
        eig = lanczos_lowest_k(h, k, seed=3)
        assert np.abs(eig.energies - ref.energies[:k]).max() < 1e-8


def test_lanczos_deterministic():
    h, _ = mg_sector(8)
    a = lanczos_lowest_k(h, 5, seed=42)
    b = lanczos_lowest_k(h, 5, seed=42)
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.vectors, b.vectors)


def test_lanczos_convergence_error_carries_residuals():
    h, _ = mg_sector(10)  # dim 252
    with pytest.raises(ConvergenceError) as err:
        lanczos_lowest_k(h, 40, seed=0, max_applies=3)
    assert err.value.residuals is not None


def test_degenerate_block_projector_gauge_invariance():
    h, _ = mg_sector(8)
    eig = dense_diagonalize(h)
    block = eig.degeneracy_groups[0]
    vb = eig.vectors[:, block]
    proj = vb @ vb.T
    rng = np.random.default_rng(1)
    ang = rng.uniform(0, 2 * np.pi)
    rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
    vr = vb @ rot
    assert np.abs(vr @ vr.T - proj).max() < 1e-10


def test_ground_state_search_zero_field():
    params = ModelParams(4, 2, j2=0.0, h_s=0.0)
    res = ground_state_search(params, [0, 1, 2])
    assert res.total_sz == 0
    assert res.energy == pytest.approx(-2.0, abs=1e-10)
    assert len(res.per_sector) == 3


def test_ground_state_search_single_sector_passthrough():
    params = ModelParams(8, 4, j2=1.0, h_s=0.2)
    res = ground_state_search(params, [0])
    basis = enumerate_sector(8, 4)
    ref = dense_diagonalize(build_hamiltonian(params, basis))
    assert res.energy == pytest.approx(ref.energies[0], abs=1e-10)
    assert res.n_up == 4


def test_ground_state_search_flags_mg_degeneracy():
    params = ModelParams(8, 4, j2=0.5, h_s=0.0)
    res = ground_state_search(params, [0, 1])
    assert res.degenerate


def test_ground_state_search_lanczos_path():
    params = ModelParams(10, 4, j2=0.3, h_s=0.1)
    res = ground_state_search(params, [0, 1], dense_cutoff=10)
    assert all(m == "iterative" for *_, m in res.per_sector)
    ref = ground_state_search(params, [0, 1])
    assert res.energy == pytest.approx(ref.energy, abs=1e-8)


def test_spectrum_scan_mg_point_and_translation_gauge():
    params = ModelParams(8, 4, j2=0.5, h_s=0.0)
    rows = spectrum_scan(params, [0.0], n_levels=5)
    (h, levels), = rows
    assert h == 0.0
    assert levels[1] - levels[0] <= 1e-10  # two-fold ground manifold
    # at zero field the subsystem placement is pure gauge
    shifted = ModelParams(8, 4, j2=0.5, h_s=0.0, subsystem_offset=3)
    rows2 = spectrum_scan(shifted, [0.0], n_levels=5)
    assert np.abs(np.array(levels) - np.array(rows2[0][1])).max() < 1e-9


def test_spectrum_scan_zeeman_slope_n8():
    params = ModelParams(8, 4, j2=0.0, h_s=0.0)
    rows = spectrum_scan(params, [3.5, 3.6], n_levels=1)
    slope = (rows[1][1][0] - rows[0][1][0]) / 0.1
    assert slope == pytest.approx(-2.0, rel=0.02)


def test_spectrum_scan_validation():
    params = ModelParams(8, 4)
    with pytest.raises(ValueError):
        spectrum_scan(params, [], 5)
    with pytest.raises(ValueError):
        spectrum_scan(params, [0.0], 0)
