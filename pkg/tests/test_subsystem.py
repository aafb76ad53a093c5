import numpy as np
import pytest

from spinquench.basis import enumerate_sector
from spinquench.operators import ModelParams, build_hamiltonian
from spinquench.quench import compute_weights, evolve_state, le_series
from spinquench.spectral import EigenData, dense_diagonalize, ground_state_search
from spinquench.subsystem import (ObservableSeries, ReducedState,
                                  average_reduced_state, check_bounds,
                                  environment_average_purity, partial_trace,
                                  sample_reduced_series, trace_distance)

from oracles import embed_sector_vector, full_space_partial_trace


@pytest.fixture(scope="module")
def n8_quench():
    pre = ModelParams(8, 4, j2=1.0, h_s=0.2)
    gs = ground_state_search(pre, [0, 1])
    eig = dense_diagonalize(build_hamiltonian(pre.with_field(0.0), gs.basis))
    q = compute_weights(gs.vector, eig)
    return gs.basis, q


def test_product_state_stays_pure():
    # |up down> on S times an environment basis state
    basis = enumerate_sector(4, 2)
    psi = np.zeros(basis.dim, dtype=complex)
    psi[basis.index_of(0b0101)] = 1.0  # S sites 0,1 = (up, down); env site 2 up
    rho = partial_trace(psi, basis, 2)
    expected = np.zeros((4, 4))
    expected[1, 1] = 1.0
    assert np.abs(rho.matrix - expected).max() < 1e-14


def test_bell_state_maximally_mixed():
    basis = enumerate_sector(2, 1)
    psi = np.array([1.0, 1.0]) / np.sqrt(2)
    rho = partial_trace(psi, basis, 1)
    assert np.abs(rho.matrix - np.eye(2) / 2).max() < 1e-14


def test_partial_trace_against_full_space_oracle(n8_quench):
    basis, q = n8_quench
    for t in (0.0, 1.3, 9.0):
        psi = evolve_state(q, t)
        rho = partial_trace(psi, basis, 4)
        oracle = full_space_partial_trace(embed_sector_vector(psi, basis), 8, 4)
        assert np.abs(rho.matrix - oracle).max() < 1e-12
        assert rho.hermiticity_defect() < 1e-12
        assert abs(rho.trace - 1.0) < 1e-10
        assert np.linalg.eigvalsh(rho.matrix).min() > -1e-10


def test_partial_trace_validation():
    basis = enumerate_sector(4, 2)
    with pytest.raises(ValueError):
        partial_trace(np.zeros(basis.dim), basis, 5)
    with pytest.raises(ValueError):
        partial_trace(np.zeros(3), basis, 2)


def test_average_state_nondegenerate_is_weighted_sum(n8_quench):
    basis, q = n8_quench
    rho_bar = average_reduced_state(q, basis, 4)
    acc = np.zeros((16, 16), dtype=complex)
    for g, e in zip(q.eigen.degeneracy_groups, q.eigen.energies):
        comp = q.eigen.vectors[:, g] @ q.c[g]
        acc += full_space_partial_trace(embed_sector_vector(comp.astype(complex), basis), 8, 4)
    assert np.abs(rho_bar.matrix - acc).max() < 1e-12
    assert abs(rho_bar.trace - q.coverage) < 1e-10


def test_average_state_matches_long_time_sampling(n8_quench):
    basis, q = n8_quench
    rho_bar = average_reduced_state(q, basis, 4)
    rng = np.random.default_rng(5)
    times = rng.uniform(0, 40000, 3000)
    acc = np.zeros_like(rho_bar.matrix)
    for t in times:
        acc += partial_trace(evolve_state(q, t), basis, 4).matrix
    acc /= len(times)
    assert np.abs(acc - rho_bar.matrix).max() < 6e-3  # ~1/sqrt(3000)


def test_average_state_dominant_weight_limit():
    # p0 ~ 1: the average state collapses onto rho_S(0)
    pre = ModelParams(8, 2, j2=0.0, h_s=0.05)
    gs = ground_state_search(pre, [0])
    eig = dense_diagonalize(build_hamiltonian(pre.with_field(0.0), gs.basis))
    q = compute_weights(gs.vector, eig)
    p0 = q.block_weights()[0]
    assert p0 > 0.999
    rho_bar = average_reduced_state(q, gs.basis, 2)
    rho0 = partial_trace(gs.vector.astype(complex), gs.basis, 2)
    # residual coherences scale like sqrt(1 - p0)
    assert np.abs(rho_bar.matrix - rho0.matrix).max() < 2 * np.sqrt(1 - p0)


def test_average_state_gauge_invariant_in_degenerate_blocks():
    # rotate eigenvectors inside the Majumdar-Ghosh ground block
    pre = ModelParams(8, 4, j2=0.5, h_s=0.2)
    gs = ground_state_search(pre, [0])
    eig = dense_diagonalize(build_hamiltonian(pre.with_field(0.0), gs.basis))
    q = compute_weights(gs.vector, eig)
    rho_bar = average_reduced_state(q, gs.basis, 4)

    rng = np.random.default_rng(17)
    vecs = eig.vectors.copy()
    for g in eig.degeneracy_groups:
        if len(g) == 1:
            continue
        a = rng.standard_normal((len(g), len(g)))
        qmat, _ = np.linalg.qr(a)
        vecs[:, g] = vecs[:, g] @ qmat
    eig_rot = EigenData(eig.energies, vecs, "dense", eig.degeneracy_groups)
    q_rot = compute_weights(gs.vector, eig_rot)
    rho_rot = average_reduced_state(q_rot, gs.basis, 4)
    assert np.abs(rho_bar.matrix - rho_rot.matrix).max() < 1e-10


def test_trace_distance_basics():
    a = ReducedState(np.diag([1.0, 0.0]).astype(complex), 1)
    b = ReducedState(np.diag([0.0, 1.0]).astype(complex), 1)
    assert trace_distance(a, a) == 0.0
    assert trace_distance(a, b) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        trace_distance(a, ReducedState(np.eye(4, dtype=complex) / 4, 2))


def test_trace_distance_is_a_metric_on_samples(n8_quench):
    basis, q = n8_quench
    rng = np.random.default_rng(2)
    states = [partial_trace(evolve_state(q, t), basis, 4)
              for t in rng.uniform(0, 100, 3)]
    a, b, c = states
    assert trace_distance(a, b) == pytest.approx(trace_distance(b, a), abs=1e-14)
    assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-12


def test_sample_reduced_series_matches_direct_path(n8_quench):
    basis, q = n8_quench
    rho_bar = average_reduced_state(q, basis, 4)
    rng = np.random.default_rng(9)
    times = rng.uniform(0, 5000, 40)
    series = sample_reduced_series(q, basis, 4, times, chunk=16)
    for i, t in enumerate(times):
        psi = evolve_state(q, t)
        assert series.ds[i] == pytest.approx(
            trace_distance(partial_trace(psi, basis, 4), rho_bar), abs=1e-12)


def test_environment_purity_small_case(n8_quench):
    basis, q = n8_quench
    purity = environment_average_purity(q, basis, 4)
    # oracle: build rho_bar_env densely in the environment space
    acc = np.zeros((16, 16), dtype=complex)
    for g in q.eigen.degeneracy_groups:
        comp = q.eigen.vectors[:, g] @ q.c[g]
        full = embed_sector_vector(comp.astype(complex), basis)
        m = full.reshape(16, 16)  # env index major, subsystem minor
        acc += np.einsum("ea,fa->ef", m, m.conj())
    assert purity == pytest.approx(float(np.trace(acc @ acc).real), abs=1e-12)


def test_check_bounds_nondegenerate_chain():
    pre = ModelParams(8, 2, j2=0.0, h_s=3.5)
    gs = ground_state_search(pre, [0, 1, 2, 3])
    eig = dense_diagonalize(build_hamiltonian(pre.with_field(3.0), gs.basis))
    q = compute_weights(gs.vector, eig)
    rng = np.random.default_rng(21)
    times = rng.uniform(0, 20000, 4000)
    series = sample_reduced_series(q, gs.basis, 2, times)
    obs = ObservableSeries("magnetization", series.ms, series.ms_mean_analytic,
                           -0.5, 0.5)
    rep = check_bounds(q, gs.basis, 2, series.ds, [obs])
    assert rep.applicable
    assert rep.winter_lhs <= rep.winter_mid <= rep.winter_rhs
    assert rep.markov_ok
    assert rep.eq4_checks[0]["ok"]
    assert abs(rep.le_mean * rep.d_eff - 1.0) < 1e-12


def test_check_bounds_flags_degenerate_runs():
    pre = ModelParams(8, 4, j2=0.5, h_s=0.2)
    gs = ground_state_search(pre, [0])
    eig = dense_diagonalize(build_hamiltonian(pre.with_field(0.0), gs.basis))
    q = compute_weights(gs.vector, eig)
    rng = np.random.default_rng(3)
    times = rng.uniform(0, 10000, 500)
    series = sample_reduced_series(q, gs.basis, 4, times)
    rep = check_bounds(q, gs.basis, 4, series.ds, [])
    assert not rep.applicable
    assert rep.winter_ok  # vacuously


def test_check_bounds_eq4_holds_pointwise(n8_quench):
    basis, q = n8_quench
    rng = np.random.default_rng(31)
    times = rng.uniform(0, 30000, 2000)
    series = sample_reduced_series(q, basis, 4, times)
    obs = ObservableSeries("magnetization", series.ms, series.ms_mean_analytic,
                           -0.5, 0.5)
    rep = check_bounds(q, basis, 4, series.ds, [obs])
    assert rep.eq4_checks[0]["max_violation"] <= 1e-9


def test_identity_quench_distance_is_zero():
    pre = ModelParams(8, 3, j2=0.5, h_s=0.3)
    gs = ground_state_search(pre, [0])
    eig = dense_diagonalize(build_hamiltonian(pre, gs.basis))
    q = compute_weights(gs.vector, eig)
    times = np.linspace(0, 100, 50)
    series = sample_reduced_series(q, gs.basis, 3, times)
    assert np.abs(series.ds).max() < 1e-10
    assert np.abs(le_series(q, times) - 1.0).max() < 1e-10


def test_complement_field_distance_series_agree():
    n, ns, h = 8, 3, 0.4
    base = ModelParams(n, ns, j2=0.5, h_s=0.0)
    gs = ground_state_search(base, [0])
    plus = ModelParams(n, ns, j2=0.5, h_s=h)
    minus = ModelParams(n, n - ns, j2=0.5, h_s=-h, subsystem_offset=ns)
    q_p = compute_weights(gs.vector, dense_diagonalize(build_hamiltonian(plus, gs.basis)))
    q_m = compute_weights(gs.vector, dense_diagonalize(build_hamiltonian(minus, gs.basis)))
    times = np.linspace(0, 80, 400)
    ds_p = sample_reduced_series(q_p, gs.basis, ns, times).ds
    ds_m = sample_reduced_series(q_m, gs.basis, ns, times).ds
    assert np.abs(ds_p - ds_m).max() < 1e-10
