import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gapcert.lattice import build_g_graph, hamiltonian
from gapcert.mps import (
    SANDWICH_CASES,
    SiteTensor,
    a_of_n,
    aklt_boundary_tensors,
    aklt_site_tensor,
    bound_suite,
    bulk_power_closed_form,
    bulk_transfer,
    compose_and_power,
    epsilon_bound,
    fixed_point,
    gamma_state,
    generic_bound_suite,
    gram_from_states,
    gram_matrix,
    identity_map,
    left_boundary_tensor,
    left_hub_transfer,
    left_transfer,
    left_transfer_closed_form,
    norm_sandwich_check,
    omega,
    parallel,
    power,
    q_matrices,
    rank_one_map,
    repeat,
    right_boundary_tensor,
    right_hub_transfer,
    s_dot_s,
    then,
    transfer_operator,
    transpose,
)
from gapcert.spin import spin_matrices

HALF = spin_matrices(1)
UP, DOWN = np.array([1, 0]), np.array([0, 1])


def test_aklt_site_tensor_entries():
    V = aklt_site_tensor()
    assert V.d == 3 and V.d_in == V.d_out == 2
    assert np.allclose(V[1], np.diag([1, -1]) / math.sqrt(3))
    assert np.allclose(V[0], -math.sqrt(2 / 3) * HALF.s_minus)
    assert np.allclose(V[2], math.sqrt(2 / 3) * HALF.s_plus)
    assert np.allclose(sum(v.conj().T @ v for v in V.matrices), np.eye(2))
    # same identity entrywise, written out by hand
    v1, v0, vm = V.matrices
    assert np.allclose(v1.conj().T @ v1 + v0.conj().T @ v0 + vm.conj().T @ vm, np.eye(2), atol=1e-15)


def test_boundary_tensor_identities():
    WL, WR = aklt_boundary_tensors()
    assert WL.matrices.shape == (4, 2, 4)
    assert WR.matrices.shape == (4, 4, 2)
    upup = np.kron(UP, UP)
    assert np.allclose(WL[0], -np.outer(DOWN, upup))
    assert np.allclose(sum(w @ w.conj().T for w in WL.matrices), 2 * np.eye(2))
    assert np.allclose(sum(w.conj().T @ w for w in WL.matrices), np.eye(4) + 4 / 3 * s_dot_s())


def test_left_hub_spectrum_and_transpose_relation():
    EL = left_hub_transfer()
    assert np.allclose(sorted(np.linalg.eigvalsh(EL(np.eye(2)))), [0, 4 / 3, 4 / 3, 4 / 3])
    assert np.abs(right_hub_transfer().rep - transpose(EL).rep).max() < 1e-12


def test_bulk_spectrum_and_self_adjointness():
    E = bulk_transfer()
    assert np.allclose(np.sort(E.spectrum().real), [-1 / 3, -1 / 3, -1 / 3, 1])
    assert np.abs(E.spectrum().imag).max() < 1e-12
    assert np.abs(transpose(E).rep - E.rep).max() < 1e-12
    assert np.allclose(E(np.eye(2)), np.eye(2))


def test_trivial_tensor_gives_identity_map():
    e = transfer_operator(SiteTensor(np.eye(3)[None]))
    assert np.allclose(e.rep, identity_map(3).rep)


def test_transpose_is_involution():
    e = left_transfer(2)
    assert np.allclose(transpose(transpose(e)).rep, e.rep)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_random_tensor_map_is_cp_and_adjoint_pairs(d, din, dout, seed):
    rng = np.random.default_rng(seed)
    t = SiteTensor(rng.normal(size=(d, dout, din)) + 1j * rng.normal(size=(d, dout, din)))
    e = transfer_operator(t)
    assert (e.dim_in, e.dim_out) == (dout, din)
    choi = e.choi()
    assert np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))[0] > -1e-10
    A = rng.normal(size=(din, din)) + 1j * rng.normal(size=(din, din))
    B = rng.normal(size=(dout, dout)) + 1j * rng.normal(size=(dout, dout))
    lhs = np.trace(A.conj().T @ e(B))
    rhs = np.trace(transpose(e)(A).conj().T @ B)
    assert abs(lhs - rhs) < 1e-9 * (1 + abs(lhs))


def test_aklt_maps_are_completely_positive():
    for e in (bulk_transfer(), left_hub_transfer(), right_hub_transfer(), left_transfer(2)):
        choi = e.choi()
        assert np.linalg.eigvalsh(choi)[0] > -1e-10


@pytest.mark.parametrize("n", range(1, 11))
def test_bulk_power_closed_form(n):
    assert np.abs(power(bulk_transfer(), n).rep - bulk_power_closed_form(n).rep).max() < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_left_transfer_closed_form(n):
    assert np.abs(left_transfer(n).rep - left_transfer_closed_form(n).rep).max() < 1e-12


def test_orthogonality_data():
    ss = s_dot_s()
    assert np.linalg.norm(ss) == pytest.approx(math.sqrt(3) / 2)
    for U in "XYZ":
        assert np.linalg.norm(omega(U)) == pytest.approx(math.sqrt(2))
        assert abs(np.trace(ss.conj().T @ omega(U))) < 1e-14


def test_compose_and_power():
    E = bulk_transfer()
    assert np.allclose(compose_and_power([E], [0]).rep, identity_map(2).rep)
    en = compose_and_power([E], [3])
    assert np.allclose(en.rep, power(E, 3).rep)
    assert np.allclose(compose_and_power([E, E], [1, 2]).rep, en.rep)
    with pytest.raises(ValueError):
        compose_and_power([left_hub_transfer(), left_hub_transfer()])


def test_fixed_point_of_bulk():
    fp = fixed_point(bulk_transfer())
    assert np.abs(fp.rho - np.eye(2) / 2).max() < 1e-12
    assert fp.primitive
    assert fp.second_modulus == pytest.approx(1 / 3)
    assert fp.spectral_gap_of_map == pytest.approx(2 / 3)


def test_identity_map_is_not_primitive():
    assert not fixed_point(identity_map(2)).primitive


def test_fixed_point_rejects_non_unital():
    with pytest.raises(ValueError):
        fixed_point(transfer_operator(SiteTensor(2 * np.eye(2)[None])))


def test_a_of_n_matches_closed_form():
    E = bulk_transfer()
    rho = fixed_point(E).rho
    for n in range(1, 13):
        assert abs(a_of_n(E, rho, n) - 3.0**-n) < 1e-12
        assert a_of_n(E, rho, n) / 3.0**-n == pytest.approx(1, rel=1e-10)
    assert a_of_n(E, rho, 1) == pytest.approx(1 / 3)
    assert abs(a_of_n(E, rho, 5) - 1 / 243) < 1e-12
    proj = rank_one_map(np.eye(2), rho)
    assert a_of_n(proj, rho, 3) < 1e-15


@pytest.mark.parametrize("n", range(1, 7))
def test_boundary_q_spectra(n):
    q = q_matrices(n)
    want = [1 - 3.0 ** (-2 * n), 1 + 3.0 ** (-2 * n - 1), 1 + 3.0 ** (-2 * n - 1), 1 + 3.0 ** (-2 * n - 1)]
    assert np.abs(np.linalg.eigvalsh(q.Q_L) - want).max() < 1e-12
    assert np.abs(q.Q_R - q.Q_L / 2).max() < 1e-12
    assert np.abs(q.E_R.rep - transpose(q.E_L).rep).max() < 1e-12
    assert q.q_R == pytest.approx(q.q_L / 2)
    assert q.norm_EL == pytest.approx(1 + 3.0 ** (-2 * n - 1))


def test_q_l_example_and_monotone_approach_to_identity():
    q = q_matrices(2)
    assert np.allclose(sorted(np.linalg.eigvalsh(q.Q_L)), [0.9876543209876543] + [1.0041152263374487] * 3)
    dist = [np.linalg.norm(q_matrices(n).Q_L - np.eye(4), 2) for n in range(1, 11)]
    assert all(b < a for a, b in zip(dist, dist[1:]))


def test_bound_suite_values():
    s2 = bound_suite(2)
    assert 1 - s2.b_L == pytest.approx(1 - 8 * (1 + 3**-5) / (9 * (1 - 3**-4)), rel=1e-12)
    assert 1 - s2.b_L == pytest.approx(0.0962962962962963, rel=1e-9)
    for n in range(1, 8):
        s = bound_suite(n)
        assert s.b_L == pytest.approx(s.b_R, rel=1e-12)
        assert s.b_n == pytest.approx(4 * 3.0**-n, rel=1e-12)
    assert bound_suite(3).b_n == pytest.approx(4 / 27, rel=1e-12)


def test_generic_bound_suite_accepts_user_constants():
    s = generic_bound_suite(0.01, 2, 0.5, 4.0, 1.0, 0.5, 1.0, 1.0)
    assert s.b_n == pytest.approx(0.04)
    assert s.b_L == pytest.approx(0.08)
    assert s.b_R == pytest.approx(0.08)
    assert s.valid
    bad = generic_bound_suite(0.5, 2, 0.5, 4.0, 1.0, 0.5, 1.0, 1.0)
    assert not bad.denominators_positive and not bad.valid


def test_epsilon_bound_examples():
    e3 = epsilon_bound(3)
    assert e3.valid and e3.eps < 0.2683
    assert e3.eps == pytest.approx(0.2682793018462372, rel=1e-12)
    e1 = epsilon_bound(1)
    assert not e1.valid and e1.one_minus_b_L < 0
    e2 = epsilon_bound(2)
    assert not e2.valid and e2.eps > 1 / 3
    assert e2.A_n == pytest.approx(4.615384615384619, rel=1e-9)


def test_epsilon_bound_monotone_below_threshold():
    eps = [epsilon_bound(n, cross_check=False).eps for n in range(3, 51)]
    assert all(e < 1 / 3 for e in eps)
    assert all(b < a for a, b in zip(eps, eps[1:]))


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_closed_form_bound_matches_numerical_suite(n):
    # epsilon_bound raises if the two routes differ by more than 1e-9 relative
    assert epsilon_bound(n, cross_check=True).eps == pytest.approx(bound_suite(n).eps_bound, rel=1e-9)


def test_chain_state_norm_and_lemma_bound():
    psi = gamma_state(2, np.eye(2))
    assert abs(np.vdot(psi, psi).real - 1.0) <= 4 / 9
    units = [np.outer(np.eye(2)[a], np.eye(2)[b]) for a in range(2) for b in range(2)]
    vecs = np.stack([gamma_state(2, u) for u in units], axis=1)
    assert np.linalg.matrix_rank(vecs, tol=1e-10) == 4


def test_chain_map_not_injective_for_one_site():
    V = aklt_site_tensor()
    assert np.allclose([np.trace(v) for v in V.matrices], 0)
    assert np.linalg.norm(gamma_state(1, np.eye(2))) < 1e-14


def test_gram_matrix_matches_explicit_states():
    L, R = left_boundary_tensor(1), right_boundary_tensor(1)
    for left, right in ((None, None), (L, None), (None, R), (L, R)):
        g1 = gram_matrix(1, left, right)
        g2 = gram_from_states(1, left, right)
        assert np.abs(g1 - g2).max() < 1e-12
    assert np.abs(gram_matrix(3) - gram_from_states(3)).max() < 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_g_map_injective(n):
    g = gram_matrix(n, left_boundary_tensor(n), right_boundary_tensor(n))
    ev = np.linalg.eigvalsh(g)
    assert ev[0] > 1e-3
    assert np.linalg.matrix_rank(g, tol=1e-10) == 16


def test_gamma_state_rejects_oversized_and_bad_boundary():
    with pytest.raises(ValueError):
        gamma_state(2, np.eye(3))
    with pytest.raises(MemoryError):
        gamma_state(20, np.eye(2))


def _g_states(n, site):
    wl, wr = aklt_boundary_tensors()
    pair = parallel(site, site)
    left = then(repeat(pair, n), wl)
    right = then(wr, repeat(pair, n))
    cols = []
    for a in range(4):
        for b in range(4):
            unit = np.zeros((4, 4))
            unit[a, b] = 1
            cols.append(gamma_state(n, unit, left, right, site))
    return np.stack(cols, axis=1)


def test_g_states_are_ground_states():
    H = hamiltonian(build_g_graph(1)).matrix
    states = _g_states(1, aklt_site_tensor())
    assert np.linalg.norm(H @ states) < 1e-12 * np.linalg.norm(states)


def test_exchanging_ladder_components_breaks_hub_compatibility():
    # the hub tensors fix which of V_1, V_-1 carries S^- and which S^+
    V = aklt_site_tensor()
    swapped = SiteTensor(np.stack([-V[2], V[1], -V[0]]))
    assert np.allclose(sum(v.conj().T @ v for v in swapped.matrices), np.eye(2))
    H = hamiltonian(build_g_graph(1)).matrix
    states = _g_states(1, swapped)
    assert np.linalg.norm(H @ states) > 0.1 * np.linalg.norm(states)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("case", SANDWICH_CASES)
def test_norm_sandwiches(n, case):
    assert norm_sandwich_check(n, samples=100, case=case, seed=n) == 0.0


def test_norm_sandwich_zero_matrix_and_bad_inputs():
    assert norm_sandwich_check(2, case="G", matrices=[np.zeros((4, 4))]) == 0.0
    with pytest.raises(ValueError):
        norm_sandwich_check(1, case="G")
    with pytest.raises(ValueError):
        norm_sandwich_check(2, case="nowhere")
    with pytest.raises(ValueError):
        norm_sandwich_check(2, case="chain", matrices=[np.eye(4)])


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (2, 2, 2), elements=st.floats(-5, 5)))
def test_chain_lemma_inequality_holds_for_arbitrary_pairs(bc):
    # |<Gamma(B), Gamma(C)> - <B, C>_rho| <= b(n) ||B||_rho ||C||_rho at n = 2
    B, C = bc[0], bc[1]
    g = gram_matrix(2)
    rho = np.eye(2) / 2
    lhs = abs(B.reshape(-1).conj() @ g @ C.reshape(-1) - np.trace(rho @ B.conj().T @ C))
    nb = math.sqrt(np.trace(rho @ B.T @ B))
    nc = math.sqrt(np.trace(rho @ C.T @ C))
    assert lhs <= 4 / 9 * nb * nc + 1e-10
