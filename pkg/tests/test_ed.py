import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import sparse

from gapcert.ed import (
    ConvergenceError,
    KernelDimensionError,
    PrecisionError,
    SubspacePair,
    epsilon_exact,
    epsilon_from_cosines,
    fnw_check,
    fnw_sweep,
    gap_above_kernel,
    kernel_basis,
    lowest_eigenvalues,
    meet_projector,
    principal_cosines,
    random_projector,
    y_graph_gap,
    y_kernels,
)
from gapcert.lattice import build_decorated_torus, build_y_graph, hamiltonian


def test_lowest_eigenvalues_dense_path():
    H = sparse.diags(np.arange(50, dtype=float)).tocsr()
    res = lowest_eigenvalues(H, 3)
    assert np.allclose(res.eigenvalues, [0, 1, 2])
    assert res.vectors.shape == (50, 3)


def test_lowest_eigenvalues_lanczos_path():
    dim = 6000
    rng = np.random.default_rng(4)
    # rotate a known spectrum with a sparse orthogonal (block Givens) matrix
    c, s = np.cos(0.3), np.sin(0.3)
    blocks = [np.array([[c, -s], [s, c]])] * (dim // 2)
    G = sparse.block_diag(blocks, format="csr")
    perm = rng.permutation(dim)
    P = sparse.eye(dim, format="csr")[perm]
    Q = P @ G
    H = (Q @ sparse.diags(np.arange(dim, dtype=float)) @ Q.T).tocsr()
    res = lowest_eigenvalues(H, 3)
    assert np.allclose(res.eigenvalues, [0, 1, 2], atol=1e-9)
    assert res.residual_norms.max() < 1e-8


def test_lanczos_is_seed_deterministic():
    rng = np.random.default_rng(5)
    A = sparse.random(6000, 6000, density=5e-4, random_state=5)
    H = (A + A.T + sparse.diags(rng.normal(size=6000))).tocsr()
    a = lowest_eigenvalues(H, 4, seed=7).eigenvalues
    b = lowest_eigenvalues(H, 4, seed=7).eigenvalues
    assert np.array_equal(a, b)


def test_lanczos_iteration_budget_raises():
    rng = np.random.default_rng(0)
    H = sparse.diags(rng.normal(size=8000)).tocsr()
    with pytest.raises(ConvergenceError):
        lowest_eigenvalues(H, 6, maxiter=2, ncv=13)


def test_lowest_eigenvalues_rejects_bad_k():
    with pytest.raises(ValueError):
        lowest_eigenvalues(np.eye(3), 4)
    with pytest.raises(ValueError):
        lowest_eigenvalues(np.eye(3), 0)


def test_y1_spectrum_has_eight_zero_modes():
    vals = lowest_eigenvalues(hamiltonian(build_y_graph(1)), 9).eigenvalues
    assert np.all(np.abs(vals[:8]) < 1e-9)
    assert vals[8] > 0.1


def test_smallest_torus_ground_energy():
    assert abs(lowest_eigenvalues(hamiltonian(build_decorated_torus(1, 1, 1)), 1).eigenvalues[0]) < 1e-9


def test_gap_above_kernel_examples():
    assert gap_above_kernel(np.diag([0.0, 0.0, 5.0]), 2) == pytest.approx(5)
    with pytest.raises(KernelDimensionError):
        gap_above_kernel(np.diag([0.0, 1.0, 5.0]), 2)
    with pytest.raises(ValueError):
        gap_above_kernel(np.diag([0.0, 1.0]), 0)


def test_y_graph_gaps_against_dense_oracle():
    H = hamiltonian(build_y_graph(1)).toarray()
    ev = np.linalg.eigvalsh(H)
    assert y_graph_gap(1) == pytest.approx(ev[8], abs=1e-10)
    assert y_graph_gap(1) > 0
    assert y_graph_gap(2) == pytest.approx(0.31205, abs=1e-5)


def test_kernel_basis_examples():
    assert kernel_basis(np.zeros((3, 3))).shape == (3, 3)
    Q = kernel_basis(hamiltonian(build_y_graph(2)))
    assert Q.shape[1] == 8
    assert np.allclose(Q.conj().T @ Q, np.eye(8), atol=1e-12)
    assert np.linalg.norm(hamiltonian(build_y_graph(2)) @ Q) < 1e-8


def test_kernel_basis_requires_separation():
    with pytest.raises(KernelDimensionError):
        kernel_basis(np.diag([0.0, 1e-6, 1.0]))


def test_principal_cosines_synthetic():
    same = np.linalg.qr(np.random.default_rng(0).normal(size=(5, 2)))[0]
    eps, inter = epsilon_from_cosines(principal_cosines(same, same))
    assert eps == 0.0 and inter == 2
    U = np.array([[1, 0], [0, 1], [0, 0], [0, 0]], dtype=float)
    V = np.array([[1, 0], [0, 1], [1, 0], [0, 1]], dtype=float) / math.sqrt(2)
    eps, inter = epsilon_from_cosines(principal_cosines(U, V))
    assert inter == 0
    assert eps == pytest.approx(math.sqrt(2) / 2)


def test_ambiguous_cosine_raises():
    with pytest.raises(PrecisionError):
        epsilon_from_cosines([1 - 1e-7, 0.3])


def _random_pair(rng, ka=3, kb=2, dl=4, dc=3, dr=5):
    X = rng.normal(size=(ka, dl * dc)) + 1j * rng.normal(size=(ka, dl * dc))
    Y = rng.normal(size=(kb, dc * dr)) + 1j * rng.normal(size=(kb, dc * dr))
    X = np.linalg.qr(X.T)[0].T.reshape(ka, dl, dc)
    Y = np.linalg.qr(Y.T)[0].T.reshape(kb, dc, dr)
    return SubspacePair(X, Y)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_factored_cosines_match_dense_and_explicit(seed):
    rng = np.random.default_rng(seed)
    pair = _random_pair(rng)
    dl, dc, dr = pair.dims
    dense = np.sort(pair.cosines_dense())[::-1]
    fact = np.sort(pair.cosines_factored())[::-1][: len(dense)]
    assert np.allclose(dense, fact, atol=1e-10)
    # explicit subspaces in the ambient space
    U = np.einsum("alc,r->alcr", pair.left, np.ones(1))
    U = np.stack([np.einsum("lc,r->lcr", x, e).reshape(-1) for x in pair.left for e in np.eye(dr)], axis=1)
    V = np.stack([np.einsum("l,cr->lcr", e, y).reshape(-1) for e in np.eye(dl) for y in pair.right], axis=1)
    explicit = np.sort(principal_cosines(U, V))[::-1]
    assert np.allclose(explicit, dense, atol=1e-10)
    sw = pair.swapped()
    assert np.allclose(np.sort(sw.cosines_factored())[::-1][: len(dense)], dense, atol=1e-10)


def test_epsilon_exact_n1():
    eps, inter, pair = epsilon_exact(1, return_details=True)
    assert eps == pytest.approx(0.478, abs=2e-3)
    assert inter == 16
    assert pair.ambient_dim == 3888
    assert epsilon_exact(1, method="dense") == pytest.approx(eps, abs=1e-10)
    assert epsilon_from_cosines(pair.swapped().cosines_factored())[0] == pytest.approx(eps, abs=1e-10)


def test_epsilon_exact_guards():
    with pytest.raises(ValueError):
        epsilon_exact(3)
    with pytest.raises(ValueError):
        epsilon_exact(4, allow_large_n=True)
    with pytest.raises(ValueError):
        epsilon_exact(0)
    with pytest.raises(ValueError):
        epsilon_exact(1, method="svd")


def test_y_kernels_shapes():
    pair = y_kernels(1)
    assert pair.left.shape == (8, 4 * 9, 3)
    assert pair.right.shape == (8, 3, 4 * 9)


def test_fnw_examples():
    rng = np.random.default_rng(3)
    E = random_projector(6, 2, rng)
    assert abs(fnw_check(E, E)) < 1e-12
    q = np.linalg.qr(rng.normal(size=(6, 4)))[0]
    E = q[:, :2] @ q[:, :2].T
    F = q[:, 2:] @ q[:, 2:].T
    assert abs(fnw_check(E, F)) < 1e-12
    assert np.linalg.norm(meet_projector(E, E) - E) < 1e-10
    with pytest.raises(ValueError):
        fnw_check(np.eye(3) * 2, np.eye(3))


def test_fnw_sweep():
    assert fnw_sweep(1000, seed=0) >= -1e-9


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 10).flatmap(lambda d: st.tuples(st.just(d), st.integers(1, d), st.integers(1, d),
                                                       st.integers(0, 2**32 - 1))))
def test_fnw_inequality_property(args):
    dim, re, rf, seed = args
    rng = np.random.default_rng(seed)
    m = min(re, rf) // 2
    shared = np.linalg.qr(rng.normal(size=(dim, m)))[0] if m else None
    E = random_projector(dim, re, rng, shared)
    F = random_projector(dim, rf, rng, shared)
    assert fnw_check(E, F) >= -1e-9
