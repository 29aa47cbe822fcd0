"""Exact-diagonalization oracles: low spectra, kernels, principal angles.

Sparse problems go through ARPACK's implicitly restarted Lanczos
(``scipy.sparse.linalg.eigsh``); anything up to ``DENSE_CUTOFF`` is
diagonalized densely.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, aslinearoperator, eigsh

from .lattice import build_g_graph, build_y_graph, hamiltonian, hamiltonian_operator
from .spin import SparseHermitianOperator

log = logging.getLogger(__name__)

DENSE_CUTOFF = 5000
RESIDUAL_TOL = 1e-8
KERNEL_TOL = 1e-8
INTERSECTION_TOL = 1e-9
AMBIGUOUS_TOL = 1e-6


class ConvergenceError(RuntimeError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class KernelDimensionError(RuntimeError):
    """The observed ground-space dimension differs from the expected one."""


class PrecisionError(RuntimeError):
    """A singular value cannot be classified as inside or outside the intersection."""


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: np.ndarray
    vectors: np.ndarray | None
    residual_norms: np.ndarray


def _as_operator(H):
    if isinstance(H, SparseHermitianOperator):
        return H.matrix
    return H


def _residuals(op, vals, vecs):
    hv = op @ vecs
    return np.linalg.norm(hv - vecs * vals[None, :], axis=0)


def lowest_eigenvalues(H, k: int, return_vectors: bool = True, tol: float = 0.0,
                       ncv: int | None = None, maxiter: int | None = None,
                       seed: int = 0) -> EigenResult:
    """The ``k`` smallest eigenpairs of a Hermitian operator.

    Accepts a :class:`SparseHermitianOperator`, a scipy sparse matrix, a dense
    array or a ``LinearOperator``. Raises :class:`ConvergenceError` when the
    iteration budget runs out or a residual exceeds ``RESIDUAL_TOL``. The Lanczos
    start vector is drawn from ``seed`` so repeated runs agree bit for bit.
    """
    op = _as_operator(H)
    dim = op.shape[0]
    if not 1 <= k <= dim:
        raise ValueError(f"k must satisfy 1 <= k <= {dim}, got {k}")
    if dim <= DENSE_CUTOFF and not isinstance(op, LinearOperator):
        dense = op.toarray() if sparse.issparse(op) else np.asarray(op)
        vals, vecs = scipy.linalg.eigh(dense, subset_by_index=(0, k - 1))
    else:
        if k >= dim - 1:
            raise ValueError(f"Lanczos needs k < {dim - 1}, got {k}")
        ncv = ncv or min(dim - 1, max(2 * k + 1, 40))
        rng = np.random.default_rng(seed)
        v0 = rng.normal(size=dim)
        if np.iscomplexobj(np.empty(0, dtype=op.dtype)):
            v0 = v0 + 1j * rng.normal(size=dim)
        try:
            vals, vecs = eigsh(op, k=k, which="SA", tol=tol, ncv=ncv, maxiter=maxiter, v0=v0)
        except ArpackNoConvergence as exc:
            res = _residuals(op, exc.eigenvalues, exc.eigenvectors) if len(exc.eigenvalues) else None
            raise ConvergenceError(f"Lanczos did not converge for k={k}", res) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    res = _residuals(op, vals, vecs)
    if np.any(res > RESIDUAL_TOL):
        raise ConvergenceError(f"eigen-residuals up to {res.max():.2e} exceed {RESIDUAL_TOL}", res)
    return EigenResult(vals, vecs if return_vectors else None, res)


def gap_above_kernel(H, expected_kernel_dim: int, seed: int = 0) -> float:
    """First eigenvalue above a kernel of the given dimension."""
    if expected_kernel_dim < 1:
        raise ValueError("expected_kernel_dim must be >= 1")
    res = lowest_eigenvalues(H, expected_kernel_dim + 1, return_vectors=False, seed=seed)
    vals = res.eigenvalues
    kernel = int(np.sum(vals < KERNEL_TOL))
    if kernel != expected_kernel_dim or vals[expected_kernel_dim] < 1e-4:
        raise KernelDimensionError(
            f"expected a {expected_kernel_dim}-dimensional kernel, lowest eigenvalues {vals}"
        )
    return float(vals[expected_kernel_dim])


KERNEL_DENSE_CUTOFF = 1000


def kernel_basis(H, tol: float = KERNEL_TOL, block: int = 16, seed: int = 0) -> np.ndarray:
    """Orthonormal columns spanning the eigenvectors of ``H`` with eigenvalue < tol.

    The first eigenvalue above ``tol`` must exceed 1e-4; otherwise the kernel is
    not cleanly separated and :class:`KernelDimensionError` is raised. Small or
    dense operators are diagonalized fully; larger sparse ones go through Lanczos
    with a growing number of requested eigenpairs.
    """
    op = _as_operator(H)
    dim = op.shape[0]
    small = dim <= KERNEL_DENSE_CUTOFF or (dim <= DENSE_CUTOFF and isinstance(op, np.ndarray))
    if small:
        dense = op.toarray() if sparse.issparse(op) else np.asarray(op)
        vals, vecs = np.linalg.eigh(dense)
    else:
        k = min(block, dim - 1)
        while True:
            res = lowest_eigenvalues(aslinearoperator(op), k, seed=seed)
            vals, vecs = res.eigenvalues, res.vectors
            if vals[-1] >= tol or k == dim - 1:
                break
            k = min(2 * k, dim - 1)
    inside = vals < tol
    m = int(inside.sum())
    if m < len(vals) and vals[m] < 1e-4:
        raise KernelDimensionError(
            f"eigenvalue {vals[m]:.3e} just above the kernel tolerance; no spectral separation"
        )
    basis, _ = np.linalg.qr(vecs[:, inside])
    return basis


def principal_cosines(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Cosines of the principal angles between ``ran U`` and ``ran V`` (orthonormal columns)."""
    return np.linalg.svd(U.conj().T @ V, compute_uv=False)


def epsilon_from_cosines(cosines) -> tuple[float, int]:
    """Largest cosine outside the intersection cluster, and the intersection dimension."""
    s = np.sort(np.asarray(cosines, dtype=float))[::-1]
    ambiguous = (s > 1 - AMBIGUOUS_TOL) & (s <= 1 - INTERSECTION_TOL)
    if ambiguous.any():
        raise PrecisionError(f"singular value {s[ambiguous][0]!r} too close to 1 to classify")
    inter = int(np.sum(s > 1 - INTERSECTION_TOL))
    rest = s[inter:]
    return (float(rest[0]) if len(rest) else 0.0), inter


@dataclass(frozen=True)
class SubspacePair:
    """Ground spaces of the two overlapping Y-graphs inside the G-graph space.

    ``left[a]`` is a kernel vector of h_v reshaped to (dim G_L, dim C_n);
    ``right[b]`` a kernel vector of h_w reshaped to (dim C_n, dim G_R). The
    subspaces are ``span{left_a (x) e_r}`` and ``span{e_l (x) right_b}``.
    """

    left: np.ndarray
    right: np.ndarray

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.left.shape[1], self.left.shape[2], self.right.shape[2]

    @property
    def ambient_dim(self) -> int:
        dl, dc, dr = self.dims
        return dl * dc * dr

    def overlap(self) -> np.ndarray:
        """``M[(a, r), (l, b)] = sum_c conj(left_a[l, c]) right_b[c, r]``."""
        X, Y = self.left, self.right
        M = np.einsum("alc,bcr->arlb", X.conj(), Y)
        return M.reshape(X.shape[0] * Y.shape[2], X.shape[1] * Y.shape[0])

    def cosines_dense(self) -> np.ndarray:
        return np.linalg.svd(self.overlap(), compute_uv=False)

    def cosines_factored(self) -> np.ndarray:
        """Same cosines without forming the overlap.

        ``M = A B`` through the index ``(a, c, b)``; the nonzero squared singular
        values of M are the eigenvalues of ``(A^* A)(B B^*)``, both of which are
        small Kronecker products of reduced Gram matrices.
        """
        X, Y = self.left, self.right
        ka, kb = X.shape[0], Y.shape[0]
        dc = X.shape[2]
        gx = np.einsum("alc,ble->acbe", X.conj(), X)  # B B^*: [a c, a' c'] (x) 1_b
        gy = np.einsum("bcr,der->cbed", Y.conj(), Y)  # A^* A: 1_a (x) [c b, c' b']
        eye_a, eye_b = np.eye(ka), np.eye(kb)
        n = ka * dc * kb
        bbh = np.einsum("acxe,bd->acbxed", gx, eye_b).reshape(n, n)
        aha = np.einsum("ax,cbed->acbxed", eye_a, gy).reshape(n, n)
        # symmetrize: eig(K L) = eig(K^1/2 L K^1/2) for PSD K, L
        w, u = np.linalg.eigh(0.5 * (aha + aha.conj().T))
        root = (u * np.sqrt(np.clip(w, 0, None))) @ u.conj().T
        sym = root @ bbh @ root
        ev = np.linalg.eigvalsh(0.5 * (sym + sym.conj().T))[::-1]
        return np.sqrt(np.clip(ev, 0, None))

    def swapped(self) -> "SubspacePair":
        """Mirror image: the right family becomes the left one."""
        return SubspacePair(np.transpose(self.right, (0, 2, 1)), np.transpose(self.left, (0, 2, 1)))


@lru_cache(maxsize=4)
def y_kernels(n: int) -> SubspacePair:
    """Kernel bases of h_v and h_w on the G-graph with decoration number ``n``."""
    g = build_g_graph(n)
    gl, cn, gr = g.region("GL"), g.region("CN"), g.region("GR")
    yv = g.subgraph(gl + cn)
    yw = g.subgraph(cn + gr)
    dl = int(np.prod([g.vertex(i).two_s + 1 for i in gl]))
    dc = 3**n
    dr = int(np.prod([g.vertex(i).two_s + 1 for i in gr]))
    xi = kernel_basis(hamiltonian(yv))
    eta = kernel_basis(hamiltonian(yw))
    return SubspacePair(xi.T.reshape(-1, dl, dc), eta.T.reshape(-1, dc, dr))


def epsilon_exact(n: int, allow_large_n: bool = False, method: str = "factored",
                  return_details: bool = False):
    """Exact ``||P_1 P_2 - P_1 ^ P_2||`` for the two Y-graph ground spaces in G(n).

    ``method`` is ``"factored"`` (reduced Gram matrices) or ``"dense"`` (SVD of
    the full overlap; only sensible for n = 1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 2 and not allow_large_n:
        raise ValueError(f"epsilon_exact({n}) needs allow_large_n=True (kernel Lanczos at dim 4*3^{3 * n})")
    if n > 3:
        raise ValueError("epsilon_exact is limited to n <= 3")
    pair = y_kernels(n)
    if method == "factored":
        s = pair.cosines_factored()
    elif method == "dense":
        s = pair.cosines_dense()
    else:
        raise ValueError(f"unknown method {method!r}")
    eps, inter = epsilon_from_cosines(s)
    log.info("epsilon_exact(%d) = %.12g, intersection dim %d", n, eps, inter)
    if return_details:
        return eps, inter, pair
    return eps


# ---------------------------------------------------------------------------
# projector inequality

def _check_projector(P: np.ndarray, name: str, tol: float = 1e-10) -> None:
    if np.max(np.abs(P @ P - P)) > tol or np.max(np.abs(P - P.conj().T)) > tol:
        raise ValueError(f"{name} is not an orthogonal projector")


def meet_projector(E: np.ndarray, F: np.ndarray, tol: float = INTERSECTION_TOL) -> np.ndarray:
    """Projector onto ``ran E`` intersected with ``ran F``."""
    _, s, vh = np.linalg.svd(E @ F)
    v = vh[s > 1 - tol].conj().T
    return v @ v.conj().T


def fnw_check(E: np.ndarray, F: np.ndarray) -> float:
    """Smallest eigenvalue of ``EF + FE + ||EF - E^F|| (E + F)``; non-negative up to round-off."""
    E, F = np.asarray(E, dtype=complex), np.asarray(F, dtype=complex)
    _check_projector(E, "E")
    _check_projector(F, "F")
    meet = meet_projector(E, F)
    c = np.linalg.norm(E @ F - meet, 2)
    X = E @ F + F @ E + c * (E + F)
    return float(np.linalg.eigvalsh(0.5 * (X + X.conj().T))[0])


def random_projector(dim: int, rank: int, rng: np.random.Generator, shared=None) -> np.ndarray:
    """Projector onto a random ``rank``-dimensional subspace, optionally containing ``shared`` columns."""
    cols = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    if shared is not None and shared.shape[1]:
        cols = np.concatenate([shared, cols[:, : rank - shared.shape[1]]], axis=1)
    q, _ = np.linalg.qr(cols)
    return q @ q.conj().T


def fnw_sweep(trials: int, seed: int, dims=(4, 12)) -> float:
    """Worst FNW residual over seeded random projector pairs; some pairs share a subspace."""
    rng = np.random.default_rng(seed)
    worst = np.inf
    for t in range(trials):
        dim = int(rng.integers(dims[0], dims[1] + 1))
        re = int(rng.integers(1, dim))
        rf = int(rng.integers(1, dim))
        shared = None
        if t % 4 == 0:
            m = int(rng.integers(1, min(re, rf) + 1))
            shared = np.linalg.qr(rng.normal(size=(dim, m)) + 1j * rng.normal(size=(dim, m)))[0]
        E = random_projector(dim, re, rng, shared)
        F = random_projector(dim, rf, rng, shared)
        worst = min(worst, fnw_check(E, F))
    return float(worst)


def as_linear_operator(H) -> LinearOperator:
    return aslinearoperator(_as_operator(H))


SPARSE_ASSEMBLY_LIMIT = 2_000_000


def y_graph_gap(n: int, seed: int = 0) -> float:
    """gamma_Y: gap of h_v above its 8-dimensional kernel.

    Above ``SPARSE_ASSEMBLY_LIMIT`` the Hamiltonian is applied matrix-free.
    """
    g = build_y_graph(n)
    H = hamiltonian(g) if g.hilbert_dim <= SPARSE_ASSEMBLY_LIMIT else hamiltonian_operator(g)
    return gap_above_kernel(H, 8, seed=seed)
