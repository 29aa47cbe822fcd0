"""Single-site spin matrices, two-site total-spin projectors and sparse embedding.

Local basis order is descending magnetic quantum number, ``|s>, |s-1>, ..., |-s>``.
Tensor factors are ordered by ascending site index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse


@dataclass(frozen=True)
class SpinOperators:
    """Spin-``two_s/2`` representation matrices."""

    two_s: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray

    @property
    def dim(self) -> int:
        return self.two_s + 1

    @property
    def spin(self) -> float:
        return self.two_s / 2

    def casimir(self) -> np.ndarray:
        return self.sx @ self.sx + self.sy @ self.sy + self.sz @ self.sz


@lru_cache(maxsize=None)
def _spin_matrices(two_s: int) -> SpinOperators:
    s = two_s / 2
    m = s - np.arange(two_s + 1)
    # <m+1|S+|m> sits one row above the diagonal in descending order
    ladder = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    s_plus = np.diag(ladder, 1).astype(complex)
    s_minus = s_plus.conj().T.copy()
    sx = 0.5 * (s_plus + s_minus)
    sy = -0.5j * (s_plus - s_minus)
    sz = np.diag(m).astype(complex)
    for a in (sx, sy, sz, s_plus, s_minus):
        a.setflags(write=False)
    return SpinOperators(two_s, sx, sy, sz, s_plus, s_minus)


def spin_matrices(two_s: int) -> SpinOperators:
    """Return the spin matrices for spin ``two_s/2``.

    The returned arrays are read-only and cached.
    """
    if int(two_s) != two_s or two_s < 1:
        raise ValueError(f"two_s must be a positive integer, got {two_s!r}")
    return _spin_matrices(int(two_s))


def _check_cg_range(two_s_a: int, two_s_b: int, two_J: int) -> None:
    if not abs(two_s_a - two_s_b) <= two_J <= two_s_a + two_s_b:
        raise ValueError(
            f"2J={two_J} outside the coupling range of spins {two_s_a}/2 and {two_s_b}/2"
        )
    if (two_J - two_s_a - two_s_b) % 2:
        raise ValueError(f"2J={two_J} has the wrong parity for 2s_a={two_s_a}, 2s_b={two_s_b}")


def total_spin_casimir(two_s_a: int, two_s_b: int) -> np.ndarray:
    """(S_a + S_b)^2 on C^{2s_a+1} (x) C^{2s_b+1}."""
    a, b = spin_matrices(two_s_a), spin_matrices(two_s_b)
    ia, ib = np.eye(a.dim), np.eye(b.dim)
    out = np.zeros((a.dim * b.dim,) * 2, dtype=complex)
    for oa, ob in ((a.sx, b.sx), (a.sy, b.sy), (a.sz, b.sz)):
        tot = np.kron(oa, ib) + np.kron(ia, ob)
        out += tot @ tot
    return out


@lru_cache(maxsize=None)
def _projector(two_s_a: int, two_s_b: int, two_J: int) -> np.ndarray:
    evals, evecs = np.linalg.eigh(total_spin_casimir(two_s_a, two_s_b))
    J = two_J / 2
    sel = np.abs(evals - J * (J + 1)) < 1e-9
    if sel.sum() != two_J + 1:
        raise RuntimeError(
            f"Casimir eigenvalue {J * (J + 1)} has multiplicity {sel.sum()}, expected {two_J + 1}"
        )
    v = evecs[:, sel]
    p = v @ v.conj().T
    # exact symmetrization; removes eigh round-off asymmetry
    p = 0.5 * (p + p.conj().T)
    p.setflags(write=False)
    return p


def total_spin_projector(two_s_a: int, two_s_b: int, two_J: int) -> np.ndarray:
    """Orthogonal projector onto total spin ``two_J/2`` of two spins.

    Built by diagonalizing the two-site Casimir and keeping the eigenvectors
    with eigenvalue J(J+1).
    """
    spin_matrices(two_s_a), spin_matrices(two_s_b)
    _check_cg_range(two_s_a, two_s_b, two_J)
    return _projector(int(two_s_a), int(two_s_b), int(two_J))


@dataclass(frozen=True)
class SparseHermitianOperator:
    """A sparse operator on a tensor product of local spaces."""

    matrix: sparse.csr_matrix
    local_dims: tuple[int, ...]

    def __post_init__(self):
        d = int(np.prod(self.local_dims, dtype=np.int64))
        if self.matrix.shape != (d, d):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match local dims {self.local_dims}"
            )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def dtype(self):
        return self.matrix.dtype

    def __add__(self, other: "SparseHermitianOperator") -> "SparseHermitianOperator":
        if tuple(other.local_dims) != tuple(self.local_dims):
            raise ValueError("operators act on different local spaces")
        return SparseHermitianOperator((self.matrix + other.matrix).tocsr(), self.local_dims)

    def __matmul__(self, other):
        return self.matrix @ other

    def triplets(self):
        """Canonically sorted (row, col, value) arrays."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order], coo.data[order]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0


def _eye(d: int) -> sparse.csr_matrix:
    return sparse.identity(d, dtype=complex, format="csr")


def embed_two_site(op, site_i: int, site_j: int, local_dims) -> SparseHermitianOperator:
    """Embed a two-site operator acting on ``(site_i, site_j)``.

    The first tensor factor of ``op`` acts on ``site_i``, the second on ``site_j``;
    identity everywhere else.
    """
    local_dims = tuple(int(d) for d in local_dims)
    n = len(local_dims)
    if site_i == site_j:
        raise ValueError("site_i and site_j must differ")
    for s in (site_i, site_j):
        if not 0 <= s < n:
            raise ValueError(f"site index {s} out of range for {n} sites")
    op = np.asarray(op.toarray() if sparse.issparse(op) else op, dtype=complex)
    di, dj = local_dims[site_i], local_dims[site_j]
    if op.shape != (di * dj, di * dj):
        raise ValueError(f"operator shape {op.shape} does not match local dims ({di}, {dj})")
    if site_i > site_j:
        op = op.reshape(di, dj, di, dj).transpose(1, 0, 3, 2).reshape(di * dj, di * dj)
        site_i, site_j, di, dj = site_j, site_i, dj, di
    left = int(np.prod(local_dims[:site_i], dtype=np.int64))
    mid = int(np.prod(local_dims[site_i + 1 : site_j], dtype=np.int64))
    right = int(np.prod(local_dims[site_j + 1 :], dtype=np.int64))
    blocks = op.reshape(di, dj, di, dj)
    total = None
    for a in range(di):
        for b in range(di):
            block = blocks[a, :, b, :]
            if not np.any(block):
                continue
            unit = sparse.csr_matrix(([1.0 + 0j], ([a], [b])), shape=(di, di))
            term = sparse.kron(unit, _eye(mid), format="csr")
            term = sparse.kron(term, sparse.csr_matrix(block), format="csr")
            total = term if total is None else total + term
    if total is None:
        total = sparse.csr_matrix((di * mid * dj,) * 2, dtype=complex)
    full = sparse.kron(sparse.kron(_eye(left), total, format="csr"), _eye(right), format="csr")
    full.eliminate_zeros()
    full.sort_indices()
    return SparseHermitianOperator(full, local_dims)


def apply_two_site(op: np.ndarray, site_i: int, site_j: int, local_dims, vec: np.ndarray) -> np.ndarray:
    """Apply a two-site operator to a state vector (or block of columns) without forming it."""
    local_dims = tuple(local_dims)
    di, dj = local_dims[site_i], local_dims[site_j]
    squeeze = vec.ndim == 1
    v = vec.reshape(local_dims + (-1,))
    o = np.asarray(op).reshape(di, dj, di, dj)
    out = np.tensordot(o, v, axes=([2, 3], [site_i, site_j]))
    out = np.moveaxis(out, [0, 1], [site_i, site_j])
    out = out.reshape(-1) if squeeze else out.reshape(vec.shape)
    return out
