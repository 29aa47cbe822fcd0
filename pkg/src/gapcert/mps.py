"""MPS/PEPS tensors of the decorated AKLT model, transfer operators and bounds.

Conventions
-----------
* A :class:`SiteTensor` stores ``d`` matrices of shape ``(d_out, d_in)``; the
  physical index is the leading array axis, in descending-``m`` order.
* Matrices are vectorized row-major, ``vec(B)[i * D + j] = B[i, j]``, so that
  ``vec(A B C) = kron(A, C.T) vec(B)``.
* A transfer operator built from a site tensor is ``B -> sum_i V_i^* B V_i``; it
  maps ``M_{d_out}`` to ``M_{d_in}``.
* Superoperator adjoints are taken with respect to the Hilbert-Schmidt pairing
  ``<A, B> = Tr A^* B``; in the vectorized picture this is the conjugate transpose
  of the representing matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spin import spin_matrices

D_BULK = 2


# ---------------------------------------------------------------------------
# site tensors

@dataclass(frozen=True)
class SiteTensor:
    matrices: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrices, dtype=complex)
        if m.ndim != 3:
            raise ValueError("matrices must have shape (d, d_out, d_in)")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrices", m)

    @property
    def d(self) -> int:
        return self.matrices.shape[0]

    @property
    def d_out(self) -> int:
        return self.matrices.shape[1]

    @property
    def d_in(self) -> int:
        return self.matrices.shape[2]

    def __getitem__(self, i):
        return self.matrices[i]

    def __len__(self):
        return self.d


def then(first: SiteTensor, second: SiteTensor) -> SiteTensor:
    """Tensor for ``first`` followed by ``second`` along the bond.

    Matrix for the physical pair ``(p, q)`` is ``second[q] @ first[p]``; the
    physical index of ``first`` is the more significant one.
    """
    if first.d_out != second.d_in:
        raise ValueError(f"bond mismatch: {first.d_out} -> {second.d_in}")
    m = np.einsum("qxy,pyz->pqxz", second.matrices, first.matrices)
    return SiteTensor(m.reshape(first.d * second.d, second.d_out, first.d_in))


def parallel(a: SiteTensor, b: SiteTensor) -> SiteTensor:
    """Two tensors side by side: matrices ``kron(a_i, b_j)`` indexed ``i * b.d + j``."""
    m = np.einsum("iab,jcd->ijacbd", a.matrices, b.matrices)
    return SiteTensor(m.reshape(a.d * b.d, a.d_out * b.d_out, a.d_in * b.d_in))


def repeat(t: SiteTensor, n: int) -> SiteTensor:
    """``n`` copies of ``t`` in a row (``n = 0`` gives the trivial identity tensor)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if t.d_in != t.d_out and n > 1:
        raise ValueError("repeat needs a square tensor")
    out = SiteTensor(np.eye(t.d_in)[None])
    for _ in range(n):
        out = then(out, t)
    return out


def _sym_intertwiner(num_halves: int) -> np.ndarray:
    """Rows are the symmetric states of ``num_halves`` spin-1/2's, m descending."""
    n = num_halves
    rows = np.zeros((n + 1, 2**n))
    for idx in range(2**n):
        downs = bin(idx).count("1")  # bit 0 = up, 1 = down
        rows[downs, idx] = 1.0
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def singlet_matrix() -> np.ndarray:
    """K = (|up><down| - |down><up|)/sqrt(2) = sqrt(2) i S^Y."""
    return math.sqrt(2) * 1j * spin_matrices(1).sy


def sym_matrices(num_halves: int) -> np.ndarray:
    """Virtual-space matrices of the spin-``num_halves/2`` intertwiner.

    Entry ``[k, x, yz...]`` is the amplitude of ``<x yz...|`` in the symmetric
    state with magnetization index ``k``; the first virtual spin is the row.
    """
    rows = _sym_intertwiner(num_halves)
    return rows.reshape(num_halves + 1, 2, 2 ** (num_halves - 1))


def aklt_site_tensor() -> SiteTensor:
    """Spin-1 AKLT chain tensor ``V_i = (2/sqrt 3) K P_i`` for i = 1, 0, -1.

    This gives ``V_1 = -sqrt(2/3) S^-``, ``V_0 = (2/sqrt 3) S^Z`` and
    ``V_-1 = sqrt(2/3) S^+`` in the spin-1/2 representation.
    """
    K = singlet_matrix()
    P = sym_matrices(2)
    return SiteTensor(np.stack([2 / math.sqrt(3) * K @ p for p in P]))


def aklt_boundary_tensors() -> tuple[SiteTensor, SiteTensor]:
    """Hub tensors ``W^L_k = sqrt2 K P_k`` (2x4) and ``W^R_k = 2 (K x K) P_k^*`` (4x2).

    ``k`` runs over 3/2, 1/2, -1/2, -3/2.
    """
    K = singlet_matrix()
    P = sym_matrices(3)
    left = np.stack([math.sqrt(2) * K @ p for p in P])
    KK = np.kron(K, K)
    right = np.stack([2 * KK @ p.conj().T for p in P])
    return SiteTensor(left), SiteTensor(right)


def leg_pair_tensor() -> SiteTensor:
    """Two parallel spin-1 sites, physical index ``3 * i + j``."""
    v = aklt_site_tensor()
    return parallel(v, v)


def left_boundary_tensor(n: int) -> SiteTensor:
    """T^L for G_L: n leg pairs (outermost first) followed by the hub v."""
    wl, _ = aklt_boundary_tensors()
    return then(repeat(leg_pair_tensor(), n), wl)


def right_boundary_tensor(n: int) -> SiteTensor:
    """T^R for G_R: the hub w followed by n leg pairs (nearest first)."""
    _, wr = aklt_boundary_tensors()
    return then(wr, repeat(leg_pair_tensor(), n))


# ---------------------------------------------------------------------------
# transfer operators

def vec(B: np.ndarray) -> np.ndarray:
    return np.asarray(B, dtype=complex).reshape(-1)


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim)


@dataclass(frozen=True)
class TransferOperator:
    """Linear map ``M_{dim_in} -> M_{dim_out}`` stored as a (dim_out^2, dim_in^2) matrix."""

    rep: np.ndarray
    dim_in: int
    dim_out: int

    def __post_init__(self):
        rep = np.asarray(self.rep, dtype=complex)
        if rep.shape != (self.dim_out**2, self.dim_in**2):
            raise ValueError(
                f"rep shape {rep.shape} inconsistent with M_{self.dim_in} -> M_{self.dim_out}"
            )
        rep = rep.copy()
        rep.setflags(write=False)
        object.__setattr__(self, "rep", rep)

    def __call__(self, B: np.ndarray) -> np.ndarray:
        B = np.asarray(B)
        if B.shape != (self.dim_in, self.dim_in):
            raise ValueError(f"expected a {self.dim_in}x{self.dim_in} matrix, got {B.shape}")
        return unvec(self.rep @ vec(B), self.dim_out)

    def __matmul__(self, other: "TransferOperator") -> "TransferOperator":
        """Composition ``self o other`` (``other`` acts first)."""
        if other.dim_out != self.dim_in:
            raise ValueError(f"cannot compose M_{other.dim_out} output with M_{self.dim_in} input")
        return TransferOperator(self.rep @ other.rep, other.dim_in, self.dim_out)

    def __sub__(self, other: "TransferOperator") -> "TransferOperator":
        _same_shape(self, other)
        return TransferOperator(self.rep - other.rep, self.dim_in, self.dim_out)

    def __add__(self, other: "TransferOperator") -> "TransferOperator":
        _same_shape(self, other)
        return TransferOperator(self.rep + other.rep, self.dim_in, self.dim_out)

    @property
    def is_square(self) -> bool:
        return self.dim_in == self.dim_out

    def choi(self) -> np.ndarray:
        """``sum_ij |i><j| (x) e(|i><j|)``."""
        d = self.dim_in
        out = np.zeros((d * self.dim_out,) * 2, dtype=complex)
        for i in range(d):
            for j in range(d):
                unit = np.zeros((d, d))
                unit[i, j] = 1.0
                out += np.kron(unit, self(unit))
        return out

    def hs_norm(self) -> float:
        """Norm induced by the Hilbert-Schmidt norm (largest singular value of rep)."""
        return float(np.linalg.norm(self.rep, 2))

    def spectrum(self) -> np.ndarray:
        if not self.is_square:
            raise ValueError("spectrum of a non-square map")
        ev = np.linalg.eigvals(self.rep)
        return ev[np.argsort(-np.abs(ev), kind="stable")]


def _same_shape(a: TransferOperator, b: TransferOperator) -> None:
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise ValueError("transfer operators act between different spaces")


def transfer_operator(t: SiteTensor) -> TransferOperator:
    """``B -> sum_i t_i^* B t_i``."""
    rep = sum(np.kron(m.conj().T, m.T) for m in t.matrices)
    return TransferOperator(rep, t.d_out, t.d_in)


def transpose(e: TransferOperator) -> TransferOperator:
    """Hilbert-Schmidt adjoint: ``Tr A^* e(B) = Tr (e^t(A))^* B``."""
    return TransferOperator(e.rep.conj().T, e.dim_out, e.dim_in)


def identity_map(dim: int) -> TransferOperator:
    return TransferOperator(np.eye(dim * dim), dim, dim)


def rank_one_map(X: np.ndarray, Y: np.ndarray) -> TransferOperator:
    """``|X><Y|``: ``B -> X Tr(Y^* B)``."""
    X, Y = np.asarray(X, dtype=complex), np.asarray(Y, dtype=complex)
    return TransferOperator(np.outer(vec(X), vec(Y).conj()), Y.shape[0], X.shape[0])


def power(e: TransferOperator, n: int) -> TransferOperator:
    if not e.is_square:
        raise ValueError("power of a non-square map")
    if n < 0:
        raise ValueError("n must be non-negative")
    return TransferOperator(np.linalg.matrix_power(e.rep, n), e.dim_in, e.dim_in)


def tensor(e1: TransferOperator, e2: TransferOperator) -> TransferOperator:
    """``e1 (x) e2`` acting on ``M_a (x) M_b = M_{ab}`` (row-major Kronecker layout)."""
    a_in, b_in, a_out, b_out = e1.dim_in, e2.dim_in, e1.dim_out, e2.dim_out
    r1 = e1.rep.reshape(a_out, a_out, a_in, a_in)
    r2 = e2.rep.reshape(b_out, b_out, b_in, b_in)
    # out (i1 i2),(j1 j2)  in (k1 k2),(l1 l2)
    r = np.einsum("ijkl,mnop->imjnkolp", r1, r2)
    return TransferOperator(
        r.reshape((a_out * b_out) ** 2, (a_in * b_in) ** 2), a_in * b_in, a_out * b_out
    )


def compose_and_power(parts, counts=None) -> TransferOperator:
    """``parts[0]^counts[0] o parts[1]^counts[1] o ...`` (the last part acts first)."""
    parts = list(parts)
    if not parts:
        raise ValueError("need at least one transfer operator")
    counts = [1] * len(parts) if counts is None else list(counts)
    if len(counts) != len(parts):
        raise ValueError("one repetition count per part")
    out = None
    for e, k in zip(parts, counts):
        piece = power(e, k) if k != 1 else e
        out = piece if out is None else out @ piece
    return out


# ---------------------------------------------------------------------------
# fixed points and decay

@dataclass(frozen=True)
class FixedPoint:
    rho: np.ndarray
    primitive: bool
    second_modulus: float

    @property
    def spectral_gap_of_map(self) -> float:
        return 1.0 - self.second_modulus


def fixed_point(e: TransferOperator, tol: float = 1e-10) -> FixedPoint:
    """Fixed-point density matrix of ``e^t`` for a unital map ``e``.

    ``primitive`` is false when the peripheral eigenvalue 1 is degenerate, when
    another eigenvalue sits on the unit circle, or when rho is singular.
    """
    if not e.is_square:
        raise ValueError("fixed point needs a square map")
    D = e.dim_in
    one = np.eye(D)
    if np.max(np.abs(e(one) - one)) > tol:
        raise ValueError("transfer operator is not unital")
    et = transpose(e)
    ev = np.linalg.eigvals(et.rep)
    mods = np.sort(np.abs(ev))[::-1]
    # eigenspace of e^t at 1, then project the maximally mixed state onto it
    _, s, vh = np.linalg.svd(et.rep - np.eye(D * D))
    null = vh[s < 1e-8 * max(1.0, s[0])].conj().T
    target = vec(one / D)
    rho = unvec(null @ (null.conj().T @ target), D)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    peripheral = int(np.sum(mods > 1 - 1e-9))
    rho_min = float(np.linalg.eigvalsh(rho)[0])
    primitive = peripheral == 1 and rho_min > tol
    second = float(mods[1]) if len(mods) > 1 else 0.0
    return FixedPoint(rho, primitive, second)


def a_of_n(e: TransferOperator, rho: np.ndarray, n: int) -> float:
    """``||e^n - |1><rho| ||`` in the Hilbert-Schmidt-induced norm.

    Evaluated as ``||(e - |1><rho|)^n||``, which equals the same operator when
    ``e(1) = 1`` and ``e^t(rho) = rho`` and keeps relative precision for large n.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    D = e.dim_in
    proj = rank_one_map(np.eye(D), rho)
    if n == 0:
        return (identity_map(D) - proj).hs_norm()
    return power(e - proj, n).hs_norm()


def aklt_a_closed_form(n: int) -> float:
    return 3.0 ** (-n)


def bulk_transfer() -> TransferOperator:
    return transfer_operator(aklt_site_tensor())


def left_hub_transfer() -> TransferOperator:
    """``B -> sum_k (W^L_k)^* B W^L_k`` from M_2 to M_4."""
    return transfer_operator(aklt_boundary_tensors()[0])


def right_hub_transfer() -> TransferOperator:
    """``B -> sum_k (W^R_k)^* B W^R_k`` from M_4 to M_2."""
    return transfer_operator(aklt_boundary_tensors()[1])


def spin_half():
    return spin_matrices(1)


def s_dot_s() -> np.ndarray:
    h = spin_half()
    return sum(np.kron(a, a) for a in (h.sx, h.sy, h.sz))


def omega(axis: str) -> np.ndarray:
    h = spin_half()
    s = {"X": h.sx, "Y": h.sy, "Z": h.sz}[axis]
    return np.kron(s, np.eye(2)) + np.kron(np.eye(2), s)


def bulk_power_closed_form(n: int) -> TransferOperator:
    """``|1><rho| + 2 (-1)^n 3^-n sum_U |S^U><S^U|``."""
    h = spin_half()
    out = rank_one_map(np.eye(2), np.eye(2) / 2)
    c = 2 * (-1) ** n / 3.0**n
    for s in (h.sx, h.sy, h.sz):
        out = out + TransferOperator(c * rank_one_map(s, s).rep, 2, 2)
    return out


def left_transfer_closed_form(n: int) -> TransferOperator:
    h = spin_half()
    rho = np.eye(2) / 2
    out = rank_one_map(np.eye(4), rho)
    c = 2 * (-1) ** (n + 1) / 3.0 ** (n + 1)
    for U, s in zip("XYZ", (h.sx, h.sy, h.sz)):
        out = out + TransferOperator(c * rank_one_map(omega(U), s).rep, 2, 4)
    out = out + TransferOperator(4 / 3.0 ** (2 * n + 1) * rank_one_map(s_dot_s(), rho).rep, 2, 4)
    return out


def left_transfer(n: int) -> TransferOperator:
    """``E_L = (E^n (x) E^n) o E^left-hub``, M_2 -> M_4."""
    en = power(bulk_transfer(), n)
    return tensor(en, en) @ left_hub_transfer()


def right_transfer(n: int) -> TransferOperator:
    """``E_R = E^right-hub o (E^n (x) E^n)``, M_4 -> M_2."""
    en = power(bulk_transfer(), n)
    return right_hub_transfer() @ tensor(en, en)


@dataclass(frozen=True)
class QData:
    n: int
    Q_L: np.ndarray
    Q_R: np.ndarray
    q_L: float
    q_R: float
    norm_EL: float
    norm_ER: float
    E_L: TransferOperator = field(repr=False)
    E_R: TransferOperator = field(repr=False)


def q_matrices(n: int, tol: float = 1e-12) -> QData:
    """Boundary Gram operators ``Q_L = E_L(1)`` and ``Q_R = E_R^t(rho)``.

    ``Q_L`` is checked against ``1 + 4/3^(2n+1) S.S`` and ``Q_R`` against
    ``Q_L / 2``. Both superoperator norms are taken as ``||Q_L||``: for the
    completely positive ``E_L`` this is its operator norm, and ``E_R = E_L^t``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    E_L, E_R = left_transfer(n), right_transfer(n)
    rho = fixed_point(bulk_transfer()).rho
    Q_L = E_L(np.eye(2))
    Q_R = transpose(E_R)(rho)
    closed = np.eye(4) + 4 / 3.0 ** (2 * n + 1) * s_dot_s()
    if np.max(np.abs(Q_L - closed)) > tol:
        raise RuntimeError("Q_L disagrees with its closed form")
    if np.max(np.abs(Q_R - Q_L / 2)) > tol:
        raise RuntimeError("Q_R differs from Q_L / 2")
    if np.max(np.abs(E_R.rep - transpose(E_L).rep)) > tol:
        raise RuntimeError("E_R is not the transpose of E_L")
    ql = np.linalg.eigvalsh(0.5 * (Q_L + Q_L.conj().T))
    qr = np.linalg.eigvalsh(0.5 * (Q_R + Q_R.conj().T))
    return QData(n, Q_L, Q_R, float(ql[0]), float(qr[0]), float(ql[-1]), float(ql[-1]), E_L, E_R)


# ---------------------------------------------------------------------------
# bounds

@dataclass(frozen=True)
class BoundSuite:
    n: int
    a_n: float
    b_n: float
    D: int
    rho_min: float
    trace_rho_inv: float
    q_L: float
    q_R: float
    norm_EL: float
    norm_ER: float
    b_L: float
    b_R: float
    b_G: float
    b_LR: float
    A_n: float
    eps_bound: float
    denominators_positive: bool

    @property
    def valid(self) -> bool:
        return self.denominators_positive and self.eps_bound < 1 / 3


def generic_bound_suite(
    a_n: float,
    D: int,
    rho_min: float,
    trace_rho_inv: float,
    q_L: float,
    q_R: float,
    norm_EL: float,
    norm_ER: float,
    n: int = 0,
) -> BoundSuite:
    """Overlap bound for any chain MPS joining two boundary patches.

    ``eps <= c + c^2 (1 + b_G)`` with ``c = b / sqrt(1 - b_LR)``. The bound only
    applies while ``b_L < 1`` and ``b_R < 1`` (``denominators_positive``); the
    formula value is still reported outside that regime when it is finite.
    """
    b_n = a_n * trace_rho_inv
    b_L = a_n * D**2 * norm_EL / (rho_min * q_L)
    b_R = a_n * D**2 * norm_ER / q_R
    b_G = a_n * D**2 * norm_EL * norm_ER / (q_L * q_R)
    b_LR = b_L + b_R - b_L * b_R
    ok = b_L < 1 and b_R < 1
    if 1 - b_LR > 0:
        c = b_n / math.sqrt(1 - b_LR)
        eps = c + c * c * (1 + b_G)
    else:
        c = eps = math.inf
    return BoundSuite(
        n, a_n, b_n, D, rho_min, trace_rho_inv, q_L, q_R, norm_EL, norm_ER,
        b_L, b_R, b_G, b_LR, c, eps, ok,
    )


def bound_suite(n: int) -> BoundSuite:
    """All constants of the overlap bound for the decorated AKLT model, computed numerically."""
    if n < 1:
        raise ValueError("n must be >= 1")
    E = bulk_transfer()
    fp = fixed_point(E)
    ev = np.linalg.eigvalsh(fp.rho)
    q = q_matrices(n)
    return generic_bound_suite(
        a_of_n(E, fp.rho, n), D_BULK, float(ev[0]), float(np.sum(1 / ev)),
        q.q_L, q.q_R, q.norm_EL, q.norm_ER, n,
    )


@dataclass(frozen=True)
class EpsilonBound:
    n: int
    A_n: float
    eps: float
    valid: bool
    one_minus_b_L: float


def aklt_one_minus_b_L(n: int) -> float:
    return 1 - 8 * (1 + 3.0 ** (-2 * n - 1)) / (3.0**n * (1 - 3.0 ** (-2 * n)))


def epsilon_bound(n: int, cross_check: bool = True) -> EpsilonBound:
    """Closed-form ``A_n`` and the resulting bound on the ground-space overlap.

    ``valid`` requires ``1 - b_L > 0`` and ``eps < 1/3``; ``eps`` is the raw
    formula value either way. With ``cross_check`` the closed form is compared
    against :func:`bound_suite`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    den = aklt_one_minus_b_L(n)
    A = 4 / (3.0**n * den)
    one_plus_bG = 1 + 8 * (1 + 3.0 ** (-2 * n - 1)) ** 2 / (3.0**n * (1 - 3.0 ** (-2 * n)) ** 2)
    eps = A + A * A * one_plus_bG
    valid = den > 0 and eps < 1 / 3
    if cross_check and den > 0:
        s = bound_suite(n)
        for got, want in ((s.A_n, A), (1 + s.b_G, one_plus_bG), (s.eps_bound, eps)):
            if not math.isclose(got, want, rel_tol=1e-9):
                raise RuntimeError(f"bound suite {got!r} disagrees with closed form {want!r}")
    return EpsilonBound(n, A, eps, valid, den)


# ---------------------------------------------------------------------------
# MPS states

MAX_STATE_ENTRIES = 2**26


def _boundary(t: SiteTensor | None, dim: int) -> SiteTensor:
    return SiteTensor(np.eye(dim)[None]) if t is None else t


def gamma_state(
    n: int,
    B: np.ndarray,
    left: SiteTensor | None = None,
    right: SiteTensor | None = None,
    site: SiteTensor | None = None,
) -> np.ndarray:
    """``sum Tr[B T^R_r V_in ... V_i1 T^L_l] |l> |i_1..i_n> |r>`` as a flat vector.

    ``left``/``right`` default to the trivial (absent) boundary.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    site = aklt_site_tensor() if site is None else site
    D = site.d_in
    left, right = _boundary(left, D), _boundary(right, D)
    if left.d_out != D or right.d_in != D:
        raise ValueError("boundary tensors do not match the chain bond dimension")
    B = np.asarray(B, dtype=complex)
    if B.shape != (left.d_in, right.d_out):
        raise ValueError(f"B must be {left.d_in}x{right.d_out}, got {B.shape}")
    size = left.d * site.d**n * right.d
    if size > MAX_STATE_ENTRIES:
        raise MemoryError(f"state has {size} entries; use gram_matrix instead")
    chain = repeat(site, n)
    psi = np.einsum("ab,rbc,icd,lda->lir", B, right.matrices, chain.matrices, left.matrices)
    return psi.reshape(-1)


def double_layer(t: SiteTensor) -> np.ndarray:
    """``sum_i kron(t_i, conj t_i)``."""
    return np.einsum("iab,icd->acbd", t.matrices, t.matrices.conj()).reshape(
        t.d_out**2, t.d_in**2
    )


def gram_matrix(
    n: int,
    left: SiteTensor | None = None,
    right: SiteTensor | None = None,
    site: SiteTensor | None = None,
) -> np.ndarray:
    """Gram matrix ``<Gamma(E_ab), Gamma(E_cd)>`` over matrix units of the boundary space.

    Rows/columns are indexed ``a * D_R + b`` for ``E_ab`` in ``M_{D_L x D_R}``.
    Contracted site by site; never forms the physical state.
    """
    site = aklt_site_tensor() if site is None else site
    D = site.d_in
    left, right = _boundary(left, D), _boundary(right, D)
    S = double_layer(left)
    chain = double_layer(site)
    for _ in range(n):
        S = chain @ S
    S = double_layer(right) @ S
    DL, DR = left.d_in, right.d_out
    S4 = S.reshape(DR, DR, DL, DL)  # [d, b, c, a]
    return np.einsum("dbca->abcd", S4).reshape(DL * DR, DL * DR)


def gram_from_states(
    n: int,
    left: SiteTensor | None = None,
    right: SiteTensor | None = None,
    site: SiteTensor | None = None,
) -> np.ndarray:
    """Same as :func:`gram_matrix` but from explicitly built state vectors."""
    site = aklt_site_tensor() if site is None else site
    D = site.d_in
    DL = _boundary(left, D).d_in
    DR = _boundary(right, D).d_out
    cols = []
    for a in range(DL):
        for b in range(DR):
            unit = np.zeros((DL, DR))
            unit[a, b] = 1.0
            cols.append(gamma_state(n, unit, left, right, site))
    V = np.stack(cols, axis=1)
    return V.conj().T @ V


# ---------------------------------------------------------------------------
# norm equivalences

SANDWICH_CASES = ("chain", "left", "right", "G")


def _sandwich_setup(n: int, case: str):
    """Gram matrix, reference inner-product matrix and b-constant for one geometry."""
    rho = fixed_point(bulk_transfer()).rho
    a = a_of_n(bulk_transfer(), rho, n)
    if case == "chain":
        gram = gram_matrix(n)
        shape = (D_BULK, D_BULK)
        metric = lambda B: np.trace(rho @ B.conj().T @ B)
        b = a * float(np.trace(np.linalg.inv(rho)).real)
        return gram, shape, metric, b
    q = q_matrices(n)
    s = bound_suite(n)
    if case == "left":
        gram = gram_matrix(n, left=left_boundary_tensor(n))
        shape = (4, D_BULK)
        metric = lambda B: np.trace(rho @ B.conj().T @ q.Q_L @ B)
        return gram, shape, metric, s.b_L
    if case == "right":
        gram = gram_matrix(n, right=right_boundary_tensor(n))
        shape = (D_BULK, 4)
        metric = lambda B: np.trace(q.Q_R @ B.conj().T @ B)
        return gram, shape, metric, s.b_R
    if case == "G":
        gram = gram_matrix(n, left=left_boundary_tensor(n), right=right_boundary_tensor(n))
        shape = (4, 4)
        metric = lambda B: np.trace(q.Q_R @ B.conj().T @ q.Q_L @ B)
        return gram, shape, metric, s.b_G
    raise ValueError(f"case must be one of {SANDWICH_CASES}, got {case!r}")


def norm_sandwich_check(n: int, samples: int = 100, case: str = "chain", seed: int = 0,
                        matrices=None) -> float:
    """Largest relative violation of ``||B|| sqrt(1-b) <= ||Gamma(B)|| <= ||B|| sqrt(1+b)``.

    ``||B||`` is the geometry's reference norm (``rho``-weighted for the bare
    chain, ``Q``-weighted with boundary patches). Returns 0 when the sandwich
    holds for every sample. Gaussian samples are drawn from ``seed`` unless
    ``matrices`` are given.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gram, shape, metric, b = _sandwich_setup(n, case)
    if b > 1:
        raise ValueError(f"b = {b:.6g} > 1; the lower bound is vacuous for n={n}, case={case!r}")
    if matrices is None:
        rng = np.random.default_rng(seed)
        matrices = [rng.normal(size=shape) + 1j * rng.normal(size=shape) for _ in range(samples)]
    worst = 0.0
    for B in matrices:
        B = np.asarray(B, dtype=complex)
        if B.shape != shape:
            raise ValueError(f"expected {shape} matrices for case {case!r}, got {B.shape}")
        ref2 = float(metric(B).real)
        if ref2 <= 0:
            continue
        v = vec(B)
        psi2 = float((v.conj() @ gram @ v).real)
        ref = math.sqrt(ref2)
        lo, hi = ref * math.sqrt(1 - b), ref * math.sqrt(1 + b)
        psi = math.sqrt(max(psi2, 0.0))
        worst = max(worst, (lo - psi) / ref, (psi - hi) / ref)
    return worst
