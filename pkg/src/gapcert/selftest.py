"""Fast property checks runnable from an installed package (``gapcert selftest``)."""

from __future__ import annotations

import numpy as np

from .ed import epsilon_exact, fnw_sweep, kernel_basis
from .lattice import build_decorated_torus, build_y_graph, hamiltonian, local_hamiltonian
from .mps import (
    SANDWICH_CASES,
    a_of_n,
    bulk_power_closed_form,
    bulk_transfer,
    epsilon_bound,
    fixed_point,
    norm_sandwich_check,
    power,
    q_matrices,
)
from .spin import spin_matrices, total_spin_projector


def _spin_algebra():
    worst = 0.0
    for two_s in range(1, 9):
        s = spin_matrices(two_s)
        worst = max(worst, np.abs(s.sx @ s.sy - s.sy @ s.sx - 1j * s.sz).max())
        for a in (1, 2, 3):
            tot = sum(total_spin_projector(two_s, a, j) for j in range(abs(two_s - a), two_s + a + 1, 2))
            worst = max(worst, np.abs(tot - np.eye((two_s + 1) * (a + 1))).max())
    return worst < 1e-10, f"max error {worst:.1e}"


def _transfer():
    E = bulk_transfer()
    fp = fixed_point(E)
    err = max(abs(a_of_n(E, fp.rho, n) - 3.0**-n) for n in range(1, 13))
    err = max(err, max(np.abs(power(E, n).rep - bulk_power_closed_form(n).rep).max() for n in range(1, 11)))
    return err < 1e-12 and np.allclose(fp.rho, np.eye(2) / 2), f"max error {err:.1e}"


def _boundary():
    err = 0.0
    for n in range(1, 7):
        q = q_matrices(n)
        want = [1 - 3.0 ** (-2 * n)] * 1 + [1 + 3.0 ** (-2 * n - 1)] * 3
        err = max(err, np.abs(np.linalg.eigvalsh(q.Q_L) - want).max())
    return err < 1e-12, f"max error {err:.1e}"


def _bound():
    eps = [epsilon_bound(n, cross_check=n < 10).eps for n in range(3, 51)]
    ok = all(e < 1 / 3 for e in eps) and all(b < a for a, b in zip(eps, eps[1:]))
    ok = ok and not epsilon_bound(1).valid and not epsilon_bound(2).valid
    return ok and eps[0] < 0.2683, f"eps_bound(3) = {eps[0]:.10f}"


def _fnw():
    worst = fnw_sweep(200, seed=0)
    return worst >= -1e-9, f"worst residual {worst:.2e}"


def _sandwich():
    worst = max(norm_sandwich_check(n, 20, c) for n in (2, 3) for c in SANDWICH_CASES)
    return worst == 0.0, f"worst violation {worst:.2e}"


def _torus():
    g = build_decorated_torus(1, 1, 1)
    H = hamiltonian(g).toarray()
    e0 = np.linalg.eigvalsh(H)[0]
    hsum = sum(_embed_local(g, hub) for hub in g.centers)
    lo = np.linalg.eigvalsh(hsum - H)[0]
    hi = np.linalg.eigvalsh(2 * H - hsum)[0]
    ok = abs(e0) < 1e-9 and lo > -1e-9 and hi > -1e-9
    return ok, f"ground energy {e0:.1e}, sandwich margins {lo:.1e}, {hi:.1e}"


def _embed_local(g, hub):
    sub, _ = local_hamiltonian(g, hub)
    return hamiltonian(g, edges=sub.edges).toarray()


def _kernel():
    dim = kernel_basis(hamiltonian(build_y_graph(1))).shape[1]
    return dim == 8, f"dim ker h_v = {dim} for n = 1"


def _eps1():
    e = epsilon_exact(1)
    return abs(e - 0.478) <= 2e-3, f"eps_1 = {e:.6f}"


CHECKS = [
    ("spin algebra and projector resolution", _spin_algebra),
    ("bulk transfer operator closed forms", _transfer),
    ("boundary Q_L spectra", _boundary),
    ("overlap bound below 1/3 and decreasing for n >= 3", _bound),
    ("projector inequality on random pairs", _fnw),
    ("norm sandwiches", _sandwich),
    ("smallest torus: frustration-free and comparable", _torus),
    ("Y-graph kernel dimension", _kernel),
    ("exact overlap for n = 1", _eps1),
]


def run(out=print) -> bool:
    ok_all = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        ok_all &= bool(ok)
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok_all
