"""Gap certificates: ``gap(H) >= 1/2 gamma_Y (1 - 3 eps_n)`` with provenance.

A certificate combines three independent ingredients:

* the overlap bound ``eps_n`` from the transfer-operator constants (rigorous
  up to floating point),
* the local gap ``gamma_Y`` of the Y-graph Hamiltonian above its 8-dimensional
  kernel, either computed by Lanczos or supplied by the caller,
* optionally the exact overlap ``eps_n`` from exact diagonalization, as a cross
  check on the bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy

from . import __version__
from .ed import epsilon_exact, y_graph_gap
from .mps import BoundSuite, bound_suite, epsilon_bound

SCHEMA = "gapcert/1"
DEFAULT_SEED = 20240601
Y_KERNEL_DIM = 8
CONSISTENCY_TOL = 1e-9

PROVENANCE = {
    "a_n": "||E^n - |1><rho|||, largest singular value of the vectorized map",
    "b_n": "a_n * Tr(rho^-1)",
    "b_L": "a_n D^2 ||E_L|| / (rho_min q_L)",
    "b_R": "a_n D^2 ||E_R|| / q_R",
    "b_G": "a_n D^2 ||E_L|| ||E_R|| / (q_L q_R)",
    "b_LR": "b_L + b_R - b_L b_R",
    "A_n": "closed form 4 / (3^n (1 - b_L)), cross-checked against b_n / sqrt(1 - b_LR)",
    "eps_bound": "A_n + A_n^2 (1 + b_G)",
    "eps_exact": "largest principal cosine below 1 between the Y-kernels of G(n)",
    "gamma_Y": "lowest eigenvalue of h_Y above its kernel",
    "gap_lower_bound": "max(0, gamma_Y (1 - 3 eps_bound) / 2)",
}


def _versions() -> dict:
    return {"gapcert": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


@dataclass(frozen=True)
class GapCertificate:
    n: int
    a_n: float
    b_n: float
    bounds: BoundSuite
    A_n: float
    eps_bound: float
    gamma_Y: float
    gamma_Y_source: str
    gamma_Y_kernel_dim: int
    gap_raw: float
    gap_lower_bound: float
    valid: bool
    invalid_reason: str | None
    seed: int
    eps_exact: float | None = None
    eps_exact_method: str | None = None
    provenance: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)


def _invalid_reason(n, eps_one_minus_bL, eps, gamma, eps_exact) -> str | None:
    reasons = []
    if eps_one_minus_bL <= 0:
        reasons.append(
            f"1 - b_L = {eps_one_minus_bL:.6g} <= 0, so the overlap bound does not apply "
            f"(it requires n >= 3)"
        )
    elif not eps < 1 / 3:
        reasons.append(
            f"eps_bound = {eps:.6g} is not below 1/3 (the bound is only conclusive for n >= 3)"
        )
    if not gamma > 0:
        reasons.append(f"gamma_Y = {gamma:.6g} is not positive")
    if eps_exact is not None and not reasons and eps_exact > eps + CONSISTENCY_TOL:
        reasons.append(f"exact overlap {eps_exact:.6g} exceeds the bound {eps:.6g}")
    return "; ".join(reasons) or None


def certify(n: int, gamma: float | None = None, exact: bool = False,
            allow_large_n: bool = False, seed: int = DEFAULT_SEED) -> GapCertificate:
    """Assemble the gap certificate for decoration number ``n``.

    ``gamma=None`` computes ``gamma_Y`` on the Y-graph with ``n`` decorations
    (raises if its kernel is not 8-dimensional); a float is recorded as
    user-supplied. ``exact`` adds the exact-diagonalization overlap.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    eb = epsilon_bound(n)
    suite = bound_suite(n)
    if gamma is None:
        gamma_val = y_graph_gap(n, seed=seed)
        source = "computed"
    else:
        gamma_val = float(gamma)
        if not math.isfinite(gamma_val):
            raise ValueError("gamma must be finite")
        source = "supplied"
    eps_ex = method = None
    if exact:
        eps_ex = epsilon_exact(n, allow_large_n=allow_large_n)
        method = "factored-gram"
    raw = 0.5 * gamma_val * (1 - 3 * eb.eps)
    reason = _invalid_reason(n, eb.one_minus_b_L, eb.eps, gamma_val, eps_ex)
    prov = dict(PROVENANCE)
    prov["gamma_Y"] += (
        f", Lanczos on Y({n})" if source == "computed" else ", supplied by the caller"
    )
    prov["gamma_Y_kernel_dim"] = (
        "counted from the computed spectrum" if source == "computed"
        else "expected value; not recomputed for a supplied gamma_Y"
    )
    return GapCertificate(
        n=n, a_n=suite.a_n, b_n=suite.b_n, bounds=suite, A_n=eb.A_n, eps_bound=eb.eps,
        gamma_Y=gamma_val, gamma_Y_source=source, gamma_Y_kernel_dim=Y_KERNEL_DIM,
        gap_raw=raw, gap_lower_bound=max(0.0, raw), valid=reason is None,
        invalid_reason=reason, seed=int(seed), eps_exact=eps_ex, eps_exact_method=method,
        provenance=prov, versions=_versions(),
    )


def _num(x: float):
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def to_dict(cert: GapCertificate) -> dict:
    """Schema ``gapcert/1`` document; floats rounded to 12 significant digits."""
    s = cert.bounds
    doc = {
        "schema": SCHEMA,
        "n": cert.n,
        "a_n": _num(cert.a_n),
        "b_n": _num(cert.b_n),
        "b_L": _num(s.b_L),
        "b_R": _num(s.b_R),
        "b_G": _num(s.b_G),
        "b_LR": _num(s.b_LR),
        "A_n": _num(cert.A_n),
        "eps_bound": _num(cert.eps_bound),
    }
    if cert.eps_exact is not None:
        doc["eps_exact"] = _num(cert.eps_exact)
        doc["eps_exact_method"] = cert.eps_exact_method
    doc.update({
        "gamma_Y": _num(cert.gamma_Y),
        "gamma_Y_source": cert.gamma_Y_source,
        "gamma_Y_kernel_dim": cert.gamma_Y_kernel_dim,
        "gap_lower_bound": _num(cert.gap_lower_bound),
        "valid": cert.valid,
    })
    if cert.invalid_reason:
        doc["invalid_reason"] = cert.invalid_reason
    doc["seed"] = cert.seed
    doc["versions"] = dict(cert.versions)
    return doc


def _fmt(x: float) -> str:
    return "nan" if x is None else f"{x:.12g}"


def render_text(cert: GapCertificate) -> str:
    s = cert.bounds
    mode = (
        "rigorous modulo gamma_Y numerics" if cert.gamma_Y_source == "computed"
        else "gamma_Y supplied by the caller"
    )
    lt = "true" if cert.eps_bound < 1 / 3 else "false"
    lines = [
        f"gap certificate for decoration number n = {cert.n}  [{mode}]",
        "",
        "1. comparability of H with the Y-graph Hamiltonians",
        f"   H <= sum_v h_v <= 2 H,  h_v >= gamma_Y P_v with gamma_Y = {_fmt(cert.gamma_Y)}"
        f" ({cert.gamma_Y_source}, kernel dim {cert.gamma_Y_kernel_dim})",
        "2. projector inequality for neighboring hubs",
        "   P_v P_w + P_w P_v >= -eps_n (P_v + P_w)",
        "3. overlap bound from the transfer operators",
        f"   a(n) = {_fmt(cert.a_n)}   b(n) = {_fmt(cert.b_n)}",
        f"   b_L = {_fmt(s.b_L)}   b_R = {_fmt(s.b_R)}   b_G = {_fmt(s.b_G)}   b_LR = {_fmt(s.b_LR)}",
        f"   A_n = {_fmt(cert.A_n)}",
        f"   eps_bound = A_n + A_n^2 (1 + b_G) = {_fmt(cert.eps_bound)}",
        f"   epsilon < 1/3: {_fmt(cert.eps_bound)} < 0.333333333333 is {lt}",
    ]
    if cert.eps_exact is not None:
        lines.append(f"   exact overlap ({cert.eps_exact_method}) = {_fmt(cert.eps_exact)}")
    lines += [
        "4. gap bound",
        f"   gap(H) >= 1/2 gamma_Y (1 - 3 eps_bound) = {_fmt(cert.gap_raw)}",
        f"   gap_lower_bound = {_fmt(cert.gap_lower_bound)}",
        "",
        f"valid: {'yes' if cert.valid else 'no'}",
    ]
    if cert.invalid_reason:
        lines.append(f"reason: {cert.invalid_reason}")
    lines.append(f"seed: {cert.seed}")
    return "\n".join(lines) + "\n"


def render_report(cert: GapCertificate, fmt: str = "json") -> str:
    """Serialize a certificate as ``json`` (schema gapcert/1) or a ``text`` audit trail."""
    if fmt == "json":
        return json.dumps(to_dict(cert), indent=2) + "\n"
    if fmt == "text":
        return render_text(cert)
    raise ValueError(f"format must be 'json' or 'text', got {fmt!r}")
