"""Command-line front end: ``gapcert <command> [options]``.

Exit codes: 0 success, 2 a certificate came out invalid, 1 any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .certificate import DEFAULT_SEED, certify, render_report, to_dict

MAX_RANGE = 64
EXIT_OK, EXIT_ERROR, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_help()}\n{self.prog}: error: {message}")


def parse_n_range(text: str) -> list[int]:
    """``"3"`` -> [3]; ``"1..4"`` -> [1, 2, 3, 4] (inclusive, at most 64 values)."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a range a..b, got {text!r}")
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}")
    if hi - lo + 1 > MAX_RANGE:
        raise argparse.ArgumentTypeError(f"range {text!r} has more than {MAX_RANGE} values")
    return list(range(lo, hi + 1))


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def default_seed() -> int:
    env = os.environ.get("GAPCERT_SEED")
    if env is None or env == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"GAPCERT_SEED must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gapcert", description="Spectral-gap certificates for decorated AKLT models.")
    p.add_argument("--version", action="version", version=f"gapcert {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", help="assemble the gap certificate")
    c.add_argument("--n", type=parse_n_range, required=True, help="decoration number k or range a..b")
    c.add_argument("--gamma", type=float, help="use this gamma_Y instead of computing it")
    c.add_argument("--exact", action="store_true", help="also compute the exact overlap")
    c.add_argument("--allow-large-n", action="store_true", help="permit the exact overlap for n = 3")
    c.add_argument("--format", choices=("json", "text"), default="json")
    c.add_argument("--out", help="write the report to this file (atomically)")
    c.add_argument("--seed", type=int)
    c.add_argument("--workers", type=_positive_int, default=os.cpu_count() or 1)

    e = sub.add_parser("epsilon", help="overlap bound and, optionally, its exact value")
    e.add_argument("--n", type=_positive_int, required=True)
    e.add_argument("--exact", action="store_true")
    e.add_argument("--allow-large-n", action="store_true")

    g = sub.add_parser("gamma-y", help="gap of the Y-graph Hamiltonian above its kernel")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--seed", type=int)

    t = sub.add_parser("transfer-report", help="transfer-operator spectra and a(n)")
    t.add_argument("--n", type=_positive_int, required=True)

    f = sub.add_parser("fnw-check", help="projector inequality on random projector pairs")
    f.add_argument("--dim", type=_positive_int, required=True)
    f.add_argument("--trials", type=_positive_int, default=1000)
    f.add_argument("--seed", type=int)

    gr = sub.add_parser("graph", help="print a decorated graph as JSON")
    gr.add_argument("--kind", choices=("y", "g", "torus"), required=True)
    gr.add_argument("--n", type=_positive_int, required=True)
    gr.add_argument("--cells", type=_positive_int, nargs=2, default=(1, 1), metavar=("X", "Y"))

    sub.add_parser("selftest", help="run the built-in property checks")
    return p


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory and rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gapcert-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out_path: str | None, stdout) -> None:
    if out_path:
        write_atomic(out_path, text)
    else:
        stdout.write(text)


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _cmd_certify(args, stdout) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    ns = args.n

    def one(n):
        return certify(n, gamma=args.gamma, exact=args.exact,
                       allow_large_n=args.allow_large_n, seed=seed)

    if len(ns) == 1:
        certs = [one(ns[0])]
    else:
        with ThreadPoolExecutor(max_workers=min(args.workers, len(ns))) as pool:
            certs = list(pool.map(one, ns))
    certs.sort(key=lambda c: c.n)
    if args.format == "json":
        if len(certs) == 1:
            text = render_report(certs[0], "json")
        else:
            text = json.dumps([to_dict(c) for c in certs], indent=2) + "\n"
    else:
        text = "\n".join(render_report(c, "text") for c in certs)
    _emit(text, args.out, stdout)
    return EXIT_OK if all(c.valid for c in certs) else EXIT_INVALID


def _cmd_epsilon(args, stdout) -> int:
    from .ed import epsilon_exact
    from .mps import epsilon_bound

    eb = epsilon_bound(args.n)
    stdout.write(f"n = {args.n}\n")
    stdout.write(f"A_n = {_fmt(eb.A_n)}\n")
    stdout.write(f"eps_bound = {_fmt(eb.eps)}  ({'valid' if eb.valid else 'invalid'})\n")
    if args.exact:
        stdout.write(f"eps_exact = {_fmt(epsilon_exact(args.n, allow_large_n=args.allow_large_n))}\n")
    return EXIT_OK


def _cmd_gamma(args, stdout) -> int:
    from .ed import y_graph_gap

    seed = args.seed if args.seed is not None else default_seed()
    stdout.write(f"gamma_Y({args.n}) = {_fmt(y_graph_gap(args.n, seed=seed))}\n")
    return EXIT_OK


def _spectrum_line(values) -> str:
    vals = sorted(np.asarray(values), key=lambda z: (-abs(z), -z.real))
    parts = []
    for z in vals:
        parts.append(_fmt(z.real) if abs(z.imag) < 1e-12 else f"{_fmt(z.real)}{z.imag:+.12g}j")
    return "  ".join(parts)


def _cmd_transfer(args, stdout) -> int:
    from .mps import a_of_n, bulk_transfer, fixed_point, q_matrices

    E = bulk_transfer()
    fp = fixed_point(E)
    q = q_matrices(args.n)
    stdout.write(f"n = {args.n}\n")
    stdout.write(f"spec(E) = {_spectrum_line(E.spectrum())}\n")
    stdout.write(f"rho = diag({_spectrum_line(np.linalg.eigvalsh(fp.rho).astype(complex))})\n")
    stdout.write(f"spec(Q_L) = {_spectrum_line(np.linalg.eigvalsh(q.Q_L).astype(complex))}\n")
    stdout.write(f"spec(Q_R) = {_spectrum_line(np.linalg.eigvalsh(q.Q_R).astype(complex))}\n")
    stdout.write(f"q_L = {_fmt(q.q_L)}  q_R = {_fmt(q.q_R)}  ||E_L|| = ||E_R|| = {_fmt(q.norm_EL)}\n")
    stdout.write(f"a(n) = {_fmt(a_of_n(E, fp.rho, args.n))}\n")
    return EXIT_OK


def _cmd_fnw(args, stdout) -> int:
    from .ed import fnw_sweep

    seed = args.seed if args.seed is not None else default_seed()
    if args.dim < 2:
        raise UsageError("--dim must be at least 2")
    worst = fnw_sweep(args.trials, seed, dims=(args.dim, args.dim))
    ok = worst >= -1e-9
    stdout.write(f"worst residual over {args.trials} pairs in dimension {args.dim}: {worst:.3e}"
                 f"  {'ok' if ok else 'VIOLATED'}\n")
    return EXIT_OK if ok else EXIT_ERROR


def _cmd_graph(args, stdout) -> int:
    from .lattice import build_decorated_torus, build_g_graph, build_y_graph

    if args.kind == "y":
        g = build_y_graph(args.n)
    elif args.kind == "g":
        g = build_g_graph(args.n)
    else:
        g = build_decorated_torus(args.cells[0], args.cells[1], args.n)
    stdout.write(g.to_json() + "\n")
    return EXIT_OK


def _cmd_selftest(args, stdout) -> int:
    from . import selftest

    ok = selftest.run(out=lambda line: stdout.write(line + "\n"))
    return EXIT_OK if ok else EXIT_ERROR


COMMANDS = {
    "certify": _cmd_certify,
    "epsilon": _cmd_epsilon,
    "gamma-y": _cmd_gamma,
    "transfer-report": _cmd_transfer,
    "fnw-check": _cmd_fnw,
    "graph": _cmd_graph,
    "selftest": _cmd_selftest,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, stdout)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_ERROR
    except SystemExit as exc:  # --help / --version print and exit themselves
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    except Exception as exc:
        stderr.write(f"gapcert: error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
