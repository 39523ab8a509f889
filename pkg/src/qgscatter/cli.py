"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import surgery
from .bound import FIRST, find_first_kind, find_second_kind
from .graph import GraphFormatError, TailedGraph, parse_graph, validate
from .numeric import DEFAULT_TOL, SingularMatrixError, ToleranceConfig
from .scattering import (
    EdgeMomentumError,
    Momentum,
    NoTailsError,
    SMatrix,
    check_unitarity,
    s_matrix,
)

EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    pass


# -- parsing helpers ---------------------------------------------------------


def read_graph(path: str) -> TailedGraph:
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_graph(text)


def parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise InputError(f"not a complex number: {text!r}") from None


def momentum_from_args(args) -> complex:
    if args.k is not None and args.z is not None:
        raise InputError("give exactly one of --k or --z")
    if args.k is not None:
        return Momentum.from_k(args.k).z
    if args.z is not None:
        try:
            return Momentum(parse_complex(args.z)).z
        except ValueError as exc:
            raise InputError(str(exc)) from None
    raise InputError("a momentum is required (--k or --z)")


def parse_k_range(text: str) -> np.ndarray:
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise InputError(f"--k-range must be a:b:n, got {text!r}") from None
    if n < 1:
        raise InputError("sweep needs at least one step")
    ks = np.linspace(a, b, n)
    margin = 1e-9
    if np.any(ks <= margin) or np.any(ks >= np.pi - margin):
        raise InputError("sweep range must lie strictly inside (0, pi)")
    return ks


def tolerance(args) -> ToleranceConfig:
    value = args.tol if args.tol is not None else os.environ.get("QGS_TOL")
    if value is None:
        return DEFAULT_TOL
    try:
        return DEFAULT_TOL.with_residual(float(value))
    except ValueError as exc:
        raise InputError(f"bad tolerance: {exc}") from None


# -- rendering ---------------------------------------------------------------


def fmt_complex(x: complex) -> str:
    return f"{x.real:.12g}{x.imag:+.12g}i"


def _csv_float(x: float) -> str:
    return repr(float(x))


def render_smatrix(S: SMatrix, fmt: str, out) -> None:
    labels = [str(lab) for lab in S.labels]
    if fmt == "json":
        doc = {
            "z": [S.z.real, S.z.imag],
            "k": Momentum(S.z).k,
            "labels": labels,
            "matrix": [[[v.real, v.imag] for v in row] for row in S.matrix],
            "singular": S.singular,
            "unitarity_residual": check_unitarity(S),
        }
        json.dump(doc, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["row", "col", "re", "im"])
        for i, a in enumerate(labels):
            for j, b in enumerate(labels):
                v = S.matrix[i, j]
                w.writerow([a, b, _csv_float(v.real), _csv_float(v.imag)])
    else:
        out.write(f"z = {fmt_complex(S.z)}  (k = {Momentum(S.z).k:.12g})\n")
        if S.singular:
            out.write("note: A(z) is singular at this momentum; pseudo-inverse branch used\n")
        if not labels:
            out.write("(empty S-matrix)\n")
            return
        cells = [[fmt_complex(v) for v in row] for row in S.matrix]
        width = max(len(c) for row in cells for c in row + labels)
        out.write(" " * 6 + "  ".join(f"{b:>{width}}" for b in labels) + "\n")
        for a, row in zip(labels, cells):
            out.write(f"{a:>5} " + "  ".join(f"{c:>{width}}" for c in row) + "\n")


# -- commands ----------------------------------------------------------------


def cmd_info(args, tol, out):
    g = read_graph(args.graph)
    d = validate(g)
    if args.format == "json":
        json.dump({**d.as_dict(), "labels": [str(lab) for lab in g.labels]}, out, indent=2)
        out.write("\n")
        return 0
    out.write(f"vertices: {g.n_vertices}\nedges: {len(g.edges)}\ncomponents: {d.components}\n")
    out.write(f"tailed vertices: {d.tailed_vertices}\ntails: {d.n_tails}\n")
    out.write("labels: " + " ".join(str(lab) for lab in g.labels) + "\n")
    for msg in d.warnings:
        out.write(f"warning: {msg}\n")
    return 0


def cmd_smatrix(args, tol, out):
    g = read_graph(args.graph)
    render_smatrix(s_matrix(g, momentum_from_args(args), tol), args.format, out)
    return 0


def cmd_sweep(args, tol, out):
    g = read_graph(args.graph)
    ks = parse_k_range(args.k_range)
    rows = []
    for k in ks:
        S = s_matrix(g, np.exp(1j * k), tol)
        rows.append((k, S))
    m = g.n_tails
    names = [f"s_{i + 1}_{j + 1}" for i in range(m) for j in range(m)]
    if args.format == "json":
        json.dump([{"k": k, "matrix": [[[v.real, v.imag] for v in row] for row in S.matrix],
                    "unitarity_residual": check_unitarity(S)} for k, S in rows], out, indent=2)
        out.write("\n")
        return 0
    w = csv.writer(out, lineterminator="\n")
    header = ["k"]
    for name in names:
        header += [f"Re({name})", f"Im({name})"]
    w.writerow(header + ["unitarity_residual"])
    for k, S in rows:
        vals = [_csv_float(k)]
        for v in S.matrix.ravel():
            vals += [_csv_float(v.real), _csv_float(v.imag)]
        w.writerow(vals + [_csv_float(check_unitarity(S))])
    return 0


def cmd_bound(args, tol, out):
    g = read_graph(args.graph)
    states = find_first_kind(g, tol) + find_second_kind(g, tol)
    if args.format == "json":
        json.dump([{
            "kind": b.kind,
            "energy": b.energy,
            "z_b": b.z_b,
            "graph_part": [float(x) for x in np.real(b.graph_part)],
            "alpha": [float(x) for x in np.real(b.alpha)],
            "norm_factor": b.norm_factor,
        } for b in states], out, indent=2)
        out.write("\n")
        return 0
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["kind", "z_b", "energy", "norm_factor", "alpha"])
        for b in states:
            w.writerow([b.kind, "" if b.z_b is None else _csv_float(b.z_b), _csv_float(b.energy),
                        _csv_float(b.norm_factor), " ".join(_csv_float(a) for a in b.alpha)])
        return 0
    if not states:
        out.write("none\n")
        return 0
    groups: dict[tuple, int] = {}
    for b in states:
        key = (b.kind, round(b.energy, 8))
        groups[key] = groups.get(key, 0) + 1
    for b in states:
        deg = groups[(b.kind, round(b.energy, 8))]
        if b.kind == FIRST:
            alpha = " ".join(f"{a:.12g}" for a in b.alpha)
            out.write(f"first kind   z_b = {b.z_b:.12g}  E = {b.energy:.12g}  degeneracy {deg}  "
                      f"|N|^2 = {b.norm_factor:.12g}  alpha = [{alpha}]\n")
        else:
            out.write(f"second kind  E = {b.energy:.12g}  degeneracy {deg}\n")
    return 0


def _labels(g: TailedGraph, names):
    try:
        return [g.labels[g.label_index(n)] for n in names]
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc).strip("'\"")) from None


def cmd_cut(args, tol, out):
    g = read_graph(args.graph)
    (lab,) = _labels(g, [args.tail])
    S = s_matrix(g, momentum_from_args(args), tol)
    render_smatrix(surgery.cut_tail(S, lab), args.format, out)
    return 0


def cmd_stump(args, tol, out):
    g = read_graph(args.graph)
    (lab,) = _labels(g, [args.tail])
    if args.stump_len < 0:
        raise InputError("--stump-len must be non-negative")
    S = s_matrix(g, momentum_from_args(args), tol)
    render_smatrix(surgery.cut_tail_stump(S, lab, args.stump_len), args.format, out)
    return 0


def cmd_cut_block(args, tol, out):
    g = read_graph(args.graph)
    labs = _labels(g, args.tails)
    S = s_matrix(g, momentum_from_args(args), tol)
    render_smatrix(surgery.cut_tails_block(S, labs), args.format, out)
    return 0


def cmd_attach(args, tol, out):
    g = read_graph(args.graph)
    if (args.tail is None) == (args.at_vertex is None):
        raise InputError("give exactly one of --tail or --at-vertex")
    if args.tail is not None:
        (lab,) = _labels(g, [args.tail])
    else:
        tailed = [lab for lab in g.labels if lab.vertex == args.at_vertex]
        if not tailed:
            raise InputError(f"vertex {args.at_vertex} has no tail; attach needs an already tailed vertex "
                             "(add the tail to the graph file instead)")
        lab = tailed[0]
    S = s_matrix(g, momentum_from_args(args), tol)
    render_smatrix(surgery.attach_tail(S, lab), args.format, out)
    return 0


def cmd_connect(args, tol, out):
    z = momentum_from_args(args)
    g1 = read_graph(args.graphs[0])
    if len(args.graphs) == 1:
        a, b = _labels(g1, args.tails)
        S = s_matrix(g1, z, tol)
    elif len(args.graphs) == 2:
        g2 = read_graph(args.graphs[1])
        (a,) = _labels(g1, args.tails[:1])
        (b,) = _labels(g2, args.tails[1:])
        S = surgery.direct_sum(s_matrix(g1, z, tol), s_matrix(g2, z, tol))
        b = (b.vertex + g1.n_vertices, b.ordinal)
    else:
        raise InputError("connect takes one or two graphs")
    if S.index(a) == S.index(b):
        raise InputError("cannot connect a tail to itself")
    render_smatrix(surgery.connect_tails(S, a, b), args.format, out)
    return 0


def cmd_compose(args, tol, out):
    z = momentum_from_args(args)
    g1, g2 = read_graph(args.graphs[0]), read_graph(args.graphs[1])
    try:
        S = surgery.compose_gates(s_matrix(g1, z, tol), s_matrix(g2, z, tol), tol.residual_tol)
    except surgery.GateFormError as exc:
        raise InputError(str(exc)) from None
    render_smatrix(S, args.format, out)
    return 0


def cmd_verify(args, tol, out):
    from .checks import run_checks

    g = read_graph(args.graph)
    checks = run_checks(g, args.level, tol)
    for c in checks:
        out.write(c.line() + "\n")
    failed = sum(not c.passed for c in checks)
    out.write(f"{len(checks) - failed}/{len(checks)} checks passed\n")
    return 0 if failed == 0 else EXIT_NUMERIC


# -- argument parser ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgscatter", description="Scattering on graphs with tails.")
    parser.add_argument("--tol", type=float, default=None, help="residual tolerance (env QGS_TOL)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, momentum=True, fmt_default="table"):
        p.add_argument("--format", choices=["table", "csv", "json"], default=fmt_default)
        p.add_argument("--tol", type=float, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        if momentum:
            p.add_argument("--k", type=float, default=None, help="momentum k (z = e^{ik})")
            p.add_argument("--z", default=None, help="unit-circle z, e.g. 0.6+0.8i")

    p = sub.add_parser("info", help="graph diagnostics")
    p.add_argument("graph")
    common(p, momentum=False)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("smatrix", help="S-matrix at one momentum")
    p.add_argument("graph")
    common(p)
    p.set_defaults(func=cmd_smatrix)

    p = sub.add_parser("sweep", help="S-matrix over a range of k (CSV rows)")
    p.add_argument("graph")
    p.add_argument("--k-range", required=True, help="a:b:n, n evenly spaced values in [a, b]")
    common(p, momentum=False, fmt_default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bound", help="bound states of both kinds")
    p.add_argument("graph")
    common(p, momentum=False)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("cut", help="cut one tail")
    p.add_argument("graph")
    p.add_argument("--tail", required=True)
    common(p)
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("stump", help="cut a tail leaving a stump")
    p.add_argument("graph")
    p.add_argument("--tail", required=True)
    p.add_argument("--stump-len", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_stump)

    p = sub.add_parser("cut-block", help="cut several tails at once")
    p.add_argument("graph")
    p.add_argument("--tails", nargs="+", required=True)
    common(p)
    p.set_defaults(func=cmd_cut_block)

    p = sub.add_parser("attach", help="attach a tail next to an existing one")
    p.add_argument("graph")
    p.add_argument("--tail", default=None)
    p.add_argument("--at-vertex", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_attach)

    p = sub.add_parser("connect", help="join two tails into an edge (one graph, or across two)")
    p.add_argument("graphs", nargs="+")
    p.add_argument("--tails", nargs=2, required=True)
    common(p)
    p.set_defaults(func=cmd_connect)

    p = sub.add_parser("compose", help="compose two gate-form graphs")
    p.add_argument("graphs", nargs=2)
    common(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("verify", help="run invariant checks on a graph")
    p.add_argument("graph")
    p.add_argument("--level", choices=["basic", "full"], default="basic")
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = tolerance(args)
        return args.func(args, tol, out)
    except (InputError, GraphFormatError, NoTailsError, surgery.UntailedVertexError, surgery.GateFormError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (EdgeMomentumError, surgery.ResonantDenominatorError, SingularMatrixError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
