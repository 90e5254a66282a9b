"""Command-line front end: ``lcpgeom <command> [options]``.

Exit codes: 0 success, 1 malformed input, 2 no solution, 3 unknown
equivalence verdict.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bifurcation as bif
from .cones import signature
from .core import DEFAULT_TOL, LcpProblem, as_matrix, load_matrix
from .equivalence import REP_O, Equivalence, classify_planar, equivalent, normal_forms, stability_2x2
from .interconnect import DEFAULT_S, InterconnectionSpec, PleatScenario, build_pleat_problem, interconnect, on_center_mu
from .singularity import annotate
from .solver import solve_enumeration

EXIT_OK, EXIT_INPUT, EXIT_NO_SOLUTION, EXIT_UNKNOWN = 0, 1, 2, 3


class InputError(ValueError):
    def __init__(self, fieldname: str, msg: str):
        super().__init__(f"{fieldname}: {msg}")
        self.field = fieldname


def _floats(text: str, fieldname: str, length: int | None = None) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise InputError(fieldname, f"expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise InputError(fieldname, "values must be finite")
    if length is not None and len(vals) != length:
        raise InputError(fieldname, f"expected {length} values, got {len(vals)}")
    return vals


def _matrix(path: str | None, fieldname: str = "--matrix") -> np.ndarray:
    if path is None:
        raise InputError(fieldname, "required")
    try:
        return load_matrix(path)
    except FileNotFoundError:
        raise InputError(fieldname, f"no such file {path!r}") from None
    except json.JSONDecodeError as exc:
        raise InputError(fieldname, f"invalid JSON ({exc.msg})") from None
    except KeyError as exc:
        raise InputError(f"{fieldname}.{exc.args[0]}", "missing field") from None
    except ValueError as exc:
        raise InputError(fieldname, str(exc)) from None


def _path(text: str, n: int) -> bif.PwlPath:
    try:
        if os.path.isfile(text):
            data = json.loads(Path(text).read_text())
            if isinstance(data, dict):
                if "waypoints" not in data:
                    raise InputError("--path.waypoints", "missing field")
                path = bif.PwlPath(np.array(data["waypoints"], float), tuple(data.get("domain", (0.0, 1.0))))
            else:
                path = bif.PwlPath(np.array(data, float))
        else:
            path = bif.PwlPath.parse(text)
    except InputError:
        raise
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError("--path", str(exc)) from None
    if path.n != n:
        raise InputError("--path", f"waypoints have length {path.n}, matrix is {n}x{n}")
    return path


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write_diagram(args, d: bif.BifurcationDiagram) -> None:
    n = d.m.shape[0]
    if args.format == "json":
        ann = bif.detect_bifurcations(d)
        obj = {
            "branches": [
                {"segment": b.segment, "alpha": str(b.alpha), "interval": list(b.interval),
                 "x_affine": [v.tolist() for v in b.x_affine]}
                for b in d.branches
            ],
            "continua": [{"lambda": c.lam, "interval": list(c.interval), **c.solution.to_dict()} for c in d.continua],
            "events": [
                {"lambda": a.event.lam, "kind": a.event.kind, "count_before": a.event.count_before,
                 "count_after": a.event.count_after, "annotation": a.annotation,
                 "meeting": [{"x": x.tolist(), "regularity": r.value} for x, r in a.meeting]}
                for a in ann
            ],
            "count": [{"lo": lo, "hi": hi, "count": c if math.isfinite(c) else "continuum"} for lo, hi, c in d.count_fn],
        }
        _emit(_dump(obj), args.out)
        return
    rows = bif.sample_diagram(d, args.samples)
    if args.split:
        if not args.out:
            raise InputError("--out", "required with --split")
        stem = Path(args.out)
        for bid, text in bif.branch_csvs(rows, n, args.coords).items():
            stem.with_name(f"{stem.stem}_{bid}{stem.suffix or '.csv'}").write_text(text)
        return
    _emit(bif.diagram_csv(rows, n, args.coords), args.out)


# --- commands ------------------------------------------------------------------------


def cmd_solve(args) -> int:
    m = _matrix(args.matrix)
    if args.q is not None:
        q = _floats(args.q, "--q", m.shape[0])
    else:
        data = json.loads(Path(args.matrix).read_text())
        if not isinstance(data, dict) or "q" not in data:
            raise InputError("--q", "required (or give q in the matrix file)")
        q = data["q"]
    try:
        prob = LcpProblem(m, q)
    except ValueError as exc:
        raise InputError("--q", str(exc)) from None
    res = annotate(prob.m, solve_enumeration(prob, args.tol), args.tol)
    if args.format == "csv":
        n = prob.n
        lines = [",".join([f"x{i + 1}" for i in range(n)] + [f"z{i + 1}" for i in range(n)] + [f"w{i + 1}" for i in range(n)])]
        for s in res.isolated:
            lines.append(",".join(bif.fmt(v) for v in (*s.x, *s.z, *s.w)))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_dump(res.to_dict()), args.out)
    return EXIT_OK if res.isolated or res.continua else EXIT_NO_SOLUTION


def cmd_trace(args) -> int:
    m = _matrix(args.matrix)
    if args.path is None:
        raise InputError("--path", "required")
    d = bif.trace_path(m, _path(args.path, m.shape[0]), args.tol)
    _write_diagram(args, d)
    return EXIT_OK


def cmd_classify(args) -> int:
    m = _matrix(args.matrix)
    if m.shape != (2, 2):
        raise InputError("--matrix", "classification needs a 2x2 matrix")
    try:
        sig = signature(m, args.tol).to_dict()
    except ValueError as exc:
        sig = {"error": str(exc)}
    obj = {"class": classify_planar(m, args.tol), "stability": stability_2x2(m, args.tol).to_dict(), "signature": sig}
    _emit(_dump(obj), args.out)
    return EXIT_OK


def cmd_equiv(args) -> int:
    a, b = _matrix(args.a, "--a"), _matrix(args.b, "--b")
    for name, x in (("--a", a), ("--b", b)):
        if x.shape != (2, 2):
            raise InputError(name, "equivalence needs 2x2 matrices")
    res = equivalent(a, b, args.tol)
    words = {Equivalence.EQUIVALENT: "equivalent", Equivalence.NOT_EQUIVALENT: "not equivalent",
             Equivalence.UNKNOWN: "unknown"}
    text = _dump(res.to_dict()) if args.format == "json" else f"{words[res.status]} ({res.method})\n"
    _emit(text, args.out)
    return EXIT_UNKNOWN if res.status is Equivalence.UNKNOWN else EXIT_OK


def cmd_interconnect(args) -> int:
    if args.spec is None:
        raise InputError("--spec", "required")
    try:
        spec = InterconnectionSpec.load(args.spec)
    except FileNotFoundError:
        raise InputError("--spec", f"no such file {args.spec!r}") from None
    except json.JSONDecodeError as exc:
        raise InputError("--spec", f"invalid JSON ({exc.msg})") from None
    except KeyError as exc:
        raise InputError(f"--spec.{exc.args[0]}", "missing field") from None
    except ValueError as exc:
        raise InputError("--spec", str(exc)) from None
    lcp = interconnect(spec)
    obj = {"n": lcp.n, "m": lcp.m.tolist(), "q0": lcp.q0.tolist(), "q1": lcp.q1.tolist()}
    code = EXIT_OK
    if args.at is not None:
        prob = lcp.at(args.at)
        res = annotate(prob.m, solve_enumeration(prob, args.tol), args.tol)
        obj.update(q=prob.q.tolist(), **res.to_dict())
        code = EXIT_OK if res.isolated or res.continua else EXIT_NO_SOLUTION
    _emit(_dump(obj), args.out)
    return code


def cmd_pleat(args) -> int:
    lo, hi = _floats(args.lambda_range, "--lambda-range", 2)
    ramp = tuple(_floats(args.ramp, "--ramp", 2))
    mu = on_center_mu(args.s, ramp) if args.mu is None else _floats(args.mu, "--mu", 2)
    try:
        sc = PleatScenario(args.s, mu, (lo, hi), args.samples, ramp)
    except ValueError as exc:
        raise InputError("--lambda-range", str(exc)) from None
    lcp, path = build_pleat_problem(sc)
    _write_diagram(args, bif.trace_path(lcp.m, path, args.tol))
    return EXIT_OK


def cmd_surface(args) -> int:
    m = 2 * REP_O if args.matrix is None else _matrix(args.matrix)
    if m.shape != (2, 2):
        raise InputError("--matrix", "the surface needs a 2x2 matrix")
    lo, hi, step = _floats(args.grid, "--grid", 3)
    if step <= 0 or hi < lo:
        raise InputError("--grid", "needs lo <= hi and step > 0")
    lines = ["y1,y2,x1"] + [",".join(bif.fmt(v) for v in t) for t in bif.sample_pwl_graph(m, (lo, hi, step))]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_normal_forms(args) -> int:
    forms = normal_forms()
    classes: dict[str, list] = {}
    boundary = []
    for f in forms:
        verdict = stability_2x2(f.matrix, args.tol)
        entry = {"family": f.label, "delta": list(f.delta), "matrix": f.matrix.tolist(),
                 "stability": verdict.status.value, "class": classify_planar(f.matrix, args.tol)}
        if f.label == "O":
            boundary.append(entry)
        else:
            classes.setdefault(entry["class"], []).append(entry)
    stable = sum(e["stability"] == "stable" for es in classes.values() for e in es)
    if args.format == "json":
        _emit(_dump({"stable": stable, "classes": classes, "boundary": boundary}), args.out)
        return EXIT_OK
    out = [f"{stable} stable normal forms in {len(classes)} classes"]
    for label, entries in sorted(classes.items()):
        out.append(f"  {label}: {len(entries)}")
        for e in entries:
            out.append(f"    {e['family']} delta={tuple(e['delta'])} {e['matrix']}")
    out.append(f"{len(boundary)} boundary forms (O family)")
    for e in boundary:
        out.append(f"    O delta={tuple(e['delta'])} {e['matrix']} {e['stability']} {e['class']}")
    _emit("\n".join(out) + "\n", args.out)
    return EXIT_OK


# --- parser --------------------------------------------------------------------------


def _default_tol() -> float:
    env = os.environ.get("LCP_TOL")
    if env is None:
        return DEFAULT_TOL
    try:
        val = float(env)
    except ValueError:
        raise InputError("LCP_TOL", f"not a number: {env!r}") from None
    if not val > 0:
        raise InputError("LCP_TOL", "must be positive")
    return val


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError("must be at least 2")
    return v


class _Parser(argparse.ArgumentParser):
    """Usage errors are malformed input: exit 1, keeping 2 for "no solution"."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


# flags whose values may start with a minus sign ("-2,-2", "(-4,0);...")
_VALUE_FLAGS = {"--q", "--path", "--mu", "--lambda-range", "--grid", "--ramp", "--at", "--s", "--tol"}


def _glue_negative_values(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1][:1] == "-":
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def build_parser(default_tol: float = DEFAULT_TOL) -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=default_tol, help="base tolerance (env LCP_TOL)")
    common.add_argument("--out", help="output file (default stdout)")

    diagram = _Parser(add_help=False)
    diagram.add_argument("--samples", type=_positive_int, default=401)
    diagram.add_argument("--format", choices=("csv", "json"), default="csv")
    diagram.add_argument("--split", action="store_true", help="one CSV per branch: <stem>_<k>.csv")
    diagram.add_argument("--coords", choices=("x", "z"), default="x")

    p = _Parser(prog="lcpgeom", description="Solve, classify and trace linear complementarity problems.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="all solutions of LCP(M, q)")
    s.add_argument("--matrix", "-m")
    s.add_argument("--q")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("trace", parents=[common, diagram], help="solution branches along a path q(lambda)")
    s.add_argument("--matrix", "-m")
    s.add_argument("--path", help='"(a,b);(c,d);..." or a JSON file of waypoints')
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("classify", parents=[common], help="planar class, stability and signature")
    s.add_argument("--matrix", "-m")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("equiv", parents=[common], help="equivalence verdict for two 2x2 matrices")
    s.add_argument("--a")
    s.add_argument("--b")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("interconnect", parents=[common], help="assemble two coupled LCPs")
    s.add_argument("--spec")
    s.add_argument("--at", type=float, help="also solve at this lambda")
    s.set_defaults(func=cmd_interconnect)

    s = sub.add_parser("pleat", parents=[common, diagram], help="trace the pleat scenario")
    s.add_argument("--s", type=float, default=DEFAULT_S, help="rotation angle in radians")
    s.add_argument("--mu", help='"m1,m2" (default: on-center)')
    s.add_argument("--lambda-range", default="0,1")
    s.add_argument("--ramp", default="1,-2", help='ramp "const,slope" of the scalar LCP')
    s.set_defaults(func=cmd_pleat)

    s = sub.add_parser("surface", parents=[common], help="sample the graph of f_M")
    s.add_argument("--matrix", "-m", help="2x2 matrix file (default 2*O)")
    s.add_argument("--grid", default="-2,2,0.1", help='"lo,hi,step"')
    s.set_defaults(func=cmd_surface)

    s = sub.add_parser("normal-forms", parents=[common], help="census of the planar normal forms")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_normal_forms)
    return p


def main(argv=None) -> int:
    try:
        parser = build_parser(_default_tol())
        args = parser.parse_args(_glue_negative_values(list(sys.argv[1:] if argv is None else argv)))
        if not args.tol > 0:
            raise InputError("--tol", "must be positive")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
