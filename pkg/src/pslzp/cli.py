"""Command-line front end.

Every subcommand prints exact rationals as "num/den" strings and orders its
output deterministically, so identical invocations give identical bytes.

Exit codes: 0 success, 1 bad input (JSON error on stderr), 2 a verification
found violations, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from fractions import Fraction
from typing import List, Optional

from . import bscomplex, commensurator, horosphere, rigidity
from .arith import Q, check_prime, fmt, val_p
from .matrix import ProjMatrix, as_point, fmt_point
from .selftest import SELFTESTS
from .tree import BruhatTitsTree, TreeVertex

PRIME_ENV = "PSLZP_PRIME"
EX_USAGE = 64


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    """Carries the artifact that should still be written before exiting 2."""

    def __init__(self, text: str):
        super().__init__("verification failed")
        self.text = text


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EX_USAGE)


# ----------------------------------------------------------------- helpers


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _csv(header: List[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _vertex(text: str) -> TreeVertex:
    m, _, b = text.partition(":")
    try:
        return TreeVertex(int(m), Q(b or "0"))
    except ValueError:
        raise ValueError(f"cannot parse vertex {text!r}; expected m:b") from None


def _H(args) -> Fraction:
    H = Q(args.H)
    if H <= 1:
        raise ValueError("H must exceed 1")
    return H


def _prime_default() -> int:
    raw = os.environ.get(PRIME_ENV)
    if raw is None:
        return 2
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{PRIME_ENV}={raw!r} is not an integer") from None


# ------------------------------------------------------------------- tree


def cmd_tree_ball(args, T: BruhatTitsTree) -> str:
    _need(args, "radius")
    center = _vertex(args.center)
    verts = list(T.bfs(T.canonicalize(T.basis(center)), args.radius))
    line = T.line(*args.line) if args.line else None
    on_line = {v: line is not None and v in line for v in verts}
    edges = T.edges(verts)
    if args.format == "json":
        return _dump(
            {
                "p": T.p,
                "center": center.label(),
                "radius": args.radius,
                "line": [fmt_point(as_point(e)) for e in args.line] if args.line else None,
                "vertices": [dict(v.to_json(), label=v.label(), on_line=on_line[v]) for v in verts],
                "edges": [[u.label(), w.label()] for u, w in edges],
            }
        )
    out = [f"graph T{T.p} {{"]
    for v in verts:
        attrs = f'label="{v.label()}"'
        if on_line[v]:
            attrs += ', closeness_line="true", color="red"'
        out.append(f'  "{v.label()}" [{attrs}];')
    for u, w in edges:
        out.append(f'  "{u.label()}" -- "{w.label()}";')
    out.append("}")
    return "\n".join(out) + "\n"


def cmd_tree_geodesic(args, T: BruhatTitsTree) -> str:
    _need(args, "ends")
    line = T.line(*args.ends)
    lo, hi = args.window
    verts = line.vertices(lo, hi)
    conf = line.confluence()
    if args.format == "csv":
        return _csv(["vertex", "m", "b"], [[v.label(), v.m, fmt(v.b)] for v in verts])
    return _dump(
        {
            "p": T.p,
            "ends": [fmt_point(e) for e in line.ends],
            "confluence": conf.label() if conf else None,
            "vertices": [v.label() for v in verts],
        }
    )


# ------------------------------------------------------------- horospheres


def cmd_horo_table(args, T: BruhatTitsTree) -> str:
    _need(args, "base")
    H = _H(args)
    lo, hi = args.window
    rows = horosphere.horosphere_table(T, args.base, lo, hi, H, args.radius)
    if args.format == "json":
        return _dump(
            {
                "p": T.p,
                "H": fmt(H),
                "base": fmt_point(as_point(args.base)),
                "rows": [dict(vertex=v.label(), k=k, **ball.to_json()) for v, k, ball in rows],
            }
        )
    return _csv(
        ["vertex", "m", "b", "k", "base", "size"],
        [[v.label(), v.m, fmt(v.b), k, fmt_point(ball.base), fmt(ball.size)] for v, k, ball in rows],
    )


def cmd_horo_profile(args, T: BruhatTitsTree) -> str:
    _need(args, "pair", "radius")
    H = _H(args)
    alpha, beta = args.pair
    rows = horosphere.growth_profile(T, alpha, beta, args.radius, H)
    bad = horosphere.growth_violations(rows, T.p)
    bad_set = {r.vertex for r in bad}
    if args.format == "json":
        text = _dump(
            {
                "p": T.p,
                "H": fmt(H),
                "pair": [fmt_point(as_point(alpha)), fmt_point(as_point(beta))],
                "growth_exponent": horosphere.GROWTH_EXPONENT,
                "violations": len(bad),
                "rows": [
                    {"vertex": r.vertex.label(), "k": r.k, "argument": fmt(r.argument), "ok": r.vertex not in bad_set}
                    for r in rows
                ],
            }
        )
    else:
        text = _csv(
            ["vertex", "m", "b", "k", "argument", "distance"],
            [[r.vertex.label(), r.vertex.m, fmt(r.vertex.b), r.k, fmt(r.argument), _distance(r.argument)] for r in rows],
        )
    if bad:
        raise VerificationFailed(text)
    return text


def _distance(arg: Fraction) -> str:
    return "OVERLAP" if arg <= 1 else f"log({fmt(arg)})"


# -------------------------------------------------------- Baumslag-Solitar


def cmd_bs_comm(args, _T) -> str:
    _need(args, "m", "n")
    ok, root = bscomplex.bs_commensurable(args.m, args.n)
    return _dump({"m": args.m, "n": args.n, "commensurable": ok, "root": root})


def cmd_bs_phi(args, T: BruhatTitsTree) -> str:
    _need(args, "word")
    w = bscomplex.BsWord.parse(args.word)
    M = bscomplex.phi_embed(w, T.p)
    return _dump({"p": T.p, "n": T.p**2, "word": str(w), "matrix": M.to_json()})


# --------------------------------------------------------------- rigidity


def _load_map(args, window: Optional[rigidity.Window]) -> rigidity.TabulatedMap:
    if args.map is not None and args.alpha is not None:
        raise UsageError("give either --map or --alpha, not both")
    if args.map is not None:
        with open(args.map, encoding="utf-8") as fh:
            return rigidity.TabulatedMap.from_json_lines(fh)
    if args.alpha is not None:
        if window is None:
            raise UsageError("--alpha needs --window")
        return rigidity.linear_map(Q(args.alpha), window)
    raise UsageError("one of --map or --alpha is required")


def _infer_window(phi: rigidity.TabulatedMap, p: int, L: int) -> rigidity.Window:
    xs = [x for x in phi.table if x != 0]
    if not xs:
        raise ValueError("map has no nonzero points")
    depth = max(0, max(-val_p(x, p) for x in xs))
    return rigidity.Window(p, L, max(abs(x) for x in xs), depth)


def cmd_rig_s0(args, T: BruhatTitsTree) -> str:
    _need(args, "k", "D")
    th = rigidity.s_threshold(Q(args.K0), args.k, Q(args.D), T.p)
    return _dump(th.to_json())


def cmd_rig_verify(args, T: BruhatTitsTree) -> str:
    _need(args, "L")
    window = rigidity.Window(T.p, args.L, Q(args.window), args.depth) if args.window is not None else None
    phi = _load_map(args, window)
    if window is None:
        window = _infer_window(phi, T.p, args.L)
    report = rigidity.verify_plemma(
        phi.normalized(),
        args.L,
        window,
        per_bound=Q(args.per_bound) if args.per_bound is not None else None,
        s0=args.s0,
        s0_increment=args.s0_increment,
    )
    text = _dump(dict(report.to_json(), status="ok" if report.ok else "violations"))
    if not report.ok:
        raise VerificationFailed(text)
    return text


def cmd_rig_extract(args, T: BruhatTitsTree) -> str:
    _need(args, "q")
    window = rigidity.Window(T.p, 1, Q(args.window), args.depth) if args.window is not None else None
    phi = _load_map(args, window.restrict(args.q) if window else None)
    if window is None:
        window = _infer_window(phi, T.p, 1)
    ext = rigidity.extract_affine(phi.normalized(), args.q, window, s0=args.s0)
    text = _dump(ext.to_json())
    if not ext.ok:
        raise VerificationFailed(text)
    return text


# ----------------------------------------------------------- commensurator


def cmd_comm_bound(args, T: BruhatTitsTree) -> str:
    _need(args, "g")
    g = ProjMatrix.parse(args.g)
    if g.det == 0:
        raise ValueError("g must be invertible")
    gens = commensurator.standard_generators(T.p)
    names = args.generators.split(",")
    unknown = [n for n in names if n not in gens]
    if unknown:
        raise ValueError(f"unknown generator {unknown[0]!r}; choose from {', '.join(gens)}")
    prof = commensurator.denominator_profile(g, [gens[n] for n in names], args.maxlen, T.p)
    out = {"p": T.p, "g": g.to_json(), "generators": names}
    out.update(prof.to_json())
    out["det_bound"] = commensurator.det_denominator_bound(g, T.p)
    return _dump(out)


def cmd_comm_transport(args, _T) -> str:
    _need(args, "from_")
    a, b = (as_point(x) for x in args.from_)
    g = commensurator.transporter(a, b)
    return _dump({"from": [fmt_point(a), fmt_point(b)], "to": ["0", "inf"], "matrix": g.to_json()})


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", "-p", type=int, default=None, help=f"the prime p (default ${PRIME_ENV} or 2)")
    common.add_argument("--out", "-o", default=None, help="write the artifact here instead of stdout")
    common.add_argument("--selftest", action="store_true", help="run this module's oracle checks and exit")

    parser = _Parser(prog="pslzp", description="Exact computations for PSL2(Z[1/p]) acting on H^2 x T_p.")
    groups = parser.add_subparsers(dest="group", metavar="{tree,horo,bs,rig,comm}", parser_class=_Parser)
    groups.required = True

    def sub(group, name, func, fmts=("json",), help=None):
        sp = group.add_parser(name, parents=[common], help=help)
        sp.add_argument("--format", "-f", choices=fmts, default=fmts[0])
        sp.set_defaults(func=func)
        return sp

    def group(name, help):
        g = groups.add_parser(name, help=help).add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
        g.required = True
        return g

    tree = group("tree", "Bruhat-Tits tree")
    sp = sub(tree, "ball", cmd_tree_ball, ("dot", "json"), "vertices and edges of a ball")
    sp.add_argument("--radius", "-r", type=int, default=None)
    sp.add_argument("--center", default="0:0", help="vertex as m:b")
    sp.add_argument("--line", nargs=2, metavar=("ALPHA", "BETA"), help="mark the closeness line of two ends")
    sp = sub(tree, "geodesic", cmd_tree_geodesic, ("json", "csv"), "the line between two ends")
    sp.add_argument("--ends", nargs=2, metavar=("ALPHA", "BETA"))
    sp.add_argument("--window", nargs=2, type=int, metavar=("LO", "HI"), default=[-3, 3])

    horo = group("horo", "horospheres in H^2 x T_p")
    sp = sub(horo, "table", cmd_horo_table, ("csv", "json"), "fibers of one horosphere")
    sp.add_argument("--base")
    sp.add_argument("--window", nargs=2, type=int, metavar=("LO", "HI"), default=[-3, 3])
    sp.add_argument("--radius", "-r", type=int, default=0)
    sp.add_argument("--H", default="2")
    sp = sub(horo, "profile", cmd_horo_profile, ("csv", "json"), "fiber distances of two horospheres")
    sp.add_argument("--pair", nargs=2, metavar=("ALPHA", "BETA"))
    sp.add_argument("--radius", "-r", type=int, default=None)
    sp.add_argument("--H", default="2")

    bs = group("bs", "Baumslag-Solitar groups")
    sp = sub(bs, "comm", cmd_bs_comm, help="commensurability of BS(1,m) and BS(1,n)")
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", type=int)
    sp = sub(bs, "phi", cmd_bs_phi, help="matrix image of a word of BS(1,p^2)")
    sp.add_argument("--word")

    rig = group("rig", "parallelogram lemma and affinity")
    sp = sub(rig, "s0", cmd_rig_s0, help="shape threshold")
    sp.add_argument("--k", type=int)
    sp.add_argument("--D")
    sp.add_argument("--K0", default="1")
    for name, func, help in (
        ("verify", cmd_rig_verify, "check parallelograms are preserved"),
        ("extract", cmd_rig_extract, "recover the linear constant"),
    ):
        sp = sub(rig, name, func, help=help)
        sp.add_argument("--map", help="JSON lines file of {x, fx} records")
        sp.add_argument("--alpha", help="use x -> alpha x on the window instead of a file")
        sp.add_argument("--window", help="bound of the window [-w, w]")
        sp.add_argument("--depth", type=int, default=1, help="allowed power of p in denominators")
        sp.add_argument("--s0", type=int, default=None, help="override the shape threshold")
        if name == "verify":
            sp.add_argument("--L", type=int)
            sp.add_argument("--per-bound", default=None)
            sp.add_argument("--s0-increment", type=int, default=0)
        else:
            sp.add_argument("--q", type=int)

    comm = group("comm", "commensurator")
    sp = sub(comm, "bound", cmd_comm_bound, help="denominator profile of a rational matrix")
    sp.add_argument("--g", help='matrix as "a,b;c,d"')
    sp.add_argument("--maxlen", type=int, default=4)
    sp.add_argument("--generators", default="A,B")
    sp = sub(comm, "transport", cmd_comm_transport, help="matrix sending two points to 0 and inf")
    sp.add_argument("--from", dest="from_", nargs=2, metavar=("ALPHA", "BETA"))
    return parser


_NEG_FRACTION = re.compile(r"^-\d+/\d+$")


def _protect(argv: List[str]) -> List[str]:
    # argparse reads "-1/2" as an option; a leading space keeps it a value
    return [" " + a if _NEG_FRACTION.match(a) else a for a in argv]


def _write(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _fail(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return 1


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_protect(list(sys.argv[1:] if argv is None else argv)))
    try:
        p = args.prime if args.prime is not None else _prime_default()
        check_prime(p)
        if args.selftest:
            checks = SELFTESTS[args.group](p)
            _write(_dump({"module": args.group, "p": p, "checks": {name: ok for name, ok in checks}}), args.out)
            return 0 if all(ok for _, ok in checks) else 2
        text = args.func(args, BruhatTitsTree(p))
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"pslzp: error: {e}\n")
        return EX_USAGE
    except VerificationFailed as e:
        _write(e.text, args.out)
        return 2
    except OSError as e:
        return _fail("io", str(e))
    except (ValueError, TypeError, ZeroDivisionError, KeyError) as e:
        return _fail(type(e).__name__, str(e.args[0]) if e.args else str(e))
    _write(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
