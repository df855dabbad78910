"""Command-line entry point.

Exit codes: 0 on success, 1 when a requested guarantee is not met (for
example ``--require-feasible`` on an infeasible bound), 2 on usage, parse or
input errors.  Tables go to standard output, diagnostics to standard error,
and machine-readable files are written only when asked for.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction

from . import bounds as B
from . import game as G
from . import gaplemma as GL
from . import geometry as geo
from . import scaffold as SC
from . import sets as S
from .thickness import thickness as measure_thickness
from . import verify as V
from .errors import MalformedDescriptor, ThicksetError

DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


def _num(text: str):
    """Exact rational from ``"p/q"``, an integer or a decimal literal."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return x


def _real(text: str) -> float:
    return float(_num(text))


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _levels(text: str) -> list:
    """``"1-7"`` or ``"2,3,5,8"``."""
    try:
        if "-" in text:
            lo, hi = text.split("-")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list: {text!r}")


def _points(text: str) -> list:
    """``"0,0;1,0;2,0"``."""
    try:
        return [tuple(Fraction(v) for v in p.split(",")) for p in text.split(";") if p.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad point list: {text!r}")


def _load(path):
    try:
        return S.load(path)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read descriptor {path}: {exc}")


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{x} ({float(x):.12g})" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


# ---------------------------------------------------------------------------
# subcommands


def cmd_thickness(args) -> int:
    spec = _load(args.descriptor)
    rep = measure_thickness(spec, depth=args.depth)
    print(f"tau = {rep.value:.12g}  [{rep.truncation}]")
    if rep.note:
        print(f"note: {rep.note}")
    if args.json:
        print(json.dumps(rep.as_dict(), default=str, sort_keys=True))
    return 0


def cmd_gaplemma(args) -> int:
    c1, c2 = _load(args.first), _load(args.second)
    verdict = GL.gap_lemma_decide(c1, c2, depth=args.depth)
    print(f"verdict = {verdict.tag}")
    print(f"thickness product = {verdict.tau_product:.12g}")
    if verdict.detail:
        print(f"detail: {verdict.detail}")
    if args.refine and verdict.tag == "intersect_guaranteed":
        res = GL.linked_refine(c1, c2, eps=args.eps)
        print(f"common point = {', '.join(_fmt(x) for x in res.point)}  (within {res.bound:.3g})")
    if args.require_intersect and verdict.tag not in ("intersect_guaranteed", "trivially_intersect"):
        return 1
    return 0


def _print_bound(b: B.DimensionBound, args) -> int:
    print(f"{b.theorem}: value = {b.value:.12g}  feasible = {b.feasible}")
    if b.slack is not None:
        print(f"slack = {b.slack:.6g}")
    for k in ("c", "beta", "proof_choice_c"):
        if k in b.params and b.params[k] is not None:
            print(f"{k} = {b.params[k]:.12g}")
    if b.warning:
        print(f"warning: {b.warning}", file=sys.stderr)
    return 1 if args.require_feasible and not b.feasible else 0


_BOUND_ALIASES = {"intersect": "intersection", "pattern": "capacity"}


def cmd_bound(args) -> int:
    kind = _BOUND_ALIASES.get(args.kind, args.kind)
    if args.sweep:
        kind = "sweep"
    if kind == "dim1d":
        _need(args, "tau")
        print(f"{B.dim_lower_1d(float(args.tau[0])):.12g}")
        return 0
    if kind == "convex":
        _need(args, "tau")
        print(f"{B.convex_gap_dim_bound(float(args.tau[0]), args.d):.12g}")
        return 0
    if kind == "constants":
        k = B.constants(args.d)
        print(f"d = {k.d}  K1 = {k.K1:.12g}  K2 = {k.K2:.12g}")
        return 0
    if kind == "intersection":
        _need(args, "tau", "c")
        b = B.intersection_bound([float(t) for t in args.tau], float(args.sup_diam), float(args.diam_b),
                                 args.d, float(args.c))
        return _print_bound(b, args)
    if kind == "single":
        _need(args, "tau", "c")
        b = B.single_set_bound(float(args.tau[0]), float(args.diam_b), float(args.sup_diam), args.d, float(args.c))
        return _print_bound(b, args)
    if kind == "optimize":
        _need(args, "tau")
        try:
            b = B.optimize_c([float(t) for t in args.tau], float(args.sup_diam), float(args.diam_b), args.d)
        except ThicksetError as exc:
            print(f"no feasible c: {exc}", file=sys.stderr)
            return 1 if args.require_feasible else 0
        return _print_bound(b, args)
    if kind == "winning":
        _need(args, "alpha", "c")
        b = B.winning_set_bound(float(args.alpha), float(args.beta), float(args.c), args.d)
        return _print_bound(b, args)
    if kind == "capacity":
        _need(args, "tau")
        cap = B.pattern_capacity(float(args.tau[0]), float(args.diam_b), float(args.sup_diam), args.d)
        print(f"N = {cap.N}  raw = {cap.raw:.12g}  beta = {cap.beta:.6g}")
        if cap.pre_asymptotic:
            print("warning: tau < e, outside the asymptotic regime", file=sys.stderr)
        return 0
    if kind == "threshold":
        _need(args, "c")
        print(f"{B.feasibility_threshold_tau(args.d, float(args.c), float(args.beta), args.count):.12g}")
        return 0
    if kind == "sweep":
        taus = [float(t) for t in args.tau] if args.tau else [10.0 ** e for e in range(6, 13)]
        cs = [args.d * (i + 1) / 10 for i in range(9)]
        w = csv.writer(sys.stdout)
        w.writerow(["d", "c", "tau", "beta", "value", "feasible"])
        for row in B.sweep(taus, cs, args.d, float(args.sup_diam), float(args.diam_b)):
            w.writerow(row)
        return 0
    raise UsageError(f"unknown bound kind {kind}")


def _need(args, *names):
    for n in names:
        v = getattr(args, n)
        if v is None or v == []:
            raise UsageError(f"--{n.replace('_', '-')} is required for 'bound {args.kind}'")


def _split_role(text, default_kind):
    """``"kind:descriptor"`` or a bare kind."""
    if text is None:
        return default_kind, None
    kind, _, path = text.partition(":")
    return kind, (path or None)


def _make_bob(name, target, seed):
    if name in ("gapchaser", "chaser"):
        return G.GapChaser(target, seed)
    if name == "random":
        return G.RandomLegal(seed)
    if name == "concentric":
        h = S.hull(target)
        return G.ConcentricShrink(tuple(float(x) for x in geo.bounding_box(h).center))
    raise UsageError(f"unknown Bob policy {name}")


def cmd_game(args) -> int:
    alice_kind, alice_desc = _split_role(args.alice, "thickness")
    bob_kind, bob_desc = _split_role(args.bob, "gapchaser")
    if alice_kind not in ("thickness", "pass"):
        raise UsageError(f"unknown Alice strategy {alice_kind}")
    path = args.target or alice_desc or bob_desc
    if path is None:
        raise UsageError("give --target or --alice thickness:<descriptor>")
    target = _load(path)
    bob_target = _load(bob_desc) if bob_desc else target
    if args.params:
        try:
            args.alpha, args.beta, args.c, args.rho = (_num(v) for v in args.params.split(","))
        except (ValueError, argparse.ArgumentTypeError):
            raise UsageError("--params expects alpha,beta,c,rho")
    tau = measure_thickness(target, depth=args.depth).value
    beta = args.beta
    alpha = args.alpha if args.alpha is not None else 1 / (tau * beta)
    if isinstance(alpha, float) and isinstance(beta, Fraction):
        beta = float(beta)
    rho = args.rho if args.rho is not None else beta * Fraction(S.diameter(target)) / 2
    params = G.GameParams(alpha, beta, args.c, rho, target.dim)
    tally = {"erased": 0, "in_S": 0, "not_in_S": 0}
    illegal = 0
    for i in range(args.matches):
        seed = args.seed + i
        alice = G.ThicknessStrategy(target) if alice_kind == "thickness" else G.Pass()
        bob = _make_bob(bob_kind, bob_target, seed)
        state, verdict = G.play_match(alice, bob, params, args.stop, target=target)
        tally[verdict.tag] += 1
        illegal += sum(1 for e in getattr(alice, "log", []) if not e[4])
        if args.trace and i == 0:
            G.write_trace(state, args.trace)
    print(f"alpha = {float(alpha):.12g}  beta = {float(beta):.6g}  c = {args.c}  rho = {float(rho):.6g}")
    print(f"matches = {args.matches}  erased = {tally['erased']}  in_S = {tally['in_S']}  "
          f"not_in_S = {tally['not_in_S']}  illegal_triggers = {illegal}")
    return 1 if args.require_win and tally["not_in_S"] else 0


def _scaffold_params(args):
    if args.params:
        try:
            with open(args.params, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read parameters: {exc}")
    else:
        cfg = {}
    get = lambda k, default: cfg.get(k, default)
    alpha = _num(str(get("alpha", args.alpha)))
    c = _num(str(get("c", args.c)))
    beta = _num(str(get("beta", args.beta)))
    rho = _num(str(get("rho", args.rho)))
    x0 = tuple(_num(str(v)) for v in get("x0", args.x0))
    if get("desk", args.N is not None):
        return SC.desk_params(alpha, c, N=int(get("N", args.N or 2)), beta=beta, rho=rho, x0=x0)
    return SC.make_params(len(x0), alpha, beta, c, rho, x0=x0)


def cmd_scaffold(args) -> int:
    p = _scaffold_params(args)
    print(f"d = {p.d}  N = {p.N}  gamma = {_fmt(p.gamma)}  feasible = {p.feasible}")
    claims = SC.check_claims_i_ii_iii(p)
    print("claims: " + "  ".join(f"({k}) {'ok' if claims.holds[k] else 'fails'} margin {v:.3g}"
                                 for k, v in claims.margins.items()))
    if not p.desk:
        dim = SC.scaffold_dimension(p)
        print(f"log M / (N |log beta|) = {dim.construction:.12g}")
        print(f"d - K1 alpha^d / |log beta| = {dim.closed_form:.12g}  ({'holds' if dim.holds else 'violated'})")
        return 0
    print(f"M = {p.M}")
    if args.alice == "pass":
        alice = G.Pass()
    elif args.alice == "center":
        alice = G.CenterEraser()
    else:
        if not args.target:
            raise UsageError("--alice thickness needs --target")
        alice = G.ThicknessStrategy(_load(args.target))
    root = SC.build_scaffold(p, alice, args.depth, keep=args.keep)
    rep = SC.verify_tree(root, p)
    print(f"nodes = {rep.nodes}  min children = {rep.min_children}  structural checks = {'ok' if rep.ok else 'FAILED'}")
    if args.emit:
        n = SC.emit_jsonl(root, args.emit)
        print(f"wrote {n} rows to {args.emit}")
    return 0 if rep.ok else 1


def cmd_verify(args) -> int:
    if args.what == "intersect":
        specs = [_load(p) for p in args.descriptors]
        res = V.brute_intersection(specs, args.level)
        name = type(res).__name__
        if isinstance(res, V.NonemptyWitness):
            print(f"{name} cell={list(res.cell)} box=[{', '.join(_fmt(x) for x in res.box.lower)}] .. "
                  f"[{', '.join(_fmt(x) for x in res.box.upper)}]")
        else:
            print(name)
        return 0
    if args.what == "boxdim":
        spec = _load(args.descriptors[0])
        est = V.box_counting(spec, args.levels)
        if args.csv:
            w = csv.writer(sys.stdout)
            w.writerow(["scale", "count"])
            for s, n in zip(est.scales, est.counts):
                w.writerow([repr(s), n])
        print(f"dimension estimate = {est.slope:.6f}  residual = {est.residual:.3g}")
        return 0
    if args.what == "pattern":
        spec = _load(args.descriptors[0])
        if args.points is None or args.lam is None:
            raise UsageError("verify pattern needs --points and --lam")
        try:
            ws = V.pattern_search(spec, args.points, args.lam, args.level, limit=args.limit)
        except ThicksetError as exc:
            print(f"no certified translate: {exc}")
            return 1
        print(f"witnesses = {len(ws)}")
        for w in ws:
            print(json.dumps([[str(v) for v in p] for p in w.points]))
        return 0
    raise UsageError(f"unknown verify target {args.what}")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thickset", description="Thickness of compact sets and its consequences.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thickness", help="thickness of a descriptor")
    p.add_argument("descriptor")
    p.add_argument("--depth", type=_positive_int, default=3)
    p.add_argument("--json", action="store_true", help="also print the report as JSON")
    p.set_defaults(func=cmd_thickness)

    p = sub.add_parser("gaplemma", help="decide whether two sets must intersect")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--depth", type=_positive_int, default=6)
    p.add_argument("--refine", action="store_true", help="locate a common point")
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--require-intersect", action="store_true")
    p.set_defaults(func=cmd_gaplemma)

    p = sub.add_parser("bound", help="dimension bounds and constants")
    p.add_argument("kind", choices=["dim1d", "convex", "constants", "intersection", "intersect", "single",
                                    "optimize", "winning", "capacity", "pattern", "threshold", "sweep"])
    p.add_argument("--tau", type=_real, action="append")
    p.add_argument("--d", type=_positive_int, default=1)
    p.add_argument("--c", type=_real)
    p.add_argument("--alpha", type=_real)
    p.add_argument("--beta", type=_real, default=0.25)
    p.add_argument("--diam-b", dest="diam_b", type=_real, default=1.0)
    p.add_argument("--sup-diam", dest="sup_diam", type=_real, default=1.0)
    p.add_argument("--count", type=_positive_int, default=1)
    p.add_argument("--require-feasible", action="store_true")
    p.add_argument("--sweep", action="store_true", help="emit CSV rows over a grid of c (and the given taus)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("game", help="thickness strategy against a Bob policy")
    p.add_argument("--target", help="descriptor of the set Alice defends")
    p.add_argument("--alice", help="thickness[:descriptor] or pass (default thickness)")
    p.add_argument("--params", help="alpha,beta,c,rho in one flag")
    p.add_argument("--alpha", type=_num)
    p.add_argument("--beta", type=_num, default=Fraction(1, 4))
    p.add_argument("--c", type=_num, default=0)
    p.add_argument("--rho", type=_num)
    p.add_argument("--stop", type=float, default=1e-8)
    p.add_argument("--matches", type=_positive_int, default=10)
    p.add_argument("--bob", default="gapchaser",
                   help="gapchaser, chaser:<descriptor>, random or concentric")
    p.add_argument("--depth", type=_positive_int, default=4)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trace", help="write the first match as JSON lines")
    p.add_argument("--require-win", action="store_true")
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("scaffold", help="lattice Cantor construction")
    p.add_argument("--params", help="JSON file with alpha, c, beta, rho, x0, N, desk")
    p.add_argument("--alpha", default="1/864")
    p.add_argument("--c", default="1/2")
    p.add_argument("--beta", default="1/4")
    p.add_argument("--rho", default="1/8")
    p.add_argument("--x0", type=lambda s: s.split(","), default=["1/5"])
    p.add_argument("--N", type=_positive_int, help="explicit N (small desk construction)")
    p.add_argument("--depth", type=_positive_int, default=3)
    p.add_argument("--keep", type=_positive_int)
    p.add_argument("--alice", choices=["pass", "thickness", "center"], default="pass")
    p.add_argument("--target", help="descriptor for --alice thickness")
    p.add_argument("--emit", help="write examined lattice children as JSON lines")
    p.set_defaults(func=cmd_scaffold)

    p = sub.add_parser("verify", help="raster oracles")
    p.add_argument("what", choices=["intersect", "boxdim", "pattern"])
    p.add_argument("descriptors", nargs="+")
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--levels", type=_levels, default=list(range(1, 7)))
    p.add_argument("--points", type=_points)
    p.add_argument("--lam", type=_num)
    p.add_argument("--limit", type=_positive_int, default=10)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (UsageError, MalformedDescriptor, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ThicksetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
