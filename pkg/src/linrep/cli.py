"""Command-line surface tying the modules together.

Exit codes: 0 success, 1 input error, 2 check failed, 3 budget exceeded /
inconclusive.  All randomness is counter-based (Philox) and fully
determined by --seed, so reports are byte-identical across runs and
thread-pool sizes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import hyperfin, ncrat, repseq, soficam, tiling
from .field import FieldSpec
from .freealg import AlgebraElement, AlgebraMatrix, ParseError, parse_element
from .matrix import DenseMatrix
from .subspace import BudgetExceededError, Subspace

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CHECK_FAILED = 2
EXIT_BUDGET = 3


class InputError(ValueError):
    pass


def parse_field(text: str) -> FieldSpec:
    text = text.strip()
    if "^" in text:
        p, deg = text.split("^", 1)
        return FieldSpec(int(p), int(deg))
    return FieldSpec(int(text))


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def parse_range(text: str):
    """'2..16' or a comma list '8,16,32'."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def emit(obj, out):
    out.write(json.dumps(obj, sort_keys=True, separators=(",", ":")))
    out.write("\n")


def frac_json(x: Fraction):
    return {"num": x.numerator, "den": x.denominator}


def pool_size() -> int:
    try:
        return max(1, int(os.environ.get("LINREP_THREADS", "1")))
    except ValueError:
        return 1


def load_approx_map(args) -> tiling.FiniteApproxMap:
    if getattr(args, "poly", None):
        field = parse_field(args.field)
        inst = soficam.PolyInstance(field, args.poly)
        return soficam.poly_basis_map(inst, args.imax or args.poly)
    if getattr(args, "map", None):
        obj = load_json(args.map)
        field = FieldSpec.from_json(obj["field"])
        phi = [DenseMatrix.from_json(field, m) for m in obj["phi"]]
        mult = {(int(a), int(b)): np.array(coords, dtype=np.uint8)
                for a, b, coords in obj["mult"]}
        return tiling.FiniteApproxMap(field, phi, mult)
    raise InputError("need --map FILE or --poly M")


def load_f_data(args, imax) -> tiling.FSubspaceData:
    if args.f:
        obj = load_json(args.f)
        return tiling.FSubspaceData(
            [np.array(v, dtype=np.uint8) for v in obj["basis"]],
            {int(k): np.array(v, dtype=np.uint8) for k, v in obj.get("finv", {}).items()})
    # Default F = span{1}.
    unit = np.zeros(imax, dtype=np.uint8)
    unit[0] = 1
    return tiling.FSubspaceData([unit], {0: unit})


def load_h(args, field, n) -> Subspace:
    if getattr(args, "h", None):
        rows = load_json(args.h)
        return Subspace(field, n, np.array(rows, dtype=np.uint8).reshape(len(rows), n))
    return Subspace.full(field, n)


# -- subcommand bodies --

def cmd_rank(args, out):
    field = parse_field(args.field)
    m = DenseMatrix.from_json(field, load_json(args.matrix))
    emit({"rank": m.rank(), "rows": m.rows, "cols": m.cols}, out)
    return EXIT_OK


def cmd_profile(args, out):
    field = parse_field(args.field)
    ks = parse_range(args.k)
    elem = parse_element(args.element, field, args.r)
    a = AlgebraMatrix.scalar(field, args.r, 1, elem)
    if args.family == "cyclic":
        desc = repseq.FamilyDescriptor.cyclic_regular(args.r)
    elif args.family == "random":
        desc = None
    else:
        raise InputError(f"unknown family {args.family!r}")

    def one(k):
        if desc is not None:
            rep = repseq.family_generate(desc, k, field)
        else:
            rep = repseq.family_generate(
                repseq.FamilyDescriptor.random_invertible(args.seed + k, k, args.r), k, field)
        m = repseq.apply_matrix(rep, a)
        return (k, rep.n, m.rank())

    workers = pool_size()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, ks))
    else:
        rows = [one(k) for k in ks]
    rows.sort(key=lambda t: t[0])   # output ordered by k regardless of scheduling
    for (k, nk, rank) in rows:
        frac = Fraction(rank, nk)
        out.write(f"{k},{nk},{rank},{frac.numerator},{frac.denominator}\n")
    return EXIT_OK


def cmd_atiyah(args, out):
    profile = repseq.RankProfile()
    try:
        with open(args.profile) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                k, nk, rank = line.split(",")[:3]
                profile.add(int(k), int(nk), int(rank))
    except (OSError, ValueError) as exc:
        raise InputError(f"bad profile file: {exc}") from exc
    report = repseq.atiyah_check(profile, args.window, parse_fraction(args.tol))
    emit(report.to_json(), out)
    return EXIT_OK if report.integral else EXIT_CHECK_FAILED


def cmd_tile(args, out):
    m = load_approx_map(args)
    f = load_f_data(args, m.i_max)
    h = load_h(args, m.field, m.n)
    delta = parse_fraction(args.delta)
    cert = tiling.greedy_tiling(m, f, h, args.i, delta, seed=args.seed,
                                sample_budget=args.budget)
    emit(cert.to_json(), out)
    return EXIT_OK


def cmd_tile_verify(args, out):
    m = load_approx_map(args)
    f = load_f_data(args, m.i_max)
    h = load_h(args, m.field, m.n)
    obj = load_json(args.cert)
    cert = tiling.TilingCertificate.from_json(m.field, m.n, obj)
    ok = tiling.verify_certificate(cert, m, f, h, cert.i, cert.delta)
    emit({"valid": ok}, out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_hyperfinite_check(args, out):
    rep = repseq.Representation.from_json(load_json(args.rep))
    w = hyperfin.HyperfiniteWitness.from_json(rep.field, rep.n, load_json(args.witness))
    ok = hyperfin.witness_check(rep, w)
    emit({"valid": ok}, out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_hyperfinite_search(args, out):
    rep = repseq.Representation.from_json(load_json(args.rep))
    w = hyperfin.witness_search(rep, parse_fraction(args.epsilon), args.K,
                                budget=args.budget, seed=args.seed)
    if w is None:
        emit({"found": False}, out)
        return EXIT_BUDGET
    emit({"found": True, "witness": w.to_json()}, out)
    return EXIT_OK


def cmd_cheeger(args, out):
    rep = repseq.Representation.from_json(load_json(args.rep))
    if args.trials:
        report = hyperfin.cheeger_random(rep, args.trials, args.seed)
    else:
        report = hyperfin.cheeger_exact(rep, cap=args.cap)
    emit(report.to_json(), out)
    return EXIT_OK


def cmd_expander(args, out):
    rep = repseq.Representation.from_json(load_json(args.rep))
    alpha = parse_fraction(args.alpha)
    ok = hyperfin.expander_check(rep, alpha, cap=args.cap)
    emit({"expander": ok, "alpha": frac_json(alpha)}, out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_sofic_check(args, out):
    if args.poly_levels:
        field = parse_field(args.field)
        levels = parse_range(args.poly_levels)
        maps, s_bounds = [], []
        d = args.basis_size - 1   # top degree of the checked span
        for m in levels:
            inst = soficam.PolyInstance(field, m)
            maps.append(soficam.poly_basis_map(inst, min(2 * args.basis_size, m)))
            s_bounds.append(Fraction(2 * d, m))
        data = soficam.SoficData(maps, s_bounds)
        reports = []
        all_ok = True
        for idx, m in enumerate(levels):
            elements = []
            for j in range(args.basis_size):
                coords = np.zeros(maps[idx].i_max, dtype=np.uint8)
                coords[j] = 1
                elements.append((coords, Fraction(m - d, m)))
            rep = soficam.sofic_check(data, idx + 1, elements,
                                      basis_count=args.basis_size)
            reports.append(rep)
            all_ok = all_ok and rep.all_ok
        emit({"levels": levels, "reports": [r.to_json() for r in reports]}, out)
        return EXIT_OK if all_ok else EXIT_CHECK_FAILED
    obj = load_json(args.sofic)
    field = FieldSpec.from_json(obj["field"])
    maps = []
    for entry in obj["maps"]:
        phi = [DenseMatrix.from_json(field, m) for m in entry["phi"]]
        mult = {(int(a), int(b)): np.array(c, dtype=np.uint8) for a, b, c in entry["mult"]}
        maps.append(tiling.FiniteApproxMap(field, phi, mult))
    s_bounds = [Fraction(s["num"], s["den"]) for s in obj["s"]]
    elements = [(np.array(c, dtype=np.uint8), Fraction(j["num"], j["den"]))
                for c, j in obj.get("elements", [])]
    data = soficam.SoficData(maps, s_bounds)
    report = soficam.sofic_check(data, args.level, elements)
    emit(report.to_json(), out)
    return EXIT_OK if report.all_ok else EXIT_CHECK_FAILED


def cmd_folner(args, out):
    field = parse_field(args.field)
    inst = soficam.PolyInstance(field, args.m)
    elements = [np.array(e, dtype=np.uint8) for e in json.loads(args.elements)]
    v1, v = soficam.folner_pair(inst, elements, parse_fraction(args.delta))
    emit({"V1": v1.basis.astype(int).tolist(), "V": v.basis.astype(int).tolist(),
          "dim_V1": v1.dim, "dim_V": v.dim}, out)
    return EXIT_OK


def cmd_ncrat_eval(args, out):
    field = parse_field(args.field)
    expr = ncrat.parse_ratexpr(args.expr)
    mats = [DenseMatrix.from_json(field, m) for m in load_json(args.matrices)]
    result = ncrat.evaluate(expr, mats)
    if result.ok:
        emit({"ok": True, "value": result.value.to_json()}, out)
        return EXIT_OK
    emit({"ok": False, "failure_path": list(result.failure_path)}, out)
    return EXIT_CHECK_FAILED


def cmd_ncrat_equiv(args, out):
    r_expr = ncrat.parse_ratexpr(args.r_expr)
    s_expr = ncrat.parse_ratexpr(args.s_expr)
    verdict = ncrat.equiv_probabilistic(
        r_expr, s_expr, parse_range(args.sizes), args.trials,
        ext_deg=args.ext_deg, seed=args.seed, base_field=parse_field(args.field))
    emit(verdict.to_json(), out)
    if verdict.kind == "counterexample":
        return EXIT_CHECK_FAILED
    if verdict.kind == "no_common_domain":
        return EXIT_BUDGET
    return EXIT_OK


def cmd_repair(args, out):
    field = parse_field(args.field)
    m = DenseMatrix.from_json(field, load_json(args.matrix))
    repaired = repseq.repair_to_invertible(m)
    emit({"repaired": repaired.to_json(),
          "distance": (repaired - m).rank(),
          "defect": m.rows - m.rank()}, out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="linrep",
                                description="exact computations with sequences of "
                                            "linear representations over finite fields")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("rank", cmd_rank, help="rank of a matrix over GF(q)")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--field", default="2")

    sp = add("profile", cmd_profile, help="normalized rank profile of an element")
    sp.add_argument("--family", default="cyclic", choices=["cyclic", "random"])
    sp.add_argument("--k", required=True, help="range like 2..16")
    sp.add_argument("--element", required=True, help="group-algebra grammar, e.g. 'g1 - 1'")
    sp.add_argument("--field", default="2")
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("atiyah", cmd_atiyah, help="integrality diagnostic on a profile CSV")
    sp.add_argument("--profile", required=True)
    sp.add_argument("--window", type=int, default=8)
    sp.add_argument("--tol", default="1/32")

    for name, fn in (("tile", cmd_tile), ("tile-verify", cmd_tile_verify)):
        sp = add(name, fn, help=f"{name} a linear tiling")
        sp.add_argument("--map", help="FiniteApproxMap JSON file")
        sp.add_argument("--poly", type=int, help="use the degree-<M truncation fixture")
        sp.add_argument("--imax", type=int)
        sp.add_argument("--field", default="2")
        sp.add_argument("--f", help="F data JSON file (default: span{1})")
        sp.add_argument("--h", help="H basis JSON file (default: full space)")
        sp.add_argument("--i", type=int, default=1)
        sp.add_argument("--delta", default="1/4")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=2048)
        if name == "tile-verify":
            sp.add_argument("--cert", required=True)

    sp = add("hyperfinite-check", cmd_hyperfinite_check, help="verify a witness file")
    sp.add_argument("--rep", required=True)
    sp.add_argument("--witness", required=True)

    sp = add("hyperfinite-search", cmd_hyperfinite_search, help="search for a witness")
    sp.add_argument("--rep", required=True)
    sp.add_argument("--epsilon", default="1/10")
    sp.add_argument("--K", type=int, default=8)
    sp.add_argument("--budget", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("cheeger", cmd_cheeger, help="linear expansion constant")
    sp.add_argument("--rep", required=True)
    sp.add_argument("--trials", type=int, default=0, help="0 = exact enumeration")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cap", type=int, default=hyperfin.ENUM_CAP)

    sp = add("expander", cmd_expander, help="dimension-expander check")
    sp.add_argument("--rep", required=True)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--cap", type=int, default=hyperfin.ENUM_CAP)

    sp = add("sofic-check", cmd_sofic_check, help="sofic-representation conditions")
    sp.add_argument("--sofic", help="SoficData JSON file")
    sp.add_argument("--level", type=int, default=1)
    sp.add_argument("--poly-levels", help="truncation fixture sizes, e.g. 8,16,32,64")
    sp.add_argument("--basis-size", type=int, default=3)
    sp.add_argument("--field", default="2")

    sp = add("folner", cmd_folner, help="Folner pair for polynomial elements")
    sp.add_argument("--field", default="2")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--elements", required=True, help="JSON list of coefficient lists")
    sp.add_argument("--delta", required=True)

    sp = add("ncrat-eval", cmd_ncrat_eval, help="evaluate a rational expression")
    sp.add_argument("--expr", required=True)
    sp.add_argument("--matrices", required=True)
    sp.add_argument("--field", default="2^8")

    sp = add("ncrat-equiv", cmd_ncrat_equiv, help="probabilistic equivalence test")
    sp.add_argument("--r-expr", required=True)
    sp.add_argument("--s-expr", required=True)
    sp.add_argument("--sizes", default="1..4")
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--ext-deg", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--field", default="2")

    sp = add("repair", cmd_repair, help="closest invertible matrix in rank distance")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--field", default="2")
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.fn(args, out)
    except BudgetExceededError as exc:
        emit({"error": "budget_exceeded", "detail": str(exc)}, out)
        return EXIT_BUDGET
    except (InputError, ParseError, ValueError, KeyError) as exc:
        emit({"error": "input", "detail": str(exc)}, out)
        return EXIT_INPUT


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
