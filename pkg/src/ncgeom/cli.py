"""The ``nc`` command line: one verb per computation, JSON report on stdout.

Exit codes: 0 success, 1 a computed property is false, 2 bad input.
"""
from __future__ import annotations

import argparse
import sys

from .algebra import check_algebra, check_lie, regular_bimodule
from .complexes import StructuralError, cohomology
from .fileio import LoadError, dumps, gda_dump, parse_inputs, read_json, write_json
from .hochschild import SizeError, max_dim

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT = 0, 1, 2


def _check(args) -> tuple[dict, bool]:
    kind, obj = _load_unvalidated(args.file)
    if kind == "lie":
        rep = check_lie(obj)
        out = {"kind": "lie", "antisymmetric": obj.is_antisymmetric(), **rep.to_dict()}
        return out, out["antisymmetric"] and rep.ok
    rep = check_algebra(obj)
    return {"kind": "algebra", **rep.to_dict()}, rep.ok


def _load_unvalidated(path):
    """The check verb reports axioms instead of refusing to load."""
    from .fileio import algebra_from_dict, lie_from_dict
    data = read_json(path)
    if "bracket" in data:
        return "lie", lie_from_dict(data, validate=False)
    return "algebra", algebra_from_dict(data, validate=False)


def _cohomology(args) -> tuple[dict, bool]:
    from .hochschild import basic_cohomology_A, cyclic_cohomology, hochschild_cohomology
    a = parse_inputs(args.file, "algebra")
    N = args.max_degree
    if args.kind == "hochschild":
        res = hochschild_cohomology(a, regular_bimodule(a), N)
        return {"dims": res.dims, "normalized_dims": res.normalized_dims, "truncated": False}, res.agree
    if args.kind == "cyclic":
        return {"dims": cyclic_cohomology(a, N), "truncated": False}, True
    return {"dims": basic_cohomology_A(a, N), "truncated": False}, True


def _calculus(args) -> tuple[dict, bool]:
    from .calculi import DerCalculus, diagram_check, omega_diag, omega_u, omega_Z
    a = parse_inputs(args.file, "algebra")
    N = args.max_degree
    if args.kind == "u":
        g = omega_u(a, N).gda
    elif args.kind == "z":
        g = omega_Z(a, N).gda
    elif args.kind == "diag":
        g = omega_diag(a, N).gda
    else:
        g = DerCalculus(a, N).omega
    h = cohomology(g.complex(), N)
    out = {"kind": args.kind, "dims": g.dims, "cohomology": h.dims, "truncated": h.truncated}
    if args.emit == "gda":
        out["gda"] = gda_dump(g)
    ok = True
    if args.diagram:
        rep = diagram_check(a, N)
        out["diagram"] = rep.to_dict()
        ok = rep.ok
    return out, ok


def _weil(args) -> tuple[dict, bool]:
    from .lie_weil import weil_basic_cohomology, weil_cohomology
    g = parse_inputs(args.file, "lie")
    N = args.max_degree
    basic = weil_basic_cohomology(g, N)
    out = {"cohomology": weil_cohomology(g, N), "basic": basic.dims,
           "basic_expected_from_invariants": basic.expected, "horizontal_dims": basic.horizontal_dims,
           "truncated": False}
    return out, basic.ok


def _symplectic(args) -> tuple[dict, bool]:
    from .connections import symplectic_mn
    rep = symplectic_mn(args.n)
    return rep.to_dict(), rep.ok


def _flat(args) -> tuple[dict, bool]:
    from .connections import flat_classify
    if args.input:
        conn = parse_inputs(args.input, "connection")
        if conn.n != args.n:
            raise LoadError("connection file and --n disagree")
        rep = flat_classify(conn.K, conn.A, n=conn.n)
        cl = rep.classes[0]
        return {"K": conn.K, "n": conn.n, **cl.to_dict()}, True
    rep = flat_classify(args.K, n=args.n)
    return rep.to_dict(), rep.ok


def _ym_flow(args) -> tuple[dict, bool]:
    from .ym import census
    rep = census(args.K, range(args.seeds), tol_grad=args.tol_grad, tol_flat=args.tol_flat,
                 max_iter=args.max_iter)
    bad = [r for r in rep["runs"] if r["converged"] and r["class_label"] == "unresolved"]
    rep["flagged"] = [r["seed"] for r in rep["runs"] if r["class_label"] == "unresolved"]
    if args.out:
        write_json(rep, args.out)
    return rep, not bad


def _dual(args) -> tuple[dict, bool]:
    from .calculi import a_dual, bidual_map, diagonal_test, is_central, omega1_u
    a = parse_inputs(args.file, "algebra")
    if args.bimodule:
        m = parse_inputs(args.bimodule, "bimodule", a, a)
    else:
        m = omega1_u(a)[0]
    dual = a_dual(m)
    bd = bidual_map(m)
    return {"module_dim": m.dim, "dual_dim": dual.dim, "bidual_dim": bd.space.dim,
            "bidual_injective": bd.injective, "central": is_central(m), "diagonal": diagonal_test(m)}, True


def _symbols(args) -> tuple[dict, bool]:
    from .connections import first_order_symbols
    A = parse_inputs(args.left, "algebra")
    B = parse_inputs(args.right, "algebra") if args.right else A
    m = parse_inputs(args.m, "bimodule", A, B)
    n = parse_inputs(args.n, "bimodule", A, B)
    D = parse_inputs(args.map, "matrix")
    if D.shape != (n.dim, m.dim):
        raise LoadError("map shape does not match the bimodules")
    rep = first_order_symbols(m, n, D)
    out = rep.to_dict()
    if rep.is_first_order:
        out["sigma_L_shape"] = list(rep.sigma_L.shape)
        out["sigma_R_shape"] = list(rep.sigma_R.shape)
    ok = rep.is_first_order and rep.reconstruction_zero and rep.bimodule_homs and rep.well_defined
    return out, ok


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nc", description="Exact noncommutative differential calculus.")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("check", help="check the axioms of an algebra or Lie algebra file")
    s.add_argument("file")
    s.set_defaults(func=_check)

    s = sub.add_parser("cohomology", help="Hochschild, cyclic or basic cohomology dimensions")
    s.add_argument("--kind", choices=["hochschild", "cyclic", "basic"], required=True)
    s.add_argument("--max-degree", type=int, required=True)
    s.add_argument("file")
    s.set_defaults(func=_cohomology)

    s = sub.add_parser("calculus", help="dimensions and cohomology of a differential calculus")
    s.add_argument("--kind", choices=["u", "z", "diag", "der"], required=True)
    s.add_argument("--max-degree", type=int, required=True)
    s.add_argument("--diagram", action=argparse.BooleanOptionalAction, default=True)
    s.add_argument("--emit", choices=["gda"], help="also dump dims and sparse differentials")
    s.add_argument("file")
    s.set_defaults(func=_calculus)

    s = sub.add_parser("weil", help="cohomology and basic cohomology of the Weil algebra")
    s.add_argument("--max-degree", type=int, required=True)
    s.add_argument("file")
    s.set_defaults(func=_weil)

    s = sub.add_parser("symplectic", help="symplectic structure of M_n")
    s.add_argument("--n", type=int, default=2)
    s.set_defaults(func=_symplectic)

    s = sub.add_parser("flat", help="flat connections on K x n matrices")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--K", type=int, default=1)
    s.add_argument("--input")
    s.set_defaults(func=_flat)

    s = sub.add_parser("ym-flow", help="gradient flow of the matrix Yang-Mills potential")
    s.add_argument("--K", type=int, required=True)
    s.add_argument("--seeds", type=int, default=20)
    s.add_argument("--tol-grad", type=float, default=1e-9)
    s.add_argument("--tol-flat", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=20000)
    s.add_argument("--out")
    s.set_defaults(func=_ym_flow)

    s = sub.add_parser("dual", help="A-dual and bidual of a bimodule (default: universal 1-forms)")
    s.add_argument("--bimodule")
    s.add_argument("file")
    s.set_defaults(func=_dual)

    s = sub.add_parser("symbols", help="first-order test and universal symbols of a map")
    s.add_argument("--left", required=True, help="left algebra file")
    s.add_argument("--right", help="right algebra file (default: the left one)")
    s.add_argument("--m", required=True, help="source bimodule file")
    s.add_argument("--n", required=True, help="target bimodule file")
    s.add_argument("--map", required=True, help="matrix file for D: M -> N")
    s.set_defaults(func=_symbols)
    return p


def run(argv: list[str] | None = None) -> tuple[dict, int]:
    args = build_parser().parse_args(argv)
    config = {k: v for k, v in vars(args).items() if k != "func"}
    config["nc_max_dim"] = max_dim()
    try:
        out, ok = args.func(args)
    except (LoadError, SizeError) as e:
        return {"config": config, "error": str(e)}, EXIT_INPUT
    except (ValueError, StructuralError) as e:
        return {"config": config, "error": str(e)}, EXIT_INPUT
    out = dict(out)
    out["config"] = config
    out["ok"] = ok
    return out, EXIT_OK if ok else EXIT_PROPERTY


def main(argv: list[str] | None = None) -> int:
    out, code = run(argv)
    sys.stdout.write(dumps(out) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
