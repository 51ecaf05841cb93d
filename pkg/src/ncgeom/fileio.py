"""JSON readers and writers for algebras, Lie algebras, bimodules, connections and maps.

Scalars are written as "p/q" strings.  Readers accept integers or "p/q" strings
and validate every structure on load; failures name the violated axiom.
"""
from __future__ import annotations

import json
from pathlib import Path

from .algebra import Bimodule, FiniteAlgebra, LieAlgebraData, check_algebra, check_bimodule, check_lie
from .connections import ConnectionData
from .exact import QI, ExactMatrix, parse_rat, rat_str


class LoadError(ValueError):
    """An input file is malformed or violates an axiom."""


def _scalar(re, im=0) -> QI:
    try:
        return QI(parse_rat(re), parse_rat(im))
    except (ValueError, TypeError) as e:
        raise LoadError(f"malformed rational: {e}") from None


def scalar_str(v: QI):
    """A real scalar as "p/q"; a complex one as ["p/q", "p/q"]."""
    return rat_str(v.re) if v.im == 0 else [rat_str(v.re), rat_str(v.im)]


def matrix_entries(m: ExactMatrix) -> list:
    return [[i, j, rat_str(v.re), rat_str(v.im)] for i, j, v in m.nonzeros()]


def _index(x, bound: int, what: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < bound:
        raise LoadError(f"index out of range in {what}: {x!r}")
    return x


def _entry(row, n_idx: int, what: str):
    if not isinstance(row, list) or len(row) not in (n_idx + 1, n_idx + 2):
        raise LoadError(f"malformed entry in {what}: {row!r}")
    idx = row[:n_idx]
    re = row[n_idx]
    im = row[n_idx + 1] if len(row) == n_idx + 2 else 0
    return idx, _scalar(re, im)


def read_json(path) -> dict:
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise LoadError(f"cannot read {path}: {e}") from None
    if not isinstance(data, dict):
        raise LoadError("top-level JSON object required")
    return data


def _dim(data: dict, key: str = "dim") -> int:
    n = data.get(key)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise LoadError(f"positive integer '{key}' required")
    return n


def algebra_from_dict(data: dict, validate: bool = True) -> FiniteAlgebra:
    n = _dim(data)
    if "unit" not in data or data["unit"] is None:
        raise LoadError("unit required")
    unit = data["unit"]
    if not isinstance(unit, list) or len(unit) != n:
        raise LoadError("unit must list one scalar per basis element")
    unit = [_scalar(*u) if isinstance(u, list) else _scalar(u) for u in unit]
    ent = {}
    for row in data.get("mul", []):
        (i, j, k), v = _entry(row, 3, "mul")
        i, j, k = (_index(x, n, "mul") for x in (i, j, k))
        ent[(k, i * n + j)] = ent.get((k, i * n + j), QI(0)) + v
    star = None
    if data.get("star") is not None:
        sent = {}
        for row in data["star"]:
            (i, j), v = _entry(row, 2, "star")
            sent[(_index(i, n, "star"), _index(j, n, "star"))] = v
        star = ExactMatrix.from_dict(n, n, sent)
    labels = data.get("basis")
    a = FiniteAlgebra(n, ExactMatrix.from_dict(n, n * n, ent), unit, star, labels)
    if validate:
        rep = check_algebra(a)
        if not rep.routes_agree or not rep.associative_direct:
            raise LoadError("associativity fails")
        if not rep.unit:
            raise LoadError("unit axiom fails: the unit vector is not a two-sided identity")
        if rep.star is False:
            raise LoadError("star axioms fail")
    return a


def algebra_to_dict(a: FiniteAlgebra) -> dict:
    out = {"dim": a.dim, "basis": list(a.labels), "unit": [scalar_str(u) for u in a.unit],
           "mul": [[j // a.dim, j % a.dim, k, rat_str(v.re), rat_str(v.im)] for k, j, v in a.mul.nonzeros()]}
    if a.star is not None:
        out["star"] = matrix_entries(a.star)
    return out


def lie_from_dict(data: dict, validate: bool = True) -> LieAlgebraData:
    n = _dim(data)
    ent = {}
    for row in data.get("bracket", []):
        (i, j, k), v = _entry(row, 3, "bracket")
        i, j, k = (_index(x, n, "bracket") for x in (i, j, k))
        ent[(k, i * n + j)] = ent.get((k, i * n + j), QI(0)) + v
    g = LieAlgebraData(n, ExactMatrix.from_dict(n, n * n, ent), data.get("basis"), check_antisymmetry=False)
    if validate:
        if not g.is_antisymmetric():
            raise LoadError("antisymmetry fails")
        rep = check_lie(g)
        if not rep.routes_agree or not rep.ok:
            raise LoadError("jacobi identity fails")
    return g


def lie_to_dict(g: LieAlgebraData) -> dict:
    n = g.dim
    return {"dim": n, "basis": list(g.labels),
            "bracket": [[j // n, j % n, k, rat_str(v.re), rat_str(v.im)] for k, j, v in g.bracket.nonzeros()]}


def bimodule_from_dict(data: dict, left: FiniteAlgebra, right: FiniteAlgebra | None = None,
                       validate: bool = True) -> Bimodule:
    right = left if right is None else right
    m = _dim(data)
    L = [dict() for _ in range(left.dim)]
    R = [dict() for _ in range(right.dim)]
    for key, alg, store in (("left", left, L), ("right", right, R)):
        for row in data.get(key, []):
            (a, i, j), v = _entry(row, 3, key)
            store[_index(a, alg.dim, key)][(_index(i, m, key), _index(j, m, key))] = v
    bm = Bimodule(left, right, m, [ExactMatrix.from_dict(m, m, x) for x in L],
                  [ExactMatrix.from_dict(m, m, x) for x in R])
    if validate:
        rep = check_bimodule(bm)
        for axiom in ("left_assoc", "right_assoc", "commute", "unit"):
            if not rep[axiom]:
                raise LoadError(f"bimodule axiom fails: {axiom}")
    return bm


def bimodule_to_dict(m: Bimodule) -> dict:
    return {"dim": m.dim,
            "left": [[a, i, j, rat_str(v.re), rat_str(v.im)] for a, x in enumerate(m.left) for i, j, v in x.nonzeros()],
            "right": [[b, i, j, rat_str(v.re), rat_str(v.im)] for b, x in enumerate(m.right) for i, j, v in x.nonzeros()]}


def connection_from_dict(data: dict) -> ConnectionData:
    K, n = _dim(data, "K"), _dim(data, "n")
    r = n * n - 1
    mats = [dict() for _ in range(r)]
    for row in data.get("A", []):
        (k, i, j), v = _entry(row, 3, "A")
        mats[_index(k, r, "A")][(_index(i, K, "A"), _index(j, K, "A"))] = v
    return ConnectionData(K, n, [ExactMatrix.from_dict(K, K, x) for x in mats])


def matrix_from_dict(data: dict) -> ExactMatrix:
    rows, cols = _dim(data, "rows"), _dim(data, "cols")
    ent = {}
    for row in data.get("entries", []):
        (i, j), v = _entry(row, 2, "entries")
        ent[(_index(i, rows, "entries"), _index(j, cols, "entries"))] = v
    return ExactMatrix.from_dict(rows, cols, ent)


def matrix_to_dict(m: ExactMatrix) -> dict:
    return {"rows": m.rows, "cols": m.cols, "entries": matrix_entries(m)}


def gda_dump(g) -> dict:
    """Dims and sparse differentials of a graded differential algebra."""
    return {"dims": list(g.dims), "d": [matrix_to_dict(m) for m in g.d]}


def parse_inputs(path, kind: str | None = None, left: FiniteAlgebra | None = None,
                 right: FiniteAlgebra | None = None):
    """Load and validate a file; the kind is inferred from its keys when not given."""
    data = read_json(path)
    if kind is None:
        if "bracket" in data:
            kind = "lie"
        elif "mul" in data or "unit" in data:
            kind = "algebra"
        elif "K" in data:
            kind = "connection"
        elif "left" in data or "right" in data:
            kind = "bimodule"
        elif "entries" in data:
            kind = "matrix"
        else:
            raise LoadError("cannot infer the file kind")
    if kind == "algebra":
        return algebra_from_dict(data)
    if kind == "lie":
        return lie_from_dict(data)
    if kind == "connection":
        return connection_from_dict(data)
    if kind == "matrix":
        return matrix_from_dict(data)
    if kind == "bimodule":
        if left is None:
            raise LoadError("bimodule files need the acting algebras")
        return bimodule_from_dict(data, left, right)
    raise LoadError(f"unknown file kind {kind!r}")


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)
