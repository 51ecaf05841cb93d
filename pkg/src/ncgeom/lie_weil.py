"""Chevalley-Eilenberg complexes, invariant polynomials and the Weil algebra."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Sequence

from .algebra import LieAlgebraData, check_lie, exterior_basis, wedge_sort
from .complexes import (CochainComplex, GradedDiffAlgebra, OperationData, basic_subcomplex,
                        cohomology, StructuralError)
from .exact import QI, ExactMatrix, Subspace, kernel


class LieModule:
    """A representation X -> pi(X) of a Lie algebra on C^dim."""

    def __init__(self, lie: LieAlgebraData, dim: int, action: Sequence[ExactMatrix], check: bool = True):
        if len(action) != lie.dim:
            raise ValueError("one action matrix per Lie basis element is required")
        self.lie = lie
        self.dim = dim
        self.action = list(action)
        if check and not self.is_valid():
            raise ValueError("invalid module action: pi([X,Y]) != [pi(X), pi(Y)]")

    def is_valid(self) -> bool:
        g = self.lie
        for a in range(g.dim):
            for b in range(g.dim):
                lhs = self.action[a] @ self.action[b] - self.action[b] @ self.action[a]
                rhs = ExactMatrix.zeros(self.dim, self.dim)
                for k, v in g.table.get((a, b), []):
                    rhs = rhs + self.action[k].scale(v)
                if lhs != rhs:
                    return False
        return True


def trivial_module(g: LieAlgebraData) -> LieModule:
    return LieModule(g, 1, [ExactMatrix.zeros(1, 1)] * g.dim, check=False)


def adjoint_module(g: LieAlgebraData) -> LieModule:
    return LieModule(g, g.dim, g.ad_mats())


def ce_differential(g: LieAlgebraData, e: LieModule, n: int) -> ExactMatrix:
    """Matrix of d: Lambda^n g* (x) E -> Lambda^(n+1) g* (x) E from the two-sum formula.

    Basis index of (I, v) is position(I) * dim E + v, with I increasing."""
    src = exterior_basis(g.dim, n)
    tgt = exterior_basis(g.dim, n + 1)
    sidx = {m: k for k, m in enumerate(src)}
    de = e.dim
    act = [{(r, c): v for r, c, v in m.nonzeros()} for m in e.action]
    ent = {}

    def add(key, v):
        ent[key] = ent.get(key, QI(0)) + v

    for row, J in enumerate(tgt):
        for k in range(n + 1):
            I = J[:k] + J[k + 1:]
            col = sidx[I]
            sgn = -1 if k % 2 else 1
            for (r, c), v in act[J[k]].items():
                add((row * de + r, col * de + c), v * sgn)
        for r in range(n + 1):
            for s in range(r + 1, n + 1):
                rest = J[:r] + J[r + 1:s] + J[s + 1:]
                sgn = -1 if (r + s) % 2 else 1
                for m, f in g.table.get((J[r], J[s]), []):
                    ws = wedge_sort((m,) + rest)
                    if ws is None:
                        continue
                    sign, key = ws
                    col = sidx[key]
                    for v in range(de):
                        add((row * de + v, col * de + v), f * (sgn * sign))
    return ExactMatrix.from_dict(len(tgt) * de, len(src) * de, {k: v for k, v in ent.items() if v})


def ce_complex(g: LieAlgebraData, e: LieModule | None = None, upto: int | None = None) -> CochainComplex:
    e = trivial_module(g) if e is None else e
    if not e.is_valid():
        raise ValueError("invalid module action")
    top = g.dim if upto is None else min(upto, g.dim)
    dims = [len(exterior_basis(g.dim, n)) * e.dim for n in range(top + 1)]
    d = [ce_differential(g, e, n) for n in range(top)]
    exit_map = ce_differential(g, e, top) if top < g.dim else None
    return CochainComplex(dims, d, exit_map=exit_map, complete=(top == g.dim))


def wedge_product_matrix(r: int, p: int, q: int) -> ExactMatrix:
    src_p = exterior_basis(r, p)
    src_q = exterior_basis(r, q)
    tgt = {m: k for k, m in enumerate(exterior_basis(r, p + q))}
    ent = {}
    for i, I in enumerate(src_p):
        for j, J in enumerate(src_q):
            ws = wedge_sort(I + J)
            if ws is None:
                continue
            s, key = ws
            ent[(tgt[key], i * len(src_q) + j)] = s
    return ExactMatrix.from_dict(len(tgt), len(src_p) * len(src_q), ent)


def exterior_gda(g: LieAlgebraData) -> GradedDiffAlgebra:
    """Lambda g* with the Chevalley-Eilenberg differential (complete, top degree dim g)."""
    c = ce_complex(g)
    r = g.dim
    return GradedDiffAlgebra(c.dims, c.d, lambda p, q: wedge_product_matrix(r, p, q),
                             ExactMatrix.identity(1), star=[ExactMatrix.identity(n) for n in c.dims],
                             complete=True, name="Lambda g*")


# ----------------------------------------------------------------------
# invariant polynomials
# ----------------------------------------------------------------------

def sym_basis(r: int, n: int) -> list[tuple[int, ...]]:
    return list(combinations_with_replacement(range(r), n))


def coadjoint_matrix(g: LieAlgebraData, b: int, n: int) -> ExactMatrix:
    """Action of X_b on Sym^n g* as a derivation; X_b . xi^a = -sum_c f_bc^a xi^c."""
    basis = sym_basis(g.dim, n)
    idx = {m: k for k, m in enumerate(basis)}
    gen = {}
    for c in range(g.dim):
        for a, v in g.table.get((b, c), []):
            gen.setdefault(a, []).append((c, -v))
    ent = {}
    for col, mono in enumerate(basis):
        for pos, a in enumerate(mono):
            for c, v in gen.get(a, []):
                new = tuple(sorted(mono[:pos] + (c,) + mono[pos + 1:]))
                key = (idx[new], col)
                ent[key] = ent.get(key, QI(0)) + v
    return ExactMatrix.from_dict(len(basis), len(basis), {k: v for k, v in ent.items() if v})


def invariant_polynomials(g: LieAlgebraData, n: int) -> Subspace:
    """Invariant homogeneous polynomials of degree n, as coefficient vectors on monomials."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    size = len(sym_basis(g.dim, n))
    if n == 0 or g.dim == 0:
        return Subspace.full(size)
    return kernel(ExactMatrix.vstack([coadjoint_matrix(g, b, n) for b in range(g.dim)]))


# ----------------------------------------------------------------------
# Weil algebra
# ----------------------------------------------------------------------

@dataclass
class WeilAlgebra:
    gda: GradedDiffAlgebra
    lie: LieAlgebraData
    bases: list[list[tuple]]

    def index(self, deg: int, mono: tuple) -> int:
        return self.bases[deg].index(mono)


def weil_monomials(r: int, deg: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Monomials A^I F^J of total degree |I| + 2|J|, sorted lexicographically in (I, J)."""
    out = []
    for p in range(min(r, deg) + 1):
        if (deg - p) % 2:
            continue
        for I in combinations(range(r), p):
            for J in combinations_with_replacement(range(r), (deg - p) // 2):
                out.append((I, J))
    return sorted(out)


def _mono_deg(m):
    return len(m[0]) + 2 * len(m[1])


def _mono_mul(x: tuple, y: tuple):
    ws = wedge_sort(x[0] + y[0])
    if ws is None:
        return None
    s, I = ws
    return s, (I, tuple(sorted(x[1] + y[1])))


def _elem_mul(x: dict, y: dict) -> dict:
    out = {}
    for m1, v1 in x.items():
        for m2, v2 in y.items():
            r = _mono_mul(m1, m2)
            if r is None:
                continue
            s, m = r
            out[m] = out.get(m, QI(0)) + v1 * v2 * s
    return {k: v for k, v in out.items() if v}


def _elem_add(x: dict, y: dict, scale=1) -> dict:
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, QI(0)) + v * scale
    return {k: v for k, v in out.items() if v}


def weil_build(g: LieAlgebraData, max_degree: int) -> tuple[WeilAlgebra, OperationData]:
    """W(g) = Lambda(A) (x) S(F) truncated at max_degree, with i_X(A^a) = X^a, i_X(F^a) = 0."""
    if max_degree < 2:
        raise ValueError("max_degree must be at least 2")
    rep = check_lie(g)
    if not rep.ok:
        raise ValueError("bracket fails the Jacobi identity")
    r = g.dim
    bases = [weil_monomials(r, n) for n in range(max_degree + 1)]
    index = [{m: k for k, m in enumerate(b)} for b in bases]
    dims = [len(b) for b in bases]

    def A(a):
        return ((a,), ())

    def F(a):
        return ((), (a,))

    # generator differentials
    dgen = {}
    for a in range(r):
        img = {F(a): QI(1)}
        for (b, c), terms in g.table.items():
            for k, v in terms:
                if k == a:
                    # -1/2 f^a_bc A^b A^c summed over all b, c
                    prod = _elem_mul({A(b): QI(1)}, {A(c): QI(1)})
                    img = _elem_add(img, prod, v * QI(-1, 0) / 2)
        dgen[A(a)] = img
        img = {}
        for (b, c), terms in g.table.items():
            for k, v in terms:
                if k == a:
                    prod = _elem_mul({A(b): QI(1)}, {F(c): QI(1)})
                    img = _elem_add(img, prod, -v)
        dgen[F(a)] = img

    @lru_cache(maxsize=None)
    def d_mono(m):
        I, J = m
        if not I and not J:
            return {}
        if I:
            first, rest = A(I[0]), (I[1:], J)
        else:
            first, rest = F(J[0]), ((), J[1:])
        out = _elem_mul(dgen[first], {rest: QI(1)})
        sign = -1 if _mono_deg(first) % 2 else 1
        out = _elem_add(out, _elem_mul({first: QI(1)}, d_mono(rest)), sign)
        return out

    d = []
    for n in range(max_degree):
        ent = {}
        for col, m in enumerate(bases[n]):
            for mono, v in d_mono(m).items():
                ent[(index[n + 1][mono], col)] = v
        d.append(ExactMatrix.from_dict(dims[n + 1], dims[n], ent))

    def product(p, q):
        ent = {}
        for i, x in enumerate(bases[p]):
            for j, y in enumerate(bases[q]):
                res = _mono_mul(x, y)
                if res is None:
                    continue
                s, m = res
                ent[(index[p + q][m], i * dims[q] + j)] = s
        return ExactMatrix.from_dict(dims[p + q], dims[p] * dims[q], ent)

    contractions = []
    for b in range(r):
        per_deg = [None]
        for n in range(1, max_degree + 1):
            ent = {}
            for col, (I, J) in enumerate(bases[n]):
                if b in I:
                    pos = I.index(b)
                    new = (I[:pos] + I[pos + 1:], J)
                    ent[(index[n - 1][new], col)] = -1 if pos % 2 else 1
            per_deg.append(ExactMatrix.from_dict(dims[n - 1], dims[n], ent))
        contractions.append(per_deg)

    gda = GradedDiffAlgebra(dims, d, product, ExactMatrix.identity(1), complete=False, name="W(g)")
    return WeilAlgebra(gda, g, bases), OperationData(g, contractions)


def weil_cohomology(g: LieAlgebraData, upto: int) -> list[int]:
    w, _ = weil_build(g, upto + 1)
    return cohomology(w.gda.complex(), upto).dims


@dataclass
class WeilBasicReport:
    dims: list[int]
    expected: list[int]
    basic_space_dims: list[int]
    horizontal_dims: list[int]

    @property
    def ok(self) -> bool:
        return self.dims == self.expected


def weil_basic_cohomology(g: LieAlgebraData, upto: int) -> WeilBasicReport:
    """Basic cohomology of W(g) in degrees 0..upto, with the invariant-polynomial prediction."""
    w, op = weil_build(g, max(upto + 1, 2))
    res = basic_subcomplex(w.gda, op)
    h = cohomology(res.basic, upto)
    if h.truncated:
        raise StructuralError("basic cohomology is truncated in a requested degree")
    expected = [invariant_polynomials(g, n // 2).dim if n % 2 == 0 else 0 for n in range(upto + 1)]
    return WeilBasicReport(h.dims, expected, [s.dim for s in res.basic_spaces[:upto + 1]],
                           [s.dim for s in res.horizontal_spaces[:upto + 1]])


def random_lie(rng, max_dim: int = 4) -> LieAlgebraData:
    """A random small Lie algebra: a commutator algebra or a known Lie algebra in a random basis."""
    from .algebra import commutator_lie, random_algebra, random_invertible, lie_change_basis, sl2, abelian_lie
    choice = rng.randrange(3)
    if choice == 0:
        return commutator_lie(random_algebra(rng, max_dim))
    if choice == 1:
        return lie_change_basis(sl2(), random_invertible(3, rng))
    return abelian_lie(rng.randint(1, 2))
