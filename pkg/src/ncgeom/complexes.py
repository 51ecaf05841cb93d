"""Cochain complexes, truncated graded differential algebras and Lie algebra operations."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .algebra import LieAlgebraData
from .exact import (ExactMatrix, Subspace, intersect_kernels, kron, quotient_coords, rank, restrict,
                    solve)


class StructuralError(Exception):
    """Raised when a construction violates an identity it must satisfy (e.g. d^2 != 0)."""


class CochainComplex:
    """Spaces of dimension dims[0..N] with coboundaries d[n]: degree n -> n+1.

    ``exit_map``, when given, is the coboundary out of the top degree into a
    space that is not part of the complex; it makes the top cohomology exact.
    """

    def __init__(self, dims: Sequence[int], d: Sequence[ExactMatrix], exit_map: ExactMatrix | None = None,
                 check: bool = True, complete: bool = False):
        self.dims = list(dims)
        self.d = list(d)
        self.exit_map = exit_map
        self.complete = complete
        if len(self.d) != len(self.dims) - 1:
            raise ValueError("need one coboundary per degree below the top")
        for n, m in enumerate(self.d):
            if m.shape != (self.dims[n + 1], self.dims[n]):
                raise ValueError(f"coboundary in degree {n} has shape {m.shape}")
        if exit_map is not None and exit_map.cols != self.dims[-1]:
            raise ValueError("exit map has the wrong number of columns")
        if check:
            self.check_d_squared()

    @property
    def max_degree(self) -> int:
        return len(self.dims) - 1

    def outgoing(self, n: int) -> ExactMatrix | None:
        if n < len(self.d):
            return self.d[n]
        if n == self.max_degree:
            if self.exit_map is not None:
                return self.exit_map
            if self.complete:
                return ExactMatrix.zeros(0, self.dims[n])
        return None

    def check_d_squared(self):
        maps = list(self.d) + ([self.exit_map] if self.exit_map is not None else [])
        for n in range(len(maps) - 1):
            if not (maps[n + 1] @ maps[n]).is_zero():
                raise StructuralError(f"d^2 != 0 starting in degree {n}")


@dataclass
class CohomologyResult:
    dims: list[int]
    lower_bound: list[bool]

    @property
    def truncated(self) -> bool:
        return any(self.lower_bound)

    def to_dict(self) -> dict:
        return {"dims": self.dims, "truncated": self.truncated,
                "lower_bound_degrees": [n for n, b in enumerate(self.lower_bound) if b]}


def cohomology(c: CochainComplex, upto: int | None = None) -> CohomologyResult:
    """dim H^n = dim ker d_n - rank d_(n-1); degrees without an outgoing map are lower bounds."""
    c.check_d_squared()
    top = c.max_degree if upto is None else min(upto, c.max_degree)
    ranks = {}

    def rk(n):
        if n not in ranks:
            m = c.outgoing(n)
            ranks[n] = None if m is None else rank(m)
        return ranks[n]

    dims, lower = [], []
    for n in range(top + 1):
        image = rk(n - 1) if n > 0 else 0
        out = rk(n)
        if out is None:
            dims.append(c.dims[n] - image)
            lower.append(True)
        else:
            dims.append(c.dims[n] - out - image)
            lower.append(False)
    return CohomologyResult(dims, lower)


def cohomology_dims(c: CochainComplex, upto: int | None = None) -> list[int]:
    return cohomology(c, upto).dims


def verify_homotopy_report(c: CochainComplex, h: Sequence[ExactMatrix | None], from_degree: int) -> dict:
    """Check d h + h d = id in each degree n >= from_degree where both terms are available.

    h[n] maps degree n to degree n-1 (h[0] is ignored)."""
    checked, skipped = [], []
    ok = True
    for n in range(max(from_degree, 0), c.max_degree + 1):
        dn = c.outgoing(n)
        if dn is None or (dn.rows and n + 1 >= len(h)):
            skipped.append(n)
            continue
        total = ExactMatrix.zeros(c.dims[n], c.dims[n])
        if n >= 1 and h[n] is not None:
            total = total + c.d[n - 1] @ h[n]
        if dn.rows:
            total = total + h[n + 1] @ dn
        checked.append(n)
        if total != ExactMatrix.identity(c.dims[n]):
            ok = False
    return {"ok": ok, "checked_degrees": checked, "truncated": bool(skipped), "skipped_degrees": skipped}


def verify_homotopy(c: CochainComplex, h: Sequence[ExactMatrix | None], from_degree: int) -> bool:
    return verify_homotopy_report(c, h, from_degree)["ok"]


# ----------------------------------------------------------------------
# graded differential algebras
# ----------------------------------------------------------------------

class GradedDiffAlgebra:
    """A graded differential algebra truncated at ``max_degree``.

    product(p, q) is the dims[p+q] x (dims[p]*dims[q]) matrix of the product
    V_p (x) V_q -> V_(p+q) (column i*dims[q] + j).  ``star[n]`` is the matrix
    S_n of the conjugate-linear involution x* = S_n conj(x) in degree n.
    ``complete`` means the algebra vanishes above max_degree.
    """

    def __init__(self, dims: Sequence[int], d: Sequence[ExactMatrix],
                 product: Callable[[int, int], ExactMatrix] | dict, unit: ExactMatrix,
                 star: Sequence[ExactMatrix] | None = None, complete: bool = False, name: str = ""):
        self.dims = list(dims)
        self.d = list(d)
        if len(self.d) != len(self.dims) - 1:
            raise ValueError("need one differential per degree below the top")
        for n, m in enumerate(self.d):
            if m.shape != (self.dims[n + 1], self.dims[n]):
                raise ValueError(f"differential in degree {n} has shape {m.shape}")
        if unit.shape != (self.dims[0], 1):
            raise ValueError("unit must be a degree-0 column")
        self._product_src = product
        self._cache: dict = {}
        self.unit = unit
        self.star = list(star) if star is not None else None
        self.complete = complete
        self.name = name

    @property
    def max_degree(self) -> int:
        return len(self.dims) - 1

    def product(self, p: int, q: int) -> ExactMatrix:
        if p + q > self.max_degree:
            raise ValueError("product leaves the truncation")
        key = (p, q)
        if key not in self._cache:
            src = self._product_src
            m = src[key] if isinstance(src, dict) else src(p, q)
            if m.shape != (self.dims[p + q], self.dims[p] * self.dims[q]):
                raise ValueError(f"product ({p},{q}) has shape {m.shape}")
            self._cache[key] = m
        return self._cache[key]

    def mult(self, p: int, x: ExactMatrix, q: int, y: ExactMatrix) -> ExactMatrix:
        return self.product(p, q) @ kron(x, y)

    def complex(self) -> CochainComplex:
        return CochainComplex(self.dims, self.d, complete=self.complete)

    def left_mult_matrix(self, p: int, x: ExactMatrix, q: int) -> ExactMatrix:
        """Matrix of y -> x y from degree q to p+q."""
        return self.product(p, q) @ kron(x, ExactMatrix.identity(self.dims[q]))

    def right_mult_matrix(self, p: int, q: int, y: ExactMatrix) -> ExactMatrix:
        """Matrix of x -> x y from degree p to p+q."""
        return self.product(p, q) @ kron(ExactMatrix.identity(self.dims[p]), y)

    def __repr__(self):
        return f"GradedDiffAlgebra({self.name or 'unnamed'}, dims={self.dims})"


def swap_matrix(m: int, n: int) -> ExactMatrix:
    """Permutation sending index i*n + j to j*m + i."""
    return ExactMatrix.from_dict(m * n, m * n, {(j * m + i, i * n + j): 1 for i in range(m) for j in range(n)})


def _identity(n):
    return ExactMatrix.identity(n)


@dataclass
class GDAReport:
    associative: bool
    antiderivation: bool
    d_squared_zero: bool
    unit: bool
    star: bool | None
    truncated: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.associative and self.antiderivation and self.d_squared_zero and self.unit
                and self.star is not False)

    def to_dict(self) -> dict:
        return {"associative": self.associative, "antiderivation": self.antiderivation,
                "d_squared_zero": self.d_squared_zero, "unit": self.unit, "star": self.star,
                "truncated": self.truncated}


def check_gda(g: GradedDiffAlgebra) -> GDAReport:
    N = g.max_degree
    dims = g.dims
    fails = []
    assoc = True
    for p in range(N + 1):
        for q in range(N + 1 - p):
            for r in range(N + 1 - p - q):
                if 0 in (dims[p], dims[q], dims[r]):
                    continue
                lhs = g.product(p + q, r) @ kron(g.product(p, q), _identity(dims[r]))
                rhs = g.product(p, q + r) @ kron(_identity(dims[p]), g.product(q, r))
                if lhs != rhs:
                    assoc = False
                    fails.append(("associativity", p, q, r))
    anti = True
    for p in range(N):
        for q in range(N - p):
            if 0 in (dims[p], dims[q]):
                continue
            lhs = g.d[p + q] @ g.product(p, q)
            rhs = g.product(p + 1, q) @ kron(g.d[p], _identity(dims[q]))
            rhs = rhs + (g.product(p, q + 1) @ kron(_identity(dims[p]), g.d[q])).scale((-1) ** p)
            if lhs != rhs:
                anti = False
                fails.append(("antiderivation", p, q))
    dsq = all((g.d[n + 1] @ g.d[n]).is_zero() for n in range(N - 1))
    if not dsq:
        fails.append(("d_squared",))
    unit = True
    for n in range(N + 1):
        if dims[n] == 0:
            continue
        ident = _identity(dims[n])
        left = g.product(0, n) @ kron(g.unit, ident)
        right = g.product(n, 0) @ kron(ident, g.unit)
        if left != ident or right != ident:
            unit = False
            fails.append(("unit", n))
    if N >= 1 and not (g.d[0] @ g.unit).is_zero():
        unit = False
        fails.append(("unit_closed",))
    star = None
    if g.star is not None:
        star = True
        for n in range(N + 1):
            S = g.star[n]
            if S @ S.conj() != _identity(dims[n]):
                star = False
                fails.append(("star_involutive", n))
        for p in range(N + 1):
            for q in range(N + 1 - p):
                if 0 in (dims[p], dims[q]):
                    continue
                lhs = g.star[p + q] @ g.product(p, q).conj()
                rhs = (g.product(q, p) @ kron(g.star[q], g.star[p]) @ swap_matrix(dims[p], dims[q]))
                if lhs != rhs.scale((-1) ** (p * q)):
                    star = False
                    fails.append(("star_product", p, q))
        for n in range(N):
            if g.d[n] @ g.star[n] != g.star[n + 1] @ g.d[n].conj():
                star = False
                fails.append(("star_d", n))
    return GDAReport(assoc, anti, dsq, unit, star, not g.complete, fails)


# ----------------------------------------------------------------------
# operations of Lie algebras
# ----------------------------------------------------------------------

class OperationData:
    """Contractions i_X for the basis of ``lie``: i[a][n] maps degree n to n-1 (n >= 1)."""

    def __init__(self, lie: LieAlgebraData, i: Sequence[Sequence[ExactMatrix | None]]):
        if len(i) != lie.dim:
            raise ValueError("one contraction family per Lie basis element is required")
        self.lie = lie
        self.i = [list(x) for x in i]

    def contraction(self, a: int, n: int, dims: Sequence[int]) -> ExactMatrix:
        if n == 0:
            return ExactMatrix.zeros(0, dims[0])
        m = self.i[a][n]
        return m if m is not None else ExactMatrix.zeros(dims[n - 1], dims[n])

    def lie_derivative(self, g: GradedDiffAlgebra, a: int, n: int) -> ExactMatrix:
        """L_X = i_X d + d i_X on degree n (requires n < max_degree)."""
        out = self.contraction(a, n + 1, g.dims) @ g.d[n]
        if n >= 1:
            out = out + g.d[n - 1] @ self.contraction(a, n, g.dims)
        return out

    def combo_contraction(self, coeffs: ExactMatrix, n: int, dims) -> ExactMatrix:
        out = ExactMatrix.zeros(dims[n - 1] if n else 0, dims[n])
        for k, _, v in coeffs.nonzeros():
            out = out + self.contraction(k, n, dims).scale(v)
        return out


@dataclass
class OperationReport:
    antiderivation: bool
    anticommute: bool
    equivariance: bool
    lie_hom: bool
    commutes_with_d: bool
    truncated: bool

    @property
    def ok(self) -> bool:
        return self.antiderivation and self.anticommute and self.equivariance and self.lie_hom and self.commutes_with_d

    def to_dict(self) -> dict:
        return {"antiderivation": self.antiderivation, "anticommute": self.anticommute,
                "equivariance": self.equivariance, "lie_homomorphism": self.lie_hom,
                "commutes_with_d": self.commutes_with_d, "truncated": self.truncated}


def verify_operation(g: GradedDiffAlgebra, op: OperationData, check_products: bool = True) -> OperationReport:
    N = g.max_degree
    dims = g.dims
    r = op.lie.dim
    lie = op.lie
    anti = True
    if check_products:
        for a in range(r):
            for p in range(N + 1):
                for q in range(N + 1 - p):
                    if p + q == 0 or 0 in (dims[p], dims[q]):
                        continue
                    lhs = op.contraction(a, p + q, dims) @ g.product(p, q)
                    rhs = ExactMatrix.zeros(dims[p + q - 1], dims[p] * dims[q])
                    if p >= 1:
                        rhs = rhs + g.product(p - 1, q) @ kron(op.contraction(a, p, dims), _identity(dims[q]))
                    if q >= 1:
                        rhs = rhs + (g.product(p, q - 1) @ kron(_identity(dims[p]), op.contraction(a, q, dims))).scale((-1) ** p)
                    if lhs != rhs:
                        anti = False
    anticomm = True
    for a in range(r):
        for b in range(a, r):
            for n in range(2, N + 1):
                m = op.contraction(a, n - 1, dims) @ op.contraction(b, n, dims) + \
                    op.contraction(b, n - 1, dims) @ op.contraction(a, n, dims)
                if not m.is_zero():
                    anticomm = False
    L = {(a, n): op.lie_derivative(g, a, n) for a in range(r) for n in range(N)}
    equiv = True
    liehom = True
    for a in range(r):
        for b in range(r):
            fab = lie.bracket.col_matrix(a * r + b)
            for n in range(1, N):
                lhs = L[(a, n - 1)] @ op.contraction(b, n, dims) - op.contraction(b, n, dims) @ L[(a, n)]
                if lhs != op.combo_contraction(fab, n, dims):
                    equiv = False
            for n in range(N):
                lhs = L[(a, n)] @ L[(b, n)] - L[(b, n)] @ L[(a, n)]
                rhs = ExactMatrix.zeros(dims[n], dims[n])
                for k, _, v in fab.nonzeros():
                    rhs = rhs + L[(k, n)].scale(v)
                if lhs != rhs:
                    liehom = False
    commd = True
    for a in range(r):
        for n in range(N - 1):
            if g.d[n] @ L[(a, n)] != L[(a, n + 1)] @ g.d[n]:
                commd = False
    return OperationReport(anti, anticomm, equiv, liehom, commd, not g.complete)


@dataclass
class BasicResult:
    basic: CochainComplex
    invariant: CochainComplex
    basic_spaces: list[Subspace]
    invariant_spaces: list[Subspace]
    horizontal_spaces: list[Subspace]


def _subcomplex(g: GradedDiffAlgebra, spaces: list[Subspace]) -> CochainComplex:
    d = []
    for n in range(len(spaces) - 1):
        m = restrict(g.d[n], spaces[n], spaces[n + 1])
        if m is None:
            raise StructuralError(f"d does not preserve the subspace in degree {n}")
        d.append(m)
    top = len(spaces) - 1
    exit_map = g.d[top] @ spaces[top].matrix if top < g.max_degree else None
    return CochainComplex([s.dim for s in spaces], d, exit_map=exit_map, complete=g.complete and exit_map is None)


def horizontal_spaces(g: GradedDiffAlgebra, op: OperationData, upto: int | None = None) -> list[Subspace]:
    top = g.max_degree if upto is None else upto
    out = []
    for n in range(top + 1):
        mats = [op.contraction(a, n, g.dims) for a in range(op.lie.dim)] if n else []
        out.append(intersect_kernels(mats, g.dims[n]))
    return out


def basic_subcomplex(g: GradedDiffAlgebra, op: OperationData) -> BasicResult:
    """Basic (horizontal and invariant) and invariant subcomplexes.

    Lie derivatives need d out of each degree, so the subcomplexes stop at
    max_degree - 1; the coboundary out of that degree is kept as an exit map
    so its cohomology is exact there too."""
    N = g.max_degree
    top = N - 1 if not g.complete else N
    r = op.lie.dim
    basic, inv = [], []
    for n in range(top + 1):
        Ls = [op.lie_derivative(g, a, n) for a in range(r)] if n < N else [ExactMatrix.zeros(0, g.dims[n])]
        Is = [op.contraction(a, n, g.dims) for a in range(r)] if n else []
        inv.append(intersect_kernels(Ls, g.dims[n]))
        basic.append(intersect_kernels(Ls + Is, g.dims[n]))
    horiz = horizontal_spaces(g, op)
    return BasicResult(_subcomplex(g, basic), _subcomplex(g, inv), basic, inv, horiz)


def trivial_operation(lie: LieAlgebraData, g: GradedDiffAlgebra) -> OperationData:
    return OperationData(lie, [[None] * (g.max_degree + 1) for _ in range(lie.dim)])


# ----------------------------------------------------------------------
# skew tensor products
# ----------------------------------------------------------------------

def tensor_gda(g1: GradedDiffAlgebra, g2: GradedDiffAlgebra, max_degree: int | None = None) -> GradedDiffAlgebra:
    """Skew tensor product: (x(x)x')(y(x)y') = (-1)^(m'n) xy (x) x'y' and
    d(x(x)x') = dx (x) x' + (-1)^n x (x) dx'  (x of degree n, x' of degree m', y of degree n)."""
    N1, N2 = g1.max_degree, g2.max_degree
    if max_degree is None:
        max_degree = N1 + N2 if (g1.complete and g2.complete) else min(N1, N2)
    N = max_degree

    def pieces(n):
        return [(p, n - p) for p in range(n + 1) if p <= N1 and n - p <= N2]

    offsets, dims = [], []
    for n in range(N + 1):
        off, tot = {}, 0
        for p, q in pieces(n):
            off[(p, q)] = tot
            tot += g1.dims[p] * g2.dims[q]
        offsets.append(off)
        dims.append(tot)

    def block(n, blocks: dict, cols: int, rows_n: int) -> ExactMatrix:
        ent = {}
        for (pq, m) in blocks.items():
            ro = offsets[rows_n][pq]
            for i, j, v in m.nonzeros():
                ent[(i + ro, j)] = ent.get((i + ro, j), 0) + v
        return ExactMatrix.from_dict(dims[rows_n], cols, {k: v for k, v in ent.items() if v})

    d = []
    for n in range(N):
        cols = []
        for p, q in pieces(n):
            parts = []
            nd = g1.dims[p] * g2.dims[q]
            ent = {}
            if p < N1 and (p + 1, q) in offsets[n + 1]:
                m = kron(g1.d[p], _identity(g2.dims[q]))
                ro = offsets[n + 1][(p + 1, q)]
                for i, j, v in m.nonzeros():
                    ent[(i + ro, j)] = ent.get((i + ro, j), 0) + v
            elif p >= N1 and not g1.complete:
                raise ValueError("tensor product degree exceeds the truncation of the first factor")
            if q < N2 and (p, q + 1) in offsets[n + 1]:
                m = kron(_identity(g1.dims[p]), g2.d[q]).scale((-1) ** p)
                ro = offsets[n + 1][(p, q + 1)]
                for i, j, v in m.nonzeros():
                    ent[(i + ro, j)] = ent.get((i + ro, j), 0) + v
            elif q >= N2 and not g2.complete:
                raise ValueError("tensor product degree exceeds the truncation of the second factor")
            cols.append(ExactMatrix.from_dict(dims[n + 1], nd, {k: v for k, v in ent.items() if v}))
        d.append(ExactMatrix.hstack(cols, rows=dims[n + 1]) if cols else ExactMatrix.zeros(dims[n + 1], 0))

    def product(a, b):
        ent = {}
        da, db = dims[a], dims[b]
        for (p, q), oa in offsets[a].items():
            for (r, s), ob in offsets[b].items():
                if p + r > N1 or q + s > N2 or (p + r, q + s) not in offsets[a + b]:
                    continue
                sign = (-1) ** (q * r)
                P1, P2 = g1.product(p, r), g2.product(q, s)
                m1 = [(i, j, v) for i, j, v in P1.nonzeros()]
                m2 = [(i, j, v) for i, j, v in P2.nonzeros()]
                ro = offsets[a + b][(p + r, q + s)]
                d1q, d2s = g2.dims[q], g2.dims[s]
                d1r = g1.dims[r]
                for i1, j1, v1 in m1:
                    x, y = divmod(j1, d1r)
                    for i2, j2, v2 in m2:
                        xp, yp = divmod(j2, d2s)
                        row = ro + i1 * g2.dims[q + s] + i2
                        col = (oa + x * d1q + xp) * db + (ob + y * d2s + yp)
                        ent[(row, col)] = ent.get((row, col), 0) + v1 * v2 * sign
        return ExactMatrix.from_dict(dims[a + b], da * db, {k: v for k, v in ent.items() if v})

    unit = kron(g1.unit, g2.unit)
    complete = g1.complete and g2.complete and N >= N1 + N2
    return GradedDiffAlgebra(dims, d, product, unit, complete=complete,
                             name=f"({g1.name})(x)({g2.name})")


def kunneth_report(g1: GradedDiffAlgebra, g2: GradedDiffAlgebra, upto: int) -> dict:
    t = tensor_gda(g1, g2)
    if upto > t.max_degree - (0 if t.complete else 1):
        raise ValueError("requested degree exceeds what the truncations determine")
    h1 = cohomology(g1.complex())
    h2 = cohomology(g2.complex())
    ht = cohomology(t.complex(), upto)
    expected = []
    for n in range(upto + 1):
        s = 0
        for p in range(n + 1):
            q = n - p
            a = h1.dims[p] if p < len(h1.dims) else 0
            b = h2.dims[q] if q < len(h2.dims) else 0
            if (p < len(h1.dims) and h1.lower_bound[p] and b) or (q < len(h2.dims) and h2.lower_bound[q] and a):
                raise ValueError("factor cohomology is truncated in a needed degree")
            s += a * b
        expected.append(s)
    return {"ok": ht.dims == expected, "tensor": ht.dims, "expected": expected}


def kunneth_check(g1: GradedDiffAlgebra, g2: GradedDiffAlgebra, upto: int) -> bool:
    return kunneth_report(g1, g2, upto)["ok"]


def scalar_gda() -> GradedDiffAlgebra:
    """The ground field as a graded differential algebra concentrated in degree 0."""
    return GradedDiffAlgebra([1], [], {(0, 0): ExactMatrix.identity(1)}, ExactMatrix.identity(1),
                             star=[ExactMatrix.identity(1)], complete=True, name="C")


# ----------------------------------------------------------------------
# sub-algebras, quotients and maps of graded differential algebras
# ----------------------------------------------------------------------

def _coords(space: Subspace, m: ExactMatrix, what: str) -> ExactMatrix:
    if m.cols == 0:
        return ExactMatrix.zeros(space.dim, 0)
    if space.dim == 0:
        if m.is_zero():
            return ExactMatrix.zeros(0, m.cols)
        raise StructuralError(f"{what} leaves the subalgebra")
    out = solve(space.matrix, m)
    if out is None:
        raise StructuralError(f"{what} leaves the subalgebra")
    return out


def sub_gda(g: GradedDiffAlgebra, spaces: Sequence[Subspace], name: str = "") -> GradedDiffAlgebra:
    """Restriction of g to per-degree subspaces stable under d, the product and the star."""
    if len(spaces) != len(g.dims):
        raise ValueError("one subspace per degree is required")
    d = [_coords(spaces[n + 1], g.d[n] @ spaces[n].matrix, f"d in degree {n}") for n in range(len(spaces) - 1)]

    def product(p, q):
        m = g.product(p, q) @ kron(spaces[p].matrix, spaces[q].matrix)
        return _coords(spaces[p + q], m, f"product ({p},{q})")

    unit = _coords(spaces[0], g.unit, "unit")
    star = None
    if g.star is not None:
        star = [_coords(s, g.star[n] @ s.matrix.conj(), f"star in degree {n}") for n, s in enumerate(spaces)]
    return GradedDiffAlgebra([s.dim for s in spaces], d, product, unit, star, g.complete, name or g.name)


@dataclass
class QuotientGDA:
    gda: GradedDiffAlgebra
    project: list[ExactMatrix]
    section: list[ExactMatrix]
    killed: list[Subspace]


def quotient_gda(g: GradedDiffAlgebra, killed: Sequence[Subspace], name: str = "") -> QuotientGDA:
    """g modulo a differential two-sided *-ideal given by its per-degree slices.

    The ideal property is verified: d, both one-sided products and the star
    must map the killed slices into killed slices."""
    N = g.max_degree
    proj, sec = [], []
    for n in range(N + 1):
        _, p, s = quotient_coords(g.dims[n], killed[n])
        proj.append(p)
        sec.append(s)
    for n in range(N):
        if not (proj[n + 1] @ g.d[n] @ killed[n].matrix).is_zero():
            raise StructuralError(f"d does not preserve the ideal in degree {n}")
    for p in range(N + 1):
        for q in range(N + 1 - p):
            P = g.product(p, q)
            if killed[p].dim and g.dims[q]:
                if not (proj[p + q] @ P @ kron(killed[p].matrix, _identity(g.dims[q]))).is_zero():
                    raise StructuralError(f"ideal not stable under right products ({p},{q})")
            if killed[q].dim and g.dims[p]:
                if not (proj[p + q] @ P @ kron(_identity(g.dims[p]), killed[q].matrix)).is_zero():
                    raise StructuralError(f"ideal not stable under left products ({p},{q})")
    star = None
    if g.star is not None:
        for n in range(N + 1):
            if not (proj[n] @ g.star[n] @ killed[n].matrix.conj()).is_zero():
                raise StructuralError(f"ideal not stable under the star in degree {n}")
        star = [proj[n] @ g.star[n] @ sec[n].conj() for n in range(N + 1)]
    d = [proj[n + 1] @ g.d[n] @ sec[n] for n in range(N)]

    def product(p, q):
        return proj[p + q] @ g.product(p, q) @ kron(sec[p], sec[q])

    q = GradedDiffAlgebra([m.rows for m in proj], d, product, proj[0] @ g.unit, star, g.complete,
                          name or (g.name + "/I"))
    return QuotientGDA(q, proj, sec, list(killed))


def restrict_operation(op: OperationData, spaces: Sequence[Subspace]) -> OperationData:
    i = []
    for a in range(op.lie.dim):
        row = [None]
        dims = [s.matrix.rows for s in spaces]
        for n in range(1, len(spaces)):
            m = op.contraction(a, n, dims) @ spaces[n].matrix
            row.append(_coords(spaces[n - 1], m, f"contraction {a} in degree {n}"))
        i.append(row)
    return OperationData(op.lie, i)


def quotient_operation(op: OperationData, q: QuotientGDA, ambient_dims: Sequence[int]) -> OperationData:
    i = []
    for a in range(op.lie.dim):
        row = [None]
        for n in range(1, len(q.project)):
            c = op.contraction(a, n, ambient_dims)
            if not (q.project[n - 1] @ c @ q.killed[n].matrix).is_zero():
                raise StructuralError(f"contraction {a} does not descend in degree {n}")
            row.append(q.project[n - 1] @ c @ q.section[n])
        i.append(row)
    return OperationData(op.lie, i)


@dataclass
class MapReport:
    """Checks for a family of per-degree linear maps f_n: g -> h."""
    d: bool
    product: bool
    unit: bool
    star: bool | None
    operation: bool | None
    surjective: list[bool]
    injective: list[bool]

    @property
    def homomorphism(self) -> bool:
        return self.d and self.product and self.unit and self.star is not False

    def to_dict(self) -> dict:
        return {"d": self.d, "product": self.product, "unit": self.unit, "star": self.star,
                "operation": self.operation, "surjective": self.surjective, "injective": self.injective}


def check_gda_map(f: Sequence[ExactMatrix], g: GradedDiffAlgebra, h: GradedDiffAlgebra,
                  op_g: OperationData | None = None, op_h: OperationData | None = None,
                  upto: int | None = None) -> MapReport:
    N = min(g.max_degree, h.max_degree) if upto is None else upto
    dd = all(h.d[n] @ f[n] == f[n + 1] @ g.d[n] for n in range(N))
    prod = True
    for p in range(N + 1):
        for q in range(N + 1 - p):
            if f[p + q] @ g.product(p, q) != h.product(p, q) @ kron(f[p], f[q]):
                prod = False
    unit = f[0] @ g.unit == h.unit
    star = None
    if g.star is not None and h.star is not None:
        star = all(f[n] @ g.star[n] == h.star[n] @ f[n].conj() for n in range(N + 1))
    oper = None
    if op_g is not None and op_h is not None:
        oper = all(f[n - 1] @ op_g.contraction(a, n, g.dims) == op_h.contraction(a, n, h.dims) @ f[n]
                   for a in range(op_g.lie.dim) for n in range(1, N + 1))
    ranks = [rank(f[n]) for n in range(N + 1)]
    return MapReport(dd, prod, unit, star, oper, [ranks[n] == h.dims[n] for n in range(N + 1)],
                     [ranks[n] == g.dims[n] for n in range(N + 1)])
