"""Finite-dimensional algebras, Lie algebras and bimodules by structure constants."""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .exact import (QI, ExactMatrix, Subspace, kernel, kron, rank, span, solve,
                    intersect, ONE)


def _table_from_matrix(mul: ExactMatrix, n: int) -> dict:
    table = {}
    for k, col, v in mul.nonzeros():
        i, j = divmod(col, n)
        table.setdefault((i, j), []).append((k, v))
    return table


def _unit_vector(n: int, i: int) -> ExactMatrix:
    return ExactMatrix.from_dict(n, 1, {(i, 0): ONE})


class FiniteAlgebra:
    """A finite-dimensional algebra with e_i e_j = sum_k c[i][j][k] e_k.

    ``mul`` is the dim x dim^2 matrix of the product, column i*dim + j.
    ``star`` (optional) is the matrix S with x* = S conj(x).
    """

    def __init__(self, dim: int, mul: ExactMatrix, unit: Sequence | None,
                 star: ExactMatrix | None = None, labels: Sequence[str] | None = None):
        if dim < 1:
            raise ValueError("algebras of dimension 0 are not allowed")
        if mul.shape != (dim, dim * dim):
            raise ValueError(f"product tensor has shape {mul.shape}, expected {(dim, dim * dim)}")
        if unit is None:
            raise ValueError("unit required")
        if len(unit) != dim:
            raise ValueError("unit vector has the wrong length")
        if star is not None and star.shape != (dim, dim):
            raise ValueError("star matrix has the wrong shape")
        self.dim = dim
        self.mul = mul
        self.unit = [QI.coerce(u) for u in unit]
        self.star = star
        self.labels = list(labels) if labels else [f"e{i}" for i in range(dim)]
        self.table = _table_from_matrix(mul, dim)
        self._left = None
        self._right = None

    @staticmethod
    def from_tensor(c, unit, star=None, labels=None) -> "FiniteAlgebra":
        n = len(c)
        ent = {}
        for i in range(n):
            if len(c[i]) != n:
                raise ValueError("dimension mismatch in structure constants")
            for j in range(n):
                if len(c[i][j]) != n:
                    raise ValueError("dimension mismatch in structure constants")
                for k in range(n):
                    if c[i][j][k] != 0:
                        ent[(k, i * n + j)] = c[i][j][k]
        return FiniteAlgebra(n, ExactMatrix.from_dict(n, n * n, ent), unit, star, labels)

    def c(self, i: int, j: int, k: int) -> QI:
        return self.mul[k, i * self.dim + j]

    @property
    def unit_vec(self) -> ExactMatrix:
        return ExactMatrix.column(self.unit)

    def basis_vec(self, i: int) -> ExactMatrix:
        return _unit_vector(self.dim, i)

    def left_mats(self) -> list[ExactMatrix]:
        """L_i with L_i x = e_i x."""
        if self._left is None:
            n = self.dim
            ents = [dict() for _ in range(n)]
            for (i, j), terms in self.table.items():
                for k, v in terms:
                    ents[i][(k, j)] = v
            self._left = [ExactMatrix.from_dict(n, n, e) for e in ents]
        return self._left

    def right_mats(self) -> list[ExactMatrix]:
        """R_j with R_j x = x e_j."""
        if self._right is None:
            n = self.dim
            ents = [dict() for _ in range(n)]
            for (i, j), terms in self.table.items():
                for k, v in terms:
                    ents[j][(k, i)] = v
            self._right = [ExactMatrix.from_dict(n, n, e) for e in ents]
        return self._right

    def left_of(self, x: ExactMatrix) -> ExactMatrix:
        out = ExactMatrix.zeros(self.dim, self.dim)
        for i, _, v in x.nonzeros():
            out = out + self.left_mats()[i].scale(v)
        return out

    def right_of(self, x: ExactMatrix) -> ExactMatrix:
        out = ExactMatrix.zeros(self.dim, self.dim)
        for i, _, v in x.nonzeros():
            out = out + self.right_mats()[i].scale(v)
        return out

    def product(self, x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
        return self.mul @ kron(x, y)

    def apply_star(self, x: ExactMatrix) -> ExactMatrix:
        if self.star is None:
            raise ValueError("algebra has no involution")
        return self.star @ x.conj()

    def ad(self, x: ExactMatrix) -> ExactMatrix:
        return self.left_of(x) - self.right_of(x)

    def is_commutative(self) -> bool:
        return all(self.c(i, j, k) == self.c(j, i, k)
                   for i in range(self.dim) for j in range(self.dim) for k in range(self.dim))

    def __repr__(self):
        return f"FiniteAlgebra(dim={self.dim})"


# ----------------------------------------------------------------------
# builders
# ----------------------------------------------------------------------

def matrix_algebra(n: int) -> FiniteAlgebra:
    """M_n(C) on the matrix units e_ij (index i*n + j), star = conjugate transpose."""
    if n < 1:
        raise ValueError("n must be at least 1")
    d = n * n
    ent = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                ent[(i * n + l, (i * n + j) * d + (j * n + l))] = ONE
    unit = [QI(1) if i == j else QI(0) for i in range(n) for j in range(n)]
    star = ExactMatrix.from_dict(d, d, {(j * n + i, i * n + j): ONE for i in range(n) for j in range(n)})
    labels = [f"e{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return FiniteAlgebra(d, ExactMatrix.from_dict(d, d * d, ent), unit, star, labels)


def matrix_unit_index(n: int, i: int, j: int) -> int:
    return i * n + j


def matrix_to_vec(m: ExactMatrix) -> ExactMatrix:
    """Coordinates of an n x n matrix in the matrix-unit basis."""
    n = m.rows
    return ExactMatrix.from_dict(n * n, 1, {(i * n + j, 0): v for i, j, v in m.nonzeros()})


def vec_to_matrix(v: ExactMatrix, n: int) -> ExactMatrix:
    return ExactMatrix.from_dict(n, n, {divmod(k, n): x for k, _, x in v.nonzeros()})


def truncated_poly(k: int) -> FiniteAlgebra:
    """C[x]/(x^k) on the basis 1, x, ..., x^(k-1); star fixes the basis."""
    if k < 1:
        raise ValueError("k must be at least 1")
    ent = {}
    for i in range(k):
        for j in range(k):
            if i + j < k:
                ent[(i + j, i * k + j)] = ONE
    unit = [QI(1)] + [QI(0)] * (k - 1)
    labels = ["1"] + [f"x^{i}" if i > 1 else "x" for i in range(1, k)]
    return FiniteAlgebra(k, ExactMatrix.from_dict(k, k * k, ent), unit, ExactMatrix.identity(k), labels)


def direct_sum(a: FiniteAlgebra, b: FiniteAlgebra) -> FiniteAlgebra:
    n = a.dim + b.dim
    ent = {}
    for (i, j), terms in a.table.items():
        for k, v in terms:
            ent[(k, i * n + j)] = v
    o = a.dim
    for (i, j), terms in b.table.items():
        for k, v in terms:
            ent[(k + o, (i + o) * n + (j + o))] = v
    unit = a.unit + b.unit
    star = None
    if a.star is not None and b.star is not None:
        from .exact import block_diag
        star = block_diag([a.star, b.star])
    labels = [f"{s}+0" for s in a.labels] + [f"0+{s}" for s in b.labels]
    return FiniteAlgebra(n, ExactMatrix.from_dict(n, n * n, ent), unit, star, labels)


def tensor_product(a: FiniteAlgebra, b: FiniteAlgebra) -> FiniteAlgebra:
    """A (x) B with (a(x)b)(a'(x)b') = aa' (x) bb', basis index i*dim(B) + j."""
    na, nb = a.dim, b.dim
    n = na * nb
    ent = {}
    for (i1, i2), t1 in a.table.items():
        for (j1, j2), t2 in b.table.items():
            row_pairs = [(k1 * nb + k2, v1 * v2) for k1, v1 in t1 for k2, v2 in t2]
            col = (i1 * nb + j1) * n + (i2 * nb + j2)
            for r, v in row_pairs:
                key = (r, col)
                ent[key] = ent.get(key, QI(0)) + v
    unit = [a.unit[i] * b.unit[j] for i in range(na) for j in range(nb)]
    star = None
    if a.star is not None and b.star is not None:
        star = kron(a.star, b.star)
    labels = [f"{s}(x){t}" for s in a.labels for t in b.labels]
    return FiniteAlgebra(n, ExactMatrix.from_dict(n, n * n, {k: v for k, v in ent.items() if v}), unit, star, labels)


def change_basis(a: FiniteAlgebra, p: ExactMatrix) -> FiniteAlgebra:
    """Same algebra on the basis f_j = sum_i p[i][j] e_i (p invertible)."""
    n = a.dim
    pinv = solve(p, ExactMatrix.identity(n))
    if pinv is None:
        raise ValueError("change of basis is not invertible")
    mul = pinv @ a.mul @ kron(p, p)
    unit = pinv @ a.unit_vec
    star = None
    if a.star is not None:
        star = pinv @ a.star @ p.conj()
    return FiniteAlgebra(n, mul, unit.col(0), star)


def octonions() -> FiniteAlgebra:
    """Real octonions by Cayley-Dickson doubling of the quaternions (not associative)."""
    def cd_mult(x, y):
        # x, y: tuples of 8 ints; recursive doubling (a,b)(c,d) = (ac - d*b, da + bc*)
        def conj(v):
            return [v[0]] + [-t for t in v[1:]]

        def mult(u, v):
            m = len(u)
            if m == 1:
                return [u[0] * v[0]]
            h = m // 2
            a, b = u[:h], u[h:]
            c, d = v[:h], v[h:]
            left = [s - t for s, t in zip(mult(a, c), mult(conj(d), b))]
            right = [s + t for s, t in zip(mult(d, a), mult(b, conj(c)))]
            return left + right
        return mult(list(x), list(y))

    n = 8
    basis = [[1 if k == i else 0 for k in range(n)] for i in range(n)]
    ent = {}
    for i in range(n):
        for j in range(n):
            prod = cd_mult(basis[i], basis[j])
            for k, v in enumerate(prod):
                if v:
                    ent[(k, i * n + j)] = v
    unit = [1] + [0] * 7
    return FiniteAlgebra(n, ExactMatrix.from_dict(n, n * n, ent), unit)


# ----------------------------------------------------------------------
# axiom checks
# ----------------------------------------------------------------------

@dataclass
class AlgebraReport:
    associative_direct: bool
    associative_dsquared: bool
    unit: bool
    star: bool | None

    @property
    def routes_agree(self) -> bool:
        return self.associative_direct == self.associative_dsquared

    @property
    def associative(self) -> bool:
        if not self.routes_agree:
            raise AssertionError("associativity routes disagree")
        return self.associative_direct

    @property
    def ok(self) -> bool:
        return self.associative and self.unit and self.star is not False

    def to_dict(self) -> dict:
        return {"associative": self.associative_direct,
                "associative_via_d_squared": self.associative_dsquared,
                "routes_agree": self.routes_agree,
                "unit": self.unit, "star": self.star}


def associative_direct(a: FiniteAlgebra) -> bool:
    """(e_i e_j) e_k == e_i (e_j e_k) for all basis triples, by sparse expansion."""
    n = a.dim
    t = a.table
    for i in range(n):
        for j in range(n):
            ij = t.get((i, j), [])
            for k in range(n):
                lhs = {}
                for m, v in ij:
                    for r, w in t.get((m, k), []):
                        lhs[r] = lhs.get(r, QI(0)) + v * w
                rhs = {}
                for m, v in t.get((j, k), []):
                    for r, w in t.get((i, m), []):
                        rhs[r] = rhs.get(r, QI(0)) + v * w
                for r in set(lhs) | set(rhs):
                    if lhs.get(r, QI(0)) != rhs.get(r, QI(0)):
                        return False
    return True


def tensor_coalgebra_d(a: FiniteAlgebra) -> tuple[ExactMatrix, ExactMatrix]:
    """d on C^1 -> C^2 -> C^3 of the tensor algebra of A*.

    On C^1 it is minus the transpose of the product; on C^2 it is its
    extension as an antiderivation, d(x (x) y) = dx (x) y - x (x) dy.
    """
    n = a.dim
    d1 = -a.mul.T
    ident = ExactMatrix.identity(n)
    d2 = kron(d1, ident) - kron(ident, d1)
    return d1, d2


def associative_dsquared(a: FiniteAlgebra) -> bool:
    d1, d2 = tensor_coalgebra_d(a)
    return (d2 @ d1).is_zero()


def check_unit(a: FiniteAlgebra) -> bool:
    u = a.unit_vec
    for i in range(a.dim):
        e = a.basis_vec(i)
        if a.product(u, e) != e or a.product(e, u) != e:
            return False
    return True


def check_star(a: FiniteAlgebra) -> bool | None:
    if a.star is None:
        return None
    s = a.star
    if s @ s.conj() != ExactMatrix.identity(a.dim):
        return False
    n = a.dim
    for i in range(n):
        for j in range(n):
            lhs = a.apply_star(a.product(a.basis_vec(i), a.basis_vec(j)))
            rhs = a.product(a.apply_star(a.basis_vec(j)), a.apply_star(a.basis_vec(i)))
            if lhs != rhs:
                return False
    return True


def check_algebra(a: FiniteAlgebra) -> AlgebraReport:
    direct = associative_direct(a)
    dsq = associative_dsquared(a)
    return AlgebraReport(direct, dsq, check_unit(a), check_star(a))


# ----------------------------------------------------------------------
# Lie algebras
# ----------------------------------------------------------------------

class LieAlgebraData:
    """[e_i, e_j] = sum_k f[i][j][k] e_k, stored as the dim x dim^2 matrix ``bracket``."""

    def __init__(self, dim: int, bracket: ExactMatrix, labels: Sequence[str] | None = None,
                 check_antisymmetry: bool = True):
        if dim < 0:
            raise ValueError("negative dimension")
        if bracket.shape != (dim, dim * dim):
            raise ValueError("bracket tensor has the wrong shape")
        self.dim = dim
        self.bracket = bracket
        self.labels = list(labels) if labels else [f"X{i}" for i in range(dim)]
        self.table = _table_from_matrix(bracket, dim) if dim else {}
        if check_antisymmetry and not self.is_antisymmetric():
            raise ValueError("bracket is not antisymmetric")
        self._ad = None

    @staticmethod
    def from_tensor(f, labels=None) -> "LieAlgebraData":
        n = len(f)
        ent = {}
        for i in range(n):
            for j in range(n):
                if len(f[i][j]) != n:
                    raise ValueError("dimension mismatch in structure constants")
                for k in range(n):
                    if f[i][j][k] != 0:
                        ent[(k, i * n + j)] = f[i][j][k]
        return LieAlgebraData(n, ExactMatrix.from_dict(n, n * n, ent), labels)

    def f(self, i: int, j: int, k: int) -> QI:
        return self.bracket[k, i * self.dim + j]

    def is_antisymmetric(self) -> bool:
        n = self.dim
        for (i, j), terms in self.table.items():
            other = dict(self.table.get((j, i), []))
            for k, v in terms:
                if other.get(k, QI(0)) != -v:
                    return False
        for (i, j) in self.table:
            if (j, i) not in self.table and self.table[(i, j)]:
                return False
        return True

    def ad_mats(self) -> list[ExactMatrix]:
        """ad(e_i) as dim x dim matrices."""
        if self._ad is None:
            n = self.dim
            ents = [dict() for _ in range(n)]
            for (i, j), terms in self.table.items():
                for k, v in terms:
                    ents[i][(k, j)] = v
            self._ad = [ExactMatrix.from_dict(n, n, e) for e in ents]
        return self._ad

    def bracket_vec(self, x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
        return self.bracket @ kron(x, y)

    def __repr__(self):
        return f"LieAlgebraData(dim={self.dim})"


def sl2() -> LieAlgebraData:
    """sl(2) on (e, h, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h."""
    E, H, F = 0, 1, 2
    f = [[[0] * 3 for _ in range(3)] for _ in range(3)]

    def setb(i, j, k, v):
        f[i][j][k] = v
        f[j][i][k] = -v
    setb(H, E, E, 2)
    setb(H, F, F, -2)
    setb(E, F, H, 1)
    return LieAlgebraData.from_tensor(f, ["e", "h", "f"])


def abelian_lie(n: int) -> LieAlgebraData:
    return LieAlgebraData(n, ExactMatrix.zeros(n, n * n))


def commutator_lie(a: FiniteAlgebra) -> LieAlgebraData:
    n = a.dim
    ent = {}
    for (i, j), terms in a.table.items():
        for k, v in terms:
            ent[(k, i * n + j)] = ent.get((k, i * n + j), QI(0)) + v
            ent[(k, j * n + i)] = ent.get((k, j * n + i), QI(0)) - v
    return LieAlgebraData(n, ExactMatrix.from_dict(n, n * n, {k: v for k, v in ent.items() if v}), a.labels)


def gl(n: int) -> LieAlgebraData:
    return commutator_lie(matrix_algebra(n))


def lie_change_basis(g: LieAlgebraData, p: ExactMatrix) -> LieAlgebraData:
    pinv = solve(p, ExactMatrix.identity(g.dim))
    if pinv is None:
        raise ValueError("change of basis is not invertible")
    return LieAlgebraData(g.dim, pinv @ g.bracket @ kron(p, p))


@dataclass
class LieReport:
    jacobi_direct: bool
    jacobi_dsquared: bool

    @property
    def routes_agree(self) -> bool:
        return self.jacobi_direct == self.jacobi_dsquared

    @property
    def ok(self) -> bool:
        if not self.routes_agree:
            raise AssertionError("Jacobi routes disagree")
        return self.jacobi_direct

    def to_dict(self) -> dict:
        return {"jacobi": self.jacobi_direct, "jacobi_via_d_squared": self.jacobi_dsquared,
                "routes_agree": self.routes_agree}


def jacobi_direct(g: LieAlgebraData) -> bool:
    n = g.dim
    t = g.table

    def br(u: dict, j: int) -> dict:
        out = {}
        for m, v in u.items():
            for r, w in t.get((m, j), []):
                out[r] = out.get(r, QI(0)) + v * w
        return out

    for i in range(n):
        for j in range(n):
            for k in range(n):
                total = {}
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    ab = dict(t.get((a, b), []))
                    for r, v in br(ab, c).items():
                        total[r] = total.get(r, QI(0)) + v
                if any(v for v in total.values()):
                    return False
    return True


def exterior_basis(n: int, p: int) -> list[tuple[int, ...]]:
    return list(combinations(range(n), p))


def wedge_sort(idx: Sequence[int]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and sorted tuple of e^{i1}^...^e^{ip}, or None if an index repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return None
    sign = 1
    for a in range(len(idx)):
        for b in range(len(idx) - 1 - a):
            if idx[b] > idx[b + 1]:
                idx[b], idx[b + 1] = idx[b + 1], idx[b]
                sign = -sign
    return sign, tuple(idx)


def exterior_antiderivation(n: int, gen_image: dict, p: int) -> ExactMatrix:
    """Matrix of the degree-1 antiderivation of the exterior algebra on n generators
    from Lambda^p to Lambda^(p+1), given d(e^a) = sum over (b<c) of gen_image[a][(b,c)] e^b^e^c."""
    src = exterior_basis(n, p)
    tgt = exterior_basis(n, p + 1)
    tindex = {m: k for k, m in enumerate(tgt)}
    ent = {}
    for col, mono in enumerate(src):
        for pos, a in enumerate(mono):
            sgn = -1 if pos % 2 else 1
            for (b, c), v in gen_image.get(a, {}).items():
                new = mono[:pos] + (b, c) + mono[pos + 1:]
                ws = wedge_sort(new)
                if ws is None:
                    continue
                s, key = ws
                r = tindex[key]
                ent[(r, col)] = ent.get((r, col), QI(0)) + v * (s * sgn)
    return ExactMatrix.from_dict(len(tgt), len(src), {k: v for k, v in ent.items() if v})


def lie_generator_d(g: LieAlgebraData) -> dict:
    """d(e^a) = -sum_{b<c} f_{bc}^a e^b ^ e^c, the dual of minus the bracket."""
    img = {}
    for (b, c), terms in g.table.items():
        if b < c:
            for a, v in terms:
                img.setdefault(a, {})[(b, c)] = -v
    return img


def lie_dsquared(g: LieAlgebraData) -> bool:
    img = lie_generator_d(g)
    d1 = exterior_antiderivation(g.dim, img, 1)
    d2 = exterior_antiderivation(g.dim, img, 2)
    return (d2 @ d1).is_zero()


def check_lie(g: LieAlgebraData) -> LieReport:
    if not g.is_antisymmetric():
        raise ValueError("bracket is not antisymmetric")
    return LieReport(jacobi_direct(g), lie_dsquared(g))


# ----------------------------------------------------------------------
# center and derivations
# ----------------------------------------------------------------------

def center(a: FiniteAlgebra) -> Subspace:
    L, R = a.left_mats(), a.right_mats()
    # z e_j - e_j z = (R_j - L_j) z
    return kernel(ExactMatrix.vstack([R[j] - L[j] for j in range(a.dim)]))


def vec_mat(x: ExactMatrix, n: int) -> ExactMatrix:
    """Unflatten a length n^2 column into the n x n matrix with X[r][c] at r*n + c."""
    return ExactMatrix.from_dict(n, n, {divmod(k, n): v for k, _, v in x.nonzeros()})


def mat_vec(m: ExactMatrix) -> ExactMatrix:
    n = m.cols
    return ExactMatrix.from_dict(m.rows * n, 1, {(i * n + j, 0): v for i, j, v in m.nonzeros()})


def leibniz_constraints(a: FiniteAlgebra) -> ExactMatrix:
    """Rows express X(e_i e_j) - X(e_i) e_j - e_i X(e_j) = 0 in the entries X[r][c]."""
    n = a.dim
    L, R = a.left_mats(), a.right_mats()
    Lent = [{(r, s): v for r, s, v in m.nonzeros()} for m in L]
    Rent = [{(r, s): v for r, s, v in m.nonzeros()} for m in R]
    ent = {}

    def add(row, col, v):
        ent[(row, col)] = ent.get((row, col), QI(0)) + v

    for i in range(n):
        for j in range(n):
            base = (i * n + j) * n
            for k, v in a.table.get((i, j), []):
                for r in range(n):
                    add(base + r, r * n + k, v)
            for (r, s), v in Rent[j].items():
                add(base + r, s * n + i, -v)
            for (r, s), v in Lent[i].items():
                add(base + r, s * n + j, -v)
    return ExactMatrix.from_dict(n * n * n, n * n, {k: v for k, v in ent.items() if v})


@dataclass
class DerivationData:
    der: Subspace
    inner: Subspace
    out_dim: int
    n: int

    def der_mats(self) -> list[ExactMatrix]:
        return [vec_mat(self.der.matrix.col_matrix(k), self.n) for k in range(self.der.dim)]

    def inner_mats(self) -> list[ExactMatrix]:
        return [vec_mat(self.inner.matrix.col_matrix(k), self.n) for k in range(self.inner.dim)]


def derivations(a: FiniteAlgebra) -> DerivationData:
    n = a.dim
    der = kernel(leibniz_constraints(a))
    inner_vecs = [mat_vec(a.left_mats()[i] - a.right_mats()[i]) for i in range(n)]
    inner = span(ExactMatrix.hstack(inner_vecs))
    if not der.contains(inner.matrix):
        raise AssertionError("inner derivations are not derivations")
    return DerivationData(der, inner, der.dim - inner.dim, n)


def is_derivation(a: FiniteAlgebra, x: ExactMatrix) -> bool:
    return (leibniz_constraints(a) @ mat_vec(x)).is_zero()


def derivation_star(a: FiniteAlgebra, x: ExactMatrix) -> ExactMatrix:
    """X*(b) = (X(b*))*, i.e. the matrix S conj(X) conj(S)."""
    if a.star is None:
        raise ValueError("algebra has no involution")
    return a.star @ x.conj() @ a.star.conj()


# ----------------------------------------------------------------------
# bimodules
# ----------------------------------------------------------------------

class Bimodule:
    """An (A, B)-bimodule: left[i] is m -> e_i m, right[j] is m -> m e_j."""

    def __init__(self, left_algebra: FiniteAlgebra, right_algebra: FiniteAlgebra, dim: int,
                 left: Sequence[ExactMatrix], right: Sequence[ExactMatrix]):
        if len(left) != left_algebra.dim or len(right) != right_algebra.dim:
            raise ValueError("one action matrix per algebra basis element is required")
        for m in list(left) + list(right):
            if m.shape != (dim, dim):
                raise ValueError("action matrix has the wrong shape")
        self.left_algebra = left_algebra
        self.right_algebra = right_algebra
        self.dim = dim
        self.left = list(left)
        self.right = list(right)

    def left_of(self, x: ExactMatrix) -> ExactMatrix:
        out = ExactMatrix.zeros(self.dim, self.dim)
        for i, _, v in x.nonzeros():
            out = out + self.left[i].scale(v)
        return out

    def right_of(self, x: ExactMatrix) -> ExactMatrix:
        out = ExactMatrix.zeros(self.dim, self.dim)
        for i, _, v in x.nonzeros():
            out = out + self.right[i].scale(v)
        return out

    def __repr__(self):
        return f"Bimodule(dim={self.dim})"


def check_bimodule(m: Bimodule) -> dict:
    A, B = m.left_algebra, m.right_algebra
    res = {"left_assoc": True, "right_assoc": True, "commute": True, "unit": True}
    for i in range(A.dim):
        for j in range(A.dim):
            prod = ExactMatrix.zeros(m.dim, m.dim)
            for k, v in A.table.get((i, j), []):
                prod = prod + m.left[k].scale(v)
            if m.left[i] @ m.left[j] != prod:
                res["left_assoc"] = False
    for i in range(B.dim):
        for j in range(B.dim):
            prod = ExactMatrix.zeros(m.dim, m.dim)
            for k, v in B.table.get((i, j), []):
                prod = prod + m.right[k].scale(v)
            if m.right[j] @ m.right[i] != prod:
                res["right_assoc"] = False
    for i in range(A.dim):
        for j in range(B.dim):
            if m.left[i] @ m.right[j] != m.right[j] @ m.left[i]:
                res["commute"] = False
    ident = ExactMatrix.identity(m.dim)
    if m.left_of(A.unit_vec) != ident or m.right_of(B.unit_vec) != ident:
        res["unit"] = False
    res["ok"] = all(res.values())
    return res


def regular_bimodule(a: FiniteAlgebra) -> Bimodule:
    return Bimodule(a, a, a.dim, a.left_mats(), a.right_mats())


def free_bimodule(a: FiniteAlgebra, k: int) -> Bimodule:
    from .exact import block_diag
    return Bimodule(a, a, a.dim * k, [block_diag([m] * k) for m in a.left_mats()],
                    [block_diag([m] * k) for m in a.right_mats()])


def outer_bimodule(a: FiniteAlgebra, b: FiniteAlgebra | None = None) -> Bimodule:
    """A (x) B with x(u (x) v)y = xu (x) vy."""
    b = a if b is None else b
    ia, ib = ExactMatrix.identity(a.dim), ExactMatrix.identity(b.dim)
    return Bimodule(a, b, a.dim * b.dim, [kron(l, ib) for l in a.left_mats()],
                    [kron(ia, r) for r in b.right_mats()])


def dual_bimodule(a: FiniteAlgebra) -> Bimodule:
    """A* with (x phi y)(b) = phi(y b x)."""
    L, R = a.left_mats(), a.right_mats()
    # (x phi)(b) = phi(b x) -> matrix R_x^T on coefficient vectors; (phi y)(b) = phi(y b) -> L_y^T
    return Bimodule(a, a, a.dim, [r.T for r in R], [l.T for l in L])


def trivial_bimodule(a: FiniteAlgebra, counit: Sequence) -> Bimodule:
    """One-dimensional bimodule where x acts by the character counit(x)."""
    mats = [ExactMatrix.from_rows([[c]]) for c in counit]
    return Bimodule(a, a, 1, mats, mats)


def sub_bimodule(m: Bimodule, sub: Subspace) -> Bimodule:
    from .exact import restrict
    left, right = [], []
    for mat in m.left:
        r = restrict(mat, sub, sub)
        if r is None:
            raise ValueError("subspace is not stable under the left action")
        left.append(r)
    for mat in m.right:
        r = restrict(mat, sub, sub)
        if r is None:
            raise ValueError("subspace is not stable under the right action")
        right.append(r)
    return Bimodule(m.left_algebra, m.right_algebra, sub.dim, left, right)


def quotient_bimodule(m: Bimodule, killed: Subspace) -> tuple[Bimodule, ExactMatrix, ExactMatrix]:
    from .exact import quotient_coords
    q, proj, sec = quotient_coords(m.dim, killed)
    left = [proj @ mat @ sec for mat in m.left]
    right = [proj @ mat @ sec for mat in m.right]
    return Bimodule(m.left_algebra, m.right_algebra, q, left, right), proj, sec


def bimodule_closure(m: Bimodule, vectors: ExactMatrix) -> Subspace:
    """Smallest sub-bimodule containing the given columns."""
    cur = span(vectors) if vectors.cols else Subspace(m.dim)
    while True:
        gens = [cur.matrix] + [mat @ cur.matrix for mat in m.left + m.right]
        new = span(ExactMatrix.hstack(gens))
        if new.dim == cur.dim:
            return cur
        cur = new


@dataclass
class TensorOverA:
    """M (x)_A N as a quotient of M (x) N by the span of m a (x) n - m (x) a n."""
    module: Bimodule
    project: ExactMatrix
    section: ExactMatrix
    relators: Subspace


def tensor_over(m: Bimodule, n: Bimodule) -> TensorOverA:
    from .exact import quotient_coords
    A = m.right_algebra
    if n.left_algebra is not A and n.left_algebra.dim != A.dim:
        raise ValueError("bimodule mismatch in tensor product")
    dm, dn = m.dim, n.dim
    im, iN = ExactMatrix.identity(dm), ExactMatrix.identity(dn)
    rel = [kron(m.right[a], iN) - kron(im, n.left[a]) for a in range(A.dim)]
    relators = span(ExactMatrix.hstack(rel))
    q, proj, sec = quotient_coords(dm * dn, relators)
    left = [proj @ kron(l, iN) @ sec for l in m.left]
    right = [proj @ kron(im, r) @ sec for r in n.right]
    return TensorOverA(Bimodule(m.left_algebra, n.right_algebra, q, left, right), proj, sec, relators)


class StarBimodule:
    """A bimodule over a star algebra with antilinear involution m* = S conj(m)."""

    def __init__(self, base: Bimodule, star: ExactMatrix):
        self.base = base
        self.star = star

    def apply(self, v: ExactMatrix) -> ExactMatrix:
        return self.star @ v.conj()

    def check(self) -> bool:
        m = self.base
        A = m.left_algebra
        if self.star @ self.star.conj() != ExactMatrix.identity(m.dim):
            return False
        for i in range(A.dim):
            xs = A.apply_star(A.basis_vec(i))
            # (x m)* = m* x*
            lhs = self.star @ m.left[i].conj()
            rhs = m.right_of(xs) @ self.star
            if lhs != rhs:
                return False
            lhs = self.star @ m.right[i].conj()
            rhs = m.left_of(xs) @ self.star
            if lhs != rhs:
                return False
        return True


# ----------------------------------------------------------------------
# random generators for tests and property runs
# ----------------------------------------------------------------------

def random_invertible(n: int, rng: random.Random, lo: int = -2, hi: int = 2) -> ExactMatrix:
    while True:
        m = ExactMatrix.from_rows([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])
        if rank(m) == n:
            return m


def upper_triangular(n: int) -> FiniteAlgebra:
    """Upper triangular n x n matrices on the units e_ij, i <= j."""
    idx = [(i, j) for i in range(n) for j in range(i, n)]
    pos = {p: k for k, p in enumerate(idx)}
    d = len(idx)
    ent = {}
    for (i, j) in idx:
        for (k, l) in idx:
            if j == k:
                ent[(pos[(i, l)], pos[(i, j)] * d + pos[(k, l)])] = ONE
    unit = [QI(1) if i == j else QI(0) for (i, j) in idx]
    return FiniteAlgebra(d, ExactMatrix.from_dict(d, d * d, ent), unit)


def random_algebra(rng: random.Random, max_dim: int = 4) -> FiniteAlgebra:
    """A random associative unital algebra: a small known algebra in a random basis."""
    choices = [lambda: matrix_algebra(2), lambda: truncated_poly(rng.randint(1, 4)),
               lambda: upper_triangular(2),
               lambda: direct_sum(truncated_poly(rng.randint(1, 2)), truncated_poly(rng.randint(1, 2))),
               lambda: tensor_product(truncated_poly(2), truncated_poly(2))]
    while True:
        a = rng.choice(choices)()
        if a.dim <= max_dim:
            break
    return change_basis(a, random_invertible(a.dim, rng))


def perturb(a: FiniteAlgebra, rng: random.Random) -> FiniteAlgebra:
    """Add a random nonzero integer to one structure constant."""
    n = a.dim
    i, j, k = rng.randrange(n), rng.randrange(n), rng.randrange(n)
    delta = rng.choice([-2, -1, 1, 2])
    bump = ExactMatrix.from_dict(n, n * n, {(k, i * n + j): delta})
    return FiniteAlgebra(n, a.mul + bump, a.unit)


def perturb_lie(g: LieAlgebraData, rng: random.Random) -> LieAlgebraData:
    n = g.dim
    i, j = rng.sample(range(n), 2)
    k = rng.randrange(n)
    delta = rng.choice([-2, -1, 1, 2])
    bump = ExactMatrix.from_dict(n, n * n, {(k, i * n + j): delta, (k, j * n + i): -delta})
    return LieAlgebraData(n, g.bracket + bump)
