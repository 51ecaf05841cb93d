"""Hochschild cochains, cup products, cyclic cochains and the basic cohomology of an algebra.

A cochain of degree n with values in M is stored as a column of length
dim(M) * dim(A)^n; the entry for arguments (e_i1, ..., e_in) and output
coordinate r sits at flat(i1..in) * dim(M) + r, flat being base-dim(A) digits.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import permutations, product as iproduct

from .algebra import (Bimodule, FiniteAlgebra, TensorOverA, commutator_lie, dual_bimodule,
                      regular_bimodule, tensor_over)
from .complexes import (CochainComplex, GradedDiffAlgebra, OperationData, basic_subcomplex,
                        cohomology, StructuralError)
from .exact import (QI, ExactMatrix, Subspace, intersect_kernels, kron, restrict, span, ONE)


class SizeError(ValueError):
    """Raised when a requested construction exceeds the workspace cap."""


def max_dim() -> int:
    return int(os.environ.get("NC_MAX_DIM", "20000"))


def check_size(n: int, what: str = "cochain space"):
    if n > max_dim():
        raise SizeError(f"{what} would have dimension {n}, above the cap NC_MAX_DIM={max_dim()}")


def tuples(dim: int, n: int):
    return iproduct(range(dim), repeat=n)


def flat(idx, dim: int) -> int:
    k = 0
    for i in idx:
        k = k * dim + i
    return k


@dataclass
class Cochain:
    degree: int
    dim_a: int
    dim_m: int
    vec: ExactMatrix

    def __post_init__(self):
        if self.vec.shape != (self.dim_m * self.dim_a ** self.degree, 1):
            raise ValueError("cochain has the wrong size")

    def value(self, *idx) -> ExactMatrix:
        base = flat(idx, self.dim_a) * self.dim_m
        return self.vec.submatrix(range(base, base + self.dim_m), [0])

    def as_matrix(self) -> ExactMatrix:
        """dim_m x dim_a^n matrix whose columns are the values on basis tuples."""
        ent = {}
        for k, _, v in self.vec.nonzeros():
            t, r = divmod(k, self.dim_m)
            ent[(r, t)] = v
        return ExactMatrix.from_dict(self.dim_m, self.dim_a ** self.degree, ent)

    @staticmethod
    def from_matrix(mat: ExactMatrix, degree: int, dim_a: int) -> "Cochain":
        dm = mat.rows
        ent = {(t * dm + r, 0): v for r, t, v in mat.nonzeros()}
        return Cochain(degree, dim_a, dm, ExactMatrix.from_dict(dm * dim_a ** degree, 1, ent))

    def __add__(self, o):
        return Cochain(self.degree, self.dim_a, self.dim_m, self.vec + o.vec)

    def __sub__(self, o):
        return Cochain(self.degree, self.dim_a, self.dim_m, self.vec - o.vec)

    def scale(self, s):
        return Cochain(self.degree, self.dim_a, self.dim_m, self.vec.scale(s))

    def is_zero(self) -> bool:
        return self.vec.is_zero()


# ----------------------------------------------------------------------
# Hochschild coboundary
# ----------------------------------------------------------------------

def hochschild_matrix(a: FiniteAlgebra, m: Bimodule, n: int) -> ExactMatrix:
    """d_H: C^n(A, M) -> C^(n+1)(A, M) as a matrix."""
    da, dm = a.dim, m.dim
    check_size(dm * da ** (n + 1))
    left = [{(r, s): v for r, s, v in x.nonzeros()} for x in m.left]
    right = [{(r, s): v for r, s, v in x.nonzeros()} for x in m.right]
    ent = {}

    def add(key, v):
        ent[key] = ent.get(key, QI(0)) + v

    for x in tuples(da, n + 1):
        rowbase = flat(x, da) * dm
        # x_0 w(x_1..x_n)
        cb = flat(x[1:], da) * dm
        for (r, s), v in left[x[0]].items():
            add((rowbase + r, cb + s), v)
        # interior products
        for k in range(1, n + 1):
            sgn = -1 if k % 2 else 1
            for t, v in a.table.get((x[k - 1], x[k]), []):
                cb = flat(x[:k - 1] + (t,) + x[k + 1:], da) * dm
                for r in range(dm):
                    add((rowbase + r, cb + r), v * sgn)
        # (-1)^(n+1) w(x_0..x_(n-1)) x_n
        sgn = -1 if (n + 1) % 2 else 1
        cb = flat(x[:n], da) * dm
        for (r, s), v in right[x[n]].items():
            add((rowbase + r, cb + s), v * sgn)
    return ExactMatrix.from_dict(dm * da ** (n + 1), dm * da ** n, {k: v for k, v in ent.items() if v})


def hochschild_d(a: FiniteAlgebra, m: Bimodule, w: Cochain) -> Cochain:
    if w.dim_m != m.dim or w.dim_a != a.dim:
        raise ValueError("cochain does not match the algebra and bimodule")
    return Cochain(w.degree + 1, a.dim, m.dim, hochschild_matrix(a, m, w.degree) @ w.vec)


def hochschild_complex(a: FiniteAlgebra, m: Bimodule, upto: int) -> CochainComplex:
    """C^0..C^upto with the coboundary out of the top degree kept as an exit map."""
    dims = [m.dim * a.dim ** n for n in range(upto + 1)]
    mats = [hochschild_matrix(a, m, n) for n in range(upto + 1)]
    return CochainComplex(dims, mats[:-1], exit_map=mats[-1])


def unit_insertion(a: FiniteAlgebra, dim_m: int, n: int, slot: int) -> ExactMatrix:
    """w -> w(.., 1 at position slot, ..) from C^n to C^(n-1)."""
    da = a.dim
    ent = {}
    for y in tuples(da, n - 1):
        rb = flat(y, da) * dim_m
        for i, u in enumerate(a.unit):
            if not u:
                continue
            cb = flat(y[:slot] + (i,) + y[slot:], da) * dim_m
            for r in range(dim_m):
                ent[(rb + r, cb + r)] = u
    return ExactMatrix.from_dict(dim_m * da ** (n - 1), dim_m * da ** n, ent)


def normalized_spaces(a: FiniteAlgebra, dim_m: int, upto: int) -> list[Subspace]:
    out = []
    for n in range(upto + 1):
        size = dim_m * a.dim ** n
        out.append(intersect_kernels([unit_insertion(a, dim_m, n, k) for k in range(n)], size))
    return out


@dataclass
class HochschildResult:
    dims: list[int]
    normalized_dims: list[int]

    @property
    def agree(self) -> bool:
        return self.dims == self.normalized_dims


def hochschild_cohomology(a: FiniteAlgebra, m: Bimodule | None = None, upto: int = 3) -> HochschildResult:
    m = regular_bimodule(a) if m is None else m
    full = hochschild_complex(a, m, upto)
    h = cohomology(full).dims
    spaces = normalized_spaces(a, m.dim, upto)
    d = []
    for n in range(upto):
        r = restrict(full.d[n], spaces[n], spaces[n + 1])
        if r is None:
            raise StructuralError(f"normalized cochains are not stable under d_H in degree {n}")
        d.append(r)
    norm = CochainComplex([s.dim for s in spaces], d, exit_map=full.exit_map @ spaces[upto].matrix)
    hn = cohomology(norm).dims
    if hn != h:
        raise StructuralError(f"normalized cohomology {hn} differs from full cohomology {h}")
    return HochschildResult(h, hn)


# ----------------------------------------------------------------------
# the scalar cochain algebra C(A)
# ----------------------------------------------------------------------

def scalar_d_matrix(a: FiniteAlgebra, n: int) -> ExactMatrix:
    """d w(x_0..x_n) = sum_{k=1}^n (-1)^k w(.., x_(k-1) x_k, ..) on scalar cochains."""
    da = a.dim
    check_size(da ** (n + 1))
    ent = {}
    for x in tuples(da, n + 1):
        row = flat(x, da)
        for k in range(1, n + 1):
            sgn = -1 if k % 2 else 1
            for t, v in a.table.get((x[k - 1], x[k]), []):
                col = flat(x[:k - 1] + (t,) + x[k + 1:], da)
                ent[(row, col)] = ent.get((row, col), QI(0)) + v * sgn
    return ExactMatrix.from_dict(da ** (n + 1), da ** n, {k: v for k, v in ent.items() if v})


def unit_insertion_map(a: FiniteAlgebra, n: int) -> ExactMatrix:
    """w -> w(1, x_1, .., x_(n-1)) from C^n(A) to C^(n-1)(A).

    With d w(x_0..x_n) = sum_(k>=1) (-1)^k w(.., x_(k-1) x_k, ..) this map satisfies
    d h + h d = -id, so the contracting homotopy is its negative."""
    return unit_insertion(a, 1, n, 0)


def unit_homotopy(a: FiniteAlgebra, n: int) -> ExactMatrix:
    """Contracting homotopy of C(A): d h + h d = id in degrees n >= 1."""
    return unit_insertion_map(a, n).scale(-1)


def contraction_matrix(a: FiniteAlgebra, b: int, n: int) -> ExactMatrix:
    """i_a w(x_1..x_(n-1)) = sum_k (-1)^k w(x_1..x_k, a, x_(k+1)..) for a = e_b."""
    da = a.dim
    ent = {}
    for y in tuples(da, n - 1):
        row = flat(y, da)
        for k in range(n):
            col = flat(y[:k] + (b,) + y[k:], da)
            ent[(row, col)] = ent.get((row, col), 0) + (-1) ** k
    return ExactMatrix.from_dict(da ** (n - 1), da ** n, {k: v for k, v in ent.items() if v})


def scalar_cochain_gda(a: FiniteAlgebra, max_degree: int) -> GradedDiffAlgebra:
    """C(A) = T(A*): concatenation product and the scalar differential."""
    da = a.dim
    dims = [da ** n for n in range(max_degree + 1)]
    check_size(dims[-1])
    d = [scalar_d_matrix(a, n) for n in range(max_degree)]
    return GradedDiffAlgebra(dims, d, lambda p, q: ExactMatrix.identity(dims[p + q]),
                             ExactMatrix.identity(1), complete=False, name="C(A)")


def scalar_cochain_operation(a: FiniteAlgebra, g: GradedDiffAlgebra) -> OperationData:
    lie = commutator_lie(a)
    i = [[None] + [contraction_matrix(a, b, n) for n in range(1, g.max_degree + 1)] for b in range(a.dim)]
    return OperationData(lie, i)


def basic_cohomology_A(a: FiniteAlgebra, upto: int) -> list[int]:
    g = scalar_cochain_gda(a, upto + 1)
    op = scalar_cochain_operation(a, g)
    res = basic_subcomplex(g, op)
    h = cohomology(res.basic, upto)
    if h.truncated:
        raise StructuralError("basic cohomology truncated in a requested degree")
    return h.dims


def invariant_cohomology_A(a: FiniteAlgebra, upto: int) -> list[int]:
    g = scalar_cochain_gda(a, upto + 1)
    op = scalar_cochain_operation(a, g)
    res = basic_subcomplex(g, op)
    return cohomology(res.invariant, upto).dims


# ----------------------------------------------------------------------
# cup product
# ----------------------------------------------------------------------

def cup(a: FiniteAlgebra, w1: Cochain, m: Bimodule, w2: Cochain, n: Bimodule,
        t: TensorOverA | None = None) -> tuple[Cochain, TensorOverA]:
    """(w1 cup w2)(x_1..x_(p+q)) = w1(x_1..x_p) (x)_A w2(x_(p+1)..x_(p+q))."""
    if w1.dim_m != m.dim or w2.dim_m != n.dim:
        raise ValueError("bimodule mismatch in cup product")
    if m.right_algebra.dim != a.dim or n.left_algebra.dim != a.dim:
        raise ValueError("bimodule mismatch in cup product")
    t = tensor_over(m, n) if t is None else t
    vals = t.project @ kron(w1.as_matrix(), w2.as_matrix())
    return Cochain.from_matrix(vals, w1.degree + w2.degree, a.dim), t


def tensor_reassociation(m: Bimodule, n: Bimodule, p: Bimodule) -> tuple[TensorOverA, TensorOverA, TensorOverA, TensorOverA, ExactMatrix]:
    """Coordinates change from (M (x)_A N) (x)_A P to M (x)_A (N (x)_A P)."""
    mn = tensor_over(m, n)
    mn_p = tensor_over(mn.module, p)
    np_ = tensor_over(n, p)
    m_np = tensor_over(m, np_.module)
    lift = kron(mn.section, ExactMatrix.identity(p.dim)) @ mn_p.section
    to_right = m_np.project @ kron(ExactMatrix.identity(m.dim), np_.project)
    return mn, mn_p, np_, m_np, to_right @ lift


# ----------------------------------------------------------------------
# cyclic cochains
# ----------------------------------------------------------------------

def _perm_sign(p) -> int:
    s = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def _perm_operator(a: FiniteAlgebra, n: int, perms) -> ExactMatrix:
    da = a.dim
    ent = {}
    for x in tuples(da, n):
        row = flat(x, da)
        for p in perms:
            col = flat(tuple(x[p[k]] for k in range(n)), da)
            ent[(row, col)] = ent.get((row, col), 0) + _perm_sign(p)
    return ExactMatrix.from_dict(da ** n, da ** n, {k: v for k, v in ent.items() if v})


def antisymmetrizer(a: FiniteAlgebra, n: int) -> ExactMatrix:
    """S(w)(x_1..x_n) = sum over all permutations of sign(pi) w(x_pi(1)..x_pi(n))."""
    return _perm_operator(a, n, list(permutations(range(n))))


def cyclic_antisymmetrizer(a: FiniteAlgebra, n: int) -> ExactMatrix:
    """C(w)(x_1..x_n) = sum over cyclic permutations of sign(g) w(x_g(1)..x_g(n))."""
    cyc = [tuple((k + s) % n for k in range(n)) for s in range(n)] if n else [()]
    return _perm_operator(a, n, cyc)


def cyclic_operators(a: FiniteAlgebra, w: Cochain) -> tuple[Cochain, Cochain]:
    if w.dim_m != 1:
        raise ValueError("cyclic operators act on scalar cochains")
    n = w.degree
    return (Cochain(n, a.dim, 1, antisymmetrizer(a, n) @ w.vec),
            Cochain(n, a.dim, 1, cyclic_antisymmetrizer(a, n) @ w.vec))


def scalar_to_dual_valued(a: FiniteAlgebra, n: int) -> ExactMatrix:
    """Identify C^n(A) with C^(n-1)(A, A*): w(x_1..x_n) = phi(x_1..x_(n-1))(x_n).

    With the column layouts used here this identification is the identity
    matrix; it is kept explicit for readability."""
    return ExactMatrix.identity(a.dim ** n)


def dual_hochschild_on_scalars(a: FiniteAlgebra, n: int) -> ExactMatrix:
    """d_H of C(A, A*) transported to C^n(A) -> C^(n+1)(A)."""
    return hochschild_matrix(a, dual_bimodule(a), n - 1)


def intertwining_residual(a: FiniteAlgebra, w: Cochain) -> ExactMatrix:
    """C(d w) - d_H(C w) for a scalar cochain w of degree >= 1."""
    n = w.degree
    lhs = cyclic_antisymmetrizer(a, n + 1) @ scalar_d_matrix(a, n) @ w.vec
    rhs = dual_hochschild_on_scalars(a, n) @ cyclic_antisymmetrizer(a, n) @ w.vec
    return lhs - rhs


def cyclic_complex(a: FiniteAlgebra, upto: int) -> CochainComplex:
    """(Im C, d_H): degree n holds the image of C on C^(n+1)(A) = C^n(A, A*)."""
    spaces = [span(cyclic_antisymmetrizer(a, n + 1)) for n in range(upto + 2)]
    maps = []
    for n in range(upto + 1):
        dh = dual_hochschild_on_scalars(a, n + 1)
        r = restrict(dh, spaces[n], spaces[n + 1])
        if r is None:
            raise StructuralError(f"d_H does not preserve cyclic cochains in degree {n}")
        maps.append(r)
    return CochainComplex([s.dim for s in spaces[:upto + 1]], maps[:-1], exit_map=maps[-1])


def cyclic_cohomology(a: FiniteAlgebra, upto: int) -> list[int]:
    """Raw cohomology dimensions of (Im C, d_H), indexed by the degree in C(A, A*)."""
    return cohomology(cyclic_complex(a, upto)).dims


def trace_space(a: FiniteAlgebra) -> Subspace:
    """Linear forms with tau(xy) = tau(yx)."""
    from .exact import kernel
    n = a.dim
    rows = []
    for i in range(n):
        for j in range(n):
            rows.append(a.mul.col_matrix(i * n + j).T - a.mul.col_matrix(j * n + i).T)
    return kernel(ExactMatrix.vstack(rows))


def random_cochain(rng, degree: int, dim_a: int, dim_m: int, lo: int = -3, hi: int = 3,
                   density: float = 1.0) -> Cochain:
    size = dim_m * dim_a ** degree
    ent = {}
    for k in range(size):
        if rng.random() < density:
            v = rng.randint(lo, hi)
            if v:
                ent[(k, 0)] = v
    return Cochain(degree, dim_a, dim_m, ExactMatrix.from_dict(size, 1, ent))
