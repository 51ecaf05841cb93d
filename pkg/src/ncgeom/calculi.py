"""Universal, central, diagonal and derivation-based differential calculi of a finite algebra.

Omega^n_u is modelled on A (x) Abar^(x)n where Abar = A / C1 has coordinates
indexed by the basis elements other than the unit's pivot.  The basis element
with index a0 * (dim A - 1)^n + flat(j1..jn) stands for
e_a0 d(e_c[j1]) ... d(e_c[jn]), c being the list of non-pivot indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb

from .algebra import (Bimodule, FiniteAlgebra, LieAlgebraData, center, derivation_star, derivations,
                      exterior_basis, mat_vec, sub_bimodule, quotient_bimodule, wedge_sort)
from .complexes import (GradedDiffAlgebra, MapReport, OperationData, QuotientGDA, StructuralError,
                        check_gda_map, cohomology, quotient_gda, quotient_operation, restrict_operation,
                        sub_gda)
from .exact import (QI, ExactMatrix, Subspace, intersect_kernels, kernel, kron, rank, solve, span,
                    sum_spaces, ONE)
from .hochschild import Cochain, check_size, hochschild_matrix, normalized_spaces, unit_insertion
from .lie_weil import LieModule, ce_differential


def _eye(n: int) -> ExactMatrix:
    return ExactMatrix.identity(n)


def _basis_row(n: int, i: int) -> ExactMatrix:
    return ExactMatrix.from_dict(1, n, {(0, i): ONE})


def _combo(mats: list[ExactMatrix], x: ExactMatrix, rows: int, cols: int) -> ExactMatrix:
    out = ExactMatrix.zeros(rows, cols)
    for i, _, v in x.nonzeros():
        out = out + mats[i].scale(v)
    return out


def _span_cols(n: int, m: ExactMatrix) -> Subspace:
    return span(m) if m.cols else Subspace(n)


def _hspan(n: int, mats: list[ExactMatrix]) -> Subspace:
    mats = [m for m in mats if m.cols]
    return span(ExactMatrix.hstack(mats)) if mats else Subspace(n)


def _reverse_perm(d: int, n: int) -> ExactMatrix:
    """Permutation of (C^d)^(x)n reversing the order of the factors."""
    ent = {}
    for k in range(d ** n):
        digits = []
        x = k
        for _ in range(n):
            x, r = divmod(x, d)
            digits.append(r)
        # digits are least significant first, so reading them forwards reverses
        rev = 0
        for r in digits:
            rev = rev * d + r
        ent[(rev, k)] = ONE
    return ExactMatrix.from_dict(d ** n, d ** n, ent)


def _kron_all(mats: list[ExactMatrix]) -> ExactMatrix:
    out = ExactMatrix.identity(1)
    for m in mats:
        out = kron(out, m)
    return out


# ----------------------------------------------------------------------
# derivations as a Lie algebra
# ----------------------------------------------------------------------

@dataclass
class DerivationLie:
    lie: LieAlgebraData
    mats: list[ExactMatrix]
    space: Subspace


def derivation_lie(a: FiniteAlgebra, basis: list[ExactMatrix] | None = None) -> DerivationLie:
    """Der(A) as a Lie algebra, on its canonical basis or on a supplied basis of derivations."""
    dd = derivations(a)
    space = dd.der
    mats = dd.der_mats()
    if basis is not None:
        mats = list(basis)
        vecs = [mat_vec(x) for x in mats]
        space = span(ExactMatrix.hstack(vecs)) if vecs else Subspace(a.dim * a.dim)
        if space.dim != len(mats) or space.dim != dd.der.dim or not dd.der.contains(space.matrix):
            raise ValueError("supplied matrices are not a basis of Der(A)")
        space = Subspace(a.dim * a.dim, ExactMatrix.hstack(vecs))
    r = len(mats)
    ent = {}
    for i in range(r):
        for j in range(r):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            c = solve(space.matrix, mat_vec(comm))
            if c is None:
                raise StructuralError("commutator of derivations is not a derivation")
            for k, _, v in c.nonzeros():
                ent[(k, i * r + j)] = v
    lie = LieAlgebraData(r, ExactMatrix.from_dict(r, r * r, ent), [f"X{k}" for k in range(r)])
    return DerivationLie(lie, mats, space)


def derivation_coords(dl: DerivationLie, x: ExactMatrix) -> ExactMatrix | None:
    return solve(dl.space.matrix, mat_vec(x)) if dl.space.dim else (
        ExactMatrix.zeros(0, 1) if x.is_zero() else None)


# ----------------------------------------------------------------------
# universal calculus
# ----------------------------------------------------------------------

class UniversalCalculus:
    """Truncated universal differential calculus in the concrete model A (x) Abar^(x)n."""

    def __init__(self, a: FiniteAlgebra, max_degree: int):
        if max_degree < 1:
            raise ValueError("max_degree must be at least 1")
        D = a.dim
        check_size(D * max(D - 1, 1) ** max_degree, "universal calculus")
        self.a = a
        self.N = max_degree
        self.D = D
        self.ab = D - 1
        self.u = a.unit_vec
        self.pivot = next(i for i, v in enumerate(a.unit) if v)
        self.cols = [i for i in range(D) if i != self.pivot]
        up = a.unit[self.pivot]
        ent = {}
        for j, c in enumerate(self.cols):
            ent[(j, c)] = ONE
            if a.unit[c]:
                ent[(j, self.pivot)] = -(a.unit[c] / up)
        self.bar = ExactMatrix.from_dict(self.ab, D, ent)
        self.incl = ExactMatrix.from_dict(D, self.ab, {(c, j): ONE for j, c in enumerate(self.cols)})
        self.omega_form = ExactMatrix.from_dict(1, D, {(0, self.pivot): QI(1) / up})
        self.dims = [D * self.ab ** n for n in range(max_degree + 1)]
        self.d = [kron(kron(self.u, self.bar), _eye(self.ab ** n)) for n in range(max_degree)]
        self._R: dict[int, list[ExactMatrix]] = {0: a.right_mats()}
        self._gda: GradedDiffAlgebra | None = None
        self._op: OperationData | None = None
        self._dl: DerivationLie | None = None

    # algebra structure -------------------------------------------------

    def right_mats(self, n: int) -> list[ExactMatrix]:
        """R^(n)_e_i: right multiplication of Omega^n by e_i, via (eta da) b = eta d(ab) - (eta a) db."""
        if n not in self._R:
            prev = self.right_mats(n - 1)
            a = self.a
            out = []
            for b in range(self.D):
                Rb = a.right_mats()[b]
                m = kron(_eye(self.dims[n - 1]), self.bar @ Rb @ self.incl)
                barb = self.bar.col_matrix(b)
                for j, c in enumerate(self.cols):
                    m = m - kron(prev[c], barb @ _basis_row(self.ab, j))
                out.append(m)
            self._R[n] = out
        return self._R[n]

    def right_of(self, n: int, x: ExactMatrix) -> ExactMatrix:
        return _combo(self.right_mats(n), x, self.dims[n], self.dims[n])

    def left_of(self, n: int, x: ExactMatrix) -> ExactMatrix:
        return kron(self.a.left_of(x), _eye(self.ab ** n))

    def product(self, p: int, q: int) -> ExactMatrix:
        R = self.right_mats(p)
        out = ExactMatrix.zeros(self.dims[p + q], self.dims[p] * self.dims[q])
        Iq = _eye(self.ab ** q)
        for b in range(self.D):
            out = out + kron(R[b], kron(_basis_row(self.D, b), Iq))
        return out

    def dvec(self, x: ExactMatrix) -> ExactMatrix:
        """Model coordinates of d_u(x) for x in A."""
        return kron(self.u, self.bar @ x)

    def star(self, n: int) -> ExactMatrix | None:
        """(a0 da1..dan)* = (-1)^(n(n-1)/2) d(an*)..d(a1*) a0*."""
        S = self.a.star
        if S is None:
            return None
        if n == 0:
            return S
        Bs = self.bar @ S @ self.incl
        V = _reverse_perm(self.ab, n) @ _kron_all([Bs] * n)
        W = kron(self.u, V)
        R = self.right_mats(n)
        out = ExactMatrix.zeros(self.dims[n], self.dims[n])
        for a0 in range(self.D):
            Ra = _combo(R, S.col_matrix(a0), self.dims[n], self.dims[n])
            out = out + Ra @ W @ kron(_basis_row(self.D, a0), _eye(self.ab ** n))
        sgn = -1 if (n * (n - 1) // 2) % 2 else 1
        return out.scale(sgn)

    @property
    def gda(self) -> GradedDiffAlgebra:
        if self._gda is None:
            star = None
            if self.a.star is not None:
                star = [self.star(n) for n in range(self.N + 1)]
            self._gda = GradedDiffAlgebra(self.dims, self.d, self.product, self.u, star, name="Omega_u")
        return self._gda

    def bimodule(self, n: int) -> Bimodule:
        a = self.a
        return Bimodule(a, a, self.dims[n], [self.left_of(n, a.basis_vec(i)) for i in range(self.D)],
                        self.right_mats(n))

    def d_products(self, n: int) -> ExactMatrix:
        """Columns d_u(e_i1)...d_u(e_in) for all basis tuples, in flat order."""
        W1 = self.d[0]
        W = W1
        for k in range(1, n):
            W = self.product(k, 1) @ kron(W, W1)
        return W if n >= 1 else self.u

    def left_d_mult(self, x: ExactMatrix, q: int) -> ExactMatrix:
        """Matrix of eta -> d_u(x) eta from degree q to q+1."""
        return self.product(1, q) @ kron(self.dvec(x), _eye(self.dims[q]))

    # homotopy and the tensor model --------------------------------------

    def homotopy(self, n: int) -> ExactMatrix:
        """k(a0 da1 eta) = w(a0) a1 eta - w(a0 a1) eta with w(1) = 1, from degree n to n-1."""
        if n < 1:
            raise ValueError("homotopy is defined from degree 1")
        a = self.a
        w = self.omega_form
        ent = ExactMatrix.zeros(self.D, self.D * self.ab)
        cols = []
        for a0 in range(self.D):
            for j, c in enumerate(self.cols):
                prod = a.product(a.basis_vec(a0), a.basis_vec(c))
                v = a.basis_vec(c).scale((w @ a.basis_vec(a0))[0, 0]) - self.u.scale((w @ prod)[0, 0])
                cols.append(v)
        K1 = ExactMatrix.hstack(cols, rows=self.D) if cols else ent
        return kron(K1, _eye(self.ab ** (n - 1)))

    def iota(self, n: int) -> ExactMatrix:
        """Embedding of Omega^n_u into the (n+1)-fold tensor power of A."""
        D = self.D
        if n == 0:
            return _eye(D)
        DT = kron(self.u, self.incl) - kron(self.incl, self.u)
        J = kron(kron(_eye(D ** (n - 1)), self.a.mul), _eye(D))
        return J @ kron(self.iota(n - 1), DT)

    def tensor_d(self, n: int) -> ExactMatrix:
        D = self.D
        out = ExactMatrix.zeros(D ** (n + 2), D ** (n + 1))
        for k in range(n + 2):
            out = out + kron(kron(_eye(D ** k), self.u), _eye(D ** (n + 1 - k))).scale(-1 if k % 2 else 1)
        return out

    def tensor_homotopy(self, n: int) -> ExactMatrix:
        return kron(self.omega_form, _eye(self.D ** n))

    def tensor_product(self, p: int, q: int) -> ExactMatrix:
        """Concatenation with multiplication at the junction."""
        D = self.D
        return kron(kron(_eye(D ** p), self.a.mul), _eye(D ** q))

    def tensor_star(self, n: int) -> ExactMatrix:
        S = self.a.star
        sgn = -1 if (n * (n + 1) // 2) % 2 else 1
        return (_reverse_perm(self.D, n + 1) @ _kron_all([S] * (n + 1))).scale(sgn)

    def multiplication_kernels(self, n: int) -> Subspace:
        """Omega^n_u inside the tensor power as the intersection of the kernels of the m_k."""
        D = self.D
        mats = [kron(kron(_eye(D ** (k - 1)), self.a.mul), _eye(D ** (n - k))) for k in range(1, n + 1)]
        return intersect_kernels(mats, D ** (n + 1))

    # Lie operation ------------------------------------------------------

    @property
    def der(self) -> DerivationLie:
        if self._dl is None:
            self._dl = derivation_lie(self.a)
        return self._dl

    def contraction(self, X: ExactMatrix, n: int) -> ExactMatrix:
        """i_X(a0 da1..dan) = sum_k (-1)^(k-1) a0 da1..X(ak)..dan from degree n to n-1."""
        out = ExactMatrix.zeros(self.dims[n - 1], self.dims[n])
        for k in range(1, n + 1):
            R = self.right_mats(k - 1)
            T = ExactMatrix.zeros(self.dims[k - 1], self.dims[k])
            for j, c in enumerate(self.cols):
                Rx = _combo(R, X.col_matrix(c), self.dims[k - 1], self.dims[k - 1])
                T = T + Rx @ kron(_eye(self.dims[k - 1]), _basis_row(self.ab, j))
            out = out + kron(T, _eye(self.ab ** (n - k))).scale(-1 if (k - 1) % 2 else 1)
        return out

    @property
    def operation(self) -> OperationData:
        if self._op is None:
            dl = self.der
            i = [[None] + [self.contraction(X, n) for n in range(1, self.N + 1)] for X in dl.mats]
            self._op = OperationData(dl.lie, i)
        return self._op

    def __repr__(self):
        return f"UniversalCalculus(dim A={self.D}, dims={self.dims})"


def omega_u(a: FiniteAlgebra, max_degree: int) -> UniversalCalculus:
    return UniversalCalculus(a, max_degree)


def omega1_u(a: FiniteAlgebra) -> tuple[Bimodule, ExactMatrix]:
    """Omega^1_u as the kernel of multiplication in A (x) A, with d_u(x) = 1 (x) x - x (x) 1."""
    D = a.dim
    ker = kernel(a.mul) if D else Subspace(0)
    from .algebra import outer_bimodule
    m = sub_bimodule(outer_bimodule(a), ker)
    u = a.unit_vec
    du = ExactMatrix.hstack([kron(u, a.basis_vec(i)) - kron(a.basis_vec(i), u) for i in range(D)], rows=D * D)
    coords = solve(ker.matrix, du) if ker.dim else ExactMatrix.zeros(0, D)
    if coords is None:
        raise StructuralError("d_u(x) is not in the kernel of multiplication")
    for i in range(D):
        for j in range(D):
            lhs = coords @ a.mul.col_matrix(i * D + j)
            rhs = m.left[i] @ coords.col_matrix(j) + m.right[j] @ coords.col_matrix(i)
            if lhs != rhs:
                raise StructuralError("d_u violates the Leibniz rule")
    return m, coords


def contraction_check(u: UniversalCalculus, upto: int) -> dict:
    """kd + dk = I on degrees 1..upto (needs max_degree > upto) in the model and in the tensor model."""
    from .complexes import CochainComplex, verify_homotopy_report
    if u.N <= upto:
        raise ValueError("max_degree must exceed the checked range")
    c = CochainComplex(u.dims, u.d)
    k = [None] + [u.homotopy(n) for n in range(1, u.N + 1)]
    model = verify_homotopy_report(c, k, 1)
    return model


# ----------------------------------------------------------------------
# ideals and quotient calculi
# ----------------------------------------------------------------------

def _closure(u: UniversalCalculus, n: int, vecs: Subspace) -> Subspace:
    if vecs.dim == 0:
        return vecs
    a = u.a
    mats = [u.left_of(n, a.basis_vec(i)) for i in range(u.D)] + u.right_mats(n)
    cur = vecs
    while True:
        new = _hspan(u.dims[n], [cur.matrix] + [m @ cur.matrix for m in mats])
        if new.dim == cur.dim:
            return cur
        cur = new


def ideal_slices(u: UniversalCalculus, gens: Subspace) -> list[Subspace]:
    """Slices of the two-sided ideal generated by gens in degree 1 and by d(gens)."""
    out = [Subspace(u.dims[0])]
    cur = _closure(u, 1, gens)
    out.append(cur)
    for n in range(2, u.N + 1):
        parts = []
        if cur.dim:
            for j, c in enumerate(u.cols):
                dx = u.dvec(u.a.basis_vec(c))
                parts.append(u.left_d_mult(u.a.basis_vec(c), n - 1) @ cur.matrix)
                parts.append(u.product(n - 1, 1) @ kron(cur.matrix, dx))
        if n == 2 and out[1].dim:
            parts.append(u.d[1] @ out[1].matrix)
        cur = _closure(u, n, _hspan(u.dims[n], parts))
        out.append(cur)
    return out


@dataclass
class QuotientCalculus:
    base: UniversalCalculus
    kind: str
    killed: list[Subspace]
    quotient: QuotientGDA

    @property
    def gda(self) -> GradedDiffAlgebra:
        return self.quotient.gda

    @property
    def dims(self) -> list[int]:
        return self.gda.dims

    @property
    def project(self) -> list[ExactMatrix]:
        return self.quotient.project

    @property
    def section(self) -> list[ExactMatrix]:
        return self.quotient.section

    def operation(self) -> OperationData:
        return quotient_operation(self.base.operation, self.quotient, self.base.dims)


def _quotient_calculus(u: UniversalCalculus, gens: Subspace, kind: str) -> QuotientCalculus:
    killed = ideal_slices(u, gens)
    q = quotient_gda(u.gda, killed, name=f"Omega_{kind}")
    return QuotientCalculus(u, kind, killed, q)


def central_generators(u: UniversalCalculus) -> Subspace:
    """[Z(A), Omega^1_u] inside Omega^1_u."""
    z = center(u.a)
    mats = []
    for k in range(z.dim):
        zk = z.matrix.col_matrix(k)
        mats.append(u.left_of(1, zk) - u.right_of(1, zk))
    return _hspan(u.dims[1], mats)


def omega_Z(a: FiniteAlgebra | UniversalCalculus, max_degree: int | None = None) -> QuotientCalculus:
    u = a if isinstance(a, UniversalCalculus) else UniversalCalculus(a, max_degree)
    return _quotient_calculus(u, central_generators(u), "Z")


def omega_diag(a: FiniteAlgebra | UniversalCalculus, max_degree: int | None = None) -> QuotientCalculus:
    u = a if isinstance(a, UniversalCalculus) else UniversalCalculus(a, max_degree)
    return _quotient_calculus(u, bidual_kernel(u.bimodule(1)), "Diag")


def is_graded_commutative(g: GradedDiffAlgebra, upto: int | None = None) -> bool:
    from .complexes import swap_matrix
    N = g.max_degree if upto is None else upto
    for p in range(N + 1):
        for q in range(N + 1 - p):
            lhs = g.product(p, q)
            rhs = (g.product(q, p) @ swap_matrix(g.dims[p], g.dims[q])).scale((-1) ** (p * q))
            if lhs != rhs:
                return False
    return True


# ----------------------------------------------------------------------
# Kahler differentials, independently
# ----------------------------------------------------------------------

def kahler_exterior_dims(a: FiniteAlgebra, upto: int) -> list[int]:
    """Dimensions of the exterior powers over A of the Kahler module, from its presentation
    as the free module on symbols de_i modulo d(e_i e_j) - e_i de_j - e_j de_i."""
    if not a.is_commutative():
        raise ValueError("Kahler differentials need a commutative algebra")
    D = a.dim
    L = a.left_mats()
    # free module A^D: coefficient of de_i at i*D + v
    rels = []
    for i in range(D):
        for j in range(D):
            v = ExactMatrix.zeros(D * D, 1)
            for k, c in a.table.get((i, j), []):
                v = v + kron(ExactMatrix.column([ONE if t == k else 0 for t in range(D)]), a.unit_vec).scale(c)
            v = v - kron(a.basis_vec(j), a.basis_vec(i)) - kron(a.basis_vec(i), a.basis_vec(j))
            rels.append(v)
    R1 = _module_closure(span(ExactMatrix.hstack(rels)), [kron(_eye(D), m) for m in L])
    dims = [D]
    for n in range(1, upto + 1):
        if n > D:
            dims.append(0)
            continue
        tgt = {m: k for k, m in enumerate(exterior_basis(D, n))}
        size = len(tgt) * D
        vecs = []
        for r in range(R1.dim):
            rv = R1.matrix.col_matrix(r)
            for J in exterior_basis(D, n - 1):
                ent = {}
                for i in range(D):
                    ws = wedge_sort((i,) + J)
                    if ws is None:
                        continue
                    s, key = ws
                    for v in range(D):
                        x = rv[i * D + v, 0]
                        if x:
                            ent[(tgt[key] * D + v, 0)] = ent.get((tgt[key] * D + v, 0), QI(0)) + x * s
                vecs.append(ExactMatrix.from_dict(size, 1, {k: x for k, x in ent.items() if x}))
        Rn = _module_closure(_hspan(size, vecs), [kron(_eye(len(tgt)), m) for m in L])
        dims.append(size - Rn.dim)
    return dims


def _module_closure(sub: Subspace, mats: list[ExactMatrix]) -> Subspace:
    cur = sub
    while cur.dim:
        new = _hspan(cur.ambient_dim, [cur.matrix] + [m @ cur.matrix for m in mats])
        if new.dim == cur.dim:
            break
        cur = new
    return cur


@dataclass
class KahlerReport:
    omega_z_dims: list[int]
    kahler_dims: list[int]
    graded_commutative: bool

    @property
    def ok(self) -> bool:
        return self.omega_z_dims == self.kahler_dims and self.graded_commutative


def kahler_report(a: FiniteAlgebra, upto: int) -> KahlerReport:
    if not a.is_commutative():
        raise ValueError("Kahler differentials need a commutative algebra")
    qz = omega_Z(a, max(upto, 1))
    zd = qz.dims[:upto + 1]
    return KahlerReport(zd, kahler_exterior_dims(a, upto), is_graded_commutative(qz.gda, upto))


def kahler_check(a: FiniteAlgebra, upto: int) -> bool:
    return kahler_report(a, upto).ok


# ----------------------------------------------------------------------
# A-duality, biduals, central and diagonal bimodules
# ----------------------------------------------------------------------

@dataclass
class ZModule:
    """A module over the center: center_basis holds Z(A) basis vectors in A, action[k] acts by the k-th."""
    algebra: FiniteAlgebra
    center_basis: ExactMatrix
    dim: int
    action: list[ExactMatrix]


@dataclass
class ADual:
    """Bimodule homomorphisms M -> A; maps[k] is the dim A x dim M matrix of the k-th basis map."""
    module: Bimodule
    space: Subspace
    maps: list[ExactMatrix]
    zmodule: ZModule

    @property
    def dim(self) -> int:
        return self.space.dim


def _unvec(v: ExactMatrix, rows: int, cols: int) -> ExactMatrix:
    return ExactMatrix.from_dict(rows, cols, {divmod(k, cols): x for k, _, x in v.nonzeros()})


def a_dual(m: Bimodule) -> ADual:
    a = m.left_algebra
    D, k = a.dim, m.dim
    L, R = a.left_mats(), a.right_mats()
    cons = []
    for i in range(D):
        cons.append(kron(_eye(D), m.left[i].T) - kron(L[i], _eye(k)))
        cons.append(kron(_eye(D), m.right[i].T) - kron(R[i], _eye(k)))
    sp = kernel(ExactMatrix.vstack(cons, cols=D * k)) if cons else Subspace.full(D * k)
    maps = [_unvec(sp.matrix.col_matrix(t), D, k) for t in range(sp.dim)]
    z = center(a)
    action = []
    for t in range(z.dim):
        Lz = a.left_of(z.matrix.col_matrix(t))
        action.append(_coords_in(sp, kron(Lz, _eye(k)) @ sp.matrix))
    return ADual(m, sp, maps, ZModule(a, z.matrix, sp.dim, action))


def _coords_in(sp: Subspace, m: ExactMatrix) -> ExactMatrix:
    if sp.dim == 0:
        return ExactMatrix.zeros(0, m.cols)
    c = solve(sp.matrix, m)
    if c is None:
        raise StructuralError("image leaves the solution space")
    return c


def z_dual(n: ZModule) -> tuple[Bimodule, Subspace]:
    """Z(A)-linear maps N -> A with (a psi b)(x) = a psi(x) b; psi is a dim A x dim N matrix."""
    a = n.algebra
    D, k = a.dim, n.dim
    cons = []
    for t, act in enumerate(n.action):
        Lz = a.left_of(n.center_basis.col_matrix(t))
        cons.append(kron(_eye(D), act.T) - kron(Lz, _eye(k)))
    sp = kernel(ExactMatrix.vstack(cons, cols=D * k)) if cons and D * k else Subspace.full(D * k)
    left = [_coords_in(sp, kron(m, _eye(k)) @ sp.matrix) for m in a.left_mats()]
    right = [_coords_in(sp, kron(m, _eye(k)) @ sp.matrix) for m in a.right_mats()]
    return Bimodule(a, a, sp.dim, left, right), sp


def center_module(a: FiniteAlgebra) -> ZModule:
    z = center(a)
    action = [_coords_in(z, a.left_of(z.matrix.col_matrix(t)) @ z.matrix) for t in range(z.dim)]
    return ZModule(a, z.matrix, z.dim, action)


@dataclass
class Bidual:
    dual: ADual
    module: Bimodule
    space: Subspace
    c: ExactMatrix

    @property
    def injective(self) -> bool:
        return rank(self.c) == self.dual.module.dim


def bidual_map(m: Bimodule) -> Bidual:
    """M** = Z-linear maps M* -> A and the evaluation map c(x)(phi) = phi(x)."""
    dual = a_dual(m)
    mod, sp = z_dual(dual.zmodule)
    D, K = m.left_algebra.dim, dual.dim
    cols = []
    for x in range(m.dim):
        ent = {}
        for k, phi in enumerate(dual.maps):
            for r, _, v in phi.col_matrix(x).nonzeros():
                ent[(r * K + k, 0)] = v
        cols.append(ExactMatrix.from_dict(D * K, 1, ent))
    c = _coords_in(sp, ExactMatrix.hstack(cols, rows=D * K)) if m.dim else ExactMatrix.zeros(sp.dim, 0)
    for i in range(D):
        if c @ m.left[i] != mod.left[i] @ c or c @ m.right[i] != mod.right[i] @ c:
            raise StructuralError("evaluation map is not a bimodule homomorphism")
    return Bidual(dual, mod, sp, c)


def bidual_kernel(m: Bimodule) -> Subspace:
    """ker c: the common kernel of all bimodule homomorphisms M -> A."""
    dual = a_dual(m)
    if dual.dim == 0:
        return Subspace.full(m.dim)
    return kernel(ExactMatrix.vstack(dual.maps, cols=m.dim))


def diagonal_test(m: Bimodule) -> bool:
    return bidual_kernel(m).dim == 0


def is_central(m: Bimodule) -> bool:
    a = m.left_algebra
    z = center(a)
    return all(m.left_of(z.matrix.col_matrix(t)) == m.right_of(z.matrix.col_matrix(t)) for t in range(z.dim))


@dataclass
class Centralization:
    quotient: Bimodule          # E_Z = E / [Z, E]
    sub: Bimodule               # E^Z, the biggest central sub-bimodule
    commutators: Subspace
    fixed: Subspace


def centralize(m: Bimodule) -> Centralization:
    a = m.left_algebra
    z = center(a)
    diffs = [m.left_of(z.matrix.col_matrix(t)) - m.right_of(z.matrix.col_matrix(t)) for t in range(z.dim)]
    comm = _hspan(m.dim, diffs)
    fixed = intersect_kernels(diffs, m.dim)
    q, _, _ = quotient_bimodule(m, comm)
    s = sub_bimodule(m, fixed)
    return Centralization(q, s, comm, fixed)


# ----------------------------------------------------------------------
# derivation-based calculus
# ----------------------------------------------------------------------

class DerCalculus:
    """C_wedge(Der A, A) truncated at max_degree, its Z(A)-multilinear part and the
    subalgebra Omega_Der generated by A."""

    def __init__(self, a: FiniteAlgebra, max_degree: int, basis: list[ExactMatrix] | None = None):
        self.a = a
        self.N = max_degree
        self.der = derivation_lie(a, basis)
        self.r = self.der.lie.dim
        D = a.dim
        self.D = D
        self.module = LieModule(self.der.lie, D, self.der.mats)
        self.dims = [comb(self.r, n) * D for n in range(max_degree + 1)]
        self.d = [ce_differential(self.der.lie, self.module, n) for n in range(max_degree)]
        star = None
        if a.star is not None:
            star = [self._star(n) for n in range(max_degree + 1)]
        self.full = GradedDiffAlgebra(self.dims, self.d, self._product, a.unit_vec, star, name="C(Der,A)")

    @cached_property
    def underline_spaces(self) -> list[Subspace]:
        return [self._underline(n) for n in range(self.N + 1)]

    @cached_property
    def omega_spaces(self) -> list[Subspace]:
        spaces = [Subspace.full(self.D)]
        for n in range(1, self.N + 1):
            prev = spaces[-1]
            img = (self.full.product(n - 1, 1) @ kron(prev.matrix, self.d[0]) if prev.dim
                   else ExactMatrix.zeros(self.dims[n], 0))
            spaces.append(_span_cols(self.dims[n], img))
        return spaces

    @cached_property
    def underline(self) -> GradedDiffAlgebra:
        return sub_gda(self.full, self.underline_spaces, "underline Omega_Der")

    @cached_property
    def omega(self) -> GradedDiffAlgebra:
        return sub_gda(self.full, self.omega_spaces, "Omega_Der")

    def _product(self, p: int, q: int) -> ExactMatrix:
        a, D, r = self.a, self.D, self.r
        bp, bq = exterior_basis(r, p), exterior_basis(r, q)
        tgt = {m: k for k, m in enumerate(exterior_basis(r, p + q))}
        dq = len(bq) * D
        ent = {}
        for i, I in enumerate(bp):
            for j, J in enumerate(bq):
                ws = wedge_sort(I + J)
                if ws is None:
                    continue
                s, key = ws
                for (v, w), terms in a.table.items():
                    for k, c in terms:
                        kk = (tgt[key] * D + k, (i * D + v) * dq + j * D + w)
                        ent[kk] = ent.get(kk, QI(0)) + c * s
        return ExactMatrix.from_dict(self.dims[p + q], self.dims[p] * self.dims[q],
                                     {k: v for k, v in ent.items() if v})

    def _star(self, n: int) -> ExactMatrix:
        """omega*(X1..Xn) = (omega(X1*,..,Xn*))*."""
        a, D, r = self.a, self.D, self.r
        Nm = ExactMatrix.hstack([derivation_coords(self.der, derivation_star(a, X)) for X in self.der.mats],
                                rows=r) if r else ExactMatrix.zeros(0, 0)
        basis = exterior_basis(r, n)
        S = a.star
        ent = {}
        for ci, I in enumerate(basis):
            for rj, J in enumerate(basis):
                det = _det(Nm.submatrix(I, J)) if n else QI(1)
                if not det:
                    continue
                det = det.conj()
                for v, w, s in S.nonzeros():
                    ent[(rj * D + v, ci * D + w)] = det * s
        return ExactMatrix.from_dict(self.dims[n], self.dims[n], ent)

    def _underline(self, n: int) -> Subspace:
        """Alternating maps that are Z(A)-linear in the first (hence every) argument."""
        a, D, r = self.a, self.D, self.r
        if n == 0:
            return Subspace.full(D)
        z = center(a)
        idx = {m: k for k, m in enumerate(exterior_basis(r, n))}
        rows = []
        for t in range(z.dim):
            zt = z.matrix.col_matrix(t)
            Lz = a.left_of(zt)
            Mz = [derivation_coords(self.der, Lz @ X) for X in self.der.mats]
            for al in range(r):
                for J in exterior_basis(r, n - 1):
                    # omega(z X_al, X_J) - z omega(X_al, X_J) = 0
                    blk = {}
                    for c, _, v in Mz[al].nonzeros():
                        ws = wedge_sort((c,) + J)
                        if ws is None:
                            continue
                        s, key = ws
                        for x in range(D):
                            blk[(x, idx[key] * D + x)] = blk.get((x, idx[key] * D + x), QI(0)) + v * s
                    ws = wedge_sort((al,) + J)
                    if ws is not None:
                        s, key = ws
                        for x, y, v in Lz.nonzeros():
                            blk[(x, idx[key] * D + y)] = blk.get((x, idx[key] * D + y), QI(0)) - v * s
                    rows.append(ExactMatrix.from_dict(D, self.dims[n], {k: v for k, v in blk.items() if v}))
        if not rows:
            return Subspace.full(self.dims[n])
        return kernel(ExactMatrix.vstack(rows, cols=self.dims[n]))

    def insertion(self, al: int, n: int) -> ExactMatrix:
        """i_X omega(X1..) = omega(X, X1, ..) on C^n -> C^(n-1)."""
        r, D = self.r, self.D
        src = exterior_basis(r, n)
        tgt = {m: k for k, m in enumerate(exterior_basis(r, n - 1))}
        ent = {}
        for ci, I in enumerate(src):
            if al in I:
                pos = I.index(al)
                rest = I[:pos] + I[pos + 1:]
                for v in range(D):
                    ent[(tgt[rest] * D + v, ci * D + v)] = QI(-1 if pos % 2 else 1)
        return ExactMatrix.from_dict(self.dims[n - 1], self.dims[n], ent)

    def full_operation(self) -> OperationData:
        return OperationData(self.der.lie, [[None] + [self.insertion(al, n) for n in range(1, self.N + 1)]
                                            for al in range(self.r)])

    def omega_operation(self) -> OperationData:
        return restrict_operation(self.full_operation(), self.omega_spaces)

    def underline_operation(self) -> OperationData:
        return restrict_operation(self.full_operation(), self.underline_spaces)

    def surjection(self, u: UniversalCalculus) -> list[ExactMatrix]:
        """a0 da1..dan -> a0 da1..dan in C_wedge, for every degree up to max_degree."""
        phi = [_eye(self.D)]
        dA = self.d[0] @ u.incl if self.N else None
        for n in range(1, self.N + 1):
            phi.append(self.full.product(n - 1, 1) @ kron(phi[-1], dA))
        return phi

    def surjection_coords(self, u: UniversalCalculus) -> list[ExactMatrix]:
        return [_coords_in(self.omega_spaces[n], f) for n, f in enumerate(self.surjection(u))]


def _det(m: ExactMatrix) -> QI:
    n = m.rows
    if n == 0:
        return QI(1)
    rows = [list(r) for r in m.entries()]
    det = QI(1)
    for c in range(n):
        p = next((r for r in range(c, n) if rows[r][c]), None)
        if p is None:
            return QI(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            det = -det
        det = det * rows[c][c]
        for r in range(c + 1, n):
            f = rows[r][c] / rows[c][c]
            if f:
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return det


def der_calculus(a: FiniteAlgebra, max_degree: int, basis: list[ExactMatrix] | None = None) -> DerCalculus:
    return DerCalculus(a, max_degree, basis)


def canonical_operation(calc) -> OperationData:
    if isinstance(calc, UniversalCalculus):
        return calc.operation
    if isinstance(calc, QuotientCalculus):
        return calc.operation()
    if isinstance(calc, DerCalculus):
        return calc.omega_operation()
    raise TypeError("unknown calculus")


# ----------------------------------------------------------------------
# universal properties
# ----------------------------------------------------------------------

@dataclass
class Factorization:
    mode: str
    map: ExactMatrix               # on Omega^1_mode
    universal_map: ExactMatrix     # on Omega^1_u
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v for v in self.checks.values() if v is not None)


def is_leibniz(a: FiniteAlgebra, target: Bimodule, dmat: ExactMatrix) -> bool:
    D = a.dim
    for i in range(D):
        for j in range(D):
            lhs = dmat @ a.mul.col_matrix(i * D + j)
            rhs = target.left[i] @ dmat.col_matrix(j) + target.right[j] @ dmat.col_matrix(i)
            if lhs != rhs:
                return False
    return True


def factor_derivation(a: FiniteAlgebra, target: Bimodule, dmat: ExactMatrix, mode: str = "u",
                      u: UniversalCalculus | None = None, quotient: QuotientCalculus | None = None) -> Factorization:
    """The bimodule map i_d on Omega^1_mode with d = i_d o d_mode."""
    if not is_leibniz(a, target, dmat):
        raise ValueError("the map violates the Leibniz rule")
    if mode == "Z" and not is_central(target):
        raise ValueError("target bimodule is not central")
    if mode == "Diag" and not diagonal_test(target):
        raise ValueError("target bimodule is not diagonal")
    if mode not in ("u", "Z", "Diag"):
        raise ValueError(f"unknown mode {mode}")
    u = u if u is not None else UniversalCalculus(a, 1)
    D, ab = a.dim, u.ab
    dc = dmat @ u.incl
    iu = ExactMatrix.zeros(target.dim, u.dims[1])
    for a0 in range(D):
        iu = iu + target.left[a0] @ dc @ kron(_basis_row(D, a0), _eye(ab))
    checks = {
        "factorizes": iu @ u.d[0] == dmat,
        "left_linear": all(iu @ u.left_of(1, a.basis_vec(i)) == target.left[i] @ iu for i in range(D)),
        "right_linear": all(iu @ u.right_mats(1)[i] == target.right[i] @ iu for i in range(D)),
        "generated_by_d": rank(ExactMatrix.hstack([u.left_of(1, a.basis_vec(i)) @ u.d[0] for i in range(D)],
                                                  rows=u.dims[1])) == u.dims[1],
    }
    if mode == "u":
        return Factorization(mode, iu, iu, checks)
    if quotient is None:
        quotient = omega_Z(u) if mode == "Z" else omega_diag(u)
    killed = quotient.killed[1]
    checks["kills_ideal"] = (iu @ killed.matrix).is_zero() if killed.dim else True
    im = iu @ quotient.section[1]
    dq = quotient.project[1] @ u.d[0]
    checks["factorizes_quotient"] = im @ dq == dmat
    return Factorization(mode, im, iu, checks)


def tensor_extension(a: FiniteAlgebra, target: Bimodule, iu: ExactMatrix,
                     u: UniversalCalculus) -> ExactMatrix | None:
    """m0 with x (x) y -> x m0 y extending iu from Omega^1_u to A (x) A, or None."""
    D = a.dim
    io = u.iota(1)
    blocks = []
    for col in range(u.dims[1]):
        M = ExactMatrix.zeros(target.dim, target.dim)
        for k, _, v in io.col_matrix(col).nonzeros():
            x, y = divmod(k, D)
            M = M + (target.left[x] @ target.right[y]).scale(v)
        blocks.append(M)
    if not blocks:
        return ExactMatrix.zeros(target.dim, 1)
    return solve(ExactMatrix.vstack(blocks, cols=target.dim), _stack_cols(iu))


def _stack_cols(m: ExactMatrix) -> ExactMatrix:
    """Columns of m stacked into one column."""
    return ExactMatrix.vstack([m.col_matrix(j) for j in range(m.cols)], cols=1)


def inner_element(a: FiniteAlgebra, target: Bimodule, dmat: ExactMatrix) -> ExactMatrix | None:
    """m with d(x) = x m - m x, or None if d is not inner."""
    D = a.dim
    mats = [target.left[i] - target.right[i] for i in range(D)]
    return solve(ExactMatrix.vstack(mats, cols=target.dim), _stack_cols(dmat))


@dataclass
class CocycleFactorization:
    map: ExactMatrix
    checks: dict
    coboundary_flag: bool
    coboundary_cross_check: bool

    @property
    def ok(self) -> bool:
        return all(self.checks.values()) and self.coboundary_flag == self.coboundary_cross_check


def factor_cocycle(a: FiniteAlgebra, m: Bimodule, c: Cochain, u: UniversalCalculus | None = None) -> CocycleFactorization:
    n = c.degree
    D = a.dim
    if n < 1:
        raise ValueError("cocycle degree must be at least 1")
    for k in range(n):
        if not (unit_insertion(a, m.dim, n, k) @ c.vec).is_zero():
            raise ValueError("cochain is not normalized")
    if not (hochschild_matrix(a, m, n) @ c.vec).is_zero():
        raise ValueError("cochain is not a cocycle")
    u = u if u is not None and u.N >= n else UniversalCalculus(a, n)
    ab = u.ab
    cm = c.as_matrix()
    # values on the Abar lifts e_c[j]
    from .hochschild import flat
    from itertools import product as iproduct
    cv = ExactMatrix.hstack([cm.col_matrix(flat([u.cols[j] for j in J], D)) for J in iproduct(range(ab), repeat=n)],
                            rows=m.dim) if ab else ExactMatrix.zeros(m.dim, 0)
    ic = ExactMatrix.zeros(m.dim, u.dims[n])
    for a0 in range(D):
        ic = ic + m.left[a0] @ cv @ kron(_basis_row(D, a0), _eye(ab ** n))
    checks = {
        "reproduces": ic @ u.d_products(n) == cm,
        "left_linear": all(ic @ u.left_of(n, a.basis_vec(i)) == m.left[i] @ ic for i in range(D)),
        "right_linear": all(ic @ u.right_mats(n)[i] == m.right[i] @ ic for i in range(D)),
    }
    # extension to A (x) Omega^(n-1): right-linear phi with ic(da eta) = phi(a eta) - a phi(eta)
    dp = u.dims[n - 1]
    k = m.dim
    rows, rhs = [], []
    for i in range(D):
        rows.append(kron(_eye(k), u.right_mats(n - 1)[i].T) - kron(m.right[i], _eye(dp)))
        rhs.append(ExactMatrix.zeros(k * dp, 1))
    for j, cj in enumerate(u.cols):
        x = a.basis_vec(cj)
        lhs = ic @ u.left_d_mult(x, n - 1)
        rows.append(kron(_eye(k), u.left_of(n - 1, x).T) - kron(m.left_of(x), _eye(dp)))
        rhs.append(mat_vec(lhs))
    flag = solve(ExactMatrix.vstack(rows, cols=k * dp), ExactMatrix.vstack(rhs, cols=1)) is not None
    # independent route: c = d_H of a normalized (n-1)-cochain
    norm = normalized_spaces(a, k, n - 1)[n - 1]
    img = hochschild_matrix(a, m, n - 1) @ norm.matrix if norm.dim else ExactMatrix.zeros(c.vec.rows, 0)
    cross = c.vec.is_zero() or (img.cols > 0 and solve(img, c.vec) is not None)
    return CocycleFactorization(ic, checks, flag, cross)


# ----------------------------------------------------------------------
# functoriality and the diagram of calculi
# ----------------------------------------------------------------------

def induced_map(phi: ExactMatrix, src: UniversalCalculus, tgt: UniversalCalculus, n: int) -> ExactMatrix:
    """Omega^n_u(phi): a0 da1..dan -> phi(a0) d phi(a1)..d phi(an)."""
    if n == 0:
        return phi
    V1 = tgt.d[0] @ phi @ src.incl
    V = V1
    for k in range(1, n):
        V = tgt.product(k, 1) @ kron(V, V1)
    return tgt.product(0, n) @ kron(phi, V)


@dataclass
class DiagramReport:
    dims: dict
    maps: dict
    commutes: dict
    well_defined: dict

    @property
    def ok(self) -> bool:
        maps_ok = all(r.homomorphism and all(r.surjective) and r.operation is not False
                      for r in self.maps.values())
        return maps_ok and all(self.commutes.values()) and all(self.well_defined.values())

    def to_dict(self) -> dict:
        return {"dims": self.dims, "maps": {k: v.to_dict() for k, v in self.maps.items()},
                "commutes": self.commutes, "well_defined": self.well_defined, "ok": self.ok}


def diagram_check(a: FiniteAlgebra, upto: int) -> DiagramReport:
    u = UniversalCalculus(a, upto)
    qz = omega_Z(u)
    qd = omega_diag(u)
    dc = DerCalculus(a, upto)
    N = upto
    phi = dc.surjection(u)
    phic = [_coords_in(dc.omega_spaces[n], phi[n]) for n in range(N + 1)]
    well = {
        "Z_to_Diag": all((qd.project[n] @ qz.killed[n].matrix).is_zero() for n in range(N + 1) if qz.killed[n].dim),
        "Z_to_Der": all((phi[n] @ qz.killed[n].matrix).is_zero() for n in range(N + 1) if qz.killed[n].dim),
        "Diag_to_Der": all((phi[n] @ qd.killed[n].matrix).is_zero() for n in range(N + 1) if qd.killed[n].dim),
    }
    f = {
        "u_to_Z": qz.project,
        "u_to_Diag": qd.project,
        "u_to_Der": phic,
        "Z_to_Diag": [qd.project[n] @ qz.section[n] for n in range(N + 1)],
        "Z_to_Der": [phic[n] @ qz.section[n] for n in range(N + 1)],
        "Diag_to_Der": [phic[n] @ qd.section[n] for n in range(N + 1)],
    }
    gd = {"u": u.gda, "Z": qz.gda, "Diag": qd.gda, "Der": dc.omega}
    ops = {"u": u.operation, "Z": qz.operation(), "Diag": qd.operation(), "Der": dc.omega_operation()}
    maps = {}
    for name, mats in f.items():
        s, t = name.split("_to_")
        maps[name] = check_gda_map(mats, gd[s], gd[t], ops[s], ops[t])
    comm = {
        "u_Z_Diag": all(f["Z_to_Diag"][n] @ qz.project[n] == qd.project[n] for n in range(N + 1)),
        "u_Z_Der": all(f["Z_to_Der"][n] @ qz.project[n] == phic[n] for n in range(N + 1)),
        "u_Diag_Der": all(f["Diag_to_Der"][n] @ qd.project[n] == phic[n] for n in range(N + 1)),
        "Z_Diag_Der": all(f["Diag_to_Der"][n] @ f["Z_to_Diag"][n] == f["Z_to_Der"][n] for n in range(N + 1)),
    }
    dims = {"u": u.dims, "Z": qz.dims, "Diag": qd.dims, "Der": dc.omega.dims,
            "underline_Der": dc.underline.dims}
    return DiagramReport(dims, maps, comm, well)
