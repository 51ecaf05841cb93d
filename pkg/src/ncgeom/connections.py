"""Connections, hermitian structures, first-order operators and the symplectic
structure of M_n(C), computed exactly over Q(i).

Elements of C_wedge(Der, A) use the layout of ``DerCalculus``: the basis index
of (I, v) is position(I) * dim A + v.  Matrices act on row-major vectorizations,
so vec(X M Y) = kron(X, Y^T) vec(M).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .algebra import (Bimodule, FiniteAlgebra, center, derivation_star, exterior_basis, mat_vec,
                      matrix_algebra, matrix_to_vec, tensor_over, vec_to_matrix)
from .calculi import (DerCalculus, DerivationLie, UniversalCalculus, _det, derivation_coords,
                      is_central)
from .complexes import GradedDiffAlgebra
from .exact import QI, ExactMatrix, Subspace, block_diag, charpoly_coeffs, kernel, kron, rank, solve, span

I_ = QI(0, 1)


def _eye(n: int) -> ExactMatrix:
    return ExactMatrix.identity(n)


def _unit(n: int, i: int) -> ExactMatrix:
    return ExactMatrix.from_dict(n, 1, {(i, 0): 1})


def _trace(m: ExactMatrix) -> QI:
    t = QI(0)
    for i in range(m.rows):
        t = t + m[i, i]
    return t


def _comm(x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
    return x @ y - y @ x


def exact_matrix(m) -> ExactMatrix:
    """Coerce nested rows of exact scalars; floats are rejected as possibly irrational."""
    if isinstance(m, ExactMatrix):
        return m
    rows = [list(r) for r in m]
    for r in rows:
        for v in r:
            if isinstance(v, float) or (isinstance(v, complex) and not (v.real.is_integer() and v.imag.is_integer())):
                raise ValueError("irrational basis: entries must be exact Gaussian rationals")
    return ExactMatrix.from_rows([[QI(v) if isinstance(v, complex) else v for v in r] for r in rows])


def left_mul(x: ExactMatrix) -> ExactMatrix:
    return kron(x, _eye(x.cols))


def right_mul(x: ExactMatrix, rows: int | None = None) -> ExactMatrix:
    """Matrix of M -> M x on row-major vectors of rows x n matrices."""
    return kron(_eye(x.rows if rows is None else rows), x.T)


def ad_i(e: ExactMatrix) -> ExactMatrix:
    """The derivation a -> i[e, a] of M_n on matrix-unit coordinates."""
    n = e.rows
    return (kron(e, _eye(n)) - kron(_eye(n), e.T)).scale(I_)


# ----------------------------------------------------------------------
# hermitian traceless bases
# ----------------------------------------------------------------------

def pauli() -> list[ExactMatrix]:
    return [ExactMatrix.from_rows([[0, 1], [1, 0]]),
            ExactMatrix.from_rows([[0, QI(0, -1)], [QI(0, 1), 0]]),
            ExactMatrix.from_rows([[1, 0], [0, -1]])]


def hermitian_basis(n: int) -> list[ExactMatrix]:
    """Trace-orthogonal rational basis of hermitian traceless n x n matrices.

    For n = 2 this is the Pauli basis.  For n >= 3 no basis with entries in Q(i)
    has tr(E_k E_l) = n delta_kl, so the diagonal generators keep their natural
    rational norms."""
    if n == 2:
        return pauli()
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            out.append(ExactMatrix.from_dict(n, n, {(i, j): 1, (j, i): 1}))
            out.append(ExactMatrix.from_dict(n, n, {(i, j): QI(0, -1), (j, i): QI(0, 1)}))
    for l in range(1, n):
        ent = {(k, k): 1 for k in range(l)}
        ent[(l, l)] = -l
        out.append(ExactMatrix.from_dict(n, n, ent))
    return out


def structure_constants(basis: list[ExactMatrix]) -> tuple[list, list, list]:
    """(g, S, C) with E_k E_l = g_kl 1 + (S^m_kl - (i/2) C^m_kl) E_m, indexed [k][l] and [m][k][l]."""
    n = basis[0].rows
    r = len(basis)
    B = ExactMatrix.hstack([matrix_to_vec(e) for e in basis])
    g = [[_trace(basis[k] @ basis[l]) / QI(n) for l in range(r)] for k in range(r)]
    S = [[[QI(0)] * r for _ in range(r)] for _ in range(r)]
    C = [[[QI(0)] * r for _ in range(r)] for _ in range(r)]
    for k in range(r):
        for l in range(r):
            sym = (basis[k] @ basis[l] + basis[l] @ basis[k]).scale(QI(1, 0) / 2) - _eye(n).scale(g[k][l])
            s = solve(B, matrix_to_vec(sym))
            # [E_k, E_l] = -i C^m E_m
            c = solve(B, matrix_to_vec(_comm(basis[k], basis[l]).scale(I_)))
            if s is None or c is None:
                raise ValueError("basis does not span the traceless matrices")
            for m in range(r):
                S[m][k][l] = s[m, 0]
                C[m][k][l] = c[m, 0]
    return g, S, C


def _check_basis(n: int, basis: list[ExactMatrix], normalized: bool):
    if len(basis) != n * n - 1:
        raise ValueError(f"need {n * n - 1} basis matrices")
    for e in basis:
        if e.shape != (n, n):
            raise ValueError("basis matrix has the wrong shape")
        if e.H != e:
            raise ValueError("basis matrix is not hermitian")
        if _trace(e):
            raise ValueError("basis matrix is not traceless")
    if rank(ExactMatrix.hstack([matrix_to_vec(e) for e in basis])) != len(basis):
        raise ValueError("basis matrices are linearly dependent")
    if normalized:
        for k, a in enumerate(basis):
            for l, b in enumerate(basis):
                if _trace(a @ b) != QI(n if k == l else 0):
                    raise ValueError("normalization failure: tr(E_k E_l) != n delta_kl")


# ----------------------------------------------------------------------
# the presentation of Omega_Der(M_n)
# ----------------------------------------------------------------------

@dataclass
class MnPresentation:
    n: int
    E: list[ExactMatrix]
    g: list
    S: list
    C: list
    calc: DerCalculus
    theta_k: list[ExactMatrix]
    theta: ExactMatrix
    normalized: bool
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {"n": self.n, "normalized": self.normalized, "checks": dict(self.checks)}


def _forms_vec(calc: DerCalculus, p: int, comps: dict) -> ExactMatrix:
    """Degree-p element from {sorted index tuple: D-vector}."""
    idx = {m: k for k, m in enumerate(exterior_basis(calc.r, p))}
    out = ExactMatrix.zeros(calc.dims[p], 1)
    for I, v in comps.items():
        sh = ExactMatrix.from_dict(calc.dims[p], calc.D, {(idx[I] * calc.D + x, x): 1 for x in range(calc.D)})
        out = out + sh @ v
    return out


def evaluate_form(calc: DerCalculus, p: int, w: ExactMatrix, coords: list[ExactMatrix]) -> ExactMatrix:
    """w(X1, .., Xp) for derivations given by coordinate columns in the Der basis."""
    if p == 0:
        return w
    cm = ExactMatrix.hstack(coords)
    out = ExactMatrix.zeros(calc.D, 1)
    for pos, I in enumerate(exterior_basis(calc.r, p)):
        det = _det(cm.submatrix(I, range(p)))
        if det:
            out = out + w.submatrix(range(pos * calc.D, (pos + 1) * calc.D), [0]).scale(det)
    return out


def mn_presentation(n: int, basis: list | None = None, normalized: bool = True,
                    seed: int = 0, samples: int = 5) -> MnPresentation:
    if n < 2:
        raise ValueError("n must be at least 2")
    basis = hermitian_basis(n) if basis is None else [exact_matrix(e) for e in basis]
    _check_basis(n, basis, normalized)
    a = matrix_algebra(n)
    D = n * n
    r = len(basis)
    calc = DerCalculus(a, 2, [ad_i(e) for e in basis])
    g, S, C = structure_constants(basis)
    P01, P10, P11 = calc.full.product(0, 1), calc.full.product(1, 0), calc.full.product(1, 1)
    one = a.unit_vec
    Ev = [matrix_to_vec(e) for e in basis]
    th = [_forms_vec(calc, 1, {(k,): one}) for k in range(r)]
    theta = ExactMatrix.zeros(calc.dims[1], 1)
    for k in range(r):
        theta = theta + P01 @ kron(Ev[k], th[k])
    ch = {}

    ch["constants_real"] = all(x.im == 0 for row in g for x in row) and all(
        x.im == 0 for blk in (S, C) for mat in blk for row in mat for x in row)
    ch["g_symmetric"] = all(g[k][l] == g[l][k] for k in range(r) for l in range(r))
    ok = True
    for k in range(r):
        for l in range(r):
            rhs = _eye(n).scale(g[k][l])
            for m in range(r):
                rhs = rhs + basis[m].scale(S[m][k][l] - I_ * C[m][k][l] / 2)
            ok &= basis[k] @ basis[l] == rhs
    ch["product_formula"] = ok
    lie = calc.der.lie
    ch["C_matches_derivation_bracket"] = all(
        lie.f(k, l, m) == C[m][k][l] for k in range(r) for l in range(r) for m in range(r))
    ch["theta_dual_basis"] = all(
        calc.insertion(l, 1) @ th[k] == (one if k == l else ExactMatrix.zeros(D, 1))
        for k in range(r) for l in range(r))
    ch["E_theta_commute"] = all(P01 @ kron(Ev[k], th[l]) == P10 @ kron(th[l], Ev[k])
                                for k in range(r) for l in range(r))
    ch["theta_anticommute"] = all(P11 @ kron(th[k], th[l]) == -(P11 @ kron(th[l], th[k]))
                                  for k in range(r) for l in range(r))
    ok = True
    for k in range(r):
        rhs = ExactMatrix.zeros(calc.dims[1], 1)
        for l in range(r):
            for m in range(r):
                if C[m][k][l]:
                    rhs = rhs - (P01 @ kron(Ev[m], th[l])).scale(C[m][k][l])
        ok &= calc.d[0] @ Ev[k] == rhs
    ch["dE"] = ok
    ok = True
    for k in range(r):
        rhs = ExactMatrix.zeros(calc.dims[2], 1)
        for l in range(r):
            for m in range(r):
                if C[k][l][m]:
                    rhs = rhs - (P11 @ kron(th[l], th[m])).scale(C[k][l][m] / 2)
        ok &= calc.d[1] @ th[k] == rhs
    ch["dtheta"] = ok
    # inverse formula theta^k = -(i/n^2) g^{lm} g^{kr} E_l E_r dE_m
    G = ExactMatrix.from_rows(g)
    Gi = solve(G, _eye(r))
    ok = Gi is not None
    if ok:
        dE = [calc.d[0] @ e for e in Ev]
        for k in range(r):
            acc = ExactMatrix.zeros(calc.dims[1], 1)
            for l in range(r):
                for m in range(r):
                    if not Gi[l, m]:
                        continue
                    for q in range(r):
                        if not Gi[k, q]:
                            continue
                        elr = matrix_to_vec(basis[l] @ basis[q])
                        acc = acc + (P01 @ kron(elr, dE[m])).scale(Gi[l, m] * Gi[k, q])
            ok &= acc.scale(-I_ / QI(n * n)) == th[k]
    ch["theta_inverse_formula"] = ok
    rng = random.Random(seed)
    ok = True
    for _ in range(samples):
        A = random_matrix(n, rng)
        X = derivation_coords(calc.der, ad_i(A))
        val = evaluate_form(calc, 1, theta, [X])
        ok &= val == matrix_to_vec(A - _eye(n).scale(_trace(A) / QI(n)))
    ch["theta_of_ad"] = ok
    op = calc.full_operation()
    ch["theta_invariant"] = all(op.lie_derivative(calc.full, al, 1) @ theta == ExactMatrix.zeros(calc.dims[1], 1)
                                for al in range(r))
    ok = True
    for v in range(D):
        M = _unit(D, v)
        ok &= calc.d[0] @ M == (P10 @ kron(theta, M) - P01 @ kron(M, theta)).scale(I_)
    ch["dM_commutator"] = ok
    mt = theta.scale(-I_)
    ch["maurer_cartan"] = (calc.d[1] @ mt + P11 @ kron(mt, mt)).is_zero()
    ch["theta_real"] = calc.full.star[1] @ theta.conj() == theta
    ch["theta_in_omega_der"] = all(calc.omega_spaces[1].contains(t) for t in th)
    return MnPresentation(n, basis, g, S, C, calc, th, theta, normalized, ch)


def random_matrix(n: int, rng: random.Random, lo: int = -3, hi: int = 3, cols: int | None = None) -> ExactMatrix:
    cols = n if cols is None else cols
    return ExactMatrix.from_rows([[QI(rng.randint(lo, hi), rng.randint(lo, hi)) for _ in range(cols)]
                                  for _ in range(n)])


def random_antihermitian(n: int, rng: random.Random, lo: int = -3, hi: int = 3) -> ExactMatrix:
    m = random_matrix(n, rng, lo, hi)
    return m - m.H


# ----------------------------------------------------------------------
# modules, connections and curvature
# ----------------------------------------------------------------------

@dataclass
class OneSidedModule:
    """A finite module over ``algebra``; ``action[i]`` is m -> e_i m (left) or m -> m e_i (right)."""
    algebra: FiniteAlgebra
    dim: int
    action: list[ExactMatrix]
    side: str

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        if len(self.action) != self.algebra.dim:
            raise ValueError("shape mismatch: one action matrix per algebra basis element")
        for m in self.action:
            if m.shape != (self.dim, self.dim):
                raise ValueError("shape mismatch in module action")

    def act(self, x: ExactMatrix) -> ExactMatrix:
        out = ExactMatrix.zeros(self.dim, self.dim)
        for i, _, v in x.nonzeros():
            out = out + self.action[i].scale(v)
        return out


def free_left_module(a: FiniteAlgebra, k: int = 1) -> OneSidedModule:
    return OneSidedModule(a, a.dim * k, [block_diag([m] * k) for m in a.left_mats()], "left")


def matrix_module(K: int, n: int) -> OneSidedModule:
    """K x n matrices with M_n acting on the right."""
    a = matrix_algebra(n)
    acts = [right_mul(vec_to_matrix(_unit(n * n, i), n), K) for i in range(n * n)]
    return OneSidedModule(a, K * n, acts, "right")


def _bimod_actions(g: GradedDiffAlgebra, p: int) -> tuple[list[ExactMatrix], list[ExactMatrix]]:
    D = g.dims[0]
    if p == 0:
        L = [g.product(0, 0) @ kron(_unit(D, i), _eye(D)) for i in range(D)]
        R = [g.product(0, 0) @ kron(_eye(D), _unit(D, i)) for i in range(D)]
        return L, R
    L = [g.product(0, p) @ kron(_unit(D, i), _eye(g.dims[p])) for i in range(D)]
    R = [g.product(p, 0) @ kron(_eye(g.dims[p]), _unit(D, i)) for i in range(D)]
    return L, R


def forms_bimodule(a: FiniteAlgebra, g: GradedDiffAlgebra, p: int) -> Bimodule:
    L, R = _bimod_actions(g, p)
    return Bimodule(a, a, g.dims[p], L, R)


@dataclass
class TwistedForms:
    """Omega^p (x)_A M (left modules) or M (x)_A Omega^p (right modules) as a quotient."""
    dim: int
    project: ExactMatrix
    section: ExactMatrix
    relators: Subspace
    action: list[ExactMatrix]


def twisted_forms(g: GradedDiffAlgebra, m: OneSidedModule, p: int) -> TwistedForms:
    from .exact import quotient_coords
    L, R = _bimod_actions(g, p)
    dp, dm = g.dims[p], m.dim
    if m.side == "left":
        rel = [kron(R[i], _eye(dm)) - kron(_eye(dp), m.action[i]) for i in range(len(L))]
    else:
        rel = [kron(m.action[i], _eye(dp)) - kron(_eye(dm), L[i]) for i in range(len(L))]
    relators = span(ExactMatrix.hstack(rel)) if dp * dm else Subspace(0)
    q, proj, sec = quotient_coords(dp * dm, relators)
    if m.side == "left":
        act = [proj @ kron(l, _eye(dm)) @ sec for l in L]
    else:
        act = [proj @ kron(_eye(dm), r) @ sec for r in R]
    return TwistedForms(q, proj, sec, relators, act)


@dataclass
class CurvatureReport:
    leibniz_ok: bool
    well_defined: bool
    curvature: ExactMatrix
    is_module_map: bool
    forms2: TwistedForms

    @property
    def flat(self) -> bool:
        return self.curvature.is_zero()


def _leibniz_residual(g: GradedDiffAlgebra, m: OneSidedModule, nabla: ExactMatrix, t1: TwistedForms) -> bool:
    L, R = _bimod_actions(g, 1)
    D, dm = g.dims[0], m.dim
    for i in range(D):
        de = g.d[0] @ _unit(D, i)
        if m.side == "left":
            rhs = kron(L[i], _eye(dm)) @ nabla + kron(de, _eye(dm))
        else:
            rhs = kron(_eye(dm), R[i]) @ nabla + kron(_eye(dm), de)
        if not (t1.project @ (nabla @ m.action[i] - rhs)).is_zero():
            return False
    return True


def extend_connection(g: GradedDiffAlgebra, m: OneSidedModule, nabla: ExactMatrix, p: int) -> ExactMatrix:
    """Raw matrix of nabla on degree-p twisted forms, by the graded Leibniz rule."""
    dm, dp = m.dim, g.dims[p]
    if m.side == "left":
        # nabla(w (x) m) = dw (x) m + (-1)^p w nabla(m)
        t = kron(g.d[p], _eye(dm))
        t2 = kron(g.product(p, 1), _eye(dm)) @ kron(_eye(dp), nabla)
        return t + (t2 if p % 2 == 0 else -t2)
    # nabla(m (x) w) = nabla(m) w + m (x) dw
    return kron(_eye(dm), g.product(1, p)) @ kron(nabla, _eye(dp)) + kron(_eye(dm), g.d[p])


def connection_curvature(g: GradedDiffAlgebra, m: OneSidedModule, nabla: ExactMatrix) -> CurvatureReport:
    """nabla is the raw matrix M -> Omega^1 (x) M (left) or M -> M (x) Omega^1 (right)."""
    if g.max_degree < 2:
        raise ValueError("degrees 0..2 of the calculus are required")
    if nabla.shape != (g.dims[1] * m.dim, m.dim):
        raise ValueError("shape mismatch for the connection matrix")
    t1, t2 = twisted_forms(g, m, 1), twisted_forms(g, m, 2)
    leib = _leibniz_residual(g, m, nabla, t1)
    ext = extend_connection(g, m, nabla, 1)
    well = (t2.project @ ext @ t1.relators.matrix).is_zero() if t1.relators.dim else True
    curv = t2.project @ ext @ nabla
    modmap = all(curv @ m.action[i] == t2.action[i] @ curv for i in range(len(m.action)))
    return CurvatureReport(leib, well, curv, modmap, t2)


@dataclass
class ConnectionData:
    K: int
    n: int
    A: list[ExactMatrix]

    @property
    def hermitian_flag(self) -> bool:
        return all(x.H == -x for x in self.A)

    def to_dict(self) -> dict:
        ent = []
        for k, x in enumerate(self.A):
            for i, j, v in x.nonzeros():
                ent.append([k, i, j, str(v.re), str(v.im)])
        return {"K": self.K, "n": self.n, "A": ent}


def mkn_connection(pres: MnPresentation, conn: ConnectionData) -> ExactMatrix:
    """Raw matrix of nabla Phi = -i Phi theta + A_k Phi theta^k on K x n matrices."""
    K, n = conn.K, pres.n
    calc = pres.calc
    cols = []
    for c in range(K * n):
        Phi = ExactMatrix.from_dict(K, n, {divmod(c, n): 1})
        col = ExactMatrix.zeros(K * n * calc.dims[1], 1)
        for k in range(len(pres.E)):
            comp = (Phi @ pres.E[k]).scale(-I_)
            if conn.A:
                comp = comp + conn.A[k] @ Phi
            col = col + kron(mat_vec(comp), pres.theta_k[k])
        cols.append(col)
    return ExactMatrix.hstack(cols)


def expected_mkn_curvature(pres: MnPresentation, conn: ConnectionData, forms2: TwistedForms) -> ExactMatrix:
    """Reduced matrix of Phi -> sum_{k<l} ([A_k, A_l] - C^m_kl A_m) Phi theta^k theta^l."""
    K, n, r = conn.K, pres.n, len(pres.E)
    P11 = pres.calc.full.product(1, 1)
    F = {}
    for k, l in combinations(range(r), 2):
        f = _comm(conn.A[k], conn.A[l])
        for m in range(r):
            if pres.C[m][k][l]:
                f = f - conn.A[m].scale(pres.C[m][k][l])
        F[(k, l)] = f
    cols = []
    for c in range(K * n):
        Phi = ExactMatrix.from_dict(K, n, {divmod(c, n): 1})
        col = ExactMatrix.zeros(K * n * pres.calc.dims[2], 1)
        for (k, l), f in F.items():
            col = col + kron(mat_vec(f @ Phi), P11 @ kron(pres.theta_k[k], pres.theta_k[l]))
        cols.append(forms2.project @ col)
    return ExactMatrix.hstack(cols)


# ----------------------------------------------------------------------
# dual connection
# ----------------------------------------------------------------------

@dataclass
class DualConnection:
    space: Subspace              # Hom_A(M, A) inside dim A x dim M matrices (row-major)
    right_action: list[ExactMatrix]
    nabla: list[ExactMatrix]     # nabla*(phi_t) as a dim Omega^1 x dim M matrix, per basis phi_t
    left_linear: bool
    leibniz_ok: bool


def dual_connection(g: GradedDiffAlgebra, m: OneSidedModule, nabla: ExactMatrix) -> DualConnection:
    """<m, nabla* phi> = d<m, phi> - <nabla m, phi> on M* = Hom_A(M, A), M a left module."""
    if m.side != "left":
        raise ValueError("dual connections are built from left modules")
    a_L, a_R = _bimod_actions(g, 0)
    D, dm, d1 = g.dims[0], m.dim, g.dims[1]
    # phi(e_i m) = e_i phi(m)
    cons = [kron(_eye(D), m.action[i].T) - kron(a_L[i], _eye(dm)) for i in range(D)]
    space = kernel(ExactMatrix.vstack(cons))
    phis = [_unvec(space.matrix.col_matrix(t), D, dm) for t in range(space.dim)]
    right = []
    for b in range(D):
        imgs = [mat_vec(a_R[b] @ p) for p in phis]
        right.append(solve(space.matrix, ExactMatrix.hstack(imgs, rows=D * dm)) if phis else ExactMatrix.zeros(0, 0))
    P10 = g.product(1, 0)
    L1, R1 = _bimod_actions(g, 1)

    def nstar(phi):
        return g.d[0] @ phi - P10 @ kron(_eye(d1), phi) @ nabla

    nab = [nstar(p) for p in phis]
    left_linear = all(nb @ m.action[i] == L1[i] @ nb for nb in nab for i in range(D))
    leib = True
    for t, p in enumerate(phis):
        for b in range(D):
            pb = a_R[b] @ p
            lhs = nstar(pb)
            rhs = R1[b] @ nab[t] + g.product(0, 1) @ kron(p, g.d[0] @ _unit(D, b))
            leib &= lhs == rhs
    return DualConnection(space, right, nab, left_linear, leib)


def _unvec(v: ExactMatrix, rows: int, cols: int) -> ExactMatrix:
    return ExactMatrix.from_dict(rows, cols, {divmod(k, cols): x for k, _, x in v.nonzeros()})


# ----------------------------------------------------------------------
# hermitian structure on K x n matrices
# ----------------------------------------------------------------------

def is_psd_exact(h: ExactMatrix) -> bool:
    """Positive semidefiniteness of a hermitian matrix by exact symmetric elimination."""
    if h.H != h:
        return False
    n = h.rows
    rows = [list(r) for r in h.entries()]
    alive = list(range(n))
    while alive:
        p = alive[0]
        piv = rows[p][p]
        if piv.im != 0 or piv.re < 0:
            return False
        if piv.re == 0:
            if any(rows[p][c] for c in alive):
                return False
            alive.pop(0)
            continue
        rest = alive[1:]
        for i in rest:
            f = rows[i][p] / piv
            if f:
                for j in rest:
                    rows[i][j] = rows[i][j] - f * rows[p][j]
        alive = rest
    return True


@dataclass
class HermitianReport:
    sesquilinear: bool
    positive: bool
    compatible: bool
    antihermitian_potential: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def hermitian_checks(pres: MnPresentation, conn: ConnectionData, seed: int = 0, samples: int = 10) -> HermitianReport:
    """h(Phi, Psi) = Phi* Psi on K x n matrices, tested against nabla = nabla0 + A."""
    K, n = conn.K, pres.n
    rng = random.Random(seed)
    basis = [ExactMatrix.from_dict(K, n, {divmod(c, n): 1}) for c in range(K * n)]
    ok = True
    for _ in range(samples):
        P, Q = random_matrix(K, rng, cols=n), random_matrix(K, rng, cols=n)
        x, y = random_matrix(n, rng), random_matrix(n, rng)
        ok &= (P @ x).H @ (Q @ y) == x.H @ (P.H @ Q) @ y
    pos = all(is_psd_exact(p.H @ p) for p in basis)
    for _ in range(samples):
        P = random_matrix(K, rng, cols=n)
        pos &= is_psd_exact(P.H @ P)

    def nab(k, P):
        out = (P @ pres.E[k]).scale(-I_)
        return out + conn.A[k] @ P if conn.A else out

    comp = True
    for k in range(len(pres.E)):
        for P in basis:
            for Q in basis:
                h = P.H @ Q
                lhs = _comm(pres.E[k], h).scale(I_)
                rhs = nab(k, P).H @ Q + P.H @ nab(k, Q)
                comp &= lhs == rhs
    return HermitianReport(ok, pos, comp, conn.hermitian_flag)


# ----------------------------------------------------------------------
# first-order operators and their universal symbols
# ----------------------------------------------------------------------

@dataclass
class FirstOrderReport:
    is_first_order: bool
    sigma_L: ExactMatrix | None = None
    sigma_R: ExactMatrix | None = None
    well_defined: bool = False
    bimodule_homs: bool = False
    reconstruction_zero: bool = False

    def to_dict(self) -> dict:
        return {"is_first_order": self.is_first_order, "well_defined": self.well_defined,
                "bimodule_homs": self.bimodule_homs, "reconstruction_zero": self.reconstruction_zero}


def first_order_test(m: Bimodule, n: Bimodule, D: ExactMatrix) -> bool:
    """[[D, l_a], r_b] = 0 on basis elements."""
    for a in range(m.left_algebra.dim):
        c = D @ m.left[a] - n.left[a] @ D
        for b in range(m.right_algebra.dim):
            if c @ m.right[b] != n.right[b] @ c:
                return False
    return True


def first_order_space(m: Bimodule, n: Bimodule) -> Subspace:
    """All first-order D: M -> N as row-major vectors, from the linearized condition."""
    rows = []
    im, iN = _eye(m.dim), _eye(n.dim)
    for a in range(m.left_algebra.dim):
        for b in range(m.right_algebra.dim):
            La, Rb = m.left[a], m.right[b]
            rows.append(kron(iN, (La @ Rb).T) - kron(n.left[a], Rb.T) - kron(n.right[b], La.T)
                        + kron(n.right[b] @ n.left[a], im))
    return kernel(ExactMatrix.vstack(rows))


def first_order_symbols(m: Bimodule, n: Bimodule, D: ExactMatrix,
                        ua: UniversalCalculus | None = None, ub: UniversalCalculus | None = None) -> FirstOrderReport:
    A, B = m.left_algebra, m.right_algebra
    if D.shape != (n.dim, m.dim):
        raise ValueError("shape mismatch for D")
    if not first_order_test(m, n, D):
        return FirstOrderReport(False)
    ua = ua or UniversalCalculus(A, 1)
    ub = ub or UniversalCalculus(B, 1)
    om_a, om_b = ua.bimodule(1), ub.bimodule(1)
    tl, tr = tensor_over(om_a, m), tensor_over(m, om_b)
    # sigma_L(a0 d(c_j) (x) m) = a0 [D, l_cj] m
    blocks = []
    for a0 in range(A.dim):
        for c in ua.cols:
            blocks.append(n.left[a0] @ (D @ m.left[c] - n.left[c] @ D))
    raw_l = ExactMatrix.hstack([_interleave(blocks, m.dim)], rows=n.dim)
    # sigma_R(m (x) b0 d(c_j)) = [D, r_cj](m b0)
    blocks_r = {}
    for b0 in range(B.dim):
        for j, c in enumerate(ub.cols):
            blocks_r[(b0, j)] = (D @ m.right[c] - n.right[c] @ D) @ m.right[b0]
    ab = ub.ab
    cols = []
    for x in range(m.dim):
        for b0 in range(B.dim):
            for j in range(ab):
                cols.append(blocks_r[(b0, j)].col_matrix(x))
    raw_r = ExactMatrix.hstack(cols, rows=n.dim)
    well = (raw_l @ tl.relators.matrix).is_zero() and (raw_r @ tr.relators.matrix).is_zero()
    sl, sr = raw_l @ tl.section, raw_r @ tr.section
    homs = all(sl @ tl.module.left[a] == n.left[a] @ sl for a in range(A.dim)) and \
        all(sl @ tl.module.right[b] == n.right[b] @ sl for b in range(B.dim)) and \
        all(sr @ tr.module.left[a] == n.left[a] @ sr for a in range(A.dim)) and \
        all(sr @ tr.module.right[b] == n.right[b] @ sr for b in range(B.dim))
    recon = True
    for a in range(A.dim):
        dla = tl.project @ kron(ua.d[0] @ _unit(A.dim, a), _eye(m.dim))
        for b in range(B.dim):
            drb = tr.project @ kron(_eye(m.dim), ub.d[0] @ _unit(B.dim, b))
            res = (D @ m.left[a] @ m.right[b] - n.left[a] @ n.right[b] @ D
                   - n.right[b] @ sl @ dla - n.left[a] @ sr @ drb)
            recon &= res.is_zero()
    return FirstOrderReport(True, sl, sr, well, homs, recon)


def _interleave(blocks: list[ExactMatrix], dm: int) -> ExactMatrix:
    """Columns ordered (block, m): the raw basis of Omega^1_u (x) M."""
    return ExactMatrix.hstack([b.col_matrix(x) for b in blocks for x in range(dm)], rows=blocks[0].rows)


# ----------------------------------------------------------------------
# bimodule connections
# ----------------------------------------------------------------------

@dataclass
class SigmaResult:
    leibniz_ok: bool
    exists: bool
    sigma: ExactMatrix | None
    bimodule_map: bool


def bimodule_sigma(g: GradedDiffAlgebra, m: Bimodule, nabla: ExactMatrix, u: UniversalCalculus | None = None) -> SigmaResult:
    """sigma: M (x)_A Omega^1 -> Omega^1 (x)_A M with nabla(m a) = nabla(m) a + sigma(m (x) da),
    for a left connection nabla given as the raw matrix M -> Omega^1 (x) M."""
    a = m.left_algebra
    D, dm, d1 = a.dim, m.dim, g.dims[1]
    u = u or UniversalCalculus(a, 1)
    left = OneSidedModule(a, dm, m.left, "left")
    t1 = twisted_forms(g, left, 1)
    leib = _leibniz_residual(g, left, nabla, t1)
    om1 = forms_bimodule(a, g, 1)
    L1, R1 = om1.left, om1.right
    # i_d: a0 d_u(c_j) -> a0 d(c_j)
    P01 = g.product(0, 1)
    i_d = ExactMatrix.hstack([P01 @ kron(_unit(D, a0), g.d[0] @ _unit(D, c))
                              for a0 in range(D) for c in u.cols], rows=d1)
    tu, tg = tensor_over(m, u.bimodule(1)), tensor_over(m, om1)
    cols = []
    for x in range(dm):
        for a0 in range(D):
            for c in u.cols:
                v = m.right[a0] @ _unit(dm, x)
                cols.append(nabla @ m.right[c] @ v - kron(_eye(d1), m.right[c]) @ nabla @ v)
    raw = t1.project @ ExactMatrix.hstack(cols, rows=d1 * dm)
    su = raw @ tu.section
    J = tg.project @ kron(_eye(dm), i_d) @ tu.section
    sol = solve(J.T, su.T)
    if sol is None:
        return SigmaResult(leib, False, None, False)
    sigma = sol.T
    # action of A on Omega^1 (x)_A M, reduced
    tl = [t1.project @ kron(L1[i], _eye(dm)) @ t1.section for i in range(D)]
    tr_ = [t1.project @ kron(_eye(d1), m.right[i]) @ t1.section for i in range(D)]
    bim = all(sigma @ tg.module.left[i] == tl[i] @ sigma and sigma @ tg.module.right[i] == tr_[i] @ sigma
              for i in range(D))
    return SigmaResult(leib, True, sigma, bim)


# ----------------------------------------------------------------------
# derivation-based connections
# ----------------------------------------------------------------------

@dataclass
class DerivationConnectionReport:
    z_linear: bool
    leibniz: bool
    curvature_bimodule_linear: bool
    flat: bool
    real: bool | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def derivation_connection_check(m: Bimodule, der: DerivationLie, nablas: list[ExactMatrix],
                                star: ExactMatrix | None = None) -> DerivationConnectionReport:
    a = m.left_algebra
    if not is_central(m):
        raise ValueError("bimodule is not central")
    r = len(der.mats)
    if len(nablas) != r:
        raise ValueError("one operator per derivation basis element is required")
    z = center(a)
    zl = True
    for t in range(z.dim):
        zt = z.matrix.col_matrix(t)
        Lz = a.left_of(zt)
        for al in range(r):
            c = derivation_coords(der, Lz @ der.mats[al])
            lhs = ExactMatrix.zeros(m.dim, m.dim)
            for k, _, v in c.nonzeros():
                lhs = lhs + nablas[k].scale(v)
            zl &= lhs == m.left_of(zt) @ nablas[al]
    leib = True
    for al, X in enumerate(der.mats):
        nb = nablas[al]
        for i in range(a.dim):
            xe = X @ _unit(a.dim, i)
            leib &= nb @ m.left[i] - m.left[i] @ nb == m.left_of(xe)
            leib &= nb @ m.right[i] - m.right[i] @ nb == m.right_of(xe)
    lin, flat = True, True
    for al in range(r):
        for be in range(r):
            R = _comm(nablas[al], nablas[be])
            for k in range(r):
                f = der.lie.f(al, be, k)
                if f:
                    R = R - nablas[k].scale(f)
            flat &= R.is_zero()
            lin &= all(R @ x == x @ R for x in m.left + m.right)
    real = None
    if star is not None and a.star is not None:
        real = True
        for al, X in enumerate(der.mats):
            if derivation_star(a, X) == X:
                real &= nablas[al] @ star == star @ nablas[al].conj()
    return DerivationConnectionReport(zl, leib, lin, flat, real)


# ----------------------------------------------------------------------
# symplectic structure of M_n
# ----------------------------------------------------------------------

@dataclass
class SymplecticReport:
    n: int
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {"n": self.n, "checks": dict(self.checks), "ok": self.ok}


def symplectic_mn(n: int, seed: int = 0, quadruples: int = 50, triples: int = 30) -> SymplecticReport:
    if n < 2:
        raise ValueError("n must be at least 2: Der(M_1) = 0")
    a = matrix_algebra(n)
    D = n * n
    E = hermitian_basis(n)
    r = len(E)
    calc = DerCalculus(a, 3, [ad_i(e) for e in E])
    der = calc.der
    omega = _forms_vec(calc, 2, {(k, l): matrix_to_vec(_comm(E[k], E[l]).scale(I_))
                                 for k, l in combinations(range(r), 2)})
    theta = _forms_vec(calc, 1, {(k,): matrix_to_vec(E[k]) for k in range(r)})
    basis = [vec_to_matrix(_unit(D, v), n) for v in range(D)]
    coords = [derivation_coords(der, ad_i(x)) for x in basis]
    ch = {}
    ch["center_in_kernel"] = derivation_coords(der, ad_i(_eye(n))).is_zero() and all(
        _comm(_eye(n), y).is_zero() for y in basis)
    ch["well_defined"] = all(evaluate_form(calc, 2, omega, [coords[x], coords[y]])
                             == matrix_to_vec(_comm(basis[x], basis[y]).scale(I_))
                             for x in range(D) for y in range(D))
    ch["closed"] = (calc.d[2] @ omega).is_zero()
    ch["in_underline"] = calc.underline_spaces[2].contains(omega)
    ch["real"] = calc.full.star[2] @ omega.conj() == omega
    ch["exact"] = calc.d[1] @ theta == omega
    ch["theta_potential"] = all(evaluate_form(calc, 1, theta, [coords[x]])
                                == matrix_to_vec(basis[x] - _eye(n).scale(_trace(basis[x]) / QI(n)))
                                for x in range(D))
    # Ham(x): omega(d_k, Ham x) = d_k(x) for all k
    W = ExactMatrix.vstack([ExactMatrix.hstack([evaluate_form(calc, 2, omega, [_unit(r, k), _unit(r, l)])
                                                for l in range(r)]) for k in range(r)])
    rhs = ExactMatrix.vstack([der.mats[k] for k in range(r)])
    H = solve(W, rhs)
    ch["nondegenerate"] = rank(W) == r and H is not None
    if H is None:
        return SymplecticReport(n, ch)
    ham = [H.col_matrix(x) for x in range(D)]
    ch["ham_is_ad_ix"] = all(ham[x] == coords[x] for x in range(D))

    def bracket(x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
        hx, hy = H @ matrix_to_vec(x), H @ matrix_to_vec(y)
        return vec_to_matrix(evaluate_form(calc, 2, omega, [hx, hy]), n)

    def ham_mat(h):
        out = ExactMatrix.zeros(D, D)
        for k, _, v in h.nonzeros():
            out = out + der.mats[k].scale(v)
        return out

    ch["poisson_is_i_commutator"] = all(bracket(basis[x], basis[y]) == _comm(basis[x], basis[y]).scale(I_)
                                        for x in range(D) for y in range(D))
    ok = True
    for x in range(D):
        for y in range(D):
            lhs = _comm(ham_mat(ham[x]), ham_mat(ham[y]))
            br = bracket(basis[x], basis[y])
            ok &= lhs == ham_mat(H @ matrix_to_vec(br))
    ch["ham_lie_homomorphism"] = ok
    rng = random.Random(seed)
    domega = calc.d[2] @ omega
    ok = True
    for _ in range(triples):
        x, y, z = (random_matrix(n, rng, -2, 2) for _ in range(3))
        hs = [H @ matrix_to_vec(t) for t in (x, y, z)]
        lhs = vec_to_matrix(evaluate_form(calc, 3, domega, hs), n)
        jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))
        ok &= lhs == -jac and jac.is_zero()
    ch["jacobi_identity"] = ok
    ok = True
    for _ in range(quadruples):
        p, q, s, t = (random_matrix(n, rng, -2, 2) for _ in range(4))
        ok &= _comm(p, q) @ bracket(s, t) == bracket(p, q) @ _comm(s, t)
    ch["commutator_bracket_identity"] = ok
    return SymplecticReport(n, ch)


# ----------------------------------------------------------------------
# flat connections on K x 2 matrices
# ----------------------------------------------------------------------

def partitions(k: int, largest: int | None = None) -> list[tuple[int, ...]]:
    largest = k if largest is None else largest
    if k == 0:
        return [()]
    out = []
    for first in range(min(k, largest), 0, -1):
        out.extend((first,) + rest for rest in partitions(k - first, first))
    return out


def _four_squares(h: int) -> tuple[int, int, int, int]:
    m = int(h ** 0.5) + 1
    for x1 in range(m + 1):
        for x2 in range(x1 + 1):
            for x3 in range(x2 + 1):
                rest = h - x1 * x1 - x2 * x2 - x3 * x3
                if rest < 0:
                    continue
                x4 = int(round(rest ** 0.5))
                if x4 * x4 == rest:
                    return x1, x2, x3, x4
    raise AssertionError("four-square search failed")


def _symmetric_power(gens: list[ExactMatrix], m: int) -> list[ExactMatrix]:
    """Action of 2x2 generators on degree-m polynomials in (u, v); basis u^(m-r) v^r."""
    out = []
    for X in gens:
        ent = {}
        for r in range(m + 1):
            a, b = m - r, r
            # X u = X00 u + X10 v, X v = X01 u + X11 v
            terms = []
            if a:
                terms += [(a * X[0, 0], r), (a * X[1, 0], r + 1)]
            if b:
                terms += [(b * X[0, 1], r - 1), (b * X[1, 1], r)]
            for c, t in terms:
                if c:
                    ent[(t, r)] = ent.get((t, r), QI(0)) + c
        out.append(ExactMatrix.from_dict(m + 1, m + 1, ent))
    return out


def sl2_irrep(dim: int) -> list[ExactMatrix]:
    """Exact antihermitian irreducible A_k with [A_k, A_l] = -2 eps_klm A_m, entries in Q(i)."""
    m = dim - 1
    base = [p.scale(I_) for p in pauli()]
    if m == 0:
        return [ExactMatrix.zeros(1, 1)] * 3
    gens = _symmetric_power(base, m)
    # invariant hermitian form: <u^a v^b, u^a v^b> = a! b!; build a Q(i) orthonormal basis
    from math import factorial
    h = [factorial(m - r) * factorial(r) for r in range(m + 1)]
    ent = {}
    for r in range(m + 1):
        s = m - r
        if r > s:
            continue
        if r == s:
            root = int(round(h[r] ** 0.5))
            if root * root != h[r]:
                raise AssertionError("middle weight norm is not a square")
            ent[(r, r)] = QI(Fraction(1, root))
            continue
        x1, x2, x3, x4 = _four_squares(h[r])
        al, be = QI(Fraction(x1, h[r]), Fraction(x2, h[r])), QI(Fraction(x3, h[r]), Fraction(x4, h[r]))
        ent[(r, r)], ent[(s, r)] = al, be
        ent[(r, s)], ent[(s, s)] = -be.conj(), al.conj()
    P = ExactMatrix.from_dict(m + 1, m + 1, ent)
    Hm = ExactMatrix.from_dict(m + 1, m + 1, {(r, r): h[r] for r in range(m + 1)})
    if P.H @ Hm @ P != _eye(m + 1):
        raise AssertionError("orthonormalization failed")
    Pi = solve(P, _eye(m + 1))
    return [Pi @ g @ P for g in gens]


def pauli_structure() -> list:
    return structure_constants(pauli())[2]


def is_flat(A: list[ExactMatrix], C: list) -> bool:
    r = len(A)
    for k in range(r):
        for l in range(k + 1, r):
            rhs = ExactMatrix.zeros(A[0].rows, A[0].cols)
            for m in range(r):
                if C[m][k][l]:
                    rhs = rhs + A[m].scale(C[m][k][l])
            if _comm(A[k], A[l]) != rhs:
                return False
    return True


def casimir(A: list[ExactMatrix], C: list) -> ExactMatrix:
    """sum_k J_k^2 with J_k = A_k / (i c), c fixed by [A_1, A_2] = C^3_12 A_3 = -c A_3 (c = 2 for Pauli)."""
    c = -C[2][0][1]
    out = ExactMatrix.zeros(A[0].rows, A[0].cols)
    for x in A:
        out = out + x @ x
    return out.scale(-QI(1) / (c * c))


def _poly_mul(p: list, q: list) -> list:
    out = [QI(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] = out[i + j] + x * y
    return out


def casimir_partition(cas: ExactMatrix) -> tuple[int, ...] | None:
    """Irreducible block dimensions from the exact Casimir spectrum, or None if inconsistent."""
    K = cas.rows
    blocks = []
    poly = [QI(1)]
    total = 0
    for twoj in range(K):
        lam = QI(Fraction(twoj * (twoj + 2), 4))
        mult = K - rank(cas - _eye(K).scale(lam))
        if mult % (twoj + 1):
            return None
        blocks += [twoj + 1] * (mult // (twoj + 1))
        total += mult
        for _ in range(mult):
            poly = _poly_mul(poly, [QI(1), -lam])
    if total != K or poly != charpoly_coeffs(cas):
        return None
    return tuple(sorted(blocks, reverse=True))


def casimir_spectrum(cas: ExactMatrix, partition: tuple[int, ...]) -> list[str]:
    return sorted(str(Fraction((d - 1) * (d + 1), 4)) for d in partition for _ in range(d))


def partition_representative(p: tuple[int, ...]) -> list[ExactMatrix]:
    irreps = [sl2_irrep(d) for d in p]
    return [block_diag([ir[k] for ir in irreps]) for k in range(3)]


@dataclass
class FlatClass:
    partition: tuple[int, ...]
    A: list[ExactMatrix]
    flat: bool
    hermitian: bool
    label: tuple[int, ...] | None
    spectrum: list[str]

    def to_dict(self) -> dict:
        return {"partition": list(self.partition), "flat": self.flat, "hermitian": self.hermitian,
                "label": None if self.label is None else list(self.label), "casimir_spectrum": self.spectrum}


@dataclass
class FlatReport:
    K: int
    classes: list[FlatClass]
    labels_distinct: bool

    @property
    def count(self) -> int:
        return len(self.classes)

    @property
    def ok(self) -> bool:
        return self.labels_distinct and all(c.flat and c.hermitian and c.label == c.partition for c in self.classes)

    def to_dict(self) -> dict:
        return {"K": self.K, "classes": self.count, "labels_distinct": self.labels_distinct, "ok": self.ok,
                "representatives": [c.to_dict() for c in self.classes]}


def classify_connection(A: list[ExactMatrix], C: list | None = None, require_hermitian: bool = True) -> FlatClass:
    C = pauli_structure() if C is None else C
    herm = all(x.H == -x for x in A)
    if require_hermitian and not herm:
        raise ValueError("connection is not hermitian: A_k must be antihermitian")
    flat = is_flat(A, C)
    label, spectrum = None, []
    if flat:
        label = casimir_partition(casimir(A, C))
        if label is not None:
            spectrum = casimir_spectrum(None, label)
    return FlatClass(label or (), A, flat, herm, label, spectrum)


def flat_classify(K: int, A: list[ExactMatrix] | None = None, n: int = 2,
                  require_hermitian: bool = True) -> FlatReport:
    if n != 2:
        raise ValueError("closed-form classification is available for n = 2 only")
    C = pauli_structure()
    if A is not None:
        cl = classify_connection(A, C, require_hermitian)
        return FlatReport(K, [cl], True)
    classes = []
    for p in partitions(K):
        reps = partition_representative(p)
        cl = classify_connection(reps, C, require_hermitian)
        cl.partition = p
        classes.append(cl)
    labels = [c.label for c in classes]
    spectra = [tuple(c.spectrum) for c in classes]
    distinct = len(set(labels)) == len(labels) and len(set(spectra)) == len(spectra)
    return FlatReport(K, classes, distinct)


def cayley_unitary(S: ExactMatrix) -> ExactMatrix:
    """(1 - S)(1 + S)^-1 for antihermitian S: a unitary matrix over Q(i)."""
    n = S.rows
    inv = solve(_eye(n) + S, _eye(n))
    return (_eye(n) - S) @ inv


# ----------------------------------------------------------------------
# random bimodules over M_2 and C[x]/(x^2)
# ----------------------------------------------------------------------

def _conjugate(m: Bimodule, p: ExactMatrix) -> Bimodule:
    pi = solve(p, _eye(m.dim))
    return Bimodule(m.left_algebra, m.right_algebra, m.dim, [pi @ x @ p for x in m.left],
                    [pi @ x @ p for x in m.right])


def _pool(a: FiniteAlgebra, b: FiniteAlgebra) -> list[Bimodule]:
    """Bimodules of dimension 2..4 for the pair (a, b) in {M_2, C[x]/(x^2)}."""
    def right_modules(alg):
        # right modules of dimension 1 and 2: characters and the regular module
        mods = [alg.right_mats()]
        if alg.dim == 2:
            mods.append([ExactMatrix.from_rows([[alg.unit[i]]]) for i in range(alg.dim)])
        return mods

    def left_modules(alg):
        mods = [alg.left_mats()]
        if alg.dim == 2:
            mods.append([ExactMatrix.from_rows([[alg.unit[i]]]) for i in range(alg.dim)])
        return mods

    out = []
    if a.dim == 4 and b.dim == 4:
        out.append(Bimodule(a, b, 4, a.left_mats(), a.right_mats()))
    elif a.dim == 4:
        E = [vec_to_matrix(_unit(4, i), 2) for i in range(4)]
        for rm in right_modules(b):
            k = rm[0].rows
            out.append(Bimodule(a, b, 2 * k, [kron(e, _eye(k)) for e in E], [kron(_eye(2), r) for r in rm]))
    elif b.dim == 4:
        E = [vec_to_matrix(_unit(4, i), 2) for i in range(4)]
        for lm in left_modules(a):
            k = lm[0].rows
            out.append(Bimodule(a, b, 2 * k, [kron(l, _eye(2)) for l in lm], [kron(_eye(k), e.T) for e in E]))
    else:
        L, R = a.left_mats(), a.right_mats()
        ch = [ExactMatrix.from_rows([[a.unit[i]]]) for i in range(a.dim)]
        out.append(Bimodule(a, b, 2, L, R))
        out.append(Bimodule(a, b, 3, [block_diag([L[i], ch[i]]) for i in range(2)],
                            [block_diag([R[i], ch[i]]) for i in range(2)]))
        out.append(Bimodule(a, b, 4, [block_diag([L[i], L[i]]) for i in range(2)],
                            [block_diag([R[i], R[i]]) for i in range(2)]))
        out.append(Bimodule(a, b, 4, [kron(L[i], _eye(2)) for i in range(2)],
                            [kron(_eye(2), R[i]) for i in range(2)]))
        out.append(Bimodule(a, b, 2, [block_diag([ch[i], ch[i]]) for i in range(2)],
                            [block_diag([ch[i], ch[i]]) for i in range(2)]))
    return out


def random_bimodule_pair(rng: random.Random, algebras: list[FiniteAlgebra] | None = None) -> tuple[Bimodule, Bimodule]:
    """Two random (A, B)-bimodules of dimension 2..4, A and B drawn from M_2 and C[x]/(x^2)."""
    from .algebra import random_invertible, truncated_poly
    algebras = algebras or [matrix_algebra(2), truncated_poly(2)]
    a, b = rng.choice(algebras), rng.choice(algebras)
    pool = _pool(a, b)
    m, n = rng.choice(pool), rng.choice(pool)
    return (_conjugate(m, random_invertible(m.dim, rng)), _conjugate(n, random_invertible(n.dim, rng)))


def random_first_order(m: Bimodule, n: Bimodule, rng: random.Random) -> ExactMatrix:
    sp = first_order_space(m, n)
    while True:
        c = ExactMatrix.column([rng.randint(-3, 3) for _ in range(sp.dim)])
        v = sp.matrix @ c
        if not v.is_zero():
            return _unvec(v, n.dim, m.dim)


def random_non_first_order(m: Bimodule, n: Bimodule, rng: random.Random) -> ExactMatrix | None:
    sp = first_order_space(m, n)
    if sp.dim == m.dim * n.dim:
        return None
    while True:
        D = random_matrix(n.dim, rng, cols=m.dim)
        if not sp.contains(mat_vec(D)):
            return D
