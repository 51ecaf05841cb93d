"""Floating-point minimization of the matrix Yang-Mills potential on K x 2 matrices.

V(A) = 1/4 sum_{k,l} tr(F_kl^dag F_kl) with F_kl = [A_k, A_l] - C^m_kl A_m and
C^m_kl = -2 eps_klm (the Pauli presentation).  Zeros of V are the flat
connections; their gauge classes are labelled by partitions of K.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

EPS = np.zeros((3, 3, 3))
EPS[0, 1, 2] = EPS[1, 2, 0] = EPS[2, 0, 1] = 1.0
EPS[0, 2, 1] = EPS[2, 1, 0] = EPS[1, 0, 2] = -1.0
# C[m, k, l] = C^m_kl
PAULI_C = np.einsum("klm->mkl", -2.0 * EPS)


def antihermitian_part(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x - np.conj(np.swapaxes(x, -1, -2)))


@dataclass
class FloatConnection:
    A: np.ndarray          # shape (3, K, K), antihermitian
    seed: int | None = None

    @property
    def K(self) -> int:
        return self.A.shape[1]

    @staticmethod
    def random(K: int, seed: int, scale: float = 1.0) -> "FloatConnection":
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(3, K, K)) + 1j * rng.normal(size=(3, K, K))
        return FloatConnection(antihermitian_part(scale * x), seed)

    @staticmethod
    def from_exact(mats) -> "FloatConnection":
        return FloatConnection(np.array([m.to_complex_array() for m in mats]))


def curvature(A: np.ndarray, C: np.ndarray = PAULI_C) -> np.ndarray:
    """F[k, l] = [A_k, A_l] - C^m_kl A_m."""
    comm = np.einsum("kij,ljm->klim", A, A) - np.einsum("lij,kjm->klim", A, A)
    return comm - np.einsum("mkl,mij->klij", C, A)


def potential(c: FloatConnection | np.ndarray, C: np.ndarray = PAULI_C) -> float:
    A = c.A if isinstance(c, FloatConnection) else c
    F = curvature(A, C)
    return 0.25 * float(np.sum(np.abs(F) ** 2))


def potential_loops(A: np.ndarray, C: np.ndarray = PAULI_C) -> float:
    """Plain double loop over (k, l), for cross-checking ``potential``."""
    total = 0.0
    for k in range(3):
        for l in range(3):
            F = A[k] @ A[l] - A[l] @ A[k]
            for m in range(3):
                F = F - C[m, k, l] * A[m]
            total += np.trace(F.conj().T @ F).real
    return 0.25 * total


def gradient(c: FloatConnection | np.ndarray, C: np.ndarray = PAULI_C) -> np.ndarray:
    """Gradient of V for the inner product Re tr(X^dag Y), projected to antihermitian matrices.

    G_p = sum_l [F_pl, A_l^dag] - 1/2 sum_kl C^p_kl F_kl."""
    A = c.A if isinstance(c, FloatConnection) else c
    F = curvature(A, C)
    Ad = np.conj(np.swapaxes(A, -1, -2))
    G = np.einsum("plij,ljm->pim", F, Ad) - np.einsum("lij,pljm->pim", Ad, F)
    G = G - 0.5 * np.einsum("pkl,klij->pij", C, F)
    return antihermitian_part(G)


def grad_norm(A: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(gradient(A)) ** 2)))


def flat_residual(A: np.ndarray) -> float:
    F = curvature(A)
    return float(max(np.linalg.norm(F[k, l]) for k in range(3) for l in range(3)))


def finite_difference_error(A: np.ndarray, h: float = 1e-5) -> float:
    """Relative error of the analytic gradient against central differences on a real basis."""
    g = gradient(A)
    basis = _antihermitian_basis(A.shape[1])
    num = np.zeros_like(g)
    for E in basis:
        dv = (potential(A + h * E) - potential(A - h * E)) / (2 * h)
        num += dv * E
    return float(np.linalg.norm(num - g) / max(np.linalg.norm(g), 1e-300))


def _antihermitian_basis(K: int) -> list[np.ndarray]:
    """Orthonormal real basis of triples of antihermitian K x K matrices."""
    out = []
    for k in range(3):
        for i in range(K):
            E = np.zeros((3, K, K), dtype=complex)
            E[k, i, i] = 1j
            out.append(E)
            for j in range(i + 1, K):
                E = np.zeros((3, K, K), dtype=complex)
                E[k, i, j], E[k, j, i] = 1 / np.sqrt(2), -1 / np.sqrt(2)
                out.append(E)
                E = np.zeros((3, K, K), dtype=complex)
                E[k, i, j], E[k, j, i] = 1j / np.sqrt(2), 1j / np.sqrt(2)
                out.append(E)
    return out


# ----------------------------------------------------------------------
# classification of vacua
# ----------------------------------------------------------------------

def casimir(A: np.ndarray) -> np.ndarray:
    """sum_k J_k^2 with J_k = A_k / (2i)."""
    J = A / 2j
    return np.einsum("kij,kjl->il", J, J)


def classify_vacuum(c: FloatConnection | np.ndarray, tol_flat: float = 1e-6, snap: float = 0.1):
    A = c.A if isinstance(c, FloatConnection) else c
    if flat_residual(A) >= tol_flat:
        return "unresolved"
    ev = np.linalg.eigvalsh(0.5 * (casimir(A) + casimir(A).conj().T))
    K = A.shape[1]
    counts: dict[int, int] = {}
    for lam in ev:
        # j(j+1) = lam  ->  2j = sqrt(4 lam + 1) - 1
        twoj = int(round(np.sqrt(max(4 * lam + 1, 0.0)) - 1))
        if abs(lam - twoj * (twoj + 2) / 4) > snap:
            return "unresolved"
        counts[twoj] = counts.get(twoj, 0) + 1
    parts = []
    for twoj, mult in counts.items():
        if mult % (twoj + 1):
            return "unresolved"
        parts += [twoj + 1] * (mult // (twoj + 1))
    if sum(parts) != K:
        return "unresolved"
    return tuple(sorted(parts, reverse=True))


# ----------------------------------------------------------------------
# gradient flow
# ----------------------------------------------------------------------

@dataclass
class FlowReport:
    seed: int
    iterations: int
    final_potential: float
    grad_norm: float
    flat_residual: float
    class_label: object
    converged: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        if isinstance(self.class_label, tuple):
            d["class_label"] = list(self.class_label)
        return d


def flow(K: int, seed: int, max_iter: int = 20000, tol_grad: float = 1e-9, tol_flat: float = 1e-6,
         step0: float = 0.1, shrink: float = 0.5, c1: float = 1e-4, n: int = 2,
         start: np.ndarray | None = None) -> tuple[FlowReport, np.ndarray]:
    """Gradient descent with Armijo backtracking from a seeded random start."""
    if n != 2:
        raise ValueError("the flow is implemented for n = 2")
    A = FloatConnection.random(K, seed).A if start is None else np.array(start, dtype=complex)
    V = potential(A)
    it = 0
    for it in range(1, max_iter + 1):
        G = gradient(A)
        g2 = float(np.sum(np.abs(G) ** 2))
        if np.sqrt(g2) < tol_grad:
            it -= 1
            break
        t = step0
        while True:
            B = antihermitian_part(A - t * G)
            VB = potential(B)
            if VB <= V - c1 * t * g2 or t < 1e-16:
                break
            t *= shrink
        A, V = B, VB
    gn = grad_norm(A)
    label = classify_vacuum(A, tol_flat)
    rep = FlowReport(seed, it, V, gn, flat_residual(A), label, gn < tol_grad)
    return rep, A


def census(K: int, seeds, **kw) -> dict:
    reports = [flow(K, s, **kw)[0] for s in seeds]
    counts: dict[str, int] = {}
    for r in reports:
        key = "+".join(map(str, r.class_label)) if isinstance(r.class_label, tuple) else str(r.class_label)
        counts[key] = counts.get(key, 0) + 1
    return {"K": K, "runs": [r.to_dict() for r in reports], "census": dict(sorted(counts.items()))}


# ----------------------------------------------------------------------
# mass spectrum
# ----------------------------------------------------------------------

def hessian(A: np.ndarray) -> np.ndarray:
    """Hessian of V on the orthonormal antihermitian basis.

    The gradient is a cubic polynomial along any line, so the five-point stencil
    recovers its derivative up to rounding."""
    basis = _antihermitian_basis(A.shape[1])
    cols = []
    for E in basis:
        gp1, gm1 = gradient(A + E), gradient(A - E)
        gp2, gm2 = gradient(A + 2 * E), gradient(A - 2 * E)
        dg = (8 * (gp1 - gm1) - (gp2 - gm2)) / 12
        cols.append([float(np.real(np.sum(np.conj(F) * dg))) for F in basis])
    H = np.array(cols)
    return 0.5 * (H + H.T)


def gauge_orbit_dim(A: np.ndarray, tol: float = 1e-8) -> int:
    """Rank of X -> ([X, A_k])_k on u(K)."""
    K = A.shape[1]
    vecs = []
    for E in _antihermitian_basis(K)[: K * K]:
        X = E[0]
        v = np.concatenate([(X @ A[k] - A[k] @ X).ravel() for k in range(3)])
        vecs.append(np.concatenate([v.real, v.imag]))
    return int(np.linalg.matrix_rank(np.array(vecs), tol=tol))


def mass_spectrum(c: FloatConnection | np.ndarray, tol_flat: float = 1e-6) -> np.ndarray:
    A = c.A if isinstance(c, FloatConnection) else c
    if flat_residual(A) >= tol_flat:
        raise ValueError("not a vacuum: the connection is not flat")
    return np.sort(np.linalg.eigvalsh(hessian(A)))
