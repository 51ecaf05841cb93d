"""Exact finite-dimensional noncommutative differential calculus.

Finite algebras over Q(i), Hochschild and cyclic cohomology, Lie and Weil
algebras, differential calculi, connections on bimodules, symplectic
structure of M_n and a numerical matrix Yang-Mills vacuum census.
"""
from .algebra import FiniteAlgebra, LieAlgebraData, Bimodule, matrix_algebra, sl2, truncated_poly
from .exact import QI, ExactMatrix, Subspace

__all__ = ["QI", "ExactMatrix", "Subspace", "FiniteAlgebra", "LieAlgebraData", "Bimodule",
           "matrix_algebra", "sl2", "truncated_poly"]
__version__ = "0.1.0"
