"""Exact dense linear algebra over the Gaussian rationals Q(i).

Real matrices are held as flint ``fmpq_mat`` objects and reduced with flint's
rref.  Matrices with a nonzero imaginary part go through a plain Gauss-Jordan
elimination on pairs of rationals.  Every reduction is to the unique reduced
row echelon form, so results never depend on pivoting details.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from flint import fmpq, fmpq_mat

ZERO = fmpq(0)
ONE = fmpq(1)


def to_fmpq(x) -> fmpq:
    if isinstance(x, fmpq):
        return x
    if isinstance(x, int):
        return fmpq(x)
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, str):
        f = Fraction(x.strip())
        return fmpq(f.numerator, f.denominator)
    if isinstance(x, float):
        f = Fraction(x)
        return fmpq(f.numerator, f.denominator)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def rat_str(x: fmpq) -> str:
    """Serialize a rational as 'p/q' with q > 0 and the fraction reduced."""
    return f"{int(x.p)}/{int(x.q)}"


def parse_rat(s) -> fmpq:
    if isinstance(s, (int, fmpq, Fraction)):
        return to_fmpq(s)
    if not isinstance(s, str):
        raise ValueError(f"malformed rational {s!r}")
    try:
        f = Fraction(s.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"malformed rational {s!r}") from None
    return fmpq(f.numerator, f.denominator)


class GaussianRational:
    """An element re + i*im of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im
        elif isinstance(re, complex):
            re, im = re.real, re.imag
        self.re = to_fmpq(re)
        self.im = to_fmpq(im)

    @staticmethod
    def coerce(x) -> "GaussianRational":
        return x if isinstance(x, GaussianRational) else GaussianRational(x)

    def __add__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussianRational.coerce(o) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = GaussianRational.coerce(o)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * GaussianRational(o.re / n, -o.im / n)

    def __rtruediv__(self, o):
        return GaussianRational.coerce(o) / self

    def conj(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, o):
        try:
            o = GaussianRational.coerce(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(Fraction(int(self.re.p), int(self.re.q))),
                       float(Fraction(int(self.im.p), int(self.im.q))))

    def __repr__(self):
        if self.im == 0:
            return f"QI({self.re})"
        return f"QI({self.re}, {self.im})"

    def to_json(self) -> dict:
        return {"re": rat_str(self.re), "im": rat_str(self.im)}

    @staticmethod
    def from_json(d) -> "GaussianRational":
        if isinstance(d, dict):
            return GaussianRational(parse_rat(d.get("re", "0")), parse_rat(d.get("im", "0")))
        return GaussianRational(parse_rat(d))


QI = GaussianRational
I_UNIT = QI(0, 1)


def _split(v):
    if isinstance(v, GaussianRational):
        return v.re, v.im
    if isinstance(v, complex):
        return to_fmpq(v.real), to_fmpq(v.imag)
    return to_fmpq(v), ZERO


class ExactMatrix:
    """A rows x cols matrix over Q(i), stored as a real and imaginary part."""

    __slots__ = ("re", "im")

    def __init__(self, re: fmpq_mat, im: fmpq_mat | None = None):
        self.re = re
        if im is not None and _is_zero_mat(im):
            im = None
        self.im = im

    # construction -----------------------------------------------------
    @staticmethod
    def zeros(rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix(fmpq_mat(rows, cols))

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        m = fmpq_mat(n, n)
        for i in range(n):
            m[i, i] = ONE
        return ExactMatrix(m)

    @staticmethod
    def from_dict(rows: int, cols: int, entries: dict) -> "ExactMatrix":
        """Build from a sparse {(i, j): scalar} mapping."""
        re = [ZERO] * (rows * cols)
        im = None
        for (i, j), v in entries.items():
            a, b = _split(v)
            re[i * cols + j] = a
            if b != 0:
                if im is None:
                    im = [ZERO] * (rows * cols)
                im[i * cols + j] = b
        return ExactMatrix(fmpq_mat(rows, cols, re), None if im is None else fmpq_mat(rows, cols, im))

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "ExactMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        ent = {}
        for i, row in enumerate(rows):
            if len(row) != c:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v != 0:
                    ent[(i, j)] = v
        return ExactMatrix.from_dict(r, c, ent)

    @staticmethod
    def column(values: Sequence) -> "ExactMatrix":
        return ExactMatrix.from_rows([[v] for v in values]) if len(values) else ExactMatrix.zeros(0, 1)

    @staticmethod
    def hstack(mats: Sequence["ExactMatrix"], rows: int | None = None) -> "ExactMatrix":
        if not mats:
            return ExactMatrix.zeros(rows or 0, 0)
        r = mats[0].rows
        cols = sum(m.cols for m in mats)
        ent = {}
        off = 0
        for m in mats:
            if m.rows != r:
                raise ValueError("hstack row mismatch")
            for i, j, v in m.nonzeros():
                ent[(i, j + off)] = v
            off += m.cols
        return ExactMatrix.from_dict(r, cols, ent)

    @staticmethod
    def vstack(mats: Sequence["ExactMatrix"], cols: int | None = None) -> "ExactMatrix":
        if not mats:
            return ExactMatrix.zeros(0, cols or 0)
        return ExactMatrix.hstack([m.T for m in mats]).T

    # basic properties -------------------------------------------------
    @property
    def rows(self) -> int:
        return self.re.nrows()

    @property
    def cols(self) -> int:
        return self.re.ncols()

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_real(self) -> bool:
        return self.im is None

    def _im(self) -> fmpq_mat:
        return self.im if self.im is not None else fmpq_mat(self.rows, self.cols)

    def __getitem__(self, ij) -> QI:
        i, j = ij
        return QI(self.re[i, j], self.im[i, j] if self.im is not None else ZERO)

    def entries(self) -> list[list[QI]]:
        re = self.re.tolist()
        if self.im is None:
            return [[QI(x) for x in row] for row in re]
        im = self.im.tolist()
        return [[QI(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(re, im)]

    def nonzeros(self):
        """Yield (i, j, value) for nonzero entries in row-major order."""
        re = self.re.entries()
        c = self.cols
        if self.im is None:
            for k, a in enumerate(re):
                if a != 0:
                    yield k // c, k % c, QI(a)
        else:
            im = self.im.entries()
            for k, (a, b) in enumerate(zip(re, im)):
                if a != 0 or b != 0:
                    yield k // c, k % c, QI(a, b)

    def col(self, j: int) -> list[QI]:
        return [self[i, j] for i in range(self.rows)]

    def col_matrix(self, j: int) -> "ExactMatrix":
        return self.submatrix(range(self.rows), [j])

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "ExactMatrix":
        rows, cols = list(rows), list(cols)
        re = self.re.tolist()
        r = fmpq_mat(len(rows), len(cols), [re[i][j] for i in rows for j in cols])
        im = None
        if self.im is not None:
            imv = self.im.tolist()
            im = fmpq_mat(len(rows), len(cols), [imv[i][j] for i in rows for j in cols])
        return ExactMatrix(r, im)

    def is_zero(self) -> bool:
        return _is_zero_mat(self.re) and (self.im is None or _is_zero_mat(self.im))

    # arithmetic -------------------------------------------------------
    def __add__(self, o: "ExactMatrix") -> "ExactMatrix":
        _same_shape(self, o)
        im = None
        if self.im is not None or o.im is not None:
            im = self._im() + o._im()
        return ExactMatrix(self.re + o.re, im)

    def __sub__(self, o: "ExactMatrix") -> "ExactMatrix":
        _same_shape(self, o)
        im = None
        if self.im is not None or o.im is not None:
            im = self._im() - o._im()
        return ExactMatrix(self.re - o.re, im)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(-self.re, None if self.im is None else -self.im)

    def __matmul__(self, o: "ExactMatrix") -> "ExactMatrix":
        if self.cols != o.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {o.shape}")
        if self.im is None and o.im is None:
            return ExactMatrix(self.re * o.re)
        if self.im is None:
            return ExactMatrix(self.re * o.re, self.re * o.im)
        if o.im is None:
            return ExactMatrix(self.re * o.re, self.im * o.re)
        return ExactMatrix(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def scale(self, s) -> "ExactMatrix":
        a, b = _split(s)
        if b == 0:
            return ExactMatrix(self.re * a, None if self.im is None else self.im * a)
        re = self.re * a - self._im() * b
        im = self.re * b + self._im() * a
        return ExactMatrix(re, im)

    def __mul__(self, s) -> "ExactMatrix":
        return self.scale(s)

    __rmul__ = __mul__

    def conj(self) -> "ExactMatrix":
        return ExactMatrix(self.re, None if self.im is None else -self.im)

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.re.transpose(), None if self.im is None else self.im.transpose())

    @property
    def H(self) -> "ExactMatrix":
        return self.conj().T

    def __eq__(self, o) -> bool:
        if not isinstance(o, ExactMatrix) or self.shape != o.shape:
            return False
        return self.re == o.re and self._im() == o._im()

    def __hash__(self):
        return hash((self.shape, tuple(self.re.entries())))

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}{'' if self.is_real else ', complex'})"

    def to_complex_array(self):
        import numpy as np

        out = np.zeros(self.shape, dtype=complex)
        for i, j, v in self.nonzeros():
            out[i, j] = complex(v)
        return out

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[i, j, v.to_json()] for i, j, v in self.nonzeros()],
        }


def _is_zero_mat(m: fmpq_mat) -> bool:
    return all(x == 0 for x in m.entries())


def _same_shape(a: ExactMatrix, b: ExactMatrix):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    ent = {}
    bnz = list(b.nonzeros())
    br, bc = b.shape
    for i, j, x in a.nonzeros():
        for k, l, y in bnz:
            ent[(i * br + k, j * bc + l)] = x * y
    return ExactMatrix.from_dict(a.rows * br, a.cols * bc, ent)


def block_diag(mats: Sequence[ExactMatrix]) -> ExactMatrix:
    r = sum(m.rows for m in mats)
    c = sum(m.cols for m in mats)
    ent = {}
    ro = co = 0
    for m in mats:
        for i, j, v in m.nonzeros():
            ent[(i + ro, j + co)] = v
        ro += m.rows
        co += m.cols
    return ExactMatrix.from_dict(r, c, ent)


# ----------------------------------------------------------------------
# elimination
# ----------------------------------------------------------------------

def rref(m: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    if m.rows == 0 or m.cols == 0:
        return ExactMatrix.zeros(m.rows, m.cols), []
    if m.is_real:
        r, rank = m.re.rref()
        ents = r.tolist()
        pivots = []
        for i in range(rank):
            row = ents[i]
            for j in range(m.cols):
                if row[j] != 0:
                    pivots.append(j)
                    break
        return ExactMatrix(r), pivots
    return _rref_complex(m)


def _rref_complex(m: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    # Gauss-Jordan: leftmost column with a nonzero entry at or below the
    # current row, pivot on the first (lowest-index) such row.
    rows, cols = m.shape
    re = m.re.tolist()
    im = m._im().tolist()
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = None
        for i in range(r, rows):
            if re[i][c] != 0 or im[i][c] != 0:
                p = i
                break
        if p is None:
            continue
        re[r], re[p] = re[p], re[r]
        im[r], im[p] = im[p], im[r]
        a, b = re[r][c], im[r][c]
        n = a * a + b * b
        ia, ib = a / n, -b / n
        rr, ri = re[r], im[r]
        for j in range(c, cols):
            x, y = rr[j], ri[j]
            rr[j] = x * ia - y * ib
            ri[j] = x * ib + y * ia
        for i in range(rows):
            if i == r:
                continue
            fa, fb = re[i][c], im[i][c]
            if fa == 0 and fb == 0:
                continue
            xr, xi = re[i], im[i]
            for j in range(c, cols):
                x, y = rr[j], ri[j]
                if x == 0 and y == 0:
                    continue
                xr[j] -= fa * x - fb * y
                xi[j] -= fa * y + fb * x
        pivots.append(c)
        r += 1
    flat_re = [x for row in re for x in row]
    flat_im = [x for row in im for x in row]
    return ExactMatrix(fmpq_mat(rows, cols, flat_re), fmpq_mat(rows, cols, flat_im)), pivots


def rank(m: ExactMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.is_real:
        return m.re.rank()
    return len(rref(m)[1])


class Subspace:
    """A subspace of Q(i)^n given by linearly independent basis columns."""

    __slots__ = ("ambient_dim", "matrix")

    def __init__(self, ambient_dim: int, matrix: ExactMatrix | None = None, check: bool = False):
        self.ambient_dim = ambient_dim
        if matrix is None:
            matrix = ExactMatrix.zeros(ambient_dim, 0)
        if matrix.rows != ambient_dim:
            raise ValueError("basis vectors have the wrong length")
        if check and rank(matrix) != matrix.cols:
            raise ValueError("basis vectors are linearly dependent")
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.matrix.cols

    @property
    def basis(self) -> list[ExactMatrix]:
        return [self.matrix.col_matrix(j) for j in range(self.dim)]

    def contains(self, v: ExactMatrix) -> bool:
        if v.cols == 0:
            return True
        return rank(ExactMatrix.hstack([self.matrix, v])) == self.dim

    def coords(self, v: ExactMatrix) -> ExactMatrix | None:
        """Coordinates of the columns of v in this basis, or None."""
        x = solve(self.matrix, v)
        return x

    def __eq__(self, o) -> bool:
        return (isinstance(o, Subspace) and o.ambient_dim == self.ambient_dim and o.dim == self.dim
                and self.contains(o.matrix))

    def __repr__(self):
        return f"Subspace(dim {self.dim} in {self.ambient_dim})"

    @staticmethod
    def full(n: int) -> "Subspace":
        return Subspace(n, ExactMatrix.identity(n))

    @staticmethod
    def zero(n: int) -> "Subspace":
        return Subspace(n)


def kernel_from_rref(r: ExactMatrix, pivots: list[int], cols: int) -> ExactMatrix:
    """Kernel basis: one vector per free column f, equal to 1 at f.

    The 1 at f is the last nonzero entry of that vector and every other basis
    vector vanishes at f, so the basis matrix is in reduced column echelon form.
    """
    pset = set(pivots)
    free = [j for j in range(cols) if j not in pset]
    ents = r.entries() if pivots else []
    data = {}
    for k, f in enumerate(free):
        data[(f, k)] = ONE
        for i, p in enumerate(pivots):
            v = ents[i][f]
            if v:
                data[(p, k)] = -v
    return ExactMatrix.from_dict(cols, len(free), data)


def rank_and_kernel(m: ExactMatrix) -> tuple[int, Subspace]:
    r, piv = rref(m)
    return len(piv), Subspace(m.cols, kernel_from_rref(r, piv, m.cols))


def kernel(m: ExactMatrix) -> Subspace:
    return rank_and_kernel(m)[1]


def solve(m: ExactMatrix, b: ExactMatrix) -> ExactMatrix | None:
    """Pivot-only solution of m x = b (b may have several columns), or None."""
    if b.rows != m.rows:
        raise ValueError("right-hand side has the wrong length")
    n = m.cols
    aug = ExactMatrix.hstack([m, b]) if m.cols else b
    r, piv = rref(aug)
    if any(p >= n for p in piv):
        return None
    ents = r.entries()
    data = {}
    for i, p in enumerate(piv):
        for k in range(b.cols):
            v = ents[i][n + k]
            if v:
                data[(p, k)] = v
    return ExactMatrix.from_dict(n, b.cols, data)


def span(m: ExactMatrix) -> Subspace:
    """Column space of m with a canonical basis (rows of the rref of m^T)."""
    if m.cols == 0:
        return Subspace(m.rows)
    r, piv = rref(m.T)
    k = len(piv)
    if k == 0:
        return Subspace(m.rows)
    return Subspace(m.rows, r.submatrix(range(k), range(m.rows)).T)


def span_vectors(n: int, vectors: Sequence[ExactMatrix]) -> Subspace:
    if not vectors:
        return Subspace(n)
    return span(ExactMatrix.hstack(list(vectors)))


def sum_spaces(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    return span(ExactMatrix.hstack([a.matrix, b.matrix]))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Exact intersection, via the kernel of [A | -B]."""
    _same_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace(a.ambient_dim)
    k = kernel(ExactMatrix.hstack([a.matrix, -b.matrix]))
    if k.dim == 0:
        return Subspace(a.ambient_dim)
    coeffs = k.matrix.submatrix(range(a.dim), range(k.dim))
    return span(a.matrix @ coeffs)


def intersect_kernels(mats: Sequence[ExactMatrix], n: int) -> Subspace:
    """Common kernel of a family of matrices with n columns."""
    mats = [m for m in mats if m.rows]
    if not mats:
        return Subspace.full(n)
    return kernel(ExactMatrix.vstack(mats))


def _same_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")


def complement_basis(sub: Subspace) -> list[int]:
    """Standard coordinates completing a basis of sub to the ambient space."""
    if sub.dim == 0:
        return list(range(sub.ambient_dim))
    _, piv = rref(sub.matrix.T)
    ps = set(piv)
    return [j for j in range(sub.ambient_dim) if j not in ps]


def quotient_coords(ambient_dim: int, killed: Subspace) -> tuple[int, ExactMatrix, ExactMatrix]:
    """Coordinates on ambient/killed.

    The section sends quotient coordinates to the standard basis vectors that
    complement the killed space; project is the matching left inverse that
    annihilates the killed space.
    """
    if killed.ambient_dim != ambient_dim:
        raise ValueError("killed subspace has the wrong ambient dimension")
    comp = complement_basis(killed)
    q = len(comp)
    section = ExactMatrix.from_dict(ambient_dim, q, {(c, k): ONE for k, c in enumerate(comp)})
    if q == 0:
        return 0, ExactMatrix.zeros(0, ambient_dim), section
    full = ExactMatrix.hstack([section, killed.matrix])
    inv = solve(full, ExactMatrix.identity(ambient_dim))
    project = inv.submatrix(range(q), range(ambient_dim))
    return q, project, section


def restrict(m: ExactMatrix, source: Subspace, target: Subspace) -> ExactMatrix | None:
    """Matrix of m from source basis to target basis, or None if m(source) is not in target."""
    img = m @ source.matrix
    if img.cols == 0:
        return ExactMatrix.zeros(target.dim, 0)
    if target.dim == 0:
        return ExactMatrix.zeros(0, source.dim) if img.is_zero() else None
    return solve(target.matrix, img)


def charpoly_coeffs(m: ExactMatrix) -> list[QI]:
    """Coefficients of det(tI - m), highest degree first (Faddeev-LeVerrier)."""
    n = m.rows
    if m.cols != n:
        raise ValueError("square matrix required")
    coeffs = [QI(1)]
    mk = ExactMatrix.zeros(n, n)
    ident = ExactMatrix.identity(n)
    c = QI(1)
    for k in range(1, n + 1):
        mk = m @ (mk + ident.scale(c))
        tr = QI(0)
        for i in range(n):
            tr = tr + mk[i, i]
        c = -tr / QI(k)
        coeffs.append(c)
    return coeffs
