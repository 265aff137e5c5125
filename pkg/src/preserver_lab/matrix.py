"""Dense square matrices over Q(i), vectors, and seeded test-instance generators."""

from __future__ import annotations

import random
from typing import Iterable, Sequence

from gmpy2 import mpq

from . import linalg
from .scalar import Q0, Q1, Scalar, as_scalar, format_scalar, parse_scalar

__all__ = [
    "Matrix",
    "Vector",
    "Rng",
    "DimensionError",
    "SingularMatrixError",
    "mat_mul",
    "mat_add",
    "mat_scale",
    "rank",
    "inverse",
    "jordan_block",
    "direct_sum",
    "outer",
    "vec",
    "basis_vector",
    "dot",
    "independent",
    "random_scalar",
    "random_vector",
    "random_matrix",
    "random_invertible",
    "random_idempotent",
]

Vector = tuple  # tuple[Scalar, ...]


class DimensionError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


def _grid(rows) -> tuple[tuple, tuple, bool]:
    re_rows, im_rows = [], []
    real = True
    for row in rows:
        re_row, im_row = [], []
        for e in row:
            s = as_scalar(e)
            re_row.append(s.re)
            im_row.append(s.im)
            if s.im:
                real = False
        re_rows.append(tuple(re_row))
        im_rows.append(tuple(im_row))
    return tuple(re_rows), tuple(im_rows), real


def _zero_grid(n):
    row = (Q0,) * n
    return (row,) * n


class Matrix:
    """Immutable n x n matrix of Gaussian rationals.

    Real and imaginary parts are kept as separate ``mpq`` grids; products of
    real matrices skip the imaginary half entirely.
    """

    __slots__ = ("n", "_re", "_im", "_real", "_hash")

    def __init__(self, rows: Iterable[Iterable] = ()):
        rows = [list(r) for r in rows]
        n = len(rows)
        if n == 0:
            raise DimensionError("matrix dimension must be at least 1")
        if any(len(r) != n for r in rows):
            raise DimensionError("matrix must be square")
        self.n = n
        self._re, self._im, self._real = _grid(rows)
        self._hash = None

    @classmethod
    def _from_parts(cls, re, im, real=None) -> "Matrix":
        obj = object.__new__(cls)
        obj.n = len(re)
        obj._re = re
        if real is None:
            real = not any(any(row) for row in im)
        obj._im = _zero_grid(obj.n) if real else im
        obj._real = real
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def identity(cls, n: int) -> "Matrix":
        re = tuple(tuple(Q1 if i == j else Q0 for j in range(n)) for i in range(n))
        return cls._from_parts(re, _zero_grid(n), True)

    @classmethod
    def zeros(cls, n: int) -> "Matrix":
        return cls._from_parts(_zero_grid(n), _zero_grid(n), True)

    @classmethod
    def unit(cls, n: int, i: int, j: int, value=1) -> "Matrix":
        """``value`` at (i, j), zero elsewhere (0-based)."""
        rows = [[0] * n for _ in range(n)]
        rows[i][j] = value
        return cls(rows)

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "Matrix":
        n = len(cols)
        return cls([[cols[j][i] for j in range(n)] for i in range(n)])

    # element access
    def __getitem__(self, key) -> Scalar:
        i, j = key
        return Scalar._raw(self._re[i][j], self._im[i][j])

    def rows(self) -> list[list[Scalar]]:
        return [
            [Scalar._raw(a, b) for a, b in zip(ra, rb)]
            for ra, rb in zip(self._re, self._im)
        ]

    def row(self, i: int) -> Vector:
        return tuple(Scalar._raw(a, b) for a, b in zip(self._re[i], self._im[i]))

    def column(self, j: int) -> Vector:
        return tuple(Scalar._raw(self._re[i][j], self._im[i][j]) for i in range(self.n))

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.n)]

    def is_real(self) -> bool:
        return self._real

    # comparisons
    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.n == other.n and self._re == other._re and self._im == other._im

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._re, self._im))
        return self._hash

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._re) and (
            self._real or not any(any(r) for r in self._im)
        )

    def is_identity(self) -> bool:
        return self == Matrix.identity(self.n)

    def is_scalar(self) -> bool:
        d = self[0, 0]
        return self == Matrix.identity(self.n).scale(d)

    def __repr__(self):
        body = "; ".join(
            ", ".join(format_scalar(a, b) for a, b in zip(ra, rb))
            for ra, rb in zip(self._re, self._im)
        )
        return "Matrix([%s])" % body

    def pretty(self) -> str:
        cells = [[str(e) for e in row] for row in self.rows()]
        width = max(len(c) for row in cells for c in row)
        return "\n".join("[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells)

    # arithmetic
    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError("expected Matrix, got %s" % type(other).__name__)
        if other.n != self.n:
            raise DimensionError("dimension mismatch: %d vs %d" % (self.n, other.n))

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        re = tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self._re, other._re))
        if self._real and other._real:
            return Matrix._from_parts(re, None, True)
        im = tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self._im, other._im))
        return Matrix._from_parts(re, im)

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        re = tuple(tuple(-a for a in r) for r in self._re)
        if self._real:
            return Matrix._from_parts(re, None, True)
        im = tuple(tuple(-a for a in r) for r in self._im)
        return Matrix._from_parts(re, im, False)

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        n = self.n
        bt_re = tuple(zip(*other._re))
        if self._real and other._real:
            re = tuple(
                tuple(_dot(ra, cb) for cb in bt_re) for ra in self._re
            )
            return Matrix._from_parts(re, None, True)
        bt_im = tuple(zip(*other._im))
        re_rows, im_rows = [], []
        for i in range(n):
            ar, ai = self._re[i], self._im[i]
            re_rows.append(tuple(_dot(ar, bt_re[j]) - _dot(ai, bt_im[j]) for j in range(n)))
            im_rows.append(tuple(_dot(ar, bt_im[j]) + _dot(ai, bt_re[j]) for j in range(n)))
        return Matrix._from_parts(tuple(re_rows), tuple(im_rows))

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self @ other
        s = as_scalar(other, strict=False)
        if s is None:
            return NotImplemented
        return self.scale(s)

    def __rmul__(self, other):
        s = as_scalar(other, strict=False)
        if s is None:
            return NotImplemented
        return self.scale(s)

    def __truediv__(self, other):
        s = as_scalar(other, strict=False)
        if s is None:
            return NotImplemented
        return self.scale(s.inverse())

    def scale(self, c) -> "Matrix":
        c = as_scalar(c)
        cr, ci = c.re, c.im
        if not ci:
            re = tuple(tuple(a * cr for a in r) for r in self._re)
            if self._real:
                return Matrix._from_parts(re, None, True)
            im = tuple(tuple(a * cr for a in r) for r in self._im)
            return Matrix._from_parts(re, im)
        re = tuple(
            tuple(a * cr - b * ci for a, b in zip(ra, rb)) for ra, rb in zip(self._re, self._im)
        )
        im = tuple(
            tuple(a * ci + b * cr for a, b in zip(ra, rb)) for ra, rb in zip(self._re, self._im)
        )
        return Matrix._from_parts(re, im)

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            return self.inverse() ** (-k)
        result = Matrix.identity(self.n)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def transpose(self) -> "Matrix":
        re = tuple(zip(*self._re))
        if self._real:
            return Matrix._from_parts(re, None, True)
        return Matrix._from_parts(re, tuple(zip(*self._im)), False)

    T = property(transpose)

    def conj(self) -> "Matrix":
        if self._real:
            return self
        im = tuple(tuple(-a for a in r) for r in self._im)
        return Matrix._from_parts(self._re, im, False)

    def trace(self) -> Scalar:
        return Scalar._raw(
            sum((self._re[i][i] for i in range(self.n)), Q0),
            sum((self._im[i][i] for i in range(self.n)), Q0),
        )

    def apply(self, x: Sequence[Scalar]) -> Vector:
        """Matrix-vector product ``M x``."""
        if len(x) != self.n:
            raise DimensionError("vector length %d, matrix dimension %d" % (len(x), self.n))
        return tuple(dot(r, x) for r in self.rows())

    def left_apply(self, f: Sequence[Scalar]) -> Vector:
        """Functional composed with the matrix, ``f M`` (the adjoint action)."""
        if len(f) != self.n:
            raise DimensionError("covector length %d, matrix dimension %d" % (len(f), self.n))
        return tuple(dot(f, c) for c in self.columns())

    # elimination-backed queries
    def rank(self) -> int:
        return linalg.rank(self.rows())

    def det(self) -> Scalar:
        return linalg.det(self.rows())

    def inverse(self) -> "Matrix":
        n = self.n
        rows = self.rows()
        aug = [r + [Scalar(Q1 if i == j else Q0) for j in range(n)] for i, r in enumerate(rows)]
        red, pivots = linalg.rref(aug)
        if len(pivots) < n or pivots[n - 1] != n - 1:
            raise SingularMatrixError("matrix is singular")
        return Matrix([r[n:] for r in red])

    def is_invertible(self) -> bool:
        return self.rank() == self.n

    def kernel(self) -> list[Vector]:
        """Basis of the right null space."""
        return [tuple(v) for v in linalg.nullspace(self.rows())]

    def left_kernel(self) -> list[Vector]:
        """Basis of ``{f : f M = 0}``."""
        return self.transpose().kernel()

    def column_space(self) -> list[Vector]:
        """Pivot columns, a basis of the image."""
        _, pivots = linalg.echelon(self.rows())
        return [self.column(c) for c in pivots]

    def block(self, r0: int, r1: int, c0: int, c1: int) -> list[list[Scalar]]:
        """Rectangular sub-block ``[r0:r1, c0:c1]`` as a list of rows."""
        return [row[c0:c1] for row in self.rows()[r0:r1]]

    def sub(self, r0: int, r1: int) -> "Matrix":
        """Square principal sub-block ``[r0:r1, r0:r1]``."""
        return Matrix(self.block(r0, r1, r0, r1))

    # serialisation
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [
                [format_scalar(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self._re, self._im)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Matrix":
        entries = data["entries"]
        m = cls([[_parse_entry(e) for e in row] for row in entries])
        if "n" in data and data["n"] != m.n:
            raise DimensionError("declared n=%s but entries are %dx%d" % (data["n"], m.n, m.n))
        return m


def _parse_entry(e):
    if isinstance(e, bool):
        raise TypeError("boolean is not a matrix entry")
    if isinstance(e, int):
        return Scalar(e)
    if isinstance(e, str):
        return parse_scalar(e)
    raise TypeError("matrix entries must be strings or integers, got %r" % (e,))


def _dot(a, b):
    s = Q0
    for x, y in zip(a, b):
        if x and y:
            s = s + x * y
    return s


# free-function façade


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return a @ b


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return a + b


def mat_scale(a: Matrix, c) -> Matrix:
    return a.scale(c)


def rank(m: Matrix) -> int:
    return m.rank()


def inverse(m: Matrix) -> Matrix:
    return m.inverse()


def jordan_block(k: int, lam) -> Matrix:
    """k x k upper triangular Jordan block with ``lam`` on the diagonal."""
    if k < 1:
        raise ValueError("Jordan block size must be at least 1")
    lam = as_scalar(lam)
    return Matrix([[lam if i == j else (1 if j == i + 1 else 0) for j in range(k)] for i in range(k)])


def direct_sum(a: Matrix, b: Matrix) -> Matrix:
    n = a.n + b.n
    rows = [[Scalar() for _ in range(n)] for _ in range(n)]
    for i, r in enumerate(a.rows()):
        rows[i][: a.n] = r
    for i, r in enumerate(b.rows()):
        rows[a.n + i][a.n:] = r
    return Matrix(rows)


# vectors


def vec(values: Iterable) -> Vector:
    return tuple(as_scalar(v) for v in values)


def basis_vector(n: int, i: int) -> Vector:
    return tuple(Scalar(Q1 if k == i else Q0) for k in range(n))


def dot(f: Sequence[Scalar], x: Sequence[Scalar]) -> Scalar:
    """Pairing ``f(x) = sum f_i x_i`` (no conjugation)."""
    re, im = Q0, Q0
    for a, b in zip(f, x):
        re += a.re * b.re - a.im * b.im
        im += a.re * b.im + a.im * b.re
    return Scalar._raw(re, im)


def vadd(x, y) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x, y) -> Vector:
    return tuple(a - b for a, b in zip(x, y))


def vscale(c, x) -> Vector:
    c = as_scalar(c)
    return tuple(c * a for a in x)


def is_zero_vector(x) -> bool:
    return not any(x)


def outer(x: Sequence[Scalar], f: Sequence[Scalar]) -> Matrix:
    """The rank-one matrix ``x f^T`` (``x (x) f`` acting as ``z -> f(z) x``)."""
    if len(x) != len(f):
        raise DimensionError("vector and functional lengths differ")
    x, f = vec(x), vec(f)
    return Matrix([[a * b for b in f] for a in x])


def independent(vectors: Sequence[Sequence[Scalar]]) -> bool:
    if not vectors:
        return True
    return linalg.rank([list(v) for v in vectors]) == len(vectors)


def in_span(v: Sequence[Scalar], basis: Sequence[Sequence[Scalar]]) -> bool:
    if is_zero_vector(v):
        return True
    if not basis:
        return False
    r = linalg.rank([list(b) for b in basis])
    return linalg.rank([list(b) for b in basis] + [list(v)]) == r


def span_coefficients(v, basis) -> list[Scalar] | None:
    """Coefficients c with ``sum c_k basis_k = v``, or ``None`` if v is outside the span."""
    n = len(v)
    rows = [[basis[k][i] for k in range(len(basis))] for i in range(n)]
    return linalg.solve(rows, list(v))


def solve_functional(constraints: Sequence[tuple[Sequence[Scalar], object]], n: int) -> Vector | None:
    """A functional f with ``f(v) = c`` for every ``(v, c)`` pair.

    Free coordinates are set to 0 (lowest-index pivots), which makes the
    choice deterministic. Returns ``None`` when the constraints conflict.
    """
    if not constraints:
        return tuple(Scalar() for _ in range(n))
    rows = [list(v) for v, _ in constraints]
    rhs = [as_scalar(c) for _, c in constraints]
    sol = linalg.solve(rows, rhs)
    return None if sol is None else tuple(sol)


# seeded generation


class Rng:
    """Seeded source of small Gaussian-rational test data.

    Wraps :class:`random.Random`; equal seeds give equal sample sequences.
    Instances are not meant to be shared across workers.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._random = random.Random(self.seed)
        self.counter = 0

    def randint(self, lo: int, hi: int) -> int:
        self.counter += 1
        return self._random.randint(lo, hi)

    def choice(self, seq):
        self.counter += 1
        return self._random.choice(seq)

    def sample(self, seq, k):
        self.counter += 1
        return self._random.sample(seq, k)

    def shuffle(self, seq):
        self.counter += 1
        self._random.shuffle(seq)

    def random(self) -> float:
        self.counter += 1
        return self._random.random()

    def spawn(self, index: int) -> "Rng":
        return Rng(self.seed ^ index)


def random_scalar(rng: Rng, complex_: bool = True, bound: int = 9, integer: bool = False) -> Scalar:
    def part():
        num = rng.randint(-bound, bound)
        if integer:
            return mpq(num)
        return mpq(num, rng.randint(1, bound))

    re = part()
    im = part() if complex_ and rng.random() < 0.5 else Q0
    return Scalar._raw(re, im)


def random_vector(n: int, rng: Rng, complex_: bool = True, nonzero: bool = True, **kw) -> Vector:
    while True:
        v = tuple(random_scalar(rng, complex_, **kw) for _ in range(n))
        if not nonzero or any(v):
            return v


def random_matrix(n: int, rng: Rng, complex_: bool = True, density: float = 1.0, **kw) -> Matrix:
    rows = [
        [random_scalar(rng, complex_, **kw) if rng.random() < density else 0 for _ in range(n)]
        for _ in range(n)
    ]
    return Matrix(rows)


def random_invertible(n: int, rng: Rng, complex_: bool = True, bound: int = 3) -> Matrix:
    """Invertible matrix with small entries; singular draws are retried."""
    while True:
        m = random_matrix(n, rng, complex_, bound=bound, integer=rng.random() < 0.7)
        if m.is_invertible():
            return m


def random_idempotent(n: int, r: int, rng: Rng, complex_: bool = True) -> Matrix:
    """Idempotent of exact rank r, built as ``T (I_r + 0) T^-1``."""
    if not 0 <= r <= n:
        raise ValueError("rank must lie in [0, n]")
    if r == 0:
        return Matrix.zeros(n)
    if r == n:
        return Matrix.identity(n)
    t = random_invertible(n, rng, complex_)
    core = Matrix.diag([1] * r + [0] * (n - r))
    return t @ core @ t.inverse()
