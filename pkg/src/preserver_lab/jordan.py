"""Jordan product, idempotency classes and the rank-one characterizations.

The ``lemma_*`` functions are consistency checkers: each evaluates both sides
of an equivalence on one concrete instance and reports whether they agree.
A ``False`` result means either a library bug or a falsified statement.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .matrix import (
    DimensionError,
    Matrix,
    Vector,
    basis_vector,
    dot,
    is_zero_vector,
    outer,
    vec,
    vscale,
)
from .scalar import Scalar, as_scalar

__all__ = [
    "RankOneOp",
    "OpClass",
    "Split",
    "jordan",
    "is_idempotent",
    "is_nonzero_idempotent",
    "classify",
    "is_orthogonal",
    "observation_split",
    "lemma_f_nonzero",
    "lemma_f_zero",
    "lemma_zero_jordan",
    "eigen_probe",
    "eigen_probe_family",
    "is_zero_via_probes",
    "is_identity_via_probes",
    "zero_probe_family",
]


@dataclass(frozen=True)
class RankOneOp:
    """``x (x) f``: the matrix ``x f^T``, acting as ``z -> f(z) x``."""

    x: Vector
    f: Vector

    def __post_init__(self):
        object.__setattr__(self, "x", vec(self.x))
        object.__setattr__(self, "f", vec(self.f))
        if len(self.x) != len(self.f):
            raise DimensionError("x and f must have equal length")
        if is_zero_vector(self.x) or is_zero_vector(self.f):
            raise ValueError("rank-one operator needs nonzero x and f")

    @property
    def n(self) -> int:
        return len(self.x)

    def to_matrix(self) -> Matrix:
        return outer(self.x, self.f)

    def trace(self) -> Scalar:
        """``f(x)``."""
        return dot(self.f, self.x)

    @classmethod
    def from_matrix(cls, m: Matrix) -> "RankOneOp":
        """Factor a rank-one matrix as ``x (x) f`` with x a column of m."""
        if m.rank() != 1:
            raise ValueError("matrix is not of rank one")
        cols = m.columns()
        c = next(j for j, col in enumerate(cols) if any(col))
        x = cols[c]
        r = next(i for i, v in enumerate(x) if v)
        inv = x[r].inverse()
        f = tuple(e * inv for e in m.row(r))
        return cls(x, f)

    def to_json(self) -> dict:
        return {"x": [str(v) for v in self.x], "f": [str(v) for v in self.f]}

    @classmethod
    def from_json(cls, data: dict) -> "RankOneOp":
        return cls([as_scalar(str(v)) for v in data["x"]], [as_scalar(str(v)) for v in data["f"]])


class Tag(str, enum.Enum):
    ZERO = "Zero"
    IDEMPOTENT = "Idempotent"
    ANTI_IDEMPOTENT = "AntiIdempotent"
    TRIPOTENT = "Tripotent"
    NILPOTENT_RANK_ONE = "NilpotentRankOne"
    OTHER = "Other"


@dataclass(frozen=True)
class OpClass:
    tag: Tag
    rank: int | None = None

    def __str__(self):
        if self.rank is None:
            return self.tag.value
        return "%s(%d)" % (self.tag.value, self.rank)


class Split(str, enum.Enum):
    NONZERO_IDEM = "NonzeroIdem"
    ZERO_PRODUCT = "ZeroProduct"
    NOT_IDEM = "NotIdem"


def jordan(a: Matrix, b: Matrix) -> Matrix:
    """``(ab + ba) / 2``."""
    if a.n != b.n:
        raise DimensionError("dimension mismatch: %d vs %d" % (a.n, b.n))
    return ((a @ b) + (b @ a)).scale(Scalar(1, 0) / 2)


def is_idempotent(m: Matrix) -> bool:
    return m @ m == m


def is_nonzero_idempotent(m: Matrix) -> bool:
    return not m.is_zero() and m @ m == m


def classify(m: Matrix) -> OpClass:
    if m.is_zero():
        return OpClass(Tag.ZERO)
    sq = m @ m
    if sq == m:
        return OpClass(Tag.IDEMPOTENT, m.rank())
    if sq == -m:
        return OpClass(Tag.ANTI_IDEMPOTENT, m.rank())
    if sq @ m == m:
        return OpClass(Tag.TRIPOTENT)
    if sq.is_zero() and m.rank() == 1:
        return OpClass(Tag.NILPOTENT_RANK_ONE)
    return OpClass(Tag.OTHER)


def is_orthogonal(p: Matrix, q: Matrix) -> bool:
    """``pq = qp = 0`` for idempotents p, q."""
    if not (is_idempotent(p) and is_idempotent(q)):
        raise ValueError("orthogonality is defined for idempotents only")
    return (p @ q).is_zero() and (q @ p).is_zero()


def observation_split(a: Matrix, x: Matrix) -> Split:
    """Three-way split of ``a o x`` using only idempotency membership tests."""
    if a.is_zero() or x.is_zero():
        raise ValueError("observation_split needs nonzero operands")
    p = jordan(a, x)
    plus = is_idempotent(p)
    minus = is_idempotent(-p)
    if plus and minus:
        return Split.ZERO_PRODUCT
    if plus:
        return Split.NONZERO_IDEM
    return Split.NOT_IDEM


def _check_nonzero(a: Matrix):
    if a.is_zero():
        raise ValueError("operator must be nonzero")


def lemma_f_nonzero(a: Matrix, r: RankOneOp) -> bool:
    """A o (x(x)f) nonzero idempotent <=> Ax = x/f(x) or fA = f/f(x), for f(x) != 0."""
    _check_nonzero(a)
    fx = r.trace()
    if not fx:
        raise ValueError("lemma_f_nonzero needs f(x) != 0")
    lhs = is_nonzero_idempotent(jordan(a, r.to_matrix()))
    inv = fx.inverse()
    rhs = a.apply(r.x) == vscale(inv, r.x) or a.left_apply(r.f) == vscale(inv, r.f)
    return lhs == rhs


def lemma_f_zero(a: Matrix, r: RankOneOp) -> bool:
    """A o (x(x)f) nonzero idempotent <=> f(Ax) = 2 and f(A^2 x) = 0, for f(x) = 0."""
    _check_nonzero(a)
    if r.trace():
        raise ValueError("lemma_f_zero needs f(x) = 0")
    lhs = is_nonzero_idempotent(jordan(a, r.to_matrix()))
    ax = a.apply(r.x)
    rhs = dot(r.f, ax) == 2 and not dot(r.f, a.apply(ax))
    return lhs == rhs


def lemma_zero_jordan(a: Matrix, r: RankOneOp) -> bool:
    """A o (x(x)f) = 0 <=> Ax = 0 and fA = 0, for f(x) != 0."""
    _check_nonzero(a)
    if not r.trace():
        raise ValueError("lemma_zero_jordan needs f(x) != 0")
    lhs = jordan(a, r.to_matrix()).is_zero()
    rhs = is_zero_vector(a.apply(r.x)) and is_zero_vector(a.left_apply(r.f))
    return lhs == rhs


def eigen_probe_family(x: Sequence[Scalar], lam) -> list[RankOneOp]:
    """n rank-one operators ``x (x) f`` whose functionals affinely span ``{f : f(x) = 1/lam}``.

    One particular solution plus that solution shifted by each basis
    element of the annihilator of x.
    """
    lam = as_scalar(lam)
    if not lam:
        raise ValueError("eigen_probe needs lam != 0")
    x = vec(x)
    if is_zero_vector(x):
        raise ValueError("eigen_probe needs x != 0")
    n = len(x)
    k = next(i for i, v in enumerate(x) if v)
    target = lam.inverse()
    f0 = tuple(target / x[k] if i == k else Scalar() for i in range(n))
    family = [RankOneOp(x, f0)]
    # annihilator of x: g_j = e_j - (x_j / x_k) e_k for j != k
    for j in range(n):
        if j == k:
            continue
        shift = [Scalar() for _ in range(n)]
        shift[j] = Scalar(1)
        shift[k] = -x[j] / x[k]
        family.append(RankOneOp(x, tuple(a + b for a, b in zip(f0, shift))))
    return family


def eigen_probe(a: Matrix, x: Sequence[Scalar], lam) -> bool:
    """Decide ``Ax = lam x`` from Jordan-idempotency queries alone."""
    return all(is_nonzero_idempotent(jordan(a, r.to_matrix())) for r in eigen_probe_family(x, lam))


def zero_probe_family(n: int) -> list[Matrix]:
    """Rank-one idempotents and anti-idempotents ``+-e_i (x) f`` with f(e_i) = 1."""
    probes = []
    for i in range(n):
        e = basis_vector(n, i)
        fs = [e] + [tuple(a + b for a, b in zip(e, basis_vector(n, j))) for j in range(n) if j != i]
        for f in fs:
            p = outer(e, f)
            probes.append(p)
            probes.append(-p)
    return probes


def is_zero_via_probes(a: Matrix) -> bool:
    return all(is_idempotent(jordan(a, r)) for r in zero_probe_family(a.n))


def is_identity_via_probes(a: Matrix) -> bool:
    n = a.n
    return all(eigen_probe(a, basis_vector(n, i), 1) for i in range(n))
