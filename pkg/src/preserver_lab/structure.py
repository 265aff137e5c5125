"""Sylvester solving, tripotent splitting and the Jordan-block probe sets.

``TSetElement`` samples the similarity-invariant probe set built from rank-one
nilpotents, tripotents and conjugates ``S (J_k(lam) + 0) S^-1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from . import linalg
from .jordan import is_idempotent, is_nonzero_idempotent, is_orthogonal, jordan
from .matrix import (
    DimensionError,
    Matrix,
    Rng,
    direct_sum,
    jordan_block,
    outer,
    random_invertible,
    random_vector,
)
from .scalar import Scalar, as_scalar

__all__ = [
    "SylvesterError",
    "TripotentParts",
    "TKind",
    "TSetElement",
    "DEFAULT_LAMBDAS",
    "charpoly",
    "poly_eval_matrix",
    "sylvester_resultant",
    "solve_sylvester",
    "tripotent_decompose",
    "corner_probe",
    "corner_trace_check",
    "default_corner_samples",
    "build_t_set",
    "random_tripotent",
    "random_nilpotent_rank_one",
    "jordan_conjugate",
]

DEFAULT_LAMBDAS = (Scalar(1), Scalar(-1), Scalar(2), Scalar(1) / 2, Scalar(0, 1))


class SylvesterError(ArithmeticError):
    """``aX + Xb = c`` has no unique solution."""


def charpoly(a: Matrix) -> list[Scalar]:
    """Coefficients ``[1, c_1, ..., c_n]`` of ``det(tI - a)`` (Faddeev-LeVerrier)."""
    n = a.n
    coeffs = [Scalar(1)]
    ident = Matrix.identity(n)
    m = Matrix.zeros(n)
    for k in range(1, n + 1):
        m = a @ m + ident.scale(coeffs[-1])
        coeffs.append(-(a @ m).trace() / k)
    return coeffs


def poly_eval_matrix(coeffs: Sequence[Scalar], m: Matrix) -> Matrix:
    """Horner evaluation of a polynomial (highest degree first) at a matrix."""
    acc = Matrix.zeros(m.n)
    ident = Matrix.identity(m.n)
    for c in coeffs:
        acc = acc @ m + ident.scale(c)
    return acc


def sylvester_resultant(a: Matrix, b: Matrix) -> Scalar:
    """``res(char_a(t), char_{-b}(t))``, zero iff spec(a) meets spec(-b).

    For monic char_a the resultant equals ``det char_a(-b)``, which avoids
    building the Sylvester matrix.
    """
    return poly_eval_matrix(charpoly(a), -b).det()


def solve_sylvester(a: Matrix, b: Matrix, c: Matrix) -> Matrix:
    """Unique X with ``aX + Xb = c`` via the Kronecker system ``(I (x) a + b^T (x) I) vec X = vec c``."""
    n = a.n
    if b.n != n or c.n != n:
        raise DimensionError("solve_sylvester needs equal dimensions")
    if not sylvester_resultant(a, b):
        raise SylvesterError("spectra of a and -b intersect; no unique solution")
    size = n * n
    zero = Scalar()
    rows = [[zero] * size for _ in range(size)]
    # column-major vec: X[i, j] sits at index j*n + i
    for j in range(n):
        for i in range(n):
            r = j * n + i
            for k in range(n):
                if a[i, k]:
                    rows[r][j * n + k] = rows[r][j * n + k] + a[i, k]
                if b[k, j]:
                    rows[r][k * n + i] = rows[r][k * n + i] + b[k, j]
    rhs = [c[i, j] for j in range(n) for i in range(n)]
    sol = linalg.solve(rows, rhs)
    if sol is None:
        raise SylvesterError("vectorized system inconsistent")
    x = Matrix([[sol[j * n + i] for j in range(n)] for i in range(n)])
    if a @ x + x @ b != c:
        raise SylvesterError("substitution check failed")
    return x


@dataclass(frozen=True)
class TripotentParts:
    p: Matrix
    q: Matrix


def tripotent_decompose(a: Matrix) -> TripotentParts:
    """Orthogonal idempotents p, q with ``a = p - q``."""
    sq = a @ a
    if sq @ a != a:
        raise ValueError("tripotent_decompose needs a^3 = a")
    half = Scalar(1) / 2
    p = (sq + a).scale(half)
    q = (sq - a).scale(half)
    if not (is_idempotent(p) and is_idempotent(q) and is_orthogonal(p, q) and p - q == a):
        raise ArithmeticError("tripotent parts failed verification")
    return TripotentParts(p, q)


def _block_matrix(n: int, k: int, x: Matrix, r_block) -> Matrix:
    rows = [[Scalar() for _ in range(n)] for _ in range(n)]
    for i in range(k):
        for j in range(k):
            rows[i][j] = x[i, j]
        for j in range(n - k):
            rows[i][k + j] = as_scalar(r_block[i][j])
    return Matrix(rows)


def corner_probe(n: int, x_block: Matrix, r_block) -> Matrix:
    """``T_R = [[X, R], [0, 0]]`` with X of size k and R of size k x (n-k)."""
    return _block_matrix(n, x_block.n, x_block, r_block)


def _zero_block(k: int, m: int):
    return [[Scalar() for _ in range(m)] for _ in range(k)]


def default_corner_samples(a: Matrix, k: int) -> list:
    """R = 0, every unit block E_ij, and trace-shift blocks.

    A trace-shift block ``t E_ij`` with ``t = 1 / (2 (A21)_ji)`` moves the trace
    of ``a o T_R`` by 1/2, so it exposes any nonzero entry of A21.
    """
    n = a.n
    m = n - k
    samples = [_zero_block(k, m)]
    for i in range(k):
        for j in range(m):
            blk = _zero_block(k, m)
            blk[i][j] = Scalar(1)
            samples.append(blk)
    for i in range(k):
        for j in range(m):
            entry = a[k + j, i]
            if entry:
                blk = _zero_block(k, m)
                blk[i][j] = (entry * 2).inverse()
                samples.append(blk)
    return samples


def corner_trace_check(a: Matrix, x_block: Matrix, k: int, r_samples=None) -> dict:
    """Evaluate the corner-block lemma on one instance.

    ``all_probes_idem`` records whether ``a o T_R`` is a nonzero idempotent for
    every sampled R; ``a21_zero`` and ``corner_idem`` are the conclusions read
    off directly; ``implication_holds`` is the lemma's claim on this instance.
    """
    n = a.n
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    if x_block.n != k or x_block.is_zero():
        raise ValueError("x_block must be a nonzero k x k matrix")
    if r_samples is None:
        r_samples = default_corner_samples(a, k)
    failing = None
    for r in r_samples:
        if len(r) != k or any(len(row) != n - k for row in r):
            raise DimensionError("R samples must be k x (n-k)")
        if linalg.rank([[as_scalar(v) for v in row] for row in r]) > 1:
            raise ValueError("R samples must have rank at most one")
        if not is_nonzero_idempotent(jordan(a, corner_probe(n, x_block, r))):
            failing = r
            break
    a21_zero = all(not a[i, j] for i in range(k, n) for j in range(k))
    corner_idem = is_nonzero_idempotent(jordan(a.sub(0, k), x_block))
    all_idem = failing is None
    return {
        "all_probes_idem": all_idem,
        "a21_zero": a21_zero,
        "corner_idem": corner_idem,
        "implication_holds": (not all_idem) or (a21_zero and corner_idem),
        "failing_r": failing,
        "samples": len(r_samples),
    }


class TKind(str, enum.Enum):
    NILPOTENT1 = "Nilpotent1"
    TRIPOTENT = "Tripotent"
    JORDAN_CONJUGATE = "JordanConjugate"


@dataclass(frozen=True)
class TSetElement:
    kind: TKind
    matrix: Matrix
    k: int | None = None
    lam: Scalar | None = None
    s: Matrix | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "matrix": self.matrix.to_json()}
        if self.kind is TKind.JORDAN_CONJUGATE:
            out.update(k=self.k, lam=str(self.lam), s=self.s.to_json())
        return out


def random_nilpotent_rank_one(n: int, rng: Rng) -> Matrix:
    """``x (x) f`` with ``f(x) = 0``."""
    while True:
        x = random_vector(n, rng, bound=4)
        f = list(random_vector(n, rng, bound=4))
        k = next(i for i, v in enumerate(x) if v)
        # shift f along e_k so that f(x) = 0
        s = sum((fi * xi for fi, xi in zip(f, x)), Scalar())
        f[k] = f[k] - s / x[k]
        if any(f):
            return outer(x, f)


def random_tripotent(n: int, plus: int, minus: int, rng: Rng) -> Matrix:
    """``S (I_plus + -I_minus + 0) S^-1``."""
    if plus < 0 or minus < 0 or plus + minus > n:
        raise ValueError("invalid tripotent signature")
    core = Matrix.diag([1] * plus + [-1] * minus + [0] * (n - plus - minus))
    s = random_invertible(n, rng)
    return s @ core @ s.inverse()


def jordan_conjugate(n: int, k: int, lam, s: Matrix) -> Matrix:
    """``S (J_k(lam) + 0_{n-k}) S^-1``."""
    core = jordan_block(k, lam)
    if k < n:
        core = direct_sum(core, Matrix.zeros(n - k))
    return s @ core @ s.inverse()


def max_jordan_k(n: int) -> int:
    return 2 if n == 3 else 3


def build_t_set(n: int, lambdas=DEFAULT_LAMBDAS, rng: Rng | None = None, count: int = 1) -> list[TSetElement]:
    """``count`` samples of each probe shape.

    Shapes: rank-one nilpotent; tripotent for every signature (p, q) with
    0 < p + q <= n; and ``S (J_k(lam) + 0) S^-1`` for each lam and each k up to
    3 (up to 2 when n = 3).
    """
    if n < 3:
        raise ValueError("build_t_set needs n >= 3")
    lambdas = [as_scalar(v) for v in lambdas]
    if any(not v for v in lambdas):
        raise ValueError("lambdas must be nonzero")
    rng = rng or Rng(0)
    out: list[TSetElement] = []
    for _ in range(count):
        out.append(TSetElement(TKind.NILPOTENT1, random_nilpotent_rank_one(n, rng)))
    for total in range(1, n + 1):
        for plus in range(total + 1):
            for _ in range(count):
                out.append(TSetElement(TKind.TRIPOTENT, random_tripotent(n, plus, total - plus, rng)))
    for lam in lambdas:
        for k in range(1, max_jordan_k(n) + 1):
            for _ in range(count):
                s = random_invertible(n, rng)
                out.append(
                    TSetElement(TKind.JORDAN_CONJUGATE, jordan_conjugate(n, k, lam, s), k, lam, s)
                )
    return out
