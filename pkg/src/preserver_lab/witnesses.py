"""Explicit witness constructions used by the preserver arguments.

Every builder validates the properties it promises before returning; a
failed property raises :class:`WitnessError` instead of handing back a bad
matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .jordan import RankOneOp, is_idempotent, jordan
from .matrix import (
    Matrix,
    basis_vector,
    dot,
    in_span,
    outer,
    solve_functional,
    vadd,
    vscale,
    vsub,
)
from .scalar import Scalar, as_scalar

__all__ = [
    "Witness",
    "WitnessError",
    "witness_square_zero",
    "witness_involution",
    "witness_distinguish_idem",
    "step_families",
    "embed_block",
]


class WitnessError(RuntimeError):
    """A precondition failed or a constructed witness did not verify."""


@dataclass(frozen=True)
class Witness:
    matrix: Matrix
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


def _finish(matrix: Matrix, checks: list[tuple[str, bool]]) -> Witness:
    failed = [name for name, ok in checks if not ok]
    if failed:
        raise WitnessError("witness failed checks: %s" % ", ".join(failed))
    return Witness(matrix, checks)


def witness_square_zero(a: Matrix) -> Witness:
    """B of rank <= 2 with ``a o B`` idempotent and ``B o B`` not, for a^2 = 0 != a."""
    n = a.n
    if a.is_zero() or not (a @ a).is_zero():
        raise WitnessError("witness_square_zero needs a^2 = 0 and a != 0")
    x = ax = None
    for i in range(n):
        e = basis_vector(n, i)
        v = a.apply(e)
        if not in_span(v, [e]):
            x, ax = e, v
            break
    if x is None:
        raise WitnessError("no basis vector with {x, Ax} independent")
    f = solve_functional([(x, 0), (ax, 2)], n)
    if f is None:
        raise WitnessError("functional system f(x)=0, f(Ax)=2 unsolvable")
    atf = a.left_apply(f)
    b = outer(x, atf) - outer(ax, f) + outer(x, f)
    return _finish(
        b,
        [
            ("rank<=2", b.rank() <= 2),
            ("jordan(A,B) idempotent", is_idempotent(jordan(a, b))),
            ("B^2 not idempotent", not is_idempotent(b @ b)),
        ],
    )


def witness_involution(a: Matrix) -> Witness:
    """B with ``a o B = 0`` and ``B o B`` not idempotent, for a nonscalar involution a."""
    n = a.n
    ident = Matrix.identity(n)
    if a @ a != ident or a == ident or a == -ident:
        raise WitnessError("witness_involution needs a^2 = I and a not in {I, -I}")
    q = (ident - a).scale(Scalar(1) / 2)
    ker_q = q.kernel()
    im_q = q.column_space()
    y = ker_q[0]
    z = im_q[0]
    g = solve_functional([(v, 0) for v in ker_q] + [(z, 2)], n)
    h = solve_functional([(v, 0) for v in im_q] + [(y, 1)], n)
    if g is None or h is None:
        raise WitnessError("functional systems for g, h unsolvable")
    b = outer(y, g) + outer(z, h)
    b2 = b @ b
    return _finish(
        b,
        [
            ("rank<=2", b.rank() <= 2),
            ("jordan(A,B) = 0", jordan(a, b).is_zero()),
            ("B^2 not idempotent", not is_idempotent(b2)),
            ("B^2 z = 2z", b2.apply(z) == vscale(2, z)),
        ],
    )


def _is_rank_one_idempotent(r: RankOneOp) -> bool:
    return r.trace() == 1


def witness_distinguish_idem(p: RankOneOp, q: RankOneOp) -> Witness:
    """Rank-one idempotent R with ``Q o R = 0`` while ``P o R`` is not idempotent.

    Preconditions: P != Q rank-one idempotents, ``Q o (I - P)`` idempotent and
    ``f1(x2) = 0`` or ``f2(x1) = 0`` (P = x1 (x) f1, Q = x2 (x) f2).
    """
    pm, qm = p.to_matrix(), q.to_matrix()
    n = p.n
    if q.n != n:
        raise WitnessError("dimension mismatch")
    if n < 3:
        raise WitnessError("construction needs n >= 3")
    if not (_is_rank_one_idempotent(p) and _is_rank_one_idempotent(q)):
        raise WitnessError("P and Q must be rank-one idempotents")
    if pm == qm:
        raise WitnessError("P and Q must differ")
    if not is_idempotent(jordan(qm, Matrix.identity(n) - pm)):
        raise WitnessError("Q o (I - P) is not idempotent")
    x1, f1, x2, f2 = p.x, p.f, q.x, q.f
    f1x2, f2x1 = dot(f1, x2), dot(f2, x1)
    if f1x2 and f2x1:
        raise WitnessError("need f1(x2) = 0 or f2(x1) = 0")
    # y in ker f1 and ker f2 is automatically outside span{x1, x2}
    ker = linalg.nullspace([list(f1), list(f2)])
    if not ker:
        raise WitnessError("ker f1 and ker f2 meet trivially")
    y = tuple(ker[0])
    g = solve_functional([(x1, 0), (x2, 0), (y, 1)], n)
    if g is None:
        raise WitnessError("functional g with g(x1)=g(x2)=0, g(y)=1 does not exist")
    if not f1x2:
        branch = "f1(x2)=0"
        u = vscale(Scalar(1) / 2, vsub(vadd(y, x1), vscale(f2x1, x2)))
        v = vadd(g, f1)
    else:
        branch = "f2(x1)=0"
        u = vscale(Scalar(1) / 2, vadd(y, x1))
        v = vsub(vadd(g, f1), vscale(f1x2, f2))
    r = outer(u, v)
    pr = jordan(pm, r)
    return _finish(
        r,
        [
            ("branch " + branch, True),
            ("R rank-one idempotent", r.rank() == 1 and is_idempotent(r)),
            ("jordan(Q,R) = 0", jordan(qm, r).is_zero()),
            ("jordan(P,R) not idempotent", not is_idempotent(pr)),
            ("trace jordan(P,R) = 1/2", pr.trace() == Scalar(1) / 2),
        ],
    )


def embed_block(n: int, i: int, j: int, block) -> Matrix:
    """Place a 2x2 block on rows/columns (i, j) of an n x n zero matrix."""
    rows = [[Scalar() for _ in range(n)] for _ in range(n)]
    idx = (i, j)
    for r in range(2):
        for c in range(2):
            rows[idx[r]][idx[c]] = as_scalar(block[r][c])
    return Matrix(rows)


def step_families(n: int, basis: tuple[int, int], alpha, lam, beta=None) -> dict[str, Matrix]:
    """The tripotent and square-zero probe families placed at positions ``basis``.

    K_alpha, H_beta are rank-two tripotents; N_alpha, M_beta and N_lambda
    are square-zero of rank at most one.
    """
    lam = as_scalar(lam)
    if not lam:
        raise ValueError("lam must be nonzero")
    if n < 2:
        raise ValueError("n must be at least 2")
    i, j = basis
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError("invalid block position %r" % (basis,))
    alpha = as_scalar(alpha)
    beta = alpha if beta is None else as_scalar(beta)
    li = lam.inverse()
    return {
        "K_alpha": embed_block(n, i, j, [[1, alpha], [0, -1]]),
        "H_beta": embed_block(n, i, j, [[1, 0], [beta, -1]]),
        "N_alpha": embed_block(n, i, j, [[0, alpha], [0, 0]]),
        "M_beta": embed_block(n, i, j, [[0, 0], [beta, 0]]),
        "N_lambda": embed_block(n, i, j, [[li, -1], [li * li, -li]]),
    }


def is_tripotent(m: Matrix) -> bool:
    return m @ m @ m == m


def is_square_zero(m: Matrix) -> bool:
    return (m @ m).is_zero()
