"""Fraction-free elimination over the Gaussian integers.

Rows of Gaussian rationals are scaled to Gaussian integers row by row and
reduced with Bareiss' algorithm, so every intermediate entry is a minor of the
scaled input. Back substitution (for solves, kernels and inverses) happens in
Q(i) once the echelon form is known.

Rows here are plain lists of :class:`Scalar`; these helpers are rectangular
and are used by :mod:`preserver_lab.matrix` for the square case.
"""

from __future__ import annotations

from math import lcm
from typing import Sequence

from gmpy2 import mpq, mpz

from .scalar import Q0, Q1, Scalar

Row = Sequence[Scalar]
_GI = tuple  # (mpz, mpz)


def _row_to_gauss_ints(row: Row) -> list[_GI]:
    den = 1
    for s in row:
        den = lcm(den, int(s.re.denominator), int(s.im.denominator))
    return [(mpz(s.re * den), mpz(s.im * den)) for s in row]


def _gmul(a: _GI, b: _GI) -> _GI:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gexact_div(a: _GI, d: _GI) -> _GI:
    norm = d[0] * d[0] + d[1] * d[1]
    re = a[0] * d[0] + a[1] * d[1]
    im = a[1] * d[0] - a[0] * d[1]
    qr, rr = divmod(re, norm)
    qi, ri = divmod(im, norm)
    if rr or ri:
        raise ArithmeticError("inexact Bareiss division")
    return (qr, qi)


def echelon(rows: Sequence[Row], ncols: int | None = None):
    """Fraction-free row echelon form.

    Returns ``(echelon_rows, pivot_columns)`` where the rows are lists of
    Gaussian integer pairs and only the first ``len(pivot_columns)`` rows
    are nonzero.
    """
    m = [_row_to_gauss_ints(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0]) if ncols is None else ncols
    pivots: list[int] = []
    prev = (mpz(1), mpz(0))
    k = 0
    nrows = len(m)
    for c in range(ncols):
        if k == nrows:
            break
        p = next((r for r in range(k, nrows) if m[r][c][0] or m[r][c][1]), None)
        if p is None:
            continue
        if p != k:
            m[k], m[p] = m[p], m[k]
        piv = m[k][c]
        pivot_row = m[k]
        for r in range(k + 1, nrows):
            row = m[r]
            lead = row[c]
            for j in range(c + 1, ncols):
                a = _gmul(piv, row[j])
                b = _gmul(lead, pivot_row[j])
                row[j] = _gexact_div((a[0] - b[0], a[1] - b[1]), prev)
            row[c] = (mpz(0), mpz(0))
        prev = piv
        pivots.append(c)
        k += 1
    return m, pivots


def rank(rows: Sequence[Row]) -> int:
    if not rows:
        return 0
    return len(echelon(rows)[1])


def det(rows: Sequence[Row]) -> Scalar:
    """Determinant via Bareiss on denominator-cleared rows."""
    n = len(rows)
    scale = mpq(1)
    for r in rows:
        den = 1
        for s in r:
            den = lcm(den, int(s.re.denominator), int(s.im.denominator))
        scale *= den
    m = [_row_to_gauss_ints(r) for r in rows]
    sign = 1
    prev = (mpz(1), mpz(0))
    for k in range(n - 1):
        p = next((r for r in range(k, n) if m[r][k][0] or m[r][k][1]), None)
        if p is None:
            return Scalar()
        if p != k:
            m[k], m[p] = m[p], m[k]
            sign = -sign
        piv = m[k][k]
        for r in range(k + 1, n):
            for j in range(k + 1, n):
                a = _gmul(piv, m[r][j])
                b = _gmul(m[r][k], m[k][j])
                m[r][j] = _gexact_div((a[0] - b[0], a[1] - b[1]), prev)
        prev = piv
    last = m[n - 1][n - 1] if n else (mpz(1), mpz(0))
    return Scalar(mpq(sign * last[0]) / scale, mpq(sign * last[1]) / scale)


def _to_scalar_rows(m, width) -> list[list[Scalar]]:
    return [[Scalar._raw(mpq(e[0]), mpq(e[1])) for e in row[:width]] for row in m]


def rref(rows: Sequence[Row]):
    """Reduced row echelon form over Q(i): ``(rows, pivots)``."""
    if not rows:
        return [], []
    width = len(rows[0])
    m, pivots = echelon(rows, width)
    red = _to_scalar_rows(m[: len(pivots)], width)
    for i, c in enumerate(pivots):
        inv = red[i][c].inverse()
        red[i] = [e * inv for e in red[i]]
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        for r in range(i):
            f = red[r][c]
            if f:
                red[r] = [a - f * b for a, b in zip(red[r], red[i])]
    return red, pivots


def solve(rows: Sequence[Row], rhs: Row) -> list[Scalar] | None:
    """One solution of ``rows @ v = rhs`` with free coordinates set to 0.

    Returns ``None`` when the system is inconsistent.
    """
    if not rows:
        return None
    width = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if pivots and pivots[-1] == width:
        return None
    sol = [Scalar() for _ in range(width)]
    for i, c in enumerate(pivots):
        sol[c] = red[i][width]
    return sol


def nullspace(rows: Sequence[Row], width: int | None = None) -> list[list[Scalar]]:
    """Basis of ``{v : rows @ v = 0}``, one vector per free column."""
    if not rows:
        if width is None:
            raise ValueError("width required for an empty system")
        return [[Scalar(Q1 if i == j else Q0) for i in range(width)] for j in range(width)]
    width = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for fc in free:
        v = [Scalar() for _ in range(width)]
        v[fc] = Scalar(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i][fc]
        basis.append(v)
    return basis
