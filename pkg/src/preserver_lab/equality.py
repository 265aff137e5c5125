"""Deciding ``a == b`` from Jordan-idempotency probes alone.

The probe set is the similarity-invariant family of rank-one nilpotents,
tripotents and conjugates of ``J_k(lam) + 0``. Probes are generated by guided
constructions first (functionals that separate Krylov frames, eigen and
kernel probes, Jordan-chain and tripotent corner probes) and by random
sampling last. Every reported witness is re-verified exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import sympy
from gmpy2 import mpq

from . import linalg
from .jordan import eigen_probe_family, is_idempotent, is_nonzero_idempotent, jordan
from .matrix import (
    Matrix,
    Rng,
    basis_vector,
    independent,
    is_zero_vector,
    jordan_block,
    outer,
    random_vector,
    solve_functional,
    span_coefficients,
    vadd,
    vscale,
    vsub,
)
from .scalar import Scalar
from .structure import DEFAULT_LAMBDAS, TKind, build_t_set, charpoly, max_jordan_k

__all__ = [
    "PROBE_KINDS",
    "ProbeBudgetExhausted",
    "DistinguishResult",
    "Prop1234Report",
    "krylov_frame",
    "gaussian_eigenvalues",
    "jordan_chain",
    "separates",
    "in_jordan_family",
    "is_probe",
    "nilpotent_separator",
    "prop_1234_checks",
    "distinguish",
    "equal_via_probes",
]

log = logging.getLogger(__name__)

#: probe kinds reported in ``DistinguishResult.witness_kind``
PROBE_KINDS = frozenset({"RankOne", "Nilpotent1", "Tripotent", "JordanConjugate"})


class ProbeBudgetExhausted(RuntimeError):
    """No separating probe was found although ``a != b``."""

    def __init__(self, probes_used: int):
        super().__init__("no separating probe within %d probes" % probes_used)
        self.probes_used = probes_used


@dataclass(frozen=True)
class DistinguishResult:
    equal: bool
    witness: Matrix | None = None
    witness_kind: str | None = None
    probes_used: int = 0
    strategy: str | None = None

    def to_json(self) -> dict:
        return {
            "equal": self.equal,
            "witness": None if self.witness is None else self.witness.to_json(),
            "kind": self.witness_kind,
            "probes": self.probes_used,
        }


def separates(a: Matrix, b: Matrix, x: Matrix) -> bool:
    """Exactly one of ``a o x``, ``b o x`` is idempotent."""
    return is_idempotent(jordan(a, x)) != is_idempotent(jordan(b, x))


def in_jordan_family(x: Matrix, kmax: int, mu) -> bool:
    """x is similar to ``J_k(mu) + 0`` for some ``1 <= k <= kmax``."""
    n = x.n
    r = x.rank()
    if not 1 <= r <= kmax:
        return False
    shifted = x - Matrix.identity(n).scale(mu)
    if shifted.rank() != n - 1:
        return False
    acc = x
    for _ in range(r):
        acc = acc @ shifted
    return acc.is_zero()


def is_probe(x: Matrix) -> bool:
    """Membership in the probe set: rank one, tripotent, or a small Jordan conjugate."""
    if x.is_zero():
        return False
    if x.rank() == 1 or x @ x @ x == x:
        return True
    nonzero = [v for v in gaussian_eigenvalues(x) if v]
    if len(nonzero) != 1:
        return False
    return in_jordan_family(x, max_jordan_k(x.n), nonzero[0])


def krylov_frame(a: Matrix, x: Sequence[Scalar], depth: int = 5) -> list[tuple]:
    """Longest independent prefix of ``x, Ax, ..., A^(depth-1) x``."""
    x = tuple(x)
    if is_zero_vector(x):
        raise ValueError("krylov_frame needs x != 0")
    frame = [x]
    v = x
    while len(frame) < depth:
        v = a.apply(v)
        if not independent(frame + [v]):
            break
        frame.append(v)
    return frame


def _to_sympy(s: Scalar):
    return sympy.Rational(int(s.re.numerator), int(s.re.denominator)) + sympy.I * sympy.Rational(
        int(s.im.numerator), int(s.im.denominator)
    )


def _from_sympy(c) -> Scalar:
    re, im = sympy.Rational(sympy.re(c)), sympy.Rational(sympy.im(c))
    return Scalar(mpq(int(re.p), int(re.q)), mpq(int(im.p), int(im.q)))


def gaussian_eigenvalues(m: Matrix) -> list[Scalar]:
    """Distinct eigenvalues of m lying in Q(i), via factoring over Q(i)."""
    t = sympy.Symbol("t")
    coeffs = [_to_sympy(c) for c in charpoly(m)]
    poly = sympy.Poly(coeffs, t, domain="QQ_I")
    roots = []
    for factor, _ in poly.factor_list()[1]:
        if factor.degree() == 1:
            c1, c0 = factor.all_coeffs()
            roots.append(_from_sympy(-c0 / c1))
    return roots


def jordan_chain(a: Matrix, lam, start: Sequence[Scalar], length: int) -> list[tuple] | None:
    """``v_1 = start`` with ``(a - lam) v_{j+1} = v_j``; None if the chain breaks."""
    shifted = a - Matrix.identity(a.n).scale(lam)
    chain = [tuple(start)]
    if not is_zero_vector(shifted.apply(chain[0])):
        return None
    rows = shifted.rows()
    while len(chain) < length:
        nxt = linalg.solve(rows, list(chain[-1]))
        if nxt is None:
            return None
        chain.append(tuple(nxt))
    return chain


def _complete_basis(vectors: list[tuple], n: int) -> Matrix:
    cols = list(vectors)
    for i in range(n):
        if len(cols) == n:
            break
        e = basis_vector(n, i)
        if independent(cols + [e]):
            cols.append(e)
    return Matrix.from_columns(cols)


# separating functionals (rank-one nilpotent probes)


def _base_constraints(a: Matrix, y):
    ay = a.apply(y)
    return [(y, 0), (ay, 2), (a.apply(ay), 0)]


def nilpotent_separator(a: Matrix, b: Matrix, y: Sequence[Scalar]) -> Matrix | None:
    """``y (x) f`` with ``a o (y (x) f)`` a nonzero idempotent and ``b o (y (x) f)`` not.

    f is chosen with ``f(y) = f(A^2 y) = 0``, ``f(Ay) = 2`` and
    ``f(By) != 2`` or ``f(B^2 y) != 0``.
    """
    y = tuple(y)
    if is_zero_vector(y):
        return None
    base = _base_constraints(a, y)
    by = b.apply(y)
    bby = b.apply(by)
    n = a.n
    for extra in ([], [(by, 0)], [(by, 1)], [(bby, 1)], [(bby, -1)]):
        f = solve_functional(base + extra, n)
        if f is None or not any(f):
            continue
        x = outer(y, f)
        if is_nonzero_idempotent(jordan(a, x)) and not is_nonzero_idempotent(jordan(b, x)):
            return x
    return None


@dataclass
class Prop1234Report:
    case: str
    frame_length: int
    alpha: Scalar | None = None
    gamma: Scalar | None = None
    conclusion_holds: bool | None = None
    separator: Matrix | None = None
    separator_vector: tuple | None = None
    notes: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        """Either the conclusion holds or the hypothesis is refuted by a separator."""
        return self.case == "inapplicable" or bool(self.conclusion_holds) or self.separator is not None

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "frame_length": self.frame_length,
            "alpha": None if self.alpha is None else str(self.alpha),
            "gamma": None if self.gamma is None else str(self.gamma),
            "conclusion_holds": self.conclusion_holds,
            "separator": None if self.separator is None else self.separator.to_json(),
        }


def _prop_case(a: Matrix, x) -> tuple[str, int]:
    frame = krylov_frame(a, x, 5)
    m = len(frame)
    tail_zero = is_zero_vector(a.apply(frame[-1]))
    if m == 5 or (m == 4 and tail_zero):
        return "iii", m
    if m == 4 or (m == 3 and tail_zero):
        return "ii", m
    if m == 3 or (m == 2 and tail_zero):
        return "i", m
    return "inapplicable", m


def _alpha_gamma(a: Matrix, b: Matrix, y):
    """(alpha, gamma) with ``By = alpha y + Ay + gamma A^2 y``, or None."""
    ay = a.apply(y)
    aay = a.apply(ay)
    rest = vsub(b.apply(y), ay)
    if is_zero_vector(aay):
        c = span_coefficients(rest, [y])
        return None if c is None else (c[0], Scalar())
    c = span_coefficients(rest, [y, aay])
    return None if c is None else (c[0], c[1])


def _case_i_holds(a: Matrix, b: Matrix, y) -> bool:
    if _alpha_gamma(a, b, y) is None:
        return False
    aay = a.apply(a.apply(y))
    bby = b.apply(b.apply(y))
    basis = [y] if is_zero_vector(aay) else [y, aay]
    return span_coefficients(bby, basis) is not None


def prop_1234_checks(a: Matrix, b: Matrix, x: Sequence[Scalar]) -> Prop1234Report:
    """Check the Krylov-frame rigidity statement on one vector.

    The hypothesis (agreement on every rank-one nilpotent probe) cannot be
    checked exhaustively, so the report either exhibits a separating probe
    built from the frame or confirms the conclusion for the detected case.
    """
    if a.is_zero():
        raise ValueError("prop_1234_checks needs a != 0")
    x = tuple(x)
    case, m = _prop_case(a, x)
    report = Prop1234Report(case, m)
    if case == "inapplicable":
        return report
    ax = a.apply(x)
    a2x = a.apply(ax)
    if case == "i":
        ys = [x]
    elif case == "ii":
        ys = [x, ax, vadd(x, ax)]
    else:
        ys = [x, ax, a2x, vadd(x, ax), vadd(ax, a2x)]
    for y in ys:
        sep = nilpotent_separator(a, b, y)
        if sep is not None:
            report.separator, report.separator_vector = sep, y
            break
    ag = _alpha_gamma(a, b, x)
    if ag is not None:
        report.alpha, report.gamma = ag
    if case == "i":
        report.conclusion_holds = _case_i_holds(a, b, x)
    elif case == "ii":
        holds = ag is not None
        if holds:
            alpha, gamma = ag
            a3x = a.apply(a2x)
            expect = vadd(vadd(vscale(alpha, ax), a2x), vscale(gamma, a3x))
            holds = b.apply(ax) == expect and b.apply(ax) == a.apply(b.apply(x))
        report.conclusion_holds = holds
    else:
        a3x = a.apply(a2x)
        report.conclusion_holds = b.apply(x) == ax and b.apply(ax) == a2x and b.apply(a2x) == a3x
        if report.conclusion_holds:
            report.alpha, report.gamma = Scalar(), Scalar()
    return report


# probe generation for distinguish


def _candidate_vectors(a: Matrix, b: Matrix, rng: Rng, extra_random: int = 4) -> list[tuple]:
    n = a.n
    d = a - b
    out, seen = [], set()

    def push(v):
        v = tuple(v)
        if not is_zero_vector(v) and v not in seen:
            seen.add(v)
            out.append(v)

    for j in range(n):
        if not is_zero_vector(d.column(j)):
            push(basis_vector(n, j))
    for j in range(n):
        push(basis_vector(n, j))
    for i in range(n):
        for j in range(i + 1, n):
            push(vadd(basis_vector(n, i), basis_vector(n, j)))
    for _ in range(extra_random):
        push(random_vector(n, rng, bound=3))
    return out


def _guided_nilpotent(a, b, vectors) -> Iterator[tuple[str, str, Matrix]]:
    for p, q in ((a, b), (b, a)):
        for y in vectors:
            base = _base_constraints(p, y)
            qy = q.apply(y)
            qqy = q.apply(qy)
            for extra in ([], [(qy, 0)], [(qy, 1)], [(qqy, 1)], [(qqy, -1)]):
                f = solve_functional(base + extra, p.n)
                if f is not None and any(f):
                    yield "guided-nilpotent", TKind.NILPOTENT1.value, outer(y, f)


def _kernel_probes(a, b) -> Iterator[tuple[str, str, Matrix]]:
    for p in (a, b):
        for x in p.kernel():
            for f in p.left_kernel():
                yield "kernel", "RankOne", outer(x, f)


def _eigen_probes(a, b, eigs) -> Iterator[tuple[str, str, Matrix]]:
    n = a.n
    for p, spectrum in ((a, eigs[0]), (b, eigs[1])):
        for lam in spectrum:
            shifted = p - Matrix.identity(n).scale(lam)
            right = shifted.kernel()
            left = shifted.left_kernel()
            if lam:
                for x in right:
                    for r in eigen_probe_family(x, lam):
                        yield "eigen", "RankOne", r.to_matrix()
                for f in left:
                    for r in eigen_probe_family(f, lam):
                        yield "eigen", "RankOne", outer(r.f, r.x)
                # x and f in opposite eigenspaces make p o (x (x) f) vanish
                if -lam in spectrum:
                    opp = (p + Matrix.identity(n).scale(lam)).left_kernel()
                    for x in right:
                        for f in opp:
                            yield "eigen-opposite", "RankOne", outer(x, f)


def _chain_probes(a, b, eigs) -> Iterator[tuple[str, str, Matrix]]:
    n = a.n
    kmax = min(max_jordan_k(n), n - 1)
    for p, q, spectrum in ((a, b, eigs[0]), (b, a, eigs[1])):
        for lam in spectrum:
            if not lam:
                continue
            for v1 in (p - Matrix.identity(n).scale(lam)).kernel():
                for k in range(1, kmax + 1):
                    chain = jordan_chain(p, lam, v1, k)
                    if chain is None:
                        break
                    s = _complete_basis(chain, n)
                    s_inv = s.inverse()
                    jinv = jordan_block(k, lam).inverse()
                    qs = s_inv @ q @ s
                    for r in _corner_blocks(n, k, qs):
                        core = [[Scalar() for _ in range(n)] for _ in range(n)]
                        for i in range(k):
                            for j in range(k):
                                core[i][j] = jinv[i, j]
                            for j in range(n - k):
                                core[i][k + j] = r[i][j]
                        yield "jordan-chain", TKind.JORDAN_CONJUGATE.value, s @ Matrix(core) @ s_inv


def _corner_blocks(n, k, qs):
    m = n - k
    zero = [[Scalar() for _ in range(m)] for _ in range(k)]
    yield zero
    for i in range(k):
        for j in range(m):
            entry = qs[k + j, i]
            if entry:
                blk = [row[:] for row in zero]
                blk[i][j] = (entry * 2).inverse()
                yield blk
    for i in range(k):
        for j in range(m):
            blk = [row[:] for row in zero]
            blk[i][j] = Scalar(1)
            yield blk


_D3 = (1, -1, 1)


def _tripotent_corner_probes(a, b) -> Iterator[tuple[str, str, Matrix]]:
    """``S [[D, X], [0, 0]] S^-1`` with S from a nilpotent 3-chain and ``p o K = 0`` solved for X.

    Any such K is tripotent because ``D^2 = I``; the condition ``p o K = 0``
    is linear in X.
    """
    n = a.n
    for p in (a, b):
        p3 = p @ p @ p
        for i in range(n):
            x = basis_vector(n, i)
            if not is_zero_vector(p3.apply(x)):
                continue
            px = p.apply(x)
            ppx = p.apply(px)
            if not independent([ppx, px, x]):
                continue
            s = _complete_basis([ppx, px, x], n)
            s_inv = s.inverse()
            ps = s_inv @ p @ s
            base = [[Scalar() for _ in range(n)] for _ in range(n)]
            for d in range(3):
                base[d][d] = Scalar(_D3[d])
            k0 = Matrix(base)
            unknowns = [(r, c) for r in range(3) for c in range(3, n)]
            if unknowns:
                cols = []
                for r, c in unknowns:
                    cols.append(jordan(ps, Matrix.unit(n, r, c)))
                target = jordan(ps, k0)
                rows = [[col[i2, j2] for col in cols] for i2 in range(n) for j2 in range(n)]
                rhs = [-target[i2, j2] for i2 in range(n) for j2 in range(n)]
                sol = linalg.solve(rows, rhs)
                if sol is None:
                    continue
                for (r, c), v in zip(unknowns, sol):
                    base[r][c] = v
            k = s @ Matrix(base) @ s_inv
            yield "tripotent-corner", TKind.TRIPOTENT.value, k


def _random_probes(a, b, eigs, rng: Rng) -> Iterator[tuple[str, str, Matrix]]:
    n = a.n
    lambdas = list(DEFAULT_LAMBDAS)
    for lam in eigs[0] + eigs[1]:
        if lam and lam not in lambdas:
            lambdas.append(lam)
            lambdas.append(lam.inverse())
    while True:
        for el in build_t_set(n, lambdas, rng, 1):
            yield "random-T", el.kind.value, el.matrix


def _scaled_variants(a, b, x, kind) -> list[Matrix]:
    """Rescalings of x that stay in the probe set and make one side idempotent."""
    out = []
    if kind == TKind.TRIPOTENT.value:
        return [-x]
    for m in (a, b):
        pj = jordan(m, x)
        if pj.is_zero():
            out.append(-x)
            continue
        sq = pj @ pj
        # locate mu with sq = mu * pj
        i, j = next((i, j) for i in range(pj.n) for j in range(pj.n) if pj[i, j])
        mu = sq[i, j] / pj[i, j]
        if mu and mu != 1 and sq == pj.scale(mu):
            out.append(x.scale(mu.inverse()))
    return out


def _probe_stream(a, b, rng) -> Iterator[tuple[str, str, Matrix]]:
    vectors = _candidate_vectors(a, b, rng)
    yield from _guided_nilpotent(a, b, vectors)
    yield from _kernel_probes(a, b)
    eigs = (gaussian_eigenvalues(a), gaussian_eigenvalues(b))
    yield from _eigen_probes(a, b, eigs)
    yield from _chain_probes(a, b, eigs)
    yield from _tripotent_corner_probes(a, b)
    yield from _random_probes(a, b, eigs, rng)


def distinguish(
    a: Matrix,
    b: Matrix,
    budget: int = 500,
    rng: Rng | None = None,
    accept: Callable[[str, Matrix], bool] | None = None,
) -> DistinguishResult:
    """Find X in the probe set with exactly one of ``a o X``, ``b o X`` idempotent.

    Returns ``equal=True`` only when ``a == b``. Raises
    :class:`ProbeBudgetExhausted` if ``a != b`` but no witness was found.
    ``accept(kind, X)`` restricts the search to a subfamily of probes; kinds
    are listed in :data:`PROBE_KINDS`.
    """
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    if a.n < 3:
        raise ValueError("distinguish needs n >= 3")
    if a == b:
        return DistinguishResult(True)
    rng = rng or Rng(0)
    used = 0
    seen: set[Matrix] = set()
    # rejected candidates are not probes, but the stream is infinite
    drawn = 0
    for strategy, kind, x in _probe_stream(a, b, rng):
        drawn += 1
        if used >= budget or drawn > 20 * budget:
            break
        if x.is_zero() or x in seen:
            continue
        seen.add(x)
        if accept is None or accept(kind, x):
            used += 1
            if separates(a, b, x):
                return DistinguishResult(False, x, kind, used, strategy)
        for y in _scaled_variants(a, b, x, kind):
            if used >= budget or y in seen or not (accept is None or accept(kind, y)):
                continue
            seen.add(y)
            used += 1
            if separates(a, b, y):
                return DistinguishResult(False, y, kind, used, strategy + "-scaled")
    raise ProbeBudgetExhausted(used)


def equal_via_probes(a: Matrix, b: Matrix, budget: int = 500, rng: Rng | None = None) -> bool:
    """Probe verdict, cross-checked against direct comparison."""
    try:
        res = distinguish(a, b, budget, rng)
    except ProbeBudgetExhausted as exc:
        log.warning("probe search silent on unequal pair after %d probes", exc.probes_used)
        return False
    if res.equal != (a == b):
        log.error("probe verdict disagrees with direct equality")
    return res.equal
