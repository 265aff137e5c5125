"""Randomized property suites, one per lemma-level statement.

Each trial builds an instance from its own seeded :class:`Rng`, checks the
statement on it exactly and returns ``(ok, instance)`` where ``instance`` is
a JSON-ready dump sufficient to reproduce the trial. Generators mix
instances that satisfy a hypothesis by construction with near misses and
unconstrained random draws, so both directions of each implication get
exercised.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

from .equality import (
    ProbeBudgetExhausted,
    distinguish,
    in_jordan_family,
    is_probe,
    prop_1234_checks,
    separates,
)
from .jordan import (
    RankOneOp,
    Split,
    eigen_probe,
    eigen_probe_family,
    is_idempotent,
    is_identity_via_probes,
    is_nonzero_idempotent,
    is_orthogonal,
    is_zero_via_probes,
    jordan,
    lemma_f_nonzero,
    lemma_f_zero,
    lemma_zero_jordan,
    observation_split,
)
from .matrix import (
    Matrix,
    Rng,
    basis_vector,
    direct_sum,
    dot,
    in_span,
    is_zero_vector,
    jordan_block,
    outer,
    random_idempotent,
    random_invertible,
    random_matrix,
    random_scalar,
    random_vector,
    vscale,
    vsub,
)
from .scalar import Scalar, as_scalar
from .structure import (
    DEFAULT_LAMBDAS,
    corner_trace_check,
    default_corner_samples,
    random_nilpotent_rank_one,
    random_tripotent,
    solve_sylvester,
    tripotent_decompose,
)
from .witnesses import WitnessError, witness_distinguish_idem, witness_involution, witness_square_zero

__all__ = [
    "SUITES",
    "Suite",
    "SuiteError",
    "check_suite",
    "run_suite",
    "run_trial",
    "worker_count",
]

WORKERS_ENV = "PRESERVER_LAB_WORKERS"


class SuiteError(ValueError):
    """Unknown suite name or a dimension the suite does not support."""


# small constructions


def _nonzero(rng: Rng, bound: int = 5, integer: bool = False) -> Scalar:
    while True:
        c = random_scalar(rng, bound=bound, integer=integer)
        if c:
            return c


def _functional(x, value, rng: Rng):
    """Random functional f with ``f(x) = value``."""
    x = tuple(x)
    f = list(random_vector(len(x), rng, bound=4))
    k = next(i for i, v in enumerate(x) if v)
    f[k] = f[k] + (as_scalar(value) - dot(f, x)) / x[k]
    return tuple(f)


def _vector(f, value, rng: Rng):
    """Random vector v with ``f(v) = value``; f must be nonzero."""
    return _functional(f, value, rng)


def _nonzero_functional(x, value, rng: Rng):
    while True:
        f = _functional(x, value, rng)
        if any(f):
            return f


def _with_right_eigen(m: Matrix, x, c, rng: Rng) -> Matrix:
    """``m`` corrected by a rank-one term so that ``x`` is an eigenvector for c."""
    g = _functional(x, 1, rng)
    return m + outer(vsub(vscale(c, x), m.apply(x)), g)


def _with_left_eigen(m: Matrix, f, c, rng: Rng) -> Matrix:
    """``m`` corrected so that ``f m = c f``; preserves ``m x = c' x`` whenever ``f(x) = 0`` or ``c' = c``."""
    h = _vector(f, 1, rng)
    return m + outer(h, vsub(vscale(c, f), m.left_apply(f)))


def _complete(vectors, n: int) -> Matrix:
    cols = [tuple(v) for v in vectors]
    for i in range(n):
        e = basis_vector(n, i)
        if len(cols) == n:
            break
        if not in_span(e, cols):
            cols.append(e)
    return Matrix.from_columns(cols)


def _map_on(vectors, images, n: int, rng: Rng) -> Matrix:
    """Matrix sending each of the independent ``vectors`` to its image, random elsewhere."""
    s = _complete(vectors, n)
    cols = [tuple(v) for v in images] + [random_vector(n, rng, bound=3) for _ in range(n - len(images))]
    return Matrix.from_columns(cols) @ s.inverse()


def _kill(x, f, rng: Rng) -> Matrix:
    """Random nonzero A with ``Ax = 0`` and ``fA = 0``."""
    n = len(x)
    g = _functional(x, 1, rng)
    h = _vector(f, 1, rng)
    left = Matrix.identity(n) - outer(h, f)
    right = Matrix.identity(n) - outer(x, g)
    while True:
        a = left @ random_matrix(n, rng, bound=4) @ right
        if not a.is_zero():
            return a


def _blocks(top_left: Matrix, top_right, bottom_left, bottom_right: Matrix) -> Matrix:
    k, m = top_left.n, bottom_right.n
    n = k + m
    rows = [[Scalar() for _ in range(n)] for _ in range(n)]
    for i in range(k):
        for j in range(k):
            rows[i][j] = top_left[i, j]
        for j in range(m):
            rows[i][k + j] = as_scalar(top_right[i][j])
    for i in range(m):
        for j in range(k):
            rows[k + i][j] = as_scalar(bottom_left[i][j])
        for j in range(m):
            rows[k + i][k + j] = bottom_right[i, j]
    return Matrix(rows)


def _rect(rng: Rng, rows: int, cols: int, density: float = 1.0):
    return [
        [random_scalar(rng, bound=4) if rng.random() < density else Scalar() for _ in range(cols)]
        for _ in range(rows)
    ]


def _lam(rng: Rng, lambdas) -> Scalar:
    return as_scalar(rng.choice(list(lambdas)))


def _vec_json(v) -> list[str]:
    return [str(c) for c in v]


def _star_zero_separates(a: Matrix, b: Matrix, x: Matrix) -> bool:
    """x breaks agreement on nonzero-idempotency or on vanishing of the Jordan product."""
    pa, pb = jordan(a, x), jordan(b, x)
    return is_nonzero_idempotent(pa) != is_nonzero_idempotent(pb) or pa.is_zero() != pb.is_zero()


def _structured(n: int, rng: Rng) -> Matrix:
    kind = rng.randint(0, 7)
    s = random_invertible(n, rng)
    if kind == 0:
        return random_matrix(n, rng, bound=4)
    if kind == 1:
        return Matrix.diag([random_scalar(rng, bound=3, integer=True) for _ in range(n)])
    if kind == 2:
        core = jordan_block(rng.randint(1, n), random_scalar(rng, bound=2, integer=True))
        if core.n < n:
            core = direct_sum(core, Matrix.diag([random_scalar(rng, bound=2, integer=True) for _ in range(n - core.n)]))
        return s @ core @ s.inverse()
    if kind == 3:
        return random_tripotent(n, rng.randint(0, 1), rng.randint(0, n - 1), rng)
    if kind == 4:
        return random_idempotent(n, rng.randint(0, n), rng)
    if kind == 5:
        return Matrix.identity(n).scale(random_scalar(rng, bound=3, integer=True))
    if kind == 6:
        return random_nilpotent_rank_one(n, rng)
    return s @ jordan_block(n, 0) @ s.inverse()


def _perturbed(a: Matrix, rng: Rng) -> Matrix:
    n = a.n
    kind = rng.randint(0, 3)
    if kind == 0:
        return _structured(n, rng)
    if kind == 1:
        return a + Matrix.unit(n, rng.randint(0, n - 1), rng.randint(0, n - 1), _nonzero(rng, 3))
    if kind == 2:
        return a + outer(random_vector(n, rng, bound=2), random_vector(n, rng, bound=2))
    return a.scale(random_scalar(rng, bound=3, integer=True))


# trial functions: (n, rng, lambdas) -> (ok, instance)


def _t_observation(n, rng, lambdas):
    mode = rng.randint(0, 3)
    while True:
        if mode == 0:
            a = random_matrix(n, rng, bound=3, density=rng.choice([0.4, 1.0]))
            x = random_matrix(n, rng, bound=3, density=rng.choice([0.4, 1.0]))
        elif mode == 1:
            v = random_vector(n, rng, bound=3)
            t = _nonzero(rng, 3)
            f = _nonzero_functional(v, t, rng)
            x = outer(v, f)
            a = _with_right_eigen(random_matrix(n, rng, bound=3), v, t.inverse(), rng)
        elif mode == 2:
            v = random_vector(n, rng, bound=3)
            f = _nonzero_functional(v, 1, rng)
            x = outer(v, f)
            a = _kill(v, f, rng)
        else:
            a = random_invertible(n, rng)
            x = a.inverse().scale(rng.choice([1, 1, 2, -1]))
        if not (a.is_zero() or x.is_zero()):
            break
    p = jordan(a, x)
    plus, minus = is_idempotent(p), is_idempotent(-p)
    split = observation_split(a, x)
    ok = (
        (plus and not minus) == is_nonzero_idempotent(p)
        and (plus and minus) == p.is_zero()
        and (split is Split.ZERO_PRODUCT) == p.is_zero()
        and (split is Split.NONZERO_IDEM) == is_nonzero_idempotent(p)
    )
    return ok, {"mode": mode, "a": a.to_json(), "x": x.to_json(), "split": split.value}


def _t_f_nonzero(n, rng, lambdas):
    x = random_vector(n, rng, bound=3)
    t = rng.choice([Scalar(1), _nonzero(rng, 3)])
    f = _nonzero_functional(x, t, rng)
    r = RankOneOp(x, f)
    mode = rng.randint(0, 4)
    a = random_matrix(n, rng, bound=3)
    c = t.inverse()
    if mode in (1, 3):
        a = _with_right_eigen(a, x, c, rng)
    if mode in (2, 3):
        a = _with_left_eigen(a, f, c, rng)
    if mode == 4:
        a = _with_right_eigen(a, x, c + 1, rng)
    if a.is_zero():
        a = Matrix.identity(n).scale(c)
    holds = lemma_f_nonzero(a, r)
    forced = mode in (1, 2, 3)
    ok = holds and (not forced or is_nonzero_idempotent(jordan(a, r.to_matrix())))
    return ok, {"mode": mode, "a": a.to_json(), "r": r.to_json()}


def _t_f_zero(n, rng, lambdas):
    x = random_vector(n, rng, bound=3)
    f = _nonzero_functional(x, 0, rng)
    r = RankOneOp(x, f)
    mode = rng.randint(0, 3)
    if mode in (1, 2):
        y = _vector(f, 2, rng)
        z = _vector(f, 0 if mode == 1 else _nonzero(rng, 3), rng)
        a = _map_on([x, y], [y, z], n, rng)
    elif mode == 3:
        a = _with_right_eigen(random_matrix(n, rng, bound=3), x, random_scalar(rng, bound=3), rng)
    else:
        a = random_matrix(n, rng, bound=3)
    if a.is_zero():
        a = Matrix.identity(n)
    holds = lemma_f_zero(a, r)
    nz = is_nonzero_idempotent(jordan(a, r.to_matrix()))
    expected = {1: True, 2: False, 3: False}.get(mode)
    ok = holds and (expected is None or nz == expected)
    return ok, {"mode": mode, "a": a.to_json(), "r": r.to_json()}


def _t_zero_jordan(n, rng, lambdas):
    x = random_vector(n, rng, bound=3)
    f = _nonzero_functional(x, _nonzero(rng, 3), rng)
    r = RankOneOp(x, f)
    mode = rng.randint(0, 3)
    if mode == 1:
        a = _kill(x, f, rng)
    elif mode == 2:
        a = random_matrix(n, rng, bound=3) @ (Matrix.identity(n) - outer(x, _functional(x, 1, rng)))
    elif mode == 3:
        a = (Matrix.identity(n) - outer(_vector(f, 1, rng), f)) @ random_matrix(n, rng, bound=3)
    else:
        a = random_matrix(n, rng, bound=3)
    if a.is_zero():
        a = _kill(x, f, rng)
        mode = 1
    holds = lemma_zero_jordan(a, r)
    ok = holds and (mode != 1 or jordan(a, r.to_matrix()).is_zero())
    return ok, {"mode": mode, "a": a.to_json(), "r": r.to_json()}


def _t_lambda_x(n, rng, lambdas):
    lam = _lam(rng, lambdas)
    x = random_vector(n, rng, bound=3)
    mode = rng.randint(0, 3)
    a = random_matrix(n, rng, bound=3)
    if mode == 0:
        a = _with_right_eigen(a, x, lam, rng)
    elif mode == 1:
        a = _with_left_eigen(a, _nonzero_functional(x, lam.inverse(), rng), lam, rng)
    elif mode == 3:
        a = _with_right_eigen(a, x, lam + _nonzero(rng, 2), rng)
    if a.is_zero():
        a = Matrix.identity(n)
    direct = a.apply(x) == vscale(lam, x)
    ok = eigen_probe(a, x, lam) == direct and (mode != 0 or direct)
    return ok, {"mode": mode, "lam": str(lam), "a": a.to_json(), "x": _vec_json(x)}


def _t_a_zero(n, rng, lambdas):
    mode = rng.randint(0, 4)
    if mode == 0:
        a = Matrix.zeros(n)
    elif mode == 1:
        a = outer(random_vector(n, rng, bound=3), random_vector(n, rng, bound=3))
    elif mode == 2:
        a = random_matrix(n, rng, bound=3)
    elif mode == 3:
        a = random_nilpotent_rank_one(n, rng)
    else:
        a = Matrix.unit(n, rng.randint(0, n - 1), rng.randint(0, n - 1), _nonzero(rng, 9))
    ok = is_zero_via_probes(a) == a.is_zero()
    return ok, {"mode": mode, "a": a.to_json()}


def _t_a_identity(n, rng, lambdas):
    mode = rng.randint(0, 5)
    ident = Matrix.identity(n)
    if mode == 0:
        a = ident
    elif mode == 1:
        a = ident.scale(_lam(rng, lambdas) + _nonzero(rng, 2))
    elif mode == 2:
        i, j = rng.randint(0, n - 1), rng.randint(0, n - 1)
        a = ident + Matrix.unit(n, i, j, _nonzero(rng, 3))
    elif mode == 3:
        vals = [Scalar(1)] * n
        vals[rng.randint(0, n - 1)] = rng.choice([Scalar(0), Scalar(-1), Scalar(2)])
        a = Matrix.diag(vals)
    elif mode == 4:
        a = random_idempotent(n, n - 1, rng)
    else:
        a = random_matrix(n, rng, bound=3)
    ok = is_identity_via_probes(a) == a.is_identity()
    if a.is_identity():
        v = random_vector(n, rng, bound=3)
        probe = outer(v, _nonzero_functional(v, 1, rng))
        ok = ok and is_nonzero_idempotent(jordan(a, probe))
    return ok, {"mode": mode, "a": a.to_json()}


def _t_lemma_id(n, rng, lambdas):
    s = random_invertible(n, rng)
    if rng.random() < 0.5:
        kind = "square-zero"
        if rng.random() < 0.3:
            a = random_nilpotent_rank_one(n, rng)
        else:
            blocks = rng.randint(1, n // 2)
            core = jordan_block(2, 0)
            for _ in range(blocks - 1):
                core = direct_sum(core, jordan_block(2, 0))
            if core.n < n:
                core = direct_sum(core, Matrix.zeros(n - core.n))
            a = s @ core @ s.inverse()
        w = witness_square_zero(a)
    else:
        kind = "involution"
        minus = rng.randint(1, n - 1)
        a = s @ Matrix.diag([1] * (n - minus) + [-1] * minus) @ s.inverse()
        w = witness_involution(a)
    b = w.matrix
    ok = b.rank() <= 2 and is_idempotent(jordan(a, b)) and not is_idempotent(jordan(b, b))
    return ok, {"kind": kind, "a": a.to_json(), "b": b.to_json()}


def _t_pq_zero(n, rng, lambdas):
    r = rng.randint(1, n - 1)
    s = random_invertible(n, rng)
    s_inv = s.inverse()
    ident = Matrix.identity(n)
    p = s @ Matrix.diag([1] * r + [0] * (n - r)) @ s_inv
    mode = rng.randint(0, 3)
    if mode == 0:
        core = random_matrix(r, rng, bound=3)
        while core.is_zero():
            core = random_matrix(r, rng, bound=3)
        a = s @ direct_sum(core, Matrix.zeros(n - r)) @ s_inv
    elif mode == 1:
        a = p if rng.random() < 0.5 else p.scale(_nonzero(rng, 3))
    elif mode == 2:
        a = s @ _blocks(random_matrix(r, rng, bound=3), _rect(rng, r, n - r), _rect(rng, n - r, r, 0), Matrix.zeros(n - r)) @ s_inv
    else:
        a = random_matrix(n, rng, bound=3)
    if a.is_zero():
        a = p
    hyp = jordan(a, ident - p).is_zero()
    ok = True
    if hyp:
        comp = ident - p
        ok = (comp @ a @ p).is_zero() and (a @ comp).is_zero()
        if r == 1:
            c = a.trace()
            ok = ok and bool(c) and a == p.scale(c)
            if is_idempotent(a):
                ok = ok and a == p
    if mode in (0, 1):
        ok = ok and hyp
    return ok, {"mode": mode, "rank": r, "a": a.to_json(), "p": p.to_json(), "hypothesis": hyp}


def _t_minus_p(n, rng, lambdas):
    x1 = random_vector(n, rng, bound=3)
    f1 = _nonzero_functional(x1, 1, rng)
    mode = rng.randint(0, 3)
    if mode == 0:
        x2 = _vector(f1, 0, rng)
        while is_zero_vector(x2):
            x2 = _vector(f1, 0, rng)
        f2 = _nonzero_functional(x2, 1, rng)
    elif mode == 1:
        f2 = _nonzero_functional(x1, 0, rng)
        x2 = _vector(f2, 1, rng)
    elif mode == 2:
        x2 = random_vector(n, rng, bound=3)
        f2 = _nonzero_functional(x2, 1, rng)
    else:
        x2, f2 = x1, f1
    p, q = RankOneOp(x1, f1), RankOneOp(x2, f2)
    pm, qm = p.to_matrix(), q.to_matrix()
    hyp = pm != qm and is_idempotent(jordan(qm, Matrix.identity(n) - pm))
    inst = {"mode": mode, "p": p.to_json(), "q": q.to_json(), "hypothesis": hyp}
    if not hyp:
        return mode not in (0, 1), inst
    branch = not dot(f1, x2) or not dot(f2, x1)
    try:
        w = witness_distinguish_idem(p, q)
    except WitnessError as exc:
        inst["error"] = str(exc)
        return False, inst
    r = w.matrix
    inst["r"] = r.to_json()
    ok = (
        branch
        and r.rank() == 1
        and is_idempotent(r)
        and jordan(qm, r).is_zero()
        and not is_idempotent(jordan(pm, r))
    )
    return ok, inst


def _t_pq(n, rng, lambdas):
    r = rng.randint(1, n - 1)
    s = random_invertible(n, rng)
    s_inv = s.inverse()
    p = s @ Matrix.diag([1] * r + [0] * (n - r)) @ s_inv
    mode = rng.randint(0, 3)
    if mode == 0:
        d = random_idempotent(n - r, rng.randint(1, n - r), rng)
        q = s @ direct_sum(Matrix.zeros(r), d) @ s_inv
    elif mode == 1:
        q = random_idempotent(n, rng.randint(1, n - 1), rng)
    elif mode == 2:
        q = p
    else:
        x = _rect(rng, r, n - r)
        q = s @ _blocks(Matrix.zeros(r), x, _rect(rng, n - r, r, 0), Matrix.identity(n - r)) @ s_inv
    pq = jordan(p, q)
    i, ii, iii = is_orthogonal(p, q), pq.is_zero(), is_idempotent(-pq)
    ok = i == ii == iii and (mode != 0 or i)
    return ok, {"mode": mode, "p": p.to_json(), "q": q.to_json(), "orthogonal": i}


def _t_lem_x(n, rng, lambdas):
    k = rng.randint(1, n - 1)
    m = n - k
    x = random_invertible(k, rng)
    mode = rng.randint(0, 3)
    a12, a22 = _rect(rng, k, m), random_matrix(m, rng, bound=3)
    zero21 = _rect(rng, m, k, 0)
    if mode == 0:
        a = _blocks(x.inverse(), a12, zero21, a22)
    elif mode == 1:
        a = _blocks(random_matrix(k, rng, bound=3), a12, zero21, a22)
    elif mode == 2:
        a = random_matrix(n, rng, bound=3)
    else:
        a21 = _rect(rng, m, k, 0)
        a21[rng.randint(0, m - 1)][rng.randint(0, k - 1)] = _nonzero(rng, 3)
        a = _blocks(x.inverse(), a12, a21, a22)
    samples = default_corner_samples(a, k)
    for _ in range(2):
        u, v = random_vector(k, rng, bound=3), random_vector(m, rng, bound=3)
        samples.append([[ui * vj for vj in v] for ui in u])
    res = corner_trace_check(a, x, k, samples)
    ok = res["implication_holds"] and (res["a21_zero"] or not res["all_probes_idem"])
    if mode == 0:
        ok = ok and res["all_probes_idem"]
    return ok, {"mode": mode, "k": k, "a": a.to_json(), "x": x.to_json(), "all_probes_idem": res["all_probes_idem"]}


def _t_corr_j1(n, rng, lambdas):
    lam = _lam(rng, lambdas)
    x = random_vector(n, rng, bound=3)

    def build(eig):
        m = random_matrix(n, rng, bound=3)
        return _with_right_eigen(m, x, lam, rng) if eig else m

    a = build(rng.random() < 0.6)
    b = a if rng.random() < 0.2 else build(rng.random() < 0.5)
    ea, eb = a.apply(x) == vscale(lam, x), b.apply(x) == vscale(lam, x)
    inst = {"lam": str(lam), "a": a.to_json(), "b": b.to_json(), "x": _vec_json(x)}
    if ea == eb:
        return True, inst
    for r in eigen_probe_family(x, lam):
        probe = r.to_matrix()
        scaled = probe.scale(lam)
        if scaled.rank() == 1 and is_idempotent(scaled) and _star_zero_separates(a, b, probe):
            inst["separator"] = probe.to_json()
            return True, inst
    return False, inst


def _zero_side_separator(p: Matrix, q: Matrix, x) -> Matrix | None:
    """Rank-one separator for ``px = 0`` but ``qx != 0``."""
    for f in p.left_kernel():
        probe = outer(x, f)
        if _star_zero_separates(p, q, probe):
            return probe
        # q o (x (x) f) = 0 forces qx = mu x with mu != 0
        qx = q.apply(x)
        k = next(i for i, v in enumerate(x) if v)
        mu = qx[k] / x[k]
        if mu and qx == vscale(mu, x):
            for r in eigen_probe_family(x, mu):
                if _star_zero_separates(p, q, r.to_matrix()):
                    return r.to_matrix()
    return None


def _t_corr_alg(n, rng, lambdas):
    x = random_vector(n, rng, bound=3)
    f = _nonzero_functional(x, 0, rng)
    a = _kill(x, f, rng)
    mode = rng.randint(0, 3)
    if mode == 0:
        b = random_matrix(n, rng, bound=3) @ (Matrix.identity(n) - outer(x, _functional(x, 1, rng)))
    elif mode == 1:
        mu = _nonzero(rng, 3)
        b = _with_right_eigen(random_matrix(n, rng, bound=3), x, mu, rng)
        b = _with_left_eigen(b, f, -mu, rng)
    elif mode == 2:
        b = random_matrix(n, rng, bound=3)
    else:
        b = a + outer(x, random_vector(n, rng, bound=2)).scale(_nonzero(rng, 2))
    if rng.random() < 0.5:
        a, b = b, a
    za, zb = is_zero_vector(a.apply(x)), is_zero_vector(b.apply(x))
    inst = {"mode": mode, "a": a.to_json(), "b": b.to_json(), "x": _vec_json(x)}
    if za == zb:
        return True, inst
    p, q = (a, b) if za else (b, a)
    sep = _zero_side_separator(p, q, x)
    if sep is None or sep.rank() != 1:
        return False, inst
    inst["separator"] = sep.to_json()
    return True, inst


def _tripotent_separator(t: Matrix, other: Matrix) -> Matrix | None:
    parts = tripotent_decompose(t)
    plus, minus, zero = parts.p.column_space(), parts.q.column_space(), t.kernel()
    basis = plus + minus + zero
    s_inv = Matrix.from_columns(basis).inverse()
    candidates = []
    for v, mu in [(v, 1) for v in plus] + [(v, -1) for v in minus]:
        candidates.extend(r.to_matrix() for r in eigen_probe_family(v, mu))
    for idx, v in enumerate(zero, start=len(plus) + len(minus)):
        candidates.append(outer(v, s_inv.row(idx)))
    for probe in candidates:
        if probe.rank() == 1 and probe.trace() in (1, -1) and _star_zero_separates(t, other, probe):
            return probe
    return None


def _t_corr_d(n, rng, lambdas):
    plus = rng.randint(0, n)
    minus = rng.randint(0, n - plus)
    a = random_tripotent(n, plus, minus, rng)
    mode = rng.randint(0, 4)
    if mode == 0:
        b = a
    elif mode == 1:
        p2 = rng.randint(0, n)
        b = random_tripotent(n, p2, rng.randint(0, n - p2), rng)
    elif mode == 2:
        b = a + outer(random_vector(n, rng, bound=2), random_vector(n, rng, bound=2))
    elif mode == 3:
        b = random_matrix(n, rng, bound=3)
    else:
        b = a + Matrix.unit(n, rng.randint(0, n - 1), rng.randint(0, n - 1), _nonzero(rng, 3))
    swapped = rng.random() < 0.5
    inst = {"mode": mode, "tripotent": a.to_json(), "other": b.to_json(), "swapped": swapped}
    if a == b:
        return True, inst
    sep = _tripotent_separator(a, b)
    if sep is None:
        return False, inst
    inst["separator"] = sep.to_json()
    return True, inst


def _single_spectrum(n, lam, rng, mode):
    ident = Matrix.identity(n)
    jn = jordan_block(n, lam)
    if mode == 0:
        a = jn
        col = n - 1
        for i in range(n - 1):
            a = a + Matrix.unit(n, i, col, random_scalar(rng, bound=3)) if rng.random() < 0.7 else a
        return a
    if mode == 1:
        a = ident.scale(lam)
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.6:
                    a = a + Matrix.unit(n, i, j, random_scalar(rng, bound=3))
        return a
    if mode == 2:
        s = random_invertible(n, rng)
        return ident.scale(lam) + s @ jordan_block(n, 0) @ s.inverse()
    if mode == 3:
        i = rng.randint(0, n - 2)
        j = rng.randint(i + 1, n - 1)
        return jn + Matrix.unit(n, i, j, _nonzero(rng, 3))
    return ident.scale(lam) + random_nilpotent_rank_one(n, rng)


def _t_lem_jk(n, rng, lambdas):
    lam = _lam(rng, lambdas)
    mode = rng.randint(0, 4)
    a = _single_spectrum(n, lam, rng, mode)
    jn = jordan_block(n, lam)
    concl = all(a.column(c) == jn.column(c) for c in range(n - 1))
    hyp = all(corner_trace_check(a, jordan_block(k, lam).inverse(), k)["all_probes_idem"] for k in range(1, n))
    kk = rng.randint(1, min(n, 3))
    jk = jordan_block(kk, lam)
    jinv = jk.inverse()
    sylvester_ok = solve_sylvester(jinv, jinv, Matrix.identity(kk).scale(2)) == jk
    ok = hyp == concl and sylvester_ok and (mode != 0 or concl)
    return ok, {"mode": mode, "lam": str(lam), "a": a.to_json(), "hypothesis": hyp, "conclusion": concl, "k": kk}


def _jn_instance(n, rng, lam):
    m = rng.randint(1, n - 1)
    s = random_invertible(n, rng)
    s_inv = s.inverse()
    core = _blocks(jordan_block(m, lam), _rect(rng, m, n - m), _rect(rng, n - m, m, 0), random_matrix(n - m, rng, bound=2))
    a = s @ core @ s_inv
    mode = rng.randint(0, 4)
    if mode == 0:
        b = a
    elif mode == 1:
        delta = Matrix.unit(n, rng.randint(0, n - 1), rng.randint(m, n - 1), _nonzero(rng, 3))
        b = a + s @ delta @ s_inv
    elif mode == 2:
        delta = Matrix.unit(n, rng.randint(0, n - 1), rng.randint(0, m - 1), _nonzero(rng, 3))
        b = a + s @ delta @ s_inv
    elif mode == 3:
        b = random_matrix(n, rng, bound=3)
    else:
        b = a + s @ outer(random_vector(n, rng, bound=2), random_vector(n, rng, bound=2)) @ s_inv
    ys = [s.column(i) for i in range(m)]
    return m, a, b, ys, mode


def _restricted_search(a, b, rng, accept, inst) -> bool:
    try:
        res = distinguish(a, b, 500, rng.spawn(0x5EA), accept=accept)
    except ProbeBudgetExhausted as exc:
        inst["error"] = "no separator in %d probes" % exc.probes_used
        return False
    x = res.witness
    inst["separator"] = x.to_json()
    inst["probes"] = res.probes_used
    return accept(res.witness_kind, x) and separates(a, b, x) and _star_zero_separates(a, b, x)


def _t_jn_lambda(n, rng, lambdas):
    lam = _lam(rng, lambdas)
    m, a, b, ys, mode = _jn_instance(n, rng, lam)
    inst = {"mode": mode, "lam": str(lam), "m": m, "a": a.to_json(), "b": b.to_json()}
    if all(a.apply(y) == b.apply(y) for y in ys):
        return True, inst
    mu = lam.inverse()

    def accept(kind, x):
        return x.rank() == 1 or (m > 1 and in_jordan_family(x, m - 1, mu))

    return _restricted_search(a, b, rng, accept, inst), inst


def _t_jn_zero(n, rng, lambdas):
    m, a, b, ys, mode = _jn_instance(n, rng, Scalar())
    inst = {"mode": mode, "m": m, "a": a.to_json(), "b": b.to_json()}
    if all(a.apply(y) == b.apply(y) for y in ys):
        return True, inst

    def accept(kind, x):
        return x.rank() == 1 or x @ x @ x == x

    return _restricted_search(a, b, rng, accept, inst), inst


def _t_prop_1234(n, rng, lambdas):
    while True:
        a = _structured(n, rng)
        if not a.is_zero():
            break
    mode = rng.randint(0, 3)
    if mode == 0:
        b = a
    elif mode == 1:
        alpha, gamma = random_scalar(rng, bound=2), random_scalar(rng, bound=2)
        b = a + Matrix.identity(n).scale(alpha) + (a @ a).scale(gamma)
    elif mode == 2:
        b = _perturbed(a, rng)
    else:
        b = random_matrix(n, rng, bound=3)
    x = random_vector(n, rng, bound=2)
    for _ in range(6):
        report = prop_1234_checks(a, b, x)
        if report.case != "inapplicable":
            break
        x = rng.choice([random_vector(n, rng, bound=2), basis_vector(n, rng.randint(0, n - 1))])
    inst = {"mode": mode, "a": a.to_json(), "b": b.to_json(), "x": _vec_json(x), "report": report.to_json()}
    ok = report.consistent
    sep = report.separator
    if sep is not None:
        ok = ok and sep.rank() == 1 and (sep @ sep).is_zero()
        ok = ok and is_nonzero_idempotent(jordan(a, sep)) and not is_nonzero_idempotent(jordan(b, sep))
    return ok, inst


def _t_lem_operator(n, rng, lambdas):
    a = _structured(n, rng)
    b = a if rng.random() < 0.25 else _perturbed(a, rng)
    inst = {"a": a.to_json(), "b": b.to_json()}
    try:
        res = distinguish(a, b, 500, rng.spawn(0x0B5))
    except ProbeBudgetExhausted as exc:
        inst["error"] = "no separator in %d probes" % exc.probes_used
        return False, inst
    if a == b:
        return res.equal, inst
    x = res.witness
    inst["witness"] = x.to_json()
    return (not res.equal) and is_probe(x) and separates(a, b, x), inst


@dataclass(frozen=True)
class Suite:
    name: str
    min_n: int
    trial: Callable


SUITES: dict[str, Suite] = {
    s.name: s
    for s in [
        Suite("observation", 2, _t_observation),
        Suite("f-nonzero", 2, _t_f_nonzero),
        Suite("f-zero", 2, _t_f_zero),
        Suite("zero-jordan", 2, _t_zero_jordan),
        Suite("lambda-x", 2, _t_lambda_x),
        Suite("a-zero", 2, _t_a_zero),
        Suite("a-identity", 2, _t_a_identity),
        Suite("lemma-id", 2, _t_lemma_id),
        Suite("pq-zero", 2, _t_pq_zero),
        Suite("minus-p", 3, _t_minus_p),
        Suite("pq", 2, _t_pq),
        Suite("lem-x", 2, _t_lem_x),
        Suite("corr-j1", 3, _t_corr_j1),
        Suite("corr-alg", 3, _t_corr_alg),
        Suite("corr-d", 3, _t_corr_d),
        Suite("lem-jk", 2, _t_lem_jk),
        Suite("jn-lambda", 3, _t_jn_lambda),
        Suite("jn-zero", 3, _t_jn_zero),
        Suite("prop-1234", 3, _t_prop_1234),
        Suite("lem-operator", 3, _t_lem_operator),
    ]
}


def check_suite(name: str, n: int) -> Suite:
    suite = SUITES.get(name)
    if suite is None:
        raise SuiteError("unknown lemma suite %r; choose from %s" % (name, ", ".join(SUITES)))
    if n < suite.min_n:
        raise SuiteError("suite %r needs n >= %d, got %d" % (name, suite.min_n, n))
    return suite


def run_trial(name: str, n: int, seed: int, trial: int, lambdas=DEFAULT_LAMBDAS) -> tuple[bool, dict]:
    """One trial with ``Rng(seed ^ trial)``; errors count as failures."""
    suite = check_suite(name, n)
    trial_seed = seed ^ trial
    meta = {"suite": name, "n": n, "trial": trial, "seed": seed, "trial_seed": trial_seed}
    try:
        ok, inst = suite.trial(n, Rng(trial_seed), tuple(as_scalar(v) for v in lambdas))
    except Exception as exc:  # a crash is a property failure worth reporting
        return False, dict(meta, error="%s: %s" % (type(exc).__name__, exc))
    return ok, dict(meta, instance=inst)


def _run_chunk(args):
    name, n, seed, trials, lambdas = args
    out = []
    for t in trials:
        ok, dump = run_trial(name, n, seed, t, lambdas)
        out.append((t, ok, None if ok else dump))
    return out


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise SuiteError("%s must be an integer, got %r" % (WORKERS_ENV, raw)) from None


def run_suite(name: str, n: int, trials: int, seed: int, lambdas=DEFAULT_LAMBDAS, workers: int | None = None):
    """Run ``trials`` trials; returns ``(passes, failures)`` with failures sorted by trial index."""
    check_suite(name, n)
    lambdas = tuple(str(as_scalar(v)) for v in lambdas)
    if any(not as_scalar(v) for v in lambdas):
        raise SuiteError("lambda set must not contain 0")
    workers = worker_count() if workers is None else workers
    indices = list(range(trials))
    if workers <= 1 or trials < 2:
        results = _run_chunk((name, n, seed, indices, lambdas))
    else:
        chunks = [indices[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            results = [r for part in pool.map(_run_chunk, [(name, n, seed, c, lambdas) for c in chunks]) for r in part]
    results.sort(key=lambda r: r[0])
    failures = [dump for _, ok, dump in results if not ok]
    return trials - len(failures), failures
