"""Black-box recovery of ``X -> lam T sigma(X)^d T^-1`` from a map oracle.

The oracle is only ever evaluated, never inspected. Recovery reads off the
sign from the images of +-I, the frame ``u_i (x) v_i`` from the images of
the diagonal units, relative column scalings and the transpose flag from the
images of ``E_ii + E_ij``, and sigma from the image of ``i E_11``. Every
intermediate object is re-validated, and the final map is checked on fresh
random inputs plus the structured probe families.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

from .equality import ProbeBudgetExhausted, distinguish
from .jordan import RankOneOp, is_idempotent, jordan
from .matrix import (
    Matrix,
    Rng,
    outer,
    random_idempotent,
    random_matrix,
    random_vector,
    solve_functional,
)
from .scalar import Scalar, as_scalar
from .structure import random_nilpotent_rank_one, random_tripotent
from .witnesses import embed_block, step_families

__all__ = [
    "CanonicalMap",
    "MapOracle",
    "OracleContractError",
    "StepViolation",
    "AlphaNotRepresentable",
    "ReconstructionResult",
    "CORRUPTION_MODES",
    "make_canonical",
    "make_canonical_scaled",
    "make_corrupted",
    "make_table_oracle",
    "oracle_from_spec",
    "verify_preserving",
    "reconstruct",
    "alpha_reduce",
    "c_alpha",
    "recovered_c_alpha",
]

DIAMONDS = ("id", "transpose")
SIGMAS = ("id", "conj")
CORRUPTION_MODES = ("swap_two_idempotents", "scale_one_output", "transpose_one_cell")


class OracleContractError(RuntimeError):
    """The oracle cannot answer a query it is required to answer."""


class StepViolation(RuntimeError):
    """The oracle contradicts a consequence of the preserving property."""

    def __init__(self, step: str, detail: str, probe: Matrix | None = None, image: Matrix | None = None):
        super().__init__("%s violated: %s" % (step, detail))
        self.step = step
        self.detail = detail
        self.probe = probe
        self.image = image

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "detail": self.detail,
            "probe": None if self.probe is None else self.probe.to_json(),
            "image": None if self.image is None else self.image.to_json(),
        }


class AlphaNotRepresentable(ValueError):
    """``sqrt(2 alpha)`` is not a Gaussian rational."""


def _sigma(m: Matrix, sigma: str) -> Matrix:
    return m.conj() if sigma == "conj" else m


def _sigma_s(s: Scalar, sigma: str) -> Scalar:
    return s.conjugate() if sigma == "conj" else s


def _diamond(m: Matrix, diamond: str) -> Matrix:
    return m.transpose() if diamond == "transpose" else m


@dataclass(frozen=True)
class CanonicalMap:
    lam: Scalar
    t: Matrix
    diamond: str = "id"
    sigma: str = "id"
    alpha: Scalar | None = None

    def __post_init__(self):
        object.__setattr__(self, "lam", as_scalar(self.lam))
        if self.alpha is not None:
            object.__setattr__(self, "alpha", as_scalar(self.alpha))
        if self.diamond not in DIAMONDS:
            raise ValueError("diamond must be one of %s" % (DIAMONDS,))
        if self.sigma not in SIGMAS:
            raise ValueError("sigma must be one of %s" % (SIGMAS,))
        if not self.t.is_invertible():
            raise ValueError("t must be invertible")
        sq = self.lam * self.lam
        if self.alpha is None:
            if sq != 1:
                raise ValueError("lambda must be 1 or -1")
        elif sq != _sigma_s(self.alpha, self.sigma) / self.alpha:
            raise ValueError("lambda^2 must equal sigma(alpha)/alpha")

    @property
    def n(self) -> int:
        return self.t.n

    def _t_inv(self) -> Matrix:
        inv = self.__dict__.get("_inv")
        if inv is None:
            inv = self.t.inverse()
            object.__setattr__(self, "_inv", inv)
        return inv

    def apply(self, x: Matrix) -> Matrix:
        return (self.t @ _diamond(_sigma(x, self.sigma), self.diamond) @ self._t_inv()).scale(self.lam)

    def inverse_apply(self, y: Matrix) -> Matrix:
        core = (self._t_inv() @ y @ self.t).scale(self.lam.inverse())
        return _sigma(_diamond(core, self.diamond), self.sigma)

    def normalized(self) -> "CanonicalMap":
        """Same map with T scaled so its first nonzero entry (column-major) is 1."""
        return CanonicalMap(self.lam, _normalize(self.t), self.diamond, self.sigma, self.alpha)

    def to_json(self) -> dict:
        out = {
            "lambda": str(self.lam),
            "t": self.t.to_json(),
            "diamond": self.diamond,
            "sigma": self.sigma,
        }
        if self.alpha is not None:
            out["alpha"] = str(self.alpha)
        return out


def _normalize(t: Matrix) -> Matrix:
    for j in range(t.n):
        for i in range(t.n):
            if t[i, j]:
                return t.scale(t[i, j].inverse())
    raise ValueError("zero matrix")


class MapOracle:
    """Deterministic matrix-to-matrix black box with an atomic query counter."""

    def __init__(self, fn: Callable[[Matrix], Matrix], n: int, stateless: bool = True, label: str = "oracle"):
        self._fn = fn
        self.n = n
        self.stateless = stateless
        self.label = label
        self.canonical: CanonicalMap | None = None
        self._lock = threading.Lock()
        self._queries = 0

    @property
    def query_log(self) -> int:
        return self._queries

    def reset_log(self):
        with self._lock:
            self._queries = 0

    def __call__(self, x: Matrix) -> Matrix:
        if x.n != self.n:
            raise OracleContractError("oracle of dimension %d queried with n=%d" % (self.n, x.n))
        with self._lock:
            self._queries += 1
        y = self._fn(x)
        if not isinstance(y, Matrix) or y.n != self.n:
            raise OracleContractError("oracle returned a non-matrix or wrong dimension")
        return y


def make_canonical(lam, t: Matrix, diamond: str = "id", sigma: str = "id") -> MapOracle:
    cmap = CanonicalMap(as_scalar(lam), t, diamond, sigma)
    oracle = MapOracle(cmap.apply, t.n, label="canonical")
    oracle.canonical = cmap
    return oracle


def c_alpha(alpha, sigma: str) -> Scalar:
    """``sigma(s)/s`` for ``s = sqrt(2 alpha)``, computed without s when possible.

    For conjugation ``conj(s)/s = conj(2 alpha)/|2 alpha|``, which is exact
    whenever ``|2 alpha|`` is rational.
    """
    alpha = as_scalar(alpha)
    if not alpha:
        raise ValueError("alpha must be nonzero")
    if sigma == "id":
        return Scalar(1)
    two = alpha * 2
    mod = Scalar(two.norm()).sqrt()
    if mod is None:
        raise AlphaNotRepresentable("|2 alpha| = sqrt(%s) is irrational" % Scalar(two.norm()))
    return two.conjugate() / mod


def make_canonical_scaled(alpha, lam_psi, t: Matrix, diamond: str = "id", sigma: str = "id") -> MapOracle:
    """``X -> lam_psi c_alpha T sigma(X)^d T^-1``, preserving idempotency of ``alpha (AB + BA)``."""
    alpha = as_scalar(alpha)
    lam_psi = as_scalar(lam_psi)
    if lam_psi * lam_psi != 1:
        raise ValueError("lam_psi must be 1 or -1")
    cmap = CanonicalMap(lam_psi * c_alpha(alpha, sigma), t, diamond, sigma, alpha)
    oracle = MapOracle(cmap.apply, t.n, label="canonical-scaled")
    oracle.canonical = cmap
    return oracle


def make_corrupted(base: MapOracle, mode: str, rng: Rng) -> MapOracle:
    """Break a canonical oracle on a targeted set of inputs.

    * ``scale_one_output``: doubles the image of one diagonal unit ``E_kk``.
    * ``swap_two_idempotents``: swaps the images of ``E_ii`` and ``E_jj``.
    * ``transpose_one_cell``: swaps output cells (i, j) and (j, i) for every input.
    """
    n = base.n
    if mode not in CORRUPTION_MODES:
        raise ValueError("unknown corruption mode %r" % mode)
    if mode == "scale_one_output":
        k = rng.randint(0, n - 1)
        target = Matrix.unit(n, k, k)

        def fn(x):
            y = base(x)
            return y.scale(2) if x == target else y

        detail = {"k": k}
    elif mode == "swap_two_idempotents":
        i, j = rng.sample(range(n), 2)
        ei, ej = Matrix.unit(n, i, i), Matrix.unit(n, j, j)

        def fn(x):
            if x == ei:
                return base(ej)
            if x == ej:
                return base(ei)
            return base(x)

        detail = {"i": i, "j": j}
    else:
        i, j = rng.sample(range(n), 2)

        def fn(x):
            y = base(x)
            rows = y.rows()
            rows[i][j], rows[j][i] = rows[j][i], rows[i][j]
            return Matrix(rows)

        detail = {"i": i, "j": j}
    oracle = MapOracle(fn, n, label="corrupted:" + mode)
    oracle.corruption = dict(mode=mode, **detail)
    return oracle


def make_table_oracle(n: int, table: dict) -> MapOracle:
    """Finite oracle defined by an explicit input-to-output table."""

    def fn(x):
        try:
            return table[x]
        except KeyError:
            raise OracleContractError("table oracle has no entry for the queried matrix") from None

    return MapOracle(fn, n, label="table")


def oracle_from_spec(spec: dict, rng: Rng | None = None) -> MapOracle:
    """Build an oracle from its JSON description (kinds: canonical, corrupted, table)."""
    kind = spec.get("kind")
    if kind in ("canonical", "corrupted"):
        t = Matrix.from_json(spec["t"]) if isinstance(spec["t"], dict) else Matrix(spec["t"])
        lam = as_scalar(str(spec.get("lambda", 1)))
        diamond = spec.get("diamond", "id")
        sigma = spec.get("sigma", "id")
        if "alpha" in spec:
            base = make_canonical_scaled(as_scalar(str(spec["alpha"])), lam, t, diamond, sigma)
        else:
            base = make_canonical(lam, t, diamond, sigma)
        if kind == "canonical":
            return base
        corruption = spec.get("corruption", "scale_one_output")
        seed = spec.get("corruption_seed", 0)
        return make_corrupted(base, corruption, rng if rng is not None else Rng(seed))
    if kind == "table":
        n = int(spec["n"])
        table = {}
        for entry in spec["entries"]:
            table[Matrix.from_json(entry["input"])] = Matrix.from_json(entry["output"])
        return make_table_oracle(n, table)
    raise ValueError("unknown oracle kind %r" % kind)


# preserving-property fuzzing


def _structured_pairs(n: int, rng: Rng):
    e = lambda i, j: Matrix.unit(n, i, j)  # noqa: E731
    ident = Matrix.identity(n)
    for i in range(n):
        yield e(i, i), e(i, i)
        yield ident, e(i, i)
        yield -ident, e(i, i)
        for lam in (2, Scalar(0, 1), -1):
            lam = as_scalar(lam)
            yield e(i, i).scale(lam), e(i, i).scale(lam.inverse())
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            f = e(i, i) + e(i, j)
            yield e(i, i), e(j, j)
            yield e(i, i), f
            yield f, f
            yield e(i, j), e(j, i)
            yield -e(i, i), e(j, j)
    for i in range(n - 1):
        fam = step_families(n, (i, i + 1), 1, 2)
        k = embed_block(n, i, i + 1, [[2, 0], [0, -2]])
        yield k, fam["N_lambda"]
        yield fam["K_alpha"], fam["N_alpha"]
        yield fam["H_beta"], fam["M_beta"]


def _random_pairs(n: int, rng: Rng):
    while True:
        r = rng.randint(1, n - 1)
        p = random_idempotent(n, r, rng)
        yield p, p
        yield p, Matrix.identity(n) - p
        a = random_matrix(n, rng)
        x = random_vector(n, rng, bound=3)
        # f(x) = 0, f(Ax) = 2, f(A^2 x) = 0 makes a o (x (x) f) idempotent
        ax = a.apply(x)
        f = solve_functional([(x, 0), (ax, 2), (a.apply(ax), 0)], n)
        if f is not None and any(f):
            yield a, outer(x, f)
        yield a, random_matrix(n, rng)
        t = random_tripotent(n, rng.randint(0, 1), rng.randint(0, n - 1), rng)
        yield t, random_nilpotent_rank_one(n, rng)


def verify_preserving(oracle: MapOracle, trials: int, rng: Rng) -> tuple[Matrix, Matrix] | None:
    """First sampled pair where idempotency of ``A o B`` and ``phi(A) o phi(B)`` differ.

    Structured pairs come first, then random ones; ``trials`` bounds the
    number of pairs checked.
    """
    n = oracle.n
    cache: dict[Matrix, Matrix] = {}

    def phi(x):
        y = cache.get(x)
        if y is None:
            y = cache[x] = oracle(x)
        return y

    checked = 0
    for stream in (_structured_pairs(n, rng), _random_pairs(n, rng)):
        for a, b in stream:
            if checked >= trials:
                return None
            checked += 1
            if is_idempotent(jordan(a, b)) != is_idempotent(jordan(phi(a), phi(b))):
                return a, b
    return None


# reconstruction


@dataclass
class ReconstructionResult:
    map: CanonicalMap
    residual_samples: int
    agreement: bool
    counterexample: tuple[Matrix, Matrix] | None = None
    disagreement: Matrix | None = None
    queries: int = 0
    probe_checks: int = 0
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "map": self.map.to_json(),
            "residual_samples": self.residual_samples,
            "agreement": self.agreement,
            "counterexample": None
            if self.counterexample is None
            else [m.to_json() for m in self.counterexample],
            "disagreement": None if self.disagreement is None else self.disagreement.to_json(),
            "queries": self.queries,
            "probe_checks": self.probe_checks,
        }


def _is_rank_one_idempotent(m: Matrix) -> bool:
    return m.trace() == 1 and is_idempotent(m) and m.rank() == 1


def _parallel(v, u) -> Scalar | None:
    """c with ``v = c u``, or None."""
    k = next((i for i, x in enumerate(u) if x), None)
    if k is None:
        return None
    c = v[k] / u[k]
    if all(a == c * b for a, b in zip(v, u)):
        return c
    return None


def _column_factor(c: Matrix, u) -> tuple | None:
    """w with ``c = u (x) w``, or None."""
    k = next(i for i, x in enumerate(u) if x)
    w = tuple(e / u[k] for e in c.row(k))
    return w if any(w) and outer(u, w) == c else None


def _row_factor(c: Matrix, v) -> tuple | None:
    """z with ``c = z (x) v``, or None."""
    k = next(i for i, x in enumerate(v) if x)
    z = tuple(e / v[k] for e in c.column(k))
    return z if any(z) and outer(z, v) == c else None


def _step_probes(n: int) -> list[Matrix]:
    out = []
    for i in range(n):
        for lam in (2, Scalar(0, 1)):
            out.append(Matrix.unit(n, i, i, lam))
    for i in range(n - 1):
        fam = step_families(n, (i, i + 1), 1, 2, beta=2)
        out.append(fam["K_alpha"])
        out.append(fam["H_beta"])
        out.append(fam["N_lambda"])
        out.append(embed_block(n, i, i + 1, [[2, 0], [0, -2]]))
        out.append(embed_block(n, i, i + 1, [[2, 1], [0, 2]]))
    out.append(Matrix.identity(n).scale(2))
    return out


def _certify(oracle: MapOracle, cmap: CanonicalMap, x: Matrix, rng: Rng, rounds: int = 3):
    """Turn a disagreement ``oracle(x) != cmap(x)`` into a preserving-property violation."""
    for _ in range(rounds):
        fx = oracle(x)
        try:
            res = distinguish(fx, cmap.apply(x), 500, rng)
        except (ProbeBudgetExhausted, ValueError):
            return None
        if res.equal:
            return None
        b = cmap.inverse_apply(res.witness)
        fb = oracle(b)
        if is_idempotent(jordan(x, b)) != is_idempotent(jordan(fx, fb)):
            return x, b
        x = b
    return None


def reconstruct(oracle: MapOracle, residual_samples: int = 50, rng: Rng | None = None) -> ReconstructionResult:
    """Recover ``(lam, T, diamond, sigma)`` and check it against the oracle.

    Raises :class:`StepViolation` naming the first contradicted consequence of
    the preserving property.
    """
    n = oracle.n
    if n < 3:
        raise ValueError("reconstruct needs n >= 3")
    rng = rng or Rng(0)
    start = oracle.query_log
    ident = Matrix.identity(n)

    zero = Matrix.zeros(n)
    if not oracle(zero).is_zero():
        raise StepViolation("Step 1", "phi(0) != 0", zero)
    # sign
    img_i, img_mi = oracle(ident), oracle(-ident)
    if img_i == ident:
        lam = Scalar(1)
    elif img_mi == ident:
        lam = Scalar(-1)
    else:
        raise StepViolation("Step 3", "neither phi(I) nor phi(-I) equals I", ident, img_i)
    phi = lambda x: oracle(x).scale(lam)  # noqa: E731
    if img_i.scale(lam) != ident or img_mi.scale(lam) != -ident:
        raise StepViolation("Step 3", "lam phi(+-I) != +-I", -ident)

    # frame of rank-one idempotents
    units = [Matrix.unit(n, i, i) for i in range(n)]
    ps = []
    for e in units:
        p = phi(e)
        if not _is_rank_one_idempotent(p):
            raise StepViolation("Step 5", "image of a rank-one idempotent is not a rank-one idempotent", e, p)
        ps.append(p)
    for i in range(n):
        for j in range(i + 1, n):
            if not ((ps[i] @ ps[j]).is_zero() and (ps[j] @ ps[i]).is_zero()):
                raise StepViolation("Step 7", "images of orthogonal idempotents are not orthogonal", units[j], ps[j])
    frame = [RankOneOp.from_matrix(p) for p in ps]
    us = [r.x for r in frame]
    vs = [r.f for r in frame]

    # cross terms decide the transpose flag and relative scalings
    cross = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            probe = units[i] + Matrix.unit(n, i, j)
            img = phi(probe)
            if not _is_rank_one_idempotent(img):
                raise StepViolation("Step 5", "image of E_ii + E_ij is not a rank-one idempotent", probe, img)
            c = img - ps[i]
            if c.rank() != 1:
                raise StepViolation("T-recovery", "cross term is not of rank one", probe, img)
            cross[i, j] = (probe, img, c)
    probe, img, c12 = cross[0, 1]
    col = c12.column_space()[0]
    if _parallel(col, us[0]) is not None:
        diamond = "id"
    elif _parallel(col, us[1]) is not None:
        diamond = "transpose"
    else:
        raise StepViolation("T-recovery", "cross term lies in neither frame direction", probe, img)
    for (i, j), (probe, img, c) in cross.items():
        anchor = us[i] if diamond == "id" else us[j]
        if _parallel(c.column_space()[0], anchor) is None:
            raise StepViolation("T-recovery", "cross terms mix identity and transpose behaviour", probe, img)

    if diamond == "id":
        rows = [vs[0]]
        for j in range(1, n):
            w = _column_factor(cross[0, j][2], us[0])
            if w is None:
                raise StepViolation("T-recovery", "cross term does not factor through u_1", cross[0, j][0])
            rows.append(w)
        t = Matrix(rows).inverse() if Matrix(rows).is_invertible() else None
    else:
        cols = [us[0]]
        for j in range(1, n):
            z = _row_factor(cross[0, j][2], vs[0])
            if z is None:
                raise StepViolation("T-recovery", "cross term does not factor through v_1", cross[0, j][0])
            cols.append(z)
        t = Matrix.from_columns(cols)
        t = t if t.is_invertible() else None
    if t is None:
        raise StepViolation("T-recovery", "recovered frame is singular")
    t = _normalize(t)

    # sigma
    probe = Matrix.unit(n, 0, 0, Scalar(0, 1))
    img = phi(probe)
    gi = ps[0].scale(Scalar(0, 1))
    if img == gi:
        sigma = "id"
    elif img == -gi:
        sigma = "conj"
    else:
        raise StepViolation("Step 12", "phi(i E_11) is not +-i phi(E_11)", probe, img)
    cmap = CanonicalMap(lam, t, diamond, sigma)

    # residual check
    checks = _step_probes(n)
    for _ in range(residual_samples):
        checks.append(random_matrix(n, rng, complex_=True, bound=5))
    agreement, counterexample, disagreement = True, None, None
    for x in checks:
        if oracle(x) != cmap.apply(x):
            agreement, disagreement = False, x
            counterexample = _certify(oracle, cmap, x, rng)
            break
    queries = oracle.query_log - start
    return ReconstructionResult(
        cmap, residual_samples, agreement, counterexample, disagreement, queries, len(checks)
    )


def alpha_reduce(oracle: MapOracle, alpha) -> MapOracle:
    """``psi(X) = s phi(X / s)`` with ``s = sqrt(2 alpha)``; refuses when s is not in Q(i)."""
    alpha = as_scalar(alpha)
    if not alpha:
        raise ValueError("alpha must be nonzero")
    s = (alpha * 2).sqrt()
    if s is None:
        raise AlphaNotRepresentable(
            "sqrt(2*alpha) = sqrt(%s) is not a Gaussian rational; exact reduction impossible" % (alpha * 2)
        )
    s_inv = s.inverse()
    psi = MapOracle(lambda x: oracle(x.scale(s_inv)).scale(s), oracle.n, label="alpha-reduced")
    psi.alpha = alpha
    psi.root = s
    return psi


def recovered_c_alpha(result: ReconstructionResult, alpha) -> Scalar:
    """``c_alpha = lam_psi sigma(s)/s`` from a reconstruction of the reduced map."""
    alpha = as_scalar(alpha)
    s = (alpha * 2).sqrt()
    if s is None:
        raise AlphaNotRepresentable("sqrt(2*alpha) is not a Gaussian rational")
    return result.map.lam * _sigma_s(s, result.map.sigma) / s
