"""Acceptance criteria, one test per criterion.

Each test records a one-line verdict in ``conftest.ACCEPTANCE_LINES`` before
asserting, so the terminal summary shows every line even when one fails.
All comparisons are exact; the only tolerances are the pinned wall-clock and
success-rate limits below.
"""

import itertools
import sys
import time

import pytest

from conftest import ACCEPTANCE_LINES
from preserver_lab.cli import main
from preserver_lab.equality import ProbeBudgetExhausted, distinguish, is_probe, separates
from preserver_lab.jordan import is_idempotent, is_orthogonal, jordan
from preserver_lab.matrix import Matrix, Rng, direct_sum, jordan_block, random_idempotent, random_invertible, random_matrix
from preserver_lab.reconstruct import (
    CORRUPTION_MODES,
    AlphaNotRepresentable,
    StepViolation,
    alpha_reduce,
    make_canonical,
    make_canonical_scaled,
    make_corrupted,
    reconstruct,
    recovered_c_alpha,
    verify_preserving,
)
from preserver_lab.scalar import Scalar, as_scalar
from preserver_lab.suites import SUITES, _perturbed, _structured, run_suite
from preserver_lab.witnesses import witness_involution, witness_square_zero

SEED = 7

C1_NS, C1_TRIALS, C1_SECONDS = (3, 4, 5), 500, 60.0
C2_NS, C2_PAIRS, C2_NONORTH = (3, 4, 5), 500, 100
C3_NS, C3_EACH = (3, 4, 6), 200
C4_KS, C4_LAMBDAS = (1, 2, 3), ("1", "-1", "2", "1/2", "i")
C5_NS, C5_PAIRS, C5_BUDGET, C5_RATE = (3, 4, 5), 300, 500, 0.99
C6_NS, C6_MAPS, C6_RESIDUAL, C6_SECONDS = (3, 4), 100, 50, 120.0
C7_INSTANCES, C7_BUDGET, C7_RESIDUAL = 50, 10_000, 50
C8_ALPHAS, C8_SIGMAS = ("1/2", "2", "-1/2"), ("id", "conj")


def record(num: int, ok: bool, detail: str):
    ACCEPTANCE_LINES[num] = ("criterion %d: %s  %s" % (num, "PASS" if ok else "FAIL", detail)).rstrip()


def test_c1_lemma_suites():
    slowest, bad = 0.0, []
    for name in SUITES:
        for n in C1_NS:
            start = time.perf_counter()
            passes, failures = run_suite(name, n, C1_TRIALS, SEED)
            elapsed = time.perf_counter() - start
            slowest = max(slowest, elapsed)
            if passes != C1_TRIALS or failures or elapsed >= C1_SECONDS:
                bad.append((name, n, passes, round(elapsed, 1)))
    ok = not bad
    record(1, ok, "%d suites x n in %s, %d/%d each, slowest %.1fs (limit %.0fs) %s"
           % (len(SUITES), C1_NS, C1_TRIALS, C1_TRIALS, slowest, C1_SECONDS, bad or ""))
    assert ok, bad


def test_c1_cli_entry_point(capsys):
    code = main(["verify-lemma", "pq", "--n", "3", "--trials", "20", "--seed", str(SEED)])
    capsys.readouterr()
    assert code == 0


def _orthogonal_pair(n, rng):
    s = random_invertible(n, rng)
    r = rng.randint(1, n - 1)
    d = random_idempotent(n - r, rng.randint(1, n - r), rng)
    p = s @ direct_sum(Matrix.identity(r), Matrix.zeros(n - r)) @ s.inverse()
    q = s @ direct_sum(Matrix.zeros(r), d) @ s.inverse()
    return p, q


def _non_orthogonal_pair(n, rng):
    """P = S (I_r + 0) S^-1 and Q = S [[0, X], [0, I]] S^-1 with X != 0, so PQ != 0."""
    s = random_invertible(n, rng)
    r = rng.randint(1, n - 1)
    rows = [[Scalar(int(i == j and i >= r)) for j in range(n)] for i in range(n)]
    while not any(rows[i][j] for i in range(r) for j in range(r, n)):
        x = random_matrix(n, rng, bound=3)
        for i in range(r):
            for j in range(r, n):
                rows[i][j] = x[i, j]
    p = s @ direct_sum(Matrix.identity(r), Matrix.zeros(n - r)) @ s.inverse()
    q = s @ Matrix(rows) @ s.inverse()
    return p, q


def test_c2_minus_p_q_equivalence():
    rng = Rng(SEED)
    bad = 0
    for n in C2_NS:
        for t in range(C2_PAIRS):
            p, q = _orthogonal_pair(n, rng) if t % 2 == 0 else (
                random_idempotent(n, rng.randint(1, n - 1), rng),
                random_idempotent(n, rng.randint(1, n - 1), rng),
            )
            pq = jordan(p, q)
            i, ii, iii = is_orthogonal(p, q), pq.is_zero(), is_idempotent(-pq)
            if (iii and not i) or not (i == ii == iii):
                bad += 1
    nonorth_bad = 0
    for t in range(C2_NONORTH):
        n = C2_NS[t % len(C2_NS)]
        p, q = _non_orthogonal_pair(n, rng)
        assert is_idempotent(q) and not (p @ q).is_zero()
        if is_idempotent(-jordan(p, q)):
            nonorth_bad += 1
    ok = bad == 0 and nonorth_bad == 0
    record(2, ok, "%d pairs per n in %s, %d violations; %d non-orthogonal pairs, %d satisfy (iii)"
           % (C2_PAIRS, C2_NS, bad, C2_NONORTH, nonorth_bad))
    assert ok


def test_c3_witnesses():
    rng = Rng(SEED)
    bad = 0
    for n in C3_NS:
        for _ in range(C3_EACH):
            s = random_invertible(n, rng)
            a = s @ Matrix.unit(n, 0, rng.randint(1, n - 1)) @ s.inverse()
            w = witness_square_zero(a).matrix
            if not (w.rank() <= 2 and is_idempotent(jordan(a, w)) and not is_idempotent(jordan(w, w))):
                bad += 1
        for _ in range(C3_EACH):
            s = random_invertible(n, rng)
            minus = rng.randint(1, n - 1)
            a = s @ Matrix.diag([1] * (n - minus) + [-1] * minus) @ s.inverse()
            w = witness_involution(a).matrix
            if not (w.rank() <= 2 and is_idempotent(jordan(a, w)) and not is_idempotent(jordan(w, w))):
                bad += 1
    ok = bad == 0
    record(3, ok, "%d square-zero + %d involutions per n in %s, %d bad witnesses" % (C3_EACH, C3_EACH, C3_NS, bad))
    assert ok


def test_c4_sylvester_rigidity():
    from preserver_lab.structure import solve_sylvester

    bad = []
    for k, lam in itertools.product(C4_KS, C4_LAMBDAS):
        j = jordan_block(k, lam)
        j_inv = j.inverse()
        x = solve_sylvester(j_inv, j_inv, Matrix.identity(k).scale(2))
        if x != j:
            bad.append((k, lam))
    ok = not bad
    record(4, ok, "k in %s, lambda in %s, solution equals J_k(lambda) exactly %s" % (C4_KS, C4_LAMBDAS, bad or ""))
    assert ok


def _unequal_pair(n, rng):
    while True:
        a = _structured(n, rng)
        b = _perturbed(a, rng)
        if a != b:
            return a, b


def test_c5_equality_oracle():
    rng = Rng(SEED)
    worst, unsound, equal_bad, max_used = 1.0, 0, 0, 0
    for n in C5_NS:
        found = 0
        for _ in range(C5_PAIRS):
            a, b = _unequal_pair(n, rng)
            try:
                res = distinguish(a, b, C5_BUDGET, rng)
            except ProbeBudgetExhausted:
                continue
            max_used = max(max_used, res.probes_used)
            if res.equal or not (separates(a, b, res.witness) and is_probe(res.witness)):
                unsound += 1
                continue
            found += 1
        worst = min(worst, found / C5_PAIRS)
        for _ in range(C5_PAIRS):
            a = _structured(n, rng)
            if not distinguish(a, Matrix(a.rows()), C5_BUDGET, rng).equal:
                equal_bad += 1
    ok = worst >= C5_RATE and unsound == 0 and equal_bad == 0
    record(5, ok, "worst success rate %.3f (need >= %.2f), %d unsound, %d equal pairs misjudged, max probes %d"
           % (worst, C5_RATE, unsound, equal_bad, max_used))
    assert ok


def test_c6_reconstruction_round_trip():
    combos = list(itertools.product([1, -1], ["id", "transpose"], ["id", "conj"]))
    start = time.perf_counter()
    bad, worst_queries = [], {}
    for n in C6_NS:
        rng = Rng(SEED + n)
        limit = 5 * n * n + 50
        for i in range(C6_MAPS):
            lam, diamond, sigma = combos[i % len(combos)]
            t = random_invertible(n, rng)
            oracle = make_canonical(lam, t, diamond, sigma)
            res = reconstruct(oracle, C6_RESIDUAL, rng)
            ratio = res.map.t.inverse() @ t
            fresh = [random_matrix(n, rng, bound=5) for _ in range(C6_RESIDUAL)]
            agree = all(res.map.apply(x) == oracle.canonical.apply(x) for x in fresh)
            scalar = ratio == Matrix.identity(n).scale(ratio[0, 0])
            worst_queries[n] = max(worst_queries.get(n, 0), res.queries)
            if not (res.agreement and agree and scalar and res.queries <= limit):
                bad.append((n, i))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < C6_SECONDS
    record(6, ok, "%d maps per n in %s over 8 combinations, max queries %s (limit 5n^2+50), %.1fs (limit %.0fs) %s"
           % (C6_MAPS, C6_NS, worst_queries, elapsed, C6_SECONDS, bad or ""))
    assert ok


def _detected(oracle, rng) -> bool:
    try:
        res = reconstruct(oracle, C7_RESIDUAL, rng)
    except StepViolation:
        return True
    if not res.agreement:
        return True
    return verify_preserving(oracle, C7_BUDGET, rng) is not None


def test_c7_corruption_detection():
    rng = Rng(SEED)
    missed = {}
    for mode in CORRUPTION_MODES:
        missed[mode] = 0
        for i in range(C7_INSTANCES):
            n = 3 + i % 2
            base = make_canonical(
                rng.choice([1, -1]),
                random_invertible(n, rng),
                rng.choice(["id", "transpose"]),
                rng.choice(["id", "conj"]),
            )
            if not _detected(make_corrupted(base, mode, rng), rng):
                missed[mode] += 1
    ok = not any(missed.values())
    record(7, ok, "%d instances per mode, budget %d, missed %s" % (C7_INSTANCES, C7_BUDGET, missed))
    assert ok


def _alpha_case(alpha, sigma, rng):
    alpha = as_scalar(alpha)
    lam_psi = rng.choice([1, -1])
    phi = make_canonical_scaled(alpha, lam_psi, random_invertible(3, rng), rng.choice(["id", "transpose"]), sigma)
    res = reconstruct(alpha_reduce(phi, alpha), 20, rng)
    c = recovered_c_alpha(res, alpha)
    target = alpha.conjugate() / alpha if sigma == "conj" else Scalar(1)
    return res.agreement and c * c == target and c == phi.canonical.lam


def test_c8_alpha_reduction():
    rng = Rng(SEED)
    bad = [(a, s) for a in C8_ALPHAS for s in C8_SIGMAS if not _alpha_case(a, s, rng)]
    ok = not bad
    ACCEPTANCE_LINES[8] = "criterion 8: %s  alpha in %s x sigma in %s recovered exactly%s" % (
        "PASS" if ok else "FAIL", C8_ALPHAS, C8_SIGMAS, " %s" % bad if bad else "",
    )
    assert ok


@pytest.mark.xfail(raises=AlphaNotRepresentable, strict=True, reason="sqrt(4i) is not a Gaussian rational")
@pytest.mark.parametrize("sigma", C8_SIGMAS)
def test_c8_alpha_two_i(sigma):
    line = ACCEPTANCE_LINES.get(8, "criterion 8: FAIL")
    if "alpha=2i" not in line:
        ACCEPTANCE_LINES[8] = line.replace("PASS", "FAIL", 1) + "; alpha=2i unattainable in Q(i) (sqrt(4i) irrational)"
    _alpha_case("2i", sigma, Rng(SEED))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
