import pytest
from hypothesis import given
from hypothesis import strategies as st

from preserver_lab.jordan import RankOneOp, is_idempotent, jordan
from preserver_lab.matrix import Matrix, Rng, basis_vector, random_invertible
from preserver_lab.scalar import Scalar
from preserver_lab.structure import random_nilpotent_rank_one
from preserver_lab.witnesses import (
    WitnessError,
    embed_block,
    is_square_zero,
    is_tripotent,
    step_families,
    witness_distinguish_idem,
    witness_involution,
    witness_square_zero,
)

E = Matrix.unit


def e(n, i):
    return basis_vector(n, i)


def test_square_zero_e12_closed_form():
    w = witness_square_zero(E(2, 0, 1))
    assert w.matrix == Matrix([[-2, 0], [2, 2]])
    assert jordan(E(2, 0, 1), w.matrix) == Matrix.identity(2)
    assert w.passed


def test_square_zero_e13():
    a = E(3, 0, 2)
    w = witness_square_zero(a)
    assert w.matrix.rank() <= 2
    assert is_idempotent(jordan(a, w.matrix))
    assert not is_idempotent(w.matrix @ w.matrix)


@pytest.mark.parametrize("a", [Matrix.zeros(2), Matrix.identity(2), Matrix.diag([1, 0])])
def test_square_zero_rejects(a):
    with pytest.raises(WitnessError):
        witness_square_zero(a)


@pytest.mark.parametrize("d", [[1, -1, 1], [1, 1, -1], [-1, -1, 1]])
def test_involution_diagonal(d):
    a = Matrix.diag(d)
    w = witness_involution(a)
    assert jordan(a, w.matrix).is_zero()
    assert not is_idempotent(w.matrix @ w.matrix)


@pytest.mark.parametrize("a", [Matrix.identity(3), -Matrix.identity(3), Matrix.diag([2, 1, 1])])
def test_involution_rejects(a):
    with pytest.raises(WitnessError):
        witness_involution(a)


def test_distinguish_idem_orthogonal_pair():
    p = RankOneOp(e(3, 0), e(3, 0))
    q = RankOneOp(e(3, 1), e(3, 1))
    w = witness_distinguish_idem(p, q)
    r = w.matrix
    assert jordan(q.to_matrix(), r).is_zero()
    assert jordan(p.to_matrix(), r).trace() == Scalar(1) / 2
    assert ("branch f1(x2)=0", True) in w.checks


def test_distinguish_idem_other_branch():
    p = RankOneOp(e(3, 0), e(3, 0))
    q = RankOneOp(e(3, 1), (1, 1, 0))
    w = witness_distinguish_idem(p, q)
    assert w.passed
    assert jordan(q.to_matrix(), w.matrix).is_zero()
    assert not is_idempotent(jordan(p.to_matrix(), w.matrix))


def test_distinguish_idem_preconditions():
    p = RankOneOp(e(3, 0), e(3, 0))
    with pytest.raises(WitnessError):
        witness_distinguish_idem(p, p)
    with pytest.raises(WitnessError):
        witness_distinguish_idem(RankOneOp(e(2, 0), e(2, 0)), RankOneOp(e(2, 1), e(2, 1)))
    with pytest.raises(WitnessError):
        witness_distinguish_idem(p, RankOneOp(e(3, 1), (0, 2, 0)))


def test_step_families_closed_forms():
    fam = step_families(3, (0, 1), 0, 1)
    assert fam["K_alpha"] == Matrix.diag([1, -1, 0])
    assert fam["N_lambda"] == Matrix([[1, -1, 0], [1, -1, 0], [0, 0, 0]])
    lam = Scalar(2)
    fam = step_families(3, (0, 1), 5, lam)
    d = Matrix.diag([lam, -lam, 0])
    assert jordan(d, fam["N_lambda"]) == Matrix.diag([1, 1, 0])


@given(st.sampled_from(["1", "-1", "2", "1/2", "i", "1+i"]), st.integers(-3, 3))
def test_step_families_shapes(lam, alpha):
    fam = step_families(4, (1, 3), alpha, lam)
    assert is_tripotent(fam["K_alpha"]) and fam["K_alpha"].rank() == 2
    assert is_tripotent(fam["H_beta"]) and fam["H_beta"].rank() == 2
    for name in ("N_alpha", "M_beta", "N_lambda"):
        assert is_square_zero(fam[name]) and fam[name].rank() <= 1


def test_step_families_errors():
    with pytest.raises(ValueError):
        step_families(3, (0, 1), 1, 0)
    with pytest.raises(ValueError):
        step_families(3, (1, 1), 1, 1)
    with pytest.raises(ValueError):
        step_families(1, (0, 1), 1, 1)


def test_embed_block():
    assert embed_block(3, 2, 0, [[1, 2], [3, 4]]) == Matrix([[4, 0, 3], [0, 0, 0], [2, 0, 1]])


@given(st.integers(0, 10_000), st.integers(2, 4))
def test_square_zero_random(seed, n):
    rng = Rng(seed)
    s = random_invertible(n, rng)
    a = s @ E(n, 0, 1) @ s.inverse()
    if rng.choice([True, False]):
        a = random_nilpotent_rank_one(n, rng)
    assert witness_square_zero(a).passed


@given(st.integers(0, 10_000), st.integers(2, 4))
def test_involution_random(seed, n):
    rng = Rng(seed)
    minus = rng.randint(1, n - 1)
    s = random_invertible(n, rng)
    a = s @ Matrix.diag([1] * (n - minus) + [-1] * minus) @ s.inverse()
    assert witness_involution(a).passed
