import pytest
from hypothesis import given
from hypothesis import strategies as st

from preserver_lab.matrix import (
    DimensionError,
    Matrix,
    Rng,
    SingularMatrixError,
    direct_sum,
    jordan_block,
    outer,
    random_idempotent,
    random_invertible,
)
from preserver_lab.scalar import Scalar

from strategies import matrices, vectors

E = Matrix.unit


def test_unit_product_rule():
    assert E(2, 0, 1) @ E(2, 1, 0) == E(2, 0, 0)


def test_jordan_block_square():
    assert jordan_block(2, 1) @ jordan_block(2, 1) == Matrix([[1, 2], [0, 1]])


def test_jordan_block_inverse():
    assert jordan_block(2, 1).inverse() == Matrix([[1, -1], [0, 1]])


def test_jordan_block_shapes():
    assert jordan_block(1, 5) == Matrix([[5]])
    assert jordan_block(2, 0) == Matrix([[0, 1], [0, 0]])
    assert jordan_block(3, 1) == Matrix([[1, 1, 0], [0, 1, 1], [0, 0, 1]])


def test_direct_sums():
    assert direct_sum(Matrix([[1]]), Matrix([[-1]])) == Matrix.diag([1, -1])
    assert direct_sum(jordan_block(2, 0), Matrix.zeros(1)) == E(3, 0, 1)
    assert direct_sum(Matrix.identity(1), Matrix.identity(2)) == Matrix.identity(3)


def test_diag_inverse():
    assert Matrix.diag([2, 3, 4]).inverse() == Matrix.diag([Scalar(1) / 2, Scalar(1) / 3, Scalar(1) / 4])


def test_rank_examples():
    assert Matrix.zeros(3).rank() == 0
    assert (E(3, 0, 0) + E(3, 1, 1)).rank() == 2
    assert outer((1, 2, 0), (0, "i", 3)).rank() == 1


def test_det_by_hand():
    # 2(1+i) - 1 = 1 + 2i
    assert Matrix([[2, 1], [1, "1+i"]]).det() == Scalar(1, 2)


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrixError):
        Matrix([[1, 2], [2, 4]]).inverse()


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        Matrix.identity(2) @ Matrix.identity(3)


def test_kernel_of_rank_one():
    m = outer((1, 1, 0), (1, -1, 0))
    ker = m.kernel()
    assert len(ker) == 2
    assert all(not any(m.apply(v)) for v in ker)


def test_random_idempotent_ranks():
    rng = Rng(3)
    assert random_idempotent(3, 0, rng) == Matrix.zeros(3)
    assert random_idempotent(3, 3, rng) == Matrix.identity(3)
    p = random_idempotent(3, 1, rng)
    assert p @ p == p and p.rank() == 1


def test_rng_is_deterministic():
    a = random_invertible(4, Rng(11))
    b = random_invertible(4, Rng(11))
    assert a == b
    assert Rng(5).spawn(3).seed == 5 ^ 3


def test_json_round_trip():
    m = Matrix([[1, "1/2+i"], [0, "-3i"]])
    assert Matrix.from_json(m.to_json()) == m
    assert m.to_json()["entries"][0][1] == "1/2+i"


@given(matrices(n=3), matrices(n=3), matrices(n=3))
def test_associativity(a, b, c):
    assert (a @ b) @ c == a @ (b @ c)


@given(matrices(n=3), matrices(n=3))
def test_det_is_multiplicative(a, b):
    assert (a @ b).det() == a.det() * b.det()


@given(matrices())
def test_inverse_when_invertible(a):
    if a.is_invertible():
        assert a @ a.inverse() == Matrix.identity(a.n)
    else:
        assert not a.det()


@given(matrices())
def test_rank_nullity(a):
    assert a.rank() + len(a.kernel()) == a.n
    assert a.rank() == a.transpose().rank()


@given(matrices(n=3), matrices(n=3))
def test_transpose_and_conjugate_reverse_products(a, b):
    assert (a @ b).transpose() == b.transpose() @ a.transpose()
    assert (a @ b).conj() == a.conj() @ b.conj()


@given(st.data())
def test_apply_matches_product(data):
    a = data.draw(matrices(n=3))
    x = data.draw(vectors(3))
    col = Matrix.from_columns([x, (0, 0, 0), (0, 0, 0)])
    assert (a @ col).column(0) == a.apply(x)
