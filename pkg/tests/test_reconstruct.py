import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from preserver_lab.jordan import is_idempotent, jordan
from preserver_lab.matrix import Matrix, Rng, direct_sum, jordan_block, random_invertible
from preserver_lab.reconstruct import (
    CORRUPTION_MODES,
    AlphaNotRepresentable,
    CanonicalMap,
    MapOracle,
    OracleContractError,
    StepViolation,
    alpha_reduce,
    c_alpha,
    make_canonical,
    make_canonical_scaled,
    make_corrupted,
    make_table_oracle,
    oracle_from_spec,
    reconstruct,
    recovered_c_alpha,
    verify_preserving,
)
from preserver_lab.scalar import Scalar

from strategies import matrices

E = Matrix.unit
I_ = Scalar(0, 1)


def test_canonical_apply_closed_form():
    t = direct_sum(jordan_block(2, 1), Matrix.identity(1))
    cmap = CanonicalMap(1, t, "transpose", "conj")
    out = cmap.apply(E(3, 0, 1).scale(I_))
    assert out == Matrix([[-I_, I_, 0], [-I_, I_, 0], [0, 0, 0]])
    assert cmap.inverse_apply(out) == E(3, 0, 1).scale(I_)


def test_canonical_minus_identity():
    assert CanonicalMap(-1, Matrix.identity(3)).apply(E(3, 0, 0)) == -E(3, 0, 0)


def test_canonical_validation():
    with pytest.raises(ValueError):
        CanonicalMap(2, Matrix.identity(2))
    with pytest.raises(ValueError):
        CanonicalMap(1, Matrix.zeros(2))
    with pytest.raises(ValueError):
        CanonicalMap(1, Matrix.identity(2), diamond="flip")
    with pytest.raises(ValueError):
        CanonicalMap(1, Matrix.identity(2), sigma="abs")


def test_normalized_keeps_map():
    t = random_invertible(3, Rng(5)).scale(3)
    cmap = CanonicalMap(-1, t, "transpose", "id")
    x = Matrix([[1, 2, 0], [0, "i", 1], [3, 0, 0]])
    assert cmap.normalized().apply(x) == cmap.apply(x)


@pytest.mark.parametrize(
    "lam, diamond, sigma", list(itertools.product([1, -1], ["id", "transpose"], ["id", "conj"]))
)
def test_reconstruct_round_trip(lam, diamond, sigma):
    rng = Rng(11)
    t = random_invertible(3, rng)
    oracle = make_canonical(lam, t, diamond, sigma)
    res = reconstruct(oracle, 20, Rng(3))
    assert res.agreement
    got = res.map
    assert (got.lam, got.diamond, got.sigma) == (Scalar(lam), diamond, sigma)
    ratio = got.t.inverse() @ t
    assert ratio == Matrix.identity(3).scale(ratio[0, 0])
    assert res.queries == oracle.query_log
    assert res.to_json()["agreement"] is True


def test_reconstruct_detects_swap():
    base = make_canonical(1, Matrix.identity(3))
    bad = make_corrupted(base, "swap_two_idempotents", Rng(0))
    with pytest.raises(StepViolation) as info:
        reconstruct(bad, 20, Rng(0))
    assert info.value.to_json()["step"]


@pytest.mark.parametrize("mode", CORRUPTION_MODES)
def test_verify_preserving_catches_corruption(mode):
    base = make_canonical(-1, random_invertible(3, Rng(2)), "transpose", "conj")
    assert verify_preserving(base, 300, Rng(1)) is None
    bad = make_corrupted(base, mode, Rng(6))
    pair = verify_preserving(bad, 10_000, Rng(1))
    assert pair is not None
    a, b = pair
    assert is_idempotent(jordan(a, b)) != is_idempotent(jordan(bad(a), bad(b)))
    assert bad.corruption["mode"] == mode


def test_corruption_mode_errors():
    with pytest.raises(ValueError):
        make_corrupted(make_canonical(1, Matrix.identity(2)), "nope", Rng(0))


def test_oracle_contract():
    oracle = make_canonical(1, Matrix.identity(3))
    with pytest.raises(OracleContractError):
        oracle(Matrix.identity(2))
    broken = MapOracle(lambda x: "junk", 2)
    with pytest.raises(OracleContractError):
        broken(Matrix.identity(2))
    table = make_table_oracle(2, {Matrix.identity(2): Matrix.identity(2)})
    assert table(Matrix.identity(2)) == Matrix.identity(2)
    with pytest.raises(OracleContractError):
        table(Matrix.zeros(2))
    oracle(Matrix.identity(3))
    assert oracle.query_log == 1
    oracle.reset_log()
    assert oracle.query_log == 0


def test_oracle_from_spec():
    spec = {"kind": "canonical", "lambda": -1, "t": [[1, 1], [0, 1]], "diamond": "transpose", "sigma": "conj"}
    oracle = oracle_from_spec(spec)
    assert oracle.canonical.lam == -1 and oracle.canonical.sigma == "conj"
    spec = dict(spec, kind="corrupted", corruption="scale_one_output", corruption_seed=3)
    assert oracle_from_spec(spec).corruption["mode"] == "scale_one_output"
    entry = {"input": Matrix.identity(2).to_json(), "output": Matrix.identity(2).to_json()}
    table = oracle_from_spec({"kind": "table", "n": 2, "entries": [entry]})
    assert table(Matrix.identity(2)) == Matrix.identity(2)
    with pytest.raises(ValueError):
        oracle_from_spec({"kind": "other"})


@pytest.mark.parametrize(
    "alpha, sigma, expected",
    [("-1/2", "conj", Scalar(-1)), ("1/2", "conj", Scalar(1)), ("2", "id", Scalar(1)), ("2i", "conj", -I_)],
)
def test_c_alpha_values(alpha, sigma, expected):
    assert c_alpha(alpha, sigma) == expected


def test_c_alpha_irrational_modulus():
    with pytest.raises(AlphaNotRepresentable):
        c_alpha("1+i", "conj")
    with pytest.raises(ValueError):
        c_alpha(0, "id")


@pytest.mark.parametrize("alpha", ["1/2", "2", "-1/2"])
@pytest.mark.parametrize("sigma", ["id", "conj"])
def test_alpha_reduction_round_trip(alpha, sigma):
    t = random_invertible(3, Rng(8))
    phi = make_canonical_scaled(alpha, -1, t, "transpose", sigma)
    a, b = E(3, 0, 0).scale(Scalar(1) / (Scalar(alpha) * 2)), E(3, 0, 0)
    # alpha (AB + BA) idempotent on both sides
    lhs = jordan(a, b).scale(Scalar(alpha) * 2)
    rhs = jordan(phi(a), phi(b)).scale(Scalar(alpha) * 2)
    assert is_idempotent(lhs) == is_idempotent(rhs)
    psi = alpha_reduce(phi, alpha)
    res = reconstruct(psi, 10, Rng(1))
    assert res.agreement
    assert res.map.lam == -1
    assert recovered_c_alpha(res, alpha) == phi.canonical.lam == -c_alpha(alpha, sigma)


def test_alpha_reduce_refuses_two_i():
    phi = make_canonical_scaled("2i", 1, Matrix.identity(3), "id", "conj")
    with pytest.raises(AlphaNotRepresentable):
        alpha_reduce(phi, "2i")


@settings(max_examples=20)
@given(st.integers(0, 10_000), matrices(n=3, lo=-2, hi=2), matrices(n=3, lo=-2, hi=2))
def test_canonical_maps_preserve_idempotency(seed, a, b):
    rng = Rng(seed)
    cmap = CanonicalMap(
        rng.choice([1, -1]),
        random_invertible(3, rng),
        rng.choice(["id", "transpose"]),
        rng.choice(["id", "conj"]),
    )
    assert is_idempotent(jordan(a, b)) == is_idempotent(jordan(cmap.apply(a), cmap.apply(b)))
    assert cmap.inverse_apply(cmap.apply(a)) == a
