import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from pan_domain import _modp_params
from pan_domain.errors import BackendUnavailable, InvalidElement, InvalidScalar, NonInvertible
from pan_domain.group import BACKENDS, ELL, Scalar, get_group, group_of

from . import oracles

FAST = ["curve25519", "modp512", "modp1024", "modp_toy"]


def test_toy_exp_matches_brute_force(toy):
    for base in oracles.toy_subgroup():
        if base == 1:
            continue
        for e in range(1, 11):
            got = toy.to_int(toy.exp(toy.from_int(base), Scalar(e)))
            assert got == oracles.slow_pow(base, e, 23)


def test_toy_inverse_matches_search(toy):
    for a in range(1, 11):
        assert toy.scalar_inverse(Scalar(a)).value == oracles.inverse_by_search(a, 11)


def test_toy_worked_values(toy):
    assert toy.to_int(toy.exp(toy.from_int(3), Scalar(4))) == 12
    assert toy.scalar_inverse(Scalar(4)).value == 3


def test_toy_homomorphism_exhaustive(toy):
    for base in oracles.toy_subgroup()[1:]:
        b = toy.from_int(base)
        for a in range(1, 11):
            for c in range(1, 11):
                lhs = toy.mul(toy.exp(b, Scalar(a)), toy.exp(b, Scalar(c)))
                if (a + c) % 11 == 0:
                    assert toy.to_int(lhs) == 1
                else:
                    assert lhs == toy.exp(b, Scalar((a + c) % 11))


@pytest.mark.parametrize("backend", FAST)
def test_homomorphism_randomized(backend):
    g = get_group(backend)
    rng = random.Random(backend)
    trials = 1000 if backend != "modp1024" else 200
    for _ in range(trials):
        a, b = g.random_scalar(rng), g.random_scalar(rng)
        if (a.value + b.value) % g.order == 0:
            continue
        assert g.mul(g.exp_g(a), g.exp_g(b)) == g.exp_g(Scalar((a.value + b.value) % g.order))
        assert g.exp(g.exp_g(a), b) == g.exp_g(g.scalar_mul(a, b))


@pytest.mark.parametrize("backend", BACKENDS)
def test_encode_decode_roundtrip(backend):
    g = get_group(backend)
    rng = random.Random(7)
    for _ in range(20):
        e = g.exp_g(g.random_scalar(rng))
        assert g.decode(g.encode(e)) == e
        assert g.from_hex(e.hex()) == e
        assert len(e.data) == g.element_len


@pytest.mark.parametrize("backend", BACKENDS)
def test_div_inverts_mul(backend):
    g = get_group(backend)
    rng = random.Random(3)
    a, b = g.exp_g(g.random_scalar(rng)), g.exp_g(g.random_scalar(rng))
    assert g.div(g.mul(a, b), b) == a


def test_toy_scalar_draws_are_uniform(toy):
    rng = random.Random(99)
    counts = Counter(toy.random_scalar(rng).value for _ in range(10_000))
    assert set(counts) == set(range(1, 11))
    _, p = chisquare([counts[v] for v in range(1, 11)])
    assert p > 0.001


@pytest.mark.parametrize("backend", FAST)
def test_random_scalar_seed_determinism(backend):
    g = get_group(backend)
    a = [g.random_scalar(random.Random(5)) for _ in range(3)]
    b = [g.random_scalar(random.Random(5)) for _ in range(3)]
    assert a == b


@pytest.mark.parametrize("bad", [0, 11, -1, 22])
def test_toy_check_scalar_rejects_out_of_range(toy, bad):
    with pytest.raises(InvalidScalar):
        toy.check_scalar(Scalar(bad))


def test_scalar_inverse_of_zero(toy, curve):
    for g in (toy, curve):
        with pytest.raises(NonInvertible):
            g.scalar_inverse(Scalar(0))


def test_scalar_bytes_roundtrip(curve):
    s = curve.random_scalar(random.Random(1))
    assert curve.scalar_from_hex(curve.scalar_to_hex(s)) == s
    with pytest.raises(InvalidScalar):
        curve.scalar_from_bytes(b"\x00" * 31)


def test_toy_hash_to_group_values(toy):
    # SHA-256(b"abc") mod 11 == 7, 2^7 mod 23 == 13
    assert toy.to_int(toy.hash_to_group(b"abc")) == 13
    assert toy.to_int(toy.hash_to_group(b"PD-AUDIT-MARKER")) == 18


@pytest.mark.parametrize("backend", FAST)
def test_hash_to_group_is_deterministic_member(backend):
    g = get_group(backend)
    a = g.hash_to_group(b"some input")
    assert a == g.hash_to_group(b"some input")
    assert g.is_member(a)
    assert a != g.hash_to_group(b"other input")


def test_toy_membership_is_exactly_the_subgroup(toy):
    members = {x for x in range(1, 23) if toy.is_member(toy._wrap(x))}
    assert sorted(members) == oracles.toy_subgroup()
    for x in set(range(1, 23)) - members:
        with pytest.raises(InvalidElement):
            toy.from_int(x)


def test_curve_base_point_matches_textbook():
    g = get_group("curve25519")
    assert g.generator.data == oracles.ed_encode(oracles.BASE)
    assert g.generator.hex() == "58" + "66" * 31
    assert oracles.montgomery_u(oracles.BASE) == 9


def test_curve_scalar_mult_matches_pure_python(curve):
    rng = random.Random(11)
    for _ in range(5):
        k = curve.random_scalar(rng)
        expect = oracles.ed_encode(oracles.ed_mul(k.value, oracles.BASE))
        assert curve.exp_g(k).data == expect
    assert oracles.ed_mul(oracles.ED_L, oracles.BASE) == (0, 1)


def test_curve_rejects_small_order_and_garbage(curve):
    identity = oracles.ed_encode((0, 1))
    for bad in (identity, b"\xff" * 32, b"\x01" * 31):
        with pytest.raises(InvalidElement):
            curve.decode(bad)


def test_curve_order_constant():
    assert ELL == oracles.ED_L


def test_cross_backend_use_rejected(toy, curve):
    with pytest.raises(InvalidElement):
        curve.exp(toy.generator, Scalar(2))
    assert group_of(curve.generator) is curve


def test_unknown_backend():
    with pytest.raises(BackendUnavailable):
        get_group("p256")


@pytest.mark.parametrize("name", ["P512", "P1024", "P2048", "P4096"])
def test_modp_parameters_are_schnorr_groups(name):
    sympy = pytest.importorskip("sympy")
    p = getattr(_modp_params, name)
    g = getattr(_modp_params, "G" + name[1:])
    q = _modp_params.Q
    assert p.bit_length() == int(name[1:])
    assert q.bit_length() == 256
    assert (p - 1) % q == 0
    assert pow(g, q, p) == 1 and g != 1
    assert sympy.isprime(q)
    assert sympy.isprime(p)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=ELL - 1), st.integers(min_value=1, max_value=ELL - 1))
def test_curve_exponent_commutes(a, b):
    g = get_group("curve25519")
    assert g.exp(g.exp_g(Scalar(a)), Scalar(b)) == g.exp(g.exp_g(Scalar(b)), Scalar(a))
