import hashlib
import inspect
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pan_domain import elgamal, pseudonym
from pan_domain.converter import setup_system
from pan_domain.errors import DomainMismatch, InvalidBlinding, InvalidCiphertext, InvalidPublicKey, UnissuedPseudonym
from pan_domain.group import GroupElement, Scalar, get_group
from pan_domain.pseudonym import (
    BlindSession,
    ConversionCiphertext,
    CoreIdentifier,
    DomainSecret,
    Pseudonym,
    SharedSecret,
    blind,
    blind_generate,
    convert_blind,
    decrypt_conversion,
    derive_dual_domain_nyms,
    dual_domain_nyms_from_base,
    ecdh_shared,
    elgamal_convert,
    elgamal_decrypt_nym,
    elgamal_encrypt_nym,
    encrypt_for_conversion,
    load_toy_vectors,
)

from . import oracles

P, Q, G = oracles.TOY_P, oracles.TOY_Q, oracles.TOY_G


def S(v):
    return Scalar(v)


def ss(v):
    return SharedSecret(("a", "b"), S(v))


def issued(group, nym_elem, domain):
    """Pseudonym with a tag under a throwaway key; enough for local encryption."""
    return Pseudonym(domain, nym_elem, group.exp(nym_elem, S(2)).data)


# -- blind issuance ----------------------------------------------------------------


def test_toy_blind_issuance_value(toy):
    conv, _ = setup_system(["tc", "ha"], "modp_toy", random.Random(0))
    conv.state.domain_secrets["ha"] = DomainSecret("ha", S(4))
    nym = blind_generate(CoreIdentifier(S(3)), "ha", conv, random.Random(1))
    assert toy.to_int(nym.nym) == 2
    assert conv.verify_issued(nym)


def test_forced_unit_blinding_is_identity(toy):
    env = blind(toy, CoreIdentifier(S(3)), r=S(1))
    assert toy.to_int(env.blinded) == oracles.slow_pow(G, 3, P)


def test_issuance_is_deterministic_but_transcripts_fresh(curve):
    rng = random.Random(2)
    conv, _ = setup_system(["tc", "ha"], "curve25519", rng)
    z = CoreIdentifier(curve.random_scalar(rng))
    a = blind_generate(z, "ha", conv, rng)
    b = blind_generate(z, "ha", conv, rng)
    assert a.nym == b.nym
    t1, t2 = conv.issuance_transcript
    assert t1[1] != t2[1]
    assert a.nym == curve.exp(z.base(curve), conv.state.domain_secrets["ha"].x)


def test_issuance_transcript_never_contains_base(curve):
    rng = random.Random(3)
    conv, _ = setup_system(["tc", "ha"], "curve25519", rng)
    zs = [CoreIdentifier(curve.random_scalar(rng)) for _ in range(20)]
    for z in zs:
        blind_generate(z, "tc", conv, rng)
    seen = {e.data for _, e in conv.issuance_transcript}
    assert not seen & {z.base(curve).data for z in zs}


def test_blind_session_finish_is_idempotent(curve):
    rng = random.Random(4)
    conv, _ = setup_system(["tc", "ha"], "curve25519", rng)
    sess = BlindSession(curve, CoreIdentifier(S(12345)), "tc", rng)
    ev = conv.issue(*sess.request())
    assert sess.finish(*ev) is sess.finish(*ev)


def test_blinding_must_be_member(toy):
    secret = DomainSecret("d", S(3))
    key = pseudonym.make_tag_key(toy, "d", random.Random(0))
    with pytest.raises(InvalidBlinding):
        pseudonym.evaluate_blinded(toy, toy._wrap(5), secret, key)


# -- dual nyms ------------------------------------------------------------------


def test_toy_dual_nyms(toy):
    a, b = dual_domain_nyms_from_base(toy.from_int(3), DomainSecret("A", S(4)), DomainSecret("B", S(7)))
    assert (toy.to_int(a.nym), toy.to_int(b.nym)) == (12, 2)
    assert (a.domain_id, b.domain_id) == ("A", "B")


def test_equal_exponents_give_equal_nyms(curve):
    a, b = derive_dual_domain_nyms(b"diag", DomainSecret("A", S(99)), DomainSecret("B", S(99)), curve)
    assert a.nym == b.nym


def test_distinct_diag_distinct_pairs(curve):
    da, db = DomainSecret("A", S(5)), DomainSecret("B", S(8))
    pairs = {tuple(n.nym.data for n in derive_dual_domain_nyms(bytes([i]) * 16, da, db, curve)) for i in range(50)}
    assert len(pairs) == 50


# -- ecdh --------------------------------------------------------------------------


def test_toy_ecdh_golden(toy):
    pk_a, pk_b = toy.exp_g(S(3)), toy.exp_g(S(5))
    # 2^15 mod 23 == 16, SHA-256(0x10) mod 11 == 6
    assert oracles.slow_pow(G, 15, P) == 16
    assert int.from_bytes(hashlib.sha256(b"\x10").digest(), "big") % Q == 6
    assert ecdh_shared(S(3), pk_b, toy).s.value == 6
    assert ecdh_shared(S(5), pk_a, toy).s.value == 6


@pytest.mark.parametrize("backend", ["curve25519", "modp512"])
def test_ecdh_symmetry(backend):
    g = get_group(backend)
    rng = random.Random(backend)
    for _ in range(100):
        ka, kb = elgamal.keygen(g, rng), elgamal.keygen(g, rng)
        assert ecdh_shared(ka.sk, kb.pk, g, ("x", "y")) == ecdh_shared(kb.sk, ka.pk, g, ("y", "x"))


def test_ecdh_context_changes_secret(curve):
    rng = random.Random(5)
    ka, kb = elgamal.keygen(curve, rng), elgamal.keygen(curve, rng)
    assert ecdh_shared(ka.sk, kb.pk, curve, context=b"r1").s != ecdh_shared(ka.sk, kb.pk, curve, context=b"r2").s


def test_ecdh_rejects_tampered_key(toy, curve):
    with pytest.raises(InvalidPublicKey):
        ecdh_shared(S(3), toy._wrap(5), toy)
    bad = bytearray(curve.exp_g(S(7)).data)
    bad[0] ^= 1
    with pytest.raises(InvalidPublicKey):
        ecdh_shared(S(3), GroupElement("curve25519", bytes(bad)), curve)


# -- curve-style pipeline -----------------------------------------------------------


def test_toy_pipeline_chain(toy):
    nym_a = issued(toy, toy.from_int(12), "A")
    ct = encrypt_for_conversion(nym_a, ss(5), "B")
    assert toy.to_int(ct.payload) == 18
    a, b = DomainSecret("A", S(4)), DomainSecret("B", S(7))
    assert pseudonym.conversion_factor(a, b, toy).value == 10
    out = convert_blind(ct, a, b)
    assert toy.to_int(out.payload) == oracles.slow_pow(18, 10, P) == 9
    assert toy.to_int(decrypt_conversion(out, ss(5)).nym) == 2


def test_unit_secret_is_identity(curve):
    nym = issued(curve, curve.exp_g(S(77)), "A")
    ct = encrypt_for_conversion(nym, ss(1), "B")
    assert ct.payload == nym.nym
    assert decrypt_conversion(ct, ss(1)).nym == nym.nym


def test_fresh_secrets_give_distinct_payloads(curve):
    nym = issued(curve, curve.exp_g(S(77)), "A")
    assert encrypt_for_conversion(nym, ss(3), "B").payload != encrypt_for_conversion(nym, ss(4), "B").payload


def test_unissued_is_rejected(curve):
    with pytest.raises(UnissuedPseudonym):
        encrypt_for_conversion(Pseudonym("A", curve.exp_g(S(5))), ss(3), "B")
    nym = issued(curve, curve.exp_g(S(5)), "A")
    with pytest.raises(UnissuedPseudonym):
        encrypt_for_conversion(nym, ss(3), "B", verifier=lambda _: False)


def test_equal_domain_secrets_leave_payload(curve):
    ct = ConversionCiphertext(curve.exp_g(S(9)), "A", "B")
    assert convert_blind(ct, DomainSecret("A", S(6)), DomainSecret("B", S(6))).payload == ct.payload


def test_convert_back_and_forth(curve):
    a, b = DomainSecret("A", S(6)), DomainSecret("B", S(1234))
    ct = ConversionCiphertext(curve.exp_g(S(9)), "A", "B")
    there = convert_blind(ct, a, b)
    back = convert_blind(ConversionCiphertext(there.payload, "B", "A"), b, a)
    assert back.payload == ct.payload


def test_domain_mismatch(curve):
    ct = ConversionCiphertext(curve.exp_g(S(9)), "A", "C")
    with pytest.raises(DomainMismatch):
        convert_blind(ct, DomainSecret("A", S(2)), DomainSecret("B", S(3)))


def test_curve_pipeline_random_trials(curve):
    rng = random.Random(6)
    for _ in range(1000):
        base = curve.exp_g(curve.random_scalar(rng))
        a = DomainSecret("A", curve.random_scalar(rng))
        b = DomainSecret("B", curve.random_scalar(rng))
        nym_a, nym_b = dual_domain_nyms_from_base(base, a, b)
        s = ss(curve.random_scalar(rng).value)
        out = decrypt_conversion(convert_blind(encrypt_for_conversion(issued(curve, nym_a.nym, "A"), s, "B"), a, b), s)
        assert out.nym == nym_b.nym


def test_wrong_secret_yields_unrelated_member(curve):
    nym = issued(curve, curve.exp_g(S(41)), "A")
    a, b = DomainSecret("A", S(3)), DomainSecret("B", S(5))
    out = decrypt_conversion(convert_blind(encrypt_for_conversion(nym, ss(7), "B"), a, b), ss(8))
    assert curve.is_member(out.nym)
    assert out.nym != curve.exp_g(S(41 * 5 * pow(3, -1, curve.order) % curve.order))


def test_shipped_toy_table(toy):
    rows = load_toy_vectors()
    assert len(rows) == 1000
    for row in rows:
        base = toy.exp_g(S(row["z"]))
        a, b = DomainSecret("A", S(row["x_a"])), DomainSecret("B", S(row["x_b"]))
        nym_a, nym_b = dual_domain_nyms_from_base(base, a, b)
        assert toy.to_int(nym_a.nym) == row["nym_a"]
        ct = encrypt_for_conversion(issued(toy, nym_a.nym, "A"), ss(5), "B")
        assert toy.to_int(decrypt_conversion(convert_blind(ct, a, b), ss(5)).nym) == row["nym_b"]


# -- ElGamal pipeline ---------------------------------------------------------------


def test_toy_elgamal_worked_example(toy):
    nym_a = Pseudonym("A", toy.from_int(12))
    pk_b = toy.exp_g(S(2))
    ct = elgamal_encrypt_nym(nym_a, pk_b, "B", k=S(3))
    assert (toy.to_int(ct.payload.c1), toy.to_int(ct.payload.c2)) == (8, 9)
    conv = ConversionCiphertext(elgamal_convert(ct.payload, S(10)), "A", "B")
    assert toy.to_int(elgamal_decrypt_nym(conv, S(2)).nym) == 2 == oracles.slow_pow(3, 7, P)


def test_elgamal_unit_delta(curve):
    kp = elgamal.keygen(curve, random.Random(1))
    ct = elgamal.encrypt(curve, kp.pk, curve.exp_g(S(3)), random.Random(2))
    assert elgamal_convert(ct, S(1)) == ct


def test_elgamal_rejects_bad_component(toy):
    with pytest.raises(InvalidCiphertext):
        elgamal_convert(elgamal.Ciphertext(toy._wrap(5), toy.from_int(2)), S(3))


def _oracle_elgamal_sweep_row(uid, xa, xb, k, sk_b=2):
    pk = oracles.slow_pow(G, sk_b, P)
    nym_a = oracles.slow_pow(uid, xa, P)
    c1 = oracles.slow_pow(G, k, P)
    c2 = nym_a * oracles.slow_pow(pk, k, P) % P
    delta = xb * oracles.inverse_by_search(xa, Q) % Q
    c1d, c2d = oracles.slow_pow(c1, delta, P), oracles.slow_pow(c2, delta, P)
    shared = oracles.slow_pow(c1d, sk_b, P)
    m = c2d * oracles.inverse_by_search(shared, P) % P
    return (c1, c2, c1d, c2d, m, oracles.slow_pow(uid, xb, P))


def toy_elgamal_sweep(toy):
    """Return the number of mismatches against the oracle over the full sweep."""
    uids = [u for u in oracles.toy_subgroup() if u != 1]
    pk_b = toy.exp_g(S(2))
    bad = 0
    for uid in uids:
        for xa in range(1, 11):
            nym_a = Pseudonym("A", toy.exp(toy.from_int(uid), S(xa)))
            for xb in range(1, 11):
                delta = pseudonym.conversion_factor(DomainSecret("A", S(xa)), DomainSecret("B", S(xb)), toy)
                for k in range(1, 11):
                    c1, c2, c1d, c2d, m, want = _oracle_elgamal_sweep_row(uid, xa, xb, k)
                    ct = elgamal_encrypt_nym(nym_a, pk_b, "B", k=S(k))
                    conv = elgamal_convert(ct.payload, delta)
                    got = toy.to_int(elgamal_decrypt_nym(ConversionCiphertext(conv, "A", "B"), S(2)).nym)
                    ok = (
                        (toy.to_int(ct.payload.c1), toy.to_int(ct.payload.c2)) == (c1, c2)
                        and (toy.to_int(conv.c1), toy.to_int(conv.c2)) == (c1d, c2d)
                        and got == m == want
                    )
                    bad += not ok
    return bad, len(uids) * 1000


def test_toy_elgamal_exhaustive(toy):
    bad, total = toy_elgamal_sweep(toy)
    assert total == 10_000
    assert bad == 0


def test_modp1024_elgamal_random_trials():
    g = get_group("modp1024")
    rng = random.Random(7)
    kp = elgamal.keygen(g, rng)
    for _ in range(1000):
        uid = g.exp_g(g.random_scalar(rng))
        xa, xb = g.random_scalar(rng), g.random_scalar(rng)
        ct = elgamal_encrypt_nym(Pseudonym("A", g.exp(uid, xa)), kp.pk, "B", rng)
        delta = pseudonym.conversion_factor(DomainSecret("A", xa), DomainSecret("B", xb), g)
        out = elgamal_decrypt_nym(ConversionCiphertext(elgamal_convert(ct.payload, delta), "A", "B"), kp.sk)
        assert out.nym == g.exp(uid, xb)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.integers(1, 10), st.integers(1, 10))
def test_toy_pipeline_property(z, xa, xb, s):
    toy = get_group("modp_toy")
    base = toy.exp_g(S(z))
    a, b = DomainSecret("A", S(xa)), DomainSecret("B", S(xb))
    nym_a, nym_b = dual_domain_nyms_from_base(base, a, b)
    ct = encrypt_for_conversion(issued(toy, nym_a.nym, "A"), ss(s), "B")
    assert (ct.payload != nym_a.nym) == (s != 1)
    assert decrypt_conversion(convert_blind(ct, a, b), ss(s)).nym == nym_b.nym
    assert toy.to_int(nym_b.nym) == oracles.slow_pow(G, z * xb % Q, P)


# -- unlinkability surrogate ---------------------------------------------------------


DOMAIN_FACING = [
    pseudonym.blind,
    pseudonym.unblind,
    pseudonym.encrypt_for_conversion,
    pseudonym.decrypt_conversion,
    pseudonym.ecdh_shared,
    pseudonym.elgamal_encrypt_nym,
    pseudonym.elgamal_decrypt_nym,
]


@pytest.mark.parametrize("fn", DOMAIN_FACING, ids=lambda f: f.__name__)
def test_domain_ops_never_take_domain_secrets(fn):
    hints = inspect.signature(fn).parameters
    for p in hints.values():
        assert "DomainSecret" not in str(p.annotation)
    ret = str(inspect.signature(fn).return_annotation)
    assert "DomainSecret" not in ret
