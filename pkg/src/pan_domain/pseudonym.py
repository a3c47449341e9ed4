"""Pseudonym generation and blind conversion.

A citizen holds a core identifier ``z``; the converter holds one secret
exponent ``x_D`` per domain.  The pseudonym of ``z`` in domain ``D`` is
``(G^z)^x_D``.  Three pieces live here:

* blind issuance -- the citizen blinds ``G^z`` with a single-use ``r``, the
  converter exponentiates, the citizen unblinds;
* curve-style conversion -- domain A raises its pseudonym to a secret shared
  with domain B, the converter applies ``x_B / x_A`` and domain B strips the
  shared secret;
* ElGamal conversion -- the converter raises an ElGamal encryption of the
  domain-A pseudonym (under B's key) to ``x_B / x_A``.

Issuance tags
-------------
The converter authenticates pseudonyms it issued with a per-domain tag key
``y_D``: ``tag = nym^y_D``.  Because the tag is an exponentiation it survives
blinding and the conversion encryption unchanged in form, so the converter
can check issuance on a blinded or encrypted pseudonym without ever seeing
the plaintext.  Only the converter can verify tags.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

from . import elgamal
from .errors import (
    DomainMismatch,
    InvalidBlinding,
    InvalidPublicKey,
    UnissuedPseudonym,
)
from .group import Group, GroupElement, Rng, Scalar, group_of

TAG_SCHEME = "dh-tag-v1"


@dataclass(frozen=True)
class CoreIdentifier:
    z: Scalar

    def base(self, group: Group) -> GroupElement:
        return group.exp_g(self.z)

    def __repr__(self) -> str:
        return "CoreIdentifier(<secret>)"


@dataclass(frozen=True)
class DomainSecret:
    domain_id: str
    x: Scalar

    def __repr__(self) -> str:
        return f"DomainSecret({self.domain_id!r}, <secret>)"


@dataclass(frozen=True)
class TagKey:
    """Per-domain issuance key held by the converter (``public`` = G^y)."""

    domain_id: str
    y: Scalar
    public: GroupElement

    def __repr__(self) -> str:
        return f"TagKey({self.domain_id!r})"


@dataclass(frozen=True)
class Pseudonym:
    domain_id: str
    nym: GroupElement
    converter_sig: bytes = b""

    def encode(self) -> bytes:
        return self.nym.data


@dataclass(frozen=True)
class BlindingEnvelope:
    blinded: GroupElement
    r: Scalar = field(repr=False)


@dataclass(frozen=True)
class SharedSecret:
    pair: Tuple[str, str]
    s: Scalar = field(repr=False)


@dataclass(frozen=True)
class ConversionCiphertext:
    payload: Union[GroupElement, elgamal.Ciphertext]
    src_domain: str
    dst_domain: str
    tag: bytes = b""


# -- tags -------------------------------------------------------------------


def make_tag_key(group: Group, domain_id: str, rng: Rng = None) -> TagKey:
    y = group.random_scalar(rng)
    return TagKey(domain_id, y, group.exp_g(y))


def compute_tag(elem: GroupElement, key: TagKey) -> bytes:
    return group_of(elem).exp(elem, key.y).data


def check_tag(elem: GroupElement, tag: bytes, key: TagKey) -> bool:
    try:
        return compute_tag(elem, key) == bytes(tag)
    except Exception:
        return False


# -- blind issuance ------------------------------------------------------------


def blind(group: Group, z: CoreIdentifier, rng: Rng = None, r: Optional[Scalar] = None) -> BlindingEnvelope:
    """Citizen step 1: ``G^(z*r)`` for a fresh (or forced) ``r``."""
    if r is None:
        r = group.random_scalar(rng)
    return BlindingEnvelope(group.exp_g(group.scalar_mul(z.z, r)), r)


def evaluate_blinded(
    group: Group, blinded: GroupElement, secret: DomainSecret, key: TagKey
) -> Tuple[GroupElement, bytes]:
    """Converter step: exponentiate the blinded base and tag the result."""
    if not group.is_member(blinded):
        raise InvalidBlinding("blinded element fails the subgroup check")
    evaluated = group.exp(blinded, secret.x)
    return evaluated, compute_tag(evaluated, key)


def unblind(
    group: Group,
    envelope: BlindingEnvelope,
    domain_id: str,
    evaluated: GroupElement,
    evaluated_tag: bytes,
) -> Pseudonym:
    """Citizen step 3: strip ``r`` from both the value and its tag."""
    r_inv = group.scalar_inverse(envelope.r)
    nym = group.exp(evaluated, r_inv)
    tag = group.exp(group.decode(evaluated_tag), r_inv).data
    return Pseudonym(domain_id, nym, tag)


class BlindSession:
    """Citizen-side state of one blind issuance run."""

    def __init__(self, group: Group, z: CoreIdentifier, domain_id: str, rng: Rng = None, r: Optional[Scalar] = None):
        self.group = group
        self.domain_id = domain_id
        self.envelope = blind(group, z, rng, r)
        self.result: Optional[Pseudonym] = None

    def request(self) -> Tuple[str, GroupElement]:
        return self.domain_id, self.envelope.blinded

    def finish(self, evaluated: GroupElement, evaluated_tag: bytes) -> Pseudonym:
        if self.result is None:
            self.result = unblind(self.group, self.envelope, self.domain_id, evaluated, evaluated_tag)
        return self.result


def blind_generate(
    z: CoreIdentifier,
    domain_id: str,
    converter,
    rng: Rng = None,
    r: Optional[Scalar] = None,
) -> Pseudonym:
    """Run issuance against an in-process converter (anything with ``issue``)."""
    session = BlindSession(converter.group, z, domain_id, rng, r)
    evaluated, tag = converter.issue(*session.request())
    return session.finish(evaluated, tag)


# -- curve-style conversion -----------------------------------------------------


def derive_dual_domain_nyms(
    diag: bytes, a: DomainSecret, b: DomainSecret, group: Group
) -> Tuple[Pseudonym, Pseudonym]:
    """Two domain identities from one diagnosis key (or identifier bytes)."""
    base = group.hash_to_group(bytes(diag))
    return dual_domain_nyms_from_base(base, a, b)


def dual_domain_nyms_from_base(
    base: GroupElement, a: DomainSecret, b: DomainSecret
) -> Tuple[Pseudonym, Pseudonym]:
    group = group_of(base)
    return (
        Pseudonym(a.domain_id, group.exp(base, a.x)),
        Pseudonym(b.domain_id, group.exp(base, b.x)),
    )


def ecdh_shared(
    sk: Scalar,
    peer_pk: GroupElement,
    group: Group,
    pair: Tuple[str, str] = ("", ""),
    context: bytes = b"",
) -> SharedSecret:
    """s = SHA-256(encode(sk * peer_pk) || context) mod q.

    With an empty ``context`` this is the plain static secret; the converter
    protocol passes the request id so every conversion gets a fresh ``s``.
    """
    if not group.is_member(peer_pk):
        raise InvalidPublicKey("peer key fails the subgroup check")
    point = group.exp(peer_pk, sk)
    return SharedSecret(tuple(sorted(pair)), group.hash_to_scalar(point.data + context))


def encrypt_for_conversion(
    nym_src: Pseudonym,
    s: SharedSecret,
    dst_domain: str,
    verifier: Optional[Callable[[Pseudonym], bool]] = None,
) -> ConversionCiphertext:
    """Raise the source pseudonym (and its tag) to the shared secret.

    Domains cannot check tags themselves; the converter re-checks the
    encrypted tag.  Here we reject a missing or malformed tag and, when a
    verifier is supplied, anything it refuses.
    """
    group = group_of(nym_src.nym)
    try:
        tag_elem = group.decode(nym_src.converter_sig)
    except Exception:
        raise UnissuedPseudonym("pseudonym carries no valid converter tag") from None
    if verifier is not None and not verifier(nym_src):
        raise UnissuedPseudonym("converter tag does not verify")
    return ConversionCiphertext(
        payload=group.exp(nym_src.nym, s.s),
        src_domain=nym_src.domain_id,
        dst_domain=dst_domain,
        tag=group.exp(tag_elem, s.s).data,
    )


def conversion_factor(a: DomainSecret, b: DomainSecret, group: Group) -> Scalar:
    """x_B * x_A^-1 mod q."""
    return group.scalar_mul(b.x, group.scalar_inverse(a.x))


def convert_blind(ct: ConversionCiphertext, a: DomainSecret, b: DomainSecret) -> ConversionCiphertext:
    """Converter re-keying of a blinded pseudonym from domain ``a`` to ``b``.

    The output tag is cleared; :mod:`pan_domain.converter` re-tags for the
    destination domain.
    """
    if ct.src_domain != a.domain_id or ct.dst_domain != b.domain_id:
        raise DomainMismatch(
            f"ciphertext {ct.src_domain}->{ct.dst_domain} vs secrets {a.domain_id}->{b.domain_id}"
        )
    group = group_of(ct.payload)
    return ConversionCiphertext(
        group.exp(ct.payload, conversion_factor(a, b, group)), ct.src_domain, ct.dst_domain
    )


def decrypt_conversion(ct: ConversionCiphertext, s: SharedSecret) -> Pseudonym:
    """Strip the shared secret.  A wrong ``s`` yields a valid but unrelated element."""
    group = group_of(ct.payload)
    s_inv = group.scalar_inverse(s.s)
    tag = b""
    if ct.tag:
        tag = group.exp(group.decode(ct.tag), s_inv).data
    return Pseudonym(ct.dst_domain, group.exp(ct.payload, s_inv), tag)


# -- ElGamal conversion ------------------------------------------------------------


def elgamal_encrypt_nym(
    nym: Pseudonym, pk_dst: GroupElement, dst_domain: str, rng: Rng = None, k: Optional[Scalar] = None
) -> ConversionCiphertext:
    group = group_of(nym.nym)
    elgamal.check_public_key(group, pk_dst)
    ct = elgamal.encrypt(group, pk_dst, nym.nym, rng, k)
    return ConversionCiphertext(ct, nym.domain_id, dst_domain)


def elgamal_convert(ct: elgamal.Ciphertext, delta: Scalar) -> elgamal.Ciphertext:
    """(g^k, m*pk^k) -> (g^(k*delta), m^delta * pk^(k*delta))."""
    group = group_of(ct.c1)
    elgamal.check_ciphertext(group, ct)
    return elgamal.power(group, ct, delta)


def elgamal_decrypt_nym(ct: ConversionCiphertext, sk_dst: Scalar) -> Pseudonym:
    group = group_of(ct.payload.c1)
    return Pseudonym(ct.dst_domain, elgamal.decrypt(group, sk_dst, ct.payload))


TOY_VECTORS_PATH = Path(__file__).with_name("data") / "toy_conversion_vectors.json"


def load_toy_vectors(path: Optional[Path] = None) -> List[dict]:
    """Exhaustive modp_toy conversion table as dicts keyed by field name."""
    with open(path or TOY_VECTORS_PATH) as fh:
        doc = json.load(fh)
    return [dict(zip(doc["fields"], row)) for row in doc["rows"]]
