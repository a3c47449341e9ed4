"""Multiplicative ElGamal over any :class:`~pan_domain.group.Group`."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import InvalidCiphertext, InvalidPublicKey
from .group import Group, GroupElement, Rng, Scalar


@dataclass(frozen=True)
class Keypair:
    sk: Scalar
    pk: GroupElement

    def __repr__(self) -> str:
        return f"Keypair(pk={self.pk!r})"


@dataclass(frozen=True)
class Ciphertext:
    c1: GroupElement
    c2: GroupElement

    def to_bytes(self) -> bytes:
        return self.c1.data + self.c2.data

    def hex(self) -> str:
        return self.to_bytes().hex()


def keygen(group: Group, rng: Rng = None) -> Keypair:
    sk = group.random_scalar(rng)
    return Keypair(sk, group.exp_g(sk))


def check_public_key(group: Group, pk: GroupElement) -> GroupElement:
    if not group.is_member(pk):
        raise InvalidPublicKey("public key is not a subgroup element")
    return pk


def check_ciphertext(group: Group, ct: Ciphertext) -> Ciphertext:
    if not (group.is_member(ct.c1) and group.is_member(ct.c2)):
        raise InvalidCiphertext("ciphertext component outside the subgroup")
    return ct


def encrypt(
    group: Group,
    pk: GroupElement,
    message: GroupElement,
    rng: Rng = None,
    k: Optional[Scalar] = None,
) -> Ciphertext:
    """(g^k, m * pk^k); ``k`` may be forced for test vectors."""
    if k is None:
        k = group.random_scalar(rng)
    return Ciphertext(group.exp_g(k), group.mul(message, group.exp(pk, k)))


def decrypt(group: Group, sk: Scalar, ct: Ciphertext) -> GroupElement:
    return group.div(ct.c2, group.exp(ct.c1, sk))


def rerandomize(group: Group, pk: GroupElement, ct: Ciphertext, rng: Rng = None) -> Ciphertext:
    """Multiply in a fresh encryption of the identity under ``pk``."""
    t = group.random_scalar(rng)
    return Ciphertext(group.mul(ct.c1, group.exp_g(t)), group.mul(ct.c2, group.exp(pk, t)))


def power(group: Group, ct: Ciphertext, delta: Scalar) -> Ciphertext:
    """Raise both components to ``delta``: Enc(m; k) -> Enc(m^delta; k*delta)."""
    return Ciphertext(group.exp(ct.c1, delta), group.exp(ct.c2, delta))


def split(group: Group, raw: bytes) -> Tuple[GroupElement, GroupElement]:
    n = group.element_len
    if len(raw) != 2 * n:
        raise InvalidCiphertext("wrong ciphertext length")
    try:
        return group.decode(raw[:n]), group.decode(raw[n:])
    except Exception as exc:
        raise InvalidCiphertext(str(exc)) from exc


def from_bytes(group: Group, raw: bytes) -> Ciphertext:
    return Ciphertext(*split(group, raw))
