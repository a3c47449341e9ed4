"""Prime-order group backends.

Two families share one interface:

* ``curve25519`` -- the prime-order subgroup of Curve25519, generated by the
  base point whose Montgomery u-coordinate is 9.  Points are carried in the
  birationally equivalent Edwards form (32-byte compressed encoding) and all
  arithmetic is delegated to libsodium through PyNaCl.
* ``modp*`` -- Schnorr groups: the order-q subgroup of Z_p^* for fixed
  moduli of 512..4096 bits with a shared 256-bit q, plus the tiny
  ``modp_toy`` group (p=23, q=11, g=2) used as a hand-checkable oracle.

Elements are immutable byte strings tagged with their backend.  Membership is
checked once, at :meth:`Group.decode`; elements produced by group operations
are members by construction.

>>> g = get_group("modp_toy")
>>> g.to_int(g.exp(g.from_int(3), Scalar(4)))
12
"""
from __future__ import annotations

import enum
import functools
import hashlib
import random
import secrets
from dataclasses import dataclass
from typing import Optional

from . import _modp_params
from .errors import BackendUnavailable, InvalidElement, InvalidScalar, NonInvertible

try:
    from nacl import bindings as _sodium
except ImportError:  # pragma: no cover - exercised only without PyNaCl
    _sodium = None


class BackendId(str, enum.Enum):
    CURVE25519 = "curve25519"
    MODP512 = "modp512"
    MODP1024 = "modp1024"
    MODP2048 = "modp2048"
    MODP4096 = "modp4096"
    MODP_TOY = "modp_toy"


@dataclass(frozen=True)
class Scalar:
    """An exponent; validity against a particular group is checked on use."""

    value: int

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class GroupElement:
    backend_id: str
    data: bytes

    def hex(self) -> str:
        return self.data.hex()

    def __repr__(self) -> str:
        return f"GroupElement({self.backend_id}, {self.data.hex()[:16]}...)"


@dataclass(frozen=True)
class GroupParams:
    backend_id: str
    generator: GroupElement
    group_order: int
    modulus: Optional[int]
    element_encoding_len: int


Rng = Optional[random.Random]


class Group:
    """Common surface of every backend.

    Subclasses implement the element-level primitives (``_exp``, ``_mul``,
    ``_div``, ``_is_member``); scalar handling lives here.
    """

    backend_id: str
    order: int
    generator: GroupElement
    element_len: int
    modulus: Optional[int] = None

    @property
    def params(self) -> GroupParams:
        return GroupParams(
            backend_id=self.backend_id,
            generator=self.generator,
            group_order=self.order,
            modulus=self.modulus,
            element_encoding_len=self.element_len,
        )

    @property
    def scalar_len(self) -> int:
        return (self.order.bit_length() + 7) // 8

    # -- scalars ---------------------------------------------------------

    def scalar(self, value: int) -> Scalar:
        """Reduce ``value`` mod q; zero is rejected."""
        v = value % self.order
        if v == 0:
            raise InvalidScalar("scalar reduces to zero")
        return Scalar(v)

    def check_scalar(self, s: Scalar) -> int:
        if not isinstance(s, Scalar) or not 0 < s.value < self.order:
            raise InvalidScalar(f"scalar out of range [1, q-1]: {s!r}")
        return s.value

    def random_scalar(self, rng: Rng = None) -> Scalar:
        """Uniform draw from [1, q-1]; deterministic when ``rng`` is seeded."""
        if rng is None:
            return Scalar(secrets.randbelow(self.order - 1) + 1)
        return Scalar(rng.randrange(1, self.order))

    def scalar_inverse(self, s: Scalar) -> Scalar:
        if not isinstance(s, Scalar) or s.value % self.order == 0:
            raise NonInvertible("zero has no inverse mod q")
        return Scalar(pow(s.value % self.order, -1, self.order))

    def scalar_mul(self, a: Scalar, b: Scalar) -> Scalar:
        return Scalar(self.check_scalar(a) * self.check_scalar(b) % self.order)

    def scalar_to_bytes(self, s: Scalar) -> bytes:
        return self.check_scalar(s).to_bytes(self.scalar_len, "big")

    def scalar_from_bytes(self, data: bytes) -> Scalar:
        if len(data) != self.scalar_len:
            raise InvalidScalar("wrong scalar length")
        s = Scalar(int.from_bytes(data, "big"))
        self.check_scalar(s)
        return s

    def scalar_to_hex(self, s: Scalar) -> str:
        return self.scalar_to_bytes(s).hex()

    def scalar_from_hex(self, text: str) -> Scalar:
        return self.scalar_from_bytes(bytes.fromhex(text))

    def hash_to_scalar(self, data: bytes) -> Scalar:
        """SHA-256(data) mod q, re-hashed with a counter suffix in the (negligible
        outside the toy group) event that the reduction is zero."""
        digest = hashlib.sha256(data).digest()
        counter = 0
        while True:
            v = int.from_bytes(digest, "big") % self.order
            if v:
                return Scalar(v)
            counter += 1
            digest = hashlib.sha256(data + counter.to_bytes(4, "big")).digest()

    # -- elements --------------------------------------------------------

    def exp(self, base: GroupElement, s: Scalar) -> GroupElement:
        """``s * base`` in additive notation, ``base ** s`` in multiplicative."""
        self._own(base)
        return self._exp(base, self.check_scalar(s))

    def exp_g(self, s: Scalar) -> GroupElement:
        return self.exp(self.generator, s)

    def mul(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self._own(a)
        self._own(b)
        return self._mul(a, b)

    def div(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self._own(a)
        self._own(b)
        return self._div(a, b)

    def hash_to_group(self, data: bytes) -> GroupElement:
        """Deterministic element ``G^(SHA-256(data) mod q)``."""
        return self.exp_g(self.hash_to_scalar(data))

    def is_member(self, elem: GroupElement) -> bool:
        return (
            isinstance(elem, GroupElement)
            and elem.backend_id == self.backend_id
            and len(elem.data) == self.element_len
            and self._is_member(elem.data)
        )

    def encode(self, elem: GroupElement) -> bytes:
        self._own(elem)
        return elem.data

    def decode(self, data: bytes) -> GroupElement:
        data = bytes(data)
        if len(data) != self.element_len or not self._is_member(data):
            raise InvalidElement(f"not a {self.backend_id} subgroup element")
        return GroupElement(self.backend_id, data)

    def from_hex(self, text: str) -> GroupElement:
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise InvalidElement("bad hex") from exc
        return self.decode(raw)

    def _own(self, elem: GroupElement) -> None:
        if not isinstance(elem, GroupElement) or elem.backend_id != self.backend_id:
            raise InvalidElement(f"element does not belong to {self.backend_id}")

    def _exp(self, base: GroupElement, s: int) -> GroupElement:
        raise NotImplementedError

    def _mul(self, a: GroupElement, b: GroupElement) -> GroupElement:
        raise NotImplementedError

    def _div(self, a: GroupElement, b: GroupElement) -> GroupElement:
        raise NotImplementedError

    def _is_member(self, data: bytes) -> bool:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.backend_id}>"


class ModpGroup(Group):
    """Order-q subgroup of Z_p^*, elements encoded big-endian at fixed width."""

    def __init__(self, backend_id: str, p: int, q: int, g: int):
        if (p - 1) % q:
            raise ValueError("q must divide p - 1")
        if pow(g, q, p) != 1 or g == 1:
            raise ValueError("g must have order q")
        self.backend_id = backend_id
        self.modulus = p
        self.order = q
        self.element_len = (p.bit_length() + 7) // 8
        self.generator = self.from_int(g)

    def to_int(self, elem: GroupElement) -> int:
        self._own(elem)
        return int.from_bytes(elem.data, "big")

    def from_int(self, value: int) -> GroupElement:
        """Decode an integer residue (with membership check)."""
        if not 0 < value < self.modulus:
            raise InvalidElement("residue out of range")
        return self.decode(value.to_bytes(self.element_len, "big"))

    def _wrap(self, value: int) -> GroupElement:
        return GroupElement(self.backend_id, value.to_bytes(self.element_len, "big"))

    def _exp(self, base, s):
        return self._wrap(pow(int.from_bytes(base.data, "big"), s, self.modulus))

    def _mul(self, a, b):
        p = self.modulus
        return self._wrap(int.from_bytes(a.data, "big") * int.from_bytes(b.data, "big") % p)

    def _div(self, a, b):
        p = self.modulus
        inv = pow(int.from_bytes(b.data, "big"), -1, p)
        return self._wrap(int.from_bytes(a.data, "big") * inv % p)

    def _is_member(self, data: bytes) -> bool:
        x = int.from_bytes(data, "big")
        return 0 < x < self.modulus and pow(x, self.order, self.modulus) == 1


# prime order of the Curve25519 base-point subgroup
ELL = 2**252 + 27742317777372353535851937790883648493


class Curve25519Group(Group):
    """Prime-order subgroup of Curve25519 in Edwards coordinates.

    libsodium's validity check rejects non-canonical encodings, points off the
    curve, small-order points and anything outside the order-ell subgroup, so
    cofactor components can never enter through :meth:`decode`.  The identity
    is rejected as well: it cannot carry a pseudonym.
    """

    backend_id = BackendId.CURVE25519.value
    order = ELL
    element_len = 32

    def __init__(self):
        if _sodium is None:
            raise BackendUnavailable("curve25519 backend requires PyNaCl")
        base = _sodium.crypto_scalarmult_ed25519_base_noclamp((1).to_bytes(32, "little"))
        self.generator = GroupElement(self.backend_id, base)

    def _exp(self, base, s):
        out = _sodium.crypto_scalarmult_ed25519_noclamp(s.to_bytes(32, "little"), base.data)
        return GroupElement(self.backend_id, out)

    def exp_g(self, s: Scalar) -> GroupElement:
        out = _sodium.crypto_scalarmult_ed25519_base_noclamp(
            self.check_scalar(s).to_bytes(32, "little")
        )
        return GroupElement(self.backend_id, out)

    def _mul(self, a, b):
        return GroupElement(self.backend_id, _sodium.crypto_core_ed25519_add(a.data, b.data))

    def _div(self, a, b):
        return GroupElement(self.backend_id, _sodium.crypto_core_ed25519_sub(a.data, b.data))

    def _is_member(self, data: bytes) -> bool:
        return bool(_sodium.crypto_core_ed25519_is_valid_point(data))


_MODP = {
    BackendId.MODP512: (_modp_params.P512, _modp_params.G512),
    BackendId.MODP1024: (_modp_params.P1024, _modp_params.G1024),
    BackendId.MODP2048: (_modp_params.P2048, _modp_params.G2048),
    BackendId.MODP4096: (_modp_params.P4096, _modp_params.G4096),
}

BACKENDS = tuple(b.value for b in BackendId)


@functools.lru_cache(maxsize=None)
def get_group(backend_id: str) -> Group:
    """Return the (shared, immutable) group for a backend id string."""
    try:
        bid = BackendId(backend_id)
    except ValueError:
        raise BackendUnavailable(f"unknown backend {backend_id!r}") from None
    if bid is BackendId.CURVE25519:
        return Curve25519Group()
    if bid is BackendId.MODP_TOY:
        return ModpGroup(bid.value, 23, 11, 2)
    p, g = _MODP[bid]
    return ModpGroup(bid.value, p, _modp_params.Q, g)


def group_of(elem: GroupElement) -> Group:
    return get_group(elem.backend_id)


# module-level conveniences mirroring the group methods


def exp(base: GroupElement, s: Scalar) -> GroupElement:
    return group_of(base).exp(base, s)


def scalar_inverse(s: Scalar, group: Group) -> Scalar:
    return group.scalar_inverse(s)


def random_scalar(group: Group, rng: Rng = None) -> Scalar:
    return group.random_scalar(rng)


def hash_to_group(data: bytes, group: Group) -> GroupElement:
    return group.hash_to_group(data)
