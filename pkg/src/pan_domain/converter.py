"""The semi-trusted converter and the domain-side records it serves.

The converter owns one secret exponent and one issuance tag key per domain,
plus the Ed25519 key that signs bulletin-board entries.  None of these ever
appear in a public bundle or a response.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from . import audit, elgamal
from .errors import (
    DomainMismatch,
    DuplicateDomain,
    PanDomainError,
    TooFewDomains,
    UnissuedPseudonym,
    UnknownDomain,
)
from .group import Group, GroupElement, Rng, get_group
from .pseudonym import (
    TAG_SCHEME,
    ConversionCiphertext,
    DomainSecret,
    Pseudonym,
    SharedSecret,
    TagKey,
    check_tag,
    compute_tag,
    convert_blind,
    decrypt_conversion,
    ecdh_shared,
    encrypt_for_conversion,
    evaluate_blinded,
    make_tag_key,
)
from .wire import Envelope

ROLES = ("testing_centre", "health_authority", "other")
BOARD_SIGNATURE_SCHEME = "ed25519"


def _ed25519_from_rng(rng: Rng) -> Ed25519PrivateKey:
    if rng is None:
        return Ed25519PrivateKey.generate()
    return Ed25519PrivateKey.from_private_bytes(rng.randbytes(32))


def ed25519_public_hex(key: Ed25519PublicKey) -> str:
    return key.public_bytes(serialization.Encoding.Raw, serialization.PublicFormat.Raw).hex()


def ed25519_public_from_hex(text: str) -> Ed25519PublicKey:
    return Ed25519PublicKey.from_public_bytes(bytes.fromhex(text))


# -- public configuration ---------------------------------------------------------


@dataclass(frozen=True)
class PublicBundle:
    """Common information the converter distributes to one domain."""

    backend_id: str
    domains: Tuple[Tuple[str, str], ...]
    domain_id: str
    tag_public_hex: str
    board_public_hex: str
    tag_scheme: str = TAG_SCHEME
    board_signature_scheme: str = BOARD_SIGNATURE_SCHEME

    def to_json(self) -> str:
        return json.dumps(
            {
                "backend_id": self.backend_id,
                "domains": [list(d) for d in self.domains],
                "domain_id": self.domain_id,
                "tag_public_hex": self.tag_public_hex,
                "board_public_hex": self.board_public_hex,
                "tag_scheme": self.tag_scheme,
                "board_signature_scheme": self.board_signature_scheme,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "PublicBundle":
        rec = json.loads(text)
        rec["domains"] = tuple(tuple(d) for d in rec["domains"])
        return cls(**rec)


# -- requests and responses -------------------------------------------------------


@dataclass(frozen=True)
class ConversionRequestMsg:
    src_domain: str
    dst_domain: str
    ciphertext: ConversionCiphertext
    handle: Optional[audit.AuditHandle]
    request_id: str
    timestamp: int

    @property
    def issuance_sig(self) -> bytes:
        return self.ciphertext.tag

    def to_envelope(self) -> Envelope:
        payload = self.ciphertext.payload.data
        if self.handle is not None:
            payload += self.handle.to_bytes()
        return Envelope(
            type="conversion_request",
            request_id=self.request_id,
            src=self.src_domain,
            dst=self.dst_domain,
            payload_hex=payload.hex(),
            sig_hex=self.ciphertext.tag.hex(),
            ts=self.timestamp,
        )

    @classmethod
    def from_envelope(cls, group: Group, env: Envelope) -> "ConversionRequestMsg":
        """Parse a request.  Raises :class:`InvalidElement` on a bad payload;
        an unparseable audit handle is dropped (``handle=None``)."""
        raw = env.payload
        n = group.element_len
        payload = group.decode(raw[:n])
        handle = None
        try:
            handle = elgamal.from_bytes(group, raw[n:])
        except PanDomainError:
            pass
        ct = ConversionCiphertext(payload, env.src, env.dst, env.sig)
        return cls(env.src, env.dst, ct, handle, env.request_id, env.ts)


_REJECTIONS = {
    "UnknownDomain": UnknownDomain,
    "DomainMismatch": DomainMismatch,
    "UnissuedPseudonym": UnissuedPseudonym,
}


@dataclass(frozen=True)
class ConversionResponse:
    request_id: str
    src_domain: str
    dst_domain: str
    outcome: str
    ciphertext: Optional[ConversionCiphertext] = None
    reason: str = ""
    timestamp: int = 0
    entry_seq: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.outcome == "converted"

    @property
    def error(self) -> Optional[PanDomainError]:
        if self.ok:
            return None
        return _REJECTIONS.get(self.reason, PanDomainError)(self.reason)

    def to_envelope(self) -> Envelope:
        if self.ok:
            return Envelope(
                type="conversion_response",
                request_id=self.request_id,
                src=self.src_domain,
                dst=self.dst_domain,
                payload_hex=self.ciphertext.payload.hex(),
                sig_hex=self.ciphertext.tag.hex(),
                ts=self.timestamp,
            )
        return Envelope(
            type="conversion_rejected",
            request_id=self.request_id,
            src=self.src_domain,
            dst=self.dst_domain,
            payload_hex=f"{self.outcome}:{self.reason}".encode().hex(),
            ts=self.timestamp,
        )

    @classmethod
    def from_envelope(cls, group: Group, env: Envelope) -> "ConversionResponse":
        if env.type == "conversion_response":
            ct = ConversionCiphertext(group.decode(env.payload), env.src, env.dst, env.sig)
            return cls(env.request_id, env.src, env.dst, "converted", ct, timestamp=env.ts)
        outcome, _, reason = env.payload.decode().partition(":")
        return cls(env.request_id, env.src, env.dst, outcome, reason=reason, timestamp=env.ts)


# -- converter --------------------------------------------------------------------


@dataclass
class ConverterState:
    backend_id: str
    domains: Dict[str, str]
    domain_secrets: Dict[str, DomainSecret] = field(repr=False)
    tag_keys: Dict[str, TagKey] = field(repr=False)
    board_key: Ed25519PrivateKey = field(repr=False)
    board: audit.BulletinBoard = field(repr=False)
    deny: Set[Tuple[str, str]] = field(default_factory=set)
    seen_requests: Set[str] = field(default_factory=set)
    last_ts: Dict[str, int] = field(default_factory=dict)


class Converter:
    def __init__(self, state: ConverterState, rng: Rng = None):
        self.state = state
        self.group = get_group(state.backend_id)
        self.rng = rng
        self.issuance_transcript: List[Tuple[str, GroupElement]] = []
        self.conversion_transcript: List[ConversionRequestMsg] = []
        self.responses: List[ConversionResponse] = []

    @property
    def board(self) -> audit.BulletinBoard:
        return self.state.board

    @property
    def board_public_key(self) -> Ed25519PublicKey:
        return self.state.board_key.public_key()

    def public_bundles(self) -> Dict[str, PublicBundle]:
        domains = tuple(sorted(self.state.domains.items()))
        board_hex = ed25519_public_hex(self.board_public_key)
        return {
            d: PublicBundle(
                self.state.backend_id, domains, d, self.state.tag_keys[d].public.hex(), board_hex
            )
            for d in self.state.domains
        }

    def deny_pair(self, src: str, dst: str) -> None:
        self.state.deny.add((src, dst))

    # issuance

    def issue(self, domain_id: str, blinded: GroupElement) -> Tuple[GroupElement, bytes]:
        if domain_id not in self.state.domains:
            raise UnknownDomain(domain_id)
        self.issuance_transcript.append((domain_id, blinded))
        return evaluate_blinded(
            self.group, blinded, self.state.domain_secrets[domain_id], self.state.tag_keys[domain_id]
        )

    def verify_issued(self, nym: Pseudonym) -> bool:
        key = self.state.tag_keys.get(nym.domain_id)
        if key is None or not self.group.is_member(nym.nym):
            return False
        return check_tag(nym.nym, nym.converter_sig, key)

    # conversion

    def handle_conversion(self, req: ConversionRequestMsg) -> ConversionResponse:
        """Convert or reject; every non-replay outcome is on the board first."""
        st = self.state
        if req.request_id in st.seen_requests:
            return self._respond(req, "replay", reason="DuplicateRequest")
        st.seen_requests.add(req.request_id)
        self.conversion_transcript.append(req)

        outcome, reason = self._check(req)
        ct = None
        if outcome == "converted":
            a = st.domain_secrets[req.src_domain]
            b = st.domain_secrets[req.dst_domain]
            out = convert_blind(req.ciphertext, a, b)
            ct = ConversionCiphertext(
                out.payload, out.src_domain, out.dst_domain,
                compute_tag(out.payload, st.tag_keys[req.dst_domain]),
            )
            st.last_ts[req.src_domain] = req.timestamp
        entry = audit.publish(
            st.board,
            st.board_key,
            req.src_domain,
            req.dst_domain,
            req.timestamp,
            outcome,
            req.handle if req.handle is not None else self._decoy_handle(),
            self.rng,
        )
        return self._respond(req, outcome, ct, reason, entry.seq)

    def _check(self, req: ConversionRequestMsg) -> Tuple[str, str]:
        st = self.state
        if req.src_domain not in st.domains or req.dst_domain not in st.domains:
            return "denied", "UnknownDomain"
        ct = req.ciphertext
        if req.src_domain == req.dst_domain or (ct.src_domain, ct.dst_domain) != (
            req.src_domain,
            req.dst_domain,
        ):
            return "denied", "DomainMismatch"
        if (req.src_domain, req.dst_domain) in st.deny:
            return "denied", "PolicyDenied"
        if req.timestamp < st.last_ts.get(req.src_domain, -1):
            return "denied", "StaleTimestamp"
        if not check_tag(ct.payload, ct.tag, st.tag_keys[req.src_domain]):
            return "rejected_signature", "UnissuedPseudonym"
        return "converted", ""

    def _respond(self, req, outcome, ct=None, reason="", seq=None) -> ConversionResponse:
        resp = ConversionResponse(
            req.request_id, req.src_domain, req.dst_domain, outcome, ct, reason, req.timestamp, seq
        )
        self.responses.append(resp)
        return resp

    def _decoy_handle(self) -> audit.AuditHandle:
        # handle under a throwaway key: nobody's scan will ever match it
        kp = elgamal.keygen(self.group, self.rng)
        return audit.create_handle(self.group, kp.pk, self.rng)

    def handle_envelope(self, env: Envelope) -> Envelope:
        try:
            req = ConversionRequestMsg.from_envelope(self.group, env)
        except (PanDomainError, ValueError):
            req = ConversionRequestMsg(
                env.src,
                env.dst,
                ConversionCiphertext(self.group.generator, env.src, env.dst, b""),
                None,
                env.request_id,
                env.ts,
            )
            if env.request_id in self.state.seen_requests:
                return self._respond(req, "replay", reason="DuplicateRequest").to_envelope()
            self.state.seen_requests.add(env.request_id)
            entry = audit.publish(
                self.board, self.state.board_key, env.src, env.dst, env.ts,
                "rejected_signature", self._decoy_handle(), self.rng,
            )
            return self._respond(req, "rejected_signature", None, "UnissuedPseudonym", entry.seq).to_envelope()
        return self.handle_conversion(req).to_envelope()


def _domain_list(domains: Sequence[Union[str, Tuple[str, str]]]) -> List[Tuple[str, str]]:
    out = []
    for d in domains:
        if isinstance(d, str):
            out.append((d, "other"))
        else:
            did, role = d
            if role not in ROLES:
                raise ValueError(f"unknown role {role!r}")
            out.append((did, role))
    return out


def setup_system(
    domains: Sequence[Union[str, Tuple[str, str]]],
    backend_id: str = "curve25519",
    rng: Rng = None,
) -> Tuple[Converter, Dict[str, PublicBundle]]:
    """Create converter state for ``domains``; return it with the public bundles."""
    entries = _domain_list(domains)
    ids = [d for d, _ in entries]
    if len(set(ids)) != len(ids):
        raise DuplicateDomain(f"duplicate domain ids in {ids}")
    if len(ids) < 2:
        raise TooFewDomains("conversion needs at least two domains")
    group = get_group(backend_id)
    secrets = {d: DomainSecret(d, group.random_scalar(rng)) for d in ids}
    tag_keys = {d: make_tag_key(group, d, rng) for d in ids}
    board_key = _ed25519_from_rng(rng)
    state = ConverterState(
        backend_id=backend_id,
        domains=dict(entries),
        domain_secrets=secrets,
        tag_keys=tag_keys,
        board_key=board_key,
        board=audit.BulletinBoard(group, board_key.public_key()),
    )
    conv = Converter(state, rng)
    return conv, conv.public_bundles()


# -- domain side ------------------------------------------------------------------


def apply_prp(prp_key: bytes, nym: Union[Pseudonym, GroupElement]) -> bytes:
    """AES-128 over the first 16 bytes of SHA-256(encoded nym)."""
    elem = nym.nym if isinstance(nym, Pseudonym) else nym
    block = hashlib.sha256(elem.data).digest()[:16]
    enc = Cipher(algorithms.AES(prp_key), modes.ECB()).encryptor()
    return enc.update(block) + enc.finalize()


@dataclass
class DomainRecord:
    """A server's own keys.  ``prp_key`` never leaves the domain."""

    domain_id: str
    role: str
    enc: elgamal.Keypair = field(repr=False)
    prp_key: bytes = field(repr=False)

    @classmethod
    def create(cls, group: Group, domain_id: str, role: str = "other", rng: Rng = None) -> "DomainRecord":
        enc = elgamal.keygen(group, rng)
        prp = rng.randbytes(16) if rng is not None else os.urandom(16)
        return cls(domain_id, role, enc, prp)

    @property
    def public_key(self) -> GroupElement:
        return self.enc.pk

    def local_id(self, nym: Union[Pseudonym, GroupElement]) -> bytes:
        return apply_prp(self.prp_key, nym)

    def shared_secret(self, group: Group, peer_id: str, peer_pk: GroupElement, request_id: str) -> SharedSecret:
        return ecdh_shared(
            self.enc.sk, peer_pk, group, (self.domain_id, peer_id), request_id.encode()
        )

    def conversion_request(
        self,
        group: Group,
        nym: Pseudonym,
        dst_id: str,
        dst_pk: GroupElement,
        request_id: str,
        timestamp: int,
        handle: Optional[audit.AuditHandle] = None,
    ) -> Tuple[ConversionRequestMsg, SharedSecret]:
        s = self.shared_secret(group, dst_id, dst_pk, request_id)
        ct = encrypt_for_conversion(nym, s, dst_id)
        return ConversionRequestMsg(self.domain_id, dst_id, ct, handle, request_id, timestamp), s

    def receive_conversion(
        self, group: Group, resp: ConversionResponse, src_pk: GroupElement
    ) -> Tuple[Pseudonym, bytes]:
        """Decrypt a converted pseudonym and map it to this domain's local id."""
        if not resp.ok:
            raise resp.error
        s = self.shared_secret(group, resp.src_domain, src_pk, resp.request_id)
        nym = decrypt_conversion(resp.ciphertext, s)
        return nym, self.local_id(nym)
