"""Citizen-auditable bulletin board of conversion records.

Each citizen owns an audit keypair and hands out an *audit handle*: an ElGamal
encryption of the public marker ``M`` under their audit key.  The converter
never learns the key.  For every conversion it

1. re-randomizes the handle it was given,
2. derives a one-time metadata key from the re-randomized handle, and
3. appends ``{seq, prev_hash, handle, epk, meta_ct, sig}`` to the board.

Only the holder of ``audit_sk`` can recognise a handle (it decrypts to ``M``)
and open the metadata.  Scanning is trial decryption over the whole board.

Board lines are canonical JSON; each carries the SHA-256 of the previous line
and an Ed25519 signature by the converter's board key.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Union

from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

from . import elgamal
from .group import Group, GroupElement, Rng, Scalar

MARKER_LABEL = b"PD-AUDIT-MARKER"
OUTCOMES = ("converted", "denied", "rejected_signature")
GENESIS_HASH = bytes(32)
_NONCE = bytes(12)  # every meta key is used exactly once


def marker(group: Group) -> GroupElement:
    return group.hash_to_group(MARKER_LABEL)


@dataclass(frozen=True)
class AuditKeypair:
    audit_sk: Scalar = field(repr=False)
    audit_pk: GroupElement

    @classmethod
    def generate(cls, group: Group, rng: Rng = None) -> "AuditKeypair":
        kp = elgamal.keygen(group, rng)
        return cls(kp.sk, kp.pk)


AuditHandle = elgamal.Ciphertext


def create_handle(group: Group, audit_pk: GroupElement, rng: Rng = None) -> AuditHandle:
    elgamal.check_public_key(group, audit_pk)
    return elgamal.encrypt(group, audit_pk, marker(group), rng)


def rerandomize(
    group: Group,
    handle: AuditHandle,
    rng: Rng = None,
    public_key: Optional[GroupElement] = None,
) -> AuditHandle:
    """Fresh-looking handle with the same plaintext.

    Without ``public_key`` (the converter's situation) the handle's own
    identity encryption ``(c1, c2/M)`` -- valid because the plaintext is the
    public marker -- is raised to a random power and multiplied back in.
    With ``public_key`` this is ordinary ElGamal re-randomization and works for
    any plaintext.
    """
    elgamal.check_ciphertext(group, handle)
    if public_key is not None:
        return elgamal.rerandomize(group, public_key, handle, rng)
    identity_ct = elgamal.Ciphertext(handle.c1, group.div(handle.c2, marker(group)))
    while True:
        t = group.random_scalar(rng)
        if (t.value + 1) % group.order:
            break
    mask = elgamal.power(group, identity_ct, t)
    return elgamal.Ciphertext(group.mul(handle.c1, mask.c1), group.mul(handle.c2, mask.c2))


def handle_matches(group: Group, handle: AuditHandle, audit_sk: Scalar) -> bool:
    return elgamal.decrypt(group, audit_sk, handle) == marker(group)


def _meta_key(shared: GroupElement) -> bytes:
    return hashlib.sha256(b"PD-AUDIT-META" + shared.data).digest()


def _meta_plaintext(src: str, dst: str, timestamp: int, outcome: str) -> bytes:
    return json.dumps(
        {"src": src, "dst": dst, "timestamp": timestamp, "outcome": outcome},
        sort_keys=True,
        separators=(",", ":"),
    ).encode()


@dataclass(frozen=True)
class AuditEntry:
    seq: int
    prev_hash: bytes
    handle: AuditHandle
    epk: GroupElement
    meta_ct: bytes
    sig: bytes

    def body(self) -> dict:
        return {
            "seq": self.seq,
            "prev_hash_hex": self.prev_hash.hex(),
            "handle_hex": self.handle.hex(),
            "meta_ct_hex": self.meta_ct.hex(),
            "epk_hex": self.epk.hex(),
        }

    def signed_bytes(self) -> bytes:
        return _canonical(self.body())

    def to_line(self) -> str:
        return _canonical({**self.body(), "sig_hex": self.sig.hex()}).decode()

    @classmethod
    def from_line(cls, group: Group, line: str) -> "AuditEntry":
        rec = json.loads(line)
        return cls(
            seq=int(rec["seq"]),
            prev_hash=bytes.fromhex(rec["prev_hash_hex"]),
            handle=elgamal.from_bytes(group, bytes.fromhex(rec["handle_hex"])),
            epk=group.from_hex(rec["epk_hex"]),
            meta_ct=bytes.fromhex(rec["meta_ct_hex"]),
            sig=bytes.fromhex(rec["sig_hex"]),
        )


def _canonical(obj: dict) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


class BulletinBoard:
    """Append-only, hash-chained list of :class:`AuditEntry`.

    Only the holder of the board signing key (the converter) can append.
    """

    def __init__(self, group: Group, public_key: Ed25519PublicKey):
        self.group = group
        self.public_key = public_key
        self.entries: List[AuditEntry] = []

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def head_hash(self) -> bytes:
        if not self.entries:
            return GENESIS_HASH
        return hashlib.sha256(self.entries[-1].to_line().encode()).digest()

    def _append(self, entry: AuditEntry) -> None:
        if entry.seq != len(self.entries) or entry.prev_hash != self.head_hash:
            raise ValueError("entry does not extend the chain")
        self.entries.append(entry)

    def dumps(self) -> str:
        return "".join(e.to_line() + "\n" for e in self.entries)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, group: Group, public_key: Ed25519PublicKey, text: str) -> "BulletinBoard":
        board = cls(group, public_key)
        for line in text.split("\n"):
            if line:
                board.entries.append(AuditEntry.from_line(group, line))
        return board

    def verify(self) -> bool:
        return verify_lines(self.group, self.public_key, self.dumps())


def verify_lines(group: Group, public_key: Ed25519PublicKey, text: Union[str, bytes]) -> bool:
    """Check a serialized board: canonical lines, seq, hash chain, signatures."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError:
            return False
    if text and not text.endswith("\n"):
        return False
    prev = GENESIS_HASH
    lines = text.split("\n")[:-1] if text else []
    for i, line in enumerate(lines):
        try:
            entry = AuditEntry.from_line(group, line)
        except Exception:
            return False
        if entry.to_line() != line or entry.seq != i or entry.prev_hash != prev:
            return False
        try:
            public_key.verify(entry.sig, entry.signed_bytes())
        except InvalidSignature:
            return False
        prev = hashlib.sha256(line.encode()).digest()
    return True


def publish(
    board: BulletinBoard,
    signing_key: Ed25519PrivateKey,
    src: str,
    dst: str,
    timestamp: int,
    outcome: str,
    handle: AuditHandle,
    rng: Rng = None,
) -> AuditEntry:
    if outcome not in OUTCOMES:
        raise ValueError(f"unknown outcome {outcome!r}")
    group = board.group
    fresh = rerandomize(group, handle, rng)
    e = group.random_scalar(rng)
    epk = group.exp(fresh.c1, e)
    shared = group.exp(group.div(fresh.c2, marker(group)), e)
    meta_ct = ChaCha20Poly1305(_meta_key(shared)).encrypt(
        _NONCE, _meta_plaintext(src, dst, timestamp, outcome), None
    )
    unsigned = AuditEntry(len(board), board.head_hash, fresh, epk, meta_ct, b"")
    entry = AuditEntry(
        unsigned.seq,
        unsigned.prev_hash,
        fresh,
        epk,
        meta_ct,
        signing_key.sign(unsigned.signed_bytes()),
    )
    board._append(entry)
    return entry


def open_entry(group: Group, entry: AuditEntry, audit_sk: Scalar) -> Optional[dict]:
    if not handle_matches(group, entry.handle, audit_sk):
        return None
    shared = group.exp(entry.epk, audit_sk)
    try:
        plain = ChaCha20Poly1305(_meta_key(shared)).decrypt(_NONCE, entry.meta_ct, None)
    except InvalidTag:
        return None
    return {"seq": entry.seq, **json.loads(plain)}


def scan(board: Iterable[AuditEntry], audit_sk: Scalar, group: Optional[Group] = None) -> List[dict]:
    """Trial-decrypt every entry; return the records addressed to ``audit_sk``."""
    group = group or board.group
    out = []
    for entry in board:
        rec = open_entry(group, entry, audit_sk)
        if rec is not None:
            out.append(rec)
    return out
