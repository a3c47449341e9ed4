"""Message envelope used on the simulated transport.

Every message is a JSON object with exactly the keys
``type, request_id, src, dst, payload_hex, sig_hex, ts`` and travels as a
4-byte big-endian length prefix followed by the UTF-8 JSON body.
"""
from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass
from typing import Iterator, Tuple

FIELDS = ("type", "request_id", "src", "dst", "payload_hex", "sig_hex", "ts")


@dataclass(frozen=True)
class Envelope:
    type: str
    request_id: str
    src: str
    dst: str
    payload_hex: str = ""
    sig_hex: str = ""
    ts: int = 0

    @property
    def payload(self) -> bytes:
        return bytes.fromhex(self.payload_hex)

    @property
    def sig(self) -> bytes:
        return bytes.fromhex(self.sig_hex)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Envelope":
        rec = json.loads(text)
        if set(rec) != set(FIELDS):
            raise ValueError(f"envelope fields must be exactly {FIELDS}")
        return cls(**rec)

    def frame(self) -> bytes:
        body = self.to_json().encode()
        return struct.pack(">I", len(body)) + body


def unframe(buf: bytes) -> Tuple[Envelope, bytes]:
    """Decode one framed envelope; return it with the unconsumed remainder."""
    if len(buf) < 4:
        raise ValueError("short frame header")
    (n,) = struct.unpack(">I", buf[:4])
    if len(buf) < 4 + n:
        raise ValueError("short frame body")
    return Envelope.from_json(buf[4 : 4 + n].decode()), buf[4 + n :]


def iter_frames(buf: bytes) -> Iterator[Envelope]:
    while buf:
        env, buf = unframe(buf)
        yield env
