"""Exposure-notification key schedule.

tracing key (32 bytes, random, never leaves the device)
  -> daily tracing key: HKDF-SHA256(ikm=tk, salt=empty, info="PD-DTK"||day_le32, L=16)
  -> rolling proximity id: HMAC-SHA256(dtk, "PD-RPI"||interval_u8)[:16]

There are 144 ten-minute intervals per day.  Day numbers come from the
simulated clock (days since the Unix epoch), never from wall time.
"""
from __future__ import annotations

import hmac
import json
import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .errors import IntervalOutOfRange

INTERVALS_PER_DAY = 144
DTK_INFO = b"PD-DTK"
RPI_INFO = b"PD-RPI"


@dataclass(frozen=True)
class TracingKey:
    key: bytes

    def __post_init__(self):
        if len(self.key) != 32:
            raise ValueError("tracing key must be 32 bytes")

    @classmethod
    def generate(cls, rng=None) -> "TracingKey":
        return cls(rng.randbytes(32) if rng is not None else os.urandom(32))

    def __repr__(self) -> str:
        return "TracingKey(<secret>)"


@dataclass(frozen=True)
class DailyTracingKey:
    key: bytes
    day: int

    def __post_init__(self):
        if len(self.key) != 16:
            raise ValueError("daily tracing key must be 16 bytes")
        if self.day < 0:
            raise ValueError("day must be non-negative")


@dataclass(frozen=True)
class RollingProximityId:
    id: bytes
    interval: int


@dataclass(frozen=True)
class ContactRecord:
    rpi: bytes
    day: int
    interval: int


@dataclass
class ContactStore:
    """Append-only log of RPIs heard from nearby devices."""

    observed: List[ContactRecord] = field(default_factory=list)

    def record(self, rpi: bytes, day: int, interval: int) -> None:
        self.observed.append(ContactRecord(bytes(rpi), day, interval))

    def __len__(self) -> int:
        return len(self.observed)


def derive_dtk(tk: TracingKey, day: int) -> DailyTracingKey:
    if day < 0:
        raise ValueError("day must be non-negative")
    hkdf = HKDF(
        algorithm=hashes.SHA256(),
        length=16,
        salt=None,
        info=DTK_INFO + day.to_bytes(4, "little"),
    )
    return DailyTracingKey(hkdf.derive(tk.key), day)


def derive_rpi(dtk: DailyTracingKey, interval: int) -> RollingProximityId:
    if not 0 <= interval < INTERVALS_PER_DAY:
        raise IntervalOutOfRange(f"interval {interval} not in [0, {INTERVALS_PER_DAY - 1}]")
    mac = hmac.new(dtk.key, RPI_INFO + bytes([interval]), hashlib.sha256).digest()
    return RollingProximityId(mac[:16], interval)


def expand_day(dtk: DailyTracingKey) -> List[RollingProximityId]:
    return [derive_rpi(dtk, i) for i in range(INTERVALS_PER_DAY)]


def match_contacts(
    published: Iterable[DailyTracingKey], store: ContactStore
) -> List[Tuple[int, int]]:
    """Return (day, interval) for every stored RPI generated by a published key.

    Results follow the order of ``store.observed``.
    """
    lookup = {}
    for dtk in published:
        for rpi in expand_day(dtk):
            lookup[rpi.id] = (dtk.day, rpi.interval)
    return [lookup[rec.rpi] for rec in store.observed if rec.rpi in lookup]


# -- file formats ----------------------------------------------------------


def dump_published(keys: Iterable[DailyTracingKey]) -> str:
    """JSON-lines ``{"day": ..., "dtk_hex": ...}``, one key per line."""
    return "".join(
        json.dumps({"day": k.day, "dtk_hex": k.key.hex()}) + "\n" for k in keys
    )


def load_published(text: str) -> List[DailyTracingKey]:
    out = []
    for line in text.splitlines():
        if line.strip():
            rec = json.loads(line)
            out.append(DailyTracingKey(bytes.fromhex(rec["dtk_hex"]), int(rec["day"])))
    return out


GOLDEN_VECTORS_PATH = Path(__file__).with_name("data") / "golden_vectors.json"


def load_golden_vectors(path: Optional[Path] = None) -> list:
    with open(path or GOLDEN_VECTORS_PATH) as fh:
        return json.load(fh)["key_schedule"]
