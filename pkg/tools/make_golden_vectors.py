"""Write src/pan_domain/data/golden_vectors.json.

Uses a from-scratch RFC 5869 HKDF over stdlib hmac so the shipped vectors do
not depend on the library code path they are used to check.
"""
import hashlib
import hmac
import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "pan_domain" / "data" / "golden_vectors.json"


def hkdf_sha256(ikm: bytes, salt: bytes, info: bytes, length: int) -> bytes:
    prk = hmac.new(salt or bytes(32), ikm, hashlib.sha256).digest()
    okm, block, counter = b"", b"", 1
    while len(okm) < length:
        block = hmac.new(prk, block + info + bytes([counter]), hashlib.sha256).digest()
        okm += block
        counter += 1
    return okm[:length]


def dtk(tk: bytes, day: int) -> bytes:
    return hkdf_sha256(tk, b"", b"PD-DTK" + day.to_bytes(4, "little"), 16)


def rpi(key: bytes, interval: int) -> bytes:
    return hmac.new(key, b"PD-RPI" + bytes([interval]), hashlib.sha256).digest()[:16]


CASES = [
    (bytes(32), 0, 0),
    (bytes(32), 1, 0),
    (bytes(32), 0, 143),
    (bytes(range(32)), 18500, 37),
    (b"\xff" * 32, 20000, 100),
]


def main():
    vectors = []
    for tk, day, interval in CASES:
        d = dtk(tk, day)
        vectors.append({
            "tk_hex": tk.hex(),
            "day": day,
            "interval": interval,
            "dtk_hex": d.hex(),
            "rpi_hex": rpi(d, interval).hex(),
        })
    # RPI straight from an all-zero daily key
    vectors.append({"dtk_hex": bytes(16).hex(), "interval": 0, "rpi_hex": rpi(bytes(16), 0).hex()})
    OUT.write_text(json.dumps({"key_schedule": vectors}, indent=2) + "\n")


if __name__ == "__main__":
    main()
