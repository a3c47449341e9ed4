"""Regenerate the fixed Schnorr-group constants in pan_domain/_modp_params.py.

Deterministic: q is the first prime at or above a SHA-256-derived 256-bit
seed; each modulus p = k*q + 1 is the first prime found counting k upward
from 2**(bits-1) // q (rounded to even). Output is printed as Python source.
"""
import hashlib

import gmpy2

SIZES = (512, 1024, 2048, 4096)


def subgroup_order() -> int:
    seed = int.from_bytes(hashlib.sha256(b"PD-MODP-SUBGROUP-ORDER").digest(), "big")
    return int(gmpy2.next_prime(seed | (1 << 255)))


def modulus(bits: int, q: int) -> int:
    k = (1 << (bits - 1)) // q + 1
    k += k % 2
    while True:
        p = k * q + 1
        if p.bit_length() == bits and gmpy2.is_prime(p, 64):
            return p
        k += 2


def generator(p: int, q: int) -> int:
    h = 2
    while True:
        g = pow(h, (p - 1) // q, p)
        if g != 1:
            return g
        h += 1


def main() -> None:
    q = subgroup_order()
    print(f"Q = {q:#x}\n")
    for bits in SIZES:
        p = modulus(bits, q)
        g = generator(p, q)
        print(f"P{bits} = {p:#x}")
        print(f"G{bits} = {g:#x}\n")


if __name__ == "__main__":
    main()
