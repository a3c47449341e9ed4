"""Timing harness for blind conversion, one backend at a time.

Per iteration the curve path runs encrypt -> convert -> decrypt and the modp
paths run ElGamal convert -> decrypt; each result is compared against the
expected destination pseudonym, and a mismatch aborts the run.  Inputs, keys
and expected outputs are prepared before the clock starts.
"""
from __future__ import annotations

import csv
import io
import json
import random
import time
from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence

from . import elgamal
from .errors import BackendUnavailable
from .group import BackendId, Scalar, get_group
from .pseudonym import (
    ConversionCiphertext,
    DomainSecret,
    SharedSecret,
    conversion_factor,
    convert_blind,
    decrypt_conversion,
    elgamal_convert,
)

DEFAULT_BACKENDS = ("curve25519", "modp512", "modp1024", "modp2048", "modp4096")

# Reference timings per 1,000 conversions in ms; shown beside measurements for context only.
REFERENCE_MS = {
    "curve25519": 599.03,
    "heaan": 4040.0,
    "modp512": 338.2177,
    "modp1024": 508.93,
    "modp2048": 2250.0,
    "modp4096": 6930.0,
}

# (faster, slower) pairs that must hold for the report to pass
EXPECTED_ORDER = (
    ("modp512", "modp1024"),
    ("modp1024", "modp2048"),
    ("modp2048", "modp4096"),
    ("curve25519", "modp2048"),
)
MIN_RATIO_2048_1024 = 2.0


class ConversionMismatch(AssertionError):
    pass


@dataclass
class BenchResult:
    backend_id: str
    n_conversions: int
    total: float  # milliseconds
    per_op: float  # microseconds
    warmup_n: int

    def to_dict(self) -> dict:
        return asdict(self)


def _curve_cases(group, n, rng):
    a = DomainSecret("a", group.random_scalar(rng))
    b = DomainSecret("b", group.random_scalar(rng))
    cases = []
    for _ in range(n):
        base = group.exp_g(group.random_scalar(rng))
        s = SharedSecret(("a", "b"), group.random_scalar(rng))
        cases.append((group.exp(base, a.x), s, group.exp(base, b.x)))
    return a, b, cases


def _elgamal_cases(group, n, rng):
    x_a = group.random_scalar(rng)
    x_b = group.random_scalar(rng)
    delta = conversion_factor(DomainSecret("a", x_a), DomainSecret("b", x_b), group)
    key = elgamal.keygen(group, rng)
    q = group.order
    cases = []
    for _ in range(n):
        u = group.random_scalar(rng).value
        # setup knows every exponent: c2 = g^(u*x_a) * pk^k = g^(u*x_a + sk*k)
        while True:
            k = group.random_scalar(rng)
            c2_exp = (u * x_a.value + key.sk.value * k.value) % q
            if c2_exp:
                break
        ct = elgamal.Ciphertext(group.exp_g(k), group.exp_g(Scalar(c2_exp)))
        cases.append((ct, group.exp_g(group.scalar(u * x_b.value))))
    return delta, key.sk, cases


def run_bench(backend_id: str, n: int = 1000, seed: int = 0, warmup: int = 10) -> BenchResult:
    if n < 1:
        raise ValueError("n must be >= 1")
    group = get_group(backend_id)
    if backend_id == BackendId.MODP_TOY.value:
        raise BackendUnavailable("modp_toy is a test oracle group, not a benchmark target")
    rng = random.Random(f"bench:{backend_id}:{seed}")

    if backend_id == BackendId.CURVE25519.value:
        a, b, cases = _curve_cases(group, n + warmup, rng)

        def one(case):
            nym, s, expected = case
            ct = ConversionCiphertext(group.exp(nym, s.s), "a", "b")
            out = decrypt_conversion(convert_blind(ct, a, b), s)
            if out.nym != expected:
                raise ConversionMismatch(f"{backend_id}: wrong conversion output")
    else:
        delta, sk, cases = _elgamal_cases(group, n + warmup, rng)

        def one(case):
            ct, expected = case
            if elgamal.decrypt(group, sk, elgamal_convert(ct, delta)) != expected:
                raise ConversionMismatch(f"{backend_id}: wrong conversion output")

    for case in cases[:warmup]:
        one(case)
    timed = cases[warmup:]
    start = time.perf_counter()
    for case in timed:
        one(case)
    elapsed = time.perf_counter() - start
    return BenchResult(backend_id, n, elapsed * 1e3, elapsed * 1e6 / n, warmup)


def compare(results: Sequence[BenchResult]) -> dict:
    """Rank results and check the expected partial order.

    Equal timings are reported as ties and never fail on their own.
    """
    if len(results) < 2:
        raise ValueError("need at least two results to compare")
    table = sorted(results, key=lambda r: r.per_op)
    by_id: Dict[str, BenchResult] = {r.backend_id: r for r in results}
    ties = []
    for i, r in enumerate(table):
        for other in table[i + 1:]:
            if other.per_op == r.per_op:
                ties.append((r.backend_id, other.backend_id))
    checks = []
    for fast, slow in EXPECTED_ORDER:
        if fast in by_id and slow in by_id:
            ok = by_id[fast].per_op < by_id[slow].per_op
            checks.append({
                "name": f"{fast} < {slow}",
                "passed": ok,
                "detail": f"{by_id[fast].per_op:.1f} us vs {by_id[slow].per_op:.1f} us",
            })
    if "modp1024" in by_id and "modp2048" in by_id:
        ratio = by_id["modp2048"].per_op / by_id["modp1024"].per_op
        checks.append({
            "name": f"modp2048/modp1024 >= {MIN_RATIO_2048_1024:g}",
            "passed": ratio >= MIN_RATIO_2048_1024,
            "detail": f"ratio {ratio:.2f}",
        })
    return {
        "table": [
            {
                "rank": i + 1,
                **r.to_dict(),
                "reference_ms_per_1000": REFERENCE_MS.get(r.backend_id),
            }
            for i, r in enumerate(table)
        ],
        "ties": ties,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


def results_to_json(results: Sequence[BenchResult]) -> str:
    return json.dumps([r.to_dict() for r in results], indent=2)


def results_from_json(text: str) -> List[BenchResult]:
    return [BenchResult(**rec) for rec in json.loads(text)]


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    cols = ["rank", "backend_id", "n_conversions", "total", "per_op", "warmup_n", "reference_ms_per_1000"]
    writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in report["table"]:
        writer.writerow(row)
    return buf.getvalue()
