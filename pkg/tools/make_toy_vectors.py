"""Write src/pan_domain/data/toy_conversion_vectors.json.

Every (z, x_A, x_B) in 1..10 over the order-11 subgroup of Z_23^* (g = 2),
computed with repeated multiplication only.  Each row is
[z, x_A, x_B, nym_A, nym_B] with nym = g^(z*x).
"""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "pan_domain" / "data" / "toy_conversion_vectors.json"
P, Q, G = 23, 11, 2


def slow_pow(base, e, p):
    out = 1
    for _ in range(e):
        out = out * base % p
    return out


def main():
    rows = []
    for z in range(1, 11):
        base = slow_pow(G, z, P)
        for xa in range(1, 11):
            for xb in range(1, 11):
                rows.append([z, xa, xb, slow_pow(base, xa, P), slow_pow(base, xb, P)])
    doc = {"group": {"p": P, "q": Q, "g": G}, "fields": ["z", "x_a", "x_b", "nym_a", "nym_b"], "rows": rows}
    OUT.write_text(json.dumps(doc, separators=(",", ":")) + "\n")
    print(f"wrote {len(rows)} rows to {OUT}")


if __name__ == "__main__":
    main()
