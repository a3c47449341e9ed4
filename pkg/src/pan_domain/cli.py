"""``pan-domain`` command line.

    pan-domain setup --domains tc,ha --backend curve25519 --seed 1 --out dir/
    pan-domain scenario run --config file.json --seed 42 [--faults drop,dup] [--trace out.jsonl]
                            [--adversary MODE] [--board board.jsonl] [--audit-keys keys.json]
    pan-domain scenario replay --trace out.jsonl
    pan-domain audit scan --board board.jsonl --sk HEX [--backend curve25519] [--board-pk HEX]
    pan-domain bench --backends curve25519,modp512 --n 1000 --seed 0 --out results.json
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import List, Optional

from . import audit, bench, scenario
from .converter import ed25519_public_from_hex, ed25519_public_hex, setup_system
from .errors import PanDomainError, ScenarioAssertionFailed
from .group import BACKENDS, get_group


def _csv_list(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def cmd_setup(args) -> int:
    domains = _csv_list(args.domains)
    conv, bundles = setup_system(domains, args.backend, random.Random(args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for did, bundle in bundles.items():
        (out / f"{did}.bundle.json").write_text(bundle.to_json() + "\n")
    (out / "board.pub").write_text(ed25519_public_hex(conv.board_public_key) + "\n")
    print(f"wrote {len(bundles)} bundles to {out}")
    return 0


def cmd_scenario_run(args) -> int:
    config = scenario.load_config(args.config) if args.config else scenario.default_config()
    if args.adversary:
        config = scenario.adversarial_config(args.adversary, config)
    faults = _csv_list(args.faults) if args.faults else []
    runner = scenario.run_adversarial if config.get("adversary") else scenario.run_scenario
    try:
        trace = runner(config, args.seed, faults)
        code = 0
    except ScenarioAssertionFailed as exc:
        trace = exc.trace
        code = 1
    if args.trace:
        trace.save(args.trace)
    if args.board:
        Path(args.board).write_text(trace.artifacts["board"])
        print(f"board_public_hex\t{trace.artifacts['board_public_hex']}")
    if args.audit_keys:
        Path(args.audit_keys).write_text(json.dumps(trace.artifacts["audit_sk_hex"], indent=2) + "\n")
    print(f"verdict\t{trace.verdict}")
    if trace.failed_step:
        print(f"failed_step\t{trace.failed_step}")
    for key, value in trace.stats.items():
        print(f"{key}\t{json.dumps(value, sort_keys=True)}")
    return code


def cmd_scenario_replay(args) -> int:
    trace = scenario.ScenarioTrace.loads(Path(args.trace).read_text())
    try:
        scenario.replay(trace, args.seed)
    except PanDomainError as exc:
        print(f"replay\tDIVERGED\t{exc}")
        return 1
    print("replay\tIDENTICAL")
    return 0


def cmd_audit_scan(args) -> int:
    group = get_group(args.backend)
    text = Path(args.board).read_text()
    if args.board_pk:
        ok = audit.verify_lines(group, ed25519_public_from_hex(args.board_pk), text)
        print(f"# chain\t{'ok' if ok else 'BROKEN'}", file=sys.stderr)
        if not ok:
            return 1
    entries = [audit.AuditEntry.from_line(group, line) for line in text.split("\n") if line]
    records = audit.scan(entries, group.scalar_from_hex(args.sk), group)
    print("seq\tsrc\tdst\ttimestamp\toutcome")
    for r in records:
        print(f"{r['seq']}\t{r['src']}\t{r['dst']}\t{r['timestamp']}\t{r['outcome']}")
    return 0


def cmd_bench(args) -> int:
    backends = _csv_list(args.backends)
    results = []
    for b in backends:
        r = bench.run_bench(b, args.n, args.seed, args.warmup)
        print(f"# {b}: {r.total:.1f} ms total, {r.per_op:.1f} us/op", file=sys.stderr)
        results.append(r)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(bench.results_to_json(results) + "\n")
    if len(results) < 2:
        return 0
    report = bench.compare(results)
    csv_text = bench.report_csv(report)
    out.with_suffix(".csv").write_text(csv_text)
    if not args.no_plot:
        from .plotting import plot_bench

        plot_bench(results, out.with_suffix(".png"))
    sys.stdout.write(csv_text)
    for c in report["checks"]:
        print(f"# {'PASS' if c['passed'] else 'FAIL'}\t{c['name']}\t{c['detail']}")
    for a, b in report["ties"]:
        print(f"# tie\t{a}\t{b}")
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pan-domain", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("setup", help="create converter state and public bundles")
    s.add_argument("--domains", required=True)
    s.add_argument("--backend", default="curve25519", choices=BACKENDS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_setup)

    sc = sub.add_parser("scenario", help="contact-tracing simulation")
    scs = sc.add_subparsers(dest="scenario_command", required=True)
    r = scs.add_parser("run")
    r.add_argument("--config")
    r.add_argument("--seed", type=int, default=42)
    r.add_argument("--faults", help="comma list of: drop, dup")
    r.add_argument("--trace", help="write JSON-lines trace here")
    r.add_argument("--adversary", choices=scenario.ADVERSARY_MODES)
    r.add_argument("--board", help="write the bulletin board (JSON-lines) here")
    r.add_argument("--audit-keys", help="write citizens' audit secret keys (demo only)")
    r.set_defaults(func=cmd_scenario_run)
    rp = scs.add_parser("replay")
    rp.add_argument("--trace", required=True)
    rp.add_argument("--seed", type=int)
    rp.set_defaults(func=cmd_scenario_replay)

    a = sub.add_parser("audit", help="bulletin-board tools")
    asub = a.add_subparsers(dest="audit_command", required=True)
    scan = asub.add_parser("scan")
    scan.add_argument("--board", required=True)
    scan.add_argument("--sk", required=True, help="audit secret key, hex")
    scan.add_argument("--backend", default="curve25519", choices=BACKENDS)
    scan.add_argument("--board-pk", help="converter board key (hex); verifies the chain first")
    scan.set_defaults(func=cmd_audit_scan)

    b = sub.add_parser("bench", help="time blind conversions per backend")
    b.add_argument("--backends", default=",".join(bench.DEFAULT_BACKENDS))
    b.add_argument("--n", type=int, default=1000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--warmup", type=int, default=10)
    b.add_argument("--out", default="results.json")
    b.add_argument("--no-plot", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
