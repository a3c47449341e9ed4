"""Deterministic multi-party contact-tracing simulation.

Parties (citizens, a testing centre ``tc``, a health authority ``ha`` and the
converter) exchange :class:`~pan_domain.wire.Envelope` messages over a seeded
in-memory :class:`Transport`.  The run is driven phase by phase; after each
phase the transport is drained.  Every send, delivery, injected fault and
notable state change is appended to the trace, which is a pure function of
``(config, seed)``.

The ground-truth table (citizen name -> keys, pseudonyms, local ids) is kept
by the simulator, never by a party, and is used only for the verdict.
"""
from __future__ import annotations

import copy
import json
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import audit, tracing_keys
from .converter import (
    ConversionResponse,
    Converter,
    DomainRecord,
    PublicBundle,
    ed25519_public_hex,
    setup_system,
)
from .elgamal import Ciphertext
from .errors import NonDeterminismDetected, PanDomainError, ScenarioAssertionFailed
from .group import Group, get_group
from .pseudonym import TAG_SCHEME, BlindSession, CoreIdentifier, Pseudonym
from .wire import Envelope

INTERVALS = tracing_keys.INTERVALS_PER_DAY
DEFAULT_CONFIG_PATH = Path(__file__).with_name("data") / "default_scenario.json"
ADVERSARY_MODES = ("self_report", "forged_signature", "replay")
FAULTS = ("drop", "dup")


def default_config() -> dict:
    return json.loads(DEFAULT_CONFIG_PATH.read_text())


def load_config(path) -> dict:
    cfg = default_config()
    cfg.update(json.loads(Path(path).read_text()))
    return cfg


@dataclass
class SimClock:
    start_day: int
    tick: int = 0

    def advance_to(self, tick: int) -> None:
        if tick < self.tick:
            raise ValueError("clock is monotone")
        self.tick = tick

    @property
    def day(self) -> int:
        return self.start_day + self.tick // INTERVALS

    @property
    def interval(self) -> int:
        return self.tick % INTERVALS


# -- trace ------------------------------------------------------------------------


@dataclass
class ScenarioTrace:
    events: List[dict] = field(default_factory=list)
    ground_truth: Dict[str, dict] = field(default_factory=dict, repr=False)
    verdict: str = "PENDING"
    failed_step: str = ""
    stats: dict = field(default_factory=dict)
    # board dump, board key and citizens' audit keys; test/demo use only
    artifacts: dict = field(default_factory=dict, repr=False)

    def add(self, **event) -> None:
        event = {"i": len(self.events), **event}
        self.events.append(event)

    def lines(self) -> List[str]:
        return [json.dumps(e, sort_keys=True, separators=(",", ":")) for e in self.events]

    def dumps(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "ScenarioTrace":
        return cls(events=[json.loads(line) for line in text.splitlines() if line.strip()])

    def messages(self) -> List[str]:
        """JSON of every envelope put on the wire."""
        return [e["msg"] for e in self.events if e["event"] == "send"]

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"


# -- transport --------------------------------------------------------------------


class Transport:
    """FIFO queue per (sender, receiver) pair, drained in global send order.

    Faults are drawn from their own seeded stream, so a run with faults is as
    reproducible as one without.
    """

    def __init__(self, trace: ScenarioTrace, clock: SimClock, seed: int,
                 faults: Iterable[str] = (), drop_rate: float = 0.1, dup_rate: float = 0.1):
        self.trace = trace
        self.clock = clock
        self.faults = tuple(sorted(set(faults)))
        unknown = set(self.faults) - set(FAULTS)
        if unknown:
            raise ValueError(f"unknown faults {sorted(unknown)}")
        self.rng = random.Random(f"faults:{seed}")
        self.drop_rate = drop_rate
        self.dup_rate = dup_rate
        self.queues: Dict[Tuple[str, str], deque] = {}
        self.order: deque = deque()
        self.parties: Dict[str, "Party"] = {}
        self.wire_log: List[Envelope] = []

    def attach(self, address: str, party: "Party") -> None:
        self.parties[address] = party

    def send(self, sender: str, receiver: str, env: Envelope) -> None:
        msg = env.to_json()
        self.wire_log.append(env)
        self.trace.add(event="send", tick=self.clock.tick, frm=sender, to=receiver, msg=msg)
        if "drop" in self.faults and self.rng.random() < self.drop_rate:
            self.trace.add(event="drop", tick=self.clock.tick, frm=sender, to=receiver)
            return
        copies = 1
        if "dup" in self.faults and self.rng.random() < self.dup_rate:
            copies = 2
            self.trace.add(event="dup", tick=self.clock.tick, frm=sender, to=receiver)
        key = (sender, receiver)
        for _ in range(copies):
            self.queues.setdefault(key, deque()).append(env.frame())
            self.order.append(key)

    def run_until_quiet(self, limit: int = 100_000) -> int:
        delivered = 0
        while self.order:
            if delivered >= limit:
                raise RuntimeError("transport did not quiesce")
            key = self.order.popleft()
            frame = self.queues[key].popleft()
            env = Envelope.from_json(frame[4:].decode())
            sender, receiver = key
            self.trace.add(event="deliver", tick=self.clock.tick, frm=sender, to=receiver, type=env.type)
            self.parties[receiver].on_message(sender, env)
            delivered += 1
        return delivered


# -- parties --------------------------------------------------------------------------


class Party:
    role = "party"

    def __init__(self, sim: "Simulation", address: str):
        self.sim = sim
        self.address = address
        sim.transport.attach(address, self)

    @property
    def group(self) -> Group:
        return self.sim.group

    def send(self, receiver: str, env: Envelope) -> None:
        self.sim.transport.send(self.address, receiver, env)

    def note(self, what: str, **detail) -> None:
        self.sim.trace.add(event="state", tick=self.sim.clock.tick, party=self.address, what=what, **detail)

    def on_message(self, sender: str, env: Envelope) -> None:
        handler = getattr(self, "on_" + env.type, None)
        if handler is None:
            self.note("ignored", type=env.type)
            return
        handler(sender, env)


class ConverterParty(Party):
    role = "converter"

    def __init__(self, sim, address, converter: Converter):
        super().__init__(sim, address)
        self.converter = converter

    def on_issue_request(self, sender, env):
        try:
            evaluated, tag = self.converter.issue(env.dst, self.group.decode(env.payload))
        except PanDomainError as exc:
            self.note("issue_rejected", reason=type(exc).__name__)
            return
        self.send(sender, Envelope("issue_response", env.request_id, "converter", env.dst,
                                   evaluated.hex(), tag.hex(), self.sim.clock.tick))

    def on_conversion_request(self, sender, env):
        out = self.converter.handle_envelope(env)
        resp = ConversionResponse.from_envelope(self.group, out)
        self.note("conversion", outcome=resp.outcome, request_id=env.request_id)
        if resp.ok:
            self.send(resp.dst_domain, out)
        else:
            self.send(sender, out)


class DomainParty(Party):
    def __init__(self, sim, record: DomainRecord):
        super().__init__(sim, record.domain_id)
        self.record = record
        self.bundle: Optional[PublicBundle] = None
        self.peer_keys: Dict[str, object] = {}
        self.rejections: List[ConversionResponse] = []

    def on_common_info(self, sender, env):
        self.bundle = PublicBundle.from_json(env.payload.decode())
        for did, _role in self.bundle.domains:
            if did != self.address:
                self.send(did, Envelope("domain_key", "", self.address, did,
                                        self.record.public_key.hex(), "", self.sim.clock.tick))

    def on_domain_key(self, sender, env):
        self.peer_keys[env.src] = self.group.decode(env.payload)

    def on_conversion_rejected(self, sender, env):
        resp = ConversionResponse.from_envelope(self.group, env)
        self.rejections.append(resp)
        self.note("rejection", outcome=resp.outcome, reason=resp.reason)


class TestingCentre(DomainParty):
    role = "testing_centre"

    def __init__(self, sim, record):
        super().__init__(sim, record)
        # local id -> (pseudonym, audit handle, reply address)
        self.patients: Dict[bytes, Tuple[Pseudonym, Optional[Ciphertext], str]] = {}
        self.sent_requests: List[Envelope] = []

    def on_test_register(self, sender, env):
        g = self.group
        n = g.element_len
        raw = env.payload
        try:
            nym = Pseudonym(self.address, g.decode(raw[:n]), env.sig)
            handle = audit.elgamal.from_bytes(g, raw[n:])
        except PanDomainError:
            self.note("bad_registration")
            return
        lid = self.record.local_id(nym)
        if lid in self.patients:
            return
        self.patients[lid] = (nym, handle, sender)
        self.sim.local_ids.setdefault(self.address, []).append(lid)
        self.note("patient_registered")

    def report_results(self, results: Dict[str, str]) -> None:
        """``results`` maps reply address -> "positive"/"negative"."""
        ha = self.sim.ha.address
        for lid, (nym, handle, reply_to) in list(self.patients.items()):
            outcome = results.get(reply_to)
            if outcome is None:
                continue
            if outcome == "positive":
                request_id = self.sim.new_request_id()
                try:
                    req, _ = self.record.conversion_request(
                        self.group, nym, ha, self.peer_keys[ha], request_id, self.sim.clock.tick, handle
                    )
                except PanDomainError as exc:
                    self.note("conversion_not_sent", reason=type(exc).__name__)
                else:
                    env = req.to_envelope()
                    self.sent_requests.append(env)
                    self.send("converter", env)
            self.send(reply_to, Envelope("test_result", "", self.address, "citizen",
                                         outcome.encode().hex(), "", self.sim.clock.tick))


class HealthAuthority(DomainParty):
    role = "health_authority"

    def __init__(self, sim, record, publish_unconfirmed: bool = False):
        super().__init__(sim, record)
        self.registered: List[bytes] = []
        self.confirmed: List[bytes] = []
        self.pending: Dict[bytes, List[tracing_keys.DailyTracingKey]] = {}
        self.published: List[tracing_keys.DailyTracingKey] = []
        self.publications = 0
        self.publish_unconfirmed = publish_unconfirmed

    def on_register(self, sender, env):
        try:
            nym = Pseudonym(self.address, self.group.decode(env.payload), env.sig)
        except PanDomainError:
            self.note("bad_registration")
            return
        lid = self.record.local_id(nym)
        if lid not in self.registered:
            self.registered.append(lid)
            self.sim.local_ids.setdefault(self.address, []).append(lid)
            self.note("citizen_registered")

    def on_conversion_response(self, sender, env):
        if sender != "converter":
            self.note("unauthenticated_conversion")
            return
        resp = ConversionResponse.from_envelope(self.group, env)
        peer = self.peer_keys.get(resp.src_domain)
        if peer is None:
            return
        _nym, lid = self.record.receive_conversion(self.group, resp, peer)
        if lid not in self.registered:
            self.note("conversion_for_unknown_citizen")
            return
        if lid not in self.confirmed:
            self.confirmed.append(lid)
            self.note("case_confirmed", src=resp.src_domain)
        self._flush(lid)

    def on_dtk_upload(self, sender, env):
        g = self.group
        n = g.element_len
        raw = env.payload
        try:
            nym = Pseudonym(self.address, g.decode(raw[:n]), env.sig)
            keys = tracing_keys.load_published(raw[n:].decode())
        except (PanDomainError, ValueError):
            self.note("bad_upload")
            return
        lid = self.record.local_id(nym)
        if lid in self.pending or any(k in self.published for k in keys):
            return
        self.pending[lid] = keys
        if lid in self.confirmed or self.publish_unconfirmed:
            self._flush(lid)
        else:
            self.note("upload_held", reason="no_confirmed_conversion")

    def _flush(self, lid: bytes) -> None:
        keys = self.pending.pop(lid, None)
        if not keys:
            return
        self.published.extend(keys)
        self.publications += 1
        self.note("dtks_published", n=len(keys), confirmed=lid in self.confirmed)
        body = tracing_keys.dump_published(keys).encode().hex()
        for addr in self.sim.citizen_addresses():
            self.send(addr, Envelope("dtk_publish", "", self.address, "citizens", body, "",
                                     self.sim.clock.tick))


class Citizen(Party):
    role = "citizen"

    def __init__(self, sim, address: str, rng: random.Random, consent: bool = True):
        super().__init__(sim, address)
        g = self.group
        self.tk = tracing_keys.TracingKey.generate(rng)
        self.z = CoreIdentifier(g.random_scalar(rng))
        self.audit = audit.AuditKeypair.generate(g, rng)
        self.contacts = tracing_keys.ContactStore()
        self.consent = consent
        self.rng = rng
        self.sessions: Dict[str, Tuple[BlindSession, str]] = {}
        self.nyms: Dict[str, Pseudonym] = {}
        self.published: List[tracing_keys.DailyTracingKey] = []
        self.matches: List[Tuple[int, int]] = []
        self.result: Optional[str] = None

    def dtk(self, day: int) -> tracing_keys.DailyTracingKey:
        return tracing_keys.derive_dtk(self.tk, day)

    def start_issuance(self, domain_id: str, purpose: str) -> None:
        session = BlindSession(self.group, self.z, domain_id, self.rng)
        request_id = self.sim.new_request_id()
        self.sessions[request_id] = (session, purpose)
        _, blinded = session.request()
        self.send("converter", Envelope("issue_request", request_id, "citizen", domain_id,
                                        blinded.hex(), "", self.sim.clock.tick))

    def on_issue_response(self, sender, env):
        entry = self.sessions.pop(env.request_id, None)
        if entry is None:
            return  # duplicate or unsolicited
        session, purpose = entry
        nym = session.finish(self.group.decode(env.payload), env.sig)
        self.nyms[session.domain_id] = nym
        if purpose == "register":
            self.send(session.domain_id, Envelope("register", "", "citizen", session.domain_id,
                                                  nym.nym.hex(), nym.converter_sig.hex(), self.sim.clock.tick))
        elif purpose == "test":
            self.send_test_registration(nym)

    def send_test_registration(self, nym: Pseudonym) -> None:
        handle = audit.create_handle(self.group, self.audit.audit_pk, self.rng)
        self.send(nym.domain_id, Envelope("test_register", "", "citizen", nym.domain_id,
                                          (nym.nym.data + handle.to_bytes()).hex(),
                                          nym.converter_sig.hex(), self.sim.clock.tick))

    def beacon(self, peer: str) -> None:
        clock = self.sim.clock
        rpi = tracing_keys.derive_rpi(self.dtk(clock.day), clock.interval)
        self.send(peer, Envelope("rpi_beacon", "", "device", "nearby", rpi.id.hex(), "", clock.tick))

    def on_rpi_beacon(self, sender, env):
        self.contacts.record(env.payload, self.sim.clock.day, self.sim.clock.interval)

    def on_test_result(self, sender, env):
        self.result = env.payload.decode()
        self.note("test_result_received")
        if self.result == "positive" and self.consent:
            self.upload_keys()

    def upload_keys(self, days: Optional[Sequence[int]] = None) -> None:
        if days is None:
            days = range(self.sim.clock.start_day, self.sim.clock.day + 1)
        nym = self.nyms.get(self.sim.ha.address)
        if nym is None:
            return
        body = tracing_keys.dump_published(self.dtk(d) for d in days).encode()
        self.send(self.sim.ha.address, Envelope("dtk_upload", "", "citizen", self.sim.ha.address,
                                                (nym.nym.data + body).hex(), nym.converter_sig.hex(),
                                                self.sim.clock.tick))

    def on_dtk_publish(self, sender, env):
        fresh = [k for k in tracing_keys.load_published(env.payload.decode()) if k not in self.published]
        if not fresh:
            return
        self.published.extend(fresh)
        self.matches = sorted(set(tracing_keys.match_contacts(self.published, self.contacts)))
        if self.matches:
            self.note("exposure_notified", n=len(self.matches))


# -- simulation ---------------------------------------------------------------------


class Simulation:
    def __init__(self, config: dict, seed: int, faults: Iterable[str] = ()):
        self.config = copy.deepcopy(config)
        self.seed = seed
        self.rng = random.Random(seed)
        self.group = get_group(config["backend"])
        if config.get("tag_scheme", TAG_SCHEME) != TAG_SCHEME:
            raise ValueError(f"unsupported tag scheme {config['tag_scheme']!r}")
        self.clock = SimClock(int(config["start_day"]))
        self.trace = ScenarioTrace()
        self.trace.add(event="config", seed=seed, faults=sorted(set(faults)),
                       config=json.dumps(self.config, sort_keys=True))
        self.transport = Transport(self.trace, self.clock, seed, faults)
        self.local_ids: Dict[str, List[bytes]] = {}
        self._request_counter = 0

        converter, _bundles = setup_system(
            [("tc", "testing_centre"), ("ha", "health_authority")], self.group.backend_id, self.rng
        )
        self.converter = ConverterParty(self, "converter", converter)
        self.tc = TestingCentre(self, DomainRecord.create(self.group, "tc", "testing_centre", self.rng))
        self.ha = HealthAuthority(
            self, DomainRecord.create(self.group, "ha", "health_authority", self.rng),
            bool(config.get("publish_unconfirmed", False)),
        )
        consent = config.get("consent", {})
        self.citizens: Dict[str, Citizen] = {}
        for name in config["citizens"]:
            address = f"dev-{self.rng.getrandbits(48):012x}"
            c_consent = consent.get(name, True) if isinstance(consent, dict) else bool(consent)
            self.citizens[name] = Citizen(self, address, self.rng, c_consent)

    # helpers

    def new_request_id(self) -> str:
        self._request_counter += 1
        return f"req-{self._request_counter:04d}-{self.rng.getrandbits(32):08x}"

    def citizen_addresses(self) -> List[str]:
        return [c.address for c in self.citizens.values()]

    def run(self) -> None:
        self.transport.run_until_quiet()

    # phases

    def phase_setup(self) -> None:
        self.trace.add(event="phase", name="setup", tick=self.clock.tick)
        for did, bundle in sorted(self.converter.converter.public_bundles().items()):
            self.converter.send(did, Envelope("common_info", "", "converter", did,
                                              bundle.to_json().encode().hex(), "", self.clock.tick))
        self.run()

    def phase_register(self) -> None:
        self.trace.add(event="phase", name="register", tick=self.clock.tick)
        for c in self.citizens.values():
            c.start_issuance(self.ha.address, "register")
        self.run()

    def phase_contacts(self) -> None:
        self.trace.add(event="phase", name="contacts", tick=self.clock.tick)
        slots = []
        for m in self.config.get("meetings", []):
            for interval in m["intervals"]:
                slots.append((int(m["day"]) * INTERVALS + int(interval), tuple(m["citizens"])))
        for tick, who in sorted(slots):
            self.clock.advance_to(tick)
            for a in who:
                for b in who:
                    if a != b:
                        self.citizens[a].beacon(self.citizens[b].address)
            self.run()

    def phase_report(self) -> None:
        self.clock.advance_to(max(self.clock.tick, int(self.config["report_day"]) * INTERVALS))
        self.trace.add(event="phase", name="report", tick=self.clock.tick)
        for name in self.testers():
            self.citizens[name].start_issuance(self.tc.address, "test")
        self.run()

    def phase_results(self) -> None:
        self.clock.advance_to(self.clock.tick + 1)
        self.trace.add(event="phase", name="results", tick=self.clock.tick)
        results = {}
        for name in self.testers():
            results[self.citizens[name].address] = self.result_for(name)
        self.tc.report_results(results)
        self.run()

    def testers(self) -> List[str]:
        infected = self.config.get("infected")
        if isinstance(infected, str):
            infected = [infected]
        return list(infected or [])

    def result_for(self, name: str) -> str:
        results = self.config.get("test_result", "positive")
        if isinstance(results, dict):
            return results.get(name, "positive")
        return results

    # adversary

    def phase_adversary(self) -> None:
        adv = self.config.get("adversary")
        if not adv:
            return
        self.clock.advance_to(self.clock.tick + 1)
        self.trace.add(event="phase", name="adversary", tick=self.clock.tick, mode=adv["mode"])
        mallory = self.citizens[adv["citizen"]]
        mode = adv["mode"]
        if mode == "forged_signature":
            g = self.group
            fake = Pseudonym(self.tc.address, g.exp_g(g.random_scalar(self.rng)),
                             g.exp_g(g.random_scalar(self.rng)).data)
            mallory.send_test_registration(fake)
            self.run()
            self.clock.advance_to(self.clock.tick + 1)
            self.tc.report_results({mallory.address: "positive"})
            self.run()
        elif mode == "replay":
            for env in list(self.tc.sent_requests):
                self.transport.send(mallory.address, "converter", env)
            self.run()
        elif mode != "self_report":
            raise ValueError(f"unknown adversary mode {mode!r}")
        # in every mode the adversary finally self-reports
        mallory.upload_keys()
        self.run()

    def execute(self) -> None:
        self.phase_setup()
        self.phase_register()
        self.phase_contacts()
        self.phase_report()
        self.phase_results()
        self.phase_adversary()
        self.record_ground_truth()

    def record_ground_truth(self) -> None:
        gt = {}
        for name, c in self.citizens.items():
            gt[name] = {
                "address": c.address,
                "tk_hex": c.tk.key.hex(),
                "z_hex": self.group.scalar_to_hex(c.z.z),
                "nyms": {d: n.nym.hex() for d, n in c.nyms.items()},
                "local_ids": {d: self.domain(d).record.local_id(n).hex() for d, n in c.nyms.items()},
            }
        self.trace.ground_truth = gt

    def domain(self, did: str) -> DomainParty:
        return {"tc": self.tc, "ha": self.ha}[did]


# -- verdicts ---------------------------------------------------------------------------


def _require(cond: bool, step: str, detail: str = "") -> None:
    if not cond:
        raise ScenarioAssertionFailed(step, detail)


def planted_intervals(config: dict, a: str, b: str) -> List[Tuple[int, int]]:
    out = set()
    for m in config.get("meetings", []):
        if a in m["citizens"] and b in m["citizens"]:
            for interval in m["intervals"]:
                out.add((int(config["start_day"]) + int(m["day"]), int(interval)))
    return sorted(out)


def check_no_pii(sim: Simulation) -> None:
    secrets_hex = []
    secrets_raw = []
    names = list(sim.citizens)
    for c in sim.citizens.values():
        z = sim.group.scalar_to_bytes(c.z.z)
        secrets_hex += [c.tk.key.hex(), z.hex()]
        secrets_raw += [c.tk.key, z]
    for env in sim.transport.wire_log:
        text = env.to_json()
        for h in secrets_hex:
            _require(h not in text, "no_pii", f"secret hex in {env.type}")
        for raw in (env.payload, env.sig):
            for s in secrets_raw + [n.encode() for n in names]:
                _require(s not in raw, "no_pii", f"secret bytes in {env.type}")
        for fld in (env.type, env.request_id, env.src, env.dst):
            for n in names:
                _require(n not in fld, "no_pii", f"citizen name in {env.type}")


def check_unlinkability(sim: Simulation, name: str) -> None:
    gt = sim.trace.ground_truth[name]["local_ids"]
    if "tc" not in gt or "ha" not in gt:
        return
    _require(gt["tc"] != gt["ha"], "unlinkability", "TC and HA local ids coincide")
    wire = "".join(env.to_json() for env in sim.transport.wire_log)
    for lid in gt.values():
        _require(lid not in wire, "unlinkability", "local id appeared on the wire")


def audit_records(sim: Simulation) -> Dict[str, List[dict]]:
    board = sim.converter.converter.board
    return {name: audit.scan(board, c.audit.audit_sk) for name, c in sim.citizens.items()}


def check_honest(sim: Simulation) -> None:
    cfg = sim.config
    board = sim.converter.converter.board
    scans = audit_records(sim)
    _require(board.verify(), "board_chain")
    for name in sim.testers():
        positive = sim.result_for(name) == "positive"
        convs = [r for r in scans[name] if (r["src"], r["dst"], r["outcome"]) == ("tc", "ha", "converted")]
        if positive:
            _require(len(convs) == 1, "audit_scan", f"{name}: {len(convs)} TC->HA records, expected 1")
            _require(sim.citizens[name].result == "positive", "test_result", name)
        else:
            _require(not scans[name], "audit_scan", f"{name}: records despite negative result")
    published_by = [
        n for n in sim.testers()
        if sim.result_for(n) == "positive" and sim.citizens[n].consent
    ]
    if not published_by:
        _require(sim.ha.publications == 0, "publication", "keys published without a positive test")
    for name, c in sim.citizens.items():
        expected = set()
        for src in published_by:
            if src != name:
                expected.update(planted_intervals(cfg, src, name))
        _require(set(c.matches) == expected, "contact_match",
                 f"{name}: matched {len(c.matches)}, planted {len(expected)}")
    total = sum(len(v) for v in scans.values())
    _require(total == len(board), "audit_completeness", f"{total} scanned vs {len(board)} on board")
    executed = sum(1 for r in sim.converter.converter.responses if r.ok)
    converted = sum(1 for v in scans.values() for r in v if r["outcome"] == "converted")
    _require(executed == converted, "audit_completeness", "converted count mismatch")
    check_no_pii(sim)
    for name in sim.testers():
        check_unlinkability(sim, name)


def check_adversarial(sim: Simulation) -> None:
    adv = sim.config["adversary"]
    _require(sim.ha.publications == 0, "authorization", f"{sim.ha.publications} DTK publications")
    board = sim.converter.converter.board
    outcomes = [r.outcome for r in sim.converter.converter.responses]
    if adv["mode"] == "replay":
        _require(len(board) == 1, "replay", f"board has {len(board)} entries")
        _require("replay" in outcomes, "replay", "replayed request was not rejected")
    if adv["mode"] == "forged_signature":
        _require("rejected_signature" in outcomes, "forged_signature", "forgery not rejected")
    _require(board.verify(), "board_chain")
    check_no_pii(sim)


def _run(config: dict, seed: int, faults: Iterable[str], checker) -> Tuple[Simulation, ScenarioTrace]:
    sim = Simulation(config, seed, faults)
    sim.execute()
    trace = sim.trace
    trace.stats = {
        "board_entries": len(sim.converter.converter.board),
        "publications": sim.ha.publications,
        "matches": {n: len(c.matches) for n, c in sim.citizens.items()},
        "messages": len(sim.transport.wire_log),
    }
    conv = sim.converter.converter
    trace.artifacts = {
        "board": conv.board.dumps(),
        "board_public_hex": ed25519_public_hex(conv.board_public_key),
        "audit_sk_hex": {n: sim.group.scalar_to_hex(c.audit.audit_sk) for n, c in sim.citizens.items()},
    }
    try:
        checker(sim)
    except ScenarioAssertionFailed as exc:
        trace.verdict = "FAIL"
        trace.failed_step = exc.step
        trace.add(event="verdict", verdict="FAIL", step=exc.step)
        exc.trace = trace
        raise
    trace.verdict = "PASS"
    trace.add(event="verdict", verdict="PASS")
    return sim, trace


def run_scenario(config: Optional[dict] = None, seed: int = 42, faults: Iterable[str] = ()) -> ScenarioTrace:
    """Run the honest flow; raise :class:`ScenarioAssertionFailed` on the first failed check."""
    config = default_config() if config is None else config
    return _run(config, seed, faults, check_honest)[1]


def simulate(config: Optional[dict] = None, seed: int = 42, faults: Iterable[str] = ()) -> Simulation:
    """Run without verdict checks and return the live simulation (for inspection)."""
    sim = Simulation(default_config() if config is None else config, seed, faults)
    sim.execute()
    return sim


def adversarial_config(mode: str, base: Optional[dict] = None) -> dict:
    if mode not in ADVERSARY_MODES:
        raise ValueError(f"mode must be one of {ADVERSARY_MODES}")
    cfg = copy.deepcopy(base or default_config())
    cfg["citizens"] = list(dict.fromkeys(cfg["citizens"] + ["mallory", "carol"]))
    cfg["meetings"] = list(cfg.get("meetings", [])) + [
        {"citizens": ["mallory", "alice"], "day": 0, "intervals": [5, 6]}
    ]
    cfg["adversary"] = {"mode": mode, "citizen": "mallory"}
    if mode == "replay":
        # carol tests positive but never consents to publishing
        cfg["infected"] = ["carol"]
        cfg["consent"] = {"carol": False}
    else:
        cfg["infected"] = []
    return cfg


def run_adversarial(config: dict, seed: int = 42, faults: Iterable[str] = ()) -> ScenarioTrace:
    """Verdict PASS iff the adversary caused no DTK publication."""
    if not config.get("adversary"):
        raise ValueError("config has no adversary section")
    return _run(config, seed, faults, check_adversarial)[1]


def replay(trace: ScenarioTrace, seed: Optional[int] = None) -> ScenarioTrace:
    """Re-run the configuration recorded in ``trace`` and demand identical events."""
    header = trace.events[0]
    if header.get("event") != "config":
        raise ValueError("trace has no config header")
    seed = header["seed"] if seed is None else seed
    config = json.loads(header["config"])
    sim = Simulation(config, seed, header.get("faults", ()))
    sim.execute()
    fresh = sim.trace
    fresh_lines = fresh.lines()
    old_lines = trace.lines()
    for i, (a, b) in enumerate(zip(old_lines, fresh_lines)):
        if a != b:
            raise NonDeterminismDetected(i, a, b)
    if len(old_lines) != len(fresh_lines):
        # a trailing verdict line is the only allowed difference
        extra = old_lines[len(fresh_lines):] if len(old_lines) > len(fresh_lines) else fresh_lines[len(old_lines):]
        if any(json.loads(line)["event"] != "verdict" for line in extra):
            i = min(len(old_lines), len(fresh_lines))
            raise NonDeterminismDetected(i, old_lines[i:i + 1], fresh_lines[i:i + 1])
    return fresh
