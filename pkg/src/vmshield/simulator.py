"""Deterministic tick-driven datacenter simulation.

One tick spans one detector sampling interval (10 s of simulated time
by default).  Each tick applies, in fixed order:

1. scenario events: VM requests placed through the scheduler (with an
   optional wake-and-retry on rejection), shutdowns, revocations, and
   attack toggles;
2. usage sampling: every running VM's observed usage is its class
   demand vector with uniform per-component jitter of +/-10%, and
   server usage is recomputed as overhead plus the hosted sum;
3. traffic and detection: per-VM SYN/FIN counts are drawn, the
   detector statistic advances, and the response policy is applied to
   fresh alarms;
4. one migration pass off the hottest overloaded server, if any plan
   qualifies;
5. a consolidation pass draining under-watermark servers to sleep;
6. log emission.

Everything random comes from generators seeded by (scenario seed,
stream index), and every iteration runs in sorted order, so a scenario
and seed map to byte-identical reports.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import detector as det
from . import scheduler as sched
from .ahp import HotspotProfile, derive_weights
from .errors import ParseError, ValidationError
from .resources import ZERO, ResourceVector, rv_add, weighted_score
from .scheduler import ServerState, VmRecord, normalize_class
from .traffic import DEFAULT_FIN_DELAY_RANGE

EVENT_OPS = ("vm_request", "vm_shutdown", "vm_revoke", "attack_start", "attack_stop")

RUNNING = "running"
STOPPED = "stopped"
SUSPENDED = "suspended"
REVOKED = "revoked"

REPORT_FILES = (
    "utilization.csv",
    "placements.json",
    "migrations.json",
    "detector.csv",
    "alarms.json",
    "summary.json",
)


@dataclass(frozen=True)
class DetectorConfig:
    drift: float = det.DEFAULT_DRIFT
    threshold: float = det.DEFAULT_THRESHOLD
    interval_seconds: float = det.DEFAULT_INTERVAL_SECONDS
    policy: str = "log"
    throttle_factor: float = det.DEFAULT_THROTTLE_FACTOR

    @classmethod
    def from_json(cls, obj: dict) -> "DetectorConfig":
        try:
            fields = dict(obj)
            for key in ("drift", "threshold", "interval_seconds", "throttle_factor"):
                if key in fields:
                    fields[key] = float(fields[key])
            cfg = cls(**fields)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad detector config: {exc}") from exc
        if cfg.policy not in det.POLICIES:
            raise ValidationError(
                f"detector policy must be one of {det.POLICIES}, got {cfg.policy!r}"
            )
        if cfg.threshold <= cfg.drift:
            raise ValidationError(
                f"detector threshold {cfg.threshold} must exceed drift {cfg.drift}"
            )
        if cfg.interval_seconds <= 0:
            raise ValidationError("detector interval_seconds must be > 0")
        if not 0 <= cfg.throttle_factor <= 1:
            raise ValidationError("throttle_factor must lie in [0, 1]")
        return cfg


@dataclass(frozen=True)
class ScenarioEvent:
    tick: int
    op: str
    vm_class: str | None = None
    count: int = 1
    vm: str | None = None
    multiplier: float = 1.0


@dataclass
class Scenario:
    """A validated simulation input: initial cluster, classes, events, knobs."""

    servers: list[ServerState]
    vm_classes: dict[str, ResourceVector]
    events: list[ScenarioEvent]
    detector: DetectorConfig = DetectorConfig()
    low_watermark: ResourceVector | None = None
    base_rate: int = 100
    fin_delay_range: tuple[float, float] = DEFAULT_FIN_DELAY_RANGE
    duration: int = 0
    seed: int = 0
    wake_on_reject: bool = True

    @classmethod
    def from_json(cls, obj: dict) -> "Scenario":
        if not isinstance(obj, dict):
            raise ParseError("scenario must be a JSON object")
        known = {
            "servers", "vm_classes", "events", "detector", "low_watermark",
            "base_rate", "fin_delay_range", "duration", "seed", "wake_on_reject",
        }
        unknown = set(obj) - known
        if unknown:
            raise ParseError(f"unknown scenario fields: {sorted(unknown)}")
        try:
            duration = int(obj.get("duration", 0))
            seed = int(obj.get("seed", 0))
            base_rate = int(obj.get("base_rate", 100))
            wake = bool(obj.get("wake_on_reject", True))
            raw_servers = obj["servers"]
        except KeyError as exc:
            raise ParseError(f"scenario missing required field {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad scenario field: {exc}") from exc

        servers = []
        for i, s in enumerate(raw_servers):
            try:
                sid = str(s["id"])
                threshold = ResourceVector.from_json(s.get("threshold", {"cpu": 80, "mem": 80, "bw": 80}))
                usage = ResourceVector.from_json(s.get("usage", {"cpu": 0, "mem": 0, "bw": 0}))
                power = s.get("power", sched.ACTIVE)
            except (KeyError, TypeError) as exc:
                raise ParseError(f"servers[{i}]: {exc}") from exc
            if power not in (sched.ACTIVE, sched.ASLEEP):
                raise ParseError(f"servers[{i}]: power must be active or asleep")
            servers.append(ServerState(sid, usage=usage, threshold=threshold, power=power))

        vm_classes = {}
        for name, vec in obj.get("vm_classes", {}).items():
            try:
                canon = normalize_class(name)
            except ValueError as exc:
                raise ParseError(str(exc)) from exc
            vm_classes[canon] = ResourceVector.from_json(vec)

        events = []
        for i, e in enumerate(obj.get("events", [])):
            try:
                tick = int(e["tick"])
                op = e["op"]
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"events[{i}]: needs integer tick and op: {exc}") from exc
            if op not in EVENT_OPS:
                raise ParseError(f"events[{i}]: op must be one of {EVENT_OPS}, got {op!r}")
            kwargs = {"tick": tick, "op": op}
            try:
                if op == "vm_request":
                    kwargs["vm_class"] = normalize_class(e["class"])
                    kwargs["count"] = int(e.get("count", 1))
                else:
                    kwargs["vm"] = str(e["vm"])
                if op == "attack_start":
                    kwargs["multiplier"] = float(e["multiplier"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"events[{i}]: {exc}") from exc
            events.append(ScenarioEvent(**kwargs))

        detector_cfg = DetectorConfig.from_json(obj.get("detector", {}))
        low = obj.get("low_watermark")
        low_watermark = None if low is None else ResourceVector.from_json(low)
        fin_range = obj.get("fin_delay_range", list(DEFAULT_FIN_DELAY_RANGE))
        try:
            fin_low, fin_high = (float(fin_range[0]), float(fin_range[1]))
        except (TypeError, ValueError, IndexError) as exc:
            raise ParseError(f"bad fin_delay_range: {fin_range!r}") from exc

        scenario = cls(
            servers=servers,
            vm_classes=vm_classes,
            events=events,
            detector=detector_cfg,
            low_watermark=low_watermark,
            base_rate=base_rate,
            fin_delay_range=(fin_low, fin_high),
            duration=duration,
            seed=seed,
            wake_on_reject=wake,
        )
        scenario.validate()
        return scenario

    def validate(self) -> None:
        if self.duration < 0:
            raise ValidationError("duration must be >= 0")
        if self.seed < 0:
            raise ValidationError("seed must be >= 0")
        if self.base_rate < 0:
            raise ValidationError("base_rate must be >= 0")
        if not 0 < self.fin_delay_range[0] <= self.fin_delay_range[1]:
            raise ValidationError(
                f"fin_delay_range must satisfy 0 < low <= high: {self.fin_delay_range}"
            )
        if not self.servers:
            raise ValidationError("scenario needs at least one server")
        seen = set()
        for s in self.servers:
            if not s.id:
                raise ValidationError("server id must be non-empty")
            if s.id in seen:
                raise ValidationError(f"duplicate server id {s.id!r}")
            seen.add(s.id)
            if min(s.threshold.as_tuple()) <= 0:
                raise ValidationError(f"server {s.id}: threshold components must be > 0")
        for ev in self.events:
            if not 0 <= ev.tick < self.duration:
                raise ValidationError(
                    f"event tick {ev.tick} outside [0, {self.duration})"
                )
            if ev.op == "vm_request":
                if ev.vm_class not in self.vm_classes:
                    raise ValidationError(
                        f"vm_request class {ev.vm_class!r} has no entry in vm_classes"
                    )
                if ev.count < 1:
                    raise ValidationError("vm_request count must be >= 1")
            if ev.op == "attack_start" and ev.multiplier < 1.0:
                raise ValidationError("attack multiplier must be >= 1")
        # Walk events in execution order so every reference names a VM id
        # that has been requested by then and not yet revoked.
        created = 0
        known: set[str] = set()
        revoked: set[str] = set()
        for ev in sorted(self.events, key=lambda e: e.tick):
            if ev.op == "vm_request":
                for _ in range(ev.count):
                    created += 1
                    known.add(_vm_name(created))
                continue
            if ev.vm not in known:
                raise ValidationError(
                    f"event at tick {ev.tick} references unknown vm {ev.vm!r}"
                )
            if ev.vm in revoked:
                raise ValidationError(
                    f"event at tick {ev.tick} references revoked vm {ev.vm!r}"
                )
            if ev.op == "vm_revoke":
                revoked.add(ev.vm)


def _vm_name(index: int) -> str:
    return f"vm-{index:03d}"


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read scenario {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return Scenario.from_json(obj)


@dataclass
class SimVm:
    """Runtime state of one VM: scheduler record plus traffic and detector state."""

    record: VmRecord
    creation_index: int
    cusum: det.CusumState
    rng: np.random.Generator
    state: str = RUNNING
    traffic_scale: float = 1.0
    attached: bool = True
    attack_multiplier: float = 1.0
    exceeding: bool = False
    pending_finrst: dict[int, int] = field(default_factory=dict)

    @property
    def id(self) -> str:
        return self.record.id


@dataclass
class SimReport:
    """Every decision and metric of one run, in emission order."""

    utilization: list[tuple] = field(default_factory=list)
    placements: list[dict] = field(default_factory=list)
    migrations: list[dict] = field(default_factory=list)
    power_events: list[dict] = field(default_factory=list)
    stat_rows: list[det.StatRow] = field(default_factory=list)
    alarms: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    # in-memory only: per-tick (tick, vm, observed, host) samples for invariant checks
    vm_samples: list[tuple] = field(default_factory=list)


class _Sim:
    def __init__(self, scenario: Scenario):
        self.sc = scenario
        self.servers: dict[str, ServerState] = {
            s.id: ServerState(
                s.id,
                usage=s.usage if s.power == sched.ACTIVE else ZERO,
                threshold=s.threshold,
                power=s.power,
            )
            for s in scenario.servers
        }
        self.overhead = {s.id: s.usage for s in scenario.servers}
        self.records: dict[str, VmRecord] = {}
        self.vms: dict[str, SimVm] = {}
        self.jitter_rng = np.random.default_rng([scenario.seed, 0])
        self.events_at: dict[int, list[ScenarioEvent]] = {}
        for ev in scenario.events:
            self.events_at.setdefault(ev.tick, []).append(ev)
        self.next_vm = 0
        self.seq = 0
        self.report = SimReport()
        self.counters = {
            "placements": 0,
            "rejections": 0,
            "migrations_overload": 0,
            "migrations_consolidate": 0,
            "alarms": 0,
            "sleeps": 0,
            "wakes": 0,
            "shutdowns": 0,
            "revocations": 0,
            "suspensions": 0,
            "ignored_events": 0,
        }
        iv_us = round(scenario.detector.interval_seconds * 1_000_000)
        self.iv_us = iv_us
        self.fin_lo_us = round(scenario.fin_delay_range[0] * 1_000_000)
        self.fin_hi_us = round(scenario.fin_delay_range[1] * 1_000_000)

    def _next_seq(self) -> int:
        self.seq += 1
        return self.seq

    def _server_list(self) -> list[ServerState]:
        return [self.servers[sid] for sid in sorted(self.servers)]

    def _recompute_usage(self, sid: str) -> None:
        server = self.servers[sid]
        if not server.active:
            server.usage = ZERO
            return
        total = self.overhead[sid]
        for vid in sorted(server.vms):
            total = rv_add(total, self.records[vid].observed)
        server.usage = total

    def _detach(self, vm: SimVm) -> None:
        host = vm.record.host
        if host is not None:
            self.servers[host].vms.discard(vm.id)
            vm.record.host = None
            self._recompute_usage(host)
        vm.pending_finrst.clear()

    def _wake(self, tick: int) -> str | None:
        woken = sched.wake_server(self._server_list())
        if woken is not None:
            self.servers[woken].usage = self.overhead[woken]
            self.counters["wakes"] += 1
            self.report.power_events.append(
                {"tick": tick, "seq": self._next_seq(), "server": woken, "event": "wake"}
            )
        return woken

    # phase 1 -----------------------------------------------------------

    def _apply_events(self, tick: int) -> None:
        for ev in self.events_at.get(tick, ()):
            if ev.op == "vm_request":
                for _ in range(ev.count):
                    self._request_vm(tick, ev.vm_class)
            elif ev.op == "vm_shutdown":
                self._lifecycle(tick, ev.vm, STOPPED)
            elif ev.op == "vm_revoke":
                self._lifecycle(tick, ev.vm, REVOKED)
            elif ev.op == "attack_start":
                self._set_attack(ev.vm, ev.multiplier)
            elif ev.op == "attack_stop":
                self._set_attack(ev.vm, 1.0)

    def _request_vm(self, tick: int, vm_class: str) -> None:
        self.next_vm += 1
        vm_id = _vm_name(self.next_vm)
        demand = sched.estimate_demand_first_start(vm_class, self.records, self.sc.vm_classes)
        weights = derive_weights(HotspotProfile(demand))
        decision = sched.place(demand, weights, self._server_list())
        woken = None
        if decision.rejected and self.sc.wake_on_reject:
            woken = self._wake(tick)
            if woken is not None:
                decision = sched.place(demand, weights, self._server_list())
        entry = {
            "tick": tick,
            "seq": self._next_seq(),
            "vm": vm_id,
            "class": vm_class,
            "demand": _round_rv(demand),
            "weights": _round_map(weights.to_json()),
            "scores": {sid: round(v, 6) for sid, v in sorted(decision.scores.items())},
            "chosen": decision.chosen,
            "reason": decision.reason,
            "woke": woken,
        }
        self.report.placements.append(entry)
        if decision.rejected:
            self.counters["rejections"] += 1
            return
        host = self.servers[decision.chosen]
        host.vms.add(vm_id)
        host.usage = rv_add(host.usage, demand)
        record = VmRecord(vm_id, vm_class, observed=demand, host=decision.chosen)
        self.records[vm_id] = record
        self.vms[vm_id] = SimVm(
            record=record,
            creation_index=self.next_vm,
            cusum=det.CusumState(
                vm_id, drift=self.sc.detector.drift, threshold=self.sc.detector.threshold
            ),
            rng=np.random.default_rng([self.sc.seed, self.next_vm]),
        )
        self.counters["placements"] += 1

    def _lifecycle(self, tick: int, vm_id: str, new_state: str) -> None:
        vm = self.vms.get(vm_id)
        if vm is None or vm.state == REVOKED:
            self.counters["ignored_events"] += 1
            return
        self._detach(vm)
        vm.state = new_state
        if new_state == REVOKED:
            self.records.pop(vm_id, None)
            self.counters["revocations"] += 1
        else:
            self.counters["shutdowns"] += 1

    def _set_attack(self, vm_id: str, multiplier: float) -> None:
        vm = self.vms.get(vm_id)
        if vm is None or vm.state == REVOKED:
            self.counters["ignored_events"] += 1
            return
        vm.attack_multiplier = multiplier

    # phase 2 -----------------------------------------------------------

    def _sample_usage(self) -> None:
        for vm_id in sorted(self.vms):
            vm = self.vms[vm_id]
            if vm.state != RUNNING:
                continue
            base = self.sc.vm_classes[vm.record.hotspot_class]
            j0, j1, j2 = self.jitter_rng.uniform(-0.1, 0.1, 3).tolist()
            observed = ResourceVector(
                base.cpu * (1.0 + j0), base.mem * (1.0 + j1), base.bw * (1.0 + j2)
            )
            vm.record.observed = observed
            vm.record.history.append(observed)
        for sid in sorted(self.servers):
            self._recompute_usage(sid)

    # phase 3 -----------------------------------------------------------

    def _traffic_and_detect(self, tick: int) -> None:
        policy = self.sc.detector.policy
        for vm_id in sorted(self.vms):
            vm = self.vms[vm_id]
            if vm.state not in (RUNNING, SUSPENDED):
                continue
            finrst = vm.pending_finrst.pop(tick, 0)
            syn = 0
            if vm.state == RUNNING and vm.attached:
                n_pair = round(self.sc.base_rate * vm.traffic_scale)
                n_extra = round(self.sc.base_rate * (vm.attack_multiplier - 1.0) * vm.traffic_scale)
                offsets = vm.rng.integers(0, self.iv_us, n_pair)
                delays = vm.rng.integers(self.fin_lo_us, self.fin_hi_us, n_pair, endpoint=True)
                syn = n_pair + n_extra
                ahead, counts = np.unique((offsets + delays) // self.iv_us, return_counts=True)
                for k, c in zip(ahead.tolist(), counts.tolist()):
                    if k == 0:
                        finrst += c
                    else:
                        slot = tick + k
                        vm.pending_finrst[slot] = vm.pending_finrst.get(slot, 0) + c
            iv = det.TrafficInterval(tick, vm_id, syn, finrst)
            vm.cusum, alarm = det.cusum_step(vm.cusum, iv)
            episode_start = alarm is not None and not vm.exceeding
            vm.exceeding = alarm is not None
            self.report.stat_rows.append(
                det.StatRow(
                    tick, vm_id, syn, finrst,
                    det.discrepancy(syn, finrst), vm.cusum.y, episode_start,
                )
            )
            if episode_start:
                self.counters["alarms"] += 1
                action = det.respond(
                    alarm, policy, self.vms, throttle_factor=self.sc.detector.throttle_factor
                )
                if policy == "suspend":
                    self._detach(vm)
                    vm.state = SUSPENDED
                    self.counters["suspensions"] += 1
                self.report.alarms.append(
                    {
                        "tick": tick,
                        "seq": self._next_seq(),
                        "vm": vm_id,
                        "y": round(alarm.y_value, 6),
                        "action": action.action,
                        "detail": action.detail,
                    }
                )

    # phase 4 -----------------------------------------------------------

    def _migrate(self, tick: int) -> None:
        plan = sched.plan_migration(self._server_list(), self.records)
        if plan is None:
            return
        self._move_vm(plan.victim, plan.source, plan.target)
        self.counters["migrations_overload"] += 1
        self.report.migrations.append(_migration_entry(tick, self._next_seq(), plan))

    def _move_vm(self, vm_id: str, source: str, target: str) -> None:
        self.servers[source].vms.discard(vm_id)
        self.servers[target].vms.add(vm_id)
        self.records[vm_id].host = target
        self._recompute_usage(source)
        self._recompute_usage(target)

    # phase 5 -----------------------------------------------------------

    def _consolidate(self, tick: int) -> None:
        if self.sc.low_watermark is None:
            return
        plans, sleeps = sched.consolidate(
            self._server_list(), self.records, self.sc.low_watermark, self.sc.vm_classes
        )
        for plan in plans:
            self._move_vm(plan.victim, plan.source, plan.target)
            self.counters["migrations_consolidate"] += 1
            self.report.migrations.append(_migration_entry(tick, self._next_seq(), plan))
        for sid in sleeps:
            server = self.servers[sid]
            if server.vms:
                raise AssertionError(f"cannot sleep {sid}: still hosts {sorted(server.vms)}")
            server.power = sched.ASLEEP
            server.usage = ZERO
            self.counters["sleeps"] += 1
            self.report.power_events.append(
                {"tick": tick, "seq": self._next_seq(), "server": sid, "event": "sleep"}
            )

    # phase 6 -----------------------------------------------------------

    def _emit_logs(self, completed_ticks: int, sample_tick: int | None) -> None:
        for sid in sorted(self.servers):
            s = self.servers[sid]
            self.report.utilization.append(
                (completed_ticks, sid, s.usage.cpu, s.usage.mem, s.usage.bw, s.power, len(s.vms))
            )
        if sample_tick is not None:
            for vm_id in sorted(self.vms):
                vm = self.vms[vm_id]
                if vm.state in (RUNNING, SUSPENDED, STOPPED):
                    self.report.vm_samples.append(
                        (sample_tick, vm_id, vm.record.observed, vm.record.host)
                    )

    # driver ------------------------------------------------------------

    def step(self, tick: int) -> None:
        self._apply_events(tick)
        self._sample_usage()
        self._traffic_and_detect(tick)
        self._migrate(tick)
        self._consolidate(tick)
        self._emit_logs(tick + 1, tick)

    def run(self) -> SimReport:
        self._emit_logs(0, None)
        for tick in range(self.sc.duration):
            self.step(tick)
        self.report.summary = self._summary()
        return self.report

    def _summary(self) -> dict:
        states = {}
        for vm_id in sorted(self.vms):
            vm = self.vms[vm_id]
            states[vm_id] = {
                "class": vm.record.hotspot_class,
                "state": vm.state,
                "host": vm.record.host,
            }
        servers = {}
        for sid in sorted(self.servers):
            s = self.servers[sid]
            servers[sid] = {
                "power": s.power,
                "vms": len(s.vms),
                "usage": _round_rv(s.usage),
                "score_uniform": round(weighted_score(sched.UNIFORM_WEIGHTS, s.usage), 6),
            }
        return {
            "duration": self.sc.duration,
            "seed": self.sc.seed,
            "base_rate": self.sc.base_rate,
            "detector": {
                "drift": self.sc.detector.drift,
                "threshold": self.sc.detector.threshold,
                "interval_seconds": self.sc.detector.interval_seconds,
                "policy": self.sc.detector.policy,
                "throttle_factor": self.sc.detector.throttle_factor,
            },
            "counters": dict(sorted(self.counters.items())),
            "power_events": self.report.power_events,
            "final": {"servers": servers, "vms": states},
        }


def _round_rv(v: ResourceVector) -> dict:
    return {"cpu": round(v.cpu, 6), "mem": round(v.mem, 6), "bw": round(v.bw, 6)}


def _round_map(obj: dict) -> dict:
    return {k: round(v, 9) for k, v in obj.items()}


def _migration_entry(tick: int, seq: int, plan: sched.MigrationPlan) -> dict:
    return {
        "tick": tick,
        "seq": seq,
        "kind": plan.kind,
        "vm": plan.victim,
        "from": plan.source,
        "to": plan.target,
        "source_post_score": round(plan.source_post_score, 6),
        "target_score": round(plan.target_score, 6),
    }


def run(scenario: Scenario) -> SimReport:
    """Fold the tick step over [0, duration); pure in (scenario, seed)."""
    return _Sim(scenario).run()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit_reports(report: SimReport, outdir: str) -> list[str]:
    """Write the six report files; returns their paths.

    CSV files are comma-separated with a header row and LF endings;
    floats use 6 decimal places.  Identical reports produce identical
    bytes, so reruns into the same directory are no-ops content-wise.
    """
    os.makedirs(outdir, exist_ok=True)
    util_lines = ["tick,server,cpu,mem,bw,power,vms"]
    for tick, sid, cpu, mem, bw, power, nvms in report.utilization:
        util_lines.append(f"{tick},{sid},{cpu:.6f},{mem:.6f},{bw:.6f},{power},{nvms}")
    files = {
        "utilization.csv": "\n".join(util_lines) + "\n",
        "placements.json": _json_text(report.placements),
        "migrations.json": _json_text(report.migrations),
        "detector.csv": det.stat_rows_to_csv(report.stat_rows),
        "alarms.json": _json_text(report.alarms),
        "summary.json": _json_text(report.summary),
    }
    paths = []
    for name, text in files.items():
        path = os.path.join(outdir, name)
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"writing report {path}: {exc}") from exc
        paths.append(path)
    return paths
