"""Per-VM SYN-flood detection from connection-symmetry statistics.

Healthy TCP traffic pairs every connection request (SYN) with a later
termination (FIN or RST), so over a sampling interval the two counts
roughly cancel.  The detector folds the normalized difference

    d_n = (S_n - F_n) / max(S_n + F_n, 1)

into the clamped cumulative statistic

    y_n = max(0, y_{n-1} + d_n - drift)

and raises an alarm for a VM while y exceeds the threshold.  Each VM is
tracked independently, which is what lets the hypervisor name the
attacking guest rather than just noticing that the host is under load.

Defaults: drift 0.08, threshold 1.43, 10 s sampling interval.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

from .errors import UnknownVm, UnsortedTrace

DEFAULT_DRIFT = 0.08
DEFAULT_THRESHOLD = 1.43
DEFAULT_INTERVAL_SECONDS = 10.0
DEFAULT_THROTTLE_FACTOR = 0.1

POLICIES = ("log", "throttle", "suspend")

# pkt_type values accepted in raw event traces.  SYN counts toward S,
# FIN and RST toward F; a server's SYN+ACK reply is neither a new
# connection attempt nor a termination, so it is ignored, as are plain
# ACK and anything else.
PKT_TYPES = ("SYN", "SYNACK", "FIN", "RST", "ACK", "OTHER")
_SYN = frozenset({"SYN"})
_FINRST = frozenset({"FIN", "RST"})


@dataclass(frozen=True)
class TrafficInterval:
    """Per-VM SYN and FIN|RST counts for one sampling interval."""

    interval_index: int
    vm_id: str
    syn: int
    finrst: int


@dataclass(frozen=True)
class CusumState:
    """Detector state for one VM: running statistic y plus its parameters."""

    vm_id: str
    y: float = 0.0
    drift: float = DEFAULT_DRIFT
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.threshold <= self.drift:
            raise ValueError(
                f"threshold {self.threshold} must exceed drift {self.drift}"
            )


@dataclass
class Alarm:
    """A threshold exceedance for one VM at one interval."""

    vm_id: str
    interval_index: int
    y_value: float
    action_taken: str | None = None


@dataclass(frozen=True)
class ActionRecord:
    """What respond() actually did about an alarm."""

    vm_id: str
    interval_index: int
    action: str
    detail: str = ""


@dataclass(frozen=True)
class StatRow:
    """One line of the per-interval statistic log."""

    interval_index: int
    vm_id: str
    syn: int
    finrst: int
    d: float
    y: float
    alarm: bool


@dataclass
class DetectionReport:
    """Alarms (one per contiguous exceedance episode) plus the full y series."""

    alarms: list[Alarm] = field(default_factory=list)
    series: dict[str, list[float]] = field(default_factory=dict)
    rows: list[StatRow] = field(default_factory=list)


def discrepancy(syn: int, finrst: int) -> float:
    """Normalized SYN vs FIN|RST imbalance, in [-1, 1]; 0 for paired traffic."""
    return (syn - finrst) / max(syn + finrst, 1)


def cusum_step(state: CusumState, iv: TrafficInterval) -> tuple[CusumState, Alarm | None]:
    """Advance one interval; an Alarm comes back whenever the new y exceeds h.

    The statistic is never reset, so a sustained attack keeps exceeding;
    collapsing that into one reported episode is process_trace's job.
    """
    if iv.vm_id != state.vm_id:
        raise ValueError(f"interval for {iv.vm_id!r} fed to detector for {state.vm_id!r}")
    y_next = max(0.0, state.y + discrepancy(iv.syn, iv.finrst) - state.drift)
    next_state = replace(state, y=y_next)
    if y_next > state.threshold:
        return next_state, Alarm(state.vm_id, iv.interval_index, y_next)
    return next_state, None


def process_trace(
    intervals: list[TrafficInterval],
    drift: float = DEFAULT_DRIFT,
    threshold: float = DEFAULT_THRESHOLD,
) -> DetectionReport:
    """Run the detector over every VM's intervals independently.

    Contiguous exceedances collapse to a single alarm at the first
    crossing, so one long attack is one incident.  Rows and series are
    ordered by (vm_id, interval_index).
    """
    per_vm: dict[str, list[TrafficInterval]] = {}
    for iv in intervals:
        per_vm.setdefault(iv.vm_id, []).append(iv)

    report = DetectionReport()
    for vm_id in sorted(per_vm):
        state = CusumState(vm_id, drift=drift, threshold=threshold)
        series: list[float] = []
        exceeding = False
        for iv in sorted(per_vm[vm_id], key=lambda i: i.interval_index):
            state, alarm = cusum_step(state, iv)
            episode_start = alarm is not None and not exceeding
            if episode_start:
                report.alarms.append(alarm)
            exceeding = alarm is not None
            series.append(state.y)
            report.rows.append(
                StatRow(
                    iv.interval_index,
                    vm_id,
                    iv.syn,
                    iv.finrst,
                    discrepancy(iv.syn, iv.finrst),
                    state.y,
                    episode_start,
                )
            )
        report.series[vm_id] = series
    return report


def bin_events(
    events,
    interval_seconds: float = DEFAULT_INTERVAL_SECONDS,
    span_seconds: float | None = None,
    vm_ids=None,
) -> list[TrafficInterval]:
    """Bucket raw packet events into per-(vm, interval) counts.

    Every interval in the observed span is emitted for every VM, zeros
    included, so the detector's statistic advances each interval even
    when a VM goes quiet.  The span defaults to covering the last
    event; passing span_seconds pins the interval count (events at or
    beyond it are dropped).  vm_ids forces rows for VMs absent from the
    trace.

    Events are (timestamp_us, vm_id, pkt_type) triples ordered by
    timestamp; a backwards jump raises UnsortedTrace.
    """
    if interval_seconds <= 0:
        raise ValueError("interval_seconds must be > 0")
    interval_us = round(interval_seconds * 1_000_000)

    counts: dict[tuple[str, int], list[int]] = {}
    vms = set(vm_ids) if vm_ids else set()
    last_t = None
    max_index = -1
    limit_index = None
    if span_seconds is not None:
        limit_index = max(0, -(-round(span_seconds * 1_000_000) // interval_us))
        max_index = limit_index - 1

    for t_us, vm_id, pkt_type in events:
        if last_t is not None and t_us < last_t:
            raise UnsortedTrace(f"timestamp {t_us} after {last_t}")
        last_t = t_us
        idx = t_us // interval_us
        vms.add(vm_id)
        if limit_index is not None and idx >= limit_index:
            continue
        max_index = max(max_index, idx)
        if pkt_type in _SYN:
            counts.setdefault((vm_id, idx), [0, 0])[0] += 1
        elif pkt_type in _FINRST:
            counts.setdefault((vm_id, idx), [0, 0])[1] += 1

    out = []
    for vm_id in sorted(vms):
        for idx in range(max_index + 1):
            s, f = counts.get((vm_id, idx), (0, 0))
            out.append(TrafficInterval(idx, vm_id, s, f))
    return out


def respond(
    alarm: Alarm,
    policy: str,
    vms,
    throttle_factor: float = DEFAULT_THROTTLE_FACTOR,
) -> ActionRecord:
    """Apply the configured response to the VM an alarm names.

    log records only; throttle scales the VM's future generated
    traffic; suspend detaches it from the network entirely so later
    intervals carry zero counts.  vms maps vm_id to an object with
    mutable ``traffic_scale`` and ``attached`` attributes.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}, got {policy!r}")
    if alarm.vm_id not in vms:
        raise UnknownVm(f"alarm names VM {alarm.vm_id!r} not present in the cluster")
    alarm.action_taken = policy
    if policy == "throttle":
        vms[alarm.vm_id].traffic_scale = throttle_factor
        detail = f"traffic scaled to {throttle_factor}"
    elif policy == "suspend":
        vms[alarm.vm_id].attached = False
        detail = "detached from network"
    else:
        detail = "recorded"
    return ActionRecord(alarm.vm_id, alarm.interval_index, policy, detail)


def stat_rows_to_csv(rows: list[StatRow]) -> str:
    """Render the statistic log: interval,vm_id,syn,finrst,d,y,alarm."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["interval", "vm_id", "syn", "finrst", "d", "y", "alarm"])
    for r in rows:
        writer.writerow(
            [r.interval_index, r.vm_id, r.syn, r.finrst, f"{r.d:.6f}", f"{r.y:.6f}", int(r.alarm)]
        )
    return buf.getvalue()
