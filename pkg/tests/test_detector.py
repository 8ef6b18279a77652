from __future__ import annotations

import numpy as np
import pytest

from conftest import cusum_oracle
from vmshield.detector import (
    DEFAULT_DRIFT,
    DEFAULT_THRESHOLD,
    Alarm,
    CusumState,
    TrafficInterval,
    bin_events,
    cusum_step,
    discrepancy,
    process_trace,
    respond,
    stat_rows_to_csv,
)
from vmshield.errors import UnknownVm, UnsortedTrace


class FakeVm:
    def __init__(self):
        self.traffic_scale = 1.0
        self.attached = True


def test_discrepancy_basics():
    assert discrepancy(100, 100) == 0.0
    assert discrepancy(0, 0) == 0.0  # idle interval, not a division by zero
    assert discrepancy(106242, 3) == pytest.approx((106242 - 3) / 106245, abs=1e-12)
    assert discrepancy(0, 50) == -1.0
    assert discrepancy(50, 0) == 1.0


def test_discrepancy_bounded_seeded():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        s = int(rng.integers(0, 10_000))
        f = int(rng.integers(0, 10_000))
        d = discrepancy(s, f)
        assert -1.0 <= d <= 1.0


def test_cusum_step_matches_recurrence_oracle():
    rng = np.random.default_rng(88)
    for _ in range(50):
        pairs = [
            (int(rng.integers(0, 500)), int(rng.integers(0, 500))) for _ in range(40)
        ]
        drift = float(rng.uniform(0.01, 0.3))
        threshold = drift + float(rng.uniform(0.1, 2.0))
        expected_y, expected_flags = cusum_oracle(pairs, drift, threshold)
        state = CusumState("vm", drift=drift, threshold=threshold)
        for i, (syn, finrst) in enumerate(pairs):
            state, alarm = cusum_step(state, TrafficInterval(i, "vm", syn, finrst))
            assert state.y == pytest.approx(expected_y[i], abs=1e-12)
            assert (alarm is not None) == expected_flags[i]


def test_cusum_never_negative_and_never_resets():
    state = CusumState("vm", drift=0.08, threshold=1.43)
    state, _ = cusum_step(state, TrafficInterval(0, "vm", 0, 1000))
    assert state.y == 0.0  # clamped at zero on all-FIN traffic
    # a sustained flood keeps the statistic above threshold
    for i in range(1, 40):
        state, alarm = cusum_step(state, TrafficInterval(i, "vm", 1000, 0))
        if state.y > 1.43:
            assert alarm is not None


def test_cusum_step_rejects_foreign_vm():
    state = CusumState("vm-a")
    with pytest.raises(ValueError):
        cusum_step(state, TrafficInterval(0, "vm-b", 1, 1))


def test_cusum_state_requires_threshold_above_drift():
    with pytest.raises(ValueError):
        CusumState("vm", drift=0.5, threshold=0.5)


def test_published_two_interval_trace():
    trace = [
        TrafficInterval(0, "vm1", 106242, 3),
        TrafficInterval(1, "vm1", 107762, 3),
    ]
    report = process_trace(trace, drift=0.08, threshold=1.43)
    assert report.series["vm1"][0] == pytest.approx(0.9199, abs=1e-4)
    assert report.series["vm1"][1] == pytest.approx(1.8399, abs=1e-4)
    assert [(a.vm_id, a.interval_index) for a in report.alarms] == [("vm1", 1)]


def test_episode_collapsing_one_alarm_per_exceedance_run():
    # pump y above threshold, hold it, let it decay below, pump again
    up = [(1000, 0)] * 3        # +0.92 per interval
    hold = [(100, 100)] * 2     # -0.08 per interval, stays above
    down = [(0, 0)] * 40        # decays to 0
    again = [(1000, 0)] * 3
    pairs = up + hold + down + again
    trace = [TrafficInterval(i, "vm", s, f) for i, (s, f) in enumerate(pairs)]
    report = process_trace(trace)
    assert len(report.alarms) == 2
    assert report.alarms[0].interval_index == 1  # 0.92 then 1.84 crosses
    assert report.alarms[1].interval_index == len(up + hold + down) + 1
    flagged = [r.interval_index for r in report.rows if r.alarm]
    assert flagged == [a.interval_index for a in report.alarms]


def test_process_trace_tracks_vms_independently():
    trace = [
        TrafficInterval(0, "quiet", 100, 100),
        TrafficInterval(0, "loud", 5000, 3),
        TrafficInterval(1, "quiet", 100, 100),
        TrafficInterval(1, "loud", 5000, 3),
    ]
    report = process_trace(trace)
    assert report.series["quiet"] == [0.0, 0.0]
    assert all(a.vm_id == "loud" for a in report.alarms)
    assert [r.vm_id for r in report.rows] == ["loud", "loud", "quiet", "quiet"]


def test_process_trace_sorts_out_of_order_intervals():
    trace = [
        TrafficInterval(1, "vm", 100, 100),
        TrafficInterval(0, "vm", 1000, 0),
    ]
    report = process_trace(trace)
    assert report.series["vm"][0] == pytest.approx(0.92, abs=1e-9)


def test_bin_events_pairs_across_interval_boundary():
    events = [
        (1_000_000, "vm1", "SYN"),
        (14_000_000, "vm1", "FIN"),
    ]
    out = bin_events(events, interval_seconds=10)
    assert out == [
        TrafficInterval(0, "vm1", 1, 0),
        TrafficInterval(1, "vm1", 0, 1),
    ]


def test_bin_events_empty_trace_with_span():
    out = bin_events([], interval_seconds=10, span_seconds=30, vm_ids=["vm1"])
    assert out == [
        TrafficInterval(0, "vm1", 0, 0),
        TrafficInterval(1, "vm1", 0, 0),
        TrafficInterval(2, "vm1", 0, 0),
    ]


def test_bin_events_zero_fills_quiet_intervals():
    events = [
        (500_000, "vm1", "SYN"),
        (45_000_000, "vm1", "RST"),
    ]
    out = bin_events(events, interval_seconds=10)
    assert [iv.interval_index for iv in out] == [0, 1, 2, 3, 4]
    assert out[0].syn == 1
    assert out[4].finrst == 1
    assert all(iv.syn == 0 and iv.finrst == 0 for iv in out[1:4])


def test_bin_events_ignores_non_handshake_packets():
    events = [
        (0, "vm1", "SYN"),
        (1, "vm1", "SYNACK"),
        (2, "vm1", "ACK"),
        (3, "vm1", "OTHER"),
        (4, "vm1", "RST"),
    ]
    out = bin_events(events, interval_seconds=10)
    assert out == [TrafficInterval(0, "vm1", 1, 1)]


def test_bin_events_span_drops_overflow():
    events = [(5_000_000, "vm1", "SYN"), (25_000_000, "vm1", "SYN")]
    out = bin_events(events, interval_seconds=10, span_seconds=20)
    assert [iv.syn for iv in out] == [1, 0]


def test_bin_events_unsorted_raises():
    events = [(10, "vm1", "SYN"), (5, "vm1", "SYN")]
    with pytest.raises(UnsortedTrace):
        bin_events(events, interval_seconds=10)


def test_bin_events_multiple_vms_share_the_grid():
    events = [
        (0, "a", "SYN"),
        (11_000_000, "b", "SYN"),
    ]
    out = bin_events(events, interval_seconds=10)
    assert [(iv.vm_id, iv.interval_index) for iv in out] == [
        ("a", 0), ("a", 1), ("b", 0), ("b", 1),
    ]


def test_respond_log_leaves_vm_alone():
    vm = FakeVm()
    alarm = Alarm("v", 3, 2.0)
    rec = respond(alarm, "log", {"v": vm})
    assert (vm.traffic_scale, vm.attached) == (1.0, True)
    assert alarm.action_taken == "log"
    assert rec.action == "log"
    assert rec.interval_index == 3


def test_respond_throttle_scales_traffic():
    vm = FakeVm()
    respond(Alarm("v", 0, 2.0), "throttle", {"v": vm}, throttle_factor=0.25)
    assert vm.traffic_scale == 0.25
    assert vm.attached


def test_respond_suspend_detaches():
    vm = FakeVm()
    rec = respond(Alarm("v", 0, 2.0), "suspend", {"v": vm})
    assert not vm.attached
    assert "detach" in rec.detail


def test_respond_unknown_vm_and_bad_policy():
    with pytest.raises(UnknownVm):
        respond(Alarm("ghost", 0, 2.0), "log", {})
    with pytest.raises(ValueError):
        respond(Alarm("v", 0, 2.0), "reboot", {"v": FakeVm()})


def test_stat_csv_format():
    trace = [
        TrafficInterval(0, "vm1", 106242, 3),
        TrafficInterval(1, "vm1", 107762, 3),
    ]
    report = process_trace(trace)
    text = stat_rows_to_csv(report.rows)
    lines = text.strip().split("\n")
    assert lines[0] == "interval,vm_id,syn,finrst,d,y,alarm"
    assert lines[1] == "0,vm1,106242,3,0.999944,0.919944,0"
    assert lines[2] == "1,vm1,107762,3,0.999944,1.839888,1"


def test_default_parameters():
    assert DEFAULT_DRIFT == 0.08
    assert DEFAULT_THRESHOLD == 1.43
    state = CusumState("vm")
    assert state.drift == 0.08
    assert state.threshold == 1.43
