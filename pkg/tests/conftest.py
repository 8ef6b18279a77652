"""Shared test helpers: independent decision oracles and cluster generators.

The oracles re-derive the decision rules from scratch (plain arithmetic,
no package imports beyond the data types under test) so library results
can be checked against a second implementation rather than themselves.
"""

from __future__ import annotations

import numpy as np
import pytest

from vmshield.resources import ResourceVector
from vmshield.scheduler import ServerState, VmRecord


def cusum_oracle(pairs, drift, threshold, y0=0.0):
    """Direct recurrence arithmetic over (syn, finrst) pairs.

    Returns (y_series, exceed_flags).  Intentionally written without the
    detector module: the whole point is an independent derivation.
    """
    ys, flags = [], []
    y = y0
    for syn, finrst in pairs:
        d = (syn - finrst) / max(syn + finrst, 1)
        y = max(0.0, y + d - drift)
        ys.append(y)
        flags.append(y > threshold)
    return ys, flags


def _score(w, u):
    return w[0] * u.cpu + w[1] * u.mem + w[2] * u.bw


def _mean_sorted(vectors):
    total = ResourceVector(0.0, 0.0, 0.0)
    for v in vectors:
        total = ResourceVector(total.cpu + v.cpu, total.mem + v.mem, total.bw + v.bw)
    inv = 1.0 / len(vectors)
    return ResourceVector(total.cpu * inv, total.mem * inv, total.bw * inv)


def migration_oracle(servers, vms):
    """Brute-force re-derivation of the single-move rebalancing rule.

    Enumerates every (victim, target) pair and applies the decision
    rules literally: hottest overloaded source by uniform score, mean
    hosted usage as the migrant estimate, share weights, strict
    feasibility, minimum target score, strict improvement requirement.
    Returns (source_id, victim_id, target_id, source_post, target_score)
    or None.
    """
    third = 1.0 / 3.0
    uniform = (third, third, third)
    overloaded = [
        s
        for s in servers
        if s.power == "active"
        and (
            s.usage.cpu >= s.threshold.cpu
            or s.usage.mem >= s.threshold.mem
            or s.usage.bw >= s.threshold.bw
        )
    ]
    if not overloaded:
        return None
    source = min(overloaded, key=lambda s: (-_score(uniform, s.usage), s.id))
    if not source.vms:
        return None
    hosted = [vms[vid].observed for vid in sorted(source.vms)]
    m3 = _mean_sorted(hosted)
    total = m3.cpu + m3.mem + m3.bw
    if total > 0:
        w = (m3.cpu / total, m3.mem / total, m3.bw / total)
    else:
        w = uniform
    source_post = _score(
        w,
        ResourceVector(
            source.usage.cpu - m3.cpu, source.usage.mem - m3.mem, source.usage.bw - m3.bw
        ),
    )
    best = None
    for s in servers:
        if s.id == source.id or s.power != "active":
            continue
        after = ResourceVector(s.usage.cpu + m3.cpu, s.usage.mem + m3.mem, s.usage.bw + m3.bw)
        if not (
            after.cpu < s.threshold.cpu
            and after.mem < s.threshold.mem
            and after.bw < s.threshold.bw
        ):
            continue
        key = (_score(w, s.usage), s.id)
        if best is None or key < best:
            best = key
    if best is None or not best[0] < source_post:
        return None
    victim = None
    for vid in sorted(source.vms):
        v = vms[vid].observed
        d2 = (v.cpu - m3.cpu) ** 2 + (v.mem - m3.mem) ** 2 + (v.bw - m3.bw) ** 2
        if victim is None or (d2, vid) < victim:
            victim = (d2, vid)
    return source.id, victim[1], best[1], source_post, best[0]


def random_cluster(seed):
    """A small random cluster; roughly half the draws contain an overload."""
    rng = np.random.default_rng(seed)
    n_servers = int(rng.integers(1, 6))
    n_vms = int(rng.integers(0, 13))
    servers = []
    for i in range(n_servers):
        power = "asleep" if rng.random() < 0.15 and n_servers > 1 else "active"
        threshold = ResourceVector(*(float(x) for x in rng.uniform(60, 100, 3)))
        overhead = ResourceVector(*(float(x) for x in rng.uniform(0, 10, 3)))
        servers.append(ServerState(f"p{i + 1}", usage=overhead, threshold=threshold, power=power))
    active = [s for s in servers if s.power == "active"]
    vms = {}
    for j in range(n_vms):
        vid = f"v{j + 1:02d}"
        observed = ResourceVector(*(float(x) for x in rng.uniform(0, 40, 3)))
        host = active[int(rng.integers(0, len(active)))] if active else None
        record = VmRecord(vid, "cpu-intensive", observed=observed, host=host.id if host else None)
        vms[vid] = record
        if host is not None:
            host.vms.add(vid)
            host.usage = ResourceVector(
                host.usage.cpu + observed.cpu,
                host.usage.mem + observed.mem,
                host.usage.bw + observed.bw,
            )
    if active and rng.random() < 0.5:
        # force an overload on one hosted server so the interesting branch runs
        hosted = [s for s in active if s.vms]
        if hosted:
            s = hosted[int(rng.integers(0, len(hosted)))]
            comp = int(rng.integers(0, 3))
            u = s.usage.as_tuple()[comp]
            t = list(s.threshold.as_tuple())
            t[comp] = max(1e-9, u * float(rng.uniform(0.5, 1.0)))
            s.threshold = ResourceVector(*t)
    return servers, vms


@pytest.fixture
def make_cluster():
    return random_cluster
