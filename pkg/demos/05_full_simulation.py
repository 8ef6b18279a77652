"""
A thousand ticks of datacenter life, end to end
===============================================

The committed scenario next to this script describes three servers,
twenty VM requests, one VM that turns hostile, and a round of
shutdowns.  Running it exercises every library capability in one
deterministic pass: weighted placement, wake-on-reject, usage jitter,
per-VM flood detection with suspension, and energy-aware
consolidation.  Same scenario + same seed means byte-identical
reports, every time.
"""

import json
import os
import sys
import tempfile

from vmshield import emit_reports, load_scenario, run

here = os.path.dirname(os.path.abspath(__file__))
scenario = load_scenario(os.path.join(here, "small_datacenter.json"))
print(f"servers={len(scenario.servers)} events={len(scenario.events)} "
      f"duration={scenario.duration} seed={scenario.seed}")

report = run(scenario)

print("\ncounters:")
for name, value in report.summary["counters"].items():
    print(f"  {name:24s} {value}")

print("\nalarms:")
for alarm in report.alarms:
    print(f"  tick {alarm['tick']}: {alarm['vm']} y={alarm['y']} -> {alarm['action']}")

print("\npower events (first 6):")
for event in report.power_events[:6]:
    print(f"  tick {event['tick']}: {event['server']} {event['event']}")

print("\nfinal servers:")
for sid, state in report.summary["final"]["servers"].items():
    print(f"  {sid}: {state['power']}, {state['vms']} VMs, "
          f"usage {json.dumps(state['usage'])}")

outdir = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="vmshield_")
paths = emit_reports(report, outdir)
print("\nreports written:")
for path in paths:
    print(f"  {path}")
