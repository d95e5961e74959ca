"""Trace replay with latency, probe and ratio bookkeeping."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable

from ..core import ApproxParams, as_fraction
from ..lca import probe_budget
from .engines import Adapter
from .trace import TraceError, TraceEvent

RATIO_TOLERANCE = 1e-9
DEFAULT_CADENCE = 10


class InvariantViolation(RuntimeError):
    def __init__(self, line: int, op: str, problems: list[str]):
        super().__init__(f"line {line} ({op}): " + "; ".join(problems[:5]))
        self.line = line
        self.problems = problems


@dataclass
class RunReport:
    algo: str
    epsilon: str
    machines: int
    horizon: int
    seed: int
    offsets: int
    ops: int = 0
    op_counts: dict = field(default_factory=dict)
    oracle_cadence: int | None = None
    ratios: list = field(default_factory=list)  # [event index, value/oracle]
    min_ratio: float | None = None
    measured_c: float | None = None
    oracle_skipped: int = 0
    violations: int = 0
    expectation_failures: list = field(default_factory=list)
    query_answers: int = 0
    probes: dict | None = None
    final_value: str = "0"
    timing: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict:
        out = asdict(self)
        if not timing:
            out.pop("timing")
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


def _percentiles(samples: list[float]) -> dict:
    if not samples:
        return {"p50_us": 0.0, "p90_us": 0.0, "p99_us": 0.0, "max_us": 0.0, "mean_us": 0.0}
    s = sorted(samples)

    def pick(q):
        return round(s[min(len(s) - 1, int(q * len(s)))] * 1e6, 3)

    return {
        "p50_us": pick(0.5),
        "p90_us": pick(0.9),
        "p99_us": pick(0.99),
        "max_us": round(s[-1] * 1e6, 3),
        "mean_us": round(sum(s) / len(s) * 1e6, 3),
    }


def run_trace(algo: str, events: Iterable[TraceEvent], epsilon=Fraction(1, 2), machines: int = 1,
              horizon: int = 1 << 16, oracle_check: int | None = None, seed: int = 0,
              offsets: int = 5, w_cap=None, abort_on_violation: bool = True) -> RunReport:
    """Replay ``events`` against engine ``algo``.

    ``oracle_check=k`` compares against the exact optimum after every k-th
    event (and on every value/report event) and audits engine invariants at
    the same moments.
    """
    params = ApproxParams(as_fraction(epsilon))
    engine = Adapter(algo, params, machines, horizon, seed=seed, offsets=offsets, w_cap=w_cap)
    report = RunReport(algo, str(params.epsilon), machines, horizon, seed, offsets, oracle_cadence=oracle_check)
    latencies: list[float] = []
    probe_counts: list[int] = []
    live: set[int] = set()
    worst_c = None
    started = time.perf_counter()

    for index, event in enumerate(events):
        report.ops += 1
        report.op_counts[event.op] = report.op_counts.get(event.op, 0) + 1
        if event.op in ("delete", "query") and event.id not in live:
            raise TraceError(event.line, f"op={event.op} references id {event.id}, which is not live")
        if event.op == "insert" and event.id in live:
            raise TraceError(event.line, f"id {event.id} is already live")
        if event.op == "insert" and event.start + event.length > horizon:
            raise TraceError(event.line, f"job {event.id} ends after the horizon {horizon}")

        t0 = time.perf_counter()
        answer = None
        if event.op == "insert":
            engine.insert(event.job())
            live.add(event.id)
        elif event.op == "delete":
            engine.delete(event.id)
            live.discard(event.id)
        elif event.op == "query":
            answer = engine.query(event.id)
        elif event.op == "value":
            answer = engine.value()
        latencies.append(time.perf_counter() - t0)

        if event.op == "query":
            report.query_answers += 1
            p = engine.probes()
            if p is not None:
                probe_counts.append(p)
        if event.expect is not None and answer is not None:
            # one machine answers True/False; M machines answer an index, or None when unscheduled
            got = Fraction(-1 if answer is None else int(answer) if isinstance(answer, bool) else answer)
            if got != event.expect:
                report.expectation_failures.append({"line": event.line, "expected": str(event.expect), "got": str(got)})

        due = event.op in ("value", "report") or (oracle_check and (index + 1) % oracle_check == 0)
        if oracle_check and due:
            problems = engine.check()
            value = engine.value()
            best = engine.oracle_value()
            if best is None:
                report.oracle_skipped += 1
            elif best > 0:
                ratio = value / best
                report.ratios.append([index, float(ratio)])
                if ratio > 1 + RATIO_TOLERANCE:
                    problems.append(f"value {value} exceeds the optimum {best}")
                if value > 0:
                    c = float((best / value - 1) / params.epsilon)
                    worst_c = c if worst_c is None else max(worst_c, c)
            if problems:
                report.violations += len(problems)
                if abort_on_violation:
                    raise InvariantViolation(event.line, event.op, problems)

    report.final_value = str(engine.value())
    if report.ratios:
        report.min_ratio = min(r for _, r in report.ratios)
    report.measured_c = worst_c
    if algo == "lca":
        budget = probe_budget(params, horizon, machines)
        hist: dict[str, int] = {}
        for p in probe_counts:
            hist[str(p)] = hist.get(str(p), 0) + 1
        report.probes = {
            "queries": len(probe_counts),
            "max": max(probe_counts, default=0),
            "mean": round(sum(probe_counts) / len(probe_counts), 3) if probe_counts else 0.0,
            "budget": budget,
            "over_budget": sum(p > budget for p in probe_counts),
            "histogram": dict(sorted(hist.items(), key=lambda kv: int(kv[0]))),
        }
    report.timing = {"latency": _percentiles(latencies), "wall_s": round(time.perf_counter() - started, 4)}
    return report
