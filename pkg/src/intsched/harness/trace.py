"""Trace records and workload generators.

A trace is plain text, one event per line, written as ``field=value`` pairs::

    op=insert id=3 start=10 len=4 weight=5/2
    op=query id=3
    op=value expect=7
    op=delete id=3
    op=report

Blank lines and lines starting with ``#`` are skipped.  Unknown fields,
missing fields and fields that do not belong to the op are errors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, TextIO

from ..core import Job

OPS = ("insert", "delete", "query", "value", "report")
FIELDS = ("op", "id", "start", "len", "weight", "expect")
_ALLOWED = {
    "insert": {"id", "start", "len", "weight"},
    "delete": {"id"},
    "query": {"id", "expect"},
    "value": {"expect"},
    "report": set(),
}
_REQUIRED = {
    "insert": {"id", "start", "len"},
    "delete": {"id"},
    "query": {"id"},
    "value": set(),
    "report": set(),
}


class TraceError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TraceEvent:
    op: str
    id: int | None = None
    start: int | None = None
    length: int | None = None
    weight: Fraction | None = None
    expect: Fraction | None = None
    line: int = 0

    def job(self) -> Job:
        return Job(self.id, self.start, self.length, self.weight if self.weight is not None else Fraction(1))

    def format(self) -> str:
        parts = [f"op={self.op}"]
        if self.id is not None:
            parts.append(f"id={self.id}")
        if self.start is not None:
            parts.append(f"start={self.start}")
        if self.length is not None:
            parts.append(f"len={self.length}")
        if self.weight is not None and self.weight != 1:
            parts.append(f"weight={self.weight}")
        if self.expect is not None:
            parts.append(f"expect={self.expect}")
        return " ".join(parts)

    @classmethod
    def insert(cls, job: Job) -> TraceEvent:
        return cls("insert", job.id, job.start, job.length, job.weight)


def _number(text: str, line: int, name: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise TraceError(line, f"{name}={text!r} is not a number") from None


def _integer(text: str, line: int, name: str) -> int:
    value = _number(text, line, name)
    if value.denominator != 1:
        raise TraceError(line, f"{name}={text!r} is not an integer")
    return int(value)


def parse_line(text: str, line: int = 0) -> TraceEvent | None:
    text = text.strip()
    if not text or text.startswith("#"):
        return None
    fields: dict[str, str] = {}
    for token in text.split():
        name, sep, value = token.partition("=")
        if not sep or not value:
            raise TraceError(line, f"expected field=value, got {token!r}")
        if name not in FIELDS:
            raise TraceError(line, f"unknown field {name!r}")
        if name in fields:
            raise TraceError(line, f"field {name!r} given twice")
        fields[name] = value
    op = fields.pop("op", None)
    if op is None:
        raise TraceError(line, "missing op")
    if op not in OPS:
        raise TraceError(line, f"unknown op {op!r}")
    extra = set(fields) - _ALLOWED[op]
    if extra:
        raise TraceError(line, f"op={op} does not take {', '.join(sorted(extra))}")
    missing = _REQUIRED[op] - set(fields)
    if missing:
        raise TraceError(line, f"op={op} needs {', '.join(sorted(missing))}")
    kw = {}
    if "id" in fields:
        kw["id"] = _integer(fields["id"], line, "id")
    if "start" in fields:
        kw["start"] = _integer(fields["start"], line, "start")
    if "len" in fields:
        kw["length"] = _integer(fields["len"], line, "len")
        if kw["length"] < 1:
            raise TraceError(line, "len must be at least 1")
    if "weight" in fields:
        kw["weight"] = _number(fields["weight"], line, "weight")
        if kw["weight"] < 1:
            raise TraceError(line, "weight must be at least 1")
    if "expect" in fields:
        kw["expect"] = _number(fields["expect"], line, "expect")
    return TraceEvent(op, line=line, **kw)


def parse_trace(lines: Iterable[str]) -> Iterator[TraceEvent]:
    for n, text in enumerate(lines, start=1):
        event = parse_line(text, n)
        if event is not None:
            yield event


def read_trace(path) -> list[TraceEvent]:
    with open(path, encoding="utf-8") as fh:
        return list(parse_trace(fh))


def write_trace(events: Iterable[TraceEvent], out: TextIO) -> None:
    for event in events:
        out.write(event.format() + "\n")


# generators -------------------------------------------------------------------

KINDS = ("uniform", "tight_chain", "nested_heavy", "clustered")


def _uniform(r, n, horizon, w):
    longest = max(1, horizon // 16)
    for i in range(n):
        length = r.randint(1, min(longest, horizon))
        start = r.randint(0, horizon - length)
        yield Job(i, start, length, Fraction(r.randint(1, w)))


def _tight_chain(n, m):
    for i in range(n):
        yield Job(i, i, m)


def _nested_heavy(n, w):
    i = 0
    base = 0
    while i < n:
        yield Job(i, base, 2 * w, Fraction(w))
        i += 1
        for u in range(w):
            if i >= n:
                return
            yield Job(i, base + 2 * u, 1)
            i += 1
        base += 2 * w


def _clustered(r, n, horizon, w):
    centers = [r.randrange(horizon) for _ in range(max(1, n // 20))]
    spread = max(2, horizon // 64)
    for i in range(n):
        c = r.choice(centers)
        length = r.randint(1, spread)
        start = min(max(0, c + r.randint(-spread, spread)), horizon - length)
        yield Job(i, start, length, Fraction(r.randint(1, w)))


def generate(kind: str, n: int, horizon: int = 1 << 16, m: int = 1, w: int = 1,
             seed: int = 0, churn: float = 0.0) -> list[TraceEvent]:
    """Deterministic insert stream of ``n`` jobs, optionally interleaved with deletes.

    With ``churn`` p > 0, after each insert a uniformly random live job is
    deleted with probability p.  The stream ends with a value and a report
    event.
    """
    if n < 0 or horizon < 1 or m < 1 or w < 1:
        raise ValueError("parameters must be positive")
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    r = random.Random(seed)
    if kind == "uniform":
        jobs = _uniform(r, n, horizon, w)
    elif kind == "tight_chain":
        jobs = _tight_chain(n, m)
    elif kind == "nested_heavy":
        jobs = _nested_heavy(n, w)
    else:
        jobs = _clustered(r, n, horizon, w)
    events = []
    live = []
    for job in jobs:
        events.append(TraceEvent.insert(job))
        live.append(job.id)
        if churn and r.random() < churn:
            victim = live.pop(r.randrange(len(live)))
            events.append(TraceEvent("delete", victim))
    events.append(TraceEvent("value"))
    events.append(TraceEvent("report"))
    return events


def trace_horizon(events: Iterable[TraceEvent]) -> int:
    """Smallest horizon that holds every inserted job."""
    return max((e.start + e.length for e in events if e.op == "insert"), default=1)
