"""Domain types and interval geometry shared by every engine.

Jobs are half-open intervals ``[start, start + length)`` on an integer time
axis. Two jobs that only touch at an endpoint do not conflict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping


class ValidationError(ValueError):
    """Raised when a schedule references a job that does not exist."""

    def __init__(self, message: str, job_id: int | None = None):
        super().__init__(message)
        self.job_id = job_id


class DuplicateJobError(KeyError):
    pass


class UnknownJobError(KeyError):
    pass


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions, and ``"num/den"`` strings into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats are accepted only when they are exact binary fractions
        return Fraction(value)
    return Fraction(value)


@dataclass(frozen=True, slots=True)
class Job:
    id: int
    start: int
    length: int
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"job id must be non-negative, got {self.id}")
        if self.start < 0:
            raise ValueError(f"job {self.id}: start must be >= 0")
        if self.length < 1:
            raise ValueError(f"job {self.id}: length must be >= 1")
        w = as_fraction(self.weight)
        if w < 1:
            raise ValueError(f"job {self.id}: weight must be >= 1, got {w}")
        object.__setattr__(self, "weight", w)

    @property
    def end(self) -> int:
        return self.start + self.length

    @property
    def key(self) -> tuple[int, int, int]:
        """Global tie-break order: earliest end, then start, then id."""
        return (self.start + self.length, self.start, self.id)

    def __repr__(self):
        w = "" if self.weight == 1 else f" w={self.weight}"
        return f"Job({self.id}: [{self.start},{self.end}){w})"


@dataclass(frozen=True)
class TimeRange:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty time range [{self.lo}, {self.hi}]")

    def contains(self, job: Job) -> bool:
        return self.lo <= job.start and job.end <= self.hi

    @property
    def length(self) -> int:
        return self.hi - self.lo


@dataclass(frozen=True)
class Schedule:
    """Assignment of job ids to machine indices."""

    assignment: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "assignment", MappingProxyType(dict(self.assignment)))

    @classmethod
    def single(cls, ids: Iterable[int], machine: int = 0) -> Schedule:
        return cls({i: machine for i in ids})

    @property
    def ids(self) -> frozenset[int]:
        return frozenset(self.assignment)

    def __len__(self):
        return len(self.assignment)

    def __contains__(self, job_id):
        return job_id in self.assignment

    def machine(self, job_id: int) -> int | None:
        return self.assignment.get(job_id)

    def value(self, jobs: Mapping[int, Job] | Iterable[Job]) -> Fraction:
        by_id = _by_id(jobs)
        return sum((by_id[i].weight for i in self.assignment), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Schedule):
            return NotImplemented
        return dict(self.assignment) == dict(other.assignment)

    def __hash__(self):
        return hash(frozenset(self.assignment.items()))


@dataclass(frozen=True)
class ApproxParams:
    epsilon: Fraction

    def __post_init__(self):
        eps = as_fraction(self.epsilon)
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        object.__setattr__(self, "epsilon", eps)

    @cached_property
    def k(self) -> int:
        return math.ceil(1 / self.epsilon)


def conflicts(a: Job, b: Job) -> bool:
    return a.start < b.end and b.start < a.end


def crosses(a: Job, border: int) -> bool:
    return a.start < border < a.end


def _by_id(jobs) -> Mapping[int, Job]:
    if isinstance(jobs, Mapping):
        return jobs
    return {j.id: j for j in jobs}


def validate_schedule(jobs, s: Schedule, m: int) -> bool:
    """Check that no machine runs two overlapping jobs.

    Raises ValidationError if the schedule names an id missing from ``jobs``.
    """
    by_id = _by_id(jobs)
    per_machine: dict[int, list[Job]] = {}
    for job_id, machine in s.assignment.items():
        if job_id not in by_id:
            raise ValidationError(f"schedule references unknown job {job_id}", job_id)
        if not 0 <= machine < m:
            return False
        per_machine.setdefault(machine, []).append(by_id[job_id])
    for assigned in per_machine.values():
        assigned.sort(key=lambda j: (j.start, j.end))
        for prev, cur in zip(assigned, assigned[1:]):
            if cur.start < prev.end:
                return False
    return True


def schedule_value(jobs, s: Schedule) -> Fraction:
    return s.value(jobs)


def next_power_of_two(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p
