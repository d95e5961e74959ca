"""Exact reference solvers used as ground truth."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import Job, Schedule, TimeRange

MAX_BRUTEFORCE_JOBS = 18
MAX_BRUTEFORCE_MACHINES = 3


class InstanceTooLarge(ValueError):
    def __init__(self, n_jobs: int, m: int):
        super().__init__(
            f"brute force refuses {n_jobs} jobs on {m} machines "
            f"(limit {MAX_BRUTEFORCE_JOBS} jobs, {MAX_BRUTEFORCE_MACHINES} machines)"
        )
        self.n_jobs = n_jobs
        self.m = m


@dataclass(frozen=True)
class OracleResult:
    value: Fraction
    solution: Schedule
    node_visits: int = 0


def _within(jobs: Iterable[Job], rng: TimeRange | None) -> list[Job]:
    if rng is None:
        return list(jobs)
    return [j for j in jobs if rng.contains(j)]


def greedy_unweighted_1m(jobs: Iterable[Job], rng: TimeRange | None = None) -> OracleResult:
    """Earliest-end greedy; optimal for cardinality on one machine."""
    chosen = []
    last = None
    visits = 0
    for job in sorted(_within(jobs, rng), key=lambda j: j.key):
        visits += 1
        if last is None or job.start >= last:
            chosen.append(job.id)
            last = job.end
    return OracleResult(Fraction(len(chosen)), Schedule.single(chosen), visits)


def greedy_unweighted_Mm(jobs: Iterable[Job], m: int) -> OracleResult:
    """Earliest-end greedy with best-fit machine choice (latest free time that still fits)."""
    if m < 1:
        raise ValueError("need at least one machine")
    free = [0] * m
    assignment = {}
    visits = 0
    for job in sorted(jobs, key=lambda j: j.key):
        visits += 1
        pick = best_fit(free, job.start)
        if pick is not None:
            assignment[job.id] = pick
            free[pick] = job.end
    return OracleResult(Fraction(len(assignment)), Schedule(assignment), visits)


def best_fit(free, start) -> int | None:
    """Machine whose free time is the latest one not after ``start``; ties go to the lowest index."""
    pick = None
    for i, t in enumerate(free):
        if t <= start and (pick is None or t > free[pick]):
            pick = i
    return pick


def exact_weighted_1m(jobs: Iterable[Job], rng: TimeRange | None = None) -> OracleResult:
    """Classic weighted interval scheduling DP over jobs sorted by end."""
    items = sorted(_within(jobs, rng), key=lambda j: j.key)
    ends = [j.end for j in items]
    best = [Fraction(0)] * (len(items) + 1)
    take = [False] * (len(items) + 1)
    prev = [0] * (len(items) + 1)
    for i, job in enumerate(items, start=1):
        p = bisect.bisect_right(ends, job.start, 0, i - 1)
        prev[i] = p
        with_job = best[p] + job.weight
        if with_job > best[i - 1]:
            best[i] = with_job
            take[i] = True
        else:
            best[i] = best[i - 1]
    chosen = []
    i = len(items)
    while i > 0:
        if take[i]:
            chosen.append(items[i - 1].id)
            i = prev[i]
        else:
            i -= 1
    return OracleResult(best[-1], Schedule.single(chosen), len(items))


def exact_sparse_opt(jobs: Iterable[Job], rng: TimeRange | None, k: int) -> OracleResult:
    """Best schedule with at most ``k`` jobs, via a DP over (prefix, count)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    items = sorted(_within(jobs, rng), key=lambda j: j.key)
    n = len(items)
    k = min(k, n)
    ends = [j.end for j in items]
    # best[c][i]: best value using at most c jobs among the first i
    best = [[Fraction(0)] * (n + 1) for _ in range(k + 1)]
    for c in range(1, k + 1):
        row, below = best[c], best[c - 1]
        for i, job in enumerate(items, start=1):
            p = bisect.bisect_right(ends, job.start, 0, i - 1)
            row[i] = max(row[i - 1], below[p] + job.weight)
    chosen = []
    c, i = k, n
    while c > 0 and i > 0:
        if best[c][i] == best[c][i - 1]:
            i -= 1
            continue
        chosen.append(items[i - 1].id)
        i = bisect.bisect_right(ends, items[i - 1].start, 0, i - 1)
        c -= 1
    return OracleResult(best[k][n], Schedule.single(chosen), n * max(k, 1))


def exact_weighted_Mm_bruteforce(jobs: Iterable[Job], m: int) -> OracleResult:
    """Exhaustive search over which jobs to keep, feasible on ``m`` machines.

    Jobs are scanned by start time; a job can be kept iff some machine is free
    at its start, and all free machines are interchangeable for the rest of
    the scan, so branching on keep/drop is exhaustive.
    """
    items = sorted(jobs, key=lambda j: (j.start, j.end, j.id))
    if len(items) > MAX_BRUTEFORCE_JOBS or m > MAX_BRUTEFORCE_MACHINES:
        raise InstanceTooLarge(len(items), m)
    if m < 1:
        raise ValueError("need at least one machine")
    n = len(items)
    suffix = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + items[i].weight

    best_value = Fraction(0)
    best_plan: dict[int, int] = {}
    visits = 0
    plan: dict[int, int] = {}

    def search(i, free, value):
        nonlocal best_value, best_plan, visits
        visits += 1
        if value + suffix[i] <= best_value:
            return
        if i == n:
            best_value = value
            best_plan = dict(plan)
            return
        job = items[i]
        slot = best_fit(free, job.start)
        if slot is not None:
            saved = free[slot]
            free[slot] = job.end
            plan[job.id] = slot
            search(i + 1, free, value + job.weight)
            del plan[job.id]
            free[slot] = saved
        search(i + 1, free, value)

    search(0, [0] * m, Fraction(0))
    return OracleResult(best_value, Schedule(best_plan), visits)
