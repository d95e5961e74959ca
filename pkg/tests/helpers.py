"""Brute-force references and random instance builders shared by the tests."""

from __future__ import annotations

import bisect
import itertools
import random
from fractions import Fraction

from hypothesis import strategies as st

from intsched.core import Job, conflicts


def brute_mis(jobs, weighted=True):
    """Best independent set by trying every subset (small inputs only)."""
    jobs = list(jobs)
    best = Fraction(0)
    for r in range(len(jobs) + 1):
        for combo in itertools.combinations(jobs, r):
            if all(not conflicts(a, b) for a, b in itertools.combinations(combo, 2)):
                v = sum((j.weight for j in combo), Fraction(0)) if weighted else Fraction(len(combo))
                best = max(best, v)
    return best


def brute_machines(jobs, m, weighted=True):
    """Best m-machine schedule by trying every assignment to a machine or to nobody."""
    jobs = list(jobs)
    best = Fraction(0)
    for plan in itertools.product(range(-1, m), repeat=len(jobs)):
        ok = True
        for a, b in itertools.combinations(range(len(jobs)), 2):
            if plan[a] >= 0 and plan[a] == plan[b] and conflicts(jobs[a], jobs[b]):
                ok = False
                break
        if ok:
            picked = [j for j, p in zip(jobs, plan) if p >= 0]
            v = sum((j.weight for j in picked), Fraction(0)) if weighted else Fraction(len(picked))
            best = max(best, v)
    return best


def random_jobs(r: random.Random, n, horizon, max_len=None, max_weight=1):
    max_len = max_len or max(1, horizon // 4)
    out = []
    for i in range(n):
        length = r.randint(1, min(max_len, horizon))
        start = r.randint(0, horizon - length)
        out.append(Job(i, start, length, Fraction(r.randint(1, max_weight))))
    return out


@st.composite
def job_lists(draw, max_n=8, horizon=16, max_weight=1):
    n = draw(st.integers(0, max_n))
    jobs = []
    for i in range(n):
        length = draw(st.integers(1, horizon))
        start = draw(st.integers(0, horizon - length))
        weight = draw(st.integers(1, max_weight))
        jobs.append(Job(i, start, length, Fraction(weight)))
    return jobs


# permutation process over an optimal M-machine schedule -------------------------


def permutation_process(opt_jobs, m, r: random.Random):
    """One run of the alternative-schedule process; returns (kept ids, machine draw).

    Each job of the optimal schedule gets a uniformly random machine, then
    the jobs are visited in random order.  A job joins its machine when every
    job already there is either disjoint from it or contained in it; the
    contained ones are dropped.
    """
    machine = {j.id: r.randrange(m) for j in opt_jobs}
    order = list(opt_jobs)
    r.shuffle(order)
    kept: dict[int, list[Job]] = {p: [] for p in range(m)}
    for job in order:
        here = kept[machine[job.id]]
        inside = [o for o in here if job.start <= o.start and o.end <= job.end]
        if any(conflicts(o, job) and o not in inside for o in here):
            continue
        here[:] = [o for o in here if o not in inside] + [job]
    return {o.id for jobs in kept.values() for o in jobs}, machine


def f_contain(c, m):
    return (1 - Fraction(1, m)) ** c


def f_intersect(c, m):
    x = 1 - Fraction(1, m)
    return sum((x ** i for i in range(2 * c + 1)), Fraction(0)) / (2 * c + 1)


class IncrementalGreedy:
    """Exact single-machine cardinality optimum under inserts and deletes.

    A segment tree over start times holds the smallest end among jobs that
    start at each time.  The earliest-end greedy chain is kept as the list of
    times it steps through; an update at start s can only change the step
    taken from the last chain time <= s, so the chain is recomputed from
    there until it rejoins the old one.
    """

    def __init__(self, horizon: int):
        self.size = 1
        while self.size < horizon:
            self.size *= 2
        self.inf = float("inf")
        self.tree = [self.inf] * (2 * self.size)
        self.ends: dict[int, list[int]] = {}
        self.chain = [0]

    def _set(self, pos, value):
        i = pos + self.size
        self.tree[i] = value
        i //= 2
        while i:
            self.tree[i] = min(self.tree[2 * i], self.tree[2 * i + 1])
            i //= 2

    def _min_from(self, x):
        lo, hi = x + self.size, 2 * self.size
        best = self.inf
        while lo < hi:
            if lo & 1:
                best = min(best, self.tree[lo])
                lo += 1
            if hi & 1:
                hi -= 1
                best = min(best, self.tree[hi])
            lo //= 2
            hi //= 2
        return best

    def _repair(self, start):
        i = bisect.bisect_right(self.chain, start) - 1
        old = self.chain
        fresh = []
        x = old[i]
        while True:
            x = self._min_from(x)
            if x == self.inf:
                self.chain = old[:i + 1] + fresh
                return
            j = bisect.bisect_left(old, x, i + 1)
            if j < len(old) and old[j] == x:
                self.chain = old[:i + 1] + fresh + old[j:]
                return
            fresh.append(x)

    def insert(self, job):
        bucket = self.ends.setdefault(job.start, [])
        bisect.insort(bucket, job.end)
        self._set(job.start, bucket[0])
        self._repair(job.start)

    def delete(self, job):
        bucket = self.ends[job.start]
        bucket.pop(bisect.bisect_left(bucket, job.end))
        self._set(job.start, bucket[0] if bucket else self.inf)
        self._repair(job.start)

    def value(self) -> int:
        return len(self.chain) - 1
