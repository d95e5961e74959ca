"""Local computation of an approximate interval schedule.

Everything here talks to the instance only through successor probes: "which
job starting at or after x ends first".  A binary tree over the padded time
axis drives a recursive simulation of the earliest-end greedy.  In the
approximate variant a node whose two halves both hold more than the
threshold number of greedy jobs gets a border at its midpoint; the halves are
then independent, which is what lets a single query descend one path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .core import ApproxParams, Job, Schedule, TimeRange, UnknownJobError, next_power_of_two
from .jobindex import JobIndex
from .oracles import best_fit


class SuccessorOracle:
    """Probe-counting successor access to a static job set."""

    def __init__(self, jobs: Iterable[Job], horizon: int | None = None, log: Callable[[str], None] | None = None):
        jobs = list(jobs)
        self._index = JobIndex(jobs)
        self.jobs = {j.id: j for j in jobs}
        top = max((j.end for j in jobs), default=1)
        if horizon is not None and horizon < top:
            raise ValueError(f"horizon {horizon} is smaller than the last job end {top}")
        self.horizon = next_power_of_two(max(horizon or 1, top))
        self.probes = 0
        self._log = log

    def _record(self, x, job):
        self.probes += 1
        if self._log is not None:
            self._log(f"probe {x} -> {'none' if job is None else job.id}")

    def successor(self, x: int) -> Job | None:
        job = self._index.successor(x)
        self._record(x, job)
        return job

    def successor_excluding(self, x: int, ignore) -> Job | None:
        """Successor skipping ``ignore``; every candidate looked at costs one probe."""
        for job in self._index.iter_successors(x):
            self._record(x, job)
            if job.id not in ignore:
                return job
        self._record(x, None)
        return None


@dataclass(frozen=True)
class TreeNode:
    depth: int
    lo: int
    hi: int

    @classmethod
    def root(cls, horizon: int) -> TreeNode:
        return cls(0, 0, next_power_of_two(horizon))

    @property
    def mid(self) -> int:
        return (self.lo + self.hi) // 2

    @property
    def is_leaf(self) -> bool:
        return self.hi - self.lo <= 1

    @property
    def range(self) -> TimeRange:
        return TimeRange(self.lo, self.hi)

    def children(self) -> tuple[TreeNode, TreeNode]:
        return TreeNode(self.depth + 1, self.lo, self.mid), TreeNode(self.depth + 1, self.mid, self.hi)


@dataclass(frozen=True)
class ProbeRun:
    jobs: list
    last_end: int
    probes: int


def probe_based_opt(o: SuccessorOracle, rng: TimeRange, earliest: int, cap: int | None = None) -> ProbeRun:
    """Earliest-end greedy inside ``rng`` from ``earliest``, one probe per chosen job plus one."""
    before = o.probes
    chosen = []
    last = earliest
    x = max(earliest, rng.lo)
    while cap is None or len(chosen) < cap:
        job = o.successor(x)
        if job is None or job.end > rng.hi:
            break
        chosen.append(job)
        last = x = job.end
    return ProbeRun(chosen, last, o.probes - before)


class _Decided(Exception):
    """Unwinds the recursion once a local query has its answer."""


class _Simulation:
    """Hierarchical greedy over the binary time tree.

    ``threshold`` None gives the exact global greedy.  Otherwise a border is
    drawn at a node's midpoint when both halves hold more than ``threshold``
    greedy jobs.  With a ``target`` the walk stops as soon as the target's
    fate is known and skips bordered halves that cannot affect it.
    """

    def __init__(self, o: SuccessorOracle, m: int = 1, threshold: int | None = None, target: Job | None = None):
        self.o = o
        self.m = m
        self.threshold = threshold
        self.target = target
        self.selected: dict[int, int] = {}
        self.borders: list[int] = []

    # greedy pieces ------------------------------------------------------

    def _next(self, x, ignore):
        if self.m == 1:
            return self.o.successor(x)
        return self.o.successor_excluding(x, ignore)

    def run(self, lo, hi, frees, cap=None):
        """Multi-machine probe-based greedy restricted to jobs inside [lo, hi]."""
        frees = list(frees)
        chosen = []
        taken = set()
        while cap is None or len(chosen) < cap:
            job = self._next(max(min(frees), lo), taken)
            if job is None or job.end > hi:
                break
            machine = best_fit(frees, job.start)
            chosen.append((job, machine))
            taken.add(job.id)
            frees[machine] = job.end
        return chosen, tuple(frees)

    def commit(self, chosen):
        for job, machine in chosen:
            self.selected[job.id] = machine

    def _inside(self, lo, hi):
        t = self.target
        return t is not None and lo <= t.start and t.end <= hi

    def _settle_if_inside(self, lo, hi):
        if self._inside(lo, hi):
            raise _Decided

    # recursion ----------------------------------------------------------

    def node(self, lo, hi, frees):
        if hi - lo <= 1:
            chosen, out = self.run(lo, hi, frees)
            self.commit(chosen)
            self._settle_if_inside(lo, hi)
            return out
        mid = (lo + hi) // 2
        left_test = right_test = None
        if self.threshold is not None:
            cap = self.threshold + 1
            left_test = self.run(lo, mid, frees, cap)
            right_test = self.run(mid, hi, (mid,) * self.m, cap)
            if len(left_test[0]) > self.threshold and len(right_test[0]) > self.threshold:
                return self._bordered(lo, mid, hi, frees)

        if left_test is not None and len(left_test[0]) <= self.threshold:
            self.commit(left_test[0])
            after_left = left_test[1]
            self._settle_if_inside(lo, mid)
        else:
            after_left = self.node(lo, mid, frees)

        after_mid = self._middle(lo, mid, hi, after_left)
        if self.target is not None and self._inside(lo, hi) and self.target.start < mid < self.target.end:
            raise _Decided

        if right_test is not None and len(right_test[0]) <= self.threshold:
            if self.m == 1 and after_mid[0] <= mid:
                chosen = right_test[0]
                out = (chosen[-1][0].end,) if chosen else after_mid
            else:
                chosen, out = self.run(mid, hi, after_mid)
            self.commit(chosen)
            self._settle_if_inside(mid, hi)
            return out
        return self.node(mid, hi, after_mid)

    def _bordered(self, lo, mid, hi, frees):
        self.borders.append(mid)
        right_frees = tuple(max(f, mid) for f in frees)
        if self.target is None:
            self.node(lo, mid, frees)
            return self.node(mid, hi, right_frees)
        if self._inside(lo, mid):
            self.node(lo, mid, frees)
            raise _Decided
        return self.node(mid, hi, right_frees)

    def _middle(self, lo, mid, hi, frees):
        """Schedule midpoint-crossing jobs while they are the greedy's next pick."""
        frees = list(frees)
        ignore = self.selected
        while True:
            job = self._next(max(min(frees), lo), ignore)
            if job is None or not (job.start < mid < job.end) or job.end > hi:
                break
            if self.m == 1:
                # skip it if some job lies inside it; one probe from its start decides that
                inner = self.o.successor(job.start)
                if inner is not None and inner.end < job.end:
                    break
            machine = best_fit(frees, job.start)
            self.selected[job.id] = machine
            frees[machine] = job.end
            if self.m == 1:
                break
        return tuple(frees)

    def solve(self, node: TreeNode, frees) -> tuple:
        try:
            return self.node(node.lo, node.hi, tuple(frees))
        except _Decided:
            return None


def _collect(sim: _Simulation, out):
    if out is not None:
        out.extend(sim.o.jobs[i] for i in sim.selected)


def f_exact(node: TreeNode, earliest: int, o: SuccessorOracle, out: list | None = None) -> int:
    """Exact greedy below ``node``; returns the end of the last selected job (or ``earliest``)."""
    sim = _Simulation(o)
    result = sim.solve(node, (earliest,))
    _collect(sim, out)
    return result[0]


def f_approx(node: TreeNode, earliest: int, params: ApproxParams, o: SuccessorOracle, out: list | None = None) -> int:
    """Greedy with midpoint borders wherever both halves exceed K jobs."""
    sim = _Simulation(o, threshold=params.k)
    result = sim.solve(node, (earliest,))
    _collect(sim, out)
    return result[0]


def approx_schedule(params: ApproxParams, o: SuccessorOracle, m: int = 1) -> Schedule:
    """The global solution that the local queries are consistent with."""
    sim = _Simulation(o, m=m, threshold=m * params.k)
    sim.solve(TreeNode.root(o.horizon), (0,) * m)
    return Schedule(sim.selected)


def _check_member(job: Job, o: SuccessorOracle):
    if o.jobs.get(job.id) != job:
        raise UnknownJobError(job.id)


def lca_query(job: Job, params: ApproxParams, o: SuccessorOracle) -> bool:
    _check_member(job, o)
    sim = _Simulation(o, threshold=params.k, target=job)
    sim.solve(TreeNode.root(o.horizon), (0,))
    return job.id in sim.selected


def lca_query_multi(job: Job, m: int, params: ApproxParams, o: SuccessorOracle) -> int | None:
    if m < 1:
        raise ValueError("need at least one machine")
    _check_member(job, o)
    sim = _Simulation(o, m=m, threshold=m * params.k, target=job)
    sim.solve(TreeNode.root(o.horizon), (0,) * m)
    return sim.selected.get(job.id)


def probe_budget(params: ApproxParams, horizon: int, m: int = 1, c: int = 4) -> int:
    """Per-query probe allowance c * m * (K+1) * log2(N)."""
    levels = max(1, next_power_of_two(horizon).bit_length() - 1)
    return c * m * (params.k + 1) * levels
