"""Near-optimal schedules that use few jobs inside a time range.

The search runs over a ladder of rounded rewards: state ``s`` remembers the
earliest time by which a reward of at least ``ladder[s]`` can be collected.
Weights are first scaled against a 2-approximation ``w_hat`` of the heaviest
job in the range, so the ladder only needs to span a constant times K**2/eps
regardless of the absolute weights, and jobs lighter than ``eps * w_hat / K``
are dropped.

Two implementations share the same rounding rules:

* :func:`sparse_dp` walks the earliest-end table state by state, asking the
  per-class search structures for the first job of each class.  It is exact
  with respect to the rounding and also returns the jobs.
* :class:`SparseBatch` answers every (L, R) pair of a grid at once.  It sweeps
  jobs by end time and keeps, for every left endpoint, the best ladder state
  reachable by each moment; the answers are identical because the ladder
  transition is monotone.
"""

from __future__ import annotations

import bisect
import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from ..core import ApproxParams, Job, TimeRange, as_fraction
from ..jobindex import JobIndex
from .ladder import Ladder, WeightClasses

# Internal precision is a quarter of the caller's epsilon: class rounding,
# light-job dropping and ladder rounding each cost about that much.
PRECISION_SPLIT = 4


@dataclass(frozen=True)
class SparseParams:
    epsilon: Fraction
    k: int

    @classmethod
    def of(cls, params: ApproxParams, k: int | None = None) -> SparseParams:
        return cls(params.epsilon, params.k if k is None else k)

    @property
    def inner(self) -> Fraction:
        return self.epsilon / PRECISION_SPLIT


@lru_cache(maxsize=None)
def _setup(params: SparseParams):
    e = params.inner
    k = params.k
    ladder = Ladder(1 + e / k, 2 * k * k / e)
    return ladder, WeightClasses(e)


def ladder_for(params: SparseParams) -> Ladder:
    return _setup(params)[0]


def classes_for(params: SparseParams) -> WeightClasses:
    return _setup(params)[1]


def unit(params: SparseParams, i: int) -> Fraction:
    """Reward that one ladder unit stands for when w_hat = 2**i."""
    return params.inner * Fraction(2) ** i / params.k


def heavy_level(w) -> int:
    """Largest i with 2**i <= w (w >= 1)."""
    return int(as_fraction(w)).bit_length() - 1


class _Transitions:
    """Cached exact ladder moves ``index -> index_of(value(index) + class value / unit)``."""

    def __init__(self, params: SparseParams, i: int):
        self.params = params
        self.ladder, self.classes = _setup(params)
        self.u = unit(params, i)
        self.min_class = self.classes.min_class_at_least(self.u)
        self._cache: dict[tuple[int, int], int] = {}

    def step(self, idx: int, c: int) -> int:
        key = (idx, c)
        out = self._cache.get(key)
        if out is None:
            v = self.ladder.value(idx) + self.classes.value(c) / self.u
            out = self.ladder.index_of(v)
            self._cache[key] = out
        return out

    def table(self, max_class: int) -> np.ndarray:
        """Dense transition table, rows = ladder index, columns = class."""
        lad = self.ladder
        floats = np.array(lad.floats())
        cls_vals = np.array([float(self.classes.value(c) / self.u) for c in range(max_class + 1)])
        total = floats[:, None] + cls_vals[None, :]
        with np.errstate(divide="ignore"):
            e = np.floor(np.log(total) / lad._log_base)
        out = np.clip(e, 0, lad.max_exp).astype(np.int64) + 1
        out[total < 1] = 0
        # exact repair close to rung boundaries, where floating point could mislead
        frac = np.log(np.maximum(total, 1)) / lad._log_base - e
        risky = np.argwhere((frac < 1e-7) | (frac > 1 - 1e-7))
        for idx, c in risky:
            out[idx, c] = self.step(int(idx), int(c))
        return out


@lru_cache(maxsize=None)
def transitions(params: SparseParams, i: int) -> _Transitions:
    return _Transitions(params, i)


@lru_cache(maxsize=None)
def transition_table(params: SparseParams, i: int, max_class: int) -> np.ndarray:
    table = transitions(params, i).table(max_class)
    table.setflags(write=False)
    return table


class WeightClassIndex:
    """Per-class earliest-end search structures plus weight-threshold trees.

    ``by_class[c]`` holds the jobs whose weight rounds to class c;
    ``heavy[i]`` holds the jobs with weight >= 2**i.
    """

    def __init__(self, params: SparseParams, jobs: Iterable[Job] = ()):
        self.params = params
        self.classes = classes_for(params)
        self.by_class: dict[int, JobIndex] = {}
        self.heavy: dict[int, JobIndex] = {}
        self.jobs: dict[int, Job] = {}
        for job in jobs:
            self.insert(job)

    def insert(self, job: Job) -> None:
        self.jobs[job.id] = job
        c = self.classes.class_of(job.weight)
        self.by_class.setdefault(c, JobIndex()).insert(job)
        for i in range(heavy_level(job.weight) + 1):
            self.heavy.setdefault(i, JobIndex()).insert(job)

    def remove(self, job_id: int) -> None:
        job = self.jobs.pop(job_id)
        c = self.classes.class_of(job.weight)
        self.by_class[c].remove(job_id)
        if not len(self.by_class[c]):
            del self.by_class[c]
        for i in range(heavy_level(job.weight) + 1):
            self.heavy[i].remove(job_id)
            if not len(self.heavy[i]):
                del self.heavy[i]

    def w_hat_level(self, rng: TimeRange) -> int | None:
        """Binary search for the largest i such that a job of weight >= 2**i fits in rng."""

        def fits(i):
            tree = self.heavy.get(i)
            if tree is None:
                return False
            job = tree.successor(rng.lo)
            return job is not None and job.end <= rng.hi

        if not fits(0):
            return None
        lo, hi = 0, max(self.heavy) + 1  # fits(lo) holds, fits(hi) fails
        while hi - lo > 1:
            m = (lo + hi) // 2
            if fits(m):
                lo = m
            else:
                hi = m
        return lo


@dataclass
class EarliestTable:
    """Ladder state -> (earliest end achieving it, jobs used, chain link)."""

    ladder: Ladder
    unit: Fraction
    earliest: dict[int, tuple[int, int, object]] = field(default_factory=dict)

    def best(self, hi: int) -> int:
        return max((s for s, (end, _, _) in self.earliest.items() if end <= hi), default=0)


@dataclass(frozen=True)
class SparseResult:
    value: Fraction
    jobs: tuple
    state: int = 0
    level: int | None = None


def _unwind(link):
    out = []
    while link is not None:
        job, link = link
        out.append(job)
    out.reverse()
    return tuple(out)


def sparse_dp(index: WeightClassIndex, rng: TimeRange, params: ApproxParams | SparseParams,
              table_out: list | None = None) -> SparseResult:
    """Approximate best schedule in ``rng`` competitive with any K-job schedule."""
    sp = params if isinstance(params, SparseParams) else SparseParams.of(params)
    level = index.w_hat_level(rng)
    if level is None:
        return SparseResult(Fraction(0), ())
    moves = transitions(sp, level)
    ladder = moves.ladder
    classes = sorted(c for c in index.by_class if c >= moves.min_class)
    table = EarliestTable(ladder, moves.u)
    earliest = table.earliest
    earliest[0] = (rng.lo, 0, None)
    pending = [0]
    seen = {0}
    while pending:
        s = heapq.heappop(pending)
        start_at, count, link = earliest[s]
        for c in classes:
            job = index.by_class[c].successor(start_at)
            if job is None or job.end > rng.hi:
                continue
            t = moves.step(s, c)
            prev = earliest.get(t)
            if prev is None or job.end < prev[0]:
                earliest[t] = (job.end, count + 1, (job, link))
                if t not in seen:
                    seen.add(t)
                    heapq.heappush(pending, t)
    best = table.best(rng.hi)
    if table_out is not None:
        table_out.append(table)
    return SparseResult(ladder.value(best) * moves.u, _unwind(earliest[best][2]), best, level)


class SparseBatch:
    """Sparse values for every grid pair of one cell, computed together.

    ``grid`` is a sorted integer array; ``jobs`` are the cell's subtree jobs.
    After construction ``level[a, b]`` is the w_hat exponent for the range
    (grid[a], grid[b]) (-1 when no job fits) and ``state[a, b]`` the ladder
    index reached; ``values`` holds the float rewards.
    """

    def __init__(self, params: SparseParams, grid, jobs: Iterable[Job]):
        self.params = params
        grid = np.asarray(grid, dtype=np.int64)
        self.grid = grid
        n = len(grid)
        jobs = sorted(jobs, key=lambda j: j.key)
        self.jobs = jobs
        classes = classes_for(params)
        ladder = ladder_for(params)
        self.values = np.zeros((n, n))
        self.level = np.full((n, n), -1, dtype=np.int64)
        self.state = np.zeros((n, n), dtype=np.int64)
        if not jobs or n < 2:
            return
        starts = np.array([j.start for j in jobs], dtype=np.int64)
        ends = np.array([j.end for j in jobs], dtype=np.int64)
        cls = np.array([classes.class_of(j.weight) for j in jobs], dtype=np.int64)
        lvl = np.array([heavy_level(j.weight) for j in jobs], dtype=np.int64)

        # level[a, b]: number of thresholds 2**i met by some job inside the range, minus one
        inside = (starts[None, None, :] >= grid[:, None, None]) & (ends[None, None, :] <= grid[None, :, None])
        top = np.where(inside, lvl[None, None, :], -1).max(axis=2)
        self.level = top

        rung = np.array(ladder.floats())
        for i in np.unique(top[top >= 0]):
            i = int(i)
            moves = transitions(params, i)
            keep = cls >= moves.min_class
            if not keep.any():
                continue
            trans = transition_table(params, i, int(cls.max()))
            best = self._sweep(trans, starts[keep], ends[keep], cls[keep])
            mask = top == i
            self.state[mask] = best[mask]
            self.values[mask] = rung[best[mask]] * float(moves.u)

    def _sweep(self, trans, starts, ends, cls):
        """best[a, b]: top ladder index from grid[a] using jobs that end by grid[b]."""
        grid = self.grid
        n = len(grid)
        cur = np.zeros(n, dtype=np.int64)
        snap_times = [-1]
        snaps = [cur.copy()]
        for s, e, c in zip(starts.tolist(), ends.tolist(), cls.tolist()):
            pos = bisect.bisect_right(snap_times, s) - 1
            pred = snaps[pos]
            allowed = grid <= s
            cand = np.where(allowed, trans[pred, c], 0)
            np.maximum(cur, cand, out=cur)
            if snap_times[-1] == e:
                snaps[-1] = cur.copy()
            else:
                snap_times.append(e)
                snaps.append(cur.copy())
        stack = np.stack(snaps)  # (events, n_left)
        cols = np.searchsorted(np.array(snap_times), grid, side="right") - 1
        return stack[cols].T  # (n_left, n_right)
