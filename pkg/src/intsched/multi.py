"""Scheduling on M identical machines.

Three engines live here:

* :class:`MultiDynamic` keeps the region/border structure of the one-machine
  engine but solves each region with the M-machine earliest-end greedy.
* :class:`WeightedMultiDynamic` handles weights: each region runs a weighted
  maximum independent set M times on the residual jobs, with weights rounded
  down to powers of (1+eps).
* :class:`PartitionState` sends every job to a uniformly random machine and
  lets an independent one-machine engine handle each machine.
"""

from __future__ import annotations

import bisect
import hashlib
from fractions import Fraction
from typing import Callable

from sortedcontainers import SortedList

from .core import (
    ApproxParams,
    DuplicateJobError,
    Job,
    Schedule,
    UnknownJobError,
    as_fraction,
    validate_schedule,
    ValidationError,
)
from .dynamic import DynamicMIS
from .oracles import best_fit, exact_weighted_1m, greedy_unweighted_1m


class MultiDynamic(DynamicMIS):
    """Border-separated regions, each holding the exact M-machine greedy of its jobs.

    A region splits once its greedy picks ``2MK + M - 1`` jobs, with the new
    border at the end of the MK-th pick; it merges with a neighbour when the
    greedy drops below MK.  For ``m == 1`` this is exactly :class:`DynamicMIS`.
    """

    def __init__(self, params: ApproxParams, m: int, horizon: int):
        if m < 1:
            raise ValueError("need at least one machine")
        super().__init__(params, horizon)
        self.m = m
        self.low = m * self.k
        self.high = 2 * m * self.k + m - 1
        self.machine_of: dict[int, int] = {}

    def _greedy(self, lo: int, hi: int) -> list[Job]:
        """M-machine greedy inside [lo, hi] via successor lookups that skip picked jobs."""
        frees = [lo] * self.m
        chosen = []
        taken = set()
        while True:
            job = None
            for cand in self.all_jobs.iter_successors(min(frees)):
                self.work += 1
                if cand.id not in taken:
                    job = cand
                    break
            if job is None or job.end > hi:
                return chosen
            machine = best_fit(frees, job.start)
            frees[machine] = job.end
            taken.add(job.id)
            chosen.append(job)
            self.machine_of[job.id] = machine

    def query_machine(self, job_id: int) -> int | None:
        if job_id not in self.all_jobs:
            raise UnknownJobError(job_id)
        return self.machine_of[job_id] if job_id in self.solution else None

    def schedule(self) -> Schedule:
        return Schedule({i: self.machine_of[i] for i in self.solution})

    def _overlap_problems(self) -> list[str]:
        try:
            ok = validate_schedule(self.solution.values(), self.schedule(), self.m)
        except ValidationError as exc:
            return [str(exc)]
        return [] if ok else ["machine schedule has overlapping jobs"]


# weighted M-machine ---------------------------------------------------------


def rounded_reward(weight, epsilon) -> int:
    """Weight rounded down to a power of (1+eps), scaled by 1/eps, floored."""
    w = as_fraction(weight)
    base = 1 + as_fraction(epsilon)
    p = Fraction(1)
    while p * base <= w:
        p *= base
    return int(p / as_fraction(epsilon))


def _mis_rounds(jobs: list[Job], m: int, reward: Callable[[Job], int]) -> dict[int, int]:
    """Weighted MIS taken M times on the residual jobs; job id -> round (= machine)."""
    left = sorted(jobs, key=lambda j: j.key)
    plan: dict[int, int] = {}
    for machine in range(m):
        if not left:
            break
        ends = [j.end for j in left]
        best = [0] * (len(left) + 1)
        for i, job in enumerate(left, start=1):
            p = bisect.bisect_right(ends, job.start, 0, i - 1)
            best[i] = max(best[i - 1], best[p] + reward(job))
        picked = set()
        i = len(left)
        while i > 0:
            if best[i] == best[i - 1]:
                i -= 1
                continue
            job = left[i - 1]
            picked.add(job.id)
            plan[job.id] = machine
            i = bisect.bisect_right(ends, job.start, 0, i - 1)
        left = [j for j in left if j.id not in picked]
    return plan


class WeightedMultiDynamic:
    """Weighted M-machine regions kept inside a reward band.

    Rewards are integers: weights rounded down to powers of (1+eps) and scaled
    by 1/eps.  Below, ``w`` is the reward of a job of weight ``w_cap``.  A
    region's reward is that of its M-round solution; it splits at the smallest
    prefix worth ``4 M w K`` once it exceeds ``8 M w K + 2 M w`` and merges
    when it falls under ``M w K``.
    """

    def __init__(self, params: ApproxParams, m: int, horizon: int, w_cap):
        if m < 1:
            raise ValueError("need at least one machine")
        self.params = params
        self.m = m
        self.k = params.k
        self.horizon = horizon
        self.w_cap = as_fraction(w_cap)
        if self.w_cap < 1:
            raise ValueError("w_cap must be at least 1")
        self.jobs: dict[int, Job] = {}
        self.by_start = SortedList(key=lambda j: (j.start, j.end, j.id))
        self.borders = SortedList([0, horizon])
        self.plans: dict[int, dict[int, int]] = {0: {}}
        self._rewards: dict[int, int] = {}
        cap = rounded_reward(self.w_cap, params.epsilon)
        self.split_at = 4 * m * cap * self.k
        self.low = m * cap * self.k
        self.high = 8 * m * cap * self.k + 2 * m * cap
        self.solves = 0

    def _reward(self, job: Job) -> int:
        return self._rewards[job.id]

    def _inside(self, lo, hi) -> list[Job]:
        jobs = self.by_start.irange_key((lo,), (hi,), inclusive=(True, False))
        return [j for j in jobs if j.end <= hi]

    def _solve(self, lo, hi) -> dict[int, int]:
        self.solves += 1
        return _mis_rounds(self._inside(lo, hi), self.m, self._reward)

    def _plan_reward(self, plan) -> int:
        return sum(self._rewards[i] for i in plan)

    def _region_of(self, job: Job) -> int | None:
        idx = self.borders.bisect_right(job.start)
        if self.borders[idx] < job.end:
            return None
        return self.borders[idx - 1]

    def _right_of(self, lo):
        return self.borders[self.borders.index(lo) + 1]

    def _refresh(self, lo) -> None:
        hi = self._right_of(lo)
        plan = self._solve(lo, hi)
        if self._plan_reward(plan) < self.low and len(self.borders) > 2:
            self._merge(lo)
            return
        self.plans[lo] = plan
        self._split_while_large(lo)

    def _split_while_large(self, lo) -> None:
        while self._plan_reward(self.plans[lo]) > self.high:
            hi = self._right_of(lo)
            ends = sorted({j.end for j in self._inside(lo, hi)})
            # smallest prefix [lo, t] whose solution reaches the split reward
            a, b = 0, len(ends) - 1
            while a < b:
                mid = (a + b) // 2
                if self._plan_reward(self._solve(lo, ends[mid])) >= self.split_at:
                    b = mid
                else:
                    a = mid + 1
            cut = ends[a]
            if cut >= hi:
                break
            right = self._solve(cut, hi)
            if self._plan_reward(right) < self.low:
                break
            self.borders.add(cut)
            self.plans[lo] = self._solve(lo, cut)
            self.plans[cut] = right
            lo = cut

    def _merge(self, lo) -> None:
        pos = self.borders.index(lo)
        if pos > 0:
            target = self.borders[pos - 1]
            drop = lo
        else:
            target = lo
            drop = self.borders[pos + 1]
        del self.plans[drop]
        self.borders.remove(drop)
        self._refresh(target)

    # public interface ---------------------------------------------------

    def insert(self, job: Job) -> None:
        if job.id in self.jobs:
            raise DuplicateJobError(job.id)
        if job.weight > self.w_cap:
            raise ValueError(f"job {job.id} weight {job.weight} exceeds w_cap {self.w_cap}")
        if job.end > self.horizon:
            raise ValueError(f"job {job.id} ends after the horizon {self.horizon}")
        self.jobs[job.id] = job
        self._rewards[job.id] = rounded_reward(job.weight, self.params.epsilon)
        self.by_start.add(job)
        lo = self._region_of(job)
        if lo is not None:
            self._refresh(lo)

    def delete(self, job_id: int) -> None:
        if job_id not in self.jobs:
            raise UnknownJobError(job_id)
        job = self.jobs.pop(job_id)
        self.by_start.remove(job)
        lo = self._region_of(job)
        if lo is not None:
            self._refresh(lo)
        del self._rewards[job_id]

    def schedule(self) -> Schedule:
        out = {}
        for plan in self.plans.values():
            out.update(plan)
        return Schedule(out)

    def query_machine(self, job_id: int) -> int | None:
        if job_id not in self.jobs:
            raise UnknownJobError(job_id)
        lo = self._region_of(self.jobs[job_id])
        return None if lo is None else self.plans[lo].get(job_id)

    def value(self) -> Fraction:
        return sum((self.jobs[i].weight for plan in self.plans.values() for i in plan), Fraction(0))

    def __len__(self):
        return len(self.jobs)

    def region_rewards(self) -> list[tuple[int, int, int]]:
        return [(lo, hi, self._plan_reward(self.plans[lo])) for lo, hi in zip(self.borders, self.borders[1:])]

    def check_invariants(self) -> list[str]:
        problems = []
        regions = self.region_rewards()
        for lo, hi, r in regions:
            if r > self.high:
                problems.append(f"region [{lo},{hi}] reward {r} above {self.high}")
            if len(regions) > 1 and r < self.low:
                problems.append(f"region [{lo},{hi}] reward {r} below {self.low}")
        try:
            if not validate_schedule(self.jobs.values(), self.schedule(), self.m):
                problems.append("machine schedule has overlapping jobs")
        except ValidationError as exc:
            problems.append(str(exc))
        return problems


# random partition -------------------------------------------------------------


class ExactEngine:
    """One-machine engine that recomputes the exact optimum on demand."""

    def __init__(self, weighted: bool = True):
        self.weighted = weighted
        self.jobs: dict[int, Job] = {}
        self._cache = None

    def insert(self, job: Job) -> None:
        if job.id in self.jobs:
            raise DuplicateJobError(job.id)
        self.jobs[job.id] = job
        self._cache = None

    def delete(self, job_id: int) -> None:
        if job_id not in self.jobs:
            raise UnknownJobError(job_id)
        del self.jobs[job_id]
        self._cache = None

    def _result(self):
        if self._cache is None:
            solve = exact_weighted_1m if self.weighted else greedy_unweighted_1m
            self._cache = solve(self.jobs.values())
        return self._cache

    def value(self) -> Fraction:
        return self._result().value

    def schedule(self) -> Schedule:
        return self._result().solution

    def query(self, job_id: int) -> bool:
        if job_id not in self.jobs:
            raise UnknownJobError(job_id)
        return job_id in self._result().solution


def machine_draw(seed: int, counter: int, m: int) -> int:
    """Counter-based uniform draw: the same (seed, counter) always gives the same machine."""
    digest = hashlib.blake2b(f"{seed}:{counter}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") % m


class PartitionState:
    """Random assignment of jobs to machines, one independent engine per machine."""

    def __init__(self, m: int, seed: int, engine: Callable[[], object]):
        if m < 1:
            raise ValueError("need at least one machine")
        self.m = m
        self.seed = seed
        self.engines = [engine() for _ in range(m)]
        self.assignment: dict[int, int] = {}
        self.draws = 0
        self.forwarded = 0

    def insert(self, job: Job) -> None:
        if job.id in self.assignment:
            raise DuplicateJobError(job.id)
        machine = machine_draw(self.seed, self.draws, self.m)
        self.draws += 1
        self.engines[machine].insert(job)
        self.forwarded += 1
        self.assignment[job.id] = machine

    def delete(self, job_id: int) -> None:
        if job_id not in self.assignment:
            raise UnknownJobError(job_id)
        self.engines[self.assignment.pop(job_id)].delete(job_id)
        self.forwarded += 1

    def query(self, job_id: int) -> int | None:
        """Machine running ``job_id``, or None when its machine's engine leaves it out."""
        if job_id not in self.assignment:
            raise UnknownJobError(job_id)
        machine = self.assignment[job_id]
        self.forwarded += 1
        return machine if self.engines[machine].query(job_id) else None

    def value(self) -> Fraction:
        return sum((e.value() for e in self.engines), Fraction(0))

    def schedule(self) -> Schedule:
        out = {}
        for machine, engine in enumerate(self.engines):
            for job_id in engine.schedule().ids:
                out[job_id] = machine
        return Schedule(out)

    def __len__(self):
        return len(self.assignment)


def recurrence_lower_bound(x: int, m: int) -> Fraction:
    """f(X) = (1 - 1/M) f(X-1) + (1/M) (f(X-M) + 1), f(X <= 0) = 0, evaluated exactly.

    Raises ArithmeticError if the value falls below X/(2M-1).
    """
    if x < 0 or m < 1:
        raise ValueError("need x >= 0 and m >= 1")
    f = _recurrence_table(m, x)
    value = f[x]
    if value < Fraction(x, 2 * m - 1):
        raise ArithmeticError(f"f({x}, {m}) = {value} < {x}/(2*{m}-1)")
    return value


_TABLES: dict[int, list[Fraction]] = {}


def _recurrence_table(m: int, x: int) -> list[Fraction]:
    f = _TABLES.setdefault(m, [Fraction(0)])
    stay = 1 - Fraction(1, m)
    while len(f) <= x:
        n = len(f)
        prev = f[n - 1]
        back = f[n - m] if n - m >= 0 else Fraction(0)
        f.append(stay * prev + (back + 1) / m)
    return f
