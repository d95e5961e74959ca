"""Fully dynamic approximate interval scheduling on one machine.

Time is cut into regions by borders. Jobs crossing a border are ignored, and
each region keeps the exact earliest-end greedy solution of the jobs inside it.
Regions are kept between K and 2K chosen jobs, so every border costs at most
one job of an optimal schedule while each region holds at least K.
"""

from __future__ import annotations

from fractions import Fraction

from sortedcontainers import SortedList

from .core import ApproxParams, DuplicateJobError, Job, Schedule, UnknownJobError
from .jobindex import JobIndex


class DynamicMIS:
    def __init__(self, params: ApproxParams, horizon: int):
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        self.params = params
        self.k = params.k
        # regions hold between `low` (inclusive) and `high` (exclusive) chosen jobs
        self.low = self.k
        self.high = 2 * self.k
        self.horizon = horizon
        self.all_jobs = JobIndex()
        self.borders = SortedList([0, horizon])
        self.right: dict[int, int] = {0: horizon}  # left border -> next border
        self.regions: dict[int, list[Job]] = {0: []}  # left border -> chosen jobs
        self.solution: dict[int, Job] = {}
        self.work = 0  # successor lookups, cumulative

    # region bookkeeping -------------------------------------------------

    def _region_of(self, job: Job) -> int | None:
        """Left border of the region containing ``job``, or None if it crosses a border."""
        lo = self.borders[self.borders.bisect_right(job.start) - 1]
        if self.right[lo] < job.end:
            return None
        return lo

    def _right_of(self, lo: int) -> int:
        return self.right[lo]

    def _greedy(self, lo: int, hi: int) -> list[Job]:
        chosen = []
        x = lo
        while True:
            self.work += 1
            job = self.all_jobs.successor(x)
            if job is None or job.end > hi:
                return chosen
            chosen.append(job)
            x = job.end

    def _store(self, lo: int, chosen: list[Job]) -> None:
        for job in self.regions.get(lo, ()):
            self.solution.pop(job.id, None)
        self.regions[lo] = chosen
        for job in chosen:
            self.solution[job.id] = job

    def _refresh(self, lo: int) -> None:
        """Recompute the region starting at ``lo`` and rebalance it."""
        hi = self._right_of(lo)
        chosen = self._greedy(lo, hi)
        if len(chosen) < self.low and len(self.borders) > 2:
            self._merge(lo)
            return
        self._store(lo, chosen)
        self._split_while_large(lo)

    def _split_while_large(self, lo: int) -> None:
        while len(self.regions[lo]) >= self.high:
            chosen = self.regions[lo]
            cut = chosen[self.low - 1].end
            hi = self._right_of(lo)
            self.borders.add(cut)
            self.right[lo] = cut
            self.right[cut] = hi
            self._store(lo, self._greedy(lo, cut))
            self.regions[cut] = []
            self._store(cut, self._greedy(cut, hi))
            lo = cut

    def _merge(self, lo: int) -> None:
        pos = self.borders.index(lo)
        if pos > 0:
            # fold this region into its left neighbour
            left = self.borders[pos - 1]
            self._store(lo, [])
            del self.regions[lo]
            self.borders.remove(lo)
            self.right[left] = self.right.pop(lo)
            target = left
        else:
            # no left neighbour: absorb the right one
            right = self.borders[pos + 1]
            self._store(right, [])
            del self.regions[right]
            self.borders.remove(right)
            self.right[lo] = self.right.pop(right)
            target = lo
        hi = self._right_of(target)
        self._store(target, self._greedy(target, hi))
        self._split_while_large(target)

    # public interface ---------------------------------------------------

    def insert(self, job: Job) -> None:
        if job.id in self.all_jobs:
            raise DuplicateJobError(job.id)
        if job.end > self.horizon:
            raise ValueError(f"job {job.id} ends after the horizon {self.horizon}")
        self.all_jobs.insert(job)
        lo = self._region_of(job)
        if lo is None:
            return
        self._refresh(lo)

    def delete(self, job_id: int) -> None:
        if job_id not in self.all_jobs:
            raise UnknownJobError(job_id)
        job = self.all_jobs.remove(job_id)
        if job_id not in self.solution:
            return
        self._refresh(self._region_of(job))

    def query_in_solution(self, job_id: int) -> bool:
        if job_id not in self.all_jobs:
            raise UnknownJobError(job_id)
        return job_id in self.solution

    query = query_in_solution

    def solution_size(self) -> int:
        return len(self.solution)

    def value(self) -> Fraction:
        return Fraction(len(self.solution))

    def schedule(self) -> Schedule:
        return Schedule.single(self.solution)

    def __len__(self):
        return len(self.all_jobs)

    def region_sizes(self) -> list[tuple[int, int, int]]:
        """(lo, hi, size) for every region, left to right."""
        out = []
        for lo, hi in zip(self.borders, self.borders[1:]):
            out.append((lo, hi, len(self.regions[lo])))
        return out

    def _overlap_problems(self) -> list[str]:
        chosen = sorted(self.solution.values(), key=lambda j: j.start)
        return [f"{a} overlaps {b}" for a, b in zip(chosen, chosen[1:]) if b.start < a.end]

    def check_invariants(self) -> list[str]:
        """Return human-readable invariant violations (empty when healthy)."""
        problems = []
        sizes = self.region_sizes()
        if self.borders[0] != 0 or self.borders[-1] != self.horizon:
            problems.append("sentinel borders missing")
        if self.right != dict(zip(self.borders, self.borders[1:])):
            problems.append("right-neighbour map out of sync with borders")
        for lo, hi, size in sizes:
            if size >= self.high:
                problems.append(f"region [{lo},{hi}] holds {size} >= {self.high}")
            if len(sizes) > 1 and size < self.low:
                problems.append(f"region [{lo},{hi}] holds {size} < {self.low}")
            for job in self.regions[lo]:
                if job.start < lo or job.end > hi:
                    problems.append(f"{job} escapes region [{lo},{hi}]")
        problems.extend(self._overlap_problems())
        if sum(s for _, _, s in sizes) != len(self.solution):
            problems.append("solution index out of sync with regions")
        return problems
