"""Dynamic weighted interval scheduling on one machine.

Each update touches the cells on one root path, bottom-up.  A cell combines
its children through a segment DP over the union of the three grids: a
segment is either a sparse range solved by the few-jobs search, or a range
between two grid points of a child whose dense value is already known.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from ..core import ApproxParams, DuplicateJobError, Job, Schedule, TimeRange, UnknownJobError, next_power_of_two
from .cells import (
    Cell,
    assign_cell,
    axis_length,
    cell_bounds,
    default_z,
    max_depth,
    rebuild_pq,
    rebuild_z,
)
from .sparse import SparseBatch, SparseParams, WeightClassIndex, sparse_dp

SPARSE, LEFT, RIGHT = 0, 1, 2


class OffsetInstance:
    """All cells for one random shift of the time axis."""

    def __init__(self, params: ApproxParams, horizon: int, offset: int):
        self.params = params
        self.sparse_params = SparseParams.of(params)
        self.horizon = horizon
        self.axis = axis_length(horizon)
        self.log_n = self.axis.bit_length() - 1
        self.offset = offset
        self.depth_limit = max_depth(self.axis, params.epsilon)
        self.cells: dict[tuple, Cell] = {}
        self.placement: dict[int, tuple | None] = {}
        self._value: Fraction | None = Fraction(0)
        self._solution: list[Job] | None = []

    # placement ------------------------------------------------------------

    def _path(self, key):
        depth, index = key
        while depth >= 0:
            yield (depth, index)
            depth -= 1
            index //= 2

    def _cell(self, key) -> Cell:
        cell = self.cells.get(key)
        if cell is None:
            lo, hi = cell_bounds(key, self.axis)
            cell = Cell(key[0], key[1], lo, hi)
            self.cells[key] = cell
        return cell

    def insert(self, job: Job) -> None:
        key = assign_cell(job, self.offset, self.horizon, self.params.epsilon)
        self.placement[job.id] = key
        if key is None:
            return
        shifted = Job(job.id, job.start + self.offset, job.length, job.weight)
        for k in self._path(key):
            cell = self._cell(k)
            cell.subtree[job.id] = shifted
            if k == key:
                cell.assigned[job.id] = shifted
        self._update_path(key)

    def delete(self, job_id: int) -> None:
        key = self.placement.pop(job_id)
        if key is None:
            return
        for k in self._path(key):
            cell = self.cells[k]
            del cell.subtree[job_id]
            cell.assigned.pop(job_id, None)
            if not cell.subtree:
                del self.cells[k]
        self._update_path(key)

    def _update_path(self, key) -> None:
        for k in self._path(key):
            cell = self.cells.get(k)
            if cell is not None:
                self.refresh(cell)
        self._value = None
        self._solution = None

    # per-cell work -----------------------------------------------------

    def children(self, cell: Cell):
        if cell.depth >= self.depth_limit:
            return ()
        d = cell.depth + 1
        return ((d, 2 * cell.index), (d, 2 * cell.index + 1))

    def refresh(self, cell: Cell) -> None:
        child_points = []
        for k in self.children(cell):
            child = self.cells.get(k)
            if child is not None:
                child_points.extend(child.points.points)
        rebuild_pq(cell, child_points, self.log_n)
        rebuild_z(cell, self.params, self.log_n)
        self.combine(cell)

    def combine(self, cell: Cell) -> None:
        kids = []
        grid = set(cell.z)
        for side, k in zip((LEFT, RIGHT), self.children(cell)):
            child = self.cells.get(k)
            if child is None:
                lo, hi = cell_bounds(k, self.axis)
                grid.update(default_z(lo, hi, self.params))
            else:
                grid.update(child.z)
                kids.append((side, child))
        grid = np.array(sorted(grid), dtype=np.int64)
        n = len(grid)
        batch = SparseBatch(self.sparse_params, grid, cell.subtree.values())
        seg = batch.values.copy()
        kind = np.zeros((n, n), dtype=np.int8)
        for side, child in kids:
            pos = np.searchsorted(grid, child.z)
            sub = child.dense[:, child.zrows]
            block = seg[np.ix_(pos, pos)]
            better = sub > block
            seg[np.ix_(pos, pos)] = np.where(better, sub, block)
            kblock = kind[np.ix_(pos, pos)]
            kind[np.ix_(pos, pos)] = np.where(better, side, kblock)

        zrows = np.searchsorted(grid, cell.z)
        nz = len(zrows)
        dense = np.full((nz, n), -np.inf)
        dense[np.arange(nz), zrows] = 0.0
        choice = np.full((nz, n), -1, dtype=np.int32)
        rows = np.arange(nz)
        for y in range(1, n):
            active = zrows < y
            if not active.any():
                continue
            cand = dense[:, :y] + seg[:y, y][None, :]
            x = cand.argmax(axis=1)
            best = cand[rows, x]
            skip = dense[:, y - 1]
            use = best > skip
            dense[active, y] = np.where(use, best, skip)[active]
            choice[active, y] = np.where(use, x, -1)[active]
        cell.grid = grid
        cell.zrows = zrows
        cell.dense = dense
        cell.choice = choice
        cell.kind = kind
        cell.class_index = None

    # answers --------------------------------------------------------------

    def _class_index(self, cell: Cell) -> WeightClassIndex:
        if cell.class_index is None:
            cell.class_index = WeightClassIndex(self.sparse_params, cell.subtree.values())
        return cell.class_index

    def extract(self, cell: Cell, a: int, b: int) -> tuple[list[Job], Fraction]:
        """Jobs and exact rounded value of the dense solution of ``cell`` on [a, b]."""
        grid = cell.grid
        r = int(np.searchsorted(cell.z, a))
        y = int(np.searchsorted(grid, b))
        stop = int(cell.zrows[r])
        jobs: list[Job] = []
        total = Fraction(0)
        kids = dict(zip((LEFT, RIGHT), self.children(cell)))
        while y > stop:
            x = int(cell.choice[r, y])
            if x < 0:
                y -= 1
                continue
            lo, hi = int(grid[x]), int(grid[y])
            k = int(cell.kind[x, y])
            if k == SPARSE:
                res = sparse_dp(self._class_index(cell), TimeRange(lo, hi), self.sparse_params)
                jobs.extend(res.jobs)
                total += res.value
            else:
                sub_jobs, sub_value = self.extract(self.cells[kids[k]], lo, hi)
                jobs.extend(sub_jobs)
                total += sub_value
            y = x
        return jobs, total

    def _solve(self):
        root = self.cells.get((0, 0))
        if root is None:
            self._value, self._solution = Fraction(0), []
            return
        jobs, value = self.extract(root, 0, self.axis)
        self._solution = [Job(j.id, j.start - self.offset, j.length, j.weight) for j in jobs]
        self._value = value

    def value(self) -> Fraction:
        if self._value is None:
            self._solve()
        return self._value

    def solution(self) -> list[Job]:
        if self._solution is None:
            self._solve()
        return self._solution

    def root_estimate(self) -> float:
        root = self.cells.get((0, 0))
        if root is None:
            return 0.0
        return float(root.dense[0, -1])

    def dump(self) -> list[str]:
        lines = []
        for key in sorted(self.cells):
            c = self.cells[key]
            table = 0 if c.dense is None else c.dense.size
            lines.append(
                f"cell depth={c.depth} lo={c.lo} hi={c.hi} assigned={len(c.assigned)} "
                f"subtree={len(c.subtree)} p={len(c.points)} z={len(c.z)} dp={table}"
            )
        return lines


class WeightedDynamic:
    """Several offset instances side by side; the best one answers."""

    def __init__(self, params: ApproxParams, horizon: int, offsets: int = 5, seed: int = 0):
        if offsets < 1:
            raise ValueError("need at least one offset")
        self.params = params
        self.horizon = horizon
        self.seed = seed
        rng = random.Random(seed)
        top = next_power_of_two(horizon)
        self.offsets = [rng.randint(0, top) for _ in range(offsets)]
        self.instances = [OffsetInstance(params, horizon, o) for o in self.offsets]
        self.jobs: dict[int, Job] = {}

    def insert(self, job: Job) -> None:
        if job.id in self.jobs:
            raise DuplicateJobError(job.id)
        if job.end > self.horizon:
            raise ValueError(f"job {job.id} ends after the horizon {self.horizon}")
        self.jobs[job.id] = job
        for inst in self.instances:
            inst.insert(job)

    def delete(self, job_id: int) -> None:
        if job_id not in self.jobs:
            raise UnknownJobError(job_id)
        del self.jobs[job_id]
        for inst in self.instances:
            inst.delete(job_id)

    def _best(self) -> OffsetInstance:
        return max(self.instances, key=lambda inst: inst.value())

    def value(self) -> Fraction:
        return self._best().value()

    query_value = value

    def extract_solution(self) -> Schedule:
        return Schedule.single(j.id for j in self._best().solution())

    schedule = extract_solution

    def query(self, job_id: int) -> bool:
        if job_id not in self.jobs:
            raise UnknownJobError(job_id)
        return job_id in self.extract_solution()

    def __len__(self):
        return len(self.jobs)

    def check_invariants(self) -> list[str]:
        problems = []
        for inst in self.instances:
            jobs = inst.solution()
            ordered = sorted(jobs, key=lambda j: j.start)
            for a, b in zip(ordered, ordered[1:]):
                if b.start < a.end:
                    problems.append(f"offset {inst.offset}: {a} overlaps {b}")
            if inst.value() > sum((j.weight for j in jobs), Fraction(0)):
                problems.append(f"offset {inst.offset}: value exceeds extracted weight")
        return problems

