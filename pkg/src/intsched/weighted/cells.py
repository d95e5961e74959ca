"""Cell hierarchy: job placement, the P(Q) scaffold and the Z(Q) grids.

The time axis is extended to ``[0, 2N)`` and every job is shifted right by a
random offset.  Cells are dyadic sub-intervals of the extended axis.  A job
belongs to the cell whose length is the power of two in ``[l/eps, 2l/eps)``
and that contains it; if the cell boundary cuts the job, the job is ignored.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from ..core import ApproxParams, Job, conflicts, next_power_of_two

CellId = tuple  # (depth, index)


def axis_length(horizon: int) -> int:
    return 2 * next_power_of_two(horizon)


def band_size(length: int, epsilon: Fraction) -> int:
    """Cell length whose band (eps*|Q|/2, eps*|Q|] holds ``length``."""
    return next_power_of_two(math.ceil(Fraction(length) / epsilon))


def cell_bounds(cell: CellId, axis: int) -> tuple[int, int]:
    depth, index = cell
    size = axis >> depth
    return index * size, (index + 1) * size


def max_depth(axis: int, epsilon: Fraction) -> int:
    smallest = band_size(1, epsilon)
    depth = 0
    while (axis >> (depth + 1)) >= smallest:
        depth += 1
    return depth


def assign_cell(job: Job, offset: int, horizon: int, epsilon) -> CellId | None:
    """Cell that owns ``job`` once shifted by ``offset``, or None if the job is cut."""
    epsilon = Fraction(epsilon)
    axis = axis_length(horizon)
    if not 0 <= offset <= axis // 2:
        raise ValueError(f"offset {offset} outside [0, {axis // 2}]")
    start = job.start + offset
    end = start + job.length
    size = band_size(job.length, epsilon)
    if size >= axis:
        return (0, 0)
    index = start // size
    if end > (index + 1) * size:
        return None
    return (axis.bit_length() - size.bit_length(), index)


@dataclass(frozen=True)
class WeightedPoint:
    time: int
    weight: Fraction
    job_id: int
    kind: str  # "start" or "end"


def job_points(job: Job) -> list[WeightedPoint]:
    return [WeightedPoint(job.start, job.weight, job.id, "start"),
            WeightedPoint(job.end, job.weight, job.id, "end")]


class PointSet:
    """Static weighted multiset of time points with prefix sums for rank queries."""

    def __init__(self, points: Iterable[WeightedPoint]):
        self.points = sorted(points, key=lambda p: (p.time, p.job_id, p.kind))
        times: list[int] = []
        mass: list[Fraction] = []
        for p in self.points:
            if times and times[-1] == p.time:
                mass[-1] += p.weight
            else:
                times.append(p.time)
                mass.append(p.weight)
        self.times = times
        self.mass = mass
        prefix = [Fraction(0)]
        for w in mass:
            prefix.append(prefix[-1] + w)
        self.prefix = prefix

    @property
    def total(self) -> Fraction:
        return self.prefix[-1]

    def __len__(self):
        return len(self.points)

    def weight_between(self, a, b) -> Fraction:
        """Weight of points with a <= time <= b."""
        i = bisect.bisect_left(self.times, a)
        j = bisect.bisect_right(self.times, b)
        return self.prefix[j] - self.prefix[i] if j > i else Fraction(0)

    def weight_open(self, a, b) -> Fraction:
        """Weight of points with a < time < b."""
        i = bisect.bisect_right(self.times, a)
        j = bisect.bisect_left(self.times, b)
        return self.prefix[j] - self.prefix[i] if j > i else Fraction(0)

    def quantile_times(self, step) -> list[int]:
        """Times at which the running weight crosses a multiple of ``step``.

        Between two consecutive returned times (exclusive) the points weigh
        less than ``step``.
        """
        if step <= 0 or not self.times:
            return []
        out = []
        for t, before, after in zip(self.times, self.prefix, self.prefix[1:]):
            if after // step > before // step:
                out.append(t)
        return out


@dataclass
class Cell:
    depth: int
    index: int
    lo: int
    hi: int
    assigned: dict = field(default_factory=dict)   # jobs placed here, C'(Q)
    subtree: dict = field(default_factory=dict)    # jobs placed here or below, C(Q)
    chosen: dict = field(default_factory=dict)     # scaffold jobs picked here
    points: PointSet = field(default_factory=lambda: PointSet(()))
    z_prime: list = field(default_factory=list)
    z: list = field(default_factory=list)
    # filled by combine
    grid: object = None
    zrows: object = None
    dense: object = None
    choice: object = None
    kind: object = None
    class_index: object = None

    @property
    def key(self) -> CellId:
        return (self.depth, self.index)

    @property
    def length(self) -> int:
        return self.hi - self.lo


def scaffold_grid(lo: int, hi: int, points: PointSet, log_n: int, extra=()) -> list[int]:
    """Z'(Q): cell ends, quantiles of P(Q) every w(P)/(4 log N), chosen endpoints."""
    zs = {lo, hi}
    total = points.total
    if total > 0:
        zs.update(points.quantile_times(total / (4 * log_n)))
    zs.update(extra)
    return sorted(zs)


def rebuild_pq(cell: Cell, child_points: Iterable[WeightedPoint], log_n: int) -> None:
    """Greedy scaffold over C'(Q): admit the shortest job heavy enough for its slice.

    A job is addable when its weight is at least twice the P(Q) weight strictly
    inside the tightest Z'(Q) segment around it and at least twice the weight of the
    scaffold jobs it overlaps; those are evicted on admission.  Each
    admission raises the scaffold weight by at least half the new job's
    weight, so the loop ends.
    """
    base = list(child_points)
    chosen: dict[int, Job] = {}
    while True:
        pts = base + [p for job in chosen.values() for p in job_points(job)]
        points = PointSet(pts)
        ends = [t for job in chosen.values() for t in (job.start, job.end)]
        zs = scaffold_grid(cell.lo, cell.hi, points, log_n, ends)
        pick = None
        for job in cell.assigned.values():
            if job.id in chosen:
                continue
            a = zs[bisect.bisect_right(zs, job.start) - 1]
            b = zs[bisect.bisect_left(zs, job.end)]
            if job.weight < 2 * points.weight_open(a, b):
                continue
            overlap = sum((c.weight for c in chosen.values() if conflicts(c, job)), Fraction(0))
            if job.weight < 2 * overlap:
                continue
            if pick is None or (job.length, job.key) < (pick.length, pick.key):
                pick = job
        if pick is None:
            break
        for other in [c for c in chosen.values() if conflicts(c, pick)]:
            del chosen[other.id]
        chosen[pick.id] = pick
    cell.chosen = chosen
    cell.points = points
    cell.z_prime = zs


def even_points(lo: int, hi: int, k: int) -> list[int]:
    """2K+1 evenly spaced integer points; any job longer than half an eps-slot contains one."""
    return [lo + (i * (hi - lo)) // (2 * k) for i in range(2 * k + 1)]


def slice_bound(params: ApproxParams, log_n: int) -> Fraction:
    return params.epsilon ** 4 / (log_n * log_n)


def rebuild_z(cell: Cell, params: ApproxParams, log_n: int) -> None:
    zs = set(even_points(cell.lo, cell.hi, params.k))
    total = cell.points.total
    if total > 0:
        zs.update(cell.points.quantile_times(slice_bound(params, log_n) * total))
    cell.z = sorted(zs)


def default_z(lo: int, hi: int, params: ApproxParams) -> list[int]:
    """Grid of a cell with nothing below it."""
    return sorted(set(even_points(lo, hi, params.k)))
