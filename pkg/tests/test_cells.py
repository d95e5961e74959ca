import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from intsched.core import ApproxParams, Job
from intsched.weighted.cells import (
    Cell,
    PointSet,
    WeightedPoint,
    assign_cell,
    axis_length,
    band_size,
    cell_bounds,
    default_z,
    even_points,
    rebuild_pq,
    rebuild_z,
)

from weighted_cases import audit_cell, random_instance


def test_axis_and_bands():
    assert axis_length(16) == 32 and axis_length(17) == 64
    assert band_size(1, Fraction(1, 4)) == 4
    assert band_size(3, Fraction(1, 4)) == 16
    assert cell_bounds((2, 3), 32) == (24, 32)


def test_assign_cell_examples():
    eps = Fraction(1, 4)
    # a job of length N only fits the root
    assert assign_cell(Job(0, 0, 16), 0, 16, eps) == (0, 0)
    assert assign_cell(Job(0, 0, 16), 7, 16, eps) == (0, 0)
    # offset 0, job [0, eps * axis): cell of length axis at depth 0
    assert assign_cell(Job(1, 0, 8), 0, 16, eps) == (0, 0)
    # a short job lands deep; a cut job is ignored
    assert assign_cell(Job(2, 0, 1), 0, 16, eps) == (3, 0)
    assert assign_cell(Job(3, 7, 2), 0, 16, eps) is None
    with pytest.raises(ValueError):
        assign_cell(Job(4, 0, 1), 40, 16, eps)


@given(st.integers(0, 200), st.integers(1, 40), st.integers(0, 256))
def test_assigned_cell_contains_job_and_band(start, length, offset):
    horizon = 256
    eps = Fraction(1, 4)
    if start + length > horizon:
        return
    job = Job(0, start, length)
    cell = assign_cell(job, offset, horizon, eps)
    if cell is None:
        return
    lo, hi = cell_bounds(cell, axis_length(horizon))
    assert lo <= start + offset and start + offset + length <= hi
    size = hi - lo
    assert size == axis_length(horizon) or eps * size / 2 < length <= eps * size


def test_unit_jobs_are_rarely_ignored():
    r = random.Random(0)
    eps = Fraction(1, 4)
    ignored = sum(assign_cell(Job(0, r.randint(0, 1023), 1), r.randint(0, 1024), 1024, eps) is None
                  for _ in range(10_000))
    assert ignored <= 4 * eps * 10_000


def test_point_set_queries():
    pts = PointSet([WeightedPoint(2, Fraction(3), 0, "start"), WeightedPoint(5, Fraction(3), 0, "end"),
                    WeightedPoint(5, Fraction(1), 1, "start")])
    assert pts.total == 7
    assert pts.weight_between(2, 5) == 7
    assert pts.weight_open(2, 5) == 0
    assert pts.quantile_times(Fraction(7, 2)) == [5]


def test_empty_cell_has_empty_scaffold():
    cell = Cell(0, 0, 0, 16)
    rebuild_pq(cell, [], 4)
    assert cell.points.total == 0 and not cell.chosen
    rebuild_z(cell, ApproxParams(Fraction(1, 2)), 4)
    assert cell.z == default_z(0, 16, ApproxParams(Fraction(1, 2))) == even_points(0, 16, 2)
    assert cell.z[0] == 0 and cell.z[-1] == 16


def test_single_job_is_admitted():
    cell = Cell(0, 0, 0, 16)
    job = Job(0, 3, 4, 5)
    cell.assigned[0] = job
    rebuild_pq(cell, [], 4)
    assert list(cell.chosen) == [0]
    assert [p.time for p in cell.points.points] == [3, 7]
    assert cell.points.total == 10


def test_heavier_job_evicts_overlapping_lighter():
    cell = Cell(0, 0, 0, 64)
    cell.assigned = {0: Job(0, 10, 8, 1), 1: Job(1, 12, 10, 9)}
    rebuild_pq(cell, [], 6)
    assert list(cell.chosen) == [1]


def test_heavy_point_lands_in_z():
    cell = Cell(0, 0, 0, 64)
    cell.assigned = {0: Job(0, 13, 1, 50)}
    rebuild_pq(cell, [], 6)
    rebuild_z(cell, ApproxParams(Fraction(1, 4)), 6)
    assert 13 in cell.z and 14 in cell.z


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_random_cells_pass_audit(seed):
    inst = random_instance(random.Random(seed))
    for cell in inst.cells.values():
        assert audit_cell(inst, cell) == []
