from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from intsched.core import (
    ApproxParams,
    Job,
    Schedule,
    TimeRange,
    ValidationError,
    as_fraction,
    conflicts,
    crosses,
    next_power_of_two,
    schedule_value,
    validate_schedule,
)


def test_job_end_and_key():
    j = Job(3, 2, 5)
    assert j.end == 7
    assert j.key == (7, 2, 3)
    assert j.weight == 1


@pytest.mark.parametrize("kw", [dict(id=-1, start=0, length=1), dict(id=0, start=-1, length=1),
                                dict(id=0, start=0, length=0), dict(id=0, start=0, length=1, weight=Fraction(1, 2))])
def test_job_rejects_bad_fields(kw):
    with pytest.raises(ValueError):
        Job(**kw)


def test_weight_strings_parse():
    assert Job(0, 0, 1, "5/2").weight == Fraction(5, 2)
    assert as_fraction("3") == 3


def test_touching_jobs_do_not_conflict():
    assert not conflicts(Job(0, 0, 2), Job(1, 2, 2))
    assert conflicts(Job(0, 0, 3), Job(1, 2, 2))


def test_crosses_is_strict():
    j = Job(0, 2, 4)
    assert crosses(j, 3)
    assert not crosses(j, 2) and not crosses(j, 6)


def test_k_is_ceiling():
    assert ApproxParams(Fraction(1)).k == 1
    assert ApproxParams(Fraction(1, 3)).k == 3
    assert ApproxParams(Fraction(2, 5)).k == 3
    with pytest.raises(ValueError):
        ApproxParams(0)


def test_time_range():
    r = TimeRange(2, 6)
    assert r.length == 4
    assert r.contains(Job(0, 2, 4)) and not r.contains(Job(1, 1, 2))
    with pytest.raises(ValueError):
        TimeRange(3, 2)


def test_validate_schedule():
    jobs = [Job(0, 0, 2), Job(1, 1, 2), Job(2, 2, 2)]
    assert validate_schedule(jobs, Schedule.single([0, 2]), 1)
    assert not validate_schedule(jobs, Schedule.single([0, 1]), 1)
    assert validate_schedule(jobs, Schedule({0: 0, 1: 1, 2: 0}), 2)
    assert not validate_schedule(jobs, Schedule({0: 2}), 2)
    with pytest.raises(ValidationError) as info:
        validate_schedule(jobs, Schedule.single([9]), 1)
    assert info.value.job_id == 9


def test_schedule_value_and_equality():
    jobs = [Job(0, 0, 2, 3), Job(1, 2, 2, 2)]
    s = Schedule.single([0, 1])
    assert schedule_value(jobs, s) == 5
    assert s == Schedule({1: 0, 0: 0})
    assert hash(s) == hash(Schedule({1: 0, 0: 0}))
    assert len(s) == 2 and 0 in s and s.machine(1) == 0


@given(st.integers(1, 10**6))
def test_next_power_of_two(n):
    p = next_power_of_two(n)
    assert p >= n and p & (p - 1) == 0 and (p == 1 or p // 2 < n)
