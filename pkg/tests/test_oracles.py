import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from intsched.core import Job, Schedule, TimeRange, validate_schedule
from intsched.oracles import (
    InstanceTooLarge,
    best_fit,
    exact_sparse_opt,
    exact_weighted_1m,
    exact_weighted_Mm_bruteforce,
    greedy_unweighted_1m,
    greedy_unweighted_Mm,
)

from helpers import brute_machines, brute_mis, job_lists


def jobs_of(*spans, weights=None):
    weights = weights or [1] * len(spans)
    return [Job(i, s, e - s, w) for i, ((s, e), w) in enumerate(zip(spans, weights))]


def test_greedy_1m_examples():
    res = greedy_unweighted_1m(jobs_of((0, 2), (1, 3), (2, 4)))
    assert res.value == 2 and res.solution.ids == {0, 2}
    assert greedy_unweighted_1m([]).value == 0
    assert greedy_unweighted_1m(jobs_of((0, 5), (1, 2), (3, 4))).value == 2


def test_greedy_mm_examples():
    assert greedy_unweighted_Mm(jobs_of((0, 2), (1, 3), (2, 4)), 2).value == 3
    assert greedy_unweighted_Mm([Job(i, i, 2) for i in range(4)], 2).value == 4


def test_weighted_examples():
    assert exact_weighted_1m(jobs_of((0, 4), (0, 2), (2, 4), weights=[3, 2, 2])).value == 4
    assert exact_weighted_1m([Job(0, 0, 3, 5)]).value == 5
    assert exact_weighted_1m([]).value == 0


def test_restricted_range():
    jobs = jobs_of((0, 2), (2, 4), (4, 9))
    assert greedy_unweighted_1m(jobs, TimeRange(1, 9)).value == 2
    assert exact_weighted_1m(jobs, TimeRange(0, 4)).value == 2


def test_best_fit_prefers_latest_free():
    assert best_fit([0, 3, 5], 4) == 1
    assert best_fit([2, 2], 2) == 0
    assert best_fit([5, 6], 4) is None


@settings(max_examples=150)
@given(job_lists(max_n=8, horizon=12))
def test_greedy_is_optimal(jobs):
    res = greedy_unweighted_1m(jobs)
    assert res.value == brute_mis(jobs, weighted=False)
    assert validate_schedule(jobs, res.solution, 1)


@settings(max_examples=100)
@given(job_lists(max_n=6, horizon=10))
def test_greedy_mm_is_optimal(jobs):
    for m in (1, 2, 3):
        res = greedy_unweighted_Mm(jobs, m)
        assert res.value == brute_machines(jobs, m, weighted=False)
        assert validate_schedule(jobs, res.solution, m)
    assert greedy_unweighted_Mm(jobs, 1).solution == greedy_unweighted_1m(jobs).solution


@settings(max_examples=150)
@given(job_lists(max_n=8, horizon=12, max_weight=9))
def test_weighted_dp_is_optimal(jobs):
    res = exact_weighted_1m(jobs)
    assert res.value == brute_mis(jobs)
    assert res.solution.value(jobs) == res.value
    assert validate_schedule(jobs, res.solution, 1)


@settings(max_examples=100)
@given(job_lists(max_n=7, horizon=12, max_weight=9))
def test_sparse_opt_is_optimal_with_k_jobs(jobs):
    for k in range(0, 4):
        res = exact_sparse_opt(jobs, None, k)
        best = Fraction(0)
        for r in range(min(k, len(jobs)) + 1):
            for combo in itertools.combinations(jobs, r):
                if validate_schedule(jobs, Schedule.single(j.id for j in combo), 1):
                    best = max(best, sum((j.weight for j in combo), Fraction(0)))
        assert res.value == best
        assert len(res.solution) <= k


@settings(max_examples=60)
@given(job_lists(max_n=6, horizon=10, max_weight=5))
def test_bruteforce_mm_matches_assignment_search(jobs):
    for m in (1, 2):
        res = exact_weighted_Mm_bruteforce(jobs, m)
        assert res.value == brute_machines(jobs, m)
        assert validate_schedule(jobs, res.solution, m)
        assert res.solution.value(jobs) == res.value


def test_bruteforce_refuses_large():
    r = random.Random(0)
    jobs = [Job(i, r.randint(0, 50), 3) for i in range(19)]
    with pytest.raises(InstanceTooLarge) as info:
        exact_weighted_Mm_bruteforce(jobs, 2)
    assert "19" in str(info.value)
