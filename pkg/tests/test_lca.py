import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from intsched.core import ApproxParams, Job, Schedule, UnknownJobError, validate_schedule
from intsched.lca import (
    SuccessorOracle,
    TreeNode,
    approx_schedule,
    f_approx,
    f_exact,
    lca_query,
    lca_query_multi,
    probe_based_opt,
    probe_budget,
)
from intsched.core import TimeRange
from intsched.oracles import greedy_unweighted_1m, greedy_unweighted_Mm

from helpers import job_lists, random_jobs


def test_successor_probes_are_counted_and_logged():
    lines = []
    o = SuccessorOracle([Job(0, 2, 3), Job(1, 3, 1)], log=lines.append)
    assert o.successor(0).id == 1
    assert o.successor(4) is None
    assert o.probes == 2
    assert lines == ["probe 0 -> 1", "probe 4 -> none"]


def test_successor_excluding_charges_each_candidate():
    o = SuccessorOracle([Job(0, 0, 1), Job(1, 0, 2), Job(2, 0, 3)])
    assert o.successor_excluding(0, {0, 1}).id == 2
    assert o.probes == 3
    assert o.successor_excluding(0, {0, 1, 2}) is None
    assert o.probes == 7


def test_horizon_is_padded():
    assert SuccessorOracle([Job(0, 0, 5)], horizon=6).horizon == 8
    with pytest.raises(ValueError):
        SuccessorOracle([Job(0, 0, 9)], horizon=4)


def test_probe_based_opt():
    jobs = [Job(0, 0, 2), Job(1, 1, 2), Job(2, 2, 2), Job(3, 5, 3)]
    o = SuccessorOracle(jobs)
    run = probe_based_opt(o, TimeRange(0, 6), 0)
    assert [j.id for j in run.jobs] == [0, 2]
    assert run.last_end == 4
    assert run.probes == 3


@settings(max_examples=200)
@given(job_lists(max_n=10, horizon=16))
def test_exact_simulation_equals_greedy(jobs):
    o = SuccessorOracle(jobs, 16)
    out = []
    last = f_exact(TreeNode.root(16), 0, o, out)
    greedy = greedy_unweighted_1m(jobs)
    assert {j.id for j in out} == greedy.solution.ids
    assert last == max((j.end for j in out), default=0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(1, 4)]))
def test_local_answers_agree_with_global_solution(seed, eps):
    r = random.Random(seed)
    horizon = r.choice([64, 1024])
    jobs = random_jobs(r, r.randint(1, 40), horizon, max_len=r.choice([4, 32, horizon]))
    params = ApproxParams(eps)
    o = SuccessorOracle(jobs, horizon)
    glob = approx_schedule(params, o)
    yes = {j.id for j in jobs if lca_query(j, params, o)}
    assert yes == set(glob.ids)
    assert validate_schedule(jobs, glob, 1)
    best = greedy_unweighted_1m(jobs).value
    assert len(yes) * (params.k + 1) >= best * params.k
    sub = []
    f_approx(TreeNode.root(o.horizon), 0, params, o, sub)
    assert {j.id for j in sub} == yes


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_multi_machine_queries(seed, m):
    r = random.Random(seed)
    horizon = 256
    jobs = random_jobs(r, r.randint(1, 30), horizon, max_len=r.choice([8, 64]))
    params = ApproxParams(Fraction(1, 2))
    o = SuccessorOracle(jobs, horizon)
    glob = approx_schedule(params, o, m)
    assert validate_schedule(jobs, glob, m)
    local = {}
    for j in jobs:
        machine = lca_query_multi(j, m, params, o)
        if machine is not None:
            local[j.id] = machine
    assert Schedule(local) == glob
    best = greedy_unweighted_Mm(jobs, m).value
    assert len(glob) * (m * params.k + m) >= best * m * params.k
    if m == 1:
        assert glob.ids == approx_schedule(params, o).ids


def test_probe_budget_formula():
    p = ApproxParams(Fraction(1, 4))
    assert probe_budget(p, 1 << 16) == 4 * 5 * 16
    assert probe_budget(p, 1 << 16, m=2) == 2 * 4 * 5 * 16


def test_unknown_job_is_rejected():
    o = SuccessorOracle([Job(0, 0, 2)])
    with pytest.raises(UnknownJobError):
        lca_query(Job(1, 0, 2), ApproxParams(1), o)
    with pytest.raises(UnknownJobError):
        lca_query(Job(0, 0, 3), ApproxParams(1), o)
