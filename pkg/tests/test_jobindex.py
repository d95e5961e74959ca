import random

import pytest
from hypothesis import given, settings, strategies as st

from intsched.core import DuplicateJobError, Job, UnknownJobError
from intsched.jobindex import LOAD, JobIndex

from helpers import job_lists


def naive_successor(jobs, x):
    cands = [j for j in jobs if j.start >= x]
    return min(cands, key=lambda j: j.key) if cands else None


@given(job_lists(max_n=20, horizon=30), st.integers(0, 32))
def test_successor_matches_scan(jobs, x):
    idx = JobIndex(jobs)
    assert idx.successor(x) == naive_successor(jobs, x)
    expected = sorted((j for j in jobs if j.start >= x), key=lambda j: j.key)
    assert list(idx.iter_successors(x)) == expected


@settings(max_examples=50)
@given(st.data())
def test_random_updates(data):
    r = random.Random(data.draw(st.integers(0, 10**6)))
    idx = JobIndex()
    live = {}
    for i in range(600):
        if live and r.random() < 0.4:
            k = r.choice(list(live))
            assert idx.remove(k) == live.pop(k)
        else:
            j = Job(i, r.randint(0, 50), r.randint(1, 10))
            idx.insert(j)
            live[j.id] = j
        x = r.randint(0, 60)
        assert idx.successor(x) == naive_successor(live.values(), x)
        if i % 50 == 0:
            expected = sorted((j for j in live.values() if j.start >= x), key=lambda j: j.key)
            assert list(idx.iter_successors(x)) == expected
    assert len(idx) == len(live)
    assert [j.id for j in idx] == [j.id for j in sorted(live.values(), key=lambda j: (j.start, j.end, j.id))]


def test_blocks_split_and_vanish():
    jobs = [Job(i, (7 * i) % 500, 1 + i % 9) for i in range(1000)]
    idx = JobIndex()
    for j in jobs:
        idx.insert(j)
    assert idx.blocks() >= 1000 // (2 * LOAD)
    assert JobIndex(jobs).blocks() == -(-1000 // LOAD)
    for j in jobs[::2]:
        idx.remove(j.id)
    rest = jobs[1::2]
    for x in range(0, 520, 13):
        assert idx.successor(x) == naive_successor(rest, x)
        assert list(idx.iter_successors(x))[:5] == sorted((j for j in rest if j.start >= x), key=lambda j: j.key)[:5]
    for j in rest:
        idx.remove(j.id)
    assert idx.blocks() == 0 and idx.successor(0) is None and list(idx.iter_successors(0)) == []


def test_errors():
    idx = JobIndex([Job(i, i, 1) for i in range(1000)])
    with pytest.raises(DuplicateJobError):
        idx.insert(Job(5, 0, 1))
    with pytest.raises(UnknownJobError):
        idx.remove(5000)
    with pytest.raises(ValueError):
        idx.insert(Job(6000, 1 << 64, 1))
    assert 5 in idx and idx.get(5).start == 5
