"""Seeded Monte-Carlo experiments for the random-partition reductions."""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from ..core import Job
from ..multi import ExactEngine, PartitionState
from ..oracles import greedy_unweighted_Mm

EXPERIMENTS = ("tight-unweighted", "random-unweighted", "random-weighted")


@dataclass
class MonteCarloReport:
    experiment: str
    trials: int
    seed: int
    machines: int
    mean: float
    stdev: float
    ci95: float
    minimum: float
    maximum: float
    bound: float
    samples: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def partition_value(jobs, m: int, seed: int, weighted: bool) -> Fraction:
    state = PartitionState(m, seed, lambda: ExactEngine(weighted=weighted))
    for job in jobs:
        state.insert(job)
    return state.value()


def tight_chain(n: int, m: int) -> list[Job]:
    return [Job(i, i, m) for i in range(n)]


def random_unweighted(r: random.Random, n: int = 60, horizon: int = 200) -> list[Job]:
    out = []
    for i in range(n):
        length = r.randint(1, 20)
        out.append(Job(i, r.randint(0, horizon - length), length))
    return out


def adversarial_weighted(r: random.Random, m: int, groups: int = 12) -> list[Job]:
    """Jobs that fit on m machines together, so the optimum is their total weight.

    Each group is either nested (m-1 machines each hold one job containing a
    short job on the last machine) or crossing (every machine holds two jobs
    whose ends straddle the short job's endpoints).
    """
    jobs = []
    base = 0
    span = 12
    for _ in range(groups):
        short = Job(len(jobs), base + 4, 4, Fraction(r.randint(1, 4)))
        jobs.append(short)
        if r.random() < 0.5:
            for _ in range(m - 1):
                jobs.append(Job(len(jobs), base, span, Fraction(r.randint(1, 4))))
        else:
            for _ in range(m - 1):
                jobs.append(Job(len(jobs), base, 6, Fraction(r.randint(1, 4))))
                jobs.append(Job(len(jobs), base + 6, 6, Fraction(r.randint(1, 4))))
        base += span
    return jobs


def _trial(experiment: str, m: int, r: random.Random, n: int) -> float:
    seed = r.getrandbits(32)
    if experiment == "tight-unweighted":
        return float(partition_value(tight_chain(n, m), m, seed, weighted=False) / n)
    if experiment == "random-unweighted":
        jobs = random_unweighted(r)
        best = greedy_unweighted_Mm(jobs, m).value
        return float(partition_value(jobs, m, seed, weighted=False) / best)
    jobs = adversarial_weighted(r, m)
    total = sum(j.weight for j in jobs)
    return float(partition_value(jobs, m, seed, weighted=True) / total)


def bound_for(experiment: str, m: int) -> float:
    if experiment == "random-weighted":
        return (1 - 1 / m) ** (m - 1)
    return m / (2 * m - 1)


def monte_carlo(experiment: str, trials: int, seed: int = 0, machines: int = 2, n: int = 400) -> MonteCarloReport:
    """Mean value ratio over ``trials`` seeded trials, with a normal 95% interval."""
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    r = random.Random(seed)
    samples = [_trial(experiment, machines, r, n) for _ in range(trials)]
    mean = statistics.fmean(samples)
    stdev = statistics.stdev(samples) if trials > 1 else 0.0
    ci = 1.96 * stdev / math.sqrt(trials)
    return MonteCarloReport(experiment, trials, seed, machines, mean, stdev, ci,
                            min(samples), max(samples), bound_for(experiment, machines), samples)
