"""A common face for every engine the harness can drive."""

from __future__ import annotations

from fractions import Fraction

from ..core import ApproxParams, Job, Schedule, UnknownJobError, validate_schedule
from ..dynamic import DynamicMIS
from ..lca import SuccessorOracle, approx_schedule, lca_query, lca_query_multi
from ..multi import ExactEngine, MultiDynamic, PartitionState, WeightedMultiDynamic
from ..oracles import (
    MAX_BRUTEFORCE_JOBS,
    MAX_BRUTEFORCE_MACHINES,
    exact_weighted_1m,
    exact_weighted_Mm_bruteforce,
    greedy_unweighted_Mm,
)
from ..weighted.structure import WeightedDynamic

ALGOS = ("dyn1", "lca", "wdyn", "mdyn", "wmdyn", "part-u", "part-w")
WEIGHTED = {"wdyn", "wmdyn", "part-w"}


class LcaEngine:
    """Static local queries over the current job set; the oracle is rebuilt after updates."""

    def __init__(self, params: ApproxParams, m: int, horizon: int):
        self.params = params
        self.m = m
        self.horizon = horizon
        self.jobs: dict[int, Job] = {}
        self._oracle = None
        self.last_probes = 0

    def insert(self, job: Job) -> None:
        self.jobs[job.id] = job
        self._oracle = None

    def delete(self, job_id: int) -> None:
        if job_id not in self.jobs:
            raise UnknownJobError(job_id)
        del self.jobs[job_id]
        self._oracle = None

    def oracle(self) -> SuccessorOracle:
        if self._oracle is None:
            self._oracle = SuccessorOracle(self.jobs.values(), self.horizon)
        return self._oracle

    def query(self, job_id: int):
        if job_id not in self.jobs:
            raise UnknownJobError(job_id)
        o = self.oracle()
        before = o.probes
        job = self.jobs[job_id]
        if self.m == 1:
            answer = lca_query(job, self.params, o)
        else:
            answer = lca_query_multi(job, self.m, self.params, o)
        self.last_probes = o.probes - before
        return answer

    def schedule(self) -> Schedule:
        return approx_schedule(self.params, self.oracle(), self.m)

    def value(self) -> Fraction:
        return Fraction(len(self.schedule()))

    def check_invariants(self) -> list[str]:
        return []


class Adapter:
    """Uniform insert/delete/query/value/schedule/check over one engine."""

    def __init__(self, algo: str, params: ApproxParams, m: int, horizon: int,
                 seed: int = 0, offsets: int = 5, w_cap=None):
        if algo not in ALGOS:
            raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")
        self.algo = algo
        self.m = m
        self.weighted = algo in WEIGHTED
        self.jobs: dict[int, Job] = {}
        if algo == "dyn1":
            self.engine = DynamicMIS(params, horizon)
        elif algo == "lca":
            self.engine = LcaEngine(params, m, horizon)
        elif algo == "wdyn":
            self.engine = WeightedDynamic(params, horizon, offsets=offsets, seed=seed)
        elif algo == "mdyn":
            self.engine = MultiDynamic(params, m, horizon)
        elif algo == "wmdyn":
            self.engine = WeightedMultiDynamic(params, m, horizon, w_cap if w_cap is not None else 1 << 20)
        else:
            weighted = algo == "part-w"
            self.engine = PartitionState(m, seed, lambda: ExactEngine(weighted=weighted))
        if algo in ("dyn1", "wdyn") and m != 1:
            raise ValueError(f"{algo} runs on one machine")

    def insert(self, job: Job) -> None:
        if not self.weighted and job.weight != 1:
            raise ValueError(f"{self.algo} takes unit weights only (job {job.id})")
        self.engine.insert(job)
        self.jobs[job.id] = job

    def delete(self, job_id: int) -> None:
        self.engine.delete(job_id)
        del self.jobs[job_id]

    def query(self, job_id: int):
        """True/False on one machine; otherwise the machine index or None."""
        if self.algo in ("mdyn", "wmdyn"):
            return self.engine.query_machine(job_id)
        return self.engine.query(job_id)

    def value(self) -> Fraction:
        return Fraction(self.engine.value())

    def schedule(self) -> Schedule:
        return self.engine.schedule()

    def probes(self) -> int | None:
        return self.engine.last_probes if self.algo == "lca" else None

    def check(self) -> list[str]:
        problems = []
        if hasattr(self.engine, "check_invariants"):
            problems.extend(self.engine.check_invariants())
        try:
            if not validate_schedule(self.jobs.values(), self.schedule(), self.m):
                problems.append("invalid schedule: overlapping jobs on a machine")
        except ValueError as exc:
            problems.append(f"invalid schedule: {exc}")
        return problems

    def oracle_value(self) -> Fraction | None:
        """Exact optimum for the live jobs, or None when no exact solver is affordable."""
        jobs = list(self.jobs.values())
        if not self.weighted:
            return greedy_unweighted_Mm(jobs, self.m).value
        if self.m == 1:
            return exact_weighted_1m(jobs).value
        if len(jobs) <= MAX_BRUTEFORCE_JOBS and self.m <= MAX_BRUTEFORCE_MACHINES:
            return exact_weighted_Mm_bruteforce(jobs, self.m).value
        return None
