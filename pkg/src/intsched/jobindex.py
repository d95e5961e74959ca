"""Blocked sorted index over jobs with earliest-end successor queries.

Jobs are kept in ``(start, end, id)`` order, split into short sorted blocks.
Each block remembers its smallest ``(end, start, id)`` key and a segment
tree over the blocks holds suffix minima, so "which job ending earliest
starts at or after x" costs one bisect, one scan of part of a block and a
logarithmic walk over block minima.  Both keys are packed into single
integers (64 bits per component) so every comparison is an integer compare.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left
from typing import Iterator

from .core import DuplicateJobError, Job, UnknownJobError

LOAD = 64  # blocks split when they reach 2 * LOAD keys
_BITS = 64
_LIMIT = 1 << _BITS
_MASK = _LIMIT - 1
_INF = 1 << (3 * _BITS)


def _pack(a: int, b: int, c: int) -> int:
    return (a << (2 * _BITS)) | (b << _BITS) | c


class JobIndex:
    """Dynamic set of jobs with earliest-end successor queries."""

    def __init__(self, jobs=()):
        self._jobs: dict[int, Job] = {}
        self._orders: list[list[int]] = []  # blocks of packed (start, end, id)
        self._tags: list[list[int]] = []  # matching blocks of packed (end, start, id)
        self._maxes: list[int] = []  # last order key of each block
        self._seg: list[int] = [_INF, _INF]
        self._size = 1
        jobs = sorted(jobs, key=lambda j: (j.start, j.end, j.id))
        for job in jobs:
            self._check(job)
            if job.id in self._jobs:
                raise DuplicateJobError(job.id)
            self._jobs[job.id] = job
        for i in range(0, len(jobs), LOAD):
            chunk = jobs[i:i + LOAD]
            self._orders.append([_pack(j.start, j.end, j.id) for j in chunk])
            self._tags.append([_pack(j.end, j.start, j.id) for j in chunk])
            self._maxes.append(self._orders[-1][-1])
        self._rebuild()

    @staticmethod
    def _check(job: Job) -> None:
        if job.end >= _LIMIT or job.id >= _LIMIT:
            raise ValueError(f"job {job.id}: times and ids must stay below 2**{_BITS}")

    # segment tree over block minima ------------------------------------------

    def _rebuild(self) -> None:
        n = len(self._tags)
        size = 1
        while size < n:
            size *= 2
        seg = [_INF] * (2 * size)
        for b, tags in enumerate(self._tags):
            seg[size + b] = min(tags)
        for i in range(size - 1, 0, -1):
            seg[i] = min(seg[2 * i], seg[2 * i + 1])
        self._seg = seg
        self._size = size

    def _set_block(self, b: int, value: int) -> None:
        seg = self._seg
        i = self._size + b
        seg[i] = value
        i >>= 1
        while i:
            left, right = seg[2 * i], seg[2 * i + 1]
            best = left if left < right else right
            if seg[i] == best:
                break
            seg[i] = best
            i >>= 1

    def _suffix_min(self, b: int) -> int:
        """Smallest tag over blocks b, b+1, ..."""
        seg = self._seg
        lo, hi = b + self._size, 2 * self._size
        best = _INF
        while lo < hi:
            if lo & 1:
                if seg[lo] < best:
                    best = seg[lo]
                lo += 1
            if hi & 1:
                hi -= 1
                if seg[hi] < best:
                    best = seg[hi]
            lo >>= 1
            hi >>= 1
        return best

    # public interface --------------------------------------------------------

    def __len__(self):
        return len(self._jobs)

    def __contains__(self, job_id):
        return job_id in self._jobs

    def __iter__(self) -> Iterator[Job]:
        """Jobs in (start, end, id) order."""
        jobs = self._jobs
        for block in self._orders:
            for key in block:
                yield jobs[key & _MASK]

    def get(self, job_id: int) -> Job:
        try:
            return self._jobs[job_id]
        except KeyError:
            raise UnknownJobError(job_id) from None

    def insert(self, job: Job) -> None:
        if job.id in self._jobs:
            raise DuplicateJobError(job.id)
        self._check(job)
        self._jobs[job.id] = job
        order = _pack(job.start, job.end, job.id)
        tag = _pack(job.end, job.start, job.id)
        if not self._orders:
            self._orders.append([order])
            self._tags.append([tag])
            self._maxes.append(order)
            self._rebuild()
            return
        b = bisect_left(self._maxes, order)
        if b == len(self._maxes):
            b -= 1
        block = self._orders[b]
        pos = bisect_left(block, order)
        block.insert(pos, order)
        self._tags[b].insert(pos, tag)
        if pos == len(block) - 1:
            self._maxes[b] = order
        if len(block) >= 2 * LOAD:
            self._orders[b:b + 1] = [block[:LOAD], block[LOAD:]]
            tags = self._tags[b]
            self._tags[b:b + 1] = [tags[:LOAD], tags[LOAD:]]
            self._maxes[b:b + 1] = [block[LOAD - 1], block[-1]]
            self._rebuild()
        elif tag < self._seg[self._size + b]:
            self._set_block(b, tag)

    def remove(self, job_id: int) -> Job:
        job = self.get(job_id)
        del self._jobs[job_id]
        order = _pack(job.start, job.end, job.id)
        b = bisect_left(self._maxes, order)
        block = self._orders[b]
        pos = bisect_left(block, order)
        del block[pos]
        tags = self._tags[b]
        tag = tags.pop(pos)
        if not block:
            del self._orders[b], self._tags[b], self._maxes[b]
            self._rebuild()
            return job
        if pos == len(block):
            self._maxes[b] = block[-1]
        if tag == self._seg[self._size + b]:
            self._set_block(b, min(tags))
        return job

    def successor(self, x: int) -> Job | None:
        """Job with the smallest (end, start, id) among those starting at or after x."""
        key = x << (2 * _BITS)
        b = bisect_left(self._maxes, key)
        if b == len(self._maxes):
            return None
        pos = bisect_left(self._orders[b], key)
        tags = self._tags[b]
        best = min(tags[pos:]) if pos else self._seg[self._size + b]
        # later blocks only hold jobs starting at or after this block's last start,
        # so they cannot beat a job that has already ended by then
        if best >> (2 * _BITS) > self._maxes[b] >> (2 * _BITS):
            rest = self._suffix_min(b + 1)
            if rest < best:
                best = rest
        return self._jobs[best & _MASK]

    def iter_successors(self, x: int) -> Iterator[Job]:
        """Lazily yield jobs starting at or after x in (end, start, id) order.

        The index must not change while the iterator is in use.
        """
        key = x << (2 * _BITS)
        b = bisect_left(self._maxes, key)
        if b == len(self._maxes):
            return
        pos = bisect_left(self._orders[b], key)
        # entries: (tag, 0, None) for a job, (min tag, 1, segment node) for a group of blocks
        heap = [(t, 0, None) for t in self._tags[b][pos:]]
        seg, size = self._seg, self._size
        lo, hi = b + 1 + size, 2 * size
        while lo < hi:
            if lo & 1:
                heap.append((seg[lo], 1, lo))
                lo += 1
            if hi & 1:
                hi -= 1
                heap.append((seg[hi], 1, hi))
            lo >>= 1
            hi >>= 1
        heapq.heapify(heap)
        while heap:
            tag, group, node = heapq.heappop(heap)
            if tag == _INF:
                return
            if not group:
                yield self._jobs[tag & _MASK]
            elif node >= size:
                for t in self._tags[node - size]:
                    heapq.heappush(heap, (t, 0, None))
            else:
                heapq.heappush(heap, (seg[2 * node], 1, 2 * node))
                heapq.heappush(heap, (seg[2 * node + 1], 1, 2 * node + 1))

    def blocks(self) -> int:
        return len(self._orders)
