"""Local map/combine over contiguous shards on a thread pool.

Records are cut into ``num_shards`` contiguous ranges (in the order given;
callers pass sorted streams). Each shard is folded by one worker, and the
per-shard results are folded again in shard order on the calling thread.
With an associative ``combine_fn`` the result equals the sequential
left-fold of the map outputs, whatever the worker and shard counts.
"""

from __future__ import annotations

import concurrent.futures as cf
from dataclasses import dataclass
from typing import Any, Callable, Sequence, TypeVar

from nbpipe.errors import PipelineError

T = TypeVar("T")
R = TypeVar("R")

_MISSING = object()


class MapError(PipelineError):
    """A map function failed; carries the shard id and offending record key."""

    def __init__(self, shard: int, key, cause: BaseException):
        self.shard = shard
        self.key = key
        self.cause = cause
        where = f"shard {shard}" + (f", record {key!r}" if key is not None else "")
        super().__init__(f"map failed in {where}: {type(cause).__name__}: {cause}")


@dataclass(frozen=True)
class ShardPlan:
    workers: int = 1
    num_shards: int | None = None

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.num_shards is None:
            object.__setattr__(self, "num_shards", 4 * self.workers)
        if self.num_shards < 1:
            raise ValueError("num_shards must be >= 1")

    def bounds(self, n: int) -> list[tuple[int, int]]:
        """Contiguous [start, stop) ranges; empty shards are omitted."""
        k = self.num_shards
        edges = [i * n // k for i in range(k + 1)]
        return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def _record_key(rec) -> Any:
    for attr in ("key", "name"):
        val = getattr(rec, attr, None)
        if isinstance(val, str):
            return val
    return rec


def map_shards(records: Sequence[T],
               shard_fn: Callable[[Sequence[T]], R],
               combine_fn: Callable[[R, R], R],
               plan: ShardPlan | None = None,
               initial=_MISSING) -> R:
    """Run ``shard_fn`` on each contiguous shard and fold the results in order.

    ``shard_fn`` may raise :class:`MapError` itself to name a record; any
    other exception is wrapped with the shard id. The first failing shard
    (lowest id among those that failed) aborts the job.
    """
    plan = plan or ShardPlan()
    records = records if isinstance(records, Sequence) else list(records)
    ranges = plan.bounds(len(records))
    if not ranges:
        if initial is _MISSING:
            raise ValueError("map over an empty record stream needs an initial value")
        return initial

    def run(shard_id: int, lo: int, hi: int):
        try:
            return shard_fn(records[lo:hi])
        except MapError as exc:
            raise MapError(shard_id, exc.key, exc.cause) from exc.cause
        except Exception as exc:
            raise MapError(shard_id, None, exc) from exc

    if plan.workers == 1:
        results = [run(i, lo, hi) for i, (lo, hi) in enumerate(ranges)]
    else:
        with cf.ThreadPoolExecutor(max_workers=plan.workers) as pool:
            futures = [pool.submit(run, i, lo, hi) for i, (lo, hi) in enumerate(ranges)]
            done, pending = cf.wait(futures, return_when=cf.FIRST_EXCEPTION)
            for fut in pending:
                fut.cancel()
            cf.wait([f for f in pending if not f.cancelled()])
            for fut in futures:
                if fut.done() and not fut.cancelled() and fut.exception() is not None:
                    raise fut.exception()
            results = [fut.result() for fut in futures]

    acc = results[0] if initial is _MISSING else combine_fn(initial, results[0])
    for part in results[1:]:
        acc = combine_fn(acc, part)
    return acc


def map_combine(records: Sequence[T],
                map_fn: Callable[[T], R],
                combine_fn: Callable[[R, R], R],
                plan: ShardPlan | None = None,
                initial=_MISSING,
                key: Callable[[T], Any] = _record_key) -> R:
    """Map every record and merge the outputs with an associative combiner.

    ``combine_fn`` may update and return its left operand: the left side is
    always a worker-local accumulator or a fresh map output.
    """

    def fold(shard: Sequence[T]):
        acc = _MISSING
        for rec in shard:
            try:
                out = map_fn(rec)
            except Exception as exc:
                raise MapError(-1, key(rec), exc) from exc
            acc = out if acc is _MISSING else combine_fn(acc, out)
        return acc

    return map_shards(records, fold, combine_fn, plan, initial)


def map_ordered(records: Sequence[T], fn: Callable[[T], R],
                plan: ShardPlan | None = None) -> list[R]:
    """Per-record map returning outputs in input order (list concatenation)."""

    def shard(recs):
        out = []
        for rec in recs:
            try:
                out.append(fn(rec))
            except Exception as exc:
                raise MapError(-1, _record_key(rec), exc) from exc
        return out

    def concat(a, b):
        a.extend(b)
        return a

    return map_shards(records, shard, concat, plan, initial=[])
