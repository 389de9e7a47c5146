"""Worker-count timing and test-fraction sweeps."""

from __future__ import annotations

import csv
import io
import logging
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from nbpipe.bayes import test_nb, train_nb
from nbpipe.engine import ShardPlan
from nbpipe.errors import PipelineError
from nbpipe.evaluator import accuracy
from nbpipe.vectorizer import SplitSpec, split_vectors, vectorize_corpus

log = logging.getLogger(__name__)


def _aligned(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(r[i])) for r in [header, *rows]) for i in range(len(header))]
    out = []
    for r in [header, *rows]:
        out.append("  ".join(str(c).rjust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(out) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


@dataclass
class BenchTable:
    stage: str
    times_ms: dict[int, list[float]] = field(default_factory=dict)

    def median(self, workers: int) -> float:
        return statistics.median(self.times_ms[workers])

    def _rows(self):
        reps = max(len(v) for v in self.times_ms.values())
        header = ["workers"] + [f"rep{i + 1}_ms" for i in range(reps)] + ["median_ms"]
        rows = []
        for w, times in self.times_ms.items():
            cells = [f"{t:.1f}" for t in times] + [""] * (reps - len(times))
            rows.append([str(w), *cells, f"{self.median(w):.1f}"])
        return header, rows

    def format(self) -> str:
        header, rows = self._rows()
        return f"stage: {self.stage}\n" + _aligned(header, rows)

    def to_csv(self) -> str:
        return _csv(*self._rows())


def benchmark(stage: Callable[[ShardPlan], object], worker_counts: Sequence[int],
              repetitions: int = 3, name: str = "stage",
              clock: Callable[[], float] = time.perf_counter) -> BenchTable:
    """Wall-clock ``stage(plan)`` for each worker count, ``repetitions`` times.

    Repetitions are interleaved across worker counts so slow drift in the
    machine's load is spread over all rows.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if not worker_counts:
        raise ValueError("no worker counts given")
    table = BenchTable(name, {w: [] for w in worker_counts})
    for _ in range(repetitions):
        for w in worker_counts:
            plan = ShardPlan(w)
            t0 = clock()
            stage(plan)
            table.times_ms[w].append((clock() - t0) * 1000.0)
    return table


@dataclass
class SweepRow:
    pct: int
    n_train: int = 0
    n_test: int = 0
    correct: int = 0
    accuracy: float | None = None
    error: str | None = None


@dataclass
class SweepTable:
    rows: list[SweepRow]

    def _cells(self):
        header = ["test_pct", "train", "test", "correct", "accuracy_pct"]
        rows = []
        for r in self.rows:
            acc = f"{100 * r.accuracy:.4f}" if r.accuracy is not None else f"error: {r.error}"
            rows.append([str(r.pct), str(r.n_train), str(r.n_test), str(r.correct), acc])
        return header, rows

    def format(self) -> str:
        return _aligned(*self._cells())

    def to_csv(self) -> str:
        return _csv(*self._cells())


def sweep_test_pct(records, pct_list: Sequence[int], seed: int = 0, mode: str = "bernoulli",
                   prep=None, nb_mode: str = "standard", alpha: float = 1.0,
                   min_df: int = 1, normalize: bool = True,
                   plan: ShardPlan | None = None) -> SweepTable:
    """Vectorize once, then split/train/test at each test percentage."""
    for pct in pct_list:
        if not 0 < pct < 100:
            raise ValueError(f"sweep percentages must be in (0, 100), got {pct}")
    dictionary, vectors = vectorize_corpus(records, prep, min_df, normalize, plan)
    rows = []
    for pct in pct_list:
        row = SweepRow(pct)
        train, test = split_vectors(vectors, SplitSpec(pct, seed, mode))
        row.n_train, row.n_test = len(train), len(test)
        try:
            if not train or not test:
                raise PipelineError("split produced an empty train or test set")
            model = train_nb(train, nb_mode, alpha, vocab_size=len(dictionary), plan=plan)
            cm = test_nb(model, test, plan)
            row.correct, _, row.accuracy = accuracy(cm)
        except PipelineError as exc:
            row.error = str(exc)
            log.warning("sweep row %d%%: %s", pct, exc)
        rows.append(row)
    return SweepTable(rows)
