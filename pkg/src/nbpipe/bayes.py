"""Multinomial Naive Bayes, standard and complement, over sparse TF-IDF vectors.

Training sums are computed with ``math.fsum`` over every contributing weight,
so a model is bit-identical regardless of input order or how the training
set was sharded. Scoring is batched through a sparse matrix product.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from nbpipe.engine import MapError, ShardPlan, map_shards
from nbpipe.errors import DataError
from nbpipe.evaluator import ConfusionMatrix
from nbpipe.vectorizer import SparseVector

MODES = ("standard", "complement")


class ModelError(DataError):
    pass


@dataclass
class NBModel:
    labels: list[str]
    w: list[dict[int, float]]
    w_c: list[float]
    doc_counts: list[int]
    vocab_size: int
    alpha: float = 1.0
    mode: str = "standard"
    _weights: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ModelError(f"unknown mode {self.mode!r}")
        if not self.alpha > 0 or not math.isfinite(self.alpha):
            raise ModelError("alpha must be a positive finite number")
        if not (len(self.labels) == len(self.w) == len(self.w_c) == len(self.doc_counts)):
            raise ModelError("per-label fields have inconsistent lengths")
        if self.vocab_size < 1:
            raise ModelError("vocab_size must be >= 1")
        for row in self.w:
            for t, v in row.items():
                if not 0 <= t < self.vocab_size:
                    raise ModelError(f"term index {t} outside vocabulary")
                if v < 0 or not math.isfinite(v):
                    raise ModelError(f"invalid weight sum {v!r}")

    @property
    def w_t(self) -> dict[int, float]:
        terms = sorted({t for row in self.w for t in row})
        return {t: math.fsum(row.get(t, 0.0) for row in self.w) for t in terms}

    @property
    def w_total(self) -> float:
        return math.fsum(self.w_c)

    def log_weights(self) -> np.ndarray:
        """Per-term, per-label score contributions, shape (vocab_size, L).

        standard:   ln((W[c][t] + a) / (W_c + a|V|))
        complement: -ln((W_t - W[c][t] + a) / (W_total - W_c + a|V|))
        """
        if self._weights is not None:
            return self._weights
        L, V, a = len(self.labels), self.vocab_size, self.alpha
        dense = np.zeros((V, L))
        for c, row in enumerate(self.w):
            for t, v in row.items():
                dense[t, c] = v
        w_c = np.array(self.w_c)
        if self.mode == "standard":
            out = np.log((dense + a) / (w_c + a * V))
        else:
            w_t = np.zeros(V)
            for t, v in self.w_t.items():
                w_t[t] = v
            other = np.maximum(w_t[:, None] - dense, 0.0)
            out = -np.log((other + a) / ((self.w_total - w_c) + a * V))
        self._weights = out
        return out

    def log_prior(self) -> np.ndarray:
        if self.mode == "complement":
            return np.zeros(len(self.labels))
        counts = np.array(self.doc_counts, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(counts / counts.sum())

    # -- persistence --

    def to_json(self) -> str:
        obj = {
            "labels": self.labels,
            "alpha": self.alpha,
            "mode": self.mode,
            "vocab_size": self.vocab_size,
            "doc_counts": self.doc_counts,
            "w": [[[t, row[t]] for t in sorted(row)] for row in self.w],
            "w_c": self.w_c,
        }
        return json.dumps(obj, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "NBModel":
        try:
            obj = json.loads(text)
            w = [{int(t): float(v) for t, v in row} for row in obj["w"]]
            return cls(list(obj["labels"]), w, [float(x) for x in obj["w_c"]],
                       [int(x) for x in obj["doc_counts"]], int(obj["vocab_size"]),
                       float(obj["alpha"]), obj["mode"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ModelError(f"malformed model file: {exc}") from None

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())

    @classmethod
    def read(cls, path) -> "NBModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


# --- training -------------------------------------------------------------

def _partial_sums(vectors: Sequence[SparseVector]):
    """label -> (doc count, term -> list of contributing weights)."""
    part: dict[str, tuple[list[int], dict[int, list[float]]]] = {}
    for v in vectors:
        if not v.label:
            raise ModelError(f"training vector {v.name!r} has no label")
        count, terms = part.setdefault(v.label, ([0], {}))
        count[0] += 1
        for t, w in v.entries:
            if w < 0:
                raise ModelError(f"training vector {v.name!r} has negative weight at {t}")
            terms.setdefault(t, []).append(w)
    return part


def _merge_partials(a, b):
    for label, (count, terms) in b.items():
        if label not in a:
            a[label] = (count, terms)
            continue
        acount, aterms = a[label]
        acount[0] += count[0]
        for t, ws in terms.items():
            aterms.setdefault(t, []).extend(ws)
    return a


def train_nb(vectors: Sequence[SparseVector], mode: str = "standard", alpha: float = 1.0,
             vocab_size: int | None = None, plan: ShardPlan | None = None) -> NBModel:
    """Aggregate per-label term-weight sums.

    ``vocab_size`` defaults to one past the largest term index seen; pass
    the dictionary size when test vectors may use terms absent from training.
    """
    if not vectors:
        raise ModelError("empty training set")
    try:
        part = map_shards(vectors, _partial_sums, _merge_partials, plan)
    except MapError as exc:
        if isinstance(exc.cause, ModelError):
            raise exc.cause from None
        raise
    labels = sorted(part)
    if len(labels) < 2:
        raise ModelError(f"training needs at least 2 labels, got {labels}")
    w, w_c, doc_counts = [], [], []
    for label in labels:
        count, terms = part[label]
        w.append({t: math.fsum(terms[t]) for t in sorted(terms)})
        w_c.append(math.fsum(x for t in sorted(terms) for x in terms[t]))
        doc_counts.append(count[0])
    seen = max((t for row in w for t in row), default=-1) + 1
    if vocab_size is None:
        vocab_size = max(seen, 1)
    elif vocab_size < seen:
        raise ModelError(f"vocab_size {vocab_size} smaller than largest term index {seen - 1}")
    return NBModel(labels, w, w_c, doc_counts, vocab_size, alpha, mode)


# --- scoring --------------------------------------------------------------

def _as_csr(vectors: Sequence[SparseVector], vocab_size: int) -> sp.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for v in vectors:
        for t, w in v.entries:
            if t >= vocab_size:
                raise ModelError(f"vector {v.name!r}: term index {t} outside vocabulary")
            indices.append(t)
            data.append(w)
        indptr.append(len(indices))
    return sp.csr_matrix((np.array(data, dtype=float), np.array(indices, dtype=np.int64),
                          np.array(indptr, dtype=np.int64)),
                         shape=(len(vectors), vocab_size))


def score_batch(model: NBModel, vectors: Sequence[SparseVector]) -> np.ndarray:
    """Scores of shape (n, L); row i depends only on vector i."""
    x = _as_csr(vectors, model.vocab_size)
    return np.asarray(x @ model.log_weights()) + model.log_prior()


def classify(model: NBModel, vector: SparseVector) -> list[tuple[str, float]]:
    """(label, score) pairs, best first; ties go to the earlier label."""
    scores = score_batch(model, [vector])[0]
    order = sorted(range(len(model.labels)), key=lambda c: (-scores[c], c))
    return [(model.labels[c], float(scores[c])) for c in order]


def predict_batch(model: NBModel, vectors: Sequence[SparseVector]) -> np.ndarray:
    if not vectors:
        return np.zeros(0, dtype=np.int64)
    # argmax returns the first maximum, i.e. label-order tie-break
    return np.argmax(score_batch(model, vectors), axis=1)


def test_nb(model: NBModel, vectors: Sequence[SparseVector],
            plan: ShardPlan | None = None) -> ConfusionMatrix:
    """Confusion matrix over model labels plus any labels unseen in training."""
    extra = sorted({v.label for v in vectors} - set(model.labels))
    labels = list(model.labels) + extra
    pos = {label: i for i, label in enumerate(labels)}
    n = len(labels)
    model.log_weights()  # build once before the workers share it

    def shard(vecs):
        counts = np.zeros((n, n), dtype=np.int64)
        pred = predict_batch(model, vecs)
        true = np.fromiter((pos[v.label] for v in vecs), dtype=np.int64, count=len(vecs))
        np.add.at(counts, (true, pred), 1)
        return counts

    def add(a, b):
        a += b
        return a

    counts = map_shards(vectors, shard, add, plan, initial=np.zeros((n, n), dtype=np.int64))
    return ConfusionMatrix(labels, counts.tolist())


test_nb.__test__ = False  # not a pytest test despite the name
