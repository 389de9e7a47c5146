"""Term dictionary, TF-IDF sparse vectors, and the seeded train/test split."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from nbpipe.engine import ShardPlan, map_ordered, map_shards
from nbpipe.errors import DataError

MASK64 = (1 << 64) - 1


class VectorError(DataError):
    pass


@dataclass
class Dictionary:
    terms: list[str]
    df: list[int]
    num_docs: int

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return (isinstance(other, Dictionary) and self.terms == other.terms
                and self.df == other.df and self.num_docs == other.num_docs)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"#num_docs={self.num_docs}\n")
            for i, (t, d) in enumerate(zip(self.terms, self.df)):
                fh.write(f"{t}\t{i}\t{d}\n")

    @classmethod
    def read(cls, path) -> "Dictionary":
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
        if not lines or not lines[0].startswith("#num_docs="):
            raise VectorError(f"{path}: missing '#num_docs=' header")
        try:
            n = int(lines[0].split("=", 1)[1])
        except ValueError:
            raise VectorError(f"{path}: bad num_docs header {lines[0]!r}") from None
        if lines[-1] == "":
            lines.pop()
        terms, df = [], []
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split("\t")
            if len(parts) != 3:
                raise VectorError(f"{path}:{lineno}: expected term<TAB>index<TAB>df")
            term, idx, d = parts
            if not (idx.isdigit() and d.isdigit()) or int(idx) != len(terms):
                raise VectorError(f"{path}:{lineno}: bad index or df")
            if not 1 <= int(d) <= n:
                raise VectorError(f"{path}:{lineno}: df {d} outside [1, {n}]")
            terms.append(term)
            df.append(int(d))
        if terms != sorted(terms) or len(set(terms)) != len(terms):
            raise VectorError(f"{path}: terms are not sorted and unique")
        return cls(terms, df, n)


@dataclass(frozen=True)
class SparseVector:
    name: str
    label: str
    entries: tuple[tuple[int, float], ...]

    def __post_init__(self):
        prev = -1
        for idx, w in self.entries:
            if idx <= prev:
                raise VectorError(f"vector {self.name!r}: indices not strictly increasing")
            if not math.isfinite(w) or w == 0.0:
                raise VectorError(f"vector {self.name!r}: weight {w!r} at index {idx}")
            prev = idx

    def norm2(self) -> float:
        return math.fsum(w * w for _, w in self.entries)


@dataclass(frozen=True)
class SplitSpec:
    test_pct: int = 40
    seed: int = 0
    mode: str = "bernoulli"

    def __post_init__(self):
        if isinstance(self.test_pct, bool) or not isinstance(self.test_pct, int):
            raise ValueError("test_pct must be an integer")
        if not 0 <= self.test_pct <= 100:
            raise ValueError(f"test_pct {self.test_pct} outside [0, 100]")
        if self.mode not in ("bernoulli", "exact"):
            raise ValueError(f"unknown split mode {self.mode!r}")


# --- dictionary ---------------------------------------------------------

def _count_df(docs: Sequence[Sequence[str]]) -> Counter:
    df: Counter = Counter()
    for terms in docs:
        df.update(set(terms))
    return df


def _merge_counts(a: Counter, b: Counter) -> Counter:
    a.update(b)
    return a


def build_dictionary(docs: Sequence[Sequence[str]], min_df: int = 1,
                     plan: ShardPlan | None = None) -> Dictionary:
    """Sorted vocabulary with document frequencies; N counts empty docs too."""
    if not docs:
        raise VectorError("cannot build a dictionary from zero documents")
    df = map_shards(docs, _count_df, _merge_counts, plan)
    if not df:
        raise VectorError("no terms in any document")
    terms = sorted(t for t, d in df.items() if d >= min_df)
    return Dictionary(terms, [df[t] for t in terms], len(docs))


# --- weighting ----------------------------------------------------------

def idf(df: int, num_docs: int) -> float:
    return math.log(num_docs / (df + 1)) + 1.0


def tfidf_weight(count: int, df: int, num_docs: int) -> float:
    """sqrt-tf times smoothed idf; non-positive weights clamp to 0."""
    w = math.sqrt(count) * idf(df, num_docs)
    return w if w > 0.0 else 0.0


def vectorize(terms: Iterable[str], dictionary: Dictionary, normalize: bool = True,
              name: str = "", label: str = "") -> SparseVector:
    index = dictionary.index
    counts = Counter(index[t] for t in terms if t in index)
    entries = []
    for i in sorted(counts):
        w = tfidf_weight(counts[i], dictionary.df[i], dictionary.num_docs)
        if w > 0.0:
            entries.append((i, w))
    if normalize and entries:
        norm = math.sqrt(math.fsum(w * w for _, w in entries))
        entries = [(i, w / norm) for i, w in entries]
    return SparseVector(name, label, tuple(entries))


def vectorize_corpus(records, prep=None, min_df: int = 1, normalize: bool = True,
                     plan: ShardPlan | None = None) -> tuple[Dictionary, list[SparseVector]]:
    """Preprocess, build the dictionary, and vectorize every record.

    ``records`` are DocumentRecords; output vectors follow record order.
    """
    from nbpipe.text_prep import PrepConfig, preprocess

    prep = prep or PrepConfig()
    records = list(records)
    docs = map_ordered(records, lambda r: preprocess(r.text, prep), plan)
    dictionary = build_dictionary(docs, min_df=min_df, plan=plan)
    pairs = list(zip(records, docs))
    vectors = map_ordered(
        pairs, lambda p: vectorize(p[1], dictionary, normalize, p[0].key, p[0].label), plan)
    return dictionary, vectors


# --- vector file ----------------------------------------------------------

def _encode_vector(v: SparseVector) -> str:
    ents = ",".join(f"[{i},{format(w, '.17g')}]" for i, w in v.entries)
    return (f'{{"name":{json.dumps(v.name, ensure_ascii=False)},'
            f'"label":{json.dumps(v.label, ensure_ascii=False)},'
            f'"entries":[{ents}]}}\n')


def write_vectors(vectors: Iterable[SparseVector], path) -> int:
    vecs = sorted(vectors, key=lambda v: v.name)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in vecs:
            fh.write(_encode_vector(v))
    return len(vecs)


def read_vectors(path) -> list[SparseVector]:
    out = []
    with open(Path(path), "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.endswith(b"\n"):
                raise VectorError(f"{path}: record {lineno}: truncated record")
            try:
                obj = json.loads(raw)
                entries = tuple((int(i), float(w)) for i, w in obj["entries"])
                out.append(SparseVector(str(obj["name"]), str(obj["label"]), entries))
            except VectorError as exc:
                raise VectorError(f"{path}: record {lineno}: {exc}") from None
            except (ValueError, KeyError, TypeError) as exc:
                raise VectorError(f"{path}: record {lineno}: malformed vector: {exc}") from None
    return out


# --- split ----------------------------------------------------------------

def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & MASK64
    return h


def splitmix64(state: int) -> int:
    """One SplitMix64 output for the given state (state is pre-increment)."""
    z = (state + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        out = splitmix64(self.state)
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        return out

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self.next()
            if x < limit:
                return x % n


def in_test(name: str, spec: SplitSpec) -> bool:
    x = splitmix64((spec.seed & MASK64) ^ fnv1a64(name.encode("utf-8")))
    return (x >> 11) * 100 < spec.test_pct * (1 << 53)


def exact_test_size(n: int, test_pct: int) -> int:
    """round(n * pct / 100), halves rounded up."""
    return (2 * n * test_pct + 100) // 200


def split_vectors(vectors: Sequence[SparseVector], spec: SplitSpec):
    """Return (train, test), each sorted by vector name."""
    if not vectors:
        raise VectorError("cannot split an empty vector set")
    vecs = sorted(vectors, key=lambda v: v.name)
    for a, b in zip(vecs, vecs[1:]):
        if a.name == b.name:
            raise VectorError(f"duplicate vector name {a.name!r}")
    if spec.mode == "bernoulli":
        test_names = {v.name for v in vecs if in_test(v.name, spec)}
    else:
        order = list(range(len(vecs)))
        rng = SplitMix64(spec.seed)
        for i in range(len(order) - 1, 0, -1):
            j = rng.below(i + 1)
            order[i], order[j] = order[j], order[i]
        k = exact_test_size(len(vecs), spec.test_pct)
        test_names = {vecs[i].name for i in order[:k]}
    train = [v for v in vecs if v.name not in test_names]
    test = [v for v in vecs if v.name in test_names]
    return train, test
