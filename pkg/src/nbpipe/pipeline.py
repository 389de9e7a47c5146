"""Pipeline stages as plain functions over files, shared by the CLI and benchmarks."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from nbpipe import corpus_store
from nbpipe.bayes import NBModel, test_nb, train_nb
from nbpipe.engine import ShardPlan
from nbpipe.evaluator import ConfusionMatrix, render_report
from nbpipe.text_prep import PrepConfig
from nbpipe.vectorizer import (Dictionary, SplitSpec, read_vectors, split_vectors,
                               vectorize_corpus, write_vectors)

log = logging.getLogger(__name__)

ARTIFACTS = {
    "corpus": "corpus.jsonl",
    "dict": "dict.tsv",
    "vectors": "vectors.jsonl",
    "train": "train.jsonl",
    "test": "test.jsonl",
    "model": "model.json",
    "matrix": "matrix.json",
}


@dataclass
class RunConfig:
    input: Path
    report: Path | None = None
    workdir: Path | None = None
    prep: PrepConfig = field(default_factory=PrepConfig)
    min_df: int = 1
    normalize: bool = True
    split: SplitSpec = field(default_factory=SplitSpec)
    nb_mode: str = "standard"
    alpha: float = 1.0
    workers: int = 1
    fail_fast: bool = False

    @property
    def plan(self) -> ShardPlan:
        return ShardPlan(self.workers)

    def path(self, name: str) -> Path:
        base = self.workdir if self.workdir is not None else Path(".")
        return Path(base) / ARTIFACTS[name]

    def describe(self) -> list[str]:
        """Settings that determine the outputs. Workers and output paths are
        left out on purpose: they never change a result."""
        prep = self.prep.describe()
        return [
            f"input={self.input}",
            "prep=" + ",".join(f"{k}:{v}" for k, v in prep.items()),
            f"min_df={self.min_df} normalize={str(self.normalize).lower()}",
            f"split=pct:{self.split.test_pct},seed:{self.split.seed},mode:{self.split.mode}",
            f"nb_mode={self.nb_mode} alpha={self.alpha!r}",
        ]


class Timer:
    def __init__(self):
        self.ms: dict[str, float] = {}

    def __call__(self, name):
        timer = self

        class _Span:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.ms[name] = (time.perf_counter() - self.t0) * 1000.0
                log.info("%s took %.0f ms", name, timer.ms[name])

        return _Span()


def load_records(source, fail_fast: bool = False, scratch: Path | None = None):
    """Records from a corpus directory (ingested) or an existing record file."""
    source = Path(source)
    if source.is_dir():
        if scratch is None:
            raise ValueError("ingesting a directory needs a scratch path for the record file")
        corpus_store.ingest_directory(source, scratch, fail_fast=fail_fast)
        return corpus_store.read_corpus(scratch)
    return corpus_store.read_corpus(source)


def run_seqdir(root, out, fail_fast=False):
    return corpus_store.ingest_directory(root, out, fail_fast=fail_fast)


def run_vectorize(corpus_path, vectors_out, dict_out, prep=None, min_df=1,
                  normalize=True, plan=None):
    records = corpus_store.read_corpus(corpus_path)
    dictionary, vectors = vectorize_corpus(records, prep, min_df, normalize, plan)
    dictionary.write(dict_out)
    write_vectors(vectors, vectors_out)
    return dictionary, vectors


def run_split(vectors_path, spec: SplitSpec, train_out, test_out):
    train, test = split_vectors(read_vectors(vectors_path), spec)
    write_vectors(train, train_out)
    write_vectors(test, test_out)
    return train, test


def run_train(train_path, model_out, mode="standard", alpha=1.0, dict_path=None, plan=None):
    vocab = len(Dictionary.read(dict_path)) if dict_path else None
    model = train_nb(read_vectors(train_path), mode, alpha, vocab_size=vocab, plan=plan)
    model.write(model_out)
    return model


def run_test(test_path, model_path, matrix_out=None, plan=None) -> ConfusionMatrix:
    model = NBModel.read(model_path)
    cm = test_nb(model, read_vectors(test_path), plan)
    if matrix_out:
        cm.write(matrix_out)
    return cm


def run_pipeline(cfg: RunConfig, with_timings: bool = False) -> tuple[ConfusionMatrix, str]:
    """seqdir -> vectorize -> split -> trainnb -> testnb, artifacts in cfg.workdir."""
    if cfg.workdir is not None:
        Path(cfg.workdir).mkdir(parents=True, exist_ok=True)
    plan = cfg.plan
    timer = Timer()
    src = Path(cfg.input)
    corpus = cfg.path("corpus")
    with timer("seqdir"):
        if src.is_dir():
            run_seqdir(src, corpus, cfg.fail_fast)
        else:
            corpus_store.write_corpus(corpus_store.read_corpus(src), corpus)
    with timer("vectorize"):
        dictionary, _ = run_vectorize(corpus, cfg.path("vectors"), cfg.path("dict"),
                                      cfg.prep, cfg.min_df, cfg.normalize, plan)
    with timer("split"):
        train, test = run_split(cfg.path("vectors"), cfg.split,
                                cfg.path("train"), cfg.path("test"))
    log.info("split: %d train, %d test", len(train), len(test))
    with timer("trainnb"):
        run_train(cfg.path("train"), cfg.path("model"), cfg.nb_mode, cfg.alpha,
                  cfg.path("dict"), plan)
    with timer("testnb"):
        cm = run_test(cfg.path("test"), cfg.path("model"), cfg.path("matrix"), plan)
    text = render_report(cm, timer.ms if with_timings else None, cfg.describe())
    if cfg.report is not None:
        Path(cfg.report).write_text(text, encoding="utf-8")
    return cm, text
