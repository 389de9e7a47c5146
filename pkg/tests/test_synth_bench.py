import random

import pytest

from nbpipe.bench import benchmark, sweep_test_pct
from nbpipe.corpus_store import ingest_directory, read_corpus
from nbpipe.errors import DataError
from nbpipe.synth import gen_corpus, make_vocabularies
from nbpipe.text_prep import default_stopwords, preprocess


def test_gen_corpus_counts(tmp_path):
    out = gen_corpus(tmp_path / "c", 5, 100, 50, 0.1, seed=1)
    dirs = sorted(p for p in out.iterdir())
    assert len(dirs) == 5
    assert sum(1 for d in dirs for _ in d.iterdir()) == 500


def test_overlap_zero_is_disjoint():
    vocabs = make_vocabularies(4, 30, 0.0, random.Random(0))
    sets = [set(v) for v in vocabs]
    for i in range(4):
        assert len(sets[i]) == 30
        for j in range(i + 1, 4):
            assert not sets[i] & sets[j]


def test_overlap_shares_words():
    vocabs = make_vocabularies(3, 50, 0.2, random.Random(0))
    common = set.intersection(*map(set, vocabs))
    assert len(common) == 10


def test_words_survive_preprocessing():
    stop = default_stopwords()
    for vocab in make_vocabularies(3, 200, 0.1, random.Random(5)):
        for w in vocab:
            assert w not in stop
            assert preprocess(w) == [w]


def test_deterministic(tmp_path):
    a = ingest_directory(gen_corpus(tmp_path / "a", 3, 10, 20, 0.1, seed=4), tmp_path / "a.jsonl")
    b = ingest_directory(gen_corpus(tmp_path / "b", 3, 10, 20, 0.1, seed=4), tmp_path / "b.jsonl")
    assert a.path.read_bytes() == b.path.read_bytes()


def test_nonempty_output_needs_force(tmp_path):
    gen_corpus(tmp_path / "c", 2, 2, 5, 0.0, seed=1)
    with pytest.raises(DataError, match="force"):
        gen_corpus(tmp_path / "c", 2, 2, 5, 0.0, seed=1)
    gen_corpus(tmp_path / "c", 2, 3, 5, 0.0, seed=1, force=True)
    assert sum(1 for _ in (tmp_path / "c").rglob("*.txt")) == 6


def test_bad_arguments(tmp_path):
    with pytest.raises(ValueError):
        gen_corpus(tmp_path / "c", 0, 1, 1, 0.0)
    with pytest.raises(ValueError):
        gen_corpus(tmp_path / "c", 1, 1, 1, 1.0)


def test_benchmark_shape():
    calls = []
    ticks = iter(range(0, 1000, 5))
    table = benchmark(lambda plan: calls.append(plan.workers), [1, 4], repetitions=3,
                      name="noop", clock=lambda: next(ticks) / 1000.0)
    assert calls == [1, 4, 1, 4, 1, 4]
    assert sorted(table.times_ms) == [1, 4]
    for times in table.times_ms.values():
        assert times == pytest.approx([5.0, 5.0, 5.0])
    assert table.median(4) == pytest.approx(5.0)
    text = table.format()
    assert text.splitlines()[1].split() == ["workers", "rep1_ms", "rep2_ms", "rep3_ms", "median_ms"]
    assert table.to_csv().startswith("workers,rep1_ms")


def test_benchmark_single_row():
    table = benchmark(lambda plan: None, [1], repetitions=1)
    assert list(table.times_ms) == [1]
    assert len(table.format().splitlines()) == 3
    with pytest.raises(ValueError):
        benchmark(lambda plan: None, [1], repetitions=0)


@pytest.fixture(scope="module")
def separable_records(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sep")
    root = gen_corpus(tmp / "c", 4, 60, 40, 0.0, seed=2)
    return read_corpus(ingest_directory(root, tmp / "c.jsonl").path)


def test_sweep_separable(separable_records):
    table = sweep_test_pct(separable_records, [10, 20, 30, 40], seed=5)
    assert [r.pct for r in table.rows] == [10, 20, 30, 40]
    for row in table.rows:
        assert row.error is None and row.accuracy >= 0.9
        assert row.n_train + row.n_test == 240
    lines = table.format().splitlines()
    assert lines[0].split() == ["test_pct", "train", "test", "correct", "accuracy_pct"]
    assert len(lines) == 5


def test_sweep_single_row_and_errors(separable_records):
    assert len(sweep_test_pct(separable_records, [40], seed=1).rows) == 1
    tiny = separable_records[:2]
    table = sweep_test_pct(tiny + separable_records[-2:], [1, 50], seed=1, mode="exact")
    assert table.rows[0].error is not None  # 1% of 4 docs -> empty test set
    assert table.rows[1].error is None
    with pytest.raises(ValueError):
        sweep_test_pct(separable_records, [0])
