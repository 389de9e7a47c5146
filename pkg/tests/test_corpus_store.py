import json

import pytest
from hypothesis import given, settings, HealthCheck
from hypothesis import strategies as st

from conftest import make_tree
from nbpipe.corpus_store import (CorpusError, DocumentRecord, ingest_directory, iter_corpus,
                                 label_index, read_corpus, write_corpus)


@pytest.fixture
def small_tree(tmp_path):
    return make_tree(tmp_path / "root", {
        "eng/b.txt": "köprü tasarımı",
        "eng/a.txt": "yazılım mühendisliği",
        "law/x.txt": "anayasa hukuku",
    })


def test_ingest_counts_and_labels(small_tree, tmp_path):
    cf = ingest_directory(small_tree, tmp_path / "c.jsonl")
    assert cf.record_count == 3
    recs = read_corpus(cf.path)
    assert [r.label for r in recs] == ["eng", "eng", "law"]
    assert [r.key for r in recs] == ["/eng/a.txt", "/eng/b.txt", "/law/x.txt"]
    assert recs[0].text == "yazılım mühendisliği"


def test_empty_root_is_an_error(tmp_path):
    (tmp_path / "empty").mkdir()
    with pytest.raises(CorpusError, match="no class directories"):
        ingest_directory(tmp_path / "empty", tmp_path / "c.jsonl")


def test_missing_root(tmp_path):
    with pytest.raises(CorpusError):
        ingest_directory(tmp_path / "nope", tmp_path / "c.jsonl")


def test_bom_is_stripped(tmp_path):
    root = make_tree(tmp_path / "r", {"k/f.txt": b"\xef\xbb\xbfabc"})
    cf = ingest_directory(root, tmp_path / "c.jsonl")
    assert read_corpus(cf.path)[0].text == "abc"


def test_nested_dirs_flatten_into_key(tmp_path):
    root = make_tree(tmp_path / "r", {"med/2015/a.txt": "x", "med/b.txt": "y"})
    recs = read_corpus(ingest_directory(root, tmp_path / "c.jsonl").path)
    assert [r.key for r in recs] == ["/med/2015/a.txt", "/med/b.txt"]
    assert {r.label for r in recs} == {"med"}


def test_invalid_utf8_skipped_or_fatal(tmp_path, caplog):
    root = make_tree(tmp_path / "r", {"a/good.txt": "iyi", "a/bad.txt": b"\xff\xfe\xfa"})
    cf = ingest_directory(root, tmp_path / "c.jsonl")
    assert cf.record_count == 1 and cf.skipped == 1
    assert "skipped 1" in caplog.text
    with pytest.raises(CorpusError, match="bad.txt"):
        ingest_directory(root, tmp_path / "c2.jsonl", fail_fast=True)


def test_roundtrip_is_byte_identical(small_tree, tmp_path):
    cf = ingest_directory(small_tree, tmp_path / "c.jsonl")
    write_corpus(read_corpus(cf.path), tmp_path / "again.jsonl")
    assert (tmp_path / "again.jsonl").read_bytes() == cf.path.read_bytes()


def test_truncated_final_line(small_tree, tmp_path):
    cf = ingest_directory(small_tree, tmp_path / "c.jsonl")
    data = cf.path.read_bytes()
    cf.path.write_bytes(data[:-10])
    with pytest.raises(CorpusError, match="record 3"):
        read_corpus(cf.path)


def test_malformed_line_names_record(tmp_path):
    p = tmp_path / "c.jsonl"
    good = json.dumps({"key": "/a/1", "label": "a", "text": "t"})
    p.write_text(good + "\n{not json}\n", encoding="utf-8")
    with pytest.raises(CorpusError, match="record 2"):
        read_corpus(p)


def test_key_label_mismatch_rejected(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text(json.dumps({"key": "/b/1", "label": "a", "text": "t"}) + "\n", encoding="utf-8")
    with pytest.raises(CorpusError, match="record 1"):
        read_corpus(p)


def test_empty_file(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_bytes(b"")
    assert read_corpus(p) == []


def test_duplicate_keys_fatal(tmp_path):
    recs = [DocumentRecord("/a/1", "a", "x"), DocumentRecord("/a/1", "a", "y")]
    with pytest.raises(CorpusError, match="duplicate"):
        write_corpus(recs, tmp_path / "c.jsonl")


def test_label_index(small_tree, tmp_path):
    cf = ingest_directory(small_tree, tmp_path / "c.jsonl")
    assert label_index(cf) == ["eng", "law"]
    recs = [DocumentRecord(f"/{l}/{i}", l, "") for i, l in enumerate("baa")]
    assert label_index(recs) == ["a", "b"]
    assert label_index([DocumentRecord("/x/1", "x", "")]) == ["x"]


def test_label_index_five_class_layout(tmp_path):
    names = ["engineering", "law", "life", "medicine", "social"]
    root = make_tree(tmp_path / "r", {f"{n}/doc.txt": n for n in reversed(names)})
    assert label_index(ingest_directory(root, tmp_path / "c.jsonl")) == names


_label = st.text(alphabet="abcçğıöşü", min_size=1, max_size=4)
_name = st.text(alphabet="xyz019_.", min_size=1, max_size=5).filter(lambda s: s not in (".", ".."))


@settings(max_examples=40, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(tree=st.dictionaries(st.tuples(_label, _name), st.text(max_size=20), max_size=12))
def test_property_count_unique_sorted(tmp_path_factory, tree):
    root = tmp_path_factory.mktemp("tree")
    files = {f"{lbl}/{name}": text for (lbl, name), text in tree.items()}
    if not files:
        (root / "only").mkdir()
    make_tree(root, files)
    out = root.parent / (root.name + ".jsonl")
    cf = ingest_directory(root, out)
    keys = [r.key for r in iter_corpus(out)]
    assert cf.record_count == len(files) == len(keys)
    assert keys == sorted(set(keys))
    # raw file roundtrip
    write_corpus(read_corpus(out), out.with_suffix(".2"))
    assert out.with_suffix(".2").read_bytes() == out.read_bytes()
