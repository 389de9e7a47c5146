"""Directory-per-class corpus ingestion and the JSON Lines record file.

A corpus root holds one subdirectory per class; every regular file below a
class directory (nested directories included) becomes one record keyed by
``/<label>/<relative/path>``. Records are stored one JSON object per line,
sorted by key.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from nbpipe.errors import DataError

log = logging.getLogger(__name__)

BOM = "\ufeff"


class CorpusError(DataError):
    pass


@dataclass(frozen=True)
class DocumentRecord:
    key: str
    label: str
    text: str

    def __post_init__(self):
        if not self.label or "/" in self.label:
            raise CorpusError(f"invalid label {self.label!r}")
        if not self.key.startswith(f"/{self.label}/") or len(self.key) == len(self.label) + 2:
            raise CorpusError(f"key {self.key!r} does not match label {self.label!r}")


@dataclass(frozen=True)
class CorpusFile:
    path: Path
    record_count: int
    skipped: int = 0


def _encode(rec: DocumentRecord) -> str:
    obj = {"key": rec.key, "label": rec.label, "text": rec.text}
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n"


def write_corpus(records: Iterable[DocumentRecord], path) -> CorpusFile:
    """Write records sorted by key. Duplicate keys are rejected."""
    path = Path(path)
    recs = sorted(records, key=lambda r: r.key)
    for prev, cur in zip(recs, recs[1:]):
        if prev.key == cur.key:
            raise CorpusError(f"duplicate document key {cur.key!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in recs:
            fh.write(_encode(rec))
    return CorpusFile(path, len(recs))


def iter_corpus(path) -> Iterator[DocumentRecord]:
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.endswith(b"\n"):
                raise CorpusError(f"{path}: record {lineno}: truncated record (no line terminator)")
            try:
                obj = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise CorpusError(f"{path}: record {lineno}: malformed record: {exc}") from None
            if not isinstance(obj, dict) or set(obj) != {"key", "label", "text"}:
                raise CorpusError(f"{path}: record {lineno}: expected fields key, label, text")
            if not all(isinstance(v, str) for v in obj.values()):
                raise CorpusError(f"{path}: record {lineno}: fields must be strings")
            try:
                yield DocumentRecord(obj["key"], obj["label"], obj["text"])
            except CorpusError as exc:
                raise CorpusError(f"{path}: record {lineno}: {exc}") from None


def read_corpus(path) -> list[DocumentRecord]:
    """Read every record in stored order; duplicate keys are an error."""
    records = list(iter_corpus(path))
    seen = set()
    for i, rec in enumerate(records, start=1):
        if rec.key in seen:
            raise CorpusError(f"{path}: record {i}: duplicate key {rec.key!r}")
        seen.add(rec.key)
    return records


def _read_document(path: Path) -> str:
    text = path.read_bytes().decode("utf-8")
    if text.startswith(BOM):
        text = text[1:]
    return text


def ingest_directory(root, out, fail_fast: bool = False) -> CorpusFile:
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"corpus root {root} does not exist or is not a directory")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise CorpusError(f"{root}: no class directories")

    records = []
    skipped = []
    for cdir in class_dirs:
        label = cdir.name
        for dirpath, dirnames, filenames in os.walk(cdir):
            dirnames.sort()
            for name in sorted(filenames):
                fpath = Path(dirpath, name)
                if not fpath.is_file():
                    continue
                rel = fpath.relative_to(cdir).as_posix()
                try:
                    text = _read_document(fpath)
                except (OSError, UnicodeDecodeError) as exc:
                    if fail_fast:
                        raise CorpusError(f"cannot read {fpath}: {exc}") from None
                    skipped.append((fpath, exc))
                    continue
                records.append(DocumentRecord(f"/{label}/{rel}", label, text))

    if skipped:
        log.warning("skipped %d unreadable file(s); first: %s (%s)",
                    len(skipped), skipped[0][0], skipped[0][1])
    cf = write_corpus(records, out)
    return CorpusFile(cf.path, cf.record_count, skipped=len(skipped))


def label_index(corpus) -> list[str]:
    """Sorted distinct labels of a corpus file (or an iterable of records)."""
    if isinstance(corpus, CorpusFile):
        records = iter_corpus(corpus.path)
    elif isinstance(corpus, (str, os.PathLike)):
        records = iter_corpus(corpus)
    else:
        records = corpus
    labels = sorted({r.label for r in records})
    if not labels:
        raise CorpusError("empty corpus has no labels")
    return labels
