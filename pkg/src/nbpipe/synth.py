"""Synthetic directory-per-class corpora for tests and demos."""

from __future__ import annotations

import random
import shutil
from pathlib import Path

from nbpipe.errors import DataError
from nbpipe.text_prep import default_stopwords

_ONSET = "bcçdfghjklmnprsştvyz"
_VOWEL = "aeıioöuü"
# words end in one of these so the light stemmer leaves them alone
_CODA = "kmpsştçz"


def _pseudo_word(rng: random.Random) -> str:
    syll = rng.randint(1, 3)
    body = "".join(rng.choice(_ONSET) + rng.choice(_VOWEL) for _ in range(syll))
    return body + rng.choice(_CODA)


def make_vocabularies(num_classes: int, vocab_per_class: int, overlap_fraction: float,
                      rng: random.Random) -> list[list[str]]:
    """Per-class vocabularies; ``int(overlap * vocab)`` words are shared by all."""
    stop = default_stopwords()
    shared_n = int(overlap_fraction * vocab_per_class)
    need = shared_n + num_classes * (vocab_per_class - shared_n)
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < need:
        w = _pseudo_word(rng)
        if w in seen or w in stop:
            continue
        seen.add(w)
        words.append(w)
    shared, rest = words[:shared_n], words[shared_n:]
    k = vocab_per_class - shared_n
    return [shared + rest[i * k:(i + 1) * k] for i in range(num_classes)]


def _sentence_case(words: list[str]) -> str:
    first = words[0]
    head = {"i": "İ", "ı": "I"}.get(first[0], first[0].upper())
    return " ".join([head + first[1:], *words[1:]]) + "."


def gen_corpus(out, num_classes: int = 5, docs_per_class: int = 100, vocab_per_class: int = 50,
               overlap_fraction: float = 0.1, seed: int = 1, force: bool = False,
               doc_len: tuple[int, int] = (30, 80)) -> Path:
    if min(num_classes, docs_per_class, vocab_per_class) < 1:
        raise ValueError("class, document and vocabulary counts must be >= 1")
    if not 0 <= overlap_fraction < 1:
        raise ValueError("overlap_fraction must be in [0, 1)")
    out = Path(out)
    if out.exists() and any(out.iterdir()):
        if not force:
            raise DataError(f"output directory {out} is not empty (use --force)")
        shutil.rmtree(out)
    out.mkdir(parents=True, exist_ok=True)

    rng = random.Random(seed)
    vocabs = make_vocabularies(num_classes, vocab_per_class, overlap_fraction, rng)
    width = len(str(num_classes - 1))
    for c, vocab in enumerate(vocabs):
        order = vocab[:]
        rng.shuffle(order)
        # Zipf-like frequencies within each class
        weights = [1.0 / (r + 1) for r in range(len(order))]
        cdir = out / f"class{c:0{width}d}"
        cdir.mkdir()
        for d in range(docs_per_class):
            n = rng.randint(*doc_len)
            tokens = rng.choices(order, weights=weights, k=n)
            sentences = []
            while tokens:
                cut = rng.randint(6, 14)
                sentences.append(_sentence_case(tokens[:cut]))
                tokens = tokens[cut:]
            (cdir / f"doc{d:05d}.txt").write_text(" ".join(sentences) + "\n", encoding="utf-8")
    return out
