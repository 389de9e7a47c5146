"""Turkish text normalization: tokenizing, stop-word removal, light stemming.

The stemmer is a rule table, not a morphological analyzer. It repeatedly
strips the longest matching suffix from ``suffixes_tr.txt`` while

* the remaining stem keeps at least 3 characters (4 for one-letter suffixes,
  which are otherwise indistinguishable from root-final vowels as in "veri"),
* the suffix vowel harmonizes with the last vowel of the remaining stem
  (front/back, and rounding for the high vowels ı/i/u/ü),
* no more than ``max_suffix_strip`` suffixes have been removed.

Harmony is what keeps "makaleler" at "makale" instead of eating the root vowel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

APOSTROPHES = frozenset("'’ʼ")
MIN_STEM = 3

_FRONT = frozenset("eiöüî")
_ROUNDED = frozenset("oöuüû")
_HIGH = frozenset("ıiuüîû")
_VOWELS = frozenset("aeıioöuüâîû")


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]


@lru_cache(maxsize=None)
def _packaged(name: str) -> tuple[str, ...]:
    ref = resources.files("nbpipe") / "data" / name
    with resources.as_file(ref) as p:
        return tuple(_read_lines(p))


def default_stopwords() -> frozenset[str]:
    return frozenset(_packaged("stopwords_tr.txt"))


def default_suffixes() -> tuple[str, ...]:
    return _packaged("suffixes_tr.txt")


def load_stopwords(path) -> frozenset[str]:
    return frozenset(turkish_lower(w) for w in _read_lines(Path(path)))


def load_suffixes(path) -> tuple[str, ...]:
    return tuple(_read_lines(Path(path)))


@dataclass(frozen=True)
class PrepConfig:
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    min_token_len: int = 2
    stemming: str = "light"
    max_suffix_strip: int = 4
    suffixes: tuple[str, ...] = field(default_factory=default_suffixes)

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")
        if self.stemming not in ("off", "light"):
            raise ValueError(f"unknown stemming mode {self.stemming!r}")
        if self.max_suffix_strip < 0:
            raise ValueError("max_suffix_strip must be >= 0")
        # longest match first, ties keep file order
        object.__setattr__(self, "suffixes",
                           tuple(sorted(self.suffixes, key=len, reverse=True)))

    def describe(self) -> dict:
        return {
            "stopwords": len(self.stopwords),
            "min_token_len": self.min_token_len,
            "stemming": self.stemming,
            "max_suffix_strip": self.max_suffix_strip,
            "suffixes": len(self.suffixes),
        }


def turkish_lower(text: str) -> str:
    return text.replace("I", "ı").replace("İ", "i").lower()


def tokenize(text: str, min_token_len: int = 2) -> list[str]:
    text = turkish_lower(text)
    tokens = []
    cur: list[str] = []
    skipping = False
    for ch in text:
        if ch.isalpha():
            if not skipping:
                cur.append(ch)
            continue
        if ch in APOSTROPHES and cur:
            # proper-noun suffix after an apostrophe ("Türkiye'nin") is dropped
            skipping = True
        else:
            skipping = False
        if cur:
            tokens.append("".join(cur))
            cur = []
    if cur:
        tokens.append("".join(cur))
    return [t for t in tokens if len(t) >= min_token_len]


def remove_stopwords(tokens: list[str], config: PrepConfig) -> list[str]:
    stop = config.stopwords
    return [t for t in tokens if t not in stop]


def _last_vowel(s: str) -> str | None:
    for ch in reversed(s):
        if ch in _VOWELS:
            return ch
    return None


def _harmonizes(stem: str, suffix: str) -> bool:
    sv = _last_vowel(suffix)
    if sv is None:
        return True
    lv = _last_vowel(stem)
    if lv is None:
        return False
    if (sv in _FRONT) != (lv in _FRONT):
        return False
    if sv in _HIGH and (sv in _ROUNDED) != (lv in _ROUNDED):
        return False
    return True


def stem_light(token: str, config: PrepConfig | None = None) -> str:
    if config is None:
        config = _DEFAULT
    stem = token
    for _ in range(config.max_suffix_strip):
        for suf in config.suffixes:
            if not stem.endswith(suf):
                continue
            rest = stem[: len(stem) - len(suf)]
            floor = MIN_STEM + 1 if len(suf) == 1 else MIN_STEM
            if len(rest) >= floor and _harmonizes(rest, suf):
                stem = rest
                break
        else:
            break
    return stem


def preprocess(text: str, config: PrepConfig | None = None) -> list[str]:
    if config is None:
        config = _DEFAULT
    terms = remove_stopwords(tokenize(text, config.min_token_len), config)
    if config.stemming == "light":
        terms = [stem_light(t, config) for t in terms]
        # a stem can collide with a stop-word ("dahada" -> "daha")
        terms = [t for t in terms
                 if t not in config.stopwords and len(t) >= config.min_token_len]
    return terms


_DEFAULT = PrepConfig()
