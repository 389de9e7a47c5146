"""Confusion-matrix metrics and the plain-text evaluation report.

Metrics are computed in exact rational arithmetic and converted to float
once, so they are bit-identical under label permutation and integer scaling
of the matrix. The toolchain's "Reliability" lines are not reproduced: their
definition is not recoverable from the printed output alone.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from nbpipe.errors import DataError


class EvalError(DataError):
    pass


@dataclass
class ConfusionMatrix:
    labels: list[str]
    counts: list[list[int]]

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise EvalError("duplicate labels in confusion matrix")
        if len(self.counts) != n or any(len(row) != n for row in self.counts):
            raise EvalError(f"confusion matrix must be {n}x{n}")
        for row in self.counts:
            for c in row:
                if isinstance(c, bool) or not isinstance(c, int) or c < 0:
                    raise EvalError(f"invalid count {c!r}")

    @classmethod
    def zeros(cls, labels: Sequence[str]) -> "ConfusionMatrix":
        n = len(labels)
        return cls(list(labels), [[0] * n for _ in range(n)])

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    def row_sums(self) -> list[int]:
        return [sum(row) for row in self.counts]

    def col_sums(self) -> list[int]:
        return [sum(col) for col in zip(*self.counts)] if self.counts else []

    def trace(self) -> int:
        return sum(self.counts[i][i] for i in range(len(self.labels)))

    def add(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if other.labels != self.labels:
            raise EvalError("cannot add matrices over different label sets")
        return ConfusionMatrix(self.labels, [[a + b for a, b in zip(r1, r2)]
                                             for r1, r2 in zip(self.counts, other.counts)])

    def permuted(self, order: Sequence[int]) -> "ConfusionMatrix":
        """Relabel rows and columns simultaneously: new position k holds old order[k]."""
        return ConfusionMatrix([self.labels[i] for i in order],
                               [[self.counts[i][j] for j in order] for i in order])

    def to_json(self) -> str:
        return json.dumps({"labels": self.labels, "counts": self.counts},
                          ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ConfusionMatrix":
        try:
            obj = json.loads(text)
            return cls(list(obj["labels"]), [list(r) for r in obj["counts"]])
        except (ValueError, KeyError, TypeError) as exc:
            raise EvalError(f"malformed matrix file: {exc}") from None

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())

    @classmethod
    def read(cls, path) -> "ConfusionMatrix":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


@dataclass(frozen=True)
class ClassStats:
    label: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    correct: int
    incorrect: int
    total: int
    accuracy: float
    kappa: float
    per_class: tuple[ClassStats, ...]
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float


def _require_total(cm: ConfusionMatrix) -> int:
    total = cm.total
    if total == 0:
        raise EvalError("confusion matrix is empty (total = 0)")
    return total


def accuracy(cm: ConfusionMatrix) -> tuple[int, int, float]:
    total = _require_total(cm)
    correct = cm.trace()
    return correct, total - correct, correct / total


def kappa(cm: ConfusionMatrix) -> float:
    total = _require_total(cm)
    chance = sum(r * c for r, c in zip(cm.row_sums(), cm.col_sums()))
    denom = total * total - chance
    if denom == 0:
        return 0.0
    return (cm.trace() * total - chance) / denom


def _per_class_exact(cm: ConfusionMatrix):
    rows, cols = cm.row_sums(), cm.col_sums()
    out = []
    for i, label in enumerate(cm.labels):
        hit = cm.counts[i][i]
        p = Fraction(hit, cols[i]) if cols[i] else Fraction(0)
        r = Fraction(hit, rows[i]) if rows[i] else Fraction(0)
        f = 2 * p * r / (p + r) if p + r else Fraction(0)
        out.append((label, p, r, f, rows[i]))
    return out


def weighted_metrics(cm: ConfusionMatrix):
    """Per-class stats plus support-weighted precision, recall and F1."""
    total = _require_total(cm)
    exact = _per_class_exact(cm)
    wp = sum(Fraction(s, total) * p for _, p, _, _, s in exact)
    wr = sum(Fraction(s, total) * r for _, _, r, _, s in exact)
    wf = sum(Fraction(s, total) * f for _, _, _, f, s in exact)
    per_class = tuple(ClassStats(lbl, float(p), float(r), float(f), s)
                      for lbl, p, r, f, s in exact)
    return per_class, float(wp), float(wr), float(wf)


def evaluate(cm: ConfusionMatrix) -> EvalReport:
    correct, incorrect, acc = accuracy(cm)
    per_class, wp, wr, wf = weighted_metrics(cm)
    return EvalReport(correct, incorrect, cm.total, acc, kappa(cm), per_class, wp, wr, wf)


# --- report text ----------------------------------------------------------

RULE = "=" * 55
THIN = "-" * 55


def column_code(i: int) -> str:
    """a, b, ..., z, aa, ab, ... (spreadsheet-style, lowercase)."""
    code = ""
    i += 1
    while i:
        i, rem = divmod(i - 1, 26)
        code = chr(ord("a") + rem) + code
    return code


def render_report(cm: ConfusionMatrix, timings: dict | None = None,
                  header: Sequence[str] = ()) -> str:
    rep = evaluate(cm)
    lines = [f"# {h}" for h in header]
    if lines:
        lines.append("")

    def summary(name, n, pct=None):
        s = f"{name:<40}: {n:>10}"
        return s if pct is None else f"{s}{pct:>14.4f}%"

    lines += [RULE, "Summary", THIN,
              summary("Correctly Classified Instances", rep.correct, 100 * rep.accuracy),
              summary("Incorrectly Classified Instances", rep.incorrect,
                      100 * rep.incorrect / rep.total),
              summary("Total Classified Instances", rep.total),
              ""]

    codes = [column_code(i) for i in range(len(cm.labels))]
    width = max([len(str(c)) for row in cm.counts for c in row] + [len(c) for c in codes]) + 1
    rows = cm.row_sums()
    lines += [RULE, "Confusion Matrix", THIN,
              "".join(f"{c:<{width}}" for c in codes) + "<--Classified as"]
    for i, row in enumerate(cm.counts):
        cells = "".join(f"{c:<{width}}" for c in row)
        lines.append(f"{cells}| {rows[i]:<{width}} {codes[i]} = {cm.labels[i]}")
    lines.append("")

    def stat(name, val):
        return f"{name:<36}{val}"

    lines += [RULE, "Statistics", THIN,
              stat("Kappa", f"{rep.kappa:.4f}"),
              stat("Accuracy", f"{100 * rep.accuracy:.4f}%"),
              stat("Weighted precision", f"{rep.weighted_precision:.4f}"),
              stat("Weighted recall", f"{rep.weighted_recall:.4f}"),
              stat("Weighted F1 score", f"{rep.weighted_f1:.4f}"),
              ""]
    lines += [RULE, "Per-class statistics", THIN,
              f"{'label':<20}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"]
    for s in rep.per_class:
        lines.append(f"{s.label:<20}{s.precision:>10.4f}{s.recall:>10.4f}"
                     f"{s.f1:>10.4f}{s.support:>10}")
    lines.append("")

    if timings:
        lines += [RULE, "Timings", THIN]
        lines += [stat(name, f"{ms:.0f} ms") for name, ms in timings.items()]
        lines.append("")
    return "\n".join(lines)


_ROW = re.compile(r"^\s*((?:\d+\s+)+)\|\s*(\d+)\s+([a-z]+)\s*=\s*(\S+)\s*$")


def parse_matrix_text(text: str) -> ConfusionMatrix:
    """Parse the rows of a printed confusion matrix block.

    Accepts the layout written by :func:`render_report` as well as the
    classic ``n n n | rowTotal x = label`` listing. Rows keep their printed
    order; column order follows the header codes, which must be a
    permutation of the row codes.
    """
    header = None
    rows = []
    for line in text.splitlines():
        if "<--Classified as" in line:
            header = line.split("<--Classified as")[0].replace("|", " ").split()
            continue
        m = _ROW.match(line)
        if m:
            cells = [int(x) for x in m.group(1).split()]
            if sum(cells) != int(m.group(2)):
                raise EvalError(f"row total mismatch in line {line.strip()!r}")
            rows.append((m.group(3), m.group(4), cells))
    if not rows:
        raise EvalError("no confusion matrix rows found")
    codes = [code for code, _, _ in rows]
    if header is None:
        header = codes
    if sorted(header) != sorted(codes) or any(len(c) != len(header) for _, _, c in rows):
        raise EvalError("header codes do not match matrix rows")
    # reorder columns so that column k is the prediction of row k's class
    col_of = {code: k for k, code in enumerate(header)}
    counts = [[cells[col_of[code]] for code in codes] for _, _, cells in rows]
    return ConfusionMatrix([label for _, label, _ in rows], counts)
