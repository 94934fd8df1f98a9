"""Labbé intertextual distance and the all-pairs distance matrix.

For texts A (the shorter, length n_A) and B (length n_B) the distance is

    D(A, B) = sum_i |tf_iA - tf_iB * n_A / n_B| / (2 * n_A)

over the union vocabulary. Multiplying numerator and denominator by n_B
turns every term into an integer, so the sum is evaluated exactly and the
single final division is correctly rounded. As a consequence the result is
bit-identical whichever text is treated as the shorter one.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import EmptyText, FewerThanTwoTexts
from .tokenizer import WordToken


@dataclass(frozen=True)
class FrequencyVector:
    counts: Mapping[str, int]
    n: int

    @classmethod
    def from_tokens(cls, tokens: Iterable[WordToken]) -> FrequencyVector:
        counts = Counter(t.folded for t in tokens)
        return cls(dict(counts), sum(counts.values()))

    @classmethod
    def from_words(cls, words: Iterable[str]) -> FrequencyVector:
        counts = Counter(words)
        return cls(dict(counts), sum(counts.values()))


def labbe_distance(a: FrequencyVector, b: FrequencyVector) -> float:
    if a.n <= 0 or b.n <= 0:
        raise EmptyText("intertextual distance needs two non-empty texts")
    if a.n > b.n:
        a, b = b, a
    ca, cb = a.counts, b.counts
    numerator = 0
    for term in ca.keys() | cb.keys():
        numerator += abs(ca.get(term, 0) * b.n - cb.get(term, 0) * a.n)
    return numerator / (2 * a.n * b.n)


@dataclass(frozen=True)
class DistanceMatrix:
    labels: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, pair: tuple[str, str]) -> float:
        i, j = (self.labels.index(x) for x in pair)
        return self.values[i][j]

    def pairs(self) -> list[tuple[str, str, float]]:
        """Every unordered off-diagonal pair once, in label order."""
        return [(self.labels[i], self.labels[j], self.values[i][j])
                for i, j in combinations(range(len(self.labels)), 2)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["", *self.labels])
        for label, row in zip(self.labels, self.values):
            writer.writerow([label, *(repr(v) for v in row)])
        return buf.getvalue()

    def to_long_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["label_a", "label_b", "distance"])
        for a, b, d in self.pairs():
            writer.writerow([a, b, repr(d)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> DistanceMatrix:
        rows = list(csv.reader(io.StringIO(text)))
        labels = tuple(rows[0][1:])
        values = tuple(tuple(float(v) for v in row[1:]) for row in rows[1:])
        if len(values) != len(labels) or any(len(r) != len(labels) for r in values):
            raise ValueError("distance matrix CSV is not square")
        return cls(labels, values)


def _pair_distance(args):
    i, j, a, b = args
    return i, j, labbe_distance(a, b)


def distance_matrix(texts: Sequence[tuple[str, FrequencyVector]], jobs: int = 1) -> DistanceMatrix:
    """Distances between all pairs of ``(label, vector)`` entries.

    ``jobs > 1`` spreads pairs over worker processes; every cell is written
    exactly once, so the result does not depend on the degree of parallelism.
    """
    if len(texts) < 2:
        raise FewerThanTwoTexts(f"fewer than two texts ({len(texts)}) for a distance matrix")
    for label, vec in texts:
        if vec.n <= 0:
            raise EmptyText(f"text {label!r} has no tokens")
    labels = tuple(label for label, _ in texts)
    if len(set(labels)) != len(labels):
        raise ValueError("distance matrix labels must be unique")
    n = len(texts)
    cells = [[0.0] * n for _ in range(n)]
    work = [(i, j, texts[i][1], texts[j][1]) for i, j in combinations(range(n), 2)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_pair_distance, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = map(_pair_distance, work)
    for i, j, d in results:
        cells[i][j] = cells[j][i] = d
    return DistanceMatrix(labels, tuple(tuple(row) for row in cells))
