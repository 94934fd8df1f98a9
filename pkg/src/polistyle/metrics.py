"""Complexity measures and full per-subject style profiles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .composites import CompositeDefinition, evaluate_all
from .corpus import CorpusGroup, Document
from .errors import EmptyText, MissingMeasure
from .lexicons import CategoryCounts, Lexicon, count_categories, status_score
from .tokenizer import BIG_WORD_LETTERS

# Measure names understood by StyleProfile.measure besides category and
# composite names.
MWL = "MWL"
BW = "BW"
MSL = "MSL"
STATUS = "Status"
COMPLEXITY_MEASURES = (MWL, BW, MSL)


@dataclass(frozen=True)
class ComplexityProfile:
    mean_word_length: float
    big_word_pct: float
    mean_sentence_length: float
    token_count: int
    sentence_count: int
    big_word_count: int
    letter_count: int


def complexity(doc: Document) -> ComplexityProfile:
    """Mean letters per word, percentage of words with six or more letters,
    and mean words per sentence."""
    n = len(doc.tokens)
    if n == 0 or not doc.sentences:
        raise EmptyText(f"{doc.key or 'text'}: no word tokens to measure")
    letters = 0
    big = 0
    for tok in doc.tokens:
        letters += tok.letter_count
        if tok.letter_count >= BIG_WORD_LETTERS:
            big += 1
    return ComplexityProfile(
        mean_word_length=letters / n,
        big_word_pct=100.0 * big / n,
        mean_sentence_length=n / len(doc.sentences),
        token_count=n,
        sentence_count=len(doc.sentences),
        big_word_count=big,
        letter_count=letters,
    )


@dataclass(frozen=True)
class StyleProfile:
    subject: str
    complexity: ComplexityProfile
    categories: CategoryCounts
    composites: dict[str, float] = field(default_factory=dict)
    doc_count: int = 1

    def measure(self, name: str) -> float:
        if name == MWL:
            return self.complexity.mean_word_length
        if name == BW:
            return self.complexity.big_word_pct
        if name == MSL:
            return self.complexity.mean_sentence_length
        if name == STATUS:
            return status_score(self.categories)
        if name in self.categories:
            return self.categories.pct(name)
        if name in self.composites:
            return self.composites[name]
        raise MissingMeasure(f"{self.subject}: no measure named {name!r}")

    def proportion(self, name: str) -> tuple[int, int] | None:
        """``(hits, tokens)`` behind a percentage measure, else None."""
        if name == BW:
            return self.complexity.big_word_count, self.complexity.token_count
        if name in self.categories:
            return self.categories.hits[name], self.categories.total_tokens
        return None


Subject = Union[Document, CorpusGroup]


def profile(subject: Subject, lexicons: Sequence[Lexicon],
            composites: Sequence[CompositeDefinition] = ()) -> StyleProfile:
    """Profile one document, or a group over its concatenated token stream."""
    if isinstance(subject, CorpusGroup):
        if not subject.documents:
            raise EmptyText(f"group {subject.key!r} has no documents")
        doc, key, count = subject.concatenated, subject.key, len(subject)
    else:
        doc, key, count = subject, subject.key, 1
    cx = complexity(doc)
    counts = count_categories(doc.tokens, lexicons)
    return StyleProfile(key, cx, counts, evaluate_all(composites, counts), count)
