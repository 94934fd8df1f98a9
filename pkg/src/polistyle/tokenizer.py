"""Word and sentence segmentation.

Words are maximal runs of letters, optionally joined by single internal
apostrophes or hyphens ("don't", "middle-class"). Numbers, punctuation and
letter runs glued to digits ("1980s") yield no token. Sentences end at
``.``, ``!`` or ``?`` followed by whitespace and an uppercase letter, or by
the end of the text, unless the period closes a known abbreviation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

_LETTER = r"[^\W\d_]"
_WORD_RE = re.compile(rf"(?<!\w){_LETTER}+(?:['’-]{_LETTER}+)*(?!\w)")
_TERMINAL_RE = re.compile(r"[.!?]+[\"'”’)\]]*")
_OPENERS = "\"'“‘(["

BIG_WORD_LETTERS = 6


@dataclass(frozen=True, slots=True)
class WordToken:
    surface: str
    folded: str
    letter_count: int

    @classmethod
    def from_surface(cls, surface: str) -> WordToken:
        folded = surface.lower().replace("’", "'")
        return cls(surface, folded, sum(1 for ch in surface if ch.isalpha()))


@dataclass(frozen=True, slots=True)
class SentenceSpan:
    start_token: int
    end_token: int  # exclusive

    def __len__(self) -> int:
        return self.end_token - self.start_token


def read_abbreviations(path: str | Path) -> frozenset[str]:
    """Read an abbreviation list: one entry per line, ``#`` starts a comment."""
    text = Path(path).read_text(encoding="utf-8")
    return _parse_abbreviations(text)


def _parse_abbreviations(text: str) -> frozenset[str]:
    entries = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            entries.add(line.rstrip(".").lower())
    return frozenset(entries)


@lru_cache(maxsize=1)
def default_abbreviations() -> frozenset[str]:
    text = resources.files("polistyle").joinpath("data/abbreviations.txt").read_text(
        encoding="utf-8")
    return _parse_abbreviations(text)


def _is_boundary(text: str, match: re.Match, abbreviations: frozenset[str]) -> bool:
    end = match.end()
    rest = text[end:]
    if not rest.strip():
        return True
    if not rest[0].isspace():
        return False
    follower = rest.lstrip().lstrip(_OPENERS)
    if not follower or not follower[0].isupper():
        return False
    if match.group().startswith(".") and not any(c in "!?" for c in match.group()):
        start = match.start()
        chunk = text[:start].rsplit(None, 1)[-1] if text[:start].strip() else ""
        chunk = chunk.lstrip(_OPENERS)
        if chunk.lower() in abbreviations:
            return False
        # Initials such as "George W. Bush".
        if len(chunk) == 1 and chunk.isupper():
            return False
    return True


def sentence_boundaries(text: str, abbreviations: Iterable[str] | None = None) -> list[int]:
    """Character offsets just past each sentence-final punctuation run."""
    abbrevs = default_abbreviations() if abbreviations is None else frozenset(
        a.rstrip(".").lower() for a in abbreviations)
    return [m.end() for m in _TERMINAL_RE.finditer(text) if _is_boundary(text, m, abbrevs)]


def tokenize(text: str, abbreviations: Iterable[str] | None = None
             ) -> tuple[list[WordToken], list[SentenceSpan]]:
    """Split ``text`` into word tokens and sentence spans over those tokens.

    Sentences that contain no word token (for example a line holding only a
    number) are dropped, so the spans always partition the token list.

    >>> toks, sents = tokenize("I win. We go now.")
    >>> [t.surface for t in toks], [(s.start_token, s.end_token) for s in sents]
    (['I', 'win', 'We', 'go', 'now'], [(0, 2), (2, 5)])
    """
    tokens: list[WordToken] = []
    starts: list[int] = []
    for m in _WORD_RE.finditer(text):
        tokens.append(WordToken.from_surface(m.group()))
        starts.append(m.start())

    sentences: list[SentenceSpan] = []
    boundaries = iter(sentence_boundaries(text, abbreviations))
    limit = next(boundaries, None)
    first = 0
    for i, pos in enumerate(starts):
        while limit is not None and pos >= limit:
            if i > first:
                sentences.append(SentenceSpan(first, i))
                first = i
            limit = next(boundaries, None)
    if len(tokens) > first:
        sentences.append(SentenceSpan(first, len(tokens)))
    return tokens, sentences


def is_big_word(token: WordToken) -> bool:
    return token.letter_count >= BIG_WORD_LETTERS
