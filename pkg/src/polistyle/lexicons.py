"""Category word lists with trailing-``*`` wildcards, and hit counting."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import MalformedPattern, MissingCategory, StyleError
from .tokenizer import WordToken

PRONOUN_CATEGORIES = ("Self", "We", "You", "SheHe", "They", "Ipron")
SEMANTIC_CATEGORIES = ("Posemo", "Negemo", "Cogproc", "Achieve", "Familiarity",
                       "Symbolism", "Politics")
FUNCTION_CATEGORIES = ("Article", "Prep", "Auxverb", "Conj", "Adverb", "Negate")

DISPLAY_NAMES = {"SheHe": "She/he"}

_END = ""


class PrefixTrie:
    """Character trie answering "does any stored stem prefix this word?".

    Lookup walks at most ``len(word)`` nodes regardless of how many stems
    are stored.
    """

    def __init__(self, stems: Iterable[str] = ()):
        self._root: dict = {}
        for stem in stems:
            self.add(stem)

    def add(self, stem: str) -> None:
        node = self._root
        for ch in stem:
            node = node.setdefault(ch, {})
        node[_END] = True

    def has_prefix_of(self, word: str) -> bool:
        node = self._root
        if _END in node:
            return True
        for ch in word:
            node = node.get(ch)
            if node is None:
                return False
            if _END in node:
                return True
        return False


@dataclass(frozen=True)
class Lexicon:
    name: str
    literals: frozenset[str] = frozenset()
    prefixes: frozenset[str] = frozenset()
    _trie: PrefixTrie = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "literals", frozenset(w.lower() for w in self.literals))
        object.__setattr__(self, "prefixes", frozenset(p.lower() for p in self.prefixes))
        object.__setattr__(self, "_trie", PrefixTrie(self.prefixes))

    def matches(self, folded: str) -> bool:
        return folded in self.literals or self._trie.has_prefix_of(folded)

    def __len__(self) -> int:
        return len(self.literals) + len(self.prefixes)


def parse_entry(entry: str) -> tuple[str, bool]:
    """Return ``(text, is_prefix)`` for one lexicon line; raises ValueError."""
    entry = entry.strip().lower()
    if any(ch.isspace() for ch in entry):
        raise ValueError(f"entry {entry!r} contains whitespace")
    star = entry.find("*")
    if star == -1:
        return entry, False
    if star != len(entry) - 1:
        raise ValueError(f"wildcard '*' only allowed at the end of an entry: {entry!r}")
    if star == 0:
        raise ValueError("a bare '*' would match every word")
    return entry[:-1], True


def parse_lexicon(text: str, source: str = "<string>") -> Lexicon:
    """Parse lexicon text; the optional first entry `name: X` names the category."""
    name = None
    literals: set[str] = set()
    prefixes: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if sep:
            if name is not None or literals or prefixes or key.strip().lower() != "name":
                raise MalformedPattern("'name: <CategoryName>' is only allowed as the first entry",
                                       source, lineno)
            if not value.strip():
                raise MalformedPattern("empty category name", source, lineno)
            name = value.strip()
            continue
        try:
            word, is_prefix = parse_entry(line)
        except ValueError as exc:
            raise MalformedPattern(str(exc), source, lineno) from None
        (prefixes if is_prefix else literals).add(word)
    if name is None:
        # Headerless lists (and empty files) take their name from the file.
        name = Path(source).stem if source != "<string>" else ""
    return Lexicon(name, frozenset(literals), frozenset(prefixes))


def load_lexicon(path: str | Path) -> Lexicon:
    path = Path(path)
    return parse_lexicon(path.read_text(encoding="utf-8"), str(path))


def load_lexicons(directory: str | Path | None = None) -> list[Lexicon]:
    """Load every ``*.lex`` file in ``directory`` (sorted by file name).

    With no directory the packaged default pack is used.
    """
    if directory is None:
        root = resources.files("polistyle").joinpath("data/lexicons")
        files = sorted((p for p in root.iterdir() if p.name.endswith(".lex")),
                       key=lambda p: p.name)
        lexicons = [parse_lexicon(p.read_text(encoding="utf-8"), p.name) for p in files]
    else:
        directory = Path(directory)
        if not directory.is_dir():
            raise StyleError(f"lexicon directory not found: {directory}")
        lexicons = [load_lexicon(p) for p in sorted(directory.glob("*.lex"))]
    names = [lex.name for lex in lexicons]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise StyleError(f"duplicate lexicon names: {', '.join(dupes)}")
    return lexicons


@dataclass(frozen=True)
class CategoryCounts:
    hits: Mapping[str, int]
    total_tokens: int

    def pct(self, name: str) -> float:
        if name not in self.hits:
            raise MissingCategory(f"category {name!r} was not counted")
        if self.total_tokens == 0:
            return 0.0
        return 100.0 * self.hits[name] / self.total_tokens

    def percentages(self) -> dict[str, float]:
        return {name: self.pct(name) for name in self.hits}

    def __contains__(self, name: str) -> bool:
        return name in self.hits


def count_categories(tokens: Sequence[WordToken], lexicons: Sequence[Lexicon]) -> CategoryCounts:
    """Count, per category, how many tokens match it.

    A token adds at most one hit to a category, but may hit several
    categories.
    """
    forms = Counter(t.folded for t in tokens)
    hits = {}
    for lex in lexicons:
        hits[lex.name] = sum(n for form, n in forms.items() if lex.matches(form))
    return CategoryCounts(hits, len(tokens))


def status_score(counts: CategoryCounts | Mapping[str, float]) -> float:
    """We + You - Self, in percentage points.

    Accepts either counts or a mapping of already-computed percentages.
    """
    if isinstance(counts, CategoryCounts):
        pct = counts.pct
    else:
        def pct(name):
            if name not in counts:
                raise MissingCategory(f"category {name!r} missing")
            return counts[name]
    return pct("We") + pct("You") - pct("Self")
