"""Composite 1-100 scores built as clamped affine combinations of
category percentages."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

from .errors import MalformedDefinition, MissingCategory, StyleError
from .lexicons import CategoryCounts

SCORE_MIN = 1.0
SCORE_MAX = 100.0
COMPOSITE_ORDER = ("Tone", "Clout", "Analytical", "Authenticity")


@dataclass(frozen=True)
class CompositeDefinition:
    name: str
    terms: tuple[tuple[str, float], ...]
    intercept: float = 0.0

    def __post_init__(self):
        if not self.terms:
            raise MalformedDefinition(f"composite {self.name!r} has no terms")

    @property
    def categories(self) -> tuple[str, ...]:
        return tuple(cat for cat, _ in self.terms)

    def raw(self, percentages) -> float:
        """Unclamped affine value for a ``category -> percent`` lookup."""
        # fsum keeps cancelling terms exact, so equal Posemo/Negemo gives 50
        return math.fsum([self.intercept] + [w * percentages(cat) for cat, w in self.terms])


def clamp(value: float, lo: float = SCORE_MIN, hi: float = SCORE_MAX) -> float:
    return min(hi, max(lo, value))


def evaluate_composite(definition: CompositeDefinition, counts: CategoryCounts) -> float:
    missing = [c for c in definition.categories if c not in counts]
    if missing:
        raise MissingCategory(
            f"composite {definition.name!r} needs categories not counted: {', '.join(missing)}")
    return clamp(definition.raw(counts.pct))


def parse_composite(text: str, source: str = "<string>") -> CompositeDefinition:
    name = None
    terms: list[tuple[str, float]] = []
    intercept = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if name is None:
            if len(parts) != 1:
                raise MalformedDefinition(f"{source}:{lineno}: expected the composite name")
            name = parts[0]
            continue
        if intercept is not None:
            raise MalformedDefinition(f"{source}:{lineno}: nothing may follow 'intercept'")
        if len(parts) != 2:
            raise MalformedDefinition(f"{source}:{lineno}: expected '<Category> <weight>'")
        try:
            value = float(parts[1])
        except ValueError:
            raise MalformedDefinition(f"{source}:{lineno}: {parts[1]!r} is not a number") from None
        if parts[0] == "intercept":
            intercept = value
        else:
            terms.append((parts[0], value))
    if name is None:
        raise MalformedDefinition(f"{source}: empty composite definition")
    try:
        return CompositeDefinition(name, tuple(terms), intercept or 0.0)
    except MalformedDefinition as exc:
        raise MalformedDefinition(f"{source}: {exc}") from None


def load_composite(path: str | Path) -> CompositeDefinition:
    path = Path(path)
    return parse_composite(path.read_text(encoding="utf-8"), str(path))


def _ordered(defs: list[CompositeDefinition]) -> list[CompositeDefinition]:
    rank = {name: i for i, name in enumerate(COMPOSITE_ORDER)}
    return sorted(defs, key=lambda d: (rank.get(d.name, len(rank)), d.name))


def load_composites(directory: str | Path | None = None) -> list[CompositeDefinition]:
    """Load every ``*.composite`` file; the packaged defaults when no
    directory is given. Known names come first in the usual column order."""
    if directory is None:
        root = resources.files("polistyle").joinpath("data/composites")
        defs = [parse_composite(p.read_text(encoding="utf-8"), p.name)
                for p in sorted(root.iterdir(), key=lambda p: p.name)
                if p.name.endswith(".composite")]
    else:
        directory = Path(directory)
        if not directory.is_dir():
            raise StyleError(f"composite directory not found: {directory}")
        defs = [load_composite(p) for p in sorted(directory.glob("*.composite"))]
    names = [d.name for d in defs]
    if len(set(names)) != len(names):
        raise StyleError("duplicate composite names")
    return _ordered(defs)


def evaluate_all(definitions: Sequence[CompositeDefinition],
                 counts: CategoryCounts) -> dict[str, float]:
    return {d.name: evaluate_composite(d, counts) for d in definitions}
