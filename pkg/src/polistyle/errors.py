"""Exception hierarchy.

Every data problem raises a subclass of :class:`StyleError`; the CLI maps
these to exit code 2.
"""

from __future__ import annotations


class StyleError(Exception):
    """Base class for all data errors raised by polistyle."""


class MissingFile(StyleError):
    pass


class DuplicateId(StyleError):
    pass


class MalformedManifest(StyleError):
    pass


class EmptyGroup(StyleError):
    pass


class EmptyText(StyleError):
    pass


class MalformedPattern(StyleError):
    """A lexicon entry uses ``*`` somewhere other than the final position."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")


class MalformedDefinition(StyleError):
    """A composite definition file does not follow the expected grammar."""


class MissingCategory(StyleError):
    pass


class DegenerateSample(StyleError):
    pass


class FewerThanTwoTexts(StyleError):
    pass


class TooFewLabels(StyleError):
    pass


class MissingLayout(StyleError):
    pass


class MissingMeasure(StyleError):
    pass


class UndecodableText(StyleError):
    """A text file is not valid UTF-8."""
