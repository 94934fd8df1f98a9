"""Manifest-driven document loading and grouping."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .errors import DuplicateId, EmptyGroup, MalformedManifest, MissingFile, UndecodableText
from .tokenizer import SentenceSpan, WordToken, tokenize

MANIFEST_COLUMNS = ("id", "author", "year", "source_label", "path")


@dataclass(frozen=True)
class DocumentMeta:
    id: str
    author: str
    year: int
    source_label: str
    path: str = ""


@dataclass(frozen=True)
class Document:
    meta: DocumentMeta
    raw_text: str
    tokens: tuple[WordToken, ...] = ()
    sentences: tuple[SentenceSpan, ...] = ()

    @classmethod
    def from_text(cls, meta: DocumentMeta, text: str,
                  abbreviations: Iterable[str] | None = None) -> Document:
        tokens, sentences = tokenize(text, abbreviations)
        return cls(meta, text, tuple(tokens), tuple(sentences))

    @property
    def key(self) -> str:
        return self.meta.id

    @property
    def token_count(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class CorpusGroup:
    key: str
    documents: tuple[Document, ...]

    def __len__(self) -> int:
        return len(self.documents)

    @cached_property
    def concatenated(self) -> Document:
        """All member token streams appended, as one virtual document.

        Sentence spans are shifted so they still index into the combined
        token sequence; the raw text is left empty.
        """
        tokens: list[WordToken] = []
        sentences: list[SentenceSpan] = []
        for doc in self.documents:
            offset = len(tokens)
            tokens.extend(doc.tokens)
            sentences.extend(SentenceSpan(s.start_token + offset, s.end_token + offset)
                             for s in doc.sentences)
        authors = {d.meta.author for d in self.documents}
        labels = {d.meta.source_label for d in self.documents}
        meta = DocumentMeta(
            id=self.key,
            author=authors.pop() if len(authors) == 1 else "",
            year=min((d.meta.year for d in self.documents), default=1),
            source_label=labels.pop() if len(labels) == 1 else "",
        )
        return Document(meta, "", tuple(tokens), tuple(sentences))


@dataclass
class Corpus:
    documents: list[Document] = field(default_factory=list)
    source: str = ""

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    @property
    def token_count(self) -> int:
        return sum(d.token_count for d in self.documents)

    def get(self, doc_id: str) -> Document:
        for doc in self.documents:
            if doc.meta.id == doc_id:
                return doc
        raise KeyError(doc_id)


@dataclass(frozen=True)
class SummaryRow:
    key: str
    count: int
    tokens: int
    types: int
    mean_length: float


def _read_text(path: Path) -> str:
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise MissingFile(f"text file not found: {path}") from None
    except OSError as exc:
        raise MissingFile(f"cannot read {path}: {exc}") from None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise UndecodableText(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    return text.lstrip("\ufeff")


def read_manifest(manifest: str | Path) -> list[DocumentMeta]:
    """Parse a manifest into metadata records, resolving relative paths.

    Paths in the manifest are relative to the manifest's own directory.
    Files ending in ``.tsv`` are read tab-delimited, anything else as CSV.
    """
    manifest = Path(manifest)
    if not manifest.is_file():
        raise MissingFile(f"manifest not found: {manifest}")
    delimiter = "\t" if manifest.suffix.lower() == ".tsv" else ","
    with manifest.open(encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in MANIFEST_COLUMNS if c not in header]
        if missing:
            raise MalformedManifest(
                f"{manifest}: missing required column(s): {', '.join(missing)}")
        records = []
        seen = set()
        for lineno, row in enumerate(reader, start=2):
            row = {(k or "").strip(): (v or "").strip() for k, v in row.items()}
            if not any(row.values()):
                continue
            for col in MANIFEST_COLUMNS:
                if not row.get(col):
                    raise MalformedManifest(f"{manifest}:{lineno}: empty '{col}' field")
            try:
                year = int(row["year"])
            except ValueError:
                raise MalformedManifest(
                    f"{manifest}:{lineno}: year {row['year']!r} is not an integer") from None
            if year <= 0:
                raise MalformedManifest(f"{manifest}:{lineno}: year must be positive")
            if row["id"] in seen:
                raise DuplicateId(f"{manifest}:{lineno}: duplicate id {row['id']!r}")
            seen.add(row["id"])
            path = Path(row["path"])
            if not path.is_absolute():
                path = manifest.parent / path
            records.append(DocumentMeta(row["id"], row["author"], year,
                                        row["source_label"], str(path)))
    return records


def load_corpus(manifest: str | Path, abbreviations: Iterable[str] | None = None) -> Corpus:
    metas = read_manifest(manifest)
    abbrevs = None if abbreviations is None else frozenset(abbreviations)
    docs = [Document.from_text(meta, _read_text(Path(meta.path)), abbrevs) for meta in metas]
    return Corpus(docs, source=str(manifest))


# Grouping rules. Each maps a document to its group key.

def by_author(doc: Document) -> str:
    return doc.meta.author


def by_source(doc: Document) -> str:
    return doc.meta.source_label


def by_document(doc: Document) -> str:
    return doc.meta.id


def by_author_source(reference_label: str = "human") -> Callable[[Document], str]:
    """Key documents by author, suffixed with the source label unless it is
    the reference label (so "Reagan" vs. "Reagan-gpt-4o")."""

    def key(doc: Document) -> str:
        if doc.meta.source_label == reference_label:
            return doc.meta.author
        return f"{doc.meta.author}-{doc.meta.source_label}"

    return key


def group_by(corpus: Corpus | Sequence[Document],
             key_fn: Callable[[Document], str]) -> list[CorpusGroup]:
    """Partition documents by ``key_fn``; groups are sorted by key and keep
    manifest order internally."""
    buckets: dict[str, list[Document]] = {}
    for doc in corpus:
        buckets.setdefault(key_fn(doc), []).append(doc)
    return [CorpusGroup(key, tuple(buckets[key])) for key in sorted(buckets)]


def corpus_summary(group: CorpusGroup) -> SummaryRow:
    if not group.documents:
        raise EmptyGroup(f"group {group.key!r} has no documents")
    tokens = sum(d.token_count for d in group.documents)
    types = len({t.folded for d in group.documents for t in d.tokens})
    return SummaryRow(group.key, len(group.documents), tokens, types,
                      tokens / len(group.documents))
