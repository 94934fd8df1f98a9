"""Comparison tables with significance marks, and the full report bundle."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping, Sequence

from . import __version__
from .composites import CompositeDefinition, load_composites
from .config import RunConfig
from .corpus import Corpus, CorpusGroup, Document, by_author_source, corpus_summary, group_by, load_corpus
from .distance import DistanceMatrix, FrequencyVector, distance_matrix
from .errors import DegenerateSample, EmptyText, StyleError
from .lexicons import (DISPLAY_NAMES, PRONOUN_CATEGORIES, SEMANTIC_CATEGORIES, Lexicon,
                       load_lexicons)
from .metrics import BW, COMPLEXITY_MEASURES, MSL, MWL, STATUS, StyleProfile, profile
from .stats import SignificanceMarks, TestResult, mark_significance, proportion_test, t_test_two_sample
from .tokenizer import read_abbreviations
from .tree import export_tree, layout_equal_angle, neighbor_joining

log = logging.getLogger(__name__)

MEASURE_LABELS = {
    MWL: "Mean word length",
    BW: "Big words",
    MSL: "Mean sentence length",
    STATUS: "We+You-Self",
    **DISPLAY_NAMES,
}
PERCENT_MEASURES = {BW, STATUS}

TestPair = tuple["TestResult | None", "TestResult | None"]


# Table model ----------------------------------------------------------------


@dataclass
class Column:
    name: str
    label: str
    kind: str = "real"  # real | percent | int
    emphasis: bool = True


@dataclass
class Cell:
    value: float
    marks: SignificanceMarks | None = None
    emphasis: str | None = None  # "max", "min" or None
    doc_mean: float | None = None


@dataclass
class StyleTable:
    title: str
    rows: list[str]
    columns: list[Column]
    cells: list[list[Cell]]
    notes: list[str] = field(default_factory=list)

    def column(self, name: str) -> list[Cell]:
        idx = [c.name for c in self.columns].index(name)
        return [row[idx] for row in self.cells]


def apply_emphasis(table: StyleTable) -> StyleTable:
    """Mark each column's maximum "max" and minimum "min".

    Decisions use full-precision values; ties share the mark. Columns with
    fewer than two rows, or with all values equal, get no emphasis.
    """
    for idx, col in enumerate(table.columns):
        cells = [row[idx] for row in table.cells]
        for cell in cells:
            cell.emphasis = None
        if not col.emphasis or len(cells) < 2:
            continue
        values = [c.value for c in cells]
        hi, lo = max(values), min(values)
        if hi == lo:
            continue
        for cell in cells:
            if cell.value == hi:
                cell.emphasis = "max"
            elif cell.value == lo:
                cell.emphasis = "min"
    return table


def build_table(title: str, profiles: Sequence[StyleProfile], measures: Sequence[str],
                tests: Mapping[tuple[str, str], TestPair] | None = None,
                doc_means: Mapping[tuple[str, str], float] | None = None,
                notes: Sequence[str] = ()) -> StyleTable:
    """Collect ``measures`` for every profile into an emphasised table.

    ``tests`` maps ``(subject, measure)`` to the pair of tests against the
    first and second baseline.
    """
    tests = tests or {}
    doc_means = doc_means or {}
    columns = []
    for name in measures:
        percent = name in PERCENT_MEASURES or any(
            p.proportion(name) is not None for p in profiles[:1])
        columns.append(Column(name, MEASURE_LABELS.get(name, name), "percent" if percent else "real"))
    cells = []
    for prof in profiles:
        row = []
        for name in measures:
            value = prof.measure(name)
            pair = tests.get((prof.subject, name))
            marks = mark_significance(*pair) if pair else None
            row.append(Cell(value, marks, None, doc_means.get((prof.subject, name))))
        cells.append(row)
    return apply_emphasis(StyleTable(title, [p.subject for p in profiles], columns, cells, list(notes)))


def _fmt(value: float, kind: str) -> str:
    if kind == "int":
        return f"{int(value):,}"
    if kind == "percent":
        return f"{value:,.2f}%"
    return f"{value:,.2f}"


def _md_escape(text: str) -> str:
    return text.replace("|", "\\|")


def render_markdown(table: StyleTable) -> str:
    lines = []
    if table.title:
        lines += [f"### {table.title}", ""]
    lines.append("| | " + " | ".join(_md_escape(c.label) for c in table.columns) + " |")
    lines.append("|---|" + "|".join("---:" for _ in table.columns) + "|")
    for label, row in zip(table.rows, table.cells):
        parts = []
        for col, cell in zip(table.columns, row):
            text = _fmt(cell.value, col.kind) + (str(cell.marks) if cell.marks else "")
            if cell.emphasis == "max":
                text = f"**{text}**"
            elif cell.emphasis == "min":
                text = f"*{text}*"
            parts.append(text)
        lines.append(f"| {_md_escape(label)} | " + " | ".join(parts) + " |")
    if table.notes:
        lines.append("")
        lines.extend(table.notes)
    return "\n".join(lines) + "\n"


def render_csv(table: StyleTable) -> str:
    """Full-precision CSV; marks and emphasis get their own columns.

    Values are written with ``repr`` so they parse back to the exact
    doubles the emphasis was decided on.
    """
    has_marks = any(cell.marks is not None for row in table.cells for cell in row)
    has_means = any(cell.doc_mean is not None for row in table.cells for cell in row)
    header = ["subject"]
    for col in table.columns:
        header.append(col.name)
        if has_marks:
            header += [f"{col.name}_dagger", f"{col.name}_double_dagger"]
        if col.emphasis:
            header.append(f"{col.name}_emphasis")
        if has_means:
            header.append(f"{col.name}_doc_mean")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for label, row in zip(table.rows, table.cells):
        out = [label]
        for col, cell in zip(table.columns, row):
            out.append(str(int(cell.value)) if col.kind == "int" else repr(float(cell.value)))
            if has_marks:
                marks = cell.marks
                out += ["" if marks is None else int(marks.vs_baseline_1),
                        "" if marks is None else int(marks.vs_baseline_2)]
            if col.emphasis:
                out.append(cell.emphasis or "")
            if has_means:
                out.append("" if cell.doc_mean is None else repr(cell.doc_mean))
        writer.writerow(out)
    return buf.getvalue()


def render(table: StyleTable, fmt: str = "markdown") -> str:
    if fmt == "markdown":
        return render_markdown(table)
    if fmt == "csv":
        return render_csv(table)
    raise ValueError(f"unknown table format {fmt!r}; use markdown or csv")


def render_table(profiles: Sequence[StyleProfile], measures: Sequence[str],
                 tests: Mapping[tuple[str, str], TestPair] | None = None,
                 fmt: str = "markdown", title: str = "") -> str:
    """Build and render one comparison table in a single step."""
    for prof in profiles:
        for name in measures:
            prof.measure(name)  # raises MissingMeasure early
    return render(build_table(title, profiles, measures, tests), fmt)


# Analysis ---------------------------------------------------------------------


def _profile_one(subject, lexicons, composites):
    return profile(subject, lexicons, composites)


def profile_all(subjects: Sequence, lexicons: Sequence[Lexicon],
                composites: Sequence[CompositeDefinition], jobs: int = 1) -> list[StyleProfile]:
    """Profile documents or groups, optionally across worker processes.

    Results come back in input order whatever the number of workers.
    """
    fn = partial(_profile_one, lexicons=lexicons, composites=composites)
    if jobs > 1 and len(subjects) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, subjects))
    return [fn(s) for s in subjects]


@dataclass
class Analysis:
    """Everything the comparison tables need, computed once."""

    corpus: Corpus
    lexicons: list[Lexicon]
    composites: list[CompositeDefinition]
    rows: list[CorpusGroup]
    row_profiles: dict[str, StyleProfile]
    doc_profiles: dict[str, StyleProfile]
    baselines: tuple[str, ...]
    alpha: float = 0.01
    equal_var: bool = False

    @property
    def categories(self) -> list[str]:
        return [lex.name for lex in self.lexicons]

    def group(self, key: str) -> CorpusGroup:
        for g in self.rows:
            if g.key == key:
                return g
        raise KeyError(key)

    def doc_values(self, key: str, measure: str) -> list[float]:
        return [self.doc_profiles[d.key].measure(measure) for d in self.group(key).documents]

    def test(self, key: str, baseline: str, measure: str) -> TestResult | None:
        """Compare one row against one baseline row, or None if untestable.

        Percentage measures use the proportion test on pooled counts; other
        measures a t-test over per-document values.
        """
        if key == baseline:
            return None
        row, base = self.row_profiles[key], self.row_profiles[baseline]
        prop_row, prop_base = row.proportion(measure), base.proportion(measure)
        try:
            if prop_row is not None and prop_base is not None:
                return proportion_test(*prop_row, *prop_base, alpha=self.alpha)
            return t_test_two_sample(self.doc_values(key, measure), self.doc_values(baseline, measure),
                                     alpha=self.alpha, equal_var=self.equal_var)
        except DegenerateSample:
            return None

    def tests(self, measures: Sequence[str]) -> dict[tuple[str, str], TestPair]:
        if not self.baselines:
            return {}
        out = {}
        for g in self.rows:
            for m in measures:
                if m == STATUS:
                    continue
                first = self.test(g.key, self.baselines[0], m)
                second = self.test(g.key, self.baselines[1], m) if len(self.baselines) > 1 else None
                out[(g.key, m)] = (first, second)
        return out

    def doc_means(self, measures: Sequence[str]) -> dict[tuple[str, str], float]:
        out = {}
        for g in self.rows:
            for m in measures:
                values = self.doc_values(g.key, m)
                out[(g.key, m)] = sum(values) / len(values)
        return out

    def table(self, title: str, measures: Sequence[str]) -> StyleTable:
        profiles = [self.row_profiles[g.key] for g in self.rows]
        notes = ["Values are computed over the concatenated texts of each row; "
                 "per-document means are in the CSV variant."]
        if self.baselines:
            marks = [f"† differs significantly from {self.baselines[0]}"]
            if len(self.baselines) > 1:
                marks.append(f"‡ from {self.baselines[1]}")
            notes.append(", ".join(marks) + f" (alpha = {self.alpha:g}). "
                         "Largest value in bold, smallest in italics.")
        return build_table(title, profiles, measures, self.tests(measures),
                           self.doc_means(measures), notes)


def _first_year(group: CorpusGroup) -> int:
    return min(d.meta.year for d in group.documents)


def table_rows(corpus: Corpus, reference_label: str, aggregate_label: str) -> list[CorpusGroup]:
    """Rows of the comparison tables.

    Each non-reference source label forms one row (sorted by label); the
    reference documents form one row per author in chronological order,
    followed by an aggregate row over all reference documents.
    """
    others = [g for g in group_by([d for d in corpus if d.meta.source_label != reference_label],
                                  lambda d: d.meta.source_label)]
    refs = [d for d in corpus if d.meta.source_label == reference_label]
    authors = sorted(group_by(refs, lambda d: d.meta.author), key=lambda g: (_first_year(g), g.key))
    rows = others + authors
    if refs and len(authors) > 1:
        rows.append(CorpusGroup(aggregate_label, tuple(refs)))
    keys = [g.key for g in rows]
    if len(set(keys)) != len(keys):
        raise StyleError(f"row names collide: {keys}")
    return rows


def default_baselines(corpus: Corpus, reference_label: str) -> tuple[str, ...]:
    """The non-reference labels, when there are one or two of them."""
    labels = sorted({d.meta.source_label for d in corpus} - {reference_label})
    return tuple(labels) if 1 <= len(labels) <= 2 else ()


def analyze(corpus: Corpus, lexicons: Sequence[Lexicon], composites: Sequence[CompositeDefinition],
            reference_label: str = "human", aggregate_label: str = "Reference",
            baselines: Sequence[str] = (), alpha: float = 0.01, equal_var: bool = False,
            jobs: int = 1) -> Analysis:
    if not len(corpus):
        raise EmptyText("corpus has no documents")
    rows = table_rows(corpus, reference_label, aggregate_label)
    baselines = tuple(baselines) or default_baselines(corpus, reference_label)
    for b in baselines:
        if b not in {g.key for g in rows}:
            raise StyleError(f"baseline {b!r} is not a table row")
    docs = list(corpus)
    doc_profiles = profile_all(docs, lexicons, composites, jobs)
    row_profiles = profile_all(rows, lexicons, composites, jobs)
    return Analysis(corpus, list(lexicons), list(composites), rows,
                    {p.subject: p for p in row_profiles},
                    {d.key: p for d, p in zip(docs, doc_profiles)},
                    baselines, alpha, equal_var)


def summary_table(corpus: Corpus, key_fn: Callable[[Document], str], title: str = "Corpus") -> StyleTable:
    groups = sorted(group_by(corpus, key_fn), key=lambda g: (_first_year(g), g.key))
    cols = [Column("count", "Number", "int", False), Column("tokens", "Tokens", "int", False),
            Column("types", "Types", "int", False), Column("mean_length", "Mean length", "real", False)]
    cells = []
    for g in groups:
        s = corpus_summary(g)
        cells.append([Cell(s.count), Cell(s.tokens), Cell(s.types), Cell(s.mean_length)])
    notes = ["Tokens exclude numbers and punctuation; types are distinct lower-cased word forms."]
    return StyleTable(title, [g.key for g in groups], cols, cells, notes)


def category_sets(categories: Sequence[str]) -> dict[str, list[str]]:
    """Split counted categories into pronoun, semantic and remaining sets."""
    present = set(categories)
    pronouns = [c for c in PRONOUN_CATEGORIES if c in present]
    semantic = [c for c in SEMANTIC_CATEGORIES if c in present]
    other = [c for c in categories if c not in pronouns and c not in semantic]
    return {"pronouns": pronouns, "semantic": semantic, "other": other}


def pronoun_measures(categories: Sequence[str]) -> list[str]:
    measures = category_sets(categories)["pronouns"]
    if {"We", "You", "Self"} <= set(measures):
        measures.append(STATUS)
    return measures


# Distances and tree ---------------------------------------------------------------


def group_matrix(corpus: Corpus, key_fn: Callable[[Document], str], jobs: int = 1) -> DistanceMatrix:
    groups = group_by(corpus, key_fn)
    texts = [(g.key, FrequencyVector.from_tokens(g.concatenated.tokens)) for g in groups]
    return distance_matrix(texts, jobs=jobs)


def cluster_highlights(tree, corpus: Corpus, key_fn: Callable[[Document], str]) -> list:
    """For every source label, the node where its leaves branch off."""
    members: dict[str, set[str]] = {}
    for doc in corpus:
        members.setdefault(doc.meta.source_label, set()).add(key_fn(doc))
    out = []
    for label in sorted(members):
        names = sorted(members[label])
        if len(names) < 2:
            continue
        node = tree.mrca(names)
        if node is not tree.root and all(node is not o for o in out):
            out.append(node)
    return out


# Bundle ------------------------------------------------------------------------


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _resource_hashes(kind: str, directory: Path | None, pattern: str) -> dict[str, str]:
    if directory is None:
        root = resources.files("polistyle").joinpath(f"data/{kind}")
        return {f"default/{kind}/{p.name}": _sha256(p.read_bytes())
                for p in sorted(root.iterdir(), key=lambda p: p.name) if p.name.endswith(pattern)}
    return {f"{kind}/{p.name}": _sha256(p.read_bytes()) for p in sorted(directory.glob("*" + pattern))}


def run_pipeline(config: RunConfig) -> dict[str, str]:
    """Compute the whole report in memory and return ``{file name: content}``.

    Nothing is written here; see :func:`write_bundle`.
    """
    if config.manifest is None:
        raise StyleError("no manifest given")
    abbreviations = read_abbreviations(config.abbreviations) if config.abbreviations else None
    corpus = load_corpus(config.manifest, abbreviations)
    if not len(corpus):
        raise EmptyText(f"{config.manifest}: manifest lists no documents")
    lexicons = load_lexicons(config.lexicon_dir)
    composites = load_composites(config.composite_dir)
    analysis = analyze(corpus, lexicons, composites, config.reference_label, config.aggregate_label,
                       config.baselines, config.alpha, config.equal_var, config.jobs)
    key_fn = by_author_source(config.reference_label)

    bundle: dict[str, str] = {}
    notes: list[str] = []

    def add_table(stem: str, table: StyleTable) -> None:
        bundle[f"{stem}.md"] = render_markdown(table)
        bundle[f"{stem}.csv"] = render_csv(table)

    add_table("summary", summary_table(corpus, key_fn, "Corpus statistics"))
    add_table("complexity", analysis.table("Language complexity", list(COMPLEXITY_MEASURES)))
    sets = category_sets(analysis.categories)
    if sets["pronouns"]:
        add_table("pronouns", analysis.table("Pronoun frequencies", pronoun_measures(analysis.categories)))
    if sets["semantic"]:
        add_table("semantic", analysis.table("Semantic categories", sets["semantic"]))
    if sets["other"]:
        add_table("other_categories", analysis.table("Other categories", sets["other"]))
    if composites:
        add_table("composites", analysis.table("Composite scores", [c.name for c in composites]))

    groups = group_by(corpus, key_fn)
    if len(groups) >= 2:
        matrix = group_matrix(corpus, key_fn, config.jobs)
        bundle["distance_matrix.csv"] = matrix.to_csv()
        bundle["distance_pairs.csv"] = matrix.to_long_csv()
        if len(groups) >= 3:
            tree = layout_equal_angle(neighbor_joining(matrix))
            notes.extend(tree.notes)
            bundle["tree.nwk"] = export_tree(tree, "newick")
            bundle["tree.dot"] = export_tree(tree, "dot")
            bundle["tree.svg"] = export_tree(tree, "svg", highlight=cluster_highlights(tree, corpus, key_fn),
                                             title="Intertextual distance tree")
        else:
            notes.append("tree skipped: fewer than three texts")
    else:
        notes.append("distance matrix and tree skipped: fewer than two texts")

    inputs = {"manifest": _sha256(Path(config.manifest).read_bytes())}
    for doc in corpus:
        inputs[f"text/{doc.key}"] = _sha256(Path(doc.meta.path).read_bytes())
    inputs.update(_resource_hashes("lexicons", config.lexicon_dir, ".lex"))
    inputs.update(_resource_hashes("composites", config.composite_dir, ".composite"))
    if config.abbreviations:
        inputs["abbreviations"] = _sha256(Path(config.abbreviations).read_bytes())
    manifest = {
        "tool": "polistyle",
        "version": __version__,
        "config": config.record(),
        "config_sha256": config.digest(),
        "inputs": inputs,
        "outputs": {name: _sha256(text.encode("utf-8")) for name, text in sorted(bundle.items())},
        "documents": len(corpus),
        "baselines": list(analysis.baselines),
        "notes": notes,
    }
    bundle["run_manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return bundle


def atomic_write(path: Path, text: str) -> None:
    """Write via a temporary sibling file and rename into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_bundle(bundle: Mapping[str, str], out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    for name in sorted(bundle):
        target = out_dir / name
        atomic_write(target, bundle[name])
        written.append(target)
    return written
