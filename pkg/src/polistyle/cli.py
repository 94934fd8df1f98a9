"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
stderr; results go to ``--out`` (written atomically) or stdout.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .composites import load_composites
from .config import LEXICON_ENV, RunConfig, read_config_file
from .corpus import by_author, by_author_source, by_document, by_source, load_corpus
from .distance import DistanceMatrix
from .errors import StyleError
from .lexicons import load_lexicon, load_lexicons
from .metrics import COMPLEXITY_MEASURES
from .report import (analyze, atomic_write, category_sets, group_matrix, pronoun_measures, render,
                     run_pipeline, summary_table, write_bundle, cluster_highlights)
from .tokenizer import read_abbreviations
from .tree import export_tree, layout_equal_angle, neighbor_joining

log = logging.getLogger("polistyle")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _key_fn(name: str, reference_label: str):
    return {
        "author": by_author,
        "source": by_source,
        "document": by_document,
        "author-source": by_author_source(reference_label),
    }[name]


def _common(parser: argparse.ArgumentParser, manifest_required: bool = True) -> None:
    g = parser.add_argument_group("inputs")
    g.add_argument("--manifest", type=Path, required=False,
                   help="CSV manifest with columns id,author,year,source_label,path"
                   + ("" if manifest_required else " (or use --matrix)"))
    g.add_argument("--config", type=Path, help="JSON config file; flags override its values")
    g.add_argument("--lexicons", type=Path, dest="lexicon_dir",
                   help=f"directory of *.lex files (default: ${LEXICON_ENV} or the bundled pack)")
    g.add_argument("--composites", type=Path, dest="composite_dir",
                   help="directory of *.composite definitions (default: bundled)")
    g.add_argument("--abbreviations", type=Path,
                   help="abbreviation list that replaces the bundled one")
    g.add_argument("--reference-label", dest="reference_label",
                   help="source_label of the reference (human) texts [human]")
    a = parser.add_argument_group("analysis")
    a.add_argument("--alpha", type=float, help="significance level [0.01]")
    a.add_argument("--baseline", action="append", dest="baselines", metavar="LABEL",
                   help="source label marked by a dagger; give twice for the double dagger "
                   "(default: the non-reference labels when there are one or two)")
    a.add_argument("--aggregate-label", dest="aggregate_label",
                   help="name of the all-reference-texts row [Reference]")
    a.add_argument("--equal-var", action="store_true", default=None, dest="equal_var",
                   help="pooled-variance t-test instead of Welch's")
    a.add_argument("--jobs", type=int, help="worker processes [1]")
    parser.add_argument("--out", type=Path, help="output file (directory for 'report')")
    _verbose(parser, argparse.SUPPRESS)


def _verbose(parser: argparse.ArgumentParser, default) -> None:
    parser.add_argument("-v", "--verbose", action="store_true", default=default,
                        help="log progress to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polistyle", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _verbose(parser, False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("summarize", help="token, type and length statistics per group")
    _common(p)
    p.add_argument("--group-by", choices=["author-source", "author", "source", "document"],
                   default="author-source")
    p.add_argument("--format", choices=["markdown", "csv"], default="markdown")

    p = sub.add_parser("complexity", help="word length, big words and sentence length")
    _common(p)
    p.add_argument("--format", choices=["markdown", "csv"], default="markdown")

    p = sub.add_parser("categories", help="category percentages (pronouns, semantic, ...)")
    _common(p)
    p.add_argument("--set", choices=["pronouns", "semantic", "other", "all"], default="all",
                   dest="category_set")
    p.add_argument("--format", choices=["markdown", "csv"], default="markdown")

    p = sub.add_parser("composites", help="composite 1-100 scores")
    _common(p)
    p.add_argument("--format", choices=["markdown", "csv"], default="markdown")

    p = sub.add_parser("distance", help="intertextual distance matrix")
    _common(p)
    p.add_argument("--group-by", choices=["author-source", "author", "source", "document"],
                   default="author-source", help="texts are concatenated per group")
    p.add_argument("--format", choices=["wide", "long"], default="wide")

    p = sub.add_parser("tree", help="neighbor-joining tree of the distance matrix")
    _common(p, manifest_required=False)
    p.add_argument("--matrix", type=Path, help="wide distance-matrix CSV instead of a manifest")
    p.add_argument("--group-by", choices=["author-source", "author", "source", "document"],
                   default="author-source")
    p.add_argument("--format", choices=["newick", "dot", "svg"], default="newick")
    p.add_argument("--font-size", type=float, default=12.0, help="SVG label size")

    p = sub.add_parser("report", help="write every table, the matrix and the tree to --out")
    _common(p)

    p = sub.add_parser("validate-lexicon", help="check lexicon files for grammar errors")
    p.add_argument("files", nargs="+", type=Path)
    _verbose(p, argparse.SUPPRESS)
    return parser


def _config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in ("manifest", "lexicon_dir", "composite_dir", "abbreviations", "alpha", "baselines",
                "reference_label", "aggregate_label", "equal_var", "out", "jobs"):
        value = getattr(args, key, None)
        if value is not None:
            values[key] = value
    try:
        return RunConfig(**values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(out, text)
        log.info("wrote %s", out)


def _need_manifest(cfg: RunConfig) -> None:
    if cfg.manifest is None:
        raise UsageError("--manifest is required")


def _load(cfg: RunConfig):
    _need_manifest(cfg)
    abbreviations = read_abbreviations(cfg.abbreviations) if cfg.abbreviations else None
    return load_corpus(cfg.manifest, abbreviations)


def _analysis(cfg: RunConfig, with_composites: bool = False):
    corpus = _load(cfg)
    composites = load_composites(cfg.composite_dir) if with_composites else []
    return analyze(corpus, load_lexicons(cfg.lexicon_dir), composites,
                   cfg.reference_label, cfg.aggregate_label, cfg.baselines, cfg.alpha,
                   cfg.equal_var, cfg.jobs)


def cmd_summarize(args, cfg):
    corpus = _load(cfg)
    table = summary_table(corpus, _key_fn(args.group_by, cfg.reference_label), "Corpus statistics")
    _emit(render(table, args.format), cfg.out)


def cmd_complexity(args, cfg):
    table = _analysis(cfg).table("Language complexity", list(COMPLEXITY_MEASURES))
    _emit(render(table, args.format), cfg.out)


def cmd_categories(args, cfg):
    analysis = _analysis(cfg)
    sets = category_sets(analysis.categories)
    if args.category_set == "all":
        measures = analysis.categories
    elif args.category_set == "pronouns":
        measures = pronoun_measures(analysis.categories)
    else:
        measures = sets[args.category_set]
    if not measures:
        raise StyleError(f"no categories in set {args.category_set!r}")
    _emit(render(analysis.table("Category frequencies", measures), args.format), cfg.out)


def cmd_composites(args, cfg):
    analysis = _analysis(cfg, with_composites=True)
    if not analysis.composites:
        raise StyleError("no composite definitions found")
    table = analysis.table("Composite scores", [c.name for c in analysis.composites])
    _emit(render(table, args.format), cfg.out)


def cmd_distance(args, cfg):
    corpus = _load(cfg)
    matrix = group_matrix(corpus, _key_fn(args.group_by, cfg.reference_label), cfg.jobs)
    _emit(matrix.to_csv() if args.format == "wide" else matrix.to_long_csv(), cfg.out)


def cmd_tree(args, cfg):
    highlight = []
    if args.matrix is not None:
        if cfg.manifest is not None:
            raise UsageError("give either --manifest or --matrix, not both")
        try:
            matrix = DistanceMatrix.from_csv(args.matrix.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise StyleError(f"matrix file not found: {args.matrix}") from None
        except (ValueError, IndexError) as exc:
            raise StyleError(f"{args.matrix}: malformed distance matrix ({exc})") from None
        tree = layout_equal_angle(neighbor_joining(matrix))
    else:
        corpus = _load(cfg)
        key_fn = _key_fn(args.group_by, cfg.reference_label)
        tree = layout_equal_angle(neighbor_joining(group_matrix(corpus, key_fn, cfg.jobs)))
        highlight = cluster_highlights(tree, corpus, key_fn)
    for note in tree.notes:
        log.warning(note)
    options = {"highlight": highlight, "font_size": args.font_size} if args.format == "svg" else {}
    _emit(export_tree(tree, args.format, **options), cfg.out)


def cmd_report(args, cfg):
    _need_manifest(cfg)
    if cfg.out is None:
        raise UsageError("report needs --out DIRECTORY")
    if cfg.out.exists() and not cfg.out.is_dir():
        raise StyleError(f"--out {cfg.out} exists and is not a directory")
    bundle = run_pipeline(cfg)
    for path in write_bundle(bundle, cfg.out):
        log.info("wrote %s", path)


def cmd_validate_lexicon(args):
    for path in args.files:
        if not path.is_file():
            raise StyleError(f"lexicon file not found: {path}")
        lex = load_lexicon(path)
        print(f"{path}: ok ({lex.name}: {len(lex.literals)} words, {len(lex.prefixes)} stems)")


COMMANDS = {
    "summarize": cmd_summarize,
    "complexity": cmd_complexity,
    "categories": cmd_categories,
    "composites": cmd_composites,
    "distance": cmd_distance,
    "tree": cmd_tree,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s: %(message)s", stream=sys.stderr)
        if args.command == "validate-lexicon":
            cmd_validate_lexicon(args)
        else:
            COMMANDS[args.command](args, _config(args))
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except StyleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
