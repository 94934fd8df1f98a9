"""Acceptance gate: one test per primary criterion, each reporting PASS/FAIL.

Run with ``pytest tests/test_acceptance.py -v``. Criterion 11 needs real
State of the Union transcripts and is skipped unless POLISTYLE_SOTU_MANIFEST
points at a manifest for them.
"""

import json
import os
import random
import time
from pathlib import Path

import pytest

from conftest import DEMO_MANIFEST, record_criterion
from oracles import (complexity_naive, count_naive, labbe_bruteforce, random_tree,
                     tree_path_lengths, tree_splits)
from polistyle.cli import main
from polistyle.composites import CompositeDefinition, evaluate_composite, load_composites
from polistyle.corpus import (Document, DocumentMeta, by_author, by_author_source, corpus_summary,
                              group_by, load_corpus)
from polistyle.distance import DistanceMatrix, FrequencyVector, distance_matrix, labbe_distance
from polistyle.lexicons import CategoryCounts, Lexicon, count_categories, status_score
from polistyle.metrics import complexity
from polistyle.report import group_matrix
from polistyle.stats import proportion_test, t_test_two_sample
from polistyle.tokenizer import WordToken
from polistyle.tree import neighbor_joining, parse_newick, to_newick

STATS_ORACLE = json.loads((Path(__file__).parent / "fixtures" / "stats_oracle.json").read_text())


def random_pairs(seed=2024, count=200):
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        vocab = [f"w{i}" for i in range(rng.randint(1, 50))]
        a = rng.choices(vocab, k=rng.randint(1, 500))
        b = rng.choices(vocab, k=rng.randint(1, 500))
        pairs.append((a, b))
    return pairs


PAIRS = random_pairs()


def test_criterion_01_distance_oracle():
    worst = 0.0
    for a, b in PAIRS:
        got = labbe_distance(FrequencyVector.from_words(a), FrequencyVector.from_words(b))
        worst = max(worst, abs(got - labbe_bruteforce(a, b)))
    assert record_criterion(1, "distance matches brute-force oracle on 200 pairs", worst <= 1e-12,
                            f"max error {worst:.1e}")


def test_criterion_02_distance_symmetry():
    worst = 0.0
    for a, b in PAIRS:
        fa, fb = FrequencyVector.from_words(a), FrequencyVector.from_words(b)
        worst = max(worst, abs(labbe_distance(fa, fb) - labbe_distance(fb, fa)))
    self_zero = all(labbe_distance(FrequencyVector.from_words(a), FrequencyVector.from_words(a)) == 0.0
                    for a, _ in PAIRS)
    rng = random.Random(9)
    disjoint_one = True
    for _ in range(50):
        a = rng.choices(["x1", "x2", "x3"], k=rng.randint(1, 100))
        b = rng.choices(["y1", "y2"], k=rng.randint(1, 100))
        disjoint_one &= labbe_distance(FrequencyVector.from_words(a), FrequencyVector.from_words(b)) == 1.0
    ok = worst <= 1e-12 and self_zero and disjoint_one
    assert record_criterion(2, "symmetry, D(A,A) = 0, disjoint = 1.0", ok,
                            f"max asymmetry {worst:.1e}, self-zero {self_zero}, disjoint {disjoint_one}")


def test_criterion_03_pair_count():
    rng = random.Random(18)
    texts = [(f"t{i:02d}", FrequencyVector.from_words(rng.choices("abcdefghij", k=50))) for i in range(18)]
    synthetic = len(distance_matrix(texts).pairs())
    demo = len(group_matrix(load_corpus(DEMO_MANIFEST), by_author_source("human")).pairs())
    ok = synthetic == 153 and demo == 153
    assert record_criterion(3, "18 texts give 153 pairs", ok, f"synthetic {synthetic}, demo {demo}")


def test_criterion_04_status_scores():
    rows = {"GPT-4.o": ((8.30, 0.46, 0.68), 8.08), "Trump": ((4.17, 0.80, 1.16), 3.81),
            "Bush": ((4.11, 0.64, 0.96), 3.79)}
    got = {k: round(status_score({"We": we, "You": you, "Self": me}), 2)
           for k, ((we, you, me), _) in rows.items()}
    ok = all(got[k] == expected for k, (_, expected) in rows.items())
    assert record_criterion(4, "status scores 8.08 / 3.81 / 3.79", ok,
                            ", ".join(f"{k} {v:.2f}" for k, v in got.items()))


def test_criterion_05_counting_oracle():
    rng = random.Random(55)
    letters = "abcde"
    mismatches = 0
    for case in range(100):
        def word():
            return "".join(rng.choices(letters, k=rng.randint(1, 6)))
        words = [word() for _ in range(rng.randint(0, 300))]
        literals = {word() for _ in range(rng.randint(0, 10))}
        stems = set() if case % 2 else {word()[:3] for _ in range(rng.randint(1, 5))}
        lex = Lexicon("C", frozenset(literals), frozenset(stems))
        counts = count_categories([WordToken.from_surface(w) for w in words], [lex])
        mismatches += counts.hits["C"] != count_naive(words, literals, stems)
        mismatches += counts.total_tokens != len(words)
    assert record_criterion(5, "category counting matches naive scan on 100 cases", mismatches == 0,
                            f"{mismatches} mismatches")


def _doc(text):
    return Document.from_text(DocumentMeta("d", "A", 2000, "human", None), text)


def test_criterion_06_complexity_oracle():
    rng = random.Random(66)
    mismatches = 0
    for _ in range(100):
        def word(lo=1):
            return "".join(rng.choices("abcdefghijklmnop", k=rng.randint(lo, 12)))
        # boundaries must be unambiguous: no one-letter initial opens a sentence
        # and no abbreviation closes one
        sentences = [[word(2)] + [word() for _ in range(rng.randint(0, 23))] + [word(5)]
                     for _ in range(rng.randint(1, 6))]
        text = " ".join(" ".join(s).capitalize() + "." for s in sentences)
        flat = [w for s in sentences for w in s]
        cx = complexity(_doc(text))
        expected = complexity_naive(flat, len(sentences))
        mismatches += (cx.mean_word_length, cx.big_word_pct, cx.mean_sentence_length) != expected
    ex = complexity(_doc("freedom nation we"))
    example = (ex.mean_word_length == 5.0 and abs(ex.big_word_pct - 66.67) <= 0.005
               and ex.mean_sentence_length == 3.0)
    ok = mismatches == 0 and example
    assert record_criterion(6, "complexity matches brute force; 3-token example", ok,
                            f"{mismatches} mismatches, example MWL {ex.mean_word_length} "
                            f"BW {ex.big_word_pct:.4f} MSL {ex.mean_sentence_length}")


def test_criterion_07_statistics():
    worst = 0.0
    for case in STATS_ORACLE["t_tests"]:
        for equal_var, key in ((False, "welch"), (True, "pooled")):
            r = t_test_two_sample(case["a"], case["b"], equal_var=equal_var)
            worst = max(worst, abs(r.p_value - case[f"{key}_p"]))
    for case in STATS_ORACLE["proportion_tests"]:
        r = proportion_test(case["hits_a"], case["n_a"], case["hits_b"], case["n_b"])
        worst = max(worst, abs(r.p_value - case["p"]))
    same = t_test_two_sample([1, 2, 3], [1, 2, 3])
    worked = proportion_test(60, 100, 40, 100)
    ok = (worst <= 1e-6 and same.statistic == 0.0 and same.p_value == 1.0
          and abs(worked.statistic - 2.8284) <= 1e-3 and abs(worked.p_value - 0.00468) <= 1e-3)
    assert record_criterion(7, "p-values match frozen oracle; worked examples", ok,
                            f"max p error {worst:.1e}, z {worked.statistic:.4f}, p {worked.p_value:.5f}")


def test_criterion_08_neighbor_joining():
    rng = random.Random(88)
    worst, wrong_topology = 0.0, 0
    for _ in range(50):
        leaves, edges = random_tree(rng, rng.randint(4, 12))
        paths = tree_path_lengths(edges, leaves)
        matrix = DistanceMatrix(tuple(leaves), tuple(tuple(paths[min(a, b), max(a, b)] for b in leaves)
                                                     for a in leaves))
        tree = neighbor_joining(matrix)
        wrong_topology += tree.splits() != tree_splits(edges, leaves)
        for (a, b), d in tree.leaf_distances().items():
            worst = max(worst, abs(d - matrix[a, b]))
    star = neighbor_joining(DistanceMatrix(("A", "B", "C"), ((0, 0.2, 0.3), (0.2, 0, 0.4), (0.3, 0.4, 0))))
    exact = {leaf.name: leaf.length for leaf in star.leaves()} == {"A": 0.05, "B": 0.15, "C": 0.25}
    ok = worst <= 1e-9 and wrong_topology == 0 and exact
    assert record_criterion(8, "NJ recovers 50 additive trees; 3-leaf example exact", ok,
                            f"max path error {worst:.1e}, wrong topologies {wrong_topology}, exact {exact}")


def test_criterion_09_newick_round_trip():
    rng = random.Random(99)
    failures = 0
    for _ in range(50):
        leaves, edges = random_tree(rng, rng.randint(3, 15), min_len=1e-6, max_len=10.0)
        paths = tree_path_lengths(edges, leaves)
        matrix = DistanceMatrix(tuple(leaves), tuple(tuple(paths[min(a, b), max(a, b)] for b in leaves)
                                                     for a in leaves))
        text = to_newick(neighbor_joining(matrix))
        failures += to_newick(parse_newick(text)) != text
    assert record_criterion(9, "Newick export/parse/export fixed point on 50 trees", failures == 0,
                            f"{failures} failures")


def test_criterion_10_composites():
    tone = next(d for d in load_composites() if d.name == "Tone")
    neutral = all(evaluate_composite(tone, CategoryCounts({"Posemo": k, "Negemo": k}, 1000)) == 50
                  for k in range(0, 200, 7))
    hi = evaluate_composite(CompositeDefinition("X", (("Posemo", 0.0),), 200), CategoryCounts({"Posemo": 1}, 2))
    lo = evaluate_composite(CompositeDefinition("X", (("Posemo", 0.0),), -200), CategoryCounts({"Posemo": 1}, 2))
    rng = random.Random(10)
    violations = 0
    for _ in range(100):
        total = rng.randint(20, 5000)
        pos, neg = rng.randint(0, total // 2), rng.randint(0, total // 2)
        base = evaluate_composite(tone, CategoryCounts({"Posemo": pos, "Negemo": neg}, total))
        up = evaluate_composite(tone, CategoryCounts({"Posemo": pos + 1, "Negemo": neg}, total + 1))
        down = evaluate_composite(tone, CategoryCounts({"Posemo": pos, "Negemo": neg + 1}, total + 1))
        violations += not (up >= base >= down)
    ok = neutral and hi == 100 and lo == 1 and violations == 0
    assert record_criterion(10, "Tone neutral at 50, clamped to [1, 100], monotone", ok,
                            f"neutral {neutral}, clamp {lo:g}/{hi:g}, violations {violations}")


SOTU_MSL = {"Reagan": 21.45, "Clinton": 21.33, "Bush": 20.07, "Obama": 19.72, "Trump": 17.73, "Biden": 15.72}


def test_criterion_11_sotu_replication():
    manifest = os.environ.get("POLISTYLE_SOTU_MANIFEST")
    if not manifest:
        record_criterion(11, "SOTU replication", True, "set POLISTYLE_SOTU_MANIFEST to run", skipped=True)
        pytest.skip("no SOTU transcripts supplied")
    corpus = load_corpus(manifest)
    groups = {g.key: g for g in group_by([d for d in corpus if d.meta.source_label == "human"], by_author)}
    reagan = corpus_summary(groups["Reagan"])
    tokens_ok = abs(reagan.tokens - 32_490) <= 0.03 * 32_490
    mean_ok = abs(reagan.mean_length - 3_975.4) <= 0.03 * 3_975.4
    msl = {name: complexity(groups[name].concatenated).mean_sentence_length for name in SOTU_MSL}
    msl_ok = all(abs(msl[n] - v) <= 0.10 * v for n, v in SOTU_MSL.items())
    biden_min = min(msl, key=msl.get) == "Biden"
    ok = tokens_ok and mean_ok and msl_ok and biden_min
    detail = (f"Reagan tokens {reagan.tokens}, mean {reagan.mean_length:.1f}; MSL "
              + ", ".join(f"{n} {v:.2f}" for n, v in msl.items()))
    assert record_criterion(11, "SOTU replication", ok, detail)


def test_criterion_12_determinism(tmp_path, capsys):
    start = time.perf_counter()
    outs = []
    for name, jobs in (("a", 1), ("b", 1), ("c", 4)):
        out = tmp_path / name
        assert main(["report", "--manifest", str(DEMO_MANIFEST), "--out", str(out), "--jobs", str(jobs)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    identical = outs[0] == outs[1] == outs[2]
    differing = sorted(k for k in outs[0] if outs[0][k] != outs[2].get(k))
    assert record_criterion(12, "report byte-identical across reruns and jobs=1 vs jobs=4", identical,
                            f"{len(outs[0])} files, {time.perf_counter() - start:.1f}s"
                            + (f", differing: {differing}" if differing else ""))
