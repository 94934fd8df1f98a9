import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import labbe_bruteforce, labbe_scaling_a
from polistyle.distance import DistanceMatrix, FrequencyVector, distance_matrix, labbe_distance
from polistyle.errors import EmptyText, FewerThanTwoTexts


def fv(text):
    return FrequencyVector.from_words(text.split())


def test_hand_example():
    assert labbe_distance(fv("a b a"), fv("a b")) == pytest.approx(1 / 6, abs=1e-15)


def test_identity_and_disjoint():
    assert labbe_distance(fv("we shall win"), fv("we shall win")) == 0.0
    assert labbe_distance(fv("a a"), fv("b b")) == 1.0


def test_empty_text_rejected():
    with pytest.raises(EmptyText):
        labbe_distance(fv(""), fv("a"))


def test_matrix_shapes():
    texts = [(f"t{i:02d}", fv("a b c d"[: 2 * (i % 4) + 1] + f" w{i}")) for i in range(18)]
    m = distance_matrix(texts)
    assert len(m.pairs()) == 153
    m = distance_matrix([("x", fv("a b")), ("y", fv("a b"))])
    assert m.values == ((0.0, 0.0), (0.0, 0.0))
    with pytest.raises(FewerThanTwoTexts, match="fewer than two texts"):
        distance_matrix([("x", fv("a"))])


def test_matrix_matches_pairwise_calls():
    rng = random.Random(3)
    texts = [(f"t{i}", [rng.choice("abcdefg") for _ in range(rng.randint(1, 40))]) for i in range(5)]
    m = distance_matrix([(k, FrequencyVector.from_words(w)) for k, w in texts])
    for ka, wa in texts:
        for kb, wb in texts:
            expected = 0.0 if ka == kb else labbe_bruteforce(wa, wb)
            assert m[ka, kb] == expected


def test_parallel_equals_serial():
    rng = random.Random(5)
    texts = [(f"t{i}", FrequencyVector.from_words(rng.choices("abcdefghij", k=rng.randint(5, 60))))
             for i in range(7)]
    assert distance_matrix(texts, jobs=1) == distance_matrix(texts, jobs=3)


def test_csv_round_trip():
    texts = [("a", fv("x y z")), ("b", fv("x x q")), ("c", fv("q r"))]
    m = distance_matrix(texts)
    again = DistanceMatrix.from_csv(m.to_csv())
    assert again == m
    assert m.to_long_csv().splitlines()[0] == "label_a,label_b,distance"
    assert len(m.to_long_csv().splitlines()) == 4


words = st.lists(st.sampled_from(list("abcdefghij")), min_size=1, max_size=80)


@settings(max_examples=200)
@given(words, words)
def test_bounds_symmetry_and_both_scalings(a, b):
    d = labbe_distance(FrequencyVector.from_words(a), FrequencyVector.from_words(b))
    assert 0.0 <= d <= 1.0
    assert d == labbe_distance(FrequencyVector.from_words(b), FrequencyVector.from_words(a))
    assert abs(d - labbe_bruteforce(a, b)) <= 1e-12
    assert abs(d - labbe_scaling_a(a, b)) <= 1e-12
    if set(a).isdisjoint(b):
        assert d == 1.0
    else:
        assert d < 1.0


@settings(max_examples=100)
@given(words)
def test_replication_invariance(a):
    assert labbe_distance(FrequencyVector.from_words(a), FrequencyVector.from_words(a + a)) == 0.0
