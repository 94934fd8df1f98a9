import json
import math
from pathlib import Path

import pytest
from hypothesis import assume, given, settings, strategies as st

from polistyle.errors import DegenerateSample
from polistyle.stats import (SignificanceMarks, TestResult, betainc, mark_significance,
                             normal_two_sided_p, proportion_test, t_test_two_sample)

ORACLE = json.loads((Path(__file__).parent / "fixtures" / "stats_oracle.json").read_text())


def test_identical_samples():
    r = t_test_two_sample([1, 2, 3], [1, 2, 3])
    assert (r.statistic, r.p_value, r.significant) == (0.0, 1.0, False)


def test_hand_computed_welch():
    r = t_test_two_sample([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
    assert r.statistic == pytest.approx(-1.0, abs=1e-12)
    assert r.df == pytest.approx(8.0)
    assert r.p_value == pytest.approx(0.3466, abs=1e-4)
    assert not r.significant and r.kind == "t-test"


def test_large_effect():
    a = [0.0, 0.1, -0.1, 0.2, -0.2] * 10
    b = [x + 10 * 0.15 for x in a]
    assert t_test_two_sample(a, b).significant


def test_degenerate_samples():
    with pytest.raises(DegenerateSample):
        t_test_two_sample([1.0], [1.0, 2.0])
    with pytest.raises(DegenerateSample):
        t_test_two_sample([2.0, 2.0], [3.0, 3.0])
    r = t_test_two_sample([2.0, 2.0], [2.0, 2.0, 2.0])
    assert (r.statistic, r.p_value) == (0.0, 1.0)


def test_proportion_examples():
    r = proportion_test(50, 100, 50, 100)
    assert (r.statistic, r.p_value) == (0.0, 1.0)
    r = proportion_test(60, 100, 40, 100)
    assert r.statistic == pytest.approx(2.8284, abs=1e-3)
    assert r.p_value == pytest.approx(0.00468, abs=1e-3)
    assert r.significant and r.kind == "proportion-test"
    r = proportion_test(0, 10, 0, 10)
    assert (r.statistic, r.p_value, r.significant) == (0.0, 1.0, False)


@pytest.mark.parametrize("args", [(1, 0, 1, 1), (2, 1, 0, 1), (-1, 5, 0, 5)])
def test_proportion_preconditions(args):
    with pytest.raises(DegenerateSample):
        proportion_test(*args)


@pytest.mark.parametrize("case", ORACLE["t_tests"][:25])
def test_t_oracle(case):
    for equal_var, key in ((False, "welch"), (True, "pooled")):
        r = t_test_two_sample(case["a"], case["b"], equal_var=equal_var)
        assert r.statistic == pytest.approx(case[f"{key}_statistic"], rel=1e-9, abs=1e-12)
        assert abs(r.p_value - case[f"{key}_p"]) <= 1e-10


@pytest.mark.parametrize("case", ORACLE["proportion_tests"][:25])
def test_proportion_oracle(case):
    r = proportion_test(case["hits_a"], case["n_a"], case["hits_b"], case["n_b"])
    assert r.statistic == pytest.approx(case["statistic"], rel=1e-9, abs=1e-12)
    assert abs(r.p_value - case["p"]) <= 1e-10


def test_cdf_tails():
    assert normal_two_sided_p(0.0) == 1.0
    assert normal_two_sided_p(40.0) < 1e-300
    assert betainc(2.0, 3.0, 0.0) == 0.0 and betainc(2.0, 3.0, 1.0) == 1.0
    # I_x(1, 1) is the identity
    assert betainc(1.0, 1.0, 0.3) == pytest.approx(0.3, abs=1e-14)


def test_marks():
    sig = TestResult(3.0, 0.001, True, 0.01, "t-test")
    non = TestResult(0.1, 0.9, False, 0.01, "t-test")
    assert str(mark_significance(sig, sig)) == "†‡"
    assert str(mark_significance(non, non)) == ""
    assert str(mark_significance(non, sig)) == "‡"
    assert mark_significance(sig, None) == SignificanceMarks(True, False)
    with pytest.raises(ValueError):
        mark_significance(sig, TestResult(3.0, 0.001, True, 0.05, "t-test"))


sample = st.lists(st.floats(-100, 100, allow_nan=False, allow_infinity=False), min_size=2, max_size=20)


def _spread(xs):
    return max(xs) - min(xs) > 1e-3


@settings(max_examples=150)
@given(sample, sample)
def test_t_symmetry_and_range(a, b):
    assume(_spread(a) and _spread(b))
    r1, r2 = t_test_two_sample(a, b), t_test_two_sample(b, a)
    assert r1.statistic == pytest.approx(-r2.statistic, rel=1e-12, abs=1e-12)
    assert r1.p_value == pytest.approx(r2.p_value, rel=1e-12, abs=1e-15)
    assert 0.0 <= r1.p_value <= 1.0
    assert r1.significant == (r1.p_value < r1.alpha)


@settings(max_examples=100)
@given(sample, sample, st.floats(0.1, 10), st.floats(-50, 50))
def test_t_affine_invariance(a, b, scale, shift):
    assume(_spread(a) and _spread(b))
    r1 = t_test_two_sample(a, b)
    r2 = t_test_two_sample([x * scale + shift for x in a], [x * scale + shift for x in b])
    assert r1.p_value == pytest.approx(r2.p_value, rel=1e-6, abs=1e-9)


@settings(max_examples=100)
@given(sample, sample, st.floats(0, 20), st.floats(0, 20))
def test_t_monotone_in_separation(a, b, d1, d2):
    assume(_spread(a) and _spread(b))
    lo, hi = sorted((d1, d2))
    base = t_test_two_sample(a, b).statistic
    # push the means apart in the direction they already differ
    sign = 1.0 if base >= 0 else -1.0
    p_lo = t_test_two_sample([x + sign * lo for x in a], b).p_value
    p_hi = t_test_two_sample([x + sign * hi for x in a], b).p_value
    assert p_hi <= p_lo + 1e-12


@settings(max_examples=150)
@given(st.integers(1, 500), st.integers(1, 500), st.data())
def test_proportion_symmetry(n_a, n_b, data):
    h_a = data.draw(st.integers(0, n_a))
    h_b = data.draw(st.integers(0, n_b))
    r1, r2 = proportion_test(h_a, n_a, h_b, n_b), proportion_test(h_b, n_b, h_a, n_a)
    assert r1.statistic == pytest.approx(-r2.statistic, abs=1e-12)
    assert r1.p_value == pytest.approx(r2.p_value, abs=1e-15)
    assert 0.0 <= r1.p_value <= 1.0
    assert not math.isnan(r1.statistic)
