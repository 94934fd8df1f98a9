"""Two-sided significance tests and the dagger marks that report them.

The Student t tail comes from the regularized incomplete beta function,
evaluated with Lentz's continued fraction; the normal tail from ``erfc``.
Both are accurate to well under 1e-10 absolute.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Sequence

from .errors import DegenerateSample

DEFAULT_ALPHA = 0.01
T_TEST = "t-test"
PROPORTION_TEST = "proportion-test"

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 10_000


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("betainc needs a > 0 and b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return min(1.0, max(0.0, betainc(df / 2.0, 0.5, x)))


def normal_two_sided_p(z: float) -> float:
    return min(1.0, max(0.0, math.erfc(abs(z) / math.sqrt(2.0))))


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    significant: bool
    alpha: float = DEFAULT_ALPHA
    kind: str = T_TEST
    df: float | None = None

    __test__ = False  # keep pytest from collecting this as a test class


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def t_test_two_sample(sample_a: Sequence[float], sample_b: Sequence[float],
                      alpha: float = DEFAULT_ALPHA, equal_var: bool = False) -> TestResult:
    """Two-sided two-sample t-test; Welch's unequal-variance form by default.

    Raises DegenerateSample when a sample has fewer than two values, or when
    both samples are constant with different means (the statistic is then
    infinite). Two constant samples with equal means give t = 0, p = 1.
    """
    _check_alpha(alpha)
    na, nb = len(sample_a), len(sample_b)
    if na < 2 or nb < 2:
        raise DegenerateSample(f"t-test needs at least two values per sample (got {na}, {nb})")
    ma, mb = statistics.fmean(sample_a), statistics.fmean(sample_b)
    va, vb = statistics.variance(sample_a), statistics.variance(sample_b)
    if va == 0.0 and vb == 0.0:
        if ma == mb:
            return TestResult(0.0, 1.0, False, alpha, T_TEST, float(na + nb - 2))
        raise DegenerateSample("both samples are constant with different means")
    if equal_var:
        df = float(na + nb - 2)
        pooled = ((na - 1) * va + (nb - 1) * vb) / df
        se2 = pooled * (1.0 / na + 1.0 / nb)
    else:
        qa, qb = va / na, vb / nb
        se2 = qa + qb
        df = se2 * se2 / (qa * qa / (na - 1) + qb * qb / (nb - 1))
    stat = (ma - mb) / math.sqrt(se2)
    p = t_two_sided_p(stat, df)
    return TestResult(stat, p, p < alpha, alpha, T_TEST, df)


def proportion_test(hits_a: int, n_a: int, hits_b: int, n_b: int,
                    alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Two-sided pooled two-proportion z-test."""
    _check_alpha(alpha)
    if n_a <= 0 or n_b <= 0:
        raise DegenerateSample("proportion test needs positive sample sizes")
    if not (0 <= hits_a <= n_a and 0 <= hits_b <= n_b):
        raise DegenerateSample("hit counts must lie between 0 and the sample size")
    pooled = (hits_a + hits_b) / (n_a + n_b)
    if pooled == 0.0 or pooled == 1.0:
        return TestResult(0.0, 1.0, False, alpha, PROPORTION_TEST)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n_a + 1.0 / n_b))
    z = (hits_a / n_a - hits_b / n_b) / se
    p = normal_two_sided_p(z)
    return TestResult(z, p, p < alpha, alpha, PROPORTION_TEST)


@dataclass(frozen=True)
class SignificanceMarks:
    vs_baseline_1: bool = False
    vs_baseline_2: bool = False

    def __str__(self) -> str:
        return ("†" if self.vs_baseline_1 else "") + ("‡" if self.vs_baseline_2 else "")


def mark_significance(first: TestResult | None, second: TestResult | None) -> SignificanceMarks:
    """Dagger for a significant first test, double dagger for the second.

    A missing test (``None``) never produces a mark.
    """
    if first is not None and second is not None and first.alpha != second.alpha:
        raise ValueError("both tests must use the same alpha")
    return SignificanceMarks(bool(first and first.significant),
                             bool(second and second.significant))
