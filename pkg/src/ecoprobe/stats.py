"""Paired nonparametric and parametric tests, implemented dependency-free.

The Wilcoxon signed-rank test uses textbook conventions: zero differences
dropped, mid-ranks for ties, positive-rank-sum statistic, exact two-sided
p over all sign assignments for small untied samples, and a tie- and
continuity-corrected normal tail otherwise. The paired t-test evaluates
the Student-t CDF through the regularized incomplete beta function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

_EPS = 1e-15
_FPMIN = 1e-300
_MAX_ITER = 500

EXACT_MAX_N = 20  # full sign-assignment enumeration stays cheap up to here


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_two_sided: float
    n_effective: int
    method: str  # "exact" | "normal_approx" | "t"
    ci95: tuple[float, float] | None = None


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_cdf(x: float, df: float) -> float:
    """P(T <= x) for Student's t with df degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if x == 0.0:
        return 0.5
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + x * x))
    return tail if x < 0 else 1.0 - tail


def student_t_ppf(q: float, df: float) -> float:
    """Inverse of student_t_cdf by bisection on the monotone CDF."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must be in (0, 1)")
    if q == 0.5:
        return 0.0
    if q < 0.5:
        return -student_t_ppf(1.0 - q, df)
    hi = 1.0
    while student_t_cdf(hi, df) < q:
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("quantile bracket failed")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def _normal_two_sided_p(z: float) -> float:
    return math.erfc(abs(z) / math.sqrt(2.0))


def _clamp_p(p: float) -> float:
    return min(1.0, max(p, 5e-324))


def _midranks(values: Sequence[float]) -> tuple[list[float], int, bool]:
    """Ranks of values with ties sharing their average rank.

    Returns (ranks, tie_term, has_ties) where tie_term is sum(t^3 - t)
    over tie groups, used by the normal-approximation variance correction.
    """
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    tie_term = 0
    has_ties = False
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg_rank = (i + j + 2) / 2.0  # 1-based positions i+1 .. j+1
        for k in range(i, j + 1):
            ranks[order[k]] = avg_rank
        group = j - i + 1
        if group > 1:
            has_ties = True
            tie_term += group**3 - group
        i = j + 1
    return ranks, tie_term, has_ties


def _exact_sign_rank_p(ranks: Sequence[float], w: float, n: int) -> float:
    """Exact two-sided p over all 2^n equally likely sign assignments.

    With untied integer ranks 1..n the positive-rank-sum distribution is the
    subset-sum count; doubling the smaller tail and capping at 1 gives the
    two-sided value.
    """
    total = n * (n + 1) // 2
    counts = [0] * (total + 1)
    counts[0] = 1
    for rank in range(1, n + 1):
        for s in range(total, rank - 1, -1):
            counts[s] += counts[s - rank]
    w_int = int(round(w))
    count_le = sum(counts[: w_int + 1])
    count_ge = sum(counts[w_int:])
    return min(1.0, 2.0 * min(count_le, count_ge) / float(2**n))


def wilcoxon_signed_rank(
    x: Sequence[float], y: Sequence[float], method: str = "auto"
) -> TestResult:
    """Wilcoxon signed-rank test on paired samples; statistic is W, the
    sum of ranks of positive differences d = x - y.

    method: "auto" picks the exact distribution when n_effective <= 20 and
    |d| has no ties, otherwise the corrected normal approximation; "exact"
    and "normal_approx" force a path ("exact" errors when ineligible).
    """
    if len(x) != len(y):
        raise ValueError("paired samples must have equal length")
    if len(x) == 0:
        raise ValueError("paired samples must be non-empty")
    diffs = [float(a) - float(b) for a, b in zip(x, y)]
    nonzero = [d for d in diffs if d != 0.0]
    if not nonzero:
        raise ValueError("degenerate sample: all paired differences are zero")
    n = len(nonzero)
    ranks, tie_term, has_ties = _midranks([abs(d) for d in nonzero])
    w = sum(rank for rank, d in zip(ranks, nonzero) if d > 0)

    exact_ok = n <= EXACT_MAX_N and not has_ties
    if method == "auto":
        method = "exact" if exact_ok else "normal_approx"
    if method == "exact":
        if not exact_ok:
            raise ValueError("exact method needs n_effective <= 20 and no ties in |d|")
        p = _exact_sign_rank_p(ranks, w, n)
        return TestResult(statistic=w, p_two_sided=_clamp_p(p), n_effective=n, method="exact")
    if method != "normal_approx":
        raise ValueError(f"unknown method {method!r}")

    mean = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0
    sd = math.sqrt(variance)
    if w > mean:
        z = (w - mean - 0.5) / sd
    elif w < mean:
        z = (w - mean + 0.5) / sd
    else:
        z = 0.0
    p = _normal_two_sided_p(z)
    return TestResult(
        statistic=w, p_two_sided=_clamp_p(p), n_effective=n, method="normal_approx"
    )


def paired_t_test(pre: Sequence[float], post: Sequence[float]) -> TestResult:
    """Two-sided paired t-test on d = post - pre, with a 95% CI for mean(d)."""
    if len(pre) != len(post):
        raise ValueError("paired samples must have equal length")
    n = len(pre)
    if n < 2:
        raise ValueError("need at least 2 pairs")
    diffs = [float(b) - float(a) for a, b in zip(pre, post)]
    mean = sum(diffs) / n
    ss = sum((d - mean) ** 2 for d in diffs)
    sd = math.sqrt(ss / (n - 1))
    if sd == 0.0:
        raise ValueError("zero variance in paired differences")
    se = sd / math.sqrt(n)
    t = mean / se
    df = n - 1
    p = 2.0 * (1.0 - student_t_cdf(abs(t), df))
    t_crit = student_t_ppf(0.975, df)
    ci = (mean - t_crit * se, mean + t_crit * se)
    return TestResult(
        statistic=t, p_two_sided=_clamp_p(p), n_effective=n, method="t", ci95=ci
    )
