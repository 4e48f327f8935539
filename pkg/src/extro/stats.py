"""Statistical kernels: Pearson correlation, one-way ANOVA, Welch's t-test.

p-values are computed from the regularized incomplete beta function
implemented here (continued fraction, Lentz's method) so results do not
depend on an external statistics library. Absolute accuracy target for
the beta function is 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "TestResult",
    "regularized_incomplete_beta",
    "student_t_sf",
    "f_sf",
    "pearson",
    "anova_oneway",
    "welch_t",
]

_BETA_TOL = 1e-10
_BETA_MAX_ITER = 500


@dataclass(frozen=True)
class TestResult:
    """Outcome of a significance test.

    ``df`` is a single real for t-style tests and a (between, within)
    pair for F-style tests. ``p_value`` always lies in [0, 1].
    """

    statistic: float
    df: float | tuple[float, float]
    p_value: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value {self.p_value} outside [0, 1]")

    def to_dict(self) -> dict:
        df = list(self.df) if isinstance(self.df, tuple) else self.df
        return {"statistic": self.statistic, "df": df, "p_value": self.p_value}


def _beta_cf(x: float, a: float, b: float) -> float:
    """Continued fraction for the incomplete beta, evaluated by the
    modified Lentz method. Converges fast for x < (a+1)/(a+b+2)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            return h
    raise RuntimeError(f"incomplete beta did not converge for x={x}, a={a}, b={b}")


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the slow side
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b) / a
    return 1.0 - front * _beta_cf(1.0 - x, b, a) / b


def student_t_sf(t: float, df: float) -> float:
    """Two-sided tail probability P(|T| >= |t|) for Student's t."""
    if df <= 0.0:
        raise ValueError("df must be positive")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(x, df / 2.0, 0.5)


def f_sf(f: float, df1: float, df2: float) -> float:
    """Upper-tail probability P(F >= f) for the F distribution."""
    if df1 <= 0.0 or df2 <= 0.0:
        raise ValueError("degrees of freedom must be positive")
    if f <= 0.0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return regularized_incomplete_beta(x, df2 / 2.0, df1 / 2.0)


def pearson(x: list[float], y: list[float]) -> float:
    """Sample Pearson correlation coefficient, in [-1, 1]."""
    n = len(x)
    if n != len(y):
        raise ValueError(f"length mismatch: {n} vs {len(y)}")
    if n < 2:
        raise ValueError("need at least 2 observations")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxy = math.fsum((xi - mx) * (yi - my) for xi, yi in zip(x, y))
    sxx = math.fsum((xi - mx) ** 2 for xi in x)
    syy = math.fsum((yi - my) ** 2 for yi in y)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("constant input has undefined correlation")
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def anova_oneway(a: list[float], b: list[float]) -> TestResult:
    """One-way ANOVA for two groups: F = MSB/MSW with df (1, n-2)."""
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError("each group needs at least 2 observations")
    n = na + nb
    ma = math.fsum(a) / na
    mb = math.fsum(b) / nb
    grand = (na * ma + nb * mb) / n
    ssb = na * (ma - grand) ** 2 + nb * (mb - grand) ** 2
    ssw = math.fsum((v - ma) ** 2 for v in a) + math.fsum((v - mb) ** 2 for v in b)
    df1, df2 = 1, n - 2
    if ssw <= 0.0:
        raise ValueError("zero within-group variance, F undefined")
    f = (ssb / df1) / (ssw / df2)
    return TestResult(statistic=f, df=(float(df1), float(df2)), p_value=f_sf(f, df1, df2))


def welch_t(a: list[float], b: list[float]) -> TestResult:
    """Welch's unequal-variance t-test, two-sided p-value."""
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError("each group needs at least 2 observations")
    ma = math.fsum(a) / na
    mb = math.fsum(b) / nb
    va = math.fsum((v - ma) ** 2 for v in a) / (na - 1)
    vb = math.fsum((v - mb) ** 2 for v in b) / (nb - 1)
    if va <= 0.0 or vb <= 0.0:
        raise ValueError("zero variance in a group, Welch statistic undefined")
    sa, sb = va / na, vb / nb
    t = (ma - mb) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa**2 / (na - 1) + sb**2 / (nb - 1))
    return TestResult(statistic=t, df=df, p_value=student_t_sf(t, df))
