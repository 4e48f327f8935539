"""Behavioral comparisons between extrovert and introvert cohorts.

Per-user and pooled-cohort indexes across five dimensions: when users
tweet (hourly distribution, period shares, inter-tweet intervals),
where (city counts, POI categories), what they do (sharing channels,
interaction correlations, purchasing), how they feel (five emotion
indexes), and platform honors (badge shares). Significance testing
(Pearson, one-way ANOVA, Welch's t) comes from the stats module and is
re-exported here.

Cohort aggregation is a commutative merge over per-user values, so
results are independent of user order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import TweetRecord, UserRecord
from .emotion import EMOTION_CATEGORIES, EmotionClassifier
from .geo import DEFAULT_POI_MAX_KM, POI_CATEGORIES, Gazetteer, PoiIndex
from .stats import TestResult, anova_oneway, f_sf, pearson, welch_t

__all__ = [
    "PERIOD_NAMES",
    "CITY_BUCKETS",
    "SHARING_CHANNELS",
    "IntervalStats",
    "PoiShares",
    "IndexDistribution",
    "CorrelationReport",
    "TestResult",
    "hourly_distribution",
    "period_shares",
    "interval_stats",
    "pooled_interval_stats",
    "count_cities",
    "city_count_histogram",
    "poi_shares",
    "sharing_shares",
    "interaction_correlations",
    "purchasing_index",
    "emotion_indices",
    "badge_shares",
    "anova_table",
    "anova_oneway",
    "welch_t",
    "pearson",
    "load_buying_keywords",
    "load_source_map",
]

# Day periods in minutes of day: early [01:00, 08:00), day [08:00, 19:00),
# night [19:00, 01:00) wrapping over midnight. 19:00 itself is night.
PERIOD_NAMES = ("early_morning", "daytime", "night")
_EARLY_START, _DAY_START, _NIGHT_START = 60, 480, 1140

CITY_BUCKETS = ("1", "2", "3-5", "6-20", ">20")

SHARING_CHANNELS = ("news", "video", "music", "selfie")
_MAP_CHANNELS = SHARING_CHANNELS + ("other",)


def hourly_distribution(tweets: Sequence[TweetRecord]) -> tuple[float, ...]:
    """Fraction of tweets per hour of day; the 24 values sum to 1."""
    if not tweets:
        raise ValueError("need at least one tweet")
    counts = [0] * 24
    for t in tweets:
        counts[t.timestamp.hour] += 1
    n = len(tweets)
    return tuple(c / n for c in counts)


def period_shares(tweets: Sequence[TweetRecord]) -> tuple[float, float, float]:
    """(early-morning, daytime, night) tweet shares for one user; sum to 1."""
    if not tweets:
        raise ValueError("need at least one tweet")
    counts = [0, 0, 0]
    for t in tweets:
        minute = t.timestamp.hour * 60 + t.timestamp.minute
        if _EARLY_START <= minute < _DAY_START:
            counts[0] += 1
        elif _DAY_START <= minute < _NIGHT_START:
            counts[1] += 1
        else:
            counts[2] += 1
    n = len(tweets)
    return counts[0] / n, counts[1] / n, counts[2] / n


@dataclass(frozen=True)
class IntervalStats:
    mean_hours: float
    std_hours: float
    n: int

    def to_dict(self) -> dict:
        return {"mean_hours": self.mean_hours, "std_hours": self.std_hours, "n": self.n}


def _intervals_hours(tweets: Sequence[TweetRecord], cap_hours: float | None) -> list[float]:
    ordered = sorted(tweets, key=lambda t: (t.timestamp, t.tweet_id))
    diffs = [
        (b.timestamp - a.timestamp).total_seconds() / 3600.0
        for a, b in zip(ordered, ordered[1:])
    ]
    if cap_hours is not None:
        diffs = [d for d in diffs if d <= cap_hours]
    return diffs


def _summarize_intervals(diffs: Sequence[float]) -> IntervalStats:
    n = len(diffs)
    arr = np.asarray(diffs, dtype=float)
    return IntervalStats(mean_hours=float(arr.mean()), std_hours=float(arr.std()), n=n)


def interval_stats(
    tweets: Sequence[TweetRecord], cap_hours: float | None = None
) -> IntervalStats:
    """Mean/population-std of consecutive tweet gaps in hours.

    With cap_hours set, gaps strictly above the cap are dropped before
    averaging.
    """
    if len(tweets) < 2:
        raise ValueError("need at least 2 tweets")
    diffs = _intervals_hours(tweets, cap_hours)
    if not diffs:
        raise ValueError(f"every interval exceeds the {cap_hours} h cap")
    return _summarize_intervals(diffs)


def pooled_interval_stats(
    tweet_groups: Iterable[Sequence[TweetRecord]], cap_hours: float | None = None
) -> IntervalStats:
    """Cohort-level interval statistics: pool every user's retained gaps.

    Users with fewer than 2 tweets contribute nothing. Pooling (rather
    than averaging per-user means) is what produces the large cohort
    standard deviations seen with bursty tweeting.
    """
    pooled: list[float] = []
    for tweets in tweet_groups:
        if len(tweets) >= 2:
            pooled.extend(_intervals_hours(tweets, cap_hours))
    if not pooled:
        raise ValueError("no intervals to pool")
    return _summarize_intervals(pooled)


def count_cities(tweets: Sequence[TweetRecord], gazetteer: Gazetteer) -> int:
    """Distinct reverse-geocoded city names across a user's geo-tweets."""
    cities = {
        name
        for t in tweets
        if t.geotag is not None
        for name in [gazetteer.lookup(t.geotag[0], t.geotag[1])]
        if name is not None
    }
    return len(cities)


def city_count_histogram(city_counts: Sequence[int]) -> dict[str, float]:
    """Shares of users per distinct-city bucket {1, 2, 3-5, 6-20, >20}."""
    if not city_counts:
        raise ValueError("empty cohort")
    counts = dict.fromkeys(CITY_BUCKETS, 0)
    for c in city_counts:
        if c < 1:
            raise ValueError(f"city count must be >= 1, got {c}")
        if c == 1:
            bucket = "1"
        elif c == 2:
            bucket = "2"
        elif c <= 5:
            bucket = "3-5"
        elif c <= 20:
            bucket = "6-20"
        else:
            bucket = ">20"
        counts[bucket] += 1
    n = len(city_counts)
    return {b: counts[b] / n for b in CITY_BUCKETS}


@dataclass(frozen=True)
class PoiShares:
    """POI category shares over categorized geo-tweets only."""

    shares: Mapping[str, float]
    n_categorized: int
    n_geotagged: int

    def to_dict(self) -> dict:
        return {
            "shares": dict(self.shares),
            "n_categorized": self.n_categorized,
            "n_geotagged": self.n_geotagged,
        }


def poi_shares(
    tweets: Sequence[TweetRecord], poi_index: PoiIndex, max_km: float = DEFAULT_POI_MAX_KM
) -> PoiShares:
    """Categorize each geo-tweet by nearest POI; shares over categorized ones."""
    counts = dict.fromkeys(POI_CATEGORIES, 0)
    n_geo = 0
    n_cat = 0
    for t in tweets:
        if t.geotag is None:
            continue
        n_geo += 1
        category = poi_index.lookup(t.geotag[0], t.geotag[1], max_km)
        if category is not None:
            counts[category] += 1
            n_cat += 1
    shares = {c: (counts[c] / n_cat if n_cat else 0.0) for c in POI_CATEGORIES}
    return PoiShares(shares=shares, n_categorized=n_cat, n_geotagged=n_geo)


def sharing_shares(
    tweets: Sequence[TweetRecord], source_map: Mapping[str, str]
) -> dict[str, float]:
    """Fraction of all tweets posted from each sharing channel.

    Denominator is every tweet, not just mapped ones, so the four
    channel fractions are small and need not sum to anything.
    """
    shares = dict.fromkeys(SHARING_CHANNELS, 0.0)
    if not tweets:
        return shares
    counts = dict.fromkeys(SHARING_CHANNELS, 0)
    for t in tweets:
        channel = source_map.get(t.source)
        if channel in counts:
            counts[channel] += 1
    n = len(tweets)
    return {c: counts[c] / n for c in SHARING_CHANNELS}


@dataclass(frozen=True)
class CorrelationReport:
    """Interaction-feature correlations against self-report scores."""

    coefficients: tuple[tuple[str, float], ...]  # sorted descending
    threshold: float
    skipped: tuple[str, ...]  # constant features: correlation undefined

    @property
    def selected(self) -> tuple[tuple[str, float], ...]:
        return tuple((n, c) for n, c in self.coefficients if c > self.threshold)

    def to_dict(self) -> dict:
        return {
            "coefficients": [[n, c] for n, c in self.coefficients],
            "threshold": self.threshold,
            "skipped": list(self.skipped),
            "selected": [[n, c] for n, c in self.selected],
        }


def interaction_correlations(
    features: Mapping[str, Sequence[float]],
    scores: Sequence[float],
    threshold: float = 0.13,
) -> CorrelationReport:
    """Pearson of each feature against the scores, ranked descending.

    Must be computed on the self-report training set: running it on
    classifier output would correlate features with themselves.
    Constant features carry no signal and are reported as skipped
    rather than failing the whole batch; a degenerate score vector
    still raises.
    """
    coefs: list[tuple[str, float]] = []
    skipped: list[str] = []
    for name in sorted(features):
        column = features[name]
        if len(set(column)) <= 1:
            skipped.append(name)
            continue
        coefs.append((name, pearson(column, scores)))
    coefs.sort(key=lambda item: (-item[1], item[0]))
    return CorrelationReport(
        coefficients=tuple(coefs), threshold=threshold, skipped=tuple(skipped)
    )


def purchasing_index(tweets: Sequence[TweetRecord], keywords: Sequence[str]) -> float:
    """Fraction of tweets containing any buying keyword (case-insensitive)."""
    if not tweets:
        raise ValueError("need at least one tweet")
    if not keywords:
        raise ValueError("keyword list must be non-empty")
    folded = [k.casefold() for k in keywords]
    hits = sum(1 for t in tweets if any(k in t.text.casefold() for k in folded))
    return hits / len(tweets)


def emotion_indices(
    tweets: Sequence[TweetRecord], classifier: EmotionClassifier
) -> dict[str, float] | None:
    """Per-category shares of emotional tweets; None when all are neutral.

    The denominator is emotional tweets only, so the five indexes sum
    to 1 whenever they are defined.
    """
    if not tweets:
        raise ValueError("need at least one tweet")
    counts = dict.fromkeys(EMOTION_CATEGORIES, 0)
    total = 0
    for t in tweets:
        category = classifier(t.text)
        if category is not None:
            counts[category] += 1
            total += 1
    if total == 0:
        return None
    return {c: counts[c] / total for c in EMOTION_CATEGORIES}


def badge_shares(users: Sequence[UserRecord], badge: str) -> tuple[float, float]:
    """(share with the badge, share without); the two sum to 1."""
    if not users:
        raise ValueError("empty cohort")
    with_badge = sum(1 for u in users if badge in u.badges)
    n = len(users)
    return with_badge / n, (n - with_badge) / n


@dataclass(frozen=True)
class IndexDistribution:
    """Per-user values of one behavioral index for one cohort."""

    cohort: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("empty distribution")
        if any(not 0.0 <= v <= 1.0 for v in self.values):
            raise ValueError("index values must lie in [0, 1]")

    @property
    def summaries(self) -> dict[str, float]:
        arr = np.asarray(self.values, dtype=float)
        q1, median, q3 = (float(q) for q in np.percentile(arr, [25, 50, 75]))
        return {
            "n": float(len(arr)),
            "mean": float(arr.mean()),
            "q1": q1,
            "median": median,
            "q3": q3,
            "max": float(arr.max()),
        }

    def to_dict(self) -> dict:
        return {"cohort": self.cohort, "summaries": self.summaries, "values": list(self.values)}


def anova_table(a: Sequence[float], b: Sequence[float]) -> dict:
    """One-way ANOVA decomposition in the conventional table layout.

    Same statistic as anova_oneway (asserted equal in tests), but with
    the between/within sum-of-squares rows spelled out for reporting.
    """
    xa = np.asarray(a, dtype=float)
    xb = np.asarray(b, dtype=float)
    if len(xa) < 2 or len(xb) < 2:
        raise ValueError("each group needs at least 2 values")
    n = len(xa) + len(xb)
    grand = (xa.sum() + xb.sum()) / n
    ssb = len(xa) * (xa.mean() - grand) ** 2 + len(xb) * (xb.mean() - grand) ** 2
    ssw = ((xa - xa.mean()) ** 2).sum() + ((xb - xb.mean()) ** 2).sum()
    if ssw <= 0:
        raise ValueError("zero within-group variance")
    df_between, df_within = 1, n - 2
    msb = ssb / df_between
    msw = ssw / df_within
    f = msb / msw
    return {
        "ss_between": float(ssb),
        "ss_within": float(ssw),
        "df_between": df_between,
        "df_within": df_within,
        "ms_between": float(msb),
        "ms_within": float(msw),
        "F": float(f),
        "p_value": f_sf(float(f), float(df_between), float(df_within)),
    }


def load_buying_keywords(path: str | Path) -> tuple[str, ...]:
    """One keyword per line, '#' comments; order preserved."""
    keywords: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word and not word.startswith("#"):
                keywords.append(word)
    if not keywords:
        raise ValueError(f"{path}: no keywords")
    return tuple(keywords)


def load_source_map(path: str | Path) -> dict[str, str]:
    """JSON object mapping raw source tags to sharing channels."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: expected a JSON object")
    for tag, channel in raw.items():
        if channel not in _MAP_CHANNELS:
            raise ValueError(
                f"{path}: tag {tag!r} maps to {channel!r}, expected one of {_MAP_CHANNELS}"
            )
    return dict(raw)
