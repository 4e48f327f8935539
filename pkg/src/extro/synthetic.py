"""Deterministic synthetic corpora with planted cohort effects.

generate_cohort writes a users/tweets corpus (plus matching gazetteer,
POI table, and truth sidecar) in which extrovert/introvert/neutral
groups differ by configured amounts on every analyzed facet: day-period
shares, inter-tweet interval means, city-count buckets, POI mixture,
sharing channels, purchasing rate, emotion mixture, and badge rate.

Construction is engineered so cohort-level recovery is tight:

* tweets come in two-tweet sessions; session types (day-day, night-
  early, day-night) are allocated with running integer (Bresenham)
  accumulators, so cohort period shares are exact to the planted
  targets up to a couple of tweets in tens of thousands.
* within-session gaps carry antithetic jitter around the capped-mean
  target, so the pooled capped interval mean is exact; between-session
  gaps always exceed 25 h (dropped by the 24 h cap) and their day
  counts are chosen by a per-cohort compensator that drives the pooled
  uncapped mean onto its target.
* categorical facets (cities, POIs, sharing, badges, emotions,
  purchasing hits) use exact count allocation, perturbed in antithetic
  user pairs: cohort totals stay exact while within-group variance
  stays positive, so downstream significance tests are well-posed even
  for a zero-effect spec.

Identical spec (including seed) yields byte-identical files. The module
also provides the small feature-space fixtures used by classifier
sanity checks.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .assets import (
    default_buying_keywords,
    default_emotion_classifier,
    default_term_lexicon,
)
from .emotion import EMOTION_CATEGORIES
from .features import FeatureVector
from .geo import POI_CATEGORIES
from .labeling import fit_score_model, label_score
from .models import LabeledSample

__all__ = [
    "GroupEffects",
    "CohortSpec",
    "CohortFiles",
    "GROUPS",
    "generate_cohort",
    "make_separable_samples",
    "shuffle_labels",
    "make_index_groups",
]

GROUPS = ("extrovert", "neutral", "introvert")
_GROUP_LABEL = {"extrovert": 1, "neutral": 0, "introvert": -1}

_DAY_MIN = 1440
# between-session gaps stay >= 24.5 h: safely above the 24 h cap, low
# enough that single-day jumps remain available for low uncapped means
_CAP_MARGIN_MIN = 1470
# minimum climb from one session's end to the next session's start when
# the next start window allows it; 1440 + this margin then clears the
# 24.5 h floor with a single-day jump
_UP_MARGIN_MIN = 30

# Day-period windows in minutes of day (early [01,08), day [08,19), night rest).
_EARLY, _DAY, _NIGHT = 60, 480, 1140

_BUCKET_CITY_COUNT = {"1": 1, "2": 2, "3-5": 4, "6-20": 8, ">20": 21}
_BUCKET_ORDER = ("1", "2", "3-5", "6-20", ">20")

_BASE_TEXTS = (
    "记录一下今天的日常琐事",
    "随手发一条状态",
    "日常打卡一条",
    "今天也是平常的一天",
    "随便写写最近的安排",
)

_CHANNEL_TAG = {
    "news": "Sina News",
    "video": "Video Share",
    "music": "Music Radio",
    "selfie": "Selfie Cam",
}
_CHANNEL_ORDER = ("news", "video", "music", "selfie")
_DEFAULT_TAG = "Mobile Client"


def _spread(pinned: dict[str, float], names: Sequence[str]) -> dict[str, float]:
    """Fill unpinned categories with the remaining mass, split evenly."""
    rest = [n for n in names if n not in pinned]
    remainder = 1.0 - sum(pinned.values())
    out = dict(pinned)
    out.update({n: remainder / len(rest) for n in rest})
    return out


@dataclass(frozen=True)
class GroupEffects:
    """Planted targets for one group; defaults live in CohortSpec."""

    period_shares: tuple[float, float, float]
    interval_capped_mean_hours: float
    interval_uncapped_mean_hours: float
    city_bucket_shares: tuple[float, float, float, float, float]
    poi_shares: dict[str, float]
    sharing_shares: dict[str, float]
    purchasing_rate: float
    emotion_mixture: tuple[float, float, float, float, float]  # EMOTION_CATEGORIES order
    badge_rate: float
    score_range: tuple[float, float]
    mention_rate: float
    retweet_rate: float

    def validate(self) -> None:
        for name, shares in (
            ("period_shares", self.period_shares),
            ("city_bucket_shares", self.city_bucket_shares),
            ("emotion_mixture", self.emotion_mixture),
            ("poi_shares", tuple(self.poi_shares.values())),
        ):
            if any(not 0.0 <= s <= 1.0 for s in shares):
                raise ValueError(f"{name} entries must lie in [0, 1]")
            if abs(sum(shares) - 1.0) > 1e-9:
                raise ValueError(f"{name} must sum to 1, got {sum(shares)}")
        for name, p in (
            ("purchasing_rate", self.purchasing_rate),
            ("badge_rate", self.badge_rate),
            ("mention_rate", self.mention_rate),
            ("retweet_rate", self.retweet_rate),
            *((f"sharing_shares[{c}]", v) for c, v in self.sharing_shares.items()),
        ):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        # session starts need room for both the gap and its +/- 1 h jitter
        if not 2.1 <= self.interval_capped_mean_hours <= 9.9:
            raise ValueError("capped interval mean must lie in [2.1, 9.9] hours")
        if self.interval_uncapped_mean_hours <= self.interval_capped_mean_hours:
            raise ValueError("uncapped interval mean must exceed the capped mean")


_EXTROVERT_DEFAULTS = GroupEffects(
    period_shares=(0.085, 0.557, 0.358),
    interval_capped_mean_hours=6.41,
    interval_uncapped_mean_hours=28.10,
    city_bucket_shares=(0.2712, 0.14, 0.29, 0.28, 0.0188),
    poi_shares=_spread(
        {"Restaurants": 0.6638, "Shops": 0.0458, "Enterprises": 0.0446}, POI_CATEGORIES
    ),
    sharing_shares={"news": 0.001939, "video": 0.0030, "music": 0.0020, "selfie": 0.003539},
    purchasing_rate=0.0440,
    emotion_mixture=(0.1237, 0.1056, 0.4737, 0.2474, 0.0496),
    badge_rate=0.607,
    score_range=(46.0, 52.0),
    mention_rate=0.30,
    retweet_rate=0.25,
)

_INTROVERT_DEFAULTS = GroupEffects(
    period_shares=(0.087, 0.608, 0.305),
    interval_capped_mean_hours=5.61,
    interval_uncapped_mean_hours=19.09,
    city_bucket_shares=(0.4432, 0.15, 0.19, 0.19, 0.0268),
    poi_shares=_spread(
        {"Restaurants": 0.6110, "Shops": 0.0768, "Enterprises": 0.0259}, POI_CATEGORIES
    ),
    sharing_shares={"news": 0.006122, "video": 0.0020, "music": 0.0030, "selfie": 0.001276},
    purchasing_rate=0.0484,
    emotion_mixture=(0.1545, 0.1130, 0.4515, 0.2084, 0.0726),
    badge_rate=0.539,
    score_range=(26.0, 32.0),
    mention_rate=0.20,
    retweet_rate=0.15,
)


def _midpoint_defaults() -> GroupEffects:
    e, i = _EXTROVERT_DEFAULTS, _INTROVERT_DEFAULTS
    mid = lambda a, b: (a + b) / 2.0  # noqa: E731
    return GroupEffects(
        period_shares=tuple(mid(a, b) for a, b in zip(e.period_shares, i.period_shares)),
        interval_capped_mean_hours=mid(
            e.interval_capped_mean_hours, i.interval_capped_mean_hours
        ),
        interval_uncapped_mean_hours=mid(
            e.interval_uncapped_mean_hours, i.interval_uncapped_mean_hours
        ),
        city_bucket_shares=tuple(
            mid(a, b) for a, b in zip(e.city_bucket_shares, i.city_bucket_shares)
        ),
        poi_shares={c: mid(e.poi_shares[c], i.poi_shares[c]) for c in POI_CATEGORIES},
        sharing_shares={c: mid(e.sharing_shares[c], i.sharing_shares[c]) for c in _CHANNEL_TAG},
        purchasing_rate=mid(e.purchasing_rate, i.purchasing_rate),
        emotion_mixture=tuple(mid(a, b) for a, b in zip(e.emotion_mixture, i.emotion_mixture)),
        badge_rate=mid(e.badge_rate, i.badge_rate),
        score_range=(36.5, 41.5),
        mention_rate=mid(e.mention_rate, i.mention_rate),
        retweet_rate=mid(e.retweet_rate, i.retweet_rate),
    )


@dataclass(frozen=True)
class CohortSpec:
    users_per_group: int = 100
    tweets_per_user: int = 200
    seed: int = 7
    scored_fraction: float = 0.48  # fraction of each group carrying a self-report score
    geo_fraction: float = 0.30
    emotional_fraction: float = 0.50
    badge_name: str = "Binding-Taobao"
    effects: dict[str, GroupEffects] = field(
        default_factory=lambda: {
            "extrovert": _EXTROVERT_DEFAULTS,
            "neutral": _midpoint_defaults(),
            "introvert": _INTROVERT_DEFAULTS,
        }
    )

    def validate(self) -> None:
        if self.users_per_group < 1:
            raise ValueError("users_per_group must be >= 1")
        if self.tweets_per_user < 4 or self.tweets_per_user % 2:
            raise ValueError("tweets_per_user must be an even integer >= 4")
        for frac_name in ("scored_fraction", "geo_fraction", "emotional_fraction"):
            v = getattr(self, frac_name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{frac_name} must lie in [0, 1], got {v}")
        if int(self.scored_fraction * self.users_per_group) < 1:
            raise ValueError(
                "scored_fraction * users_per_group must reach 1: every group "
                "needs at least one self-reported score to anchor the labels"
            )
        if set(self.effects) != set(GROUPS):
            raise ValueError(f"effects must cover exactly the groups {GROUPS}")
        for g in GROUPS:
            self.effects[g].validate()

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for g, eff in d["effects"].items():
            for k, v in eff.items():
                if isinstance(v, tuple):
                    eff[k] = list(v)
        return d

    @staticmethod
    def null(seed: int = 7, **overrides) -> "CohortSpec":
        """Spec with zero behavioral effects: every group gets the same
        (midpoint) targets. Score ranges stay distinct so the three
        label groups still exist; only the behavior is identical."""
        mid = _midpoint_defaults()
        effects = {
            g: dataclasses.replace(mid, score_range=spec_eff.score_range)
            for g, spec_eff in {
                "extrovert": _EXTROVERT_DEFAULTS,
                "neutral": mid,
                "introvert": _INTROVERT_DEFAULTS,
            }.items()
        }
        return CohortSpec(seed=seed, effects=effects, **overrides)


@dataclass(frozen=True)
class CohortFiles:
    users: Path
    tweets: Path
    truth: Path
    gazetteer: Path
    poi: Path
    manifest: Path
    snapshot_date: str


class _Allocator:
    """Running integer allocation: totals track nominal sums exactly."""

    def __init__(self) -> None:
        self._nominal = 0.0
        self._emitted = 0

    def take(self, nominal: float) -> int:
        if nominal < 0:
            raise ValueError("nominal must be >= 0")
        self._nominal += nominal
        out = int(math.floor(self._nominal + 1e-9)) - self._emitted
        self._emitted += out
        return out


def _exact_counts(shares: Sequence[float], total: int) -> list[int]:
    """Largest-remainder apportionment of `total` over `shares`."""
    raw = [s * total for s in shares]
    counts = [int(math.floor(r)) for r in raw]
    short = total - sum(counts)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def _antithetic_jitters(rng: np.random.Generator, n: int, width: int) -> list[int]:
    """n integer jitters in [-width, width] summing exactly to 0."""
    jitters: list[int] = []
    for _ in range(n // 2):
        u = int(rng.integers(1, width + 1))
        jitters.extend((u, -u))
    if n % 2:
        jitters.append(0)
    perm = rng.permutation(n)
    return [jitters[i] for i in perm]


def _emotion_counts(
    rng: np.random.Generator,
    mixture: Sequence[float],
    n_users: int,
    n_emotional: float,
) -> list[list[int]]:
    """Per-user emotional-tweet counts per category.

    Base counts come from running allocators (cohort totals exact);
    antithetic user pairs then trade a couple of tweets between two
    categories so per-user indices vary without moving cohort totals.
    """
    allocs = [_Allocator() for _ in mixture]
    counts = [
        [a.take(m * n_emotional) for a, m in zip(allocs, mixture)]
        for _ in range(n_users)
    ]
    for u in range(0, n_users - 1, 2):
        a, b = (int(i) for i in rng.choice(len(mixture), 2, replace=False))
        s = int(rng.integers(1, 4))
        s = min(s, counts[u][b], counts[u + 1][a])
        if s <= 0:
            continue
        counts[u][a] += s
        counts[u][b] -= s
        counts[u + 1][a] -= s
        counts[u + 1][b] += s
    return counts


def _start_window(kind: str, gap_min: int) -> tuple[int, int]:
    """Start minute-of-day range keeping both tweets in the kind's periods."""
    if kind == "day_day":
        lo, hi = _DAY, _NIGHT - gap_min
    elif kind == "night_early":
        lo = max(_NIGHT, _DAY_MIN + _EARLY - gap_min)
        hi = min(_DAY_MIN, _DAY_MIN + _DAY - gap_min)
    elif kind == "day_night":
        lo = max(_DAY, _NIGHT - gap_min)
        hi = min(_NIGHT, _DAY_MIN + _EARLY - gap_min)
    else:
        raise ValueError(f"unknown session kind {kind!r}")
    if not lo < hi:
        raise ValueError(f"infeasible window for {kind} with gap {gap_min} min")
    return lo, hi


def _kind_cycle(counts: dict[str, int]) -> list[str]:
    """Session kinds cycled in ascending start-window order.

    Consecutive sessions then mostly climb through the day, so the next
    session can start later than the previous session ended and the
    whole-day jump between them stays at a single day; that keeps low
    uncapped-interval targets reachable despite the >24 h gap floor.
    """
    remaining = dict(counts)
    order = ("day_day", "day_night", "night_early")
    out: list[str] = []
    while any(remaining[k] for k in order):
        for k in order:
            if remaining[k]:
                out.append(k)
                remaining[k] -= 1
    return out


def _filtered_terms(terms: Sequence[str], forbidden: Sequence[str]) -> list[str]:
    """Terms safe to embed in synthetic text: no substring collision with
    any emotion/buying keyword in either direction."""
    safe = []
    for t in terms:
        if any(f in t or t in f for f in forbidden):
            continue
        safe.append(t)
    return safe


def _plan_sessions(
    rng: np.random.Generator,
    n_sessions: int,
    counts: dict[str, int],
    capped_mean_min: float,
    gap_alloc: _Allocator,
    jitters: Sequence[int],
) -> list[tuple[str, int, int]]:
    """(kind, start minute-of-day, within-session gap minutes) per session."""
    kinds = _kind_cycle(counts)
    assert len(kinds) == n_sessions
    bases = [gap_alloc.take(capped_mean_min) for _ in range(n_sessions)]
    sessions = []
    prev_end: int | None = None
    for kind, base, jitter in zip(kinds, bases, jitters):
        gap = base + int(jitter)
        lo, hi = _start_window(kind, gap)
        lo_up = lo if prev_end is None else max(lo, prev_end + _UP_MARGIN_MIN)
        start = int(rng.integers(lo_up, hi)) if lo_up < hi else int(rng.integers(lo, hi))
        sessions.append((kind, start, gap))
        prev_end = start + gap
    return sessions


def _layout_timeline(
    sessions: list[tuple[str, int, int]], desired_large_total_min: float
) -> tuple[list[int], float]:
    """Absolute tweet times (minutes) with between-session gaps >= 25 h.

    Whole-day jumps between sessions are chosen so the summed large
    gaps land as close to `desired_large_total_min` as day quantization
    allows; returns (times, achieved large total).
    """
    n = len(sessions)
    r = [
        sessions[k + 1][1] - sessions[k][1] - sessions[k][2]
        for k in range(n - 1)
    ]
    delta_min = [max(1, math.ceil((_CAP_MARGIN_MIN - rk) / _DAY_MIN)) for rk in r]
    total_r = sum(r)
    want = max(
        sum(delta_min), round((desired_large_total_min - total_r) / _DAY_MIN)
    )
    extra = want - sum(delta_min)
    deltas = list(delta_min)
    i = 0
    while extra > 0:
        deltas[i % (n - 1)] += 1
        extra -= 1
        i += 1
    times: list[int] = []
    day = 0
    for k, (kind, start, gap) in enumerate(sessions):
        t0 = day * _DAY_MIN + start
        times.extend((t0, t0 + gap))
        if k < n - 1:
            day += deltas[k]
    achieved = float(sum(d * _DAY_MIN + rk for d, rk in zip(deltas, r)))
    return times, achieved


def generate_cohort(spec: CohortSpec, out_dir: str | Path) -> CohortFiles:
    """Write users.jsonl, tweets.jsonl, truth.tsv, gazetteer.csv, poi.csv,
    manifest.json under out_dir. Identical spec -> identical bytes."""
    spec.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    u_per = spec.users_per_group
    t_per = spec.tweets_per_user
    n_sessions = t_per // 2
    n_large = n_sessions - 1

    emotion_lexicon = default_emotion_classifier().lexicon
    buying_keywords = default_buying_keywords()
    forbidden = [w for words in emotion_lexicon.values() for w in words]
    forbidden += [k.casefold() for k in buying_keywords]
    text_terms = _filtered_terms(default_term_lexicon().terms, forbidden)
    if len(text_terms) < 10:
        raise RuntimeError("term lexicon too entangled with keyword assets")
    # three signature terms per group: term-presence features then separate
    # the groups regardless of how the texture fields happen to cycle
    signature = {g: tuple(text_terms[3 * i : 3 * i + 3]) for i, g in enumerate(GROUPS)}

    # synthetic world: 5 x 5 city grid, one POI per category per city
    cities = [
        (f"City-{i:02d}", 20.0 + 2.0 * (i // 5), 100.0 + 2.0 * (i % 5)) for i in range(25)
    ]
    poi_location: dict[tuple[str, str], tuple[float, float]] = {}
    poi_rows = []
    for name, clat, clon in cities:
        for j, cat in enumerate(POI_CATEGORIES):
            km = 1.0 + 0.8 * j
            bearing = math.radians(40.0 * j)
            lat = clat + (km * math.cos(bearing)) / 111.32
            lon = clon + (km * math.sin(bearing)) / (111.32 * math.cos(math.radians(clat)))
            poi_location[(name, cat)] = (lat, lon)
            poi_rows.append((f"{name} {cat}", cat, lat, lon))

    base_date = dt.datetime(2012, 1, 2)  # a Monday; weekday profiles stay aligned

    user_lines: list[str] = []
    tweet_lines: list[str] = []
    truth_rows: list[tuple[str, str, float]] = []
    max_time_min = 0

    for group in GROUPS:
        eff = spec.effects[group]
        capped_mean_min = eff.interval_capped_mean_hours * 60.0
        small_total_min = n_sessions * capped_mean_min
        uncapped_total_min = (t_per - 1) * eff.interval_uncapped_mean_hours * 60.0
        per_user_large = uncapped_total_min - small_total_min
        if per_user_large < n_large * _CAP_MARGIN_MIN:
            raise ValueError(
                f"{group}: uncapped mean {eff.interval_uncapped_mean_hours} h is too low "
                f"for {n_large} between-session gaps of >= 25 h"
            )

        # session-type targets from the period shares (two tweets/session)
        early_t, day_t, night_t = (s * t_per for s in eff.period_shares)
        beta_t = early_t
        delta_t = night_t - beta_t
        alpha_t = n_sessions - beta_t - delta_t
        if min(alpha_t, beta_t, delta_t) < -1e-9:
            raise ValueError(f"{group}: period shares unreachable with two-tweet sessions")

        beta_alloc, delta_alloc, gap_alloc = _Allocator(), _Allocator(), _Allocator()
        bucket_counts = _exact_counts(eff.city_bucket_shares, u_per)
        bucket_of_user: list[str] = []
        for b, c in zip(_BUCKET_ORDER, bucket_counts):
            bucket_of_user.extend([b] * c)
        n_geo = round(spec.geo_fraction * t_per)
        poi_counts = _exact_counts(
            [eff.poi_shares[c] for c in POI_CATEGORIES], u_per * n_geo
        )
        poi_sequence: list[str] = []
        for cat, c in zip(POI_CATEGORIES, poi_counts):
            poi_sequence.extend([cat] * c)
        poi_cursor = 0
        n_badged = round(eff.badge_rate * u_per)
        scored_alloc = _Allocator()
        scores = np.linspace(eff.score_range[0], eff.score_range[1], u_per)
        mention_alloc, retweet_alloc = _Allocator(), _Allocator()
        n_emotional = spec.emotional_fraction * t_per
        emo_counts_all = _emotion_counts(rng, eff.emotion_mixture, u_per, n_emotional)
        buy_alloc = _Allocator()

        remaining_large = per_user_large * u_per
        gi = group[0]
        pair_jitters: list[int] = []
        for u in range(u_per):
            uid = f"u{gi}{u:05d}"
            beta_u = beta_alloc.take(beta_t)
            delta_u = delta_alloc.take(delta_t)
            counts = {
                "night_early": beta_u,
                "day_night": delta_u,
                "day_day": n_sessions - beta_u - delta_u,
            }
            # antithetic across user pairs: per-user interval means vary,
            # the cohort capped mean stays exact
            if u % 2 == 0:
                if u + 1 < u_per:
                    pair_jitters = [int(j) for j in rng.integers(-60, 61, n_sessions)]
                    jitters = pair_jitters
                else:
                    jitters = _antithetic_jitters(rng, n_sessions, 60)
            else:
                jitters = [-j for j in pair_jitters]
            sessions = _plan_sessions(
                rng, n_sessions, counts, capped_mean_min, gap_alloc, jitters
            )
            desired = remaining_large / (u_per - u)
            times, achieved = _layout_timeline(sessions, desired)
            remaining_large -= achieved

            # overlays on the flat tweet index
            counts_u = list(emo_counts_all[u])
            while sum(counts_u) > t_per:  # only reachable at extreme fractions
                counts_u[counts_u.index(max(counts_u))] -= 1
            n_emo_u = sum(counts_u)
            emo_idx = sorted(int(i) for i in rng.choice(t_per, n_emo_u, replace=False))
            emo_cats: list[str] = []
            for cat, c in zip(EMOTION_CATEGORIES, counts_u):
                emo_cats.extend([cat] * c)
            emo_cats = [emo_cats[int(i)] for i in rng.permutation(n_emo_u)]
            emotion_at = dict(zip(emo_idx, emo_cats))
            n_buy = min(buy_alloc.take(eff.purchasing_rate * t_per), t_per)
            buy_at = set(int(i) for i in rng.choice(t_per, n_buy, replace=False))

            bucket = bucket_of_user[u]
            n_cities = _BUCKET_CITY_COUNT[bucket]
            my_cities = [cities[(u * 3 + k) % len(cities)][0] for k in range(n_cities)]
            geo_stride = max(1, t_per // max(1, n_geo))
            geo_positions = [min(t_per - 1, k * geo_stride) for k in range(n_geo)]

            term_pick = list(signature[group])
            # nearest-count badge assignment, spread evenly over user index
            has_badge = (u * n_badged) // u_per != ((u + 1) * n_badged) // u_per
            scored = scored_alloc.take(spec.scored_fraction) == 1
            score = float(round(scores[u], 3))

            n_mention = mention_alloc.take(eff.mention_rate * t_per)
            n_retweet = retweet_alloc.take(eff.retweet_rate * t_per)
            mention_at = {min(t_per - 1, k * max(1, t_per // max(1, n_mention)))
                          for k in range(n_mention)} if n_mention else set()
            retweet_at = {min(t_per - 1, 1 + k * max(1, t_per // max(1, n_retweet)))
                          for k in range(n_retweet)} if n_retweet else set()

            register = dt.date(2011, 1, 1) + dt.timedelta(days=(u * 7 + len(user_lines)) % 330)
            # disjoint per-group audience bands: unscored users must be
            # recoverable from profile features alone
            followers = (600 if group == "extrovert" else 30 if group == "introvert" else 300)
            followees = (400 if group == "extrovert" else 40 if group == "introvert" else 200)
            user_obj = {
                "user_id": uid,
                "gender": ("m", "f", "u")[u % 3],
                "register_date": register.isoformat(),
                "n_tweets": t_per + (u % 9),
                "n_followers": followers + (u % 100),
                "n_followees": followees + (u % 80),
                "allow_comments": u % 4 != 0,
                "allow_messages": u % 3 != 0,
                "allow_location": True,
                "description": " ".join(term_pick[:2]),
                "badges": [spec.badge_name] if has_badge else [],
            }
            if scored:
                user_obj["extraversion_score"] = score
            user_lines.append(json.dumps(user_obj, ensure_ascii=False, sort_keys=True))
            truth_rows.append((uid, group, score))

            geo_iter = {pos: my_cities[k % n_cities] for k, pos in enumerate(geo_positions)}
            for k, t_min in enumerate(times):
                max_time_min = max(max_time_min, t_min)
                when = base_date + dt.timedelta(minutes=t_min)
                text = _BASE_TEXTS[k % len(_BASE_TEXTS)]
                if k % 10 == 0:
                    text += " " + term_pick[k // 10 % 3]
                if k in emotion_at:
                    cat = emotion_at[k]
                    words = emotion_lexicon[cat]
                    text += " " + words[k % len(words)]
                if k in buy_at:
                    text += " " + buying_keywords[k % len(buying_keywords)]
                tweet_obj = {
                    "tweet_id": f"{uid}-{k:04d}",
                    "user_id": uid,
                    "timestamp": when.strftime("%Y-%m-%dT%H:%M:00"),
                    "text": text,
                    "source": _DEFAULT_TAG,
                    "is_retweet": k in retweet_at,
                    "mention_count": 1 if k in mention_at else 0,
                }
                if k in geo_iter:
                    city = geo_iter[k]
                    cat = poi_sequence[poi_cursor]
                    poi_cursor += 1
                    lat, lon = poi_location[(city, cat)]
                    radius = float(rng.uniform(0, 0.09))
                    theta = float(rng.uniform(0, 2 * math.pi))
                    tweet_obj["lat"] = round(lat + radius * math.cos(theta) / 111.32, 6)
                    tweet_obj["lon"] = round(
                        lon + radius * math.sin(theta) / (111.32 * math.cos(math.radians(lat))), 6
                    )
                tweet_lines.append(json.dumps(tweet_obj, ensure_ascii=False, sort_keys=True))

        # sharing channels: exact cohort counts, assigned from each user's tail
        total_tweets = u_per * t_per
        tail_ptr = [t_per - 1] * u_per
        start_of_group = len(tweet_lines) - total_tweets
        for channel in _CHANNEL_ORDER:
            n_c = round(eff.sharing_shares[channel] * total_tweets)
            for j in range(n_c):
                uu = j % u_per
                pos = tail_ptr[uu]
                tail_ptr[uu] -= 1
                line_i = start_of_group + uu * t_per + pos
                obj = json.loads(tweet_lines[line_i])
                obj["source"] = _CHANNEL_TAG[channel]
                tweet_lines[line_i] = json.dumps(obj, ensure_ascii=False, sort_keys=True)

    # labels implied by the generated scores must agree with the groups
    scored_pairs = [
        (g, s)
        for (uid, g, s), line in zip(truth_rows, user_lines)
        if "extraversion_score" in json.loads(line)
    ]
    model = fit_score_model([s for _, s in scored_pairs])
    for g, s in scored_pairs:
        if label_score(s, model) != _GROUP_LABEL[g]:
            raise RuntimeError("planted scores do not reproduce the planted groups")

    snapshot = (base_date + dt.timedelta(minutes=max_time_min, days=30)).date()

    users_path = out / "users.jsonl"
    tweets_path = out / "tweets.jsonl"
    truth_path = out / "truth.tsv"
    gaz_path = out / "gazetteer.csv"
    poi_path = out / "poi.csv"
    manifest_path = out / "manifest.json"

    users_path.write_text("\n".join(user_lines) + "\n", encoding="utf-8")
    tweets_path.write_text("\n".join(tweet_lines) + "\n", encoding="utf-8")
    with open(truth_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# seed={spec.seed}\n")
        fh.write("user_id\tgroup\tscore\n")
        for uid, group, score in truth_rows:
            fh.write(f"{uid}\t{group}\t{score!r}\n")
    with open(gaz_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("name,lat,lon,radius_km\n")
        for name, clat, clon in cities:
            fh.write(f"{name},{clat!r},{clon!r},25.0\n")
    with open(poi_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("name,category,lat,lon\n")
        for name, cat, lat, lon in poi_rows:
            fh.write(f"{name},{cat},{lat!r},{lon!r}\n")
    manifest = {
        "spec": spec.to_dict(),
        "snapshot_date": snapshot.isoformat(),
        "n_users": len(user_lines),
        "n_tweets": len(tweet_lines),
    }
    manifest_path.write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return CohortFiles(
        users=users_path,
        tweets=tweets_path,
        truth=truth_path,
        gazetteer=gaz_path,
        poi=poi_path,
        manifest=manifest_path,
        snapshot_date=snapshot.isoformat(),
    )


def make_separable_samples(
    n_extrovert: int = 45,
    n_neutral: int = 56,
    n_introvert: int = 44,
    n_features: int = 2,
    seed: int = 0,
) -> list[LabeledSample]:
    """Three well-separated Gaussian clusters in [0, 1] feature space."""
    rng = np.random.default_rng(seed)
    centers = {1: 0.85, 0: 0.50, -1: 0.15}
    samples: list[LabeledSample] = []
    i = 0
    for label, n in ((1, n_extrovert), (0, n_neutral), (-1, n_introvert)):
        points = np.clip(
            rng.normal(centers[label], 0.05, size=(n, n_features)), 0.0, 1.0
        )
        for row in points:
            samples.append(
                LabeledSample(
                    features=FeatureVector(
                        user_id=f"s{i:05d}", values=tuple(float(v) for v in row)
                    ),
                    label=label,
                )
            )
            i += 1
    return samples


def shuffle_labels(samples: Sequence[LabeledSample], seed: int = 0) -> list[LabeledSample]:
    """Null model: same features, labels randomly permuted."""
    rng = np.random.default_rng(seed)
    labels = [s.label for s in samples]
    perm = rng.permutation(len(labels))
    return [
        LabeledSample(features=s.features, label=labels[int(j)])
        for s, j in zip(samples, perm)
    ]


def make_index_groups(
    sizes: tuple[int, int] = (4920, 2329),
    means: tuple[float, float] = (0.0440, 0.0484),
    within_variance: float = 14.563 / 7247,
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Two deterministic [0, 1] groups with the requested means and a
    within-group variance close to `within_variance` (two-point mass)."""
    groups = []
    for n, m in zip(sizes, means):
        if not 0 < m < 1:
            raise ValueError("means must lie in (0, 1)")
        q = within_variance / (within_variance + m * m)  # fraction at zero
        k = round(q * n)
        a = m * n / (n - k)
        if a > 1.0:
            raise ValueError("within_variance too large for a [0, 1] two-point mass")
        groups.append((0.0,) * k + (a,) * (n - k))
    return groups[0], groups[1]
