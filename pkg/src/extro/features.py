"""Feature families and vector assembly.

Three families feed the classifiers:

* basic: profile-level scalars such as the gender code, log-scale
  tweeting patterns, privacy flags, self-description length.
* interactive: summaries of hour-of-day and day-of-week interaction
  profiles (posting, mentioning, retweeting) plus mention/retweet rates.
* linguistic: presence of lexicon terms selected by corpus-level
  TF-IDF, plus average tweet length.

A declarative FeatureRegistry fixes the name/order of every dimension;
the registry (and its fingerprint) travels with any trained model so
vectors can never be silently reordered. Min-max standardization maps
each column into [0, 1] and its (min, max) pairs are reused, with
clipping, when classifying new users.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Gender, TweetRecord, UserRecord

__all__ = [
    "LOG_FLOOR",
    "FAMILIES",
    "INTERACTION_KINDS",
    "GRANULARITIES",
    "TermLexicon",
    "InteractionProfile",
    "RegistryEntry",
    "FeatureRegistry",
    "FeatureVector",
    "extract_basic",
    "interaction_profile",
    "summarize_profile",
    "interaction_rates",
    "build_user_document",
    "select_terms",
    "extract_linguistic",
    "standardize",
    "apply_standardization",
    "build_default_registry",
    "assemble",
    "load_term_lexicon",
    "write_matrix",
    "read_matrix",
]

LOG_FLOOR = 1e-6  # argument floor: log(0) is taken as log(LOG_FLOOR)

FAMILIES = ("basic", "interactive", "linguistic")
INTERACTION_KINDS = ("posting", "mentioning", "retweeting")
GRANULARITIES = {"hourly": 24, "weekly": 7}
_SUMMARIES = ("mean", "peak_bin", "peak_value", "trough_bin", "variance")

_GENDER_CODE = {Gender.MALE: 1.0, Gender.FEMALE: 0.0, Gender.UNKNOWN: 0.5}

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_RETWEET_CHAIN_RE = re.compile(r"//\s*@[\w-]+\s*[::]?")
_MENTION_RE = re.compile(r"@[\w-]+")
_WS_RE = re.compile(r"\s+")


def _log(x: float) -> float:
    return math.log(x) if x > 0 else math.log(LOG_FLOOR)


@dataclass(frozen=True)
class TermLexicon:
    """Ordered list of unique, non-empty descriptor terms."""

    terms: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("lexicon must be non-empty")
        if any(not t for t in self.terms):
            raise ValueError("lexicon terms must be non-empty")
        if len(set(self.terms)) != len(self.terms):
            raise ValueError("lexicon terms must be unique")

    def __len__(self) -> int:
        return len(self.terms)


def load_term_lexicon(path: str | Path) -> TermLexicon:
    """Load a lexicon file: UTF-8, one term per line, '#' comments.

    Latin letters are lowercased so matching against preprocessed
    documents (which are lowercased) is consistent.
    """
    terms: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            term = line.strip()
            if term and not term.startswith("#"):
                terms.append(term.lower())
    return TermLexicon(terms=tuple(terms))


@dataclass(frozen=True)
class InteractionProfile:
    kind: str
    granularity: str
    bins: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.kind not in INTERACTION_KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        expected = GRANULARITIES.get(self.granularity)
        if expected is None:
            raise ValueError(f"unknown granularity {self.granularity!r}")
        if len(self.bins) != expected:
            raise ValueError(f"{self.granularity} profile needs {expected} bins, got {len(self.bins)}")
        if any(b < 0 for b in self.bins):
            raise ValueError("bins must be non-negative")


def extract_basic(
    user: UserRecord, tweet_count_observed: int, snapshot_date: dt.date
) -> dict[str, float]:
    """Profile-level features; 12 named values.

    NT here is the profile's tweet counter, not the loaded-tweet count;
    ``tweet_count_observed`` is accepted so registry extensions can use
    it without an interface change.
    """
    if snapshot_date < user.register_date:
        raise ValueError("snapshot_date precedes register_date")
    ars = (snapshot_date - user.register_date).days
    nt, nfer, nfee = user.n_tweets, user.n_followers, user.n_followees
    return {
        "gender": _GENDER_CODE[user.gender],
        "log_account_age": _log(ars + 1),
        "log_tweet_count": _log(nt + 1),
        "log_tweet_rate": _log(nt / (ars + 1)),
        "log_follower_count": _log(nfer + 1),
        "log_followee_count": _log(nfee + 1),
        "tweets_per_follower": nt / (nfer + 1),
        "tweets_per_followee": nt / (nfee + 1),
        "allow_comments": 1.0 if user.allow_comments else 0.0,
        "allow_messages": 1.0 if user.allow_messages else 0.0,
        "allow_location": 1.0 if user.allow_location else 0.0,
        "description_length": float(len(user.description)),
    }


def _occurs(tweet: TweetRecord, kind: str) -> bool:
    if kind == "posting":
        return True
    if kind == "mentioning":
        return tweet.mention_count > 0
    return tweet.is_retweet


def interaction_profile(
    tweets: Sequence[TweetRecord], kind: str, granularity: str, lifetime_days: int
) -> InteractionProfile:
    """Occurrences per bin averaged over the observed lifetime.

    The divisor is the number of observed periods: lifetime_days for
    hour-of-day bins, lifetime_days/7 for day-of-week bins.
    """
    if lifetime_days < 1:
        raise ValueError(f"lifetime_days must be >= 1, got {lifetime_days}")
    n_bins = GRANULARITIES[granularity]
    periods = float(lifetime_days) if granularity == "hourly" else lifetime_days / 7.0
    counts = [0] * n_bins
    for t in tweets:
        if _occurs(t, kind):
            b = t.timestamp.hour if granularity == "hourly" else t.timestamp.weekday()
            counts[b] += 1
    return InteractionProfile(
        kind=kind, granularity=granularity, bins=tuple(c / periods for c in counts)
    )


def summarize_profile(profile: InteractionProfile) -> dict[str, float]:
    """Mean, argmax, max, argmin, population variance; ties take the smallest index."""
    bins = profile.bins
    n = len(bins)
    mean = math.fsum(bins) / n
    peak = max(range(n), key=lambda i: (bins[i], -i))
    trough = min(range(n), key=lambda i: (bins[i], i))
    var = math.fsum((b - mean) ** 2 for b in bins) / n
    prefix = f"{profile.kind}_{profile.granularity}"
    return {
        f"{prefix}_mean": mean,
        f"{prefix}_peak_bin": float(peak),
        f"{prefix}_peak_value": bins[peak],
        f"{prefix}_trough_bin": float(trough),
        f"{prefix}_variance": var,
    }


def interaction_rates(tweets: Sequence[TweetRecord]) -> tuple[float, float]:
    """(mention_rate, retweet_rate): fractions of tweets with mentions / retweets."""
    if not tweets:
        raise ValueError("need at least one tweet")
    n = len(tweets)
    mentions = sum(1 for t in tweets if t.mention_count > 0)
    retweets = sum(1 for t in tweets if t.is_retweet)
    return mentions / n, retweets / n


def _clean_text(text: str) -> str:
    """Strip links, retweet chains, and mention handles; lowercase Latin."""
    text = _URL_RE.sub(" ", text)
    text = _RETWEET_CHAIN_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    return _WS_RE.sub(" ", text).strip().lower()


def build_user_document(tweets: Sequence[TweetRecord]) -> str:
    """Single preprocessed document: cleaned tweet texts joined by spaces."""
    parts = [_clean_text(t.text) for t in tweets]
    return " ".join(p for p in parts if p)


def select_terms(documents: Sequence[str], lexicon: TermLexicon, k: int) -> tuple[str, ...]:
    """Top-k lexicon terms by corpus-summed tf-idf.

    tf is the non-overlapping substring count per document; idf is
    ln(N / (1 + df)). Ties resolve by lexicon order, so the selection is
    deterministic.
    """
    if not documents:
        raise ValueError("need at least one document")
    if not 0 < k <= len(lexicon):
        raise ValueError(f"k must be in [1, {len(lexicon)}], got {k}")
    n_docs = len(documents)
    scores: list[float] = []
    for term in lexicon.terms:
        tfs = [doc.count(term) for doc in documents]
        df = sum(1 for tf in tfs if tf > 0)
        idf = math.log(n_docs / (1 + df))
        scores.append(sum(tfs) * idf)
    order = sorted(range(len(lexicon)), key=lambda i: (-scores[i], i))
    return tuple(lexicon.terms[i] for i in order[:k])


def extract_linguistic(
    document: str, selected: Sequence[str], tweets: Sequence[TweetRecord]
) -> dict[str, float]:
    """Term-presence indicators plus average preprocessed tweet length."""
    if not selected:
        raise ValueError("selected terms must be non-empty")
    values = {f"term:{t}": (1.0 if t in document else 0.0) for t in selected}
    if tweets:
        values["avg_tweet_length"] = math.fsum(
            len(_clean_text(t.text)) for t in tweets
        ) / len(tweets)
    else:
        values["avg_tweet_length"] = 0.0
    return values


def standardize(matrix: np.ndarray) -> tuple[np.ndarray, list[tuple[float, float]]]:
    """Min-max scale each column into [0, 1]; constant columns map to 0.

    Returns the scaled matrix and the per-column (min, max) pairs for
    reuse at classification time.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1:
        raise ValueError("matrix must be 2-D with at least one row")
    lo = m.min(axis=0)
    hi = m.max(axis=0)
    span = hi - lo
    safe = np.where(span == 0, 1.0, span)
    out = (m - lo) / safe
    out[:, span == 0] = 0.0
    return out, [(float(a), float(b)) for a, b in zip(lo, hi)]


def apply_standardization(
    matrix: np.ndarray, bounds: Sequence[tuple[float, float]]
) -> np.ndarray:
    """Scale with stored (min, max) pairs, clipping new values into [0, 1]."""
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    if m.shape[1] != len(bounds):
        raise ValueError(f"matrix has {m.shape[1]} columns, bounds {len(bounds)}")
    lo = np.asarray([b[0] for b in bounds])
    hi = np.asarray([b[1] for b in bounds])
    span = hi - lo
    safe = np.where(span == 0, 1.0, span)
    out = (m - lo) / safe
    out[:, span == 0] = 0.0
    return np.clip(out, 0.0, 1.0)


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    family: str
    extractor: str

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")


@dataclass(frozen=True)
class FeatureRegistry:
    """Fixed name/order contract for feature vectors."""

    entries: tuple[RegistryEntry, ...]

    def __post_init__(self) -> None:
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("registry names must be unique")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    def to_json(self) -> list[list[str]]:
        return [[e.name, e.family, e.extractor] for e in self.entries]

    @staticmethod
    def from_json(data: Iterable[Sequence[str]]) -> "FeatureRegistry":
        return FeatureRegistry(
            entries=tuple(RegistryEntry(name=n, family=f, extractor=x) for n, f, x in data)
        )

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_json(), ensure_ascii=False, sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class FeatureVector:
    user_id: str
    values: tuple[float, ...]


_BASIC_NAMES = (
    "gender",
    "log_account_age",
    "log_tweet_count",
    "log_tweet_rate",
    "log_follower_count",
    "log_followee_count",
    "tweets_per_follower",
    "tweets_per_followee",
    "allow_comments",
    "allow_messages",
    "allow_location",
    "description_length",
)


def build_default_registry(selected_terms: Sequence[str]) -> FeatureRegistry:
    """The shipped 130-slot registry for 84 selected terms.

    12 basic + 1 reserved constant-zero slot + 30 profile summaries +
    2 interaction rates + 84 term indicators + average tweet length.
    """
    entries: list[RegistryEntry] = [
        RegistryEntry(name=n, family="basic", extractor=n) for n in _BASIC_NAMES
    ]
    entries.append(RegistryEntry(name="reserved", family="basic", extractor="constant_zero"))
    for kind in INTERACTION_KINDS:
        for gran in GRANULARITIES:
            for summary in _SUMMARIES:
                name = f"{kind}_{gran}_{summary}"
                entries.append(RegistryEntry(name=name, family="interactive", extractor=name))
    entries.append(RegistryEntry(name="mention_rate", family="interactive", extractor="mention_rate"))
    entries.append(RegistryEntry(name="retweet_rate", family="interactive", extractor="retweet_rate"))
    for term in selected_terms:
        name = f"term:{term}"
        entries.append(RegistryEntry(name=name, family="linguistic", extractor=name))
    entries.append(
        RegistryEntry(name="avg_tweet_length", family="linguistic", extractor="avg_tweet_length")
    )
    return FeatureRegistry(entries=tuple(entries))


def assemble(
    user: UserRecord,
    tweets: Sequence[TweetRecord],
    registry: FeatureRegistry,
    selected_terms: Sequence[str],
    snapshot_date: dt.date,
) -> FeatureVector:
    """One raw (unstandardized) value per registry entry, in registry order."""
    values: dict[str, float] = {"constant_zero": 0.0}
    values.update(extract_basic(user, len(tweets), snapshot_date))
    lifetime_days = max(1, (snapshot_date - user.register_date).days)
    for kind in INTERACTION_KINDS:
        for gran in GRANULARITIES:
            profile = interaction_profile(tweets, kind, gran, lifetime_days)
            values.update(summarize_profile(profile))
    mention_rate, retweet_rate = interaction_rates(tweets)
    values["mention_rate"] = mention_rate
    values["retweet_rate"] = retweet_rate
    document = build_user_document(tweets)
    values.update(extract_linguistic(document, selected_terms, tweets))
    try:
        ordered = tuple(values[e.extractor] for e in registry.entries)
    except KeyError as exc:
        raise ValueError(f"registry/extractor mismatch: no extractor {exc.args[0]!r}") from exc
    return FeatureVector(user_id=user.user_id, values=ordered)


def write_matrix(
    path: str | Path,
    names: Sequence[str],
    vectors: Sequence[FeatureVector],
    meta: Mapping[str, str] | None = None,
) -> None:
    """Tab-separated matrix: '#' meta lines, header row, one row per user."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key in sorted(meta or {}):
            fh.write(f"# {key}={meta[key]}\n")
        fh.write("\t".join(["user_id", *names]) + "\n")
        for v in vectors:
            if len(v.values) != len(names):
                raise ValueError(f"vector for {v.user_id} has {len(v.values)} values")
            fh.write("\t".join([v.user_id, *[repr(x) for x in v.values]]) + "\n")


def read_matrix(path: str | Path) -> tuple[dict[str, str], tuple[str, ...], list[FeatureVector]]:
    """Inverse of write_matrix: (meta, feature names, vectors)."""
    meta: dict[str, str] = {}
    names: tuple[str, ...] | None = None
    vectors: list[FeatureVector] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# "):
                key, _, value = line[2:].partition("=")
                meta[key] = value
                continue
            cells = line.split("\t")
            if names is None:
                if cells[0] != "user_id":
                    raise ValueError(f"{path}: expected header starting with user_id")
                names = tuple(cells[1:])
                continue
            if len(cells) != len(names) + 1:
                raise ValueError(f"{path}: row width {len(cells)} != {len(names) + 1}")
            vectors.append(
                FeatureVector(user_id=cells[0], values=tuple(float(x) for x in cells[1:]))
            )
    if names is None:
        raise ValueError(f"{path}: missing header")
    return meta, names, vectors
