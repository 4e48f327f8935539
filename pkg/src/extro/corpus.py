"""Canonical data model and loaders for archived user/tweet dumps.

Both input files are UTF-8 JSON Lines, one record per line. The exact
field-by-field layout is documented in docs/data-formats.md. All loaders
validate aggressively and report the offending line number and field,
since archival dumps routinely contain damage.

A built Corpus is immutable and safe to share across threads; loading
itself is a single sequential pass (line-parallel parsing would preserve
the same contracts but has not been needed at current corpus sizes).
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

__all__ = [
    "Gender",
    "UserRecord",
    "TweetRecord",
    "Corpus",
    "TweetLoadResult",
    "RecordError",
    "load_users",
    "load_tweets",
    "filter_active",
]

MAX_SCORE = 60.0

_GENDER_CODES = {"m": "male", "f": "female", "u": "unknown"}


class Gender:
    MALE = "male"
    FEMALE = "female"
    UNKNOWN = "unknown"


class RecordError(ValueError):
    """A malformed or invariant-violating record in an input file."""

    def __init__(self, path: str | Path, line_no: int, field_name: str, reason: str):
        self.path = str(path)
        self.line_no = line_no
        self.field = field_name
        super().__init__(f"{self.path}:{line_no}: field '{field_name}': {reason}")


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    gender: str
    register_date: dt.date
    n_tweets: int
    n_followers: int
    n_followees: int
    allow_comments: bool
    allow_messages: bool
    allow_location: bool
    description: str
    badges: frozenset[str]
    extraversion_score: float | None = None


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    user_id: str
    timestamp: dt.datetime
    text: str
    source: str
    is_retweet: bool
    mention_count: int
    geotag: tuple[float, float] | None = None  # (lat, lon)


@dataclass(frozen=True)
class TweetLoadResult:
    """Grouped tweets plus the count of tweets whose author is unknown."""

    by_user: Mapping[str, tuple[TweetRecord, ...]]
    orphan_count: int

    @property
    def total_grouped(self) -> int:
        return sum(len(ts) for ts in self.by_user.values())


@dataclass(frozen=True)
class Corpus:
    """Validated snapshot: users plus per-user timestamp-sorted tweets."""

    snapshot_date: dt.date
    users: tuple[UserRecord, ...]
    tweets: Mapping[str, tuple[TweetRecord, ...]]
    _index: Mapping[str, UserRecord] = field(repr=False, default_factory=dict)

    @staticmethod
    def build(
        snapshot_date: dt.date,
        users: Iterable[UserRecord],
        tweets: Mapping[str, Iterable[TweetRecord]],
    ) -> "Corpus":
        user_list = tuple(users)
        index: dict[str, UserRecord] = {}
        for u in user_list:
            if u.user_id in index:
                raise ValueError(f"duplicate user_id '{u.user_id}' in corpus")
            if u.register_date > snapshot_date:
                raise ValueError(
                    f"user '{u.user_id}' registered {u.register_date}, "
                    f"after snapshot {snapshot_date}"
                )
            index[u.user_id] = u
        grouped: dict[str, tuple[TweetRecord, ...]] = {}
        for uid, ts in tweets.items():
            if uid not in index:
                raise ValueError(f"tweets reference unknown user_id '{uid}'")
            ordered = tuple(sorted(ts, key=lambda t: (t.timestamp, t.tweet_id)))
            if ordered:
                grouped[uid] = ordered
        return Corpus(snapshot_date=snapshot_date, users=user_list, tweets=grouped, _index=index)

    def user(self, user_id: str) -> UserRecord:
        return self._index[user_id]

    def tweets_of(self, user_id: str) -> tuple[TweetRecord, ...]:
        return self.tweets.get(user_id, ())

    @property
    def n_tweets_loaded(self) -> int:
        return sum(len(ts) for ts in self.tweets.values())


def _require(obj: dict, key: str, path, line_no: int):
    if key not in obj:
        raise RecordError(path, line_no, key, "missing")
    return obj[key]


def _as_bool(value, key: str, path, line_no: int) -> bool:
    if not isinstance(value, bool):
        raise RecordError(path, line_no, key, f"expected boolean, got {value!r}")
    return value


def _as_count(value, key: str, path, line_no: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise RecordError(path, line_no, key, f"expected non-negative integer, got {value!r}")
    return value


def _parse_user_line(obj: dict, path, line_no: int) -> UserRecord:
    user_id = _require(obj, "user_id", path, line_no)
    if not isinstance(user_id, str) or not user_id:
        raise RecordError(path, line_no, "user_id", f"expected non-empty string, got {user_id!r}")

    gender_code = _require(obj, "gender", path, line_no)
    if gender_code not in _GENDER_CODES:
        raise RecordError(path, line_no, "gender", f"expected one of m/f/u, got {gender_code!r}")

    raw_date = _require(obj, "register_date", path, line_no)
    try:
        register_date = dt.date.fromisoformat(raw_date)
    except (TypeError, ValueError):
        raise RecordError(path, line_no, "register_date", f"not a YYYY-MM-DD date: {raw_date!r}")

    description = obj.get("description", "")
    if not isinstance(description, str):
        raise RecordError(path, line_no, "description", f"expected string, got {description!r}")

    badges_raw = obj.get("badges", [])
    if not isinstance(badges_raw, list) or not all(isinstance(b, str) for b in badges_raw):
        raise RecordError(path, line_no, "badges", f"expected array of strings, got {badges_raw!r}")

    score = obj.get("extraversion_score")
    if score is not None:
        if not isinstance(score, (int, float)) or isinstance(score, bool):
            raise RecordError(path, line_no, "extraversion_score", f"expected number, got {score!r}")
        if not 0.0 <= float(score) <= MAX_SCORE:
            raise RecordError(
                path, line_no, "extraversion_score", f"{score} outside [0, {MAX_SCORE:g}]"
            )
        score = float(score)

    return UserRecord(
        user_id=user_id,
        gender=_GENDER_CODES[gender_code],
        register_date=register_date,
        n_tweets=_as_count(_require(obj, "n_tweets", path, line_no), "n_tweets", path, line_no),
        n_followers=_as_count(
            _require(obj, "n_followers", path, line_no), "n_followers", path, line_no
        ),
        n_followees=_as_count(
            _require(obj, "n_followees", path, line_no), "n_followees", path, line_no
        ),
        allow_comments=_as_bool(
            _require(obj, "allow_comments", path, line_no), "allow_comments", path, line_no
        ),
        allow_messages=_as_bool(
            _require(obj, "allow_messages", path, line_no), "allow_messages", path, line_no
        ),
        allow_location=_as_bool(
            _require(obj, "allow_location", path, line_no), "allow_location", path, line_no
        ),
        description=description,
        badges=frozenset(badges_raw),
        extraversion_score=score,
    )


def _iter_json_lines(path: str | Path):
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordError(path, line_no, "<line>", f"invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise RecordError(path, line_no, "<line>", "record is not an object")
            yield line_no, obj


def load_users(path: str | Path) -> list[UserRecord]:
    """Load user records in file order, rejecting duplicates."""
    users: list[UserRecord] = []
    seen: dict[str, int] = {}
    for line_no, obj in _iter_json_lines(path):
        user = _parse_user_line(obj, path, line_no)
        if user.user_id in seen:
            raise RecordError(
                path, line_no, "user_id",
                f"duplicate '{user.user_id}' (first seen on line {seen[user.user_id]})",
            )
        seen[user.user_id] = line_no
        users.append(user)
    return users


def _parse_tweet_line(obj: dict, path, line_no: int) -> TweetRecord:
    tweet_id = _require(obj, "tweet_id", path, line_no)
    if not isinstance(tweet_id, str) or not tweet_id:
        raise RecordError(path, line_no, "tweet_id", f"expected non-empty string, got {tweet_id!r}")
    user_id = _require(obj, "user_id", path, line_no)
    if not isinstance(user_id, str) or not user_id:
        raise RecordError(path, line_no, "user_id", f"expected non-empty string, got {user_id!r}")

    raw_ts = _require(obj, "timestamp", path, line_no)
    try:
        timestamp = dt.datetime.fromisoformat(raw_ts)
    except (TypeError, ValueError):
        raise RecordError(
            path, line_no, "timestamp", f"not a YYYY-MM-DDThh:mm:ss datetime: {raw_ts!r}"
        )
    if timestamp.tzinfo is not None:
        raise RecordError(path, line_no, "timestamp", "must be naive local wall-clock time")

    text = _require(obj, "text", path, line_no)
    if not isinstance(text, str):
        raise RecordError(path, line_no, "text", f"expected string, got {text!r}")
    source = obj.get("source", "")
    if not isinstance(source, str):
        raise RecordError(path, line_no, "source", f"expected string, got {source!r}")

    geotag = None
    has_lat, has_lon = "lat" in obj, "lon" in obj
    if has_lat != has_lon:
        raise RecordError(path, line_no, "lat" if has_lon else "lon", "lat/lon must come together")
    if has_lat:
        lat, lon = obj["lat"], obj["lon"]
        for key, val, bound in (("lat", lat, 90.0), ("lon", lon, 180.0)):
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise RecordError(path, line_no, key, f"expected number, got {val!r}")
            if not -bound <= float(val) <= bound:
                raise RecordError(path, line_no, key, f"{val} outside [-{bound:g}, {bound:g}]")
        geotag = (float(lat), float(lon))

    return TweetRecord(
        tweet_id=tweet_id,
        user_id=user_id,
        timestamp=timestamp,
        text=text,
        source=source,
        is_retweet=_as_bool(
            _require(obj, "is_retweet", path, line_no), "is_retweet", path, line_no
        ),
        mention_count=_as_count(
            _require(obj, "mention_count", path, line_no), "mention_count", path, line_no
        ),
        geotag=geotag,
    )


def load_tweets(path: str | Path, users: set[str]) -> TweetLoadResult:
    """Load tweets grouped by author, sorted by timestamp (ties by tweet_id).

    Tweets whose user_id is not in ``users`` are counted as orphans and
    excluded from the groups; archival dumps are commonly partial, so
    orphans are reported rather than fatal.
    """
    groups: dict[str, list[TweetRecord]] = {}
    orphans = 0
    for line_no, obj in _iter_json_lines(path):
        tweet = _parse_tweet_line(obj, path, line_no)
        if tweet.user_id not in users:
            orphans += 1
            continue
        groups.setdefault(tweet.user_id, []).append(tweet)
    by_user = {
        uid: tuple(sorted(ts, key=lambda t: (t.timestamp, t.tweet_id)))
        for uid, ts in groups.items()
    }
    return TweetLoadResult(by_user=by_user, orphan_count=orphans)


def filter_active(corpus: Corpus, min_tweets: int) -> Corpus:
    """Keep users with strictly more than ``min_tweets`` loaded tweets.

    Counts loaded tweets, not the profile's n_tweets counter: the
    downstream analyses run on what was actually loaded.
    """
    if min_tweets < 0:
        raise ValueError("min_tweets must be >= 0")
    kept = [u for u in corpus.users if len(corpus.tweets_of(u.user_id)) > min_tweets]
    kept_ids = {u.user_id for u in kept}
    return Corpus.build(
        corpus.snapshot_date,
        kept,
        {uid: ts for uid, ts in corpus.tweets.items() if uid in kept_ids},
    )
