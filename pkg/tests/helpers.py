"""Record factories and oracles shared across test modules."""

import datetime as dt
from fractions import Fraction

from extro.corpus import TweetRecord, UserRecord
from extro.models import ConfusionMatrix

# rows/cols ordered (-1, 0, 1): introverts fully correct, the neutral and
# extrovert classes each lose one sample to the other
HAND_CONFUSION = ConfusionMatrix(counts=((2, 0, 0), (0, 1, 1), (0, 1, 1)))


def macro_f1_rational(counts) -> Fraction:
    """Independent exact-arithmetic evaluation of the same definition."""
    total = Fraction(0)
    for i in range(3):
        tp = counts[i][i]
        fn = sum(counts[i]) - tp
        fp = sum(counts[r][i] for r in range(3)) - tp
        denom = 2 * tp + fp + fn
        total += Fraction(2 * tp, denom) if denom else Fraction(0)
    return total / 3


def make_user(
    user_id="u0",
    gender="male",
    register_date=dt.date(2011, 3, 1),
    n_tweets=120,
    n_followers=250,
    n_followees=80,
    allow_comments=True,
    allow_messages=True,
    allow_location=True,
    description="likes hiking",
    badges=(),
    extraversion_score=None,
):
    return UserRecord(
        user_id=user_id,
        gender=gender,
        register_date=register_date,
        n_tweets=n_tweets,
        n_followers=n_followers,
        n_followees=n_followees,
        allow_comments=allow_comments,
        allow_messages=allow_messages,
        allow_location=allow_location,
        description=description,
        badges=frozenset(badges),
        extraversion_score=extraversion_score,
    )


def make_tweet(
    tweet_id="t0",
    user_id="u0",
    timestamp=dt.datetime(2012, 5, 1, 12, 0),
    text="hello world",
    source="web",
    is_retweet=False,
    mention_count=0,
    geotag=None,
):
    return TweetRecord(
        tweet_id=tweet_id,
        user_id=user_id,
        timestamp=timestamp,
        text=text,
        source=source,
        is_retweet=is_retweet,
        mention_count=mention_count,
        geotag=geotag,
    )
