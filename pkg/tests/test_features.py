"""Feature extraction, term selection, standardization, and the registry."""

import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from extro.features import (
    GRANULARITIES,
    LOG_FLOOR,
    TermLexicon,
    apply_standardization,
    assemble,
    build_default_registry,
    build_user_document,
    extract_basic,
    extract_linguistic,
    interaction_profile,
    interaction_rates,
    load_term_lexicon,
    read_matrix,
    select_terms,
    standardize,
    summarize_profile,
    write_matrix,
)
from extro.features import FeatureVector
from helpers import make_tweet, make_user

SNAPSHOT = dt.date(2012, 7, 1)


class TestBasicFeatures:
    def test_log_formulas_hand_checked(self):
        u = make_user(
            gender="female",
            register_date=dt.date(2012, 6, 21),  # 10 days before snapshot
            n_tweets=99,
            n_followers=9,
            n_followees=4,
            description="abcde",
        )
        got = extract_basic(u, tweet_count_observed=50, snapshot_date=SNAPSHOT)
        assert got["gender"] == 0.0
        assert got["log_account_age"] == pytest.approx(math.log(11))
        assert got["log_tweet_count"] == pytest.approx(math.log(100))
        assert got["log_tweet_rate"] == pytest.approx(math.log(99 / 11))
        assert got["log_follower_count"] == pytest.approx(math.log(10))
        assert got["log_followee_count"] == pytest.approx(math.log(5))
        assert got["tweets_per_follower"] == pytest.approx(9.9)
        assert got["tweets_per_followee"] == pytest.approx(19.8)
        assert got["description_length"] == 5.0

    def test_zero_counts_hit_log_floor(self):
        u = make_user(register_date=SNAPSHOT, n_tweets=0, n_followers=0, n_followees=0)
        got = extract_basic(u, 0, SNAPSHOT)
        assert got["log_tweet_rate"] == pytest.approx(math.log(LOG_FLOOR))
        # +1 smoothing keeps the count logs finite without the floor
        assert got["log_tweet_count"] == 0.0
        assert got["log_account_age"] == 0.0

    def test_gender_codes(self):
        for gender, code in (("male", 1.0), ("female", 0.0), ("unknown", 0.5)):
            assert extract_basic(make_user(gender=gender), 1, SNAPSHOT)["gender"] == code

    def test_snapshot_before_registration_rejected(self):
        u = make_user(register_date=dt.date(2013, 1, 1))
        with pytest.raises(ValueError):
            extract_basic(u, 1, SNAPSHOT)


class TestInteractionProfiles:
    def test_hourly_bins_divide_by_lifetime_days(self):
        tweets = [
            make_tweet(tweet_id="a", timestamp=dt.datetime(2012, 5, 1, 9, 5)),
            make_tweet(tweet_id="b", timestamp=dt.datetime(2012, 5, 2, 9, 40)),
            make_tweet(tweet_id="c", timestamp=dt.datetime(2012, 5, 3, 23, 0)),
        ]
        p = interaction_profile(tweets, "posting", "hourly", lifetime_days=10)
        assert len(p.bins) == 24
        assert p.bins[9] == pytest.approx(0.2)
        assert p.bins[23] == pytest.approx(0.1)
        assert p.bins[0] == 0.0

    def test_weekly_bins_divide_by_weeks(self):
        tweets = [make_tweet(timestamp=dt.datetime(2012, 5, 7, 12, 0))]  # a Monday
        p = interaction_profile(tweets, "posting", "weekly", lifetime_days=14)
        assert len(p.bins) == 7
        assert p.bins[0] == pytest.approx(0.5)

    def test_kind_filters(self):
        tweets = [
            make_tweet(tweet_id="a", mention_count=2),
            make_tweet(tweet_id="b", is_retweet=True),
            make_tweet(tweet_id="c"),
        ]
        hour = tweets[0].timestamp.hour
        assert interaction_profile(tweets, "posting", "hourly", 1).bins[hour] == 3.0
        assert interaction_profile(tweets, "mentioning", "hourly", 1).bins[hour] == 1.0
        assert interaction_profile(tweets, "retweeting", "hourly", 1).bins[hour] == 1.0

    def test_lifetime_must_be_positive(self):
        with pytest.raises(ValueError):
            interaction_profile([], "posting", "hourly", 0)

    def test_summaries_with_tie_break(self):
        p = interaction_profile([], "posting", "weekly", 7)
        p = type(p)(kind="posting", granularity="weekly", bins=(0.0, 2.0, 2.0, 0.0, 1.0, 0.0, 2.0))
        s = summarize_profile(p)
        assert s["posting_weekly_peak_bin"] == 1.0  # first of the tied maxima
        assert s["posting_weekly_trough_bin"] == 0.0
        assert s["posting_weekly_peak_value"] == 2.0
        assert s["posting_weekly_mean"] == pytest.approx(1.0)
        assert s["posting_weekly_variance"] == pytest.approx(
            sum((b - 1.0) ** 2 for b in p.bins) / 7
        )

    def test_rates(self):
        tweets = [
            make_tweet(tweet_id="a", mention_count=1, is_retweet=True),
            make_tweet(tweet_id="b"),
            make_tweet(tweet_id="c", mention_count=3),
            make_tweet(tweet_id="d"),
        ]
        assert interaction_rates(tweets) == (0.5, 0.25)
        with pytest.raises(ValueError):
            interaction_rates([])


class TestDocuments:
    def test_cleaning_strips_noise(self):
        tweets = [
            make_tweet(text="Check http://t.cn/abc THIS out"),
            make_tweet(text="reply //@Some_User: great point"),
            make_tweet(text="ping @friend ok"),
        ]
        doc = build_user_document(tweets)
        assert "http" not in doc and "@" not in doc
        assert doc == "check this out reply great point ping ok"

    def test_select_terms_scoring(self):
        # "party" 3x in one of two docs: idf = ln(2/2) = 0, score 0.
        # "book" once in each: idf = ln(2/3) < 0, score negative.
        # "quiet" absent: tf 0, score 0; loses the tie to "party" by order.
        lex = TermLexicon(terms=("party", "quiet", "book"))
        docs = ["party party party book", "book"]
        assert select_terms(docs, lex, 3) == ("party", "quiet", "book")
        assert select_terms(docs, lex, 1) == ("party",)

    def test_select_terms_prefers_rare_heavy_terms(self):
        lex = TermLexicon(terms=("common", "rare"))
        docs = ["common rare rare", "common", "common", "common"]
        ranked = select_terms(docs, lex, 2)
        assert ranked[0] == "rare"

    def test_select_terms_k_bounds(self):
        lex = TermLexicon(terms=("a", "b"))
        with pytest.raises(ValueError):
            select_terms(["a"], lex, 3)
        with pytest.raises(ValueError):
            select_terms([], lex, 1)

    def test_linguistic_presence_and_length(self):
        tweets = [make_tweet(text="AB cd"), make_tweet(text="e")]
        doc = build_user_document(tweets)
        got = extract_linguistic(doc, ["ab", "zz"], tweets)
        assert got["term:ab"] == 1.0
        assert got["term:zz"] == 0.0
        assert got["avg_tweet_length"] == pytest.approx(3.0)

    def test_lexicon_loader(self, tmp_path):
        p = tmp_path / "terms.txt"
        p.write_text("# comment\nParty\n\nbook\n", encoding="utf-8")
        assert load_term_lexicon(p).terms == ("party", "book")
        p.write_text("dup\ndup\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_term_lexicon(p)


finite_matrix = hnp.arrays(
    dtype=np.float64,
    shape=st.tuples(st.integers(1, 8), st.integers(1, 6)),
    elements=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, width=32),
)


class TestStandardization:
    @settings(max_examples=200, deadline=None)
    @given(m=finite_matrix)
    def test_minmax_contract(self, m):
        out, bounds = standardize(m)
        assert out.min() >= 0.0 and out.max() <= 1.0
        for j in range(m.shape[1]):
            col = m[:, j]
            if col.min() == col.max():
                assert (out[:, j] == 0.0).all()
            else:
                assert out[:, j].min() == 0.0
                assert out[:, j].max() == 1.0
            assert bounds[j] == (col.min(), col.max())

    def test_apply_matches_fit_and_clips(self):
        m = np.array([[0.0, 5.0], [10.0, 5.0], [5.0, 5.0]])
        out, bounds = standardize(m)
        again = apply_standardization(m, bounds)
        assert np.array_equal(out, again)
        clipped = apply_standardization(np.array([[20.0, 9.0]]), bounds)
        assert clipped[0, 0] == 1.0
        assert clipped[0, 1] == 0.0  # constant column stays pinned at 0

    def test_shape_errors(self):
        with pytest.raises(ValueError):
            standardize(np.zeros((0, 3)))
        with pytest.raises(ValueError):
            apply_standardization(np.zeros((2, 3)), [(0.0, 1.0)] * 2)


class TestRegistry:
    def test_default_registry_is_130_wide(self):
        terms = tuple(f"w{i}" for i in range(84))
        reg = build_default_registry(terms)
        assert len(reg.entries) == 130
        families = [e.family for e in reg.entries]
        assert families.count("basic") == 13  # 12 named + 1 reserved slot
        assert families.count("interactive") == 32
        assert families.count("linguistic") == 85

    def test_fingerprint_tracks_layout(self):
        a = build_default_registry(tuple(f"w{i}" for i in range(84)))
        b = build_default_registry(tuple(f"v{i}" for i in range(84)))
        assert a.fingerprint() != b.fingerprint()
        assert a.fingerprint() == build_default_registry(
            tuple(f"w{i}" for i in range(84))
        ).fingerprint()

    def test_json_round_trip(self):
        reg = build_default_registry(("alpha", "beta"))
        clone = type(reg).from_json(reg.to_json())
        assert clone == reg

    def test_assemble_orders_values_by_registry(self):
        terms = ("hiking",)
        reg = build_default_registry(terms)
        user = make_user(description="hiking fan")
        tweets = [make_tweet(text="went hiking", mention_count=1)]
        vec = assemble(user, tweets, reg, terms, SNAPSHOT)
        assert len(vec.values) == len(reg.entries)
        names = [e.name for e in reg.entries]
        assert vec.values[names.index("reserved")] == 0.0
        assert vec.values[names.index("term:hiking")] == 1.0
        assert vec.values[names.index("mention_rate")] == 1.0


class TestMatrixIO:
    def test_round_trip_preserves_floats_exactly(self, tmp_path):
        path = tmp_path / "m.tsv"
        vectors = [
            FeatureVector(user_id="u1", values=(0.1, 2.0 / 3.0)),
            FeatureVector(user_id="u2", values=(1e-17, 39.03)),
        ]
        write_matrix(path, ["a", "b"], vectors, meta={"seed": "7"})
        meta, names, got = read_matrix(path)
        assert meta["seed"] == "7"
        assert names == ("a", "b")
        assert got == vectors
