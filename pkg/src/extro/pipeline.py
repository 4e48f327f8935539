"""Staged, file-based orchestration of the full workflow.

Stages (ingest, features, label, cv, train, classify, analyze, report)
communicate only through documented files under one output directory,
so each stage can be re-run independently from persisted intermediates
and verified on its own. Every output embeds the config seed and a
sha256 fingerprint of the input files; given identical config and
inputs, every stage is byte-deterministic.

Failures are wrapped in PipelineError carrying the stage name; partial
runs are recorded in pipeline_status.json with incomplete=true.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import assets
from .analytics import (
    CITY_BUCKETS,
    SHARING_CHANNELS,
    IndexDistribution,
    anova_oneway,
    anova_table,
    badge_shares,
    city_count_histogram,
    count_cities,
    emotion_indices,
    hourly_distribution,
    interaction_correlations,
    interval_stats,
    load_buying_keywords,
    load_source_map,
    period_shares,
    poi_shares,
    pooled_interval_stats,
    purchasing_index,
    sharing_shares,
    welch_t,
)
from .corpus import Corpus, Gender, TweetRecord, UserRecord, filter_active, load_tweets, load_users
from .emotion import EMOTION_CATEGORIES, load_emotion_lexicon
from .features import (
    FeatureRegistry,
    FeatureVector,
    assemble,
    build_default_registry,
    build_user_document,
    load_term_lexicon,
    read_matrix,
    select_terms,
    standardize,
    write_matrix,
)
from .geo import DEFAULT_POI_MAX_KM, POI_CATEGORIES, load_gazetteer, load_poi_index
from .labeling import fit_score_model, label_score
from .models import (
    MODEL_KINDS,
    Hyperparameters,
    LabeledSample,
    classify_batch,
    cross_validate,
    load_model,
    save_model,
    train,
)

__all__ = [
    "FACETS",
    "PERIOD_LABELS",
    "PipelineConfig",
    "PipelineError",
    "artifact_paths",
    "run_ingest",
    "run_features",
    "run_label",
    "run_cv",
    "run_train",
    "run_classify",
    "run_analyze",
    "run_report",
    "run_pipeline",
]

FACETS = (
    "hourly",
    "periods",
    "intervals",
    "cities",
    "poi",
    "sharing",
    "purchasing",
    "emotion",
    "badges",
)
PERIOD_LABELS = ("early_morning", "daytime", "night")
_COHORTS = ("extrovert", "introvert")
_LABEL_OF_COHORT = {"extrovert": 1, "introvert": -1}
_GENDER_CODE = {Gender.MALE: "m", Gender.FEMALE: "f", Gender.UNKNOWN: "u"}


class PipelineError(RuntimeError):
    """A stage failed; message carries the stage tag for diagnostics."""

    def __init__(self, stage: str, cause: BaseException | str):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage


@dataclass(frozen=True)
class PipelineConfig:
    users_path: str
    tweets_path: str
    out_dir: str
    snapshot_date: str | None = None  # ISO date; None: day after the last tweet
    seed: int = 7
    min_tweets: int = 100  # keep users with strictly more loaded tweets
    n_terms: int = 84
    model_kind: str = "svm-rbf"
    cv_folds: int = 10
    interval_cap_hours: float = 24.0
    poi_max_km: float = DEFAULT_POI_MAX_KM
    badge: str = "Binding-Taobao"
    correlation_threshold: float = 0.13
    gazetteer_path: str | None = None
    poi_path: str | None = None
    term_lexicon_path: str | None = None  # None: packaged default asset
    buying_keywords_path: str | None = None
    emotion_lexicon_path: str | None = None
    source_map_path: str | None = None
    hyperparameters: Hyperparameters = field(default_factory=Hyperparameters)

    def __post_init__(self) -> None:
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(f"model_kind must be one of {MODEL_KINDS}")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be >= 2")
        if self.min_tweets < 0:
            raise ValueError("min_tweets must be >= 0")
        if self.n_terms < 1:
            raise ValueError("n_terms must be >= 1")
        if self.snapshot_date is not None:
            dt.date.fromisoformat(self.snapshot_date)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["hyperparameters"] = self.hyperparameters.to_dict()
        return d


def artifact_paths(out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    paths = {
        "ingest": out / "ingest.json",
        "corpus_users": out / "corpus_users.jsonl",
        "corpus_tweets": out / "corpus_tweets.jsonl",
        "features_raw": out / "features_raw.tsv",
        "features_std": out / "features_std.tsv",
        "standardization": out / "standardization.json",
        "registry": out / "registry.json",
        "labels": out / "labels.tsv",
        "score_model": out / "score_model.json",
        "cv_report": out / "cv_report.json",
        "correlations": out / "correlations.json",
        "model": out / "model.json",
        "cohort_labels": out / "cohort_labels.tsv",
        "status": out / "pipeline_status.json",
        "report_dir": out / "report",
    }
    for facet in FACETS:
        paths[f"analysis_{facet}"] = out / "analysis" / f"{facet}.json"
    return paths


# --------------------------------------------------------------------------
# shared plumbing


def _input_fingerprint(cfg: PipelineConfig) -> str:
    """sha256 over all configured input files (name + content)."""
    h = hashlib.sha256()
    for p in (
        cfg.users_path,
        cfg.tweets_path,
        cfg.gazetteer_path,
        cfg.poi_path,
        cfg.term_lexicon_path,
        cfg.buying_keywords_path,
        cfg.emotion_lexicon_path,
        cfg.source_map_path,
    ):
        if p is None:
            continue
        path = Path(p)
        h.update(path.name.encode("utf-8"))
        h.update(b"\x00")
        h.update(hashlib.sha256(path.read_bytes()).digest())
    return h.hexdigest()


def _meta(cfg: PipelineConfig) -> dict:
    return {"seed": cfg.seed, "input_fingerprint": _input_fingerprint(cfg)}


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def _read_json(path: Path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _staged(stage: str, fn: Callable, *args):
    try:
        return fn(*args)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(stage, exc) from exc


def _user_obj(u: UserRecord) -> dict:
    obj = {
        "user_id": u.user_id,
        "gender": _GENDER_CODE[u.gender],
        "register_date": u.register_date.isoformat(),
        "n_tweets": u.n_tweets,
        "n_followers": u.n_followers,
        "n_followees": u.n_followees,
        "allow_comments": u.allow_comments,
        "allow_messages": u.allow_messages,
        "allow_location": u.allow_location,
        "description": u.description,
        "badges": sorted(u.badges),
    }
    if u.extraversion_score is not None:
        obj["extraversion_score"] = u.extraversion_score
    return obj


def _tweet_obj(t: TweetRecord) -> dict:
    obj = {
        "tweet_id": t.tweet_id,
        "user_id": t.user_id,
        "timestamp": t.timestamp.isoformat(),
        "text": t.text,
        "source": t.source,
        "is_retweet": t.is_retweet,
        "mention_count": t.mention_count,
    }
    if t.geotag is not None:
        obj["lat"], obj["lon"] = t.geotag
    return obj


def _load_canonical_corpus(cfg: PipelineConfig) -> Corpus:
    """Rebuild the Corpus from the ingest stage's canonical files."""
    paths = artifact_paths(cfg.out_dir)
    info = _read_json(paths["ingest"])
    users = load_users(paths["corpus_users"])
    loaded = load_tweets(paths["corpus_tweets"], {u.user_id for u in users})
    return Corpus.build(
        snapshot_date=dt.date.fromisoformat(info["snapshot_date"]),
        users=users,
        tweets=loaded.by_user,
    )


def _tsv_meta_lines(cfg: PipelineConfig) -> dict[str, str]:
    m = _meta(cfg)
    return {"seed": str(m["seed"]), "input_fingerprint": m["input_fingerprint"]}


# --------------------------------------------------------------------------
# ingest


def run_ingest(cfg: PipelineConfig) -> dict[str, Path]:
    """Load, validate, and filter the corpus; write canonical copies."""

    def body():
        paths = artifact_paths(cfg.out_dir)
        Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
        users = load_users(cfg.users_path)
        loaded = load_tweets(cfg.tweets_path, {u.user_id for u in users})
        if cfg.snapshot_date is not None:
            snapshot = dt.date.fromisoformat(cfg.snapshot_date)
        else:
            last = max(
                (t.timestamp for ts in loaded.by_user.values() for t in ts),
                default=None,
            )
            if last is None:
                raise ValueError("no tweets loaded and no snapshot_date configured")
            snapshot = last.date() + dt.timedelta(days=1)
        full = Corpus.build(snapshot_date=snapshot, users=users, tweets=loaded.by_user)
        active = filter_active(full, cfg.min_tweets)
        with open(paths["corpus_users"], "w", encoding="utf-8", newline="\n") as fh:
            for u in sorted(active.users, key=lambda u: u.user_id):
                fh.write(json.dumps(_user_obj(u), ensure_ascii=False, sort_keys=True) + "\n")
        with open(paths["corpus_tweets"], "w", encoding="utf-8", newline="\n") as fh:
            for uid in sorted(active.tweets):
                for t in active.tweets[uid]:
                    fh.write(json.dumps(_tweet_obj(t), ensure_ascii=False, sort_keys=True) + "\n")
        _write_json(
            paths["ingest"],
            {
                "meta": _meta(cfg),
                "snapshot_date": snapshot.isoformat(),
                "min_tweets": cfg.min_tweets,
                "n_users_loaded": len(users),
                "n_users_active": len(active.users),
                "n_tweets_loaded": loaded.total_grouped,
                "n_tweets_active": active.n_tweets_loaded,
                "n_orphan_tweets": loaded.orphan_count,
            },
        )
        return paths

    return _staged("ingest", body)


# --------------------------------------------------------------------------
# features


def run_features(cfg: PipelineConfig) -> dict[str, Path]:
    """Select terms, build the registry, and write raw + standardized matrices."""

    def body():
        paths = artifact_paths(cfg.out_dir)
        corpus = _load_canonical_corpus(cfg)
        if not corpus.users:
            raise ValueError("no active users; nothing to featurize")
        users = sorted(corpus.users, key=lambda u: u.user_id)
        lexicon = load_term_lexicon(cfg.term_lexicon_path or assets.asset_path("personality_terms.txt"))
        documents = [build_user_document(corpus.tweets_of(u.user_id)) for u in users]
        selected = select_terms(documents, lexicon, cfg.n_terms)
        registry = build_default_registry(selected)
        vectors = [
            assemble(u, corpus.tweets_of(u.user_id), registry, selected, corpus.snapshot_date)
            for u in users
        ]
        meta_lines = _tsv_meta_lines(cfg)
        meta_lines["registry_fingerprint"] = registry.fingerprint()
        write_matrix(paths["features_raw"], registry.names, vectors, meta_lines)
        matrix = np.array([v.values for v in vectors], dtype=float)
        scaled, bounds = standardize(matrix)
        std_vectors = [
            FeatureVector(user_id=v.user_id, values=tuple(float(x) for x in row))
            for v, row in zip(vectors, scaled)
        ]
        write_matrix(paths["features_std"], registry.names, std_vectors, meta_lines)
        _write_json(
            paths["standardization"],
            {"meta": _meta(cfg), "bounds": [[lo, hi] for lo, hi in bounds]},
        )
        _write_json(
            paths["registry"],
            {
                "meta": _meta(cfg),
                "selected_terms": list(selected),
                "registry": registry.to_json(),
                "fingerprint": registry.fingerprint(),
            },
        )
        return paths

    return _staged("features", body)


# --------------------------------------------------------------------------
# label


def run_label(cfg: PipelineConfig) -> dict[str, Path]:
    """Fit the score distribution on self-reports and label scored users."""

    def body():
        paths = artifact_paths(cfg.out_dir)
        corpus = _load_canonical_corpus(cfg)
        scored = [
            u for u in sorted(corpus.users, key=lambda u: u.user_id)
            if u.extraversion_score is not None
        ]
        if len(scored) < 2:
            raise ValueError("need at least 2 self-report scores to fit the labeler")
        model = fit_score_model([u.extraversion_score for u in scored])
        _write_json(
            paths["score_model"],
            {
                "meta": _meta(cfg),
                "mu": model.mu,
                "sigma": model.sigma,
                "lower": model.lower,
                "upper": model.upper,
                "n_scored": len(scored),
            },
        )
        with open(paths["labels"], "w", encoding="utf-8", newline="\n") as fh:
            for key, value in sorted(_tsv_meta_lines(cfg).items()):
                fh.write(f"# {key}={value}\n")
            fh.write("user_id\tscore\tlabel\n")
            for u in scored:
                label = label_score(u.extraversion_score, model)
                fh.write(f"{u.user_id}\t{u.extraversion_score!r}\t{label}\n")
        return paths

    return _staged("label", body)


def _read_labels(path: Path) -> dict[str, tuple[float, int]]:
    out: dict[str, tuple[float, int]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#") or line.startswith("user_id\t"):
                continue
            uid, score, label = line.split("\t")
            out[uid] = (float(score), int(label))
    return out


def _training_samples(cfg: PipelineConfig) -> tuple[list[LabeledSample], str]:
    """Standardized vectors of the self-report users, with the registry print."""
    paths = artifact_paths(cfg.out_dir)
    meta, _, vectors = read_matrix(paths["features_std"])
    labels = _read_labels(paths["labels"])
    samples = [
        LabeledSample(features=v, label=labels[v.user_id][1])
        for v in vectors
        if v.user_id in labels
    ]
    if not samples:
        raise ValueError("no labeled users intersect the feature matrix")
    return samples, meta.get("registry_fingerprint", "")


# --------------------------------------------------------------------------
# cv


def run_cv(cfg: PipelineConfig) -> dict[str, Path]:
    """Cross-validate all model kinds; correlate interaction features."""

    def body():
        paths = artifact_paths(cfg.out_dir)
        samples, _ = _training_samples(cfg)
        reports = {
            kind: cross_validate(
                kind, samples, k=cfg.cv_folds, seed=cfg.seed,
                hyperparameters=cfg.hyperparameters,
            ).to_dict()
            for kind in MODEL_KINDS
        }
        _write_json(paths["cv_report"], {"meta": _meta(cfg), "reports": reports})

        # Table-4 analog: raw interaction features vs self-report scores,
        # training set only (classifier output would be circular here)
        registry = FeatureRegistry.from_json(_read_json(paths["registry"])["registry"])
        _, names, raw_vectors = read_matrix(paths["features_raw"])
        labels = _read_labels(paths["labels"])
        rows = [v for v in raw_vectors if v.user_id in labels]
        scores = [labels[v.user_id][0] for v in rows]
        interactive = [
            i for i, e in enumerate(registry.entries) if e.family == "interactive"
        ]
        columns = {names[i]: [v.values[i] for v in rows] for i in interactive}
        report = interaction_correlations(columns, scores, cfg.correlation_threshold)
        _write_json(paths["correlations"], {"meta": _meta(cfg), **report.to_dict()})
        return paths

    return _staged("cv", body)


# --------------------------------------------------------------------------
# train / classify


def run_train(cfg: PipelineConfig) -> dict[str, Path]:
    """Fit the configured model kind on every labeled user."""

    def body():
        paths = artifact_paths(cfg.out_dir)
        samples, fingerprint = _training_samples(cfg)
        bounds = [
            (float(lo), float(hi))
            for lo, hi in _read_json(paths["standardization"])["bounds"]
        ]
        model = train(
            cfg.model_kind,
            samples,
            hyperparameters=cfg.hyperparameters,
            seed=cfg.seed,
            registry_fingerprint=fingerprint,
            bounds=bounds,
        )
        save_model(model, paths["model"])
        return paths

    return _staged("train", body)


def run_classify(cfg: PipelineConfig) -> dict[str, Path]:
    """Label the whole corpus: self-reports as-is, the rest by the model."""

    def body():
        paths = artifact_paths(cfg.out_dir)
        model = load_model(paths["model"])
        # the model stores standardization bounds, so raw features go in
        meta, _, raw_vectors = read_matrix(paths["features_raw"])
        predicted = classify_batch(
            model, raw_vectors, meta.get("registry_fingerprint") or None
        )
        labels = _read_labels(paths["labels"])
        with open(paths["cohort_labels"], "w", encoding="utf-8", newline="\n") as fh:
            for key, value in sorted(_tsv_meta_lines(cfg).items()):
                fh.write(f"# {key}={value}\n")
            fh.write("user_id\tlabel\tsource\tscore\n")
            for v, pred in zip(raw_vectors, predicted):
                if v.user_id in labels:
                    score, label = labels[v.user_id]
                    fh.write(f"{v.user_id}\t{label}\tself-report\t{score!r}\n")
                else:
                    fh.write(f"{v.user_id}\t{pred}\tpredicted\t\n")
        return paths

    return _staged("classify", body)


def _read_cohorts(path: Path) -> dict[str, list[str]]:
    """user_ids per cohort from cohort_labels.tsv (neutrals are not compared)."""
    cohorts: dict[str, list[str]] = {"extrovert": [], "introvert": []}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#") or line.startswith("user_id\t"):
                continue
            uid, label, _source, _score = line.split("\t")
            if int(label) == 1:
                cohorts["extrovert"].append(uid)
            elif int(label) == -1:
                cohorts["introvert"].append(uid)
    return cohorts


# --------------------------------------------------------------------------
# analyze


def _test_or_note(fn: Callable, *groups) -> dict:
    """TestResult dict, or an explanatory note when the test is undefined."""
    try:
        return fn(*groups).to_dict()
    except ValueError as exc:
        return {"skipped": str(exc)}


def _facet_hourly(corpus, cohorts, tweets_of, cfg):
    out = {}
    for cohort, uids in cohorts.items():
        pooled = [t for uid in uids for t in tweets_of(uid)]
        out[cohort] = {
            "n_users": len(uids),
            "n_tweets": len(pooled),
            "shares": list(hourly_distribution(pooled)),
        }
    return {"cohorts": out}


def _facet_periods(corpus, cohorts, tweets_of, cfg):
    per_user: dict[str, dict[str, list[float]]] = {}
    out = {}
    for cohort, uids in cohorts.items():
        shares = {uid: list(period_shares(tweets_of(uid))) for uid in uids if tweets_of(uid)}
        pooled = [t for uid in uids for t in tweets_of(uid)]
        out[cohort] = {
            "pooled_shares": list(period_shares(pooled)),
            "per_user": shares,
        }
        per_user[cohort] = shares
    tests = {}
    for i, period in enumerate(PERIOD_LABELS):
        a = [v[i] for v in per_user["extrovert"].values()]
        b = [v[i] for v in per_user["introvert"].values()]
        tests[period] = _test_or_note(anova_oneway, a, b)
    return {"cohorts": out, "tests": tests}


def _facet_intervals(corpus, cohorts, tweets_of, cfg):
    cap = cfg.interval_cap_hours
    out = {}
    per_user_means: dict[str, dict[str, list[float]]] = {}
    for cohort, uids in cohorts.items():
        groups = [tweets_of(uid) for uid in uids]
        capped_means: dict[str, float] = {}
        uncapped_means: dict[str, float] = {}
        skipped = 0
        for uid in uids:
            ts = tweets_of(uid)
            if len(ts) < 2:
                skipped += 1
                continue
            try:
                capped_means[uid] = interval_stats(ts, cap).mean_hours
            except ValueError:
                skipped += 1
                continue
            uncapped_means[uid] = interval_stats(ts).mean_hours
        out[cohort] = {
            "capped": pooled_interval_stats(groups, cap).to_dict(),
            "uncapped": pooled_interval_stats(groups).to_dict(),
            "per_user_capped_mean": capped_means,
            "per_user_uncapped_mean": uncapped_means,
            "n_users_skipped": skipped,
        }
        per_user_means[cohort] = [capped_means, uncapped_means]
    tests = {
        "capped_mean": _test_or_note(
            welch_t,
            list(per_user_means["extrovert"][0].values()),
            list(per_user_means["introvert"][0].values()),
        ),
        "uncapped_mean": _test_or_note(
            welch_t,
            list(per_user_means["extrovert"][1].values()),
            list(per_user_means["introvert"][1].values()),
        ),
    }
    return {"cohorts": out, "tests": tests}


def _facet_cities(corpus, cohorts, tweets_of, cfg):
    if cfg.gazetteer_path is None:
        return {"skipped": "no gazetteer configured; spatial facet unavailable"}
    gazetteer = load_gazetteer(cfg.gazetteer_path)
    out = {}
    counts_by_cohort = {}
    for cohort, uids in cohorts.items():
        counts = {uid: count_cities(tweets_of(uid), gazetteer) for uid in uids}
        counts = {uid: c for uid, c in counts.items() if c >= 1}
        out[cohort] = {
            "per_user_city_count": counts,
            "n_users_with_cities": len(counts),
            "histogram": city_count_histogram(list(counts.values())) if counts else None,
        }
        counts_by_cohort[cohort] = list(counts.values())
    tests = {
        "city_count": _test_or_note(
            anova_oneway,
            [float(c) for c in counts_by_cohort["extrovert"]],
            [float(c) for c in counts_by_cohort["introvert"]],
        )
    }
    return {"cohorts": out, "tests": tests}


def _facet_poi(corpus, cohorts, tweets_of, cfg):
    if cfg.poi_path is None:
        return {"skipped": "no POI table configured; spatial facet unavailable"}
    index = load_poi_index(cfg.poi_path)
    out = {}
    for cohort, uids in cohorts.items():
        pooled = [t for uid in uids for t in tweets_of(uid)]
        out[cohort] = poi_shares(pooled, index, cfg.poi_max_km).to_dict()
    return {"cohorts": out}


def _facet_sharing(corpus, cohorts, tweets_of, cfg):
    source_map = load_source_map(cfg.source_map_path or assets.asset_path("source_map.json"))
    out = {}
    per_user_all: dict[str, dict[str, dict[str, float]]] = {}
    for cohort, uids in cohorts.items():
        pooled = [t for uid in uids for t in tweets_of(uid)]
        per_user = {
            uid: sharing_shares(tweets_of(uid), source_map)
            for uid in uids
            if tweets_of(uid)
        }
        out[cohort] = {
            "pooled": sharing_shares(pooled, source_map),
            "per_user": per_user,
        }
        per_user_all[cohort] = per_user
    tests = {}
    for channel in SHARING_CHANNELS:
        a = [v[channel] for v in per_user_all["extrovert"].values()]
        b = [v[channel] for v in per_user_all["introvert"].values()]
        tests[channel] = _test_or_note(anova_oneway, a, b)
    return {"cohorts": out, "tests": tests}


def _facet_purchasing(corpus, cohorts, tweets_of, cfg):
    keywords = load_buying_keywords(
        cfg.buying_keywords_path or assets.asset_path("buying_keywords.txt")
    )
    out = {}
    values = {}
    for cohort, uids in cohorts.items():
        per_user = {
            uid: purchasing_index(tweets_of(uid), keywords) for uid in uids if tweets_of(uid)
        }
        dist = IndexDistribution(cohort=cohort, values=tuple(per_user.values()))
        out[cohort] = {"summaries": dist.summaries, "per_user": per_user}
        values[cohort] = list(per_user.values())
    try:
        table = anova_table(values["extrovert"], values["introvert"])
    except ValueError as exc:
        table = {"skipped": str(exc)}
    tests = {
        "purchasing_index": _test_or_note(
            anova_oneway, values["extrovert"], values["introvert"]
        )
    }
    return {"cohorts": out, "anova_table": table, "tests": tests}


def _facet_emotion(corpus, cohorts, tweets_of, cfg):
    lexicon_path = cfg.emotion_lexicon_path or assets.asset_path("emotion_lexicon.json")
    classifier = load_emotion_lexicon(lexicon_path)
    out = {}
    per_user_all: dict[str, dict[str, dict[str, float]]] = {}
    for cohort, uids in cohorts.items():
        per_user: dict[str, dict[str, float]] = {}
        without = 0
        for uid in uids:
            ts = tweets_of(uid)
            indices = emotion_indices(ts, classifier) if ts else None
            if indices is None:
                without += 1
            else:
                per_user[uid] = indices
        means = {
            c: (
                sum(v[c] for v in per_user.values()) / len(per_user)
                if per_user
                else None
            )
            for c in EMOTION_CATEGORIES
        }
        out[cohort] = {
            "mean_indices": means,
            "per_user": per_user,
            "n_users_with_emotion": len(per_user),
            "n_users_without_emotion": without,
        }
        per_user_all[cohort] = per_user
    tests = {}
    for c in EMOTION_CATEGORIES:
        a = [v[c] for v in per_user_all["extrovert"].values()]
        b = [v[c] for v in per_user_all["introvert"].values()]
        tests[c] = _test_or_note(welch_t, a, b)
    return {"cohorts": out, "tests": tests}


def _facet_badges(corpus, cohorts, tweets_of, cfg):
    out = {}
    indicators = {}
    for cohort, uids in cohorts.items():
        users = [corpus.user(uid) for uid in uids]
        with_share, without_share = badge_shares(users, cfg.badge)
        per_user = {u.user_id: int(cfg.badge in u.badges) for u in users}
        out[cohort] = {
            "with": with_share,
            "without": without_share,
            "per_user": per_user,
        }
        indicators[cohort] = [float(v) for v in per_user.values()]
    tests = {
        "badge_indicator": _test_or_note(
            anova_oneway, indicators["extrovert"], indicators["introvert"]
        )
    }
    return {"badge": cfg.badge, "cohorts": out, "tests": tests}


_FACET_FN = {
    "hourly": _facet_hourly,
    "periods": _facet_periods,
    "intervals": _facet_intervals,
    "cities": _facet_cities,
    "poi": _facet_poi,
    "sharing": _facet_sharing,
    "purchasing": _facet_purchasing,
    "emotion": _facet_emotion,
    "badges": _facet_badges,
}


def run_analyze(cfg: PipelineConfig, facet: str | None = None) -> dict[str, Path]:
    """Compute cohort comparisons; one JSON artifact per facet."""

    def body():
        paths = artifact_paths(cfg.out_dir)
        corpus = _load_canonical_corpus(cfg)
        cohorts = _read_cohorts(paths["cohort_labels"])
        for name in _COHORTS:
            if not cohorts[name]:
                raise ValueError(f"empty {name} cohort; nothing to compare")
        wanted = FACETS if facet is None else (facet,)
        for name in wanted:
            if name not in _FACET_FN:
                raise ValueError(f"unknown facet {name!r}; expected one of {FACETS}")
            payload = _FACET_FN[name](corpus, cohorts, corpus.tweets_of, cfg)
            payload["meta"] = {**_meta(cfg), "facet": name}
            payload["cohort_sizes"] = {c: len(cohorts[c]) for c in _COHORTS}
            _write_json(paths[f"analysis_{name}"], payload)
        return paths

    return _staged("analyze", body)


# --------------------------------------------------------------------------
# report


def _f4(x) -> str:
    if x is None:
        return "n/a"
    return format(float(x), ".4f")


def _fmt_test(d: Mapping) -> str:
    if "skipped" in d:
        return f"skipped ({d['skipped']})"
    df = d["df"]
    df_s = (
        f"({df[0]:g}, {df[1]:g})" if isinstance(df, (list, tuple)) else f"{df:g}"
    )
    return f"statistic={_f4(d['statistic'])} df={df_s} p={_f4(d['p_value'])}"


def _report_table(path: Path, meta_lines: Sequence[str], header: Sequence[str],
                  rows: Sequence[Sequence[str]], notes: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in meta_lines:
            fh.write(f"# {line}\n")
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(row) + "\n")
        for note in notes:
            fh.write(f"# {note}\n")


def run_report(cfg: PipelineConfig) -> dict[str, Path]:
    """Render the facet artifacts as fixed-format tables plus a summary."""

    def body():
        paths = artifact_paths(cfg.out_dir)
        report_dir = paths["report_dir"]
        report_dir.mkdir(parents=True, exist_ok=True)
        missing = [
            facet for facet in FACETS if not paths[f"analysis_{facet}"].exists()
        ]
        if missing:
            raise FileNotFoundError(
                f"missing analysis artifact(s) for facet(s): {', '.join(missing)}"
            )
        artifacts = {facet: _read_json(paths[f"analysis_{facet}"]) for facet in FACETS}
        m = _meta(cfg)
        meta_lines = [f"seed={m['seed']}", f"input_fingerprint={m['input_fingerprint']}"]
        outputs: dict[str, Path] = {}

        def table(facet, header, rows, notes=()):
            path = report_dir / f"{facet}.tsv"
            _report_table(path, meta_lines, header, rows, notes)
            outputs[facet] = path

        def skipped_table(facet, reason):
            table(facet, ["note"], [[f"facet skipped: {reason}"]])

        a = artifacts["hourly"]
        table(
            "hourly",
            ["hour", "extrovert", "introvert"],
            [
                [str(h), _f4(a["cohorts"]["extrovert"]["shares"][h]),
                 _f4(a["cohorts"]["introvert"]["shares"][h])]
                for h in range(24)
            ],
        )

        a = artifacts["periods"]
        table(
            "periods",
            ["period", "extrovert", "introvert", "test"],
            [
                [
                    period,
                    _f4(a["cohorts"]["extrovert"]["pooled_shares"][i]),
                    _f4(a["cohorts"]["introvert"]["pooled_shares"][i]),
                    _fmt_test(a["tests"][period]),
                ]
                for i, period in enumerate(PERIOD_LABELS)
            ],
        )

        a = artifacts["intervals"]
        rows = []
        for metric in ("mean_hours", "std_hours", "n"):
            for flavor in ("capped", "uncapped"):
                fmt = str if metric == "n" else _f4
                rows.append(
                    [
                        f"{flavor}_{metric}",
                        str(fmt(a["cohorts"]["extrovert"][flavor][metric])),
                        str(fmt(a["cohorts"]["introvert"][flavor][metric])),
                    ]
                )
        table(
            "intervals",
            ["metric", "extrovert", "introvert"],
            rows,
            notes=[
                f"welch capped_mean: {_fmt_test(a['tests']['capped_mean'])}",
                f"welch uncapped_mean: {_fmt_test(a['tests']['uncapped_mean'])}",
            ],
        )

        a = artifacts["cities"]
        if "skipped" in a:
            skipped_table("cities", a["skipped"])
        else:
            table(
                "cities",
                ["bucket", "extrovert", "introvert"],
                [
                    [
                        bucket,
                        _f4((a["cohorts"]["extrovert"]["histogram"] or {}).get(bucket, 0.0)),
                        _f4((a["cohorts"]["introvert"]["histogram"] or {}).get(bucket, 0.0)),
                    ]
                    for bucket in CITY_BUCKETS
                ],
                notes=[f"anova city_count: {_fmt_test(a['tests']['city_count'])}"],
            )

        a = artifacts["poi"]
        if "skipped" in a:
            skipped_table("poi", a["skipped"])
        else:
            table(
                "poi",
                ["category", "extrovert", "introvert"],
                [
                    [
                        cat,
                        _f4(a["cohorts"]["extrovert"]["shares"][cat]),
                        _f4(a["cohorts"]["introvert"]["shares"][cat]),
                    ]
                    for cat in POI_CATEGORIES
                ],
                notes=[
                    "categorized geo-tweets: extrovert "
                    f"{a['cohorts']['extrovert']['n_categorized']}, introvert "
                    f"{a['cohorts']['introvert']['n_categorized']}"
                ],
            )

        a = artifacts["sharing"]
        table(
            "sharing",
            ["channel", "extrovert", "introvert", "test"],
            [
                [
                    channel,
                    _f4(a["cohorts"]["extrovert"]["pooled"][channel]),
                    _f4(a["cohorts"]["introvert"]["pooled"][channel]),
                    _fmt_test(a["tests"][channel]),
                ]
                for channel in SHARING_CHANNELS
            ],
        )

        a = artifacts["purchasing"]
        rows = [
            [
                metric,
                _f4(a["cohorts"]["extrovert"]["summaries"][metric]),
                _f4(a["cohorts"]["introvert"]["summaries"][metric]),
            ]
            for metric in ("n", "mean", "q1", "median", "q3", "max")
        ]
        tbl = a["anova_table"]
        if "skipped" in tbl:
            notes = [f"anova table skipped ({tbl['skipped']})"]
        else:
            notes = [
                "anova between_groups: ss={} df={} ms={} F={} p={}".format(
                    _f4(tbl["ss_between"]), f"{tbl['df_between']:g}",
                    _f4(tbl["ms_between"]), _f4(tbl["F"]),
                    _f4(tbl["p_value"]),
                ),
                "anova within_groups: ss={} df={} ms={}".format(
                    _f4(tbl["ss_within"]), f"{tbl['df_within']:g}", _f4(tbl["ms_within"])
                ),
            ]
        table("purchasing", ["metric", "extrovert", "introvert"], rows, notes=notes)

        a = artifacts["emotion"]
        table(
            "emotion",
            ["category", "extrovert", "introvert", "test"],
            [
                [
                    cat,
                    _f4(a["cohorts"]["extrovert"]["mean_indices"][cat]),
                    _f4(a["cohorts"]["introvert"]["mean_indices"][cat]),
                    _fmt_test(a["tests"][cat]),
                ]
                for cat in EMOTION_CATEGORIES
            ],
        )

        a = artifacts["badges"]
        table(
            "badges",
            ["share", "extrovert", "introvert"],
            [
                ["with_badge", _f4(a["cohorts"]["extrovert"]["with"]),
                 _f4(a["cohorts"]["introvert"]["with"])],
                ["without_badge", _f4(a["cohorts"]["extrovert"]["without"]),
                 _f4(a["cohorts"]["introvert"]["without"])],
            ],
            notes=[
                f"badge: {a['badge']}",
                f"anova badge_indicator: {_fmt_test(a['tests']['badge_indicator'])}",
            ],
        )

        summary = _render_summary(cfg, paths, artifacts, meta_lines)
        summary_path = report_dir / "summary.txt"
        summary_path.write_text(summary, encoding="utf-8")
        outputs["summary"] = summary_path
        return outputs

    return _staged("report", body)


def _render_summary(cfg, paths, artifacts, meta_lines) -> str:
    lines = [f"# {line}" for line in meta_lines]
    lines.append("")
    ingest = _read_json(paths["ingest"]) if paths["ingest"].exists() else None
    if ingest:
        lines.append("== corpus ==")
        lines.append(
            f"active users: {ingest['n_users_active']} of {ingest['n_users_loaded']} loaded"
        )
        lines.append(
            f"tweets kept: {ingest['n_tweets_active']} "
            f"(orphans: {ingest['n_orphan_tweets']})"
        )
        lines.append(f"snapshot date: {ingest['snapshot_date']}")
        lines.append("")
    if paths["score_model"].exists():
        sm = _read_json(paths["score_model"])
        lines.append("== score model ==")
        lines.append(
            f"mu={_f4(sm['mu'])} sigma={_f4(sm['sigma'])} "
            f"lower={_f4(sm['lower'])} upper={_f4(sm['upper'])} n={sm['n_scored']}"
        )
        lines.append("")
    if paths["cv_report"].exists():
        cv = _read_json(paths["cv_report"])
        lines.append("== cross-validation (pooled | fold-mean) ==")
        for kind in sorted(cv["reports"]):
            r = cv["reports"][kind]
            agg, fm = r["aggregate"], r["fold_mean"]
            lines.append(
                f"{kind}: accuracy {_f4(agg['overall_accuracy'])} | {_f4(fm['overall_accuracy'])}, "
                f"macro F1 {_f4(agg['macro_f1'])} | {_f4(fm['macro_f1'])}, "
                f"extrovert recall {_f4(agg['extrovert_recall'])} | {_f4(fm['extrovert_recall'])}, "
                f"introvert recall {_f4(agg['introvert_recall'])} | {_f4(fm['introvert_recall'])}"
            )
        lines.append("")
    if paths["correlations"].exists():
        corr = _read_json(paths["correlations"])
        selected = [
            (name, coef)
            for name, coef in corr["coefficients"]
            if coef > corr["threshold"]
        ]
        lines.append(
            f"== interaction correlations above {_f4(corr['threshold'])} =="
        )
        if selected:
            for name, coef in selected:
                lines.append(f"{name}: {_f4(coef)}")
        else:
            lines.append("none")
        if corr.get("skipped"):
            lines.append(f"skipped (constant): {', '.join(corr['skipped'])}")
        lines.append("")
    lines.append("== facet significance ==")
    for facet in FACETS:
        a = artifacts[facet]
        if "skipped" in a:
            lines.append(f"{facet}: skipped ({a['skipped']})")
            continue
        tests = a.get("tests")
        if not tests:
            lines.append(f"{facet}: descriptive only")
            continue
        for name in sorted(tests):
            lines.append(f"{facet}/{name}: {_fmt_test(tests[name])}")
    lines.append("")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# orchestration


_STAGES: tuple[tuple[str, Callable], ...] = (
    ("ingest", run_ingest),
    ("features", run_features),
    ("label", run_label),
    ("cv", run_cv),
    ("train", run_train),
    ("classify", run_classify),
    ("analyze", run_analyze),
)


def run_pipeline(cfg: PipelineConfig) -> dict[str, Path]:
    """Execute every stage through analyze; stage-tagged failure, status file."""
    paths = artifact_paths(cfg.out_dir)
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    completed: list[str] = []

    def write_status(failed: str | None) -> None:
        try:
            meta = _meta(cfg)
        except OSError:
            # a stage may have failed precisely because an input is unreadable
            meta = {"seed": cfg.seed, "input_fingerprint": None}
        _write_json(
            paths["status"],
            {
                "meta": meta,
                "completed": completed,
                "failed_stage": failed,
                "incomplete": failed is not None,
            },
        )

    for stage, fn in _STAGES:
        try:
            fn(cfg)
        except PipelineError as exc:
            write_status(exc.stage)
            raise
        completed.append(stage)
    write_status(None)
    return paths
