"""Command-line entry points: one subcommand per pipeline stage.

Commands read and write only the documented artifact files, so any
stage can be re-run or verified on its own. Exit code 0 on success;
nonzero with a stage-tagged diagnostic on stderr otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .models import MODEL_KINDS, Hyperparameters
from .pipeline import (
    FACETS,
    PipelineConfig,
    PipelineError,
    run_analyze,
    run_classify,
    run_cv,
    run_features,
    run_ingest,
    run_label,
    run_pipeline,
    run_report,
    run_train,
)
from .synthetic import GROUPS, CohortSpec, GroupEffects, generate_cohort


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--users", required=True, help="users JSONL file")
    p.add_argument("--tweets", required=True, help="tweets JSONL file")
    p.add_argument("--out-dir", required=True, help="artifact directory")
    p.add_argument("--snapshot-date", default=None, help="ISO date; default: day after last tweet")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--min-tweets", type=int, default=100,
                   help="keep users with strictly more loaded tweets")
    p.add_argument("--n-terms", type=int, default=84)
    p.add_argument("--model-kind", choices=MODEL_KINDS, default="svm-rbf")
    p.add_argument("--cv-folds", type=int, default=10)
    p.add_argument("--interval-cap-hours", type=float, default=24.0)
    p.add_argument("--poi-max-km", type=float, default=0.5)
    p.add_argument("--badge", default="Binding-Taobao")
    p.add_argument("--correlation-threshold", type=float, default=0.13)
    p.add_argument("--gazetteer", default=None, help="city table for the spatial facet")
    p.add_argument("--poi", default=None, help="POI table for the spatial facet")
    p.add_argument("--term-lexicon", default=None, help="default: packaged asset")
    p.add_argument("--buying-keywords", default=None, help="default: packaged asset")
    p.add_argument("--emotion-lexicon", default=None, help="default: packaged asset")
    p.add_argument("--source-map", default=None, help="default: packaged asset")
    p.add_argument("--svm-c", type=float, default=1.0)
    p.add_argument("--svm-gamma", type=float, default=None)
    p.add_argument("--rf-n-estimators", type=int, default=100)
    p.add_argument("--rf-max-depth", type=int, default=None)


def _config(args: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig(
        users_path=args.users,
        tweets_path=args.tweets,
        out_dir=args.out_dir,
        snapshot_date=args.snapshot_date,
        seed=args.seed,
        min_tweets=args.min_tweets,
        n_terms=args.n_terms,
        model_kind=args.model_kind,
        cv_folds=args.cv_folds,
        interval_cap_hours=args.interval_cap_hours,
        poi_max_km=args.poi_max_km,
        badge=args.badge,
        correlation_threshold=args.correlation_threshold,
        gazetteer_path=args.gazetteer,
        poi_path=args.poi,
        term_lexicon_path=args.term_lexicon,
        buying_keywords_path=args.buying_keywords,
        emotion_lexicon_path=args.emotion_lexicon,
        source_map_path=args.source_map,
        hyperparameters=Hyperparameters(
            svm_c=args.svm_c,
            svm_gamma=args.svm_gamma,
            rf_n_estimators=args.rf_n_estimators,
            rf_max_depth=args.rf_max_depth,
        ),
    )


def _effects_from_json(path: str) -> dict[str, GroupEffects]:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    effects = {}
    for group in GROUPS:
        if group not in raw:
            raise ValueError(f"effects file must define group {group!r}")
        d = dict(raw[group])
        for key in (
            "period_shares",
            "city_bucket_shares",
            "emotion_mixture",
            "score_range",
        ):
            if key in d:
                d[key] = tuple(d[key])
        try:
            effects[group] = GroupEffects(**d)
        except TypeError as exc:
            raise ValueError(f"effects for {group!r}: {exc}") from exc
    return effects


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extro",
        description="Extraversion labeling and cohort behavior analysis pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    stage_runners = {
        "ingest": run_ingest,
        "features": run_features,
        "label": run_label,
        "cv": run_cv,
        "train": run_train,
        "classify": run_classify,
        "report": run_report,
    }
    for name, runner in stage_runners.items():
        p = sub.add_parser(name, help=f"run the {name} stage")
        _add_config_args(p)
        p.set_defaults(func=lambda args, r=runner: r(_config(args)))

    p = sub.add_parser("analyze", help="run the analyze stage (all facets or one)")
    _add_config_args(p)
    p.add_argument("facet", nargs="?", choices=FACETS, default=None)
    p.set_defaults(func=lambda args: run_analyze(_config(args), args.facet))

    p = sub.add_parser("run", help="run every stage and render the report")
    _add_config_args(p)

    def _run_all(args):
        cfg = _config(args)
        run_pipeline(cfg)
        return run_report(cfg)

    p.set_defaults(func=_run_all)

    p = sub.add_parser("gen-synthetic", help="write a synthetic corpus with planted effects")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--users-per-group", type=int, default=100)
    p.add_argument("--tweets-per-user", type=int, default=200)
    p.add_argument("--scored-fraction", type=float, default=0.48)
    p.add_argument("--geo-fraction", type=float, default=0.30)
    p.add_argument("--emotional-fraction", type=float, default=0.50)
    p.add_argument("--badge-name", default="Binding-Taobao")
    p.add_argument("--null", action="store_true",
                   help="zero behavioral effects: identical targets for all groups")
    p.add_argument("--effects", default=None,
                   help="JSON file overriding the per-group planted effects")

    def _gen(args):
        kwargs = dict(
            users_per_group=args.users_per_group,
            tweets_per_user=args.tweets_per_user,
            scored_fraction=args.scored_fraction,
            geo_fraction=args.geo_fraction,
            emotional_fraction=args.emotional_fraction,
            badge_name=args.badge_name,
        )
        if args.null and args.effects:
            raise ValueError("--null and --effects are mutually exclusive")
        if args.null:
            spec = CohortSpec.null(seed=args.seed, **kwargs)
        elif args.effects:
            spec = CohortSpec(
                seed=args.seed, effects=_effects_from_json(args.effects), **kwargs
            )
        else:
            spec = CohortSpec(seed=args.seed, **kwargs)
        files = generate_cohort(spec, args.out_dir)
        for name in ("users", "tweets", "truth", "gazetteer", "poi", "manifest"):
            print(f"{name}: {getattr(files, name)}")
        return files

    p.set_defaults(func=_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except PipelineError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"[{args.command}] {exc}", file=sys.stderr)
        return 1
    if isinstance(result, dict):
        for name in sorted(result):
            path = result[name]
            if isinstance(path, Path) and path.exists():
                print(f"{name}: {path}")
    print(f"{args.command}: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
