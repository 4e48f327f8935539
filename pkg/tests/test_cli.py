"""Command-line interface: parsing, exit codes, stage delegation."""

import json

import pytest

from extro.cli import build_parser, main
from extro.pipeline import FACETS, artifact_paths
from extro.synthetic import CohortSpec, generate_cohort


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    spec = CohortSpec(users_per_group=8, tweets_per_user=24, seed=13)
    return generate_cohort(spec, tmp_path_factory.mktemp("clicorpus"))


def config_argv(corpus, out_dir, command):
    return [
        command,
        "--users", str(corpus.users),
        "--tweets", str(corpus.tweets),
        "--out-dir", str(out_dir),
        "--snapshot-date", corpus.snapshot_date,
        "--seed", "13",
        "--min-tweets", "10",
        "--cv-folds", "2",
        "--gazetteer", str(corpus.gazetteer),
        "--poi", str(corpus.poi),
    ]


class TestParser:
    def test_defaults_round_trip(self):
        args = build_parser().parse_args(
            ["ingest", "--users", "u.jsonl", "--tweets", "t.jsonl", "--out-dir", "o"]
        )
        assert args.command == "ingest"
        assert args.seed == 7
        assert args.min_tweets == 100
        assert args.model_kind == "svm-rbf"

    def test_model_kind_is_constrained(self, capsys):
        with pytest.raises(SystemExit):
            build_parser().parse_args(
                ["train", "--users", "u", "--tweets", "t", "--out-dir", "o",
                 "--model-kind", "perceptron"]
            )

    def test_analyze_facet_choices(self):
        argv = ["analyze", "--users", "u", "--tweets", "t", "--out-dir", "o"]
        assert build_parser().parse_args(argv).facet is None
        assert build_parser().parse_args(argv + ["emotion"]).facet == "emotion"
        with pytest.raises(SystemExit):
            build_parser().parse_args(argv + ["astrology"])

    def test_command_is_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestGenSynthetic:
    def test_writes_a_corpus(self, tmp_path, capsys):
        rc = main(
            ["gen-synthetic", "--out-dir", str(tmp_path), "--seed", "3",
             "--users-per-group", "3", "--tweets-per-user", "6"]
        )
        assert rc == 0
        assert (tmp_path / "users.jsonl").is_file()
        assert (tmp_path / "manifest.json").is_file()
        out = capsys.readouterr().out
        assert "gen-synthetic: ok" in out

    def test_group_without_scores_is_rejected_up_front(self, tmp_path, capsys):
        rc = main(
            ["gen-synthetic", "--out-dir", str(tmp_path),
             "--users-per-group", "2", "--tweets-per-user", "6"]
        )
        assert rc == 1
        assert "at least one self-reported score" in capsys.readouterr().err

    def test_null_and_effects_conflict(self, tmp_path, capsys):
        rc = main(
            ["gen-synthetic", "--out-dir", str(tmp_path), "--null",
             "--effects", str(tmp_path / "e.json")]
        )
        assert rc == 1
        assert "mutually exclusive" in capsys.readouterr().err

    def test_invalid_effects_file(self, tmp_path, capsys):
        bad = tmp_path / "effects.json"
        bad.write_text('{"extrovert": {}}', encoding="utf-8")
        rc = main(["gen-synthetic", "--out-dir", str(tmp_path), "--effects", str(bad)])
        assert rc == 1
        assert "[gen-synthetic]" in capsys.readouterr().err

    def test_invalid_spec_value(self, tmp_path, capsys):
        rc = main(
            ["gen-synthetic", "--out-dir", str(tmp_path), "--tweets-per-user", "7"]
        )
        assert rc == 1
        assert "even" in capsys.readouterr().err


class TestRun:
    def test_full_run_then_report(self, corpus, tmp_path, capsys):
        rc = main(config_argv(corpus, tmp_path, "run"))
        assert rc == 0
        out = capsys.readouterr().out
        assert "run: ok" in out
        paths = artifact_paths(tmp_path)
        for facet in FACETS:
            assert paths[f"analysis_{facet}"].is_file()
        assert (paths["report_dir"] / "summary.txt").is_file()

    def test_stage_by_stage(self, corpus, tmp_path, capsys):
        for command in ("ingest", "features", "label", "cv", "train", "classify"):
            assert main(config_argv(corpus, tmp_path, command)) == 0, command
        assert main(config_argv(corpus, tmp_path, "analyze")) == 0
        assert main(config_argv(corpus, tmp_path, "report")) == 0
        status = artifact_paths(tmp_path)["cv_report"]
        assert "reports" in json.loads(status.read_text(encoding="utf-8"))

    def test_missing_input_is_a_clean_failure(self, corpus, tmp_path, capsys):
        argv = config_argv(corpus, tmp_path, "ingest")
        argv[argv.index("--users") + 1] = str(tmp_path / "absent.jsonl")
        rc = main(argv)
        assert rc == 1
        assert "[ingest]" in capsys.readouterr().err

    def test_report_before_analyze_fails_with_facet_names(self, corpus, tmp_path, capsys):
        rc = main(config_argv(corpus, tmp_path, "report"))
        assert rc == 1
        err = capsys.readouterr().err
        assert "[report] missing analysis artifact(s)" in err
        assert "emotion" in err

    def test_single_facet_analyze(self, corpus, tmp_path, capsys):
        for command in ("ingest", "features", "label", "cv", "train", "classify"):
            assert main(config_argv(corpus, tmp_path, command)) == 0, command
        rc = main(config_argv(corpus, tmp_path, "analyze") + ["hourly"])
        assert rc == 0
        paths = artifact_paths(tmp_path)
        assert paths["analysis_hourly"].is_file()
        assert not paths["analysis_emotion"].exists()
