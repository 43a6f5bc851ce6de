import json
import math

import pandas as pd
import pytest

from explain_lab.cli import (
    EFFECTIVE_CONFIG,
    SEED_ENV,
    RunConfig,
    build_config,
    emit_config,
    main,
    parse_config,
    read_settings,
)
from explain_lab.errors import ConfigValidationError
from explain_lab.experiments import SweepReport

SMALL_SYNTHETIC = ["--set", "data.synthetic_n=200", "--set", "train.epochs=2", "--set", "train.hidden_sizes=8"]


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


def test_defaults():
    assert parse_config(environ={}) == RunConfig()


def test_settings_grammar():
    settings = read_settings("# comment\n\ntrain.epochs = 3  # short\nlime.kernel.sigma=1.5\n")
    assert [(s.key, s.value, s.line) for s in settings] == [
        ("train.epochs", "3", 3),
        ("lime.kernel.sigma", "1.5", 4),
    ]


def test_malformed_line_is_located():
    with pytest.raises(ConfigValidationError) as e:
        read_settings("train.epochs = 3\njusttext\n")
    assert e.value.line == 2


def test_duplicate_key_is_located():
    with pytest.raises(ConfigValidationError) as e:
        read_settings("train.epochs = 3\ntrain.epochs = 4\n")
    assert (e.value.key, e.value.line) == ("train.epochs", 2)


def test_invalid_value_names_key_and_line(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("run.seed = 1\ntrain.learning_rate = -1\n")
    with pytest.raises(ConfigValidationError) as e:
        parse_config(path, environ={})
    assert (e.value.key, e.value.line) == ("train.learning_rate", 2)
    assert "train.learning_rate" in str(e.value)


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigValidationError) as e:
        parse_config(overrides=["train.nope=1"], environ={})
    assert e.value.key == "train.nope"


@pytest.mark.parametrize("key", ["train.seed", "sweep.seed", "sweep.jobs", "sweep.train.epochs"])
def test_derived_keys_cannot_be_set(key):
    with pytest.raises(ConfigValidationError) as e:
        parse_config(overrides=[f"{key}=2"], environ={})
    assert e.value.key == key


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_config(tmp_path / "missing.conf", environ={})


def test_seed_precedence(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("run.seed = 1\n")
    assert parse_config(path, environ={}).run.seed == 1
    assert parse_config(path, ["run.seed=2"], environ={}).run.seed == 2
    assert parse_config(path, ["run.seed=2"], environ={SEED_ENV: "7"}).run.seed == 2
    from_env = parse_config(path, environ={SEED_ENV: "7"})
    assert (from_env.run.seed, from_env.train.seed, from_env.lime.seed, from_env.sweep.seed) == (7, 7, 7, 7)
    assert parse_config(path, flags={"run.seed": 3}, environ={SEED_ENV: "7"}).run.seed == 3


def test_sections_feed_the_sweep():
    config = parse_config(
        overrides=["train.epochs=4", "lime.n_samples=64", "run.jobs=3", "data.synthetic=true"], environ={}
    )
    assert config.sweep.train == config.train
    assert config.sweep.lime.n_samples == 64
    assert config.sweep.jobs == 3
    assert config.sweep.feature_kind == "synthetic"


def test_clean_token_is_infinite_snr():
    config = parse_config(overrides=["sweep.snr_levels=clean, 2, 0.5"], environ={})
    assert config.sweep.snr_levels == (math.inf, 2.0, 0.5)


def test_trial_selection_is_a_list_setting():
    config = parse_config(overrides=["sweep.n_trials=3", "sweep.trials=2, 0"], environ={})
    assert config.sweep.selected_trials() == (0, 2)
    assert parse_config(environ={}).sweep.selected_trials() == (0, 1, 2, 3, 4)


def test_emitted_config_reads_back():
    config = parse_config(
        overrides=[
            "run.seed=4",
            "run.command=sweep",
            "run.experiment=noise",
            "sweep.snr_levels=clean, 2, 0.5",
            "lime.max_features=3",
            "lime.kernel.sigma=1.5",
            "lime.kernel.distance=cosine",
            "train.hidden_sizes=32, 16",
            "data.synthetic=true",
            "data.train_limit=100",
        ],
        environ={},
    )
    text = emit_config(config)
    assert "sweep.snr_levels = clean, 2.0, 0.5" in text
    assert "sweep.seed" not in text
    assert build_config(read_settings(text)) == config


def test_prepare_writes_csv_files(tmp_path):
    assert main(["prepare", "--synthetic", "--output", str(tmp_path), "--set", "data.synthetic_n=100"]) == 0
    train = pd.read_csv(tmp_path / "train.csv")
    test = pd.read_csv(tmp_path / "test.csv")
    assert len(train) + len(test) == 100
    assert "y" in train.columns
    assert (tmp_path / EFFECTIVE_CONFIG).exists()


def test_train_then_explain(tmp_path):
    out = str(tmp_path)
    assert main(["train", "--synthetic", "--kind", "cen", "--output", out, *SMALL_SYNTHETIC]) == 0
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["model"] == "cen"
    assert 0.0 <= metrics["test_error"] <= 1.0
    assert "components_used" in metrics
    assert list(pd.read_csv(tmp_path / "convergence.csv")["epoch"]) == [0, 1, 2]

    argv = ["explain", "--synthetic", "--model", str(tmp_path / "model.ckpt"), "--instance", "3", "--output", out]
    assert main([*argv, *SMALL_SYNTHETIC, "--set", "lime.n_samples=60"]) == 0
    lime = json.loads((tmp_path / "explanation-3.json").read_text())
    assert lime["meta"]["source"] == "lime"
    assert (lime["meta"]["n_samples"], lime["meta"]["seed"]) == (60, 0)
    assert lime["n_features"] == 8
    native = json.loads((tmp_path / "explanation-3-cen.json").read_text())
    assert native["meta"]["local_consistency"] < 1e-9
    assert (native["meta"]["n_samples"], native["meta"]["seed"]) == (60, 0)


def test_effective_config_is_a_fixed_point(tmp_path, monkeypatch):
    monkeypatch.setenv(SEED_ENV, "5")
    assert main(["prepare", "--synthetic", "--output", str(tmp_path), "--set", "data.synthetic_n=60"]) == 0
    path = tmp_path / EFFECTIVE_CONFIG
    text = path.read_text()
    assert "run.seed = 5" in text
    assert emit_config(parse_config(path, environ={})) == text


def test_missing_path_exits_with_one(tmp_path, capsys):
    missing = tmp_path / "no-mnist"
    code = main(["train", "--output", str(tmp_path / "out"), "--set", f"data.mnist_dir={missing}"])
    assert code == 1
    err = capsys.readouterr().err
    assert "data.mnist_dir" in err and str(missing) in err


@pytest.mark.parametrize("argv", [[], ["train", "--kind", "svm"], ["sweep", "unknown"], ["train", "--jobs", "two"]])
def test_bad_arguments_exit_with_one(argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_invalid_setting_exits_with_one(tmp_path, capsys):
    assert main(["train", "--synthetic", "--output", str(tmp_path), "--set", "train.learning_rate=-1"]) == 1
    assert "train.learning_rate" in capsys.readouterr().err


def test_sweep_then_report(tmp_path):
    out = str(tmp_path)
    argv = ["sweep", "convergence", "--synthetic", "--output", out, *SMALL_SYNTHETIC, "--set", "sweep.n_trials=2"]
    assert main(argv) == 0
    report = SweepReport.read(tmp_path / "convergence.csv")
    assert {row.trial for row in report.rows} == {0, 1}
    assert json.loads((tmp_path / "convergence.json").read_text())["seed"] == 0

    assert main(["report", str(tmp_path / "convergence.csv"), "--output", out]) == 0
    summary = pd.read_csv(tmp_path / "summary.csv")
    assert set(summary["n"]) == {2}


def test_report_of_a_failed_sweep_still_succeeds(tmp_path):
    report = SweepReport(seed=0)
    report.add("samples", 0.5, "lr", 0, "val_error", 0.2)
    report.fail("samples", 0.01, 0, "too few rows")
    csv_path, _ = report.write(tmp_path)
    assert main(["report", str(csv_path), "--output", str(tmp_path)]) == 0
