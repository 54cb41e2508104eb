from __future__ import annotations

import hashlib
import json

import pytest

from cardiofusion import cli as cf_cli
from cardiofusion.errors import MissingArtifact
from tests.conftest import DATASET_CSV, OFFLINE_CONFIG, read_json


def file_hashes(out, names):
    return {n: hashlib.sha256((out / n).read_bytes()).hexdigest() for n in names}


def test_full_offline_run_emits_all_artifacts(pipeline_run):
    out = pipeline_run["out"]
    expected = [
        "split.csv", "scaler.json", "train_balanced.csv",
        "llm_report.json", "votes_ml.csv", "votes_llm.csv",
        "ensemble_weights.json", "fusion_results.json",
        "report_summary.json", "roc_curves.svg", "confusion.svg", "run.log",
        *cf_cli.REPORT_FILES,
    ]
    for model in pipeline_run["config"].models:
        expected.append(f"model_{model}.json")
    for name in expected:
        assert (out / name).exists(), name


def test_train_before_prepare_names_missing_artifact(scratch_config):
    with pytest.raises(MissingArtifact) as err:
        cf_cli.cmd_train(scratch_config)
    assert "split.csv" in str(err.value)
    assert "prepare" in str(err.value)


def test_report_before_fuse_names_producing_command(scratch_config):
    cf_cli.cmd_prepare(scratch_config)
    with pytest.raises(MissingArtifact) as err:
        cf_cli.cmd_report(scratch_config)
    assert "evaluate" in str(err.value) or "vote" in str(err.value)


def test_report_exits_zero_after_full_run(pipeline_run):
    config_path = pipeline_run["out"] / "rerun_config.json"
    doc = json.loads(OFFLINE_CONFIG.read_text())
    doc["output_dir"] = str(pipeline_run["out"])
    config_path.write_text(json.dumps(doc))
    assert cf_cli.main(["report", "--config", str(config_path)]) == 0
    for name in cf_cli.REPORT_FILES:
        assert (pipeline_run["out"] / name).exists()


def test_vote_rerun_is_byte_identical(pipeline_run):
    out = pipeline_run["out"]
    names = ["report_ml_voting.csv", "report_ml_voting.json",
             "report_llm_voting.csv", "report_llm_voting.json",
             "votes_ml.csv", "votes_llm.csv", "ensemble_weights.json"]
    before = file_hashes(out, names)
    cf_cli.cmd_vote(pipeline_run["config"])
    assert file_hashes(out, names) == before


def test_llm_predict_used_cache_only(pipeline_run):
    report = read_json(pipeline_run["out"] / "llm_report.json")
    for mode in ("zero_shot", "few_shot"):
        assert report[mode]["network_calls"] == 0
        assert report[mode]["cache_hits"] == 5 * 476   # 5 models x (val + test)
        assert report[mode]["unparseable"] == {}


def test_fusion_results_cover_every_test_sample(pipeline_run):
    results = read_json(pipeline_run["out"] / "fusion_results.json")
    assert len(results) == 238
    for doc in results[:5]:
        assert 0.0 <= doc["risk_score"] <= 1.0
        assert doc["label"] == int(doc["risk_score"] >= 0.5)
        assert doc["advisory"] in ("low", "moderate", "high")
        assert "disclaimer" in doc
        assert doc["meta_verdict"] in (0, 1)


def test_cli_exit_codes(tmp_path, capsys):
    # invalid config -> 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dataset": str(DATASET_CSV), "nope": 1}))
    assert cf_cli.main(["prepare", "--config", str(bad)]) == 2
    # missing artifact -> 3
    assert cf_cli.main([
        "train", "--config", str(OFFLINE_CONFIG),
        "--out", str(tmp_path / "empty_out"),
    ]) == 3
    capsys.readouterr()


def test_cli_prepare_via_main(tmp_path):
    out = tmp_path / "o"
    code = cf_cli.main(["prepare", "--config", str(OFFLINE_CONFIG),
                        "--out", str(out)])
    assert code == 0
    assert (out / "split.csv").exists()
    header = (out / "split.csv").read_text().splitlines()[0]
    assert header.startswith("sample_id,split,HeartDisease,Age,")


def test_seed_override_changes_split(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert cf_cli.main(["prepare", "--config", str(OFFLINE_CONFIG),
                        "--out", str(out_a)]) == 0
    assert cf_cli.main(["prepare", "--config", str(OFFLINE_CONFIG),
                        "--out", str(out_b), "--seed", "43"]) == 0
    assert (out_a / "split.csv").read_bytes() != (out_b / "split.csv").read_bytes()
