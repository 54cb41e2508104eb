from __future__ import annotations

import json
import shutil
import time
from pathlib import Path

import pytest

from cardiofusion import cli as cf_cli
from cardiofusion import dataset as ds
from cardiofusion.config import load_config

REPO = Path(__file__).resolve().parent.parent
DATASET_CSV = REPO / "fixtures" / "heart_merged.csv"
OFFLINE_CONFIG = REPO / "configs" / "offline.json"
FIXTURE_BUNDLE = REPO / "fixtures" / "llm_responses.jsonl"
GOLDEN_REQUEST = REPO / "fixtures" / "golden_chat_request.json"


@pytest.fixture(scope="session")
def records():
    return ds.load_dataset(DATASET_CSV)


@pytest.fixture(scope="session")
def prepared(records):
    """Encoded, split, scaled and oversampled data, seed 42."""
    X, y = ds.encode(records)
    split = ds.stratified_split(X, y, seed=42)
    scaler = ds.fit_minmax(split.X_train)
    Xtr = ds.apply_minmax(scaler, split.X_train)
    Xva = ds.apply_minmax(scaler, split.X_val)
    Xte = ds.apply_minmax(scaler, split.X_test)
    X_bal, y_bal = ds.smote(Xtr, split.y_train, k=5, seed=42)
    return {
        "X": X, "y": y, "split": split, "scaler": scaler,
        "X_train": Xtr, "X_val": Xva, "X_test": Xte,
        "X_bal": X_bal, "y_bal": y_bal,
    }


@pytest.fixture(scope="session")
def pipeline_run(tmp_path_factory):
    """One full offline pipeline run; commands timed individually."""
    out = tmp_path_factory.mktemp("pipeline")
    config = load_config(OFFLINE_CONFIG)
    config.dataset = str(DATASET_CSV)
    config.llm.fixture_bundle = str(FIXTURE_BUNDLE)
    config.output_dir = str(out)
    timings = {}
    for name, command in (
        ("prepare", cf_cli.cmd_prepare),
        ("train", cf_cli.cmd_train),
        ("evaluate", cf_cli.cmd_evaluate),
        ("llm-predict", cf_cli.cmd_llm_predict),
        ("vote", cf_cli.cmd_vote),
        ("fuse", cf_cli.cmd_fuse),
        ("report", cf_cli.cmd_report),
    ):
        started = time.time()
        command(config)
        timings[name] = time.time() - started
    return {"config": config, "out": out, "timings": timings}


def read_json(path: Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


@pytest.fixture()
def scratch_config(tmp_path):
    """Fresh config pointing at an empty output directory."""
    config = load_config(OFFLINE_CONFIG)
    config.dataset = str(DATASET_CSV)
    config.llm.fixture_bundle = str(FIXTURE_BUNDLE)
    config.output_dir = str(tmp_path / "out")
    return config
