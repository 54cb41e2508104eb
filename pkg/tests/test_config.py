from __future__ import annotations

import json

import pytest

from cardiofusion.config import load_config
from cardiofusion.errors import InvalidConfig
from tests.conftest import OFFLINE_CONFIG


def write_config(tmp_path, mutate):
    doc = json.loads(OFFLINE_CONFIG.read_text())
    mutate(doc)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def test_offline_config_loads():
    config = load_config(OFFLINE_CONFIG)
    assert config.seed == 42
    assert config.split_ratios == (0.6, 0.2, 0.2)
    assert config.llm.offline is True
    assert config.modes() == ["zero_shot", "few_shot"]


def test_unknown_top_level_key_rejected(tmp_path):
    path = write_config(tmp_path, lambda d: d.update(extra=1))
    with pytest.raises(InvalidConfig, match="extra"):
        load_config(path)


def test_unknown_nested_key_rejected(tmp_path):
    path = write_config(tmp_path, lambda d: d["llm"].update(tempreature=0))
    with pytest.raises(InvalidConfig, match="tempreature"):
        load_config(path)


def test_ratios_must_sum_to_one(tmp_path):
    path = write_config(tmp_path, lambda d: d.update(split_ratios=[0.5, 0.2, 0.2]))
    with pytest.raises(InvalidConfig, match="split_ratios"):
        load_config(path)


def test_unknown_model_preset_rejected(tmp_path):
    path = write_config(tmp_path, lambda d: d.update(models=["svm"]))
    with pytest.raises(InvalidConfig, match="svm"):
        load_config(path)


def test_voter_not_in_models_rejected(tmp_path):
    path = write_config(tmp_path, lambda d: d.update(models=["logreg"]))
    with pytest.raises(InvalidConfig, match="ml_voters"):
        load_config(path)


def test_missing_dataset_key_rejected(tmp_path):
    path = write_config(tmp_path, lambda d: d.pop("dataset"))
    with pytest.raises(InvalidConfig, match="dataset"):
        load_config(path)


def test_bad_advisory_bands_rejected(tmp_path):
    path = write_config(
        tmp_path, lambda d: d["fusion"].update(advisory_bands=[0.7, 0.3]))
    with pytest.raises(InvalidConfig, match="advisory_bands"):
        load_config(path)


def test_nonexistent_file_rejected(tmp_path):
    with pytest.raises(InvalidConfig):
        load_config(tmp_path / "missing.json")
