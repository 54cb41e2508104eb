"""Run configuration: a single JSON file validated up front, with CLI
flag overrides applied on top. Unknown keys are rejected so typos fail
fast instead of silently using defaults."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidConfig

KNOWN_MODELS = (
    "random_forest", "gbm_like", "xgb_like", "lgbm_like", "catboost_like",
    "logreg", "gnb", "mlp",
)

DEFAULT_ZERO_SHOT_MODELS = [
    "qwen/qwen3-coder",
    "x-ai/grok-code-fast-1",
    "z-ai/glm-4.5-air",
    "meta-llama/llama-4-maverick",
    "moonshotai/kimi-k2",
]
DEFAULT_FEW_SHOT_MODELS = [
    "meta-llama/llama-4-maverick",
    "moonshotai/kimi-k2",
    "mistralai/mistral-small-3.2-24b-instruct",
    "qwen/qwen3-coder",
    "z-ai/glm-4.5-air",
]


@dataclass
class SmoteConfig:
    enabled: bool = True
    k: int = 5


@dataclass
class VotingConfig:
    ml_voters: list[str] = field(default_factory=lambda: [
        "random_forest", "xgb_like", "lgbm_like", "catboost_like", "gbm_like",
    ])
    ml_weight_mode: str = "auc"
    llm_weight_mode: str = "accuracy"
    threshold: float = 0.5


@dataclass
class LlmConfig:
    base_url: str = "https://openrouter.ai/api/v1"
    model_ids: dict = field(default_factory=lambda: {
        "zero_shot": list(DEFAULT_ZERO_SHOT_MODELS),
        "few_shot": list(DEFAULT_FEW_SHOT_MODELS),
    })
    prompt_mode: str = "both"            # zero_shot | few_shot | both
    n_exemplars: int = 4
    concurrency: int = 4
    cache_dir: str = "llm_cache"
    fixture_bundle: str | None = None    # JSONL of recorded responses
    offline: bool = False


@dataclass
class FusionConfig:
    meta_model: str | None = None
    advisory_bands: tuple[float, float] = (0.3, 0.7)


@dataclass
class RunConfig:
    dataset: str
    seed: int = 42
    split_ratios: tuple[float, float, float] = (0.6, 0.2, 0.2)
    smote: SmoteConfig = field(default_factory=SmoteConfig)
    models: list[str] = field(default_factory=lambda: list(KNOWN_MODELS))
    voting: VotingConfig = field(default_factory=VotingConfig)
    llm: LlmConfig = field(default_factory=LlmConfig)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    output_dir: str = "out"

    def modes(self) -> list[str]:
        if self.llm.prompt_mode == "both":
            return ["zero_shot", "few_shot"]
        return [self.llm.prompt_mode]


def _require_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise InvalidConfig(f"unknown {where} key(s): {sorted(unknown)}")


def _parse_section(cls, data: dict, where: str):
    fields = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    _require_keys(data, fields, where)
    return cls(**data)


def load_config(path) -> RunConfig:
    """Parse and fully validate a config file before any work starts."""
    path = Path(path)
    if not path.exists():
        raise InvalidConfig(f"config file {path} does not exist")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise InvalidConfig(f"{path}: top level must be an object")

    top_fields = {f.name for f in RunConfig.__dataclass_fields__.values()}
    _require_keys(raw, top_fields, "top-level")
    if "dataset" not in raw:
        raise InvalidConfig("config must name a dataset path")

    kwargs = dict(raw)
    if "smote" in kwargs:
        kwargs["smote"] = _parse_section(SmoteConfig, kwargs["smote"], "smote")
    if "voting" in kwargs:
        kwargs["voting"] = _parse_section(VotingConfig, kwargs["voting"], "voting")
    if "llm" in kwargs:
        kwargs["llm"] = _parse_section(LlmConfig, kwargs["llm"], "llm")
    if "fusion" in kwargs:
        section = dict(kwargs["fusion"])
        if "advisory_bands" in section:
            section["advisory_bands"] = tuple(section["advisory_bands"])
        kwargs["fusion"] = _parse_section(FusionConfig, section, "fusion")
    if "split_ratios" in kwargs:
        kwargs["split_ratios"] = tuple(kwargs["split_ratios"])

    config = RunConfig(**kwargs)
    validate(config)
    return config


def validate(config: RunConfig) -> None:
    if abs(sum(config.split_ratios) - 1.0) > 1e-9 or len(config.split_ratios) != 3:
        raise InvalidConfig(f"split_ratios must be three values summing to 1, "
                            f"got {config.split_ratios}")
    if any(r <= 0 for r in config.split_ratios):
        raise InvalidConfig("every split ratio must be positive")
    if config.smote.k < 1:
        raise InvalidConfig("smote.k must be >= 1")
    unknown = [m for m in config.models if m not in KNOWN_MODELS]
    if unknown:
        raise InvalidConfig(f"unknown model preset(s): {unknown}; "
                            f"choose from {list(KNOWN_MODELS)}")
    missing = [m for m in config.voting.ml_voters if m not in config.models]
    if missing:
        raise InvalidConfig(f"voting.ml_voters not in models list: {missing}")
    if config.voting.ml_weight_mode not in ("accuracy", "auc", "uniform"):
        raise InvalidConfig(f"bad ml_weight_mode {config.voting.ml_weight_mode!r}")
    if config.voting.llm_weight_mode not in ("accuracy", "auc", "uniform"):
        raise InvalidConfig(f"bad llm_weight_mode {config.voting.llm_weight_mode!r}")
    if not 0.0 < config.voting.threshold < 1.0:
        raise InvalidConfig("voting.threshold must be in (0, 1)")
    if config.llm.prompt_mode not in ("zero_shot", "few_shot", "both"):
        raise InvalidConfig(f"bad llm.prompt_mode {config.llm.prompt_mode!r}")
    if config.llm.n_exemplars < 1:
        raise InvalidConfig("llm.n_exemplars must be >= 1")
    if config.llm.concurrency < 1:
        raise InvalidConfig("llm.concurrency must be >= 1")
    for mode in config.modes():
        ids = config.llm.model_ids.get(mode, [])
        if not ids:
            raise InvalidConfig(f"llm.model_ids[{mode!r}] must list at least one model")
    low, high = config.fusion.advisory_bands
    if not 0.0 <= low < high <= 1.0:
        raise InvalidConfig("fusion.advisory_bands must satisfy 0 <= low < high <= 1")
