"""Self-describing JSON persistence for trained models.

The document layout is {model_id, kind, config, parameters,
validation_accuracy, validation_auc, schema_version}. Serialization is
canonical (sorted keys, compact separators, repr floats), so
serialize -> parse -> serialize is byte-identical.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .base import SCHEMA_VERSION, TrainedModel
from .bayes import GaussianNaiveBayes
from .cart import TreeNode
from .forest import ForestConfig, RandomForest
from .gbdt import GbdtConfig, GradientBoostedTrees
from .linear import LogisticRegression
from .mlp import MlpClassifier


def _parameters(model: TrainedModel) -> dict:
    learner = model.learner
    if model.kind == "cart":
        return {"tree": learner.to_dict()}
    if model.kind == "random_forest":
        return {"trees": [t.to_dict() for t in learner.trees_]}
    if model.kind == "gbdt":
        return {"f0": learner.f0_, "trees": [t.to_dict() for t in learner.trees_]}
    if model.kind == "logreg":
        return {"weights": learner.weights_.tolist(), "bias": learner.bias_}
    if model.kind == "gnb":
        return {
            "classes": learner.classes_.tolist(),
            "theta": learner.theta_.tolist(),
            "var": learner.var_.tolist(),
            "priors": learner.priors_.tolist(),
        }
    if model.kind == "mlp":
        return {
            "weights": [w.tolist() for w in learner.weights_],
            "biases": [b.tolist() for b in learner.biases_],
        }
    raise ValueError(f"unknown model kind {model.kind!r}")


def _rebuild_learner(kind: str, config: dict, params: dict, n_features: int):
    if kind == "cart":
        return TreeNode.from_dict(params["tree"])
    if kind == "random_forest":
        learner = RandomForest(ForestConfig(**config))
        learner.trees_ = [TreeNode.from_dict(t) for t in params["trees"]]
        learner.n_features_ = n_features
        return learner
    if kind == "gbdt":
        learner = GradientBoostedTrees(GbdtConfig(**config))
        learner.f0_ = float(params["f0"])
        learner.trees_ = [TreeNode.from_dict(t) for t in params["trees"]]
        learner.n_features_ = n_features
        return learner
    if kind == "logreg":
        learner = LogisticRegression(C=config["C"], max_iters=config["max_iters"],
                                     tol=config["tol"])
        learner.weights_ = np.asarray(params["weights"], dtype=np.float64)
        learner.bias_ = float(params["bias"])
        return learner
    if kind == "gnb":
        learner = GaussianNaiveBayes(var_smoothing=config["var_smoothing"])
        learner.classes_ = np.asarray(params["classes"], dtype=np.int64)
        learner.theta_ = np.asarray(params["theta"], dtype=np.float64)
        learner.var_ = np.asarray(params["var"], dtype=np.float64)
        learner.priors_ = np.asarray(params["priors"], dtype=np.float64)
        return learner
    if kind == "mlp":
        learner = MlpClassifier(hidden=tuple(config["layers"]), epochs=config["epochs"],
                                lr=config["lr"], batch_size=config["batch_size"],
                                seed=config["seed"])
        learner.weights_ = [np.asarray(w, dtype=np.float64) for w in params["weights"]]
        learner.biases_ = [np.asarray(b, dtype=np.float64) for b in params["biases"]]
        return learner
    raise ValueError(f"unknown model kind {kind!r}")


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "model_id": model.model_id,
        "kind": model.kind,
        "config": model.config,
        "parameters": _parameters(model),
        "n_features": model.n_features,
        "validation_accuracy": model.validation_accuracy,
        "validation_auc": model.validation_auc,
        "schema_version": SCHEMA_VERSION,
    }


def model_from_dict(doc: dict) -> TrainedModel:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    n_features = int(doc["n_features"])
    learner = _rebuild_learner(doc["kind"], doc["config"], doc["parameters"], n_features)
    return TrainedModel(
        model_id=doc["model_id"],
        kind=doc["kind"],
        config=doc["config"],
        learner=learner,
        n_features=n_features,
        validation_accuracy=float(doc["validation_accuracy"]),
        validation_auc=float(doc["validation_auc"]),
    )


def dumps(model: TrainedModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))


def loads(text: str) -> TrainedModel:
    return model_from_dict(json.loads(text))


def save_model(model: TrainedModel, path) -> Path:
    path = Path(path)
    path.write_text(dumps(model) + "\n", encoding="utf-8")
    return path


def load_model(path) -> TrainedModel:
    return loads(Path(path).read_text(encoding="utf-8"))
