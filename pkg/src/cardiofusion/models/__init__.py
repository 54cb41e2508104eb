from .base import (
    TrainedModel,
    predict_labels,
    predict_proba,
    train_decision_tree,
    train_gbdt,
    train_gnb,
    train_logreg,
    train_mlp,
    train_random_forest,
)
from .bayes import GaussianNaiveBayes
from .cart import TreeNode, best_split, predict_tree, train_cart
from .forest import ForestConfig, RandomForest
from .gbdt import PRESETS, GbdtConfig, GradientBoostedTrees, preset
from .linear import LogisticRegression
from .mlp import MlpClassifier
from .store import dumps, load_model, loads, model_from_dict, model_to_dict, save_model

__all__ = [
    "ForestConfig", "GaussianNaiveBayes", "GbdtConfig", "GradientBoostedTrees",
    "LogisticRegression", "MlpClassifier", "PRESETS", "RandomForest",
    "TrainedModel", "TreeNode", "best_split", "dumps", "load_model", "loads",
    "model_from_dict", "model_to_dict", "predict_labels", "predict_proba",
    "predict_tree", "preset", "save_model", "train_cart", "train_decision_tree",
    "train_gbdt", "train_gnb", "train_logreg", "train_mlp", "train_random_forest",
]
