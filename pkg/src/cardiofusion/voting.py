"""Hard-majority and weighted soft voting over per-sample predictions.

Voter outputs persist as CSV rows `sample_id,voter_id,probability,label`,
the same layout the LLM prediction files use, so ML and LLM voters feed
the same combiners.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import LengthMismatch, NoVoters, ZeroWeightSum
from .metrics import accuracy, roc_auc
from .models import TrainedModel, predict_proba


@dataclass
class VoterOutput:
    voter_id: str
    kind: str                 # "probabilistic" | "hard"
    scores: np.ndarray        # probabilities in [0,1], or 0/1 labels
    weight: float = 1.0

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.kind not in ("probabilistic", "hard"):
            raise ValueError(f"unknown voter kind {self.kind!r}")
        if not np.isfinite(self.weight) or self.weight < 0:
            raise ValueError(f"{self.voter_id}: weight must be finite and >= 0")
        if self.kind == "hard" and not np.isin(self.scores, (0.0, 1.0)).all():
            raise ValueError(f"{self.voter_id}: hard votes must be 0/1")
        if self.kind == "probabilistic" and (
            (self.scores < 0).any() or (self.scores > 1).any()
        ):
            raise ValueError(f"{self.voter_id}: probabilities must lie in [0,1]")

    @property
    def labels(self) -> np.ndarray:
        return (self.scores >= 0.5).astype(np.int64)


def _check_voters(voters: list[VoterOutput]) -> int:
    if not voters:
        raise NoVoters("at least one voter is required")
    n = voters[0].scores.shape[0]
    for v in voters:
        if v.scores.shape[0] != n:
            raise LengthMismatch(
                f"{v.voter_id}: {v.scores.shape[0]} samples, expected {n}"
            )
    return n


def soft_vote(
    voters: list[VoterOutput], threshold: float = 0.5
) -> tuple[np.ndarray, np.ndarray]:
    """Weighted mean of voter scores, thresholded into labels.

    p(sample) = sum_i w_i s_i / sum_i w_i, where s_i is the voter's
    probability (or its 0/1 label for hard voters).
    """
    _check_voters(voters)
    total = sum(v.weight for v in voters)
    if total <= 0:
        raise ZeroWeightSum("voter weights sum to zero")
    stacked = np.stack([v.scores * v.weight for v in voters])
    proba = stacked.sum(axis=0) / total
    return proba, (proba >= threshold).astype(np.int64)


def hard_vote(voters: list[VoterOutput]) -> np.ndarray:
    """Per-sample majority of hard labels; exact ties resolve to 1.

    Probabilistic voters are thresholded at 0.5 first. The positive
    tie-break is deliberate: a missed disease costs more than a false
    alarm.
    """
    _check_voters(voters)
    votes = np.stack([v.labels for v in voters])
    pos = votes.sum(axis=0)
    return (2 * pos >= votes.shape[0]).astype(np.int64)


def compute_weights(
    models: list[TrainedModel],
    X_val: np.ndarray,
    y_val: np.ndarray,
    mode: str = "accuracy",
) -> list[float]:
    """Per-model voting weight from validation performance.

    mode "accuracy" or "auc" evaluates each model on the validation
    split; "uniform" gives every voter weight 1.
    """
    if mode == "uniform":
        return [1.0 for _ in models]
    if mode not in ("accuracy", "auc"):
        raise ValueError(f"unknown weight mode {mode!r}")
    weights = []
    for model in models:
        proba = predict_proba(model, X_val)
        if mode == "accuracy":
            weights.append(accuracy(y_val, (proba >= 0.5).astype(np.int64)))
        else:
            weights.append(roc_auc(y_val, proba)[0])
    return weights


VOTES_CSV_COLUMNS = ("sample_id", "voter_id", "probability", "label")


def save_votes_csv(path, sample_ids, voter_id: str, probabilities, labels) -> Path:
    """Append-free write of one voter's predictions, ordered by sample_id."""
    path = Path(path)
    rows = sorted(zip(sample_ids, probabilities, labels), key=lambda r: r[0])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(VOTES_CSV_COLUMNS)
        for sid, p, lab in rows:
            writer.writerow([sid, voter_id, repr(float(p)), int(lab)])
    return path


def load_votes_csv(path) -> tuple[list[int], str, np.ndarray, np.ndarray]:
    """Read one voter's predictions; returns (sample_ids, voter_id, proba, labels)."""
    sample_ids: list[int] = []
    proba: list[float] = []
    labels: list[int] = []
    voter_id = ""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != VOTES_CSV_COLUMNS:
            raise ValueError(f"{path}: expected header {','.join(VOTES_CSV_COLUMNS)}")
        for row in reader:
            sample_ids.append(int(row["sample_id"]))
            voter_id = row["voter_id"]
            proba.append(float(row["probability"]))
            labels.append(int(row["label"]))
    return sample_ids, voter_id, np.asarray(proba), np.asarray(labels, dtype=np.int64)
