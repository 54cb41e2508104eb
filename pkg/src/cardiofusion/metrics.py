"""Evaluation primitives: accuracy, rank-based ROC-AUC, confusion counts,
and tabular/SVG report emission.

The positive class is heart_disease = 1 throughout. Probabilities are
turned into hard labels at threshold 0.5 unless stated otherwise.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyInput, LengthMismatch, SingleClass, UnwritablePath


def _check_lengths(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size == 0 or b.size == 0:
        raise EmptyInput("need at least one sample")
    if a.shape[0] != b.shape[0]:
        raise LengthMismatch(f"{a.shape[0]} labels vs {b.shape[0]} values")
    return a, b


def accuracy(y_true, y_pred) -> float:
    """Fraction of exact label matches."""
    y_true, y_pred = _check_lengths(y_true, y_pred)
    return float(np.mean(y_true == y_pred))


def _tied_ranks(values: np.ndarray) -> np.ndarray:
    # Average ranks (1-based); equal values share the mean of their ranks.
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def roc_auc(y_true, scores) -> tuple[float, list[tuple[float, float]]]:
    """Area under the ROC curve via rank summation, plus the traced curve.

    Equals the probability that a random positive outranks a random
    negative, with ties counting one half. The returned points run from
    (0, 0) to (1, 1) over all distinct score thresholds, descending.
    """
    y_true, scores = _check_lengths(y_true, scores)
    n_pos = int(np.sum(y_true == 1))
    n_neg = y_true.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC-AUC needs both classes present")

    ranks = _tied_ranks(np.asarray(scores, dtype=np.float64))
    rank_sum_pos = float(ranks[np.asarray(y_true) == 1].sum())
    auc = (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)

    points = [(0.0, 0.0)]
    scores = np.asarray(scores, dtype=np.float64)
    for thr in np.unique(scores)[::-1]:
        pred = scores >= thr
        tp = int(np.sum(pred & (y_true == 1)))
        fp = int(np.sum(pred & (y_true == 0)))
        points.append((fp / n_neg, tp / n_pos))
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    return float(auc), points


@dataclass
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def precision(self) -> tuple[float, bool]:
        denom = self.tp + self.fp
        return (self.tp / denom, False) if denom else (0.0, True)

    def recall(self) -> tuple[float, bool]:
        denom = self.tp + self.fn
        return (self.tp / denom, False) if denom else (0.0, True)

    def f1(self) -> tuple[float, bool]:
        p, p_deg = self.precision()
        r, r_deg = self.recall()
        if p_deg or r_deg or (p + r) == 0.0:
            return 0.0, True
        return 2.0 * p * r / (p + r), False


def confusion(y_true, y_pred) -> ConfusionMatrix:
    y_true, y_pred = _check_lengths(y_true, y_pred)
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


@dataclass
class EvalReport:
    """Per-model evaluation summary; metrics agree with the confusion counts."""

    model_id: str
    accuracy: float
    auc: float
    precision: float
    recall: float
    f1: float
    confusion: ConfusionMatrix
    roc_points: list[tuple[float, float]] = field(default_factory=list)
    degenerate: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "accuracy": self.accuracy,
            "auc": self.auc,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.confusion.tp,
            "fp": self.confusion.fp,
            "tn": self.confusion.tn,
            "fn": self.confusion.fn,
            "degenerate": list(self.degenerate),
        }


def evaluate_scores(model_id: str, y_true, scores, threshold: float = 0.5) -> EvalReport:
    """Build an EvalReport from ground truth and probability scores."""
    y_true, scores = _check_lengths(y_true, scores)
    y_pred = (np.asarray(scores) >= threshold).astype(np.int64)
    cm = confusion(y_true, y_pred)
    auc, points = roc_auc(y_true, scores)
    prec, p_deg = cm.precision()
    rec, r_deg = cm.recall()
    f1, f_deg = cm.f1()
    degenerate = tuple(
        name for name, flag in
        (("precision", p_deg), ("recall", r_deg), ("f1", f_deg)) if flag
    )
    return EvalReport(
        model_id=model_id,
        accuracy=accuracy(y_true, y_pred),
        auc=auc,
        precision=prec,
        recall=rec,
        f1=f1,
        confusion=cm,
        roc_points=points,
        degenerate=degenerate,
    )


REPORT_CSV_COLUMNS = (
    "model_id", "accuracy", "auc", "precision", "recall", "f1",
    "tp", "fp", "tn", "fn",
)


def emit_report(reports: list[EvalReport], out_dir, stem: str = "report",
                svg: bool = False) -> list[Path]:
    """Write reports as CSV and JSON (and optionally ROC SVG), sorted by
    accuracy descending. Returns the written paths."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UnwritablePath(f"cannot create {out_dir}: {exc}") from exc

    ordered = sorted(reports, key=lambda r: (-r.accuracy, r.model_id))
    written = []

    csv_path = out_dir / f"{stem}.csv"
    try:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(REPORT_CSV_COLUMNS)
            for r in ordered:
                d = r.to_dict()
                writer.writerow([d[c] for c in REPORT_CSV_COLUMNS])
    except OSError as exc:
        raise UnwritablePath(f"cannot write {csv_path}: {exc}") from exc
    written.append(csv_path)

    json_path = out_dir / f"{stem}.json"
    docs = []
    for r in ordered:
        doc = r.to_dict()
        doc["roc_points"] = [[fpr, tpr] for fpr, tpr in r.roc_points]
        docs.append(doc)
    json_path.write_text(
        json.dumps(docs, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(json_path)

    if svg and ordered:
        svg_path = out_dir / f"{stem}_roc.svg"
        svg_path.write_text(roc_svg(ordered), encoding="utf-8")
        written.append(svg_path)
    return written


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def roc_svg(reports: list[EvalReport], size: int = 420) -> str:
    """Plain-SVG ROC chart; presentational only."""
    pad, plot = 50, size - 80
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<rect x="{pad}" y="{pad - 20}" width="{plot}" height="{plot}" '
        'fill="none" stroke="#999"/>',
        f'<line x1="{pad}" y1="{pad - 20 + plot}" x2="{pad + plot}" y2="{pad - 20}" '
        'stroke="#ccc" stroke-dasharray="4"/>',
    ]
    for i, rep in enumerate(reports):
        if not rep.roc_points:
            continue
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        pts = " ".join(
            f"{pad + fpr * plot:.1f},{pad - 20 + (1 - tpr) * plot:.1f}"
            for fpr, tpr in rep.roc_points
        )
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{pad + 6}" y="{pad + 14 * i}" font-size="11" fill="{color}">'
            f"{rep.model_id} (AUC {rep.auc:.3f})</text>"
        )
    parts.append(
        f'<text x="{pad + plot / 2 - 60}" y="{size - 8}" font-size="12">false positive rate</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def confusion_svg(reports: list[EvalReport], cell: int = 60) -> str:
    """Side-by-side confusion heatmaps; presentational only."""
    width = len(reports) * (2 * cell + 60) + 20
    height = 2 * cell + 90
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i, rep in enumerate(reports):
        ox = 20 + i * (2 * cell + 60)
        cm = rep.confusion
        grid = ((cm.tn, cm.fp), (cm.fn, cm.tp))
        peak = max(cm.total, 1)
        parts.append(f'<text x="{ox}" y="20" font-size="12">{rep.model_id}</text>')
        for r in range(2):
            for c in range(2):
                v = grid[r][c]
                shade = int(255 - 175 * (v / peak))
                parts.append(
                    f'<rect x="{ox + c * cell}" y="{30 + r * cell}" width="{cell}" '
                    f'height="{cell}" fill="rgb({shade},{shade},255)" stroke="#666"/>'
                )
                parts.append(
                    f'<text x="{ox + c * cell + cell / 2 - 10}" y="{30 + r * cell + cell / 2 + 4}" '
                    f'font-size="12">{v}</text>'
                )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
