"""Pipeline entry point.

    cardiofusion <prepare|train|evaluate|llm-predict|vote|fuse|report>
                 --config <path> [--offline] [--seed N] [--out DIR]

Each command reads the artifacts of the previous stage from the output
directory and writes its own; re-running a command with unchanged inputs
produces byte-identical outputs. Timestamps only ever go to the run.log
sidecar. Exit codes are stable per error class (see EXIT_CODES).
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import sys
from pathlib import Path

import numpy as np

from . import dataset as ds
from . import fusion as fus
from . import llm as llm_mod
from .config import RunConfig, load_config
from .errors import (
    CardioFusionError,
    DegenerateClass,
    EmptyData,
    EmptyFile,
    EmptyInput,
    EmptyMatrix,
    ExemplarLeakage,
    HttpError,
    InvalidConfig,
    LengthMismatch,
    MissingArtifact,
    MissingColumn,
    MissingExemplars,
    OfflineMiss,
    RateLimited,
    ShapeMismatch,
    SingleClass,
    Timeout,
    Unparseable,
    UnparseableValue,
)
from .metrics import (
    accuracy as _acc,
    confusion_svg,
    emit_report,
    evaluate_scores,
    roc_auc as _auc,
    roc_svg,
)
from .models import (
    ForestConfig,
    load_model,
    predict_proba,
    preset,
    save_model,
    train_gbdt,
    train_gnb,
    train_logreg,
    train_mlp,
    train_random_forest,
)
from .voting import VoterOutput, compute_weights, hard_vote, load_votes_csv, soft_vote

GBDT_SEED_OFFSETS = {"xgb_like": 1, "lgbm_like": 2, "catboost_like": 3, "gbm_like": 4}

REPORT_FILES = (
    "report_models.csv", "report_models.json",
    "report_ml_voting.csv", "report_ml_voting.json",
    "report_llm_voting.csv", "report_llm_voting.json",
    "report_fusion.json",
)


def _out(config: RunConfig) -> Path:
    path = Path(config.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _log(config: RunConfig, message: str) -> None:
    stamp = _dt.datetime.now().isoformat(timespec="seconds")
    with open(_out(config) / "run.log", "a", encoding="utf-8") as fh:
        fh.write(f"{stamp} {message}\n")


def _require(path: Path, producing_command: str) -> Path:
    if not path.exists():
        raise MissingArtifact(path, producing_command)
    return path


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# prepare

def cmd_prepare(config: RunConfig) -> None:
    out = _out(config)
    records = ds.load_dataset(config.dataset)
    X, y = ds.encode(records)
    split = ds.stratified_split(X, y, config.split_ratios, config.seed)
    scaler = ds.fit_minmax(split.X_train)

    scaled = {
        "train": (split.idx_train, ds.apply_minmax(scaler, split.X_train), split.y_train),
        "validation": (split.idx_val, ds.apply_minmax(scaler, split.X_val), split.y_val),
        "test": (split.idx_test, ds.apply_minmax(scaler, split.X_test), split.y_test),
    }

    rows = []
    for name, (idx, Xs, ys) in scaled.items():
        for i, sid in enumerate(idx):
            rows.append((int(sid), name, int(ys[i]), Xs.values[i]))
    rows.sort(key=lambda r: r[0])
    with open(out / "split.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "split", "HeartDisease", *X.column_names])
        for sid, name, label, values in rows:
            writer.writerow([sid, name, label, *[repr(float(v)) for v in values]])

    _write_json(out / "scaler.json", {
        "column_names": list(scaler.column_names),
        "min": scaler.min_.tolist(),
        "max": scaler.max_.tolist(),
    })

    X_train_scaled = scaled["train"][1]
    if config.smote.enabled:
        X_bal, y_bal = ds.smote(X_train_scaled, split.y_train,
                                k=config.smote.k, seed=config.seed)
    else:
        X_bal, y_bal = X_train_scaled, split.y_train
    with open(out / "train_balanced.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["HeartDisease", *X.column_names])
        for label, values in zip(y_bal, X_bal.values):
            writer.writerow([int(label), *[repr(float(v)) for v in values]])

    _log(config, f"prepare ok rows={len(records)} train={X_bal.n_rows}")
    print(f"prepared {len(records)} records -> {out / 'split.csv'} "
          f"(balanced train {X_bal.n_rows} rows)")


def _load_split(config: RunConfig):
    out = _out(config)
    path = _require(out / "split.csv", "prepare")
    ids = {"train": [], "validation": [], "test": []}
    X = {"train": [], "validation": [], "test": []}
    y = {"train": [], "validation": [], "test": []}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns = tuple(header[3:])
        for row in reader:
            name = row[1]
            ids[name].append(int(row[0]))
            y[name].append(int(row[2]))
            X[name].append([float(v) for v in row[3:]])
    return (
        {k: np.asarray(v) for k, v in ids.items()},
        {k: np.asarray(v, dtype=np.float64) for k, v in X.items()},
        {k: np.asarray(v, dtype=np.int64) for k, v in y.items()},
        columns,
    )


def _load_balanced(config: RunConfig):
    path = _require(_out(config) / "train_balanced.csv", "prepare")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [(int(r[0]), [float(v) for v in r[1:]]) for r in reader]
    y = np.asarray([r[0] for r in rows], dtype=np.int64)
    X = np.asarray([r[1] for r in rows], dtype=np.float64)
    return X, y


# --------------------------------------------------------------------------
# train

def _train_one(name: str, X, y, seed: int):
    if name == "random_forest":
        return train_random_forest(X, y, ForestConfig(seed=seed), name)
    if name in GBDT_SEED_OFFSETS:
        cfg = preset(name)
        cfg.seed = seed + GBDT_SEED_OFFSETS[name]
        return train_gbdt(X, y, cfg, name)
    if name == "logreg":
        return train_logreg(X, y)
    if name == "gnb":
        return train_gnb(X, y)
    if name == "mlp":
        return train_mlp(X, y, seed=seed)
    raise InvalidConfig(f"unknown model preset {name!r}")


def cmd_train(config: RunConfig) -> None:
    out = _out(config)
    _, X, y, _ = _load_split(config)
    X_bal, y_bal = _load_balanced(config)

    for name in config.models:
        model = _train_one(name, X_bal, y_bal, config.seed)
        proba = predict_proba(model, X["validation"])
        model.validation_accuracy = _acc(y["validation"], (proba >= 0.5).astype(int))
        model.validation_auc = _auc(y["validation"], proba)[0]
        save_model(model, out / f"model_{name}.json")
        print(f"trained {name}: validation accuracy "
              f"{model.validation_accuracy:.4f}, AUC {model.validation_auc:.4f}")
    _log(config, f"train ok models={len(config.models)}")


def _load_models(config: RunConfig, names=None) -> dict:
    out = _out(config)
    models = {}
    for name in names or config.models:
        models[name] = load_model(_require(out / f"model_{name}.json", "train"))
    return models


# --------------------------------------------------------------------------
# evaluate

def cmd_evaluate(config: RunConfig) -> None:
    out = _out(config)
    _, X, y, _ = _load_split(config)
    models = _load_models(config)
    reports = []
    for name, model in models.items():
        proba = predict_proba(model, X["test"])
        reports.append(evaluate_scores(name, y["test"], proba))
    emit_report(reports, out, stem="report_models")
    for rep in sorted(reports, key=lambda r: -r.accuracy):
        print(f"{rep.model_id:15s} test accuracy {rep.accuracy:.4f}  AUC {rep.auc:.4f}")
    _log(config, f"evaluate ok models={len(reports)}")


# --------------------------------------------------------------------------
# llm-predict

def _slug(model_id: str) -> str:
    return model_id.replace("/", "_").replace(" ", "_")


def preds_filename(model_id: str, mode: str) -> str:
    return f"preds_{_slug(model_id)}_{mode}.csv"


def _make_client(config: RunConfig) -> llm_mod.ChatClient:
    cache = llm_mod.ResponseCache(_out(config) / config.llm.cache_dir)
    if config.llm.fixture_bundle:
        bundle = Path(config.llm.fixture_bundle)
        if bundle.exists():
            cache.warm_from_bundle(bundle)
        elif config.llm.offline:
            raise MissingArtifact(bundle, "llm-predict (fixture bundle missing)")
    return llm_mod.ChatClient(
        base_url=config.llm.base_url,
        cache=cache,
        offline=config.llm.offline,
    )


def cmd_llm_predict(config: RunConfig) -> None:
    out = _out(config)
    ids, _, _, _ = _load_split(config)
    records = ds.load_dataset(config.dataset)
    client = _make_client(config)

    train_records = [records[i] for i in ids["train"]]
    eval_ids = np.concatenate([ids["validation"], ids["test"]])
    eval_records = [records[i] for i in eval_ids]

    summary: dict = {}
    for mode in config.modes():
        spec = llm_mod.PromptSpec(mode=mode, n_exemplars=config.llm.n_exemplars,
                                  exemplar_seed=config.seed)
        exemplars = ()
        if mode == "few_shot":
            exemplars = llm_mod.select_exemplars(
                train_records, config.llm.n_exemplars, config.seed)
        predictions, report = llm_mod.predict_batch(
            eval_records, [int(i) for i in eval_ids],
            config.llm.model_ids[mode], spec, client, exemplars,
            max_workers=config.llm.concurrency,
        )
        by_model: dict[str, list] = {}
        for pred in predictions:
            by_model.setdefault(pred.model_id, []).append(pred)
        for model_id, preds in by_model.items():
            path = out / preds_filename(model_id, mode)
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["sample_id", "voter_id", "probability", "label"])
                for p in sorted(preds, key=lambda p: p.sample_id):
                    writer.writerow([p.sample_id, f"{model_id}#{mode}",
                                     repr(float(p.label)), p.label])
        summary[mode] = {
            "accuracy": report.accuracy,
            "unparseable": report.unparseable,
            "transport_errors": report.transport_errors,
            "cache_hits": report.cache_hits,
            "network_calls": report.network_calls,
        }
        print(f"{mode}: {len(by_model)} models, cache hits "
              f"{report.cache_hits}, network calls {report.network_calls}")
    _write_json(out / "llm_report.json", summary)
    _log(config, "llm-predict ok")


# --------------------------------------------------------------------------
# vote

def _subset(sample_ids, values, wanted_ids) -> np.ndarray:
    lookup = {sid: v for sid, v in zip(sample_ids, values)}
    return np.asarray([lookup[w] for w in wanted_ids if w in lookup])


def cmd_vote(config: RunConfig) -> None:
    out = _out(config)
    ids, X, y, _ = _load_split(config)
    weights_doc: dict = {}

    # ML ensemble: weighted soft + hard over the configured tree voters.
    models = _load_models(config, config.voting.ml_voters)
    voter_models = [models[m] for m in config.voting.ml_voters]
    ml_weights = compute_weights(voter_models, X["validation"], y["validation"],
                                 config.voting.ml_weight_mode)

    def ml_voters_on(split_name: str) -> list[VoterOutput]:
        return [
            VoterOutput(m, "probabilistic", predict_proba(models[m], X[split_name]), w)
            for m, w in zip(config.voting.ml_voters, ml_weights)
        ]

    test_voters = ml_voters_on("test")
    soft_proba, soft_labels = soft_vote(test_voters, config.voting.threshold)
    hard_labels = hard_vote(test_voters)

    val_voters = ml_voters_on("validation")
    val_soft_proba, val_soft_labels = soft_vote(val_voters, config.voting.threshold)
    val_hard_labels = hard_vote(val_voters)
    weights_doc["ml_soft"] = _acc(y["validation"], val_soft_labels)
    weights_doc["ml_hard"] = _acc(y["validation"], val_hard_labels)
    weights_doc["ml_member_weights"] = dict(zip(config.voting.ml_voters, ml_weights))

    with open(out / "votes_ml.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "voter_id", "probability", "label"])
        for sid, p, lab in zip(ids["test"], soft_proba, soft_labels):
            writer.writerow([int(sid), "ml_soft", repr(float(p)), int(lab)])
        for sid, lab in zip(ids["test"], hard_labels):
            writer.writerow([int(sid), "ml_hard", repr(float(lab)), int(lab)])

    ml_reports = [
        evaluate_scores("ml_soft_weighted", y["test"], soft_proba,
                        config.voting.threshold),
        evaluate_scores("ml_hard", y["test"], hard_labels.astype(np.float64)),
    ]
    emit_report(ml_reports, out, stem="report_ml_voting")
    for rep in ml_reports:
        print(f"{rep.model_id:18s} test accuracy {rep.accuracy:.4f}  AUC {rep.auc:.4f}")

    # LLM ensembles per prompting mode, weighted by validation accuracy.
    llm_reports = []
    llm_rows = []
    for mode in config.modes():
        model_ids = config.llm.model_ids[mode]
        per_model = {}
        for model_id in model_ids:
            path = _require(out / preds_filename(model_id, mode), "llm-predict")
            sample_ids, _, proba, labels = load_votes_csv(path)
            per_model[model_id] = (sample_ids, labels)
        covered = set(ids["validation"]) | set(ids["test"])
        for sample_ids, _ in per_model.values():
            covered &= set(sample_ids)
        val_ids = [int(s) for s in ids["validation"] if s in covered]
        test_ids = [int(s) for s in ids["test"] if s in covered]

        def voters_for(wanted, weights) -> list[VoterOutput]:
            return [
                VoterOutput(m, "hard", _subset(*per_model[m], wanted), w)
                for m, w in zip(model_ids, weights)
            ]

        y_val = _subset(ids["validation"], y["validation"], val_ids)
        y_test = _subset(ids["test"], y["test"], test_ids)
        if config.voting.llm_weight_mode == "uniform":
            member_weights = [1.0] * len(model_ids)
        else:
            member_weights = []
            for m in model_ids:
                votes_val = _subset(*per_model[m], val_ids)
                if config.voting.llm_weight_mode == "accuracy":
                    member_weights.append(_acc(y_val, votes_val))
                else:
                    member_weights.append(_auc(y_val, votes_val.astype(float))[0])

        test_voters = voters_for(test_ids, member_weights)
        soft_p, soft_l = soft_vote(test_voters, config.voting.threshold)
        hard_l = hard_vote(test_voters)
        val_voters = voters_for(val_ids, member_weights)
        v_soft_p, v_soft_l = soft_vote(val_voters, config.voting.threshold)
        v_hard_l = hard_vote(val_voters)
        weights_doc[f"{mode}_soft"] = _acc(y_val, v_soft_l)
        weights_doc[f"{mode}_hard"] = _acc(y_val, v_hard_l)
        weights_doc[f"{mode}_member_weights"] = dict(zip(model_ids, member_weights))

        llm_reports.append(evaluate_scores(f"{mode}_soft", y_test, soft_p,
                                           config.voting.threshold))
        llm_reports.append(evaluate_scores(f"{mode}_hard", y_test,
                                           hard_l.astype(np.float64)))
        for sid, p, lab in zip(test_ids, soft_p, soft_l):
            llm_rows.append([sid, f"llm_{mode}_soft", repr(float(p)), int(lab)])
        for sid, lab in zip(test_ids, hard_l):
            llm_rows.append([sid, f"llm_{mode}_hard", repr(float(lab)), int(lab)])

    with open(out / "votes_llm.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "voter_id", "probability", "label"])
        writer.writerows(llm_rows)
    emit_report(llm_reports, out, stem="report_llm_voting")
    for rep in llm_reports:
        print(f"{rep.model_id:18s} test accuracy {rep.accuracy:.4f}  AUC {rep.auc:.4f}")

    _write_json(out / "ensemble_weights.json", weights_doc)
    _log(config, "vote ok")


# --------------------------------------------------------------------------
# fuse

def _votes_by_voter(path: Path) -> dict[str, dict[int, tuple[float, int]]]:
    table: dict[str, dict[int, tuple[float, int]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            table.setdefault(row["voter_id"], {})[int(row["sample_id"])] = (
                float(row["probability"]), int(row["label"]))
    return table


def fusion_inputs(config: RunConfig) -> list[tuple[int, fus.FusionInput]]:
    """Per-test-sample fusion inputs assembled from the vote artifacts."""
    out = _out(config)
    ids, _, _, _ = _load_split(config)
    ml_votes = _votes_by_voter(_require(out / "votes_ml.csv", "vote"))
    llm_votes = _votes_by_voter(_require(out / "votes_llm.csv", "vote"))
    weights = json.loads(_require(out / "ensemble_weights.json", "vote")
                         .read_text(encoding="utf-8"))
    records = ds.load_dataset(config.dataset)

    pairs = []
    for sid in (int(s) for s in ids["test"]):
        llm_voters = []
        for mode in config.modes():
            for kind in ("soft", "hard"):
                voter_id = f"llm_{mode}_{kind}"
                entry = llm_votes.get(voter_id, {}).get(sid)
                if entry is not None:
                    llm_voters.append(fus.FusionVoter(
                        voter_id, entry[0], weights[f"{mode}_{kind}"]))
        pairs.append((sid, fus.FusionInput(
            ml_soft=fus.FusionVoter("ml_soft", ml_votes["ml_soft"][sid][0],
                                    weights["ml_soft"]),
            ml_hard=fus.FusionVoter("ml_hard", float(ml_votes["ml_hard"][sid][1]),
                                    weights["ml_hard"]),
            llm_votes=llm_voters,
            patient=records[sid],
        )))
    return pairs


def cmd_fuse(config: RunConfig) -> None:
    out = _out(config)
    _, _, y, _ = _load_split(config)

    meta_client = None
    if config.fusion.meta_model:
        meta_client = _make_client(config)

    results = []
    risk_scores = []
    labels = []
    meta_count = 0
    for sid, fusion_input in fusion_inputs(config):
        result = fus.fuse(fusion_input, config.fusion.advisory_bands)
        if meta_client is not None:
            result.meta_verdict = fus.meta_decide(
                meta_client, config.fusion.meta_model, fusion_input, result)
            if result.meta_verdict is not None:
                meta_count += 1
        results.append(fus.result_to_dict(sid, result))
        risk_scores.append(result.risk_score)
        labels.append(result.label)

    (out / "fusion_results.json").write_text(
        json.dumps(results, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    report = evaluate_scores("fusion", y["test"], np.asarray(risk_scores),
                             threshold=0.5)
    advisory_counts: dict[str, int] = {}
    for doc in results:
        advisory_counts[doc["advisory"]] = advisory_counts.get(doc["advisory"], 0) + 1
    _write_json(out / "report_fusion.json", {
        "accuracy": report.accuracy,
        "auc": report.auc,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "confusion": {"tp": report.confusion.tp, "fp": report.confusion.fp,
                      "tn": report.confusion.tn, "fn": report.confusion.fn},
        "n_samples": len(results),
        "advisory_counts": advisory_counts,
        "meta_verdicts_recorded": meta_count,
        "disclaimer": fus.DISCLAIMER,
    })
    print(f"fusion: test accuracy {report.accuracy:.4f}  AUC {report.auc:.4f}  "
          f"meta verdicts {meta_count}/{len(results)}")
    _log(config, "fuse ok")


# --------------------------------------------------------------------------
# report

def cmd_report(config: RunConfig) -> None:
    out = _out(config)
    producing = {
        "report_models.csv": "evaluate", "report_models.json": "evaluate",
        "report_ml_voting.csv": "vote", "report_ml_voting.json": "vote",
        "report_llm_voting.csv": "vote", "report_llm_voting.json": "vote",
        "report_fusion.json": "fuse",
    }
    docs = {}
    for name in REPORT_FILES:
        path = _require(out / name, producing[name])
        if name.endswith(".json"):
            docs[name] = json.loads(path.read_text(encoding="utf-8"))

    summary = {
        "individual_models": docs["report_models.json"],
        "ml_voting": docs["report_ml_voting.json"],
        "llm_voting": docs["report_llm_voting.json"],
        "fusion": docs["report_fusion.json"],
    }
    llm_report = out / "llm_report.json"
    if llm_report.exists():
        summary["llm_models"] = json.loads(llm_report.read_text(encoding="utf-8"))
    _write_json(out / "report_summary.json", summary)

    # Presentational extras; no contract on their contents.
    def to_report(doc):
        from .metrics import ConfusionMatrix, EvalReport
        return EvalReport(
            model_id=doc["model_id"], accuracy=doc["accuracy"], auc=doc["auc"],
            precision=doc["precision"], recall=doc["recall"], f1=doc["f1"],
            confusion=ConfusionMatrix(doc["tp"], doc["fp"], doc["tn"], doc["fn"]),
            roc_points=[tuple(p) for p in doc.get("roc_points", [])],
        )

    model_reports = [to_report(d) for d in docs["report_models.json"]]
    (out / "roc_curves.svg").write_text(roc_svg(model_reports), encoding="utf-8")
    voting_reports = [to_report(d) for d in docs["report_ml_voting.json"]]
    (out / "confusion.svg").write_text(confusion_svg(voting_reports), encoding="utf-8")

    print(f"report bundle written to {out} "
          f"({len(REPORT_FILES)} report files + summary + SVG)")
    _log(config, "report ok")


# --------------------------------------------------------------------------

COMMANDS = {
    "prepare": cmd_prepare,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "llm-predict": cmd_llm_predict,
    "vote": cmd_vote,
    "fuse": cmd_fuse,
    "report": cmd_report,
}

EXIT_CODES: list[tuple[tuple, int]] = [
    ((InvalidConfig,), 2),
    ((MissingArtifact,), 3),
    ((EmptyFile, MissingColumn, UnparseableValue, EmptyMatrix, DegenerateClass,
      EmptyData, SingleClass, ShapeMismatch, LengthMismatch, EmptyInput), 4),
    ((HttpError, Timeout, RateLimited, OfflineMiss, Unparseable,
      MissingExemplars, ExemplarLeakage), 5),
    ((CardioFusionError,), 6),
]


def exit_code_for(exc: Exception) -> int:
    for classes, code in EXIT_CODES:
        if isinstance(exc, classes):
            return code
    return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cardiofusion",
        description="Heart-disease prediction pipeline: classical ensembles, "
                    "LLM verdicts, and their fusion.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--offline", action="store_true",
                        help="forbid network use; rely on the response cache")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--out", default=None, help="override output directory")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.seed = args.seed
        if args.out is not None:
            config.output_dir = args.out
        if args.offline:
            config.llm.offline = True
        COMMANDS[args.command](config)
    except Exception as exc:  # noqa: BLE001 - single translation point to exit codes
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
