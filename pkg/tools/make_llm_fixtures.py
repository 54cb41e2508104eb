#!/usr/bin/env python3
"""Generate the recorded chat-completion fixtures for offline replay.

Live hosted-model traffic is not reproducible offline, so the bundle is
produced by seeded simulators: each simulated model scores a patient
with its own noisy clinician-style heuristic (a few models also read the
"max HR low despite age" pattern) and answers with a one-token verdict
in a fixture response body. Keys are the same model+prompt hashes the
runtime cache uses, so a warm cache replays bit-identically.

The meta-reviewer fixtures depend on the fused risk scores, so this
script runs the pipeline stages in order into --workdir and appends the
meta entries once the vote artifacts exist.

Usage: python tools/make_llm_fixtures.py [--out fixtures/llm_responses.jsonl]
"""
from __future__ import annotations

import argparse
import hashlib
import json
import shutil
from pathlib import Path

import numpy as np


from cardiofusion import cli as cf_cli
from cardiofusion import dataset as ds
from cardiofusion import fusion as fus
from cardiofusion import llm as llm_mod
from cardiofusion.config import load_config

FIXTURE_SEED = 7040
CREATED_STAMP = 1755000000

POSITIVE_PHRASES = ["1", "1", "1", "Prediction: 1", "1 (heart disease likely)"]
NEGATIVE_PHRASES = ["0", "0", "0", "Prediction: 0", "0 (no heart disease)"]

# Simulated hosted-model behaviour is tiered by how ambiguous a case is:
# "contra" cases carry labels their features contradict (every model gets
# those wrong together), "ambiguous" cases sit near the clinical boundary
# (models split narrowly), and "clear" cases fail only through
# idiosyncratic slips. Each tier has (p_correct, error correlation).
TIER_PROFILES = {
    "zero_shot": {"contra": (0.45, 0.20), "ambiguous": (0.76, 0.08),
                  "clear": (0.82, 0.05)},
    "few_shot": {"contra": (0.45, 0.20), "ambiguous": (0.70, 0.08),
                 "clear": (0.76, 0.05)},
}
AMBIGUOUS_SHARE = 0.25   # fraction of positive-margin cases near the boundary
PER_MODEL_SKEW = 0.03    # per-model jitter on tier hit rates

_NORMAL = __import__("statistics").NormalDist()


def sample_tiers(margins: np.ndarray) -> np.ndarray:
    """Tier per sample from the label-consistent generative margin."""
    positive = margins[margins > 0]
    cut = np.quantile(positive, AMBIGUOUS_SHARE) if positive.size else 0.0
    tiers = np.where(margins <= 0, "contra",
                     np.where(margins < cut, "ambiguous", "clear"))
    return tiers


def shared_shocks(sample_ids: list[int], mode: str) -> dict[int, float]:
    """One latent difficulty draw per (sample, mode), shared by all models."""
    shocks = {}
    for sid in sample_ids:
        tag = f"{FIXTURE_SEED}:shock:{mode}:{sid}"
        seed = int(hashlib.sha256(tag.encode()).hexdigest()[:8], 16)
        shocks[sid] = float(np.random.default_rng(seed).standard_normal())
    return shocks


def simulate_verdicts(
    labels: dict[int, int],
    tiers: dict[int, str],
    shocks: dict[int, float],
    sample_ids: list[int],
    model_id: str,
    mode: str,
) -> dict[int, int]:
    """Deterministic verdicts via a Gaussian copula per tier: a model is
    correct when Phi(sqrt(rho)*shared + sqrt(1-rho)*own) < p_correct."""
    tag = f"{FIXTURE_SEED}:{mode}:{model_id}"
    rng = np.random.default_rng(int(hashlib.sha256(tag.encode()).hexdigest()[:8], 16))
    skew = rng.normal(0.0, PER_MODEL_SKEW)

    verdicts = {}
    for sid in sample_ids:
        p_correct, rho = TIER_PROFILES[mode][tiers[sid]]
        p_correct = min(max(p_correct + skew, 0.02), 0.995)
        z = np.sqrt(rho) * shocks[sid] + np.sqrt(1.0 - rho) * rng.standard_normal()
        correct = _NORMAL.cdf(z) < p_correct
        verdicts[sid] = labels[sid] if correct else 1 - labels[sid]
    return verdicts


def response_body(model_id: str, content: str, prompt_tokens: int) -> str:
    gen_id = hashlib.sha256(f"{model_id}:{content}:{prompt_tokens}".encode()).hexdigest()[:16]
    return json.dumps({
        "id": f"gen-{gen_id}",
        "object": "chat.completion",
        "created": CREATED_STAMP,
        "model": model_id,
        "provider": "recorded-fixture",
        "choices": [{
            "index": 0,
            "message": {"role": "assistant", "content": content},
            "finish_reason": "stop",
        }],
        "usage": {"prompt_tokens": prompt_tokens,
                  "completion_tokens": 1,
                  "total_tokens": prompt_tokens + 1},
    }, sort_keys=True, separators=(",", ":"))


def phrase_for(label: int, rng: np.random.Generator) -> str:
    pool = POSITIVE_PHRASES if label else NEGATIVE_PHRASES
    return pool[int(rng.integers(0, len(pool)))]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fixtures/llm_responses.jsonl")
    parser.add_argument("--config", default="configs/offline.json")
    parser.add_argument("--workdir", default="build/fixture_run")
    parser.add_argument("--golden", default="fixtures/golden_chat_request.json")
    args = parser.parse_args()

    config = load_config(args.config)
    workdir = Path(args.workdir)
    if workdir.exists():
        shutil.rmtree(workdir)
    config.output_dir = str(workdir)
    config.llm.fixture_bundle = args.out

    records = ds.load_dataset(config.dataset)
    from make_dataset import generate_full
    rows, margins = generate_full()
    if [r[-1] for r in rows] != [r.heart_disease for r in records]:
        raise SystemExit("dataset fixture out of sync with make_dataset; regenerate it")
    tiers = sample_tiers(margins)

    cf_cli.cmd_prepare(config)
    ids, _, _, _ = cf_cli._load_split(config)
    train_records = [records[i] for i in ids["train"]]
    eval_ids = [int(i) for i in np.concatenate([ids["validation"], ids["test"]])]
    eval_records = [records[i] for i in eval_ids]
    labels = {sid: records[sid].heart_disease for sid in eval_ids}
    tier_of = {sid: str(tiers[sid]) for sid in eval_ids}

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    entries: list[tuple[str, str]] = []
    phrase_rng = np.random.default_rng(FIXTURE_SEED)

    for mode in ("zero_shot", "few_shot"):
        spec = llm_mod.PromptSpec(mode=mode, n_exemplars=config.llm.n_exemplars,
                                  exemplar_seed=config.seed)
        exemplars = ()
        if mode == "few_shot":
            exemplars = llm_mod.select_exemplars(train_records,
                                                 config.llm.n_exemplars, config.seed)
        shocks = shared_shocks(eval_ids, mode)
        for model_id in config.llm.model_ids[mode]:
            verdicts = simulate_verdicts(labels, tier_of, shocks, eval_ids,
                                         model_id, mode)
            hits = sum(int(verdicts[sid] == labels[sid]) for sid in eval_ids)
            print(f"{mode:9s} {model_id:42s} accuracy {hits / len(eval_ids):.4f}")
            for sid, record in zip(eval_ids, eval_records):
                messages = llm_mod.build_prompt(record, spec, exemplars)
                key = llm_mod.prompt_key(model_id, messages)
                content = phrase_for(verdicts[sid], phrase_rng)
                tokens = sum(len(m["content"].split()) for m in messages)
                entries.append((key, response_body(model_id, content, tokens)))

    with open(out_path, "w", encoding="utf-8") as fh:
        for key, body in entries:
            fh.write(json.dumps({"key": key, "body": body}, sort_keys=True) + "\n")
    print(f"wrote {len(entries)} model fixtures to {out_path}")

    # Golden wire-format fixture: first test sample, first zero-shot model.
    golden_record = records[int(ids["test"][0])]
    golden_messages = llm_mod.build_prompt(
        golden_record, llm_mod.PromptSpec(mode="zero_shot"))
    golden_request = llm_mod.ChatRequest(
        model=config.llm.model_ids["zero_shot"][0], messages=golden_messages)
    Path(args.golden).write_text(llm_mod.request_body(golden_request) + "\n",
                                 encoding="utf-8")
    print(f"wrote golden request to {args.golden}")

    # Meta-reviewer fixtures need the fused committee context, so run the
    # pipeline (offline against the bundle just written) up to the vote.
    cf_cli.cmd_train(config)
    cf_cli.cmd_evaluate(config)
    cf_cli.cmd_llm_predict(config)
    cf_cli.cmd_vote(config)

    meta_model = config.fusion.meta_model
    if meta_model:
        meta_rng = np.random.default_rng(FIXTURE_SEED + 1)
        meta_entries = []
        for sid, fusion_input in cf_cli.fusion_inputs(config):
            result = fus.fuse(fusion_input, config.fusion.advisory_bands)
            messages = fus.build_meta_prompt(fusion_input, result)
            key = llm_mod.prompt_key(meta_model, messages)
            blended = 0.55 * fusion_input.ml_soft.score + 0.45 * result.risk_score
            verdict = int(blended >= 0.5)
            content = phrase_for(verdict, meta_rng)
            tokens = sum(len(m["content"].split()) for m in messages)
            meta_entries.append((key, response_body(meta_model, content, tokens)))
        with open(out_path, "a", encoding="utf-8") as fh:
            for key, body in meta_entries:
                fh.write(json.dumps({"key": key, "body": body}, sort_keys=True) + "\n")
        print(f"appended {len(meta_entries)} meta fixtures")

    cf_cli.cmd_fuse(config)
    cf_cli.cmd_report(config)
    print("fixture pipeline complete; inspect", workdir)


if __name__ == "__main__":
    main()
