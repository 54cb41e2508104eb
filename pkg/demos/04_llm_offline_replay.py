"""Query hosted models the offline way: warm the response cache from the
recorded bundle, then collect zero-shot verdicts for a handful of test
patients without a single network call.

Run from the repository root:  python demos/04_llm_offline_replay.py
"""
import tempfile

from cardiofusion import dataset as ds
from cardiofusion import llm

records = ds.load_dataset("fixtures/heart_merged.csv")
X, y = ds.encode(records)
split = ds.stratified_split(X, y, seed=42)

spec = llm.PromptSpec(mode="zero_shot")
sample = records[int(split.idx_test[0])]
messages = llm.build_prompt(sample, spec)
print("system message:")
print(" ", messages[0]["content"][:120], "...")
print("user message:")
print("  " + messages[-1]["content"].replace("\n", "\n  "))

with tempfile.TemporaryDirectory() as cache_dir:
    cache = llm.ResponseCache(cache_dir)
    loaded = cache.warm_from_bundle("fixtures/llm_responses.jsonl")
    print(f"\nwarmed cache with {loaded} recorded responses")

    client = llm.ChatClient(cache=cache, offline=True)
    sample_ids = [int(i) for i in split.idx_test[:8]]
    batch = [records[i] for i in sample_ids]
    model_ids = ["qwen/qwen3-coder", "moonshotai/kimi-k2"]
    predictions, report = llm.predict_batch(batch, sample_ids, model_ids,
                                            spec, client)

    print(f"cache hits {report.cache_hits}, network calls {report.network_calls}")
    print(f"\n{'sample':>6s} {'truth':>5s} " + " ".join(f"{m:>22s}" for m in model_ids))
    by_model = {(p.model_id, p.sample_id): p.label for p in predictions}
    for sid in sample_ids:
        verdicts = " ".join(f"{by_model[(m, sid)]:>22d}" for m in model_ids)
        print(f"{sid:6d} {records[sid].heart_disease:5d} {verdicts}")
    for model_id, acc in report.accuracy.items():
        print(f"{model_id}: accuracy {acc:.3f} on this sample")
