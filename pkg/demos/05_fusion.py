"""Fuse the committee: ML ensemble probability and label, LLM ensemble
verdicts per prompting mode, all weighted by their validation accuracy,
into a single risk score with an advisory band.

Expects the pipeline artifacts in out/ (run the CLI first, or
`python tools/make_llm_fixtures.py` to rebuild everything):

    cardiofusion prepare   --config configs/offline.json
    cardiofusion train     --config configs/offline.json
    cardiofusion llm-predict --config configs/offline.json --offline
    cardiofusion vote      --config configs/offline.json

Run from the repository root:  python demos/05_fusion.py
"""
from pathlib import Path

from cardiofusion import cli as cf_cli
from cardiofusion import fusion as fus
from cardiofusion.config import load_config

config = load_config("configs/offline.json")
if not (Path(config.output_dir) / "votes_ml.csv").exists():
    raise SystemExit("vote artifacts missing; run the pipeline commands first")

pairs = cf_cli.fusion_inputs(config)
print(f"assembled fusion inputs for {len(pairs)} test samples\n")

sid, fusion_input = pairs[0]
result = fus.fuse(fusion_input, config.fusion.advisory_bands)
print(f"sample {sid}: risk {result.risk_score:.4f} -> label {result.label}, "
      f"advisory {result.advisory}")
print(f"{'voter':20s} {'score':>7s} {'weight':>7s} {'term':>7s}")
for c in result.contributions:
    print(f"{c['voter_id']:20s} {c['score']:7.4f} {c['weight']:7.4f} "
          f"{c['term']:7.4f}")

# committee disagreement: the strongest ML voter against the LLM block
flipped = []
for sid, fusion_input in pairs:
    ml_label = int(fusion_input.ml_soft.score >= 0.5)
    result = fus.fuse(fusion_input, config.fusion.advisory_bands)
    if result.label != ml_label:
        flipped.append((sid, fusion_input.ml_soft.score, result.risk_score))
print(f"\nfusion overruled the ML ensemble on {len(flipped)} samples:")
for sid, ml_score, risk in flipped[:6]:
    print(f"  sample {sid}: ml probability {ml_score:.3f} -> fused risk {risk:.3f}")
print(f"\n{fus.DISCLAIMER}")
