"""Fuse the ML ensemble outputs with LLM ensemble verdicts into one risk
score, with optional meta-review by a configured language model.

The fused risk is the weight-normalized mean over all voters (the ML
soft probability, the ML hard label, and the LLM ensemble soft/hard
outputs per prompting mode). The meta verdict is advisory only and never
alters the numeric result.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .dataset import PatientRecord
from .errors import OfflineMiss, ZeroWeightSum
from .llm import ChatClient, ChatRequest, describe_record, parse_label

DISCLAIMER = (
    "Research prototype output; not a medical device and not a substitute "
    "for clinical judgement."
)

DEFAULT_BANDS = (0.3, 0.7)


@dataclass(frozen=True)
class FusionVoter:
    voter_id: str
    score: float      # probability in [0,1] or a 0/1 verdict
    weight: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"{self.voter_id}: score {self.score} outside [0,1]")
        if not self.weight >= 0.0:
            raise ValueError(f"{self.voter_id}: weight must be >= 0")


@dataclass
class FusionInput:
    ml_soft: FusionVoter
    ml_hard: FusionVoter
    llm_votes: list[FusionVoter]
    patient: PatientRecord | None = None

    def voters(self) -> list[FusionVoter]:
        return [self.ml_soft, self.ml_hard, *self.llm_votes]


@dataclass
class FusionResult:
    risk_score: float
    label: int
    advisory: str
    contributions: list[dict]
    meta_verdict: int | None = None


def advisory(risk_score: float, bands: tuple[float, float] = DEFAULT_BANDS) -> str:
    """Risk band: low below bands[0], high at or above bands[1]."""
    low, high = bands
    if risk_score < low:
        return "low"
    if risk_score < high:
        return "moderate"
    return "high"


def fuse(inp: FusionInput, bands: tuple[float, float] = DEFAULT_BANDS) -> FusionResult:
    """Weight-normalized mean of all voter scores.

    risk = sum(w_i * s_i) / sum(w_i); label is risk >= 0.5; the
    contribution list carries each voter's raw term so the sum can be
    audited exactly.
    """
    voters = inp.voters()
    total = sum(v.weight for v in voters)
    if total <= 0.0:
        raise ZeroWeightSum("fusion voter weights sum to zero")
    contributions = [
        {
            "voter_id": v.voter_id,
            "weight": v.weight,
            "score": v.score,
            "term": v.weight * v.score,
        }
        for v in voters
    ]
    risk = sum(c["term"] for c in contributions) / total
    return FusionResult(
        risk_score=risk,
        label=int(risk >= 0.5),
        advisory=advisory(risk, bands),
        contributions=contributions,
    )


META_SYSTEM_TEXT = (
    "You are a senior cardiology reviewer. You receive a patient summary, "
    "the verdicts of several prediction systems with their reliability "
    "weights, and a fused risk score. Give your own final verdict. Reply "
    "with exactly one token: 1 for disease, 0 for no disease."
)


def build_meta_prompt(inp: FusionInput, result: FusionResult) -> list[dict]:
    """Second-opinion prompt: patient features, every voter's verdict and
    weight, and the fused risk score."""
    lines = []
    if inp.patient is not None:
        lines.append("Patient:")
        lines.append(describe_record(inp.patient))
        lines.append("")
    lines.append("Committee verdicts (score, weight):")
    for v in inp.voters():
        lines.append(f"- {v.voter_id}: score={v.score:.4f}, weight={v.weight:.4f}")
    lines.append("")
    lines.append(f"Fused risk score: {result.risk_score:.4f}")
    lines.append("Your verdict (1 or 0):")
    return [
        {"role": "system", "content": META_SYSTEM_TEXT},
        {"role": "user", "content": "\n".join(lines)},
    ]


def meta_decide(
    client: ChatClient,
    model_id: str,
    inp: FusionInput,
    result: FusionResult,
) -> int | None:
    """Ask the meta model for a second opinion and record it.

    Returns None (verdict omitted) when offline with a cold cache. The
    numeric risk_score is never modified.
    """
    messages = build_meta_prompt(inp, result)
    try:
        response = client.send_chat(ChatRequest(model=model_id, messages=messages))
    except OfflineMiss:
        return None
    return parse_label(response.content)


def result_to_dict(sample_id: int, result: FusionResult) -> dict:
    doc = {
        "sample_id": sample_id,
        "risk_score": result.risk_score,
        "label": result.label,
        "advisory": result.advisory,
        "contributions": result.contributions,
        "disclaimer": DISCLAIMER,
    }
    if result.meta_verdict is not None:
        doc["meta_verdict"] = result.meta_verdict
    return doc


def result_to_json(sample_id: int, result: FusionResult) -> str:
    return json.dumps(result_to_dict(sample_id, result), sort_keys=True,
                      separators=(",", ":"))
