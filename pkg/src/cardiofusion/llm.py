"""Chat-completions client with prompt construction, verdict parsing and
an immutable on-disk response cache for offline replay.

Wire protocol: POST {base_url}/chat/completions with a JSON body of
{model, messages, temperature, max_tokens}, bearer-token auth. The body
encoding is canonical (sorted keys, compact separators), so identical
requests are byte-identical and cacheable by content hash.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
import re
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import requests

from .dataset import PatientRecord
from .errors import (
    ExemplarLeakage,
    HttpError,
    MissingExemplars,
    OfflineMiss,
    RateLimited,
    Timeout,
    Unparseable,
)
from .metrics import accuracy

DEFAULT_BASE_URL = "https://openrouter.ai/api/v1"
API_KEY_ENV = "OPENROUTER_API_KEY"

TEMPLATE_VERSION = "v1"

SYSTEM_TEXT = (
    "You are a clinical decision-support assistant. A patient is described by "
    "11 features: Age (years), Sex (M/F), ChestPainType (TA/ATA/NAP/ASY), "
    "RestingBP (mm Hg), Cholesterol (mg/dL), FastingBS (1 if fasting blood "
    "sugar > 120 mg/dL else 0), RestingECG (Normal/ST/LVH), MaxHR (bpm), "
    "ExerciseAngina (Y/N), Oldpeak (ST depression), ST_Slope (Up/Flat/Down). "
    "Decide whether the patient has heart disease. Reply with exactly one "
    "token: 1 for disease, 0 for no disease."
)


@dataclass(frozen=True)
class PromptSpec:
    mode: str = "zero_shot"              # "zero_shot" | "few_shot"
    n_exemplars: int = 4
    exemplar_seed: int = 42
    system_text: str = SYSTEM_TEXT
    template_version: str = TEMPLATE_VERSION

    def __post_init__(self):
        if self.mode not in ("zero_shot", "few_shot"):
            raise ValueError(f"unknown prompt mode {self.mode!r}")
        if self.mode == "few_shot" and self.n_exemplars < 1:
            raise ValueError("few_shot mode needs n_exemplars >= 1")


@dataclass(frozen=True)
class Exemplar:
    record: PatientRecord
    origin: str = "train"                # split the record was drawn from


@dataclass
class ChatRequest:
    model: str
    messages: list[dict]
    temperature: float = 0.0
    max_tokens: int = 8


@dataclass
class ChatResponse:
    content: str
    finish_reason: str
    raw_body: str
    cached: bool = False


@dataclass
class LlmPrediction:
    sample_id: int
    model_id: str
    label: int
    raw_text: str
    prompt_hash: str
    cached: bool


def describe_record(record: PatientRecord) -> str:
    """Feature name/value lines in schema order, label excluded."""
    return "\n".join([
        f"Age: {record.age}",
        f"Sex: {record.sex}",
        f"ChestPainType: {record.chest_pain_type}",
        f"RestingBP: {record.resting_bp:g}",
        f"Cholesterol: {record.cholesterol:g}",
        f"FastingBS: {record.fasting_bs}",
        f"RestingECG: {record.resting_ecg}",
        f"MaxHR: {record.max_hr:g}",
        f"ExerciseAngina: {record.exercise_angina}",
        f"Oldpeak: {record.oldpeak:g}",
        f"ST_Slope: {record.st_slope}",
    ])


def build_prompt(
    record: PatientRecord,
    spec: PromptSpec,
    exemplars: tuple[Exemplar, ...] = (),
) -> list[dict]:
    """Deterministic message list for one patient.

    Few-shot mode prepends labelled user/assistant exchanges; exemplars
    must come from the training split (anything else is leakage and is
    rejected).
    """
    if spec.mode == "few_shot":
        if not exemplars:
            raise MissingExemplars("few_shot mode requires exemplars")
        for ex in exemplars:
            if ex.origin != "train":
                raise ExemplarLeakage(
                    f"exemplar drawn from {ex.origin!r} split; only train is allowed"
                )
    elif exemplars:
        raise ValueError("zero_shot prompts take no exemplars")

    messages = [{"role": "system", "content": spec.system_text}]
    for ex in exemplars:
        messages.append({"role": "user", "content": describe_record(ex.record)})
        messages.append({"role": "assistant", "content": str(ex.record.heart_disease)})
    messages.append({"role": "user", "content": describe_record(record)})
    return messages


def select_exemplars(
    records: list[PatientRecord],
    n: int = 4,
    seed: int = 42,
) -> tuple[Exemplar, ...]:
    """Class-balanced exemplar draw from training records, seeded."""
    positives = [r for r in records if r.heart_disease == 1]
    negatives = [r for r in records if r.heart_disease == 0]
    n_pos = n // 2 + n % 2
    n_neg = n // 2
    if len(positives) < n_pos or len(negatives) < n_neg:
        raise MissingExemplars(
            f"need {n_pos} positive and {n_neg} negative training exemplars"
        )
    rng = np.random.default_rng(seed)
    pos = [positives[i] for i in rng.choice(len(positives), n_pos, replace=False)]
    neg = [negatives[i] for i in rng.choice(len(negatives), n_neg, replace=False)]
    # Alternate classes so the example block reads balanced.
    ordered = [r for pair in itertools.zip_longest(pos, neg) for r in pair
               if r is not None]
    return tuple(Exemplar(r, "train") for r in ordered)


def request_body(request: ChatRequest) -> str:
    """Canonical JSON wire body; identical requests are byte-identical."""
    return json.dumps(
        {
            "model": request.model,
            "messages": request.messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        },
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )


def prompt_key(model_id: str, messages: list[dict]) -> str:
    """Cache key: SHA-256 over the model id and canonical prompt text."""
    canonical = json.dumps(messages, sort_keys=True, separators=(",", ":"),
                           ensure_ascii=False)
    return hashlib.sha256(f"{model_id}\n{canonical}".encode("utf-8")).hexdigest()


class ResponseCache:
    """One file per entry under cache_dir; entries are immutable."""

    def __init__(self, cache_dir):
        self.dir = Path(cache_dir)
        self.dir.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.dir / f"{key}.json"

    def get(self, key: str) -> str | None:
        path = self._path(key)
        if path.exists():
            return path.read_text(encoding="utf-8")
        return None

    def put(self, key: str, body: str) -> None:
        path = self._path(key)
        if path.exists():
            return
        # Unique temp name + atomic rename so concurrent writers of the
        # same key cannot interleave partial bodies.
        fd, tmp = tempfile.mkstemp(dir=self.dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(body)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def warm_from_bundle(self, bundle_path) -> int:
        """Materialize entries from a JSONL bundle of {key, body} lines."""
        count = 0
        with open(bundle_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                entry = json.loads(line)
                self.put(entry["key"], entry["body"])
                count += 1
        return count


def _extract_content(body: str) -> tuple[str, str]:
    doc = json.loads(body)
    choice = doc["choices"][0]
    return choice["message"]["content"], choice.get("finish_reason", "")


class ChatClient:
    """Transport with retry, backoff, and cache-before-network semantics."""

    def __init__(
        self,
        base_url: str = DEFAULT_BASE_URL,
        api_key: str | None = None,
        cache: ResponseCache | None = None,
        offline: bool = False,
        timeout: float = 30.0,
        max_attempts: int = 3,
        backoff: float = 0.5,
        sleeper=time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.cache = cache
        self.offline = offline
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff
        self._sleep = sleeper

    def send_chat(self, request: ChatRequest) -> ChatResponse:
        """Cached response if present, otherwise POST with retries.

        Retries on 429, 5xx and timeouts with exponential backoff;
        RateLimited or Timeout surface once attempts are exhausted.
        """
        key = prompt_key(request.model, request.messages)
        if self.cache is not None:
            body = self.cache.get(key)
            if body is not None:
                content, finish = _extract_content(body)
                return ChatResponse(content, finish, body, cached=True)
        if self.offline:
            raise OfflineMiss(f"offline mode and no cache entry for {request.model}")

        url = f"{self.base_url}/chat/completions"
        payload = request_body(request).encode("utf-8")
        headers = {
            "Authorization": f"Bearer {self.api_key}",
            "Content-Type": "application/json",
        }
        last_status = None
        for attempt in range(self.max_attempts):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = requests.post(url, data=payload, headers=headers,
                                     timeout=self.timeout)
            except requests.Timeout:
                last_status = "timeout"
                continue
            if resp.status_code == 200:
                body = resp.text
                if self.cache is not None:
                    self.cache.put(key, body)
                content, finish = _extract_content(body)
                return ChatResponse(content, finish, body, cached=False)
            if resp.status_code == 429 or resp.status_code >= 500:
                last_status = resp.status_code
                continue
            raise HttpError(resp.status_code, resp.text[:200])

        if last_status == "timeout":
            raise Timeout(f"no response after {self.max_attempts} attempts")
        if last_status == 429:
            raise RateLimited(f"rate limited after {self.max_attempts} attempts")
        raise HttpError(int(last_status), f"after {self.max_attempts} attempts")


VERDICT_TOKENS = {
    "1": 1, "yes": 1, "positive": 1,
    "0": 0, "no": 0, "negative": 0,
}

_TOKEN_RE = re.compile(r"[a-z]+|\d+(?:\.\d+)?")


def parse_label(text: str) -> int:
    """First standalone verdict token in the text, mapped to 0/1.

    Recognized tokens (case-insensitive): 1, 0, yes, no, positive,
    negative. Decimals like 0.77 are single tokens and never match.
    """
    for token in _TOKEN_RE.findall(text.lower()):
        if token in VERDICT_TOKENS:
            return VERDICT_TOKENS[token]
    raise Unparseable(f"no verdict token in {text!r}")


@dataclass
class BatchReport:
    """Per-model outcome counts and accuracy over the parsed predictions."""

    accuracy: dict[str, float] = field(default_factory=dict)
    unparseable: dict[str, int] = field(default_factory=dict)
    transport_errors: dict[str, int] = field(default_factory=dict)
    cache_hits: int = 0
    network_calls: int = 0


def predict_batch(
    records: list[PatientRecord],
    sample_ids: list[int],
    model_ids: list[str],
    spec: PromptSpec,
    client: ChatClient,
    exemplars: tuple[Exemplar, ...] = (),
    max_workers: int = 4,
) -> tuple[list[LlmPrediction], BatchReport]:
    """Collect one verdict per (model, record); order is by sample_id.

    The cache is consulted before any network traffic. Unparseable
    responses and per-sample transport failures are counted in the
    report and excluded from the returned predictions, so one bad sample
    never aborts the batch. Ground-truth labels ride on the records for
    scoring.
    """
    report = BatchReport()
    jobs = []
    for model_id in model_ids:
        for sid, record in sorted(zip(sample_ids, records), key=lambda p: p[0]):
            messages = build_prompt(record, spec, exemplars)
            jobs.append((model_id, sid, record, messages))

    def run(job):
        model_id, sid, record, messages = job
        request = ChatRequest(model=model_id, messages=messages)
        try:
            response = client.send_chat(request)
        except Exception as exc:  # per-sample failures are tallied, not raised
            return job, None, exc
        return job, response, None

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(run, jobs))

    predictions: list[LlmPrediction] = []
    truths: dict[str, list[tuple[int, int]]] = {m: [] for m in model_ids}
    for (model_id, sid, record, messages), response, error in results:
        if error is not None:
            report.transport_errors[model_id] = report.transport_errors.get(model_id, 0) + 1
            continue
        if response.cached:
            report.cache_hits += 1
        else:
            report.network_calls += 1
        try:
            label = parse_label(response.content)
        except Unparseable:
            report.unparseable[model_id] = report.unparseable.get(model_id, 0) + 1
            continue
        predictions.append(LlmPrediction(
            sample_id=sid,
            model_id=model_id,
            label=label,
            raw_text=response.content,
            prompt_hash=prompt_key(model_id, messages),
            cached=response.cached,
        ))
        truths[model_id].append((label, record.heart_disease))

    for model_id, pairs in truths.items():
        if pairs:
            predicted = [p for p, _ in pairs]
            actual = [t for _, t in pairs]
            report.accuracy[model_id] = accuracy(actual, predicted)

    predictions.sort(key=lambda p: (p.model_id, p.sample_id))
    return predictions, report
