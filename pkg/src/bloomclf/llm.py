"""Provider-agnostic zero-shot classification harness.

Requests follow the chat-completions JSON wire shape. Providers are
pluggable; two deterministic mocks ship with the package so the full
path can run offline: "mock:verbs" answers from a verb-keyword scan and
"mock:unparseable" never produces a usable answer.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import requests

from .corpus import DATA_DIR, LABELS, NUM_CLASSES, load_verb_lexicons
from .errors import DataFormatError, ProviderError, SentenceTooLong

RETRY_STATUSES = frozenset({429, 500, 502, 503, 504})
MAX_SENTENCE_CHARS = 4000


def load_prompt_template(path: str | Path | None = None) -> dict:
    """Load the versioned prompt template.

    The system text must name each of the six levels exactly once so a
    level name in the reply is unambiguous evidence of the verdict.
    """
    path = Path(path) if path is not None else DATA_DIR / "prompt_zero_shot.json"
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: not valid JSON: {exc}") from exc
    for key in ("version", "system", "user"):
        if key not in doc or not isinstance(doc[key], str):
            raise DataFormatError(f"{path}: missing or non-string field {key!r}")
    if "{sentence}" not in doc["user"]:
        raise DataFormatError(f"{path}: user pattern must contain {{sentence}}")
    for name in LABELS:
        hits = re.findall(rf"\b{name}\b", doc["system"], flags=re.IGNORECASE)
        if len(hits) != 1:
            raise DataFormatError(
                f"{path}: system text must mention {name!r} exactly once, found {len(hits)}"
            )
    return doc


def template_fingerprint(template: Mapping[str, str]) -> str:
    """SHA-256 over the template fields, recorded with every run."""
    payload = "\x00".join(
        (template["version"], template["system"], template["user"])
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def build_messages(template: Mapping[str, str], sentence: str) -> list[dict]:
    """Render the two-message prompt for one sentence. Substitution is
    pure, never truncates, and refuses oversized sentences instead."""
    if len(sentence) > MAX_SENTENCE_CHARS:
        raise SentenceTooLong(
            f"sentence is {len(sentence)} chars, limit {MAX_SENTENCE_CHARS}"
        )
    return [
        {"role": "system", "content": template["system"]},
        {"role": "user", "content": template["user"].replace("{sentence}", sentence)},
    ]


_LABEL_PATTERNS = [
    (code, re.compile(rf"\b{name}\b", re.IGNORECASE)) for code, name in enumerate(LABELS)
]


def parse_verdict(text: str) -> int | None:
    """Extract the level named in a reply.

    Scans for canonical level names as whole words, case-insensitively.
    Returns the code of the last occurrence, or None when no level is
    named (a parse failure).
    """
    last_pos = -1
    last_code: int | None = None
    for code, pattern in _LABEL_PATTERNS:
        for match in pattern.finditer(text):
            if match.start() > last_pos:
                last_pos = match.start()
                last_code = code
    return last_code


@dataclass(frozen=True)
class ProviderResult:
    text: str
    attempts: int
    latency_ms: float


@dataclass(frozen=True)
class Verdict:
    """Outcome for one sentence: raw reply, parsed code (None on parse
    failure), wall latency, and transport attempts."""

    id: int
    raw: str
    parsed: int | None
    latency_ms: float
    attempts: int


class HTTPProvider:
    """Chat-completions client with bounded retries.

    Retries 429 and 5xx responses and transport errors with exponential
    backoff; other statuses fail immediately. The API key is read from
    the environment variable named by api_key_env, never stored.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key_env: str = "BLOOMCLF_API_KEY",
        timeout: float = 30.0,
        max_retries: int = 5,
        backoff: float = 0.5,
        transport: Callable[[str, dict, dict, float], tuple[int, str]] | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        key = os.environ.get(api_key_env)
        if not key:
            raise ProviderError(f"environment variable {api_key_env} is not set")
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self._headers = {
            "Authorization": f"Bearer {key}",
            "Content-Type": "application/json",
        }
        self._transport = transport if transport is not None else self._http_post
        self._sleep = sleep

    @staticmethod
    def _http_post(url: str, headers: dict, payload: dict, timeout: float) -> tuple[int, str]:
        resp = requests.post(url, headers=headers, json=payload, timeout=timeout)
        return resp.status_code, resp.text

    def complete(self, messages: list[dict]) -> ProviderResult:
        payload = {"model": self.model, "messages": messages, "temperature": 0}
        url = f"{self.base_url}/chat/completions"
        start = time.perf_counter()
        last_error = "no attempt made"
        for attempt in range(1, self.max_retries + 1):
            try:
                status, body = self._transport(url, self._headers, payload, self.timeout)
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
                if attempt < self.max_retries:
                    self._sleep(self.backoff * 2 ** (attempt - 1))
                continue
            if status == 200:
                try:
                    content = json.loads(body)["choices"][0]["message"]["content"]
                except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
                    raise ProviderError(f"malformed provider response: {exc}") from exc
                latency_ms = (time.perf_counter() - start) * 1000.0
                return ProviderResult(text=content, attempts=attempt, latency_ms=latency_ms)
            if status in RETRY_STATUSES:
                last_error = f"HTTP {status}"
                if attempt < self.max_retries:
                    self._sleep(self.backoff * 2 ** (attempt - 1))
                continue
            raise ProviderError(f"HTTP {status}: {body[:200]}")
        raise ProviderError(f"retries exhausted after {self.max_retries} attempts: {last_error}")


class MockVerbProvider:
    """Deterministic offline provider.

    Scans the user sentence for per-level action verbs and names the
    level of the earliest match (canonical order breaks ties); falls
    back to the first level when nothing matches. Always parseable.
    """

    def __init__(self, verbs: Mapping[int, Sequence[str]] | None = None):
        if verbs is None:
            verbs = load_verb_lexicons()
        self._patterns = [
            (code, re.compile(r"\b(?:" + "|".join(map(re.escape, verbs[code])) + r")\b"))
            for code in range(NUM_CLASSES)
        ]

    def complete(self, messages: list[dict]) -> ProviderResult:
        sentence = messages[-1]["content"].lower()
        best_pos = None
        best_code = 0
        for code, pattern in self._patterns:
            match = pattern.search(sentence)
            if match and (best_pos is None or match.start() < best_pos):
                best_pos = match.start()
                best_code = code
        return ProviderResult(text=LABELS[best_code], attempts=1, latency_ms=0.0)


class MockUnparseableProvider:
    """Adversarial offline provider whose replies never name a level."""

    REPLY = "I am unable to comply with the request."

    def complete(self, messages: list[dict]) -> ProviderResult:
        return ProviderResult(text=self.REPLY, attempts=1, latency_ms=0.0)


def make_provider(name: str, settings: Mapping | None = None):
    """Build a provider from its config name.

    "mock:verbs" and "mock:unparseable" run offline; anything else
    selects the HTTP client configured by settings (base_url, model,
    api_key_env, timeout, max_retries).
    """
    if name == "mock:verbs":
        return MockVerbProvider()
    if name == "mock:unparseable":
        return MockUnparseableProvider()
    if name == "http":
        settings = settings or {}
        missing = [k for k in ("base_url", "model") if not settings.get(k)]
        if missing:
            raise ProviderError(f"http provider requires settings: {', '.join(missing)}")
        return HTTPProvider(
            base_url=settings["base_url"],
            model=settings["model"],
            api_key_env=settings.get("api_key_env", "BLOOMCLF_API_KEY"),
            timeout=float(settings.get("timeout", 30.0)),
            max_retries=int(settings.get("max_retries", 5)),
            backoff=float(settings.get("backoff", 0.5)),
        )
    raise ProviderError(f"unknown provider {name!r}")


def classify_zero_shot(
    sentences: Sequence[str],
    provider,
    template: Mapping[str, str] | None = None,
    concurrency: int = 4,
) -> list[Verdict]:
    """Classify sentences through a provider with bounded concurrency.

    Verdicts come back ordered by sentence id regardless of completion
    order. Provider errors propagate after cancelling nothing: the run
    is treated as failed.
    """
    if template is None:
        template = load_prompt_template()

    def one(idx: int) -> Verdict:
        result = provider.complete(build_messages(template, sentences[idx]))
        return Verdict(
            id=idx,
            raw=result.text,
            parsed=parse_verdict(result.text),
            latency_ms=result.latency_ms,
            attempts=result.attempts,
        )

    workers = max(1, int(concurrency))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        verdicts = list(pool.map(one, range(len(sentences))))
    return verdicts


def score_verdicts(y_true: Sequence[int], verdicts: Sequence[Verdict]) -> dict:
    """Score verdicts against true labels.

    Headline metrics treat a parse failure as wrong for every class: it
    adds a false negative to the true class and no false positive
    anywhere. A secondary block reports the same metrics over the
    parseable subset only.
    """
    if len(y_true) != len(verdicts):
        raise ValueError("y_true and verdicts must align")

    def block(pairs: list[tuple[int, int | None]]) -> dict:
        n = len(pairs)
        tp = [0] * NUM_CLASSES
        fp = [0] * NUM_CLASSES
        fn = [0] * NUM_CLASSES
        correct = 0
        for true, parsed in pairs:
            if parsed == true:
                tp[true] += 1
                correct += 1
            else:
                fn[true] += 1
                if parsed is not None:
                    fp[parsed] += 1
        per_class = []
        for c in range(NUM_CLASSES):
            p_den = tp[c] + fp[c]
            r_den = tp[c] + fn[c]
            precision = tp[c] / p_den if p_den else 0.0
            recall = tp[c] / r_den if r_den else 0.0
            f_den = precision + recall
            f1 = 2 * precision * recall / f_den if f_den else 0.0
            per_class.append(
                {
                    "label": LABELS[c],
                    "precision": precision,
                    "recall": recall,
                    "f1": f1,
                    "support": r_den,
                    "zero_division": p_den == 0 or r_den == 0 or f_den == 0,
                }
            )
        present = sorted(
            {t for t, _ in pairs} | {p for _, p in pairs if p is not None}
        )
        macro = {
            key: (
                sum(per_class[c][key] for c in present) / len(present) if present else 0.0
            )
            for key in ("precision", "recall", "f1")
        }
        tp_s, fp_s, fn_s = sum(tp), sum(fp), sum(fn)
        micro_p = tp_s / (tp_s + fp_s) if tp_s + fp_s else 0.0
        micro_r = tp_s / (tp_s + fn_s) if tp_s + fn_s else 0.0
        micro_den = 2 * tp_s + fp_s + fn_s
        micro_f1 = 2 * tp_s / micro_den if micro_den else 0.0
        return {
            "count": n,
            "accuracy": correct / n if n else 0.0,
            "per_class": per_class,
            "macro_precision": macro["precision"],
            "macro_recall": macro["recall"],
            "macro_f1": macro["f1"],
            "micro_precision": micro_p,
            "micro_recall": micro_r,
            "micro_f1": micro_f1,
        }

    all_pairs = [(int(t), v.parsed) for t, v in zip(y_true, verdicts)]
    parseable = [(t, p) for t, p in all_pairs if p is not None]
    failures = len(all_pairs) - len(parseable)
    return {
        "headline": block(all_pairs),
        "parseable_only": block(parseable),
        "parse_failures": failures,
        "parse_failure_rate": failures / len(all_pairs) if all_pairs else 0.0,
    }
