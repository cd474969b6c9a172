"""Chat-completion providers: one real HTTP client, one scripted double.

The HTTP side speaks the OpenAI-compatible wire shape (POST
<endpoint>/chat/completions, reply in choices[0].message.content) since
hosted and local services broadly accept it. API keys come only from
the environment, never from config values.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field

import httpx

from ..errors import ContractViolation, ProviderError

DEFAULT_KEY_ENV = "LLM_API_KEY"

RETRYABLE_STATUS = {429, 500, 502, 503, 504}


@dataclass(frozen=True)
class ChatRequest:
    system: str
    user: str
    temperature: float = 1.0
    max_tokens: int = 8192

    def __post_init__(self):
        if self.temperature < 0:
            raise ContractViolation(f"temperature must be >= 0, got {self.temperature}")


@dataclass(frozen=True)
class ScriptEntry:
    """One scripted reply: substring matcher, reply text, optional use count."""

    match: str
    reply: str
    times: int | None = None


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "http_chat"
    endpoint: str = ""
    model_name: str = ""
    api_key_env: str = DEFAULT_KEY_ENV
    request_timeout_seconds: float = 60.0
    max_retries: int = 3
    concurrency_limit: int = 4
    backoff_base_seconds: float = 0.5
    script: tuple = ()

    def __post_init__(self):
        if self.kind not in ("http_chat", "scripted"):
            raise ContractViolation(f"unknown provider kind {self.kind!r}")
        if self.kind == "http_chat" and not (self.endpoint and self.api_key_env):
            raise ContractViolation("http_chat providers need endpoint and api_key_env")
        if self.kind == "scripted" and not self.script:
            raise ContractViolation("scripted providers need a non-empty script")
        if self.max_retries < 0 or self.concurrency_limit < 1:
            raise ContractViolation("max_retries >= 0 and concurrency_limit >= 1 required")


@dataclass
class CallRecord:
    user_prefix: str
    reply_chars: int
    latency_ms: float
    attempts: int


class HttpChatProvider:
    def __init__(self, config: ProviderConfig, transport=None):
        if config.kind != "http_chat":
            raise ContractViolation("HttpChatProvider requires kind=http_chat")
        self.config = config
        self.telemetry: list[CallRecord] = []
        self._semaphore = threading.Semaphore(config.concurrency_limit)
        self._telemetry_lock = threading.Lock()
        self._client = httpx.Client(
            timeout=config.request_timeout_seconds, transport=transport
        )

    def _api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "")
        if not key:
            raise ProviderError(
                f"environment variable {self.config.api_key_env} is not set"
            )
        return key

    def complete(self, request: ChatRequest) -> str:
        url = self.config.endpoint.rstrip("/") + "/chat/completions"
        body = {
            "model": self.config.model_name,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {"Authorization": f"Bearer {self._api_key()}"}

        start = time.monotonic()
        last_failure = "no attempt made"
        with self._semaphore:
            for attempt in range(self.config.max_retries + 1):
                if attempt:
                    time.sleep(self.config.backoff_base_seconds * 2 ** (attempt - 1))
                try:
                    response = self._client.post(url, json=body, headers=headers)
                except httpx.HTTPError as exc:
                    last_failure = f"network error: {exc}"
                    continue
                if response.status_code in (401, 403):
                    raise ProviderError(
                        f"authentication rejected (HTTP {response.status_code})"
                    )
                if response.status_code in RETRYABLE_STATUS:
                    last_failure = f"HTTP {response.status_code}"
                    continue
                if response.status_code != 200:
                    raise ProviderError(
                        f"unexpected HTTP {response.status_code}: {response.text[:200]}"
                    )
                try:
                    reply = response.json()["choices"][0]["message"]["content"]
                except (KeyError, IndexError, json.JSONDecodeError) as exc:
                    raise ProviderError(f"malformed completion body: {exc}") from None
                self._record(request, reply, start, attempt + 1)
                return reply
        raise ProviderError(
            f"gave up after {self.config.max_retries + 1} attempts ({last_failure})"
        )

    def _record(self, request, reply, start, attempts):
        record = CallRecord(
            user_prefix=request.user[:60],
            reply_chars=len(reply),
            latency_ms=(time.monotonic() - start) * 1000.0,
            attempts=attempts,
        )
        with self._telemetry_lock:
            self.telemetry.append(record)


class ScriptedProvider:
    """Deterministic provider driven by an ordered (matcher, reply) script.

    Each call scans the script top to bottom and returns the reply of the
    first entry whose matcher is a substring of the user prompt and whose
    use count is not exhausted; entries with times=None never exhaust.
    """

    def __init__(self, entries):
        entries = list(entries)
        if not entries:
            raise ContractViolation("scripted provider needs at least one entry")
        self.entries = entries
        self._remaining = [e.times for e in entries]
        self.calls: list[ChatRequest] = []
        self.telemetry: list[CallRecord] = []
        self._lock = threading.Lock()

    @classmethod
    def from_queue(cls, replies):
        """Strictly ordered: call n returns replies[n] regardless of prompt."""
        return cls([ScriptEntry(match="", reply=r, times=1) for r in replies])

    def complete(self, request: ChatRequest) -> str:
        with self._lock:
            self.calls.append(request)
            for idx, entry in enumerate(self.entries):
                if self._remaining[idx] == 0:
                    continue
                if entry.match in request.user:
                    if self._remaining[idx] is not None:
                        self._remaining[idx] -= 1
                    self.telemetry.append(
                        CallRecord(
                            user_prefix=request.user[:60],
                            reply_chars=len(entry.reply),
                            latency_ms=0.0,
                            attempts=1,
                        )
                    )
                    return entry.reply
        raise ProviderError(
            f"no scripted reply matches prompt starting {request.user[:80]!r}"
        )


def load_script(path) -> tuple:
    """Script file: JSON list of {match, reply, times} objects."""
    with open(path) as fh:
        raw = json.load(fh)
    entries = []
    for item in raw:
        entries.append(
            ScriptEntry(
                match=item.get("match", ""),
                reply=item["reply"],
                times=item.get("times"),
            )
        )
    return tuple(entries)


def build_provider(config: ProviderConfig, transport=None):
    if config.kind == "scripted":
        return ScriptedProvider(config.script)
    return HttpChatProvider(config, transport=transport)
