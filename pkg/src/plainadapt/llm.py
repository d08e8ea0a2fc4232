"""Provider-agnostic chat-completion client.

One wire contract (OpenAI-style /chat/completions JSON) covers every real
provider; a scriptable mock stands in for tests and offline runs. Retries
use exponential backoff on 429/5xx only; usage is accumulated per model in
a thread-safe ledger that feeds cost estimates.
"""

import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import requests

from .errors import ProtocolError, RequestError, TransportError, ValidationError

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValidationError(f"unknown role {self.role!r}")

    def to_json(self) -> dict:
        return {"role": self.role, "content": self.content}


@dataclass(frozen=True)
class CompletionRequest:
    model_id: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_tokens: int = 2048
    want_logprobs: bool = False

    def __post_init__(self):
        if not self.messages:
            raise ValidationError("request needs at least one message")
        if self.temperature < 0 or self.max_tokens <= 0:
            raise ValidationError("bad sampling parameters")
        for m in self.messages:
            if m.role in ("user", "assistant") and not m.content:
                raise ValidationError(f"empty {m.role} message in request")


@dataclass(frozen=True)
class TokenLogprob:
    token: str
    logprob: float
    # alternative token -> logprob, for logprob-weighted rating extraction
    top_alternatives: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CompletionResult:
    text: str
    prompt_tokens: int
    completion_tokens: int
    token_logprobs: tuple[TokenLogprob, ...] | None = None
    attempts: int = 1


class UsageLedger:
    """Per-model token totals; updates serialized, totals additive."""

    def __init__(self):
        self._lock = threading.Lock()
        self._usage: dict[str, tuple[int, int]] = {}

    def record(self, model_id: str, prompt_tokens: int, completion_tokens: int) -> None:
        with self._lock:
            p, c = self._usage.get(model_id, (0, 0))
            self._usage[model_id] = (p + prompt_tokens, c + completion_tokens)

    def totals(self) -> dict[str, tuple[int, int]]:
        with self._lock:
            return dict(self._usage)

    def total_tokens(self, model_id: str) -> int:
        p, c = self._usage.get(model_id, (0, 0))
        return p + c


class ProviderFailure(Exception):
    """Single-attempt failure from a provider; transient ones are retried."""

    def __init__(self, message: str, transient: bool):
        super().__init__(message)
        self.transient = transient


class HttpChatProvider:
    """POSTs OpenAI-compatible JSON to {base_url}/chat/completions."""

    def __init__(
        self,
        base_url: str,
        api_key_env: str = "OPENAI_API_KEY",
        timeout: float = 120.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key = os.environ.get(api_key_env, "")
        self.timeout = timeout

    def send(self, request: CompletionRequest) -> CompletionResult:
        payload = {
            "model": request.model_id,
            "messages": [m.to_json() for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if request.want_logprobs:
            payload["logprobs"] = True
            payload["top_logprobs"] = 5
        try:
            resp = requests.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout,
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise ProviderFailure(str(exc), transient=True) from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise ProviderFailure(f"HTTP {resp.status_code}", transient=True)
        if resp.status_code >= 400:
            raise RequestError(f"HTTP {resp.status_code}: {resp.text[:500]}")
        try:
            body = resp.json()
            choice = body["choices"][0]
            text = choice["message"]["content"]
            usage = body.get("usage", {})
            logprobs = None
            if choice.get("logprobs"):
                logprobs = tuple(
                    TokenLogprob(
                        token=t["token"],
                        logprob=t["logprob"],
                        top_alternatives={
                            alt["token"]: alt["logprob"]
                            for alt in t.get("top_logprobs", [])
                        },
                    )
                    for t in choice["logprobs"]["content"]
                )
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed completion response: {exc}") from exc
        return CompletionResult(
            text=text,
            prompt_tokens=int(usage.get("prompt_tokens", 0)),
            completion_tokens=int(usage.get("completion_tokens", 0)),
            token_logprobs=logprobs,
        )


class MockProvider:
    """Scripted provider for tests and --mock runs.

    Script items are either CompletionResult-like dicts, int status codes
    (treated as an HTTP failure for that attempt), or the script may be a
    callable request -> CompletionResult for generative mocks.
    """

    def __init__(self, script: Sequence | Callable[[CompletionRequest], CompletionResult] = ()):
        self.script = script
        self._index = 0
        self.calls = 0
        self.requests: list[CompletionRequest] = []

    def send(self, request: CompletionRequest) -> CompletionResult:
        self.calls += 1
        self.requests.append(request)
        if callable(self.script):
            return self.script(request)
        if self._index >= len(self.script):
            raise ProtocolError("mock script exhausted")
        item = self.script[self._index]
        self._index += 1
        if isinstance(item, int):
            if item == 429 or item >= 500:
                raise ProviderFailure(f"HTTP {item}", transient=True)
            raise RequestError(f"HTTP {item}")
        if isinstance(item, CompletionResult):
            return item
        return CompletionResult(
            text=item["text"],
            prompt_tokens=item.get("prompt_tokens", 0),
            completion_tokens=item.get("completion_tokens", 0),
            token_logprobs=item.get("token_logprobs"),
        )


class RateLimiter:
    """Token bucket over requests/minute; a cap of 0 disables limiting."""

    def __init__(self, requests_per_minute: int = 0, clock=time.monotonic, sleep=time.sleep):
        self.rpm = requests_per_minute
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._allowance = float(requests_per_minute)
        self._last = clock()

    def acquire(self) -> None:
        if self.rpm <= 0:
            return
        with self._lock:
            while True:
                now = self._clock()
                self._allowance = min(
                    self.rpm, self._allowance + (now - self._last) * self.rpm / 60.0
                )
                self._last = now
                if self._allowance >= 1.0:
                    self._allowance -= 1.0
                    return
                self._sleep((1.0 - self._allowance) * 60.0 / self.rpm)


def complete(
    request: CompletionRequest,
    provider,
    retry_cap: int = 3,
    ledger: UsageLedger | None = None,
    backoff_base: float = 0.5,
    sleep=time.sleep,
    rate_limiter: RateLimiter | None = None,
) -> CompletionResult:
    """One completion with retries on transient failures (429/5xx only)."""
    last: ProviderFailure | None = None
    for attempt in range(1, retry_cap + 1):
        if rate_limiter is not None:
            rate_limiter.acquire()
        try:
            result = provider.send(request)
        except ProviderFailure as exc:
            last = exc
            if attempt < retry_cap:
                sleep(backoff_base * 2 ** (attempt - 1))
            continue
        if ledger is not None:
            ledger.record(request.model_id, result.prompt_tokens, result.completion_tokens)
        return CompletionResult(
            text=result.text,
            prompt_tokens=result.prompt_tokens,
            completion_tokens=result.completion_tokens,
            token_logprobs=result.token_logprobs,
            attempts=attempt,
        )
    raise TransportError(f"provider failed after {retry_cap} attempts: {last}", attempts=retry_cap)


class ChatClient:
    """Shareable handle bundling provider, retry policy, rate limit, ledger."""

    def __init__(
        self,
        provider,
        retry_cap: int = 3,
        rate_limiter: RateLimiter | None = None,
        backoff_base: float = 0.5,
        sleep=time.sleep,
    ):
        self.provider = provider
        self.retry_cap = retry_cap
        self.rate_limiter = rate_limiter
        self.backoff_base = backoff_base
        self.sleep = sleep
        self.ledger = UsageLedger()

    def complete(self, request: CompletionRequest) -> CompletionResult:
        return complete(
            request,
            self.provider,
            retry_cap=self.retry_cap,
            ledger=self.ledger,
            backoff_base=self.backoff_base,
            sleep=self.sleep,
            rate_limiter=self.rate_limiter,
        )


def cost_estimate(ledger: UsageLedger, price_table: dict[str, float]) -> float:
    """Dollars: sum over models of total tokens / 1e6 * price-per-1M-tokens."""
    total = 0.0
    for model_id, (p, c) in ledger.totals().items():
        if model_id not in price_table:
            raise ValidationError(f"no price for model {model_id!r}")
        total += (p + c) / 1e6 * price_table[model_id]
    return total
