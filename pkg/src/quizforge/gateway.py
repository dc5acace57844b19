"""Chat-completion client with two interchangeable backends.

``HttpBackend`` speaks the standard chat-completion wire protocol against
any compatible endpoint; ``MockBackend`` produces deterministic, well-formed
MCQ JSON so the whole pipeline can run (and be tested) without a network.
The gateway wraps either backend with a bounded exponential-backoff retry
policy for transient failures.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Protocol

import requests

from .model import GenerationParams, QuestionType, QuizforgeError

ENV_API_KEY = "QUIZFORGE_API_KEY"
ENV_API_BASE = "QUIZFORGE_API_BASE"
DEFAULT_API_BASE = "https://api.openai.com/v1"

DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_BACKOFF_BASE = 0.5
DEFAULT_BACKOFF_CAP = 8.0


class GatewayError(QuizforgeError):
    pass


class AuthError(GatewayError):
    """Missing or rejected API credentials; never retried."""


class RateLimitedError(GatewayError):
    """The endpoint returned 429; retried with backoff."""


class TransportError(GatewayError):
    """Connection failure or 5xx response; retried with backoff."""


class CompletionTimeoutError(GatewayError):
    """The request exceeded its deadline; retried with backoff."""


@dataclass(frozen=True)
class CompletionRequest:
    """One prompt to complete.

    ``tags`` is routing metadata (e.g. the learning-objective id and question
    type) that deterministic backends may key off; the HTTP backend ignores it.
    """

    system: str
    user: str
    params: GenerationParams = GenerationParams()
    tags: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class CompletionResult:
    raw_text: str
    latency: float
    backend: str
    attempt: int

    def __post_init__(self) -> None:
        if self.attempt < 1:
            raise GatewayError("attempt count starts at 1")


class Backend(Protocol):
    name: str

    def send(self, request: CompletionRequest) -> str: ...


def _stable_digest(*parts: str) -> str:
    return hashlib.sha256("|".join(parts).encode("utf-8")).hexdigest()[:10]


_CODE_TYPES = frozenset(
    {QuestionType.FILL_IN_THE_BLANK, QuestionType.CORRECT_OUTPUT, QuestionType.CODE_ANALYSIS}
)


def mock_generate(lo_id: str, qtype: QuestionType) -> str:
    """Deterministic MCQ JSON for one (learning objective, question type) pair.

    The stem embeds a stable content hash so distinct pairs yield distinct
    questions, and code-oriented types carry a fenced snippet consistent with
    their ``code_in_stem`` flag.
    """
    digest = _stable_digest(lo_id, qtype.value)
    has_code = qtype in _CODE_TYPES
    if qtype is QuestionType.FILL_IN_THE_BLANK:
        stem = (
            f"Complete the snippet for objective {lo_id}:\n"
            f"```python\nresult = ____  # marker {digest}\nprint(result)\n```\n"
            "Which expression fills the blank so the code runs?"
        )
    elif qtype is QuestionType.CORRECT_OUTPUT:
        stem = (
            f"What is the output of the following code (objective {lo_id})?\n"
            f"```python\nprint(\"{digest}\")\n```"
        )
    elif qtype is QuestionType.CODE_ANALYSIS:
        stem = (
            f"Review the function below (objective {lo_id}):\n"
            f"```python\ndef probe_{digest}(x):\n    return x\n```\n"
            "Which statement about it is accurate?"
        )
    elif qtype is QuestionType.SCENARIO_BASED:
        stem = (
            f"A developer working on objective {lo_id} faces scenario {digest}. "
            "Which approach fits best?"
        )
    else:
        stem = f"Which statement about concept {digest} from objective {lo_id} is accurate?"
    record = {
        "question": stem,
        "choices": [
            {"option": "A", "text": f"The accurate statement for {digest}."},
            {"option": "B", "text": f"A plausible but wrong statement for {digest}."},
            {"option": "C", "text": f"A second plausible but wrong statement for {digest}."},
        ],
        "correctAnswer": "A",
        "code_in_stem": "True" if has_code else "False",
        "explanation": f"Option A matches marker {digest}; the others describe it incorrectly.",
    }
    return json.dumps(record, indent=4)


class MockBackend:
    """Offline stand-in returning byte-deterministic MCQ JSON."""

    name = "mock"

    def send(self, request: CompletionRequest) -> str:
        lo_id = request.tags.get("loId")
        qtype_name = request.tags.get("questionType")
        if lo_id is not None and qtype_name is not None:
            return mock_generate(lo_id, QuestionType(qtype_name))
        # Untagged requests still get a stable answer, keyed off the prompts.
        return mock_generate(_stable_digest(request.system, request.user), QuestionType.RECALL)


class HttpBackend:
    """Plain chat-completion HTTP client.

    The base URL and key default to the ``QUIZFORGE_API_BASE`` and
    ``QUIZFORGE_API_KEY`` environment variables so any compatible endpoint
    can be targeted without code changes.
    """

    name = "http"

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        timeout: float = 60.0,
        session: requests.Session | None = None,
    ):
        self.base_url = (base_url or os.environ.get(ENV_API_BASE) or DEFAULT_API_BASE).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY)
        self.timeout = timeout
        self.session = session or requests.Session()

    def send(self, request: CompletionRequest) -> str:
        if not self.api_key:
            raise AuthError(f"no API key: set {ENV_API_KEY}")
        payload = {
            "model": request.params.model,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
            "temperature": request.params.temperature,
            "top_p": request.params.top_p,
            "frequency_penalty": request.params.frequency_penalty,
            "presence_penalty": request.params.presence_penalty,
            "max_tokens": request.params.max_tokens,
        }
        try:
            response = self.session.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout,
            )
        except requests.Timeout as exc:
            raise CompletionTimeoutError(str(exc)) from exc
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc

        if response.status_code in (401, 403):
            raise AuthError(f"endpoint rejected credentials ({response.status_code})")
        if response.status_code == 429:
            raise RateLimitedError("endpoint rate limit hit (429)")
        if response.status_code >= 500:
            raise TransportError(f"server error {response.status_code}")
        if response.status_code != 200:
            raise TransportError(f"unexpected status {response.status_code}: {response.text[:200]}")
        try:
            body = response.json()
            return body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed completion response: {exc}") from exc


class Gateway:
    """Backend wrapper applying the retry policy and recording attempts."""

    def __init__(
        self,
        backend: Backend,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        backoff_base: float = DEFAULT_BACKOFF_BASE,
        backoff_cap: float = DEFAULT_BACKOFF_CAP,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if max_attempts < 1:
            raise GatewayError("max_attempts must be >= 1")
        self.backend = backend
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.backoff_cap = backoff_cap
        self._sleep = sleep

    def complete(self, request: CompletionRequest) -> CompletionResult:
        """Send the request, retrying transient failures with bounded backoff."""
        attempt = 0
        while True:
            attempt += 1
            started = time.monotonic()
            try:
                text = self.backend.send(request)
            except (RateLimitedError, TransportError, CompletionTimeoutError):
                if attempt >= self.max_attempts:
                    raise
                self._sleep(min(self.backoff_base * 2 ** (attempt - 1), self.backoff_cap))
                continue
            return CompletionResult(
                raw_text=text,
                latency=time.monotonic() - started,
                backend=self.backend.name,
                attempt=attempt,
            )
