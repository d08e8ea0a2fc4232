"""Deterministic generative mock for offline end-to-end runs.

Routes on the request's system prompt: judge prompts get a rating derived
from a stable hash of the whole prompt, the student persona gets canned
questions, everything else gets a crude "simplification" of the final user
message. Identical requests always produce identical responses, so full
pipeline runs are byte-reproducible.
"""

import hashlib

from .llm import CompletionRequest, CompletionResult, MockProvider, TokenLogprob


def _digest(request: CompletionRequest) -> int:
    h = hashlib.blake2s(digest_size=8)
    for m in request.messages:
        h.update(m.role.encode())
        h.update(m.content.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def _simplify(text: str) -> str:
    # drop long words and lowercase the rest; crude but monotone "simpler"
    words = [w.lower().strip(",;:") for w in text.split() if len(w) <= 11]
    return ("This study looked at a health question. " + " ".join(words)).strip()


def scripted_completion(request: CompletionRequest) -> CompletionResult:
    system = request.messages[0].content if request.messages[0].role == "system" else ""
    last_user = next(
        (m.content for m in reversed(request.messages) if m.role == "user"), ""
    )
    if "evaluator" in system:
        rating = 2 + _digest(request) % 4  # 2..5, varies per prompt
        text = "I followed the evaluation steps.\nRating: " + str(rating)
        logprobs = None
        if request.want_logprobs:
            logprobs = tuple(
                TokenLogprob(token=tok, logprob=0.0)
                for tok in text.replace("\n", " \n ").split(" ")
            )
    elif "13-14-year-old student" in system:
        text = "What does this treatment do?\nWhy was the study done?"
        logprobs = None
    else:
        text = _simplify(last_user)
        logprobs = None
    prompt_tokens = sum(len(m.content.split()) for m in request.messages)
    return CompletionResult(
        text=text,
        prompt_tokens=prompt_tokens,
        completion_tokens=len(text.split()),
        token_logprobs=logprobs,
    )


def mock_provider() -> MockProvider:
    return MockProvider(scripted_completion)
