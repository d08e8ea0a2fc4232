"""LLM-rubric scoring on four criteria: simplicity, accuracy, completeness,
brevity.

Each criterion gets one chain-of-thought completion ending in "Rating: <1-5>".
When the provider returns top-alternative logprobs for the rating token, the
rating becomes the probability-weighted average over the digits 1..5 found
among the alternatives; otherwise the parsed integer is used. Ratings map to
[0,1] via (s - 1) / 4 and the four criteria are averaged.
"""

import math
import re
from dataclasses import dataclass, field

from . import assets
from .errors import RatingParseError, ValidationError
from .llm import ChatClient, ChatMessage, CompletionRequest, CompletionResult

CRITERIA = ("simplicity", "accuracy", "completeness", "brevity")

_RATING_ANCHOR_RE = re.compile(r"Rating[^0-9]*([0-9]+)", re.IGNORECASE)
_STANDALONE_INT_RE = re.compile(r"(?<![0-9.])([0-9]+)(?![0-9.])")


@dataclass(frozen=True)
class Criterion:
    name: str
    definition: str
    evaluation_steps: tuple[str, ...]

    @classmethod
    def load(cls, name: str) -> "Criterion":
        text = assets.load_rubric_text(name)
        definition = ""
        steps = []
        for line in text.splitlines():
            line = line.strip()
            if line.startswith("- "):
                steps.append(line[2:])
            elif line.startswith("definition:"):
                definition = line[len("definition:"):].strip()
        return cls(name=name, definition=definition, evaluation_steps=tuple(steps))


def load_rubric() -> tuple[Criterion, ...]:
    return tuple(Criterion.load(name) for name in CRITERIA)


@dataclass
class GevalResult:
    per_criterion: dict[str, float]
    normalized: float
    transcripts: dict[str, list[ChatMessage]] = field(default_factory=dict)
    degraded: bool = False
    errors: dict[str, str] = field(default_factory=dict)
    mode: str = "parsed"  # or "logprob_weighted"


def parse_rating(text: str) -> int:
    """First integer in [1,5] after the last "Rating" anchor, else the first
    standalone in-range integer anywhere in the text."""
    anchor = None
    for m in _RATING_ANCHOR_RE.finditer(text):
        anchor = m
    if anchor is not None and 1 <= int(anchor.group(1)) <= 5:
        return int(anchor.group(1))
    for m in _STANDALONE_INT_RE.finditer(text):
        value = int(m.group(1))
        if 1 <= value <= 5:
            return value
    raise RatingParseError(f"no rating in {text!r}")


def weighted_rating(result: CompletionResult) -> tuple[float, str]:
    """(rating, mode): logprob-weighted over digit alternatives when available."""
    parsed = parse_rating(result.text)
    if not result.token_logprobs:
        return float(parsed), "parsed"
    # the rating token is the last emitted token that is exactly the digit
    for tl in reversed(result.token_logprobs):
        if tl.token.strip() == str(parsed):
            dist = dict(tl.top_alternatives)
            dist.setdefault(tl.token, tl.logprob)
            num = den = 0.0
            for token, logprob in dist.items():
                token = token.strip()
                if token in {"1", "2", "3", "4", "5"}:
                    p = math.exp(logprob)
                    num += int(token) * p
                    den += p
            if den > 0:
                return num / den, "logprob_weighted"
            break
    return float(parsed), "parsed"


def _criterion_prompt(criterion: Criterion, source: str, adaptation: str) -> tuple[ChatMessage, ...]:
    steps = "\n".join(f"{i}. {s}" for i, s in enumerate(criterion.evaluation_steps, 1))
    user = (
        "You will rate a plain-language adaptation of a biomedical abstract "
        f"on one criterion: {criterion.name}.\n\n"
        f"Criterion definition: {criterion.definition}\n\n"
        f"Evaluation steps:\n{steps}\n\n"
        f"Source abstract:\n{source}\n\n"
        f"Adaptation:\n{adaptation}\n\n"
        "Think through the evaluation steps, then end your answer with a line "
        "of the form \"Rating: <1-5>\"."
    )
    return (ChatMessage("system", "You are a careful evaluator of medical text."),
            ChatMessage("user", user))


def geval_score(
    source: str,
    adaptation: str,
    rubric: tuple[Criterion, ...],
    model_id: str,
    client: ChatClient,
    use_logprobs: bool = True,
) -> GevalResult:
    """One rubric pass: a completion per criterion, one reprompt on an
    unparseable rating, then that criterion degrades out of the average."""
    if tuple(sorted(c.name for c in rubric)) != tuple(sorted(CRITERIA)):
        raise ValidationError("rubric must contain exactly the four criteria")
    per_criterion: dict[str, float] = {}
    transcripts: dict[str, list[ChatMessage]] = {}
    errors: dict[str, str] = {}
    mode = "parsed"
    for criterion in rubric:
        messages = _criterion_prompt(criterion, source, adaptation)
        result = client.complete(
            CompletionRequest(model_id=model_id, messages=messages, want_logprobs=use_logprobs)
        )
        transcript = list(messages) + [ChatMessage("assistant", result.text)]
        try:
            rating, used_mode = weighted_rating(result)
        except RatingParseError:
            reprompt = ChatMessage(
                "user", "Answer with a single line of the form \"Rating: <1-5>\"."
            )
            retry_messages = tuple(transcript) + (reprompt,)
            result = client.complete(
                CompletionRequest(
                    model_id=model_id, messages=retry_messages, want_logprobs=use_logprobs
                )
            )
            transcript.extend([reprompt, ChatMessage("assistant", result.text)])
            try:
                rating, used_mode = weighted_rating(result)
            except RatingParseError as exc:
                transcripts[criterion.name] = transcript
                errors[criterion.name] = str(exc)
                continue
        per_criterion[criterion.name] = rating
        transcripts[criterion.name] = transcript
        if used_mode == "logprob_weighted":
            mode = "logprob_weighted"
    if not per_criterion:
        raise RatingParseError("no criterion produced a parseable rating")
    normalized = sum((r - 1) / 4 for r in per_criterion.values()) / len(per_criterion)
    return GevalResult(
        per_criterion=per_criterion,
        normalized=normalized,
        transcripts=transcripts,
        degraded=bool(errors),
        errors=errors,
        mode=mode,
    )
