"""The three adaptation strategies and the (approach x model) sweep.

Every strategy returns an Adaptation whose transcript is the exact message
sequence sent and received, so a run can be audited or replayed against the
mock provider. Run artifacts are append-only JSONL, one adaptation (or
error record) per line, keyed by pmid for resumption.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import assets
from .corpus import Corpus, SourceAbstract, distinct_pmids
from .errors import ConfigError, PlainAdaptError, ValidationError
from .llm import ChatClient, ChatMessage, CompletionRequest

APPROACHES = ("baseline", "two_agents", "ft")


@dataclass(frozen=True)
class PromptTemplate:
    system: str
    user_pattern: str  # must contain exactly one {abstract} placeholder
    target_grade: int = 8

    def __post_init__(self):
        if self.user_pattern.count("{abstract}") != 1:
            raise ValidationError("user_pattern needs exactly one {abstract} placeholder")

    def render_user(self, abstract: str) -> str:
        return self.user_pattern.format(abstract=abstract, target_grade=self.target_grade)

    @classmethod
    def default(cls) -> "PromptTemplate":
        return cls(
            system=assets.load_prompt("baseline_system"),
            user_pattern=assets.load_prompt("baseline_user"),
        )


@dataclass
class Adaptation:
    pmid: str
    approach: str
    model_id: str
    text: str
    transcript: list[ChatMessage] = field(default_factory=list)
    prompt_tokens: int = 0
    completion_tokens: int = 0
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "pmid": self.pmid,
            "approach": self.approach,
            "model_id": self.model_id,
            "text": self.text,
            "transcript": [m.to_json() for m in self.transcript],
            "usage": {
                "prompt_tokens": self.prompt_tokens,
                "completion_tokens": self.completion_tokens,
            },
            "notes": self.notes,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Adaptation":
        return cls(
            pmid=obj["pmid"],
            approach=obj["approach"],
            model_id=obj["model_id"],
            text=obj["text"],
            transcript=[ChatMessage(m["role"], m["content"]) for m in obj["transcript"]],
            prompt_tokens=obj["usage"]["prompt_tokens"],
            completion_tokens=obj["usage"]["completion_tokens"],
            notes=list(obj.get("notes", [])),
        )


@dataclass
class ApproachRun:
    approach: str
    model_id: str
    path: Path
    adaptations: list[Adaptation] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)

    def by_pmid(self) -> dict[str, Adaptation]:
        return {a.pmid: a for a in self.adaptations}

    @classmethod
    def load(cls, path: str | Path) -> "ApproachRun":
        path = Path(path)
        adaptations: list[Adaptation] = []
        errors: list[dict] = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                if "error" in obj:
                    errors.append(obj)
                else:
                    adaptations.append(Adaptation.from_json(obj))
        if not adaptations and not errors:
            raise ValidationError(f"{path}: empty run artifact")
        probe = adaptations[0] if adaptations else None
        return cls(
            approach=probe.approach if probe else errors[0].get("approach", ""),
            model_id=probe.model_id if probe else errors[0].get("model_id", ""),
            path=path,
            adaptations=adaptations,
            errors=errors,
        )


def _one_shot(
    doc: SourceAbstract,
    template: PromptTemplate,
    model_id: str,
    client: ChatClient,
    approach: str,
) -> Adaptation:
    messages = (
        ChatMessage("system", template.system),
        ChatMessage("user", template.render_user(doc.text())),
    )
    try:
        result = client.complete(CompletionRequest(model_id=model_id, messages=messages))
    except PlainAdaptError as exc:
        raise type(exc)(f"pmid {doc.pmid}: {exc}") from exc
    return Adaptation(
        pmid=doc.pmid,
        approach=approach,
        model_id=model_id,
        text=result.text,
        transcript=list(messages) + [ChatMessage("assistant", result.text)],
        prompt_tokens=result.prompt_tokens,
        completion_tokens=result.completion_tokens,
    )


def adapt_baseline(
    doc: SourceAbstract, template: PromptTemplate, model_id: str, client: ChatClient
) -> Adaptation:
    """Single prompt-template completion."""
    return _one_shot(doc, template, model_id, client, approach="baseline")


def adapt_ft(
    doc: SourceAbstract, ft_model_id: str, template: PromptTemplate, client: ChatClient
) -> Adaptation:
    """Same call shape as the baseline, against a deployed fine-tuned model."""
    if not ft_model_id:
        raise ConfigError("no fine-tuned model id configured")
    adaptation = _one_shot(doc, template, ft_model_id, client, approach="ft")
    return adaptation


def adapt_two_agents(
    doc: SourceAbstract,
    template: PromptTemplate,
    persona: str,
    model_id: str,
    client: ChatClient,
    max_rounds: int = 1,
) -> Adaptation:
    """Adapter agent drafts; a student-persona agent asks clarification
    questions; the adapter revises. Exactly 1 + 2*max_rounds completions;
    a round whose question turn comes back empty skips its revision call."""
    if max_rounds < 1:
        raise ValidationError("max_rounds must be >= 1")

    def ask(messages: list[ChatMessage]):
        try:
            return client.complete(
                CompletionRequest(model_id=model_id, messages=tuple(messages))
            )
        except PlainAdaptError as exc:
            raise type(exc)(f"pmid {doc.pmid}: {exc}") from exc

    prompt_tokens = completion_tokens = 0
    notes: list[str] = []

    adapter_thread = [
        ChatMessage("system", template.system),
        ChatMessage("user", template.render_user(doc.text())),
    ]
    draft_result = ask(adapter_thread)
    prompt_tokens += draft_result.prompt_tokens
    completion_tokens += draft_result.completion_tokens
    adapter_thread.append(ChatMessage("assistant", draft_result.text))
    transcript = list(adapter_thread)
    text = draft_result.text

    for round_no in range(1, max_rounds + 1):
        student_thread = [
            ChatMessage("system", persona),
            ChatMessage(
                "user",
                "Here is a rewritten medical text:\n\n" + text
                + "\n\nAsk your clarification questions.",
            ),
        ]
        question_result = ask(student_thread)
        prompt_tokens += question_result.prompt_tokens
        completion_tokens += question_result.completion_tokens
        transcript.extend(student_thread)
        questions = question_result.text.strip()
        if not questions:
            # degenerate round: no questions, no revision call
            transcript.append(ChatMessage("assistant", "(no questions)"))
            notes.append(f"round {round_no}: empty clarification turn, round skipped")
            continue
        transcript.append(ChatMessage("assistant", questions))

        revision_request = ChatMessage(
            "user",
            "A 13-14-year-old reader asked these clarification questions:\n\n"
            + questions
            + "\n\nRevise your adaptation so these points are clear. "
            "Answer with the full revised text only.",
        )
        adapter_thread.append(revision_request)
        transcript.append(revision_request)
        revision_result = ask(adapter_thread)
        prompt_tokens += revision_result.prompt_tokens
        completion_tokens += revision_result.completion_tokens
        adapter_thread.append(ChatMessage("assistant", revision_result.text))
        transcript.append(ChatMessage("assistant", revision_result.text))
        text = revision_result.text

    return Adaptation(
        pmid=doc.pmid,
        approach="two_agents",
        model_id=model_id,
        text=text,
        transcript=transcript,
        prompt_tokens=prompt_tokens,
        completion_tokens=completion_tokens,
        notes=notes,
    )


def adapt_one(
    doc: SourceAbstract,
    approach: str,
    model_id: str,
    client: ChatClient,
    template: PromptTemplate,
    persona: str,
    max_rounds: int,
    ft_model_id: str | None,
) -> Adaptation:
    if approach == "baseline":
        return adapt_baseline(doc, template, model_id, client)
    if approach == "two_agents":
        return adapt_two_agents(doc, template, persona, model_id, client, max_rounds)
    if approach == "ft":
        return adapt_ft(doc, ft_model_id or "", template, client)
    raise ConfigError(f"unknown approach {approach!r}")


def run_grid(
    corpus: Corpus,
    approaches: list[str],
    model_ids: list[str],
    client: ChatClient,
    out_dir: str | Path,
    template: PromptTemplate | None = None,
    persona: str | None = None,
    max_rounds: int = 1,
    ft_model_map: dict[str, str] | None = None,
) -> list[ApproachRun]:
    """One run per (approach, model) pair over the distinct abstracts of the
    corpus. Artifacts already containing a pmid are not re-run; per-pmid
    failures are recorded as error lines and the sweep continues."""
    if not approaches or not model_ids:
        raise ConfigError("empty approach/model grid")
    template = template or PromptTemplate.default()
    persona = persona if persona is not None else assets.load_prompt("persona_student")
    ft_model_map = ft_model_map or {}
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    docs: dict[str, SourceAbstract] = {}
    for sample in corpus:
        docs.setdefault(sample.pmid, sample.source)

    runs = []
    for model_id in model_ids:
        for approach in approaches:
            path = out_dir / f"{model_id}_{approach}.jsonl"
            seen = set()
            if path.exists():
                with open(path, encoding="utf-8") as fh:
                    for line in fh:
                        if line.strip():
                            seen.add(json.loads(line)["pmid"])
            with open(path, "a", encoding="utf-8") as fh:
                for pmid in distinct_pmids(corpus):
                    if pmid in seen:
                        continue
                    try:
                        adaptation = adapt_one(
                            docs[pmid],
                            approach,
                            model_id,
                            client,
                            template,
                            persona,
                            max_rounds,
                            ft_model_map.get(model_id, f"{model_id}-ft"),
                        )
                        record = adaptation.to_json()
                    except PlainAdaptError as exc:
                        record = {
                            "pmid": pmid,
                            "approach": approach,
                            "model_id": model_id,
                            "error": str(exc),
                        }
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                    fh.flush()
            runs.append(ApproachRun.load(path))
    return runs
