"""Corpus ingestion, pmid-keyed splitting, and fine-tune file export.

The canonical on-disk format is JSONL with one object per (abstract,
adaptation) pair:

    {"pmid": ..., "adaptation_id": ..., "question_id": ...,
     "source_sentences": [...], "reference_sentences": [[...], ...]}

The PLABA release layout is handled by a dedicated adapter
(`_parse_plaba`) so upstream schema drift stays isolated there.
"""

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, ValidationError
from .ioutil import atomic_write_text, write_jsonl

# The only seed the source experiment publishes; reused as the default
# split seed for reproducibility.
DEFAULT_SEED = 741667963


@dataclass(frozen=True)
class SourceAbstract:
    pmid: str
    question_id: str
    sentences: tuple[str, ...]

    def text(self) -> str:
        return " ".join(self.sentences)


@dataclass(frozen=True)
class AdaptationSample:
    """One (source abstract, reference adaptation) pair.

    reference_sentences is sentence-aligned with the source: outer index i
    holds the adapted sentences for source sentence i (possibly empty when
    the sentence was dropped entirely).
    """

    pmid: str
    adaptation_id: str
    source: SourceAbstract
    reference_sentences: tuple[tuple[str, ...], ...]

    def reference_text(self) -> str:
        return " ".join(s for row in self.reference_sentences for s in row)

    def validate(self) -> None:
        if not self.pmid:
            raise ValidationError("sample has empty pmid")
        if not self.source.sentences:
            raise ValidationError(f"pmid {self.pmid}: abstract has no sentences")
        if any(s == "" for s in self.source.sentences):
            raise ValidationError(f"pmid {self.pmid}: empty source sentence")
        if len(self.reference_sentences) != len(self.source.sentences):
            raise ValidationError(
                f"pmid {self.pmid}: alignment mismatch "
                f"({len(self.reference_sentences)} reference rows for "
                f"{len(self.source.sentences)} source sentences)"
            )


Corpus = list[AdaptationSample]


@dataclass
class SplitSpec:
    train_ratio: float = 0.8
    seed: int = DEFAULT_SEED
    train_pmids: set[str] = field(default_factory=set)
    validation_pmids: set[str] = field(default_factory=set)


@dataclass
class FinetuneManifest:
    """Hyperparameters recorded alongside a training-file export."""

    epochs: int = 3
    batch_size: int = 1
    lr_multiplier: float = 2.0
    seed: int = DEFAULT_SEED
    training_token_estimate: int = 0
    training_loss: float | None = None
    validation_loss: float | None = None

    def __post_init__(self):
        if min(self.epochs, self.batch_size) <= 0 or self.lr_multiplier <= 0:
            raise ValidationError("fine-tune hyperparameters must be positive")

    def to_json(self) -> dict:
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "lr_multiplier": self.lr_multiplier,
            "seed": self.seed,
            "training_token_estimate": self.training_token_estimate,
            "training_loss": self.training_loss,
            "validation_loss": self.validation_loss,
        }


def distinct_pmids(corpus: Corpus) -> list[str]:
    """pmids in first-appearance order."""
    seen: dict[str, None] = {}
    for sample in corpus:
        seen.setdefault(sample.pmid, None)
    return list(seen)


def ingest(path: str | Path, format: str = "canonical_jsonl") -> Corpus:
    """Load a corpus file in the given format ("plaba_json" or "canonical_jsonl")."""
    path = Path(path)
    if format == "canonical_jsonl":
        corpus = _parse_canonical(path)
    elif format == "plaba_json":
        corpus = _parse_plaba(path)
    else:
        raise ValueError(f"unknown corpus format: {format!r}")
    if not corpus:
        raise ParseError(f"{path}: no records")
    for sample in corpus:
        sample.validate()
    return corpus


def _parse_canonical(path: Path) -> Corpus:
    corpus: Corpus = []
    with open(path, encoding="utf-8") as fh:
        rows = []
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rows.append((lineno, json.loads(line)))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
    for lineno, obj in rows:
        try:
            source = SourceAbstract(
                pmid=obj["pmid"],
                question_id=obj.get("question_id", ""),
                sentences=tuple(obj["source_sentences"]),
            )
            sample = AdaptationSample(
                pmid=obj["pmid"],
                adaptation_id=obj["adaptation_id"],
                source=source,
                reference_sentences=tuple(tuple(row) for row in obj["reference_sentences"]),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"{path}:{lineno}: malformed record ({exc})") from exc
        corpus.append(sample)
    return corpus


def _parse_plaba(path: Path) -> Corpus:
    """Adapter for the PLABA release: question_id -> pmid -> sentence-aligned rows.

    Each abstract entry is a list of [source_sentence, [adaptation_0_sentences,
    adaptation_1_sentences, ...]] rows; every row carries the same number of
    adaptations, which becomes the per-pmid sample count.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a top-level JSON object")
    corpus: Corpus = []
    for question_id, abstracts in data.items():
        for pmid, rows in abstracts.items():
            if not rows:
                raise ValidationError(f"pmid {pmid}: abstract has no sentences")
            n_adapt = {len(adaptations) for _, adaptations in rows}
            if len(n_adapt) != 1:
                raise ValidationError(
                    f"pmid {pmid}: inconsistent adaptation count across sentences"
                )
            source = SourceAbstract(
                pmid=str(pmid),
                question_id=str(question_id),
                sentences=tuple(sent for sent, _ in rows),
            )
            for k in range(n_adapt.pop()):
                corpus.append(
                    AdaptationSample(
                        pmid=str(pmid),
                        adaptation_id=f"{pmid}.{k}",
                        source=source,
                        reference_sentences=tuple(
                            tuple(adaptations[k]) for _, adaptations in rows
                        ),
                    )
                )
    return corpus


def export_canonical(corpus: Corpus, out: str | Path) -> int:
    """Write the canonical JSONL form; inverse of canonical ingest."""
    return write_jsonl(
        Path(out),
        (
            {
                "pmid": s.pmid,
                "adaptation_id": s.adaptation_id,
                "question_id": s.source.question_id,
                "source_sentences": list(s.source.sentences),
                "reference_sentences": [list(row) for row in s.reference_sentences],
            }
            for s in corpus
        ),
    )


def split_by_pmid(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Deterministic pmid-level split: shuffle pmids by seed, first round(ratio*N) train.

    Mutates spec.train_pmids / spec.validation_pmids with the chosen partition.
    """
    if not corpus:
        raise ValidationError("cannot split an empty corpus")
    if not 0 < spec.train_ratio < 1:
        raise ValidationError(f"train_ratio must be in (0,1), got {spec.train_ratio}")
    pmids = sorted(distinct_pmids(corpus))
    rng = random.Random(spec.seed)
    rng.shuffle(pmids)
    n_train = round(spec.train_ratio * len(pmids))
    if n_train == 0 or n_train == len(pmids):
        raise ValidationError(
            f"ratio {spec.train_ratio} over {len(pmids)} pmids leaves one side empty"
        )
    spec.train_pmids = set(pmids[:n_train])
    spec.validation_pmids = set(pmids[n_train:])
    train = [s for s in corpus if s.pmid in spec.train_pmids]
    validation = [s for s in corpus if s.pmid in spec.validation_pmids]
    return train, validation


def _assistant_text(sample: AdaptationSample) -> str:
    # Empty rows are sentence deletions; skip them so no double spaces appear.
    return " ".join(" ".join(row) for row in sample.reference_sentences if row)


def export_finetune_file(
    train: Corpus,
    system_prompt: str,
    out: str | Path,
    manifest: FinetuneManifest | None = None,
) -> int:
    """Export chat-format training JSONL, one record per sample.

    When a manifest is given (or by default) a JSON sidecar with the recorded
    hyperparameters is written next to the export.
    """
    if not train:
        raise ValidationError("cannot export an empty training set")
    out = Path(out)
    count = write_jsonl(
        out,
        (
            {
                "messages": [
                    {"role": "system", "content": system_prompt},
                    {"role": "user", "content": s.source.text()},
                    {"role": "assistant", "content": _assistant_text(s)},
                ]
            }
            for s in train
        ),
    )
    manifest = manifest or FinetuneManifest()
    if manifest.training_token_estimate == 0:
        # crude whitespace-token estimate over all exported text, per epoch
        tokens = sum(
            len(s.source.text().split()) + len(_assistant_text(s).split()) for s in train
        )
        manifest.training_token_estimate = tokens * manifest.epochs
    atomic_write_text(
        out.with_suffix(out.suffix + ".manifest.json"),
        json.dumps(manifest.to_json(), indent=2) + "\n",
    )
    return count
