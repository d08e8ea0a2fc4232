"""Blind human-rating backend.

A session samples pmids across the approach runs, hides which approach
produced each item behind opaque sample ids (the blinding map never leaves
the server), serves items to each rater in a seeded per-rater order, and
aggregates the four Likert criteria into a qualitative table.

Persistence is a single append-only JSONL event log replayed on load, with
an optional full-state snapshot written beside it; five raters and a few
hundred rows do not need a database.
"""

import json
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import PlainAdaptError, ValidationError
from .pipelines import ApproachRun
from .stats import mean, sample_sd

LIKERT_CRITERIA = ("simplicity", "accuracy", "completeness", "brevity")


class NotFoundError(PlainAdaptError):
    pass


class ConflictError(PlainAdaptError):
    """Duplicate (session, sample, rater) submission."""


@dataclass(frozen=True)
class SessionItem:
    sample_id: str
    source: str
    adaptation: str


@dataclass
class RatingSession:
    session_id: str
    seed: int
    items: dict[str, SessionItem]  # sample_id -> blinded payload content
    sample_ids: list[str]  # canonical order
    rater_ids: list[str]
    # server-side only; never serialized into rater-facing payloads
    blinding_map: dict[str, tuple[str, str, str]]  # sample_id -> (approach, model, pmid)

    def rater_order(self, rater_id: str) -> list[str]:
        if rater_id not in self.rater_ids:
            raise NotFoundError(f"rater {rater_id!r} not enrolled")
        rng = random.Random(f"{self.seed}:{rater_id}")
        order = list(self.sample_ids)
        rng.shuffle(order)
        return order


@dataclass(frozen=True)
class LikertRating:
    session_id: str
    sample_id: str
    rater_id: str
    simplicity: int
    accuracy: int
    completeness: int
    brevity: int
    submitted_at: float = field(default_factory=time.time)

    def __post_init__(self):
        for name in LIKERT_CRITERIA:
            score = getattr(self, name)
            if not isinstance(score, int) or not 1 <= score <= 5:
                raise ValidationError(f"{name} score {score!r} outside 1..5")

    def to_json(self) -> dict:
        return {
            "session_id": self.session_id,
            "sample_id": self.sample_id,
            "rater_id": self.rater_id,
            **{name: getattr(self, name) for name in LIKERT_CRITERIA},
            "submitted_at": self.submitted_at,
        }


def create_session(
    runs: Sequence[ApproachRun],
    sample_size: int,
    seed: int,
    sources: Mapping[str, str],
    rater_ids: Sequence[str],
    session_id: str | None = None,
) -> RatingSession:
    """Sample pmids covered by every run; one item per (pmid, run)."""
    if sample_size <= 0:
        raise ValidationError("sample_size must be positive")
    if not runs:
        raise ValidationError("no runs given")
    common = set.intersection(*(set(r.by_pmid()) for r in runs)) & set(sources)
    if sample_size > len(common):
        raise ValidationError(
            f"sample_size {sample_size} exceeds {len(common)} pmids covered by all runs"
        )
    rng = random.Random(seed)
    pmids = rng.sample(sorted(common), sample_size)
    entries = []
    for pmid in pmids:
        for run in runs:
            adaptation = run.by_pmid()[pmid]
            entries.append((run.approach, run.model_id, pmid, adaptation.text))
    rng.shuffle(entries)  # opaque ids carry no approach ordering
    items = {}
    blinding_map = {}
    sample_ids = []
    for i, (approach, model_id, pmid, text) in enumerate(entries):
        sample_id = f"item-{i:04d}"
        items[sample_id] = SessionItem(
            sample_id=sample_id, source=sources[pmid], adaptation=text
        )
        blinding_map[sample_id] = (approach, model_id, pmid)
        sample_ids.append(sample_id)
    return RatingSession(
        session_id=session_id or f"session-{seed}",
        seed=seed,
        items=items,
        sample_ids=sample_ids,
        rater_ids=list(rater_ids),
        blinding_map=blinding_map,
    )


class SessionStore:
    """Sessions + ratings with an append-only event log; single writer."""

    def __init__(self, log_path: str | Path | None = None):
        self._lock = threading.Lock()
        self.sessions: dict[str, RatingSession] = {}
        self.ratings: dict[str, list[LikertRating]] = {}
        self.log_path = Path(log_path) if log_path else None
        if self.log_path and self.log_path.exists():
            self._replay()

    def _append_event(self, event: dict) -> None:
        if self.log_path is None:
            return
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _replay(self) -> None:
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                if event["type"] == "session":
                    self._restore_session(event["session"])
                elif event["type"] == "rating":
                    rating = LikertRating(**event["rating"])
                    self.ratings.setdefault(rating.session_id, []).append(rating)

    def _restore_session(self, obj: dict) -> None:
        session = RatingSession(
            session_id=obj["session_id"],
            seed=obj["seed"],
            items={
                sid: SessionItem(sample_id=sid, source=it["source"], adaptation=it["adaptation"])
                for sid, it in obj["items"].items()
            },
            sample_ids=list(obj["sample_ids"]),
            rater_ids=list(obj["rater_ids"]),
            blinding_map={sid: tuple(v) for sid, v in obj["blinding_map"].items()},
        )
        self.sessions[session.session_id] = session
        self.ratings.setdefault(session.session_id, [])

    def add_session(self, session: RatingSession) -> None:
        with self._lock:
            self.sessions[session.session_id] = session
            self.ratings.setdefault(session.session_id, [])
            self._append_event(
                {
                    "type": "session",
                    "session": {
                        "session_id": session.session_id,
                        "seed": session.seed,
                        "items": {
                            sid: {"source": it.source, "adaptation": it.adaptation}
                            for sid, it in session.items.items()
                        },
                        "sample_ids": session.sample_ids,
                        "rater_ids": session.rater_ids,
                        "blinding_map": {
                            sid: list(v) for sid, v in session.blinding_map.items()
                        },
                    },
                }
            )

    def _session(self, session_id: str) -> RatingSession:
        if session_id not in self.sessions:
            raise NotFoundError(f"unknown session {session_id!r}")
        return self.sessions[session_id]

    def next_item(self, session_id: str, rater_id: str) -> dict:
        """Blinded payload {"item": {sample_id, source, adaptation},
        "progress": {done, total}} or {"item": None, ...} when finished."""
        session = self._session(session_id)
        order = session.rater_order(rater_id)
        rated = {
            r.sample_id for r in self.ratings.get(session_id, []) if r.rater_id == rater_id
        }
        progress = {"done": len(rated), "total": len(order)}
        for sample_id in order:
            if sample_id not in rated:
                item = session.items[sample_id]
                return {
                    "item": {
                        "sample_id": item.sample_id,
                        "source": item.source,
                        "adaptation": item.adaptation,
                    },
                    "progress": progress,
                }
        return {"item": None, "progress": progress}

    def submit_rating(self, rating: LikertRating) -> dict:
        session = self._session(rating.session_id)
        if rating.sample_id not in session.items:
            raise NotFoundError(f"unknown sample {rating.sample_id!r}")
        if rating.rater_id not in session.rater_ids:
            raise NotFoundError(f"rater {rating.rater_id!r} not enrolled")
        with self._lock:
            for existing in self.ratings.get(rating.session_id, []):
                if (
                    existing.sample_id == rating.sample_id
                    and existing.rater_id == rating.rater_id
                ):
                    raise ConflictError(
                        f"{rating.rater_id} already rated {rating.sample_id}"
                    )
            self.ratings.setdefault(rating.session_id, []).append(rating)
            self._append_event({"type": "rating", "rating": rating.to_json()})
        return {"status": "ok"}

    def aggregate(self, session_id: str, standardize: bool = False) -> dict:
        """Qualitative table: per (model, approach) mean/SD per criterion plus
        the declared (x-1)/4 normalized average (z-scored when standardize)."""
        session = self._session(session_id)
        ratings = self.ratings.get(session_id, [])
        if not ratings:
            raise ValidationError(f"session {session_id!r} has no ratings")
        groups: dict[str, dict[str, list[int]]] = {}
        for rating in ratings:
            approach, model_id, _pmid = session.blinding_map[rating.sample_id]
            label = f"{model_id}_{approach}"
            bucket = groups.setdefault(label, {name: [] for name in LIKERT_CRITERIA})
            for name in LIKERT_CRITERIA:
                bucket[name].append(getattr(rating, name))
        crit_stats = {}
        if standardize:
            # z-score per criterion over the whole session
            for name in LIKERT_CRITERIA:
                values = [getattr(r, name) for r in ratings]
                crit_stats[name] = (mean(values), sample_sd(values) or 1.0)
        rows = {}
        for label, bucket in sorted(groups.items()):
            cells = {}
            crit_means = []
            for name in LIKERT_CRITERIA:
                values = bucket[name]
                cells[name] = {
                    "mean": mean(values),
                    "sd": sample_sd(values),
                    "n": len(values),
                }
                crit_means.append(mean(values))
            if standardize:
                normalized = mean(
                    [
                        (cells[name]["mean"] - crit_stats[name][0]) / crit_stats[name][1]
                        for name in LIKERT_CRITERIA
                    ]
                )
            else:
                normalized = mean([(m - 1) / 4 for m in crit_means])
            cells["normalized"] = normalized
            rows[label] = cells
        return {"session_id": session_id, "standardized": standardize, "rows": rows}

    def snapshot(self, path: str | Path | None = None) -> Path:
        """Write a full-state JSON snapshot beside the event log."""
        from .ioutil import atomic_write_text

        if path is None:
            if self.log_path is None:
                raise ValidationError("no snapshot path available")
            path = self.log_path.with_suffix(".snapshot.json")
        state = {
            "sessions": list(self.sessions),
            "rating_counts": {sid: len(rs) for sid, rs in self.ratings.items()},
        }
        atomic_write_text(Path(path), json.dumps(state, indent=2) + "\n")
        return Path(path)
