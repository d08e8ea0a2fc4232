#!/usr/bin/env python3
"""End-to-end demo of the blinded rating workflow, fully offline.

Generates mock adaptations for a tiny synthetic corpus, opens a rating
session for two raters, submits scripted ratings through the same store the
HTTP API uses, and prints the aggregate table.
"""

import json
import random
import sys
import tempfile
from pathlib import Path

from plainadapt.annotation import LikertRating, SessionStore, create_session
from plainadapt.corpus import AdaptationSample, SourceAbstract
from plainadapt.llm import ChatClient
from plainadapt.mock import mock_provider
from plainadapt.pipelines import run_grid

SENTENCES = [
    "Anticoagulation reduced thromboembolic complications in the cohort.",
    "Participants reported fewer adverse events after the intervention.",
    "The randomized trial enrolled patients across twelve clinics.",
]


def tiny_corpus(n=6):
    corpus = []
    for i in range(n):
        source = SourceAbstract(
            pmid=f"demo{i}", question_id=f"q{i}", sentences=tuple(SENTENCES)
        )
        corpus.append(
            AdaptationSample(
                pmid=f"demo{i}", adaptation_id=f"demo{i}.0", source=source,
                reference_sentences=(
                    ("Blood thinners helped patients avoid clots.",),
                    ("People felt better after the treatment.",),
                    ("The study ran at twelve clinics.",),
                ),
            )
        )
    return corpus


def main():
    corpus = tiny_corpus()
    with tempfile.TemporaryDirectory() as tmp:
        runs = run_grid(
            corpus, ["baseline", "two_agents"], ["demo-model"],
            ChatClient(mock_provider()), Path(tmp) / "runs",
        )
        store = SessionStore(Path(tmp) / "store.jsonl")
        session = create_session(
            runs, sample_size=4, seed=7,
            sources={s.pmid: s.source.text() for s in corpus},
            rater_ids=["r1", "r2"],
        )
        store.add_session(session)

        rng = random.Random(0)
        for rater in ("r1", "r2"):
            while True:
                payload = store.next_item(session.session_id, rater)
                if payload["item"] is None:
                    break
                store.submit_rating(
                    LikertRating(
                        session_id=session.session_id,
                        sample_id=payload["item"]["sample_id"],
                        rater_id=rater,
                        simplicity=rng.randint(3, 5),
                        accuracy=rng.randint(3, 5),
                        completeness=rng.randint(2, 5),
                        brevity=rng.randint(3, 5),
                    )
                )
        print(json.dumps(store.aggregate(session.session_id), indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
