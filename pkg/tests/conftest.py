import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for sari_oracle

from plainadapt.corpus import AdaptationSample, SourceAbstract


def make_sample(pmid, n_sentences=3, adaptation_ord=0, question_id="q1"):
    source = SourceAbstract(
        pmid=pmid,
        question_id=question_id,
        sentences=tuple(
            f"The study of {pmid} examined outcome number {i}." for i in range(n_sentences)
        ),
    )
    return AdaptationSample(
        pmid=pmid,
        adaptation_id=f"{pmid}.{adaptation_ord}",
        source=source,
        reference_sentences=tuple(
            (f"Researchers looked at result {i} for {pmid}.",) for i in range(n_sentences)
        ),
    )


@pytest.fixture
def small_corpus():
    return [make_sample(f"pmid{i:03d}") for i in range(10)]
