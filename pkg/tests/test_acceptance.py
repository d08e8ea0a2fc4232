"""Top-level acceptance checks, one class per contract.

Each test is independently runnable and prints nothing on success; run with
-v for a per-criterion pass/fail line. The corpus-count checks need the
public dataset release and skip with a reason when PLABA_DATA is unset.
"""

import itertools
import json
import math
import os
import random
import time

import numpy as np
import pytest

from plainadapt.cli import main
from plainadapt.corpus import DEFAULT_SEED, SplitSpec, distinct_pmids, export_canonical, ingest, split_by_pmid
from plainadapt.geval import load_rubric, geval_score, parse_rating
from plainadapt.errors import RatingParseError
from plainadapt.llm import ChatClient, CompletionResult, MockProvider, TokenLogprob
from plainadapt.mock import mock_provider
from plainadapt.pipelines import PromptTemplate, adapt_two_agents, run_grid
from plainadapt.readability import fk_grade, smog_index
from plainadapt.report import format_cell
from plainadapt.sari import sari
from plainadapt.semsim import EMBED_DIM, SemSimScore, TokenEmbeddings, greedy_match
from plainadapt.stats import mean, sample_sd

from conftest import make_sample
from sari_oracle import oracle_components

TEMPLATE = PromptTemplate(system="Simplify.", user_pattern="Rewrite: {abstract}")
PERSONA = "You are a smart 13-14-year-old student."


class TestReadabilityOracles:
    def test_fk_hand_computed(self):
        # 6 words, 1 sentence, 6 syllables: 0.39*6 + 11.8*1 - 15.59
        assert fk_grade("The cat sat on the mat.") == pytest.approx(-1.45, abs=0.01)

    def test_smog_zero_polysyllables_is_the_constant(self):
        text = " ".join("The cat sat." for _ in range(30))
        score, valid = smog_index(text)
        assert score == 3.1291
        assert valid is True

    def test_smog_invalid_below_thirty_sentences(self):
        text = " ".join("Endocarditis complicates interpretation." for _ in range(10))
        _, valid = smog_index(text)
        assert valid is False


class TestSariOracleEquivalence:
    def test_exhaustive_length_four_three_symbols(self):
        div = lambda a, b: a / b
        seqs = [()]
        for length in range(1, 5):
            seqs.extend(itertools.product("abc", repeat=length))
        seqs = [list(s) for s in seqs]
        assert len(seqs) == 121
        for source in seqs:
            for reference in seqs:
                for candidate in seqs:
                    got = sari(source, candidate, [reference])
                    total = 0.0
                    for n in (1, 2, 3, 4):
                        f_add, f_keep, p_del = oracle_components(
                            source, candidate, [reference], n, div=div
                        )
                        lib = got.per_n[n]
                        assert abs(lib[0] - f_add) <= 1e-9, (source, candidate, reference, n)
                        assert abs(lib[1] - f_keep) <= 1e-9, (source, candidate, reference, n)
                        assert abs(lib[2] - p_del) <= 1e-9, (source, candidate, reference, n)
                        total += (f_add + f_keep + p_del) / 3
                    assert abs(got.overall - total / 4) <= 1e-9, (source, candidate, reference)


class TestSemSimProperties:
    def embeddings(self, rows, label="t"):
        vectors = np.asarray(rows, dtype=np.float64)
        vectors = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
        return TokenEmbeddings(
            tokens=tuple(f"{label}{i}" for i in range(len(rows))), vectors=vectors
        )

    def random_embeddings(self, rng, n):
        return self.embeddings([[rng.gauss(0, 1) for _ in range(EMBED_DIM)] for _ in range(n)])

    def test_identical_inputs_f1_one(self):
        rng = random.Random(17)
        emb = self.random_embeddings(rng, 12)
        score = greedy_match(emb, emb)
        assert score.f1 == pytest.approx(1.0, abs=1e-9)

    def test_precision_recall_symmetry_thousand_pairs(self):
        rng = random.Random(99)
        for _ in range(1000):
            a = self.random_embeddings(rng, rng.randint(1, 6))
            b = self.random_embeddings(rng, rng.randint(1, 6))
            forward = greedy_match(a, b)
            backward = greedy_match(b, a)
            assert forward.precision == pytest.approx(backward.recall, abs=1e-12)
            assert forward.recall == pytest.approx(backward.precision, abs=1e-12)

    def test_hand_computed_asymmetric_case(self):
        e1 = [1.0] + [0.0] * (EMBED_DIM - 1)
        e2 = [0.0, 1.0] + [0.0] * (EMBED_DIM - 2)
        candidate = self.embeddings([e1])
        reference = self.embeddings([e1, e2])
        score = greedy_match(candidate, reference)
        assert score.precision == pytest.approx(1.0, abs=1e-12)
        assert score.recall == pytest.approx(0.5, abs=1e-12)
        assert score.f1 == pytest.approx(2 / 3, abs=1e-12)


class TestPipelineDeterminism:
    def test_full_mock_grid_byte_identical(self, tmp_path):
        corpus = [make_sample(f"p{i}") for i in range(6)]
        artifacts = []
        for sub in ("a", "b"):
            runs = run_grid(
                corpus, ["baseline", "ft", "two_agents"], ["m1", "m2"],
                ChatClient(mock_provider()), tmp_path / sub, TEMPLATE, PERSONA,
            )
            artifacts.append({r.path.name: r.path.read_bytes() for r in runs})
        assert len(artifacts[0]) == 6
        assert artifacts[0] == artifacts[1]

    @pytest.mark.parametrize("rounds", [1, 2, 3])
    def test_two_agents_call_count(self, rounds):
        client = ChatClient(mock_provider())
        adapt_two_agents(
            make_sample("p1").source, TEMPLATE, PERSONA, "m", client, max_rounds=rounds
        )
        assert client.provider.calls == 1 + 2 * rounds


class TestGevalContract:
    def test_all_fours_normalized_exact(self):
        client = ChatClient(MockProvider([{"text": "Rating: 4"}] * 4))
        result = geval_score("src", "adapted", load_rubric(), "judge", client)
        assert result.normalized == 0.75

    def test_logprob_weighted_case(self):
        response = CompletionResult(
            text="Rating: 4", prompt_tokens=0, completion_tokens=0,
            token_logprobs=(
                TokenLogprob("4", math.log(0.6), {"4": math.log(0.6), "5": math.log(0.4)}),
            ),
        )
        client = ChatClient(MockProvider([response] * 4))
        result = geval_score("src", "adapted", load_rubric(), "judge", client)
        assert result.normalized == pytest.approx(0.85, abs=1e-9)

    def test_parse_rating_examples(self):
        assert parse_rating("Rating: 3") == 3
        assert parse_rating("I considered 10 factors. Rating: 2") == 2
        with pytest.raises(RatingParseError):
            parse_rating("no score here")


needs_dataset = pytest.mark.skipif(
    not os.environ.get("PLABA_DATA"),
    reason="PLABA_DATA is unset; the public dataset release is not bundled",
)


@needs_dataset
class TestCorpusCounts:
    @pytest.fixture(scope="class")
    def corpus(self):
        return ingest(os.environ["PLABA_DATA"], format="plaba_json")

    def test_counts(self, corpus):
        assert len(corpus) == 917
        assert len(distinct_pmids(corpus)) == 750

    def test_split_partitions_pmids_and_conserves_samples(self, corpus):
        train, validation = split_by_pmid(corpus, SplitSpec(ratio=0.8, seed=DEFAULT_SEED))
        assert len(train) + len(validation) == 917
        assert not (set(distinct_pmids(train)) & set(distinct_pmids(validation)))


class TestAggregation:
    def test_mean_and_sd(self):
        assert mean([2, 4, 6]) == pytest.approx(4.00, abs=1e-12)
        assert sample_sd([2, 4, 6]) == pytest.approx(2.00, abs=1e-12)

    def test_cell_format_byte_exact(self):
        assert format_cell(8.93, 1.76) == "8.93 (SD=1.76)"


class TestEndToEndOffline:
    def test_full_offline_pipeline_under_a_minute(self, tmp_path):
        start = time.monotonic()
        corpus_path = tmp_path / "corpus.jsonl"
        export_canonical([make_sample(f"p{i}") for i in range(6)], corpus_path)

        train = tmp_path / "train.jsonl"
        validation = tmp_path / "validation.jsonl"
        assert main([
            "split", "--in", str(corpus_path), "--ratio", "0.8", "--seed", "1",
            "--out-train", str(train), "--out-validation", str(validation),
            "--manifest", str(tmp_path / "split.json"),
        ]) == 0

        runs_dir = tmp_path / "runs"
        assert main([
            "adapt", "--in", str(train), "--out-dir", str(runs_dir), "--mock",
            "--approach", "baseline", "--approach", "ft", "--approach", "two_agents",
            "--model", "m1", "--model", "m2",
        ]) == 0
        run_paths = sorted(runs_dir.glob("*.jsonl"))
        assert len(run_paths) == 6

        eval_paths = []
        for run_path in run_paths:
            eval_path = tmp_path / f"eval_{run_path.stem}.jsonl"
            assert main([
                "eval", "--run", str(run_path), "--corpus", str(train),
                "--out", str(eval_path), "--embedder", "hash",
            ]) == 0
            assert main([
                "geval", "--run", str(run_path), "--corpus", str(train),
                "--eval", str(eval_path), "--mock",
            ]) == 0
            eval_paths.append(eval_path)

        report_path = tmp_path / "report.md"
        args = ["report", "--corpus", str(train), "--out", str(report_path),
                "--format", "markdown"]
        for eval_path in eval_paths:
            args += ["--in", str(eval_path)]
        assert main(args) == 0

        text = report_path.read_text()
        for model in ("m1", "m2"):
            for row in (f"{model}_baseline", f"{model}-ft_ft", f"{model}_two_agents"):
                assert f"| {row} |" in text
        assert "Abstract" in text and "GroundTruth" in text
        assert time.monotonic() - start < 60
