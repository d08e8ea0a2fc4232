#!/usr/bin/env python3
"""Run the full adaptation experiment over a canonical corpus.

Splits by document id, runs the (approach x model) grid, scores every
adaptation, and writes a summary table plus FK histogram data. With --mock
the whole thing runs offline against the deterministic scripted provider.
"""

import sys
from pathlib import Path

import click

from plainadapt.config import load_config
from plainadapt.corpus import SplitSpec, export_canonical, ingest, split_by_pmid
from plainadapt.geval import geval_score, load_rubric
from plainadapt.ioutil import atomic_write_text, write_jsonl
from plainadapt.llm import ChatClient, HttpChatProvider, RateLimiter
from plainadapt.mock import mock_provider
from plainadapt.pipelines import run_grid
from plainadapt.report import evaluate_run, fk_distribution, render, summarize
from plainadapt.semsim import HashEmbedder


@click.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", default="results", show_default=True)
@click.option("--mock", is_flag=True, help="Offline deterministic provider.")
@click.option("--judge-model", default="gpt-4o-2024-08-06", show_default=True)
@click.option("--skip-geval", is_flag=True)
def main(corpus_path, config_path, out_dir, mock, judge_model, skip_geval):
    cfg = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    corpus = ingest(corpus_path)
    train, validation = split_by_pmid(
        corpus, SplitSpec(train_ratio=cfg.split_ratio, seed=cfg.seed)
    )
    export_canonical(train, out / "train.jsonl")
    export_canonical(validation, out / "validation.jsonl")
    click.echo(f"split: {len(train)} train / {len(validation)} validation samples")

    if mock:
        client = ChatClient(mock_provider())
    else:
        client = ChatClient(
            HttpChatProvider(cfg.base_url, api_key_env=cfg.api_key_env),
            limiter=RateLimiter(cfg.requests_per_minute),
        )
    runs = run_grid(
        validation, cfg.approaches, cfg.model_ids, client, out / "runs",
        max_rounds=cfg.max_rounds, ft_model_map=cfg.ft_model_map,
    )

    rubric = load_rubric()
    sources = {s.pmid: s.source.text() for s in validation}
    all_records = []
    for run in runs:
        records = evaluate_run(run, validation, HashEmbedder())
        if not skip_geval:
            for record in records:
                adaptation = run.by_pmid().get(record.pmid)
                if adaptation is None:
                    continue
                record.geval = geval_score(
                    sources[record.pmid], adaptation.text, rubric,
                    judge_model, client,
                )
        write_jsonl(out / f"eval_{run.path.stem}.jsonl",
                    (r.to_json() for r in records))
        all_records.extend(records)
        click.echo(f"scored {run.path.stem}: {len(records)} records")

    table = summarize(all_records, validation)
    atomic_write_text(out / "report.md", render(table, format="markdown"))
    import json

    atomic_write_text(out / "fk_dist.json", json.dumps(fk_distribution(all_records)))
    click.echo(f"usage: {client.ledger.totals()}")
    click.echo(f"report: {out / 'report.md'}")


if __name__ == "__main__":
    sys.exit(main())
