"""Single entry point wiring the modules into the experiment workflow.

Exit codes: 0 success, 1 domain error, 2 usage error. --mock makes the
whole pipeline runnable offline.
"""

import json
import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from . import report as report_mod
from .annotation import SessionStore, create_session
from .config import load_config
from .errors import PlainAdaptError
from .geval import geval_score, load_rubric
from .ioutil import atomic_write_text, write_jsonl
from .llm import ChatClient, HttpChatProvider, RateLimiter
from .mock import mock_provider
from .pipelines import APPROACHES, ApproachRun, PromptTemplate, run_grid
from .semsim import HashEmbedder, HttpEmbedder
from . import assets


def _emit(ctx, event: str, **fields):
    if ctx.obj.get("json_logs"):
        click.echo(json.dumps({"event": event, **fields}, ensure_ascii=False))
    else:
        detail = " ".join(f"{k}={v}" for k, v in fields.items())
        click.echo(f"{event} {detail}".strip())


def _client(cfg, mock: bool) -> ChatClient:
    if mock:
        return ChatClient(mock_provider())
    provider = HttpChatProvider(cfg.base_url, api_key_env=cfg.api_key_env)
    limiter = RateLimiter(cfg.requests_per_minute) if cfg.requests_per_minute else None
    return ChatClient(provider, retry_cap=cfg.retry_cap, rate_limiter=limiter)


def _template(cfg) -> PromptTemplate:
    system = (
        Path(cfg.baseline_system_path).read_text(encoding="utf-8").strip()
        if cfg.baseline_system_path
        else assets.load_prompt("baseline_system")
    )
    user = (
        Path(cfg.baseline_user_path).read_text(encoding="utf-8").strip()
        if cfg.baseline_user_path
        else assets.load_prompt("baseline_user")
    )
    return PromptTemplate(system=system, user_pattern=user)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="INI config file.")
@click.option("--json-logs", is_flag=True, help="Emit one JSON object per log line.")
@click.pass_context
def cli(ctx, config_path, json_logs):
    ctx.ensure_object(dict)
    ctx.obj["config"] = load_config(config_path)
    ctx.obj["json_logs"] = json_logs


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["plaba_json", "canonical_jsonl"]),
              default="plaba_json", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def ingest(ctx, in_path, fmt, out_path):
    """Normalize a dataset release into canonical corpus JSONL."""
    corpus = corpus_mod.ingest(in_path, format=fmt)
    count = corpus_mod.export_canonical(corpus, out_path)
    _emit(ctx, "ingested", samples=count,
          pmids=len(corpus_mod.distinct_pmids(corpus)), out=out_path)


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--ratio", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out-train", default="train.jsonl", show_default=True)
@click.option("--out-validation", default="validation.jsonl", show_default=True)
@click.option("--manifest", "manifest_path", default="split.json", show_default=True)
@click.pass_context
def split(ctx, in_path, ratio, seed, out_train, out_validation, manifest_path):
    """Deterministic pmid-level train/validation split."""
    cfg = ctx.obj["config"]
    spec = corpus_mod.SplitSpec(
        train_ratio=ratio if ratio is not None else cfg.split_ratio,
        seed=seed if seed is not None else cfg.seed,
    )
    corpus = corpus_mod.ingest(in_path)
    train, validation = corpus_mod.split_by_pmid(corpus, spec)
    corpus_mod.export_canonical(train, out_train)
    corpus_mod.export_canonical(validation, out_validation)
    atomic_write_text(
        Path(manifest_path),
        json.dumps(
            {
                "ratio": spec.train_ratio,
                "seed": spec.seed,
                "train_pmids": sorted(spec.train_pmids),
                "validation_pmids": sorted(spec.validation_pmids),
            },
            indent=2,
        )
        + "\n",
    )
    _emit(ctx, "split", train=len(train), validation=len(validation),
          seed=spec.seed, manifest=manifest_path)


@cli.command("ft-export")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--system-prompt-file", type=click.Path(exists=True), default=None)
@click.pass_context
def ft_export(ctx, in_path, out_path, system_prompt_file):
    """Export chat-format fine-tuning JSONL plus a hyperparameter sidecar."""
    system_prompt = (
        Path(system_prompt_file).read_text(encoding="utf-8").strip()
        if system_prompt_file
        else assets.load_prompt("baseline_system")
    )
    train = corpus_mod.ingest(in_path)
    count = corpus_mod.export_finetune_file(train, system_prompt, out_path)
    _emit(ctx, "ft_export", records=count, out=out_path)


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--approach", "approaches", multiple=True,
              type=click.Choice(list(APPROACHES)))
@click.option("--model", "models", multiple=True)
@click.option("--out-dir", default=None)
@click.option("--max-rounds", type=int, default=None)
@click.option("--mock", is_flag=True, help="Deterministic offline provider.")
@click.pass_context
def adapt(ctx, in_path, approaches, models, out_dir, max_rounds, mock):
    """Run the (approach x model) adaptation grid over a corpus."""
    cfg = ctx.obj["config"]
    corpus = corpus_mod.ingest(in_path)
    client = _client(cfg, mock)
    runs = run_grid(
        corpus,
        approaches=list(approaches) or cfg.approaches,
        model_ids=list(models) or cfg.model_ids,
        client=client,
        out_dir=out_dir or cfg.out_dir,
        template=_template(cfg),
        persona=(
            Path(cfg.persona_path).read_text(encoding="utf-8").strip()
            if cfg.persona_path else None
        ),
        max_rounds=max_rounds if max_rounds is not None else cfg.max_rounds,
        ft_model_map=cfg.ft_model_map,
    )
    for run in runs:
        _emit(ctx, "run", approach=run.approach, model=run.model_id,
              adaptations=len(run.adaptations), errors=len(run.errors),
              path=str(run.path))
    _emit(ctx, "usage", ledger=client.ledger.totals())


@cli.command()
@click.option("--run", "run_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--embedder", type=click.Choice(["hash", "http"]), default="hash",
              show_default=True)
@click.option("--embed-url", default=None)
@click.option("--embed-model", default=None)
@click.pass_context
def eval(ctx, run_path, corpus_path, out_path, embedder, embed_url, embed_model):
    """Compute FK/SMOG/SARI/semantic-similarity records for a run artifact."""
    run = ApproachRun.load(run_path)
    corpus = corpus_mod.ingest(corpus_path)
    if embedder == "hash":
        provider = HashEmbedder()
    else:
        provider = HttpEmbedder(embed_url or "", model=embed_model or "")
    records = report_mod.evaluate_run(run, corpus, provider)
    write_jsonl(Path(out_path), (r.to_json() for r in records))
    _emit(ctx, "eval", records=len(records), out=out_path)


@cli.command()
@click.option("--run", "run_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--eval", "eval_path", required=True, type=click.Path(exists=True),
              help="Metric artifact to augment in place.")
@click.option("--model", "model_id", default="gpt-4o-2024-08-06", show_default=True)
@click.option("--no-logprobs", is_flag=True, help="Use raw parsed ratings.")
@click.option("--mock", is_flag=True)
@click.pass_context
def geval(ctx, run_path, corpus_path, eval_path, model_id, no_logprobs, mock):
    """Add LLM-rubric scores to an existing metric artifact."""
    cfg = ctx.obj["config"]
    run = ApproachRun.load(run_path)
    corpus = corpus_mod.ingest(corpus_path)
    sources = {}
    for sample in corpus:
        sources.setdefault(sample.pmid, sample.source.text())
    client = _client(cfg, mock)
    rubric = load_rubric()
    records = report_mod.load_metric_records(eval_path)
    by_pmid = {r.pmid: r for r in records}
    scored = 0
    for adaptation in run.adaptations:
        record = by_pmid.get(adaptation.pmid)
        if record is None or adaptation.pmid not in sources:
            continue
        try:
            record.geval = geval_score(
                sources[adaptation.pmid], adaptation.text, rubric, model_id, client,
                use_logprobs=not no_logprobs,
            )
            scored += 1
        except PlainAdaptError as exc:
            record.errors["geval"] = str(exc)
    write_jsonl(Path(eval_path), (r.to_json() for r in records))
    _emit(ctx, "geval", scored=scored, out=eval_path)


@cli.command()
@click.option("--in", "in_paths", multiple=True, required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["markdown", "csv"]),
              default="markdown", show_default=True)
@click.option("--fk-dist", "fk_dist_path", type=click.Path(), default=None,
              help="Also write FK histogram data (JSON).")
@click.option("--bins", type=int, default=10, show_default=True)
@click.pass_context
def report(ctx, in_paths, corpus_path, out_path, fmt, fk_dist_path, bins):
    """Render the quantitative mean/SD table from metric artifacts."""
    records = []
    for path in in_paths:
        records.extend(report_mod.load_metric_records(path))
    corpus = corpus_mod.ingest(corpus_path) if corpus_path else None
    table = report_mod.summarize(records, corpus)
    atomic_write_text(Path(out_path), report_mod.render(table, format=fmt))
    if fk_dist_path:
        dist = report_mod.fk_distribution(records, bins=bins)
        atomic_write_text(Path(fk_dist_path), json.dumps(dist, indent=2) + "\n")
    _emit(ctx, "report", rows=len(table.rows), out=out_path)


@cli.command()
@click.option("--listen", default=None, help="host:port")
@click.option("--store", "store_path", default=None)
@click.option("--ui-dir", type=click.Path(), default=None,
              help="Static rater UI bundle to serve at /.")
@click.pass_context
def serve(ctx, listen, store_path, ui_dir):
    """Run the annotation HTTP API (and optionally the rater UI)."""
    import uvicorn
    from .server import create_app

    cfg = ctx.obj["config"]
    store = SessionStore(store_path or cfg.store_path)
    app = create_app(store, cors_origins=cfg.cors_origins)
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    host, _, port = (listen or cfg.listen).partition(":")
    _emit(ctx, "serve", listen=f"{host}:{port}")
    uvicorn.run(app, host=host, port=int(port or 8000))


@cli.group()
def session():
    """Create or aggregate rating sessions directly on the store file."""


@session.command("create")
@click.option("--runs", "run_paths", multiple=True, required=True,
              type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--sample-size", type=int, required=True)
@click.option("--seed", type=int, default=None)
@click.option("--raters", required=True, help="Comma-separated rater ids.")
@click.option("--store", "store_path", default=None)
@click.pass_context
def session_create(ctx, run_paths, corpus_path, sample_size, seed, raters, store_path):
    cfg = ctx.obj["config"]
    runs = [ApproachRun.load(p) for p in run_paths]
    samples = corpus_mod.ingest(corpus_path)
    sources = {}
    for sample in samples:
        sources.setdefault(sample.pmid, sample.source.text())
    sess = create_session(
        runs,
        sample_size=sample_size,
        seed=seed if seed is not None else cfg.seed,
        sources=sources,
        rater_ids=[r.strip() for r in raters.split(",") if r.strip()],
    )
    store = SessionStore(store_path or cfg.store_path)
    store.add_session(sess)
    _emit(ctx, "session_created", session_id=sess.session_id,
          items=len(sess.sample_ids))


@session.command("aggregate")
@click.option("--id", "session_id", required=True)
@click.option("--store", "store_path", default=None)
@click.option("--standardize", is_flag=True)
@click.pass_context
def session_aggregate(ctx, session_id, store_path, standardize):
    cfg = ctx.obj["config"]
    store = SessionStore(store_path or cfg.store_path)
    table = store.aggregate(session_id, standardize=standardize)
    click.echo(json.dumps(table, indent=2))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except PlainAdaptError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
