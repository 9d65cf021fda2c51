"""Command-line surface for the corpus/persona/evaluation pipeline.

Exit codes: 0 success, 1 validation failure (bad records, config
conflicts), 2 usage error. All randomness flows from explicit --seed
flags; outputs are files only.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from . import decoding, ingest, metrics, persona, samples
from .corpus import corpus_stats
from .errors import StancegenError


def _pipeline_command(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except StancegenError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
def main():
    """Corpus engineering toolkit for stance-based persona pipelines."""


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@_pipeline_command
def validate(corpus_path):
    """Parse and validate a corpus file."""
    corpus = ingest.parse_corpus_file(corpus_path)
    n_claims = sum(len(d) for d in corpus.discussions.values())
    click.echo(f"ok: {len(corpus.discussions)} discussions, {n_claims} claims")


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None,
              help="Also write the stats as JSON.")
@_pipeline_command
def stats(corpus_path, json_out):
    """Corpus-level descriptive statistics."""
    corpus = ingest.parse_corpus_file(corpus_path)
    report = corpus_stats(corpus)
    for key, value in report.to_dict().items():
        if isinstance(value, float):
            value = f"{value:.2f}"
        click.echo(f"{key}={value}")
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--val", "val_fraction", type=float, default=0.05, show_default=True)
@click.option("--test", "test_fraction", type=float, default=0.05, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), required=True)
@_pipeline_command
def split(corpus_path, val_fraction, test_fraction, seed, output):
    """Stratified train/validation/test split at discussion granularity."""
    corpus = ingest.parse_corpus_file(corpus_path)
    assignment = ingest.stratified_split(corpus, val_fraction, test_fraction, seed)
    with open(output, "w", encoding="utf-8") as fh:
        ingest.write_split(assignment, fh)
    counts = assignment.counts()
    click.echo(
        f"train={counts['train']} validation={counts['validation']} test={counts['test']}"
    )


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--split", "split_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("-t", "--threshold", type=int, default=5, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Write the table as CSV.")
@_pipeline_command
def buckets(corpus_path, split_path, threshold, output):
    """Per-split claim counts grouped by author persona size."""
    corpus = ingest.parse_corpus_file(corpus_path)
    assignment = ingest.read_split_file(split_path)
    table = ingest.bucket_table(corpus, assignment, threshold)
    columns = [str(i) for i in range(threshold)] + [f">={threshold}", "total"]
    click.echo("split," + ",".join(columns))
    lines = []
    for split_name in ingest.SPLITS:
        row = table[split_name]
        line = split_name + "," + ",".join(str(row[c]) for c in columns)
        click.echo(line)
        lines.append(line)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write("split," + ",".join(columns) + "\n")
            fh.write("\n".join(lines) + "\n")


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--split", "split_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--task", type=click.Choice([samples.TASK_GENERATION,
                                           samples.TASK_CLASSIFICATION]),
              default=samples.TASK_GENERATION, show_default=True)
@click.option("--strategy",
              type=click.Choice(list(samples.EXPORT_STRATEGIES) + ["hybrid"]),
              default=samples.STRATEGY_NONE, show_default=True)
@click.option("--cap", type=int, default=persona.DEFAULT_CAP, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--split-name", type=click.Choice(list(ingest.SPLITS)),
              default=ingest.TRAIN, show_default=True,
              help="Which split to export (non-hybrid).")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@click.option("--train-output", type=click.Path(dir_okay=False), default=None,
              help="Hybrid only: path for the random-persona train export.")
@click.option("--infer-output", type=click.Path(dir_okay=False), default=None,
              help="Hybrid only: path for the dynamic-persona inference export.")
@click.option("--infer-split", type=click.Choice(list(ingest.SPLITS)),
              default=ingest.TEST, show_default=True,
              help="Hybrid only: split for the inference export.")
@_pipeline_command
def export(corpus_path, split_path, task, strategy, cap, seed, split_name,
           output, train_output, infer_output, infer_split):
    """Export persona-conditioned text-to-text samples.

    The hybrid strategy is a pipeline configuration: it writes a
    random-persona train export and a dynamic-persona inference export
    against the same corpus and split.
    """
    corpus = ingest.parse_corpus_file(corpus_path)
    assignment = ingest.read_split_file(split_path)

    def run(cfg, path):
        records = samples.export_dataset(corpus, assignment, cfg)
        with open(path, "w", encoding="utf-8") as fh:
            samples.write_samples(records, fh, cfg)
        click.echo(f"wrote {path} ({cfg.strategy}, {cfg.split})")

    if strategy == "hybrid":
        if not (train_output and infer_output):
            raise click.UsageError(
                "hybrid requires both --train-output and --infer-output"
            )
        run(samples.ExportConfig(task=task, strategy=persona.STRATEGY_RANDOM,
                                 cap=cap, seed=seed, split=ingest.TRAIN),
            train_output)
        run(samples.ExportConfig(task=task, strategy=persona.STRATEGY_DYNAMIC,
                                 cap=cap, seed=seed, split=infer_split),
            infer_output)
    else:
        if not output:
            raise click.UsageError("--output is required")
        run(samples.ExportConfig(task=task, strategy=strategy, cap=cap,
                                 seed=seed, split=split_name),
            output)


@main.command()
@click.option("--train-export", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Export file whose targets train the n-gram model.")
@click.option("--input-export", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Export file to generate a claim for each record of.")
@click.option("--order", type=int, default=3, show_default=True)
@click.option("--top-p", type=float, default=0.95, show_default=True)
@click.option("--max-length", type=int, default=40, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), required=True)
@_pipeline_command
def generate(train_export, input_export, order, top_p, max_length, seed, output):
    """Generate claims with the n-gram + nucleus sampling stand-in."""
    with open(train_export, "r", encoding="utf-8") as fh:
        _, train_records = samples.read_samples(fh)
    with open(input_export, "r", encoding="utf-8") as fh:
        _, input_records = samples.read_samples(fh)
    model = decoding.train_ngram((r["target"] for r in train_records), order)
    cfg = decoding.DecodingConfig(top_p=top_p, max_length=max_length, seed=seed)
    pairs = [
        (r["metadata"]["claim_id"], decoding.generate(model, r["source"], cfg))
        for r in input_records
    ]
    with open(output, "w", encoding="utf-8") as fh:
        samples.write_generated(pairs, fh)
    click.echo(f"wrote {output} ({len(pairs)} generations)")


@main.command("classify-baseline")
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--split", "split_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--split-name", type=click.Choice(list(ingest.SPLITS)),
              default=ingest.TEST, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Write per-claim predictions as JSON lines.")
@_pipeline_command
def classify_baseline(corpus_path, split_path, split_name, output):
    """Persona-count stance baseline vs the majority-label baseline."""
    corpus = ingest.parse_corpus_file(corpus_path)
    assignment = ingest.read_split_file(split_path)
    result = decoding.run_stance_baseline(corpus, assignment, split_name)
    click.echo(f"samples={len(result.truths)}")
    click.echo(f"majority_f1={result.majority_f1:.2f}")
    click.echo(f"persona_f1={result.persona_f1:.2f}")
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            for claim_id, truth, pred in zip(result.claim_ids, result.truths,
                                             result.persona_preds):
                fh.write(json.dumps({"claim_id": claim_id, "truth": truth,
                                     "predicted": pred}) + "\n")


@main.command()
@click.option("--export", "export_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Export file providing sources and references.")
@click.option("--generated", "generated_path",
              type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--name", default="system", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Write the machine-readable report as JSON.")
@click.option("--figure", type=click.Path(dir_okay=False), default=None,
              help="Render the report as a PNG bar chart.")
@_pipeline_command
def evaluate(export_path, generated_path, name, output, figure):
    """Score generated claims against an export's references."""
    with open(export_path, "r", encoding="utf-8") as fh:
        _, records = samples.read_samples(fh)
    with open(generated_path, "r", encoding="utf-8") as fh:
        generated = samples.read_generated(fh)
    pairs = [
        (r["source"], generated[r["metadata"]["claim_id"]], r["target"])
        for r in records
        if r["metadata"]["claim_id"] in generated
    ]
    report = metrics.evaluate_system(pairs)
    click.echo(metrics.render_report({name: report}))
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            json.dump({name: report.to_dict()}, fh, indent=2)
    if figure:
        from . import plots

        plots.save_metrics_figure({name: report}, figure)


@main.command()
@click.argument("generated_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", type=click.Path(dir_okay=False), required=True,
              help="CSV output (rank, frequency, cdf).")
@click.option("--figure", type=click.Path(dir_okay=False), default=None,
              help="Render the CDF curve as a PNG.")
@click.option("--name", default="system", show_default=True)
@_pipeline_command
def zipf(generated_path, output, figure, name):
    """Zipf cumulative distribution of a generated-claims file."""
    with open(generated_path, "r", encoding="utf-8") as fh:
        generated = samples.read_generated(fh)
    curve = metrics.zipf_cdf(generated.values())
    with open(output, "w", encoding="utf-8", newline="") as fh:
        metrics.write_zipf_csv(curve, fh)
    click.echo(f"wrote {output} ({len(curve.frequencies)} token types, "
               f"{curve.total_tokens} tokens)")
    if figure:
        from . import plots

        plots.save_zipf_figure({name: curve}, figure)


if __name__ == "__main__":
    main()
