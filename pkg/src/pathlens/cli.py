"""Command-line interface: ingest -> train -> tsne -> sweep -> rate -> serve.

Every stage is deterministic for a fixed seed (workers=1), so re-running a
command with the same inputs rewrites byte-identical outputs.
"""

from __future__ import annotations

import functools
import shutil
from pathlib import Path

import click

from . import corpus, plots, server, skipgram, sweep, synth, tsne
from .errors import PathlensError

SEQUENCES_FILE = "sequences.txt"
VOCAB_FILE = "vocab.json"
METADATA_FILE = "metadata.csv"


def friendly_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PathlensError as exc:
            raise click.ClickException(str(exc))
    return wrapper


def _parse_mode(mode: str):
    """--mode softmax or neg:K."""
    if mode == "softmax":
        return skipgram.MODE_SOFTMAX, 5
    if mode.startswith("neg:"):
        k = int(mode.split(":", 1)[1])
        return skipgram.MODE_NEGATIVE, k
    raise click.BadParameter(f"mode must be 'softmax' or 'neg:K', got {mode!r}")


def _load_corpus_dir(seqs_dir: Path):
    sequences = corpus.read_sequences(seqs_dir / SEQUENCES_FILE)
    vocab_path = seqs_dir / VOCAB_FILE
    if vocab_path.exists():
        vocab = corpus.load_vocab(vocab_path)
    else:
        vocab = corpus.build_vocab(sequences)
    return sequences, vocab


def _tsne_config(perplexity: float, iters: int, seed: int) -> tsne.TsneConfig:
    """Published constants at the default budget, scaled down for short runs."""
    return tsne.TsneConfig(
        perplexity=perplexity,
        iterations=iters,
        early_exaggeration_iters=min(100, iters // 3),
        momentum_switch_iter=min(250, iters // 2),
        seed=seed,
    )


@click.group()
def main():
    """Token embeddings and rated 2D maps of learner clickstream logs."""


@main.command()
@click.option("--events", "events_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--forum", "forum_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--forum-scheme", type=click.Choice(["per_topic", "single_token"]), default="per_topic")
@click.option("--outcomes", "outcomes_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--on-missing", type=click.Choice(["error", "skip"]), default="error")
@click.option("--metadata", "metadata_path", type=click.Path(exists=True, path_type=Path), default=None,
              help="Screen metadata CSV, copied into the corpus dir for later stages.")
@click.option("--min-count", type=int, default=1, show_default=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@friendly_errors
def ingest(events_path, forum_path, forum_scheme, outcomes_path, on_missing, metadata_path,
           min_count, out_dir):
    """Parse event logs into per-student sequences and a vocabulary."""
    events = corpus.read_events(events_path)
    if forum_path is not None:
        forum = corpus.read_forum_events(forum_path)
        events = corpus.interleave_forum(events, forum, scheme=forum_scheme)
    sequences = corpus.build_sequences(events)
    if outcomes_path is not None:
        outcomes = corpus.read_outcomes(outcomes_path)
        sequences = corpus.decorate_outcome(sequences, outcomes, on_missing=on_missing)
    vocab = corpus.build_vocab(sequences, min_count=min_count)

    out_dir.mkdir(parents=True, exist_ok=True)
    corpus.write_sequences(out_dir / SEQUENCES_FILE, sequences)
    corpus.save_vocab(out_dir / VOCAB_FILE, vocab)
    if metadata_path is not None:
        shutil.copyfile(metadata_path, out_dir / METADATA_FILE)
    click.echo(f"{len(sequences)} sequences, {len(vocab)} tokens -> {out_dir}")


@main.command()
@click.option("--seqs", "seqs_dir", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True)
@click.option("--vector-size", type=int, required=True)
@click.option("--window", type=int, required=True)
@click.option("--epochs", type=int, default=5, show_default=True)
@click.option("--lr", type=float, default=0.025, show_default=True)
@click.option("--lr-floor", type=float, default=1e-4, show_default=True)
@click.option("--mode", default="softmax", show_default=True, help="softmax or neg:K")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@friendly_errors
def train(seqs_dir, vector_size, window, epochs, lr, lr_floor, mode, seed, workers, out_path):
    """Train skip-gram embeddings over an ingested corpus."""
    sequences, vocab = _load_corpus_dir(seqs_dir)
    mode_name, k = _parse_mode(mode)
    config = skipgram.SkipGramConfig(
        vector_size=vector_size, window=window, epochs=epochs,
        learning_rate=lr, lr_floor=lr_floor, mode=mode_name, negative=k,
        seed=seed, workers=workers,
    )
    model, trace = skipgram.train(sequences, vocab, config)
    skipgram.save_model(model, out_path)
    for epoch, loss in enumerate(trace, start=1):
        click.echo(f"epoch {epoch}: mean pair loss {loss:.6f}")
    click.echo(f"model ({len(vocab)} x {vector_size}) -> {out_path}")


@main.command(name="tsne")
@click.option("--model", "model_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--perplexity", type=float, default=30.0, show_default=True)
@click.option("--iters", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@click.option("--plot", "plot_path", type=click.Path(path_type=Path), default=None,
              help="Also render the KL convergence curve to this PNG.")
@friendly_errors
def tsne_cmd(model_path, perplexity, iters, seed, out_path, plot_path):
    """Project a trained model's embeddings to 2D."""
    model = skipgram.load_model(model_path)
    config = _tsne_config(perplexity, iters, seed)
    projection = tsne.run_tsne(model.W, config)
    tsne.save_projection(out_path, model.vocab.tokens, projection)
    if plot_path is not None:
        plots.render_kl_trace(projection.kl_trace, plot_path)
    summary = f"projection of {len(model.vocab)} tokens -> {out_path}"
    if projection.kl_trace:
        summary += f" (final KL {projection.kl_trace[-1]:.4f})"
    click.echo(summary)


def _parse_int_list(raw: str, name: str):
    try:
        return tuple(int(part) for part in raw.split(",") if part.strip() != "")
    except ValueError:
        raise click.BadParameter(f"{name} must be comma-separated integers, got {raw!r}")


@main.command(name="sweep")
@click.option("--seqs", "seqs_dir", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True)
@click.option("--windows", default="1,3,5", show_default=True)
@click.option("--vector-sizes", default="2,7,12,17,22,27,32", show_default=True)
@click.option("--scope", type=click.Choice(["joint", "per-group"]), default="joint", show_default=True)
@click.option("--metadata", "metadata_path", type=click.Path(exists=True, path_type=Path), default=None,
              help="Overrides metadata.csv from the corpus dir.")
@click.option("--epochs", type=int, default=5, show_default=True)
@click.option("--lr", type=float, default=0.025, show_default=True)
@click.option("--mode", default="softmax", show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--perplexity", type=float, default=30.0, show_default=True)
@click.option("--iters", type=int, default=1000, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True, help="Parallel sweep cells.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@friendly_errors
def sweep_cmd(seqs_dir, windows, vector_sizes, scope, metadata_path, epochs, lr, mode,
              seed, perplexity, iters, jobs, out_dir):
    """Train and project every (window, vector size) grid cell into a gallery."""
    sequences, vocab = _load_corpus_dir(seqs_dir)
    metadata = None
    if metadata_path is None and (seqs_dir / METADATA_FILE).exists():
        metadata_path = seqs_dir / METADATA_FILE
    if metadata_path is not None:
        metadata = corpus.read_metadata(metadata_path)

    grid = sweep.SweepGrid(_parse_int_list(windows, "--windows"),
                           _parse_int_list(vector_sizes, "--vector-sizes"))
    mode_name, k = _parse_mode(mode)
    base = skipgram.SkipGramConfig(epochs=epochs, learning_rate=lr, mode=mode_name,
                                   negative=k, seed=seed)
    tsne_config = _tsne_config(perplexity, iters, seed)
    manifest = sweep.run_sweep(
        sequences, vocab, grid, base, tsne_config,
        scope=scope.replace("-", "_"), out_dir=out_dir, metadata=metadata, jobs=jobs,
    )
    failed = [e["plot_id"] for e in manifest["entries"] if e["error"]]
    click.echo(f"{len(manifest['entries'])} cells -> {out_dir}"
               + (f" ({len(failed)} failed: {', '.join(failed)})" if failed else ""))


@main.command()
@click.argument("gallery", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("plot_id")
@click.argument("rating", type=int)
@click.option("--note", default=None)
@friendly_errors
def rate(gallery, plot_id, rating, note):
    """Record an expert usefulness rating (1..5) for one plot."""
    sweep.record_rating(gallery, plot_id, rating, note)
    click.echo(f"{plot_id}: rated {rating}")


@main.command(name="serve")
@click.argument("gallery", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--bind", default="127.0.0.1:8000", show_default=True, help="HOST:PORT")
@friendly_errors
def serve_cmd(gallery, bind):
    """Serve the gallery API and viewer assets."""
    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise click.BadParameter("--bind must look like HOST:PORT")
    srv = server.serve(gallery, host=host, port=int(port))
    click.echo(f"serving {gallery} on http://{host}:{port}/ (Ctrl-C to stop)")
    try:
        srv.serve_forever()
    except KeyboardInterrupt:
        srv.shutdown()


@main.command(name="synth")
@click.option("--students", type=int, default=100, show_default=True)
@click.option("--lessons", type=int, default=6, show_default=True)
@click.option("--screens-per-lesson", type=int, default=20, show_default=True)
@click.option("--behavior", type=click.Choice(["linear", "hub-spoke", "by-outcome"]),
              default="linear", show_default=True)
@click.option("--noise", type=float, default=0.0, show_default=True)
@click.option("--pass-fraction", type=float, default=0.5, show_default=True)
@click.option("--forum-rate", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@friendly_errors
def synth_cmd(students, lessons, screens_per_lesson, behavior, noise, pass_fraction,
              forum_rate, seed, out_dir):
    """Generate a synthetic cohort with planted navigational structure."""
    spec = synth.SynthSpec(
        n_students=students, n_lessons=lessons, screens_per_lesson=screens_per_lesson,
        behavior=behavior.replace("-", "_"), noise=noise, seed=seed,
        pass_fraction=pass_fraction, forum_rate=forum_rate,
    )
    events, forum, outcomes, metadata = synth.gen_corpus(spec)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus.write_events_csv(out_dir / "events.csv", events)
    corpus.write_forum_csv(out_dir / "forum.csv", forum)
    corpus.write_outcomes_csv(out_dir / "outcomes.csv", outcomes)
    corpus.write_metadata_csv(out_dir / "metadata.csv", metadata)
    click.echo(f"{len(events)} events, {len(forum)} forum posts, "
               f"{len(metadata)} screens -> {out_dir}")


if __name__ == "__main__":
    main()
