"""pathlens: skip-gram embeddings and rated 2D maps of learner clickstream logs."""

from .corpus import (
    EventRecord,
    ForumEventRecord,
    Sequence,
    TokenVocab,
    build_sequences,
    build_vocab,
    decorate_outcome,
    interleave_forum,
    parse_events,
)
from .skipgram import SkipGramConfig, SkipGramModel, embedding_of, nearest_neighbors, train
from .sweep import SweepGrid, record_rating, run_sweep
from .synth import SynthSpec, cohesion, gen_corpus
from .tsne import Projection, TsneConfig, run_tsne

__version__ = "0.1.0"

__all__ = [
    "EventRecord",
    "ForumEventRecord",
    "Sequence",
    "TokenVocab",
    "parse_events",
    "build_sequences",
    "decorate_outcome",
    "interleave_forum",
    "build_vocab",
    "SkipGramConfig",
    "SkipGramModel",
    "train",
    "embedding_of",
    "nearest_neighbors",
    "TsneConfig",
    "Projection",
    "run_tsne",
    "SweepGrid",
    "run_sweep",
    "record_rating",
    "SynthSpec",
    "gen_corpus",
    "cohesion",
    "__version__",
]
