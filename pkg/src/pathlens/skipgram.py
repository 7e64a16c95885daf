"""Skip-gram embedding trainer over token sequences.

A skip-gram is a linear one-hidden-layer network trained to predict the tokens
surrounding each center token. The artifact of value is not the predictions
but the input weight matrix W: row i is the learned d-dimensional embedding of
token i, and tokens that occur in similar contexts end up with similar rows.

Two training modes are provided. full_softmax follows the exact cross-entropy
objective (one softmax over the whole vocabulary per context pair) and is the
reference mode for every numerical check. negative_sampling approximates it
with k noise tokens per pair, drawn from the unigram distribution raised to
0.75, and exists because exact softmax is slow on large vocabularies.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence as SequenceType, Tuple

import numpy as np

from .corpus import Sequence, TokenVocab
from .errors import EmptyCorpus, NonFiniteLoss, UnknownToken, VocabularyTooSmall

MODEL_FORMAT = "pathlens-sgm/1"

MODE_SOFTMAX = "softmax"
MODE_NEGATIVE = "negative_sampling"


@dataclass(frozen=True)
class SkipGramConfig:
    """Hyperparameters; vector_size and window are the two that shape the maps."""

    vector_size: int = 12
    window: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    lr_floor: float = 1e-4
    mode: str = MODE_SOFTMAX
    negative: int = 5
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.vector_size < 1:
            raise ValueError("vector_size must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not (self.learning_rate > 0 and self.lr_floor > 0):
            raise ValueError("learning_rate and lr_floor must be positive")
        if self.lr_floor > self.learning_rate:
            raise ValueError("lr_floor must not exceed learning_rate")
        if self.mode not in (MODE_SOFTMAX, MODE_NEGATIVE):
            raise ValueError(f"mode must be {MODE_SOFTMAX!r} or {MODE_NEGATIVE!r}")
        if self.mode == MODE_NEGATIVE and self.negative < 1:
            raise ValueError("negative sample count must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


class SkipGramModel:
    """Vocabulary plus the two weight matrices.

    W has shape (V, d): row i is token i's embedding. W_out has shape (d, V):
    column j scores token j as a context prediction.
    """

    def __init__(self, vocab: TokenVocab, W: np.ndarray, W_out: np.ndarray):
        self.vocab = vocab
        self.W = W
        self.W_out = W_out

    @property
    def vector_size(self) -> int:
        return self.W.shape[1]


def init_model(vocab: TokenVocab, config: SkipGramConfig) -> SkipGramModel:
    """Seeded init: W uniform on [-0.5/d, 0.5/d], W_out all zeros.

    Zero output weights make every initial softmax uniform, so the loss at
    step zero is log V per context element, which the tests pin down.
    """
    V = len(vocab)
    if V < 2:
        raise VocabularyTooSmall(V)
    d = config.vector_size
    rng = np.random.default_rng(config.seed)
    bound = 0.5 / d
    W = rng.uniform(-bound, bound, size=(V, d))
    W_out = np.zeros((d, V))
    return SkipGramModel(vocab, W, W_out)


def context_pairs(indices: SequenceType[int], window: int) -> List[Tuple[int, int]]:
    """All (center, context) pairs within +-window, truncated at the ends.

    Order is deterministic: positions ascending, offsets ascending. Indices
    must already be vocabulary indices with out-of-vocab tokens dropped.
    """
    n = len(indices)
    pairs = []
    for t in range(n):
        lo = max(0, t - window)
        hi = min(n, t + window + 1)
        for j in range(lo, hi):
            if j != t:
                pairs.append((indices[t], indices[j]))
    return pairs


def forward_softmax(model: SkipGramModel, center: int) -> np.ndarray:
    """Probability distribution over the vocabulary for one center token.

    Logits are the dot products of the center embedding with every output
    column; the max is subtracted before exponentiation for stability.
    """
    u = model.W[center] @ model.W_out
    u = u - u.max()
    e = np.exp(u)
    return e / e.sum()


def _log_prob_matrix(W: np.ndarray, W_out: np.ndarray) -> np.ndarray:
    """log p(context | center) for every (center, context) index pair."""
    logits = W @ W_out
    logits -= logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(logits).sum(axis=1, keepdims=True))
    return logits - lse


def corpus_loss(model: SkipGramModel, sequences: List[Sequence], window: int) -> float:
    """Cross-entropy over all students' context pairs, averaged per student.

    Each student contributes (1/T) * sum over positions and in-window offsets
    of -log p(context | center), with T that student's in-vocab length.
    Students with no in-vocab tokens are excluded; if none remain the corpus
    is empty.
    """
    log_p = _log_prob_matrix(model.W, model.W_out)
    total = 0.0
    any_tokens = False
    for seq in sequences:
        idxs = model.vocab.encode(seq.tokens)
        if not idxs:
            continue
        any_tokens = True
        pairs = context_pairs(idxs, window)
        if not pairs:
            continue
        centers = np.fromiter((c for c, _ in pairs), dtype=np.intp, count=len(pairs))
        contexts = np.fromiter((o for _, o in pairs), dtype=np.intp, count=len(pairs))
        total -= float(log_p[centers, contexts].sum()) / len(idxs)
    if not any_tokens:
        raise EmptyCorpus()
    return total


def pair_loss_and_gradients(
    model: SkipGramModel, center: int, context: int
) -> Tuple[float, np.ndarray, np.ndarray]:
    """Loss -log p(context|center) and its exact gradients w.r.t. W and W_out.

    Returns (loss, grad_W, grad_W_out) with full-matrix shapes; only the
    center row of grad_W is nonzero. This is the same math the SGD step
    applies, exposed so it can be checked against finite differences.
    """
    W, W_out = model.W, model.W_out
    v = W[center]
    y = forward_softmax(model, center)
    loss = -float(np.log(y[context]))
    e = y.copy()
    e[context] -= 1.0
    grad_W = np.zeros_like(W)
    grad_W[center] = W_out @ e
    grad_W_out = np.outer(v, e)
    return loss, grad_W, grad_W_out


def _softmax_step(W: np.ndarray, W_out: np.ndarray, center: int, context: int, lr: float) -> float:
    """One SGD update on the exact softmax objective; returns the pair loss."""
    v = W[center]
    u = v @ W_out
    u -= u.max()
    np.exp(u, out=u)
    u /= u.sum()
    loss = -np.log(u[context])
    u[context] -= 1.0
    grad_v = W_out @ u
    W_out -= np.outer(lr * v, u)
    W[center] -= lr * grad_v
    return float(loss)


def _negative_step(
    W: np.ndarray,
    W_out: np.ndarray,
    center: int,
    context: int,
    negatives: np.ndarray,
    lr: float,
) -> float:
    """One SGD update on the sampled objective: one positive, k noise tokens."""
    v = W[center]
    cols = np.concatenate(([context], negatives))
    U = v @ W_out[:, cols]
    # log sigma(x) = -log(1 + exp(-x)), computed via logaddexp for stability
    loss = float(np.logaddexp(0.0, -U[0]) + np.logaddexp(0.0, U[1:]).sum())
    g = 1.0 / (1.0 + np.exp(-U))
    g[0] -= 1.0
    grad_v = W_out[:, cols] @ g
    # sequential per-column updates so a repeated sample accumulates correctly
    for j, col in enumerate(cols):
        W_out[:, col] -= (lr * g[j]) * v
    W[center] -= lr * grad_v
    return loss


def _noise_distribution(vocab: TokenVocab) -> np.ndarray:
    """Unigram counts raised to 0.75, normalized, in vocabulary index order."""
    counts = np.array([vocab.counts[t] for t in vocab.tokens], dtype=float)
    weights = counts ** 0.75
    return weights / weights.sum()


def train(
    sequences: List[Sequence], vocab: TokenVocab, config: SkipGramConfig
) -> Tuple[SkipGramModel, List[float]]:
    """SGD over every context pair of every sequence, for config.epochs passes.

    The learning rate decays linearly from learning_rate to lr_floor over the
    global step count (epochs * pairs). Sequence visit order is reshuffled
    each epoch from the seeded generator, so a fixed seed with workers=1 gives
    a bit-identical model. workers > 1 splits each epoch's sequences across
    threads updating shared weights without locks; that mode trades
    determinism for throughput and is never used by the test suite.

    Returns the model and the per-epoch mean pair loss.
    """
    model = init_model(vocab, config)
    W, W_out = model.W, model.W_out

    encoded = [vocab.encode(seq.tokens) for seq in sequences]
    per_seq_pairs = [context_pairs(idxs, config.window) for idxs in encoded]
    pairs_per_epoch = sum(len(p) for p in per_seq_pairs)
    if pairs_per_epoch == 0:
        raise EmptyCorpus()

    total_steps = config.epochs * pairs_per_epoch
    lr0, lr_floor = config.learning_rate, config.lr_floor
    rng = np.random.default_rng(config.seed)
    noise = _noise_distribution(vocab) if config.mode == MODE_NEGATIVE else None
    noise_cdf = np.cumsum(noise) if noise is not None else None

    trace: List[float] = []
    step = 0
    for epoch in range(config.epochs):
        order = rng.permutation(len(per_seq_pairs))
        if config.workers == 1:
            epoch_loss, epoch_pairs, step = _run_pairs(
                W, W_out, per_seq_pairs, order, config, step, total_steps, lr0, lr_floor,
                noise_cdf, rng,
            )
        else:
            epoch_loss, epoch_pairs, step = _run_pairs_threaded(
                W, W_out, per_seq_pairs, order, config, step, total_steps, lr0, lr_floor,
                noise_cdf, epoch,
            )
        if not np.isfinite(W).all() or not np.isfinite(W_out).all():
            raise NonFiniteLoss(f"weights non-finite after epoch {epoch}")
        trace.append(epoch_loss / max(epoch_pairs, 1))
    return model, trace


def _run_pairs(W, W_out, per_seq_pairs, order, config, step, total_steps, lr0, lr_floor,
               noise_cdf, rng) -> Tuple[float, int, int]:
    epoch_loss = 0.0
    epoch_pairs = 0
    softmax = config.mode == MODE_SOFTMAX
    k = config.negative
    for si in order:
        for center, context in per_seq_pairs[si]:
            lr = max(lr_floor, lr0 + (lr_floor - lr0) * (step / total_steps))
            if softmax:
                loss = _softmax_step(W, W_out, center, context, lr)
            else:
                draws = np.searchsorted(noise_cdf, rng.random(k))
                negatives = np.minimum(draws, len(noise_cdf) - 1)
                loss = _negative_step(W, W_out, center, context, negatives, lr)
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"pair loss non-finite at step {step}")
            epoch_loss += loss
            epoch_pairs += 1
            step += 1
    return epoch_loss, epoch_pairs, step


def _run_pairs_threaded(W, W_out, per_seq_pairs, order, config, step, total_steps,
                        lr0, lr_floor, noise_cdf, epoch) -> Tuple[float, int, int]:
    """Lock-free shared updates across threads; nondeterministic by contract."""
    chunks = np.array_split(order, config.workers)
    results = [None] * len(chunks)

    def worker(tid: int, chunk) -> None:
        thread_rng = np.random.default_rng([config.seed, epoch, tid])
        results[tid] = _run_pairs(
            W, W_out, per_seq_pairs, chunk, config, step, total_steps, lr0, lr_floor,
            noise_cdf, thread_rng,
        )

    threads = [threading.Thread(target=worker, args=(tid, chunk)) for tid, chunk in enumerate(chunks)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    epoch_loss = sum(r[0] for r in results)
    epoch_pairs = sum(r[1] for r in results)
    return epoch_loss, epoch_pairs, step + epoch_pairs


def embedding_of(model: SkipGramModel, token: str) -> np.ndarray:
    """The token's row of W, as stored; no normalization or copy."""
    if token not in model.vocab:
        raise UnknownToken(token)
    return model.W[model.vocab.index[token]]


def nearest_neighbors(model: SkipGramModel, token: str, k: int) -> List[Tuple[str, float]]:
    """Top-k tokens by cosine similarity of W rows, excluding the query.

    Ties break toward the lower vocabulary index; k is capped at V-1.
    """
    if token not in model.vocab:
        raise UnknownToken(token)
    qi = model.vocab.index[token]
    W = model.W
    norms = np.linalg.norm(W, axis=1)
    denom = norms * norms[qi]
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = np.where(denom > 0, (W @ W[qi]) / np.where(denom > 0, denom, 1.0), 0.0)
    sims[qi] = -np.inf
    k = min(k, len(model.vocab) - 1)
    # stable argsort on -sims implements the ascending-index tie-break
    ranked = np.argsort(-sims, kind="stable")[:k]
    return [(model.vocab.tokens[i], float(sims[i])) for i in ranked]


def save_model(model: SkipGramModel, path: Path) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "d": model.vector_size,
        "tokens": model.vocab.tokens,
        "W": model.W.tolist(),
        "W_out": model.W_out.tolist(),
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_model(path: Path) -> SkipGramModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"unsupported model format: {doc.get('format')!r}")
    vocab = TokenVocab.from_tokens(doc["tokens"])
    W = np.array(doc["W"], dtype=float)
    W_out = np.array(doc["W_out"], dtype=float)
    if W.shape != (len(vocab), doc["d"]) or W_out.shape != (doc["d"], len(vocab)):
        raise ValueError("model matrices do not match the declared dimensions")
    return SkipGramModel(vocab, W, W_out)
