"""Exact t-SNE: reduce embedding rows to 2D for plotting.

This is the O(N^2) reference algorithm: Gaussian conditional affinities in the
input space with a per-point bandwidth found by binary search on perplexity,
Student-t affinities in the 2D space, and gradient descent on their KL
divergence with momentum, per-dimension adaptive gains, and an early
exaggeration phase. Corpora here are a few thousand tokens at most, so the
quadratic memory and time are fine and no tree approximation is needed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import NonFiniteInput, NonFiniteIterate, PerplexityTooLarge

PROJECTION_FORMAT = "pathlens-proj/1"

P_FLOOR = 1e-12
# guaranteed row tolerance is 1e-5 bits; stopping two decades tighter keeps the
# achieved perplexity itself within 1e-4 of the target
ENTROPY_TOL = 1e-7
MAX_BISECTION_STEPS = 200


@dataclass(frozen=True)
class TsneConfig:
    """Optimizer settings; the defaults are the classic published constants."""

    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    momentum_switch_iter: int = 250
    early_exaggeration_factor: float = 4.0
    early_exaggeration_iters: int = 100
    seed: int = 1

    def __post_init__(self):
        if self.perplexity <= 0:
            raise ValueError("perplexity must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        for m in (self.momentum_early, self.momentum_late):
            if not (0 <= m < 1):
                raise ValueError("momenta must lie in [0, 1)")
        if self.early_exaggeration_factor <= 0:
            raise ValueError("early_exaggeration_factor must be positive")
        if self.iterations < self.early_exaggeration_iters:
            raise ValueError("iterations must be >= early_exaggeration_iters")


@dataclass
class Projection:
    """2D coordinates (one row per input row) plus the recorded KL trace."""

    points: np.ndarray
    kl_trace: List[float]


def pairwise_sq_distances(X: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, each unordered pair computed once.

    pdist walks i<j pairs, so the squareform result is exactly symmetric with
    a zero diagonal rather than symmetric up to rounding.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("expected an N x d matrix with N >= 2")
    if not np.isfinite(X).all():
        raise NonFiniteInput("distance input")
    return squareform(pdist(X, metric="sqeuclidean"))


def _row_affinities(d_row: np.ndarray, beta: float) -> Tuple[np.ndarray, float]:
    """Unnormalized exp(-beta * d) for one row (self excluded) and its entropy in bits."""
    shifted = d_row - d_row.min()
    e = np.exp(-beta * shifted)
    z = e.sum()
    p = e / z
    # H = log z + beta * E[d], in nats; convert to bits for the perplexity scale
    h_nats = np.log(z) + beta * float(np.dot(p, shifted))
    return p, h_nats / np.log(2.0)


def conditional_affinities(D: np.ndarray, perplexity: float) -> np.ndarray:
    """Row-stochastic conditional affinities at the target perplexity.

    For each point, bisect the precision beta = 1/(2 sigma^2) until the row's
    entropy matches log2(perplexity) within 1e-5 bits, capped at 200 steps.
    Rows whose entropy cannot reach the target (for instance all-equidistant
    neighbors) keep the best bracketed beta.
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    if not perplexity < (n - 1) / 3:
        raise PerplexityTooLarge(perplexity, n)
    target_bits = np.log2(perplexity)

    P = np.zeros_like(D)
    mask = ~np.eye(n, dtype=bool)
    for i in range(n):
        d_row = D[i][mask[i]]
        beta, beta_lo, beta_hi = 1.0, 0.0, np.inf
        p, h_bits = _row_affinities(d_row, beta)
        for _ in range(MAX_BISECTION_STEPS):
            diff = h_bits - target_bits
            if abs(diff) <= ENTROPY_TOL:
                break
            if diff > 0:
                beta_lo = beta
                beta = beta * 2.0 if np.isinf(beta_hi) else (beta + beta_hi) / 2.0
            else:
                beta_hi = beta
                beta = (beta + beta_lo) / 2.0
            p, h_bits = _row_affinities(d_row, beta)
        P[i][mask[i]] = p
    return P


def achieved_perplexity(P_cond: np.ndarray) -> np.ndarray:
    """Per-row 2^entropy of the conditional affinities; the check the search targets."""
    n = P_cond.shape[0]
    mask = ~np.eye(n, dtype=bool)
    out = np.empty(n)
    for i in range(n):
        p = P_cond[i][mask[i]]
        p = p[p > 0]
        out[i] = 2.0 ** float(-(p * np.log2(p)).sum())
    return out


def joint_affinities(P_cond: np.ndarray) -> np.ndarray:
    """Symmetrize: p_ij = (p_j|i + p_i|j) / 2N, off-diagonals floored at 1e-12.

    The diagonal stays exactly zero (affinities are defined over pairs, and
    the KL sum skips it); the floor adds at most N^2 * 1e-12 mass, which is
    why the sum-to-one checks carry a 1e-9 tolerance.
    """
    n = P_cond.shape[0]
    P = np.maximum((P_cond + P_cond.T) / (2.0 * n), P_FLOOR)
    np.fill_diagonal(P, 0.0)
    return P


def low_dim_affinities(Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Student-t affinities in the 2D space.

    Returns (Q, numerators): numerators are (1 + ||y_i - y_j||^2)^-1 with a
    zero diagonal, and Q is their global normalization with off-diagonals
    floored at 1e-12.
    """
    num = 1.0 / (1.0 + pairwise_sq_distances(Y))
    np.fill_diagonal(num, 0.0)
    Q = np.maximum(num / num.sum(), P_FLOOR)
    np.fill_diagonal(Q, 0.0)
    return Q, num


def kl_divergence(P: np.ndarray, Q: np.ndarray) -> float:
    """KL(P || Q) over the off-diagonal entries; both floored, so logs are finite."""
    n = P.shape[0]
    mask = ~np.eye(n, dtype=bool)
    p = P[mask]
    q = Q[mask]
    return float((p * np.log(p / q)).sum())


def kl_gradient(P: np.ndarray, Q: np.ndarray, numerators: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Gradient of KL(P||Q) w.r.t. Y: grad_i = 4 sum_j (p_ij - q_ij) n_ij (y_i - y_j)."""
    PQn = (P - Q) * numerators
    return 4.0 * (Y * PQn.sum(axis=1)[:, None] - PQn @ Y)


def run_tsne(X: np.ndarray, config: TsneConfig, y_init: Optional[np.ndarray] = None) -> Projection:
    """Gradient descent from a seeded Gaussian start; deterministic per seed.

    Momentum switches from early to late at momentum_switch_iter; P is
    multiplied by the exaggeration factor for the first
    early_exaggeration_iters iterations and then restored; per-dimension
    gains shrink by 0.8 when gradient and velocity signs agree and grow by
    0.2 when they disagree, floored at 0.01. Y is recentered every iteration
    and the KL against the un-exaggerated P is recorded every 10 iterations.

    y_init overrides the seeded initialization (used by tests that need the
    start to be a function of row content rather than row order).
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < 4:
        raise ValueError(f"need at least 4 points, got {n}")
    D = pairwise_sq_distances(X)
    P = joint_affinities(conditional_affinities(D, config.perplexity))

    rng = np.random.default_rng(config.seed)
    if y_init is None:
        Y = rng.normal(0.0, 1e-2, size=(n, 2))
    else:
        Y = np.array(y_init, dtype=float)
        if Y.shape != (n, 2):
            raise ValueError(f"y_init must have shape ({n}, 2)")

    P_exagg = P * config.early_exaggeration_factor
    gains = np.ones_like(Y)
    velocity = np.zeros_like(Y)
    trace: List[float] = []

    for it in range(config.iterations):
        P_eff = P_exagg if it < config.early_exaggeration_iters else P
        Q, num = low_dim_affinities(Y)
        grad = kl_gradient(P_eff, Q, num, Y)

        agree = np.sign(grad) == np.sign(velocity)
        gains = np.where(agree, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)

        momentum = config.momentum_early if it < config.momentum_switch_iter else config.momentum_late
        velocity = momentum * velocity - config.learning_rate * (gains * grad)
        Y = Y + velocity
        Y = Y - Y.mean(axis=0)
        if not np.isfinite(Y).all():
            raise NonFiniteIterate(it)

        if (it + 1) % 10 == 0:
            Q_now, _ = low_dim_affinities(Y)
            trace.append(kl_divergence(P, Q_now))

    return Projection(points=Y, kl_trace=trace)


def save_projection(path: Path, tokens: List[str], projection: Projection) -> None:
    doc = {
        "format": PROJECTION_FORMAT,
        "tokens": list(tokens),
        "xy": projection.points.tolist(),
        "kl_trace": [float(v) for v in projection.kl_trace],
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_projection(path: Path) -> Tuple[List[str], np.ndarray, List[float]]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != PROJECTION_FORMAT:
        raise ValueError(f"unsupported projection format: {doc.get('format')!r}")
    xy = np.array(doc["xy"], dtype=float)
    return doc["tokens"], xy, doc["kl_trace"]
