"""Bias-propagation (BiP) quantization of a binary block onto an LDGM codebook.

Messages flow on the generator graph: every output position j is a check
node tying the information bits of column j to a soft target prior of
magnitude gamma pointing at y_j.  After each batch of damped sum-product
iterations, information bits whose bias |tanh(LLR/2)| clears the threshold
are decimated (fixed); if none clear it, the single most biased bit is fixed.
Fixed bits keep their pinned LLR, which folds them into their checks exactly
like XOR absorption up to a 1e-13 tanh saturation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from binceo._kernels import LLR_CLIP, check_messages, var_messages
from binceo.codegraph import SparseBinaryMatrix, as_bits, encode_ldgm

__all__ = ["BipConfig", "QuantizeResult", "bip_quantize"]


@dataclass(frozen=True)
class BipConfig:
    """BiP parameters.

    Defaults were tuned empirically at rate 0.54 and block length 1e4 on a
    systematic check-regular LDGM of degree 6..7: the target strength gamma
    works best as an absolute value near 2, well above the rate-scaled rule
    of thumb 2(m/n)/threshold.  A small random message initialization breaks
    the all-zero symmetric fixed point so that early decimation decisions are
    driven by the realization instead of index order.  one_at_a_time fixes a
    single bit per round (slower, slightly lower distortion).
    """

    gamma: float | None = None
    threshold: float = 0.9
    max_iters_per_round: int = 25
    damping: float = 0.9
    seed: int = 0
    convergence_tol: float = 1e-4
    init_scale: float = 0.1
    one_at_a_time: bool = False

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")
        if self.max_iters_per_round < 1:
            raise ValueError("max_iters_per_round must be >= 1")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.init_scale < 0:
            raise ValueError("init_scale must be >= 0")


@dataclass(frozen=True)
class QuantizeResult:
    w: np.ndarray
    u: np.ndarray
    hamming_distortion: float
    rounds_used: int


def bip_quantize(G: SparseBinaryMatrix, y, cfg: BipConfig = BipConfig()) -> QuantizeResult:
    """Quantize y to the LDGM codeword u = w.G found by BiP decimation."""
    y = as_bits(y, G.cols)
    m, n = G.rows, G.cols
    gamma = cfg.gamma if cfg.gamma is not None else 2.2

    gt = G.transpose()  # rows are output checks, entries are info-bit ids
    check_ptr = gt.indptr
    edge_var = gt.indices.astype(np.int64)
    n_edges = edge_var.shape[0]

    coef_sign = 1.0 - 2.0 * y.astype(np.float64)
    coef_mag = np.full(n, math.log(math.tanh(0.5 * gamma)))

    rng = np.random.default_rng(cfg.seed)
    prior = np.zeros(m)
    v2c = rng.normal(0.0, cfg.init_scale, n_edges) if cfg.init_scale else np.zeros(n_edges)
    c2v = np.zeros(n_edges)
    pinned = np.full(n_edges, np.nan)  # per-edge value once the variable is fixed
    fixed = np.zeros(m, dtype=bool)
    w = np.zeros(m, dtype=np.uint8)
    totals = np.zeros(m)

    rounds = 0
    while not fixed.all():
        rounds += 1
        for _ in range(cfg.max_iters_per_round):
            fresh = check_messages(v2c, check_ptr, coef_sign, coef_mag)
            c2v = cfg.damping * fresh + (1.0 - cfg.damping) * c2v
            v2c, new_totals = var_messages(c2v, edge_var, prior, m)
            keep = ~np.isnan(pinned)
            v2c[keep] = pinned[keep]
            delta = float(np.max(np.abs(new_totals - totals))) if m else 0.0
            totals = new_totals
            if delta < cfg.convergence_tol:
                break

        bias = np.abs(np.tanh(0.5 * totals))
        bias[fixed] = -1.0
        if cfg.one_at_a_time:
            to_fix = np.array([int(np.argmax(bias))])
        else:
            to_fix = np.flatnonzero(bias > cfg.threshold)
            if to_fix.size == 0:
                to_fix = np.array([int(np.argmax(bias))])  # argmax takes lowest index
        w[to_fix] = (totals[to_fix] < 0).astype(np.uint8)
        fixed[to_fix] = True
        pin_edges = np.isin(edge_var, to_fix)
        pinned[pin_edges] = (1.0 - 2.0 * w[edge_var[pin_edges]]) * LLR_CLIP
        v2c[pin_edges] = pinned[pin_edges]

    u = encode_ldgm(G, w)
    distortion = float(np.mean(u != y))
    return QuantizeResult(w=w, u=u, hamming_distortion=distortion, rounds_used=rounds)
