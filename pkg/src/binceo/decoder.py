"""Syndrome sum-product decoding with side information, the joint two-link
loop (JSP), and the soft CEO estimator with its empirical log-loss.

The compound code's factor graph is realized over the n codeword bits alone:
with a systematic generator G = [I | P] the LDGM membership constraint is the
sparse parity set u_j = XOR of u[:m] over column j for every non-systematic
position, and the transmitted syndrome adds the deltaH rows with their bit
signs.  Side information enters as per-bit LLR priors through a virtual
BSC(theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from binceo._kernels import LLR_CLIP, check_messages, var_messages
from binceo.bounds import conv, h_b
from binceo.codegraph import CompoundCode, as_bits

__all__ = [
    "FactorGraph",
    "SideInfoPrior",
    "CeoModel",
    "SpResult",
    "sp_decode",
    "jsp_decode",
    "soft_estimate",
    "empirical_logloss",
]

_PROB_FLOOR = 1e-12


class FactorGraph:
    """Check structure of a compound code over its n codeword variables.

    Requires a systematic generator: the LDGM constraint is representable as
    sparse checks only when every codeword bit either is an information bit
    or XORs a few of them.
    """

    def __init__(self, code: CompoundCode):
        gt = code.G.transpose()
        for j in range(code.m):
            if gt.row(j).tolist() != [j]:
                raise ValueError(
                    "factor graph needs a systematic generator (build_ldgm systematic=True)"
                )
        self.code = code
        n, m, k = code.n, code.m, code.k
        self.n_ldgm_checks = n - m
        ptr = [0]
        edges = []
        for j in range(m, n):
            row = [j] + gt.row(j).tolist()
            edges.extend(row)
            ptr.append(len(edges))
        for r in range(k):
            edges.extend(code.deltaH.row(r).tolist())
            ptr.append(len(edges))
        self.check_ptr = np.asarray(ptr, dtype=np.int64)
        self.edge_var = np.asarray(edges, dtype=np.int64)
        self.coef_mag = np.zeros(self.n_ldgm_checks + k)
        self._seg = np.repeat(
            np.arange(self.n_ldgm_checks + k), np.diff(self.check_ptr)
        )

    def coef_sign(self, s) -> np.ndarray:
        s = as_bits(s, self.code.k)
        sign = np.ones(self.n_ldgm_checks + self.code.k)
        sign[self.n_ldgm_checks :] = 1.0 - 2.0 * s.astype(np.float64)
        return sign

    def satisfied(self, u, s) -> bool:
        """All LDGM parities zero and all syndrome parities match s."""
        u = as_bits(u, self.code.n)
        parity = np.bincount(
            self._seg, weights=u[self.edge_var].astype(np.float64),
            minlength=self.n_ldgm_checks + self.code.k,
        ).astype(np.int64) & 1
        target = np.zeros(self.n_ldgm_checks + self.code.k, dtype=np.int64)
        target[self.n_ldgm_checks :] = as_bits(s, self.code.k)
        return bool(np.array_equal(parity, target))


@dataclass(frozen=True)
class SideInfoPrior:
    """Side-information block seen through a virtual BSC(theta)."""

    v: np.ndarray
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta < 0.5:
            raise ValueError("theta must lie in [0, 0.5)")
        as_bits(self.v)

    def llr(self) -> np.ndarray:
        mag = LLR_CLIP if self.theta == 0.0 else min(
            math.log((1.0 - self.theta) / self.theta), LLR_CLIP
        )
        return mag * (1.0 - 2.0 * as_bits(self.v).astype(np.float64))


@dataclass(frozen=True)
class SpResult:
    u_hat: np.ndarray
    converged: bool
    iters: int
    state: np.ndarray  # variable-to-check messages, reusable across calls

    def __iter__(self):
        return iter((self.u_hat, self.converged, self.iters))


def sp_decode(
    code_or_graph,
    s,
    prior: SideInfoPrior,
    max_iters: int = 100,
    state: np.ndarray | None = None,
) -> SpResult:
    """Flooding sum-product over the compound graph; nonnegative LLR -> bit 0.

    Stops early once the hard decisions satisfy every check.  `state`
    optionally carries variable-to-check messages across calls (used by the
    joint decoder to keep decoder state between rounds).
    """
    graph = code_or_graph if isinstance(code_or_graph, FactorGraph) else FactorGraph(code_or_graph)
    n = graph.code.n
    s = as_bits(s, graph.code.k)
    coef_sign = graph.coef_sign(s)
    prior_llr = prior.llr()
    if prior_llr.shape != (n,):
        raise ValueError("side information length must equal n")

    v2c = prior_llr[graph.edge_var] if state is None else state
    u_hat = (prior_llr < 0).astype(np.uint8)
    if graph.satisfied(u_hat, s):
        return SpResult(u_hat, True, 0, v2c)

    converged = False
    iters = 0
    for iters in range(1, max_iters + 1):
        c2v = check_messages(v2c, graph.check_ptr, coef_sign, graph.coef_mag)
        v2c, totals = var_messages(c2v, graph.edge_var, prior_llr, n)
        u_hat = (totals < 0).astype(np.uint8)
        if graph.satisfied(u_hat, s):
            converged = True
            break
    return SpResult(u_hat, converged, iters, v2c)


def jsp_decode(
    code1: CompoundCode,
    s1,
    code2: CompoundCode,
    s2,
    theta: float,
    r: int = 15,
    l: int = 40,
    seed: int = 0,
    graphs: tuple | None = None,
):
    """Joint sum-product: two syndrome decoders exchange hard decisions.

    Round 1 starts from seeded random side information; each later round
    feeds one side's hard decisions to the other as fresh priors while the
    message state persists across rounds.
    """
    if r < 1 or l < 1:
        raise ValueError("need r >= 1 and l >= 1")
    g1, g2 = graphs if graphs is not None else (FactorGraph(code1), FactorGraph(code2))
    rng = np.random.default_rng(seed)
    v1 = rng.integers(0, 2, size=code1.n).astype(np.uint8)
    v2 = rng.integers(0, 2, size=code2.n).astype(np.uint8)
    state1 = state2 = None
    u1 = v1
    u2 = v2
    for _ in range(r):
        res1 = sp_decode(g1, s1, SideInfoPrior(u2, theta), max_iters=l, state=state1)
        res2 = sp_decode(g2, s2, SideInfoPrior(u1, theta), max_iters=l, state=state2)
        u1, state1 = res1.u_hat, res1.state
        u2, state2 = res2.u_hat, res2.state
    return u1, u2


@dataclass(frozen=True)
class CeoModel:
    """End-to-end crossovers q_i = p_i * d_i of the X -> U_i channels."""

    q1: float
    q2: float

    def __post_init__(self):
        if not (0.0 <= self.q1 <= 0.5 and 0.0 <= self.q2 <= 0.5):
            raise ValueError("q1, q2 must lie in [0, 0.5]")

    @classmethod
    def from_design(cls, noise, d) -> "CeoModel":
        return cls(conv(noise.p1, d.d1), conv(noise.p2, d.d2))

    def conditional_entropy(self) -> float:
        """H(X | U1, U2) of the model, the theoretical log-loss floor."""
        return float(h_b(self.q1) + h_b(self.q2) - h_b(conv(self.q1, self.q2)))


def soft_estimate(model: CeoModel, u1_bit, u2_bit) -> np.ndarray:
    """Posterior P(x | u1, u2) under a uniform source, stacked on axis -1.

    Accepts scalars or equal-shape bit arrays; returns shape (..., 2).
    """
    u1 = np.asarray(u1_bit, dtype=np.float64)
    u2 = np.asarray(u2_bit, dtype=np.float64)
    # likelihood of x=b is prod_i q_i^[u_i != b] (1-q_i)^[u_i = b]
    like = []
    for b in (0.0, 1.0):
        l1 = np.where(u1 == b, 1.0 - model.q1, model.q1)
        l2 = np.where(u2 == b, 1.0 - model.q2, model.q2)
        like.append(l1 * l2)
    total = like[0] + like[1]
    return np.stack([like[0] / total, like[1] / total], axis=-1)


def empirical_logloss(x, u1_hat, u2_hat, model: CeoModel) -> float:
    """Average log-loss (1/n) sum log2 1/P(x_j | u1_j, u2_j) in bits."""
    x = as_bits(x)
    u1 = as_bits(u1_hat, x.shape[0])
    u2 = as_bits(u2_hat, x.shape[0])
    post = soft_estimate(model, u1, u2)
    p = np.maximum(post[np.arange(x.shape[0]), x], _PROB_FLOOR)
    return float(np.mean(-np.log2(p)))
