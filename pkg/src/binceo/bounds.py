"""Rate-distortion bounds for the two-link binary CEO problem under log-loss.

All entropies and rates are in bits (base-2 logs throughout).  The problem
instance is a binary symmetric source observed through two independent
BSC(p_i) links; each encoder is modeled by a BSC(d_i) test channel.  The
closed forms here give the achievable (R1, R2, Rsum, D) region and the
Lagrangian machinery (gradients, Hessians, grid/Newton optimizers) used to
trace the sum-rate-distortion curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

LOG2E = math.log2(math.e)

__all__ = [
    "NoisePair",
    "TestChannelPair",
    "RdTuple",
    "Region",
    "LagrangianPoint",
    "HighResConstants",
    "GeneralChannel",
    "JointTable",
    "InfoMeasures",
    "h_b",
    "h_b_inv",
    "h_b_prime",
    "h_b_second",
    "conv",
    "rd_bound",
    "objective",
    "grid_optimum",
    "gradient_F",
    "hessians",
    "newton_roots",
    "mu_max",
    "high_res_d2",
    "region_scan",
    "rd_curve",
    "joint_table",
    "info_measures",
    "general_channel_search",
]


# ---------------------------------------------------------------------------
# scalar building blocks


def h_b(x):
    """Binary entropy in bits, elementwise; 0*log(0) = 0."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)):
        raise ValueError("h_b argument must lie in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x)
    out = np.where((x == 0.0) | (x == 1.0), 0.0, out)
    return out if out.ndim else float(out)


def h_b_inv(y, tol=1e-14):
    """Inverse of h_b on [0, 0.5], by bisection."""
    if not 0.0 <= y <= 1.0:
        raise ValueError("h_b_inv argument must lie in [0, 1]")
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h_b(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def h_b_prime(x):
    """First derivative of h_b: log2((1-x)/x); defined on (0, 1)."""
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0.0) | (x >= 1.0)):
        raise ValueError("h_b_prime argument must lie in (0, 1)")
    out = np.log2((1.0 - x) / x)
    return out if out.ndim else float(out)


def h_b_second(x):
    """Second derivative of h_b: -log2(e)/(x(1-x)); defined on (0, 1)."""
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0.0) | (x >= 1.0)):
        raise ValueError("h_b_second argument must lie in (0, 1)")
    out = -LOG2E / (x * (1.0 - x))
    return out if out.ndim else float(out)


def conv(a, b):
    """Binary convolution a*b = a(1-b) + b(1-a), elementwise."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any((a < 0.0) | (a > 1.0)) or np.any((b < 0.0) | (b > 1.0)):
        raise ValueError("conv arguments must lie in [0, 1]")
    out = a * (1.0 - b) + b * (1.0 - a)
    return out if out.ndim else float(out)


def _check_prob_half(value, name):
    if not 0.0 <= value <= 0.5:
        raise ValueError(f"{name} must lie in [0, 0.5], got {value}")
    return float(value)


@dataclass(frozen=True)
class NoisePair:
    """Observation-noise crossovers (p1, p2) of the two links."""

    p1: float
    p2: float

    def __post_init__(self):
        _check_prob_half(self.p1, "p1")
        _check_prob_half(self.p2, "p2")

    @property
    def p(self) -> float:
        """Combined crossover p1*p2 of the cascaded observation channels."""
        return conv(self.p1, self.p2)

    def swapped(self) -> "NoisePair":
        return NoisePair(self.p2, self.p1)


@dataclass(frozen=True)
class TestChannelPair:
    """Encoder test-channel crossovers (d1, d2), the optimization variables."""

    d1: float
    d2: float

    def __post_init__(self):
        _check_prob_half(self.d1, "d1")
        _check_prob_half(self.d2, "d2")

    @property
    def d(self) -> float:
        return conv(self.d1, self.d2)

    def swapped(self) -> "TestChannelPair":
        return TestChannelPair(self.d2, self.d1)


@dataclass(frozen=True)
class RdTuple:
    """Minimum achievable per-link rates, sum rate and log-loss distortion."""

    r1_min: float
    r2_min: float
    rsum_min: float
    d_min: float


class Region(Enum):
    """Location class of a Lagrangian optimum in the (d1, d2) square."""

    DIAGONAL = "diagonal"
    INTERIOR_OFF_DIAGONAL = "interior-off-diagonal"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class LagrangianPoint:
    mu: float
    d_star: TestChannelPair
    f_value: float
    region: Region


@dataclass(frozen=True)
class HighResConstants:
    """Natural-log constants K = (1-2p) ln((1-p)/p) of the small-d expansion."""

    K: float
    K1: float
    K2: float

    @classmethod
    def from_noise(cls, noise: NoisePair) -> "HighResConstants":
        def k(x):
            if not 0.0 < x <= 0.5:
                raise ValueError("high-resolution constants need p in (0, 0.5]")
            return (1.0 - 2.0 * x) * math.log((1.0 - x) / x)

        return cls(K=k(noise.p), K1=k(noise.p1), K2=k(noise.p2))


# ---------------------------------------------------------------------------
# closed-form bound and Lagrangian objective


def _rd_arrays(noise: NoisePair, d1, d2):
    """Vectorized (r1, r2, rsum, d_min) over arrays of d1, d2."""
    p = noise.p
    d = conv(d1, d2)
    hpd = h_b(conv(p, d))
    r1 = hpd - h_b(d1)
    r2 = hpd - h_b(d2)
    rsum = 1.0 + hpd - h_b(d1) - h_b(d2)
    dmin = h_b(conv(noise.p1, d1)) + h_b(conv(noise.p2, d2)) - hpd
    return r1, r2, rsum, dmin


def rd_bound(noise: NoisePair, d: TestChannelPair) -> RdTuple:
    """Minimum rates and distortion achievable with test channels (d1, d2)."""
    r1, r2, rsum, dmin = _rd_arrays(noise, d.d1, d.d2)
    return RdTuple(float(r1), float(r2), float(rsum), float(dmin))


def objective(noise: NoisePair, d: TestChannelPair, mu: float) -> float:
    """Lagrangian F = D + mu * Rsum at the given test-channel pair."""
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    t = rd_bound(noise, d)
    return t.d_min + mu * t.rsum_min


def mu_max(noise: NoisePair) -> float:
    """Largest useful Lagrange multiplier: max{(1-2p1)^2, (1-2p2)^2}."""
    return max((1.0 - 2.0 * noise.p1) ** 2, (1.0 - 2.0 * noise.p2) ** 2)


def conditional_entropy_floor(noise: NoisePair) -> float:
    """H(X | Y1, Y2) = h_b(p1) + h_b(p2) - h_b(p), the distortion floor."""
    return float(h_b(noise.p1) + h_b(noise.p2) - h_b(noise.p))


# ---------------------------------------------------------------------------
# grid optimizer


def _objective_grid(noise, d1_grid, d2_grid, mu):
    """F over the outer product of two coordinate grids; returns matrix."""
    d1 = d1_grid[:, None]
    d2 = d2_grid[None, :]
    _, _, rsum, dmin = _rd_arrays(noise, d1, d2)
    return dmin + mu * rsum


def _axis(lo, hi, step):
    n = int(round((hi - lo) / step))
    ax = lo + step * np.arange(n + 1)
    return np.clip(ax, 0.0, 0.5)


def _best_cell(noise, d1_grid, d2_grid, mu):
    f = _objective_grid(noise, d1_grid, d2_grid, mu)
    i, j = np.unravel_index(np.argmin(f), f.shape)
    return float(d1_grid[i]), float(d2_grid[j]), float(f[i, j])


def _coarse_candidates(noise, grid, mu, max_candidates=6):
    """Cells of the coarse scan that are local minima, best first.

    Competing basins (diagonal vs off-diagonal vs boundary) can differ by
    less than the coarse resolution, so refinement must consider all of them.
    """
    f = _objective_grid(noise, grid, grid, mu)
    padded = np.pad(f, 1, constant_values=np.inf)
    is_min = np.ones(f.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_min &= f <= padded[1 + di : 1 + di + f.shape[0], 1 + dj : 1 + dj + f.shape[1]]
    idx = np.argwhere(is_min)
    order = np.argsort(f[is_min], kind="stable")[:max_candidates]
    return [(float(grid[i]), float(grid[j])) for i, j in idx[order]]


def _classify(noise, d1, d2, tol) -> Region:
    if max(d1, d2) >= 0.5 - tol:
        return Region.BOUNDARY
    if d1 <= tol and d2 <= tol:
        # the mu -> 0 corner (0, 0) belongs to the diagonal branch only
        # when the two links are interchangeable
        return Region.DIAGONAL if noise.p1 == noise.p2 else Region.INTERIOR_OFF_DIAGONAL
    if abs(d1 - d2) < tol:
        return Region.DIAGONAL
    return Region.INTERIOR_OFF_DIAGONAL


def grid_optimum(
    noise: NoisePair,
    mu: float,
    coarse_step: float = 1e-3,
    refine_step: float = 1e-5,
) -> LagrangianPoint:
    """Global minimizer of F(d1, d2) over [0, 0.5]^2 by exhaustive search.

    A coarse scan (including the exact boundary values 0 and 0.5) is refined
    on a +/- 2*coarse_step window around the best cell.  Under p1 == p2 the
    minimizer is reported with d1 <= d2.
    """
    if not 0.0 < refine_step <= coarse_step <= 0.05:
        raise ValueError("need 0 < refine_step <= coarse_step <= 0.05")
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    symmetric = noise.p1 == noise.p2

    ax = _axis(0.0, 0.5, coarse_step)
    w = 2.0 * coarse_step
    d1 = d2 = 0.0
    fmin = np.inf
    for c1, c2 in _coarse_candidates(noise, ax, mu):
        ax1 = _axis(max(0.0, c1 - w), min(0.5, c1 + w), refine_step)
        ax2 = _axis(max(0.0, c2 - w), min(0.5, c2 + w), refine_step)
        r1, r2, fr = _best_cell(noise, ax1, ax2, mu)
        if fr < fmin:
            d1, d2, fmin = r1, r2, fr

    # snap to the symmetry line / boundary when doing so does not hurt F;
    # protects classification against flat-valley float noise
    snap_eps = 1e-12
    candidates = []
    if symmetric:
        mid = 0.5 * (d1 + d2)
        candidates.append((mid, mid))
    for s1 in (0.0, d1, 0.5):
        for s2 in (0.0, d2, 0.5):
            candidates.append((s1, s2))
    for s1, s2 in candidates:
        fs = objective(noise, TestChannelPair(s1, s2), mu)
        if fs <= fmin + snap_eps:
            d1, d2, fmin = s1, s2, fs

    if symmetric and d1 > d2:
        d1, d2 = d2, d1
    region = _classify(noise, d1, d2, 2.0 * refine_step)
    return LagrangianPoint(mu=mu, d_star=TestChannelPair(d1, d2), f_value=fmin, region=region)


# ---------------------------------------------------------------------------
# derivatives, Newton refinement


def _interior(d: TestChannelPair):
    if not (0.0 < d.d1 < 0.5 and 0.0 < d.d2 < 0.5):
        raise ValueError("gradient/Hessian need d1, d2 strictly inside (0, 0.5)")


def gradient_F(noise: NoisePair, d: TestChannelPair, mu: float):
    """Gradient of F = D + mu*Rsum with respect to (d1, d2), in bits."""
    _interior(d)
    p = noise.p
    pd = conv(p, d.d)
    out = []
    for di, pi, dother in ((d.d1, noise.p1, d.d2), (d.d2, noise.p2, d.d1)):
        qi = conv(p, dother)
        gi = (
            (1.0 - 2.0 * pi) * h_b_prime(conv(di, pi))
            - mu * h_b_prime(di)
            + (mu - 1.0) * (1.0 - 2.0 * qi) * h_b_prime(pd)
        )
        out.append(float(gi))
    return tuple(out)


@dataclass(frozen=True)
class Hessians:
    """Second-derivative matrices of Rsum, D and F = D + mu*Rsum."""

    H_R: np.ndarray
    H_D: np.ndarray
    H_F: np.ndarray

    @staticmethod
    def _is_pd(h):
        return h[0, 0] > 0 and float(np.linalg.det(h)) > 0

    def rate_pd(self) -> bool:
        return self._is_pd(self.H_R)

    def objective_pd(self) -> bool:
        return self._is_pd(self.H_F)


def hessians(noise: NoisePair, d: TestChannelPair, mu: float) -> Hessians:
    """Hessians of the sum-rate and distortion bounds at an interior point."""
    _interior(d)
    p = noise.p
    pd = conv(p, d.d)
    q1 = conv(p, d.d2)
    q2 = conv(p, d.d1)
    hpp = h_b_second(pd)
    hp = h_b_prime(pd)

    r11 = (1.0 - 2.0 * q1) ** 2 * hpp - h_b_second(d.d1)
    r22 = (1.0 - 2.0 * q2) ** 2 * hpp - h_b_second(d.d2)
    r12 = (1.0 - 2.0 * q1) * (1.0 - 2.0 * q2) * hpp - 2.0 * (1.0 - 2.0 * p) * hp
    H_R = np.array([[r11, r12], [r12, r22]])

    d11 = (1.0 - 2.0 * noise.p1) ** 2 * h_b_second(conv(noise.p1, d.d1)) - (
        1.0 - 2.0 * q1
    ) ** 2 * hpp
    d22 = (1.0 - 2.0 * noise.p2) ** 2 * h_b_second(conv(noise.p2, d.d2)) - (
        1.0 - 2.0 * q2
    ) ** 2 * hpp
    H_D = np.array([[d11, -r12], [-r12, d22]])

    return Hessians(H_R=H_R, H_D=H_D, H_F=H_D + mu * H_R)


def newton_roots(
    noise: NoisePair,
    mu: float,
    seeds,
    grad_tol: float = 1e-9,
    max_iters: int = 100,
    dedupe_tol: float = 1e-6,
):
    """Damped-Newton roots of the gradient equation, deduplicated.

    Seeds that fail to converge are dropped; every returned pair satisfies
    ||grad F|| < grad_tol.
    """
    lo, hi = 1e-12, 0.5 - 1e-12
    roots = []
    for seed in seeds:
        if isinstance(seed, TestChannelPair):
            x = np.array([seed.d1, seed.d2])
        else:
            x = np.array(seed, dtype=float)
        if not (0.0 < x[0] < 0.5 and 0.0 < x[1] < 0.5):
            raise ValueError("Newton seeds must be strictly interior")
        ok = False
        for _ in range(max_iters):
            g = np.array(gradient_F(noise, TestChannelPair(*x), mu))
            gnorm = float(np.linalg.norm(g))
            if gnorm < grad_tol:
                ok = True
                break
            H = hessians(noise, TestChannelPair(*x), mu).H_F
            try:
                step = np.linalg.solve(H, -g)
            except np.linalg.LinAlgError:
                break
            # halve the step until the gradient norm decreases
            scale, improved = 1.0, False
            for _ in range(40):
                xn = np.clip(x + scale * step, lo, hi)
                gn = np.array(gradient_F(noise, TestChannelPair(*xn), mu))
                if np.linalg.norm(gn) < gnorm:
                    x, improved = xn, True
                    break
                scale *= 0.5
            if not improved:
                break
        if ok and not any(abs(x[0] - r.d1) < dedupe_tol and abs(x[1] - r.d2) < dedupe_tol for r in roots):
            roots.append(TestChannelPair(float(x[0]), float(x[1])))
    return roots


# ---------------------------------------------------------------------------
# asymptotics and mu sweeps


def high_res_d2(noise: NoisePair, d1: float) -> float:
    """Small-distortion locus d2(d1) of the Lagrangian optima.

    Valid as d1 -> 0 (documented range d1 <~ 1e-2).  Reduces to d2 = d1 when
    p1 == p2.
    """
    if d1 <= 0:
        raise ValueError("d1 must be positive")
    c = HighResConstants.from_noise(noise)
    denom = c.K1 - c.K
    if denom == 0.0:
        raise ZeroDivisionError("degenerate constants: K1 equals K")
    expo = (c.K2 - c.K) / denom
    return math.exp(c.K * (c.K2 - c.K1) / denom) * d1**expo


@dataclass(frozen=True)
class RegionScan:
    points: list
    thresholds: list


def region_scan(
    noise: NoisePair,
    mu_grid,
    coarse_step: float = 1e-3,
    refine_step: float = 1e-5,
) -> RegionScan:
    """Classify the Lagrangian optimum along an increasing mu grid.

    Returns the per-mu optima plus the mu values where the region label
    changes (expected: two thresholds when p1 == p2, one otherwise).
    """
    mu_grid = list(mu_grid)
    if any(b <= a for a, b in zip(mu_grid, mu_grid[1:])):
        raise ValueError("mu_grid must be strictly increasing")
    points = [grid_optimum(noise, mu, coarse_step, refine_step) for mu in mu_grid]
    thresholds = [
        b.mu for a, b in zip(points, points[1:]) if a.region != b.region
    ]
    return RegionScan(points=[(pt.mu, pt) for pt in points], thresholds=thresholds)


def rd_curve(
    noise: NoisePair,
    mu_sweep,
    coarse_step: float = 1e-3,
    refine_step: float = 1e-5,
):
    """(Rsum, D) points of the sum-rate-distortion bound along a mu sweep."""
    out = []
    for mu in mu_sweep:
        pt = grid_optimum(noise, mu, coarse_step, refine_step)
        t = rd_bound(noise, pt.d_star)
        out.append((t.rsum_min, t.d_min))
    return out


# ---------------------------------------------------------------------------
# exact joint-distribution oracle


@dataclass(frozen=True)
class GeneralChannel:
    """Binary channel P(u=1|y=0) = a, P(u=0|y=1) = b; BSC iff a == b."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a <= 1.0 and 0.0 <= self.b <= 1.0):
            raise ValueError("channel parameters must lie in [0, 1]")

    @classmethod
    def bsc(cls, crossover: float) -> "GeneralChannel":
        return cls(crossover, crossover)

    def matrix(self) -> np.ndarray:
        """P(u | y) as a 2x2 array indexed [u, y]."""
        return np.array([[1.0 - self.a, self.b], [self.a, 1.0 - self.b]])


@dataclass(frozen=True)
class JointTable:
    """Exact joint distribution over (x, y1, y2, u1, u2) in {0,1}^5."""

    probs: np.ndarray  # shape (2, 2, 2, 2, 2), axes (x, y1, y2, u1, u2)
    noise: NoisePair
    ch1: GeneralChannel
    ch2: GeneralChannel

    def __post_init__(self):
        if self.probs.shape != (2, 2, 2, 2, 2):
            raise ValueError("joint table must have shape (2,)*5")
        if np.any(self.probs < 0) or abs(float(self.probs.sum()) - 1.0) > 1e-12:
            raise ValueError("joint table entries must be a distribution")


def _bsc_matrix(crossover: float) -> np.ndarray:
    return np.array([[1.0 - crossover, crossover], [crossover, 1.0 - crossover]])


def joint_table(noise: NoisePair, ch1: GeneralChannel, ch2: GeneralChannel) -> JointTable:
    """Joint law of uniform X, BSC(p_i) observations and test channels ch_i."""
    px = np.array([0.5, 0.5])
    a1 = _bsc_matrix(noise.p1)  # [y1, x]
    a2 = _bsc_matrix(noise.p2)
    b1 = ch1.matrix()  # [u1, y1]
    b2 = ch2.matrix()
    probs = np.einsum("x,ix,jx,ai,bj->xijab", px, a1, a2, b1, b2)
    return JointTable(probs=probs, noise=noise, ch1=ch1, ch2=ch2)


def _entropy(p: np.ndarray) -> float:
    p = p.ravel()
    nz = p > 0
    return float(-(p[nz] * np.log2(p[nz])).sum())


@dataclass(frozen=True)
class InfoMeasures:
    mi_y_u: float  # I(Y1, Y2; U1, U2)
    h_x_given_u: float  # H(X | U1, U2)
    mi_y1_u1_given_u2: float  # I(Y1; U1 | U2)
    mi_y2_u2_given_u1: float  # I(Y2; U2 | U1)
    h_x_given_y: float  # H(X | Y1, Y2)


def info_measures(table: JointTable) -> InfoMeasures:
    """Standard information measures (bits) computed from the exact table."""
    p = table.probs  # axes: x, y1, y2, u1, u2
    p_yu = p.sum(axis=0)  # (y1, y2, u1, u2)
    p_y = p_yu.sum(axis=(2, 3))
    p_u = p_yu.sum(axis=(0, 1))
    p_xu = p.sum(axis=(1, 2))  # (x, u1, u2)
    p_xy = p.sum(axis=(3, 4))  # (x, y1, y2)

    h_y = _entropy(p_y)
    h_u = _entropy(p_u)
    h_yu = _entropy(p_yu)
    mi_y_u = h_y + h_u - h_yu

    h_x_given_u = _entropy(p_xu) - h_u
    h_x_given_y = _entropy(p_xy) - h_y

    p_y1u = p_yu.sum(axis=1)  # (y1, u1, u2)
    p_y1u2 = p_y1u.sum(axis=1)  # (y1, u2)
    p_u2 = p_u.sum(axis=0)
    mi_1 = _entropy(p_y1u2) - _entropy(p_u2) - _entropy(p_y1u) + h_u

    p_y2u = p_yu.sum(axis=0)  # (y2, u1, u2)
    p_y2u1 = p_y2u.sum(axis=2)  # (y2, u1)
    p_u1 = p_u.sum(axis=1)
    mi_2 = _entropy(p_y2u1) - _entropy(p_u1) - _entropy(p_y2u) + h_u

    return InfoMeasures(
        mi_y_u=mi_y_u,
        h_x_given_u=h_x_given_u,
        mi_y1_u1_given_u2=mi_1,
        mi_y2_u2_given_u1=mi_2,
        h_x_given_y=h_x_given_y,
    )


# ---------------------------------------------------------------------------
# general (non-BSC) test-channel search


@dataclass(frozen=True)
class ChannelSearchResult:
    best: tuple  # (GeneralChannel, GeneralChannel)
    best_objective: float
    best_symmetric: tuple
    best_symmetric_objective: float
    bsc_optimal_within: float  # best_objective - best_symmetric_objective (<= 0 means general wins)


def general_channel_search(
    noise: NoisePair, mu: float, grid_step: float = 0.02, chunk: int = 64
) -> ChannelSearchResult:
    """Exhaustive grid search of H(X|U1,U2) + mu I(U1,U2;Y1,Y2) over general
    binary test channels (a_i, b_i); used as the oracle for BSC optimality."""
    if grid_step > 0.02:
        raise ValueError("grid_step must be <= 0.02")
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    n_steps = int(round(1.0 / grid_step))
    ax = np.clip(grid_step * np.arange(n_steps + 1), 0.0, 1.0)
    g = len(ax)
    a, b = np.meshgrid(ax, ax, indexing="ij")
    a = a.ravel()
    b = b.ravel()
    nch = g * g

    # per-channel conditionals P(u|y), stacked: (nch, u, y)
    chans = np.empty((nch, 2, 2))
    chans[:, 0, 0] = 1.0 - a
    chans[:, 1, 0] = a
    chans[:, 0, 1] = b
    chans[:, 1, 1] = 1.0 - b

    px = np.array([0.5, 0.5])
    a1 = _bsc_matrix(noise.p1)
    a2 = _bsc_matrix(noise.p2)
    p_xyy = np.einsum("x,ix,jx->xij", px, a1, a2)  # (x, y1, y2)

    # H(U_i | Y_i) depends on the own channel only: Y_i is uniform
    def _xlog(v):
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(v > 0, v * np.log2(np.where(v > 0, v, 1.0)), 0.0)
        return t

    h_u_given_y = -0.5 * _xlog(chans).sum(axis=(1, 2))

    best_val = np.inf
    best_idx = (0, 0)
    best_sym_val = np.inf
    best_sym_idx = (0, 0)
    sym_mask = a == b

    for start in range(0, nch, chunk):
        c1 = chans[start : start + chunk]  # (m, u1, y1)
        # p(x, u1, u2) for every (c1, c2) pair in this chunk x all
        p_xuu = np.einsum("xij,mai,nbj->mnxab", p_xyy, c1, chans, optimize=True)
        p_uu = p_xuu.sum(axis=2)
        h_xuu = -_xlog(p_xuu).sum(axis=(2, 3, 4))
        h_uu = -_xlog(p_uu).sum(axis=(2, 3))
        f = (h_xuu - h_uu) + mu * (
            h_uu - h_u_given_y[start : start + chunk, None] - h_u_given_y[None, :]
        )
        i, j = np.unravel_index(np.argmin(f), f.shape)
        if f[i, j] < best_val:
            best_val = float(f[i, j])
            best_idx = (start + i, j)
        fsym = f.copy()
        fsym[~sym_mask[start : start + chunk], :] = np.inf
        fsym[:, ~sym_mask] = np.inf
        i, j = np.unravel_index(np.argmin(fsym), fsym.shape)
        if fsym[i, j] < best_sym_val:
            best_sym_val = float(fsym[i, j])
            best_sym_idx = (start + i, j)

    def _ch(idx):
        return GeneralChannel(float(a[idx]), float(b[idx]))

    return ChannelSearchResult(
        best=(_ch(best_idx[0]), _ch(best_idx[1])),
        best_objective=best_val,
        best_symmetric=(_ch(best_sym_idx[0]), _ch(best_sym_idx[1])),
        best_symmetric_objective=best_sym_val,
        bsc_optimal_within=best_val - best_sym_val,
    )
