"""Sparse GF(2) linear algebra and compound LDGM-LDPC code construction.

An LDGM generator G (m x n) defines the quantization codebook u = w.G; a
sparse increment deltaH (k x n) defines the transmitted syndrome s = u.deltaH^T.
Together they form the compound code C(n, m, k) used by the quantize-and-bin
encoders.  Block-length planning (plan_code) turns a rate-distortion operating
point into integer (m_i, k_i) with explicit safety margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from binceo.bounds import NoisePair, TestChannelPair, conv, h_b

__all__ = [
    "SparseBinaryMatrix",
    "DegreeDistribution",
    "CompoundCode",
    "Corner",
    "Intermediate",
    "CodeMargins",
    "CodePlan",
    "as_bits",
    "build_ldgm",
    "build_delta_h",
    "encode_ldgm",
    "syndrome",
    "plan_code",
    "save_code",
    "load_code",
]


def as_bits(x, length=None) -> np.ndarray:
    """Validate and convert a bit sequence to a uint8 array of 0/1."""
    arr = np.asarray(x, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit blocks must be one-dimensional")
    if np.any(arr > 1):
        raise ValueError("bit blocks may contain only 0 and 1")
    if length is not None and arr.shape[0] != length:
        raise ValueError(f"expected length {length}, got {arr.shape[0]}")
    return arr


class SparseBinaryMatrix:
    """CSR-style binary matrix: per-row sorted column indices, implicit ones."""

    def __init__(self, rows: int, cols: int, indptr, indices):
        self.rows = int(rows)
        self.cols = int(cols)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int32)
        if self.indptr.shape != (self.rows + 1,) or self.indptr[0] != 0:
            raise ValueError("indptr must have length rows+1 and start at 0")
        if self.indptr[-1] != self.indices.shape[0]:
            raise ValueError("indptr end must equal number of stored entries")
        for r in range(self.rows):
            seg = self.indices[self.indptr[r] : self.indptr[r + 1]]
            if seg.size and (np.any(np.diff(seg) <= 0) or seg[0] < 0 or seg[-1] >= self.cols):
                raise ValueError("row indices must be strictly increasing and in range")
        # edge -> row lookup used by the GF(2) products
        self._row_ids = np.repeat(
            np.arange(self.rows, dtype=np.int64), np.diff(self.indptr)
        )
        self._transpose = None

    @classmethod
    def from_row_lists(cls, rows: int, cols: int, row_lists) -> "SparseBinaryMatrix":
        indptr = np.zeros(rows + 1, dtype=np.int64)
        chunks = []
        for r, lst in enumerate(row_lists):
            seg = np.unique(np.asarray(lst, dtype=np.int32))
            chunks.append(seg)
            indptr[r + 1] = indptr[r] + seg.size
        indices = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int32)
        return cls(rows, cols, indptr, indices)

    def row(self, r: int) -> np.ndarray:
        return self.indices[self.indptr[r] : self.indptr[r + 1]]

    def row_weights(self) -> np.ndarray:
        return np.diff(self.indptr)

    def column_weights(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.cols)

    def nnz(self) -> int:
        return int(self.indices.shape[0])

    def transpose(self) -> "SparseBinaryMatrix":
        if self._transpose is None:
            order = np.lexsort((self._row_ids, self.indices))
            t_indices = self._row_ids[order].astype(np.int32)
            counts = np.bincount(self.indices, minlength=self.cols)
            t_indptr = np.zeros(self.cols + 1, dtype=np.int64)
            np.cumsum(counts, out=t_indptr[1:])
            self._transpose = SparseBinaryMatrix(self.cols, self.rows, t_indptr, t_indices)
        return self._transpose

    def gf2_matvec(self, v) -> np.ndarray:
        """M.v over GF(2): output bit r is the XOR of v over row r's columns."""
        v = as_bits(v, self.cols)
        sums = np.bincount(self._row_ids, weights=v[self.indices].astype(np.float64),
                           minlength=self.rows)
        return (sums.astype(np.int64) & 1).astype(np.uint8)

    def gf2_vecmat(self, v) -> np.ndarray:
        """v.M over GF(2): output bit c is the XOR of v over column c's rows."""
        as_bits(v, self.rows)
        return self.transpose().gf2_matvec(v)

    def __eq__(self, other):
        return (
            isinstance(other, SparseBinaryMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __repr__(self):
        return f"SparseBinaryMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


@dataclass(frozen=True)
class DegreeDistribution:
    """Node-perspective degree weights for variables (columns) and checks (rows)."""

    var_weights: dict
    check_weights: dict

    def __post_init__(self):
        for name, w in (("var", self.var_weights), ("check", self.check_weights)):
            if not w:
                raise ValueError(f"{name} weights must be non-empty")
            if any(d < 1 or wt < 0 for d, wt in w.items()):
                raise ValueError(f"{name} weights need degrees >= 1 and weights >= 0")
            total = sum(w.values())
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"{name} weights must sum to 1, got {total}")

    @classmethod
    def regular(cls, var_degree: int, check_degree: int) -> "DegreeDistribution":
        return cls({var_degree: 1.0}, {check_degree: 1.0})

    def mean_var_degree(self) -> float:
        return sum(d * w for d, w in self.var_weights.items())

    def mean_check_degree(self) -> float:
        return sum(d * w for d, w in self.check_weights.items())

    def to_text(self) -> str:
        lines = ["# degree distribution (node perspective): side degree weight"]
        for d in sorted(self.var_weights):
            lines.append(f"var {d} {self.var_weights[d]!r}")
        for d in sorted(self.check_weights):
            lines.append(f"check {d} {self.check_weights[d]!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DegreeDistribution":
        var, check = {}, {}
        for ln, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] not in ("var", "check"):
                raise ValueError(f"line {ln}: expected '<var|check> <degree> <weight>'")
            side = var if parts[0] == "var" else check
            side[int(parts[1])] = float(parts[2])
        return cls(var, check)


def _realize_counts(weights: dict, total: int) -> np.ndarray:
    """Per-node degree sequence with counts proportional to the weights."""
    degs = np.array(sorted(weights), dtype=np.int64)
    ideal = np.array([weights[int(d)] * total for d in degs])
    counts = np.floor(ideal).astype(np.int64)
    # hand out the remainder by largest fractional part, ties to low degree
    frac_order = np.argsort(-(ideal - counts), kind="stable")
    for i in frac_order[: total - int(counts.sum())]:
        counts[i] += 1
    return np.repeat(degs, counts)


def build_ldgm(
    n: int,
    m: int,
    check_degree: int,
    seed: int,
    assignment: str = "random",
    systematic: bool = False,
) -> SparseBinaryMatrix:
    """Check-regular LDGM generator G (m x n): every output (column) XORs
    exactly check_degree information bits, uniformly chosen.

    With systematic=True the first m columns are the identity instead (output
    j copies w_j); only the remaining n-m columns are check-regular.  This
    keeps the code's parity-check representation sparse, which the syndrome
    decoder relies on, at the cost of deviating from strict check-regularity.
    """
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    if check_degree < 1 or check_degree > m:
        raise ValueError("need 1 <= check_degree <= m")
    if assignment not in ("random", "sequential"):
        raise ValueError("assignment must be 'random' or 'sequential'")
    if systematic and n > m and check_degree < 2:
        raise ValueError("systematic construction needs check_degree >= 2")
    rng = np.random.default_rng(seed)
    row_lists = [[] for _ in range(m)]
    for j in range(n):
        if systematic and j < m:
            picks = [j]
        elif assignment == "sequential":
            picks = [(j * check_degree + t) % m for t in range(check_degree)]
        else:
            picks = rng.choice(m, size=check_degree, replace=False)
        for i in picks:
            row_lists[int(i)].append(j)
    return SparseBinaryMatrix.from_row_lists(m, n, row_lists)


def _swap_edge_targets(rows, cols, edge_ids, edge_set, rng, tries=20):
    """Swap the column endpoints of the given edges with random partners,
    accepting only swaps that keep the edge set simple (no repeats)."""
    for e in edge_ids:
        old_e = (int(rows[e]), int(cols[e]))
        if old_e not in edge_set:
            continue  # already rewired by an earlier swap
        for _ in range(tries):
            j = int(rng.integers(0, rows.size))
            if j == e:
                continue
            old_j = (int(rows[j]), int(cols[j]))
            new_e = (old_e[0], old_j[1])
            new_j = (old_j[0], old_e[1])
            if new_e == new_j or new_e in edge_set or new_j in edge_set:
                continue
            edge_set.discard(old_e)
            edge_set.discard(old_j)
            edge_set.add(new_e)
            edge_set.add(new_j)
            cols[e], cols[j] = cols[j], cols[e]
            break


def _socket_permutation(n, k, col_degrees, row_degrees, rng, max_fix_passes=50):
    """Match column sockets to row sockets; repair repeated edges by swaps."""
    col_sockets = np.repeat(np.arange(n, dtype=np.int64), col_degrees)
    rows = np.repeat(np.arange(k, dtype=np.int64), row_degrees)
    if col_sockets.size != rows.size:
        raise ValueError("socket counts differ; degree sequences are inconsistent")
    cols = col_sockets[rng.permutation(col_sockets.size)]
    for _ in range(max_fix_passes):
        keys = rows * n + cols
        order = np.argsort(keys, kind="stable")
        dup = np.zeros(keys.size, dtype=bool)
        dup[order[1:]] = keys[order[1:]] == keys[order[:-1]]
        bad = np.flatnonzero(dup)
        if bad.size == 0:
            return rows, cols
        edge_set = set(zip(rows.tolist(), cols.tolist()))
        _swap_edge_targets(rows, cols, bad, edge_set, rng)
    raise RuntimeError("could not remove repeated edges; degree sequence too dense")


def _break_four_cycles(k, n, rows, cols, rng, passes=3):
    """Best-effort removal of length-4 cycles by random edge swaps."""
    from scipy.sparse import coo_matrix

    for _ in range(passes):
        b = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(k, n)).tocsr()
        overlap = (b @ b.T).tocoo()
        mask = (overlap.row < overlap.col) & (overlap.data >= 2)
        bad_rows = np.unique(np.concatenate([overlap.row[mask], overlap.col[mask]]))
        if bad_rows.size == 0:
            break
        edge_ids = np.flatnonzero(np.isin(rows, bad_rows))
        edge_set = set(zip(rows.tolist(), cols.tolist()))
        _swap_edge_targets(rows, cols, edge_ids, edge_set, rng)
    return rows, cols


def build_delta_h(n: int, k: int, dist: DegreeDistribution, seed: int) -> SparseBinaryMatrix:
    """Sparse k x n syndrome matrix realizing dist via socket permutation.

    Column degrees follow dist exactly; row degrees follow dist up to the
    minimal adjustment needed to balance the edge counts.  No repeated edges;
    4-cycles are removed best-effort.
    """
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    rng = np.random.default_rng(seed)
    col_degrees = _realize_counts(dist.var_weights, n)
    rng.shuffle(col_degrees)
    row_degrees = _realize_counts(dist.check_weights, k)
    rng.shuffle(row_degrees)
    # balance row sockets to the column total, one edge at a time
    deficit = int(col_degrees.sum() - row_degrees.sum())
    step = 1 if deficit > 0 else -1
    i = 0
    while deficit != 0:
        if 1 <= row_degrees[i % k] + step <= n:
            row_degrees[i % k] += step
            deficit -= step
        i += 1
    rows, cols = _socket_permutation(n, k, col_degrees, row_degrees, rng)
    rows, cols = _break_four_cycles(k, n, rows, cols, rng)
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=k), out=indptr[1:])
    return SparseBinaryMatrix(k, n, indptr, cols.astype(np.int32))


def encode_ldgm(G: SparseBinaryMatrix, w) -> np.ndarray:
    """Codeword u = w.G over GF(2)."""
    return G.gf2_vecmat(as_bits(w, G.rows))


def syndrome(deltaH: SparseBinaryMatrix, u) -> np.ndarray:
    """Syndrome s = u.deltaH^T over GF(2)."""
    return deltaH.gf2_matvec(as_bits(u, deltaH.cols))


@dataclass(frozen=True)
class CompoundCode:
    """Compound structure C(n, m, k): LDGM codebook plus syndrome increment."""

    n: int
    m: int
    k: int
    G: SparseBinaryMatrix
    deltaH: SparseBinaryMatrix

    def __post_init__(self):
        if self.G.rows != self.m or self.G.cols != self.n:
            raise ValueError("G must be m x n")
        if self.deltaH.rows != self.k or self.deltaH.cols != self.n:
            raise ValueError("deltaH must be k x n")

    @property
    def rate_quant(self) -> float:
        return self.m / self.n

    @property
    def rate_net(self) -> float:
        return self.k / self.n


# ---------------------------------------------------------------------------
# block-length planning


@dataclass(frozen=True)
class Corner:
    """Extreme rate point: link 1 quantizes and bins, link 2 sends its index."""


@dataclass(frozen=True)
class Intermediate:
    """Interior rate point splitting the binning budget by delta."""

    delta: float


@dataclass(frozen=True)
class CodeMargins:
    """Rate safety margins: eps_i1 pads the quantizers, eps_i2 shrinks the bins."""

    eps11: float = 0.009
    eps12: float = 0.001
    eps21: float = 0.009
    eps22: float = 0.001

    def __post_init__(self):
        if any(e < 0 for e in (self.eps11, self.eps12, self.eps21, self.eps22)):
            raise ValueError("margins must be nonnegative")


@dataclass(frozen=True)
class CodePlan:
    m1: int
    k1: int
    m2: int
    k2: int


def plan_code(
    noise: NoisePair,
    d: TestChannelPair,
    n: int,
    point_kind,
    margins: CodeMargins = CodeMargins(),
) -> CodePlan:
    """Integer block lengths (m1, k1, m2, k2) for an operating point.

    Quantizer sizes round up and subtracted binning terms round down, so the
    realized rates never undershoot the real-valued targets.
    """
    pd = conv(noise.p, d.d)
    cap = 1.0 - h_b(pd)  # virtual-channel capacity between the two links
    m1 = math.ceil(n * (1.0 - h_b(d.d1) + margins.eps11))
    m2 = math.ceil(n * (1.0 - h_b(d.d2) + margins.eps21))
    if isinstance(point_kind, Corner):
        k1 = m1 - math.floor(n * (cap - margins.eps12))
        k2 = m2
    elif isinstance(point_kind, Intermediate):
        delta = point_kind.delta
        if not 0.0 < delta < cap:
            raise ValueError(f"delta must lie in (0, {cap:.6g})")
        k1 = m1 - math.floor(n * (cap - delta - margins.eps12))
        k2 = m2 - math.floor(n * (delta - margins.eps22))
    else:
        raise TypeError("point_kind must be Corner or Intermediate")
    plan = CodePlan(m1=m1, k1=k1, m2=m2, k2=k2)
    for name, v, hi in (("m1", m1, n), ("k1", k1, m1), ("m2", m2, n), ("k2", k2, m2)):
        if not 0 <= v <= hi:
            raise ValueError(f"inconsistent margins: {name}={v} outside [0, {hi}]")
    return plan


# ---------------------------------------------------------------------------
# reproducible code files


def save_code(code: CompoundCode, path, meta: dict | None = None) -> None:
    """Write a compound code as a self-contained text file with edge lists."""
    with open(path, "w") as fh:
        fh.write("binceo-code v1\n")
        fh.write(f"n {code.n}\nm {code.m}\nk {code.k}\n")
        for key, val in (meta or {}).items():
            fh.write(f"meta {key} {val}\n")
        for r in range(code.m):
            fh.write("G " + " ".join(map(str, code.G.row(r))) + "\n")
        for r in range(code.k):
            fh.write("H " + " ".join(map(str, code.deltaH.row(r))) + "\n")


def load_code(path) -> CompoundCode:
    n = m = k = None
    g_rows, h_rows = [], []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "binceo-code v1":
            raise ValueError(f"unrecognized code file header: {header!r}")
        for raw in fh:
            parts = raw.split()
            if not parts:
                continue
            tag = parts[0]
            if tag == "n":
                n = int(parts[1])
            elif tag == "m":
                m = int(parts[1])
            elif tag == "k":
                k = int(parts[1])
            elif tag == "meta":
                continue
            elif tag == "G":
                g_rows.append([int(x) for x in parts[1:]])
            elif tag == "H":
                h_rows.append([int(x) for x in parts[1:]])
            else:
                raise ValueError(f"unrecognized code file line tag: {tag!r}")
    if None in (n, m, k) or len(g_rows) != m or len(h_rows) != k:
        raise ValueError("incomplete code file")
    return CompoundCode(
        n=n,
        m=m,
        k=k,
        G=SparseBinaryMatrix.from_row_lists(m, n, g_rows),
        deltaH=SparseBinaryMatrix.from_row_lists(k, n, h_rows),
    )
