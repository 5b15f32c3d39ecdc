"""Message-passing kernels with two interchangeable backends.

Both the BiP quantizer and the syndrome sum-product decoder reduce to the
same two sweeps over a bipartite graph stored in CSR form (edges grouped by
check, `edge_var` giving each edge's variable):

- check_messages: per-edge extrinsic check-to-variable LLRs via the
  sign/log-tanh decomposition, with a per-check coefficient (sign, log-tanh
  magnitude) carrying either a syndrome constraint or a soft target prior.
- var_messages: per-edge variable-to-check LLRs (prior plus incoming total
  minus own) and per-variable total LLRs.

The numba backend compiles loop versions of the same formulas; the numpy
backend uses segment reductions.  Select with the BINCEO_BACKEND environment
variable ("numba" or "numpy"; default numba when importable).  Both backends
clip LLRs to +/-LLR_CLIP and produce equal results to float tolerance.
"""

from __future__ import annotations

import os

import numpy as np

LLR_CLIP = 30.0
_MIN_MAG = 1e-12  # floor on |tanh| factors so logs stay finite

__all__ = ["LLR_CLIP", "active_backend", "check_messages", "var_messages"]


# ---------------------------------------------------------------------------
# numpy backend


def _check_messages_numpy(v2c, check_ptr, coef_sign, coef_mag):
    v2c = np.clip(v2c, -LLR_CLIP, LLR_CLIP)
    mag = np.abs(v2c)
    # log tanh(|x|/2) per edge, floored away from 0 and -inf
    t = np.tanh(0.5 * np.maximum(mag, _MIN_MAG))
    log_t = np.log(np.maximum(t, _MIN_MAG))
    neg = v2c < 0

    n_checks = check_ptr.shape[0] - 1
    seg = np.repeat(np.arange(n_checks), np.diff(check_ptr))
    sum_log = np.bincount(seg, weights=log_t, minlength=n_checks)
    neg_count = np.bincount(seg, weights=neg.astype(np.float64), minlength=n_checks)

    excl_log = (sum_log + coef_mag)[seg] - log_t
    total_sign = np.where((neg_count[seg] % 2) == 0, 1.0, -1.0) * coef_sign[seg]
    excl_sign = np.where(neg, -total_sign, total_sign)

    prod = np.minimum(np.exp(excl_log), 1.0 - 1e-15)
    c2v = excl_sign * np.log((1.0 + prod) / (1.0 - prod))
    return np.clip(c2v, -LLR_CLIP, LLR_CLIP)


def _var_messages_numpy(c2v, edge_var, prior, n_vars):
    totals = prior + np.bincount(edge_var, weights=c2v, minlength=n_vars)
    v2c = np.clip(totals[edge_var] - c2v, -LLR_CLIP, LLR_CLIP)
    return v2c, totals


# ---------------------------------------------------------------------------
# numba backend

_NUMBA = {}


def _build_numba():
    from numba import njit

    clip = LLR_CLIP
    min_mag = _MIN_MAG

    @njit(cache=True)
    def check_messages(v2c, check_ptr, coef_sign, coef_mag):
        n_edges = v2c.shape[0]
        c2v = np.empty(n_edges)
        for c in range(check_ptr.shape[0] - 1):
            lo, hi = check_ptr[c], check_ptr[c + 1]
            sum_log = coef_mag[c]
            sign = coef_sign[c]
            for e in range(lo, hi):
                x = v2c[e]
                if x > clip:
                    x = clip
                elif x < -clip:
                    x = -clip
                if x < 0.0:
                    sign = -sign
                    x = -x
                if x < min_mag:
                    x = min_mag
                t = np.tanh(0.5 * x)
                if t < min_mag:
                    t = min_mag
                sum_log += np.log(t)
            for e in range(lo, hi):
                x = v2c[e]
                if x > clip:
                    x = clip
                elif x < -clip:
                    x = -clip
                own_sign = -1.0 if x < 0.0 else 1.0
                if x < 0.0:
                    x = -x
                if x < min_mag:
                    x = min_mag
                t = np.tanh(0.5 * x)
                if t < min_mag:
                    t = min_mag
                prod = np.exp(sum_log - np.log(t))
                if prod > 1.0 - 1e-15:
                    prod = 1.0 - 1e-15
                msg = sign * own_sign * np.log((1.0 + prod) / (1.0 - prod))
                if msg > clip:
                    msg = clip
                elif msg < -clip:
                    msg = -clip
                c2v[e] = msg
        return c2v

    @njit(cache=True)
    def var_messages(c2v, edge_var, prior, n_vars):
        totals = prior.copy()
        for e in range(edge_var.shape[0]):
            totals[edge_var[e]] += c2v[e]
        v2c = np.empty(c2v.shape[0])
        for e in range(edge_var.shape[0]):
            x = totals[edge_var[e]] - c2v[e]
            if x > clip:
                x = clip
            elif x < -clip:
                x = -clip
            v2c[e] = x
        return v2c, totals

    return {"check_messages": check_messages, "var_messages": var_messages}


def _pick_backend() -> str:
    choice = os.environ.get("BINCEO_BACKEND", "").strip().lower()
    if choice in ("numba", "numpy"):
        return choice
    if choice not in ("", "auto"):
        raise ValueError(f"BINCEO_BACKEND must be 'numba' or 'numpy', got {choice!r}")
    try:
        import numba  # noqa: F401

        return "numba"
    except ImportError:
        return "numpy"


_BACKEND = _pick_backend()


def active_backend() -> str:
    return _BACKEND


def _impl(name: str, backend: str | None):
    b = backend or _BACKEND
    if b == "numpy":
        return {"check_messages": _check_messages_numpy, "var_messages": _var_messages_numpy}[name]
    if b == "numba":
        if not _NUMBA:
            _NUMBA.update(_build_numba())
        return _NUMBA[name]
    raise ValueError(f"unknown backend {b!r}")


def check_messages(v2c, check_ptr, coef_sign, coef_mag, backend: str | None = None):
    """Extrinsic check-to-variable messages for every edge.

    coef_sign/coef_mag give each check's fixed coefficient: a syndrome bit s
    maps to ((1-2s), 0.0); a soft target prior L maps to
    (sign(L), log tanh(|L|/2)).
    """
    return _impl("check_messages", backend)(
        np.ascontiguousarray(v2c, dtype=np.float64),
        np.ascontiguousarray(check_ptr, dtype=np.int64),
        np.ascontiguousarray(coef_sign, dtype=np.float64),
        np.ascontiguousarray(coef_mag, dtype=np.float64),
    )


def var_messages(c2v, edge_var, prior, n_vars, backend: str | None = None):
    """Variable-to-check messages and per-variable total LLRs."""
    return _impl("var_messages", backend)(
        np.ascontiguousarray(c2v, dtype=np.float64),
        np.ascontiguousarray(edge_var, dtype=np.int64),
        np.ascontiguousarray(prior, dtype=np.float64),
        int(n_vars),
    )
