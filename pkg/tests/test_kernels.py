"""Kernel oracles: direct tanh-product reference and backend equivalence."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binceo._kernels import LLR_CLIP, active_backend, check_messages, var_messages


def random_graph(rng, n_checks, n_vars, max_deg=5):
    """Random CSR check structure with degrees in [1, max_deg]."""
    ptr = [0]
    edges = []
    for _ in range(n_checks):
        deg = int(rng.integers(1, max_deg + 1))
        edges.extend(rng.integers(0, n_vars, size=deg).tolist())
        ptr.append(len(edges))
    return np.asarray(ptr, dtype=np.int64), np.asarray(edges, dtype=np.int64)


def reference_check_messages(v2c, check_ptr, coef_sign, coef_mag):
    """Direct tanh-product rule, no sign/log decomposition."""
    v2c = np.clip(v2c, -LLR_CLIP, LLR_CLIP)
    out = np.empty_like(v2c)
    for c in range(check_ptr.shape[0] - 1):
        lo, hi = check_ptr[c], check_ptr[c + 1]
        t = np.tanh(0.5 * v2c[lo:hi])
        coef = coef_sign[c] * math.exp(coef_mag[c])
        for i in range(lo, hi):
            prod = coef
            for j in range(lo, hi):
                if j != i:
                    prod *= t[j - lo]
            prod = min(max(prod, -(1.0 - 1e-15)), 1.0 - 1e-15)
            out[i] = np.clip(2.0 * np.arctanh(prod), -LLR_CLIP, LLR_CLIP)
    return out


def reference_var_messages(c2v, edge_var, prior, n_vars):
    totals = prior.astype(np.float64).copy()
    for e, v in enumerate(edge_var):
        totals[v] += c2v[e]
    v2c = np.clip(totals[edge_var] - c2v, -LLR_CLIP, LLR_CLIP)
    return v2c, totals


class TestCheckMessages:
    @pytest.mark.parametrize("backend", ["numpy", "numba"])
    def test_matches_reference_random(self, backend):
        rng = np.random.default_rng(7)
        for trial in range(20):
            nc, nv = 8, 12
            ptr, ev = random_graph(rng, nc, nv)
            v2c = rng.normal(0, 3, ev.shape[0])
            sign = rng.choice([-1.0, 1.0], nc)
            mag = np.where(rng.random(nc) < 0.5, 0.0, np.log(np.tanh(0.5 * rng.uniform(0.5, 3, nc))))
            got = check_messages(v2c, ptr, sign, mag, backend=backend)
            want = reference_check_messages(v2c, ptr, sign, mag)
            np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9)

    def test_backends_agree(self):
        rng = np.random.default_rng(11)
        ptr, ev = random_graph(rng, 40, 25)
        v2c = rng.normal(0, 5, ev.shape[0])
        sign = rng.choice([-1.0, 1.0], 40)
        mag = np.zeros(40)
        a = check_messages(v2c, ptr, sign, mag, backend="numpy")
        b = check_messages(v2c, ptr, sign, mag, backend="numba")
        np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-10)

    def test_syndrome_sign_flip(self):
        # flipping a check's syndrome bit negates all its outgoing messages
        ptr = np.array([0, 3], dtype=np.int64)
        v2c = np.array([1.0, -2.0, 0.5])
        mag = np.zeros(1)
        plus = check_messages(v2c, ptr, np.array([1.0]), mag)
        minus = check_messages(v2c, ptr, np.array([-1.0]), mag)
        np.testing.assert_allclose(plus, -minus)

    def test_degree_one_check_emits_coefficient(self):
        # single-edge check: extrinsic product is just the coefficient
        ptr = np.array([0, 1], dtype=np.int64)
        gamma = 1.7
        mag = np.array([math.log(math.tanh(0.5 * gamma))])
        out = check_messages(np.array([0.3]), ptr, np.array([1.0]), mag)
        assert out[0] == pytest.approx(gamma, rel=1e-12)

    def test_clipping(self):
        ptr = np.array([0, 2], dtype=np.int64)
        out = check_messages(np.array([1e6, 1e6]), ptr, np.array([1.0]), np.zeros(1))
        assert np.all(np.abs(out) <= LLR_CLIP)

    def test_zero_message_kills_output(self):
        # a zero incoming LLR forces (near-)zero extrinsics on other edges
        ptr = np.array([0, 3], dtype=np.int64)
        out = check_messages(np.array([0.0, 4.0, -3.0]), ptr, np.array([1.0]), np.zeros(1))
        assert abs(out[1]) < 1e-10 and abs(out[2]) < 1e-10


class TestVarMessages:
    @pytest.mark.parametrize("backend", ["numpy", "numba"])
    def test_matches_reference_random(self, backend):
        rng = np.random.default_rng(3)
        for _ in range(20):
            ev = rng.integers(0, 9, size=30).astype(np.int64)
            c2v = rng.normal(0, 4, 30)
            prior = rng.normal(0, 2, 9)
            got_v, got_t = var_messages(c2v, ev, prior, 9, backend=backend)
            want_v, want_t = reference_var_messages(c2v, ev, prior, 9)
            np.testing.assert_allclose(got_v, want_v, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(got_t, want_t, rtol=1e-12, atol=1e-12)

    def test_backends_agree(self):
        rng = np.random.default_rng(5)
        ev = rng.integers(0, 50, size=300).astype(np.int64)
        c2v = rng.normal(0, 6, 300)
        prior = rng.normal(0, 2, 50)
        a = var_messages(c2v, ev, prior, 50, backend="numpy")
        b = var_messages(c2v, ev, prior, 50, backend="numba")
        np.testing.assert_allclose(a[0], b[0], rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(a[1], b[1], rtol=1e-12, atol=1e-12)

    def test_isolated_variable_total_is_prior(self):
        ev = np.array([0, 0], dtype=np.int64)
        _, totals = var_messages(np.array([1.0, 2.0]), ev, np.array([0.5, -1.5]), 2)
        assert totals[1] == pytest.approx(-1.5)
        assert totals[0] == pytest.approx(3.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_backend_equivalence_property(seed):
    rng = np.random.default_rng(seed)
    nc = int(rng.integers(1, 12))
    nv = int(rng.integers(1, 15))
    ptr, ev = random_graph(rng, nc, nv)
    v2c = rng.normal(0, 8, ev.shape[0])
    sign = rng.choice([-1.0, 1.0], nc)
    mag = -rng.exponential(1.0, nc)
    a = check_messages(v2c, ptr, sign, mag, backend="numpy")
    b = check_messages(v2c, ptr, sign, mag, backend="numba")
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-9)


def test_active_backend_reports_known_value():
    assert active_backend() in ("numba", "numpy")
