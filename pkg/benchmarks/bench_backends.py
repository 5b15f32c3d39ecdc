"""Benchmark the numba and numpy message-passing backends on the two hot
kernels (check_messages / var_messages) and on a full syndrome-SP decode.

Usage: python3 benchmarks/bench_backends.py [--n 10000] [--reps 20]
"""

import argparse
import time

import numpy as np

from binceo._kernels import active_backend, check_messages, var_messages
from binceo.codegraph import CompoundCode, DegreeDistribution, build_delta_h, build_ldgm, syndrome
from binceo.decoder import SideInfoPrior, sp_decode


def random_graph(n_vars, n_checks, degree, seed):
    rng = np.random.default_rng(seed)
    edge_var = np.concatenate(
        [rng.choice(n_vars, degree, replace=False) for _ in range(n_checks)]
    ).astype(np.int64)
    check_ptr = np.arange(0, degree * n_checks + 1, degree, dtype=np.int64)
    return edge_var, check_ptr


def bench_kernels(n, reps):
    n_checks = n // 2
    edge_var, check_ptr = random_graph(n, n_checks, 6, seed=0)
    rng = np.random.default_rng(1)
    v2c = rng.normal(0, 2, edge_var.size)
    coef_sign = rng.choice([-1.0, 1.0], n_checks)
    coef_mag = np.zeros(n_checks)
    prior = rng.normal(0, 2, n)

    results = {}
    for backend in ("numba", "numpy"):
        # warm up (JIT compile for numba)
        c2v = check_messages(v2c, check_ptr, coef_sign, coef_mag, backend=backend)
        var_messages(c2v, edge_var, prior, n, backend=backend)
        t0 = time.perf_counter()
        for _ in range(reps):
            c2v = check_messages(v2c, check_ptr, coef_sign, coef_mag, backend=backend)
        t1 = time.perf_counter()
        for _ in range(reps):
            var_messages(c2v, edge_var, prior, n, backend=backend)
        t2 = time.perf_counter()
        results[backend] = ((t1 - t0) / reps, (t2 - t1) / reps)

    ref = check_messages(v2c, check_ptr, coef_sign, coef_mag, backend="numpy")
    alt = check_messages(v2c, check_ptr, coef_sign, coef_mag, backend="numba")
    print(f"backend agreement: max |diff| = {np.max(np.abs(ref - alt)):.2e}")
    for backend, (tc, tv) in results.items():
        print(f"{backend:>6}: check_messages {tc * 1e3:8.3f} ms/call   "
              f"var_messages {tv * 1e3:8.3f} ms/call")
    return results


def bench_decode(n, reps):
    # full-rate LDGM so the graph is a pure regular-(3,6) LDPC syndrome decode
    G = build_ldgm(n, n, 3, seed=0, systematic=True)
    dh = build_delta_h(n, n // 2, DegreeDistribution.regular(3, 6), seed=1)
    code = CompoundCode(n=n, m=n, k=n // 2, G=G, deltaH=dh)
    rng = np.random.default_rng(2)
    theta = 0.0725
    import binceo._kernels as kernels

    saved = kernels._BACKEND
    for backend in ("numba", "numpy"):
        # BINCEO_BACKEND is only read at import; swap the module default here
        kernels._BACKEND = backend
        times = []
        iters = []
        for r in range(reps):
            u = rng.integers(0, 2, n).astype(np.uint8)
            s = syndrome(dh, u)
            v = u ^ (rng.random(n) < theta).astype(np.uint8)
            t0 = time.perf_counter()
            res = sp_decode(code, s, SideInfoPrior(v, theta))
            times.append(time.perf_counter() - t0)
            iters.append(res.iters)
        print(f"{backend:>6}: sp_decode {np.mean(times):7.3f} s/block "
              f"({np.mean(iters):.0f} iters avg, BER target 0)")
    kernels._BACKEND = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10000)
    ap.add_argument("--reps", type=int, default=20)
    args = ap.parse_args()

    print(f"default backend: {active_backend()}   n = {args.n}")
    print("-- kernel micro-benchmarks --")
    bench_kernels(args.n, args.reps)
    print("-- end-to-end syndrome decode (rate 0.5 at 80% capacity) --")
    bench_decode(args.n, max(2, args.reps // 5))


if __name__ == "__main__":
    main()
