#!/usr/bin/env python3
"""Benchmark the compiled profile-likelihood kernels against the numpy fallback.

Times the batched log-value and log-gradient kernels on workloads shaped
like the two hot paths: multistart ascent batches inside the likelihood
maximizer, and wide certification grids.

    python3 benchmarks/kernel_bench.py
"""

import time

import numpy as np

from symprop._kernels import _pure

try:
    from symprop._kernels import _native
except ImportError:
    _native = None


def _workloads():
    rng = np.random.default_rng(42)
    # (name, batch, probs, mu, counts)
    yield ("ascent batch, n=4 profile {1,1,2}, 8 symbols",
           rng.dirichlet(np.ones(8), size=52), np.array([1, 2]), np.array([2, 1]))
    yield ("ascent batch, n=30 profile, 45 symbols",
           rng.dirichlet(np.ones(45), size=52),
           np.array([1, 2, 3, 4, 5, 7]), np.array([2, 2, 1, 1, 1, 1]))
    grid = rng.dirichlet(np.ones(12), size=200_000)
    yield ("certification grid, n=6 profile {1,1,2,2}, 200k points",
           grid, np.array([1, 2]), np.array([2, 2]))


def _time(fn, *args, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    if _native is None:
        print("compiled kernel not built (python3 setup.py build_ext --inplace); "
              "timing the numpy fallback only")
    header = f"{'workload':55s} {'kernel':>10s} {'pure':>10s} {'native':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, P, mu, cnt in _workloads():
        for label, pure_fn, native_fn in (
            ("value", _pure.msp_log_batch, _native.msp_log_batch if _native else None),
            ("gradient", _pure.msp_log_grad_batch, _native.msp_log_grad_batch if _native else None),
        ):
            if label == "gradient" and P.shape[0] > 10_000:
                continue  # gradients are never evaluated on grids
            t_pure = _time(pure_fn, P, mu, cnt)
            if native_fn is None:
                print(f"{name:55s} {label:>10s} {t_pure*1e3:9.2f}ms {'-':>10s} {'-':>8s}")
                continue
            t_native = _time(native_fn, P, mu, cnt)
            a = pure_fn(P, mu, cnt)
            b = native_fn(P, mu, cnt)
            a = a[0] if isinstance(a, tuple) else a
            b = b[0] if isinstance(b, tuple) else b
            assert np.allclose(a, b, rtol=1e-10, atol=1e-12, equal_nan=True)
            print(f"{name:55s} {label:>10s} {t_pure*1e3:9.2f}ms {t_native*1e3:9.2f}ms "
                  f"{t_pure/t_native:7.1f}x")


if __name__ == "__main__":
    main()
