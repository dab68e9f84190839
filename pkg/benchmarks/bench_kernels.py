#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-numpy fallback.

Times the raw kernels on synthetic CSR data and, optionally, a full
solver run in a subprocess per backend (the backend is fixed at import
time, so the end-to-end comparison needs fresh interpreters).

    python benchmarks/bench_kernels.py [--rows N] [--features N] [--end-to-end]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from seqn import kernels, make_synthetic_logreg


def bench(fn, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_kernel_table(rows, features, batch):
    ds = make_synthetic_logreg(rows, features, seed=3, support=12, p_support=0.4,
                               val_top=1.0, val_decay=3.0, p_tail=0.01)
    rng = np.random.default_rng(np.random.Philox(0))
    x = rng.normal(0, 1, ds.num_features)
    sample = np.sort(rng.choice(rows, size=batch, replace=False)).astype(np.int64)
    coef = rng.normal(0, 1, batch)
    dense = rng.normal(0, 1, 200_000)

    impls = kernels.available_backends()
    if "compiled" not in impls:
        print("compiled backend not built; showing fallback only")

    cases = {
        "soft_threshold (200k)": lambda mod: mod.soft_threshold(dense, 0.3),
        f"csr_margins (b={batch})": lambda mod: mod.csr_margins(
            ds.data, ds.indices, ds.indptr, sample, x),
        f"csr_accumulate_rows (b={batch})": lambda mod: mod.csr_accumulate_rows(
            ds.data, ds.indices, ds.indptr, sample, coef, np.zeros(ds.num_features)),
        "csr_row_sq_norms (all rows)": lambda mod: mod.csr_row_sq_norms(
            ds.data, ds.indices, ds.indptr, rows),
    }
    width = max(len(k) for k in cases)
    header = f"{'kernel':<{width}} " + "".join(f"{name:>14}" for name in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call in cases.items():
        times = {bname: bench(lambda mod=mod: call(mod)) for bname, mod in impls.items()}
        line = f"{name:<{width}} " + "".join(f"{times[b] * 1e6:>12.1f}us" for b in impls)
        if len(times) == 2:
            line += f"{times['python'] / times['compiled']:>9.1f}x"
        print(line)


def run_end_to_end():
    code = (
        "import time, seqn\n"
        "from seqn import kernels\n"
        "ds = seqn.make_synthetic_logreg(2000, 50, seed=1)\n"
        "comp = seqn.make_l1_logreg(ds)\n"
        "t0 = time.perf_counter()\n"
        "ref = seqn.run_reference(comp, tol_ref=1e-8, max_iters=200000)\n"
        "t_ref = time.perf_counter() - t0\n"
        "cfg = seqn.SolverConfig(method='seqn_vr', seed=0, epochs=40, tol=1e-6,\n"
        "                        psi_star=ref.psi_star)\n"
        "t0 = time.perf_counter()\n"
        "res = seqn.run(comp, cfg)\n"
        "t_run = time.perf_counter() - t0\n"
        "print(f'{kernels.BACKEND:>10}: reference {t_ref:6.2f}s   seqn-vr run {t_run:6.2f}s'\n"
        "      f'   (status={res.status})')\n"
    )
    for forced in ("0", "1"):
        env = dict(os.environ, SEQN_PURE_PYTHON=forced)
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--features", type=int, default=5000)
    ap.add_argument("--batch", type=int, default=300)
    ap.add_argument("--end-to-end", action="store_true",
                    help="also time a full solver run per backend (subprocesses)")
    args = ap.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    run_kernel_table(args.rows, args.features, args.batch)
    if args.end_to_end:
        print()
        run_end_to_end()


if __name__ == "__main__":
    main()
