"""Time the numba and pure-numpy kernel flavors side by side.

    python3 benchmarks/bench_kernels.py [--nx 120 --ny 90 --L 200 --repeat 5]

Both flavors are importable in one process; the WAVEKRYLOV_NO_NUMBA flag only
changes which one the public dispatch names point at.
"""
import argparse
import timeit

import numpy as np

from wavekrylov import auto_filter, kernels, laplacian_2d_rect


def best_of(fn, repeat):
    fn()  # warm up (jit compile, caches)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--nx", type=int, default=120)
    ap.add_argument("--ny", type=int, default=90)
    ap.add_argument("--L", type=int, default=200)
    ap.add_argument("--m", type=int, default=60, help="size of the dense Jacobi test")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    p = laplacian_2d_rect(args.nx, args.ny, 4.0, 3.0)
    S = p.stiffness
    rng = np.random.default_rng(0)
    x = rng.standard_normal(p.n)
    spec, _ = auto_filter(p, 0.0, 3.0, args.L)
    omegas = np.linspace(0, 30, 2001)
    X = rng.standard_normal((args.m, args.m))
    A = X + X.T

    cases = {
        "spmv": lambda f: (lambda: f(S.row_offsets, S.col_indices, S.values, x)),
        "filtered_apply": lambda f: (lambda: f(S.row_offsets, S.col_indices, S.values,
                                               p.minv.inv_values, x, spec.tau,
                                               spec.alpha_samples)),
        "filter_sum": lambda f: (lambda: f(omegas, spec.tau, spec.alpha_samples)),
        "jacobi": lambda f: (lambda: f(A.copy(), np.eye(args.m), 60)),
    }
    print(f"pencil n={p.n} nnz={S.nnz}, L={args.L}, jacobi m={args.m}")
    print(f"{'kernel':<16}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, make in cases.items():
        t_np = best_of(make(getattr(kernels, f"{name}_numpy")), args.repeat)
        jit = getattr(kernels, f"{name}_numba")
        if jit is None:
            print(f"{name:<16}{1e3 * t_np:>12.3f}{'n/a':>12}{'':>10}")
            continue
        t_nb = best_of(make(jit), args.repeat)
        print(f"{name:<16}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
