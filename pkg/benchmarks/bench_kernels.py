"""Compiled kernels against the numpy fallback.

Times the all-configuration rate sweep on the sparse design (n = 6..8) and
Ryser permanents (n = 10..16) with both backends and checks they agree.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import itertools
import time

import numpy as np

from sparsephase import _pykernels
from sparsephase.design import build_sparse_unitary
from sparsephase.engine import SUPPORT_THRESHOLD
from sparsephase.photons import random_gram

try:
    from sparsephase import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def sweep_case(n, rng):
    d = build_sparse_unitary(n)
    U = d.U.entries
    G = random_gram(n, rng).entries
    v0 = np.array(d.v, dtype=np.intp) - 1
    etas0 = np.array(list(itertools.combinations(range(2 * n), n)), dtype=np.intp)
    return f"rates n={n} ({len(etas0)} configs)", lambda k: k.rates_many(U, G, v0, etas0, SUPPORT_THRESHOLD)


def ryser_case(n, rng):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return f"ryser n={n}", lambda k: k.ryser(A)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    cases = [sweep_case(n, rng) for n in (6, 7, 8)] + [ryser_case(n, rng) for n in (10, 12, 14, 16)]
    if _ckernels is None:
        print("compiled kernels unavailable; timing the fallback only")
    print(f"{'case':32}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, run in cases:
        t_py, out_py = best_of(lambda: run(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:32}{t_py:12.4f}{'-':>12}{'-':>10}")
            continue
        t_c, out_c = best_of(lambda: run(_ckernels), args.repeat)
        a = np.concatenate([np.ravel(x) for x in out_py]) if isinstance(out_py, tuple) else np.ravel(out_py)
        b = np.concatenate([np.ravel(x) for x in out_c]) if isinstance(out_c, tuple) else np.ravel(out_c)
        err = np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300)
        print(f"{name:32}{t_py:12.4f}{t_c:12.4f}{t_py / t_c:10.1f}  rel diff {err:.1e}")


if __name__ == "__main__":
    main()
