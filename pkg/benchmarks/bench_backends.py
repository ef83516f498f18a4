"""Compare the numba kernels with their numpy fallbacks.

    python benchmarks/bench_backends.py [--repeat 3]

Each workload runs once per backend to warm up (JIT compile, caches), then
the best of ``--repeat`` timings is reported together with the speed-up.
"""
import argparse
import time

import numpy as np

from clusterbound import _backend, cluster, graphs, kernels, mayer
from clusterbound.potentials import hard_rod


def _graph_flags(backend):
    return kernels.graph_flags(6, 0, 1 << 15, backend).sum()


def _mayer_m4(backend):
    return mayer.beta_m_monte_carlo(hard_rod(1.0), 1.0, 4, 200_000, backend=backend).mean


_TABLE = cluster.ActivityTable.from_function(4, 1.1, lambda m: 0.01 * (-1) ** m)


def _cluster_log(backend):
    return cluster.cluster_log_truncated(_TABLE, 5, backend)


WORKLOADS = {
    "graph_flags n=6 (32768 masks)": _graph_flags,
    "mayer m=4 (2e5 samples)": _mayer_m4,
    "cluster log N=4, order 5": _cluster_log,
}


def best_time(func, backend, repeat):
    func(backend)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func(backend)
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if not _backend.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'workload':<32}{'numba [s]':>12}{'numpy [s]':>12}{'speed-up':>10}")
    for name, func in WORKLOADS.items():
        assert np.isclose(func("numba"), func("numpy"), rtol=1e-10, atol=1e-14)
        t_nb = best_time(func, "numba", args.repeat)
        t_np = best_time(func, "numpy", args.repeat)
        print(f"{name:<32}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
