"""Time every hot kernel on both backends and print the comparison table.

Run as a script:

    python benchmarks/bench_kernels.py [--repeat N]

Both implementations are imported directly, so the THERMOGRAPH_NUMBA flag
does not affect this script; if numba is not importable the table falls
back to the numpy column alone.  Each workload is checked for agreement
between the backends before it is timed.
"""

import argparse
import math
import time

import numpy as np

from thermograph._kernels import numpy_impl

try:
    from thermograph._kernels import numba_impl
except ImportError:
    numba_impl = None

from thermograph.families import chain_family
from thermograph.graph_core import LoadedGraph
from thermograph.sequences import build_Gn


def corpus_style_graph(rng, n_vertices=8):
    ids = list(range(1, n_vertices + 1))
    edges = {}
    for u, t in zip(ids, ids[1:] + ids[:1]):
        edges[(u, t)] = rng.uniform(0.1, 2.0)
    for u in ids:
        for t in ids:
            if (u, t) not in edges and rng.random() < 0.35:
                edges[(u, t)] = rng.uniform(0.1, 2.0)
    return LoadedGraph((u, t, w) for (u, t), w in edges.items())


def build_workloads(rng):
    g = corpus_style_graph(rng)
    indptr, indices, weights = g.csr()

    # a deep hull has no cycle longer than its depth, so the window scan
    # must visit every path before concluding the gap is real
    gap_graph = build_Gn(chain_family(0.5, 3.0, "1/zeta(3)"), 400)
    gp, gi, _ = gap_graph.csr()

    W = rng.uniform(0.0, 1.0, size=(48, 48))
    W *= 0.9 / np.max(np.abs(np.linalg.eigvals(W)))

    coeffs = 0.8 ** np.arange(65536, dtype=np.float64)
    coeffs[0] = 0.0

    A = rng.uniform(0.0, 1.0, size=(300, 300))

    N = 4000
    lgfact = np.zeros(N, dtype=np.float64)
    lgfact[1:] = np.cumsum(np.log(np.arange(1.0, N)))

    return [
        (
            "dfs_return_weight_sums",
            "8-vertex graph, paths to length 14",
            "dfs_return_weight_sums",
            (indptr, indices, weights, g.vertex_index(1), 14),
        ),
        (
            "dfs_find_cycle_in_range",
            "depth-400 hull, exhaustive empty-window scan",
            "dfs_find_cycle_in_range",
            (gp, gi, gap_graph.vertex_index(1), 400, 1200, 50_000_000),
        ),
        (
            "taboo_series",
            "dense 48-vertex matrix, 2048 coefficients",
            "taboo_series",
            (W, 0, 2048),
        ),
        (
            "poly_eval",
            "65536 coefficients, derivative near the root",
            "poly_eval",
            (coeffs, 1.2499, 1),
        ),
        (
            "power_iteration",
            "dense 300-vertex matrix, tol 1e-13",
            "power_iteration",
            (A, 1e-13, 10_000),
        ),
        (
            "jumpy_series_sums",
            "two-jump tail sums, 4000 lengths",
            "jumpy_series_sums",
            (1.0, 3.0, N - 1, lgfact, -1e-6),
        ),
        (
            "chain_exp_sums",
            "single-jump centered sums, n = 200000",
            "chain_exp_sums",
            (200_000, 3.0, -1e-7),
        ),
    ]


def as_floats(result):
    out = []
    stack = [result]
    while stack:
        x = stack.pop()
        if isinstance(x, tuple):
            stack.extend(x)
        elif isinstance(x, np.ndarray):
            out.extend(np.asarray(x, dtype=np.float64).ravel().tolist())
        else:
            out.append(float(x))
    return out


def agree(a, b, rtol=1e-9):
    xs, ys = as_floats(a), as_floats(b)
    if len(xs) != len(ys):
        return False
    return all(
        math.isclose(x, y, rel_tol=rtol, abs_tol=1e-12) for x, y in zip(xs, ys)
    )


def best_of(fn, args, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    opts = parser.parse_args()

    rng = np.random.default_rng(20260813)
    workloads = build_workloads(rng)

    print(f"{'kernel':<26} {'workload':<46} {'numpy':>9} {'numba':>9} {'speedup':>8}")
    print("-" * 102)
    for name, desc, attr, args in workloads:
        np_fn = getattr(numpy_impl, attr)
        t_np = best_of(np_fn, args, opts.repeat)
        if numba_impl is None:
            print(f"{name:<26} {desc:<46} {t_np * 1e3:>7.2f}ms {'-':>9} {'-':>8}")
            continue
        nb_fn = getattr(numba_impl, attr)
        nb_fn(*args)  # compile before timing
        if not agree(np_fn(*args), nb_fn(*args)):
            raise SystemExit(f"backend mismatch on {name}")
        t_nb = best_of(nb_fn, args, opts.repeat)
        print(
            f"{name:<26} {desc:<46} {t_np * 1e3:>7.2f}ms {t_nb * 1e3:>7.2f}ms "
            f"{t_np / t_nb:>7.1f}x"
        )
    if numba_impl is None:
        print("\nnumba is not importable; only the fallback column was timed")


if __name__ == "__main__":
    main()
