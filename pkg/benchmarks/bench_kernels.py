"""Time the compiled kernels against the pure-Python fallback.

Two workloads, one per kernel: transition tallying over a large simulated
cohort, and dense simplex solves on batches of random feasible programs.
Each is run under every available backend and the results are checked to
agree exactly before the timings are printed.

Usage: python benchmarks/bench_kernels.py [--agents N] [--programs K]
"""

import argparse
import time

import numpy as np

import occmob as om


def make_tally_inputs(n_agents, seed=1234):
    rng = np.random.default_rng(seed)
    u = rng.random(n_agents)
    fathers = rng.integers(0, 3, n_agents)
    lo = np.array([0.0, 0.32, 0.37])
    span = np.array([0.66, 0.38, 0.63])
    return u, fathers, lo, span, 0.44, 0.66


def make_programs(k, seed=5678):
    """Random equality-form LPs with a known feasible point and positive
    costs, so every program is bounded; sizes straddle the 5x9 structural
    system the estimator actually solves."""
    rng = np.random.default_rng(seed)
    programs = []
    for _ in range(k):
        m = int(rng.integers(3, 9))
        n = int(rng.integers(m + 2, 2 * m + 6))
        a = rng.normal(size=(m, n))
        b = a @ rng.uniform(0.1, 1.0, size=n)
        c = rng.uniform(0.05, 1.0, size=n)
        programs.append(om.LinearProgram(c, a, b))
    return programs


def run_tally(inputs):
    from occmob._kernels import tally_transitions

    u, fathers, lo, span, cut_mid, cut_up = inputs
    return tally_transitions(u, fathers, lo, span, cut_mid, cut_up)


def run_programs(programs):
    return np.array([om.solve_lp(p).objective_value for p in programs])


def best_of(fn, arg, repeats):
    best, result = np.inf, None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(arg)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--agents", type=int, default=5_000_000,
                    help="cohort size for the tally workload")
    ap.add_argument("--programs", type=int, default=400,
                    help="number of random LPs for the simplex workload")
    ap.add_argument("--repeats", type=int, default=3,
                    help="repetitions per measurement (best is reported)")
    args = ap.parse_args()

    backends = om.available_backends()
    workloads = [
        (f"tally, {args.agents:,} agents", run_tally,
         make_tally_inputs(args.agents)),
        (f"simplex, {args.programs} programs", run_programs,
         make_programs(args.programs)),
    ]

    original = om.backend()
    print(f"backends: {', '.join(backends)}")
    if "c" not in backends:
        print("note: compiled kernels unavailable, timing the fallback only")
    try:
        for name, fn, arg in workloads:
            times, results = {}, {}
            for be in backends:
                om.set_backend(be)
                times[be], results[be] = best_of(fn, arg, args.repeats)
            if len(backends) > 1:
                assert np.array_equal(results["c"], results["python"]), \
                    f"backend results disagree on {name}"
            row = "  ".join(f"{be}: {times[be] * 1e3:9.2f} ms"
                            for be in backends)
            line = f"{name:<32} {row}"
            if len(backends) > 1:
                line += f"  speedup: {times['python'] / times['c']:.2f}x"
            print(line)
    finally:
        om.set_backend(original)


if __name__ == "__main__":
    main()
