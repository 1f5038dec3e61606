"""Wall time of the numba and numpy simulation backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--sizes 12 34 100 300]

Each case runs a fixed number of steps (tol=0, so no early stop) on a random
signed network, then on the bundled karate scenario.  Trajectories from the
two backends are compared before any timing is reported.
"""
import argparse
import time
import warnings
from pathlib import Path

import numpy as np

from opinion_sim import kernels
from opinion_sim.dynamics import run
from opinion_sim.generators import random_signed_graph, random_theta, random_weights, random_x0
from opinion_sim.schedule import make_schedule
from opinion_sim.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def case(rng, n, steps):
    g = random_signed_graph(rng, n, p_extra=min(0.3, 8 / n))
    wm = random_weights(rng, g.leader)
    return g, wm, random_theta(rng, n, g.leader), make_schedule(n, 3, steps, "random", seed=n), \
        random_x0(rng, n, g.leader)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--sizes", type=int, nargs="+", default=[12, 34, 100, 300])
    args = ap.parse_args()
    rng = np.random.default_rng(7)

    rows = []
    for n in args.sizes:
        g, wm, params, sched, x0 = case(rng, n, args.steps)
        times = {}
        out = {}
        for backend in ("numba", "numpy"):
            go = lambda: run(g, wm, sched, params, "altafini", x0, tol=0.0, horizon=args.steps,
                             backend=backend)
            out[backend] = go()  # also warms up the JIT
            times[backend] = best_of(go, args.repeat)
        assert np.allclose(out["numba"].trajectory, out["numpy"].trajectory, atol=1e-12)
        rows.append((f"random n={n}", args.steps, times["numba"], times["numpy"]))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        s = load_scenario(SCENARIOS / "karate_balanced.json")
    times = {}
    for backend in ("numba", "numpy"):
        go = lambda: run(s.graph, s.weights, s.schedule, s.params, s.rule, s.x0, s.tol, s.horizon,
                         backend=backend)
        res = go()
        times[backend] = best_of(go, args.repeat)
    rows.append(("karate_balanced", res.steps, times["numba"], times["numpy"]))

    print(f"numba available: {kernels.numba is not None}")
    print(f"{'case':<18}{'steps':>7}{'numba [ms]':>13}{'numpy [ms]':>13}{'speedup':>9}")
    for name, steps, tn, tp in rows:
        print(f"{name:<18}{steps:>7}{1e3 * tn:>13.2f}{1e3 * tp:>13.2f}{tp / tn:>9.1f}")


if __name__ == "__main__":
    main()
