"""Independent reference computations used by the tests."""
import numpy as np

from opinion_sim.dynamics import SimulationState, build_system_matrices, snapshot_graph, step


def scalar_trajectory(g, wm, sched, params, rule, x0, steps):
    state = SimulationState(0, np.asarray(x0, dtype=float), [np.asarray(x0, dtype=float)])
    for _ in range(steps):
        state = step(state, g, wm, sched, params, rule)
    return np.array(state.trajectory)


def matrix_trajectory(g, wm, sched, params, rule, x0, steps, partition=None, kind=None):
    """Iterate the state-transition matrices, rebuilding them from the matrix path's own state.

    ``kind`` defaults to ``degroot`` or ``lifted``; ``altafini-gauged`` works on
    the gauged state and needs ``partition``.  For ``lifted`` the second output
    holds the odd (negated) components of the lifted state.
    """
    kind = kind or ("degroot" if rule == "degroot" else "lifted")
    x = np.asarray(x0, dtype=float).copy()
    out, mirror = [x.copy()], [-x.copy()]
    if kind == "lifted":
        z = np.empty(2 * g.n)
        z[0::2], z[1::2] = x, -x
    if kind == "altafini-gauged":
        D = partition.gauge(g.n)
    for t in range(steps):
        gt = snapshot_graph(g, sched, t)
        m = build_system_matrices(gt, wm, x, params, kind, partition, t).matrix
        if kind == "lifted":
            z = m @ z
            x = z[0::2].copy()
            mirror.append(z[1::2].copy())
        elif kind == "altafini-gauged":
            x = D * (m @ (D * x))
        else:
            x = m @ x
        out.append(x.copy())
    if kind == "lifted":
        return np.array(out), np.array(mirror)
    return np.array(out)


def naive_matmul(a, b):
    n, k = a.shape
    m = b.shape[1]
    out = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            s = 0.0
            for r in range(k):
                s += a[i, r] * b[r, j]
            out[i, j] = s
    return out


def recount_degrees(adj, leader):
    """Per-follower neighbor counts by walking the rows one entry at a time."""
    tot, pos, neg = [], [], []
    for i in range(len(adj)):
        if i == leader:
            continue
        a = b = 0
        for v in adj[i]:
            if v > 0:
                a += 1
            elif v < 0:
                b += 1
        tot.append(a + b)
        pos.append(a)
        neg.append(b)
    return max(tot), min(pos), max(pos), min(neg), max(neg)


def random_row_stochastic(rng, n, signed=True):
    m = rng.normal(size=(n, n)) if signed else rng.random((n, n))
    m[:, -1] += 1.0 - m.sum(axis=1)
    return m


def random_sub_stochastic(rng, n):
    m = rng.random((n, n)) * (rng.random((n, n)) < 0.7)
    s = m.sum(axis=1)
    s[s == 0] = 1.0
    return m / s[:, None] * rng.uniform(0, 1, n)[:, None]


def random_super_stochastic(rng, n):
    m = rng.random((n, n)) + 1e-3
    target = rng.uniform(1.0, 1.6, n)
    short = rng.random(n) < 0.4
    short[rng.integers(n)] = True
    target[short] = rng.uniform(0.1, 0.99, short.sum())
    return m / m.sum(axis=1)[:, None] * target[:, None]
