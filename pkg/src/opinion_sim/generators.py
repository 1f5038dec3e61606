"""Random networks and scenarios, including ones that meet a theorem's hypotheses.

Used by the property tests and the benchmark.  Everything takes a numpy
``Generator`` so draws are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analysis import C1, T1, T2, T3, Certificate, check_theorem, theorem_name
from .dynamics import AgentParams
from .graph import SignedGraph
from .schedule import Schedule, make_schedule
from .weights import AffineFamily, WeightModel, distrust_affine, trust_affine


@dataclass
class RandomScenario:
    graph: SignedGraph
    weights: WeightModel
    params: AgentParams
    schedule: Schedule
    x0: np.ndarray
    rule: str
    certificate: Optional[Certificate] = None


def random_signed_graph(rng, n: int, leader: Optional[int] = None, p_extra: float = 0.3,
                        p_neg: float = 0.3, balanced: Optional[bool] = None,
                        spanning: bool = True, positive_tree: bool = False,
                        max_depth: Optional[int] = None) -> SignedGraph:
    """Random signed digraph; nobody influences the leader.

    ``spanning`` grows a random tree out of the leader first.  ``balanced=True``
    signs every edge by a random two-camp split (leader camp trusted);
    ``positive_tree`` keeps tree edges positive regardless.  ``max_depth``
    caps the depth of that tree.
    """
    leader = int(rng.integers(n)) if leader is None else leader
    camp = rng.random(n) < 0.5
    camp[leader] = False
    if balanced and positive_tree:
        camp[:] = False

    def sign(s, d):
        if balanced:
            return 1 if camp[s] == camp[d] else -1
        return -1 if rng.random() < p_neg else 1

    adj = np.zeros((n, n), dtype=np.int8)
    if spanning:
        depth = {leader: 0}
        order = [i for i in rng.permutation(n) if i != leader]
        for d in order:
            pool = [k for k in depth if max_depth is None or depth[k] < max_depth]
            s = pool[int(rng.integers(len(pool)))]
            depth[d] = depth[s] + 1
            adj[d, s] = 1 if positive_tree else sign(s, d)
    for d in range(n):
        for s in range(n):
            if d != leader and s != d and adj[d, s] == 0 and rng.random() < p_extra:
                adj[d, s] = sign(s, d)
    return SignedGraph(adj, leader)


def random_weights(rng, leader: int, trust_lo=(0.2, 1.0), distrust_hi=(0.05, 1.0),
                   split_leader: bool = True) -> WeightModel:
    """Clamped affine families with random slopes and bounds."""

    def trust():
        top = rng.uniform(*trust_lo) + rng.uniform(0, 1)
        return trust_affine(rng.uniform(0, 0.5), min(rng.uniform(*trust_lo), top), top)

    def distrust():
        hi = rng.uniform(*distrust_hi)
        return distrust_affine(rng.uniform(0, 0.3), rng.uniform(0.2, 1.0) * hi, hi)

    if split_leader and rng.random() < 0.5:
        return WeightModel(trust(), distrust(), leader, trust(), distrust())
    return WeightModel(trust(), distrust(), leader)


def random_theta(rng, n: int, leader: int, low: float = 0.05, high: float = 0.95,
                 p_zero: float = 0.0) -> AgentParams:
    th = rng.uniform(low, high, n)
    th[rng.random(n) < p_zero] = 0.0
    th[leader] = 1.0
    return AgentParams(th)


def random_schedule(rng, n: int, h: int, horizon: int) -> Schedule:
    if h == 1:
        return make_schedule(n, 1, horizon)
    return make_schedule(n, h, horizon, "random", seed=int(rng.integers(2**31)))


def random_x0(rng, n: int, leader: int, lead_abs=(0.3, 1.0), spread: float = 1.0) -> np.ndarray:
    x0 = rng.uniform(-spread, spread, n)
    x0[leader] = rng.choice((-1, 1)) * rng.uniform(*lead_abs)
    return x0


def random_scenario(rng, n_max: int = 5, h_max: int = 3, horizon: int = 50,
                    rule: Optional[str] = None) -> RandomScenario:
    """Unconstrained small scenario; DeGroot draws keep trust dominant per agent."""
    n = int(rng.integers(2, n_max + 1))
    rule = rule or ("altafini" if rng.random() < 0.5 else "degroot")
    g = random_signed_graph(rng, n, spanning=rng.random() < 0.8, p_extra=0.4)
    if rule == "degroot":
        wm = random_weights(rng, g.leader, trust_lo=(0.5, 1.0), distrust_hi=(0.01, 0.4))
        # a pure-distrust row has no valid DeGroot denominator
        adj = g.adj.copy()
        for i in g.followers:
            row = adj[i]
            if (row < 0).any() and not (row > 0).any():
                row[np.flatnonzero(row < 0)[0]] = 1
            worst = (row < 0).sum() * max(wm.bounds.distrust_hi, 1e-12)
            if (row > 0).sum() * wm.bounds.trust_lo <= worst:
                row[row < 0] = 1
        g = g.with_signs(adj)
    else:
        wm = random_weights(rng, g.leader)
    h = int(rng.integers(1, h_max + 1))
    params = random_theta(rng, n, g.leader, 0.0, 0.95, p_zero=0.1 if h == 1 else 0.0)
    return RandomScenario(g, wm, params, random_schedule(rng, n, h, horizon),
                          random_x0(rng, n, g.leader), rule)


def _t3_draw(rng, n_max, h_max, horizon):
    n = int(rng.integers(2, n_max + 1))
    g = random_signed_graph(rng, n, positive_tree=True, p_extra=0.25, p_neg=0.4,
                            max_depth=int(rng.integers(1, 3)))
    wm = random_weights(rng, g.leader, trust_lo=(0.6, 1.0), distrust_hi=(0.001, 0.05))
    params = random_theta(rng, n, g.leader, 0.3, 0.9)
    h = int(rng.integers(1, h_max + 1))
    return g, wm, params, h


def certified_scenario(rng, theorem: str, n_max: int = 7, h_max: int = 3, horizon: int = 20000,
                       max_tries: int = 10_000, zero_leader: bool = False) -> RandomScenario:
    """Draw until ``check_theorem`` certifies ``theorem``."""
    name = theorem_name(theorem)
    for _ in range(max_tries):
        if name == T3:
            g, wm, params, h = _t3_draw(rng, n_max, h_max, horizon)
            rule = "degroot"
        else:
            n = int(rng.integers(2, n_max + 1))
            g = random_signed_graph(rng, n, balanced=(name != T2), p_extra=0.3,
                                    p_neg=float(rng.uniform(0.2, 0.6)))
            wm = random_weights(rng, g.leader)
            sync = name == C1
            params = random_theta(rng, n, g.leader, 0.1, 0.9, p_zero=0.3 if sync else 0.0)
            h = 1 if sync else int(rng.integers(1, h_max + 1))
            rule = "altafini"
        sched = random_schedule(rng, g.n, h, horizon)
        cert = check_theorem(g, wm, params, sched, name)
        if cert.holds:
            x0 = random_x0(rng, g.n, g.leader)
            if zero_leader:
                x0[g.leader] = 0.0
            return RandomScenario(g, wm, params, sched, x0, rule, cert)
    raise RuntimeError(f"no {name} scenario certified in {max_tries} draws")


__all__ = ["RandomScenario", "random_signed_graph", "random_weights", "random_theta",
           "random_schedule", "random_x0", "random_scenario", "certified_scenario",
           "T1", "C1", "T2", "T3", "AffineFamily"]
