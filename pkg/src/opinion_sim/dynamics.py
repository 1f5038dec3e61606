"""Leader-follower opinion updates under the two interaction rules.

``altafini`` normalises by the total weight (signed averages whose absolute
row sums are one); ``degroot`` normalises by the signed weight sum, so rows
sum to one but may hold negative entries.

The per-agent functions here (:func:`step`, the matrix builders) are the
readable reference path.  :func:`run` delegates the time loop to
:mod:`opinion_sim.kernels`.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .graph import BalancePartition, SignedGraph
from .schedule import Schedule
from .weights import DISTRUST, DISTRUST_LEADER, TRUST, TRUST_LEADER, WeightModel

log = logging.getLogger(__name__)

RULES = ("altafini", "degroot")
KINDS = ("altafini-gauged", "degroot", "lifted")


class SimulationError(RuntimeError):
    pass


class SignedDenominatorError(SimulationError):
    """Signed weight sum of an active agent is not positive (DeGroot rule)."""

    def __init__(self, agent: int, t: Optional[int] = None):
        self.agent = agent
        self.t = t
        when = "" if t is None else f" at t={t}"
        super().__init__(f"signed-denominator: agent {agent + 1}{when} has non-positive "
                         "signed weight sum; trust does not dominate distrust")


@dataclass(frozen=True)
class AgentParams:
    theta: np.ndarray

    def __post_init__(self):
        th = np.array(self.theta, dtype=float, copy=True)
        th.setflags(write=False)
        object.__setattr__(self, "theta", th)

    @classmethod
    def uniform(cls, n: int, leader: int, value: float) -> "AgentParams":
        th = np.full(n, float(value))
        th[leader] = 1.0
        return cls(th)

    def validate(self, leader: int):
        th = self.theta
        if th[leader] != 1.0:
            raise ValueError(f"leader self-confidence must be 1, got {th[leader]}")
        f = np.delete(th, leader)
        if np.any((f < 0) | (f >= 1)):
            raise ValueError("follower self-confidence must lie in [0, 1)")

    def follower_range(self, leader: int) -> tuple[float, float]:
        f = np.delete(self.theta, leader)
        return float(f.min()), float(f.max())


@dataclass
class SimulationState:
    t: int
    x: np.ndarray
    trajectory: list = field(default_factory=list)


@dataclass(frozen=True)
class SystemMatrices:
    kind: str
    matrix: np.ndarray
    follower_block: np.ndarray


@dataclass
class RunResult:
    trajectory: np.ndarray
    steps: int
    converged: bool
    residual: float

    @property
    def x(self) -> np.ndarray:
        return self.trajectory[-1]


def eval_weight(wm: WeightModel, g: SignedGraph, i: int, j: int, xi: float, xj: float) -> float:
    a = g.adj[i, j]
    if a == 0:
        raise ValueError(f"{j + 1} -> {i + 1} is not an edge")
    d = abs(xj - xi)
    return float(wm.trust_fn(i, j, d) if a > 0 else wm.distrust_fn(i, j, d))


def snapshot_graph(g: SignedGraph, sched: Schedule, t: int) -> SignedGraph:
    """Keep the rows of agents active at ``t``; everyone else listens to nobody."""
    adj = np.where(sched.active[t][:, None], g.adj, 0)
    return g.with_signs(adj)


def _weights(gt: SignedGraph, wm: WeightModel, x) -> np.ndarray:
    """Edge weights ``f_ij`` for every edge of ``gt`` (zero elsewhere)."""
    x = np.asarray(x, dtype=float)
    d = np.abs(x[None, :] - x[:, None])
    to_leader = np.zeros(gt.n, dtype=bool)
    to_leader[wm.leader] = True
    w = np.zeros((gt.n, gt.n))
    for sign, lead, fam in ((1, False, wm.families[TRUST]), (1, True, wm.families[TRUST_LEADER]),
                            (-1, False, wm.families[DISTRUST]), (-1, True, wm.families[DISTRUST_LEADER])):
        sel = (gt.adj == sign) & (to_leader[None, :] == lead)
        w[sel] = fam(d[sel])
    return w


def build_q_matrix(gt: SignedGraph, wm: WeightModel, x) -> np.ndarray:
    w = _weights(gt, wm, x)
    q = np.zeros_like(w)
    tot = w.sum(axis=1)
    for i in np.flatnonzero(tot > 0):
        q[i] = gt.adj[i] * w[i] / tot[i]
    return q


def build_p_matrix(gt: SignedGraph, wm: WeightModel, x, t: Optional[int] = None) -> np.ndarray:
    w = _weights(gt, wm, x)
    signed = gt.adj * w
    p = np.zeros_like(w)
    for i in range(gt.n):
        if not gt.adj[i].any():
            continue
        den = signed[i].sum()
        if den <= 0:
            raise SignedDenominatorError(i, t)
        p[i] = signed[i] / den
    return p


def _effective_theta(gt: SignedGraph, params: AgentParams) -> np.ndarray:
    """theta_i(t): the agent's own value when it listens to someone, else 1."""
    return np.where(gt.adj.any(axis=1), params.theta, 1.0)


def step(state: SimulationState, g: SignedGraph, wm: WeightModel, sched: Schedule,
         params: AgentParams, rule: str) -> SimulationState:
    """One scalar update of every active follower."""
    t, x = state.t, state.x
    active = sched.active[t]
    xn = x.copy()
    for i in g.followers:
        if not active[i]:
            continue
        nbrs = g.in_neighbors(i)
        if nbrs.size == 0:
            continue
        f = np.array([eval_weight(wm, g, i, j, x[i], x[j]) for j in nbrs])
        a = g.adj[i, nbrs]
        den = f.sum() if rule == "altafini" else (a * f).sum()
        if rule == "degroot" and den <= 0:
            raise SignedDenominatorError(i, t)
        u = (a * f * x[nbrs]).sum() / den
        xn[i] = params.theta[i] * x[i] + (1 - params.theta[i]) * u
    return SimulationState(t + 1, xn, state.trajectory + [xn])


def _drop(m: np.ndarray, idx) -> np.ndarray:
    keep = np.setdiff1d(np.arange(m.shape[0]), idx)
    return m[np.ix_(keep, keep)]


def build_system_matrices(gt: SignedGraph, wm: WeightModel, x, params: AgentParams, kind: str,
                          partition: Optional[BalancePartition] = None,
                          t: Optional[int] = None) -> SystemMatrices:
    """State-transition matrix of one step for the snapshot graph ``gt``.

    altafini-gauged
        acts on ``D x`` where ``D`` flips the sign of the camp opposing the
        leader: ``theta + (1 - theta) |Q|``.
    degroot
        acts on ``x``: ``theta + (1 - theta) P``.
    lifted
        acts on ``(x_1, -x_1, ..., x_n, -x_n)``; negative ``q_ij`` swap the
        pair of source columns.
    """
    n, L = gt.n, gt.leader
    th = _effective_theta(gt, params)
    if kind == "altafini-gauged":
        if partition is None:
            raise ValueError("altafini-gauged matrices need a balance partition")
        m = np.diag(th) + (1 - th)[:, None] * np.abs(build_q_matrix(gt, wm, x))
        return SystemMatrices(kind, m, _drop(m, [L]))
    if kind == "degroot":
        m = np.diag(th) + (1 - th)[:, None] * build_p_matrix(gt, wm, x, t)
        return SystemMatrices(kind, m, _drop(m, [L]))
    if kind == "lifted":
        q = build_q_matrix(gt, wm, x)
        N = np.zeros((2 * n, 2 * n))
        qp, qm = np.maximum(q, 0), np.maximum(-q, 0)
        N[0::2, 0::2] = qp
        N[1::2, 1::2] = qp
        N[0::2, 1::2] = qm
        N[1::2, 0::2] = qm
        th2 = np.repeat(th, 2)
        m = np.diag(th2) + (1 - th2)[:, None] * N
        return SystemMatrices(kind, m, _drop(m, [2 * L, 2 * L + 1]))
    raise ValueError(f"unknown system-matrix kind {kind!r}")


def system_matrix_chain(g: SignedGraph, wm: WeightModel, sched: Schedule, params: AgentParams,
                        trajectory, kind: str, partition=None):
    """Matrices for every step of a recorded trajectory."""
    return [build_system_matrices(snapshot_graph(g, sched, t), wm, trajectory[t], params, kind,
                                  partition, t)
            for t in range(len(trajectory) - 1)]


def run(g: SignedGraph, wm: WeightModel, sched: Schedule, params: AgentParams, rule: str, x0,
        tol: float = 1e-8, horizon: Optional[int] = None, backend: Optional[str] = None) -> RunResult:
    """Iterate until the largest change stays below ``tol`` for ``h`` steps, or ``horizon``."""
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (g.n,):
        raise ValueError(f"x0 has shape {x0.shape}, expected ({g.n},)")
    if not np.isfinite(x0).all():
        raise SimulationError("initial opinions must be finite")
    if sched.n != g.n:
        raise ValueError("schedule and graph disagree on the number of agents")
    params.validate(g.leader)
    if not sched.synchronous and np.any(np.delete(params.theta, g.leader) == 0):
        warnings.warn("zero self-confidence under asynchronous updates: no polarization "
                      "or consensus guarantee applies", stacklevel=2)
    horizon = sched.horizon + 1 if horizon is None else int(horizon)
    if horizon > sched.horizon + 1:
        raise ValueError(f"horizon {horizon} exceeds schedule coverage ({sched.horizon + 1} steps)")
    traj, steps, status, bad = kernels.simulate(
        g.adj, g.leader, wm.table, params.theta, sched.active, x0,
        degroot=(rule == "degroot"), tol=tol, window=sched.h, max_steps=horizon, backend=backend)
    if status == kernels.SIGNED_DENOMINATOR:
        raise SignedDenominatorError(bad, steps)
    if status == kernels.NON_FINITE:
        raise SimulationError(f"opinion of agent {bad + 1} became non-finite at t={steps}")
    residual = float(np.abs(traj[-1] - traj[-2]).max()) if len(traj) > 1 else 0.0
    log.debug("run: rule=%s steps=%d status=%d residual=%.3g", rule, steps, status, residual)
    return RunResult(traj, steps, status == kernels.CONVERGED, residual)
