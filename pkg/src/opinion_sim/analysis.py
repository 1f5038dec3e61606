"""Sufficient-condition certificates and outcome classification."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .dynamics import AgentParams, SimulationError
from .graph import (BalancePartition, DegreeStats, LeaderTree, SignedGraph,
                    check_structural_balance, degree_stats, find_leader_tree)
from .schedule import Schedule
from .stochastic import inf_norm, left_product_chain
from .weights import WeightBounds, WeightModel

T1 = "T1-polarization"
C1 = "C1-sync-polarization"
T2 = "T2-convex"
T3 = "T3-consensus"
THEOREMS = (T1, C1, T2, T3)
_ALIASES = {"T1": T1, "C1": C1, "T2": T2, "T3": T3}

CONSENSUS = "consensus"
POLARIZATION = "polarization"
CONVEX_MIXTURE = "convex-mixture"
NON_CONVERGED = "non-converged"


class TheoremInapplicable(ValueError):
    pass


class DenominatorConditionFailed(ValueError):
    pass


class ConvergenceError(SimulationError):
    pass


def theorem_name(which: str) -> str:
    name = _ALIASES.get(which, which)
    if name not in THEOREMS:
        raise ValueError(f"unknown theorem {which!r}; expected one of {THEOREMS}")
    return name


@dataclass(frozen=True)
class Certificate:
    theorem: str
    holds: bool
    partition: Optional[BalancePartition] = None
    tree: Optional[LeaderTree] = None
    p: Optional[int] = None
    h: int = 1
    epsilon: Optional[float] = None
    l: Optional[float] = None
    sigma: Optional[float] = None
    condition_value: Optional[float] = None
    diagnostics: tuple = ()

    def expected_outcome(self, x_leader0: float) -> Optional[str]:
        """Outcome kind the theorem predicts, or None when it does not hold."""
        if not self.holds:
            return None
        if x_leader0 == 0 or self.theorem == T3:
            return CONSENSUS
        if self.partition is not None:
            return CONSENSUS if self.partition.trivial else POLARIZATION
        return CONVEX_MIXTURE

    @property
    def window(self) -> Optional[int]:
        return None if self.p is None else self.p * self.h

    def to_dict(self) -> dict:
        part = None
        if self.partition is not None:
            part = {"set1": sorted(i + 1 for i in self.partition.set1),
                    "set2": sorted(i + 1 for i in self.partition.set2),
                    "trivial": self.partition.trivial}
        return {"theorem": self.theorem, "holds": self.holds, "p": self.p, "h": self.h,
                "epsilon": self.epsilon, "l": self.l, "sigma": self.sigma,
                "condition_value": self.condition_value, "partition": part,
                "diagnostics": list(self.diagnostics)}


@dataclass(frozen=True)
class Outcome:
    kind: str
    residual: float
    per_agent_limit: np.ndarray
    value: Optional[float] = None
    partition: Optional[BalancePartition] = None


@dataclass(frozen=True)
class ConvexCoefficients:
    """``c1[i]``, ``c2[i]`` weight the leader's opinion and its negation.

    Arrays cover all agents; the leader's own entry is ``(1, 0)``.
    """
    c1: np.ndarray
    c2: np.ndarray
    steps: int
    trajectory: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class WindowReport:
    start: int
    norm: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.norm <= self.bound + 1e-9


def compute_epsilon(params: AgentParams, wm: WeightModel, stats: DegreeStats) -> float:
    th_min, th_max = params.follower_range(wm.leader)
    if th_min <= 0:
        raise TheoremInapplicable("theorem-1-inapplicable: some follower has zero self-confidence")
    b = wm.bounds
    if stats.n_max == 0:
        return th_min
    return min(th_min, (1 - th_max) * min(b.lows) / (max(b.highs) * stats.n_max))


def compute_l_sigma(params: AgentParams, wm: WeightModel, stats: DegreeStats) -> tuple[float, float]:
    th_min, th_max = params.follower_range(wm.leader)
    b: WeightBounds = wm.bounds
    trust, distrust = b.trust_lo, b.distrust_hi
    margin = stats.n_plus_min * trust - stats.n_minus_max * distrust
    if margin <= 0:
        raise DenominatorConditionFailed(
            f"denominator-condition-failed: |N+min|*min(alpha,beta) = {stats.n_plus_min * trust:.6g}"
            f" <= |N-max|*max(iota,kappa) = {stats.n_minus_max * distrust:.6g}")
    l = 1 + 2 * (1 - th_min) * stats.n_minus_max * distrust / margin
    sigma = min(th_min, (1 - th_max) * trust
                / (stats.n_plus_max * trust - stats.n_minus_min * distrust))
    return l, sigma


def check_theorem(g: SignedGraph, wm: WeightModel, params: AgentParams, sched: Schedule,
                  which: str) -> Certificate:
    """Evaluate every hypothesis of ``which``; failures land in ``diagnostics``."""
    name = theorem_name(which)
    diag = []
    h = 1 if sched.synchronous else sched.h
    stats = degree_stats(g)
    th_min, _ = params.follower_range(g.leader) if g.followers else (1.0, 1.0)
    diag.extend(wm.monotonicity_issues())

    partition = check_structural_balance(g)
    if name in (T1, C1) and partition is None:
        diag.append("network is not structurally balanced")

    tree = find_leader_tree(g, positive_only=(name == T3))
    if tree is None:
        diag.append("no spanning tree rooted at the leader"
                    + (" using trust edges only" if name == T3 else ""))
    p = tree.p if tree is not None else None

    if name == C1 and not sched.synchronous:
        diag.append("schedule is not synchronous")
    if name in (T1, T2) and th_min == 0:
        diag.append("some follower has zero self-confidence")

    epsilon = l = sigma = cond = None
    if th_min > 0 and name != T3:
        epsilon = compute_epsilon(params, wm, stats)
        if p is not None:
            cond = 1 - epsilon ** (p * h)
    if name == T3:
        try:
            l, sigma = compute_l_sigma(params, wm, stats)
        except DenominatorConditionFailed as exc:
            diag.append(str(exc))
        else:
            if p is not None:
                cond = l ** (p * h) - sigma ** (p * h)
                if not cond < 1:
                    diag.append(f"l^(ph) - sigma^(ph) = {cond:.6g} is not below 1 "
                                f"(l={l:.6g}, sigma={sigma:.6g}, p={p}, h={h})")
    return Certificate(name, not diag, partition, tree, p, h, epsilon, l, sigma, cond, tuple(diag))


def classify_outcome(traj, g: SignedGraph, x_leader0: float,
                     partition: Optional[BalancePartition] = None, tol: float = 1e-4) -> Outcome:
    """Kind of limit reached by ``traj`` (judged on its last row).

    ``partition`` defaults to the structural-balance split of ``g``; on an
    unbalanced graph no outcome is called a polarization.
    """
    traj = np.atleast_2d(np.asarray(traj, dtype=float))
    x = traj[-1]
    residual = float(np.abs(traj[-1] - traj[-2]).max()) if len(traj) > 1 else 0.0
    if residual > tol:
        return Outcome(NON_CONVERGED, residual, x)
    near = np.abs(x - x_leader0) <= tol
    if near.all():
        return Outcome(CONSENSUS, residual, x, value=float(x_leader0))
    far = np.abs(x + x_leader0) <= tol
    if partition is None:
        # polarization is only meaningful along a structural-balance split
        partition = check_structural_balance(g)
    if partition is not None:
        s1, s2 = sorted(partition.set1), sorted(partition.set2)
        if s1 and near[s2].all() and far[s1].all():
            return Outcome(POLARIZATION, residual, x, float(x_leader0), partition)
    if np.all(np.abs(x) <= abs(x_leader0) + tol):
        return Outcome(CONVEX_MIXTURE, residual, x)
    return Outcome(NON_CONVERGED, residual, x)


def convex_coefficients(g: SignedGraph, wm: WeightModel, params: AgentParams, sched: Schedule,
                        x0, horizon: Optional[int] = None, tol: float = 1e-12,
                        mass_tol: float = 1e-9, backend=None) -> ConvexCoefficients:
    """Limits of the two leader columns of the lifted transition product.

    The columns are pushed forward as two vectors alongside the Altafini run,
    so the product itself is never formed.
    """
    n, L = g.n, g.leader
    params.validate(L)
    horizon = sched.horizon + 1 if horizon is None else int(horizon)
    lifted = np.zeros((2 * n, 2))
    lifted[2 * L, 0] = 1.0
    lifted[2 * L + 1, 1] = 1.0
    traj, steps, status, bad = kernels.simulate(
        g.adj, L, wm.table, params.theta, sched.active, np.asarray(x0, dtype=float),
        degroot=False, tol=tol, window=sched.h, max_steps=horizon, lifted=lifted,
        mass_tol=mass_tol, backend=backend)
    if status == kernels.NON_FINITE:
        raise SimulationError(f"opinion of agent {bad + 1} became non-finite at t={steps}")
    c1, c2 = lifted[0::2, 0].copy(), lifted[0::2, 1].copy()
    gap = np.abs(np.delete(c1 + c2, L) - 1).max() if n > 1 else 0.0
    if status != kernels.CONVERGED and gap > mass_tol:
        raise ConvergenceError(f"convex coefficients not settled after {steps} steps "
                               f"(|c1 + c2 - 1| up to {gap:.3g})")
    return ConvexCoefficients(c1, c2, steps, traj)


def decay_bound_audit(blocks, bound: float, window: int, absolute: bool = False) -> list[WindowReport]:
    """Infinity norm of each complete ``window``-step product of ``blocks``.

    ``blocks`` are the follower blocks of consecutive transition matrices
    (``Psi(t)`` for the polarization bound, ``Phi(t)`` with ``absolute=True``
    for the consensus bound).  A trailing partial window is ignored.
    """
    blocks = list(blocks)
    if not blocks:
        raise ValueError("no snapshots to audit")
    if window < 1:
        raise ValueError("window must be positive")
    reports = []
    for start in range(0, len(blocks) - window + 1, window):
        chunk = blocks[start:start + window]
        if absolute:
            chunk = [np.abs(b) for b in chunk]
        reports.append(WindowReport(start, inf_norm(left_product_chain(chunk)), bound))
    return reports


def polarization_bound(cert: Certificate) -> float:
    return 1 - cert.epsilon ** cert.window


def consensus_bound(cert: Certificate) -> float:
    return cert.l ** cert.window - cert.sigma ** cert.window
