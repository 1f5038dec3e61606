"""Inner simulation loops.

Two interchangeable backends: scalar loops compiled with numba, and a
vectorised numpy path.  ``OPINION_SIM_JIT=0`` selects numpy globally; numba
is also skipped when it cannot be imported.

Status codes returned by :func:`simulate`:
    0  converged (change below tol for ``window`` consecutive steps)
    1  step budget exhausted
    2  DeGroot denominator <= 0 (``bad`` = agent, ``steps`` = time)
    3  non-finite opinion (``bad`` = agent, ``steps`` = time)
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

CONVERGED, EXHAUSTED, SIGNED_DENOMINATOR, NON_FINITE = range(4)


def resolve_backend(name: str | None = None) -> str:
    if name is None:
        name = "numpy" if os.environ.get("OPINION_SIM_JIT", "1") == "0" else "numba"
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and numba is None:
        return "numpy"
    return name


def edge_classes(adj: np.ndarray, leader: int) -> np.ndarray:
    """Weight-table row per entry: 0 trust, 1 trust->leader, 2 distrust, 3 distrust->leader."""
    cls = np.where(adj < 0, 2, 0)
    cls[:, leader] += 1
    return cls.astype(np.int64)


# -- numpy ---------------------------------------------------------------------

def _simulate_np(adj, leader, table, theta, active, x0, degroot, tol, window,
                 max_steps, traj, lifted, mass_tol):
    n = x0.shape[0]
    sign = adj.astype(float)
    mask = adj != 0
    cls = edge_classes(adj, leader)
    b0, b1, lo, hi = (table[cls, k] for k in range(4))
    has_nb = mask.any(axis=1)
    has_nb[leader] = False
    x = x0.copy()
    traj[0] = x
    quiet = 0
    for t in range(max_steps):
        upd = active[t] & has_nb
        diff = np.abs(x[None, :] - x[:, None])
        w = np.where(mask, np.clip(b0 + b1 * diff, lo, hi), 0.0)
        signed = sign * w
        den = signed.sum(axis=1) if degroot else w.sum(axis=1)
        if degroot:
            bad = np.flatnonzero(upd & (den <= 0))
            if bad.size:
                return t, SIGNED_DENOMINATOR, int(bad[0])
        den = np.where(upd, den, 1.0)
        q = signed / den[:, None]
        th = np.where(upd, theta, 1.0)
        xn = th * x + (1 - th) * (q @ x)
        if lifted.shape[0]:
            qp = np.maximum(q, 0.0)
            qm = np.maximum(-q, 0.0)
            ev, od = lifted[0::2].copy(), lifted[1::2].copy()
            lifted[0::2] = th[:, None] * ev + (1 - th)[:, None] * (qp @ ev + qm @ od)
            lifted[1::2] = th[:, None] * od + (1 - th)[:, None] * (qp @ od + qm @ ev)
        if not np.isfinite(xn).all():
            return t, NON_FINITE, int(np.flatnonzero(~np.isfinite(xn))[0])
        change = np.abs(xn - x).max()
        x = xn
        traj[t + 1] = x
        quiet = quiet + 1 if change < tol else 0
        if quiet >= window and (not lifted.shape[0] or _mass_gap_np(lifted, leader) <= mass_tol):
            return t + 1, CONVERGED, -1
    return max_steps, EXHAUSTED, -1


def _mass_gap_np(lifted, leader):
    gap = np.abs(lifted[0::2].sum(axis=1) - 1.0)
    gap[leader] = 0.0
    return gap.max()


# -- numba ---------------------------------------------------------------------

def _simulate_scalar(adj, leader, table, theta, active, x0, degroot, tol, window,
                     max_steps, traj, lifted, mass_tol):
    n = x0.shape[0]
    x = x0.copy()
    xn = x0.copy()
    q = np.zeros(n)
    use_lift = lifted.shape[0] > 0
    old = lifted.copy()
    for i in range(n):
        traj[0, i] = x[i]
    quiet = 0
    for t in range(max_steps):
        if use_lift:
            old[:, :] = lifted
        for i in range(n):
            xn[i] = x[i]
            if i == leader or not active[t, i]:
                continue
            num = 0.0
            den = 0.0
            cnt = 0
            for j in range(n):
                a = adj[i, j]
                q[j] = 0.0
                if a == 0:
                    continue
                k = 1 if j == leader else 0
                if a < 0:
                    k += 2
                f = table[k, 0] + table[k, 1] * abs(x[j] - x[i])
                if f < table[k, 2]:
                    f = table[k, 2]
                if f > table[k, 3]:
                    f = table[k, 3]
                q[j] = a * f
                num += a * f * x[j]
                if degroot:
                    den += a * f
                else:
                    den += f
                cnt += 1
            if cnt == 0:
                continue
            if degroot and den <= 0.0:
                return t, 2, i
            th = theta[i]
            xn[i] = th * x[i] + (1.0 - th) * num / den
            if use_lift:
                for c in range(2):
                    ev = 0.0
                    od = 0.0
                    for j in range(n):
                        qj = q[j] / den
                        if qj > 0.0:
                            ev += qj * old[2 * j, c]
                            od += qj * old[2 * j + 1, c]
                        elif qj < 0.0:
                            ev -= qj * old[2 * j + 1, c]
                            od -= qj * old[2 * j, c]
                    lifted[2 * i, c] = th * old[2 * i, c] + (1.0 - th) * ev
                    lifted[2 * i + 1, c] = th * old[2 * i + 1, c] + (1.0 - th) * od
        change = 0.0
        for i in range(n):
            if not np.isfinite(xn[i]):
                return t, 3, i
            d = abs(xn[i] - x[i])
            if d > change:
                change = d
            x[i] = xn[i]
            traj[t + 1, i] = x[i]
        if change < tol:
            quiet += 1
        else:
            quiet = 0
        if quiet >= window:
            if not use_lift:
                return t + 1, 0, -1
            gap = 0.0
            for i in range(n):
                if i != leader:
                    g = abs(lifted[2 * i, 0] + lifted[2 * i, 1] - 1.0)
                    if g > gap:
                        gap = g
            if gap <= mass_tol:
                return t + 1, 0, -1
    return max_steps, 1, -1


if numba is not None:
    _simulate_nb = numba.njit(cache=True, nogil=True)(_simulate_scalar)
else:  # pragma: no cover
    _simulate_nb = None


def simulate(adj, leader, table, theta, active, x0, degroot=False, tol=1e-8, window=1,
             max_steps=1000, lifted=None, mass_tol=1e-9, backend=None):
    """Iterate the opinion update; returns ``(traj, steps, status, bad)``.

    ``traj`` has ``steps + 1`` rows.  When ``lifted`` (shape ``(2n, 2)``) is
    given it is propagated in place through the lifted Altafini chain, and
    convergence additionally waits for its follower rows to sum to one.
    """
    adj = np.ascontiguousarray(adj, dtype=np.int8)
    table = np.ascontiguousarray(table, dtype=np.float64)
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    active = np.ascontiguousarray(active, dtype=np.bool_)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    if active.shape[0] < max_steps:
        raise ValueError(f"schedule covers {active.shape[0]} steps, {max_steps} requested")
    if lifted is None:
        lifted = np.zeros((0, 2))
    traj = np.empty((max_steps + 1, x0.shape[0]))
    fn = _simulate_nb if resolve_backend(backend) == "numba" else _simulate_np
    steps, status, bad = fn(adj, int(leader), table, theta, active, x0, bool(degroot),
                            float(tol), int(window), int(max_steps), traj, lifted, float(mass_tol))
    return traj[:steps + 1], int(steps), int(status), int(bad)
