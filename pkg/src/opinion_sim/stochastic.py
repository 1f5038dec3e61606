"""Row-sum classes of real square matrices and their product properties."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

GENERAL = "general-row-stochastic"
SUB = "sub-stochastic"
SUPER = "super-stochastic"

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class StochClass:
    kinds: frozenset
    deficit_rows: tuple  # rows with sum < 1 - tol

    def __contains__(self, kind):
        return kind in self.kinds

    @property
    def kind(self) -> str:
        """Single label, preferring the most specific class; ``none`` if empty."""
        for k in (GENERAL, SUB, SUPER):
            if k in self.kinds:
                return k
        return "none"


def _square(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def row_sums(m) -> np.ndarray:
    return np.asarray(m, dtype=float).sum(axis=1)


def inf_norm(m) -> float:
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.abs(m).sum(axis=1).max())


def classify(m, tol: float = DEFAULT_TOL) -> StochClass:
    m = _square(m)
    s = row_sums(m)
    nonneg = bool(np.all(m >= -tol))
    deficit = tuple(int(i) for i in np.flatnonzero(s < 1 - tol))
    kinds = set()
    if np.all(np.abs(s - 1) <= tol):
        kinds.add(GENERAL)
    if nonneg and np.all(s <= 1 + tol):
        kinds.add(SUB)
    # at least one strictly contracting row is required
    if nonneg and deficit:
        kinds.add(SUPER)
    return StochClass(frozenset(kinds), deficit)


def left_product_chain(ms) -> np.ndarray:
    """``S_q ... S_2 S_1`` for ``ms = [S_1, ..., S_q]``."""
    ms = [_square(m) for m in ms]
    if not ms:
        raise ValueError("empty chain")
    n = ms[0].shape[0]
    for k, m in enumerate(ms):
        if m.shape[0] != n:
            raise ValueError(f"matrix {k} has shape {m.shape}, expected {(n, n)}")
    return reduce(lambda acc, m: m @ acc, ms[1:], ms[0].copy())


def lemma1_bound_check(ms, tol: float = DEFAULT_TOL) -> tuple[float, bool]:
    """Largest row sum ``g`` over the chain and whether ``||prod|| <= g**q``.

    Every factor must be super-stochastic, or at least nonnegative with
    nonnegative row sums (e.g. the identity).
    """
    ms = [_square(m) for m in ms]
    for k, m in enumerate(ms):
        if SUPER not in classify(m, tol) and not np.all(m >= -tol):
            raise ValueError(f"matrix {k} is neither super-stochastic nor nonnegative")
    g = max(float(row_sums(m).max()) for m in ms)
    q = len(ms)
    return g, inf_norm(left_product_chain(ms)) <= g ** q + tol
