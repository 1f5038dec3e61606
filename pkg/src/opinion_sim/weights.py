"""Opinion-difference dependent trust/distrust levels.

Each of the four edge classes (trust/distrust, toward a follower/toward the
leader) gets one clamped affine family ``clip(intercept + slope * d, lo, hi)``.
The clamp interval doubles as the declared bound pair, so the bounds hold
for every ``d`` and not only on the sampled domain.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TRUST, TRUST_LEADER, DISTRUST, DISTRUST_LEADER = range(4)
CLASS_NAMES = ("trust", "trust_leader", "distrust", "distrust_leader")


@dataclass(frozen=True)
class AffineFamily:
    intercept: float
    slope: float
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo > 0:
            raise ValueError(f"weight lower bound must be positive, got {self.lo}")
        if self.hi < self.lo:
            raise ValueError(f"empty weight range [{self.lo}, {self.hi}]")

    def __call__(self, d):
        return np.clip(self.intercept + self.slope * np.asarray(d, dtype=float), self.lo, self.hi)

    def raw(self, d):
        return self.intercept + self.slope * d

    def as_row(self) -> list[float]:
        return [self.intercept, self.slope, self.lo, self.hi]


def trust_affine(c: float, lo: float, intercept: float = 1.0) -> AffineFamily:
    """``intercept - c*d`` floored at ``lo``."""
    return AffineFamily(intercept, -c, lo, intercept)


def distrust_affine(a: float, b: float, hi: float) -> AffineFamily:
    """``a*d + b`` capped at ``hi``."""
    return AffineFamily(b, a, b, hi)


def constant(value: float) -> AffineFamily:
    return AffineFamily(value, 0.0, value, value)


@dataclass(frozen=True)
class WeightBounds:
    alpha_lo: float
    alpha_hi: float
    beta_lo: float
    beta_hi: float
    iota_lo: float
    iota_hi: float
    kappa_lo: float
    kappa_hi: float

    @property
    def lows(self):
        return (self.alpha_lo, self.beta_lo, self.iota_lo, self.kappa_lo)

    @property
    def highs(self):
        return (self.alpha_hi, self.beta_hi, self.iota_hi, self.kappa_hi)

    @property
    def trust_lo(self) -> float:
        return min(self.alpha_lo, self.beta_lo)

    @property
    def distrust_hi(self) -> float:
        return max(self.iota_hi, self.kappa_hi)


class WeightModel:
    """Trust/distrust functions for one signed network.

    ``families`` is indexed by the class constants; the leader index decides
    whether a neighbour falls in the ``*_leader`` class.
    """

    def __init__(self, trust: AffineFamily, distrust: AffineFamily, leader: int,
                 trust_leader: AffineFamily | None = None,
                 distrust_leader: AffineFamily | None = None):
        self.families = (trust, trust_leader or trust, distrust, distrust_leader or distrust)
        self.leader = leader
        self.table = np.array([f.as_row() for f in self.families], dtype=float)
        self.table.setflags(write=False)

    def __repr__(self):
        return f"WeightModel({', '.join(f'{k}={f}' for k, f in zip(CLASS_NAMES, self.families))})"

    def trust_fn(self, i: int, j: int, d):
        return self.families[TRUST_LEADER if j == self.leader else TRUST](d)

    def distrust_fn(self, i: int, j: int, d):
        return self.families[DISTRUST_LEADER if j == self.leader else DISTRUST](d)

    @property
    def bounds(self) -> WeightBounds:
        t, tl, ds, dl = self.families
        return WeightBounds(t.lo, t.hi, tl.lo, tl.hi, ds.lo, ds.hi, dl.lo, dl.hi)

    def with_leader(self, leader: int) -> "WeightModel":
        t, tl, ds, dl = self.families
        return WeightModel(t, ds, leader, tl, dl)

    def monotonicity_issues(self) -> list[str]:
        issues = []
        for k, (name, fam) in enumerate(zip(CLASS_NAMES, self.families)):
            if k in (TRUST, TRUST_LEADER) and fam.slope > 0:
                issues.append(f"{name}: slope {fam.slope} makes trust increase with opinion difference")
            if k in (DISTRUST, DISTRUST_LEADER) and fam.slope < 0:
                issues.append(f"{name}: slope {fam.slope} makes distrust decrease with opinion difference")
        return issues

    def check(self, d_max: float, samples: int = 65) -> list[str]:
        """Problems with the families on ``[0, d_max]``; empty when all is well.

        Reports wrong monotonicity and places where the clamp is active, i.e.
        where the declared bounds cut the raw affine form.
        """
        issues = self.monotonicity_issues()
        d = np.linspace(0.0, d_max, samples)
        for name, fam in zip(CLASS_NAMES, self.families):
            raw = fam.raw(d)
            bad = (raw < fam.lo - 1e-12) | (raw > fam.hi + 1e-12)
            if bad.any():
                issues.append(f"{name}: affine form leaves [{fam.lo}, {fam.hi}] for d >= "
                              f"{d[np.argmax(bad)]:.4g} (clamped)")
        return issues


def default_d_max(x0, safety: float = 2.0) -> float:
    x0 = np.asarray(x0, dtype=float)
    return safety * float(x0.max() - x0.min()) if x0.size else 0.0
