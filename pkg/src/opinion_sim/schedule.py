"""Asynchronous activation schedules with bounded inter-activation gaps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class Schedule:
    active: np.ndarray  # bool, shape (horizon + 1, n); active[t, i] iff t in {s_k^i}
    h: int

    def __post_init__(self):
        a = np.array(self.active, dtype=bool, copy=True)
        a.setflags(write=False)
        object.__setattr__(self, "active", a)

    @property
    def horizon(self) -> int:
        return self.active.shape[0] - 1

    @property
    def n(self) -> int:
        return self.active.shape[1]

    @property
    def synchronous(self) -> bool:
        return bool(self.active.all())

    def activations(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.active[:, i])

    def is_active(self, i: int, t: int) -> bool:
        return bool(self.active[t, i])


def _validate(active: np.ndarray, h: int):
    horizon = active.shape[0] - 1
    for i in range(active.shape[1]):
        times = np.flatnonzero(active[:, i])
        if times.size == 0 or times[0] != 0:
            raise ScheduleError(f"agent {i + 1} is not active at time 0")
        gaps = np.diff(np.append(times, horizon + 1)) if times[-1] < horizon else np.diff(times)
        # the open tail counts as a gap: the next activation must fall inside h
        if gaps.size and gaps.max() > h:
            k = int(np.argmax(gaps))
            raise ScheduleError(
                f"agent {i + 1}: gap {int(gaps[k])} after t={int(times[k])} exceeds h={h}")


def make_schedule(n: int, h: int, horizon: int, mode: str = "synchronous",
                  seed: int | None = None, times=None) -> Schedule:
    """Build a schedule covering ``t = 0..horizon``.

    ``mode`` is ``synchronous`` (everyone always, h forced to 1), ``random``
    (each next activation drawn uniformly from ``s+1..s+h``) or ``explicit``
    (``times`` is one sorted iterable of activation times per agent).
    """
    if h < 1 or horizon < 1:
        raise ScheduleError("h and horizon must be positive")
    if mode == "synchronous":
        return Schedule(np.ones((horizon + 1, n), dtype=bool), 1)
    if mode == "random":
        rng = np.random.default_rng(seed)
        active = np.zeros((horizon + 1, n), dtype=bool)
        for i in range(n):
            s = 0
            while s <= horizon:
                active[s, i] = True
                s += int(rng.integers(1, h + 1))
        return Schedule(active, h)
    if mode == "explicit":
        if times is None or len(times) != n:
            raise ScheduleError("explicit mode needs one time list per agent")
        active = np.zeros((horizon + 1, n), dtype=bool)
        for i, ts in enumerate(times):
            ts = [int(t) for t in ts if int(t) <= horizon]
            if sorted(set(ts)) != ts:
                raise ScheduleError(f"agent {i + 1}: activation times must be strictly increasing")
            active[ts, i] = True
        _validate(active, h)
        return Schedule(active, h)
    raise ScheduleError(f"unknown schedule mode {mode!r}")
