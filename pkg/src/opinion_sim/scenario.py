"""Declarative scenario files (JSON) and their loader.

A scenario names an edge-list file, the interaction rule, the weight
families, self-confidence levels, the activation schedule, initial opinions
and the stopping rule.  See ``SCHEMA`` below and ``docs/scenario.md``.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .analysis import T1, C1, T2, T3, theorem_name
from .dynamics import RULES, AgentParams
from .graph import GraphError, SignedGraph, read_edgelist
from .schedule import Schedule, ScheduleError, make_schedule
from .weights import AffineFamily, WeightModel, constant, default_d_max, distrust_affine, trust_affine


class ScenarioError(ValueError):
    def __init__(self, message: str, errors=()):
        self.errors = list(errors) or [message]
        super().__init__(message if not errors else message + ":\n  " + "\n  ".join(self.errors))


class ScenarioWarning(UserWarning):
    pass


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_family = {
    "oneOf": [
        {"type": "object", "additionalProperties": False,
         "required": ["family", "c", "lo"],
         "properties": {"family": {"const": "affine-decreasing"}, "c": _num, "lo": _pos,
                        "intercept": _pos}},
        {"type": "object", "additionalProperties": False,
         "required": ["family", "a", "b", "hi"],
         "properties": {"family": {"const": "affine-increasing"}, "a": _num, "b": _pos, "hi": _pos}},
        {"type": "object", "additionalProperties": False,
         "required": ["family", "value"],
         "properties": {"family": {"const": "constant"}, "value": _pos}},
        {"type": "object", "additionalProperties": False,
         "required": ["family", "intercept", "slope", "lo", "hi"],
         "properties": {"family": {"const": "affine"}, "intercept": _num, "slope": _num,
                        "lo": _pos, "hi": _pos}},
    ]
}
_agent_map = {"type": "object", "patternProperties": {"^[1-9][0-9]*$": _num},
              "additionalProperties": False}

SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "required": ["network", "rule", "weights", "theta", "x0"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "network": {"type": "string"},
        "rule": {"enum": list(RULES)},
        "weights": {
            "type": "object", "additionalProperties": False,
            "required": ["trust", "distrust"],
            "properties": {"trust": _family, "distrust": _family,
                           "trust_leader": _family, "distrust_leader": _family,
                           "d_max": _pos},
        },
        "theta": {
            "type": "object", "additionalProperties": False,
            "properties": {"default": {"type": "number", "minimum": 0, "maximum": 1},
                           "agents": _agent_map},
        },
        "schedule": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["synchronous", "random", "explicit"]},
                "h": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "times": {"type": "object", "additionalProperties": False,
                          "patternProperties": {"^[1-9][0-9]*$": {
                              "type": "array", "items": {"type": "integer", "minimum": 0}}}},
            },
        },
        "x0": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "values": {"oneOf": [{"type": "array", "items": _num}, _agent_map]},
                "random": {"type": "object", "additionalProperties": False,
                           "required": ["low", "high"],
                           "properties": {"low": _num, "high": _num,
                                          "seed": {"type": "integer", "minimum": 0}}},
            },
        },
        "stop": {
            "type": "object", "additionalProperties": False,
            "properties": {"tolerance": _pos, "horizon": {"type": "integer", "minimum": 1},
                           "outcome_tolerance": _pos},
        },
        "outputs": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "trajectory": {"type": "boolean"},
                "coefficients": {"type": "boolean"},
                "weights": {"type": "array", "items": {
                    "type": "array", "items": {"type": "integer", "minimum": 1},
                    "minItems": 2, "maxItems": 2}},
            },
        },
        "theorems": {"type": "array", "items": {"enum": [T1, C1, T2, T3, "T1", "C1", "T2", "T3"]}},
    },
}


@dataclass
class Scenario:
    name: str
    path: Optional[Path]
    graph: SignedGraph
    rule: str
    weights: WeightModel
    params: AgentParams
    schedule: Schedule
    x0: np.ndarray
    seeds: dict
    tol: float = 1e-8
    horizon: int = 100_000
    outcome_tol: float = 1e-4
    outputs: dict = field(default_factory=dict)
    theorems: tuple = ()
    warnings: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.graph.n


def default_theorems(rule: str, synchronous: bool) -> tuple:
    if rule == "degroot":
        return (T3,)
    return (T1, C1, T2) if synchronous else (T1, T2)


def _family(spec: dict) -> AffineFamily:
    kind = spec["family"]
    if kind == "affine-decreasing":
        return trust_affine(spec["c"], spec["lo"], spec.get("intercept", 1.0))
    if kind == "affine-increasing":
        return distrust_affine(spec["a"], spec["b"], spec["hi"])
    if kind == "constant":
        return constant(spec["value"])
    return AffineFamily(spec["intercept"], spec["slope"], spec["lo"], spec["hi"])


def _agent_index(key: str, n: int, what: str) -> int:
    i = int(key) - 1
    if not 0 <= i < n:
        raise ScenarioError(f"{what}: agent {key} out of range 1..{n}")
    return i


def parse_scenario(data: dict, base: Path | None = None, seed: int | None = None,
                   name: str | None = None) -> Scenario:
    """Build a :class:`Scenario` from already-decoded JSON."""
    errors = sorted(jsonschema.Draft7Validator(SCHEMA).iter_errors(data), key=lambda e: [str(p) for p in e.path])
    if errors:
        raise ScenarioError("invalid scenario",
                            ["/".join(str(p) for p in e.path) + ": " + e.message if e.path
                             else e.message for e in errors])
    base = Path(".") if base is None else base
    net = (base / data["network"]).resolve()
    if not net.is_file():
        raise ScenarioError(f"network file not found: {net}")
    try:
        g = read_edgelist(net)
    except GraphError as exc:
        raise ScenarioError(str(exc)) from exc
    n, L = g.n, g.leader
    warn = []

    w = data["weights"]
    try:
        wm = WeightModel(_family(w["trust"]), _family(w["distrust"]), L,
                         _family(w["trust_leader"]) if "trust_leader" in w else None,
                         _family(w["distrust_leader"]) if "distrust_leader" in w else None)
    except ValueError as exc:
        raise ScenarioError(f"weights: {exc}") from exc
    warn.extend(f"weights: {m}" for m in wm.monotonicity_issues())

    th = data["theta"]
    theta = np.full(n, float(th.get("default", 0.5)))
    theta[L] = 1.0
    for k, v in th.get("agents", {}).items():
        theta[_agent_index(k, n, "theta")] = float(v)
    params = AgentParams(theta)
    try:
        params.validate(L)
    except ValueError as exc:
        raise ScenarioError(f"theta: {exc}") from exc

    stop = data.get("stop", {})
    tol = float(stop.get("tolerance", 1e-8))
    horizon = int(stop.get("horizon", 100_000))
    outcome_tol = float(stop.get("outcome_tolerance", 1e-4))

    sc = data.get("schedule", {})
    mode = sc.get("mode", "synchronous")
    h = int(sc.get("h", 1))
    sched_seed = sc.get("seed", 0) if seed is None else seed
    times = None
    if mode == "explicit":
        given = sc.get("times", {})
        times = [given.get(str(i + 1), []) for i in range(n)]
    try:
        sched = make_schedule(n, h, horizon, mode, seed=sched_seed, times=times)
    except ScheduleError as exc:
        raise ScenarioError(f"schedule: {exc}") from exc
    seeds = {"schedule": sched_seed} if mode == "random" else {}

    xs = data["x0"]
    if "values" not in xs and "random" not in xs:
        raise ScenarioError("x0: give 'values', 'random', or both")
    x0 = np.zeros(n)
    if "random" in xs:
        r = xs["random"]
        x_seed = r.get("seed", 0) if seed is None else seed
        x0 = np.random.default_rng(x_seed).uniform(r["low"], r["high"], n)
        seeds["x0"] = x_seed
    vals = xs.get("values")
    if isinstance(vals, list):
        if len(vals) != n:
            raise ScenarioError(f"x0: {len(vals)} values for {n} agents")
        x0 = np.array(vals, dtype=float)
    elif isinstance(vals, dict):
        if "random" not in xs and len(vals) != n:
            raise ScenarioError(f"x0: {len(vals)} values for {n} agents and no random fill")
        for k, v in vals.items():
            x0[_agent_index(k, n, "x0")] = float(v)

    d_max = float(w.get("d_max", default_d_max(x0)))
    notes = [m for m in wm.check(d_max) if "clamped" in m]

    theorems = tuple(theorem_name(t) for t in data["theorems"]) if "theorems" in data \
        else default_theorems(data["rule"], sched.synchronous)
    for t in theorems:
        if (t == T3) != (data["rule"] == "degroot"):
            warn.append(f"theorem {t} does not describe the {data['rule']} rule")
        if t == C1 and not sched.synchronous:
            warn.append(f"theorem {t} needs a synchronous schedule")
    if not sched.synchronous and np.any(np.delete(theta, L) == 0):
        warn.append("zero self-confidence under asynchronous updates: no guarantee applies")

    outputs = {"trajectory": True, "coefficients": data["rule"] == "altafini", "weights": []}
    outputs.update(data.get("outputs", {}))
    for s, d in outputs["weights"]:
        si, di = _agent_index(str(s), n, "outputs.weights"), _agent_index(str(d), n, "outputs.weights")
        if g.adj[di, si] == 0:
            raise ScenarioError(f"outputs.weights: {s} -> {d} is not an edge")

    for m in warn:
        warnings.warn(m, ScenarioWarning, stacklevel=3)
    return Scenario(name or data.get("name", "scenario"), None, g, data["rule"], wm, params, sched,
                    x0, seeds, tol, horizon, outcome_tol, outputs, theorems, warn, notes, data)


def load_scenario(path, seed: int | None = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: top level must be a JSON object")
    s = parse_scenario(data, path.parent, seed, data.get("name", path.stem))
    s.path = path
    return s
