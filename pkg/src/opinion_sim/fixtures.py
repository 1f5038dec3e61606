"""Bundled example networks and scenarios.

Each fixture is an edge list plus a scenario file.  The edge list header
states which edges come from the published description of the example and
which were reconstructed here; reconstructed edges sit under a
``# reconstructed`` section.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import SignedGraph, format_edgelist

NAMES = ("angry12_g1", "angry12_g2", "karate_balanced", "karate_unbalanced", "chain3", "star_n")

# 12 Angry Men: juror 8 leads, initial opinions in [-1, 1] ("guilty" .. "not guilty")
ANGRY_X0 = (-0.9, -0.3, -1.0, -0.7, -0.45, -0.2, -0.6, 1.0, -0.05, -0.8, -0.13, -0.5)
ANGRY_LEADER = 8
ANGRY_HESITANT = (2, 5, 6, 9, 11)
ANGRY_FIRM = (1, 3, 4, 7, 10, 12)
# one trusted hesitant juror per firm juror, so every juror has a trust path from juror 8
ANGRY_RECONSTRUCTED = ((2, 1), (5, 3), (6, 4), (9, 7), (11, 10), (2, 12))

# Zachary's karate club, 1-based undirected edges
KARATE_EDGES = (
    (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (1, 8), (1, 9), (1, 11), (1, 12), (1, 13),
    (1, 14), (1, 18), (1, 20), (1, 22), (1, 32), (2, 3), (2, 4), (2, 8), (2, 14), (2, 18),
    (2, 20), (2, 22), (2, 31), (3, 4), (3, 8), (3, 9), (3, 10), (3, 14), (3, 28), (3, 29),
    (3, 33), (4, 8), (4, 13), (4, 14), (5, 7), (5, 11), (6, 7), (6, 11), (6, 17), (7, 17),
    (9, 31), (9, 33), (9, 34), (10, 34), (14, 34), (15, 33), (15, 34), (16, 33), (16, 34),
    (19, 33), (19, 34), (20, 34), (21, 33), (21, 34), (23, 33), (23, 34), (24, 26), (24, 28),
    (24, 30), (24, 33), (24, 34), (25, 26), (25, 28), (25, 32), (26, 32), (27, 30), (27, 34),
    (28, 34), (29, 32), (29, 34), (30, 33), (30, 34), (31, 33), (31, 34), (32, 33), (32, 34),
    (33, 34),
)
# faction of the supervisor (member 1) after the split
KARATE_SUPERVISOR_SIDE = frozenset((1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 12, 13, 14, 17, 18, 20, 22))
KARATE_FIXED_X0 = {1: 2.0, 34: -2.0, 5: 7.0, 33: -6.0}
KARATE_X0_SEED = 1977
KARATE_FLIP_SEED = 0
KARATE_FLIP_FRACTION = 0.25

# opinions stay in [-1, 1], so d <= 2 and the clamps never bind
ANGRY_WEIGHTS = {
    "trust": {"family": "affine-decreasing", "c": 0.1, "lo": 0.8},
    "distrust": {"family": "affine-increasing", "a": 0.02, "b": 0.06, "hi": 0.1},
    "d_max": 2.0,
}
# same families; the [-8, 8] opinion range needs a positive trust floor
KARATE_WEIGHTS = {
    "trust": {"family": "affine-decreasing", "c": 0.1, "lo": 0.1},
    "distrust": {"family": "affine-increasing", "a": 0.02, "b": 0.06, "hi": 0.7},
    "d_max": 32.0,
}


@dataclass
class Fixture:
    name: str
    graph: SignedGraph
    header: str
    sections: dict
    scenario: dict = field(default_factory=dict)

    def edgelist(self) -> str:
        return format_edgelist(self.graph, self.header, self.sections)


def _zb(edges):
    return [(s - 1, d - 1, sign) for s, d, sign in edges]


def _angry(balanced: bool) -> Fixture:
    L = ANGRY_LEADER
    to_hesitant = [(L, j, 1) for j in ANGRY_HESITANT]
    to_firm = [(L, j, -1) for j in ANGRY_FIRM]
    # in the balanced variant the reconstructed edges cross the two camps
    recon = [(s, d, -1 if balanced else 1) for s, d in ANGRY_RECONSTRUCTED]
    g = SignedGraph.from_edges(12, _zb(to_hesitant + to_firm + recon), L - 1)
    if balanced:
        header = ("12 Angry Men, structurally balanced variant.\n"
                  "Fixed by the description: juror 8 leads; nobody influences juror 8;\n"
                  "camps {2,5,6,8,9,11} and {1,3,4,7,10,12} with trust inside a camp and\n"
                  "distrust across.  Reconstructed: the follower-follower edges, one per firm\n"
                  "juror, signed by the camp rule.")
    else:
        header = ("12 Angry Men.\n"
                  "Fixed by the description: juror 8 leads and listens to nobody; jurors\n"
                  "2,5,6,9,11 trust juror 8; jurors 1,3,4,7,10,12 distrust juror 8.\n"
                  "Reconstructed: one trust edge from a hesitant juror to each firm juror,\n"
                  "giving every juror a trust path from juror 8.")
    sections = {"fixed: juror 8 -> hesitant jurors (trust)": _zb(to_hesitant),
                "fixed: juror 8 -> firm jurors (distrust)": _zb(to_firm),
                "reconstructed": _zb(recon)}
    name = "angry12_g2" if balanced else "angry12_g1"
    scenario = {
        "name": name,
        "description": "12 Angry Men, juror 8 as opinion leader",
        "network": f"{name}.edges",
        "rule": "altafini" if balanced else "degroot",
        "weights": ANGRY_WEIGHTS,
        "theta": {"default": 0.5, "agents": {str(L): 1.0}},
        "schedule": {"mode": "synchronous", "h": 1},
        "x0": {"values": list(ANGRY_X0)},
        "stop": {"tolerance": 1e-10, "horizon": 10000},
        "outputs": {"trajectory": True, "weights": [[8, 3], [8, 9]]},
    }
    return Fixture(name, g, header, sections, scenario)


def _karate_directed(signs) -> list:
    """Directed 1-based edges; the two leaders only broadcast, the coach listens to the supervisor."""
    out = []
    for u, v in KARATE_EDGES:
        for s, d in ((u, v), (v, u)):
            if d in (1, 34):
                continue
            out.append((s, d, signs(s, d)))
    return out


def _faction_sign(s, d):
    return 1 if (s in KARATE_SUPERVISOR_SIDE) == (d in KARATE_SUPERVISOR_SIDE) else -1


def karate_flips(seed: int | None = None, fraction: float | None = None) -> set:
    """Member-to-member edges whose faction sign is flipped in the unbalanced variant."""
    seed = KARATE_FLIP_SEED if seed is None else seed
    fraction = KARATE_FLIP_FRACTION if fraction is None else fraction
    cand = [(s, d) for s, d, _ in _karate_directed(_faction_sign) if s != 1]
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(cand), size=int(round(fraction * len(cand))), replace=False)
    return {cand[k] for k in sorted(pick)}


def karate_x0(seed: int | None = None) -> dict:
    seed = KARATE_X0_SEED if seed is None else seed
    x = np.random.default_rng(seed).uniform(-8, 8, 34)
    vals = {i + 1: float(x[i]) for i in range(34)}
    vals.update(KARATE_FIXED_X0)
    return vals


def _karate(balanced: bool) -> Fixture:
    flips = set() if balanced else karate_flips()

    def sign(s, d):
        return -_faction_sign(s, d) if (s, d) in flips else _faction_sign(s, d)

    body = _karate_directed(sign)
    coach = [(1, 34, -1)]
    fixed = [e for e in body if e[0] == 1]
    rest = [e for e in body if e[0] != 1]
    g = SignedGraph.from_edges(34, _zb(body + coach), 0)
    name = "karate_balanced" if balanced else "karate_unbalanced"
    common = ("Undirected friendships from Zachary's karate club; each becomes a pair of\n"
              "directed edges, except that members 1 (supervisor, leader) and 34 (coach)\n"
              "only broadcast.  Signs follow the two factions of the split: trust inside\n"
              "a faction, distrust across.  Reconstructed: the edge orientation, the\n"
              "signs, and the coach's single incoming edge 1 -> 34 (distrust) that\n"
              "keeps the coach at the opposite of the supervisor.")
    if balanced:
        header = "Karate club, structurally balanced variant.\n" + common
    else:
        header = ("Karate club, structurally unbalanced variant.\n" + common + "\n"
                  f"Then {len(flips)} member-to-member signs drawn with seed {KARATE_FLIP_SEED} "
                  "are flipped\n"
                  "(with this draw member 5 leans to the supervisor and member 33 to the coach).")
    sections = {"supervisor -> members": _zb(fixed),
                "reconstructed": _zb(rest + coach)}
    x0 = {str(k): v for k, v in KARATE_FIXED_X0.items()}
    scenario = {
        "name": name,
        "description": "Karate club with the supervisor (member 1) as opinion leader",
        "network": f"{name}.edges",
        "rule": "altafini",
        "weights": KARATE_WEIGHTS,
        "theta": {"default": 0.5, "agents": {"1": 1.0}},
        "schedule": {"mode": "synchronous", "h": 1},
        "x0": {"random": {"low": -8.0, "high": 8.0, "seed": KARATE_X0_SEED}, "values": x0},
        "stop": {"tolerance": 1e-10, "horizon": 10000},
        "outputs": {"trajectory": True, "coefficients": True},
    }
    return Fixture(name, g, header, sections, scenario)


def _chain3() -> Fixture:
    edges = [(3, 1, 1), (1, 2, 1)]
    g = SignedGraph.from_edges(3, _zb(edges), 2)
    scenario = {
        "name": "chain3", "network": "chain3.edges", "rule": "altafini",
        "weights": {"trust": {"family": "constant", "value": 1.0},
                    "distrust": {"family": "constant", "value": 1.0}},
        "theta": {"default": 0.5},
        "x0": {"values": [0.0, -1.0, 1.0]},
        "stop": {"tolerance": 1e-12, "horizon": 1000},
    }
    return Fixture("chain3", g, "Three agents in a line: 3 -> 1 -> 2, leader 3.", {}, scenario)


def _star(n: int) -> Fixture:
    if n < 2:
        raise ValueError("star_n needs n >= 2")
    edges = [(n, i, 1) for i in range(1, n)]
    g = SignedGraph.from_edges(n, _zb(edges), n - 1)
    scenario = {
        "name": f"star_{n}", "network": f"star_{n}.edges", "rule": "degroot",
        "weights": {"trust": {"family": "constant", "value": 1.0},
                    "distrust": {"family": "constant", "value": 1.0}},
        "theta": {"default": 0.5},
        "x0": {"values": [0.0] * (n - 1) + [1.0]},
        "stop": {"tolerance": 1e-12, "horizon": 1000},
    }
    return Fixture(f"star_{n}", g, f"Star: leader {n} broadcasts to agents 1..{n - 1} with trust.",
                   {}, scenario)


def build_fixture(name: str, n: int = 5) -> Fixture:
    if name == "angry12_g1":
        return _angry(False)
    if name == "angry12_g2":
        return _angry(True)
    if name == "karate_balanced":
        return _karate(True)
    if name == "karate_unbalanced":
        return _karate(False)
    if name == "chain3":
        return _chain3()
    if name == "star_n":
        return _star(n)
    raise KeyError(f"unknown fixture {name!r}; available: {', '.join(NAMES)}")


def emit_fixture(name: str, out_dir=".", n: int = 5) -> tuple[Path, Path]:
    """Write ``<name>.edges`` and ``<name>.json`` into ``out_dir``."""
    fx = build_fixture(name, n)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    edges = out / fx.scenario["network"]
    scen = out / f"{fx.name}.json"
    edges.write_text(fx.edgelist())
    scen.write_text(json.dumps(fx.scenario, indent=2) + "\n")
    return edges, scen
