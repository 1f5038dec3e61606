"""Signed interaction digraphs with a distinguished opinion leader.

Convention: ``adj[i, j]`` is the sign of the edge ``j -> i``, i.e. agent ``i``
listens to agent ``j``.  Nodes are 0-based inside the library; the edge-list
text format is 1-based.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class SignedGraph:
    adj: np.ndarray
    leader: int
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        adj = np.array(self.adj, dtype=np.int8, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise GraphError(f"adjacency must be square, got shape {adj.shape}")
        n = adj.shape[0]
        if not np.isin(adj, (-1, 0, 1)).all():
            raise GraphError("adjacency entries must be -1, 0 or +1")
        if np.any(np.diag(adj) != 0):
            raise GraphError("self-loops are not allowed")
        if not 0 <= self.leader < n:
            raise GraphError(f"leader index {self.leader} out of range for n={n}")
        if np.any(adj[self.leader] != 0):
            raise GraphError("the leader must not have in-neighbors")
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)
        labels = tuple(self.labels) if self.labels else tuple(range(1, n + 1))
        if len(labels) != n:
            raise GraphError("one label per node required")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, int]], leader: int,
                   labels=()) -> "SignedGraph":
        """Build from 0-based ``(src, dst, sign)`` triples."""
        adj = np.zeros((n, n), dtype=np.int8)
        for src, dst, sign in edges:
            if sign not in (-1, 1):
                raise GraphError(f"edge {src}->{dst}: sign must be +1 or -1, got {sign}")
            adj[dst, src] = sign
        return cls(adj, leader, labels)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def followers(self) -> list[int]:
        return [i for i in range(self.n) if i != self.leader]

    def in_neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adj[i])

    def trusted(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adj[i] == 1)

    def distrusted(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adj[i] == -1)

    def out_neighbors(self, j: int, positive_only: bool = False) -> np.ndarray:
        col = self.adj[:, j]
        return np.flatnonzero(col == 1) if positive_only else np.flatnonzero(col)

    def edges(self) -> list[tuple[int, int, int]]:
        """0-based ``(src, dst, sign)`` triples sorted by (dst, src)."""
        dst, src = np.nonzero(self.adj)
        return [(int(s), int(d), int(self.adj[d, s])) for d, s in zip(dst, src)]

    def with_signs(self, adj) -> "SignedGraph":
        return SignedGraph(adj, self.leader, self.labels)


@dataclass(frozen=True)
class BalancePartition:
    """``set2`` always holds the leader; ``set1`` is the opposing camp.

    A connected all-trust graph only admits ``set1 == frozenset()``; a proper
    two-camp split needs both camps non-empty, so that case is flagged ``trivial``.
    """
    set1: frozenset
    set2: frozenset

    @property
    def trivial(self) -> bool:
        return not self.set1

    def gauge(self, n: int) -> np.ndarray:
        """Diagonal of the sign flip: -1 on ``set1``, +1 elsewhere."""
        d = np.ones(n)
        d[list(self.set1)] = -1.0
        return d

    def side(self, i: int) -> int:
        return 1 if i in self.set1 else 2


@dataclass(frozen=True)
class LeaderTree:
    parent: tuple  # parent[i] is -1 for the leader
    depth: tuple   # depth[leader] == 0
    p: int
    positive_only: bool

    def path_to_leader(self, i: int) -> list[int]:
        path = [i]
        while self.parent[path[-1]] >= 0:
            path.append(self.parent[path[-1]])
        return path


@dataclass(frozen=True)
class DegreeStats:
    n_max: int
    n_plus_min: int
    n_plus_max: int
    n_minus_min: int
    n_minus_max: int


def check_structural_balance(g: SignedGraph) -> Optional[BalancePartition]:
    """Two-colour the underlying undirected graph by edge parity.

    Returns ``None`` when some cycle carries an odd number of distrust edges.
    """
    n = g.n
    # symmetric sign view; conflicting reciprocal signs are an immediate odd cycle
    sym = g.adj.astype(np.int16) + g.adj.T
    both = (g.adj != 0) & (g.adj.T != 0)
    if np.any(both & (g.adj != g.adj.T)):
        return None
    sym = np.sign(sym)

    color = np.full(n, -1, dtype=np.int8)
    order = [g.leader] + [i for i in range(n) if i != g.leader]
    for root in order:
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero(sym[u]):
                want = color[u] if sym[u, v] > 0 else 1 - color[u]
                if color[v] < 0:
                    color[v] = want
                    queue.append(v)
                elif color[v] != want:
                    return None
    set2 = frozenset(int(i) for i in np.flatnonzero(color == 0))
    set1 = frozenset(int(i) for i in np.flatnonzero(color == 1))
    return BalancePartition(set1, set2)


def find_leader_tree(g: SignedGraph, positive_only: bool = False) -> Optional[LeaderTree]:
    """Shortest-path (BFS) tree from the leader along influence direction."""
    n = g.n
    parent = [-2] * n
    depth = [-1] * n
    parent[g.leader] = -1
    depth[g.leader] = 0
    queue = deque([g.leader])
    while queue:
        u = queue.popleft()
        for v in g.out_neighbors(u, positive_only):
            if depth[v] < 0:
                depth[v] = depth[u] + 1
                parent[v] = u
                queue.append(int(v))
    if min(depth) < 0:
        return None
    p = max((depth[i] for i in g.followers), default=0)
    return LeaderTree(tuple(parent), tuple(depth), p, positive_only)


def degree_stats(g: SignedGraph) -> DegreeStats:
    f = g.followers
    if not f:
        return DegreeStats(0, 0, 0, 0, 0)
    rows = g.adj[f]
    plus = (rows == 1).sum(axis=1)
    minus = (rows == -1).sum(axis=1)
    total = plus + minus
    return DegreeStats(int(total.max()), int(plus.min()), int(plus.max()),
                       int(minus.min()), int(minus.max()))


# -- edge-list text format ---------------------------------------------------

def parse_edgelist(text: str, source: str = "<string>") -> SignedGraph:
    """Parse ``src dst sign`` lines with a ``leader <id>`` header.

    An optional ``nodes <n>`` line fixes the node count so isolated agents
    survive; otherwise n is the largest id seen.  Ids are 1-based.
    """
    leader = None
    n_decl = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        try:
            if tok[0] == "leader":
                if len(tok) != 2:
                    raise ValueError("expected 'leader <id>'")
                leader = int(tok[1])
            elif tok[0] == "nodes":
                if len(tok) != 2:
                    raise ValueError("expected 'nodes <n>'")
                n_decl = int(tok[1])
            else:
                if len(tok) != 3:
                    raise ValueError("expected 'src dst sign'")
                src, dst, sign = (int(t) for t in tok)
                if sign not in (-1, 1):
                    raise ValueError(f"sign must be +1 or -1, got {tok[2]}")
                if src < 1 or dst < 1:
                    raise ValueError("node ids are 1-based")
                edges.append((src, dst, sign))
        except ValueError as exc:
            raise GraphError(f"{source}:{lineno}: {exc}") from None
    if leader is None:
        raise GraphError(f"{source}: missing 'leader <id>' header")
    n = max([leader, n_decl or 0] + [max(s, d) for s, d, _ in edges])
    if n_decl is not None and n > n_decl:
        raise GraphError(f"{source}: node id {n} exceeds declared nodes {n_decl}")
    return SignedGraph.from_edges(n, [(s - 1, d - 1, sg) for s, d, sg in edges], leader - 1)


def read_edgelist(path) -> SignedGraph:
    path = Path(path)
    return parse_edgelist(path.read_text(), str(path))


def format_edgelist(g: SignedGraph, header: str = "", sections=None) -> str:
    """Render ``g``; ``sections`` maps a comment title to a list of edges.

    Edges not claimed by any section are written after the sections.
    """
    out = [f"# {line}" if line else "#" for line in header.splitlines()]
    out.append(f"leader {g.leader + 1}")
    out.append(f"nodes {g.n}")
    seen = set()
    for title, edges in (sections or {}).items():
        out.append(f"# {title}")
        for s, d, sign in edges:
            out.append(f"{s + 1} {d + 1} {sign:+d}")
            seen.add((s, d))
    rest = [e for e in g.edges() if (e[0], e[1]) not in seen]
    if rest and sections:
        out.append("# other")
    for s, d, sign in rest:
        out.append(f"{s + 1} {d + 1} {sign:+d}")
    return "\n".join(out) + "\n"
