"""Processor connectivity graphs, spanning trees and state routing."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .circuit import ANCILLA, DistributedCircuit, Gate, QubitRef
from .errors import InsufficientAncilla, InvalidTopology, ParseError


@dataclass(frozen=True)
class Topology:
    k: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.k < 1:
            raise InvalidTopology("a topology needs at least one processor")
        norm = set()
        for e in self.edges:
            i, j = e
            if not (0 <= i < self.k and 0 <= j < self.k):
                raise InvalidTopology(f"edge {e} refers to a processor outside 0..{self.k - 1}")
            if i == j:
                raise InvalidTopology(f"self-loop on processor {i}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        comps = self.components()
        if len(comps) > 1:
            stray = comps[1]
            raise InvalidTopology(f"topology is disconnected; unreachable component {stray}")

    # constructors

    @classmethod
    def complete(cls, k: int) -> "Topology":
        return cls(k, tuple((i, j) for i in range(k) for j in range(i + 1, k)))

    @classmethod
    def path(cls, k: int) -> "Topology":
        return cls(k, tuple((i, i + 1) for i in range(k - 1)))

    @classmethod
    def star(cls, k: int, center: int = 0) -> "Topology":
        return cls(k, tuple((center, j) for j in range(k) if j != center))

    @classmethod
    def ring(cls, k: int) -> "Topology":
        if k < 3:
            return cls.path(k)
        return cls(k, tuple((i, (i + 1) % k) for i in range(k)))

    # graph queries

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.k)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return [sorted(a) for a in adj]

    def components(self) -> list[list[int]]:
        adj = [[] for _ in range(self.k)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = [False] * self.k
        comps = []
        for s in range(self.k):
            if seen[s]:
                continue
            comp, stack = [], [s]
            seen[s] = True
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_complete(self) -> bool:
        return len(self.edges) == self.k * (self.k - 1) // 2

    def is_tree(self) -> bool:
        return len(self.edges) == self.k - 1

    def bfs(self, src: int) -> tuple[list[int], list[int | None]]:
        adj = self.adjacency()
        dist = [-1] * self.k
        parent: list[int | None] = [None] * self.k
        dist[src] = 0
        q = deque([src])
        while q:
            v = q.popleft()
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    q.append(w)
        return dist, parent

    def distance(self, u: int, v: int) -> int:
        return self.bfs(u)[0][v]

    def shortest_path(self, u: int, v: int) -> list[int]:
        """Vertices from u to v inclusive; ties broken toward lower indices."""
        _, parent = self.bfs(v)
        path = [u]
        while path[-1] != v:
            path.append(parent[path[-1]])
        return path

    def diameter(self) -> int:
        return max(max(self.bfs(s)[0]) for s in range(self.k))

    def spanning_tree(self, root: int = 0) -> "Topology":
        _, parent = self.bfs(root)
        return Topology(self.k, tuple((parent[v], v) for v in range(self.k) if parent[v] is not None))

    def dfs_preorder(self, root: int = 0) -> list[int]:
        """Preorder of a depth-first traversal visiting lower-indexed neighbours first."""
        adj = self.adjacency()
        order, seen = [], set()
        stack = [root]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            order.append(v)
            stack.extend(w for w in reversed(adj[v]) if w not in seen)
        return order

    def to_dict(self) -> dict:
        return {"k": self.k, "edges": [list(e) for e in self.edges]}


def subtree_leaves(tree: Topology, alive: set[int]) -> list[int]:
    """Vertices of the induced subtree on ``alive`` with at most one alive neighbour."""
    adj = tree.adjacency()
    return sorted(v for v in alive if sum(1 for w in adj[v] if w in alive) <= 1)


def subtree_path(tree: Topology, alive: set[int], u: int, v: int) -> list[int]:
    """Path from u to v inside the alive part of a tree."""
    adj = tree.adjacency()
    parent = {v: None}
    q = deque([v])
    while q:
        x = q.popleft()
        for w in adj[x]:
            if w in alive and w not in parent:
                parent[w] = x
                q.append(w)
    if u not in parent:
        raise InvalidTopology(f"processors {u} and {v} are not connected inside {sorted(alive)}")
    path = [u]
    while path[-1] != v:
        path.append(parent[path[-1]])
    return path


def parse_topology(text: str) -> Topology:
    """Parse ``{"k": K, "edges": [[i, j], ...]}`` or lines of ``i j``.

    Text form may declare ``k K`` on its own line; otherwise k is one more than
    the largest index seen. Lines starting with ``#`` are ignored.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None
        if "edges" not in obj:
            raise ParseError("missing field", field="edges")
        edges = []
        for idx, e in enumerate(obj["edges"]):
            if not (isinstance(e, (list, tuple)) and len(e) == 2 and all(isinstance(x, int) for x in e)):
                raise ParseError(f"edge {idx} must be a pair of integers", field="edges")
            edges.append((e[0], e[1]))
        k = obj.get("k")
        if k is None:
            k = 1 + max((max(e) for e in edges), default=0)
        if not isinstance(k, int):
            raise ParseError("k must be an integer", field="k")
        return Topology(k, tuple(edges))
    edges = []
    k = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "k" and len(parts) == 2:
            try:
                k = int(parts[1])
            except ValueError:
                raise ParseError("k must be an integer", line=lineno) from None
            continue
        if len(parts) != 2:
            raise ParseError(f"expected 'i j', got {line!r}", line=lineno)
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError(f"non-integer processor index in {line!r}", line=lineno) from None
    if k is None:
        k = 1 + max((max(e) for e in edges), default=0)
    return Topology(k, tuple(edges))


def route_state(
    c: DistributedCircuit,
    src: QubitRef,
    path: Sequence[int],
    dst: QubitRef | None = None,
) -> QubitRef:
    """Move the state on ``src`` along ``path`` by SWAPs through ancilla slot 0.

    ``path`` lists processors starting with ``src.proc``. Each hop is one
    nonlocal SWAP. Intermediate ancillas end where they started; the source
    wire is left holding the |0> that the first ancilla held. Returns the wire
    now holding the state (``dst`` or ancilla slot 0 of the last processor).
    """
    path = list(path)
    if not path or path[0] != src.proc:
        raise InvalidTopology("route must start at the source processor")
    if dst is not None and dst.proc != path[-1]:
        raise InvalidTopology("route must end at the destination processor")
    if len(path) == 1:
        if dst is not None and dst != src:
            c.append(Gate.swap(src, dst))
            return dst
        return src
    cur = src
    for i, p in enumerate(path[1:], start=1):
        last = i == len(path) - 1
        nxt = dst if (last and dst is not None) else QubitRef(p, 0, ANCILLA)
        if nxt.kind == ANCILLA and c.m < 1:
            raise InsufficientAncilla(f"processor {p} has no ancilla to relay through")
        c.append(Gate.swap(cur, nxt))
        cur = nxt
    return cur


def check_adjacency(c: DistributedCircuit, topo: Topology) -> None:
    """Raise unless every nonlocal two-qubit gate joins adjacent processors."""
    edges = set(topo.edges)
    for idx, g in enumerate(c.gates):
        if g.kind == "ucr" and len(g.procs) > 1:
            raise InvalidTopology(f"gate {idx}: UCR macro spans processors")
        if g.is_nonlocal:
            a, b = sorted(g.procs)
            if (a, b) not in edges:
                raise InvalidTopology(f"gate {idx} ({g.kind}) joins non-adjacent processors {a} and {b}")
