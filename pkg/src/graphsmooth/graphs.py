"""Construction, surgery and serialization of simple connected graphs.

Vertices are labelled 1..n. Edges are stored once as (u, v) pairs with
u < v. All constructors validate the result (simple, connected), so a
``Graph`` instance can be assumed well-formed everywhere downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class GraphError(ValueError):
    """Invalid graph construction or surgery request."""


class EdgeListParseError(GraphError):
    """Malformed or invalid edge-list file; message carries the line number."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected connected graph on vertices 1..n."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"graph needs at least one vertex, got n={self.n}")
        seen = set()
        for u, v in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise GraphError(f"edge ({u},{v}) out of range 1..{self.n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if u > v:
                raise GraphError(f"edge ({u},{v}) not in canonical u < v order")
            if (u, v) in seen:
                raise GraphError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
        if tuple(sorted(self.edges)) != self.edges:
            object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        if not _is_connected(self.n, self.edges):
            raise GraphError("graph is not connected")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        """Degree of each vertex, index 0 holding vertex 1."""
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u - 1] += 1
            deg[v - 1] += 1
        return deg

    def has_edge(self, u: int, v: int) -> bool:
        a, b = min(u, v), max(u, v)
        return (a, b) in set(self.edges)


def _adjacency_lists(n: int, edges) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n + 1)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _is_connected(n: int, edges) -> bool:
    return len(_component_of(1, _adjacency_lists(n, edges))) == n


def _component_of(start: int, adj: list[list[int]]) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _components(n: int, edges) -> list[set[int]]:
    adj = _adjacency_lists(n, edges)
    remaining = set(range(1, n + 1))
    comps = []
    while remaining:
        comp = _component_of(min(remaining), adj)
        comps.append(comp)
        remaining -= comp
    return comps


def _relabel_to_contiguous(vertices: set[int], edges) -> Graph:
    """Restrict to the given vertex set and relabel 1..n' preserving order."""
    order = sorted(vertices)
    new_id = {v: i + 1 for i, v in enumerate(order)}
    kept = []
    for u, v in edges:
        if u in vertices and v in vertices:
            a, b = new_id[u], new_id[v]
            kept.append((min(a, b), max(a, b)))
    return Graph(len(order), tuple(sorted(kept)))


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def make_path(n: int) -> Graph:
    """Path graph 1-2-...-n."""
    if n < 2:
        raise GraphError(f"path graph needs n >= 2, got {n}")
    return Graph(n, tuple((i, i + 1) for i in range(1, n)))


def make_ring(n: int) -> Graph:
    """Cycle graph on n vertices."""
    if n < 3:
        raise GraphError(f"ring graph needs n >= 3, got {n}")
    edges = [(i, i + 1) for i in range(1, n)] + [(1, n)]
    return Graph(n, tuple(sorted(edges)))


def make_complete(m: int) -> Graph:
    """Complete graph K_m."""
    if m < 2:
        raise GraphError(f"complete graph needs m >= 2, got {m}")
    return Graph(m, tuple((u, v) for u in range(1, m) for v in range(u + 1, m + 1)))


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """Cartesian product of two graphs, relabelled row-major to 1..n*m.

    Vertex (a, b) of the product maps to label (a-1)*h.n + b; (a, b) and
    (a', b') are adjacent iff a = a' and b ~ b', or b = b' and a ~ a'.
    """
    m = h.n
    label = lambda a, b: (a - 1) * m + b
    edges = []
    for a in range(1, g.n + 1):
        for (b1, b2) in h.edges:
            edges.append((label(a, b1), label(a, b2)))
    for (a1, a2) in g.edges:
        for b in range(1, m + 1):
            edges.append((label(a1, b), label(a2, b)))
    edges = [(min(u, v), max(u, v)) for u, v in edges]
    return Graph(g.n * m, tuple(sorted(edges)))


def make_grid(d: int, side: int) -> Graph:
    """d-dimensional grid: Cartesian product of d path graphs with `side` vertices."""
    if d < 1:
        raise GraphError(f"grid dimension must be >= 1, got {d}")
    g = make_path(side)
    for _ in range(d - 1):
        g = cartesian_product(g, make_path(side))
    return g


def make_torus(d: int, side: int) -> Graph:
    """d-dimensional discrete torus: Cartesian product of d ring graphs."""
    if d < 1:
        raise GraphError(f"torus dimension must be >= 1, got {d}")
    g = make_ring(side)
    for _ in range(d - 1):
        g = cartesian_product(g, make_ring(side))
    return g


def make_ladder(n: int) -> Graph:
    """Ladder graph on n vertices: path(n/2) x path(2)."""
    if n < 4 or n % 2 != 0:
        raise GraphError(f"ladder graph needs even n >= 4, got {n}")
    return cartesian_product(make_path(n // 2), make_path(2))


def make_lollipop(m: int, path_len: int) -> Graph:
    """Complete graph K_m with a path of `path_len` vertices hung off vertex 1."""
    if m < 3:
        raise GraphError(f"lollipop clique needs m >= 3, got {m}")
    if path_len < 1:
        raise GraphError(f"lollipop path needs path_len >= 1, got {path_len}")
    edges = list(make_complete(m).edges)
    edges.append((1, m + 1))
    for i in range(m + 1, m + path_len):
        edges.append((i, i + 1))
    return Graph(m + path_len, tuple(sorted(edges)))


# ---------------------------------------------------------------------------
# Surgery
# ---------------------------------------------------------------------------

def add_edge(g: Graph, u: int, v: int) -> Graph:
    if not (1 <= u <= g.n and 1 <= v <= g.n):
        raise GraphError(f"unknown vertex in ({u},{v}); graph has 1..{g.n}")
    if u == v:
        raise GraphError(f"cannot add self-loop at vertex {u}")
    if g.has_edge(u, v):
        raise GraphError(f"edge ({min(u, v)},{max(u, v)}) already present")
    return Graph(g.n, tuple(sorted(g.edges + ((min(u, v), max(u, v)),))))


def delete_edge(g: Graph, u: int, v: int) -> Graph:
    if not (1 <= u <= g.n and 1 <= v <= g.n):
        raise GraphError(f"unknown vertex in ({u},{v}); graph has 1..{g.n}")
    e = (min(u, v), max(u, v))
    if e not in set(g.edges):
        raise GraphError(f"edge {e} not present")
    remaining = tuple(x for x in g.edges if x != e)
    if not _is_connected(g.n, remaining):
        raise GraphError(f"deleting edge {e} would disconnect the graph")
    return Graph(g.n, remaining)


def add_pendant_vertex(g: Graph, u: int) -> Graph:
    if not (1 <= u <= g.n):
        raise GraphError(f"unknown vertex {u}; graph has 1..{g.n}")
    return Graph(g.n + 1, tuple(sorted(g.edges + ((u, g.n + 1),))))


# ---------------------------------------------------------------------------
# Watts-Strogatz small-world graphs
# ---------------------------------------------------------------------------

def watts_strogatz(n: int, p: float, seed: int) -> Graph:
    """Rewired ring graph, restricted to its largest connected component.

    Starting from ring(n), vertices are visited in order 1..n and each ring
    edge is considered once, at the visit of its lower-labelled endpoint
    (so vertex 1 owns both {1,2} and {1,n}). With probability p the edge is
    detached from the neighbour and reattached from the current vertex to a
    uniformly random target; proposals creating self-loops or duplicate
    edges leave the original edge in place. The output may have fewer than
    n vertices; it is relabelled to 1..n'.
    """
    if n < 3:
        raise GraphError(f"watts_strogatz needs n >= 3, got {n}")
    if not (0.0 <= p <= 1.0):
        raise GraphError(f"rewiring probability must be in [0,1], got {p}")
    rng = np.random.default_rng(seed)
    edge_set = set(make_ring(n).edges)
    # ring edge owned by vertex v: (v, v+1) for v < n, and vertex 1 also owns (1, n)
    owned = {v: [(v, v + 1)] for v in range(1, n)}
    owned[1] = [(1, 2), (1, n)]
    for v in range(1, n + 1):
        for e in owned.get(v, []):
            if e not in edge_set:
                continue
            if rng.random() >= p:
                continue
            target = int(rng.integers(1, n + 1))
            if target == v:
                continue
            candidate = (min(v, target), max(v, target))
            if candidate in edge_set:
                continue
            edge_set.remove(e)
            edge_set.add(candidate)
    comps = _components(n, edge_set)
    largest = max(comps, key=lambda c: (len(c), -min(c)))
    return _relabel_to_contiguous(largest, sorted(edge_set))


# ---------------------------------------------------------------------------
# Edge-list files
# ---------------------------------------------------------------------------

def save_edge_list(g: Graph, path: str | Path) -> None:
    """Write one `u v` pair per line, 1-based, u < v, sorted."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def load_edge_list(path: str | Path, largest_component: bool = False) -> Graph:
    """Read whitespace-separated vertex-id pairs, one edge per line.

    Ids may be positive integers or arbitrary strings; they are mapped to
    1..n (numeric ids sort numerically, so contiguous 1..n files load
    unchanged). Duplicate edges and self-loops are rejected with the line
    number. A disconnected graph is an error unless `largest_component`
    is set, in which case the largest component is returned relabelled.
    """
    raw_edges: list[tuple[int, str, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise EdgeListParseError(
                    f"{path}:{lineno}: expected two ids per line, got {len(parts)}"
                )
            a, b = parts
            if a == b:
                raise EdgeListParseError(f"{path}:{lineno}: self-loop on id {a!r}")
            raw_edges.append((lineno, a, b))
    if not raw_edges:
        raise EdgeListParseError(f"{path}: no edges found")

    ids = {tok for _, a, b in raw_edges for tok in (a, b)}
    all_ints = all(tok.isdigit() and int(tok) > 0 for tok in ids)
    order = sorted(ids, key=int) if all_ints else sorted(ids)
    idx = {tok: i + 1 for i, tok in enumerate(order)}

    edges = set()
    for lineno, a, b in raw_edges:
        e = (min(idx[a], idx[b]), max(idx[a], idx[b]))
        if e in edges:
            raise EdgeListParseError(f"{path}:{lineno}: duplicate edge {a} {b}")
        edges.add(e)

    n = len(order)
    if not _is_connected(n, edges):
        if not largest_component:
            raise GraphError(
                f"{path}: graph is disconnected (pass largest_component=True "
                "to keep the largest component)"
            )
        comps = _components(n, edges)
        largest = max(comps, key=lambda c: (len(c), -min(c)))
        return _relabel_to_contiguous(largest, sorted(edges))
    return Graph(n, tuple(sorted(edges)))
