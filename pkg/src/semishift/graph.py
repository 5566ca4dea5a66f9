"""Graphs, their standard matrices, hop distances and generators."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

INF = float("inf")

VertexSet = tuple[int, ...]


def vertex_set(members: Iterable[int], n: int) -> VertexSet:
    """Return ``members`` as a sorted duplicate-free tuple of ids in ``[0, n)``."""
    out = tuple(sorted({int(v) for v in members}))
    if out and (out[0] < 0 or out[-1] >= n):
        raise ValueError(f"vertex ids must lie in [0, {n}), got {out}")
    return out


@dataclass(frozen=True)
class Graph:
    """A weighted graph on vertices ``0..n-1``.

    Undirected graphs store each edge once as ``(u, v, w)`` with ``u < v``.
    For directed graphs ``(u, v, w)`` is the edge ``u -> v``.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...] = ()
    directed: bool = False
    _nbrs: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        seen = {}
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {self.n})")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not np.isfinite(w):
                raise ValueError(f"edge ({u}, {v}) has non-finite weight")
            key = (u, v) if self.directed else (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen[key] = w
        object.__setattr__(self, "edges", tuple((u, v, w) for (u, v), w in sorted(seen.items())))
        nbrs = [set() for _ in range(self.n)]
        for u, v, _ in self.edges:
            # hop distances ignore orientation
            nbrs[u].add(v)
            nbrs[v].add(u)
        object.__setattr__(self, "_nbrs", tuple(tuple(sorted(s)) for s in nbrs))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._nbrs[v]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        return np.array([len(s) for s in self._nbrs])


def adjacency(g: Graph) -> np.ndarray:
    """Adjacency matrix with ``A[v, u]`` the weight of edge ``u -> v``.

    With this orientation ``(A @ f)[v]`` sums the values at in-neighbours of ``v``.
    Undirected graphs give a symmetric matrix.
    """
    A = np.zeros((g.n, g.n))
    for u, v, w in g.edges:
        A[v, u] = w
        if not g.directed:
            A[u, v] = w
    return A


def laplacian(g: Graph) -> np.ndarray:
    if g.directed:
        raise ValueError("laplacian-requires-undirected")
    A = adjacency(g)
    return np.diag(A.sum(axis=1)) - A


def normalized_adjacency_selfloops(g: Graph) -> np.ndarray:
    r"""Return :math:`\tilde D^{-1/2}(A + I)\tilde D^{-1/2}` as used by GCN layers."""
    if g.directed:
        raise ValueError("normalized adjacency requires an undirected graph")
    A = adjacency(g) + np.eye(g.n)
    d = 1.0 / np.sqrt(A.sum(axis=1))
    return d[:, None] * A * d[None, :]


def bfs_distances(g: Graph, sources: Iterable[int]) -> np.ndarray:
    """Hop distances from the nearest source (``inf`` when unreachable)."""
    dist = np.full(g.n, INF)
    queue = deque()
    for s in sources:
        if dist[s] != 0:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if dist[v] == INF:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def hop_distance(g: Graph, u: int, v: int) -> float:
    """Number of edges on a shortest path between ``u`` and ``v``.

    Edge weights and orientation are ignored. Returns ``inf`` for vertices
    in different components.
    """
    d = bfs_distances(g, [u])[v]
    return int(d) if d != INF else INF


def all_hop_distances(g: Graph) -> np.ndarray:
    return np.vstack([bfs_distances(g, [v]) for v in range(g.n)]) if g.n else np.zeros((0, 0))


def diameter(g: Graph) -> float:
    D = all_hop_distances(g)
    return float(D.max()) if D.size else 0.0


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or bool(np.all(np.isfinite(bfs_distances(g, [0]))))


def d_hop_neighborhood(g: Graph, V0: Iterable[int], d: int) -> VertexSet:
    """Vertices within ``d`` hops of some member of ``V0``."""
    if d < 0:
        raise ValueError("d must be non-negative")
    V0 = vertex_set(V0, g.n)
    dist = bfs_distances(g, V0)
    return tuple(int(v) for v in np.flatnonzero(dist <= d))


def induced_subgraph(g: Graph, V0: Iterable[int]) -> tuple[Graph, VertexSet]:
    """Subgraph on ``V0`` keeping the edges with both endpoints in ``V0``.

    Returns the subgraph (vertices relabelled ``0..|V0|-1``) and the tuple of
    original ids, so that new vertex ``i`` is original vertex ``index_map[i]``.
    """
    V0 = vertex_set(V0, g.n)
    if not V0:
        raise ValueError("induced subgraph needs a nonempty vertex set")
    pos = {v: i for i, v in enumerate(V0)}
    edges = [(pos[u], pos[v], w) for u, v, w in g.edges if u in pos and v in pos]
    return Graph(len(V0), tuple(edges), g.directed), V0


def extended_laplacian(g: Graph, V0: Iterable[int], d: int) -> np.ndarray:
    """Laplacian of the subgraph induced on ``B_d(V0)``, zero-padded to ``n x n``."""
    ball = d_hop_neighborhood(g, V0, d)
    L = np.zeros((g.n, g.n))
    if ball:
        sub, idx = induced_subgraph(g, ball)
        L[np.ix_(idx, idx)] = laplacian(sub)
    return L


# generators ------------------------------------------------------------------

def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1, 1.0) for i in range(n - 1)))


def cycle_graph(n: int, directed: bool = False) -> Graph:
    if n < 3 and not (directed and n == 2):
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)), directed)


def lattice_graph(rows: int, cols: int) -> Graph:
    """Square grid; vertex ``(r, c)`` has id ``r * cols + c``."""
    if rows < 1 or cols < 1:
        raise ValueError("lattice needs rows, cols >= 1")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1, 1.0))
            if r + 1 < rows:
                edges.append((v, v + cols, 1.0))
    return Graph(rows * cols, tuple(edges))


def erdos_renyi_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    if not 0 <= p <= 1:
        raise ValueError("edge probability must lie in [0, 1]")
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph(n, tuple((int(u), int(v), 1.0) for u, v in zip(iu[keep], ju[keep])))


def random_connected_graph(n: int, p: float, rng: np.random.Generator,
                           max_tries: int = 10_000) -> Graph:
    """Erdos-Renyi draws repeated until the sample is connected."""
    for _ in range(max_tries):
        g = erdos_renyi_graph(n, p, rng)
        if is_connected(g):
            return g
    raise RuntimeError(f"no connected G({n}, {p}) sample in {max_tries} tries")


def make_graph(kind: str, seed: int | None = None, **params) -> Graph:
    """Build a graph by name.

    ``kind`` is one of ``path``, ``cycle``, ``directed_cycle`` (all take ``n``),
    ``lattice`` (``rows``, ``cols``), ``erdos_renyi`` and ``random_connected``
    (``n``, ``p``). Random kinds are reproducible from ``seed``.
    """
    try:
        if kind == "path":
            return path_graph(int(params["n"]))
        if kind == "cycle":
            return cycle_graph(int(params["n"]))
        if kind == "directed_cycle":
            return cycle_graph(int(params["n"]), directed=True)
        if kind == "lattice":
            return lattice_graph(int(params["rows"]), int(params["cols"]))
        if kind in ("erdos_renyi", "random_connected"):
            rng = np.random.default_rng(seed)
            n, p = int(params["n"]), float(params["p"])
            if kind == "erdos_renyi":
                return erdos_renyi_graph(n, p, rng)
            return random_connected_graph(n, p, rng)
    except KeyError as exc:
        raise ValueError(f"graph kind {kind!r} is missing parameter {exc}") from None
    raise ValueError(f"unknown graph kind {kind!r}")


# file formats ----------------------------------------------------------------

def _fmt_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def to_edgelist(g: Graph) -> str:
    lines = [f"n {g.n} directed {int(g.directed)}"]
    lines += [f"{u} {v} {_fmt_weight(w)}" for u, v, w in g.edges]
    return "\n".join(lines) + "\n"


def from_edgelist(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 4 or rows[0][0] != "n" or rows[0][2] != "directed":
        raise ValueError("edge list must start with 'n <count> directed <0|1>'")
    n, directed = int(rows[0][1]), rows[0][3] == "1"
    edges = []
    for r in rows[1:]:
        if len(r) not in (2, 3):
            raise ValueError(f"bad edge line {' '.join(r)!r}")
        edges.append((int(r[0]), int(r[1]), float(r[2]) if len(r) == 3 else 1.0))
    return Graph(n, tuple(edges), directed)


def graph_to_dict(g: Graph) -> dict:
    def w(x):
        return int(x) if float(x).is_integer() else x
    return {"n": g.n, "directed": g.directed, "edges": [[u, v, w(x)] for u, v, x in g.edges]}


def graph_from_dict(d: dict) -> Graph:
    extra = set(d) - {"n", "directed", "edges", "node_types", "edge_types"}
    if extra:
        raise ValueError(f"unknown graph keys {sorted(extra)}")
    edges = tuple((int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0) for e in d.get("edges", []))
    return Graph(int(d["n"]), edges, bool(d.get("directed", False)))


def to_json(g: Graph) -> str:
    return json.dumps(graph_to_dict(g))


def from_json(text: str) -> Graph:
    return graph_from_dict(json.loads(text))


def read_graph(path: str) -> Graph:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return from_json(text)
    return from_edgelist(text)
