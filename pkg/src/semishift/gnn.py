"""Homophily, k-means supports and the SemiGCN layer with a small trainer."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np

from .filters import SupportTuple
from .graph import Graph, bfs_distances, normalized_adjacency_selfloops

ACTIVATIONS = ("relu", "identity", "softmax")


# homophily -------------------------------------------------------------------

def homophily_counts(g: Graph, labels: Sequence[Hashable], eta: Hashable,
                     hops: int = 1) -> tuple[Fraction, int]:
    """Exact class homophily and the number of vertices it averages over.

    For each vertex labelled ``eta`` with at least one vertex at hop
    distance exactly ``hops``, take the fraction of those vertices that
    also carry ``eta``; return the mean fraction as a :class:`Fraction`.
    Vertices with no such neighbours are left out of the mean (a class
    whose members all lack them scores 0 with count 0).
    """
    if hops not in (1, 2):
        raise ValueError("hops must be 1 or 2")
    if len(labels) != g.n:
        raise ValueError(f"{len(labels)} labels for {g.n} vertices")
    members = [v for v in range(g.n) if labels[v] == eta]
    if not members:
        raise ValueError(f"class {eta!r} has no vertices")
    total, count = Fraction(0), 0
    for v in members:
        ring = np.flatnonzero(bfs_distances(g, [v]) == hops)
        if ring.size == 0:
            continue
        same = sum(1 for u in ring if labels[u] == eta)
        total += Fraction(same, int(ring.size))
        count += 1
    return (total / count if count else Fraction(0)), count


def homophily_score(g: Graph, labels: Sequence[Hashable], eta: Hashable, hops: int = 1,
                    exact: bool = False):
    score, _ = homophily_counts(g, labels, eta, hops)
    return score if exact else float(score)


# k-means ---------------------------------------------------------------------

@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    history: tuple[float, ...]
    iterations: int
    converged: bool

    @property
    def objective(self) -> float:
        return self.history[-1]

    def clusters(self) -> SupportTuple:
        groups = [tuple(int(v) for v in np.flatnonzero(self.labels == c))
                  for c in range(self.centroids.shape[0])]
        return tuple(sorted((grp for grp in groups if grp), key=lambda t: t[0]))


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def _cost(X: np.ndarray, labels: np.ndarray, C: np.ndarray) -> float:
    return float(((X - C[labels]) ** 2).sum())


def lloyd(X, k: int, seed: int = 0, max_iter: int = 300) -> KMeansResult:
    """Lloyd's algorithm from ``k`` distinct seeded rows.

    Each iteration moves centroids to cluster means, then reassigns points
    to their nearest centroid (a tie keeps the current cluster) and
    re-seeds any empty cluster with the point farthest from its centroid.
    Iteration stops when the assignment no longer changes. The objective is
    checked after every step and a rise beyond round-off raises
    ``RuntimeError``.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    C = X[np.sort(rng.choice(n, size=k, replace=False))].copy()

    def assign(prev):
        d = _sq_dists(X, C)
        lab = np.argmin(d, axis=1)
        if prev is not None:
            # keep the old label on exact ties so the fixpoint test is stable
            rows = np.arange(n)
            lab = np.where(d[rows, prev] <= d[rows, lab], prev, lab)
        for c in range(k):
            if not np.any(lab == c):
                resid = ((X - C[lab]) ** 2).sum(axis=1)
                resid[np.bincount(lab, minlength=k)[lab] < 2] = -1.0
                far = int(np.argmax(resid))
                lab[far] = c
                C[c] = X[far]
        return lab

    labels = assign(None)
    history = [_cost(X, labels, C)]

    def check(value):
        if value > history[-1] + 1e-12 * (1.0 + history[-1]):
            raise RuntimeError(f"k-means objective rose from {history[-1]} to {value}")
        history.append(value)

    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        for c in range(k):
            C[c] = X[labels == c].mean(axis=0)
        check(_cost(X, labels, C))
        new = assign(labels)
        check(_cost(X, new, C))
        if np.array_equal(new, labels):
            converged = True
            break
        labels = new
    return KMeansResult(labels, C, tuple(history), it, converged)


def kmeans(X, k: int, seed: int = 0, max_iter: int = 300) -> SupportTuple:
    """Partition the rows of ``X`` into ``k`` clusters, returned as vertex sets."""
    return lloyd(X, k, seed, max_iter).clusters()


# SemiGCN ---------------------------------------------------------------------

def _activate(Z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(Z, 0.0)
    if kind == "identity":
        return Z
    Zs = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Zs)
    return E / E.sum(axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class SemiGcnLayer:
    """Masked polynomial propagation ``sum_j sum_{i<=d_j} Pbar_j A^i H W``.

    With ``shared=True`` there is one weight per power ``i`` (``max(D)+1``
    matrices). With ``shared=False`` each ``(j, i)`` pair has its own, in
    the order ``j`` major, ``i`` minor.
    """

    sets: SupportTuple
    degrees: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    activation: str = "relu"
    shared: bool = True

    def __post_init__(self):
        if len(self.sets) != len(self.degrees) or not self.sets:
            raise ValueError("need one degree per vertex set and at least one set")
        if any(d < 0 for d in self.degrees):
            raise ValueError("degrees must be non-negative")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        want = max(self.degrees) + 1 if self.shared else sum(d + 1 for d in self.degrees)
        ws = tuple(np.array(W, dtype=float) for W in self.weights)
        if len(ws) != want:
            raise ValueError(f"expected {want} weight matrices, got {len(ws)}")
        if any(W.ndim != 2 or W.shape != ws[0].shape for W in ws):
            raise ValueError("weight matrices must share one 2-D shape")
        object.__setattr__(self, "sets", tuple(tuple(int(v) for v in V) for V in self.sets))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        object.__setattr__(self, "weights", ws)

    @property
    def f_in(self) -> int:
        return self.weights[0].shape[0]

    @property
    def f_out(self) -> int:
        return self.weights[0].shape[1]

    def terms(self, n: int) -> list[tuple[np.ndarray, int, int]]:
        """``(row mask, power, weight index)`` triples, merged per weight."""
        merged: dict[tuple[int, int], np.ndarray] = {}
        w = 0
        for V, d in zip(self.sets, self.degrees):
            m = np.zeros(n)
            m[list(V)] = 1.0
            for i in range(d + 1):
                key = (i, i if self.shared else w)
                merged[key] = merged.get(key, 0.0) + m
                w += 1
        return [(m, i, widx) for (i, widx), m in sorted(merged.items())]

    def with_weights(self, weights) -> "SemiGcnLayer":
        return SemiGcnLayer(self.sets, self.degrees, tuple(weights), self.activation, self.shared)

    @classmethod
    def init(cls, sets, degrees, f_in: int, f_out: int, rng: np.random.Generator,
             activation: str = "relu", shared: bool = True) -> "SemiGcnLayer":
        """Glorot-uniform weights."""
        count = max(degrees) + 1 if shared else sum(d + 1 for d in degrees)
        lim = np.sqrt(6.0 / (f_in + f_out))
        ws = tuple(rng.uniform(-lim, lim, (f_in, f_out)) for _ in range(count))
        return cls(tuple(sets), tuple(degrees), ws, activation, shared)


def _powers(A: np.ndarray, H: np.ndarray, dmax: int) -> list[np.ndarray]:
    out = [H]
    for _ in range(dmax):
        out.append(A @ out[-1])
    return out


def _check_layer(H: np.ndarray, n: int, layer: SemiGcnLayer):
    if H.ndim != 2 or H.shape[0] != n:
        raise ValueError(f"H must have {n} rows, got shape {H.shape}")
    if H.shape[1] != layer.f_in:
        raise ValueError(f"H has {H.shape[1]} features, layer expects {layer.f_in}")
    if any(v < 0 or v >= n for V in layer.sets for v in V):
        raise ValueError("layer vertex set outside the graph")


def _preactivation(H: np.ndarray, A: np.ndarray, layer: SemiGcnLayer):
    powers = _powers(A, H, max(layer.degrees))
    terms = layer.terms(A.shape[0])
    Z = np.zeros((H.shape[0], layer.f_out))
    for m, i, w in terms:
        Z += m[:, None] * (powers[i] @ layer.weights[w])
    return Z, powers, terms


def semigcn_layer(H, g: Graph, layer: SemiGcnLayer, A: np.ndarray | None = None) -> np.ndarray:
    H = np.asarray(H, dtype=float)
    _check_layer(H, g.n, layer)
    A = normalized_adjacency_selfloops(g) if A is None else A
    Z, _, _ = _preactivation(H, A, layer)
    return _activate(Z, layer.activation)


def gcn_layer(H, g: Graph, W, activation: str = "relu") -> np.ndarray:
    """The plain graph convolution ``act(A_tilde H W)``."""
    A = normalized_adjacency_selfloops(g)
    return _activate(A @ np.asarray(H, dtype=float) @ np.asarray(W, dtype=float), activation)


# heterogeneous graphs --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TypedGraph:
    """A graph with a tag per vertex and a tag per edge.

    ``edge_types[e]`` belongs to ``graph.edges[e]`` (the graph's canonical
    edge order); use :meth:`from_edges` to tag edges in input order.
    """

    graph: Graph
    node_types: tuple[str, ...]
    edge_types: tuple[str, ...]
    node_alphabet: tuple[str, ...] = field(default=())
    edge_alphabet: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.node_types) != self.graph.n:
            raise ValueError("need one node type per vertex")
        if len(self.edge_types) != self.graph.num_edges:
            raise ValueError("need one edge type per edge")
        for tags, alpha, what in ((self.node_types, self.node_alphabet, "node"),
                                  (self.edge_types, self.edge_alphabet, "edge")):
            if alpha:
                bad = sorted(set(tags) - set(alpha))
                if bad:
                    raise ValueError(f"{what} types {bad} not in the declared alphabet")
            else:
                object.__setattr__(self, f"{what}_alphabet", tuple(sorted(set(tags))))

    @classmethod
    def from_edges(cls, n: int, edges, edge_types, node_types=None, directed: bool = False,
                   node_alphabet=(), edge_alphabet=()) -> "TypedGraph":
        edges = [tuple(e) for e in edges]
        if len(edges) != len(edge_types):
            raise ValueError("need one edge type per edge")
        g = Graph(n, tuple(edges), directed)
        tag = {}
        for e, t in zip(edges, edge_types):
            u, v = int(e[0]), int(e[1])
            tag[(u, v) if directed else (min(u, v), max(u, v))] = str(t)
        etypes = tuple(tag[(u, v)] for u, v, _ in g.edges)
        ntypes = tuple(str(t) for t in node_types) if node_types is not None else ("",) * n
        return cls(g, ntypes, etypes, tuple(node_alphabet), tuple(edge_alphabet))


def heterogeneous_support(tg: TypedGraph) -> SupportTuple:
    """One vertex set per edge type (in alphabet order): all endpoints of that type."""
    groups: dict[str, set[int]] = {}
    for (u, v, _), t in zip(tg.graph.edges, tg.edge_types):
        groups.setdefault(t, set()).update((u, v))
    return tuple(tuple(sorted(groups[t])) for t in tg.edge_alphabet if t in groups)


# training --------------------------------------------------------------------

@dataclass(frozen=True)
class TrainResult:
    layers: tuple[SemiGcnLayer, ...]
    loss: tuple[float, ...]
    accuracy: tuple[float, ...]


def forward(H, A: np.ndarray, layers: Sequence[SemiGcnLayer]) -> np.ndarray:
    for layer in layers:
        Z, _, _ = _preactivation(H, A, layer)
        H = _activate(Z, layer.activation)
    return H


def masked_cross_entropy(P: np.ndarray, labels: np.ndarray, mask: np.ndarray) -> float:
    idx = np.flatnonzero(mask)
    return float(-np.mean(np.log(np.clip(P[idx, labels[idx]], 1e-300, None))))


def loss_and_gradients(X, A: np.ndarray, layers: Sequence[SemiGcnLayer], labels, mask):
    """Masked cross-entropy of the network and its gradient for every weight."""
    labels = np.asarray(labels)
    mask = np.asarray(mask, dtype=bool)
    cache = []
    H = np.asarray(X, dtype=float)
    for layer in layers:
        Z, powers, terms = _preactivation(H, A, layer)
        cache.append((Z, powers, terms))
        H = _activate(Z, layer.activation)
    loss = masked_cross_entropy(H, labels, mask)
    Y = np.zeros_like(H)
    Y[np.arange(H.shape[0]), labels] = 1.0
    # softmax + cross-entropy
    dZ = (H - Y) * mask[:, None] / mask.sum()
    grads = [None] * len(layers)
    for li in range(len(layers) - 1, -1, -1):
        layer = layers[li]
        Z, powers, terms = cache[li]
        if li < len(layers) - 1:
            act = layer.activation
            if act == "relu":
                dZ = dH * (Z > 0)
            elif act == "identity":
                dZ = dH
            else:
                raise ValueError("softmax is only supported on the last layer")
        gw = [np.zeros_like(W) for W in layer.weights]
        dpow = [np.zeros_like(p) for p in powers]
        for m, i, w in terms:
            mdZ = m[:, None] * dZ
            gw[w] += powers[i].T @ mdZ
            dpow[i] += mdZ @ layer.weights[w].T
        grads[li] = gw
        # back through H, A H, A^2 H, ... (A symmetric)
        dH = dpow[-1]
        for i in range(len(powers) - 2, -1, -1):
            dH = dpow[i] + A @ dH
    return loss, grads


def train_node_classifier(g: Graph, X, labels, mask, layers: Sequence[SemiGcnLayer],
                          epochs: int = 200, lr: float = 0.1, seed: int | None = 0,
                          trainable: str = "all") -> TrainResult:
    """Full-batch gradient descent on the masked cross-entropy.

    ``layers`` (at most two, the last with softmax) give the architecture.
    When ``seed`` is not ``None`` their weights are re-drawn Glorot-uniform
    from that seed; with ``seed=None`` the given weights are the start.
    ``trainable="last"`` freezes all but the final layer. The returned
    curves hold the loss and the masked accuracy before each update plus
    once after the last.
    """
    if not lr > 0:
        raise ValueError("learning rate must be positive")
    if not 1 <= len(layers) <= 2:
        raise ValueError("one or two layers supported")
    if layers[-1].activation != "softmax":
        raise ValueError("the last layer must use softmax")
    if trainable not in ("all", "last"):
        raise ValueError("trainable must be 'all' or 'last'")
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=int)
    mask = np.asarray(mask, dtype=bool)
    if labels.shape != (g.n,) or mask.shape != (g.n,) or X.shape[0] != g.n:
        raise ValueError("X, labels and mask must have one row per vertex")
    if not mask.any():
        raise ValueError("mask selects no vertices")
    if labels.min() < 0 or labels.max() >= layers[-1].f_out:
        raise ValueError("labels must lie in [0, number of outputs)")
    for a, b in zip(layers, layers[1:]):
        if a.f_out != b.f_in:
            raise ValueError("consecutive layers have mismatched widths")
    if layers[0].f_in != X.shape[1]:
        raise ValueError("first layer width does not match the features")
    layers = list(layers)
    if seed is not None:
        rng = np.random.default_rng(seed)
        layers = [SemiGcnLayer.init(L.sets, L.degrees, L.f_in, L.f_out, rng, L.activation, L.shared)
                  for L in layers]
    A = normalized_adjacency_selfloops(g)
    losses, accs = [], []

    def accuracy():
        pred = forward(X, A, layers).argmax(axis=1)
        return float(np.mean(pred[mask] == labels[mask]))

    first = len(layers) - 1 if trainable == "last" else 0
    for _ in range(epochs):
        loss, grads = loss_and_gradients(X, A, layers, labels, mask)
        losses.append(loss)
        accs.append(accuracy())
        for li in range(first, len(layers)):
            layers[li] = layers[li].with_weights(
                W - lr * G for W, G in zip(layers[li].weights, grads[li]))
    losses.append(masked_cross_entropy(forward(X, A, layers), labels, mask))
    accs.append(accuracy())
    return TrainResult(tuple(layers), tuple(losses), tuple(accs))


def two_community_graph(n_per: int, p_in: float, p_out: float, noise: float,
                        seed: int = 0) -> tuple[Graph, np.ndarray, np.ndarray]:
    """Two dense random communities with indicator-plus-noise features.

    Returns ``(graph, X, labels)``; ``X`` has two columns (the one-hot
    community indicator plus Gaussian noise of scale ``noise``).
    """
    rng = np.random.default_rng(seed)
    n = 2 * n_per
    labels = np.repeat([0, 1], n_per)
    iu, ju = np.triu_indices(n, k=1)
    p = np.where(labels[iu] == labels[ju], p_in, p_out)
    keep = rng.random(iu.size) < p
    g = Graph(n, tuple((int(u), int(v), 1.0) for u, v in zip(iu[keep], ju[keep])))
    X = np.eye(2)[labels] + noise * rng.standard_normal((n, 2))
    return g, X, labels
