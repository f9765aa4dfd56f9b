"""Simple undirected graphs, expander certification and residual subgraphs."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from scipy.sparse import csgraph, csr_matrix

from hgpnlets.errors import (
    EmptyResidualError,
    InfeasibleDegreeError,
    NotRegularError,
    TooLargeError,
)
from hgpnlets.gf2 import BitMatrix

EIG_TOL = 1e-9
MAX_SPECTRAL_N = 2048
MAX_CHEEGER_N = 20


@dataclass(frozen=True)
class Graph:
    """Simple graph on vertices ``0..n-1``.

    Edges are stored as ``(u, v)`` with ``u < v`` and sorted, so the edge
    index of a pair is determined by the edge set alone.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            pair = (min(u, v), max(u, v))
            if pair in norm:
                raise ValueError(f"duplicate edge {pair}")
            norm.add(pair)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def regular_degree(self) -> int | None:
        deg = self.degrees()
        if self.n == 0 or np.any(deg != deg[0]):
            return None
        return int(deg[0])

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.float64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def edge_index(self, u: int, v: int) -> int:
        pair = (min(u, v), max(u, v))
        lo, hi = 0, len(self.edges)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.edges[mid] < pair:
                lo = mid + 1
            else:
                hi = mid
        if lo == len(self.edges) or self.edges[lo] != pair:
            raise KeyError(pair)
        return lo

    def components(self) -> np.ndarray:
        """Component label per vertex."""
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        e = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        adj = csr_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(self.n, self.n))
        _, labels = csgraph.connected_components(adj, directed=False)
        return labels

    def is_connected(self) -> bool:
        return self.n > 0 and len(set(self.components().tolist())) == 1

    def cycle_rank(self) -> int:
        """Dimension of the cycle space, m - n + (number of components)."""
        return self.m - self.n + len(set(self.components().tolist()))

    def induced(self, vertices: Iterable[int]) -> Graph:
        """Induced subgraph relabelled to ``0..len(vertices)-1`` in sorted order."""
        vs = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        return Graph(len(vs), [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InfeasibleDegreeError("a simple cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def disjoint_union(a: Graph, b: Graph) -> Graph:
    return Graph(a.n + b.n, list(a.edges) + [(u + a.n, v + a.n) for u, v in b.edges])


def random_regular(n: int, d: int, seed: int = 0, max_tries: int = 1000) -> Graph:
    """Connected simple d-regular graph, deterministic per seed."""
    if d >= n or (n * d) % 2 or d < 1:
        raise InfeasibleDegreeError(f"no simple {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        nxg = nx.random_regular_graph(d, n, seed=int(rng.integers(2**31)))
        g = Graph(n, nxg.edges())
        if g.is_connected():
            return g
    raise InfeasibleDegreeError(f"no connected sample after {max_tries} tries")


def random_connected(n: int, p: float, seed: int = 0, max_tries: int = 1000) -> Graph:
    """Connected Erdos-Renyi sample (used for irregular test corpora)."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        mask = rng.random((n, n)) < p
        g = Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]])
        if g.is_connected():
            return g
    raise InfeasibleDegreeError(f"no connected G({n}, {p}) sample after {max_tries} tries")


def incidence(g: Graph) -> BitMatrix:
    """The edge-vertex incidence map, an |E| x |V| matrix."""
    a = np.zeros((g.m, g.n), dtype=np.uint8)
    for i, (u, v) in enumerate(g.edges):
        a[i, u] = a[i, v] = 1
    return BitMatrix.from_dense(a)


@dataclass(frozen=True)
class SpectralReport:
    d: int
    lambda2: float
    cheeger_lb: float
    is_ramanujan: bool
    spectrum: tuple[float, ...] = field(repr=False, default=())

    @property
    def spectral_gap(self) -> float:
        """Normalised gap (d - lambda2)/d."""
        return (self.d - self.lambda2) / self.d


def spectral_report(g: Graph) -> SpectralReport:
    d = g.regular_degree()
    if d is None:
        raise NotRegularError("spectral report requires a regular graph")
    if g.n > MAX_SPECTRAL_N:
        raise TooLargeError(f"n={g.n} exceeds dense eigensolver cap {MAX_SPECTRAL_N}")
    eig = np.sort(np.linalg.eigvalsh(g.adjacency()))[::-1]
    lam2 = float(eig[1]) if g.n > 1 else float(eig[0])
    if abs(lam2 - round(lam2)) < EIG_TOL:
        lam2 = float(round(lam2))
    return SpectralReport(
        d=d,
        lambda2=lam2,
        cheeger_lb=(d - lam2) / 2,
        is_ramanujan=lam2 <= 2 * math.sqrt(max(d - 1, 0)) + EIG_TOL,
        spectrum=tuple(float(x) for x in eig),
    )


def cheeger_exhaustive(g: Graph) -> float:
    """Exact edge expansion min |E(S, S^c)| / |S| over 0 < |S| <= n/2."""
    n = g.n
    if n > MAX_CHEEGER_N:
        raise TooLargeError(f"n={n} exceeds exhaustive Cheeger cap {MAX_CHEEGER_N}")
    if n < 2:
        raise ValueError("need at least two vertices")
    edges = np.array(g.edges, dtype=np.int64).reshape(-1, 2)
    best = math.inf
    chunk = 1 << 16
    for start in range(1, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        size = np.bitwise_count(masks).astype(np.int64)
        ok = size <= n // 2
        masks, size = masks[ok], size[ok]
        if masks.size == 0:
            continue
        cut = np.zeros(masks.size, dtype=np.int64)
        for u, v in edges:
            cut += ((masks >> u) ^ (masks >> v)) & 1
        best = min(best, float((cut / size).min()))
    return best


def ramanujan_gap(d: int) -> float:
    """Normalised gap 1 - 2 sqrt(d-1)/d guaranteed by a Ramanujan graph."""
    return 1 - 2 * math.sqrt(d - 1) / d


def eps_prime(eps: float, d: int, gap: float | None = None) -> float:
    """Residual loss parameter eps(d+1)/gap.

    ``gap`` defaults to the Ramanujan value; pass a measured (d - lambda2)/d
    to get the same bound for a non-Ramanujan graph.
    """
    gap = ramanujan_gap(d) if gap is None else gap
    if gap <= 0:
        return math.inf
    return eps * (d + 1) / gap


@dataclass(frozen=True)
class ResidualGraph:
    kept_vertices: tuple[int, ...]
    kept_edges: tuple[int, ...]
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    graph: Graph
    vertex_fraction: float
    edge_fraction: float

    def report(self, eps: float | None = None, d: int | None = None, gap: float | None = None) -> dict:
        out = {
            "n_kept": len(self.kept_vertices),
            "m_kept": len(self.kept_edges),
            "n_residual": len(self.vertices),
            "m_residual": len(self.edges),
            "vertex_fraction": self.vertex_fraction,
            "edge_fraction": self.edge_fraction,
        }
        if eps is not None and d is not None:
            ep = eps_prime(eps, d, gap)
            out["eps_prime"] = ep
            out["vertex_bound"] = 1 - ep
            # the statement and the proof give different edge bounds; keep both
            out["edge_bound_statement"] = 1 - 2 * ep
            out["edge_bound_proof"] = 1 - ep - eps * (d + 1)
        return out


def maximal_connected_residual(
    g: Graph, kept_vertices: Iterable[int], kept_edges: Iterable[int]
) -> ResidualGraph:
    """Largest connected component of the kept subgraph.

    ``kept_edges`` are edge indices into ``g.edges``; an edge survives only if
    both endpoints are kept.  Ties go to the component with the smallest
    minimum vertex.
    """
    kv = sorted(set(int(v) for v in kept_vertices))
    ke = sorted(set(int(e) for e in kept_edges))
    if any(not 0 <= v < g.n for v in kv) or any(not 0 <= e < g.m for e in ke):
        raise ValueError("kept set outside the graph")
    if not kv:
        raise EmptyResidualError("no vertex survives")
    kvs = set(kv)
    live = [e for e in ke if g.edges[e][0] in kvs and g.edges[e][1] in kvs]
    pos = {v: i for i, v in enumerate(kv)}
    sub = Graph(len(kv), [(pos[g.edges[e][0]], pos[g.edges[e][1]]) for e in live])
    labels = sub.components()
    best_label, best_key = None, None
    for lab in np.unique(labels):
        members = np.flatnonzero(labels == lab)
        key = (-members.size, int(members.min()))
        if best_key is None or key < best_key:
            best_label, best_key = lab, key
    verts = tuple(kv[i] for i in np.flatnonzero(labels == best_label))
    vset = set(verts)
    edges = tuple(e for e in live if g.edges[e][0] in vset)
    return ResidualGraph(
        kept_vertices=tuple(kv),
        kept_edges=tuple(ke),
        vertices=verts,
        edges=edges,
        graph=_subgraph(g, verts, edges),
        vertex_fraction=len(verts) / g.n,
        edge_fraction=len(edges) / g.m if g.m else 1.0,
    )


def _subgraph(g: Graph, verts: tuple[int, ...], edges: tuple[int, ...]) -> Graph:
    pos = {v: i for i, v in enumerate(verts)}
    return Graph(len(verts), [(pos[g.edges[e][0]], pos[g.edges[e][1]]) for e in edges])
