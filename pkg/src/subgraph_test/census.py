"""Exact 3-node subgraph census.

Every triple of nodes spans 0, 1, 2 or 3 edges: empty, single edge, V-shape
(wedge) or triangle. :func:`census_full` computes the four counts in closed
form from degrees and a triangle count; :func:`census_brute` classifies every
triple directly and is kept as the reference oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.sparse as sp

from .errors import GraphTooSmall
from .graph import Graph


@dataclass(frozen=True)
class TripleCensus:
    """Counts and frequencies of the four 3-node shapes.

    Counts are reals so sampled censuses, which average over a multiset of
    triples, share the type with the exact one. ``scheme`` records how the
    census covered the triples (``full``, ``node`` or ``triple``).
    """

    n: int
    n_triples: float
    count_empty: float
    count_edge: float
    count_vee: float
    count_triangle: float
    p_hat: float
    scheme: str = "full"

    @property
    def f0(self) -> float:
        return self.count_empty / self.n_triples

    @property
    def f1(self) -> float:
        return self.count_edge / self.n_triples

    @property
    def f2(self) -> float:
        return self.count_vee / self.n_triples

    @property
    def f3(self) -> float:
        return self.count_triangle / self.n_triples

    @property
    def frequencies(self) -> tuple[float, float, float, float]:
        return (self.f0, self.f1, self.f2, self.f3)

    @property
    def counts(self) -> tuple[float, float, float, float]:
        return (self.count_empty, self.count_edge, self.count_vee, self.count_triangle)

    @property
    def estimated_shapes(self) -> tuple[str, ...]:
        # Sampled schemes estimate edges, wedges and triangles directly; the
        # single-edge and empty counts follow from edge incidences.
        if self.scheme == "full":
            return ("empty", "edge", "vee", "triangle")
        return ("edge", "vee", "triangle")


def _require_three(graph: Graph) -> None:
    if graph.n < 3:
        raise GraphTooSmall(f"census needs n >= 3 nodes, got n={graph.n}")


def count_triangles(graph: Graph) -> int:
    """Number of triangles, each counted once.

    Orients every edge from lower to higher index; for an oriented edge
    ``u -> v`` the closing nodes are the common forward neighbors of ``u``
    and ``v``. The masked sparse product ``(U @ U) .* U`` counts those common
    neighbors for every oriented edge at once, in integer arithmetic.
    """
    upper = sp.triu(graph.adjacency, k=1, format="csr")
    return int((upper @ upper).multiply(upper).sum())


def triangles_per_node(graph: Graph, nodes: np.ndarray | None = None) -> np.ndarray:
    """Triangles through each node (edges among its neighbors)."""
    adj = graph.adjacency
    rows = adj if nodes is None else adj[np.asarray(nodes, dtype=np.int64)]
    closed = (rows @ adj).multiply(rows).sum(axis=1)
    return np.asarray(closed, dtype=np.int64).ravel() // 2


def census_full(graph: Graph) -> TripleCensus:
    """Exact census via degree and triangle identities.

    With ``T`` triangles and ``P = sum_i C(deg_i, 2)`` paths of length two,
    wedges are ``P - 3T``; single-edge triples follow from each edge lying in
    ``n - 2`` triples.
    """
    _require_three(graph)
    n, m = graph.n, graph.edge_count
    tri = count_triangles(graph)
    d = graph.degrees
    paths = int(np.sum(d * (d - 1) // 2))
    vee = paths - 3 * tri
    edge = m * (n - 2) - 2 * vee - 3 * tri
    total = comb(n, 3)
    empty = total - edge - vee - tri
    return TripleCensus(
        n=n,
        n_triples=float(total),
        count_empty=float(empty),
        count_edge=float(edge),
        count_vee=float(vee),
        count_triangle=float(tri),
        p_hat=m / comb(n, 2),
        scheme="full",
    )


def census_brute(graph: Graph) -> TripleCensus:
    """Classify all ``C(n, 3)`` triples by their edge count. O(n^3)."""
    _require_three(graph)
    n = graph.n
    a = graph.adjacency.toarray().astype(np.int64)
    counts = np.zeros(4, dtype=np.int64)
    for i in range(n - 2):
        rest = a[i + 1 :, i + 1 :]
        r, c = np.triu_indices(n - i - 1, k=1)
        edges_in_triple = a[i, r + i + 1] + a[i, c + i + 1] + rest[r, c]
        counts += np.bincount(edges_in_triple, minlength=4)
    pairs = int(np.triu(a, 1).sum())
    return TripleCensus(
        n=n,
        n_triples=float(comb(n, 3)),
        count_empty=float(counts[0]),
        count_edge=float(counts[1]),
        count_vee=float(counts[2]),
        count_triangle=float(counts[3]),
        p_hat=pairs / comb(n, 2),
        scheme="full",
    )
