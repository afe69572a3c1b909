"""Immutable simple undirected graphs and edge-list I/O.

Nodes are dense integers ``0..n-1``. Adjacency is stored in CSR form with
every neighbor list sorted. Batched membership queries use a dense bitmap
for small graphs and a binary search over sorted edge keys otherwise.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import NodeOutOfRange, ParseError, SelfLoop


# above this size membership queries binary-search sorted edge keys instead
DENSE_LOOKUP_MAX_N = 4096


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph in CSR layout.

    Build with :func:`graph_from_edges`; the constructor trusts its inputs.

    Attributes:
        n: Number of nodes.
        indptr: Row pointers, length ``n + 1``.
        indices: Concatenated sorted neighbor lists.
        degrees: Per-node degree.
        edge_count: Number of undirected edges.
    """

    n: int
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    edge_count: int

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        pos = np.searchsorted(nb, v)
        return bool(pos < nb.size and nb[pos] == v)

    def has_edges(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Vectorized membership test for node pairs ``(u[k], v[k])``."""
        if self.n <= DENSE_LOOKUP_MAX_N:
            return self._dense[u, v]
        lo = np.minimum(u, v).astype(np.int64)
        hi = np.maximum(u, v).astype(np.int64)
        keys = self._edge_keys
        if keys.size == 0:
            return np.zeros(lo.shape, dtype=bool)
        q = lo * self.n + hi
        pos = np.searchsorted(keys, q)
        pos[pos == keys.size] = 0
        return (keys[pos] == q) & (lo != hi)

    def edges(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` array with ``u < v``, sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        mask = rows < self.indices
        return np.column_stack([rows[mask], self.indices[mask]])

    @cached_property
    def _edge_keys(self) -> np.ndarray:
        e = self.edges()
        return _readonly(e[:, 0] * self.n + e[:, 1])

    @cached_property
    def _dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n), dtype=bool)
        rows = np.repeat(np.arange(self.n), self.degrees)
        dense[rows, self.indices] = True
        return _readonly(dense)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency as an int64 CSR matrix."""
        data = np.ones(self.indices.size, dtype=np.int64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def complement(self) -> Graph:
        dense = np.ones((self.n, self.n), dtype=bool)
        np.fill_diagonal(dense, False)
        e = self.edges()
        dense[e[:, 0], e[:, 1]] = False
        u, v = np.nonzero(np.triu(dense, 1))
        return _from_canonical(self.n, u.astype(np.int64), v.astype(np.int64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.edge_count == other.edge_count
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None  # type: ignore[assignment]


def _from_canonical(n: int, u: np.ndarray, v: np.ndarray) -> Graph:
    # u < v, pairs unique
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    order = np.argsort(rows * max(n, 1) + cols, kind="stable")
    rows, cols = rows[order], cols[order]
    degrees = np.bincount(rows, minlength=n).astype(np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=indptr[1:])
    return Graph(
        n=n,
        indptr=_readonly(indptr),
        indices=_readonly(cols.astype(np.int64)),
        degrees=_readonly(degrees),
        edge_count=int(u.size),
    )


def graph_from_edges(n: int, edges: Iterable[Sequence[int]] | np.ndarray) -> Graph:
    """Build a :class:`Graph` from node pairs.

    Both orientations and repeated pairs collapse to one undirected edge.

    Raises:
        NodeOutOfRange: an endpoint is outside ``[0, n)``.
        SelfLoop: a pair ``(u, u)`` is present.
    """
    n = int(n)
    if n < 0:
        raise NodeOutOfRange(f"node count must be >= 0, got {n}")
    arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be a sequence of (u, v) pairs")
    bad = (arr < 0) | (arr >= n)
    if bad.any():
        k = int(np.argmax(bad.any(axis=1)))
        raise NodeOutOfRange(f"edge ({arr[k, 0]}, {arr[k, 1]}) has endpoint outside [0, {n})")
    loops = arr[:, 0] == arr[:, 1]
    if loops.any():
        k = int(np.argmax(loops))
        raise SelfLoop(f"self-loop on node {arr[k, 0]}")
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    keys = np.unique(lo * n + hi)
    return _from_canonical(n, keys // n, keys % n)


def read_edge_list(path: str | os.PathLike) -> Graph:
    """Read the plain-text edge-list format.

    The first meaningful line is the node count; every later line is ``u v``.
    Blank lines and lines starting with ``#`` are skipped.
    """
    n: int | None = None
    pairs: list[tuple[int, int]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 1 or not parts[0].isdecimal():
                    raise ParseError(f"expected node count, got {line!r}", lineno)
                n = int(parts[0])
                continue
            if len(parts) != 2 or not (parts[0].isdecimal() and parts[1].isdecimal()):
                raise ParseError(f"expected 'u v', got {line!r}", lineno)
            u, v = int(parts[0]), int(parts[1])
            if u >= n or v >= n:
                raise NodeOutOfRange(f"line {lineno}: node index out of range [0, {n}) in {line!r}")
            if u == v:
                raise SelfLoop(f"line {lineno}: self-loop on node {u}")
            pairs.append((u, v))
    if n is None:
        raise ParseError("empty file: missing node count")
    return graph_from_edges(n, pairs)


def write_edge_list(graph: Graph, path: str | os.PathLike) -> None:
    e = graph.edges()
    lines = [f"{graph.n}\n"]
    lines.extend(f"{u} {v}\n" for u, v in e.tolist())
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)
