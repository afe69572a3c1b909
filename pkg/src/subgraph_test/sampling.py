"""Subsampled censuses for large graphs.

Two schemes trade accuracy for work:

* node sampling draws ``m`` nodes without replacement and censuses every
  triple that contains one of them, i.e. ``m * C(n-1, 2)`` triples counted
  with multiplicity;
* triple sampling draws ``b`` triples uniformly with replacement.

Both return a :class:`~subgraph_test.census.TripleCensus` whose frequencies
are averages over the sampled multiset; :func:`effective_n` gives the
normalization the chi-squared statistic uses in place of ``C(n, 3)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any

import numpy as np

from .census import TripleCensus, census_full, triangles_per_node
from .errors import BadSampleSize, ConfigError, GraphTooSmall
from .graph import Graph

VARIANTS = ("full", "node", "triple")


@dataclass(frozen=True)
class SamplingPlan:
    """Which census to run: ``full``, ``node`` with size ``m`` or ``triple`` with size ``b``."""

    variant: str = "full"
    size: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown sampling variant {self.variant!r}; expected one of {VARIANTS}")
        if self.variant == "full":
            if self.size is not None:
                raise ConfigError("the full plan takes no sample size")
        else:
            if self.size is None or int(self.size) != self.size:
                raise ConfigError(f"{self.variant} plan needs an integer sample size")
            if self.size < 1:
                raise BadSampleSize(f"{self.variant} sample size must be >= 1, got {self.size}")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> SamplingPlan:
        """Parse the CLI form ``full``, ``node:M`` or ``triple:B``."""
        name, _, arg = text.strip().partition(":")
        if name == "full" and not arg:
            return cls("full", None, seed)
        if name in ("node", "triple") and arg:
            try:
                size = int(float(arg)) if "e" in arg.lower() else int(arg)
            except ValueError:
                raise ConfigError(f"bad sample size in plan {text!r}") from None
            return cls(name, size, seed)
        raise ConfigError(f"bad plan {text!r}; expected full, node:M or triple:B")

    @property
    def label(self) -> str:
        return self.variant if self.size is None else f"{self.variant}:{self.size}"

    def with_seed(self, seed: int) -> SamplingPlan:
        return SamplingPlan(self.variant, self.size, seed)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"variant": self.variant}
        if self.variant == "node":
            out["m"] = self.size
        elif self.variant == "triple":
            out["b"] = self.size
        out["seed"] = self.seed
        return out

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> SamplingPlan:
        variant = d.get("variant", "full")
        size = d.get("m") if variant == "node" else d.get("b") if variant == "triple" else None
        return cls(variant, None if size is None else int(size), int(d.get("seed", 0)))

    def check(self, n: int) -> None:
        if self.variant == "node" and not 1 <= self.size <= n:
            raise BadSampleSize(f"node sample size m={self.size} must lie in [1, n={n}]")


FULL = SamplingPlan()


def f_norm(n: int, m: int) -> float:
    """Effective triple count for node sampling with ``m`` of ``n`` nodes."""
    if n < 3:
        raise GraphTooSmall(f"need n >= 3, got n={n}")
    if not 1 <= m <= n:
        raise BadSampleSize(f"node sample size m={m} must lie in [1, n={n}]")
    num = m * m * (n - 1) ** 2 * (n - 2) ** 2
    den = 36 * comb(m, 3) + 16 * comb(m, 2) * (n - m) + 4 * m * comb(n - m, 2)
    return float(Fraction(num, den))


def effective_n(plan: SamplingPlan, n: int) -> float:
    """Normalization replacing ``C(n, 3)`` in the chi-squared statistic."""
    if n < 3:
        raise GraphTooSmall(f"need n >= 3, got n={n}")
    total = comb(n, 3)
    if plan.variant == "full":
        return float(total)
    if plan.variant == "node":
        return f_norm(n, plan.size)
    return float(Fraction(total * plan.size, total + plan.size))


def node_counts(graph: Graph, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form counts over the triples containing each node ``i``.

    Returns three integer arrays: the edge incidences
    ``sum_{j<k} (A_ij + A_ik + A_jk) = (n-3) deg_i + m``, the triangles
    through ``i``, and the wedges among triples containing ``i``:
    ``C(deg_i, 2) + sum_{j ~ i} deg_j - deg_i - 3 t_i``.
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    n, m = graph.n, graph.edge_count
    d = graph.degrees[nodes]
    tri = triangles_per_node(graph, nodes)
    neighbor_deg = np.asarray(graph.adjacency[nodes] @ graph.degrees, dtype=np.int64).ravel()
    incidences = (n - 3) * d + m
    vee = d * (d - 1) // 2 + neighbor_deg - d - 3 * tri
    return incidences, tri, vee


def node_counts_brute(graph: Graph, i: int) -> tuple[int, int, int]:
    """Reference for :func:`node_counts`: enumerate every pair ``j < k`` avoiding ``i``."""
    a = graph.adjacency.toarray().astype(np.int64)
    others = np.delete(np.arange(graph.n), i)
    r, c = np.triu_indices(others.size, k=1)
    j, k = others[r], others[c]
    aij, aik, ajk = a[i, j], a[i, k], a[j, k]
    incidences = int(np.sum(aij + aik + ajk))
    tri = int(np.sum(aij * aik * ajk))
    vee = int(np.sum(aij * aik * (1 - ajk) + aij * ajk * (1 - aik) + aik * ajk * (1 - aij)))
    return incidences, tri, vee


def node_sample_census(graph: Graph, m: int, rng: np.random.Generator) -> TripleCensus:
    """Census of all triples touching ``m`` nodes drawn without replacement."""
    if graph.n < 3:
        raise GraphTooSmall(f"census needs n >= 3 nodes, got n={graph.n}")
    if not 1 <= m <= graph.n:
        raise BadSampleSize(f"node sample size m={m} must lie in [1, n={graph.n}]")
    nodes = np.sort(rng.choice(graph.n, size=m, replace=False))
    incidences, tri, vee = node_counts(graph, nodes)
    total = m * comb(graph.n - 1, 2)
    inc, t, v = int(incidences.sum()), int(tri.sum()), int(vee.sum())
    edge = inc - 2 * v - 3 * t
    return TripleCensus(
        n=graph.n,
        n_triples=float(total),
        count_empty=float(total - edge - v - t),
        count_edge=float(edge),
        count_vee=float(v),
        count_triangle=float(t),
        p_hat=inc / (3 * total),
        scheme="node",
    )


def _draw_distinct(n: int, b: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # three indices without replacement: later draws use shrunken ranges and
    # step over the values already taken
    i = rng.integers(0, n, size=b)
    j = rng.integers(0, n - 1, size=b)
    j += j >= i
    k = rng.integers(0, n - 2, size=b)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    k += k >= lo
    k += k >= hi
    return i, j, k


def sample_triples(n: int, b: int, rng: np.random.Generator) -> np.ndarray:
    """``b`` uniform triples ``i < j < k`` drawn with replacement, shape ``(b, 3)``."""
    return np.sort(np.column_stack(_draw_distinct(n, b, rng)), axis=1)


def triple_sample_census(graph: Graph, b: int, rng: np.random.Generator) -> TripleCensus:
    """Census of ``b`` triples drawn uniformly with replacement."""
    if graph.n < 3:
        raise GraphTooSmall(f"census needs n >= 3 nodes, got n={graph.n}")
    if b < 1:
        raise BadSampleSize(f"triple sample size b={b} must be >= 1")
    i, j, k = _draw_distinct(graph.n, b, rng)
    e = graph.has_edges(i, j).astype(np.int64) + graph.has_edges(j, k) + graph.has_edges(i, k)
    counts = np.bincount(e, minlength=4)
    return TripleCensus(
        n=graph.n,
        n_triples=float(b),
        count_empty=float(counts[0]),
        count_edge=float(counts[1]),
        count_vee=float(counts[2]),
        count_triangle=float(counts[3]),
        p_hat=int(e.sum()) / (3 * b),
        scheme="triple",
    )


def census_for_plan(graph: Graph, plan: SamplingPlan, rng: np.random.Generator | None = None) -> TripleCensus:
    """Dispatch to the census the plan names; ``rng`` defaults to one seeded from ``plan.seed``."""
    if graph.n < 3:
        raise GraphTooSmall(f"census needs n >= 3 nodes, got n={graph.n}")
    plan.check(graph.n)
    if plan.variant == "full":
        return census_full(graph)
    if rng is None:
        rng = np.random.default_rng(plan.seed)
    if plan.variant == "node":
        return node_sample_census(graph, plan.size, rng)
    return triple_sample_census(graph, plan.size, rng)


def regime_diagnostics(plan: SamplingPlan, n: int, p_hat: float) -> dict[str, float]:
    """Advisory sizes of the quantities the asymptotic theory wants large.

    Nothing here is enforced; small values only warn that the chi-squared
    approximation may be rough.
    """
    out = {"n_p": n * p_hat}
    if plan.variant == "full":
        out["n2_p"] = n * n * p_hat
    elif plan.variant == "node":
        out["p3_m_n2"] = p_hat**3 * plan.size * n * n
        out["m"] = float(plan.size)
    else:
        out["b_p3"] = plan.size * p_hat**3
    return out
