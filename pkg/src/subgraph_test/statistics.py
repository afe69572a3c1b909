"""Relation statistics and the chi-squared Erdos-Renyi test.

Under an Erdos-Renyi graph the frequency of each 3-node shape should match
the plug-in value computed from the edge frequency ``p``::

    empty  (1-p)^3      edge  3p(1-p)^2      vee  3p^2(1-p)      triangle  p^3

``t_i`` is plug-in minus observed for shape ``i``. The test standardizes
``t2`` and ``t3`` by the diagonal of their null covariance and sums their
squares, which is approximately chi-squared with two degrees of freedom for
sparse null graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .census import TripleCensus
from .errors import DegenerateGraph
from .graph import Graph
from .sampling import FULL, SamplingPlan, census_for_plan, effective_n


@dataclass(frozen=True)
class SigmaP:
    """Null covariance of ``(t2, t3)`` after scaling by ``sqrt(C(n, 3))``."""

    s22: float
    s23: float
    s33: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.s22, self.s23], [self.s23, self.s33]])

    @property
    def det(self) -> float:
        return self.s22 * self.s33 - self.s23 * self.s23


@dataclass(frozen=True)
class RelationStats:
    t0: float
    t1: float
    t2: float
    t3: float
    p_hat: float
    n_eff: float
    z2: float
    z3: float
    t_squared: float
    p_value: float

    @property
    def t(self) -> tuple[float, float, float, float]:
        return (self.t0, self.t1, self.t2, self.t3)


@dataclass(frozen=True)
class TestResult:
    stats: RelationStats
    alpha: float
    critical_value: float
    reject: bool
    n: int
    m_edges: int
    plan: SamplingPlan

    __test__ = False  # not a pytest class

    def to_dict(self) -> dict[str, Any]:
        s = self.stats
        return {
            "n": self.n,
            "m_edges": self.m_edges,
            "p_hat": s.p_hat,
            "t": list(s.t),
            "z2": s.z2,
            "z3": s.z3,
            "t_squared": s.t_squared,
            "p_value": s.p_value,
            "alpha": self.alpha,
            "reject": self.reject,
            "plan": self.plan.to_dict(),
            "seed": self.plan.seed,
        }


def relation_stats(census: TripleCensus) -> tuple[float, float, float, float]:
    """Plug-in minus observed frequency for the empty, edge, V and triangle shapes.

    Evaluated in exact rational arithmetic on the stored counts and ``p_hat``
    and rounded once, so the four values sum to zero up to a few ulps of the
    largest one even when they are tiny next to the frequencies themselves.
    """
    p = Fraction(census.p_hat)
    q = 1 - p
    total = Fraction(census.n_triples)
    plug = (q**3, 3 * p * q * q, 3 * p * p * q, p**3)
    return tuple(float(e - Fraction(c) / total) for e, c in zip(plug, census.counts))


def _var_t2(p: float) -> float:
    q = 1.0 - p
    return 3 * p**2 * q**2 * (1 - 3 * p) ** 2 + 9 * p**3 * q**3


def _var_t3(p: float) -> float:
    q = 1.0 - p
    return p**3 * q**3 + 3 * p**4 * q**2


def sigma_p(p: float) -> SigmaP:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    q = 1.0 - p
    return SigmaP(s22=_var_t2(p), s23=-6 * p**4 * q**2, s33=_var_t3(p))


def chi_squared(t2: float, t3: float, p_hat: float, n_eff: float) -> tuple[float, float, float]:
    """Return ``(t_squared, z2, z3)`` with variances evaluated at ``p_hat``.

    Raises:
        DegenerateGraph: ``p_hat`` is 0 or 1 (empty or complete sample).
    """
    if not 0.0 < p_hat < 1.0:
        raise DegenerateGraph(f"edge frequency p_hat={p_hat} is degenerate; the statistic needs 0 < p_hat < 1")
    if n_eff <= 0:
        raise ValueError(f"n_eff must be positive, got {n_eff}")
    root = math.sqrt(n_eff)
    z2 = root * t2 / math.sqrt(_var_t2(p_hat))
    z3 = root * t3 / math.sqrt(_var_t3(p_hat))
    return z2 * z2 + z3 * z3, z2, z3


def p_value_chi2_df2(t_squared: float) -> float:
    """Survival function of the chi-squared law with two degrees of freedom."""
    if t_squared < 0:
        raise ValueError(f"t_squared must be >= 0, got {t_squared}")
    return math.exp(-t_squared / 2.0)


def critical_value(alpha: float) -> float:
    """``C`` with ``P(chi2_2 > C) = alpha``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return -2.0 * math.log(alpha)


def stats_from_census(census: TripleCensus, n_eff: float) -> RelationStats:
    t0, t1, t2, t3 = relation_stats(census)
    t_sq, z2, z3 = chi_squared(t2, t3, census.p_hat, n_eff)
    return RelationStats(
        t0=t0, t1=t1, t2=t2, t3=t3,
        p_hat=census.p_hat,
        n_eff=n_eff,
        z2=z2, z3=z3,
        t_squared=t_sq,
        p_value=p_value_chi2_df2(t_sq),
    )


def compute_stats(graph: Graph, plan: SamplingPlan = FULL, rng: np.random.Generator | None = None) -> RelationStats:
    census = census_for_plan(graph, plan, rng)
    return stats_from_census(census, effective_n(plan, graph.n))


def run_test(
    graph: Graph,
    alpha: float = 0.05,
    plan: SamplingPlan = FULL,
    rng: np.random.Generator | int | None = None,
) -> TestResult:
    """Level-``alpha`` test of the Erdos-Renyi hypothesis.

    Rejects when the chi-squared(2) p-value falls below ``alpha``, which is
    ``t_squared > -2 ln(alpha)`` up to rounding. ``rng`` (a generator or an integer seed) drives the
    sampled plans; by default a generator seeded with ``plan.seed`` is used.
    """
    crit = critical_value(alpha)
    if isinstance(rng, (int, np.integer)):
        plan = plan.with_seed(int(rng))
        rng = None
    stats = compute_stats(graph, plan, rng)
    return TestResult(
        stats=stats,
        alpha=alpha,
        critical_value=crit,
        reject=stats.p_value < alpha,
        n=graph.n,
        m_edges=graph.edge_count,
        plan=plan,
    )


def default_threshold(n: int) -> float:
    """Slowly diverging default threshold ``2 ln ln n`` (needs n >= 3)."""
    return 2.0 * math.log(math.log(n))


def threshold_decision(t_squared: float, c_n: float) -> bool:
    if c_n <= 0:
        raise ValueError(f"threshold must be positive, got {c_n}")
    return t_squared > c_n


def divergent_threshold_test(
    graph: Graph,
    c_n: float | None = None,
    plan: SamplingPlan = FULL,
    rng: np.random.Generator | int | None = None,
) -> bool:
    """Reject when ``t_squared > c_n``; ``c_n`` defaults to :func:`default_threshold`.

    The threshold should grow with ``n`` so that the Type-I error vanishes.
    No specific rate is prescribed; the default is one reasonable choice.
    """
    if isinstance(rng, (int, np.integer)):
        plan = plan.with_seed(int(rng))
        rng = None
    if c_n is None:
        c_n = default_threshold(graph.n)
    return threshold_decision(compute_stats(graph, plan, rng).t_squared, c_n)
