"""Random graph models: the Erdos-Renyi null and structured alternatives.

All models draw every pair ``i < j`` independently as Bernoulli(p_ij):

* ``ER``          p_ij = p
* ``SBM2``        two communities, smaller one of size round(n * gamma)
* ``SBMk``        k communities with sizes within one of n / k
* ``SBMLabels``   arbitrary community labels (or sizes)
* ``Config``      p_ij = theta_i * theta_j (fixed theta)
* ``ConfigBeta``  as ``Config`` with theta_i ~ Beta(a, (1-h)/h * a) redrawn per graph
* ``Latent``      p_ij = sum_l g_l(xi_il) g_l(xi_jl), xi uniform, g_l step functions

Every model has ``generate(rng)`` returning a :class:`Realization` and
round-trips through ``to_dict`` / :func:`model_from_dict`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    BadFeatureFunction,
    BadParameter,
    BadPartition,
    BadProbability,
    BadTheta,
    ConfigError,
    EmptyVector,
    ModelError,
)
from .graph import Graph, _from_canonical
from .sampling import FULL, SamplingPlan


class Realization(NamedTuple):
    graph: Graph
    latent: dict[str, Any]


@lru_cache(maxsize=8)
def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    iu, ju = np.triu_indices(n, k=1)
    iu, ju = iu.astype(np.int64), ju.astype(np.int64)
    iu.setflags(write=False)
    ju.setflags(write=False)
    return iu, ju


def _check_prob(name: str, x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0 or math.isnan(x):
        raise BadProbability(f"{name}={x} is not a probability in [0, 1]")
    return x


def bernoulli_graph(n: int, probs: np.ndarray | float, rng: np.random.Generator) -> Graph:
    """Sample each pair ``i < j`` (row-major upper triangle order) with its probability."""
    iu, ju = _pairs(n)
    probs = np.asarray(probs, dtype=float)
    if probs.size and (np.any(probs < 0) or np.any(probs > 1) or np.any(np.isnan(probs))):
        raise BadProbability("edge probabilities must lie in [0, 1]")
    hit = rng.random(iu.size) < probs
    return _from_canonical(n, iu[hit], ju[hit])


def gen_er(n: int, p: float, rng: np.random.Generator) -> Graph:
    if n < 0:
        raise BadParameter(f"n must be >= 0, got {n}")
    return bernoulli_graph(n, _check_prob("p", p), rng)


def sbm_probs(labels: np.ndarray, a: float, b: float) -> np.ndarray:
    iu, ju = _pairs(labels.size)
    return np.where(labels[iu] == labels[ju], a, b)


def balanced_sizes(n: int, k: int) -> list[int]:
    if not 1 <= k <= max(n, 1):
        raise BadPartition(f"cannot split n={n} nodes into k={k} nonempty communities")
    q, r = divmod(n, k)
    return [q + 1 if c < r else q for c in range(k)]


def labels_from_sizes(sizes: Sequence[int]) -> np.ndarray:
    if any(s < 0 for s in sizes):
        raise BadPartition(f"community sizes must be >= 0, got {list(sizes)}")
    return np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)


def _clipped(x: float, clip: bool) -> float:
    return min(1.0, max(0.0, x)) if clip else x


@dataclass(frozen=True)
class ER:
    n: int
    p: float

    name = "er"

    def __post_init__(self) -> None:
        _check_prob("p", self.p)
        if self.n < 0:
            raise BadParameter(f"n must be >= 0, got {self.n}")

    def generate(self, rng: np.random.Generator) -> Realization:
        return Realization(gen_er(self.n, self.p, rng), {})

    def params(self) -> dict[str, Any]:
        return {"p": self.p}

    def to_dict(self) -> dict[str, Any]:
        return {"model": self.name, "n": self.n, "p": self.p}


@dataclass(frozen=True)
class _SBMBase:
    """Shared handling of (a, b); ``clip=True`` clamps them into [0, 1] explicitly."""

    def _ab(self) -> tuple[float, float]:
        a = _check_prob("a", _clipped(self.a, self.clip))
        b = _check_prob("b", _clipped(self.b, self.clip))
        return a, b

    @property
    def a_eff(self) -> float:
        return self._ab()[0]

    @property
    def b_eff(self) -> float:
        return self._ab()[1]

    def labels(self, rng: np.random.Generator | None = None) -> np.ndarray:
        raise NotImplementedError

    def generate(self, rng: np.random.Generator) -> Realization:
        graph, labels = gen_sbm(self, rng)
        return Realization(graph, {"labels": labels.tolist()})


@dataclass(frozen=True)
class SBM2(_SBMBase):
    n: int
    gamma: float
    a: float
    b: float
    clip: bool = False

    name = "sbm2"

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma <= 0.5:
            raise BadPartition(f"gamma must lie in (0, 1/2], got {self.gamma}")
        self._ab()

    @property
    def sizes(self) -> tuple[int, int]:
        # round(n * gamma), exact halves go to the smaller community
        small = math.ceil(self.n * self.gamma - 0.5)
        return small, self.n - small

    def labels(self, rng: np.random.Generator | None = None) -> np.ndarray:
        return labels_from_sizes(self.sizes)

    def params(self) -> dict[str, Any]:
        return {"gamma": self.gamma, "a": self.a_eff, "b": self.b_eff}

    def to_dict(self) -> dict[str, Any]:
        d = {"model": self.name, "n": self.n, "gamma": self.gamma, "a": self.a, "b": self.b}
        if self.clip:
            d["clip"] = True
        return d


@dataclass(frozen=True)
class SBMk(_SBMBase):
    n: int
    k: int
    a: float
    b: float
    balanced: bool = True
    clip: bool = False

    name = "sbmk"

    def __post_init__(self) -> None:
        balanced_sizes(self.n, self.k)
        self._ab()

    def labels(self, rng: np.random.Generator | None = None) -> np.ndarray:
        if self.balanced:
            return labels_from_sizes(balanced_sizes(self.n, self.k))
        if rng is None:
            raise BadPartition("unbalanced labels need a random generator")
        return rng.integers(0, self.k, size=self.n)

    def params(self) -> dict[str, Any]:
        return {"k": self.k, "a": self.a_eff, "b": self.b_eff, "balanced": self.balanced}

    def to_dict(self) -> dict[str, Any]:
        d = {"model": self.name, "n": self.n, "k": self.k, "a": self.a, "b": self.b, "balanced": self.balanced}
        if self.clip:
            d["clip"] = True
        return d


@dataclass(frozen=True)
class SBMLabels(_SBMBase):
    community: tuple[int, ...]
    a: float
    b: float
    clip: bool = False

    name = "sbm_labels"

    def __post_init__(self) -> None:
        if any(int(c) < 0 for c in self.community):
            raise BadPartition("community labels must be nonnegative integers")
        self._ab()

    @classmethod
    def from_sizes(cls, sizes: Sequence[int], a: float, b: float, clip: bool = False) -> SBMLabels:
        return cls(tuple(labels_from_sizes(sizes).tolist()), a, b, clip)

    @property
    def n(self) -> int:
        return len(self.community)

    @property
    def sizes(self) -> list[int]:
        return np.bincount(np.asarray(self.community, dtype=np.int64)).tolist() if self.community else []

    def labels(self, rng: np.random.Generator | None = None) -> np.ndarray:
        return np.asarray(self.community, dtype=np.int64)

    def params(self) -> dict[str, Any]:
        return {"sizes": "/".join(map(str, self.sizes)), "a": self.a_eff, "b": self.b_eff}

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"model": self.name, "labels": list(self.community), "a": self.a, "b": self.b}
        if self.clip:
            d["clip"] = True
        return d


def gen_sbm(spec: SBM2 | SBMk | SBMLabels, rng: np.random.Generator) -> tuple[Graph, np.ndarray]:
    """Sample a block model; returns the graph and the community labels used."""
    a, b = spec._ab()
    labels = spec.labels(rng)
    return bernoulli_graph(labels.size, sbm_probs(labels, a, b), rng), labels


def _check_theta(theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1:
        raise BadTheta("theta must be a vector")
    if np.any(np.isnan(theta)) or np.any(theta < 0) or np.any(theta > 1):
        raise BadTheta("theta entries must lie in [0, 1]")
    return theta


def gen_config(theta: Sequence[float] | np.ndarray, rng: np.random.Generator) -> Graph:
    """Rank-one model ``p_ij = theta_i * theta_j``."""
    theta = _check_theta(theta)
    iu, ju = _pairs(theta.size)
    return bernoulli_graph(theta.size, theta[iu] * theta[ju], rng)


def sample_beta_theta(n: int, h: float, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``theta_i ~ Beta(alpha, (1-h)/h * alpha)`` so that ``E theta_i = h``."""
    if not 0.0 < h < 1.0:
        raise BadParameter(f"h must lie in (0, 1), got {h}")
    if not alpha > 0:
        raise BadParameter(f"alpha must be > 0, got {alpha}")
    return rng.beta(alpha, (1.0 - h) / h * alpha, size=n)


@dataclass(frozen=True)
class Config:
    theta: tuple[float, ...]

    name = "config"

    def __post_init__(self) -> None:
        _check_theta(np.asarray(self.theta, dtype=float))

    @property
    def n(self) -> int:
        return len(self.theta)

    def generate(self, rng: np.random.Generator) -> Realization:
        return Realization(gen_config(self.theta, rng), {"theta": list(self.theta)})

    def params(self) -> dict[str, Any]:
        return {"rho": max(self.theta, default=0.0) ** 2, "delta": v_theta(self.theta)}

    def to_dict(self) -> dict[str, Any]:
        return {"model": self.name, "theta": list(self.theta)}


@dataclass(frozen=True)
class ConfigBeta:
    """Configuration model whose theta is redrawn from a Beta law for every graph."""

    n: int
    h: float
    alpha: float

    name = "config"

    def __post_init__(self) -> None:
        if not 0.0 < self.h < 1.0:
            raise BadParameter(f"h must lie in (0, 1), got {self.h}")
        if not self.alpha > 0:
            raise BadParameter(f"alpha must be > 0, got {self.alpha}")

    @property
    def beta(self) -> float:
        return (1.0 - self.h) / self.h * self.alpha

    def generate(self, rng: np.random.Generator) -> Realization:
        theta = sample_beta_theta(self.n, self.h, self.alpha, rng)
        return Realization(gen_config(theta, rng), {"theta": theta.tolist()})

    def population_delta(self) -> float:
        """Deviation functional with sample moments replaced by Beta moments."""
        h, a = self.h, self.alpha
        var = h * h * (1.0 - h) / (a + h)
        m2 = var + h * h
        return var * (m2 * m2 + m2 * h * h + h**4)

    def params(self) -> dict[str, Any]:
        return {"h": self.h, "alpha": self.alpha}

    def to_dict(self) -> dict[str, Any]:
        return {"model": self.name, "n": self.n, "h": self.h, "alpha": self.alpha}


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on ``[0, 1]`` over ``len(values)`` equal cells."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise BadFeatureFunction("a step function needs at least one cell")
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise BadFeatureFunction("step function values must be finite and nonnegative")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        g = len(self.values)
        cell = np.minimum((np.asarray(x) * g).astype(np.int64), g - 1)
        return np.asarray(self.values, dtype=float)[cell]

    @property
    def sup(self) -> float:
        return max(self.values)

    def mean_exact(self) -> Fraction:
        return sum(map(Fraction, self.values), Fraction(0)) / len(self.values)

    def mean_sq_exact(self) -> Fraction:
        return sum((Fraction(v) ** 2 for v in self.values), Fraction(0)) / len(self.values)


@dataclass(frozen=True)
class Latent:
    n: int
    functions: tuple[StepFunction, ...]

    name = "latent"

    def __post_init__(self) -> None:
        if not self.functions:
            raise BadFeatureFunction("need at least one feature function")
        if self.rho > 1.0 + 1e-12:
            raise BadFeatureFunction(f"sum of squared sup norms is {self.rho:.6g} > 1")

    @classmethod
    def from_values(cls, n: int, values: Sequence[Sequence[float]]) -> Latent:
        return cls(n, tuple(StepFunction(tuple(float(x) for x in v)) for v in values))

    @property
    def rank(self) -> int:
        return len(self.functions)

    @property
    def rho(self) -> float:
        return sum(g.sup**2 for g in self.functions)

    def generate(self, rng: np.random.Generator) -> Realization:
        graph, xi = gen_latent(self, rng)
        return Realization(graph, {"xi": xi.tolist()})

    def params(self) -> dict[str, Any]:
        return {"r": self.rank, "rho": self.rho, "delta": v_g(self)}

    def to_dict(self) -> dict[str, Any]:
        return {"model": self.name, "n": self.n, "g": [list(g.values) for g in self.functions]}


def gen_latent(spec: Latent, rng: np.random.Generator) -> tuple[Graph, np.ndarray]:
    """Sample latent coordinates ``xi`` (n x r, uniform) and the graph they induce."""
    xi = rng.random((spec.n, spec.rank))
    feats = np.column_stack([g(xi[:, l]) for l, g in enumerate(spec.functions)])
    iu, ju = _pairs(spec.n)
    probs = np.einsum("kl,kl->k", feats[iu], feats[ju])
    # rounding can push a sum of products a hair above 1 when rho == 1
    probs = np.minimum(probs, 1.0)
    return bernoulli_graph(spec.n, probs, rng), xi


ModelSpec = Union[ER, SBM2, SBMk, SBMLabels, Config, ConfigBeta, Latent]


def v_theta(theta: Sequence[float] | np.ndarray) -> float:
    """``(mean theta^2)^3 - (mean theta)^6``.

    Evaluated as ``var * (m2^2 + m2 m1^2 + m1^4)``, the factored form of the
    difference of cubes, so constants give exactly zero and the result is
    never negative.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise EmptyVector("theta is empty")
    var = float(np.var(theta - theta[0]))
    m1 = float(np.mean(theta))
    m2 = var + m1 * m1
    return var * (m2 * m2 + m2 * m1 * m1 + m1**4)


def v_g(spec: Latent | Sequence[StepFunction]) -> float:
    """``Tr[(E g g^T)^3] - |E g|^6`` for independent uniform coordinates.

    Computed in exact rational arithmetic from the step values, so constant
    feature functions give exactly zero.
    """
    fns = spec.functions if isinstance(spec, Latent) else tuple(spec)
    if not fns:
        raise BadFeatureFunction("need at least one feature function")
    mu = [g.mean_exact() for g in fns]
    r = len(fns)
    mat = [[fns[i].mean_sq_exact() if i == j else mu[i] * mu[j] for j in range(r)] for i in range(r)]

    def mul(x, y):
        return [[sum((x[i][k] * y[k][j] for k in range(r)), Fraction(0)) for j in range(r)] for i in range(r)]

    cube = mul(mul(mat, mat), mat)
    trace = sum((cube[i][i] for i in range(r)), Fraction(0))
    norm_sq = sum((m * m for m in mu), Fraction(0))
    return float(trace - norm_sq**3)


@dataclass(frozen=True)
class SnrDiagnostics:
    """Signal-to-noise ratio of a model, raw and adjusted for a sampling plan."""

    raw: float
    adjusted: float
    formula: str
    extras: dict[str, float] = field(default_factory=dict)


def _cbrt(x: float) -> float:
    return float(np.cbrt(x))


def _ratio(delta: float, noise: float) -> float:
    return delta * delta / noise if noise > 0 else 0.0


def snr_diagnostics(spec: ModelSpec, plan: SamplingPlan = FULL) -> SnrDiagnostics:
    """Signal-to-noise ratios governing power, with ``n`` replaced per plan.

    Block models use ``n (a-b)^2 / (a+b)`` (divided by ``k^(4/3)`` for the
    balanced k-community model); node sampling replaces ``n`` with
    ``(m n^2)^(1/3)`` and triple sampling with ``b^(1/3)``.
    Configuration and latent models use ``delta^2 / noise`` where ``noise`` is
    the order of the variance of the triangle frequency.
    """
    n = spec.n
    if plan.variant == "node":
        plan.check(n)
    if isinstance(spec, ER):
        return SnrDiagnostics(0.0, 0.0, "er")

    if isinstance(spec, (SBM2, SBMk, SBMLabels)):
        a, b = spec._ab()
        base = (a - b) ** 2 / (a + b) if a + b > 0 else 0.0
        if isinstance(spec, SBMk):
            base /= spec.k ** (4.0 / 3.0)
        if plan.variant == "full":
            scale = float(n)
        elif plan.variant == "node":
            scale = _cbrt(plan.size * n * n)
        else:
            scale = _cbrt(plan.size)
        return SnrDiagnostics(n * base, scale * base, "sbm_k" if isinstance(spec, SBMk) else "sbm")

    if isinstance(spec, (Config, ConfigBeta)):
        if isinstance(spec, Config):
            rho, delta = spec.params()["rho"], v_theta(spec.theta)
        else:
            rho, delta = spec.h**2, spec.population_delta()
        raw = _ratio(delta, rho**3 / n**3 + rho**5 / n**2)
        formula = "config"
    elif isinstance(spec, Latent):
        rho, delta = spec.rho, v_g(spec)
        raw = _ratio(delta, rho**3 / n**3 + rho**6 / n)
        formula = "latent"
    else:
        raise BadParameter(f"unsupported model {spec!r}")

    if plan.variant == "full":
        adjusted = raw
    elif plan.variant == "node":
        m = plan.size
        adjusted = _ratio(delta, rho**3 / (m * n * n) + rho**6 / m)
    else:
        adjusted = _ratio(delta, rho**3 / plan.size + rho**6 / n)
    return SnrDiagnostics(raw, adjusted, formula, {"rho": rho, "delta": delta})


def model_from_dict(d: dict[str, Any]) -> ModelSpec:
    """Build a model from its JSON form; raises :class:`ConfigError` on bad input."""
    if not isinstance(d, dict):
        raise ConfigError("model spec must be a JSON object")
    try:
        kind = d["model"]
        clip = bool(d.get("clip", False))
        if kind == "er":
            return ER(int(d["n"]), float(d["p"]))
        if kind == "sbm2":
            return SBM2(int(d["n"]), float(d["gamma"]), float(d["a"]), float(d["b"]), clip)
        if kind == "sbmk":
            return SBMk(int(d["n"]), int(d["k"]), float(d["a"]), float(d["b"]), bool(d.get("balanced", True)), clip)
        if kind == "sbm_labels":
            if "labels" in d:
                return SBMLabels(tuple(int(x) for x in d["labels"]), float(d["a"]), float(d["b"]), clip)
            return SBMLabels.from_sizes([int(s) for s in d["sizes"]], float(d["a"]), float(d["b"]), clip)
        if kind == "config":
            if "theta" in d:
                return Config(tuple(float(x) for x in d["theta"]))
            return ConfigBeta(int(d["n"]), float(d["h"]), float(d["alpha"]))
        if kind == "latent":
            return Latent.from_values(int(d["n"]), d["g"])
    except KeyError as exc:
        raise ConfigError(f"model spec {d.get('model')!r} is missing field {exc.args[0]!r}") from None
    except ModelError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad model spec: {exc}") from None
    raise ConfigError(f"unknown model {d.get('model')!r}")
