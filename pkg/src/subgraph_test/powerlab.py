"""Seeded Monte Carlo experiments: null calibration and power curves.

Each replicate gets its own generator seeded by
``derive_seed(base_seed, grid_index, replicate_index)``; the grid index is the
position of the model in the config, so every sampling plan sees the same
graphs. Replicates are independent of scheduling, and results are gathered
in replicate order, so output files are bit-identical for any worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy import stats as sps

from .errors import ConfigError, DegenerateGraph
from .models import ER, ModelSpec, model_from_dict, snr_diagnostics
from .sampling import FULL, SamplingPlan
from .statistics import run_test

MASK64 = (1 << 64) - 1
CHUNK = 50

POWER_COLUMNS = (
    "model", "variant_params", "n", "plan", "plan_param", "alpha", "replicates",
    "snr_raw", "snr_adjusted", "reject_rate", "std_err", "mean_t2", "excluded",
)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, grid_index: int, replicate_index: int) -> int:
    """64-bit seed for one replicate.

    Chains the SplitMix64 finalizer over the three inputs. The finalizer is a
    bijection, so for fixed ``(base_seed, grid_index)`` distinct replicate
    indices always get distinct seeds. This mapping is part of the
    reproducibility contract and must not change.
    """
    if grid_index < 0 or replicate_index < 0:
        raise ValueError("grid and replicate indices must be >= 0")
    h = _splitmix64(base_seed & MASK64)
    h = _splitmix64(h ^ (grid_index & MASK64))
    return _splitmix64(h ^ (replicate_index & MASK64))


@dataclass(frozen=True)
class ExperimentConfig:
    models: tuple[ModelSpec, ...]
    plans: tuple[SamplingPlan, ...] = (FULL,)
    alpha: float = 0.05
    replicates: int = 1000
    base_seed: int = 0
    bins: int = 40
    name: str = ""
    # explicit (plan index, model index) pairs; None means every plan on every model
    cells: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        if not self.models:
            raise ConfigError("experiment grid is empty")
        if not self.plans:
            raise ConfigError("experiment needs at least one sampling plan")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.bins < 1:
            raise ConfigError(f"bins must be >= 1, got {self.bins}")
        if self.cells is not None:
            for pi, gi in self.cells:
                if not (0 <= pi < len(self.plans) and 0 <= gi < len(self.models)):
                    raise ConfigError(f"cell ({pi}, {gi}) is outside the plan/model lists")

    def grid(self) -> list[tuple[int, int]]:
        """(plan index, model index) pairs to run, in output order."""
        if self.cells is not None:
            return list(self.cells)
        return [(pi, gi) for pi in range(len(self.plans)) for gi in range(len(self.models))]

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ExperimentConfig:
        if not isinstance(d, dict):
            raise ConfigError("experiment config must be a JSON object")
        def plan_of(p: Any) -> SamplingPlan:
            return SamplingPlan.parse(p) if isinstance(p, str) else SamplingPlan.from_dict(p)

        cells = None
        if "runs" in d:
            # [{"model": {...}, "plan": "node:50"}, ...]: one model/plan pair per entry
            models, plans, cells = [], [], []
            for run in d["runs"]:
                if not isinstance(run, dict) or "model" not in run:
                    raise ConfigError("each entry of 'runs' needs a 'model' object")
                plan = plan_of(run.get("plan", "full"))
                if plan not in plans:
                    plans.append(plan)
                models.append(run["model"])
                cells.append((plans.index(plan), len(models) - 1))
            cells = tuple(cells)
        else:
            models = d.get("models", [d["model"]] if "model" in d else [])
            plans = [plan_of(p) for p in d.get("plans", [d.get("plan", "full")])]
        try:
            return cls(
                models=tuple(model_from_dict(m) for m in models),
                plans=tuple(plans),
                alpha=float(d.get("alpha", 0.05)),
                replicates=int(d.get("replicates", 1000)),
                base_seed=int(d.get("base_seed", 0)),
                bins=int(d.get("bins", 40)),
                name=str(d.get("name", "")),
                cells=cells,
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad experiment config: {exc}") from None

    @classmethod
    def load(cls, path: str | os.PathLike) -> ExperimentConfig:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name}
        if self.cells is None:
            out["models"] = [m.to_dict() for m in self.models]
            out["plans"] = [p.to_dict() for p in self.plans]
        else:
            out["runs"] = [
                {"model": self.models[gi].to_dict(), "plan": self.plans[pi].to_dict()} for pi, gi in self.cells
            ]
        out.update(alpha=self.alpha, replicates=self.replicates, base_seed=self.base_seed, bins=self.bins)
        return out


# -- replicate execution ----------------------------------------------------

def _run_chunk(task: tuple) -> list[tuple[float, float, float, bool] | None]:
    """Run replicates ``[start, stop)`` of one grid point; ``None`` marks a degenerate sample."""
    spec, plan, alpha, base_seed, grid_index, start, stop = task
    out: list[tuple[float, float, float, bool] | None] = []
    for r in range(start, stop):
        seed = derive_seed(base_seed, grid_index, r)
        rng = np.random.default_rng(seed)
        graph = spec.generate(rng).graph
        try:
            res = run_test(graph, alpha, plan.with_seed(seed), rng)
        except DegenerateGraph:
            out.append(None)
            continue
        s = res.stats
        out.append((s.z2, s.z3, s.t_squared, res.reject))
    return out


def _tasks(config: ExperimentConfig) -> list[tuple[tuple[int, int], list[tuple]]]:
    jobs = []
    for pi, gi in config.grid():
        spec, plan = config.models[gi], config.plans[pi]
        chunks = [
            (spec, plan, config.alpha, config.base_seed, gi, s, min(s + CHUNK, config.replicates))
            for s in range(0, config.replicates, CHUNK)
        ]
        jobs.append(((pi, gi), chunks))
    return jobs


def _execute(
    config: ExperimentConfig,
    workers: int,
    progress: Callable[[str], None] | None,
) -> dict[tuple[int, int], list]:
    jobs = _tasks(config)
    flat = [c for _, chunks in jobs for c in chunks]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, flat))
    else:
        results = []
        for k, task in enumerate(flat):
            results.append(_run_chunk(task))
            if progress and (k + 1) % max(1, len(flat) // 20) == 0:
                progress(f"{k + 1}/{len(flat)} chunks")
    out: dict[tuple[int, int], list] = {}
    it = iter(results)
    for key, chunks in jobs:
        rows: list = []
        for _ in chunks:
            rows.extend(next(it))
        out[key] = rows
        if progress and workers > 1:
            progress(f"grid point {key} done")
    return out


def default_workers() -> int:
    env = os.environ.get("SUBGRAPH_TEST_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SUBGRAPH_TEST_WORKERS must be an integer, got {env!r}") from None
    return 1


# -- power ------------------------------------------------------------------

@dataclass(frozen=True)
class PowerRow:
    model: str
    variant_params: str
    n: int
    plan: str
    plan_param: int | None
    alpha: float
    replicates: int
    snr_raw: float
    snr_adjusted: float
    reject_rate: float
    std_err: float
    mean_t2: float
    excluded: int


@dataclass
class PowerTable:
    rows: list[PowerRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(POWER_COLUMNS)
        for row in self.rows:
            w.writerow(["" if v is None else _fmt(v) for v in asdict(row).values()])
        return buf.getvalue()

    def write_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def read_csv(cls, path: str | os.PathLike) -> PowerTable:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = []
            for rec in csv.DictReader(fh):
                rows.append(PowerRow(
                    model=rec["model"],
                    variant_params=rec["variant_params"],
                    n=int(rec["n"]),
                    plan=rec["plan"],
                    plan_param=int(rec["plan_param"]) if rec["plan_param"] else None,
                    alpha=float(rec["alpha"]),
                    replicates=int(rec["replicates"]),
                    snr_raw=float(rec["snr_raw"]),
                    snr_adjusted=float(rec["snr_adjusted"]),
                    reject_rate=float(rec["reject_rate"]),
                    std_err=float(rec["std_err"]),
                    mean_t2=float(rec["mean_t2"]),
                    excluded=int(rec["excluded"]),
                ))
        return cls(rows)

    def select(self, plan: str | None = None, **params: Any) -> list[PowerRow]:
        out = []
        for row in self.rows:
            if plan is not None and row.plan != plan:
                continue
            kv = dict(item.split("=", 1) for item in row.variant_params.split(";") if item)
            if all(kv.get(k) == _fmt(v) for k, v in params.items()):
                out.append(row)
        return out


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _variant_params(spec: ModelSpec) -> str:
    return ";".join(f"{k}={_fmt(v)}" for k, v in spec.params().items())


def _summarize_power(spec: ModelSpec, plan: SamplingPlan, alpha: float, outcomes: list) -> PowerRow:
    kept = [o for o in outcomes if o is not None]
    excluded = len(outcomes) - len(kept)
    used = len(kept)
    rejections = sum(1 for o in kept if o[3])
    rate = rejections / used if used else math.nan
    se = math.sqrt(rate * (1 - rate) / used) if used else math.nan
    mean_t2 = math.fsum(o[2] for o in kept) / used if used else math.nan
    snr = snr_diagnostics(spec, plan)
    return PowerRow(
        model=spec.name,
        variant_params=_variant_params(spec),
        n=spec.n,
        plan=plan.variant,
        plan_param=plan.size,
        alpha=alpha,
        replicates=used,
        snr_raw=snr.raw,
        snr_adjusted=snr.adjusted,
        reject_rate=rate,
        std_err=se,
        mean_t2=mean_t2,
        excluded=excluded,
    )


def run_power(
    config: ExperimentConfig,
    workers: int = 1,
    progress: Callable[[str], None] | None = None,
) -> PowerTable:
    """Rejection rate of the level-``alpha`` test at every (plan, model) grid point."""
    for pi, gi in config.grid():
        config.plans[pi].check(config.models[gi].n)
    results = _execute(config, workers, progress)
    table = PowerTable()
    for pi, gi in config.grid():
        table.rows.append(_summarize_power(config.models[gi], config.plans[pi], config.alpha, results[(pi, gi)]))
    return table


# -- calibration ------------------------------------------------------------

def normal_cdf(x: np.ndarray) -> np.ndarray:
    return sps.norm.cdf(x)


def chi2_df2_cdf(x: np.ndarray) -> np.ndarray:
    return -np.expm1(-np.maximum(np.asarray(x, dtype=float), 0.0) / 2.0)


REFERENCE_CDFS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "z2": normal_cdf,
    "z3": normal_cdf,
    "t_squared": chi2_df2_cdf,
}


def ks_distance(sample: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov distance between the empirical law of ``sample`` and ``cdf``."""
    return float(sps.kstest(np.asarray(sample, dtype=float), cdf).statistic)


@dataclass(frozen=True)
class StatSummary:
    stat: str
    bins: list[dict[str, float]]
    mean: float | None
    var: float | None
    ks: float | None
    excluded: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def summarize_stat(name: str, values: Sequence[float], bins: int, excluded: int) -> StatSummary:
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return StatSummary(name, [], None, None, None, excluded)
    counts, edges = np.histogram(x, bins=bins)
    mass = counts / x.size
    hist = [{"lo": float(edges[i]), "hi": float(edges[i + 1]), "mass": float(mass[i])} for i in range(bins)]
    var = float(np.var(x, ddof=1)) if x.size > 1 else 0.0
    return StatSummary(
        stat=name,
        bins=hist,
        mean=math.fsum(x.tolist()) / x.size,
        var=var,
        ks=ks_distance(x, REFERENCE_CDFS[name]),
        excluded=excluded,
    )


@dataclass(frozen=True)
class CalibrationEntry:
    model: dict[str, Any]
    plan: dict[str, Any]
    replicates: int
    excluded: int
    corr_z2_z3: float | None
    stats: list[StatSummary]

    def stat(self, name: str) -> StatSummary:
        for s in self.stats:
            if s.stat == name:
                return s
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "plan": self.plan,
            "replicates": self.replicates,
            "excluded": self.excluded,
            "corr_z2_z3": self.corr_z2_z3,
            "stats": [s.to_dict() for s in self.stats],
        }


@dataclass
class CalibrationReport:
    entries: list[CalibrationEntry] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({"experiments": [e.to_dict() for e in self.entries]}, indent=1) + "\n"

    def write_json(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())


def run_calibration(
    config: ExperimentConfig,
    workers: int = 1,
    progress: Callable[[str], None] | None = None,
) -> CalibrationReport:
    """Null distributions of ``z2``, ``z3`` and ``t_squared`` over Erdos-Renyi graphs.

    Degenerate replicates (empty or complete samples) are excluded and counted.
    """
    for spec in config.models:
        if not isinstance(spec, ER):
            raise ConfigError(f"calibration runs on Erdos-Renyi models only, got {spec.name!r}")
    for pi, gi in config.grid():
        config.plans[pi].check(config.models[gi].n)
    results = _execute(config, workers, progress)
    report = CalibrationReport()
    for pi, gi in config.grid():
        spec, plan = config.models[gi], config.plans[pi]
        outcomes = results[(pi, gi)]
        kept = [o for o in outcomes if o is not None]
        excluded = len(outcomes) - len(kept)
        cols = {name: [o[k] for o in kept] for k, name in enumerate(("z2", "z3", "t_squared"))}
        corr = None
        if len(kept) > 2:
            z2, z3 = np.asarray(cols["z2"]), np.asarray(cols["z3"])
            if z2.std() > 0 and z3.std() > 0:
                corr = float(np.corrcoef(z2, z3)[0, 1])
        report.entries.append(CalibrationEntry(
            model=spec.to_dict(),
            plan=plan.to_dict(),
            replicates=len(kept),
            excluded=excluded,
            corr_z2_z3=corr,
            stats=[summarize_stat(name, cols[name], config.bins, excluded) for name in cols],
        ))
    return report


# -- curve comparison -------------------------------------------------------

def alignment_violations(
    curves: dict[str, Iterable[PowerRow]],
    slack: float = 0.1,
    n_se: float = 3.0,
) -> list[tuple[str, str, float, float, float]]:
    """Compare power curves indexed by adjusted SNR.

    For every ordered pair of curves and every point of the first that lies
    inside the abscissa range of the second, the second curve's power and
    standard error are linearly interpolated. A point violates alignment when
    ``|diff| > slack + n_se * sqrt(se_1^2 + se_2^2)``. Returns
    ``(curve_a, curve_b, x, diff, allowed)`` for each violation.
    """
    prepared = {}
    for name, rows in curves.items():
        rows = sorted(rows, key=lambda r: r.snr_adjusted)
        prepared[name] = (
            np.array([r.snr_adjusted for r in rows]),
            np.array([r.reject_rate for r in rows]),
            np.array([r.std_err for r in rows]),
        )
    bad = []
    for a, (xa, ya, sa) in prepared.items():
        for b, (xb, yb, sb) in prepared.items():
            if a == b:
                continue
            inside = (xa >= xb[0]) & (xa <= xb[-1])
            for x, y, s in zip(xa[inside], ya[inside], sa[inside]):
                yb_x = float(np.interp(x, xb, yb))
                sb_x = float(np.interp(x, xb, sb))
                allowed = slack + n_se * math.hypot(s, sb_x)
                diff = abs(y - yb_x)
                if diff > allowed:
                    bad.append((a, b, float(x), diff, allowed))
    return bad


def monotone_violations(rows: Sequence[PowerRow], n_se: float = 3.0) -> list[tuple[int, float, float]]:
    """Consecutive drops in power larger than ``n_se`` combined standard errors."""
    bad = []
    for k in range(1, len(rows)):
        drop = rows[k - 1].reject_rate - rows[k].reject_rate
        allowed = n_se * math.hypot(rows[k - 1].std_err, rows[k].std_err)
        if drop > allowed:
            bad.append((k, drop, allowed))
    return bad
