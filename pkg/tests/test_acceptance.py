"""Acceptance criteria, one test per criterion.

The Monte Carlo experiments run once per session through the CLI with one
worker; criterion 8 reruns them with two workers and compares file bytes.
"""

import json
import math
import time
from math import comb
from pathlib import Path

import numpy as np
import pytest

from subgraph_test import (
    FULL,
    SamplingPlan,
    census_brute,
    census_full,
    f_norm,
    graph_from_edges,
    relation_stats,
    run_test,
    v_g,
    v_theta,
)
from subgraph_test.cli import main
from subgraph_test.errors import DegenerateGraph, GraphTooSmall
from subgraph_test.models import StepFunction, gen_er
from subgraph_test.powerlab import PowerTable, alignment_violations, monotone_violations

from conftest import random_graphs

PRESETS = Path(__file__).resolve().parent.parent / "presets"

# (cli command, preset, output suffix)
EXPERIMENTS = {
    "null_calibration": ("calibrate", ".json"),
    "type1": ("power", ".csv"),
    "fig2_gamma05": ("power", ".csv"),
    "fig3": ("power", ".csv"),
    "fig8": ("power", ".csv"),
    "fig9": ("power", ".csv"),
}


def _run_all(out_dir, workers):
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, (cmd, suffix) in EXPERIMENTS.items():
        path = out_dir / f"{name}{suffix}"
        code = main([cmd, str(PRESETS / f"{name}.json"), "-o", str(path), "--workers", str(workers)])
        assert code == 0, f"{cmd} {name} exited with {code}"
        paths[name] = path
    return paths


@pytest.fixture(scope="module")
def outputs(tmp_path_factory):
    return _run_all(tmp_path_factory.mktemp("acceptance") / "w1", workers=1)


def _calibration(paths, n, p):
    data = json.loads(paths["null_calibration"].read_text())
    for entry in data["experiments"]:
        if entry["model"]["n"] == n and entry["model"]["p"] == p:
            return entry, {s["stat"]: s for s in entry["stats"]}
    raise KeyError((n, p))


def test_criterion_1_oracle_equivalence(record_property):
    start = time.perf_counter()
    graphs = list(random_graphs(200, n_max=60, seed=2024))
    mismatches = sum(census_full(g) != census_brute(g) for g in graphs)
    integral = all(float(x).is_integer() for g in graphs for x in census_full(g).counts)
    ps = {round(g.edge_count / comb(g.n, 2), 1) for g in graphs}
    elapsed = time.perf_counter() - start
    record_property("detail", f"{len(graphs)} graphs, {mismatches} mismatches, {elapsed:.1f}s, edge freq spread {min(ps)}..{max(ps)}")
    assert mismatches == 0 and integral
    assert elapsed < 30


def test_criterion_2_identity_suite(record_property):
    start = time.perf_counter()
    failures = []
    rng = np.random.default_rng(7)
    for g in random_graphs(150, n_max=40, seed=77):
        c = census_full(g)
        t = relation_stats(c)
        if abs(sum(t)) > 1e-12 * max(abs(x) for x in t):
            failures.append(("t-sum", g.n))
        if sum(c.counts) != comb(g.n, 3):
            failures.append(("shape-sum", g.n))
        d = census_full(g.complement())
        if d.counts != c.counts[::-1] or abs(d.p_hat - (1 - c.p_hat)) > 1e-15:
            failures.append(("complement", g.n))
    for _ in range(2000):
        theta = rng.random(int(rng.integers(1, 30)))
        if v_theta(theta) < 0:
            failures.append(("v_theta<0", theta.size))
        fns = [StepFunction(tuple(rng.random(int(rng.integers(1, 4))).round(2).tolist())) for _ in range(int(rng.integers(1, 3)))]
        if v_g(fns) < 0:
            failures.append(("v_g<0", len(fns)))
    for c in (0.0, 0.1, 0.37, 1.0):
        if v_theta([c] * 9) != 0 or v_g([StepFunction((c, c, c)), StepFunction((c / 2,))]) != 0:
            failures.append(("constant", c))
    for n in range(3, 200):
        if f_norm(n, n) != comb(n, 3):
            failures.append(("f_norm", n))
    elapsed = time.perf_counter() - start
    record_property("detail", f"{len(failures)} failures, {elapsed:.1f}s")
    assert not failures, failures[:5]
    assert elapsed < 10


def test_criterion_3_null_calibration(outputs, record_property):
    sparse, stats = _calibration(outputs, 300, 0.05)
    _, dense_stats = _calibration(outputs, 100, 0.5)
    t2 = stats["t_squared"]
    ks_dense = dense_stats["t_squared"]["ks"]
    record_property(
        "detail",
        f"mean T2={t2['mean']:.3f}, KS={t2['ks']:.4f}, corr={sparse['corr_z2_z3']:.3f}, KS(100,0.5)={ks_dense:.4f}",
    )
    assert sparse["replicates"] == 1000
    assert 1.75 <= t2["mean"] <= 2.25
    assert t2["ks"] < 0.05
    assert abs(sparse["corr_z2_z3"]) < 0.1
    assert ks_dense > t2["ks"]


def test_criterion_4_type_one_error(outputs, record_property):
    rows = PowerTable.read_csv(outputs["type1"]).rows
    rates = {f"{r.plan}:{r.plan_param}" if r.plan_param else r.plan: r.reject_rate for r in rows}
    record_property("detail", ", ".join(f"{k}={v:.3f}" for k, v in rates.items()))
    assert {r.plan for r in rows} == {"full", "node", "triple"}
    assert all(r.replicates == 1000 for r in rows)
    assert all(0.03 <= v <= 0.07 for v in rates.values())


def test_criterion_5_two_community_power(outputs, record_property):
    rows = PowerTable.read_csv(outputs["fig2_gamma05"]).rows
    drops = monotone_violations(rows)
    record_property(
        "detail",
        f"SNR(i=1)={rows[0].snr_raw:.3f}, power(i=1)={rows[0].reject_rate:.3f}, "
        f"power(i=25)={rows[-1].reject_rate:.3f}, drops beyond 3 SE={len(drops)}",
    )
    assert len(rows) == 25
    assert rows[0].snr_raw == pytest.approx(2.0, rel=1e-9)
    assert not drops
    assert rows[-1].reject_rate >= 0.95
    assert rows[0].reject_rate <= 0.3


def test_criterion_6_k_community_power(outputs, record_property):
    rows = PowerTable.read_csv(outputs["fig3"]).rows
    power = {int(dict(kv.split("=") for kv in r.variant_params.split(";"))["k"]): r.reject_rate for r in rows}
    record_property("detail", ", ".join(f"k={k}:{v:.3f}" for k, v in power.items()))
    assert len(rows) == 10
    assert power[2] >= 0.95 and power[3] >= 0.95
    assert abs(power[5] - 0.8) <= 0.1
    assert power[20] <= 0.1


@pytest.mark.parametrize("preset", ["fig8", "fig9"])
def test_criterion_7_sampling_alignment(outputs, record_property, preset):
    rows = PowerTable.read_csv(outputs[preset]).rows
    curves = {}
    for r in rows:
        curves.setdefault(r.plan_param, []).append(r)
    bad = alignment_violations(curves, slack=0.1, n_se=3.0)
    worst = max((d - a for _, _, _, d, a in bad), default=0.0)
    record_property("detail", f"{preset}: {len(curves)} curves x {len(rows) // len(curves)} points, {len(bad)} violations, worst excess {worst:.3f}")
    assert len(curves) == 4 and all(len(c) == 10 for c in curves.values())
    assert not bad


def test_criterion_8_reproducibility(outputs, tmp_path, record_property):
    again = _run_all(tmp_path / "w2", workers=2)
    differ = [name for name in EXPERIMENTS if outputs[name].read_bytes() != again[name].read_bytes()]
    record_property("detail", f"{len(EXPERIMENTS)} experiment files compared, {len(differ)} differ {differ}")
    assert not differ


def test_criterion_9_degenerate_handling(tmp_path, record_property, capsys):
    plans = [FULL, SamplingPlan("node", 3), SamplingPlan("triple", 100)]
    problems = []
    n = 8
    empty = graph_from_edges(n, [])
    complete = graph_from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
    for g, label in ((empty, "empty"), (complete, "complete")):
        path = tmp_path / f"{label}.txt"
        path.write_text(f"{n}\n" + "".join(f"{u} {v}\n" for u, v in g.edges().tolist()))
        for plan in plans:
            try:
                run_test(g, 0.05, plan)
                problems.append((label, plan.label, "no error"))
            except DegenerateGraph:
                pass
            code = main(["test", str(path), "--plan", plan.label])
            if code != 3:
                problems.append((label, plan.label, f"exit {code}"))
    for small in range(3):
        g = graph_from_edges(small, [(0, 1)] if small == 2 else [])
        for plan in plans:
            try:
                run_test(g, 0.05, plan)
                problems.append((f"n={small}", plan.label, "no error"))
            except GraphTooSmall:
                pass
    tiny = tmp_path / "tiny.txt"
    tiny.write_text("2\n0 1\n")
    if main(["test", str(tiny)]) != 3:
        problems.append(("n=2", "cli", "exit code"))
    capsys.readouterr()
    record_property("detail", f"{len(problems)} problems")
    assert not problems, problems
