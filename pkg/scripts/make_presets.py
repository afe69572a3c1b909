"""Regenerate the experiment presets in ``presets/``.

Run from the repository root: ``python3 scripts/make_presets.py``.
"""

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "presets"
REPS = 1000
STEP = math.sqrt(0.002)


def sbm_grid(step, center_a, center_b, count):
    return [(center_a + step * i, center_b - step * i) for i in range(1, count + 1)]


def er(n, p):
    return {"model": "er", "n": n, "p": p}


def write(name, cfg):
    cfg = {"name": name, "alpha": 0.05, "replicates": REPS, "base_seed": 20240501, **cfg}
    (OUT / f"{name}.json").write_text(json.dumps(cfg, indent=1) + "\n", encoding="utf-8")


def main():
    OUT.mkdir(exist_ok=True)
    fig2_ab = sbm_grid(STEP, 0.2, 0.2, 25)

    write("fig1", {"models": [er(300, 0.05), er(100, 0.5), er(1000, 0.02), er(500, 0.1)], "plans": ["full"]})
    write("fig2", {"models": [
        {"model": "sbm2", "n": 100, "gamma": g, "a": a, "b": b, "clip": True}
        for g in (0.5, 0.3, 0.1, 0.06, 0.03) for a, b in fig2_ab
    ]})
    write("fig2_gamma05", {"models": [
        {"model": "sbm2", "n": 100, "gamma": 0.5, "a": a, "b": b, "clip": True} for a, b in fig2_ab
    ]})
    write("fig3", {"models": [
        {"model": "sbmk", "n": 120, "k": k, "a": 0.3, "b": 0.1} for k in (2, 3, 4, 5, 6, 8, 10, 12, 15, 20)
    ]})
    write("fig4", {"models": [
        {"model": "sbm_labels", "sizes": [round(80 * g), 80 - round(80 * g), 40], "a": a, "b": b, "clip": True}
        for g in (0.5, 0.4, 0.3, 0.2, 0.1) for a, b in fig2_ab
    ]})
    write("fig5", {"models": [
        {"model": "config", "n": 100, "h": h, "alpha": a}
        for h in (0.3, 0.25, 0.2, 0.15) for a in (1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64)
    ]})
    write("fig6", {"runs": [
        {"model": er(500, 0.05), "plan": "node:50"},
        {"model": er(100, 0.5), "plan": "node:20"},
        {"model": er(1000, 0.02), "plan": "node:100"},
        {"model": er(300, 0.1), "plan": "node:10"},
    ]})
    write("fig7", {"runs": [
        {"model": er(100, 0.5), "plan": "triple:10000"},
        {"model": er(500, 0.05), "plan": "triple:50000"},
        {"model": er(200, 0.5), "plan": "triple:40000"},
        {"model": er(1000, 0.02), "plan": "triple:100000"},
    ]})
    sampled = [
        {"model": "sbm2", "n": 100, "gamma": 0.5, "a": a, "b": b} for a, b in sbm_grid(0.01, 0.3, 0.2, 10)
    ]
    # plotted against snr_adjusted, the four curves of each table should line up
    write("fig8", {"models": sampled, "plans": [f"node:{m}" for m in (10, 20, 30, 40)]})
    write("fig9", {"models": sampled, "plans": [f"triple:{b}" for b in (10000, 20000, 30000, 40000)]})

    # acceptance runs not tied to one preset family
    write("null_calibration", {"models": [er(300, 0.05), er(100, 0.5)], "plans": ["full"]})
    write("type1", {"models": [er(500, 0.05)], "plans": ["full", "node:50", "triple:50000"]})

    smoke = {"name": "smoke", "alpha": 0.05, "replicates": 1, "base_seed": 1,
             "models": [{"model": "sbm2", "n": 60, "gamma": 0.5, "a": 0.3, "b": 0.1}], "plans": ["full"]}
    (OUT / "smoke.json").write_text(json.dumps(smoke, indent=1) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
