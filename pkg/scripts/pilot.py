"""Pilot runs used to calibrate the Monte Carlo acceptance thresholds.

Seeds here are disjoint from the ones pinned in tests/test_acceptance.py.
Usage: python3 scripts/pilot.py [section ...] > docs/pilot_output.json
"""

import json
import sys
import time

import numpy as np

from graphstein.couplings import bound_terms, graph_coupling
from graphstein.graphon import BlockStep
from graphstein.montecarlo import (
    ExperimentConfig,
    convex_class_distance,
    coverage_experiment,
    power_experiment,
    rate_experiment,
    run_replications,
)

PILOT_SEED = 7001


def coverage():
    out = {}
    for n in (50, 200, 400):
        for p in (0.3, 0.5, 0.7):
            if n != 200 and p != 0.5:
                continue
            out[f"n={n},p={p}"] = coverage_experiment(n, p, 0.05, 2000, PILOT_SEED).to_dict()
    return out


def power():
    kernel = BlockStep(np.array([[0.7, 0.3], [0.3, 0.7]]))
    return {f"n={n}": power_experiment(n, kernel, 0.05, 200, PILOT_SEED).to_dict() for n in (100, 200, 400)}


def distance():
    out = {}
    for model, n in (("gnp", 300), ("perm", 200)):
        cfg = ExperimentConfig("distance", (n,), model, p=0.5, reps=100_000, seed=PILOT_SEED)
        w = run_replications(cfg)
        rep = convex_class_distance(w).to_dict()
        rep["correlation"] = float(np.corrcoef(w.T)[0, 1])
        out[f"{model} n={n}"] = rep
    return out


def rate():
    out = {}
    for model in ("gnp", "perm"):
        cfg = ExperimentConfig("rate", (50, 100, 200, 400), model, p=0.5, reps=100_000, seed=PILOT_SEED)
        out[model] = rate_experiment(cfg).to_dict()
    return out


def bterms():
    out = {}
    for n in (20, 40, 80):
        reps = {20: 400, 40: 200, 80: 60}[n]
        t = bound_terms(graph_coupling(n, 0.5), reps=reps, seed=PILOT_SEED)
        out[f"n={n}"] = t.to_dict() | {"b2_sqrt_n": t.b2 * n**0.5, "b1_n52": t.b1 * n**2.5}
    return out


SECTIONS = {"coverage": coverage, "power": power, "distance": distance, "rate": rate, "bterms": bterms}

if __name__ == "__main__":
    names = sys.argv[1:] or list(SECTIONS)
    result = {}
    for name in names:
        t0 = time.time()
        result[name] = SECTIONS[name]()
        result[name + "_seconds"] = round(time.time() - t0, 1)
        print(f"{name} done in {result[name + '_seconds']} s", file=sys.stderr)
    json.dump(result, sys.stdout, indent=2)
