"""Replication engine and experiments: coverage, power, distance to the
Gaussian, and rate fits.

Replication ``r`` at size ``n`` always draws from ``stream(seed, n, r)``, so
results do not depend on how replications are split between workers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed
from scipy.special import ndtr

from .graph import count_edges, count_four_cycles, gen_gnp
from .graphon import Constant, GraphonKernel, gen_graphon
from .homogeneity import confidence_set_from_counts, w_from_counts
from .permstat import random_permutations, standardized_batch
from .rng import stream

KINDS = ("coverage", "power", "distance", "rate")
MODELS = ("gnp", "graphon", "perm")
MAX_REPS = 50_000_000  # replications are streamed; this bounds the stored output matrix
CI_SIGMAS = 3.0


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: tuple[int, ...]
    model: str = "gnp"
    p: float = 0.5
    kernel: GraphonKernel | None = None
    alpha: float = 0.05
    reps: int = 1000
    seed: int = 0
    jobs: int = 1
    p_lo: float = 0.01
    p_hi: float = 0.99
    grid_step: float = 1e-3

    def __post_init__(self):
        n = (self.n,) if isinstance(self.n, (int, np.integer)) else tuple(int(v) for v in self.n)
        object.__setattr__(self, "n", n)
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if not n:
            raise ValueError("need at least one n")
        if self.model == "perm":
            if self.kind in ("coverage", "power"):
                raise ValueError(f"{self.kind} experiments need a graph model")
            if min(n) < 2:
                raise ValueError("permutation experiments need n >= 2")
        elif min(n) < 5:
            raise ValueError(f"graph experiments need n >= 5, got {min(n)}")
        if self.model == "graphon" and self.kernel is None:
            raise ValueError("graphon model needs a kernel")
        if not 0.0 < self.p < 1.0 and self.model == "gnp":
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.reps > MAX_REPS:
            raise MemoryError(f"reps = {self.reps} exceeds the limit {MAX_REPS} on stored rows")

    def columns(self) -> tuple[str, ...]:
        if self.kind == "coverage":
            return ("noncover", "statistic_min")
        if self.kind == "power":
            return ("empty", "statistic_min")
        if self.kind == "rate" and self.model != "perm":
            return ("w1",)
        return ("w1", "w2")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n"] = list(self.n)
        d["kernel"] = None if self.kernel is None else kernel_dict(self.kernel)
        return d


def kernel_dict(kernel: GraphonKernel) -> dict:
    if isinstance(kernel, Constant):
        return {"type": "const", "p": kernel.p}
    return {
        "type": type(kernel).__name__.lower(),
        "values": np.asarray(kernel.block_values).tolist(),
        "measures": np.asarray(kernel.block_measures).tolist(),
    }


def _graph(config: ExperimentConfig, n: int, rng):
    if config.model == "graphon":
        return gen_graphon(n, config.kernel, rng)
    return gen_gnp(n, config.p, rng)


def replicate(config: ExperimentConfig, n: int, rep: int) -> np.ndarray:
    """One output row, drawn from ``stream(seed, n, rep)``."""
    rng = stream(config.seed, n, rep)
    if config.model == "perm":
        perm = random_permutations(rng, n, 1)
        return standardized_batch(perm)[0]
    g = _graph(config, n, rng)
    t1 = count_edges(g)
    if config.kind == "rate":
        return np.array([(t1 - math.comb(n, 2) * config.p) / math.sqrt(math.comb(n, 2) * config.p * (1 - config.p))])
    t2 = count_four_cycles(g)
    if config.kind == "distance":
        return np.array(w_from_counts(n, t1, t2, config.p), dtype=float)
    cs = confidence_set_from_counts(n, t1, t2, config.alpha, config.p_lo, config.p_hi, config.grid_step)
    if config.kind == "coverage":
        return np.array([float(not cs.contains(config.p)), cs.statistic_min])
    return np.array([float(cs.empty), cs.statistic_min])


def _chunk(config: ExperimentConfig, n: int, start: int, stop: int) -> np.ndarray:
    return np.array([replicate(config, n, r) for r in range(start, stop)])


def run_replications(config: ExperimentConfig, n: int | None = None) -> np.ndarray:
    """``(reps, outputs)`` matrix; identical for every value of ``jobs``."""
    n = config.n[0] if n is None else n
    jobs = max(1, int(config.jobs))
    if jobs == 1:
        return _chunk(config, n, 0, config.reps)
    size = max(1, math.ceil(config.reps / (4 * jobs)))
    bounds = [(s, min(s + size, config.reps)) for s in range(0, config.reps, size)]
    parts = Parallel(n_jobs=jobs)(delayed(_chunk)(config, n, a, b) for a, b in bounds)
    return np.vstack(parts)


# --- frequency experiments ----------------------------------------------------


@dataclass(frozen=True)
class FrequencyReport:
    kind: str
    n: int
    count: int
    reps: int
    frequency: float
    half_width: float
    config: dict = field(default_factory=dict)

    @property
    def interval(self) -> tuple[float, float]:
        return max(0.0, self.frequency - self.half_width), min(1.0, self.frequency + self.half_width)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["interval"] = list(self.interval)
        return d


def binomial_half_width(freq: float, reps: int) -> float:
    return CI_SIGMAS * math.sqrt(freq * (1 - freq) / reps)


def _frequency(config: ExperimentConfig, flags: np.ndarray) -> FrequencyReport:
    count = int(flags.sum())
    freq = count / config.reps
    return FrequencyReport(
        config.kind, config.n[0], count, config.reps, freq, binomial_half_width(freq, config.reps), config.to_dict()
    )


def coverage_experiment(n: int, p: float, alpha: float, reps: int, seed: int, jobs: int = 1, **domain) -> FrequencyReport:
    """Frequency of ``p`` falling outside the confidence set under G(n, p)."""
    config = ExperimentConfig("coverage", (n,), "gnp", p=p, alpha=alpha, reps=reps, seed=seed, jobs=jobs, **domain)
    return _frequency(config, run_replications(config)[:, 0])


def power_experiment(n: int, kernel: GraphonKernel, alpha: float, reps: int, seed: int, jobs: int = 1, **domain) -> FrequencyReport:
    """Frequency of an empty confidence set under G(n, kernel)."""
    config = ExperimentConfig("power", (n,), "graphon", kernel=kernel, alpha=alpha, reps=reps, seed=seed, jobs=jobs, **domain)
    return _frequency(config, run_replications(config)[:, 0])


# --- distances ----------------------------------------------------------------


def ks_distance(samples, cdf) -> float:
    """Exact two-sided Kolmogorov distance between the empirical law of
    ``samples`` and a continuous ``cdf``; ties are handled by jumping the
    empirical cdf by the tie count."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("no samples")
    values, counts = np.unique(x, return_counts=True)
    upper = np.cumsum(counts) / x.size
    lower = upper - counts / x.size
    f = np.asarray(cdf(values), dtype=float)
    return float(max(np.max(upper - f), np.max(f - lower)))


def normal_cdf(x):
    return ndtr(x)


def chi2_2_cdf(x):
    return -np.expm1(-np.maximum(x, 0.0) / 2)


HALFSPACE_DIRECTIONS = 64
HALFSPACE_OFFSETS = np.linspace(-4.0, 4.0, 41)
BALL_RADII = np.linspace(0.1, 4.0, 41)
ORTHANT_GRID = np.linspace(-3.0, 3.0, 20)


def _sorted_fraction(sorted_x: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.searchsorted(sorted_x, t, side="right") / sorted_x.shape[0]


@dataclass(frozen=True)
class DistanceReport:
    ks_marginals: tuple[float, ...]
    chi2_ks: float
    convex_proxy: float
    halfspace: float
    ball: float
    orthant: float
    reps: int
    note: str = "convex_proxy is a maximum over a finite class of convex sets: a lower bound on the convex-set distance"

    def to_dict(self) -> dict:
        return asdict(self)


def convex_class_distance(samples: np.ndarray) -> DistanceReport:
    """Distances from the empirical law of 2-d samples to N(0, I_2)."""
    w = np.asarray(samples, dtype=float)
    if w.ndim != 2 or w.shape[1] != 2:
        raise ValueError("samples must have shape (m, 2)")
    m = w.shape[0]

    theta = 2 * np.pi * np.arange(HALFSPACE_DIRECTIONS) / HALFSPACE_DIRECTIONS
    proj = w @ np.vstack([np.cos(theta), np.sin(theta)])
    proj.sort(axis=0)
    ref = ndtr(HALFSPACE_OFFSETS)
    half = max(float(np.max(np.abs(_sorted_fraction(proj[:, k], HALFSPACE_OFFSETS) - ref))) for k in range(len(theta)))

    r2 = np.sort((w * w).sum(axis=1))
    ball = float(np.max(np.abs(_sorted_fraction(r2, BALL_RADII**2) - chi2_2_cdf(BALL_RADII**2))))

    a = ORTHANT_GRID
    below1 = w[:, 0, None] <= a[None, :]
    below2 = w[:, 1, None] <= a[None, :]
    emp = (below1.T.astype(np.float64) @ below2.astype(np.float64)) / m
    orth = float(np.max(np.abs(emp - np.outer(ndtr(a), ndtr(a)))))

    marg = tuple(ks_distance(w[:, j], normal_cdf) for j in range(2))
    chi = ks_distance((w * w).sum(axis=1), chi2_2_cdf)
    return DistanceReport(marg, chi, max(half, ball, orth), half, ball, orth, m)


# --- rates --------------------------------------------------------------------


@dataclass(frozen=True)
class RateFit:
    n: tuple[int, ...]
    distances: tuple[float, ...]
    slope: float
    intercept: float
    residuals: tuple[float, ...]

    def to_dict(self) -> dict:
        return asdict(self)


def rate_fit(n_list, distances) -> RateFit:
    """Least-squares line through ``(log n, log distance)``."""
    n = np.asarray(n_list, dtype=float)
    d = np.asarray(distances, dtype=float)
    if n.shape != d.shape or n.size < 2:
        raise ValueError("need matching n and distance lists of length >= 2")
    if np.any(d <= 0) or np.any(n <= 0):
        raise ValueError("n and distances must be positive")
    x, y = np.log(n), np.log(d)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return RateFit(tuple(int(v) for v in n), tuple(float(v) for v in d), float(slope), float(intercept), tuple(float(r) for r in resid))


def rate_experiment(config: ExperimentConfig) -> RateFit:
    """KS of the first output coordinate against N(0, 1) at each n."""
    dist = [ks_distance(run_replications(config, n)[:, 0], normal_cdf) for n in config.n]
    return rate_fit(config.n, dist)


# --- driver and output --------------------------------------------------------


def run_experiment(config: ExperimentConfig) -> tuple[dict, dict[int, np.ndarray]]:
    """JSON-ready summary and the per-n replication matrices."""
    mats = {n: run_replications(config, n) for n in config.n}
    summary: dict = {"config": config.to_dict()}
    if config.kind in ("coverage", "power"):
        results = []
        for n in config.n:
            d = _frequency(replace(config, n=(n,)), mats[n][:, 0]).to_dict()
            d.pop("config")
            results.append(d)
        summary["results"] = results
    elif config.kind == "distance":
        summary["results"] = [{"n": n, **convex_class_distance(mats[n]).to_dict()} for n in config.n]
    else:
        fit = rate_fit(config.n, [ks_distance(mats[n][:, 0], normal_cdf) for n in config.n])
        summary["results"] = fit.to_dict()
    return summary, mats


def write_csv(path, config: ExperimentConfig, mats: dict[int, np.ndarray]) -> None:
    """One row per replication: ``n,rep,<outputs>``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "rep", *config.columns()])
        for n, mat in mats.items():
            for r, row in enumerate(mat):
                writer.writerow([n, r, *(repr(float(v)) for v in row)])

