"""Multivariate Stein couplings.

A triple ``(W, W', G)`` of d-vectors is a Stein coupling when

    E[G . F(W') - G . F(W)] = E[W . F(W)]

for every admissible ``F: R^d -> R^d``.  Models produced here can be sampled,
and, when the underlying randomness is finite, enumerated exactly as a list of
weighted rows.  ``state`` labels on enumerated rows identify the conditioning
information used for the variance terms in :mod:`graphstein.couplings.bounds`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from ..rng import stream

STEIN = "stein"
EQUAL_MARGINAL = "equal_marginal_lambda"

TEST_FAMILY_SEED = 20120517
EXACT_TOL = 1e-10
MC_SIGMAS = 4.0


class CapabilityError(RuntimeError):
    """The model lacks the enumerator or conditioner an operation needs."""


@dataclass(frozen=True)
class CouplingSample:
    """Rows of ``(W, W', G)``, each array of shape ``(m, d)``."""

    w: np.ndarray
    w_prime: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        arrays = [np.atleast_2d(np.asarray(a, dtype=float)) for a in (self.w, self.w_prime, self.g)]
        if len({a.shape for a in arrays}) != 1:
            raise ValueError(f"shape mismatch: {[a.shape for a in arrays]}")
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise ValueError("coupling sample contains non-finite values")
        for name, a in zip(("w", "w_prime", "g"), arrays):
            object.__setattr__(self, name, a)

    @property
    def dim(self) -> int:
        return self.w.shape[1]

    @property
    def diff(self) -> np.ndarray:
        return self.w_prime - self.w

    def __len__(self) -> int:
        return self.w.shape[0]

    def transform(self, a: np.ndarray) -> "CouplingSample":
        return CouplingSample(self.w @ a.T, self.w_prime @ a.T, self.g @ a.T)


@dataclass(frozen=True)
class Enumeration:
    """Exact joint law: row ``k`` has probability ``prob[k]``."""

    prob: np.ndarray
    sample: CouplingSample
    state: np.ndarray | None = None

    def __post_init__(self):
        prob = np.asarray(self.prob, dtype=float)
        if prob.shape != (len(self.sample),):
            raise ValueError("one probability per row required")
        if np.any(prob < 0) or abs(prob.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities must be non-negative and sum to 1, got {prob.sum()!r}")
        object.__setattr__(self, "prob", prob)
        if self.state is not None:
            object.__setattr__(self, "state", np.asarray(self.state))

    def expect(self, values: np.ndarray) -> np.ndarray:
        return np.tensordot(self.prob, values, axes=(0, 0))


Sampler = Callable[[np.random.Generator, int], CouplingSample]


@dataclass(frozen=True, eq=False)
class CouplingModel:
    dim: int
    name: str
    sampler: Sampler | None = None
    enumerator: Callable[[], Enumeration] | None = None
    conditioner: object | None = None
    variant: str = STEIN
    lam: float | None = None
    info: dict = field(default_factory=dict)

    @property
    def enumerable(self) -> bool:
        return self.enumerator is not None

    @cached_property
    def enumeration(self) -> Enumeration:
        if self.enumerator is None:
            raise CapabilityError(f"model {self.name!r} has no exact enumerator")
        enum = self.enumerator()
        if enum.sample.dim != self.dim:
            raise ValueError("enumerator dimension does not match the model")
        return enum

    def sample(self, rng: np.random.Generator, size: int) -> CouplingSample:
        if self.sampler is not None:
            return self.sampler(rng, size)
        if self.enumerator is not None:
            enum = self.enumeration
            idx = rng.choice(len(enum.prob), size=size, p=enum.prob)
            s = enum.sample
            return CouplingSample(s.w[idx], s.w_prime[idx], s.g[idx])
        raise CapabilityError(f"model {self.name!r} cannot be sampled")

    def get_conditioner(self):
        if self.conditioner is not None:
            return self.conditioner
        if self.enumerator is not None:
            from .bounds import EnumerationConditioner

            return EnumerationConditioner(self.enumeration)
        raise CapabilityError(f"model {self.name!r} has no conditioner")

    def linear_image(self, a) -> "CouplingModel":
        """``(AW, AW', AG)``, again a Stein coupling when the original is one."""
        a = np.atleast_2d(np.asarray(a, dtype=float))
        if a.shape[1] != self.dim:
            raise ValueError(f"matrix needs {self.dim} columns, got {a.shape[1]}")
        sampler = enumerator = None
        if self.sampler is not None:
            base = self.sampler
            sampler = lambda rng, size: base(rng, size).transform(a)
        if self.enumerator is not None:
            enum = self.enumeration
            enumerator = lambda: Enumeration(enum.prob, enum.sample.transform(a), enum.state)
        return replace(
            self,
            dim=a.shape[0],
            name=f"{self.name} (linear image)",
            sampler=sampler,
            enumerator=enumerator,
            conditioner=None,
        )

    def scaled_g(self, factor: float) -> "CouplingModel":
        """Same model with ``G`` multiplied by ``factor``; for sensitivity checks."""
        sampler = enumerator = None
        if self.sampler is not None:
            base = self.sampler
            sampler = lambda rng, size: _scale_g(base(rng, size), factor)
        if self.enumerator is not None:
            enum = self.enumeration
            enumerator = lambda: Enumeration(enum.prob, _scale_g(enum.sample, factor), enum.state)
        return replace(self, name=f"{self.name} (G x {factor})", sampler=sampler,
                       enumerator=enumerator, conditioner=None)


def _scale_g(s: CouplingSample, factor: float) -> CouplingSample:
    return CouplingSample(s.w, s.w_prime, s.g * factor)


def _loop_sampler(single: Callable[[np.random.Generator], tuple]) -> Sampler:
    def sampler(rng, size):
        rows = [single(rng) for _ in range(size)]
        return CouplingSample(*(np.array([r[k] for r in rows]) for k in range(3)))

    return sampler


# --- constructors -------------------------------------------------------------


def _neighbourhood_matrix(neighborhoods: Sequence[Sequence[int]]) -> np.ndarray:
    size = len(neighborhoods)
    if size == 0:
        raise ValueError("index set must be non-empty")
    nb = np.zeros((size, size))
    for i, a in enumerate(neighborhoods):
        a = list(a)
        if i not in a:
            raise ValueError(f"neighbourhood of {i} must contain {i}")
        nb[i, a] = 1.0
    return nb


def local_dependence_rows(nb: np.ndarray, x: np.ndarray):
    """``W``, per-index ``D_i = -sum_{j in A_i} X_j`` and ``G_i = -|I| X_i``.

    ``x`` has shape ``(..., |I|, d)``.
    """
    w = x.sum(axis=-2)
    r = np.einsum("ij,...jd->...id", nb, x)
    return w, -r, -x.shape[-2] * x


def check_local_dependence(probs: np.ndarray, x: np.ndarray, nb: np.ndarray, tol: float = 1e-10) -> None:
    """Spot-test: each ``X_i`` centred and orthogonal to the first two powers of
    the sum over its non-neighbours.  Necessary, not sufficient."""
    mean = np.tensordot(probs, x, axes=(0, 0))
    if np.max(np.abs(mean)) > tol:
        raise ValueError(f"summands are not centred (max |E X_i| = {np.max(np.abs(mean)):.3e})")
    outside = np.einsum("ij,kjd->kid", 1.0 - nb, x)
    for power in (1, 2):
        h = outside**power
        cross = np.einsum("k,kid,kie->ide", probs, x, h)
        if np.max(np.abs(cross)) > tol:
            raise ValueError("a summand is correlated with the sum over its non-neighbours")


def from_local_dependence(
    neighborhoods: Sequence[Sequence[int]],
    *,
    enumeration: tuple[np.ndarray, np.ndarray] | None = None,
    sample_x: Callable[[np.random.Generator], np.ndarray] | None = None,
    name: str = "local dependence",
    check: bool = True,
) -> CouplingModel:
    """``(sum X_i, sum_{i not in A_I} X_i, -|I| X_I)`` with ``I`` uniform.

    ``enumeration`` is ``(probs, X)`` over the finitely many outcomes of the
    underlying randomness, ``X`` of shape ``(K, |I|, d)``; ``sample_x`` draws
    one ``(|I|, d)`` array.  The outcome index is the conditioning state.
    """
    nb = _neighbourhood_matrix(neighborhoods)
    size = nb.shape[0]
    if enumeration is None and sample_x is None:
        raise ValueError("need an enumeration or a sampler for the summands")
    dim = None
    enumerator = sampler = None
    if enumeration is not None:
        probs, x = (np.asarray(a, dtype=float) for a in enumeration)
        if x.ndim != 3 or x.shape[1] != size:
            raise ValueError(f"X must have shape (K, {size}, d)")
        dim = x.shape[2]
        if check:
            check_local_dependence(probs, x, nb)

        def enumerator():
            w, d, g = local_dependence_rows(nb, x)
            k = x.shape[0]
            rows_w = np.repeat(w, size, axis=0)
            return Enumeration(
                np.repeat(probs / size, size),
                CouplingSample(rows_w, rows_w + d.reshape(k * size, -1), g.reshape(k * size, -1)),
                np.repeat(np.arange(k), size),
            )

    if sample_x is not None:

        def sampler(rng, count):
            out = []
            for _ in range(count):
                xs = np.asarray(sample_x(rng), dtype=float)
                w, d, g = local_dependence_rows(nb, xs)
                i = rng.integers(size)
                out.append((w, w + d[i], g[i]))
            return CouplingSample(*(np.array([o[k] for o in out]) for k in range(3)))

        if dim is None:
            dim = np.asarray(sample_x(stream(0))).shape[1]

    from .bounds import LocalDependenceConditioner

    conditioner = LocalDependenceConditioner(nb, sample_x) if sample_x is not None else None
    return CouplingModel(dim, name, sampler, enumerator, conditioner)


def _pair_rows(pairs) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray | None]:
    probs, w, wp, *rest = pairs
    state = rest[0] if rest else None
    w = np.atleast_2d(np.asarray(w, dtype=float))
    wp = np.atleast_2d(np.asarray(wp, dtype=float))
    if w.shape[0] != len(probs):
        w, wp = w.T, wp.T
    return np.asarray(probs, dtype=float), w, wp, state


def _group_means(keys: np.ndarray, probs: np.ndarray, values: np.ndarray):
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    mass = np.bincount(inverse, weights=probs)
    sums = np.stack([np.bincount(inverse, weights=probs * v) for v in values.T], axis=1)
    return inverse, sums / mass[:, None]


def drift_residual(probs, w, wp, lam, keys=None) -> float:
    """``max |E[W' - W + Lambda W | key]|`` (key defaults to ``W``)."""
    lam = np.atleast_2d(lam)
    keys = np.round(w, 12) if keys is None else keys
    resid = (wp - w) + w @ lam.T
    _, means = _group_means(keys, probs, resid)
    return float(np.max(np.abs(means)))


def marginal_distance(probs, w, wp) -> float:
    """Total variation between the enumerated laws of ``W`` and ``W'``."""
    keys = np.round(np.vstack([w, wp]), 12)
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    k = len(probs)
    pw = np.bincount(inverse[:k], weights=probs, minlength=inverse.max() + 1)
    pwp = np.bincount(inverse[k:], weights=probs, minlength=inverse.max() + 1)
    return 0.5 * float(np.abs(pw - pwp).sum())


def from_exchangeable_pair(
    lambda_matrix,
    *,
    enumeration=None,
    sampler: Callable[[np.random.Generator], tuple[np.ndarray, np.ndarray]] | None = None,
    name: str = "exchangeable pair",
    tol: float = 1e-10,
) -> CouplingModel:
    """``(W, W', (1/2) Lambda^-1 (W' - W))`` for a pair with linear regression
    ``E[W' - W | W] = -Lambda W``.

    ``enumeration`` is ``(probs, W, W'[, state])``; when given, the drift is
    checked conditionally on ``W`` and a violation raises ``ValueError``.
    """
    lam = np.atleast_2d(np.asarray(lambda_matrix, dtype=float))
    if lam.shape[0] != lam.shape[1] or np.linalg.matrix_rank(lam) < lam.shape[0]:
        raise ValueError("Lambda must be a square invertible matrix")
    lam_inv = np.linalg.inv(lam)
    dim = lam.shape[0]
    enumerator = wrapped = None
    if enumeration is not None:
        probs, w, wp, state = _pair_rows(enumeration)
        resid = drift_residual(probs, w, wp, lam)
        if resid > tol:
            raise ValueError(f"drift E[W'-W | W] = -Lambda W fails (max residual {resid:.3e})")
        g = 0.5 * (wp - w) @ lam_inv.T
        enumerator = lambda: Enumeration(probs, CouplingSample(w, wp, g), state)
    if sampler is not None:

        def single(rng):
            w, wp = (np.atleast_1d(np.asarray(a, dtype=float)) for a in sampler(rng))
            return w, wp, 0.5 * lam_inv @ (wp - w)

        wrapped = _loop_sampler(single)
    return CouplingModel(dim, name, wrapped, enumerator, info={"Lambda": lam})


def from_equal_marginal_lambda(
    lam: float,
    *,
    enumeration=None,
    sampler: Callable[[np.random.Generator], tuple[np.ndarray, np.ndarray]] | None = None,
    name: str = "equal-marginal lambda pair",
    tol: float = 1e-10,
) -> CouplingModel:
    """``(W, W', D / (2 lam))`` for ``L(W) = L(W')`` and ``E[W' - W | W] = -lam W``.

    Exchangeability is not assumed, and the general identity is not claimed
    for this variant: :func:`verify_identity` asserts only the linear test
    functions, and :func:`check_equal_marginal` covers drift and marginals.
    """
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    dim = None
    enumerator = wrapped = None
    if enumeration is not None:
        probs, w, wp, state = _pair_rows(enumeration)
        dim = w.shape[1]
        dist = marginal_distance(probs, w, wp)
        if dist > tol:
            raise ValueError(f"W and W' have different laws (TV distance {dist:.3e})")
        keys = state if state is not None else None
        resid = drift_residual(probs, w, wp, lam * np.eye(dim), keys)
        if resid > tol:
            raise ValueError(f"drift E[W'-W | state] = -lambda W fails (max residual {resid:.3e})")
        enumerator = lambda: Enumeration(probs, CouplingSample(w, wp, (wp - w) / (2 * lam)), state)
    if sampler is not None:

        def single(rng):
            w, wp = (np.atleast_1d(np.asarray(a, dtype=float)) for a in sampler(rng))
            return w, wp, (wp - w) / (2 * lam)

        wrapped = _loop_sampler(single)
        if dim is None:
            dim = np.atleast_1d(sampler(stream(0))[0]).shape[0]
    return CouplingModel(dim, name, wrapped, enumerator, variant=EQUAL_MARGINAL, lam=lam)


def size_biased_pmf(support: np.ndarray, probs: np.ndarray, direction: int) -> np.ndarray:
    """Probabilities ``pmf(y) * y_i / mu_i`` on the same support."""
    mu = probs @ support
    return probs * support[:, direction] / mu[direction]


def from_size_bias(
    mu=None,
    *,
    pmf: tuple[np.ndarray, np.ndarray] | None = None,
    y_sampler: Callable[[np.random.Generator], np.ndarray] | None = None,
    biased_samplers: Sequence[Callable[[np.random.Generator, np.ndarray], np.ndarray]] | None = None,
    name: str = "size bias",
) -> CouplingModel:
    """``(Y - mu, Y^K - mu, d * mu_K e_K)`` with ``K`` uniform on the d directions.

    The factor ``d`` in ``G`` compensates for the uniform choice of ``K``;
    without it the identity holds only up to a factor ``1/d``.

    With ``pmf = (support, probs)`` the size-biased laws are built internally
    and ``Y^K`` is drawn independently of ``Y``.  Otherwise ``y_sampler`` and
    ``biased_samplers[i](rng, y)`` define the coupling.
    """
    enumerator = sampler = None
    if pmf is not None:
        support, probs = (np.asarray(a, dtype=float) for a in pmf)
        support = support.reshape(len(probs), -1)
        if np.any(support < 0):
            raise ValueError("size biasing needs a non-negative vector")
        mu_calc = probs @ support
        if mu is not None and not np.allclose(mu, mu_calc, rtol=1e-12, atol=1e-12):
            raise ValueError(f"mu {mu} differs from the pmf mean {mu_calc}")
        mu = mu_calc
    if mu is None:
        raise ValueError("mu is required when no pmf is given")
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if np.any(mu <= 0):
        raise ValueError("every coordinate of mu must be positive")
    dim = mu.shape[0]

    if pmf is not None:

        def enumerator():
            k = len(probs)
            biased = [size_biased_pmf(support, probs, i) for i in range(dim)]
            rows_p, w, wp, g, state = [], [], [], [], []
            for direction in range(dim):
                e = np.zeros(dim)
                e[direction] = dim * mu[direction]
                weight = probs[:, None] * biased[direction][None, :] / dim
                rows_p.append(weight.ravel())
                w.append(np.repeat(support - mu, k, axis=0))
                wp.append(np.tile(support - mu, (k, 1)))
                g.append(np.tile(e, (k * k, 1)))
                state.append(np.repeat(np.arange(k), k))
            return Enumeration(
                np.concatenate(rows_p),
                CouplingSample(np.vstack(w), np.vstack(wp), np.vstack(g)),
                np.concatenate(state),
            )

        def single(rng):
            idx = rng.choice(len(probs), p=probs)
            direction = rng.integers(dim)
            jdx = rng.choice(len(probs), p=size_biased_pmf(support, probs, direction))
            e = np.zeros(dim)
            e[direction] = dim * mu[direction]
            return support[idx] - mu, support[jdx] - mu, e

        sampler = _loop_sampler(single)
    elif y_sampler is not None and biased_samplers is not None:
        if len(biased_samplers) != dim:
            raise ValueError("one size-biased sampler per direction required")

        def single(rng):
            y = np.asarray(y_sampler(rng), dtype=float)
            direction = rng.integers(dim)
            yk = np.asarray(biased_samplers[direction](rng, y), dtype=float)
            e = np.zeros(dim)
            e[direction] = dim * mu[direction]
            return y - mu, yk - mu, e

        sampler = _loop_sampler(single)
    else:
        raise ValueError("need either a pmf or samplers for Y and its size-biased versions")
    return CouplingModel(dim, name, sampler, enumerator, info={"mu": mu})


# --- identity verification ----------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    __test__ = False

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    linear: bool


def default_family(dim: int, seed: int = TEST_FAMILY_SEED) -> list[TestFunction]:
    """Projections, monomials ``w_j e_i``, ``tanh(w_j) e_i`` and one cubic."""
    family = []
    for i in range(dim):

        def proj(w, i=i):
            out = np.zeros_like(w)
            out[:, i] = 1.0
            return out

        family.append(TestFunction(f"e{i}", proj, True))
    for i in range(dim):
        for j in range(dim):

            def mono(w, i=i, j=j):
                out = np.zeros_like(w)
                out[:, i] = w[:, j]
                return out

            def smooth(w, i=i, j=j):
                out = np.zeros_like(w)
                out[:, i] = np.tanh(w[:, j])
                return out

            family.append(TestFunction(f"w{j}*e{i}", mono, True))
            family.append(TestFunction(f"tanh(w{j})*e{i}", smooth, False))

    rng = np.random.default_rng(seed)
    exps = [
        e for e in np.ndindex(*([4] * dim)) if sum(e) <= 3
    ]
    exps = np.array(exps, dtype=float)
    coef = rng.standard_normal((dim, len(exps)))

    def cubic(w):
        mon = np.prod(w[:, None, :] ** exps[None, :, :], axis=2)
        return mon @ coef.T

    family.append(TestFunction("cubic", cubic, False))
    return family


@dataclass(frozen=True)
class IdentityResult:
    name: str
    residual: float
    se: float
    scale: float
    passed: bool
    asserted: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "se": self.se,
            "scale": self.scale,
            "pass": self.passed,
            "asserted": self.asserted,
        }


@dataclass(frozen=True)
class IdentityReport:
    model: str
    mode: str
    results: tuple[IdentityResult, ...]
    reps: int | None = None
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results if r.asserted)

    def max_residual(self, asserted_only: bool = True) -> float:
        vals = [abs(r.residual) for r in self.results if r.asserted or not asserted_only]
        return max(vals) if vals else 0.0

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "mode": self.mode,
            "reps": self.reps,
            "seed": self.seed,
            "pass": self.passed,
            "results": [r.to_dict() for r in self.results],
        }


def identity_terms(sample: CouplingSample, f: TestFunction) -> tuple[np.ndarray, np.ndarray]:
    """Per-row ``G.(F(W') - F(W))`` and ``W.F(W)``."""
    fw = f.fn(sample.w)
    lhs = np.einsum("kd,kd->k", sample.g, f.fn(sample.w_prime) - fw)
    rhs = np.einsum("kd,kd->k", sample.w, fw)
    return lhs, rhs


def verify_identity(
    model: CouplingModel,
    family: Sequence[TestFunction] | None = None,
    mode: str = "exact",
    reps: int = 10_000,
    seed: int = 0,
) -> IdentityReport:
    """Residual ``E[G.F(W') - G.F(W)] - E[W.F(W)]`` for each test function.

    ``exact`` requires an enumerator and passes at ``|residual| <= 1e-10 *
    max(1, scale)``; ``mc`` passes within four standard errors.
    """
    family = list(family) if family is not None else default_family(model.dim)
    asserted_all = model.variant == STEIN
    results = []
    if mode == "exact":
        if not model.enumerable:
            raise CapabilityError(f"exact verification needs an enumerator; {model.name!r} has none")
        enum = model.enumeration
        for f in family:
            lhs, rhs = identity_terms(enum.sample, f)
            resid = float(enum.expect(lhs - rhs))
            scale = float(enum.expect(np.abs(lhs)) + enum.expect(np.abs(rhs)))
            ok = abs(resid) <= EXACT_TOL * max(1.0, scale)
            results.append(IdentityResult(f.name, resid, 0.0, scale, ok, asserted_all or f.linear))
        return IdentityReport(model.name, mode, tuple(results))
    if mode == "mc":
        sample = model.sample(stream(seed), reps)
        for f in family:
            lhs, rhs = identity_terms(sample, f)
            v = lhs - rhs
            resid = float(v.mean())
            se = float(v.std(ddof=1) / np.sqrt(reps)) if reps > 1 else float("inf")
            scale = float(np.abs(lhs).mean() + np.abs(rhs).mean())
            ok = abs(resid) <= MC_SIGMAS * se if se > 0 else abs(resid) <= EXACT_TOL * max(1.0, scale)
            results.append(IdentityResult(f.name, resid, se, scale, ok, asserted_all or f.linear))
        return IdentityReport(model.name, mode, tuple(results), reps=reps, seed=seed)
    raise ValueError(f"mode must be 'exact' or 'mc', got {mode!r}")


@dataclass(frozen=True)
class MomentCheck:
    mean_w: np.ndarray
    cov_w: np.ndarray
    g_dt: np.ndarray

    @property
    def max_error(self) -> float:
        return float(max(np.max(np.abs(self.mean_w)), np.max(np.abs(self.g_dt - self.cov_w))))


def moment_relations(model: CouplingModel) -> MomentCheck:
    """Exact ``E W``, ``Cov W`` and ``E[G D^t]``; a coupling needs ``E W = 0``
    and ``E[G D^t] = Cov W``."""
    enum = model.enumeration
    s = enum.sample
    mean = enum.expect(s.w)
    cov = enum.expect(np.einsum("ki,kj->kij", s.w, s.w)) - np.outer(mean, mean)
    gdt = enum.expect(np.einsum("ki,kj->kij", s.g, s.diff))
    return MomentCheck(mean, cov, gdt)


@dataclass(frozen=True)
class EqualMarginalCheck:
    marginal_tv: float
    drift_residual: float
    moments: MomentCheck

    @property
    def max_error(self) -> float:
        return max(self.marginal_tv, self.drift_residual, self.moments.max_error)


def check_equal_marginal(model: CouplingModel) -> EqualMarginalCheck:
    if model.lam is None:
        raise ValueError("model carries no lambda")
    enum = model.enumeration
    s = enum.sample
    tv = marginal_distance(enum.prob, s.w, s.w_prime)
    drift = drift_residual(enum.prob, s.w, s.w_prime, model.lam * np.eye(model.dim), enum.state)
    return EqualMarginalCheck(tv, drift, moment_relations(model))
