"""Command-line front end.

Exit codes: 0 success, 1 test rejection or failed verification, 2 usage or
input errors.  Reports go to stdout as JSON unless ``--out`` is given.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .graph import (
    GraphFormatError,
    SubgraphPattern,
    count_pattern,
    format_edge_list,
    gen_gnp,
    read_edge_list,
)
from .graphon import BlockStep, Constant, GraphonKernel, gen_graphon
from .homogeneity import confidence_set, homogeneity_test
from .rng import SEED_ENV, resolve_seed, stream

log = logging.getLogger("graphstein")

PATTERN_KEYS = {SubgraphPattern.K2: "t1", SubgraphPattern.K3: "k3", SubgraphPattern.C4: "t2"}


class UsageError(Exception):
    pass


# --- JSON with 17 significant digits -------------------------------------------


def _encode(obj) -> str:
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        if text.lstrip("-").isdigit():
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj)


def _emit(report: dict, args) -> None:
    if not args.no_timestamp:
        report = {**report, "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat()}
    text = dumps(report) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- argument helpers ------------------------------------------------------------


def _seed(args) -> int:
    seed = resolve_seed(args.seed)
    if seed is None:
        raise UsageError(f"this command is stochastic: pass --seed or set {SEED_ENV}")
    if seed < 0:
        raise UsageError("seed must be non-negative")
    return seed


def parse_kernel(text: str) -> GraphonKernel:
    """``const:p`` or ``block:<file.json | inline JSON>``; the JSON holds
    ``values`` (k x k) and optional ``breakpoints``, or is just the matrix."""
    kind, _, rest = text.partition(":")
    if kind == "const":
        try:
            return Constant(float(rest))
        except ValueError as exc:
            raise UsageError(f"bad constant kernel {text!r}: {exc}") from None
    if kind == "block":
        try:
            if rest.lstrip().startswith(("[", "{")):
                spec = json.loads(rest)
            else:
                with open(rest) as fh:
                    spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read block kernel {rest!r}: {exc}") from None
        if isinstance(spec, list):
            spec = {"values": spec}
        try:
            return BlockStep(np.array(spec["values"], dtype=float), tuple(spec.get("breakpoints", ())))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad block kernel: {exc}") from None
    raise UsageError(f"kernel must be const:p or block:file, got {text!r}")


def _read_graph(args):
    if not args.inp:
        raise UsageError("--in is required")
    return read_edge_list(args.inp)


def _domain(args) -> dict:
    return {"p_lo": args.p_lo, "p_hi": args.p_hi, "grid_step": args.grid}


# --- subcommands -----------------------------------------------------------------


def cmd_gen(args) -> int:
    seed = _seed(args)
    if args.n is None:
        raise UsageError("--n is required")
    if args.kernel:
        g = gen_graphon(args.n, parse_kernel(args.kernel), stream(seed))
    else:
        if args.p is None:
            raise UsageError("--p or --kernel is required")
        g = gen_gnp(args.n, args.p, stream(seed))
    text = format_edge_list(g)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        log.info("wrote %d edges to %s", len(g.edges()), args.out)
    else:
        sys.stdout.write(text)
    return 0


def cmd_count(args) -> int:
    g = _read_graph(args)
    pattern = SubgraphPattern.parse(args.pattern)
    _emit({"n": g.n, "pattern": pattern.name.lower(), PATTERN_KEYS[pattern]: count_pattern(g, pattern)}, args)
    return 0


def cmd_confset(args) -> int:
    g = _read_graph(args)
    _emit(confidence_set(g, args.alpha, **_domain(args)).report(), args)
    return 0


def cmd_test(args) -> int:
    g = _read_graph(args)
    d = homogeneity_test(g, args.alpha, **_domain(args))
    _emit({"n": g.n, "alpha": args.alpha, "reject": d.reject, "inf_stat": d.inf_stat, "argmin_p": d.argmin_p}, args)
    return 1 if d.reject else 0


def cmd_permstat(args) -> int:
    from .permstat import (
        descents,
        format_permutation,
        inversions,
        parse_permutation,
        random_permutations,
        standardized_batch,
        standardized_descent_inversion,
    )

    if args.reps is not None:
        seed = _seed(args)
        if args.n is None:
            raise UsageError("--n is required with --reps")
        rows = np.array([standardized_batch(random_permutations(stream(seed, args.n, r), args.n, 1))[0] for r in range(args.reps)])
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write("rep,w1,w2\n")
                for r, (w1, w2) in enumerate(rows):
                    fh.write(f"{r},{w1!r},{w2!r}\n")
        _emit({"n": args.n, "reps": args.reps, "seed": seed, "mean": rows.mean(axis=0), "cov": np.cov(rows.T)}, args)
        return 0
    if args.inp:
        with open(args.inp) as fh:
            pi = parse_permutation(fh.read())
    elif args.n is not None:
        pi = random_permutations(stream(_seed(args)), args.n, 1)[0]
    else:
        raise UsageError("give --in, or --n with --seed")
    w1, w2 = standardized_descent_inversion(pi)
    _emit(
        {"n": len(pi), "permutation": format_permutation(pi), "des": descents(pi), "inv": inversions(pi), "w1": w1, "w2": w2},
        args,
    )
    return 0


def builtin_coupling(name: str, n: int | None, p: float | None):
    from . import couplings as c

    if name == "graph":
        return c.graph_coupling(n or 5, 0.5 if p is None else p)
    if name == "permutation":
        return c.permutation_coupling(n=n or 5)
    if name == "coins":
        return c.coin_sum(n or 4)
    if name == "swap":
        return c.swap_pair(n or 6)
    if name == "flip":
        return c.sign_flip()
    if name == "bernoulli":
        return c.bernoulli_size_bias(0.3 if p is None else p)
    if name == "overlap":
        return c.overlapping_bernoulli_size_bias()
    if name == "zero":
        return c.zero_coupling()
    raise UsageError(f"unknown builtin coupling {name!r}")


def cmd_verify(args) -> int:
    from .couplings import EQUAL_MARGINAL, bound_terms, check_equal_marginal, exact_bound_terms, moment_relations, verify_identity

    model = builtin_coupling(args.builtin, args.n, args.p)
    seed = _seed(args) if args.mode == "mc" or (args.bounds and not model.enumerable) else (args.seed or 0)
    if args.mode == "exact" and not model.enumerable:
        raise UsageError(f"{model.name} has no exact enumerator; use --mode mc")
    report = verify_identity(model, mode=args.mode, reps=args.reps or 10_000, seed=seed).to_dict()
    ok = report["pass"]
    if model.enumerable:
        mom = moment_relations(model)
        report["moments"] = {"mean_w": mom.mean_w, "cov_w": mom.cov_w, "e_g_dt": mom.g_dt, "max_error": mom.max_error}
        ok = ok and mom.max_error <= 1e-10
        if model.variant == EQUAL_MARGINAL:
            em = check_equal_marginal(model)
            report["equal_marginal"] = {"marginal_tv": em.marginal_tv, "drift_residual": em.drift_residual}
            ok = ok and em.max_error <= 1e-10
    if args.bounds:
        terms = exact_bound_terms(model) if model.enumerable else bound_terms(model, reps=args.reps or 200, seed=seed)
        report["bound_terms"] = terms.to_dict()
    report["pass"] = bool(ok)
    _emit(report, args)
    return 0 if ok else 1


def cmd_experiment(args) -> int:
    from .montecarlo import ExperimentConfig, run_experiment, write_csv

    seed = _seed(args)
    if not args.n_list:
        raise UsageError("--n is required")
    kernel = parse_kernel(args.kernel) if args.kernel else None
    model = args.model or ("graphon" if kernel is not None else "gnp")
    if args.kind == "power" and kernel is None:
        raise UsageError("power experiments need --kernel")
    config = ExperimentConfig(
        args.kind,
        tuple(args.n_list),
        model,
        p=0.5 if args.p is None else args.p,
        kernel=kernel,
        alpha=args.alpha,
        reps=args.reps or 1000,
        seed=seed,
        jobs=args.jobs,
        **_domain(args),
    )
    log.info("running %s experiment, n=%s, reps=%d", config.kind, list(config.n), config.reps)
    summary, mats = run_experiment(config)
    if args.csv:
        write_csv(args.csv, config, mats)
    _emit(summary, args)
    return 0


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (falls back to ${SEED_ENV})")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")
    common.add_argument("--verbose", action="store_true")

    domain = argparse.ArgumentParser(add_help=False)
    domain.add_argument("--alpha", type=float, default=0.05)
    domain.add_argument("--p-lo", type=float, default=0.01)
    domain.add_argument("--p-hi", type=float, default=0.99)
    domain.add_argument("--grid", type=float, default=1e-3, help="grid step in p")

    parser = argparse.ArgumentParser(prog="graphstein", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate G(n, p) or G(n, kernel)")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--kernel")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("count", parents=[common], help="count a subgraph pattern")
    p.add_argument("--in", dest="inp")
    p.add_argument("--pattern", default="c4", choices=["k2", "k3", "c4"])
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("test", parents=[common, domain], help="homogeneity test; exit 1 on rejection")
    p.add_argument("--in", dest="inp")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("confset", parents=[common, domain], help="confidence set for p")
    p.add_argument("--in", dest="inp")
    p.set_defaults(func=cmd_confset)

    p = sub.add_parser("permstat", parents=[common], help="descent/inversion statistics")
    p.add_argument("--in", dest="inp", help="file with a 1-based permutation")
    p.add_argument("--n", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_permstat)

    p = sub.add_parser("verify-coupling", parents=[common], help="check the coupling identity")
    p.add_argument(
        "--builtin", required=True,
        choices=["graph", "permutation", "coins", "swap", "flip", "bernoulli", "overlap", "zero"],
    )
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--reps", type=int)
    p.add_argument("--bounds", action="store_true", help="also report the bound terms")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", parents=[common, domain], help="Monte Carlo experiments")
    p.add_argument("--kind", required=True, choices=["coverage", "power", "distance", "rate"])
    p.add_argument("--model", choices=["gnp", "graphon", "perm"])
    p.add_argument("--n", dest="n_list", type=int, nargs="+")
    p.add_argument("--p", type=float)
    p.add_argument("--kernel")
    p.add_argument("--reps", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except GraphFormatError as exc:
        print(f"graphstein: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, MemoryError, OSError) as exc:
        print(f"graphstein {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
