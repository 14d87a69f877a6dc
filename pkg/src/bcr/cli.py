"""Command-line entry point: generate, solve, bench, verify.

Exit status: 0 success, 1 verification failure, 2 usage or input error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import generators as gen
from . import oracle, serialize
from .errors import BCRError, NotSpd
from .model import Style
from .rounding import hyperplane_round
from .solver import solve

log = logging.getLogger("bcr")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

BENCH_HEADER = ["seed", "n", "rank", "num_constraints", "method", "iterations", "runtime_ms",
                "objective", "rel_error", "max_violation"]

KIND_STYLE = {"synthetic": Style.GENERAL, "graphcut": Style.BQP, "coseg": Style.BQP,
              "metric": Style.METRIC}

# Size flags per family: (flag, dest, default). These accept sweep syntax in bench.
SIZE_FLAGS = {
    "synthetic": [("--n", "n", 64), ("--rank", "rank", 3), ("--constraints", "constraints", 600)],
    "graphcut": [("--n", "n", 20), ("--rank", "rank", 2)],
    "coseg": [("--images", "images", 2), ("--pixels", "pixels", 4), ("--rank", "rank", 2)],
    "metric": [("--num-matrices", "num_matrices", 20), ("--dim", "dim", 10),
               ("--rank", "rank", 3)],
}


class UsageError(Exception):
    pass


def parse_sweep(text: str) -> list:
    """``a:b:c`` (stop exclusive, like range), a comma list, or a single integer."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError
            vals = list(range(*parts))
        else:
            vals = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"bad sweep {text!r}; use start:stop:step or a comma list") from None
    if not vals:
        raise UsageError(f"sweep {text!r} is empty")
    return vals


def _index_list(text):
    if text is None:
        return None
    try:
        return tuple(int(p) for p in str(text).split(",") if p.strip())
    except ValueError:
        raise UsageError(f"bad index list {text!r}") from None


def make_instance(kind: str, size: dict, opts, seed: int):
    """Build one instance. Returns ``(problem, style, truth or None)``."""
    if kind == "synthetic":
        spec = gen.SyntheticSpec(n=size["n"], true_rank=size["rank"],
                                 num_constraints=size["constraints"], seed=seed,
                                 factor_rows=opts.factor_rows)
        problem, truth = gen.gen_synthetic(spec)
        return problem, Style.GENERAL, truth
    if kind == "graphcut":
        n = size["n"]
        spec = gen.GraphCutSpec(n=n, rank=size["rank"], seed=seed, kappa=opts.kappa,
                                fg_idx=_index_list(opts.fg) or (0,),
                                bg_idx=_index_list(opts.bg) or (n - 1,),
                                gamma_f=opts.gamma_f, gamma_d=opts.gamma_d, radius=opts.radius)
        problem, _ = gen.gen_graphcut(spec)
        return problem, Style.BQP, None
    if kind == "coseg":
        spec = gen.CosegSpec(images=size["images"], sizes=(size["pixels"],) * size["images"],
                             rank=size["rank"], seed=seed, mu=opts.mu,
                             lambda_bound=opts.lambda_bound)
        problem, _ = gen.gen_coseg(spec)
        return problem, Style.BQP, None
    if kind == "metric":
        spec = gen.MetricSpec(num_matrices=size["num_matrices"], dim=size["dim"],
                              target_rank=size["rank"], xi=opts.xi, noise=opts.noise, seed=seed)
        problem, _ = gen.gen_metric(spec)
        return problem, Style.METRIC, None
    raise UsageError(f"unknown kind {kind!r}")


def _add_family_opts(p, kind: str, sweep: bool) -> None:
    for flag, dest, default in SIZE_FLAGS[kind]:
        p.add_argument(flag, dest=dest, default=str(default) if sweep else default,
                       type=str if sweep else int,
                       help="sweep: start:stop:step or a,b,c" if sweep else None)
    if kind == "synthetic":
        p.add_argument("--factor-rows", type=int, default=1)
    elif kind == "graphcut":
        p.add_argument("--fg", default=None, help="foreground indices, e.g. 0,1")
        p.add_argument("--bg", default=None, help="background indices, e.g. 18,19")
        p.add_argument("--kappa", type=float, default=0.6)
        p.add_argument("--gamma-f", type=float, default=0.3)
        p.add_argument("--gamma-d", type=float, default=0.4)
        p.add_argument("--radius", type=float, default=0.8)
    elif kind == "coseg":
        p.add_argument("--mu", type=float, default=1.0)
        p.add_argument("--lambda-bound", type=float, default=2.0)
    elif kind == "metric":
        p.add_argument("--xi", type=float, default=0.5)
        p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)


def _add_config_opts(p) -> None:
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--tol", type=float, help="relative objective change for convergence")
    p.add_argument("--x-update", choices=["closed", "gradient"])
    p.add_argument("--grad-step", type=float)
    p.add_argument("--ge-mode", choices=["exterior", "hinge"])
    p.add_argument("--hinge-weight", type=float)
    p.add_argument("--solver-seed", dest="solver_seed", type=int)


def _flag_settings(args) -> dict:
    out = {k: getattr(args, k, None) for k in ("alpha", "beta", "max_iters", "tol", "x_update",
                                                "grad_step", "ge_mode", "hinge_weight")}
    out["seed"] = getattr(args, "solver_seed", None)
    return {k: v for k, v in out.items() if v is not None}


def cmd_generate(args) -> int:
    size = {dest: getattr(args, dest) for _, dest, _ in SIZE_FLAGS[args.kind]}
    problem, style, _ = make_instance(args.kind, size, args, args.seed)
    serialize.write_text(args.out, serialize.dumps(serialize.problem_to_dict(problem, style)))
    log.info("wrote %s: n=%d, %d constraints", args.out, problem.dim, problem.num_constraints)
    return EXIT_OK


def cmd_solve(args) -> int:
    problem, style, file_cfg = serialize.problem_from_dict(serialize.load_json(args.problem))
    if args.style:
        style = Style(args.style)
    cfg = serialize.config_from(problem, style, {**file_cfg, **_flag_settings(args)})
    result = solve(problem, cfg)
    if not np.all(np.isfinite(result.X)):
        log.error("solve produced a non-finite X")
        return EXIT_NUMERIC
    out = serialize.result_to_dict(result, timing=not args.no_timing)
    if args.round:
        lab = hyperplane_round(result.X, problem.objective, trials=args.round, seed=cfg.seed,
                               problem=problem)
        out["labels"] = [int(v) for v in lab.labels]
        out["label_objective"] = lab.objective
        out["labels_feasible"] = lab.feasible
    serialize.write_text(args.out, serialize.dumps(out))
    print(f"objective {result.objective!r} iterations {result.iterations} "
          f"converged {result.converged} max_violation {result.max_violation:.3e}")
    return EXIT_OK


def cmd_verify(args) -> int:
    problem, _, _ = serialize.problem_from_dict(serialize.load_json(args.problem))
    X = serialize.result_X(serialize.load_json(args.result), problem.dim)
    rep = oracle.check_solution(problem, X, tol=args.tol)
    ok = rep.feasible(args.tol)
    for label, sense, b, v, viol in zip(rep.labels, rep.senses, rep.bounds, rep.values,
                                         rep.violations):
        if args.all or viol > args.tol:
            print(f"{label}\t{sense}\tb={float(b)!r}\tvalue={float(v)!r}\t"
                  f"violation={float(viol)!r}")
    print(f"max_violation {rep.max_violation!r} tol {args.tol!r} {'OK' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY


def _bench_row(kind, size, opts, seed, settings) -> list:
    problem, style, truth = make_instance(kind, size, opts, seed)
    cfg = serialize.config_from(problem, style, settings)
    result = solve(problem, cfg)
    rel = ""
    if truth is not None:
        rel = repr(gen.relative_error(result.X @ result.X.T, truth))
    return [seed, problem.dim, problem.rank, problem.num_constraints,
            f"bcr-{cfg.x_update.value}", result.iterations, repr(result.wall_time_ms),
            repr(result.objective), rel, repr(result.max_violation)]


def bench_rows(kind: str, sweeps: dict, trials: int, seed: int, opts, settings: dict,
               threads: int = 1) -> list:
    """Rows ordered by (sweep point, trial) regardless of thread count."""
    keys = list(sweeps)
    points = [dict(zip(keys, vals)) for vals in itertools.product(*(sweeps[k] for k in keys))]
    jobs = [(p, seed + t) for p in points for t in range(trials)]
    run = lambda job: _bench_row(kind, job[0], opts, job[1], settings)  # noqa: E731
    if threads <= 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, jobs))


def bench_threads() -> int:
    raw = os.environ.get("BCR_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"BCR_THREADS={raw!r} is not an integer") from None
    if n < 1:
        raise UsageError("BCR_THREADS must be >= 1")
    return n


def cmd_bench(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    sweeps = {dest: parse_sweep(getattr(args, dest)) for _, dest, _ in SIZE_FLAGS[args.kind]}
    rows = bench_rows(args.kind, sweeps, args.trials, args.seed, args, _flag_settings(args),
                      threads=bench_threads())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    w.writerows(rows)
    serialize.write_text(args.out, buf.getvalue())
    log.info("wrote %d rows to %s", len(rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bcr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a problem JSON")
    gk = g.add_subparsers(dest="kind", required=True)
    for kind in SIZE_FLAGS:
        p = gk.add_parser(kind)
        _add_family_opts(p, kind, sweep=False)
        p.add_argument("--out", required=True)
        p.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve a problem JSON")
    s.add_argument("problem")
    s.add_argument("--out", required=True)
    s.add_argument("--style", choices=[st.value for st in Style],
                   help="default-parameter rule (overrides the file)")
    s.add_argument("--round", type=int, default=0, metavar="TRIALS",
                   help="also round X to +/-1 labels with this many hyperplanes")
    s.add_argument("--no-timing", action="store_true",
                   help="write runtime_ms as 0 so reruns are byte-identical")
    _add_config_opts(s)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="sweep sizes and write a CSV")
    bk = b.add_subparsers(dest="kind", required=True)
    for kind in SIZE_FLAGS:
        p = bk.add_parser(kind)
        _add_family_opts(p, kind, sweep=True)
        p.add_argument("--trials", type=int, default=5)
        p.add_argument("--out", required=True)
        _add_config_opts(p)
        p.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="check a result against its problem")
    v.add_argument("problem")
    v.add_argument("result")
    v.add_argument("--tol", type=float, default=1e-3)
    v.add_argument("--all", action="store_true", help="list every constraint")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NotSpd, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, BCRError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
