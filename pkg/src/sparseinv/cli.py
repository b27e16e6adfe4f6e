"""Command-line front end: generate problems, solve them, benchmark grids.

Subcommands
-----------
generate   Write a ground-truth precision, sampled dataset, and sample
           covariance for a chain or random sparsity structure.
solve      Solve a covariance file with the Newton or reference solver;
           writes the solution (sparse triplets), a trace CSV, and a
           manifest.
bench      Sweep a lambda grid with one or more solvers and report
           time-to-epsilon per accuracy level, mirroring standard solver
           comparison tables; cells whose run exceeds the iteration budget
           are marked "*".

Exit codes: 0 success/converged, 2 maximum iterations reached without
convergence, 3 line search failure, 4 file parse error, 5 invalid
parameters. Every output directory gets a manifest.json sufficient to
re-run the job reproducibly on the same platform.
"""

from __future__ import annotations

import argparse
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

import numpy as np

from . import __version__
from .datasets import (
    NORMAL_METHOD,
    PRNG_NAME,
    chain_precision,
    random_precision,
    sample_covariance,
    sample_gaussian,
)
from .fileio import (
    ParseError,
    ensure_dir,
    fmt,
    read_matrix,
    sha256_file,
    write_dataset,
    write_manifest,
    write_matrix,
    write_trace_csv,
)
from .linalg import NotPositiveDefinite
from .linesearch import LineSearchConfig, LineSearchFailed
from .metrics import recovery
from .objective import Problem, offdiag_penalty, uniform_penalty
from .solver import SolverConfig, solve_newton, solve_reference

EXIT_OK = 0
EXIT_MAX_ITER = 2
EXIT_LINE_SEARCH = 3
EXIT_PARSE = 4
EXIT_BAD_PARAMS = 5

SOLVERS = ("newton", "reference")


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _manifest(args: argparse.Namespace, inputs: list[str], extra: dict) -> dict:
    digests = {path: sha256_file(path) for path in inputs}
    return {
        "command": sys.argv if sys.argv else ["sparseinv"],
        "config": {k: v for k, v in sorted(vars(args).items()) if k != "func"},
        "artifact_version": __version__,
        "prng": PRNG_NAME,
        "normal_sampler": NORMAL_METHOD,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "platform": {
            "machine": platform.platform(),
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "input_digests": digests,
        **extra,
    }


def _penalty_matrix(args, p: int) -> np.ndarray:
    if args.lambda_file:
        Lam = read_matrix(args.lambda_file)
        if Lam.shape != (p, p):
            raise ValueError(f"penalty file has shape {Lam.shape}, expected {(p, p)}")
        return Lam
    if args.lam is None:
        raise ValueError("either --lambda or --lambda-file is required")
    if args.penalize_diagonal:
        return uniform_penalty(p, args.lam)
    return offdiag_penalty(p, args.lam)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        line_search=LineSearchConfig(sigma=args.sigma, beta=args.beta),
        outer_tol=args.tol,
        max_outer=args.max_outer,
        inner_schedule_rate=args.inner_rate,
        inner_min_sweeps=args.inner_min_sweeps,
        seed=args.seed,
        use_block_decomposition=not args.no_block_decomp,
        coordinate_permutation=args.permute_coords,
    )


def _generate_truth(kind: str, p: int, nnz: int | None, seed: int):
    if kind == "chain":
        return chain_precision(p)
    return random_precision(p, target_nnz=nnz, seed=seed)


def cmd_generate(args) -> int:
    try:
        truth = _generate_truth(args.kind, args.p, args.nnz, args.seed)
        data = sample_gaussian(truth, args.n, seed=args.seed)
        S = sample_covariance(data)
    except ValueError as err:
        return _fail(EXIT_BAD_PARAMS, str(err))
    ensure_dir(args.out)
    precision_path = os.path.join(args.out, "precision.txt")
    dataset_path = os.path.join(args.out, "dataset.txt")
    cov_path = os.path.join(args.out, "covariance.txt")
    write_matrix(precision_path, truth.precision, "sparse")
    write_dataset(dataset_path, data)
    write_matrix(cov_path, S, "dense")
    write_manifest(
        os.path.join(args.out, "manifest.json"),
        _manifest(args, [], {"outputs": [precision_path, dataset_path, cov_path]}),
    )
    print(f"wrote {precision_path}, {dataset_path}, {cov_path}")
    return EXIT_OK


def cmd_solve(args) -> int:
    try:
        S = read_matrix(args.covariance)
    except (OSError, ParseError) as err:
        return _fail(EXIT_PARSE, str(err))
    try:
        Lam = _penalty_matrix(args, S.shape[0])
        prob = Problem(S, Lam)
        cfg = _solver_config(args)
    except (OSError, ParseError) as err:
        return _fail(EXIT_PARSE, str(err))
    except ValueError as err:
        return _fail(EXIT_BAD_PARAMS, str(err))

    try:
        if args.solver == "newton":
            sol = solve_newton(prob, config=cfg)
        else:
            sol = solve_reference(prob, tol=args.tol, max_iter=args.max_outer)
    except LineSearchFailed as err:
        return _fail(EXIT_LINE_SEARCH, f"line search failed: {err}")
    except NotPositiveDefinite as err:
        return _fail(EXIT_BAD_PARAMS, f"initial iterate not positive definite: {err}")

    ensure_dir(args.out)
    write_matrix(os.path.join(args.out, "solution.txt"), sol.X, "sparse")
    write_trace_csv(os.path.join(args.out, "trace.csv"), sol.trace)
    write_manifest(
        os.path.join(args.out, "manifest.json"),
        _manifest(
            args,
            [args.covariance] + ([args.lambda_file] if args.lambda_file else []),
            {
                "converged": sol.converged,
                "iterations": sol.iterations,
                "f_opt": fmt(sol.f_opt),
            },
        ),
    )
    if not sol.converged:
        print(
            f"warning: not converged within {args.max_outer} iterations",
            file=sys.stderr,
        )
        return EXIT_MAX_ITER
    print(f"converged in {sol.iterations} iterations, objective {sol.f_opt:.12g}")
    return EXIT_OK


def _bench_cell(prob, solver, cfg, tol, max_outer):
    start = time.perf_counter()
    if solver == "newton":
        sol = solve_newton(prob, config=cfg)
    else:
        sol = solve_reference(prob, tol=tol, max_iter=max_outer)
    return sol, time.perf_counter() - start


def cmd_bench(args) -> int:
    truth = None
    if args.covariance:
        try:
            S = read_matrix(args.covariance)
        except (OSError, ParseError) as err:
            return _fail(EXIT_PARSE, str(err))
    else:
        if args.p is None:
            return _fail(EXIT_BAD_PARAMS, "either --cov or --kind/--p is required")
        try:
            truth = _generate_truth(args.kind, args.p, args.nnz, args.seed)
            n = args.n if args.n is not None else max(args.p // 2, 2)
            S = sample_covariance(sample_gaussian(truth, n, seed=args.seed))
        except ValueError as err:
            return _fail(EXIT_BAD_PARAMS, str(err))
    if args.truth:
        try:
            truth_precision = read_matrix(args.truth)
        except (OSError, ParseError) as err:
            return _fail(EXIT_PARSE, str(err))
        from .datasets import GroundTruth

        truth = GroundTruth(precision=truth_precision, pattern=truth_precision != 0)

    try:
        lambdas = [float(v) for v in args.lambdas.split(",")]
        epsilons = [float(v) for v in args.epsilons.split(",")]
        solvers = args.solvers.split(",")
        for s in solvers:
            if s not in SOLVERS:
                raise ValueError(f"unknown solver {s!r}")
    except ValueError as err:
        return _fail(EXIT_BAD_PARAMS, str(err))

    p = S.shape[0]
    ensure_dir(args.out)
    workers = args.threads if args.threads else (os.cpu_count() or 1)

    rows = []
    recovery_rows = []
    for lam in lambdas:
        Lam = uniform_penalty(p, lam) if args.penalize_diagonal else offdiag_penalty(p, lam)
        prob = Problem(S, Lam)
        ref_cfg = SolverConfig(
            outer_tol=1e-12,
            max_outer=args.max_outer,
            seed=args.seed,
            use_block_decomposition=not args.no_block_decomp,
        )
        f_star = solve_newton(prob, config=ref_cfg).f_opt
        cfg = _solver_config(args)

        def run(solver, prob=prob, cfg=cfg):
            try:
                return solver, _bench_cell(prob, solver, cfg, args.tol, args.max_outer), None
            except (LineSearchFailed, NotPositiveDefinite) as err:
                return solver, None, err

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, solvers))

        for solver, outcome, err in results:
            if err is not None:
                for eps in epsilons:
                    rows.append((solver, lam, eps, "failed", "", "", fmt(f_star)))
                continue
            sol, wall = outcome
            for eps in epsilons:
                hit = None
                for t, f_t in enumerate(sol.trace.f):
                    if f_t - f_star < eps * abs(f_star):
                        hit = t
                        break
                if hit is None:
                    rows.append((solver, lam, eps, "*", "", "", fmt(f_star)))
                else:
                    rows.append(
                        (
                            solver,
                            lam,
                            eps,
                            "ok",
                            fmt(sol.trace.seconds[hit]),
                            str(hit + 1),
                            fmt(f_star),
                        )
                    )
            if solver == "newton" and truth is not None:
                rep = recovery(sol.X, truth)
                recovery_rows.append(
                    (lam, fmt(rep.tpr), fmt(rep.fpr), rep.nnz_estimate, rep.nnz_truth)
                )

    bench_path = os.path.join(args.out, "bench.csv")
    with open(bench_path, "w") as fh:
        fh.write("solver,lambda,epsilon,status,time_seconds,iterations,f_star\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    if recovery_rows:
        with open(os.path.join(args.out, "recovery.csv"), "w") as fh:
            fh.write("lambda,tpr,fpr,nnz_estimate,nnz_truth\n")
            for row in recovery_rows:
                fh.write(",".join(str(v) for v in row) + "\n")
    write_manifest(
        os.path.join(args.out, "manifest.json"),
        _manifest(
            args,
            [path for path in (args.covariance, args.truth) if path],
            {"outputs": [bench_path]},
        ),
    )
    print(f"wrote {bench_path}")
    return EXIT_OK


def _add_solver_flags(sub) -> None:
    sub.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="uniform penalty weight (off-diagonal only unless --penalize-diagonal)")
    sub.add_argument("--lambda-file", default=None, help="penalty weight matrix file")
    sub.add_argument("--penalize-diagonal", action="store_true",
                     help="apply the scalar --lambda to diagonal entries too")
    sub.add_argument("--tol", type=float, default=1e-8, help="stopping tolerance")
    sub.add_argument("--max-outer", type=int, default=200, help="outer iteration budget")
    sub.add_argument("--inner-rate", type=float, default=1.0 / 3.0,
                     help="sweep budget growth rate per outer iteration")
    sub.add_argument("--inner-min-sweeps", type=int, default=1, help="minimum sweeps per iteration")
    sub.add_argument("--sigma", type=float, default=0.25, help="Armijo sufficient-decrease constant")
    sub.add_argument("--beta", type=float, default=0.5, help="backtracking shrink factor")
    sub.add_argument("--no-block-decomp", action="store_true",
                     help="disable connected-component decomposition")
    sub.add_argument("--permute-coords", action="store_true",
                     help="randomly permute the coordinate order each sweep")
    sub.add_argument("--seed", type=int, default=0, help="random seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparseinv",
        description="Sparse inverse covariance estimation via proximal Newton",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("generate", help="generate a synthetic problem")
    gen.add_argument("--kind", choices=("chain", "random"), required=True)
    gen.add_argument("--p", type=int, required=True, help="dimension")
    gen.add_argument("--n", type=int, required=True, help="number of samples")
    gen.add_argument("--nnz", type=int, default=None,
                     help="target nonzeros for random patterns (default 10p)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory")
    gen.set_defaults(func=cmd_generate)

    solve = subs.add_parser("solve", help="solve a covariance file")
    solve.add_argument("covariance", help="sample covariance matrix file")
    solve.add_argument("--solver", choices=SOLVERS, default="newton")
    _add_solver_flags(solve)
    solve.add_argument("--out", required=True, help="output directory")
    solve.set_defaults(func=cmd_solve)

    bench = subs.add_parser("bench", help="time-to-accuracy over a lambda grid")
    bench.add_argument("--cov", dest="covariance", default=None, help="covariance file")
    bench.add_argument("--kind", choices=("chain", "random"), default="chain")
    bench.add_argument("--p", type=int, default=None)
    bench.add_argument("--n", type=int, default=None, help="samples (default p/2)")
    bench.add_argument("--nnz", type=int, default=None)
    bench.add_argument("--truth", default=None, help="ground-truth precision file for recovery metrics")
    bench.add_argument("--lambdas", required=True, help="comma-separated penalty grid")
    bench.add_argument("--solvers", default="newton,reference")
    bench.add_argument("--epsilons", default="1e-2,1e-6",
                       help="comma-separated accuracy levels for time-to-epsilon")
    bench.add_argument("--threads", type=int, default=0,
                       help="bench worker pool size (default: available parallelism)")
    _add_solver_flags(bench)
    bench.set_defaults(func=cmd_bench, tol=1e-10)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ParseError) as err:
        return _fail(EXIT_PARSE, str(err))
    except ValueError as err:
        return _fail(EXIT_BAD_PARAMS, str(err))


if __name__ == "__main__":
    sys.exit(main())
