"""Command-line front end: proxes, solvers, data generation, benchmark sweeps.

Configuration precedence is flags > config file (plain key=value lines,
'#' comments) > built-in defaults; the effective configuration is echoed
into the output directory.  Exit codes: 0 success, 2 configuration
error, 3 numeric/domain error, 4 iteration budget exhausted (outputs are
still written).
"""

import argparse
import os
import sys
import time

import numpy as np

from .errors import ConfigurationError, NumericError, SymproxError
from .experiments import (
    BlockSpec,
    clipped_raw_estimator,
    empirical_cov,
    gen_block_lowrank_cov,
    gen_sparse_precision,
    metrics,
    read_dataset,
    sample_gaussian,
    write_dataset,
)
from .mm_glasso import (
    MMConfig,
    NoisyGlassoProblem,
    dr_noisy_baseline,
    glasso_solve,
    mm_solve,
)
from .scalarprox import Divergence, Penalty, parse_kernel
from .spectralprox import SpectralProxRequest, prox_spectral
from .splitting import DRConfig, ObjectiveSpec, dr_solve, objective_eval, write_trace_csv
from .symlin import (
    SymMatrix,
    atomic_write_text,
    format_float,
    fro_norm,
    read_matrix_csv,
    spd_inverse,
    write_matrix_csv,
)

_DEFAULTS = {
    "prox": {
        "kernel": None, "matrix": None, "t": None, "gamma": 1.0, "psd": False,
        "out": ".",
    },
    "gen": {
        "scenario": "cov", "n": 100, "blocks": "14,36,18,10,22", "p": 1e-3,
        "sigma": "0.1", "nsamples": None, "seed": 0, "out": ".",
    },
    "solve-cov": {
        "data": None, "n": 100, "blocks": "14,36,18,10,22", "sigma": "0.1",
        "nsamples": None, "mu0": 0.2, "mu1": 0.1, "gamma": 1.0, "alpha": 1.5,
        "eps": 1e-10, "max_iter": 2000, "seed": 0, "support_tol": 1e-8,
        "out": ".",
    },
    "solve-glasso": {
        "data": None, "n": 100, "p": 1e-3, "sigma": "0.1", "nsamples": 1000,
        "mu0": 0.005, "mu1": 0.05, "gamma": 1.0, "alpha": 1.0, "eps": 1e-10,
        "max_iter": 2000, "outer_eps": 1e-8, "outer_max": 20, "seed": 0,
        "support_tol": 1e-8, "out": ".",
    },
    "bench": {
        "n": 100, "p": 1e-3, "nsamples": 1000,
        "sigma": "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4", "reps": 20,
        "method": "mm,glasso,dr-noisy", "mu0": 0.005, "mu1": 0.05,
        "gamma": 1.0, "alpha": 1.0, "eps": 1e-10, "max_iter": 2000,
        "outer_eps": 1e-8, "outer_max": 20, "seed": 0, "support_tol": 1e-8,
        "wall_times": False, "out": ".",
    },
}

_FLOAT_KEYS = {
    "gamma", "alpha", "eps", "mu0", "mu1", "p", "outer_eps", "support_tol",
}
_INT_KEYS = {"n", "nsamples", "seed", "max_iter", "outer_max", "reps"}
_BOOL_KEYS = {"psd", "wall_times"}


def _parse_config_file(path):
    if not os.path.exists(path):
        raise ConfigurationError(f"config file not found: {path}")
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(
                    f"{path}:{lineno}: expected key=value, got '{line}'"
                )
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def _coerce(key, value):
    if value is None:
        return None
    if key in _FLOAT_KEYS:
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigurationError(f"key '{key}' expects a number, got '{value}'") from None
    if key in _INT_KEYS:
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigurationError(f"key '{key}' expects an integer, got '{value}'") from None
    if key in _BOOL_KEYS:
        if isinstance(value, bool):
            return value
        v = str(value).lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"key '{key}' expects a boolean, got '{value}'")
    return value


def _effective(cmd, args):
    """Merge CLI flags, config file, and defaults for one subcommand."""
    cfgfile = _parse_config_file(args.config) if args.config else {}
    defaults = _DEFAULTS[cmd]
    for key in cfgfile:
        if key not in defaults:
            raise ConfigurationError(f"unknown config key '{key}' for command '{cmd}'")
    eff = {}
    for key, dflt in defaults.items():
        cli_val = getattr(args, key.replace("-", "_"), None)
        if cli_val is not None:
            eff[key] = _coerce(key, cli_val)
        elif key in cfgfile:
            eff[key] = _coerce(key, cfgfile[key])
        else:
            eff[key] = dflt
    return eff


def _echo_config(eff, outdir):
    os.makedirs(outdir, exist_ok=True)
    lines = []
    for k in sorted(eff):
        v = eff[k]
        if isinstance(v, float):
            v = format_float(v)
        lines.append(f"{k}={v}")
    atomic_write_text(os.path.join(outdir, "effective-config.txt"), "\n".join(lines) + "\n")


def _sigma_list(text):
    try:
        vals = [float(tok) for tok in str(text).split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigurationError(f"key 'sigma' expects a comma-separated float list, got '{text}'") from None
    if not vals or any(v < 0 for v in vals):
        raise ConfigurationError("key 'sigma' must list nonnegative values")
    return vals


def _blocks_list(text):
    try:
        sizes = tuple(int(tok) for tok in str(text).split(",") if tok.strip() != "")
    except ValueError:
        raise ConfigurationError(f"key 'blocks' expects comma-separated integers, got '{text}'") from None
    return BlockSpec(sizes)


# ---------------------------------------------------------------------------
# dataset helpers shared by gen / solve / bench


def _check_nsamples(eff):
    if eff["nsamples"] is not None and eff["nsamples"] < 1:
        raise ConfigurationError("key 'nsamples' must be at least 1")


def _make_cov_dataset(eff):
    blocks = _blocks_list(eff["blocks"])
    if eff["n"] != blocks.n:
        raise ConfigurationError(
            f"key 'n' ({eff['n']}) disagrees with the sum of 'blocks' ({blocks.n})"
        )
    _check_nsamples(eff)
    sigma = _sigma_list(eff["sigma"])[0]
    y_star = gen_block_lowrank_cov(blocks, eff["seed"])
    n_samples = eff["nsamples"] if eff["nsamples"] else blocks.n
    ds = sample_gaussian(y_star, sigma, n_samples, eff["seed"] + 1)
    extra = {"generator": "block_lowrank", "blocks": eff["blocks"]}
    return ds, None, extra


def _make_glasso_dataset(eff):
    if not 0.0 < eff["p"] < 1.0:
        raise ConfigurationError(f"key 'p' must lie in (0, 1), got {eff['p']}")
    if eff["n"] < 1:
        raise ConfigurationError("key 'n' must be at least 1")
    _check_nsamples(eff)
    sigma = _sigma_list(eff["sigma"])[0]
    c_star = gen_sparse_precision(eff["n"], eff["p"], eff["seed"])
    y_star = spd_inverse(c_star)
    n_samples = eff["nsamples"] if eff["nsamples"] else 1000
    ds = sample_gaussian(y_star, sigma, n_samples, eff["seed"] + 1)
    extra = {"generator": "sparse_precision", "p": format_float(eff["p"])}
    return ds, c_star, extra


def _load_or_make(eff, maker):
    if eff.get("data"):
        ds, meta = read_dataset(eff["data"])
        c_star = None
        c_star_path = os.path.join(eff["data"], "c_star.csv")
        if os.path.exists(c_star_path):
            c_star = read_matrix_csv(c_star_path)
        return ds, c_star, meta
    ds, c_star, extra = maker(eff)
    return ds, c_star, extra


# ---------------------------------------------------------------------------
# subcommands


def _cmd_prox(args):
    eff = _effective("prox", args)
    if not eff["matrix"]:
        raise ConfigurationError("key 'matrix' is required (path to a matrix CSV)")
    if not eff["kernel"]:
        raise ConfigurationError("key 'kernel' is required (e.g. 'divergence=burg penalty=nuclear mu=0.2')")
    kernel = parse_kernel(eff["kernel"])
    c_bar = read_matrix_csv(eff["matrix"])
    if c_bar.asym_residual > 0:
        print(f"asymmetry residual of input: {format_float(c_bar.asym_residual)}")
    if eff["t"]:
        t = read_matrix_csv(eff["t"])
    else:
        t = SymMatrix(np.zeros((c_bar.n, c_bar.n)), strict=False)
    req = SpectralProxRequest(
        kernel=kernel, gamma=eff["gamma"], t=t, c_bar=c_bar, psd=eff["psd"]
    )
    result = prox_spectral(req)
    outdir = eff["out"]
    _echo_config(eff, outdir)
    write_matrix_csv(result, os.path.join(outdir, "result.csv"))
    spec = ObjectiveSpec(
        divergence=kernel.divergence, t=t, g0=kernel.penalty, mu1=0.0, psd=eff["psd"]
    )
    obj = objective_eval(spec, result) + fro_norm(
        SymMatrix(result.mat - c_bar.mat, strict=False)
    ) ** 2 / (2.0 * eff["gamma"])
    print(f"objective={format_float(obj)}")
    return 0


def _cmd_gen(args):
    eff = _effective("gen", args)
    if eff["scenario"] not in ("cov", "glasso"):
        raise ConfigurationError(f"key 'scenario' must be 'cov' or 'glasso', got '{eff['scenario']}'")
    maker = _make_cov_dataset if eff["scenario"] == "cov" else _make_glasso_dataset
    ds, c_star, extra = maker(eff)
    outdir = eff["out"]
    _echo_config(eff, outdir)
    write_dataset(ds, outdir, extra=extra)
    if c_star is not None:
        write_matrix_csv(c_star, os.path.join(outdir, "c_star.csv"))
    print(f"wrote dataset (n={ds.y_star.n}, N={ds.samples.shape[0]}) to {outdir}")
    return 0


def _cmd_solve_cov(args):
    eff = _effective("solve-cov", args)
    ds, _, _ = _load_or_make(eff, _make_cov_dataset)
    sigma = ds.sigma
    n = ds.y_star.n
    s = empirical_cov(ds)
    t = SymMatrix(s.mat - sigma * sigma * np.eye(n), strict=False)
    spec = ObjectiveSpec(
        divergence=Divergence.half_square(),
        t=t,
        g0=Penalty.nuclear(eff["mu0"]) if eff["mu0"] > 0 else Penalty.none(),
        mu1=eff["mu1"],
        psd=True,
    )
    cfg = DRConfig(gamma=eff["gamma"], alpha=eff["alpha"], eps=eff["eps"], max_iter=eff["max_iter"])
    c0 = SymMatrix(s.mat + np.eye(n), strict=False)
    rep = dr_solve(spec, cfg, c0)
    outdir = eff["out"]
    _echo_config(eff, outdir)
    write_matrix_csv(rep.c_final, os.path.join(outdir, "estimate.csv"))
    write_matrix_csv(rep.c_sparse, os.path.join(outdir, "estimate_sparse.csv"))
    write_trace_csv(rep, os.path.join(outdir, "trace.csv"))
    m = metrics(rep.c_sparse, ds.y_star, support_tol=eff["support_tol"])
    raw = metrics(clipped_raw_estimator(s, sigma), ds.y_star, support_tol=eff["support_tol"])
    line = (
        f"tpr={format_float(m.tpr)} fpr={format_float(m.fpr)} rmse={format_float(m.rmse)} "
        f"raw_rmse={format_float(raw.rmse)} iterations={rep.iterations} stop={rep.stop_reason}"
    )
    print(line)
    atomic_write_text(os.path.join(outdir, "metrics.txt"), line + "\n")
    return 4 if rep.stop_reason == "max_iter" else 0


def _cmd_solve_glasso(args):
    eff = _effective("solve-glasso", args)
    ds, c_star, _ = _load_or_make(eff, _make_glasso_dataset)
    sigma = ds.sigma
    s = empirical_cov(ds)
    prob = NoisyGlassoProblem(s=s, sigma2=sigma * sigma, mu0=eff["mu0"], mu1=eff["mu1"])
    cfg = MMConfig(
        inner=DRConfig(gamma=eff["gamma"], alpha=eff["alpha"], eps=eff["eps"], max_iter=eff["max_iter"]),
        outer_eps=eff["outer_eps"],
        outer_max=eff["outer_max"],
    )
    rep = mm_solve(prob, cfg)
    outdir = eff["out"]
    _echo_config(eff, outdir)
    write_matrix_csv(rep.c_final, os.path.join(outdir, "estimate.csv"))
    write_matrix_csv(rep.c_sparse, os.path.join(outdir, "estimate_sparse.csv"))
    write_trace_csv(rep.last_inner, os.path.join(outdir, "trace.csv"))
    outer_lines = ["outer_iteration,objective"] + [
        f"{i},{format_float(v)}" for i, v in enumerate(rep.outer_objectives)
    ]
    atomic_write_text(os.path.join(outdir, "outer_trace.csv"), "\n".join(outer_lines) + "\n")
    parts = [
        f"outer_iterations={rep.outer_iterations}",
        f"inner_iterations={sum(rep.inner_iterations)}",
        f"stop={rep.stop_reason}",
        f"objective={format_float(rep.outer_objectives[-1])}",
    ]
    if c_star is not None:
        m = metrics(rep.c_sparse, c_star, support_tol=eff["support_tol"])
        y_star = spd_inverse(c_star)
        cov_est = spd_inverse(rep.c_final)
        rmse = fro_norm(SymMatrix(cov_est.mat - y_star.mat, strict=False)) ** 2 / fro_norm(y_star) ** 2
        parts = [
            f"tpr={format_float(m.tpr)}",
            f"fpr={format_float(m.fpr)}",
            f"rmse={format_float(rmse)}",
        ] + parts
    line = " ".join(parts)
    print(line)
    atomic_write_text(os.path.join(outdir, "metrics.txt"), line + "\n")
    return 4 if rep.stop_reason == "max_iter" else 0


_METHODS = ("mm", "glasso", "dr-noisy")


def _bench_one(method, s, c_star, y_star, eff):
    sigma2 = eff["_sigma"] ** 2
    inner = DRConfig(gamma=eff["gamma"], alpha=eff["alpha"], eps=eff["eps"], max_iter=eff["max_iter"])
    if method == "mm":
        prob = NoisyGlassoProblem(s=s, sigma2=sigma2, mu0=eff["mu0"], mu1=eff["mu1"])
        rep = mm_solve(prob, MMConfig(inner=inner, outer_eps=eff["outer_eps"], outer_max=eff["outer_max"]))
        c_final, c_sparse = rep.c_final, rep.c_sparse
        iters = sum(rep.inner_iterations)
    elif method == "glasso":
        rep = glasso_solve(s, eff["mu1"], cfg=inner)
        c_final, c_sparse = rep.c_final, rep.c_sparse
        iters = rep.iterations
    else:
        rep = dr_noisy_baseline(s, eff["mu0"], eff["mu1"], cfg=inner)
        c_final, c_sparse = rep.c_final, rep.c_sparse
        iters = rep.iterations
    m = metrics(c_sparse, c_star, support_tol=eff["support_tol"])
    cov_est = spd_inverse(c_final)
    rmse = fro_norm(SymMatrix(cov_est.mat - y_star.mat, strict=False)) ** 2 / fro_norm(y_star) ** 2
    return rmse, m.tpr, m.fpr, iters


def _cmd_bench(args):
    eff = _effective("bench", args)
    sigmas = _sigma_list(eff["sigma"])
    methods = []
    for tok in str(eff["method"]).split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok not in _METHODS:
            raise ConfigurationError(f"key 'method' lists unknown method '{tok}' (choose from {_METHODS})")
        if tok not in methods:
            methods.append(tok)
    if not methods:
        raise ConfigurationError("key 'method' must list at least one method")
    methods = [m for m in _METHODS if m in methods]  # canonical row order
    if not eff["reps"] >= 1:
        raise ConfigurationError("key 'reps' must be at least 1")

    c_star = gen_sparse_precision(eff["n"], eff["p"], eff["seed"])
    y_star = spd_inverse(c_star)
    n_samples = eff["nsamples"] if eff["nsamples"] else 1000

    rows = []
    for method in methods:
        for sigma in sigmas:
            for rep_i in range(eff["reps"]):
                sample_seed = eff["seed"] + 7919 * (rep_i + 1)
                ds = sample_gaussian(y_star, sigma, n_samples, sample_seed)
                s = empirical_cov(ds)
                cell = dict(eff)
                cell["_sigma"] = sigma
                t0 = time.perf_counter()
                rmse, tpr, fpr, iters = _bench_one(method, s, c_star, y_star, cell)
                elapsed = time.perf_counter() - t0 if eff["wall_times"] else 0.0
                rows.append((method, sigma, sample_seed, rmse, tpr, fpr, iters, elapsed))

    outdir = eff["out"]
    _echo_config(eff, outdir)
    lines = ["method,sigma,seed,rmse,tpr,fpr,iterations,seconds"]
    for method, sigma, seed, rmse, tpr, fpr, iters, secs in rows:
        lines.append(
            f"{method},{format_float(sigma)},{seed},{format_float(rmse)},"
            f"{format_float(tpr)},{format_float(fpr)},{iters},{format_float(secs)}"
        )
    atomic_write_text(os.path.join(outdir, "results.csv"), "\n".join(lines) + "\n")

    agg_lines = ["method,sigma,mean_rmse,mean_tpr,mean_fpr,mean_iterations"]
    for method in methods:
        for sigma in sigmas:
            cell = [r for r in rows if r[0] == method and r[1] == sigma]
            arr = np.array([(r[3], r[4], r[5], r[6]) for r in cell])
            mean = arr.mean(axis=0)
            agg_lines.append(
                f"{method},{format_float(sigma)},{format_float(mean[0])},"
                f"{format_float(mean[1])},{format_float(mean[2])},{format_float(mean[3])}"
            )
    atomic_write_text(os.path.join(outdir, "aggregate.csv"), "\n".join(agg_lines) + "\n")
    print(f"wrote {len(rows)} rows to {os.path.join(outdir, 'results.csv')}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sp):
    sp.add_argument("--config", help="key=value config file")
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--seed", type=int, help="base RNG seed")


def _add_solver_opts(sp):
    sp.add_argument("--mu0", type=float, help="spectral penalty weight")
    sp.add_argument("--mu1", type=float, help="elementwise l1 weight")
    sp.add_argument("--gamma", type=float, help="prox scale gamma")
    sp.add_argument("--alpha", type=float, help="relaxation in (0, 2)")
    sp.add_argument("--eps", type=float, help="relative-objective tolerance")
    sp.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap")


def _build_parser():
    ap = argparse.ArgumentParser(prog="symprox", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prox", help="evaluate a spectral proximity operator")
    _add_common(p)
    p.add_argument("--matrix", help="input matrix CSV")
    p.add_argument("--kernel", help="kernel spec, e.g. 'divergence=burg penalty=nuclear mu=0.2'")
    p.add_argument("--t", help="linear-term matrix CSV (default zero)")
    p.add_argument("--gamma", type=float, help="prox scale gamma")
    p.add_argument("--psd", action="store_const", const=True, help="project eigenvalues onto [0, inf)")

    g = sub.add_parser("gen", help="generate a synthetic dataset")
    _add_common(g)
    g.add_argument("--scenario", choices=("cov", "glasso"))
    g.add_argument("--n", type=int)
    g.add_argument("--blocks", help="comma-separated block sizes (cov scenario)")
    g.add_argument("--p", type=float, help="precision density (glasso scenario)")
    g.add_argument("--sigma", help="noise standard deviation")
    g.add_argument("--nsamples", type=int)

    sc = sub.add_parser("solve-cov", help="sparse covariance estimation (quadratic model)")
    _add_common(sc)
    _add_solver_opts(sc)
    sc.add_argument("--data", help="dataset directory from 'gen'")
    sc.add_argument("--n", type=int)
    sc.add_argument("--blocks")
    sc.add_argument("--sigma")
    sc.add_argument("--nsamples", type=int)
    sc.add_argument("--support-tol", dest="support_tol", type=float)

    sg = sub.add_parser("solve-glasso", help="noisy graphical lasso (MM solver)")
    _add_common(sg)
    _add_solver_opts(sg)
    sg.add_argument("--data", help="dataset directory from 'gen'")
    sg.add_argument("--n", type=int)
    sg.add_argument("--p", type=float)
    sg.add_argument("--sigma")
    sg.add_argument("--nsamples", type=int)
    sg.add_argument("--outer-eps", dest="outer_eps", type=float)
    sg.add_argument("--outer-max", dest="outer_max", type=int)
    sg.add_argument("--support-tol", dest="support_tol", type=float)

    b = sub.add_parser("bench", help="sigma sweep over methods, CSV reports")
    _add_common(b)
    _add_solver_opts(b)
    b.add_argument("--sigma", help="comma-separated noise levels")
    b.add_argument("--reps", type=int, help="replications per sigma")
    b.add_argument("--method", help="comma-separated subset of mm,glasso,dr-noisy")
    b.add_argument("--n", type=int)
    b.add_argument("--p", type=float)
    b.add_argument("--nsamples", type=int)
    b.add_argument("--outer-eps", dest="outer_eps", type=float)
    b.add_argument("--outer-max", dest="outer_max", type=int)
    b.add_argument("--support-tol", dest="support_tol", type=float)
    b.add_argument("--wall-times", dest="wall_times", action="store_const", const=True,
                   help="record wall-clock seconds (breaks byte-determinism of results.csv)")
    return ap


_HANDLERS = {
    "prox": _cmd_prox,
    "gen": _cmd_gen,
    "solve-cov": _cmd_solve_cov,
    "solve-glasso": _cmd_solve_glasso,
    "bench": _cmd_bench,
}


def main(argv=None):
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code else 0
    try:
        return _HANDLERS[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except SymproxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
