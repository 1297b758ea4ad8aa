"""Command-line interface wiring graph generation, diagnostics and fitting.

Subcommands: gen-graph, spectrum, fit-geometry, fit, sample-prior,
rate-experiment. Report-style commands write delimited data (CSV/JSON) and
render the matching figure as PNG next to it unless --no-plot is given.
Exit codes: 0 success, 1 validation error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import graphs
from .experiments import RateExperimentConfig, emit_geometry_figure_data, run_rate_experiment
from .inference import (
    ClassificationData,
    GridConfig,
    MCMCConfig,
    RegressionData,
    classification_posterior,
    regression_posterior,
)
from .priors import PriorSpec, precision_eigenvalues, sample_c, sample_prior
from .spectral import eig, geometry_fit, geometry_points, synthetic_power_law_spectrum

DEFAULT_SEED = 1729


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _load_graph(args) -> graphs.Graph:
    return graphs.load_edge_list(args.graph, largest_component=args.largest_component)


def _read_vertex_values(path: str, n: int) -> np.ndarray:
    """CSV of `vertex,value` rows; vertices must cover 1..n exactly once."""
    values = np.full(n, np.nan)
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (lineno == 1 and row[0].strip().lower() == "vertex"):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected vertex,value")
            try:
                v = int(row[0])
                x = float(row[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            if not (1 <= v <= n):
                raise ValueError(f"{path}:{lineno}: vertex {v} outside 1..{n}")
            if v in seen:
                raise ValueError(f"{path}:{lineno}: duplicate vertex {v}")
            seen.add(v)
            values[v - 1] = x
    if len(seen) != n:
        missing = sorted(set(range(1, n + 1)) - seen)[:5]
        raise ValueError(f"{path}: data covers {len(seen)} of {n} vertices "
                         f"(first missing: {missing})")
    return values


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_gen_graph(args) -> int:
    family = args.family

    def need(name):
        value = getattr(args, name.replace("-", "_"))
        if value is None:
            raise ValueError(f"gen-graph {family} requires --{name}")
        return value

    if family == "path":
        g = graphs.make_path(need("n"))
    elif family == "ring":
        g = graphs.make_ring(need("n"))
    elif family == "complete":
        g = graphs.make_complete(need("m"))
    elif family == "grid":
        g = graphs.make_grid(need("d"), need("side"))
    elif family == "torus":
        g = graphs.make_torus(need("d"), need("side"))
    elif family == "ladder":
        g = graphs.make_ladder(need("n"))
    elif family == "lollipop":
        g = graphs.make_lollipop(need("m"), need("path_len"))
    elif family == "ws":
        g = graphs.watts_strogatz(need("n"), need("p"), args.seed)
    else:
        raise ValueError(f"unknown family {family!r}")
    graphs.save_edge_list(g, args.out)
    print(f"wrote {g.n} vertices, {g.num_edges} edges to {args.out}")
    return 0


def _cmd_spectrum(args) -> int:
    g = _load_graph(args)
    s = eig(g)
    if args.format == "json":
        payload = {"n": s.n, "eigenvalues": [float(v) for v in s.eigenvalues]}
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = ",".join(_fmt(v) for v in s.eigenvalues) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {s.n} eigenvalues to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_fit_geometry(args) -> int:
    if args.synthetic:
        if args.n is None or args.r is None:
            raise ValueError("--synthetic requires --n and --r")
        s = synthetic_power_law_spectrum(args.n, args.r)
        fit = geometry_fit(s, drop_low=args.drop_low, kappa=args.kappa)
        points = geometry_points(s)
        out_base = Path(args.out)
        out_base.parent.mkdir(parents=True, exist_ok=True)
        with open(out_base.with_suffix(".csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "log_i_over_n", "log_lambda"])
            for i, x, y in points:
                writer.writerow([int(i), _fmt(x), _fmt(y)])
        with open(out_base.with_suffix(".json"), "w", encoding="utf-8") as fh:
            json.dump(fit.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        if not args.no_plot:
            from .figures import render_geometry_figure

            render_geometry_figure(points, fit, out_base.with_suffix(".png"))
    else:
        if not args.graph:
            raise ValueError("fit-geometry needs --graph FILE or --synthetic")
        g = _load_graph(args)
        fit = emit_geometry_figure_data(g, args.out, drop_low=args.drop_low,
                                        kappa=args.kappa, plot=not args.no_plot)
    print(f"r_hat={_fmt(fit.r_hat)} slope={_fmt(fit.slope)} "
          f"residual_rms={_fmt(fit.residual_rms)}")
    return 0


def _build_prior(args) -> PriorSpec:
    if args.prior == "power":
        if args.alpha is None:
            raise ValueError("--prior power requires --alpha")
        return PriorSpec.power(alpha=args.alpha, r=args.r)
    return PriorSpec.exponential(r=args.r)


def _cmd_fit(args) -> int:
    g = _load_graph(args)
    s = eig(g)
    spec = _build_prior(args)
    out_base = Path(args.out)
    out_base.parent.mkdir(parents=True, exist_ok=True)

    if args.task == "regression":
        if args.sigma is None and args.sigma_range is None:
            raise ValueError("regression requires --sigma or --sigma-range")
        sigma = args.sigma if args.sigma is not None else tuple(args.sigma_range)
        data = RegressionData(y=_read_vertex_values(args.data, s.n), sigma=sigma)
        grid = GridConfig(c_values=(args.single_c,)) if args.single_c is not None \
            else GridConfig(num_c=args.num_c, num_sigma=args.num_sigma)
        summary = regression_posterior(s, spec, data, grid)
        observations = data.y
    else:
        labels = _read_vertex_values(args.data, s.n)
        if not np.all(np.isin(labels, (0.0, 1.0))):
            raise ValueError("classification labels must be 0 or 1")
        data = ClassificationData(y=labels.astype(np.int64))
        cfg = MCMCConfig(
            chain_length=args.chain_length,
            burn_in=args.burn_in,
            z_step=args.z_step,
            # --single-c pins the scale: start there and disable c moves
            c_step=0.0 if args.single_c is not None else args.c_step,
            seed=args.seed,
            c_init=args.single_c if args.single_c is not None else 1.0,
        )
        summary = classification_posterior(s, spec, data, cfg)
        observations = data.y

    summary.write_csv(out_base.with_suffix(".csv"))
    summary.write_json(out_base.with_suffix(".json"))
    if not args.no_plot:
        from .figures import render_posterior_figure

        render_posterior_figure(summary, out_base.with_suffix(".png"), observations)
    print(f"wrote posterior summary to {out_base}.csv/.json")
    return 0


def _cmd_sample_prior(args) -> int:
    g = _load_graph(args)
    s = eig(g)
    spec = _build_prior(args)
    rng = np.random.default_rng(args.seed)
    rows = []
    for k in range(args.draws):
        c = args.c if args.c is not None else sample_c(rng)
        cg = precision_eigenvalues(spec, s, c)
        f = sample_prior(cg, s, rng)
        rows.extend((k, v + 1, f[v]) for v in range(s.n))
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["draw", "vertex", "value"])
        for k, v, x in rows:
            writer.writerow([k, v, _fmt(x)])
    print(f"wrote {args.draws} prior draws on {s.n} vertices to {args.out}")
    return 0


def _cmd_rate_experiment(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = RateExperimentConfig.from_dict(json.load(fh))
    result = run_rate_experiment(cfg)
    out_base = Path(args.out)
    out_base.parent.mkdir(parents=True, exist_ok=True)
    result.write_json(out_base.with_suffix(".json"))
    result.write_csv(out_base.with_suffix(".csv"))
    if not args.no_plot:
        from .figures import render_rate_figure

        render_rate_figure(result, out_base.with_suffix(".png"))
    print(f"fitted exponent {_fmt(result.fitted_exponent)} "
          f"(theoretical {_fmt(result.theoretical_exponent)})")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"random seed (default {DEFAULT_SEED})")

    parser = argparse.ArgumentParser(
        prog="graphsmooth",
        description="Bayesian Laplacian regularisation on graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", parents=[common],
                       help="generate a graph family and write its edge list")
    p.add_argument("family", choices=["path", "ring", "complete", "grid", "torus",
                                      "ladder", "lollipop", "ws"])
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--side", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--path-len", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_graph)

    p = sub.add_parser("spectrum", parents=[common],
                       help="Laplacian eigenvalues of an edge-list graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("fit-geometry", parents=[common],
                       help="fit the geometry parameter r from the spectrum")
    p.add_argument("--graph")
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("--synthetic", action="store_true",
                   help="use an exact power-law spectrum (--n, --r) instead of a graph")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--drop-low", type=int, default=3)
    p.add_argument("--kappa", type=float, default=0.35)
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--out", required=True, help="output base path (.csv/.json/.png)")
    p.set_defaults(func=_cmd_fit_geometry)

    p = sub.add_parser("fit", parents=[common],
                       help="fit the posterior for regression or classification data")
    p.add_argument("--task", choices=["regression", "classification"], required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("--data", required=True, help="CSV of vertex,value rows")
    p.add_argument("--prior", choices=["power", "exp"], required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--sigma", type=float)
    p.add_argument("--sigma-range", type=float, nargs=2, metavar=("A", "B"))
    p.add_argument("--num-c", type=int, default=64)
    p.add_argument("--num-sigma", type=int, default=32)
    p.add_argument("--single-c", type=float,
                   help="fix the scale c instead of mixing over the grid")
    p.add_argument("--chain-length", type=int, default=20000)
    p.add_argument("--burn-in", type=int, default=4000)
    p.add_argument("--z-step", type=float, default=0.5)
    p.add_argument("--c-step", type=float, default=0.25)
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--out", required=True, help="output base path (.csv/.json/.png)")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("sample-prior", parents=[common],
                       help="draw functions from a prior and write them as CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("--prior", choices=["power", "exp"], required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--c", type=float,
                   help="fix the scale; omitted: draw c from the hyperprior per draw")
    p.add_argument("--draws", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample_prior)

    p = sub.add_parser("rate-experiment", parents=[common],
                       help="run a contraction-rate experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--out", required=True, help="output base path (.csv/.json/.png)")
    p.set_defaults(func=_cmd_rate_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "prior", None) == "exp":
        args.prior = "exponential"
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
