"""Contraction-rate experiments and figure-data emission.

A rate experiment simulates regression or classification data on a graph
family at increasing sizes, computes the posterior for each replicate, and
fits the decay exponent of the estimation error ||posterior mean - truth||_n
against the theoretical exponent beta/(2 beta + r). Truths are drawn near
the boundary of the smoothness ball so the rate is visible at desk scale.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from . import graphs
from .graphs import Graph
from .inference import (
    ClassificationData,
    GridConfig,
    MCMCConfig,
    RegressionData,
    classification_posterior,
    regression_posterior,
)
from .priors import PriorSpec
from .spectral import GeometryFit, Spectrum, eig, geometry_fit, geometry_points, norm_n

WORKERS_ENV_VAR = "GRAPHSMOOTH_WORKERS"

# decay exponent of the raw coefficient profile; 1/2 + 0.05 keeps truths
# just inside the smoothness ball so shrinkage bias is visible
_TAIL_EXPONENT = 0.55


def make_smooth_truth(s: Spectrum, beta: float, C: float, r: float,
                      seed: int | np.random.Generator) -> np.ndarray:
    """Deterministic-given-seed truth with smoothness functional exactly C^2.

    Raw coefficients g_i ~ N(0,1) (i+1)^-0.55 are damped by the smoothness
    weights and the whole vector rescaled so sobolev_norm_sq returns C^2.
    """
    if beta <= 0 or C <= 0:
        raise ValueError(f"need beta > 0 and C > 0, got beta={beta}, C={C}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    i = np.arange(s.n, dtype=np.float64)
    g = rng.standard_normal(s.n) * (i + 1.0) ** (-_TAIL_EXPONENT)
    weights = 1.0 + float(s.n) ** (2.0 * beta / r) * s.eigenvalues**beta
    coeffs = g / np.sqrt(weights)
    # the smoothness functional of coeffs is exactly sum g_i^2
    coeffs *= C / np.sqrt(np.sum(g**2))
    return s.from_coefficients(coeffs)


# ---------------------------------------------------------------------------
# Graph families addressable by size n
# ---------------------------------------------------------------------------

def build_family_graph(family: str, params: dict, n: int, seed: int) -> Graph:
    """Construct a graph of the named family with (nominally) n vertices."""
    if family == "path":
        return graphs.make_path(n)
    if family == "ring":
        return graphs.make_ring(n)
    if family == "ladder":
        return graphs.make_ladder(n)
    if family in ("grid", "torus"):
        d = int(params.get("d", 2))
        side = round(n ** (1.0 / d))
        if side**d != n:
            raise ValueError(f"{family} with d={d} needs n to be a perfect {d}-th power, got {n}")
        maker = graphs.make_grid if family == "grid" else graphs.make_torus
        return maker(d, side)
    if family == "lollipop":
        m = int(params.get("m", 5))
        if n <= m:
            raise ValueError(f"lollipop with clique m={m} needs n > m, got {n}")
        return graphs.make_lollipop(m, n - m)
    if family == "ws":
        p = float(params.get("p", 0.25))
        return graphs.watts_strogatz(n, p, seed)
    raise ValueError(f"unknown graph family {family!r}")


# ---------------------------------------------------------------------------
# Rate experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateExperimentConfig:
    """Full description of one contraction-rate experiment."""

    family: str
    sizes: tuple[int, ...]
    beta: float
    C: float
    sigma: float
    prior_kind: str
    replicates: int
    seed: int
    task: str = "regression"
    r: float | None = None  # None: estimate per size via geometry_fit
    alpha: float | None = None
    family_params: dict = field(default_factory=dict)
    num_c: int = 64
    mcmc_chain_length: int = 20000
    mcmc_burn_in: int = 4000

    def __post_init__(self):
        if self.task not in ("regression", "classification"):
            raise ValueError(f"unknown task {self.task!r}")
        if list(self.sizes) != sorted(self.sizes) or len(self.sizes) < 2:
            raise ValueError("sizes must be an ascending list with >= 2 entries")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if self.beta <= 0 or self.C <= 0 or self.sigma <= 0:
            raise ValueError("beta, C and sigma must all be > 0")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))

    def prior_spec(self, r: float) -> PriorSpec:
        if self.prior_kind == "power":
            return PriorSpec.power(alpha=self.alpha, r=r)
        return PriorSpec.exponential(r=r)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "family_params": dict(self.family_params),
            "sizes": list(self.sizes),
            "beta": self.beta,
            "C": self.C,
            "sigma": self.sigma,
            "prior_kind": self.prior_kind,
            "alpha": self.alpha,
            "r": self.r,
            "replicates": self.replicates,
            "seed": self.seed,
            "task": self.task,
            "num_c": self.num_c,
            "mcmc_chain_length": self.mcmc_chain_length,
            "mcmc_burn_in": self.mcmc_burn_in,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RateExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "sizes" in d:
            d["sizes"] = tuple(d["sizes"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise ValueError(f"invalid rate-experiment config: {exc}") from exc


@dataclass
class RateResult:
    """Per-size errors and the fitted versus theoretical rate exponents."""

    sizes: list[int]
    realized_sizes: list[int]
    r_used: list[float]
    errors: np.ndarray  # (num_sizes, replicates)
    median_errors: np.ndarray
    mean_errors: np.ndarray
    fitted_exponent: float
    theoretical_exponent: float
    log_factor_adjusted: bool
    config: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "sizes": self.sizes,
            "realized_sizes": self.realized_sizes,
            "r_used": self.r_used,
            "errors": self.errors.tolist(),
            "median_errors": self.median_errors.tolist(),
            "mean_errors": self.mean_errors.tolist(),
            "fitted_exponent": self.fitted_exponent,
            "theoretical_exponent": self.theoretical_exponent,
            "log_factor_adjusted": self.log_factor_adjusted,
        }

    def write_json(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "replicate", "error"])
            for i, n in enumerate(self.realized_sizes):
                for rep in range(self.errors.shape[1]):
                    writer.writerow([n, rep, f"{self.errors[i, rep]:.12g}"])


def _worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV_VAR, "")
    if raw.strip():
        return max(1, int(raw))
    return min(4, os.cpu_count() or 1)


def _one_replicate(cfg: RateExperimentConfig, s: Spectrum, spec: PriorSpec,
                   n: int, rep: int) -> float:
    """Simulate one dataset and return the posterior-mean estimation error."""
    rng = np.random.default_rng([cfg.seed, n, rep])
    f0 = make_smooth_truth(s, cfg.beta, cfg.C, spec.r, rng)
    if cfg.task == "regression":
        y = f0 + cfg.sigma * rng.standard_normal(s.n)
        summary = regression_posterior(
            s, spec, RegressionData(y=y, sigma=cfg.sigma), GridConfig(num_c=cfg.num_c)
        )
        return norm_n(summary.mean - f0)
    p0 = expit(f0)
    labels = (rng.random(s.n) < p0).astype(np.int64)
    mcmc = MCMCConfig(
        chain_length=cfg.mcmc_chain_length,
        burn_in=cfg.mcmc_burn_in,
        seed=int(rng.integers(2**63)),
    )
    summary = classification_posterior(s, spec, ClassificationData(y=labels), mcmc)
    return norm_n(summary.mean - p0)


def run_rate_experiment(cfg: RateExperimentConfig) -> RateResult:
    """Run the configured experiment and fit the empirical rate exponent.

    The exponent is the negated slope of log median error against log n
    (against log(n / log^(1+r/2) n) for the exponential prior, which
    carries a logarithmic rate factor). Graphs and spectra are computed
    once per size; replicates run on a thread pool sized by the
    GRAPHSMOOTH_WORKERS environment variable.
    """
    realized, r_used = [], []
    errors = np.empty((len(cfg.sizes), cfg.replicates))
    workers = _worker_count()
    for i, n in enumerate(cfg.sizes):
        g = build_family_graph(cfg.family, cfg.family_params, n, seed=cfg.seed + i)
        s = eig(g)
        if cfg.r is not None:
            r = float(cfg.r)
        else:
            r = max(1.0, geometry_fit(s).r_hat)
        spec = cfg.prior_spec(r)
        realized.append(g.n)
        r_used.append(r)
        if workers > 1 and cfg.replicates > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_one_replicate, cfg, s, spec, g.n, rep)
                           for rep in range(cfg.replicates)]
                errors[i] = [f.result() for f in futures]
        else:
            errors[i] = [_one_replicate(cfg, s, spec, g.n, rep)
                         for rep in range(cfg.replicates)]

    median_errors = np.median(errors, axis=1)
    mean_errors = errors.mean(axis=1)
    r_final = r_used[-1]
    ns = np.asarray(realized, dtype=np.float64)
    log_factor = cfg.prior_kind == "exponential"
    x = np.log(ns / np.log(ns) ** (1.0 + r_final / 2.0)) if log_factor else np.log(ns)
    slope, _ = np.polyfit(x, np.log(median_errors), 1)
    return RateResult(
        sizes=list(cfg.sizes),
        realized_sizes=realized,
        r_used=r_used,
        errors=errors,
        median_errors=median_errors,
        mean_errors=mean_errors,
        fitted_exponent=float(-slope),
        theoretical_exponent=cfg.beta / (2.0 * cfg.beta + r_final),
        log_factor_adjusted=log_factor,
        config=cfg.to_dict(),
    )


# ---------------------------------------------------------------------------
# Geometry figure data
# ---------------------------------------------------------------------------

def emit_geometry_figure_data(g: Graph, out_base: str | Path, drop_low: int = 3,
                              kappa: float = 0.35, plot: bool = True) -> GeometryFit:
    """Write the log-log spectral profile of `g` and its straight-line fit.

    Produces `<out_base>.csv` with (i, log(i/n), log lambda_i) rows,
    `<out_base>.json` with the fit summary, and `<out_base>.png` with the
    rendered figure unless `plot` is false. Returns the fit.
    """
    s = eig(g)
    fit = geometry_fit(s, drop_low=drop_low, kappa=kappa)
    points = geometry_points(s)
    out_base = Path(out_base)
    out_base.parent.mkdir(parents=True, exist_ok=True)
    with open(out_base.with_suffix(".csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "log_i_over_n", "log_lambda"])
        for i, x, yv in points:
            writer.writerow([int(i), f"{x:.12g}", f"{yv:.12g}"])
    with open(out_base.with_suffix(".json"), "w", encoding="utf-8") as fh:
        json.dump(fit.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if plot:
        from .figures import render_geometry_figure

        render_geometry_figure(points, fit, out_base.with_suffix(".png"))
    return fit
