"""Posterior computation for regression and classification on graphs.

Regression uses exact conjugacy: in the n-orthonormal eigenbasis the model
decouples into independent scalar Gaussian problems (observation
coefficient u_i = <y, psi_i>_n has noise variance sigma^2/n, prior
coefficient variance tau_i^2 = 1/(n mu_i)), so the conditional posterior
given the scale c is available in closed form together with its log
marginal likelihood. The hierarchical posterior mixes these conditionals
over a quadrature grid in c (and sigma when unknown) with weights
proportional to exp(log marginal) * prior density * cell width.

Classification has no conjugate form and is sampled by a dimension-robust
MCMC on whitened coordinates: f = T_c z with z a priori standard normal,
a preconditioned Crank-Nicolson move on z (prior-preserving, accepted on
the Bernoulli likelihood ratio alone) and a random-walk move on log c.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .priors import PriorSpec, c_prior_logdensity, precision_eigenvalues
from .spectral import NumericError, Spectrum

_LOG_2PI = float(np.log(2.0 * np.pi))


# ---------------------------------------------------------------------------
# Data containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegressionData:
    """Real observation per vertex; sigma either known or an interval [a, b]."""

    y: np.ndarray
    sigma: float | tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.float64))
        if self.y.ndim != 1:
            raise ValueError(f"y must be 1-D, got shape {self.y.shape}")
        if not np.all(np.isfinite(self.y)):
            raise ValueError("observations must be finite")
        if isinstance(self.sigma, tuple):
            a, b = self.sigma
            if not (0 < a < b):
                raise ValueError(f"sigma interval needs 0 < a < b, got [{a}, {b}]")
        elif self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")

    @property
    def sigma_known(self) -> bool:
        return not isinstance(self.sigma, tuple)


@dataclass(frozen=True)
class ClassificationData:
    """Binary label per vertex."""

    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y)
        if y.ndim != 1:
            raise ValueError(f"labels must be 1-D, got shape {y.shape}")
        if not np.all(np.isin(y, (0, 1))):
            bad = y[~np.isin(y, (0, 1))][0]
            raise ValueError(f"labels must be 0 or 1, found {bad!r}")
        object.__setattr__(self, "y", y.astype(np.int64))


@dataclass(frozen=True)
class GridConfig:
    """Quadrature grid over the hyperparameters of the regression posterior.

    The c grid is log-spaced across the given quantile range of the Exp(1)
    hyperprior unless explicit `c_values` are supplied (a single explicit
    value degenerates to the fixed-c posterior). The sigma grid, used only
    when sigma is unknown, holds `num_sigma` cell midpoints on [a, b].
    """

    num_c: int = 64
    c_quantile_lo: float = 0.001
    c_quantile_hi: float = 0.999
    c_values: tuple[float, ...] | None = None
    num_sigma: int = 32

    def __post_init__(self):
        if self.c_values is not None:
            vals = tuple(float(c) for c in self.c_values)
            if len(vals) < 1 or any(c <= 0 for c in vals):
                raise ValueError("explicit c_values must be a nonempty tuple of positive reals")
            object.__setattr__(self, "c_values", vals)
        else:
            if self.num_c < 2:
                raise ValueError(f"generated c grid needs >= 2 nodes, got {self.num_c}")
            if not (0 < self.c_quantile_lo < self.c_quantile_hi < 1):
                raise ValueError("c quantile range must satisfy 0 < lo < hi < 1")
        if self.num_sigma < 1:
            raise ValueError(f"sigma grid needs >= 1 node, got {self.num_sigma}")

    def c_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Grid values and midpoint-rule cell widths for the c quadrature."""
        if self.c_values is not None:
            c = np.asarray(self.c_values, dtype=np.float64)
        else:
            lo = -np.log1p(-self.c_quantile_lo)
            hi = -np.log1p(-self.c_quantile_hi)
            c = np.geomspace(lo, hi, self.num_c)
        return c, _midpoint_widths(c)


def _midpoint_widths(x: np.ndarray) -> np.ndarray:
    if x.size == 1:
        return np.ones(1)
    w = np.empty_like(x)
    w[1:-1] = (x[2:] - x[:-2]) / 2.0
    w[0] = (x[1] - x[0]) / 2.0
    w[-1] = (x[-1] - x[-2]) / 2.0
    return w


@dataclass(frozen=True)
class GridNode:
    c: float
    sigma: float
    log_marginal: float
    weight: float


@dataclass
class PosteriorSummary:
    """Posterior mean, pointwise variances and the hyperparameter grid.

    For regression summaries `grid` holds one node per (c, sigma) pair with
    its log marginal likelihood and normalized mixture weight, and
    `coef_mean`/`coef_var` the per-node coefficient posteriors. For MCMC
    (classification) summaries the grid is empty, `mean`/`pointwise_var`
    describe p = link(f), and `latent_mean` the posterior mean of f.
    """

    mean: np.ndarray
    pointwise_var: np.ndarray
    grid: list[GridNode]
    coef_mean: np.ndarray | None = None
    coef_var: np.ndarray | None = None
    latent_mean: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def write_csv(self, path: str | Path) -> None:
        """Per-vertex posterior mean and variance as CSV."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["vertex", "mean", "variance"])
            for v in range(self.mean.shape[0]):
                writer.writerow(
                    [v + 1, f"{self.mean[v]:.12g}", f"{self.pointwise_var[v]:.12g}"]
                )

    def write_json(self, path: str | Path) -> None:
        """Grid, weights and diagnostics as JSON (array diagnostics are dropped)."""
        payload = {
            "n": int(self.mean.shape[0]),
            "grid": [
                {
                    "c": node.c,
                    "sigma": node.sigma,
                    "log_marginal": node.log_marginal,
                    "weight": node.weight,
                }
                for node in self.grid
            ],
            "diagnostics": _jsonable(self.diagnostics),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items() if not isinstance(v, np.ndarray)}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value


# ---------------------------------------------------------------------------
# Regression: exact spectral conjugacy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionalPosterior:
    """Independent per-coefficient Gaussian posterior at fixed (c, sigma)."""

    c: float
    sigma: float
    coef_mean: np.ndarray
    coef_var: np.ndarray
    log_marginal: float

    def mean_vertex(self, s: Spectrum) -> np.ndarray:
        return s.from_coefficients(self.coef_mean)

    def var_vertex(self, s: Spectrum) -> np.ndarray:
        return (s.basis**2) @ self.coef_var


def _conjugate_update(u: np.ndarray, tau2: np.ndarray, noise: float):
    """Scalar Gaussian conjugacy per coefficient; returns (mean, var, logml)."""
    denom = tau2 + noise
    shrink = tau2 / denom
    logml = float(np.sum(-0.5 * (_LOG_2PI + np.log(denom)) - u**2 / (2.0 * denom)))
    return u * shrink, noise * shrink, logml


def regression_posterior_given_c(s: Spectrum, spec: PriorSpec, c: float,
                                 sigma: float, y: np.ndarray) -> ConditionalPosterior:
    """Conjugate posterior of the coefficients for fixed scale c and noise sigma.

    Posterior coefficient i is Gaussian with mean u_i tau_i^2/(tau_i^2 +
    sigma^2/n) and variance tau_i^2 (sigma^2/n)/(tau_i^2 + sigma^2/n); the
    log marginal likelihood is sum_i log N(u_i; 0, tau_i^2 + sigma^2/n).
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    cg = precision_eigenvalues(spec, s, c)
    u = s.to_coefficients(y)
    coef_mean, coef_var, logml = _conjugate_update(u, cg.coefficient_variances,
                                                   sigma**2 / s.n)
    return ConditionalPosterior(
        c=float(c),
        sigma=float(sigma),
        coef_mean=coef_mean,
        coef_var=coef_var,
        log_marginal=logml,
    )


def regression_posterior(s: Spectrum, spec: PriorSpec, data: RegressionData,
                         grid: GridConfig | None = None) -> PosteriorSummary:
    """Hierarchical posterior mixing conditional posteriors over (c, sigma).

    Mixture weights are exp(log marginal) * prior density * cell width,
    normalized in log space; the mean is the weight-averaged conditional
    mean and pointwise variances follow from the law of total variance.
    """
    grid = grid or GridConfig()
    if data.y.shape != (s.n,):
        raise ValueError(f"y has shape {data.y.shape}, expected ({s.n},)")

    c_vals, c_widths = grid.c_nodes()
    if data.sigma_known:
        sig_vals = np.array([float(data.sigma)])
        sig_logprior = np.zeros(1)  # point mass
        sig_widths = np.ones(1)
    else:
        a, b = data.sigma
        step = (b - a) / grid.num_sigma
        sig_vals = a + (np.arange(grid.num_sigma) + 0.5) * step
        sig_logprior = np.full(grid.num_sigma, -np.log(b - a))
        sig_widths = np.full(grid.num_sigma, step)

    u = s.to_coefficients(data.y)
    nodes: list[tuple[float, float]] = []
    log_weight = []
    coef_mean = []
    coef_var = []
    log_marginals = []
    for ci, c in enumerate(c_vals):
        tau2 = precision_eigenvalues(spec, s, float(c)).coefficient_variances
        lw_c = c_prior_logdensity(float(c)) + np.log(c_widths[ci])
        for si, sigma in enumerate(sig_vals):
            m, v, logml = _conjugate_update(u, tau2, float(sigma) ** 2 / s.n)
            nodes.append((float(c), float(sigma)))
            log_marginals.append(logml)
            log_weight.append(logml + lw_c + sig_logprior[si] + np.log(sig_widths[si]))
            coef_mean.append(m)
            coef_var.append(v)

    log_weight = np.asarray(log_weight)
    coef_mean = np.asarray(coef_mean)
    coef_var = np.asarray(coef_var)
    diagnostics: dict = {"num_grid_nodes": len(nodes)}

    finite = np.isfinite(log_weight)
    if not np.any(finite):
        raise NumericError("all grid nodes have non-finite log weight")
    shifted = np.exp(log_weight - log_weight[finite].max(), where=finite,
                     out=np.zeros_like(log_weight))
    total = shifted.sum()
    if total <= 0:
        # max-subtraction makes this unreachable in practice; keep the
        # contract of falling back to the best node with a diagnostic
        diagnostics["weight_underflow_fallback"] = True
        weights = np.zeros_like(shifted)
        weights[int(np.argmax(log_weight))] = 1.0
    else:
        weights = shifted / total

    mixed_mean_coeff = weights @ coef_mean
    mean = s.from_coefficients(mixed_mean_coeff)
    expected_var = (s.basis**2) @ (weights @ coef_var)
    node_means = coef_mean @ s.basis.T
    second_moment = weights @ (node_means**2)
    pointwise_var = np.clip(expected_var + second_moment - mean**2, 0.0, None)

    grid_nodes = [
        GridNode(c=c, sigma=sig, log_marginal=lm, weight=float(w))
        for (c, sig), lm, w in zip(nodes, log_marginals, weights)
    ]
    return PosteriorSummary(
        mean=mean,
        pointwise_var=pointwise_var,
        grid=grid_nodes,
        coef_mean=coef_mean,
        coef_var=coef_var,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Link functions
# ---------------------------------------------------------------------------

def link_logistic(x):
    """Logistic link 1/(1 + exp(-x)), mapping R onto (0, 1)."""
    return expit(x)


def link_inverse(p):
    """Inverse link log(p/(1-p)); p must lie strictly inside (0, 1)."""
    p = np.asarray(p, dtype=np.float64)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("link_inverse needs p strictly inside (0, 1)")
    out = np.log(p / (1.0 - p))
    return float(out) if out.ndim == 0 else out


def _bernoulli_loglik(f: np.ndarray, y: np.ndarray) -> float:
    # log Psi(f) = -log(1+e^-f), log(1-Psi(f)) = -log(1+e^f)
    return float(-np.sum(np.logaddexp(0.0, np.where(y == 1, -f, f))))


# ---------------------------------------------------------------------------
# Classification: whitened MCMC
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MCMCConfig:
    """Chain settings for the whitened classification sampler.

    `z_step` is the initial preconditioned Crank-Nicolson mixing parameter;
    during burn-in it adapts toward `target_accept` and is frozen
    afterwards. `c_step` is the log-c random-walk standard deviation; zero
    disables c moves (fixing the scale at `c_init`). `prior_only` switches
    the likelihood off, leaving the prior as the invariant law.
    """

    chain_length: int = 20000
    burn_in: int = 4000
    z_step: float = 0.5
    c_step: float = 0.25
    target_accept: float = 0.3
    seed: int = 0
    c_init: float = 1.0
    prior_only: bool = False
    store_latent_trace: bool = False

    def __post_init__(self):
        if self.chain_length < 1 or self.burn_in < 0:
            raise ValueError("need chain_length >= 1 and burn_in >= 0")
        if self.burn_in >= self.chain_length:
            raise ValueError("burn_in must be smaller than chain_length")
        if not (0 < self.z_step <= 1):
            raise ValueError(f"z_step must be in (0, 1], got {self.z_step}")
        if self.c_step < 0:
            raise ValueError(f"c_step must be >= 0, got {self.c_step}")
        if self.c_init <= 0:
            raise ValueError(f"c_init must be > 0, got {self.c_init}")


def effective_sample_size(trace: np.ndarray) -> float:
    """ESS from the initial positive sequence of autocovariances."""
    x = np.asarray(trace, dtype=np.float64)
    m = x.size
    if m < 4:
        return float(m)
    x = x - x.mean()
    var = float(np.dot(x, x) / m)
    if var == 0:
        return float(m)
    nfft = int(2 ** np.ceil(np.log2(2 * m)))
    acov = np.fft.irfft(np.abs(np.fft.rfft(x, nfft)) ** 2, nfft)[:m] / m
    rho = acov / acov[0]
    # sum consecutive pairs while they stay positive (Geyer initial sequence)
    tau = 1.0
    for k in range(1, m - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0:
            break
        tau += 2.0 * pair
    return float(min(m, m / tau))


def classification_posterior(s: Spectrum, spec: PriorSpec, data: ClassificationData,
                             cfg: MCMCConfig | None = None) -> PosteriorSummary:
    """Posterior over p = link(f) for Bernoulli labels, sampled by MCMC.

    The state is (z, c) with f = T_c z, where T_c rescales whitened
    coordinates by the prior coefficient standard deviations at scale c.
    z moves are preconditioned Crank-Nicolson (accepted on the likelihood
    ratio), c moves are random walks on log c with an exponential prior
    and Jacobian correction, holding z fixed.
    """
    cfg = cfg or MCMCConfig()
    y = data.y
    if y.shape != (s.n,):
        raise ValueError(f"labels have shape {y.shape}, expected ({s.n},)")

    rng = np.random.default_rng(cfg.seed)

    def coeff_sd(c: float) -> np.ndarray:
        return np.sqrt(precision_eigenvalues(spec, s, c).coefficient_variances)

    def loglik(f: np.ndarray) -> float:
        if cfg.prior_only:
            return 0.0
        return _bernoulli_loglik(f, y)

    z = rng.standard_normal(s.n)
    c = cfg.c_init
    sd = coeff_sd(c)
    f = s.from_coefficients(z * sd)
    ll = loglik(f)
    if not np.isfinite(ll):
        raise NumericError(f"non-finite log-likelihood at initialization: {ll}")

    step = cfg.z_step
    kept = cfg.chain_length - cfg.burn_in
    p_sum = np.zeros(s.n)
    p_sumsq = np.zeros(s.n)
    f_sum = np.zeros(s.n)
    acc_z = acc_c = 0
    n_z = n_c = 0
    trace_probe = np.empty(kept)
    trace_c = np.empty(kept)
    trace_ll = np.empty(kept)
    latent_trace = np.empty((kept, s.n)) if cfg.store_latent_trace else None

    for it in range(cfg.chain_length):
        in_burn = it < cfg.burn_in

        # preconditioned Crank-Nicolson move on the whitened coordinates
        xi = rng.standard_normal(s.n)
        z_prop = np.sqrt(1.0 - step**2) * z + step * xi
        f_prop = s.from_coefficients(z_prop * sd)
        ll_prop = loglik(f_prop)
        if np.isnan(ll_prop):
            raise NumericError(f"non-finite log-likelihood at iteration {it}")
        accept = np.log(rng.random()) < ll_prop - ll
        if accept:
            z, f, ll = z_prop, f_prop, ll_prop
        if in_burn:
            # Robbins-Monro drift of the pCN step toward the target rate
            step *= np.exp(0.05 * ((1.0 if accept else 0.0) - cfg.target_accept))
            step = float(np.clip(step, 1e-3, 0.999))
        else:
            acc_z += int(accept)
            n_z += 1

        # random-walk move on log c, z held fixed
        if cfg.c_step > 0:
            c_prop = float(np.exp(np.log(c) + cfg.c_step * rng.standard_normal()))
            sd_prop = coeff_sd(c_prop)
            f_prop = s.from_coefficients(z * sd_prop)
            ll_prop = loglik(f_prop)
            if np.isnan(ll_prop):
                raise NumericError(f"non-finite log-likelihood at iteration {it}")
            log_ratio = (ll_prop - ll
                         + c_prior_logdensity(c_prop) - c_prior_logdensity(c)
                         + np.log(c_prop) - np.log(c))
            accept_c = np.log(rng.random()) < log_ratio
            if accept_c:
                c, sd, f, ll = c_prop, sd_prop, f_prop, ll_prop
            if not in_burn:
                acc_c += int(accept_c)
                n_c += 1

        if not in_burn:
            k = it - cfg.burn_in
            p = expit(f)
            p_sum += p
            p_sumsq += p * p
            f_sum += f
            trace_probe[k] = f[0]
            trace_c[k] = c
            trace_ll[k] = ll
            if latent_trace is not None:
                latent_trace[k] = f

    p_mean = p_sum / kept
    p_var = np.clip(p_sumsq / kept - p_mean**2, 0.0, None)
    rate_z = acc_z / max(n_z, 1)
    rate_c = acc_c / n_c if n_c else None

    warnings = []
    for name, rate in (("z", rate_z), ("c", rate_c)):
        if rate is not None and not (0.05 <= rate <= 0.9):
            warnings.append(f"{name}-move acceptance rate {rate:.3f} outside [0.05, 0.9]")

    diagnostics = {
        "acceptance_z": rate_z,
        "acceptance_c": rate_c,
        "pcn_step_final": step,
        "ess_probe_vertex": effective_sample_size(trace_probe),
        "ess_c": effective_sample_size(trace_c) if n_c else None,
        "ess_loglik": effective_sample_size(trace_ll),
        "c_posterior_mean": float(trace_c.mean()),
        "kept_samples": kept,
        "warnings": warnings,
    }
    summary = PosteriorSummary(
        mean=p_mean,
        pointwise_var=p_var,
        grid=[],
        latent_mean=f_sum / kept,
        diagnostics=diagnostics,
    )
    if latent_trace is not None:
        summary.diagnostics["latent_trace"] = latent_trace
    return summary
