"""Randomly scaled Gaussian priors built from functions of the Laplacian.

Two families are supported, both hierarchical with a standard exponential
hyperprior on the scale c:

* power family: precision matrix ((n/c)^(2/r) (L + n^-2 I))^(alpha + r/2),
  where the n^-2 ridge makes L invertible;
* exponential family: covariance matrix n exp(-(n/c)^(2/r) L), i.e.
  precision eigenvalues n^-1 exp((n/c)^(2/r) lambda_i).

All matrix functions are applied through the eigendecomposition. In the
n-orthonormal eigenbasis a draw from either prior is
sum_i Z_i psi_i / sqrt(n mu_i) with Z_i iid standard normal, so the
spectral coefficient i has variance 1 / (n mu_i).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import Spectrum

POWER = "power"
EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class PriorSpec:
    """One of the two prior families plus its hyperparameters.

    `alpha` is the baseline-regularity exponent of the power family and
    must be None for the exponential family; `r` is the geometry parameter
    of the underlying graph.
    """

    kind: str
    r: float
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in (POWER, EXPONENTIAL):
            raise ValueError(f"unknown prior kind {self.kind!r}")
        if self.r < 1.0:
            raise ValueError(f"geometry parameter r must be >= 1, got {self.r}")
        if self.kind == POWER:
            if self.alpha is None or self.alpha <= 0:
                raise ValueError(f"power prior needs alpha > 0, got {self.alpha}")
        elif self.alpha is not None:
            raise ValueError("exponential prior takes no alpha")

    @classmethod
    def power(cls, alpha: float, r: float) -> "PriorSpec":
        return cls(kind=POWER, r=r, alpha=alpha)

    @classmethod
    def exponential(cls, r: float) -> "PriorSpec":
        return cls(kind=EXPONENTIAL, r=r)

    def describe(self) -> dict:
        d = {"kind": self.kind, "r": self.r}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d


@dataclass(frozen=True)
class ConditionalGaussian:
    """Gaussian prior at a fixed scale c: precision eigenvalues mu_i.

    Coefficient i of a draw has variance 1/(n mu_i) in the n-orthonormal
    eigenbasis of the Spectrum that produced this object.
    """

    c: float
    mu: np.ndarray

    @property
    def coefficient_variances(self) -> np.ndarray:
        n = self.mu.shape[0]
        with np.errstate(divide="ignore"):
            return 1.0 / (n * self.mu)


def precision_eigenvalues(spec: PriorSpec, s: Spectrum, c: float) -> ConditionalGaussian:
    """Precision eigenvalues mu_i of the prior at scale c, on the basis of `s`."""
    if c <= 0:
        raise ValueError(f"scale c must be > 0, got {c}")
    n = s.n
    scale = (n / c) ** (2.0 / spec.r)
    if spec.kind == POWER:
        mu = (scale * (s.eigenvalues + 1.0 / n**2)) ** (spec.alpha + spec.r / 2.0)
    else:
        # exp overflows to inf for tiny c; that is the correct limit
        # (coefficient variance 0) and handled downstream
        with np.errstate(over="ignore"):
            mu = np.exp(scale * s.eigenvalues) / n
    return ConditionalGaussian(c=float(c), mu=mu)


def sample_prior(cg: ConditionalGaussian, s: Spectrum, rng: np.random.Generator) -> np.ndarray:
    """One draw sum_i Z_i psi_i / sqrt(n mu_i) as a vertex function."""
    if cg.mu.shape[0] != s.n:
        raise ValueError(f"precision has {cg.mu.shape[0]} eigenvalues, spectrum has {s.n}")
    z = rng.standard_normal(s.n)
    return s.from_coefficients(z * np.sqrt(cg.coefficient_variances))


def sample_c(rng: np.random.Generator) -> float:
    """Draw the scale hyperparameter c from its standard exponential prior."""
    return float(rng.exponential())


def c_prior_logdensity(c: float) -> float:
    """Log density of the standard exponential hyperprior; -inf off (0, inf)."""
    if c <= 0:
        return float("-inf")
    return -c


def rkhs_norm_sq(cg: ConditionalGaussian, s: Spectrum, h: np.ndarray) -> float:
    """Squared RKHS norm n sum_i mu_i h_i^2 of the prior at scale cg.c."""
    if cg.mu.shape[0] != s.n:
        raise ValueError(f"precision has {cg.mu.shape[0]} eigenvalues, spectrum has {s.n}")
    coeffs = s.to_coefficients(h)
    return float(s.n * np.sum(cg.mu * coeffs**2))
