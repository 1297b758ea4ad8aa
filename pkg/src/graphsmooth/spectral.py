"""Laplacian spectra, the n-normalized eigenbasis, and geometry diagnostics.

Functions on a graph with n vertices are vectors in R^n measured with the
vertex-averaged norm ||f||_n^2 = (1/n) sum f(v)^2. The eigenbasis produced
here is orthonormal with respect to the matching inner product
<f,g>_n = (1/n) sum f(v) g(v), so each eigenvector has Euclidean norm
sqrt(n). Spectral coefficients f_i = <f, psi_i>_n are the coordinates used
by the prior and posterior modules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph


class NumericError(RuntimeError):
    """Numerical linear algebra failure (eigensolver non-convergence etc.)."""


# eigenvalues of a connected Laplacian below this times n are treated as the
# structural zero; anything more negative indicates a broken input matrix
_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Ascending Laplacian eigenvalues with an n-orthonormal eigenbasis.

    `basis[:, i]` is the eigenvector for `eigenvalues[i]`, scaled so that
    <psi_i, psi_i>_n = 1 and sign-fixed so its first non-negligible entry
    is positive.
    """

    n: int
    eigenvalues: np.ndarray
    basis: np.ndarray

    def to_coefficients(self, f: np.ndarray) -> np.ndarray:
        """Coefficients f_i = <f, psi_i>_n of a vertex function."""
        f = np.asarray(f, dtype=np.float64)
        if f.shape != (self.n,):
            raise ValueError(f"function has shape {f.shape}, expected ({self.n},)")
        return self.basis.T @ f / self.n

    def from_coefficients(self, coeffs: np.ndarray) -> np.ndarray:
        """Vertex function sum_i c_i psi_i."""
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (self.n,):
            raise ValueError(f"coefficients have shape {coeffs.shape}, expected ({self.n},)")
        return self.basis @ coeffs


@dataclass(frozen=True)
class GeometryFit:
    """Least-squares fit of log lambda_i against log(i/n).

    Under the power-law spectral profile lambda_i ~ (i/n)^(2/r) the slope
    is 2/r, so r_hat = 2/slope. r_hat < 1 is impossible for the profile to
    hold asymptotically and is flagged, not rejected.
    """

    r_hat: float
    slope: float
    intercept: float
    window: tuple[int, int]
    residual_rms: float

    @property
    def r_hat_below_one(self) -> bool:
        return self.r_hat < 1.0

    def to_dict(self) -> dict:
        return {
            "r_hat": self.r_hat,
            "slope": self.slope,
            "intercept": self.intercept,
            "window": list(self.window),
            "residual_rms": self.residual_rms,
            "r_hat_below_one": self.r_hat_below_one,
        }


@dataclass(frozen=True)
class GeometryWindowReport:
    """Result of checking C1 (i/n)^(2/r) <= lambda_i <= C2 (i/n)^(2/r)."""

    holds: bool
    first_violation: int | None
    side: str | None  # "lower" or "upper" bound violated at first_violation
    window: tuple[int, int]


def norm_n(f: np.ndarray) -> float:
    """Vertex-averaged norm ||f||_n = sqrt((1/n) sum f(v)^2)."""
    f = np.asarray(f, dtype=np.float64)
    return float(np.sqrt(np.mean(f * f)))


def inner_n(f: np.ndarray, g: np.ndarray) -> float:
    """Vertex-averaged inner product <f,g>_n = (1/n) sum f(v) g(v)."""
    return float(np.mean(np.asarray(f, dtype=np.float64) * np.asarray(g, dtype=np.float64)))


def laplacian(g: Graph) -> np.ndarray:
    """Dense graph Laplacian L = D - A."""
    L = np.zeros((g.n, g.n), dtype=np.float64)
    for u, v in g.edges:
        L[u - 1, v - 1] -= 1.0
        L[v - 1, u - 1] -= 1.0
        L[u - 1, u - 1] += 1.0
        L[v - 1, v - 1] += 1.0
    return L


def eig(g: Graph) -> Spectrum:
    """Full symmetric eigendecomposition of the Laplacian of `g`.

    Eigenvalues are ascending with roundoff negatives clipped to zero
    (L is positive semi-definite); eigenvectors are scaled to Euclidean
    norm sqrt(n) and sign-fixed.
    """
    L = laplacian(g)
    try:
        vals, vecs = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"eigendecomposition failed for graph with n={g.n}, "
            f"{g.num_edges} edges: {exc}"
        ) from exc
    if vals[0] < -_ZERO_TOL * g.n:
        raise NumericError(
            f"Laplacian eigensolve returned eigenvalue {vals[0]:.3e} < 0 for n={g.n}"
        )
    vals = np.clip(vals, 0.0, None)
    vals[0] = 0.0  # structural zero of a connected Laplacian
    vecs = vecs * np.sqrt(g.n)
    _fix_signs(vecs)
    return Spectrum(n=g.n, eigenvalues=vals, basis=vecs)


def _fix_signs(vecs: np.ndarray) -> None:
    """Flip each column so its first entry exceeding tolerance is positive."""
    n = vecs.shape[0]
    thresh = 1e-9 * np.sqrt(n)
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nonzero = np.flatnonzero(np.abs(col) > thresh)
        lead = nonzero[0] if nonzero.size else int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            vecs[:, j] = -col


def synthetic_power_law_spectrum(n: int, r: float) -> Spectrum:
    """Spectrum with lambda_i = (i/n)^(2/r) exactly, for diagnostics and tests.

    Carries the trivial n-orthonormal basis sqrt(n) * I; no graph backs it.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if r <= 0:
        raise ValueError(f"need r > 0, got {r}")
    i = np.arange(n, dtype=np.float64)
    return Spectrum(n=n, eigenvalues=(i / n) ** (2.0 / r),
                    basis=np.sqrt(n) * np.eye(n))


def geometry_fit(s: Spectrum, drop_low: int = 3, kappa: float = 0.35) -> GeometryFit:
    """Estimate the geometry parameter r from the low end of the spectrum.

    Ordinary least squares of log lambda_i on log(i/n) over the window
    i in {drop_low+1, ..., floor(kappa*n)}; index 0 is always excluded
    (lambda_0 = 0). Defaults follow the fit-to-the-leftmost-35%,
    discard-first-three procedure used for the reference figures.
    """
    if not (0.0 < kappa <= 1.0):
        raise ValueError(f"kappa must be in (0,1], got {kappa}")
    if drop_low < 0:
        raise ValueError(f"drop_low must be >= 0, got {drop_low}")
    i_lo = drop_low + 1
    i_hi = int(np.floor(kappa * s.n))
    if i_hi - i_lo + 1 < 2:
        raise ValueError(
            f"fit window [{i_lo},{i_hi}] has fewer than 2 points "
            f"(n={s.n}, drop_low={drop_low}, kappa={kappa})"
        )
    idx = np.arange(i_lo, i_hi + 1)
    lam = s.eigenvalues[idx]
    if np.any(lam <= 0):
        bad = idx[np.argmax(lam <= 0)]
        raise ValueError(f"nonpositive eigenvalue lambda_{bad} inside fit window")
    x = np.log(idx / s.n)
    y = np.log(lam)
    slope, intercept = (float(v) for v in np.polyfit(x, y, 1))
    resid = y - (slope * x + intercept)
    return GeometryFit(
        r_hat=2.0 / slope,
        slope=slope,
        intercept=intercept,
        window=(i_lo, i_hi),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
    )


def geometry_points(s: Spectrum) -> np.ndarray:
    """The (i, log(i/n), log lambda_i) triples behind the geometry plot, i >= 1."""
    idx = np.arange(1, s.n)
    lam = s.eigenvalues[idx]
    with np.errstate(divide="ignore"):
        loglam = np.log(lam)
    return np.column_stack([idx.astype(np.float64), np.log(idx / s.n), loglam])


def check_geometry_window(s: Spectrum, r: float, c1: float, c2: float,
                          i0: int = 1, kappa: float = 0.35) -> GeometryWindowReport:
    """Check the sandwich c1 (i/n)^(2/r) <= lambda_i <= c2 (i/n)^(2/r).

    Verifies every index in {i0, ..., floor(kappa*n)} and reports the first
    violating index and which side failed.
    """
    i_hi = int(np.floor(kappa * s.n))
    if not (1 <= i0 <= i_hi):
        raise ValueError(f"need 1 <= i0 <= floor(kappa*n)={i_hi}, got i0={i0}")
    for i in range(i0, i_hi + 1):
        ref = (i / s.n) ** (2.0 / r)
        lam = s.eigenvalues[i]
        if lam < c1 * ref:
            return GeometryWindowReport(False, i, "lower", (i0, i_hi))
        if lam > c2 * ref:
            return GeometryWindowReport(False, i, "upper", (i0, i_hi))
    return GeometryWindowReport(True, None, None, (i0, i_hi))


def sobolev_norm_sq(s: Spectrum, f: np.ndarray, beta: float, r: float) -> float:
    """Smoothness functional <f, (I + (n^(2/r) L)^beta) f>_n, computed spectrally.

    Equals sum_i (1 + n^(2 beta/r) lambda_i^beta) f_i^2 in spectral
    coefficients; membership of f in the smoothness ball of radius C means
    this value is at most C^2.
    """
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if r <= 0:
        raise ValueError(f"r must be > 0, got {r}")
    coeffs = s.to_coefficients(f)
    weights = 1.0 + float(s.n) ** (2.0 * beta / r) * s.eigenvalues**beta
    return float(np.sum(weights * coeffs**2))
