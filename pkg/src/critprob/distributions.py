"""Finite-support distribution models for per-pixel uncertainty.

Three bounded families share one representation: uniform over a range,
Epanechnikov (quadratic bump) over a range, and histograms with
equal-width bins.  Each exposes its density and distribution function
as piecewise polynomials, which is what the closed-form critical-point
integrals consume.  Degenerate fits (all samples equal) are widened to
a tiny positive width so that ties between point masses resolve
continuously instead of producing zero-width supports.

``GaussianSampler`` is an unbounded model used only for Monte Carlo
comparisons; it has no piecewise form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .piecewise import PiecewisePolynomial

EPSILON_FLOOR = 1e-12
EPSILON_RANGE_FACTOR = 1e-9

_KINDS = ("uniform", "epanechnikov", "histogram")


def default_epsilon(values) -> float:
    """Widening width for degenerate supports, scaled to the data range."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return EPSILON_FLOOR
    spread = float(arr.max() - arr.min())
    return max(EPSILON_FLOOR, EPSILON_RANGE_FACTOR * spread)


@dataclass(frozen=True)
class Support:
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __post_init__(self) -> None:
        if not math.isfinite(self.lo) or not math.isfinite(self.hi):
            raise ValueError("support bounds must be finite")
        if not self.hi > self.lo:
            raise ValueError(f"support must have positive width, got [{self.lo}, {self.hi}]")


# -- vectorized inverse-CDF kernels -------------------------------------
#
# These operate on arrays so the grid Monte Carlo path and the per-case
# path run the identical floating-point operations.

def uniform_icdf(lo, hi, u):
    return (1.0 - u) * lo + u * hi


def epanechnikov_icdf(mean, halfwidth, u):
    # The quadratic-bump CDF is a monotone cubic; its root has the exact
    # trigonometric form 2 sin(arcsin(2u - 1) / 3).
    root = 2.0 * np.sin(np.arcsin(2.0 * u - 1.0) / 3.0)
    x = mean + halfwidth * root
    x = np.where(u == 0.0, mean - halfwidth, x)
    return np.where(u == 1.0, mean + halfwidth, x)


def histogram_icdf(lo, binw, weights, cum, u):
    """Inverse CDF for equal-width histograms.

    ``weights`` is (P, h), ``cum`` is the (P, h + 1) inclusive prefix sum
    starting at 0, ``lo`` and ``binw`` are (P, 1), ``u`` is (P, n).
    """
    h = weights.shape[1]
    j = np.zeros(u.shape, dtype=np.intp)
    for k in range(1, h):
        j += u >= cum[:, k : k + 1]
    cw = np.take_along_axis(cum, j, axis=1)
    wj = np.take_along_axis(weights, j, axis=1)
    safe = np.where(wj > 0.0, wj, 1.0)
    frac = np.where(wj > 0.0, (u - cw) / safe, 0.0)
    e0 = lo + binw * j
    x = (1.0 - frac) * e0 + frac * (e0 + binw)
    return np.where(u == 1.0, lo + binw * h, x)


def histogram_cdf_values(lo, binw, weights, cum, x):
    """CDF of an equal-width histogram at ``x``; same shapes as above."""
    h = weights.shape[1]
    j = np.floor((x - lo) / binw).astype(np.intp)
    np.clip(j, 0, h - 1, out=j)
    cw = np.take_along_axis(cum, j, axis=1)
    wj = np.take_along_axis(weights, j, axis=1)
    frac = (x - (lo + binw * j)) / binw
    return np.clip(cw + wj * frac, 0.0, 1.0)


# -- distribution objects ------------------------------------------------

class FiniteDistribution:
    """A bounded per-pixel uncertainty model.

    The density and distribution function are built lazily: sampling and
    histogram arithmetic never touch them, only the closed-form
    integrals do.
    """

    __slots__ = ("kind", "support", "bin_weights", "_pdf", "_cdf", "_survival")

    u01_planes = 1  # independent uniform planes consumed per draw

    def __init__(self, kind: str, support: Support, bin_weights=None) -> None:
        if kind not in _KINDS:
            raise ValueError(f"unknown distribution kind {kind!r}")
        if kind == "histogram":
            w = np.asarray(bin_weights, dtype=float)
            if w.ndim != 1 or w.size == 0:
                raise ValueError("histogram needs a 1-D, non-empty weight array")
            if np.any(w < 0.0) or not np.all(np.isfinite(w)):
                raise ValueError("histogram weights must be finite and non-negative")
            total = w.sum()
            if total <= 0.0:
                raise ValueError("histogram weights must not all be zero")
            bin_weights = w / total
        elif bin_weights is not None:
            raise ValueError(f"{kind} takes no bin weights")
        self.kind = kind
        self.support = support
        self.bin_weights = bin_weights
        self._pdf = None
        self._cdf = None
        self._survival = None

    def __repr__(self) -> str:
        extra = f", bins={self.bin_weights.size}" if self.kind == "histogram" else ""
        return f"FiniteDistribution({self.kind}, [{self.support.lo}, {self.support.hi}]{extra})"

    # -- piecewise forms -------------------------------------------------

    @property
    def pdf_poly(self) -> PiecewisePolynomial:
        if self._pdf is None:
            lo, hi = self.support.lo, self.support.hi
            if self.kind == "uniform":
                self._pdf = PiecewisePolynomial([lo, hi], [[1.0 / (hi - lo)]])
            elif self.kind == "epanechnikov":
                w = 0.5 * (hi - lo)
                self._pdf = PiecewisePolynomial(
                    [lo, hi], [[0.75 / w, 0.0, -0.75 / w**3]]
                )
            else:
                h = self.bin_weights.size
                edges = lo + (hi - lo) * np.arange(h + 1) / h
                binw = (hi - lo) / h
                self._pdf = PiecewisePolynomial(
                    edges, [[wk / binw] for wk in self.bin_weights]
                )
        return self._pdf

    @property
    def cdf_poly(self) -> PiecewisePolynomial:
        if self._cdf is None:
            self._cdf = self.pdf_poly.antiderivative()
        return self._cdf

    @property
    def survival_poly(self) -> PiecewisePolynomial:
        if self._survival is None:
            cdf = self.cdf_poly
            pieces = []
            for coeffs in cdf.pieces:
                neg = -coeffs
                neg[0] += 1.0
                pieces.append(neg)
            self._survival = PiecewisePolynomial(
                cdf.breakpoints,
                pieces,
                below_value=1.0,
                above_value=1.0 - cdf.above_value,
            )
        return self._survival

    # -- pointwise evaluation ---------------------------------------------

    def pdf(self, x):
        return self.pdf_poly.eval(x)

    def cdf(self, x):
        return self.cdf_poly.eval(x)

    def survival(self, x):
        return 1.0 - self.cdf(x)

    # -- transforms --------------------------------------------------------

    def negate(self) -> "FiniteDistribution":
        """Distribution of -X (mirror through zero)."""
        lo, hi = self.support.lo, self.support.hi
        weights = None if self.bin_weights is None else self.bin_weights[::-1]
        return FiniteDistribution(self.kind, Support(-hi, -lo), weights)

    def affine(self, alpha: float, beta: float) -> "FiniteDistribution":
        """Distribution of alpha * X + beta for alpha > 0."""
        if not alpha > 0.0:
            raise ValueError("affine scale must be positive")
        lo, hi = self.support.lo, self.support.hi
        return FiniteDistribution(
            self.kind,
            Support(alpha * lo + beta, alpha * hi + beta),
            self.bin_weights,
        )

    # -- sampling -----------------------------------------------------------

    def sample_u01(self, u):
        """Inverse-CDF transform of uniform [0, 1] draws ``u``."""
        arr = np.asarray(u, dtype=float)
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("u must lie in [0, 1]")
        scalar = arr.ndim == 0
        lo, hi = self.support.lo, self.support.hi
        if self.kind == "uniform":
            out = uniform_icdf(lo, hi, arr)
        elif self.kind == "epanechnikov":
            out = epanechnikov_icdf(0.5 * (lo + hi), 0.5 * (hi - lo), arr)
        else:
            w = self.bin_weights
            cum = np.concatenate(([0.0], np.cumsum(w)))
            cum[-1] = 1.0
            out = histogram_icdf(
                np.array([[lo]]),
                np.array([[(hi - lo) / w.size]]),
                w[None, :],
                cum[None, :],
                arr.reshape(1, -1),
            ).reshape(arr.shape)
        return float(out) if scalar else out


@dataclass(frozen=True)
class GaussianSampler:
    """Unbounded normal model, Monte Carlo only (no closed form)."""

    mean: float
    stddev: float

    u01_planes = 2

    def __post_init__(self) -> None:
        if self.stddev < 0.0 or not math.isfinite(self.stddev):
            raise ValueError("stddev must be finite and non-negative")

    def negate(self) -> "GaussianSampler":
        return GaussianSampler(-self.mean, self.stddev)

    def affine(self, alpha: float, beta: float) -> "GaussianSampler":
        if not alpha > 0.0:
            raise ValueError("affine scale must be positive")
        return GaussianSampler(alpha * self.mean + beta, alpha * self.stddev)

    def sample_u01(self, u):
        """Box-Muller transform of a (2, n) block of uniform draws."""
        u = np.asarray(u, dtype=float)
        if u.ndim < 1 or u.shape[-2] != 2:
            raise ValueError("Gaussian draws need two uniform planes")
        u1 = u[..., 0, :]
        u2 = u[..., 1, :]
        z = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
        return self.mean + self.stddev * z


# -- direct constructors --------------------------------------------------

def uniform(lo: float, hi: float) -> FiniteDistribution:
    return FiniteDistribution("uniform", Support(float(lo), float(hi)))

def epanechnikov(mean: float, halfwidth: float) -> FiniteDistribution:
    if not halfwidth > 0.0:
        raise ValueError("halfwidth must be positive")
    return FiniteDistribution(
        "epanechnikov", Support(float(mean - halfwidth), float(mean + halfwidth))
    )

def histogram(lo: float, hi: float, weights) -> FiniteDistribution:
    return FiniteDistribution("histogram", Support(float(lo), float(hi)), weights)


# -- fitted constructors ---------------------------------------------------

def _as_samples(samples) -> np.ndarray:
    arr = np.asarray(samples, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValueError("need at least one sample")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite")
    return arr


def uniform_from_samples(samples, eps: float | None = None) -> FiniteDistribution:
    """Range-fitted uniform; a degenerate range is widened by ``eps``."""
    arr = _as_samples(samples)
    lo, hi = float(arr.min()), float(arr.max())
    if hi <= lo:
        eps = default_epsilon(arr) if eps is None else eps
        lo, hi = lo - 0.5 * eps, lo + 0.5 * eps
    return uniform(lo, hi)


def epanechnikov_from_samples(
    samples, k: float = math.sqrt(5.0), eps: float | None = None
) -> FiniteDistribution:
    """Moment-fitted quadratic bump: mean +/- k * sample stddev.

    The default k = sqrt(5) makes the fitted variance equal the sample
    variance.  A zero-spread sample set is widened by ``eps``.
    """
    arr = _as_samples(samples)
    if arr.size < 2:
        raise ValueError("need at least two samples to estimate spread")
    if not k > 0.0:
        raise ValueError("k must be positive")
    mean = float(arr.mean())
    halfwidth = k * float(arr.std(ddof=1))
    if halfwidth <= 0.0:
        eps = default_epsilon(arr) if eps is None else eps
        halfwidth = 0.5 * eps
    return epanechnikov(mean, halfwidth)


def histogram_from_samples(samples, bins: int, eps: float | None = None) -> FiniteDistribution:
    """Equal-width histogram over the sample range.

    A sample equal to the top edge lands in the last bin.  All-equal
    samples produce a single eps-wide bin with weight 1.
    """
    if not bins >= 1:
        raise ValueError("bins must be at least 1")
    arr = _as_samples(samples)
    lo, hi = float(arr.min()), float(arr.max())
    if hi <= lo:
        eps = default_epsilon(arr) if eps is None else eps
        return histogram(lo - 0.5 * eps, lo + 0.5 * eps, [1.0])
    idx = np.floor((arr - lo) * (bins / (hi - lo))).astype(np.intp)
    np.clip(idx, 0, bins - 1, out=idx)
    counts = np.bincount(idx, minlength=bins).astype(float)
    return histogram(lo, hi, counts / arr.size)
