"""Critical-point probabilities for uncertain pixel neighborhoods.

A pixel is compared against its axis neighbors (east, north, west,
south, in that order; a 1-D variant uses just the first two).  With
independent per-pixel distributions the probability that the center is
a local minimum is

    integral of pdf_c(x) * prod_i survival_i(x) dx

over the overlap of the supports, which is a piecewise-polynomial
integrand and therefore integrates exactly.  Local maxima reduce to
minima of the negated case.  A saddle needs the center below both
east/west neighbors and above both north/south neighbors, or the
reverse; each of those is the same kind of product integral with a mix
of survival and distribution factors.

Grid classification evaluates the same integrals for every interior
pixel at once on flat parameter arrays; per-pixel work never depends on
how pixels are chunked, so results are identical for any worker count.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rngstream
from .distributions import (
    FiniteDistribution,
    epanechnikov_icdf,
    histogram_cdf_values,
    histogram_icdf,
    uniform_icdf,
)
from .fields import CHANNELS, ProbabilityField, UncertainField
from .piecewise import gauss_legendre_nodes, refine_and_multiply

PATTERNS = ("min", "max", "saddle")
ESTIMATOR_METHODS = ("closed_form", "monte_carlo", "semianalytical", "combinatorial")
COMBINATORIAL_MAX_BINS = 8

# position indices within a stencil: center, east, north, west, south
_POS_C, _POS_E, _POS_N, _POS_W, _POS_S = range(5)


@dataclass(frozen=True)
class NeighborhoodCase:
    """A center distribution plus its 2 or 4 axis neighbors."""

    center: object
    neighbors: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "neighbors", tuple(self.neighbors))
        if len(self.neighbors) not in (2, 4):
            raise ValueError("a neighborhood has exactly 2 or 4 neighbors")

    def negate(self) -> "NeighborhoodCase":
        return NeighborhoodCase(
            self.center.negate(), tuple(d.negate() for d in self.neighbors)
        )

    def affine(self, alpha: float, beta: float) -> "NeighborhoodCase":
        return NeighborhoodCase(
            self.center.affine(alpha, beta),
            tuple(d.affine(alpha, beta) for d in self.neighbors),
        )


@dataclass(frozen=True)
class ProbabilityTriple:
    p_min: float
    p_max: float
    p_saddle: float

    def __iter__(self):
        return iter((self.p_min, self.p_max, self.p_saddle))

    @property
    def total(self) -> float:
        return self.p_min + self.p_max + self.p_saddle


@dataclass(frozen=True)
class EstimatorSpec:
    """How to estimate per-pixel probabilities.

    ``n_samples`` applies to monte_carlo, ``c`` to semianalytical.
    ``seed`` keys the deterministic sample streams.
    """

    method: str = "closed_form"
    n_samples: int = 2000
    c: int = 10000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.method not in ESTIMATOR_METHODS:
            raise ValueError(f"unknown estimator method {self.method!r}")
        if self.n_samples < 1 or self.c < 1:
            raise ValueError("sample counts must be positive")


def _require_bounded(case: NeighborhoodCase) -> None:
    for d in (case.center, *case.neighbors):
        if not isinstance(d, FiniteDistribution):
            raise TypeError(
                "closed-form evaluation needs bounded distributions; "
                "Gaussian models support Monte Carlo only"
            )


def _require_histograms(case: NeighborhoodCase) -> None:
    for d in (case.center, *case.neighbors):
        if not isinstance(d, FiniteDistribution) or d.kind != "histogram":
            raise ValueError("this estimator is defined for histogram inputs only")


# ---------------------------------------------------------------------------
# closed form, single neighborhood
# ---------------------------------------------------------------------------

def local_min_prob(case: NeighborhoodCase) -> float:
    """Probability that the center draws strictly below every neighbor."""
    _require_bounded(case)
    center = case.center
    lo = center.support.lo
    hi = min(d.support.hi for d in (center, *case.neighbors))
    if hi <= lo:
        return 0.0
    factors = [center.pdf_poly] + [d.survival_poly for d in case.neighbors]
    return refine_and_multiply(factors, lo, hi).integrate(lo, hi)


def local_max_prob(case: NeighborhoodCase) -> float:
    """Probability of a local maximum; exactly the negated-case minimum."""
    _require_bounded(case)
    return local_min_prob(case.negate())


def _half_saddle(case: NeighborhoodCase) -> float:
    # Center below the east/west neighbors and above the north/south
    # ones (below the first, above the second in the 2-neighbor case).
    nbrs = case.neighbors
    if len(nbrs) == 2:
        above_me, below_me = (nbrs[0],), (nbrs[1],)
    else:
        above_me, below_me = (nbrs[0], nbrs[2]), (nbrs[1], nbrs[3])
    center = case.center
    lo = max(center.support.lo, *(d.support.lo for d in below_me))
    hi = min(center.support.hi, *(d.support.hi for d in above_me))
    if hi <= lo:
        return 0.0
    factors = (
        [center.pdf_poly]
        + [d.survival_poly for d in above_me]
        + [d.cdf_poly for d in below_me]
    )
    return refine_and_multiply(factors, lo, hi).integrate(lo, hi)


def saddle_prob(case: NeighborhoodCase) -> float:
    """Probability of a saddle: one alternating term plus its mirror.

    The mirrored term is evaluated on the fully negated case, so
    negating every distribution swaps the two terms and leaves the sum
    unchanged.
    """
    _require_bounded(case)
    return _half_saddle(case) + _half_saddle(case.negate())


def closed_form_triple(case: NeighborhoodCase) -> ProbabilityTriple:
    return ProbabilityTriple(local_min_prob(case), local_max_prob(case), saddle_prob(case))


def closed_pattern_prob(case: NeighborhoodCase, pattern: str) -> float:
    if pattern not in PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}")
    if pattern == "min":
        return local_min_prob(case)
    if pattern == "max":
        return local_max_prob(case)
    return saddle_prob(case)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def _pattern_stats(xs: list[np.ndarray], patterns) -> dict[str, np.ndarray]:
    """Fractions of joint draws matching each pattern.

    ``xs`` holds draws for center then neighbors; arrays may carry a
    leading pixel axis.  Comparisons are strict, so ties count against
    every pattern.
    """
    c = xs[0]
    out = {}
    if len(xs) == 3:
        a, b = xs[1], xs[2]
        if "min" in patterns:
            out["min"] = ((c < a) & (c < b)).mean(axis=-1)
        if "max" in patterns:
            out["max"] = ((c > a) & (c > b)).mean(axis=-1)
        if "saddle" in patterns:
            out["saddle"] = (((c < a) & (c > b)) | ((c > a) & (c < b))).mean(axis=-1)
        return out
    e, n, w, s = xs[1:]
    if "min" in patterns:
        out["min"] = ((c < e) & (c < n) & (c < w) & (c < s)).mean(axis=-1)
    if "max" in patterns:
        out["max"] = ((c > e) & (c > n) & (c > w) & (c > s)).mean(axis=-1)
    if "saddle" in patterns:
        first = (c < e) & (c > n) & (c < w) & (c > s)
        second = (c > e) & (c < n) & (c > w) & (c < s)
        out["saddle"] = (first | second).mean(axis=-1)
    return out


def _case_draws(case: NeighborhoodCase, n: int, seed: int, pixel: int) -> list[np.ndarray]:
    dists = (case.center, *case.neighbors)
    planes = sum(d.u01_planes for d in dists)
    u = rngstream.unit_planes(seed, pixel, planes, n)
    xs = []
    offset = 0
    for d in dists:
        k = d.u01_planes
        xs.append(d.sample_u01(u[offset] if k == 1 else u[offset : offset + k]))
        offset += k
    return xs


def mc_all_patterns(
    case: NeighborhoodCase, n: int, seed: int = 0, pixel: int = 0
) -> ProbabilityTriple:
    """All three pattern fractions from one set of joint draws."""
    if n < 1:
        raise ValueError("n must be positive")
    stats = _pattern_stats(_case_draws(case, n, seed, pixel), PATTERNS)
    return ProbabilityTriple(
        float(stats["min"]), float(stats["max"]), float(stats["saddle"])
    )


def mc_pattern_prob(
    case: NeighborhoodCase, pattern: str, n: int, seed: int = 0, pixel: int = 0
) -> float:
    """Monte Carlo pattern fraction over n joint inverse-CDF draws.

    Deterministic for a given (seed, pixel) key.  The standard error is
    at most 0.5 / sqrt(n).
    """
    if pattern not in PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}")
    if n < 1:
        raise ValueError("n must be positive")
    stats = _pattern_stats(_case_draws(case, n, seed, pixel), (pattern,))
    return float(stats[pattern])


# ---------------------------------------------------------------------------
# histogram-only estimators
# ---------------------------------------------------------------------------

def _uniform_kernel_term(a1, b1, above_intervals, below_intervals) -> float:
    """Exact pattern probability for one combination of uniform kernels.

    The center is uniform on [a1, b1]; it must fall below every interval
    in ``above_intervals`` and above every interval in
    ``below_intervals``.  Each piece between kernel endpoints is a
    polynomial integrated in closed form around the piece midpoint.
    """
    lo = a1
    for a, _ in below_intervals:
        lo = max(lo, a)
    hi = b1
    for _, b in above_intervals:
        hi = min(hi, b)
    if hi <= lo:
        return 0.0
    cuts = {lo, hi}
    for a, _ in above_intervals:
        if lo < a < hi:
            cuts.add(a)
    for _, b in below_intervals:
        if lo < b < hi:
            cuts.add(b)
    pts = sorted(cuts)
    inv_w1 = 1.0 / (b1 - a1)
    total = 0.0
    for u, v in zip(pts, pts[1:]):
        c = 0.5 * (u + v)
        h = 0.5 * (v - u)
        coeffs = np.array([inv_w1])
        for a, b in above_intervals:
            if c > a:  # survival is 1 below a, linear inside
                coeffs = np.convolve(coeffs, [(b - c) / (b - a), -1.0 / (b - a)])
        for a, b in below_intervals:
            if c < b:  # cdf is 1 above b, linear inside
                coeffs = np.convolve(coeffs, [(c - a) / (b - a), 1.0 / (b - a)])
        acc = 0.0
        for k in range(0, coeffs.size, 2):
            acc += coeffs[k] * 2.0 * h ** (k + 1) / (k + 1)
        total += acc
    return total


def _histogram_grid(d: FiniteDistribution) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = d.support.lo, d.support.hi
    h = d.bin_weights.size
    edges = lo + (hi - lo) * np.arange(h + 1) / h
    return edges, d.bin_weights


def _combinatorial_pattern(case: NeighborhoodCase, pattern: str) -> float:
    _require_histograms(case)
    dists = (case.center, *case.neighbors)
    for d in dists:
        if d.bin_weights.size > COMBINATORIAL_MAX_BINS:
            raise ValueError(
                f"combinatorial cost grows as bins**{len(dists)}; "
                f"refusing more than {COMBINATORIAL_MAX_BINS} bins"
            )
    grids = [_histogram_grid(d) for d in dists]
    k = len(case.neighbors)
    if pattern == "min":
        above = list(range(1, k + 1))
        below = []
    elif pattern == "max":
        above = []
        below = list(range(1, k + 1))
    else:
        raise ValueError("combinatorial terms handle 'min' or 'max' directly")
    total = 0.0
    for combo in itertools.product(*(range(w.size) for _, w in grids)):
        wprod = 1.0
        for (_, w), j in zip(grids, combo):
            wprod *= w[j]
        if wprod == 0.0:
            continue
        intervals = [
            (grids[i][0][combo[i]], grids[i][0][combo[i] + 1]) for i in range(len(dists))
        ]
        a1, b1 = intervals[0]
        total += wprod * _uniform_kernel_term(
            a1,
            b1,
            [intervals[i] for i in above],
            [intervals[i] for i in below],
        )
    return total


def histogram_min_prob_combinatorial(case: NeighborhoodCase) -> float:
    """Local-minimum probability by summing over all bin combinations.

    Every combination of one bin per distribution is a small all-uniform
    case with an exact answer; weighting by the bin-mass product gives
    the histogram answer.  Cost grows as bins**(neighbors + 1), so this
    serves as a cross-check for the factorized product integral rather
    than as a production path.
    """
    return _combinatorial_pattern(case, "min")


def _combinatorial_saddle(case: NeighborhoodCase) -> float:
    _require_histograms(case)
    dists = (case.center, *case.neighbors)
    grids = [_histogram_grid(d) for d in dists]
    if len(case.neighbors) == 2:
        above_idx, below_idx = (1,), (2,)
    else:
        above_idx, below_idx = (1, 3), (2, 4)
    total = 0.0
    for combo in itertools.product(*(range(w.size) for _, w in grids)):
        wprod = 1.0
        for (_, w), j in zip(grids, combo):
            wprod *= w[j]
        if wprod == 0.0:
            continue
        intervals = [
            (grids[i][0][combo[i]], grids[i][0][combo[i] + 1]) for i in range(len(dists))
        ]
        a1, b1 = intervals[0]
        above = [intervals[i] for i in above_idx]
        below = [intervals[i] for i in below_idx]
        total += wprod * (
            _uniform_kernel_term(a1, b1, above, below)
            + _uniform_kernel_term(a1, b1, below, above)
        )
    return total


def combinatorial_triple(case: NeighborhoodCase) -> ProbabilityTriple:
    return ProbabilityTriple(
        _combinatorial_pattern(case, "min"),
        _combinatorial_pattern(case, "max"),
        _combinatorial_saddle(case),
    )


def _hist_arrays(d: FiniteDistribution):
    # bin_weights are already normalized at construction; renormalizing
    # here would shift the grid path and the per-case path apart by one ulp
    w = d.bin_weights
    cum = np.concatenate(([0.0], np.cumsum(w)))
    lo, hi = d.support.lo, d.support.hi
    return lo, (hi - lo) / w.size, w, cum


def semianalytical_prob(
    case: NeighborhoodCase, pattern: str, c: int, seed: int = 0, pixel: int = 0
) -> float:
    """Sampled-center estimator for histogram neighborhoods.

    Draws c center values, then multiplies the neighbors' exact
    conditional probabilities (survival or CDF at the drawn value, a
    prefix-sum lookup per neighbor) and averages.  Converges to the
    closed form as c grows.
    """
    if pattern not in PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}")
    if c < 1:
        raise ValueError("c must be positive")
    _require_histograms(case)
    u = rngstream.unit_planes(seed, pixel, 1, c)
    x = case.center.sample_u01(u[0]).reshape(1, -1)
    cdfs = []
    for d in case.neighbors:
        lo, binw, wn, cum = _hist_arrays(d)
        cdfs.append(
            histogram_cdf_values(
                np.array([[lo]]), np.array([[binw]]), wn[None, :], cum[None, :], x
            )
        )
    return float(_conditional_pattern(cdfs, pattern).mean())


def _conditional_pattern(cdfs: list[np.ndarray], pattern: str) -> np.ndarray:
    """Combine neighbor CDF values at the drawn centers into one pattern."""
    if pattern == "min":
        out = 1.0 - cdfs[0]
        for f in cdfs[1:]:
            out = out * (1.0 - f)
        return out
    if pattern == "max":
        out = cdfs[0].copy()
        for f in cdfs[1:]:
            out = out * f
        return out
    if len(cdfs) == 2:
        return (1.0 - cdfs[0]) * cdfs[1] + cdfs[0] * (1.0 - cdfs[1])
    e, n, w, s = cdfs
    return (1.0 - e) * n * (1.0 - w) * s + e * (1.0 - n) * w * (1.0 - s)


# ---------------------------------------------------------------------------
# grid classification
# ---------------------------------------------------------------------------

def case_at(field: UncertainField, row: int, col: int) -> NeighborhoodCase:
    """The 4-neighborhood at an interior pixel (east, north, west, south)."""
    height, width = field.shape
    if not (1 <= row < height - 1 and 1 <= col < width - 1):
        raise ValueError("neighborhood requires an interior pixel")
    return NeighborhoodCase(
        field.dist_at(row, col),
        (
            field.dist_at(row, col + 1),
            field.dist_at(row - 1, col),
            field.dist_at(row, col - 1),
            field.dist_at(row + 1, col),
        ),
    )


def pixel_index(field: UncertainField, row: int, col: int) -> int:
    """Flat pixel key used for the deterministic per-pixel sample streams."""
    return row * field.width + col


def _stencil_views(arr: np.ndarray) -> list[np.ndarray]:
    c = arr[1:-1, 1:-1]
    e = arr[1:-1, 2:]
    n = arr[:-2, 1:-1]
    w = arr[1:-1, :-2]
    s = arr[2:, 1:-1]
    tail = arr.shape[2:]
    return [v.reshape((-1,) + tail) for v in (c, e, n, w, s)]


def _position_params(field: UncertainField) -> list[dict[str, np.ndarray]]:
    views = {name: _stencil_views(arr) for name, arr in field.params.items()}
    return [{name: views[name][pos] for name in views} for pos in range(5)]


def _support_bounds(kind: str, p: dict[str, np.ndarray]):
    if kind == "epanechnikov":
        return p["mean"] - p["halfwidth"], p["mean"] + p["halfwidth"]
    return p["lo"], p["hi"]


def _closed_evaluators(kind: str, pos: list[dict[str, np.ndarray]]):
    """Node-evaluation callables for the vectorized product integrals."""
    if kind == "uniform":
        los = [p["lo"][:, None, None] for p in pos]
        his = [p["hi"][:, None, None] for p in pos]

        def pdf_center(x):
            return 1.0 / (his[0] - los[0])

        def cdf_at(i, x):
            return np.clip((x - los[i]) / (his[i] - los[i]), 0.0, 1.0)

        return pdf_center, cdf_at
    if kind == "epanechnikov":
        means = [p["mean"][:, None, None] for p in pos]
        halves = [p["halfwidth"][:, None, None] for p in pos]

        def pdf_center(x):
            u = (x - means[0]) / halves[0]
            return 0.75 / halves[0] * (1.0 - u * u)

        def cdf_at(i, x):
            u = np.clip((x - means[i]) / halves[i], -1.0, 1.0)
            return 0.5 + 0.75 * u - 0.25 * u**3

        return pdf_center, cdf_at
    prepared = []
    for p in pos:
        w = p["weights"]
        h = w.shape[1]
        total = w.sum(axis=1, keepdims=True)
        wn = w / total
        cum = np.concatenate((np.zeros((w.shape[0], 1)), np.cumsum(wn, axis=1)), axis=1)
        binw = (p["hi"] - p["lo"]) / h
        prepared.append((p["lo"], binw, wn, cum))

    def pdf_center(x):
        lo, binw, wn, _ = prepared[0]
        h = wn.shape[1]
        m = x.shape[0]
        j = np.floor((x - lo[:, None, None]) / binw[:, None, None]).astype(np.intp)
        np.clip(j, 0, h - 1, out=j)
        sel = np.take_along_axis(wn, j.reshape(m, -1), axis=1).reshape(x.shape)
        return sel / binw[:, None, None]

    def cdf_at(i, x):
        lo, binw, wn, cum = prepared[i]
        m = x.shape[0]
        flat = histogram_cdf_values(
            lo[:, None], binw[:, None], wn, cum, x.reshape(m, -1)
        )
        return flat.reshape(x.shape)

    return pdf_center, cdf_at


def _closed_kinks(kind: str, pos) -> np.ndarray:
    if kind == "histogram":
        cols = []
        for p in pos:
            h = p["weights"].shape[1]
            lo, hi = p["lo"], p["hi"]
            steps = np.arange(h + 1) / h
            cols.append(lo[:, None] + (hi - lo)[:, None] * steps[None, :])
        return np.concatenate(cols, axis=1)
    cols = []
    for p in pos:
        lo, hi = _support_bounds(kind, p)
        cols.append(np.stack([lo, hi], axis=1))
    return np.concatenate(cols, axis=1)


def _product_integral(lo_r, hi_r, kinks, pdf_center, cdf_at, surv_pos, cdf_pos, xi, wts):
    pts = np.minimum(np.maximum(kinks, lo_r[:, None]), hi_r[:, None])
    pts.sort(axis=1)
    halves = 0.5 * (pts[:, 1:] - pts[:, :-1])
    mids = 0.5 * (pts[:, 1:] + pts[:, :-1])
    x = mids[:, :, None] + halves[:, :, None] * xi
    f = pdf_center(x) * np.ones_like(x)
    for i in surv_pos:
        f = f * (1.0 - cdf_at(i, x))
    for i in cdf_pos:
        f = f * cdf_at(i, x)
    return ((f @ wts) * halves).sum(axis=1)


def _closed_chunk(kind: str, pos, channels) -> dict[str, np.ndarray]:
    pdf_center, cdf_at = _closed_evaluators(kind, pos)
    kinks = _closed_kinks(kind, pos)
    bounds = [_support_bounds(kind, p) for p in pos]
    los = [b[0] for b in bounds]
    his = [b[1] for b in bounds]
    n_nodes = 8 if kind == "epanechnikov" else 3
    xi, wts = gauss_legendre_nodes(n_nodes)
    out = {}
    if "min" in channels:
        hi_r = np.minimum.reduce(his)
        out["min"] = _product_integral(
            los[_POS_C], hi_r, kinks, pdf_center, cdf_at,
            (_POS_E, _POS_N, _POS_W, _POS_S), (), xi, wts,
        )
    if "max" in channels:
        lo_r = np.maximum.reduce(los)
        out["max"] = _product_integral(
            lo_r, his[_POS_C], kinks, pdf_center, cdf_at,
            (), (_POS_E, _POS_N, _POS_W, _POS_S), xi, wts,
        )
    if "saddle" in channels:
        lo_r = np.maximum.reduce([los[_POS_C], los[_POS_N], los[_POS_S]])
        hi_r = np.minimum.reduce([his[_POS_C], his[_POS_E], his[_POS_W]])
        first = _product_integral(
            lo_r, hi_r, kinks, pdf_center, cdf_at,
            (_POS_E, _POS_W), (_POS_N, _POS_S), xi, wts,
        )
        lo_r = np.maximum.reduce([los[_POS_C], los[_POS_E], los[_POS_W]])
        hi_r = np.minimum.reduce([his[_POS_C], his[_POS_N], his[_POS_S]])
        second = _product_integral(
            lo_r, hi_r, kinks, pdf_center, cdf_at,
            (_POS_N, _POS_S), (_POS_E, _POS_W), xi, wts,
        )
        out["saddle"] = first + second
    return out


def _position_samples(kind: str, p: dict[str, np.ndarray], u: np.ndarray) -> np.ndarray:
    """Transform one position's uniform planes into value draws.

    These are the same floating-point operations the per-case samplers
    run, so grid draws match single-case draws bit for bit.
    """
    if kind == "gaussian":
        z = np.sqrt(-2.0 * np.log1p(-u[:, 0, :])) * np.cos(2.0 * np.pi * u[:, 1, :])
        return p["mean"][:, None] + p["stddev"][:, None] * z
    plane = u[:, 0, :]
    if kind == "uniform":
        return uniform_icdf(p["lo"][:, None], p["hi"][:, None], plane)
    if kind == "epanechnikov":
        lo = p["mean"] - p["halfwidth"]
        hi = p["mean"] + p["halfwidth"]
        return epanechnikov_icdf(
            (0.5 * (lo + hi))[:, None], (0.5 * (hi - lo))[:, None], plane
        )
    w = p["weights"]
    total = w.sum(axis=1, keepdims=True)
    wn = w / total
    cum = np.concatenate((np.zeros((w.shape[0], 1)), np.cumsum(wn, axis=1)), axis=1)
    cum[:, -1] = 1.0
    binw = (p["hi"] - p["lo"]) / w.shape[1]
    return histogram_icdf(p["lo"][:, None], binw[:, None], wn, cum, plane)


def _mc_chunk(kind, pos, px_idx, n, seed, channels) -> dict[str, np.ndarray]:
    per = 2 if kind == "gaussian" else 1
    u = rngstream.unit_block(seed, px_idx, 5 * per, n)
    xs = [
        _position_samples(kind, pos[i], u[:, i * per : (i + 1) * per, :])
        for i in range(5)
    ]
    return _pattern_stats(xs, channels)


def _semi_chunk(pos, px_idx, c, seed, channels) -> dict[str, np.ndarray]:
    u = rngstream.unit_block(seed, px_idx, 1, c)
    x = _position_samples("histogram", pos[0], u)
    cdfs = []
    for i in range(1, 5):
        p = pos[i]
        w = p["weights"]
        total = w.sum(axis=1, keepdims=True)
        wn = w / total
        cum = np.concatenate((np.zeros((w.shape[0], 1)), np.cumsum(wn, axis=1)), axis=1)
        binw = (p["hi"] - p["lo"]) / w.shape[1]
        cdfs.append(
            histogram_cdf_values(p["lo"][:, None], binw[:, None], wn, cum, x)
        )
    return {ch: _conditional_pattern(cdfs, ch).mean(axis=1) for ch in channels}


def _comb_chunk(pos, channels) -> dict[str, np.ndarray]:
    from . import distributions as dist

    m = pos[0]["lo"].shape[0]
    out = {ch: np.zeros(m) for ch in channels}
    for i in range(m):
        dists = [
            dist.histogram(p["lo"][i], p["hi"][i], p["weights"][i]) for p in pos
        ]
        case = NeighborhoodCase(dists[0], tuple(dists[1:]))
        if "min" in channels:
            out["min"][i] = _combinatorial_pattern(case, "min")
        if "max" in channels:
            out["max"][i] = _combinatorial_pattern(case, "max")
        if "saddle" in channels:
            out["saddle"][i] = _combinatorial_saddle(case)
    return out


def _chunk_task(payload) -> dict[str, np.ndarray]:
    method, kind, pos, px_idx, estimator, channels = payload
    if method == "closed_form":
        return _closed_chunk(kind, pos, channels)
    if method == "monte_carlo":
        return _mc_chunk(kind, pos, px_idx, estimator.n_samples, estimator.seed, channels)
    if method == "semianalytical":
        return _semi_chunk(pos, px_idx, estimator.c, estimator.seed, channels)
    return _comb_chunk(pos, channels)


def classify_field(
    field: UncertainField,
    estimator: EstimatorSpec | None = None,
    workers: int = 1,
    channels=CHANNELS,
) -> ProbabilityField:
    """Per-pixel critical-point probabilities over the interior pixels.

    The one-pixel border is marked invalid.  Work is split into pixel
    chunks; per-pixel math never crosses chunk boundaries and sample
    streams are keyed by pixel index, so the output is identical for
    any ``workers`` value or chunk layout.
    """
    estimator = estimator or EstimatorSpec()
    if isinstance(channels, str):
        channels = (channels,)
    for ch in channels:
        if ch not in CHANNELS:
            raise ValueError(f"unknown channel {ch!r}")
    height, width = field.shape
    if height < 3 or width < 3:
        raise ValueError("field must be at least 3 x 3 to have interior pixels")
    kind = field.model.kind
    method = estimator.method
    if method == "closed_form" and kind == "gaussian":
        raise ValueError("Gaussian fields have no closed form; use monte_carlo")
    if method in ("semianalytical", "combinatorial") and kind != "histogram":
        raise ValueError(f"{method} estimation is defined for histogram fields only")
    if method == "combinatorial" and field.model.bins > COMBINATORIAL_MAX_BINS:
        raise ValueError(
            f"combinatorial estimation refuses more than {COMBINATORIAL_MAX_BINS} bins"
        )
    if workers < 1:
        raise ValueError("workers must be positive")

    pos = _position_params(field)
    rows = np.arange(1, height - 1)
    cols = np.arange(1, width - 1)
    px_idx = (rows[:, None] * width + cols[None, :]).reshape(-1).astype(np.uint64)
    npix = px_idx.size

    chunk = max(1, math.ceil(npix / workers))
    if method == "monte_carlo":
        chunk = min(chunk, max(1, 2_000_000 // estimator.n_samples))
    elif method == "semianalytical":
        chunk = min(chunk, max(1, 2_000_000 // estimator.c))
    elif method == "combinatorial":
        chunk = min(chunk, 512)
    else:
        # keeps the (pixels x kinks x nodes) intermediates cache-resident,
        # so per-pixel cost stays flat as the grid grows
        chunk = min(chunk, 4096)

    payloads = []
    for start in range(0, npix, chunk):
        stop = min(start + chunk, npix)
        pos_slice = [{k: v[start:stop] for k, v in p.items()} for p in pos]
        payloads.append((method, kind, pos_slice, px_idx[start:stop], estimator, channels))

    if workers == 1 or len(payloads) == 1:
        results = [_chunk_task(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk_task, payloads))

    out = ProbabilityField.empty(height, width)
    out.valid[1:-1, 1:-1] = True
    targets = {"min": out.p_min, "max": out.p_max, "saddle": out.p_saddle}
    for ch in channels:
        flat = np.concatenate([r[ch] for r in results])
        targets[ch][1:-1, 1:-1] = flat.reshape(height - 2, width - 2)
    return out
