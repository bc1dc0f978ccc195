"""Piecewise polynomials with exact integration.

A piecewise polynomial is a sorted array of breakpoints plus one
coefficient array per interval.  Coefficients are stored in ascending
powers of the *local* coordinate ``t = x - midpoint(piece)``.  Keeping
every piece centered on its own midpoint means coefficient magnitudes
depend only on the piece width, not on where the piece sits on the real
line, so products of density and distribution functions stay
numerically stable for narrow supports far from the origin.

Outside the breakpoint range a piecewise polynomial takes constant
values (``below_value`` to the left, ``above_value`` to the right),
which is how density tails (0), distribution tails (0 and 1) and
survival tails (1 and 0) are represented.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import polynomial as npoly

MAX_DEGREE = 30
MAX_NODES = 16

# Quadrature with n nodes integrates polynomials up to degree 2n - 1
# exactly, so 16 nodes cover MAX_DEGREE with one node to spare.
_GL_TABLE: dict[int, tuple[np.ndarray, np.ndarray]] = {
    n: np.polynomial.legendre.leggauss(n) for n in range(1, MAX_NODES + 1)
}


class DegreeLimitError(ValueError):
    """Raised when an operation would exceed the supported degree."""


class EmptyDomainError(ValueError):
    """Raised when an operation receives an empty interval."""


def gauss_legendre_nodes(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Return cached Gauss-Legendre nodes and weights on [-1, 1]."""
    if not 1 <= n_nodes <= MAX_NODES:
        raise DegreeLimitError(f"quadrature supports 1..{MAX_NODES} nodes, got {n_nodes}")
    return _GL_TABLE[n_nodes]


def shift_coefficients(coeffs: np.ndarray, offset: float) -> np.ndarray:
    """Re-center a coefficient array: return b with sum b_j t^j = p(t + offset)."""
    coeffs = np.asarray(coeffs, dtype=float)
    if offset == 0.0:
        return coeffs.copy()
    n = coeffs.size
    out = np.zeros(n)
    for k in range(n):
        a_k = coeffs[k]
        if a_k == 0.0:
            continue
        for j in range(k + 1):
            out[j] += a_k * math.comb(k, j) * offset ** (k - j)
    return out


class PiecewisePolynomial:
    """Polynomial pieces over consecutive breakpoint intervals."""

    __slots__ = ("breakpoints", "pieces", "below_value", "above_value", "_midpoints")

    def __init__(
        self,
        breakpoints,
        pieces,
        below_value: float = 0.0,
        above_value: float = 0.0,
    ) -> None:
        bp = np.asarray(breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("need at least two breakpoints")
        if not np.all(np.diff(bp) > 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        if len(pieces) != bp.size - 1:
            raise ValueError("piece count must equal interval count")
        self.breakpoints = bp
        self.pieces = [np.atleast_1d(np.asarray(p, dtype=float)) for p in pieces]
        self.below_value = float(below_value)
        self.above_value = float(above_value)
        self._midpoints = 0.5 * (bp[:-1] + bp[1:])

    # -- basic queries -------------------------------------------------

    @property
    def degree(self) -> int:
        return max(p.size - 1 for p in self.pieces)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @classmethod
    def constant(cls, lo: float, hi: float, value: float) -> "PiecewisePolynomial":
        return cls([lo, hi], [[value]])

    # -- evaluation ----------------------------------------------------

    def eval(self, x):
        """Evaluate at scalar or array ``x``.

        At an interior breakpoint the piece to the right applies; at the
        final breakpoint the last piece applies.  Outside the breakpoint
        range the constant tail values apply.
        """
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        xv = np.atleast_1d(arr)
        bp = self.breakpoints
        idx = np.searchsorted(bp, xv, side="right") - 1
        np.clip(idx, 0, len(self.pieces) - 1, out=idx)
        out = np.empty(xv.shape, dtype=float)
        for i, coeffs in enumerate(self.pieces):
            mask = idx == i
            if mask.any():
                out[mask] = npoly.polyval(xv[mask] - self._midpoints[i], coeffs)
        out[xv < bp[0]] = self.below_value
        out[xv > bp[-1]] = self.above_value
        return float(out[0]) if scalar else out

    __call__ = eval

    # -- calculus ------------------------------------------------------

    def integrate(self, lo: float, hi: float) -> float:
        """Exact integral over [lo, hi] clamped to the breakpoint range.

        Each overlapped piece is integrated with Gauss-Legendre
        quadrature using ceil((degree + 1) / 2) nodes, which is exact
        for polynomials.
        """
        if hi < lo:
            raise ValueError("integration bounds out of order")
        if self.degree > MAX_DEGREE:
            raise DegreeLimitError(
                f"piece degree {self.degree} exceeds supported maximum {MAX_DEGREE}"
            )
        bp = self.breakpoints
        lo = max(lo, bp[0])
        hi = min(hi, bp[-1])
        if hi <= lo:
            return 0.0
        total = 0.0
        for i, coeffs in enumerate(self.pieces):
            u = max(bp[i], lo)
            v = min(bp[i + 1], hi)
            if v <= u:
                continue
            n_nodes = (coeffs.size + 1) // 2
            xi, w = gauss_legendre_nodes(max(n_nodes, 1))
            half = 0.5 * (v - u)
            center = 0.5 * (u + v) - self._midpoints[i]
            vals = npoly.polyval(center + half * xi, coeffs)
            total += half * float(np.dot(w, vals))
        return total

    def antiderivative(self) -> "PiecewisePolynomial":
        """Running integral, zero at the first breakpoint.

        The result is continuous across pieces; its right tail value is
        the total integral over the breakpoint range.
        """
        bp = self.breakpoints
        running = 0.0
        new_pieces = []
        for i, coeffs in enumerate(self.pieces):
            raw = np.concatenate(([0.0], coeffs / np.arange(1.0, coeffs.size + 1.0)))
            raw[0] = running - npoly.polyval(bp[i] - self._midpoints[i], raw)
            new_pieces.append(raw)
            running = npoly.polyval(bp[i + 1] - self._midpoints[i], raw)
        return PiecewisePolynomial(bp, new_pieces, below_value=0.0, above_value=running)

    # -- helpers used by refine_and_multiply ----------------------------

    def local_coefficients(self, u: float, v: float, center: float) -> np.ndarray:
        """Coefficients of this function on [u, v], re-centered on ``center``.

        [u, v] must not straddle an interior breakpoint (the probe point
        is the interval midpoint).  Outside the breakpoint range the
        constant tail value is returned.
        """
        mid = 0.5 * (u + v)
        bp = self.breakpoints
        if mid < bp[0]:
            return np.array([self.below_value])
        if mid > bp[-1]:
            return np.array([self.above_value])
        i = int(np.searchsorted(bp, mid, side="right") - 1)
        i = min(max(i, 0), len(self.pieces) - 1)
        return shift_coefficients(self.pieces[i], center - self._midpoints[i])


def refine_and_multiply(
    factors: list[PiecewisePolynomial], lo: float, hi: float
) -> PiecewisePolynomial:
    """Product of several piecewise polynomials restricted to [lo, hi].

    The result's breakpoints are the union of the factors' breakpoints
    inside (lo, hi) plus the endpoints; union points closer than
    1e-12 * (hi - lo) are merged.  On each resulting piece every factor
    is a single polynomial (or a constant tail value), so the product is
    formed by coefficient convolution in the piece's local coordinates.
    """
    if not factors:
        raise ValueError("need at least one factor")
    if not lo < hi:
        raise EmptyDomainError(f"empty domain [{lo}, {hi}]")
    tol = 1e-12 * (hi - lo)
    interior = np.concatenate([f.breakpoints for f in factors])
    interior = np.unique(interior[(interior > lo + tol) & (interior < hi - tol)])
    pts = [lo]
    for p in interior:
        if p - pts[-1] > tol:
            pts.append(float(p))
    pts.append(hi)
    bp = np.asarray(pts)
    pieces = []
    for i in range(bp.size - 1):
        u, v = bp[i], bp[i + 1]
        center = 0.5 * (u + v)
        coeffs = np.array([1.0])
        for f in factors:
            coeffs = np.convolve(coeffs, f.local_coefficients(u, v, center))
        pieces.append(coeffs)
    below = math.prod(f.below_value for f in factors)
    above = math.prod(f.above_value for f in factors)
    return PiecewisePolynomial(bp, pieces, below_value=below, above_value=above)
