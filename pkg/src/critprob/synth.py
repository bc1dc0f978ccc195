"""Deterministic synthetic ensembles and randomized fuzz cases.

Two experiment setups: an Ackley field with per-pixel uniform noise,
and a two-bump Gaussian mixture where a minority of ensemble members
carry a rotated (outlier) structure.  Plus a seeded generator of random
overlapping neighborhood cases for fuzz testing.
"""

from __future__ import annotations

import math

import numpy as np

from .distributions import GaussianSampler, epanechnikov, histogram, uniform
from .engine import NeighborhoodCase
from .fields import MODEL_KINDS, EnsembleStack

# Mixture constants.  Bumps sit on the main diagonal at the quarter
# points; the rotated copy moves them to the anti-diagonal.  The bump
# width is a few pixels so that, inside a 3x3 peak window, fitted bins
# cannot resolve pixel-to-pixel structure and the member-mass split
# (majority vs outlier) alone separates the windows.  The background is
# a shallow radial bowl: it is invariant under the 90-degree rotation,
# so outlier members disturb only the bump regions, and its per-pixel
# slope near the peak windows exceeds the widest fitted noise support
# (2 * sqrt(5) * std of the noise), so noise alone never creates local
# maxima on the sloped background.
MIX_AMPLITUDE = 1.0
MIX_SIGMA_PX = 4.0
MIX_CENTER_FRACTIONS = ((0.25, 0.25), (0.75, 0.75))
MIX_BOWL_GAIN = 4e-5
MIX_NOISE_AMP = 8e-4


def ackley(x, y):
    """Standard two-dimensional Ackley function; global minimum f(0,0)=0."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    radial = -20.0 * np.exp(-0.2 * np.sqrt(0.5 * (x * x + y * y)))
    waves = -np.exp(0.5 * (np.cos(2.0 * np.pi * x) + np.cos(2.0 * np.pi * y)))
    return radial + waves + math.e + 20.0


def ackley_base(width: int, height: int) -> np.ndarray:
    """Ackley sampled on a regular width x height grid over [-5, 5]^2."""
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be positive")
    xs = np.linspace(-5.0, 5.0, width)
    ys = np.linspace(-5.0, 5.0, height)
    return ackley(xs[None, :], ys[:, None])


def ackley_ensemble(
    width: int, height: int, members: int = 50, noise_amp: float = 0.3, seed: int = 0
) -> EnsembleStack:
    """Ackley base field plus i.i.d. per-pixel uniform noise per member."""
    if members < 1:
        raise ValueError("members must be >= 1")
    if noise_amp < 0:
        raise ValueError("noise_amp must be >= 0")
    base = ackley_base(width, height)
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-noise_amp, noise_amp, size=(members, height, width))
    return EnsembleStack(np.asarray(base[None] + noise, dtype=np.float32))


def mixture_base(width: int, height: int) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Noiseless two-bump field over a radial bowl, plus its peak pixels."""
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be positive")
    rows = np.arange(height, dtype=np.float64)
    cols = np.arange(width, dtype=np.float64)
    center_r = 0.5 * (height - 1)
    center_c = 0.5 * (width - 1)
    field = MIX_BOWL_GAIN * (
        (rows[:, None] - center_r) ** 2 + (cols[None, :] - center_c) ** 2
    )
    peaks = []
    inv = 1.0 / (2.0 * MIX_SIGMA_PX**2)
    for fr, fc in MIX_CENTER_FRACTIONS:
        r0 = round(fr * (height - 1))
        c0 = round(fc * (width - 1))
        peaks.append((r0, c0))
        d2 = (rows[:, None] - r0) ** 2 + (cols[None, :] - c0) ** 2
        field = field + MIX_AMPLITUDE * np.exp(-d2 * inv)
    return field, peaks


def gaussian_mixture_ensemble(
    width: int,
    height: int,
    true_members: int = 40,
    outlier_members: int = 10,
    seed: int = 0,
) -> tuple[EnsembleStack, list[tuple[int, int]], list[tuple[int, int]]]:
    """Two-bump ensemble with a rotated-outlier minority.

    True members share a noiseless base with bumps on the main
    diagonal; outlier members use the same base rotated 90 degrees
    (bumps on the anti-diagonal), which requires a square grid.
    Returns the stack plus the true and outlier peak pixel
    coordinates.
    """
    if true_members < 0 or outlier_members < 0:
        raise ValueError("member counts must be >= 0")
    total = true_members + outlier_members
    if total < 1:
        raise ValueError("ensemble needs at least one member")
    base, peaks = mixture_base(width, height)
    if outlier_members > 0 and width != height:
        raise ValueError("rotated outlier members require a square grid")
    outlier_peaks = [(height - 1 - c, r) for r, c in peaks]
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-MIX_NOISE_AMP, MIX_NOISE_AMP, size=(total, height, width))
    values = np.empty((total, height, width), dtype=np.float64)
    values[:true_members] = base
    if outlier_members > 0:
        values[true_members:] = np.rot90(base)
    values += noise
    return EnsembleStack(values.astype(np.float32)), peaks, outlier_peaks


def random_case(
    seed: int, model: str = "uniform", neighborhood: int = 4, bins: int = 5
) -> NeighborhoodCase:
    """Seeded random neighborhood whose supports always pairwise overlap.

    Centers land in [-0.25, 0.25] and halfwidths in [0.4, 0.8], so every
    support contains (-0.15, 0.15).
    """
    if model not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {model!r}")
    if neighborhood not in (2, 4):
        raise ValueError("neighborhood must be 2 or 4")
    rng = np.random.default_rng(seed)
    count = neighborhood + 1
    centers = rng.uniform(-0.25, 0.25, count)
    halfwidths = rng.uniform(0.4, 0.8, count)
    dists = []
    for c, h in zip(centers, halfwidths):
        if model == "uniform":
            dists.append(uniform(c - h, c + h))
        elif model == "epanechnikov":
            dists.append(epanechnikov(c, h))
        elif model == "histogram":
            weights = rng.uniform(0.05, 1.0, bins)
            dists.append(histogram(c - h, c + h, weights / weights.sum()))
        else:
            dists.append(GaussianSampler(c, 0.5 * h))
    return NeighborhoodCase(dists[0], tuple(dists[1:]))
