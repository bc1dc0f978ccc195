"""Counter-based uniform random streams.

Monte Carlo runs over a grid must give the same answer no matter how
pixels are chunked across workers, so draws are a pure function of
(seed, pixel index, plane index, sample index) rather than the state of
a shared generator.  The mapping is the splitmix64 output function
applied to a keyed counter, which is cheap to evaluate for whole blocks
of samples with numpy integer arithmetic.

A "plane" is one independent stream; a neighborhood draw uses one plane
per bounded distribution and two per Gaussian (for the Box-Muller pair).
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_PIXEL_SALT = np.uint64(0xBF58476D1CE4E5B9)
_PLANE_SALT = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1
_INV_2_53 = 2.0 ** -53


def _mix(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def unit_block(seed: int, pixels, planes: int, n: int) -> np.ndarray:
    """Uniform [0, 1) draws of shape (len(pixels), planes, n).

    ``pixels`` is an integer array of pixel indices; scalar callers pass
    a length-1 array and drop the first axis.  Draws for a given
    (seed, pixel, plane, i) never depend on the rest of the block.
    """
    px = np.asarray(pixels, dtype=np.uint64).reshape(-1)
    with np.errstate(over="ignore"):
        base = _mix(np.uint64(int(seed) & _MASK) + _GOLDEN)
        per_pixel = _mix(base ^ (px * _PIXEL_SALT))
        plane_ids = np.arange(planes, dtype=np.uint64)
        keys = _mix(per_pixel[:, None] ^ (plane_ids[None, :] * _PLANE_SALT))
        counters = (np.arange(n, dtype=np.uint64) + np.uint64(1)) * _GOLDEN
        state = keys[:, :, None] + counters[None, None, :]
    return (_mix(state) >> np.uint64(11)) * _INV_2_53


def unit_planes(seed: int, pixel: int, planes: int, n: int) -> np.ndarray:
    """Uniform [0, 1) draws of shape (planes, n) for a single pixel key."""
    return unit_block(seed, np.asarray([pixel], dtype=np.uint64), planes, n)[0]
