"""Rectangular coordinate boxes and second-order finite differences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridBox:
    """A uniform rectangular grid: per-axis interval and point count."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    steps: tuple[int, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        steps = tuple(int(v) for v in self.steps)
        if not len(lo) == len(hi) == len(steps):
            raise ValueError("lo, hi and steps must have equal length")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ValueError("each interval needs hi > lo")
        if any(s < 2 for s in steps):
            raise ValueError("need at least two points per axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "steps", steps)

    @classmethod
    def cube(cls, n: int, half_width: float = 1.0, steps: int = 21) -> "GridBox":
        return cls((-half_width,) * n, (half_width,) * n, (steps,) * n)

    @property
    def ndim(self) -> int:
        return len(self.steps)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (h - l) / (s - 1) for l, h, s in zip(self.lo, self.hi, self.steps)
        )

    @property
    def npoints(self) -> int:
        return int(np.prod(self.steps))

    def axes(self) -> list[np.ndarray]:
        return [
            np.linspace(l, h, s) for l, h, s in zip(self.lo, self.hi, self.steps)
        ]

    def mesh(self) -> np.ndarray:
        """Coordinates array of shape (*steps, ndim)."""
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(grids, axis=-1)

    def origin_index(self) -> tuple[int, ...]:
        """Per-axis index of the node closest to coordinate zero."""
        return tuple(int(np.argmin(np.abs(a))) for a in self.axes())

    def halved(self) -> "GridBox":
        """Same box with each spacing halved (endpoints preserved)."""
        return GridBox(self.lo, self.hi, tuple(2 * (s - 1) + 1 for s in self.steps))


def fd_tol(box: GridBox, coefficient: float = 25.0) -> float:
    """Gate for second-order finite-difference residuals: coefficient * h^2."""
    h = max(box.spacing)
    return coefficient * h * h


def central_diff(values, axis: int, h: float) -> np.ndarray:
    """Second-order partial along a grid axis (one-sided at the two faces)."""
    return np.gradient(values, h, axis=axis, edge_order=2)


def interior_slices(ndim: int, margin: int = 1, total_ndim: int | None = None):
    """Slices selecting points at least `margin` nodes away from every face."""
    sl = (slice(margin, -margin),) * ndim
    if total_ndim is not None:
        sl = sl + (slice(None),) * (total_ndim - ndim)
    return sl


def dilate_mask(mask: np.ndarray, ndim: int, repeats: int = 1) -> np.ndarray:
    """Grow a boolean mask by one node along every grid axis, `repeats` times.

    Grid axes are the leading `ndim` axes of the array.
    """
    out = np.asarray(mask, dtype=bool).copy()
    for _ in range(repeats):
        grown = out.copy()
        for axis in range(ndim):
            shifted = np.roll(out, 1, axis=axis)
            idx = [slice(None)] * out.ndim
            idx[axis] = slice(0, 1)
            shifted[tuple(idx)] = False
            grown |= shifted
            shifted = np.roll(out, -1, axis=axis)
            idx[axis] = slice(-1, None)
            shifted[tuple(idx)] = False
            grown |= shifted
        out = grown
    return out


def masked_max(values, mask=None, *, ndim: int | None = None, margin: int = 0):
    """Max of |values| over unmasked grid points, optionally interior-only.

    `values` may carry trailing non-grid axes; those are reduced first.
    Returns 0.0 when nothing survives the mask.
    """
    values = np.asarray(values)
    if ndim is None:
        ndim = values.ndim if mask is None else np.asarray(mask).ndim
    mag = np.abs(values)
    while mag.ndim > ndim:
        mag = np.max(mag, axis=-1)
    if margin:
        sl = interior_slices(ndim, margin)
        mag = mag[sl]
        if mask is not None:
            mask = np.asarray(mask)[sl]
    if mask is not None:
        keep = ~np.asarray(mask, dtype=bool)
        if not np.any(keep):
            return 0.0
        return float(np.max(mag[keep]))
    return float(np.max(mag))
