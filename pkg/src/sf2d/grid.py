"""Masked 2D fields, spatial increments and their moments.

A field is stored row-major as ``values[y, x]`` with the origin at the top-left
pixel. A lag ``(lx, ly)`` pairs the pixel at ``(x, y)`` with the pixel at
``(x + lx, y + ly)``; ``lx`` runs along columns and ``ly`` along rows.

Only pairs whose two endpoints both lie inside the grid and are both valid
contribute to a statistic (the *valid-overlap* policy). Nothing is wrapped or
padded, so the pair sets of ``l`` and ``-l`` are the same.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from .errors import LagRangeError, ParameterError

__all__ = [
    "Field2D",
    "Lag",
    "MomentSet",
    "increment_moments",
    "overlap_slices",
    "lowpass",
]


@dataclass(frozen=True, eq=False)
class Field2D:
    """Immutable masked scalar grid with a physical pixel size.

    Parameters
    ----------
    values : array_like, shape (height, width)
        Samples, row-major. Entries under an invalid mask are replaced by NaN.
    pixel_size : float
        Pixel spacing in meters (same along both axes).
    mask : array_like of bool, optional
        ``True`` where the sample is valid. Defaults to ``isfinite(values)``.
    """

    values: np.ndarray
    pixel_size: float = 1.0
    mask: np.ndarray | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ParameterError(f"field must be 2D, got shape {values.shape}")
        if values.shape[0] < 2 or values.shape[1] < 2:
            raise ParameterError(f"field must be at least 2x2, got {values.shape}")
        if self.mask is None:
            mask = np.isfinite(values)
        else:
            mask = np.array(self.mask, dtype=bool)
            if mask.shape != values.shape:
                raise ParameterError(
                    f"mask shape {mask.shape} does not match values {values.shape}"
                )
            if not np.all(np.isfinite(values[mask])):
                raise ParameterError("valid samples must be finite")
        pixel_size = float(self.pixel_size)
        if not (math.isfinite(pixel_size) and pixel_size > 0):
            raise ParameterError(f"pixel_size must be positive, got {self.pixel_size}")
        values[~mask] = np.nan
        values.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "pixel_size", pixel_size)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def n_valid(self) -> int:
        return int(self.mask.sum())

    def filled(self, fill: float = 0.0) -> np.ndarray:
        """Values with invalid pixels replaced by ``fill`` (a new array)."""
        return np.where(self.mask, self.values, fill)

    def valid_mean_var(self) -> tuple[float, float]:
        """Population mean and variance over valid pixels."""
        v = self.values[self.mask]
        if v.size == 0:
            return math.nan, math.nan
        mean = _exact_sum(v) / v.size
        var = _exact_sum((v - mean) ** 2) / v.size
        return mean, var

    def map_values(self, a: float = 1.0, b: float = 0.0) -> Field2D:
        """Return the field ``a * F + b`` with the same mask."""
        return Field2D(a * self.filled() + b, self.pixel_size, self.mask)


class Lag(NamedTuple):
    lx: int
    ly: int


class MomentSet(NamedTuple):
    """Moments of the increments at one lag.

    ``mean`` is the first raw moment, ``m2``..``m4`` are population central
    moments and ``s2``..``s4`` the raw moments (structure functions).
    All moments are NaN when ``count`` is 0.
    """

    count: int
    mean: float
    m2: float
    m3: float
    m4: float
    s2: float
    s3: float
    s4: float


def _exact_sum(a: np.ndarray) -> float:
    # Row sums in numpy order, then a correctly rounded sum of the row sums.
    a = np.asarray(a)
    if a.ndim < 2:
        return math.fsum(a.tolist())
    return math.fsum(a.sum(axis=-1).ravel().tolist())


def overlap_slices(shape: tuple[int, int], lag) -> tuple[tuple[slice, slice], tuple[slice, slice]]:
    """Slices selecting base points and shifted points for a lag.

    Returns ``(base, shifted)`` such that ``values[shifted] - values[base]``
    is the array of increments over every pair inside the grid.
    """
    h, w = shape
    lx, ly = int(lag[0]), int(lag[1])
    if abs(lx) >= w or abs(ly) >= h:
        raise LagRangeError(f"lag ({lx}, {ly}) does not fit a {w}x{h} field")
    y0, y1 = max(0, -ly), min(h, h - ly)
    x0, x1 = max(0, -lx), min(w, w - lx)
    base = (slice(y0, y1), slice(x0, x1))
    shifted = (slice(y0 + ly, y1 + ly), slice(x0 + lx, x1 + lx))
    return base, shifted


def _moments_from_arrays(filled: np.ndarray, mask: np.ndarray, lag) -> MomentSet:
    base, shifted = overlap_slices(filled.shape, lag)
    valid = mask[base] & mask[shifted]
    count = int(valid.sum())
    if count == 0:
        nan = math.nan
        return MomentSet(0, nan, nan, nan, nan, nan, nan, nan)
    d = np.where(valid, filled[shifted] - filled[base], 0.0)
    mean = _exact_sum(d) / count
    c = np.where(valid, d - mean, 0.0)
    c2 = c * c
    d2 = d * d
    return MomentSet(
        count=count,
        mean=mean,
        m2=_exact_sum(c2) / count,
        m3=_exact_sum(c2 * c) / count,
        m4=_exact_sum(c2 * c2) / count,
        s2=_exact_sum(d2) / count,
        s3=_exact_sum(d2 * d) / count,
        s4=_exact_sum(d2 * d2) / count,
    )


def increment_moments(field: Field2D, lag) -> MomentSet:
    """Moments of ``F(r + l) - F(r)`` over the valid-overlap pairs of ``lag``.

    Central moments use the population convention (divide by the pair count)
    and a two-pass scheme. Sums are accumulated per row and the row sums are
    added with :func:`math.fsum`, so the result does not depend on how the
    work is scheduled.

    Raises
    ------
    LagRangeError
        If ``|lx| >= width`` or ``|ly| >= height``.
    """
    return _moments_from_arrays(field.filled(), field.mask, lag)


def lowpass(field: Field2D, cutoff: float) -> Field2D:
    """Box-average the field with a square window of about ``cutoff`` meters.

    The window side is ``round(cutoff / pixel_size)`` pixels, bumped to the
    next odd number. Averages are taken over valid pixels only; an output
    pixel is valid when at least half of its window is valid. Edges use
    half-sample symmetric reflection, which keeps the mean of a fully valid
    field unchanged.
    """
    side = int(round(cutoff / field.pixel_size))
    if side < 2:
        raise ParameterError(
            f"cutoff {cutoff} m is below two pixels of {field.pixel_size} m"
        )
    if side % 2 == 0:
        side += 1
    weight = ndimage.uniform_filter(field.mask.astype(np.float64), size=side, mode="reflect")
    total = ndimage.uniform_filter(field.filled(), size=side, mode="reflect")
    valid = weight >= 0.5 - 1e-12
    out = np.divide(total, weight, out=np.full_like(total, np.nan), where=valid)
    return Field2D(out, field.pixel_size, valid)
