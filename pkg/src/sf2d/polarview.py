"""Resampling of centered lag maps onto an (r, theta) grid, and transects.

``theta = 0`` points along ``+lx`` (grid columns) and angles grow toward
``+ly`` (grid rows), i.e. ``theta = atan2(ly, lx)``. Radii run over
``(0, K]`` in ``n_r`` uniform bins, so only the disc inscribed in the lag
square is sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoEstimateError, ParameterError

__all__ = ["PolarMap", "Transect", "to_polar", "transect", "polar_coordinates"]


@dataclass(frozen=True, eq=False)
class PolarMap:
    """A statistic on an ``(n_theta, n_r)`` grid; missing samples are NaN."""

    r_values: np.ndarray
    theta_values: np.ndarray
    data: np.ndarray
    statistic: str = "s2"

    @property
    def n_r(self) -> int:
        return len(self.r_values)

    @property
    def n_theta(self) -> int:
        return len(self.theta_values)

    @property
    def dtheta(self) -> float:
        return 2 * math.pi / self.n_theta

    @property
    def dr(self) -> float:
        return float(self.r_values[0])

    @property
    def r_max(self) -> float:
        return float(self.r_values[-1])

    def theta_index(self, theta: float) -> int:
        """Index of the grid angle nearest to ``theta`` (ties go to the lower index)."""
        t = math.fmod(theta, 2 * math.pi)
        if t < 0:
            t += 2 * math.pi
        pos = t / self.dtheta
        lo = math.floor(pos)
        idx = lo + 1 if pos - lo > 0.5 else lo
        return idx % self.n_theta

    def row(self, theta: float) -> np.ndarray:
        return self.data[self.theta_index(theta)]


@dataclass(frozen=True, eq=False)
class Transect:
    theta: float
    r_values: np.ndarray
    values: np.ndarray
    statistic: str = "s2"


def polar_coordinates(n_r: int, n_theta: int, max_lag: float):
    """Lag-plane sample positions ``(x, y)`` of shape ``(n_theta, n_r)``.

    The first quadrant (or half plane) is computed from cos/sin and the rest
    is generated by exact rotations, so a 90 degree rotation of the input
    map shifts the rows by exactly ``n_theta / 4``.
    """
    r = max_lag * np.arange(1, n_r + 1) / n_r
    base = n_theta // 4 if n_theta % 4 == 0 else n_theta // 2
    th = 2 * math.pi * np.arange(base) / n_theta
    x0 = np.cos(th)[:, None] * r[None, :]
    y0 = np.sin(th)[:, None] * r[None, :]
    xs, ys = [x0], [y0]
    if n_theta % 4 == 0:
        for _ in range(3):
            x_prev, y_prev = xs[-1], ys[-1]
            xs.append(-y_prev)
            ys.append(x_prev.copy())
    else:
        xs.append(-x0)
        ys.append(-y0)
    return r, np.concatenate(xs), np.concatenate(ys)


def _bilinear(grid: np.ndarray, gx: np.ndarray, gy: np.ndarray, center: int) -> np.ndarray:
    # gx, gy are offsets from the center cell, in cells
    # NaN border so out-of-range neighbours behave like missing cells
    padded = np.pad(grid, 1, constant_values=np.nan)
    ix0 = np.floor(gx).astype(np.int64)
    iy0 = np.floor(gy).astype(np.int64)
    fx = gx - ix0
    fy = gy - iy0
    num = np.zeros(gx.shape)
    den = np.zeros(gx.shape)
    for dy, wy in ((0, 1.0 - fy), (1, fy)):
        for dx, wx in ((0, 1.0 - fx), (1, fx)):
            iy = np.clip(iy0 + dy + center + 1, 0, padded.shape[0] - 1)
            ix = np.clip(ix0 + dx + center + 1, 0, padded.shape[1] - 1)
            v = padded[iy, ix]
            w = wx * wy
            ok = np.isfinite(v) & (w > 0)
            num += np.where(ok, w * np.where(ok, v, 0.0), 0.0)
            den += np.where(ok, w, 0.0)
    return np.divide(num, den, out=np.full(gx.shape, np.nan), where=den > 0)


def to_polar(
    grid: np.ndarray,
    n_r: int | None = None,
    n_theta: int = 72,
    *,
    step: int = 1,
    pixel_size: float = 1.0,
    statistic: str = "s2",
) -> PolarMap:
    """Bilinear resampling of a centered ``(2K/step+1)^2`` lag map.

    Missing neighbours are dropped and the remaining weights renormalized; a
    sample with no valid neighbour is NaN. ``n_r`` defaults to ``K / step``.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1] or grid.shape[0] % 2 == 0:
        raise ParameterError(f"expected an odd square lag map, got shape {grid.shape}")
    half = grid.shape[0] // 2
    if half < 1:
        raise ParameterError("lag map must extend at least one step from the center")
    max_lag = half * step
    if n_r is None:
        n_r = half
    if int(n_r) != n_r or n_r < 4:
        raise ParameterError(f"n_r must be an integer >= 4, got {n_r}")
    if int(n_theta) != n_theta or n_theta < 8 or n_theta % 2:
        raise ParameterError(f"n_theta must be an even integer >= 8, got {n_theta}")
    n_r, n_theta = int(n_r), int(n_theta)
    r, x, y = polar_coordinates(n_r, n_theta, max_lag)
    # sample the first quadrant (or half plane) of rotated copies of the map
    # with identical coordinates, so rotation and parity hold bit for bit
    base = n_theta // 4 if n_theta % 4 == 0 else n_theta // 2
    gx, gy = x[:base] / step, y[:base] / step
    if n_theta % 4 == 0:
        turns = [grid]
        for _ in range(3):
            turns.append(turns[-1][:, ::-1].T)
    else:
        turns = [grid, grid[::-1, ::-1]]
    data = np.concatenate([_bilinear(np.ascontiguousarray(g), gx, gy, half) for g in turns])
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    for a in (r, theta, data):
        a.setflags(write=False)
    return PolarMap(r * pixel_size, theta, data, statistic)


def transect(polar: PolarMap, theta: float) -> Transect:
    """The polar row at the grid angle nearest ``theta`` (taken mod 2 pi)."""
    if not math.isfinite(theta):
        raise ParameterError(f"theta must be finite, got {theta}")
    idx = polar.theta_index(theta)
    return Transect(float(polar.theta_values[idx]), polar.r_values, polar.data[idx], polar.statistic)


def require_values(values: np.ndarray, what: str = "transect"):
    if not np.any(np.isfinite(values)):
        raise NoEstimateError(f"{what} has no valid samples")
