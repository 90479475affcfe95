"""Structure-function, skewness and flatness maps over a centered lag grid.

For every lag ``l`` on the grid ``{-K..K} x {-K..K}`` the maps hold

* ``s2``, ``s3``, ``s4``: raw moments ``<(F(r+l) - F(r))**n>``,
* ``skew``: ``m3 / m2**1.5`` and ``flat``: ``m4 / m2**2`` from the central
  moments of the same increments,
* ``counts``: the number of valid pairs.

Two engines are provided. ``"direct"`` loops over lags and sums increments
explicitly. ``"fft"`` expands ``(F(r+l) - F(r))**n`` binomially and obtains
every cross term ``sum F(r+l)**a F(r)**b`` from one zero-padded spectral
correlation, which costs a handful of FFTs instead of ``O(K^2 W H)``.

Only the half plane ``ly > 0 or (ly == 0 and lx >= 0)`` is evaluated; the
other half is filled from ``l -> -l``, which swaps the endpoints of each pair
(even statistics are copied, odd ones negated).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.fft

from .errors import LagRangeError, ParameterError
from .grid import Field2D, _moments_from_arrays

__all__ = [
    "LagGridSpec",
    "StatMapSet",
    "RawMoments",
    "compute_statmaps",
    "fft_cross_moments",
    "skew_flat_from_raw",
    "STATISTICS",
    "ODD_STATISTICS",
]

STATISTICS = ("s2", "s3", "s4", "skew", "flat")
ODD_STATISTICS = frozenset({"s3", "skew", "mean"})

DEFAULT_MAX_LAG = 60
DEFAULT_MIN_COUNT = 1000
DEGENERACY_FLOOR = 1e-12
DEFAULT_REFINE_TOL = 5e-13


@dataclass(frozen=True)
class LagGridSpec:
    """Centered square lag grid ``{-K..K}^2`` sampled every ``step`` pixels."""

    max_lag: int = DEFAULT_MAX_LAG
    step: int = 1

    def __post_init__(self):
        if int(self.max_lag) != self.max_lag or self.max_lag < 1:
            raise ParameterError(f"max_lag must be a positive integer, got {self.max_lag}")
        if int(self.step) != self.step or self.step < 1:
            raise ParameterError(f"step must be a positive integer, got {self.step}")
        if self.max_lag % self.step:
            raise ParameterError(
                f"max_lag {self.max_lag} is not a multiple of step {self.step}"
            )

    @property
    def lags(self) -> np.ndarray:
        """1D lag values along either axis, in pixels."""
        return np.arange(-self.max_lag, self.max_lag + 1, self.step)

    @property
    def size(self) -> int:
        return 2 * (self.max_lag // self.step) + 1

    @property
    def center(self) -> int:
        return self.max_lag // self.step


@dataclass(frozen=True, eq=False)
class StatMapSet:
    """Per-lag statistics. Grids are indexed ``[iy, ix]`` with lag
    ``(lags[ix], lags[iy])``; missing cells are NaN."""

    spec: LagGridSpec
    pixel_size: float
    s2: np.ndarray
    s3: np.ndarray
    s4: np.ndarray
    skew: np.ndarray
    flat: np.ndarray
    counts: np.ndarray
    mean: np.ndarray
    field_variance: float
    min_count: int

    def __post_init__(self):
        for name in ("s2", "s3", "s4", "skew", "flat", "counts", "mean"):
            getattr(self, name).setflags(write=False)

    def get(self, statistic: str) -> np.ndarray:
        if statistic not in STATISTICS + ("counts", "mean"):
            raise ParameterError(f"unknown statistic {statistic!r}")
        return getattr(self, statistic)

    def at(self, statistic: str, lx: int, ly: int) -> float:
        """Value of a statistic at the lag ``(lx, ly)`` in pixels."""
        c, st = self.spec.center, self.spec.step
        if lx % st or ly % st or abs(lx) > self.spec.max_lag or abs(ly) > self.spec.max_lag:
            raise LagRangeError(f"lag ({lx}, {ly}) is not on the lag grid")
        return float(self.get(statistic)[c + ly // st, c + lx // st])

    def polar(self, statistic: str, n_r: int | None = None, n_theta: int = 72):
        from .polarview import to_polar

        return to_polar(
            self.get(statistic),
            n_r=n_r,
            n_theta=n_theta,
            step=self.spec.step,
            pixel_size=self.pixel_size,
            statistic=statistic,
        )


class RawMoments(NamedTuple):
    mean: np.ndarray
    m2: np.ndarray
    m3: np.ndarray
    m4: np.ndarray
    skew: np.ndarray
    flat: np.ndarray


def skew_flat_from_raw(count, sums, floor: float = 0.0) -> RawMoments:
    """Central moments, skewness and flatness from raw power sums.

    Parameters
    ----------
    count : int or array
        Number of increments.
    sums : sequence
        ``(sum d, sum d**2, sum d**3, sum d**4)``, or five entries starting
        with ``sum d**0``. Scalars or arrays broadcasting with ``count``.
    floor : float
        Skewness and flatness are NaN where ``m2 <= floor``.

    Entries with ``count < 2`` are NaN throughout.
    """
    sums = list(sums)
    if len(sums) == 5:
        sums = sums[1:]
    if len(sums) != 4:
        raise ParameterError("expected raw sums for powers 1..4 (optionally 0..4)")
    n = np.asarray(count, dtype=np.float64)
    ok = n >= 2
    safe_n = np.where(ok, n, 1.0)
    e1, e2, e3, e4 = (np.asarray(s, dtype=np.float64) / safe_n for s in sums)
    mu = e1
    mu2 = mu * mu
    m2 = e2 - mu2
    m3 = e3 - 3.0 * mu * e2 + 2.0 * mu2 * mu
    m4 = e4 - 4.0 * mu * e3 + 6.0 * mu2 * e2 - 3.0 * mu2 * mu2
    m2 = np.maximum(m2, 0.0)
    m4 = np.maximum(m4, 0.0)
    defined = ok & (m2 > floor)
    m2_safe = np.where(defined, m2, 1.0)
    skew = np.where(defined, m3 / m2_safe**1.5, np.nan)
    flat = np.where(defined, m4 / (m2_safe * m2_safe), np.nan)
    nan_if_bad = lambda a: np.where(ok, a, np.nan)  # noqa: E731
    out = RawMoments(nan_if_bad(mu), nan_if_bad(m2), nan_if_bad(m3), nan_if_bad(m4), skew, flat)
    if np.ndim(count) == 0 and all(np.ndim(s) == 0 for s in sums):
        return RawMoments(*(float(a) for a in out))
    return out


# ---------------------------------------------------------------------------
# FFT engine


class _Correlator:
    """Cross-correlations of masked power fields sharing one padded FFT size."""

    def __init__(self, values: np.ndarray, mask: np.ndarray, max_lag: int, workers=None):
        h, w = values.shape
        self.shape = (scipy.fft.next_fast_len(h + max_lag, real=True),
                      scipy.fft.next_fast_len(w + max_lag, real=True))
        self.max_lag = max_lag
        self.workers = workers
        self._mask = mask.astype(np.float64)
        self._values = np.where(mask, values, 0.0)
        self._spectra: dict[int, np.ndarray] = {}
        k = np.arange(-max_lag, max_lag + 1)
        self._iy = k % self.shape[0]
        self._ix = k % self.shape[1]

    def spectrum(self, power: int) -> np.ndarray:
        if power not in self._spectra:
            x = self._mask if power == 0 else self._mask * self._values**power
            self._spectra[power] = scipy.fft.rfft2(x, s=self.shape, workers=self.workers)
        return self._spectra[power]

    def correlate(self, a: int, b: int) -> np.ndarray:
        # irfft2(A * conj(B))[l] = sum_r A(r + l) B(r)
        prod = self.spectrum(a) * np.conj(self.spectrum(b))
        full = scipy.fft.irfft2(prod, s=self.shape, workers=self.workers)
        return full[np.ix_(self._iy, self._ix)]


def _check_power(p):
    if int(p) != p or not 0 <= p <= 4:
        raise ParameterError(f"powers must be integers in 0..4, got {p}")


def fft_cross_moments(field: Field2D, max_lag: int, powers: tuple[int, int], workers=None):
    """Sum of ``F(r+l)**a * F(r)**b`` over valid-overlap pairs, for every lag.

    Returns ``(sums, counts)``, both of shape ``(2K+1, 2K+1)`` indexed
    ``[ly + K, lx + K]``. ``counts`` is rounded to integers.
    """
    a, b = powers
    _check_power(a)
    _check_power(b)
    if a + b > 4:
        raise ParameterError(f"a + b must not exceed 4, got {a} + {b}")
    _check_max_lag(field, max_lag)
    corr = _Correlator(field.filled(), field.mask, max_lag, workers)
    counts = np.rint(corr.correlate(0, 0)).astype(np.int64)
    sums = np.where(counts > 0, corr.correlate(a, b), 0.0)
    if a == 0 and b == 0:
        sums = counts.astype(np.float64)
    return sums, counts


def _binomial_raw_sums(corr: _Correlator) -> list[np.ndarray]:
    """Raw sums of increment powers 1..4 from cross-correlations."""
    out = []
    for n in range(1, 5):
        total = 0.0
        for j in range(n + 1):
            # term C(n, j) * F(r+l)^j * (-F(r))^(n-j)
            coef = math.comb(n, j) * (-1) ** (n - j)
            total = total + coef * corr.correlate(j, n - j)
        out.append(total)
    return out


def _check_max_lag(field: Field2D, max_lag: int):
    if max_lag >= min(field.width, field.height):
        raise LagRangeError(
            f"max_lag {max_lag} must be smaller than the field size {field.width}x{field.height}"
        )


# ---------------------------------------------------------------------------
# engines returning per-lag arrays on the full (2K+1)^2 unit-step grid


def _half_plane(lags_y: np.ndarray, lags_x: np.ndarray) -> np.ndarray:
    ly = lags_y[:, None]
    lx = lags_x[None, :]
    return (ly > 0) | ((ly == 0) & (lx >= 0))


def _fft_engine(field: Field2D, spec: LagGridSpec, workers=None) -> dict[str, np.ndarray]:
    mu, var = field.valid_mean_var()
    scale = math.sqrt(var) if var > 0 else 1.0
    # standardizing first keeps the binomial cancellation well conditioned
    g = (field.filled(mu) - mu) / scale
    corr = _Correlator(g, field.mask, spec.max_lag, workers)
    sel = np.arange(0, 2 * spec.max_lag + 1, spec.step)
    pick = np.ix_(sel, sel)
    counts = np.rint(corr.correlate(0, 0))[pick]
    raw = [s[pick] for s in _binomial_raw_sums(corr)]
    safe = np.where(counts > 0, counts, 1.0)
    out = {"counts": counts}
    for n, (s, p) in enumerate(zip(raw, (1.0, 2.0, 3.0, 4.0)), start=1):
        out[f"e{n}"] = s / safe * scale**p
    out["raw"] = [s * scale ** (n + 1) for n, s in enumerate(raw)]
    out["err"] = [b / safe * scale**n for n, b in enumerate(_rounding_bounds(g, field.mask, corr), start=1)]
    return out


def _rounding_bounds(g: np.ndarray, mask: np.ndarray, corr: _Correlator) -> list[float]:
    """Bounds on the FFT rounding error of the raw increment sums of order 1..4.

    A correlation computed through FFTs of length ``P`` is off by at most
    about ``eps log2(P) |A| |B|`` (2-norms), element by element.
    """
    eps = np.finfo(np.float64).eps
    depth = math.log2(corr.shape[0] * corr.shape[1])
    m = mask.astype(np.float64)
    norms = [math.sqrt(math.fsum((m * g ** (2 * p)).ravel())) for p in range(5)]
    return [
        depth * eps * sum(math.comb(n, j) * norms[j] * norms[n - j] for j in range(n + 1))
        for n in range(1, 5)
    ]


def _needs_refinement(e, err, tol: float) -> np.ndarray:
    """Lags whose FFT statistics may be off by more than ``tol``.

    ``tol`` is absolute for skewness and flatness and relative for s2 and
    s4. Errors in the raw moments ``e`` are propagated to first order.
    """
    e1, e2, e3, e4 = e
    d1, d2, d3, d4 = err
    mu = np.abs(e1)
    with np.errstate(divide="ignore", invalid="ignore"):
        m2 = e2 - e1 * e1
        m3 = e3 - 3 * e1 * e2 + 2 * e1**3
        m4 = e4 - 4 * e1 * e3 + 6 * e1**2 * e2 - 3 * e1**4
        dm2 = d2 + 2 * mu * d1
        dm3 = d3 + 3 * mu * d2 + (3 * np.abs(e2) + 6 * mu**2) * d1
        dm4 = d4 + 4 * mu * d3 + 6 * mu**2 * d2 + (4 * np.abs(e3) + 12 * mu * np.abs(e2) + 12 * mu**3) * d1
        # a second moment not clearly above its own error is ill conditioned
        shaky = ~(m2 > 2 * dm2)
        skew_err = dm3 / m2**1.5 + 1.5 * np.abs(m3) * dm2 / m2**2.5
        flat_err = dm4 / m2**2 + 2 * np.abs(m4) * dm2 / m2**3
        bad = shaky | ~(skew_err <= tol) | ~(flat_err <= tol)
        bad |= ~(d2 <= tol * np.abs(e2)) | ~(d4 <= tol * np.abs(e4))
    return bad


def _direct_engine(field: Field2D, spec: LagGridSpec) -> dict[str, np.ndarray]:
    size = spec.size
    lags = spec.lags
    half = _half_plane(lags, lags)
    filled = field.filled()
    names = ("count", "mean", "m2", "m3", "m4", "s2", "s3", "s4")
    grids = {k: np.full((size, size), np.nan) for k in names}
    for iy in range(size):
        for ix in range(size):
            if not half[iy, ix]:
                continue
            ms = _moments_from_arrays(filled, field.mask, (int(lags[ix]), int(lags[iy])))
            for k, v in zip(names, ms):
                grids[k][iy, ix] = v
    return grids


def _mirror(grid: np.ndarray, half: np.ndarray, odd: bool) -> np.ndarray:
    flipped = grid[::-1, ::-1]
    return np.where(half, grid, -flipped if odd else flipped)


def compute_statmaps(
    field: Field2D,
    spec: LagGridSpec | None = None,
    min_count: int = DEFAULT_MIN_COUNT,
    engine: str = "fft",
    workers: int | None = None,
    refine_tol: float | None = DEFAULT_REFINE_TOL,
) -> StatMapSet:
    """Structure functions of orders 2-4, skewness and flatness for all lags.

    Parameters
    ----------
    field : Field2D
    spec : LagGridSpec, optional
        Defaults to ``K = 60`` pixels, step 1.
    min_count : int
        Lags with fewer valid pairs are NaN in every map.
    engine : {"fft", "direct"}
    workers : int, optional
        Thread count handed to :mod:`scipy.fft`. Results do not depend on it.
    refine_tol : float or None
        FFT engine only. Lags whose rounding-error bound exceeds this
        (absolute for skewness and flatness, relative for s2 and s4) are
        recomputed by direct summation. ``None`` keeps the pure FFT result.

    Notes
    -----
    Skewness and flatness are NaN where the central second moment is at or
    below ``1e-12`` times the field variance, which always includes the zero
    lag.
    """
    spec = spec or LagGridSpec()
    if engine not in ("fft", "direct"):
        raise ParameterError(f"unknown engine {engine!r}; use 'fft' or 'direct'")
    if int(min_count) != min_count or min_count < 2:
        raise ParameterError(f"min_count must be an integer >= 2, got {min_count}")
    _check_max_lag(field, spec.max_lag)

    _, var = field.valid_mean_var()
    floor = DEGENERACY_FLOOR * var if math.isfinite(var) else 0.0
    lags = spec.lags
    half = _half_plane(lags, lags)

    if engine == "fft":
        res = _fft_engine(field, spec, workers)
        counts = res["counts"]
        mom = skew_flat_from_raw(counts, res["raw"], floor=floor)
        s2, s3, s4 = (np.where(counts >= 2, res[f"e{n}"], np.nan) for n in (2, 3, 4))
        mean, skew, flat = mom.mean, mom.skew, mom.flat
        s2 = np.maximum(s2, 0.0)
        s4 = np.maximum(s4, 0.0)
        if refine_tol is not None:
            e = [res[f"e{n}"] for n in range(1, 5)]
            redo = half & (counts >= min_count) & _needs_refinement(e, res["err"], refine_tol)
            filled = field.filled()
            for iy, ix in zip(*np.nonzero(redo)):
                ms = _moments_from_arrays(filled, field.mask, (int(lags[ix]), int(lags[iy])))
                s2[iy, ix], s3[iy, ix], s4[iy, ix], mean[iy, ix] = ms.s2, ms.s3, ms.s4, ms.mean
                ok = ms.m2 > floor
                skew[iy, ix] = ms.m3 / ms.m2**1.5 if ok else np.nan
                flat[iy, ix] = ms.m4 / ms.m2**2 if ok else np.nan
    else:
        res = _direct_engine(field, spec)
        counts = res["count"]
        m2 = res["m2"]
        defined = (counts >= 2) & (m2 > floor)
        m2_safe = np.where(defined, m2, 1.0)
        skew = np.where(defined, res["m3"] / m2_safe**1.5, np.nan)
        flat = np.where(defined, res["m4"] / (m2_safe * m2_safe), np.nan)
        s2, s3, s4, mean = res["s2"], res["s3"], res["s4"], res["mean"]

    counts = _mirror(counts, half, odd=False)
    maps = {
        "s2": _mirror(s2, half, False),
        "s3": _mirror(s3, half, True),
        "s4": _mirror(s4, half, False),
        "skew": _mirror(skew, half, True),
        "flat": _mirror(flat, half, False),
        "mean": _mirror(mean, half, True),
    }
    c = spec.center
    for k in ("s2", "s3", "s4", "mean"):
        maps[k][c, c] = 0.0 if counts[c, c] >= 1 else np.nan
    maps["skew"][c, c] = np.nan
    maps["flat"][c, c] = np.nan
    sparse = counts < min_count
    for k in maps:
        maps[k][sparse] = np.nan
    return StatMapSet(
        spec=spec,
        pixel_size=field.pixel_size,
        counts=counts.astype(np.int64),
        field_variance=var,
        min_count=int(min_count),
        **maps,
    )
