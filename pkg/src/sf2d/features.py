"""Roll direction, size, asymmetry, flatness and swell descriptors.

All inputs are :class:`~sf2d.polarview.PolarMap` objects built from a
:class:`~sf2d.statmaps.StatMapSet`; radii are in meters and angles follow the
lag-plane convention ``theta = atan2(ly, lx)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np
from scipy.signal import find_peaks

from .errors import NoEstimateError, ParameterError
from .polarview import PolarMap, Transect, require_values, transect

__all__ = [
    "RollDirection",
    "RollSize",
    "Asymmetry",
    "FlatnessProfile",
    "FlatnessSummary",
    "RollReport",
    "SwellReport",
    "estimate_roll_direction",
    "estimate_roll_size",
    "classify_asymmetry",
    "summarize_flatness",
    "detect_swell",
    "plateau_value",
]

TWO_PI = 2 * math.pi


def _wrap(theta: float, period: float = TWO_PI) -> float:
    t = math.fmod(theta, period)
    return t + period if t < 0 else t


def plateau_value(values: np.ndarray, fraction: float = 0.2) -> float:
    """Median over the outermost ``fraction`` of radial bins (NaN ignored)."""
    n = len(values)
    top = max(1, int(math.ceil(fraction * n)))
    tail = values[n - top :]
    tail = tail[np.isfinite(tail)]
    return float(np.median(tail)) if tail.size else math.nan


@dataclass(frozen=True)
class RollDirection:
    theta_parallel: float
    theta_perp_pos: float
    theta_perp_neg: float
    anisotropy: float
    low_anisotropy: bool
    scores: tuple = dc_field(repr=False, default=())


def estimate_roll_direction(
    s2_polar: PolarMap,
    method: str = "integral",
    anisotropy_threshold: float = 0.05,
) -> RollDirection:
    """Direction of the roll axis from a polar S2 map.

    ``method="integral"`` (default) picks the angle in ``[0, pi)`` where S2,
    averaged over all radii, is smallest: the direction of the longest
    integral correlation scale. A constant nugget (white noise) shifts every
    direction equally and does not bias the choice.

    ``method="half_plateau"`` picks the angle maximizing the smallest radius
    at which S2 reaches half of its own plateau (median of the outer 20% of
    radii). It is kept for comparison; it breaks down when S2 is nearly zero
    along the exact roll axis.

    Ties go to the smallest angle. When the relative spread of the scores is
    below ``anisotropy_threshold`` the map is treated as isotropic and
    ``theta_parallel`` is 0.

    The two perpendicular directions are returned as ``theta_parallel + pi/2``
    and ``+ 3 pi/2``; :func:`classify_asymmetry` relabels them by skewness sign.
    """
    if s2_polar.n_theta < 8:
        raise ParameterError("need at least 8 angles")
    half = s2_polar.n_theta // 2
    rows = s2_polar.data[:half]
    require_values(rows, "s2 polar map")
    if method == "integral":
        with np.errstate(all="ignore"):
            counts = np.isfinite(rows).sum(axis=1)
            scores = np.where(counts > 0, np.nansum(rows, axis=1) / np.maximum(counts, 1), np.nan)
        finite = np.isfinite(scores)
        best = int(np.nanargmin(np.where(finite, scores, np.inf)))
        hi, lo = np.nanmax(scores), np.nanmin(scores)
        anisotropy = float((hi - lo) / hi) if hi > 0 else 0.0
    elif method == "half_plateau":
        r = s2_polar.r_values
        scores = np.full(half, np.nan)
        for j, row in enumerate(rows):
            plateau = plateau_value(row)
            if not math.isfinite(plateau):
                continue
            hit = np.nonzero(row >= 0.5 * plateau)[0]
            scores[j] = r[hit[0]] if hit.size else r[-1]
        best = int(np.nanargmax(np.where(np.isfinite(scores), scores, -np.inf)))
        hi, lo = np.nanmax(scores), np.nanmin(scores)
        anisotropy = float((hi - lo) / hi) if hi > 0 else 0.0
    else:
        raise ParameterError(f"unknown method {method!r}")
    low = anisotropy < anisotropy_threshold
    theta_par = 0.0 if low else float(s2_polar.theta_values[best])
    return RollDirection(
        theta_parallel=theta_par,
        theta_perp_pos=_wrap(theta_par + math.pi / 2),
        theta_perp_neg=_wrap(theta_par + 3 * math.pi / 2),
        anisotropy=anisotropy,
        low_anisotropy=bool(low),
        scores=tuple(float(s) for s in scores),
    )


@dataclass(frozen=True)
class RollSize:
    size: float
    plateau_reached: bool
    index: int


def _finite_part(tr: Transect):
    ok = np.isfinite(tr.values)
    return np.nonzero(ok)[0], tr.values[ok]


def estimate_roll_size(s2_transect: Transect, prominence: float = 0.05) -> RollSize:
    """Radius of the first prominent local maximum of S2 across the rolls.

    A maximum counts when its prominence is at least ``prominence`` times the
    range of the transect. Without one, the global maximum is returned and
    ``plateau_reached`` is False.
    """
    if len(s2_transect.values) < 8:
        raise ParameterError("transect needs at least 8 radial bins")
    require_values(s2_transect.values, "s2 transect")
    idx, v = _finite_part(s2_transect)
    span = float(v.max() - v.min())
    if span > 0:
        peaks, _ = find_peaks(v, prominence=prominence * span)
    else:
        peaks = np.array([], dtype=int)
    if peaks.size:
        i = int(idx[peaks[0]])
        return RollSize(float(s2_transect.r_values[i]), True, i)
    i = int(idx[int(np.argmax(v))])
    return RollSize(float(s2_transect.r_values[i]), False, i)


@dataclass(frozen=True)
class Asymmetry:
    theta_perp_pos: float
    theta_perp_neg: float
    extremum: float
    extremum_r: float
    significant: bool
    returns_to_zero: bool | None


def classify_asymmetry(
    skew_polar: PolarMap,
    theta_perp: float,
    roll_size: float,
    significance: float = 0.1,
    zero_factor: float = 0.25,
) -> Asymmetry:
    """Skewness of the increments across the rolls, below the roll scale.

    Looks at the skewness transect along ``theta_perp`` for ``r < roll_size``
    and keeps the sample of largest magnitude. The perpendicular direction
    carrying positive skewness becomes ``theta_perp_pos``; ``extremum`` is
    reported along that direction, so it is never negative.

    ``returns_to_zero`` is True when the median of ``|skew|`` over
    ``[roll_size, 1.5 roll_size]`` is below ``zero_factor * |extremum|``,
    and None when no sample falls in that window.
    """
    tr = transect(skew_polar, theta_perp)
    require_values(tr.values, "skew transect")
    r = tr.r_values
    if not r[0] <= roll_size <= r[-1] + 0.5 * skew_polar.dr:
        raise ParameterError(f"roll size {roll_size} m lies outside the transect")
    below = (r < roll_size) & np.isfinite(tr.values)
    if not below.any():
        raise NoEstimateError("no valid skewness below the roll size")
    vals = np.where(below, np.abs(tr.values), -np.inf)
    k = int(np.argmax(vals))
    ext = float(tr.values[k])
    if ext >= 0:
        pos, neg = tr.theta, _wrap(tr.theta + math.pi)
    else:
        pos, neg = _wrap(tr.theta + math.pi), tr.theta
    window = (r >= roll_size) & (r <= 1.5 * roll_size) & np.isfinite(tr.values)
    if window.any():
        back = bool(np.median(np.abs(tr.values[window])) < zero_factor * abs(ext))
    else:
        back = None
    return Asymmetry(
        theta_perp_pos=float(pos),
        theta_perp_neg=float(neg),
        extremum=abs(ext),
        extremum_r=float(r[k]),
        significant=abs(ext) >= significance,
        returns_to_zero=back,
    )


@dataclass(frozen=True)
class FlatnessProfile:
    """``flat / 3`` statistics along one direction."""

    theta: float
    minimum: float
    r_minimum: float
    maximum: float
    median: float
    small_r: float
    plateau: float
    spread: float


@dataclass(frozen=True)
class FlatnessSummary:
    parallel: FlatnessProfile
    perp: FlatnessProfile
    intermittency: float
    min_below_roll_size: bool


def _flat_profile(tr: Transect) -> FlatnessProfile:
    v = tr.values / 3.0
    ok = np.isfinite(v)
    if not ok.any():
        nan = math.nan
        return FlatnessProfile(tr.theta, nan, nan, nan, nan, nan, nan, nan)
    k = int(np.nanargmin(v))
    return FlatnessProfile(
        theta=tr.theta,
        minimum=float(v[k]),
        r_minimum=float(tr.r_values[k]),
        maximum=float(np.nanmax(v)),
        median=float(np.nanmedian(v)),
        small_r=float(v[ok][0]),
        plateau=plateau_value(v),
        spread=float(np.nanmax(v) - np.nanmin(v)),
    )


def summarize_flatness(
    flat_polar: PolarMap, theta_parallel: float, theta_perp: float, roll_size: float
) -> FlatnessSummary:
    """Flatness (in Gaussian units, ``flat / 3``) along and across the rolls.

    ``intermittency`` is the outer plateau minus the minimum across the rolls;
    it is near 0 for Gaussian increments at every scale.
    """
    par = _flat_profile(transect(flat_polar, theta_parallel))
    perp = _flat_profile(transect(flat_polar, theta_perp))
    return FlatnessSummary(
        parallel=par,
        perp=perp,
        intermittency=perp.plateau - perp.minimum,
        min_below_roll_size=bool(perp.r_minimum < roll_size),
    )


@dataclass(frozen=True)
class SwellReport:
    present: bool
    theta_swell: float
    r_first_max: float
    r_first_min: float
    oscillation_amplitude: float
    r_search_max: float


def _first_oscillation(values: np.ndarray):
    """Index of the first local max and the next local min, or None."""
    ok = np.isfinite(values)
    if ok.sum() < 3:
        return None
    idx = np.nonzero(ok)[0]
    v = values[ok]
    peaks, _ = find_peaks(v)
    if not peaks.size:
        return None
    p = peaks[0]
    troughs, _ = find_peaks(-v[p:])
    if not troughs.size:
        return None
    return int(idx[p]), int(idx[p + troughs[0]])


def _refine_peak(values: np.ndarray, i: int) -> float:
    # parabolic vertex through three samples, in bin units
    if i <= 0 or i >= len(values) - 1:
        return float(i)
    a, b, c = values[i - 1], values[i], values[i + 1]
    den = a - 2 * b + c
    if not np.isfinite(den) or den >= 0:
        return float(i)
    return i + 0.5 * (a - c) / den


def detect_swell(
    s2_polar: PolarMap,
    r_search_max: float,
    min_amplitude: float = 0.05,
) -> SwellReport:
    """Small-scale oscillation of S2 left by a swell.

    For each angle in ``[0, pi)`` the S2 transect is cut at ``r_search_max``;
    the first local maximum and the following local minimum give an
    oscillation amplitude, normalized by the largest outer S2 plateau over
    all angles.

    A plane wave puts the first S2 maximum at ``L / (2 |cos(theta -
    theta_swell)|)``, so ``1 / r_max**2`` is linear in ``cos 2 theta`` and
    ``sin 2 theta``. The swell direction is read off a least-squares fit of
    that relation over the angles with a clear oscillation (amplitude at
    least half the best one); with fewer than three such angles the angle of
    largest amplitude is used. ``r_first_max`` and ``r_first_min`` come from
    the grid angle nearest to the swell direction.
    """
    r = s2_polar.r_values
    n_bins = int(np.sum(r <= r_search_max * (1 + 1e-12)))
    if n_bins < 3:
        raise ParameterError(
            f"r_search_max {r_search_max} m covers fewer than 3 radial bins"
        )
    half = s2_polar.n_theta // 2
    require_values(s2_polar.data, "s2 polar map")
    plateaus = [plateau_value(row) for row in s2_polar.data[:half]]
    scale = np.nanmax(plateaus) if np.any(np.isfinite(plateaus)) else math.nan
    amps = np.zeros(half)
    found = {}
    for j in range(half):
        row = s2_polar.data[j]
        osc = _first_oscillation(row[:n_bins])
        if osc is None or not scale > 0:
            continue
        imax, imin = osc
        amps[j] = (row[imax] - row[imin]) / scale
        found[j] = (imax, imin)
    best = int(np.argmax(amps))
    amp = float(amps[best])
    nan = math.nan
    if amp < min_amplitude:
        return SwellReport(False, nan, nan, nan, amp, float(r_search_max))

    strong = [j for j in found if amps[j] >= 0.5 * amp]
    theta = s2_polar.theta_values[:half]
    if len(strong) >= 3:
        j = np.array(strong)
        rho2 = np.array(
            [1.0 / ((_refine_peak(s2_polar.data[k][:n_bins], found[k][0]) + 1) ** 2) for k in strong]
        )
        design = np.column_stack([np.ones(len(j)), np.cos(2 * theta[j]), np.sin(2 * theta[j])])
        coef, *_ = np.linalg.lstsq(design, rho2, rcond=None)
        theta_sw = _wrap(0.5 * math.atan2(coef[2], coef[1]), math.pi)
    else:
        theta_sw = float(theta[best])
    k = s2_polar.theta_index(theta_sw) % half
    if k not in found:
        k = best
    imax, imin = found[k]
    return SwellReport(
        present=True,
        theta_swell=float(theta_sw),
        r_first_max=float(r[imax]),
        r_first_min=float(r[imin]),
        oscillation_amplitude=float(amps[k]),
        r_search_max=float(r_search_max),
    )


@dataclass(frozen=True)
class RollReport:
    theta_parallel: float
    theta_perp_pos: float
    theta_perp_neg: float
    size: float
    plateau_s2: float
    skew_extremum: dict
    flat_profile_summary: dict
    flags: dict
    anisotropy: float

    def to_dict(self) -> dict:
        return asdict(self)
