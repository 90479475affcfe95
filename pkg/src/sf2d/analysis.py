"""One-call pipeline: statistics maps, polar views and roll/swell reports."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import NoEstimateError, ParameterError
from .features import (
    RollDirection,
    RollReport,
    SwellReport,
    classify_asymmetry,
    detect_swell,
    estimate_roll_direction,
    estimate_roll_size,
    plateau_value,
    summarize_flatness,
)
from .grid import Field2D, lowpass
from .polarview import PolarMap, transect
from .statmaps import STATISTICS, LagGridSpec, StatMapSet, compute_statmaps

__all__ = ["AnalysisConfig", "Analysis", "analyze"]

ANGLE_CONVENTION = (
    "theta = atan2(ly, lx) in radians; lx along image columns (left to right), "
    "ly along image rows (top to bottom)"
)


@dataclass(frozen=True)
class AnalysisConfig:
    max_lag: int = 60
    step: int = 1
    min_count: int = 1000
    engine: str = "fft"
    n_theta: int = 72
    n_r: int | None = None
    lowpass: float | None = None
    wind_dir: float | None = None
    swell_search: float | None = None
    workers: int | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return d


@dataclass(frozen=True, eq=False)
class Analysis:
    field: Field2D
    config: AnalysisConfig
    statmaps: StatMapSet
    polar: dict
    direction: RollDirection
    roll: RollReport
    swell: SwellReport | None

    def transects(self) -> dict:
        """Transects of every statistic along the parallel and both perpendicular directions."""
        angles = {
            "par": self.roll.theta_parallel,
            "perp_pos": self.roll.theta_perp_pos,
            "perp_neg": self.roll.theta_perp_neg,
        }
        return {
            (stat, name): transect(self.polar[stat], theta)
            for stat in STATISTICS
            for name, theta in angles.items()
        }


def _default_swell_search(size: float, polar: PolarMap) -> float:
    return min(0.5 * size, 1000.0, polar.r_max)


def analyze(field: Field2D, config: AnalysisConfig | None = None) -> Analysis:
    """Run the full roll analysis on one field.

    With ``config.lowpass`` set, maps and roll descriptors come from the
    filtered field while swell detection uses S2 of the unfiltered one: the
    filter exists to keep small-scale waves out of the roll estimates.
    """
    config = config or AnalysisConfig()
    spec = LagGridSpec(config.max_lag, config.step)
    raw = field
    if config.lowpass is not None:
        field = lowpass(field, config.lowpass)
    sm = compute_statmaps(
        field, spec, min_count=config.min_count, engine=config.engine, workers=config.workers
    )
    polar = {s: sm.polar(s, n_r=config.n_r, n_theta=config.n_theta) for s in STATISTICS}
    direction = estimate_roll_direction(polar["s2"])
    s2_perp = transect(polar["s2"], direction.theta_perp_pos)
    size = estimate_roll_size(s2_perp)

    try:
        asym = classify_asymmetry(polar["skew"], direction.theta_perp_pos, size.size)
    except (NoEstimateError, ParameterError):
        asym = None
    if asym is not None:
        perp_pos, perp_neg = asym.theta_perp_pos, asym.theta_perp_neg
        skew_block = {
            "value_at_perp_pos": asym.extremum,
            "value_at_perp_neg": -asym.extremum,
            "r_m": asym.extremum_r,
            "significant": asym.significant,
            "returns_to_zero": asym.returns_to_zero,
        }
    else:
        perp_pos, perp_neg = direction.theta_perp_pos, direction.theta_perp_neg
        skew_block = None

    flat = summarize_flatness(polar["flat"], direction.theta_parallel, perp_pos, size.size)

    search = config.swell_search
    if search is None:
        search = _default_swell_search(size.size, polar["s2"])
    swell = None
    if search < size.size:
        s2_swell = polar["s2"]
        if raw is not field:
            raw_sm = compute_statmaps(
                raw, spec, min_count=config.min_count, engine=config.engine, workers=config.workers
            )
            s2_swell = raw_sm.polar("s2", n_r=config.n_r, n_theta=config.n_theta)
        try:
            swell = detect_swell(s2_swell, search)
        except ParameterError:
            swell = None

    var = sm.field_variance
    plateau = plateau_value(s2_perp.values)
    roll = RollReport(
        theta_parallel=direction.theta_parallel,
        theta_perp_pos=perp_pos,
        theta_perp_neg=perp_neg,
        size=size.size,
        plateau_s2=plateau / var if var > 0 else math.nan,
        skew_extremum=skew_block,
        flat_profile_summary=asdict(flat),
        flags={
            "plateau_reached": size.plateau_reached,
            "prominence_found": size.plateau_reached,
            "low_anisotropy": direction.low_anisotropy,
            "asymmetry_significant": bool(asym.significant) if asym else False,
        },
        anisotropy=direction.anisotropy,
    )
    return Analysis(field, config, sm, polar, direction, roll, swell)
