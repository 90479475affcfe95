"""Synthetic fields with known roll/swell geometry, and a brute-force oracle.

Angles follow the lag-plane convention used everywhere in the package:
``theta = atan2(dy, dx)`` with ``x`` the column index and ``y`` the row index.

* ``Rolls.orientation`` is the roll *axis* (the direction along which the
  field is constant). The profile varies along ``orientation + pi/2``.
* ``Swell.orientation`` is the propagation direction: the field oscillates
  along it.

Noise is drawn from ``numpy.random.Generator(PCG64(seed))`` with
``standard_normal`` (ziggurat), one draw per pixel in row-major order.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field as dc_field
from typing import Union

import numpy as np

from .errors import ParameterError
from .grid import Field2D, overlap_slices
from .statmaps import LagGridSpec, StatMapSet

__all__ = [
    "Rolls",
    "Swell",
    "GaussianNoise",
    "SynthSpec",
    "generate",
    "roll_profile",
    "oracle_statmaps",
]


def _direction(theta: float) -> tuple[float, float]:
    # snap the cos(pi/2) residue so axis-aligned patterns are exactly 1-D
    c, s = math.cos(theta), math.sin(theta)
    return (0.0 if abs(c) < 1e-15 else c), (0.0 if abs(s) < 1e-15 else s)


@dataclass(frozen=True)
class Rolls:
    wavelength: float
    orientation: float = 0.0
    amplitude: float = 1.0
    rise_fraction: float = 0.5
    phase: float = 0.0
    profile: str = "triangle"

    def __post_init__(self):
        if not self.wavelength >= 4:
            raise ParameterError(f"roll wavelength must be >= 4 px, got {self.wavelength}")
        if not self.amplitude >= 0:
            raise ParameterError("roll amplitude must be non-negative")
        if not 0 < self.rise_fraction < 1:
            raise ParameterError(f"rise_fraction must be in (0, 1), got {self.rise_fraction}")
        if self.profile not in ("triangle", "sine"):
            raise ParameterError(f"unknown roll profile {self.profile!r}")

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        c, s = _direction(self.orientation + math.pi / 2)
        u = x * c + y * s
        phase = u / self.wavelength + self.phase / (2 * math.pi)
        if self.profile == "sine":
            return self.amplitude * np.sin(2 * math.pi * phase)
        return self.amplitude * roll_profile(phase, self.rise_fraction)


@dataclass(frozen=True)
class Swell:
    wavelength: float
    orientation: float = 0.0
    amplitude: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if not self.wavelength >= 4:
            raise ParameterError(f"swell wavelength must be >= 4 px, got {self.wavelength}")
        if not self.amplitude >= 0:
            raise ParameterError("swell amplitude must be non-negative")

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        c, s = _direction(self.orientation)
        u = x * c + y * s
        return self.amplitude * np.sin(2 * math.pi * u / self.wavelength + self.phase)


@dataclass(frozen=True)
class GaussianNoise:
    sigma: float

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ParameterError("noise sigma must be non-negative")


Component = Union[Rolls, Swell, GaussianNoise]
_KINDS = {"rolls": Rolls, "swell": Swell, "gaussian_noise": GaussianNoise}


@dataclass(frozen=True)
class SynthSpec:
    width: int
    height: int
    pixel_size: float = 1.0
    seed: int = 0
    components: tuple = dc_field(default_factory=tuple)
    offset: float = 0.0

    def __post_init__(self):
        if int(self.width) != self.width or int(self.height) != self.height:
            raise ParameterError("width and height must be integers")
        if self.width < 2 or self.height < 2:
            raise ParameterError("width and height must be at least 2")
        if not (math.isfinite(self.pixel_size) and self.pixel_size > 0):
            raise ParameterError("pixel_size must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must fit in 64 bits")
        if not math.isfinite(self.offset):
            raise ParameterError("offset must be finite")
        object.__setattr__(self, "components", tuple(self.components))
        for c in self.components:
            if not isinstance(c, (Rolls, Swell, GaussianNoise)):
                raise ParameterError(f"unsupported component {c!r}")

    @classmethod
    def from_dict(cls, d: dict) -> SynthSpec:
        """Build from the JSON layout used by ``sf2d synth --spec``.

        ``components`` is a list of objects with a ``"type"`` key among
        ``rolls``, ``swell`` and ``gaussian_noise``; other keys are the
        component fields.
        """
        d = dict(d)
        comps = []
        for c in d.pop("components", []):
            c = dict(c)
            kind = c.pop("type", None)
            if kind not in _KINDS:
                raise ParameterError(f"unknown component type {kind!r}")
            try:
                comps.append(_KINDS[kind](**c))
            except TypeError as exc:
                raise ParameterError(str(exc)) from None
        try:
            return cls(components=tuple(comps), **d)
        except TypeError as exc:
            raise ParameterError(str(exc)) from None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["components"] = []
        for c in self.components:
            kind = next(k for k, v in _KINDS.items() if isinstance(c, v))
            out["components"].append({"type": kind, **asdict(c)})
        return out

    @classmethod
    def from_json(cls, text: str) -> SynthSpec:
        return cls.from_dict(json.loads(text))


def roll_profile(phase, rise_fraction: float = 0.5):
    """Asymmetric triangular wave of unit amplitude and unit period.

    Rises linearly from -1 to +1 over the first ``rise_fraction`` of each
    period, then falls back to -1 over the remainder.
    """
    t = np.mod(phase, 1.0)
    rho = rise_fraction
    return np.where(t < rho, -1.0 + 2.0 * t / rho, 1.0 - 2.0 * (t - rho) / (1.0 - rho))


def generate(spec: SynthSpec) -> Field2D:
    """Render a :class:`SynthSpec` into an all-valid field."""
    y, x = np.mgrid[0 : spec.height, 0 : spec.width].astype(np.float64)
    values = np.full((spec.height, spec.width), float(spec.offset))
    rng = np.random.Generator(np.random.PCG64(int(spec.seed)))
    for comp in spec.components:
        if isinstance(comp, GaussianNoise):
            values += comp.sigma * rng.standard_normal((spec.height, spec.width))
        else:
            values += comp.evaluate(x, y)
    return Field2D(values, spec.pixel_size)


def oracle_statmaps(field: Field2D, spec: LagGridSpec, min_count: int = 2) -> StatMapSet:
    """Every lag evaluated independently by explicit enumeration of pairs.

    Each lag gathers its increments, then forms the mean and the central
    moments with two passes of :func:`math.fsum`. No half-plane mirroring
    and no raw-to-central conversion are used. Meant for small fields.
    """
    lags = [int(v) for v in spec.lags]
    n = len(lags)
    out = {k: np.full((n, n), np.nan) for k in ("s2", "s3", "s4", "skew", "flat", "mean")}
    counts = np.zeros((n, n), dtype=np.int64)
    vals = field.values
    mask = field.mask
    var = _oracle_variance(vals[mask])
    floor = 1e-12 * var
    for iy, ly in enumerate(lags):
        for ix, lx in enumerate(lags):
            base, shifted = overlap_slices(field.shape, (lx, ly))
            ok = mask[base] & mask[shifted]
            inc = (vals[shifted][ok] - vals[base][ok]).tolist()
            cnt = len(inc)
            counts[iy, ix] = cnt
            if cnt < min_count:
                continue
            mean = math.fsum(inc) / cnt
            dev = [v - mean for v in inc]
            m2 = math.fsum(v * v for v in dev) / cnt
            m3 = math.fsum(v * v * v for v in dev) / cnt
            m4 = math.fsum(v * v * v * v for v in dev) / cnt
            out["mean"][iy, ix] = mean
            out["s2"][iy, ix] = math.fsum(v * v for v in inc) / cnt
            out["s3"][iy, ix] = math.fsum(v * v * v for v in inc) / cnt
            out["s4"][iy, ix] = math.fsum(v * v * v * v for v in inc) / cnt
            if m2 > floor:
                out["skew"][iy, ix] = m3 / m2**1.5
                out["flat"][iy, ix] = m4 / (m2 * m2)
    return StatMapSet(
        spec=spec,
        pixel_size=field.pixel_size,
        counts=counts,
        field_variance=var,
        min_count=min_count,
        **out,
    )


def _oracle_variance(v: np.ndarray) -> float:
    vals = v.tolist()
    if not vals:
        return math.nan
    mean = math.fsum(vals) / len(vals)
    return math.fsum((x - mean) ** 2 for x in vals) / len(vals)
