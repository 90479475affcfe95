"""Raw float32 rasters with JSON sidecars, transect CSVs, reports and PNG heatmaps.

A raster ``name.f32`` holds little-endian IEEE-754 float32 samples, row-major
with the top-left pixel first. Its header ``name.json`` carries ``width``,
``height``, ``pixel_size_m``, ``dtype`` (``"f32"``), ``order``
(``"row-major"``) and optionally ``nodata``. Map files add ``kind``
(``"cartesian"`` or ``"polar"``), ``statistic`` and the lag or polar grid
description. Missing cells are written as ``nodata``.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .grid import Field2D
from .polarview import PolarMap, Transect
from .statmaps import ODD_STATISTICS, StatMapSet

__all__ = [
    "FormatError",
    "NODATA",
    "sidecar_path",
    "write_field",
    "read_field",
    "write_map",
    "write_statmap",
    "write_polar",
    "read_map",
    "write_transect",
    "write_json",
    "file_sha256",
    "render_map",
]

# float32 lowest finite value
NODATA = float(np.finfo(np.float32).min)
_DTYPE = np.dtype("<f4")


class FormatError(ParameterError):
    """A raster or header is malformed or inconsistent."""


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def write_json(path, obj) -> None:
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _write_raster(path, data: np.ndarray, valid: np.ndarray, header: dict) -> None:
    path = Path(path)
    out = np.where(valid, data, NODATA).astype(_DTYPE)
    header = dict(header)
    header.update(
        width=int(data.shape[1]),
        height=int(data.shape[0]),
        dtype="f32",
        order="row-major",
    )
    if not valid.all():
        header["nodata"] = NODATA
    path.write_bytes(out.tobytes())
    write_json(sidecar_path(path), header)


def _read_raster(path) -> tuple[np.ndarray, np.ndarray, dict]:
    path = Path(path)
    head_path = sidecar_path(path)
    try:
        header = json.loads(head_path.read_text())
    except FileNotFoundError:
        raise
    except (ValueError, OSError) as exc:
        raise FormatError(f"unreadable header {head_path}: {exc}") from None
    try:
        w, h = int(header["width"]), int(header["height"])
    except (KeyError, TypeError, ValueError):
        raise FormatError(f"{head_path}: width/height missing or invalid") from None
    if header.get("dtype", "f32") != "f32" or header.get("order", "row-major") != "row-major":
        raise FormatError(f"{head_path}: only f32 row-major rasters are supported")
    payload = path.read_bytes()
    if w < 1 or h < 1 or len(payload) != w * h * 4:
        raise FormatError(
            f"{path}: payload has {len(payload)} bytes, header expects {w}x{h}x4"
        )
    data = np.frombuffer(payload, dtype=_DTYPE).reshape(h, w).astype(np.float64)
    valid = np.isfinite(data)
    nodata = header.get("nodata")
    if nodata is not None:
        valid &= data != np.float32(nodata)
    return data, valid, header


def write_field(path, field: Field2D) -> None:
    """Write a field as float32; valid samples are rounded to float32."""
    _write_raster(path, field.filled(), field.mask, {"pixel_size_m": field.pixel_size})


def read_field(path) -> Field2D:
    data, valid, header = _read_raster(path)
    try:
        pixel_size = float(header["pixel_size_m"])
    except (KeyError, TypeError, ValueError):
        raise FormatError("header lacks a numeric pixel_size_m") from None
    if data.shape[0] < 2 or data.shape[1] < 2:
        raise FormatError("fields must be at least 2x2")
    return Field2D(np.where(valid, data, np.nan), pixel_size, valid)


def write_map(path, data: np.ndarray, header: dict) -> None:
    data = np.asarray(data, dtype=np.float64)
    _write_raster(path, data, np.isfinite(data), header)


def write_statmap(path, sm: StatMapSet, statistic: str) -> None:
    write_map(
        path,
        sm.get(statistic),
        {
            "kind": "cartesian",
            "statistic": statistic,
            "max_lag_px": sm.spec.max_lag,
            "step": sm.spec.step,
            "pixel_size_m": sm.pixel_size,
        },
    )


def write_polar(path, pm: PolarMap) -> None:
    write_map(
        path,
        pm.data,
        {
            "kind": "polar",
            "statistic": pm.statistic,
            "n_r": pm.n_r,
            "n_theta": pm.n_theta,
            "r_max_m": pm.r_max,
        },
    )


def read_map(path) -> tuple[np.ndarray, dict]:
    """Map values (missing cells as NaN) and the header."""
    data, valid, header = _read_raster(path)
    kind = header.get("kind")
    if kind == "cartesian":
        size = header["width"]
        if header["height"] != size or size % 2 == 0:
            raise FormatError("cartesian maps must be odd squares")
    elif kind == "polar":
        if header.get("n_r") != header["width"] or header.get("n_theta") != header["height"]:
            raise FormatError("polar header dimensions do not match n_r/n_theta")
    elif kind is not None:
        raise FormatError(f"unknown map kind {kind!r}")
    return np.where(valid, data, np.nan), header


def write_transect(path, tr: Transect) -> None:
    lines = ["r_m,value"]
    lines += [f"{float(r)!r},{float(v)!r}" for r, v in zip(tr.r_values, tr.values)]
    Path(path).write_text("\n".join(lines) + "\n")


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _colormap(name: str):
    import matplotlib

    return matplotlib.colormaps[name]


def render_map(
    data: np.ndarray,
    out_path,
    statistic: str | None = None,
    cmap: str | None = None,
    mark_center: bool = False,
    min_pixels: int = 256,
) -> None:
    """Write a heatmap PNG.

    Colors scale linearly between the 1st and 99th percentiles of the valid
    cells. Odd statistics (``s3``, ``skew``) default to a diverging palette
    centered on zero. Missing cells are grey. The image is upscaled by an
    integer factor until its longer side reaches ``min_pixels``.
    """
    from PIL import Image

    data = np.asarray(data, dtype=np.float64)
    valid = np.isfinite(data)
    diverging = statistic in ODD_STATISTICS
    if cmap is None:
        cmap = "RdBu_r" if diverging else "viridis"
    try:
        colors = _colormap(cmap)
    except KeyError:
        raise ParameterError(f"unknown colormap {cmap!r}") from None

    rgb = np.empty(data.shape + (3,), dtype=np.uint8)
    rgb[...] = (153, 153, 153)
    if valid.any():
        lo, hi = np.percentile(data[valid], [1, 99])
        if diverging:
            hi = max(abs(lo), abs(hi))
            lo = -hi
        span = hi - lo
        t = np.clip((data - lo) / span, 0.0, 1.0) if span > 0 else np.full(data.shape, 0.5)
        mapped = (colors(np.where(valid, t, 0.5))[..., :3] * 255).round().astype(np.uint8)
        rgb[valid] = mapped[valid]
    else:
        warnings.warn("map has no valid cells; writing a uniform image", stacklevel=2)

    if mark_center:
        cy, cx = data.shape[0] // 2, data.shape[1] // 2
        rgb[cy, cx] = (255, 0, 0)
    scale = max(1, int(math.ceil(min_pixels / max(data.shape))))
    if scale > 1:
        rgb = np.repeat(np.repeat(rgb, scale, axis=0), scale, axis=1)
    Image.fromarray(rgb).save(out_path, format="PNG")
