"""Grid geometry, variable catalog, field cubes and latitude weighting.

Fields live on regular latitude/longitude grids.  The storage convention is
latitudes north-to-south (negative ``lat_step``) and longitudes west-to-east
from 0 degrees, but any strictly monotonic latitude axis is accepted and the
orientation is recorded explicitly in every cube file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    EmptyRegion,
    MisalignedRange,
    UnknownVariable,
    ZeroWeightSum,
)

#: Pressure levels (hPa) of the canonical 70-channel weather catalog.
PRESSURE_LEVELS = (50, 100, 150, 200, 250, 300, 400, 500, 600, 700, 850, 925, 1000)

#: Upper-air variable names, outer ordering of the canonical catalog.
UPPER_AIR_NAMES = ("Z", "T", "U", "V", "Q")

#: Surface variable names in table order.
SURFACE_NAMES = ("T2M", "MSL", "U10M", "V10M", "WS10M")

#: Static/temporal inputs that never enter skill metrics.
INPUT_ONLY_NAMES = ("OR", "LSM", "LAT", "LON", "HOUR", "DOY", "STEP")

ROLE_INPUT_OUTPUT = "input-output"
ROLE_INPUT_ONLY = "input-only"

_ALIGN_TOL_DEG = 1e-6


def _as_utc(t: datetime) -> datetime:
    if t.tzinfo is None:
        return t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc)


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a regular lat/lon grid.

    ``lat_step`` is negative for north-to-south storage.  Longitudes are
    taken modulo 360; latitudes must stay within [-90, +90] and be strictly
    monotonic in the row index.
    """

    n_lat: int
    n_lon: int
    lat_start: float
    lat_step: float
    lon_start: float
    lon_step: float

    def __post_init__(self):
        if self.n_lat < 2:
            raise ValueError(f"n_lat must be >= 2, got {self.n_lat}")
        if self.n_lon < 1:
            raise ValueError(f"n_lon must be >= 1, got {self.n_lon}")
        if self.lat_step == 0.0:
            raise ValueError("lat_step must be nonzero (latitudes strictly monotonic)")
        if self.lon_step <= 0.0:
            raise ValueError("lon_step must be positive (west-to-east storage)")
        lat_end = self.lat_start + (self.n_lat - 1) * self.lat_step
        if not (-90.0 - 1e-9 <= self.lat_start <= 90.0 + 1e-9):
            raise ValueError(f"lat_start {self.lat_start} outside [-90, 90]")
        if not (-90.0 - 1e-9 <= lat_end <= 90.0 + 1e-9):
            raise ValueError(f"last latitude {lat_end} outside [-90, 90]")

    @property
    def latitudes(self) -> np.ndarray:
        """Latitudes per row, degrees, in storage order."""
        return self.lat_start + np.arange(self.n_lat, dtype=np.float64) * self.lat_step

    @property
    def longitudes(self) -> np.ndarray:
        """Longitudes per column, degrees in [0, 360), storage order."""
        return (self.lon_start + np.arange(self.n_lon, dtype=np.float64) * self.lon_step) % 360.0

    @property
    def north_to_south(self) -> bool:
        return self.lat_step < 0.0

    @property
    def is_global_lon(self) -> bool:
        """True when the columns wrap the full circle of longitude."""
        return abs(self.n_lon * self.lon_step - 360.0) <= _ALIGN_TOL_DEG

    def lat_bounds(self) -> tuple[float, float]:
        """(south, north) extent in degrees."""
        lat_end = self.lat_start + (self.n_lat - 1) * self.lat_step
        return min(self.lat_start, lat_end), max(self.lat_start, lat_end)

    def contains(self, lat: float, lon: float) -> bool:
        """Whether a point lies inside the grid's closed lat/lon extent."""
        south, north = self.lat_bounds()
        if not (south - _ALIGN_TOL_DEG <= lat <= north + _ALIGN_TOL_DEG):
            return False
        if self.is_global_lon:
            return True
        offset = (lon - self.lon_start) % 360.0
        return offset <= (self.n_lon - 1) * self.lon_step + _ALIGN_TOL_DEG


@dataclass(frozen=True)
class VariableId:
    """A named channel: abbreviation plus pressure level (None = surface)."""

    name: str
    level: int | None = None
    role: str = ROLE_INPUT_OUTPUT

    @property
    def key(self) -> tuple[str, int | None]:
        return (self.name, self.level)

    @property
    def token(self) -> str:
        """Compact label, e.g. ``Z500`` or ``T2M``."""
        return self.name if self.level is None else f"{self.name}{self.level}"


def parse_variable_token(token: str) -> tuple[str, int | None]:
    """Split a label like ``Z500`` into (name, level); surface names pass through."""
    m = re.fullmatch(r"([A-Za-z]+)(\d+)", token.strip())
    if m:
        return m.group(1).upper(), int(m.group(2))
    return token.strip().upper(), None


class VariableCatalog:
    """Ordered list of channels; (name, level) pairs must be unique."""

    def __init__(self, entries: Iterable[VariableId]):
        self._entries = tuple(entries)
        self._index: dict[tuple[str, int | None], int] = {}
        for i, v in enumerate(self._entries):
            if v.key in self._index:
                raise ValueError(f"duplicate catalog entry {v.token}")
            self._index[v.key] = i

    @property
    def entries(self) -> tuple[VariableId, ...]:
        return self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[VariableId]:
        return iter(self._entries)

    def __contains__(self, var) -> bool:
        return self._key_of(var) in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, VariableCatalog) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    @staticmethod
    def _key_of(var) -> tuple[str, int | None]:
        if isinstance(var, VariableId):
            return var.key
        if isinstance(var, str):
            return parse_variable_token(var)
        name, level = var
        return (name, level)

    def index_of(self, var) -> int:
        """Channel index of a variable; raises UnknownVariable if absent."""
        key = self._key_of(var)
        try:
            return self._index[key]
        except KeyError:
            label = key[0] if key[1] is None else f"{key[0]}{key[1]}"
            raise UnknownVariable(f"variable {label} not in catalog") from None

    def get(self, var) -> VariableId:
        return self._entries[self.index_of(var)]


def weather_catalog(include_input_only: bool = False) -> VariableCatalog:
    """The canonical 70-channel catalog: 5 upper-air x 13 levels + 5 surface.

    Upper-air variables are ordered (Z, T, U, V, Q) outer with pressure
    levels ascending inner, followed by the surface variables in table
    order.  Optionally appends the input-only static/temporal channels.
    """
    entries = [
        VariableId(name, level)
        for name in UPPER_AIR_NAMES
        for level in PRESSURE_LEVELS
    ]
    entries += [VariableId(name) for name in SURFACE_NAMES]
    if include_input_only:
        entries += [VariableId(name, role=ROLE_INPUT_ONLY) for name in INPUT_ONLY_NAMES]
    return VariableCatalog(entries)


@dataclass(frozen=True)
class FieldCube:
    """One time step of C channels on an H x W grid.

    Values are 32-bit floats, shape (C, H, W), finite, and read-only after
    construction; cubes are safe to share across threads.
    """

    spec: GridSpec
    catalog: VariableCatalog
    valid_time: datetime
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float32)
        expected = (len(self.catalog), self.spec.n_lat, self.spec.n_lon)
        if arr.shape != expected:
            raise ValueError(f"values shape {arr.shape} != (C,H,W) {expected}")
        if not np.isfinite(arr).all():
            raise ValueError("cube values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "valid_time", _as_utc(self.valid_time))

    @property
    def n_channels(self) -> int:
        return len(self.catalog)


def latitude_weights(spec_or_lats: GridSpec | Sequence[float] | np.ndarray) -> np.ndarray:
    """Area weights per latitude row: ``n_lat * cos(lat_i) / sum(cos(lat_k))``.

    Accepts a GridSpec or a raw latitude array (degrees).  The weights sum
    to ``n_lat``; exact poles contribute zero.  Raises ZeroWeightSum when
    the cosine sum is not positive (a grid of poles only).
    """
    if isinstance(spec_or_lats, GridSpec):
        lats = spec_or_lats.latitudes
    else:
        lats = np.asarray(spec_or_lats, dtype=np.float64)
    cosines = np.cos(np.deg2rad(lats))
    # cos(+-90 deg) is ~6e-17 in floats; pin exact poles to zero.
    cosines = np.where(np.abs(lats) == 90.0, 0.0, cosines)
    total = cosines.sum()
    if total <= 0.0:
        raise ZeroWeightSum("sum of latitude cosines is not positive")
    return lats.size * cosines / total


def select_channel(cube: FieldCube, var) -> np.ndarray:
    """Read-only H x W slab for one variable; raises UnknownVariable."""
    return cube.values[cube.catalog.index_of(var)]


def _crop_lat_indices(spec: GridSpec, lat_range: tuple[float, float]) -> np.ndarray:
    lo, hi = sorted(float(v) for v in lat_range)
    south, north = spec.lat_bounds()
    for bound in (lo, hi):
        if south - _ALIGN_TOL_DEG <= bound <= north + _ALIGN_TOL_DEG:
            frac = (bound - spec.lat_start) / spec.lat_step
            if abs(frac - round(frac)) * abs(spec.lat_step) > _ALIGN_TOL_DEG:
                raise MisalignedRange(f"latitude bound {bound} not on a grid node")
    lats = spec.latitudes
    inside = (lats >= lo - _ALIGN_TOL_DEG) & (lats <= hi + _ALIGN_TOL_DEG)
    idx = np.nonzero(inside)[0]
    if idx.size == 0:
        raise EmptyRegion(f"latitude range {lat_range} selects no rows")
    return idx


def _crop_lon_indices(spec: GridSpec, lon_range: tuple[float, float]) -> np.ndarray:
    lo = float(lon_range[0]) % 360.0
    hi = float(lon_range[1]) % 360.0

    for bound in (lo, hi):
        frac = ((bound - spec.lon_start) % 360.0) / spec.lon_step
        on_node = abs(frac - round(frac)) * spec.lon_step <= _ALIGN_TOL_DEG
        in_coverage = spec.is_global_lon or frac <= spec.n_lon - 1 + _ALIGN_TOL_DEG / spec.lon_step
        if in_coverage and not on_node:
            raise MisalignedRange(f"longitude bound {bound} not on a grid node")

    width = (hi - lo) % 360.0
    if spec.is_global_lon:
        j0 = int(round(((lo - spec.lon_start) % 360.0) / spec.lon_step)) % spec.n_lon
        count = min(int(round(width / spec.lon_step)) + 1, spec.n_lon)
        return (j0 + np.arange(count)) % spec.n_lon
    # Regional grid: select columns whose longitude falls in the closed,
    # possibly wrapped range [lo, hi]; the selection must be contiguous.
    rel = (spec.longitudes - lo) % 360.0
    idx = np.nonzero((rel <= width + _ALIGN_TOL_DEG) | (rel >= 360.0 - _ALIGN_TOL_DEG))[0]
    if idx.size == 0:
        raise EmptyRegion(f"longitude range {lon_range} selects no columns")
    if np.any(np.diff(idx) != 1):
        raise EmptyRegion(f"longitude range {lon_range} selects a non-contiguous column set")
    return idx


def regional_crop(
    cube: FieldCube,
    lat_range: tuple[float, float],
    lon_range: tuple[float, float],
) -> FieldCube:
    """Cube covering exactly the grid points inside the closed ranges.

    Range bounds that fall inside the grid extent must coincide with grid
    nodes within 1e-6 degrees (MisalignedRange otherwise); bounds beyond
    the extent clamp to it.  Wrapped longitude ranges (lo > hi mod 360)
    are supported on globally-wrapping grids.  Channel order is preserved.
    """
    spec = cube.spec
    rows = _crop_lat_indices(spec, lat_range)
    cols = _crop_lon_indices(spec, lon_range)
    if rows.size < 2:
        raise EmptyRegion("crop keeps fewer than two latitude rows")
    sub = cube.values[:, rows][:, :, cols]
    lats = spec.latitudes
    lons = spec.longitudes
    new_spec = GridSpec(
        n_lat=rows.size,
        n_lon=cols.size,
        lat_start=float(lats[rows[0]]),
        lat_step=spec.lat_step,
        lon_start=float(lons[cols[0]]),
        lon_step=spec.lon_step,
    )
    return FieldCube(new_spec, cube.catalog, cube.valid_time, sub)
