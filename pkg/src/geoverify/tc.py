"""Tropical cyclone tracking, track/intensity scoring and pair filtering.

The tracker follows a sea-level-pressure minimum through a time-ordered
cube sequence; track skill is the mean great-circle distance to a best
track, intensity skill the RMSE of maximum 10-m wind speed over matched
valid times.  Mean sea-level pressure fields are expected in hPa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    InvalidFlags,
    MissingChannel,
    NoOverlap,
    SeedOutsideGrid,
    UnknownVariable,
)
from .grid import FieldCube, GridSpec, VariableCatalog, VariableId

EARTH_RADIUS_KM = 6371.0
KM_PER_DEG = math.pi * EARTH_RADIUS_KM / 180.0


def great_circle_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Haversine distance in km between two (lat, lon) points in degrees."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    s = (
        math.sin((lat2 - lat1) / 2.0) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2.0) ** 2
    )
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(s)))


def _haversine_grid(lat0: float, lon0: float, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    """Distances (km) from one point to every node of a lat x lon sub-grid."""
    phi0 = math.radians(lat0)
    phi = np.deg2rad(lats)[:, None]
    dphi = (phi - phi0) / 2.0
    dlam = np.deg2rad((lons[None, :] - lon0 + 180.0) % 360.0 - 180.0) / 2.0
    s = np.sin(dphi) ** 2 + math.cos(phi0) * np.cos(phi) * np.sin(dlam) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(s)))


@dataclass(frozen=True)
class TcPoint:
    """One cyclone fix: position, max 10-m wind and central pressure."""

    time: datetime
    lat: float
    lon: float
    ws_max: float
    msl_min: float | None = None

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"lat {self.lat} outside [-90, 90]")
        if self.ws_max < 0.0:
            raise ValueError(f"ws_max {self.ws_max} negative")
        object.__setattr__(self, "lon", self.lon % 360.0)


@dataclass(frozen=True)
class TcTrack:
    """Time series of fixes for one storm at a fixed cadence."""

    storm_id: str
    points: tuple[TcPoint, ...]
    name: str = ""
    complete: bool = True

    def __post_init__(self):
        times = [p.time for p in self.points]
        if len(times) >= 2:
            deltas = [(b - a).total_seconds() for a, b in zip(times, times[1:])]
            if min(deltas) <= 0:
                raise ValueError("track times must be strictly increasing")
            if max(deltas) != min(deltas):
                raise ValueError("track times must keep a fixed cadence")

    @property
    def times(self) -> tuple[datetime, ...]:
        return tuple(p.time for p in self.points)

    def point_at(self, time: datetime) -> TcPoint:
        for p in self.points:
            if p.time == time:
                return p
        raise KeyError(time)


def _window_indices(spec: GridSpec, lat0: float, lon0: float, radius_km: float):
    """Row/column index vectors of a bounding box around a point."""
    dlat = radius_km / KM_PER_DEG + abs(spec.lat_step)
    lats = spec.latitudes
    rows = np.nonzero(np.abs(lats - lat0) <= dlat)[0]
    cos0 = max(math.cos(math.radians(lat0)), 0.05)
    dlon = min(radius_km / (KM_PER_DEG * cos0) + spec.lon_step, 180.0)
    lons = spec.longitudes
    diff = np.abs((lons - lon0 + 180.0) % 360.0 - 180.0)
    cols = np.nonzero(diff <= dlon)[0]
    return rows, cols


def track_cyclone(
    cubes: Sequence[FieldCube],
    seed: TcPoint,
    *,
    search_radius_km: float = 250.0,
    intensity_radius_km: float = 250.0,
    closed_low_hpa: float = 0.5,
    ring_width_km: float = 100.0,
    storm_id: str = "TRACK",
    name: str = "",
) -> TcTrack:
    """Follow an MSL minimum through time-ordered cubes from a seed fix.

    At each step the candidate center is the grid node with the lowest MSL
    within ``search_radius_km`` of the previous center.  The low must be
    closed: its MSL at least ``closed_low_hpa`` below the mean over the
    ring of nodes at ``intensity_radius_km`` (+- half ``ring_width_km``)
    from the candidate, else tracking stops.  Each fix records ws_max as
    the maximum WS10M within ``intensity_radius_km`` of the center and
    msl_min as the MSL at the center node.

    Returns a TcTrack whose ``complete`` flag is False when tracking
    stopped before the last cube; if the very first detection fails the
    track holds only the seed.
    """
    if not cubes:
        raise ValueError("no cubes to track through")
    first = cubes[0]
    try:
        i_msl = first.catalog.index_of(("MSL", None))
        i_ws = first.catalog.index_of(("WS10M", None))
    except UnknownVariable as e:
        raise MissingChannel(str(e)) from None
    if seed.time != first.valid_time:
        raise ValueError(
            f"seed time {seed.time} does not match first cube {first.valid_time}"
        )
    if not first.spec.contains(seed.lat, seed.lon):
        raise SeedOutsideGrid(f"seed at ({seed.lat}, {seed.lon}) not inside grid")

    points: list[TcPoint] = []
    lat_prev, lon_prev = seed.lat, seed.lon
    for cube in cubes:
        msl = cube.values[i_msl]
        lats = cube.spec.latitudes
        lons = cube.spec.longitudes

        rows, cols = _window_indices(cube.spec, lat_prev, lon_prev, search_radius_km)
        if rows.size == 0 or cols.size == 0:
            break
        dist = _haversine_grid(lat_prev, lon_prev, lats[rows], lons[cols])
        inside = dist <= search_radius_km
        if not inside.any():
            break
        patch = msl[np.ix_(rows, cols)]
        masked = np.where(inside, patch, np.inf)
        flat = int(np.argmin(masked))
        r, c = np.unravel_index(flat, masked.shape)
        lat_c, lon_c = float(lats[rows[r]]), float(lons[cols[c]])
        msl_c = float(patch[r, c])

        # Closed-low test: ring mean minus center depth.
        ring_rows, ring_cols = _window_indices(
            cube.spec, lat_c, lon_c, intensity_radius_km + ring_width_km
        )
        ring_dist = _haversine_grid(lat_c, lon_c, lats[ring_rows], lons[ring_cols])
        on_ring = np.abs(ring_dist - intensity_radius_km) <= ring_width_km / 2.0
        if not on_ring.any():
            break
        ring_mean = float(msl[np.ix_(ring_rows, ring_cols)][on_ring].mean())
        if ring_mean - msl_c < closed_low_hpa:
            break

        disk_rows, disk_cols = _window_indices(cube.spec, lat_c, lon_c, intensity_radius_km)
        disk_dist = _haversine_grid(lat_c, lon_c, lats[disk_rows], lons[disk_cols])
        ws_patch = cube.values[i_ws][np.ix_(disk_rows, disk_cols)]
        ws_max = float(ws_patch[disk_dist <= intensity_radius_km].max())

        step_km = great_circle_km((lat_prev, lon_prev), (lat_c, lon_c))
        assert step_km <= search_radius_km + 1e-6
        points.append(TcPoint(cube.valid_time, lat_c, lon_c, ws_max, msl_c))
        lat_prev, lon_prev = lat_c, lon_c

    if not points:
        return TcTrack(storm_id=storm_id, name=name, points=(seed,), complete=False)
    return TcTrack(
        storm_id=storm_id,
        name=name,
        points=tuple(points),
        complete=len(points) == len(cubes),
    )


# --- track and intensity skill -------------------------------------------------

def _matched_times(forecast: TcTrack, reference: TcTrack) -> list[datetime]:
    common = set(forecast.times) & set(reference.times)
    if not common:
        raise NoOverlap(f"tracks for {forecast.storm_id} share no valid times")
    return sorted(common)


def _lead_hours(track: TcTrack, time: datetime) -> int:
    return int(round((time - track.points[0].time).total_seconds() / 3600.0))


def track_errors_km(forecast: TcTrack, reference: TcTrack) -> list[tuple[int, float]]:
    """(lead hours, great-circle error km) per matched valid time."""
    out = []
    for t in _matched_times(forecast, reference):
        f, r = forecast.point_at(t), reference.point_at(t)
        out.append((_lead_hours(forecast, t), great_circle_km((f.lat, f.lon), (r.lat, r.lon))))
    return out


def intensity_errors(forecast: TcTrack, reference: TcTrack) -> list[tuple[int, float]]:
    """(lead hours, forecast ws_max - reference ws_max) per matched valid time."""
    out = []
    for t in _matched_times(forecast, reference):
        f, r = forecast.point_at(t), reference.point_at(t)
        out.append((_lead_hours(forecast, t), f.ws_max - r.ws_max))
    return out


def track_mae(forecast: TcTrack, reference: TcTrack, by_lead: bool = False):
    """Mean great-circle track error (km) over matched points.

    Returns a list of MetricRecord per lead when ``by_lead``, else one
    pooled MetricRecord (lead_hours 0).
    """
    from .metrics import MetricRecord

    errors = track_errors_km(forecast, reference)
    var = VariableId("TRACK")
    if not by_lead:
        values = [e for _, e in errors]
        return MetricRecord(var, 0, "mae", float(np.mean(values)), len(values))
    records = []
    for lead in sorted({lead for lead, _ in errors}):
        values = [e for l, e in errors if l == lead]
        records.append(MetricRecord(var, lead, "mae", float(np.mean(values)), len(values)))
    return records


def intensity_rmse(forecast: TcTrack, reference: TcTrack, by_lead: bool = False):
    """RMSE of ws_max (m/s) over matched points; pooled or per lead."""
    from .metrics import MetricRecord

    errors = intensity_errors(forecast, reference)
    var = VariableId("WS10M")
    if not by_lead:
        values = [e for _, e in errors]
        rmse = float(np.sqrt(np.mean(np.square(values))))
        return MetricRecord(var, 0, "rmse", rmse, len(values))
    records = []
    for lead in sorted({lead for lead, _ in errors}):
        values = [e for l, e in errors if l == lead]
        rmse = float(np.sqrt(np.mean(np.square(values))))
        records.append(MetricRecord(var, lead, "rmse", rmse, len(values)))
    return records


def concurrent_match(
    tracks_by_source: Mapping[str, Sequence[TcTrack]],
    reference: Sequence[TcTrack],
) -> dict[str, list[datetime]]:
    """(storm, valid time) pairs detected by every source and the reference.

    Restricting evaluation to concurrent detections keeps all models scored
    on an identical set of events.  Storms missed by any source drop out.
    """
    by_source: list[dict[str, set[datetime]]] = []
    for tracks in tracks_by_source.values():
        by_source.append({t.storm_id: set(t.times) for t in tracks})
    matched: dict[str, list[datetime]] = {}
    for ref in reference:
        times = set(ref.times)
        for source in by_source:
            times &= source.get(ref.storm_id, set())
        if times:
            matched[ref.storm_id] = sorted(times)
    return matched


# --- WRF pair filtering ---------------------------------------------------------

DECISION_EXCLUDE = "Exclude"
DECISION_STRENGTHEN = "Strengthen"
DECISION_WEAKEN = "Weaken"
DECISION_KEEP = "Keep"


@dataclass(frozen=True)
class FilterDecision:
    case_id: str
    decision: str
    reason: str


def filter_case(
    model_mbe: float,
    wrf_mbe: float,
    both_under: bool,
    both_over: bool,
    track_err_km: float,
    comparable_tol: float = 1.0,
    track_threshold_km: float = 10.0,
    case_id: str = "",
) -> FilterDecision:
    """Decide whether a model/WRF forecast pair enters the editing dataset.

    Rules, in order: (1) the model already less biased than WRF (smaller
    absolute wind-speed MBE) excludes the case; (2) comparable MBEs with a
    track position error above the threshold exclude it; (3) both models
    underestimating means the intensity is strengthened; (4) both
    overestimating means it is weakened; (5) otherwise keep unchanged.
    """
    if both_under and both_over:
        raise InvalidFlags("both_under and both_over cannot both be true")
    if not (math.isfinite(model_mbe) and math.isfinite(wrf_mbe)):
        raise ValueError("MBEs must be finite")
    if abs(model_mbe) < abs(wrf_mbe):
        return FilterDecision(case_id, DECISION_EXCLUDE, "model MBE smaller than WRF MBE")
    if abs(model_mbe - wrf_mbe) <= comparable_tol and track_err_km > track_threshold_km:
        return FilterDecision(
            case_id,
            DECISION_EXCLUDE,
            f"comparable MBEs with track error above {track_threshold_km:g} km",
        )
    if both_under:
        return FilterDecision(case_id, DECISION_STRENGTHEN, "both models underestimate WS10M")
    if both_over:
        return FilterDecision(case_id, DECISION_WEAKEN, "both models overestimate WS10M")
    return FilterDecision(case_id, DECISION_KEEP, "no rule applies")


# --- synthetic vortex fixtures ---------------------------------------------------

def tracker_catalog() -> VariableCatalog:
    """Minimal two-channel catalog (MSL, WS10M) for tracker fixtures."""
    return VariableCatalog([VariableId("MSL"), VariableId("WS10M")])


def synthetic_vortex_series(
    spec: GridSpec,
    start_time: datetime,
    steps: int,
    center_lat: float,
    center_lon: float,
    *,
    dlat_per_step: float = 0.0,
    dlon_per_step: float = 0.0,
    step_hours: int = 6,
    background_hpa: float = 1013.0,
    depth_hpa: float = 30.0,
    r0_km: float = 150.0,
    ws_peak: float = 40.0,
    ring_km: float = 100.0,
    storm_id: str = "SYNTH",
) -> tuple[list[FieldCube], TcTrack]:
    """Cubes with a translating Gaussian low plus a wind ring, and the truth track.

    MSL(r) = background - depth * exp(-(r/r0)^2); WS10M(r) peaks at exactly
    ``ws_peak`` on the radius ``ring_km``.  The truth track records the
    continuous centers and, as ws_max, the planted field maximum over grid
    nodes within 250 km of each center (what a perfect tracker recovers).
    """
    catalog = tracker_catalog()
    lats = spec.latitudes
    lons = spec.longitudes
    cubes = []
    truth_points = []
    for k in range(steps):
        lat_c = center_lat + k * dlat_per_step
        lon_c = (center_lon + k * dlon_per_step) % 360.0
        r = _haversine_grid(lat_c, lon_c, lats, lons)
        msl = background_hpa - depth_hpa * np.exp(-((r / r0_km) ** 2))
        rr = r / ring_km
        ws = ws_peak * rr * np.exp(0.5 * (1.0 - rr ** 2))
        values = np.stack([msl, ws]).astype(np.float32)
        t = start_time + timedelta(hours=k * step_hours)
        cube = FieldCube(spec, catalog, t, values)
        cubes.append(cube)
        planted = float(values[1][r <= 250.0].max())
        truth_points.append(TcPoint(t, lat_c, lon_c, planted, float(values[0].min())))
    return cubes, TcTrack(storm_id=storm_id, points=tuple(truth_points))
