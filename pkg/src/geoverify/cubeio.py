"""Bit-exact serialization: GVC1 cube files, track CSVs and report CSVs.

The cube format is purpose-built so round-trips are bit-identical without
pulling in GRIB/NetCDF stacks.  Layout (all multi-byte fields little-endian):

    magic        4 bytes  b"GVC1"
    version      u16      currently 1
    orientation  u8       1 = latitudes stored north-to-south, 0 = south-to-north
    n_lat        u32
    n_lon        u32
    n_chan       u32
    lat_start    f64      degrees
    lat_step     f64      degrees (negative when north-to-south)
    lon_start    f64      degrees
    lon_step     f64      degrees
    valid_time   i64      UNIX seconds, UTC
    n_entries    u32      catalog length
    entries      n_entries x (u16 byte length + UTF-8 "name,level,role")
    payload      n_chan * n_lat * n_lon float32 values, C order (channel, lat, lon)

Text outputs are UTF-8 with "\\n" line endings.
"""

from __future__ import annotations

import csv
import struct
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BadMagic,
    CorruptHeader,
    NonFiniteValue,
    NonMonotonicTime,
    ParseError,
    TruncatedPayload,
    UnsupportedVersion,
)
from .grid import FieldCube, GridSpec, VariableCatalog, VariableId
from .tc import TcPoint, TcTrack

MAGIC = b"GVC1"
VERSION = 1

_FIXED_HEADER = struct.Struct("<4sHBIIIddddqI")


def _format_level(level: int | None) -> str:
    return "surface" if level is None else str(level)


def _parse_level(text: str) -> int | None:
    return None if text == "surface" else int(text)


def _encode_catalog(catalog: VariableCatalog) -> bytes:
    parts = []
    for var in catalog:
        entry = f"{var.name},{_format_level(var.level)},{var.role}".encode("utf-8")
        parts.append(struct.pack("<H", len(entry)) + entry)
    return b"".join(parts)


def write_cube(cube: FieldCube, path) -> None:
    """Write a cube; read_cube(write_cube(c)) is bit-identical to c."""
    spec = cube.spec
    ts = cube.valid_time.astimezone(timezone.utc)
    if ts.microsecond != 0:
        raise ValueError("cube valid_time must be whole seconds for serialization")
    header = _FIXED_HEADER.pack(
        MAGIC,
        VERSION,
        1 if spec.north_to_south else 0,
        spec.n_lat,
        spec.n_lon,
        cube.n_channels,
        spec.lat_start,
        spec.lat_step,
        spec.lon_start,
        spec.lon_step,
        int(ts.timestamp()),
        len(cube.catalog),
    )
    payload = np.ascontiguousarray(cube.values, dtype="<f4").tobytes()
    with open(path, "wb") as f:
        f.write(header)
        f.write(_encode_catalog(cube.catalog))
        f.write(payload)


def read_cube(path) -> FieldCube:
    """Read a GVC1 cube file, validating header consistency and finiteness."""
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != MAGIC:
        raise BadMagic(f"{path}: bad magic {raw[:4]!r}")
    if len(raw) < _FIXED_HEADER.size:
        raise TruncatedPayload(f"{path}: truncated header")
    (_, version, orientation, n_lat, n_lon, n_chan,
     lat_start, lat_step, lon_start, lon_step,
     epoch_s, n_entries) = _FIXED_HEADER.unpack_from(raw, 0)
    if version != VERSION:
        raise UnsupportedVersion(f"{path}: version {version}")

    offset = _FIXED_HEADER.size
    entries = []
    for _ in range(n_entries):
        if offset + 2 > len(raw):
            raise TruncatedPayload(f"{path}: truncated catalog")
        (length,) = struct.unpack_from("<H", raw, offset)
        offset += 2
        if offset + length > len(raw):
            raise TruncatedPayload(f"{path}: truncated catalog entry")
        name, level, role = raw[offset:offset + length].decode("utf-8").split(",")
        entries.append(VariableId(name, _parse_level(level), role))
        offset += length

    if (lat_step < 0) != bool(orientation):
        raise CorruptHeader(f"{path}: orientation flag disagrees with lat_step sign")
    if n_chan != n_entries:
        raise CorruptHeader(f"{path}: n_chan {n_chan} != catalog length {n_entries}")
    try:
        spec = GridSpec(n_lat, n_lon, lat_start, lat_step, lon_start, lon_step)
        catalog = VariableCatalog(entries)
    except ValueError as e:
        raise CorruptHeader(f"{path}: {e}") from None

    expected = 4 * n_chan * n_lat * n_lon
    if len(raw) - offset != expected:
        raise TruncatedPayload(
            f"{path}: payload is {len(raw) - offset} bytes, header implies {expected}"
        )
    values = np.frombuffer(raw, dtype="<f4", count=n_chan * n_lat * n_lon, offset=offset)
    values = values.reshape(n_chan, n_lat, n_lon)
    if not np.isfinite(values).all():
        raise NonFiniteValue(f"{path}: payload contains NaN/Inf")
    valid_time = datetime.fromtimestamp(epoch_s, tz=timezone.utc)
    return FieldCube(spec, catalog, valid_time, values)


# --- track CSV ---------------------------------------------------------------

TRACK_COLUMNS = ["storm_id", "name", "time", "lat", "lon", "ws_max", "msl_min"]


def parse_time(text: str) -> datetime:
    t = datetime.fromisoformat(text.strip().replace("Z", "+00:00"))
    if t.tzinfo is None:
        t = t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc)


def format_time(t: datetime) -> str:
    return t.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def read_tracks(path) -> list[TcTrack]:
    """Read a track CSV into one TcTrack per storm, points sorted by time.

    Leading '#' comment lines are skipped.  Malformed rows raise ParseError
    with the 1-based physical row number; duplicate or unevenly spaced
    times within a storm raise NonMonotonicTime.
    """
    groups: dict[str, list[TcPoint]] = {}
    names: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = None
        row_no = 0
        for row in reader:
            row_no += 1
            if row and row[0].startswith("#"):
                continue
            if header is None:
                header = row
                if header != TRACK_COLUMNS:
                    raise ParseError(row_no, f"expected header {','.join(TRACK_COLUMNS)}")
                continue
            if not row:
                continue
            if len(row) != len(TRACK_COLUMNS):
                raise ParseError(row_no, f"expected {len(TRACK_COLUMNS)} fields, got {len(row)}")
            storm_id, name, time_s, lat_s, lon_s, ws_s, msl_s = row
            try:
                point = TcPoint(
                    time=parse_time(time_s),
                    lat=float(lat_s),
                    lon=float(lon_s),
                    ws_max=float(ws_s),
                    msl_min=float(msl_s) if msl_s.strip() else None,
                )
            except (ValueError, OverflowError) as e:
                raise ParseError(row_no, str(e)) from None
            groups.setdefault(storm_id, []).append(point)
            names.setdefault(storm_id, name)
    if header is None:
        raise ParseError(1, "missing header row")

    tracks = []
    for storm_id, points in groups.items():
        points.sort(key=lambda p: p.time)
        try:
            tracks.append(TcTrack(storm_id=storm_id, name=names[storm_id], points=tuple(points)))
        except ValueError as e:
            raise NonMonotonicTime(storm_id, str(e)) from None
    return tracks


def write_tracks(tracks: Sequence[TcTrack], path, params: Mapping | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        _write_params_line(f, params)
        f.write(",".join(TRACK_COLUMNS) + "\n")
        for track in tracks:
            for p in track.points:
                msl = "" if p.msl_min is None else format(p.msl_min, ".6g")
                f.write(
                    f"{track.storm_id},{track.name},{format_time(p.time)},"
                    f"{p.lat:.4f},{p.lon:.4f},{format(p.ws_max, '.6g')},{msl}\n"
                )


# --- report CSV --------------------------------------------------------------

REPORT_COLUMNS = ["variable", "level", "lead_hours", "metric", "value"]


def _level_sort_key(level: int | None) -> int:
    return -1 if level is None else level


def _write_params_line(f, params: Mapping | None) -> None:
    if params:
        rendered = " ".join(f"{k}={params[k]}" for k in params)
        f.write(f"# params: {rendered}\n")


def write_report(records: Iterable, path, params: Mapping | None = None) -> None:
    """Write metric records as CSV, deterministically ordered.

    Rows are sorted by (variable, level, lead, metric) with value as a final
    tiebreak, so any permutation of the input yields byte-identical files.
    Values are printed with 6 significant digits.
    """
    rows = sorted(
        records,
        key=lambda r: (
            r.variable.name,
            _level_sort_key(r.variable.level),
            r.lead_hours,
            r.metric,
            r.value,
            r.n_samples,
        ),
    )
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        _write_params_line(f, params)
        f.write(",".join(REPORT_COLUMNS) + "\n")
        for r in rows:
            f.write(
                f"{r.variable.name},{_format_level(r.variable.level)},"
                f"{r.lead_hours},{r.metric},{format(r.value, '.6g')}\n"
            )


MATRIX_COLUMNS = ["month", "h00", "h06", "h12", "h18"]


def write_month_hour_matrix(matrix, path, params: Mapping | None = None) -> None:
    """Write a 12 x 4 month-by-hour matrix as CSV; NaN cells become "NA"."""
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.shape != (12, 4):
        raise ValueError(f"matrix shape {arr.shape} != (12, 4)")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        _write_params_line(f, params)
        f.write(",".join(MATRIX_COLUMNS) + "\n")
        for month in range(12):
            cells = ["NA" if np.isnan(v) else format(v, ".6g") for v in arr[month]]
            f.write(f"{month + 1}," + ",".join(cells) + "\n")


def read_csv_rows(path) -> list[tuple[int, list[str]]]:
    """Generic CSV reader: (1-based row number, fields) pairs, '#' lines skipped."""
    out = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for row_no, row in enumerate(csv.reader(f), start=1):
            if not row or row[0].startswith("#"):
                continue
            out.append((row_no, row))
    return out


def cube_paths(directory) -> list[Path]:
    """All .gvc files in a directory, sorted by name."""
    return sorted(Path(directory).glob("*.gvc"))
