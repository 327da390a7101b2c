"""Batch command-line front end.

Every subcommand writes CSVs that start with a "# params:" metadata line
recording the result-affecting parameter values, so re-running with the
same inputs and flags yields byte-identical files.  Exit codes: 0 success,
2 data error, 3 parse error, 4 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from . import climatology as clim_mod
from . import cubeio, metrics, regrid, tc, vqa
from .errors import (
    CorruptHeader,
    GeoverifyError,
    InvalidFlags,
    MisalignedRange,
    MissingCube,
    NonMonotonicTime,
    NonPositivePeak,
    ParseError,
    PerfectMatch,
    UnknownVariable,
)
from .grid import (
    FieldCube,
    GridSpec,
    VariableCatalog,
    VariableId,
    latitude_weights,
    parse_variable_token,
    select_channel,
)

EXIT_DATA = 2
EXIT_PARSE = 3
EXIT_CONFIG = 4

_STEM_FORMAT = "%Y%m%dT%H%M%SZ"


def time_stem(t: datetime) -> str:
    return t.astimezone(timezone.utc).strftime(_STEM_FORMAT)


def parse_stem(stem: str) -> datetime:
    return datetime.strptime(stem, _STEM_FORMAT).replace(tzinfo=timezone.utc)


def forecast_path(directory, t0: datetime, lead: int) -> Path:
    return Path(directory) / f"{time_stem(t0)}_{lead}.gvc"


def reference_path(directory, valid: datetime) -> Path:
    return Path(directory) / f"{time_stem(valid)}.gvc"


def parse_leads(spec: str) -> list[int]:
    """Lead spec: either "6,12,24" or an inclusive range "start:stop:step"."""
    try:
        if ":" in spec:
            start, stop, step = (int(p) for p in spec.split(":"))
            if step <= 0 or start <= 0 or stop < start:
                raise ValueError
            return list(range(start, stop + 1, step))
        leads = [int(p) for p in spec.split(",")]
        if not leads or any(lead <= 0 for lead in leads):
            raise ValueError
        return leads
    except ValueError:
        raise ValueError(f"bad leads spec {spec!r}; use '6:24:6' or '6,12'") from None


def read_init_times(path) -> list[datetime]:
    times = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                times.append(cubeio.parse_time(line))
    if not times:
        raise ValueError(f"no init times in {path}")
    return times


def _load_forecast_cube(directory, t0: datetime, lead: int) -> FieldCube:
    path = forecast_path(directory, t0, lead)
    if not path.exists():
        raise MissingCube(t0, lead, str(path))
    cube = cubeio.read_cube(path)
    if cube.valid_time != t0 + timedelta(hours=lead):
        raise CorruptHeader(
            f"{path}: valid_time {cube.valid_time} != init {t0} + {lead}h"
        )
    return cube


def _load_reference_cube(directory, t0: datetime, lead: int) -> FieldCube:
    valid = t0 + timedelta(hours=lead)
    path = reference_path(directory, valid)
    if not path.exists():
        raise MissingCube(t0, lead, str(path))
    return cubeio.read_cube(path)


# --- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    variables = [parse_variable_token(tok) for tok in args.variables.split(",") if tok]
    if not variables:
        raise ValueError("--variables is empty")
    wanted = [m.strip() for m in args.metrics.split(",") if m.strip()]
    bad = set(wanted) - {"rmse", "acc"}
    if bad or not wanted:
        raise ValueError(f"--metrics must be drawn from rmse,acc; got {args.metrics!r}")
    init_times = read_init_times(args.init_times)
    leads = parse_leads(args.leads)

    clim = None
    if "acc" in wanted:
        if not args.climatology:
            raise ValueError("computing acc requires --climatology MANIFEST")
        if not Path(args.climatology).exists():
            print(
                f"geoverify: climatology manifest not found: {args.climatology}",
                file=sys.stderr,
            )
            return EXIT_DATA
        clim = clim_mod.Climatology.load(args.climatology)

    def task(pair):
        t0, lead = pair
        fc = _load_forecast_cube(args.forecast, t0, lead)
        ref = _load_reference_cube(args.reference, t0, lead)
        weights = latitude_weights(fc.spec)
        out = {}
        for name, level in variables:
            f2 = select_channel(fc, (name, level))
            r2 = select_channel(ref, (name, level))
            if "rmse" in wanted:
                out[(name, level, lead, "rmse", t0)] = metrics.weighted_rmse(f2, r2, weights)
            if clim is not None:
                m2 = clim.lookup_channel(fc.valid_time, (name, level))
                out[(name, level, lead, "acc", t0)] = metrics.weighted_acc(f2, r2, m2, weights)
        return out

    pairs = [(t0, lead) for t0 in sorted(init_times) for lead in leads]
    probe = _load_forecast_cube(args.forecast, *pairs[0])
    for name, level in variables:
        if probe.catalog.get((name, level)).role != "input-output":
            raise ValueError(f"variable {name} is input-only and carries no skill metrics")
    results: dict = {}
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            for chunk in pool.map(task, pairs):
                results.update(chunk)
    else:
        for pair in pairs:
            results.update(task(pair))

    records = []
    n = len(init_times)
    for name, level in variables:
        for lead in leads:
            for metric in wanted:
                if metric == "acc" and clim is None:
                    continue
                total = 0.0
                for t0 in sorted(init_times):
                    total += results[(name, level, lead, metric, t0)]
                records.append(
                    metrics.MetricRecord(VariableId(name, level), lead, metric, total / n, n)
                )

    params = {
        "forecast": args.forecast,
        "reference": args.reference,
        "climatology": args.climatology or "none",
        "variables": args.variables,
        "init_times": args.init_times,
        "leads": args.leads,
        "metrics": ",".join(wanted),
    }
    cubeio.write_report(records, args.out, params)

    if args.map_dir:
        _write_rmse_maps(args, variables, sorted(init_times), leads)
    return 0


def _write_rmse_maps(args, variables, init_times, leads) -> None:
    """Per-gridpoint unweighted RMSE maps, one single-channel cube per (var, lead)."""
    out_dir = Path(args.map_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, level in variables:
        for lead in leads:
            fields_f = []
            fields_r = []
            spec = None
            for t0 in init_times:
                fc = _load_forecast_cube(args.forecast, t0, lead)
                ref = _load_reference_cube(args.reference, t0, lead)
                spec = fc.spec
                fields_f.append(select_channel(fc, (name, level)))
                fields_r.append(select_channel(ref, (name, level)))
            rmse_map = metrics.pointwise_rmse(fields_f, fields_r)
            var = VariableId(name, level)
            cube = FieldCube(
                spec,
                VariableCatalog([var]),
                init_times[0] + timedelta(hours=lead),
                rmse_map[None].astype(np.float32),
            )
            cubeio.write_cube(cube, out_dir / f"rmsemap_{var.token}_{lead}.gvc")


# --- downscale-eval -------------------------------------------------------------

def cmd_downscale_eval(args) -> int:
    truth_paths = cubeio.cube_paths(args.truth)
    if not truth_paths:
        print(f"geoverify: no truth cubes in {args.truth}", file=sys.stderr)
        return EXIT_DATA

    rows = []          # (time, var_token, level, method, metric, value, peak)
    samples: dict = {} # (var token, metric, method) -> list of (time, value)
    failures = 0
    for truth_path in truth_paths:
        stem = truth_path.stem
        try:
            truth = cubeio.read_cube(truth_path)
            coarse = cubeio.read_cube(Path(args.coarse) / truth_path.name)
            model = cubeio.read_cube(Path(args.model) / truth_path.name)
            baseline = regrid.bilinear_upsample(coarse, truth.spec)
            if model.spec != truth.spec:
                raise GeoverifyError(f"model grid differs from truth grid for {stem}")
        except (GeoverifyError, OSError) as e:
            print(f"geoverify: skipping {stem}: {e}", file=sys.stderr)
            failures += 1
            continue
        weights = latitude_weights(truth.spec)
        for var in truth.catalog:
            if var.role != "input-output":
                continue
            t2 = select_channel(truth, var)
            peak = args.psnr_peak if args.psnr_peak else metrics.dynamic_range(t2)
            for method, cube in (("bilinear", baseline), ("model", model)):
                c2 = select_channel(cube, var)
                rmse = metrics.weighted_rmse(c2, t2, weights)
                rows.append((truth.valid_time, var, method, "rmse", rmse, peak))
                samples.setdefault((var.token, "rmse", method), []).append(
                    (truth.valid_time, rmse)
                )
                if peak > 0.0:
                    try:
                        value = metrics.psnr(c2, t2, peak)
                    except PerfectMatch:
                        value = float("inf")
                    rows.append((truth.valid_time, var, method, "psnr", value, peak))
                    samples.setdefault((var.token, "psnr", method), []).append(
                        (truth.valid_time, value)
                    )
    if not rows:
        print("geoverify: no downscaling samples evaluated", file=sys.stderr)
        return EXIT_DATA

    params = {
        "coarse": args.coarse,
        "truth": args.truth,
        "model": args.model,
        "psnr_peak": args.psnr_peak if args.psnr_peak else "reference-range",
    }
    rows.sort(key=lambda r: (r[0], r[1].token, r[2], r[3]))
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# params: {' '.join(f'{k}={v}' for k, v in params.items())}\n")
        f.write("time,variable,level,method,metric,value,peak\n")
        for t, var, method, metric, value, peak in rows:
            level = "surface" if var.level is None else var.level
            f.write(
                f"{cubeio.format_time(t)},{var.name},{level},{method},{metric},"
                f"{format(value, '.6g')},{format(peak, '.6g')}\n"
            )

    out_base = Path(args.out)
    var_tokens = sorted({key[0] for key in samples})
    for token in var_tokens:
        for metric in ("rmse", "psnr"):
            model_s = samples.get((token, metric, "model"))
            base_s = samples.get((token, metric, "bilinear"))
            if not model_s or not base_s:
                continue
            matrix = metrics.month_hour_matrix(model_s, base_s)
            capped = int(np.isinf(matrix).sum())
            matrix[np.isposinf(matrix)] = 1.0
            matrix[np.isneginf(matrix)] = -1.0
            matrix_params = dict(params, variable=token, metric=metric, capped_cells=capped)
            path = out_base.with_name(f"{out_base.stem}_nd_{token}_{metric}.csv")
            cubeio.write_month_hour_matrix(matrix, path, matrix_params)

    if failures:
        print(f"geoverify: {failures} sample(s) skipped", file=sys.stderr)
    return 0


# --- tropical cyclones ------------------------------------------------------------

def cmd_tc_track(args) -> int:
    cubes = [cubeio.read_cube(p) for p in cubeio.cube_paths(args.cubes)]
    if not cubes:
        print(f"geoverify: no cubes in {args.cubes}", file=sys.stderr)
        return EXIT_DATA
    cubes.sort(key=lambda c: c.valid_time)
    times = [c.valid_time for c in cubes]
    if len(set(times)) != len(times):
        raise GeoverifyError("duplicate cube valid times in input directory")

    seed_tracks = cubeio.read_tracks(args.seeds)
    out_tracks = []
    for seed_track in seed_tracks:
        seed = seed_track.points[0]
        if seed.time not in times:
            raise GeoverifyError(
                f"seed time {seed.time} for {seed_track.storm_id} matches no cube"
            )
        tail = cubes[times.index(seed.time):]
        out_tracks.append(
            tc.track_cyclone(
                tail,
                seed,
                search_radius_km=args.search_radius_km,
                intensity_radius_km=args.intensity_radius_km,
                closed_low_hpa=args.closed_low_hpa,
                ring_width_km=args.ring_width_km,
                storm_id=seed_track.storm_id,
                name=seed_track.name,
            )
        )
    params = {
        "cubes": args.cubes,
        "seeds": args.seeds,
        "search_radius_km": args.search_radius_km,
        "intensity_radius_km": args.intensity_radius_km,
        "closed_low_hpa": args.closed_low_hpa,
        "ring_width_km": args.ring_width_km,
    }
    cubeio.write_tracks(out_tracks, args.out, params)
    incomplete = [t.storm_id for t in out_tracks if not t.complete]
    if incomplete:
        print(
            f"geoverify: tracking stopped early for: {', '.join(incomplete)}",
            file=sys.stderr,
        )
    return 0


def cmd_tc_eval(args) -> int:
    forecast_paths = [p for p in args.forecast.split(",") if p]
    source_names = (
        [s for s in args.sources.split(",") if s]
        if args.sources
        else [Path(p).stem for p in forecast_paths]
    )
    if len(source_names) != len(forecast_paths):
        raise ValueError("--sources must name each --forecast CSV")
    reference = cubeio.read_tracks(args.reference)
    tracks_by_source = {
        name: cubeio.read_tracks(path) for name, path in zip(source_names, forecast_paths)
    }
    matched = tc.concurrent_match(tracks_by_source, reference)
    if not matched:
        print("geoverify: no concurrently detected (storm, time) pairs", file=sys.stderr)
        return EXIT_DATA
    ref_by_id = {t.storm_id: t for t in reference}

    lines = []  # (source, storm_id, lead_label, metric, value, n)
    for name in source_names:
        fc_by_id = {t.storm_id: t for t in tracks_by_source[name]}
        track_pairs: list[tuple[int, float]] = []
        wind_pairs: list[tuple[int, float]] = []
        for storm_id, matched_times in sorted(matched.items()):
            fc, ref = fc_by_id[storm_id], ref_by_id[storm_id]
            storm_dist = []
            storm_wind = []
            for t in matched_times:
                fp, rp = fc.point_at(t), ref.point_at(t)
                lead = int(round((t - fc.points[0].time).total_seconds() / 3600.0))
                storm_dist.append((lead, tc.great_circle_km((fp.lat, fp.lon), (rp.lat, rp.lon))))
                storm_wind.append((lead, fp.ws_max - rp.ws_max))
            track_pairs += storm_dist
            wind_pairs += storm_wind
            lines.append(
                (name, storm_id, "pooled", "track_mae",
                 float(np.mean([d for _, d in storm_dist])), len(storm_dist))
            )
            lines.append(
                (name, storm_id, "pooled", "ws10m_rmse",
                 float(np.sqrt(np.mean(np.square([w for _, w in storm_wind])))), len(storm_wind))
            )

        def aggregate(pairs, reduce_fn, metric):
            lines.append((name, "ALL", "pooled", metric,
                          reduce_fn([v for _, v in pairs]), len(pairs)))
            leads = sorted({lead for lead, _ in pairs})
            per_lead = []
            for lead in leads:
                vals = [v for l, v in pairs if l == lead]
                value = reduce_fn(vals)
                per_lead.append(value)
                lines.append((name, "ALL", str(lead), metric, value, len(vals)))
            lines.append((name, "ALL", "per_lead_mean", metric,
                          float(np.mean(per_lead)), len(per_lead)))

        aggregate(track_pairs, lambda v: float(np.mean(v)), "track_mae")
        aggregate(wind_pairs, lambda v: float(np.sqrt(np.mean(np.square(v)))), "ws10m_rmse")

    params = {
        "forecast": args.forecast,
        "reference": args.reference,
        "sources": ",".join(source_names),
    }
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# params: {' '.join(f'{k}={v}' for k, v in params.items())}\n")
        f.write("source,storm_id,lead_hours,metric,value,n_samples\n")
        for source, storm, lead, metric, value, n in lines:
            f.write(f"{source},{storm},{lead},{metric},{format(value, '.6g')},{n}\n")
    return 0


def cmd_tc_filter(args) -> int:
    rows = cubeio.read_csv_rows(args.cases)
    expected = ["case_id", "model_mbe", "wrf_mbe", "both_under", "both_over", "track_err_km"]
    if not rows or rows[0][1] != expected:
        raise ParseError(1, f"expected header {','.join(expected)}")
    decisions = []
    for row_no, row in rows[1:]:
        if len(row) != len(expected):
            raise ParseError(row_no, f"expected {len(expected)} fields, got {len(row)}")
        try:
            decision = tc.filter_case(
                model_mbe=float(row[1]),
                wrf_mbe=float(row[2]),
                both_under=_parse_bool(row[3]),
                both_over=_parse_bool(row[4]),
                track_err_km=float(row[5]),
                comparable_tol=args.comparable_tol,
                track_threshold_km=args.track_threshold_km,
                case_id=row[0],
            )
        except (ValueError, InvalidFlags) as e:
            raise ParseError(row_no, str(e)) from None
        decisions.append(decision)
    params = {
        "cases": args.cases,
        "comparable_tol": args.comparable_tol,
        "track_threshold_km": args.track_threshold_km,
    }
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# params: {' '.join(f'{k}={v}' for k, v in params.items())}\n")
        f.write("case_id,decision,reason\n")
        for d in decisions:
            f.write(f"{d.case_id},{d.decision},{d.reason}\n")
    return 0


# --- climatology and fixtures -------------------------------------------------------

def cmd_climatology(args) -> int:
    cubes = [cubeio.read_cube(p) for p in cubeio.cube_paths(args.cubes)]
    clim = clim_mod.build_climatology(cubes)
    manifest = clim.save(args.out)
    print(manifest)
    return 0


def cmd_synth_vortex(args) -> int:
    spec = GridSpec(
        n_lat=args.n_lat,
        n_lon=args.n_lon,
        lat_start=args.lat_start,
        lat_step=args.lat_step,
        lon_start=args.lon_start,
        lon_step=args.lon_step,
    )
    start = cubeio.parse_time(args.start_time)
    cubes, truth = tc.synthetic_vortex_series(
        spec,
        start,
        args.steps,
        args.center_lat,
        args.center_lon,
        dlat_per_step=args.dlat_per_step,
        dlon_per_step=args.dlon_per_step,
        background_hpa=args.background_hpa,
        depth_hpa=args.depth_hpa,
        r0_km=args.r0_km,
        ws_peak=args.ws_peak,
        ring_km=args.ring_km,
        storm_id=args.storm_id,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for cube in cubes:
        cubeio.write_cube(cube, out_dir / f"{time_stem(cube.valid_time)}.gvc")
    params = {
        "grid": f"{args.n_lat}x{args.n_lon}",
        "lat_start": args.lat_start,
        "lat_step": args.lat_step,
        "lon_start": args.lon_start,
        "lon_step": args.lon_step,
        "center": f"{args.center_lat},{args.center_lon}",
        "steps": args.steps,
        "dlat_per_step": args.dlat_per_step,
        "dlon_per_step": args.dlon_per_step,
        "depth_hpa": args.depth_hpa,
        "r0_km": args.r0_km,
        "ws_peak": args.ws_peak,
        "ring_km": args.ring_km,
    }
    seed_track = tc.TcTrack(
        storm_id=truth.storm_id, name=truth.name, points=(truth.points[0],)
    )
    cubeio.write_tracks([seed_track], out_dir / "seeds.csv", params)
    cubeio.write_tracks([truth], out_dir / "truth.csv", params)
    print(out_dir)
    return 0


def cmd_vqa_score(args) -> int:
    items = vqa.read_vqa_items(args.items)
    records = vqa.score_items(items, benchmark=args.benchmark)
    params = {"items": args.items, "benchmark": args.benchmark}
    cubeio.write_report(records, args.out, params)
    return 0


# --- argument plumbing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the config code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_CONFIG)


def _parse_bool(text: str) -> bool:
    norm = text.strip().lower()
    if norm in ("1", "true", "yes"):
        return True
    if norm in ("0", "false", "no"):
        return False
    raise ValueError(f"bad boolean {text!r}")


def _default_threads() -> int:
    value = os.environ.get("GEOVERIFY_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="geoverify", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="latitude-weighted RMSE/ACC report")
    p.add_argument("--forecast", required=True, help="dir of <ISO>_<lead>.gvc forecast cubes")
    p.add_argument("--reference", required=True, help="dir of <ISO>.gvc reference cubes")
    p.add_argument("--climatology", default=None, help="climatology manifest CSV (for acc)")
    p.add_argument("--variables", required=True, help="comma list, e.g. Z500,T2M,WS10M")
    p.add_argument("--init-times", required=True, help="file of ISO init times, one per line")
    p.add_argument("--leads", required=True, help="lead hours: '6:240:6' or '6,12'")
    p.add_argument("--metrics", default="rmse,acc", help="subset of rmse,acc")
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--map-dir", default=None, help="also write per-gridpoint RMSE map cubes")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("downscale-eval", help="RMSE/PSNR vs bilinear baseline")
    p.add_argument("--coarse", required=True, help="dir of coarse <ISO>.gvc cubes")
    p.add_argument("--truth", required=True, help="dir of high-resolution truth cubes")
    p.add_argument("--model", required=True, help="dir of model downscaled cubes")
    p.add_argument("--psnr-peak", type=float, default=None,
                   help="fixed PSNR peak (default: reference max-min per field)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_downscale_eval)

    p = sub.add_parser("tc-track", help="track MSL minima from seed fixes")
    p.add_argument("--cubes", required=True, help="dir of <ISO>.gvc cubes (MSL, WS10M)")
    p.add_argument("--seeds", required=True, help="track CSV; first fix per storm seeds")
    p.add_argument("--search-radius-km", type=float, default=250.0)
    p.add_argument("--intensity-radius-km", type=float, default=250.0)
    p.add_argument("--closed-low-hpa", type=float, default=0.5)
    p.add_argument("--ring-width-km", type=float, default=100.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tc_track)

    p = sub.add_parser("tc-eval", help="track MAE and intensity RMSE vs reference")
    p.add_argument("--forecast", required=True, help="comma list of forecast track CSVs")
    p.add_argument("--reference", required=True, help="reference (best track) CSV")
    p.add_argument("--sources", default=None, help="names for the forecast CSVs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tc_eval)

    p = sub.add_parser("tc-filter", help="apply the training-pair filter rules")
    p.add_argument("--cases", required=True,
                   help="CSV: case_id,model_mbe,wrf_mbe,both_under,both_over,track_err_km")
    p.add_argument("--comparable-tol", type=float, default=1.0)
    p.add_argument("--track-threshold-km", type=float, default=10.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tc_filter)

    p = sub.add_parser("climatology", help="build per-(day,hour) mean fields")
    p.add_argument("--cubes", required=True)
    p.add_argument("--out", required=True, help="output directory (manifest + cubes)")
    p.set_defaults(func=cmd_climatology)

    p = sub.add_parser("synth-vortex", help="generate synthetic vortex cube series")
    p.add_argument("--out", required=True)
    p.add_argument("--n-lat", type=int, default=81)
    p.add_argument("--n-lon", type=int, default=121)
    p.add_argument("--lat-start", type=float, default=40.0)
    p.add_argument("--lat-step", type=float, default=-0.25)
    p.add_argument("--lon-start", type=float, default=120.0)
    p.add_argument("--lon-step", type=float, default=0.25)
    p.add_argument("--center-lat", type=float, default=30.0)
    p.add_argument("--center-lon", type=float, default=135.0)
    p.add_argument("--start-time", default="2024-09-01T00:00:00Z")
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--dlat-per-step", type=float, default=0.0)
    p.add_argument("--dlon-per-step", type=float, default=1.0)
    p.add_argument("--background-hpa", type=float, default=1013.0)
    p.add_argument("--depth-hpa", type=float, default=30.0)
    p.add_argument("--r0-km", type=float, default=150.0)
    p.add_argument("--ws-peak", type=float, default=40.0)
    p.add_argument("--ring-km", type=float, default=100.0)
    p.add_argument("--storm-id", default="SYNTH")
    p.set_defaults(func=cmd_synth_vortex)

    p = sub.add_parser("vqa-score", help="score VQA predictions")
    p.add_argument("--items", required=True,
                   help="CSV: question_id,type,prediction,ground_truth")
    p.add_argument("--benchmark", default="vqa")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_vqa_score)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, NonMonotonicTime) as e:
        print(f"geoverify: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (MisalignedRange, UnknownVariable, InvalidFlags, NonPositivePeak, ValueError) as e:
        print(f"geoverify: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (GeoverifyError, OSError) as e:
        print(f"geoverify: data error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
