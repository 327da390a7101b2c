"""End-to-end tests of the batch CLI: subcommands, exit codes, determinism."""

import numpy as np
import pytest

from geoverify import (
    FieldCube,
    GridSpec,
    VariableCatalog,
    VariableId,
    bilinear_upsample,
    build_climatology,
)
from geoverify.cli import main, time_stem
from geoverify.cubeio import read_tracks, write_cube
from conftest import utc


SPEC = GridSpec(5, 8, 60.0, -30.0, 0.0, 45.0)
CATALOG = VariableCatalog([VariableId("Z", 500), VariableId("T2M")])


def _random_field_cube(rng, valid_time, offset=0.0):
    values = rng.normal(size=(2, 5, 8)) + offset
    return FieldCube(SPEC, CATALOG, valid_time, values.astype(np.float32))


def make_verify_fixture(tmp_path, init_times, leads, seed=0):
    """Forecast/reference cube dirs, an init-times file and a climatology."""
    rng = np.random.default_rng(seed)
    forecast_dir = tmp_path / "forecast"
    reference_dir = tmp_path / "reference"
    forecast_dir.mkdir()
    reference_dir.mkdir()
    from datetime import timedelta

    for t0 in init_times:
        for lead in leads:
            valid = t0 + timedelta(hours=lead)
            ref = _random_field_cube(rng, valid)
            fc = FieldCube(
                SPEC, CATALOG, valid,
                (np.asarray(ref.values) + rng.normal(scale=0.3, size=ref.values.shape))
                .astype(np.float32),
            )
            write_cube(fc, forecast_dir / f"{time_stem(t0)}_{lead}.gvc")
            ref_path = reference_dir / f"{time_stem(valid)}.gvc"
            if not ref_path.exists():
                write_cube(ref, ref_path)

    clim_cubes = []
    seen = set()
    for t0 in init_times:
        for lead in leads:
            valid = t0 + timedelta(hours=lead)
            key = (valid.month, valid.day, valid.hour)
            if key in seen:
                continue
            seen.add(key)
            clim_cubes.append(
                _random_field_cube(rng, valid.replace(year=2020), offset=0.1)
            )
    clim_dir = tmp_path / "clim"
    manifest = build_climatology(clim_cubes).save(clim_dir)

    times_file = tmp_path / "inits.txt"
    times_file.write_text("".join(f"{t.isoformat()}\n" for t in init_times))
    return forecast_dir, reference_dir, manifest, times_file


class TestVerify:
    def test_one_pair_gives_two_rows(self, tmp_path):
        init_times = [utc(2024, 1, 1, 0)]
        fdir, rdir, manifest, times_file = make_verify_fixture(tmp_path, init_times, [6])
        out = tmp_path / "report.csv"
        code = main([
            "verify", "--forecast", str(fdir), "--reference", str(rdir),
            "--climatology", str(manifest), "--variables", "Z500",
            "--init-times", str(times_file), "--leads", "6", "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# params:")
        assert lines[1] == "variable,level,lead_hours,metric,value"
        assert len(lines) == 4
        assert lines[2].startswith("Z,500,6,acc,")
        assert lines[3].startswith("Z,500,6,rmse,")

    def test_missing_climatology_manifest_exits_2(self, tmp_path, capsys):
        init_times = [utc(2024, 1, 1, 0)]
        fdir, rdir, _, times_file = make_verify_fixture(tmp_path, init_times, [6])
        missing = tmp_path / "nowhere" / "manifest.csv"
        code = main([
            "verify", "--forecast", str(fdir), "--reference", str(rdir),
            "--climatology", str(missing), "--variables", "Z500",
            "--init-times", str(times_file), "--leads", "6",
            "--out", str(tmp_path / "r.csv"),
        ])
        assert code == 2
        assert str(missing) in capsys.readouterr().err

    def test_leads_range_spec(self, tmp_path):
        init_times = [utc(2024, 1, 1, 0)]
        leads = [6, 12, 18, 24]
        fdir, rdir, manifest, times_file = make_verify_fixture(tmp_path, init_times, leads)
        out = tmp_path / "report.csv"
        code = main([
            "verify", "--forecast", str(fdir), "--reference", str(rdir),
            "--variables", "T2M", "--metrics", "rmse",
            "--init-times", str(times_file), "--leads", "6:24:6", "--out", str(out),
        ])
        assert code == 0
        leads_seen = [int(line.split(",")[2]) for line in out.read_text().splitlines()[2:]]
        assert leads_seen == leads

    def test_valid_time_mismatch_is_hard_error(self, tmp_path):
        """A forecast file whose header valid time is not init + lead exits 2."""
        init_times = [utc(2024, 1, 1, 0)]
        fdir, rdir, manifest, times_file = make_verify_fixture(tmp_path, init_times, [6])
        good = fdir / f"{time_stem(init_times[0])}_6.gvc"
        rogue = _random_field_cube(np.random.default_rng(5), utc(2024, 1, 1, 18))
        write_cube(rogue, good)
        code = main([
            "verify", "--forecast", str(fdir), "--reference", str(rdir),
            "--variables", "Z500", "--metrics", "rmse",
            "--init-times", str(times_file), "--leads", "6",
            "--out", str(tmp_path / "r.csv"),
        ])
        assert code == 2

    def test_missing_forecast_cube_exits_2(self, tmp_path):
        init_times = [utc(2024, 1, 1, 0)]
        fdir, rdir, manifest, times_file = make_verify_fixture(tmp_path, init_times, [6])
        (fdir / f"{time_stem(init_times[0])}_6.gvc").unlink()
        code = main([
            "verify", "--forecast", str(fdir), "--reference", str(rdir),
            "--variables", "Z500", "--metrics", "rmse",
            "--init-times", str(times_file), "--leads", "6",
            "--out", str(tmp_path / "r.csv"),
        ])
        assert code == 2

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        init_times = [utc(2024, 1, d, h) for d in (1, 2) for h in (0, 12)]
        fdir, rdir, manifest, times_file = make_verify_fixture(tmp_path, init_times, [6, 12])
        outputs = []
        for threads, name in ((1, "a.csv"), (8, "b.csv")):
            out = tmp_path / name
            code = main([
                "verify", "--forecast", str(fdir), "--reference", str(rdir),
                "--climatology", str(manifest), "--variables", "Z500,T2M",
                "--init-times", str(times_file), "--leads", "6,12",
                "--threads", str(threads), "--out", str(out),
            ])
            assert code == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_rerun_is_byte_identical(self, tmp_path):
        init_times = [utc(2024, 1, 1, 0)]
        fdir, rdir, manifest, times_file = make_verify_fixture(tmp_path, init_times, [6])
        args = [
            "verify", "--forecast", str(fdir), "--reference", str(rdir),
            "--climatology", str(manifest), "--variables", "Z500",
            "--init-times", str(times_file), "--leads", "6",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_leads_spec_exits_4(self, tmp_path):
        init_times = [utc(2024, 1, 1, 0)]
        fdir, rdir, manifest, times_file = make_verify_fixture(tmp_path, init_times, [6])
        code = main([
            "verify", "--forecast", str(fdir), "--reference", str(rdir),
            "--variables", "Z500", "--metrics", "rmse",
            "--init-times", str(times_file), "--leads", "6:x",
            "--out", str(tmp_path / "r.csv"),
        ])
        assert code == 4

    def test_usage_error_exits_4(self):
        with pytest.raises(SystemExit) as err:
            main(["verify", "--forecast", "x"])
        assert err.value.code == 4

    def test_input_only_variable_exits_4(self, tmp_path):
        from geoverify import weather_catalog

        init_times = [utc(2024, 1, 1, 0)]
        fdir = tmp_path / "forecast"
        rdir = tmp_path / "reference"
        fdir.mkdir()
        rdir.mkdir()
        catalog = weather_catalog(include_input_only=True)
        rng = np.random.default_rng(11)
        spec = GridSpec(3, 4, 45.0, -45.0, 0.0, 90.0)
        valid = utc(2024, 1, 1, 6)
        values = rng.normal(size=(len(catalog), 3, 4)).astype(np.float32)
        write_cube(FieldCube(spec, catalog, valid, values),
                   fdir / f"{time_stem(init_times[0])}_6.gvc")
        write_cube(FieldCube(spec, catalog, valid, values),
                   rdir / f"{time_stem(valid)}.gvc")
        times_file = tmp_path / "inits.txt"
        times_file.write_text(f"{init_times[0].isoformat()}\n")
        code = main([
            "verify", "--forecast", str(fdir), "--reference", str(rdir),
            "--variables", "LSM", "--metrics", "rmse",
            "--init-times", str(times_file), "--leads", "6",
            "--out", str(tmp_path / "r.csv"),
        ])
        assert code == 4

    def test_env_var_sets_default_threads(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GEOVERIFY_THREADS", "4")
        from geoverify.cli import build_parser

        args = build_parser().parse_args([
            "verify", "--forecast", "f", "--reference", "r", "--variables", "Z500",
            "--init-times", "t", "--leads", "6", "--out", "o",
        ])
        assert args.threads == 4

    def test_rmse_map_output(self, tmp_path):
        from geoverify.cubeio import read_cube

        init_times = [utc(2024, 1, 1, 0)]
        fdir, rdir, manifest, times_file = make_verify_fixture(tmp_path, init_times, [6])
        map_dir = tmp_path / "maps"
        code = main([
            "verify", "--forecast", str(fdir), "--reference", str(rdir),
            "--variables", "Z500", "--metrics", "rmse",
            "--init-times", str(times_file), "--leads", "6",
            "--out", str(tmp_path / "r.csv"), "--map-dir", str(map_dir),
        ])
        assert code == 0
        cube = read_cube(map_dir / "rmsemap_Z500_6.gvc")
        assert cube.values.shape == (1, 5, 8)
        assert (np.asarray(cube.values) >= 0).all()


class TestDownscaleEval:
    COARSE_SPEC = GridSpec(20, 40, 50.0, -1.5, 100.0, 1.5)
    FINE_SPEC = GridSpec(25, 33, 48.0, -0.25, 102.0, 0.25)
    DS_CATALOG = VariableCatalog([VariableId("T2M"), VariableId("WS10M")])

    def _write_fixture(self, tmp_path, times, model_mode):
        rng = np.random.default_rng(7)
        coarse_dir, truth_dir, model_dir = (tmp_path / n for n in ("coarse", "truth", "model"))
        for d in (coarse_dir, truth_dir, model_dir):
            d.mkdir()
        for t in times:
            coarse = FieldCube(
                self.COARSE_SPEC, self.DS_CATALOG, t,
                rng.normal(loc=285.0, scale=5.0, size=(2, 20, 40)).astype(np.float32),
            )
            baseline = bilinear_upsample(coarse, self.FINE_SPEC)
            truth_vals = np.asarray(baseline.values) + rng.normal(
                scale=0.5, size=baseline.values.shape
            ).astype(np.float32)
            truth = FieldCube(self.FINE_SPEC, self.DS_CATALOG, t, truth_vals)
            if model_mode == "identity":
                model = truth
            else:
                model = baseline
            write_cube(coarse, coarse_dir / f"{time_stem(t)}.gvc")
            write_cube(truth, truth_dir / f"{time_stem(t)}.gvc")
            write_cube(model, model_dir / f"{time_stem(t)}.gvc")
        return coarse_dir, truth_dir, model_dir

    def test_identity_model_reports_inf_and_caps_nd(self, tmp_path):
        times = [utc(2024, 2, 2, 18)]
        coarse, truth, model = self._write_fixture(tmp_path, times, "identity")
        out = tmp_path / "ds.csv"
        code = main([
            "downscale-eval", "--coarse", str(coarse), "--truth", str(truth),
            "--model", str(model), "--out", str(out),
        ])
        assert code == 0
        text = out.read_text()
        model_psnr_rows = [
            line for line in text.splitlines() if ",model,psnr," in line
        ]
        assert model_psnr_rows and all(",inf," in row for row in model_psnr_rows)
        nd = (tmp_path / "ds_nd_T2M_psnr.csv").read_text().splitlines()
        assert "capped_cells=1" in nd[0]
        assert nd[3] == "2,NA,NA,NA,1"

    def test_single_sample_single_cell(self, tmp_path):
        times = [utc(2024, 2, 2, 18)]
        coarse, truth, model = self._write_fixture(tmp_path, times, "bilinear")
        out = tmp_path / "ds.csv"
        assert main([
            "downscale-eval", "--coarse", str(coarse), "--truth", str(truth),
            "--model", str(model), "--out", str(out),
        ]) == 0
        nd = (tmp_path / "ds_nd_T2M_rmse.csv").read_text().splitlines()
        cells = [c for line in nd[2:] for c in line.split(",")[1:]]
        assert cells.count("NA") == 47

    def test_grid_mismatch_reported_per_file(self, tmp_path, capsys):
        times = [utc(2024, 2, 2, 18), utc(2024, 7, 1, 6)]
        coarse, truth, model = self._write_fixture(tmp_path, times, "bilinear")
        bad_spec = GridSpec(10, 12, 48.0, -0.25, 102.0, 0.25)
        rng = np.random.default_rng(9)
        bad = FieldCube(bad_spec, self.DS_CATALOG, times[0],
                        rng.normal(size=(2, 10, 12)).astype(np.float32))
        write_cube(bad, model / f"{time_stem(times[0])}.gvc")
        out = tmp_path / "ds.csv"
        code = main([
            "downscale-eval", "--coarse", str(coarse), "--truth", str(truth),
            "--model", str(model), "--out", str(out),
        ])
        assert code == 0  # the other sample still evaluates
        err = capsys.readouterr().err
        assert "skipping" in err and time_stem(times[0]) in err
        times_in_report = {line.split(",")[0] for line in out.read_text().splitlines()[2:]}
        assert times_in_report == {"2024-07-01T06:00:00Z"}

    def test_bilinear_vs_bilinear_gives_zero_cells(self, tmp_path):
        times = [utc(2024, 2, 2, 18), utc(2024, 7, 1, 6)]
        coarse, truth, model = self._write_fixture(tmp_path, times, "bilinear")
        out = tmp_path / "ds.csv"
        assert main([
            "downscale-eval", "--coarse", str(coarse), "--truth", str(truth),
            "--model", str(model), "--out", str(out),
        ]) == 0
        for metric in ("rmse", "psnr"):
            nd = (tmp_path / f"ds_nd_T2M_{metric}.csv").read_text().splitlines()
            values = [
                c for line in nd[2:] for c in line.split(",")[1:] if c != "NA"
            ]
            assert values and all(float(v) == 0.0 for v in values)


class TestTcSubcommands:
    def _synth(self, tmp_path, **flags):
        out_dir = tmp_path / "vortex"
        args = ["synth-vortex", "--out", str(out_dir)]
        for key, value in flags.items():
            args += [f"--{key.replace('_', '-')}", str(value)]
        assert main(args) == 0
        return out_dir

    def test_synth_then_track_recovers_planted_track(self, tmp_path):
        out_dir = self._synth(tmp_path, steps=4, dlon_per_step=1.0)
        tracked = tmp_path / "tracked.csv"
        code = main([
            "tc-track", "--cubes", str(out_dir), "--seeds", str(out_dir / "seeds.csv"),
            "--out", str(tracked),
        ])
        assert code == 0
        [result] = read_tracks(tracked)
        [truth] = read_tracks(out_dir / "truth.csv")
        assert len(result.points) == 4
        from geoverify import great_circle_km

        cell_km = 0.25 * 111.195
        for p, q in zip(result.points, truth.points):
            assert great_circle_km((p.lat, p.lon), (q.lat, q.lon)) <= cell_km * 1.5

    def test_tc_eval_identical_tracks_zero_errors(self, tmp_path):
        out_dir = self._synth(tmp_path, steps=3)
        out = tmp_path / "eval.csv"
        code = main([
            "tc-eval", "--forecast", str(out_dir / "truth.csv"),
            "--reference", str(out_dir / "truth.csv"),
            "--sources", "model", "--out", str(out),
        ])
        assert code == 0
        pooled = [
            line for line in out.read_text().splitlines()
            if line.startswith("model,ALL,pooled,")
        ]
        assert len(pooled) == 2
        assert all(line.split(",")[4] == "0" for line in pooled)

    def test_tc_filter_rule_exemplars(self, tmp_path):
        cases = tmp_path / "cases.csv"
        cases.write_text(
            "case_id,model_mbe,wrf_mbe,both_under,both_over,track_err_km\n"
            "c1,-2,-5,true,false,5\n"
            "c2,-6,-3,true,false,5\n"
            "c3,-3.5,-3,true,false,15\n"
        )
        out = tmp_path / "decisions.csv"
        assert main(["tc-filter", "--cases", str(cases), "--out", str(out)]) == 0
        decisions = [line.split(",")[1] for line in out.read_text().splitlines()[2:]]
        assert decisions == ["Exclude", "Strengthen", "Exclude"]

    def test_tc_filter_bad_row_exits_3(self, tmp_path):
        cases = tmp_path / "cases.csv"
        cases.write_text(
            "case_id,model_mbe,wrf_mbe,both_under,both_over,track_err_km\n"
            "c1,notanumber,-5,true,false,5\n"
        )
        assert main(["tc-filter", "--cases", str(cases),
                     "--out", str(tmp_path / "d.csv")]) == 3

    def test_outputs_start_with_params_line(self, tmp_path):
        out_dir = self._synth(tmp_path, steps=2)
        tracked = tmp_path / "tracked.csv"
        main(["tc-track", "--cubes", str(out_dir), "--seeds", str(out_dir / "seeds.csv"),
              "--out", str(tracked)])
        assert tracked.read_text().startswith("# params:")
        assert "search_radius_km=250" in tracked.read_text().splitlines()[0]


class TestClimatologyCommand:
    def test_build_and_reuse(self, tmp_path, capsys):
        rng = np.random.default_rng(3)
        cube_dir = tmp_path / "cubes"
        cube_dir.mkdir()
        for year in (2019, 2020):
            cube = _random_field_cube(rng, utc(year, 6, 1, 12))
            write_cube(cube, cube_dir / f"{time_stem(cube.valid_time)}.gvc")
        out_dir = tmp_path / "clim"
        assert main(["climatology", "--cubes", str(cube_dir), "--out", str(out_dir)]) == 0
        manifest = out_dir / "manifest.csv"
        assert manifest.exists()
        from geoverify.climatology import Climatology

        clim = Climatology.load(manifest)
        assert clim.counts[(153, 12)] == 2


class TestVqaCommand:
    def test_scores_to_report(self, tmp_path):
        items = tmp_path / "items.csv"
        items.write_text(
            "question_id,type,prediction,ground_truth\n"
            "q1,closed,Yes,yes\n"
            "q2,closed,no,yes\n"
            "q3,open,the left lobe,left lower lobe\n"
        )
        out = tmp_path / "scores.csv"
        assert main(["vqa-score", "--items", str(items), "--benchmark", "vqa-rad",
                     "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[2] == "VQA-RAD,surface,0,closed_accuracy,0.5"
        assert lines[3].startswith("VQA-RAD,surface,0,open_recall,0.666667")

    def test_parse_error_exits_3(self, tmp_path):
        items = tmp_path / "items.csv"
        items.write_text("question_id,type,prediction,ground_truth\nq1,weird,a,b\n")
        assert main(["vqa-score", "--items", str(items),
                     "--out", str(tmp_path / "s.csv")]) == 3
