"""End-to-end tests for the command line: simulate, validate, extract, report."""

import csv
import hashlib
import json
from pathlib import Path

import pytest

from ntlpipe import MonthIndex, read_series_csv
from ntlpipe.cli import main

VSC_SCENE = {
    "seed": 7,
    "dataset": "VSC-NTL",
    "grid": {"ncols": 12, "nrows": 12, "x_origin": 0.0, "y_origin": 0.0, "cell_size": 1.0},
    "event_month": "2018-10",
    "zones": {
        "nx": 3,
        "ny": 2,
        "damage_ratios": [0.05, 0.1, 0.2, 0.3, 0.45, 0.6],
        "populations": [500, 1500, 2500, 3500, 4500, 5500],
    },
    "base_radiance": [18.0, 22.0, 26.0, 30.0, 34.0, 38.0],
    "noise": {"gaussian_sigma": 0.05, "cloud_rate": 0.1, "corruption_scale": 1.0},
}

VNP_SCENE = {
    "seed": 8,
    "dataset": "VNP46A2",
    "grid": VSC_SCENE["grid"],
    "event_month": "2018-10",
    "zones": VSC_SCENE["zones"],
    "base_radiance": VSC_SCENE["base_radiance"],
    "noise": {"gaussian_sigma": 0.05, "cloud_rate": 0.2, "corruption_scale": 1.0},
}


def write_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2))
    return path


def run_config_doc():
    return {
        "datasets": [
            {"kind": "VSC-NTL", "raster_dir": "simv/VSC-NTL"},
            {"kind": "VNP46A2", "raster_dir": "simn/VNP46A2"},
        ],
        "zones": "simv/zones.geojson",
        "hurricanes": [{"name": "TestStorm", "event_month": "2018-10"}],
        "configs": "all",
        "output_dir": "out",
    }


def tree_digest(root):
    """Stable content hash of every file under a directory."""
    digests = {}
    for path in sorted(Path(root).rglob("*")):
        if path.is_file():
            digests[str(path.relative_to(root))] = hashlib.sha256(path.read_bytes()).hexdigest()
    return digests


@pytest.fixture(scope="class")
def pipeline_run(tmp_path_factory):
    """One complete simulate -> validate -> extract -> report round trip."""
    root = tmp_path_factory.mktemp("pipeline")
    scene_v = write_json(root / "scene_v.json", VSC_SCENE)
    scene_n = write_json(root / "scene_n.json", VNP_SCENE)
    config = write_json(root / "run.json", run_config_doc())
    codes = {
        "simulate_v": main(["simulate", "--config", str(scene_v), "--out", str(root / "simv")]),
        "simulate_n": main(["simulate", "--config", str(scene_n), "--out", str(root / "simn")]),
    }
    codes["validate"] = main(["validate", "--config", str(config)])
    codes["extract"] = main(["extract", "--config", str(config)])
    codes["report"] = main(["report", "--config", str(config)])
    return root, config, codes


class TestPipelineRoundTrip:
    def test_every_stage_exits_zero(self, pipeline_run):
        _, _, codes = pipeline_run
        assert codes == {k: 0 for k in codes}

    def test_simulate_writes_the_dataset_layout(self, pipeline_run):
        root, _, _ = pipeline_run
        dataset_dir = root / "simv" / "VSC-NTL"
        months = [f"{MonthIndex(2017, 10) + i}" for i in range(25)]
        for month in months:
            assert (dataset_dir / f"{month}.asc").is_file()
            assert (dataset_dir / f"{month}.qf.asc").is_file()
        assert (dataset_dir / "built_fraction.asc").is_file()
        assert (root / "simv" / "zones.geojson").is_file()
        assert (root / "simv" / "oracle.csv").is_file()

    def test_oracle_lists_every_method_combination(self, pipeline_run):
        root, _, _ = pipeline_run
        with open(root / "simv" / "oracle.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["config"] for r in rows] == [
            "raw",
            "clip",
            "remove",
            "built",
            "clip+built",
            "remove+built",
            "quality",
            "clip+quality",
            "remove+quality",
            "built+quality",
            "clip+built+quality",
            "remove+built+quality",
        ]
        assert all(-1.0 <= float(r["recovered_pcc"]) <= 1.0 for r in rows)
        with open(root / "simn" / "oracle.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["config"] for r in rows] == ["raw", "built", "quality", "built+quality"]

    def test_extract_writes_one_csv_per_combination(self, pipeline_run):
        root, _, _ = pipeline_run
        out = root / "out"
        files = sorted(out.rglob("*.csv"))
        series_files = [f for f in files if f.name not in ("report.csv", "case_study.csv")]
        # (12 VSC-NTL + 4 VNP46A2 configs) x 1 hurricane x 6 zones
        assert len(series_files) == 96
        sample = out / "VSC-NTL" / "clip+quality" / "TestStorm" / "Z04.csv"
        assert sample.is_file()
        series = read_series_csv(sample)
        assert series.zone_id == "Z04"
        assert len(series.months) == 25
        assert series.months[0] == MonthIndex(2017, 10)

    def test_report_has_one_row_per_combination(self, pipeline_run):
        root, _, _ = pipeline_run
        with open(root / "out" / "report.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 16
        assert [r["dataset"] for r in rows] == ["VSC-NTL"] * 12 + ["VNP46A2"] * 4
        assert all(r["n_samples"] == "6" for r in rows)
        assert all(-1.0 <= float(r["pcc"]) <= 1.0 for r in rows)

    def test_report_pcc_matches_oracle_exactly(self, pipeline_run):
        # extract/report round-trips through CSV; full-precision fields make
        # the recomputed correlation identical to the in-process oracle
        root, _, _ = pipeline_run
        with open(root / "simv" / "oracle.csv", newline="") as fh:
            oracle = {r["config"]: r["recovered_pcc"] for r in csv.DictReader(fh)}
        with open(root / "out" / "report.csv", newline="") as fh:
            report = {r["methods"]: r["pcc"] for r in csv.DictReader(fh) if r["dataset"] == "VSC-NTL"}
        assert report == oracle

    def test_case_study_covers_selected_zones_every_month(self, pipeline_run):
        root, _, _ = pipeline_run
        with open(root / "out" / "case_study.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        # 16 combinations x 1 hurricane x 6 case-study zones x 25 months
        assert len(rows) == 2400
        zones = {r["zone_id"] for r in rows}
        assert zones == {"Z06", "Z05", "Z04", "Z01", "Z02", "Z03"}
        groups = {(r["zone_id"], r["group"]) for r in rows}
        assert ("Z06", "top") in groups  # highest damage ratio
        assert ("Z01", "bottom") in groups  # lowest damage ratio

    def test_existing_outputs_refused_without_force(self, pipeline_run, capsys):
        root, config, _ = pipeline_run
        assert main(["extract", "--config", str(config)]) == 1
        err = capsys.readouterr().err
        assert "exists" in err and "--force" in err
        assert main(["report", "--config", str(config)]) == 1
        scene = root / "scene_v.json"
        assert main(["simulate", "--config", str(scene), "--out", str(root / "simv")]) == 1

    def test_force_rerun_is_byte_identical(self, pipeline_run):
        root, config, _ = pipeline_run
        before = tree_digest(root / "out")
        assert main(["extract", "--config", str(config), "--force"]) == 0
        assert main(["report", "--config", str(config), "--force"]) == 0
        assert tree_digest(root / "out") == before

    def test_parallel_extract_is_byte_identical(self, pipeline_run):
        root, config, _ = pipeline_run
        out2 = root / "out_parallel"
        assert main(["extract", "--config", str(config), "--out", str(out2), "--jobs", "4"]) == 0
        reference = {
            name: digest
            for name, digest in tree_digest(root / "out").items()
            if name.endswith(".csv") and not name.endswith(("report.csv", "case_study.csv"))
        }
        assert tree_digest(out2) == reference


class TestSimulateDeterminism:
    def test_same_spec_same_bytes(self, tmp_path):
        scene = write_json(tmp_path / "scene.json", VSC_SCENE)
        assert main(["simulate", "--config", str(scene), "--out", str(tmp_path / "a")]) == 0
        assert main(["simulate", "--config", str(scene), "--out", str(tmp_path / "b")]) == 0
        assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")

    def test_out_directory_required(self, tmp_path, capsys):
        scene = write_json(tmp_path / "scene.json", VSC_SCENE)
        assert main(["simulate", "--config", str(scene)]) == 1
        assert "out" in capsys.readouterr().err


class TestValidate:
    def test_missing_dataset_dir_fails(self, tmp_path, capsys):
        scene = write_json(tmp_path / "scene.json", VSC_SCENE)
        main(["simulate", "--config", str(scene), "--out", str(tmp_path / "simv")])
        doc = run_config_doc()
        doc["datasets"] = [doc["datasets"][0], {"kind": "VNP46A2", "raster_dir": "nowhere"}]
        config = write_json(tmp_path / "run.json", doc)
        assert main(["validate", "--config", str(config)]) == 1
        assert "nowhere" in capsys.readouterr().out

    def test_event_month_outside_data_fails(self, tmp_path, capsys):
        scene = write_json(tmp_path / "scene.json", VSC_SCENE)
        main(["simulate", "--config", str(scene), "--out", str(tmp_path / "simv")])
        doc = run_config_doc()
        doc["datasets"] = [doc["datasets"][0]]
        doc["hurricanes"] = [{"name": "Ghost", "event_month": "2030-01"}]
        config = write_json(tmp_path / "run.json", doc)
        assert main(["validate", "--config", str(config)]) == 1
        assert "2030-01" in capsys.readouterr().out

    def test_single_dataset_run_validates(self, tmp_path):
        scene = write_json(tmp_path / "scene.json", VSC_SCENE)
        main(["simulate", "--config", str(scene), "--out", str(tmp_path / "simv")])
        doc = run_config_doc()
        doc["datasets"] = [doc["datasets"][0]]
        config = write_json(tmp_path / "run.json", doc)
        assert main(["validate", "--config", str(config)]) == 0


class TestDailyAggregation:
    GRID_HEADER = "ncols 2\nnrows 2\nxllcorner 0.0\nyllcorner 0.0\ncellsize 1.0\nNODATA_value -9999.0\n"

    def write_asc(self, path, rows):
        path.parent.mkdir(parents=True, exist_ok=True)
        body = "\n".join(" ".join(str(v) for v in row) for row in rows)
        path.write_text(self.GRID_HEADER + body + "\n")

    def build_dataset(self, root):
        d = root / "data" / "VNP46A2"
        # monthly files either side of the event month
        for month in ("2018-09", "2018-11"):
            self.write_asc(d / f"{month}.asc", [[10.0, 10.0], [10.0, 10.0]])
            self.write_asc(d / f"{month}.qf.asc", [[50, 50], [50, 50]])
        # the event month exists only as three daily files; pixel (0,0) is
        # majority low-quality, every other pixel is clean
        for day, value, q00 in (("01", 1.0, 50), ("02", 3.0, 242), ("03", 5.0, 242)):
            self.write_asc(d / f"2018-10-{day}.asc", [[value, value], [value, value]])
            self.write_asc(d / f"2018-10-{day}.qf.asc", [[q00, 50], [50, 50]])
        zones = {
            "type": "FeatureCollection",
            "features": [
                {
                    "type": "Feature",
                    "geometry": {
                        "type": "Polygon",
                        "coordinates": [[[0, 0], [2, 0], [2, 2], [0, 2], [0, 0]]],
                    },
                    "properties": {"zone_id": "Z1", "damage_ratio": 0.5, "population": 10},
                }
            ],
        }
        write_json(root / "zones.geojson", zones)
        return write_json(
            root / "run.json",
            {
                "datasets": [{"kind": "VNP46A2", "raster_dir": "data/VNP46A2"}],
                "zones": "zones.geojson",
                "hurricanes": [{"name": "S", "event_month": "2018-10"}],
                "configs": ["raw", "quality"],
                "months_before": 1,
                "months_after": 1,
                "output_dir": "out",
            },
        )

    def test_daily_median_feeds_the_raw_series(self, tmp_path):
        config = self.build_dataset(tmp_path)
        assert main(["extract", "--config", str(config)]) == 0
        series = read_series_csv(tmp_path / "out" / "VNP46A2" / "raw" / "S" / "Z1.csv")
        # per-pixel median of days (1, 3, 5) is 3 everywhere
        assert series.get(MonthIndex(2018, 10)) == 3.0
        assert series.get(MonthIndex(2018, 9)) == 10.0

    def test_majority_vote_marks_the_flaky_pixel_low_quality(self, tmp_path):
        config = self.build_dataset(tmp_path)
        assert main(["extract", "--config", str(config)]) == 0
        series = read_series_csv(tmp_path / "out" / "VNP46A2" / "quality" / "S" / "Z1.csv")
        # pixel (0,0): high-quality on 1 of 3 observed days, so the month is
        # low-quality there and refills from September's 10.0; the other
        # three pixels keep the daily median 3.0
        assert series.get(MonthIndex(2018, 10)) == pytest.approx((10.0 + 3.0 * 3) / 4)

    def test_monthly_file_shadows_daily_files(self, tmp_path):
        config = self.build_dataset(tmp_path)
        d = tmp_path / "data" / "VNP46A2"
        self.write_asc(d / "2018-10.asc", [[7.0, 7.0], [7.0, 7.0]])
        self.write_asc(d / "2018-10.qf.asc", [[50, 50], [50, 50]])
        assert main(["extract", "--config", str(config)]) == 0
        series = read_series_csv(tmp_path / "out" / "VNP46A2" / "raw" / "S" / "Z1.csv")
        assert series.get(MonthIndex(2018, 10)) == 7.0


class TestConfigErrors:
    def test_missing_config_file(self, capsys):
        assert main(["validate", "--config", "/nonexistent/run.json"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_invalid_json(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text("{not json")
        assert main(["validate", "--config", str(config)]) == 1
        assert "invalid JSON" in capsys.readouterr().err

    def test_no_datasets_rejected(self, tmp_path, capsys):
        config = write_json(
            tmp_path / "run.json",
            {"zones": "z.geojson", "hurricanes": [{"name": "S", "event_month": "2018-10"}]},
        )
        assert main(["validate", "--config", str(config)]) == 1
        assert "dataset" in capsys.readouterr().err

    def test_unknown_dataset_kind_rejected(self, tmp_path, capsys):
        doc = run_config_doc()
        doc["datasets"][0]["kind"] = "DMSP-OLS"
        config = write_json(tmp_path / "run.json", doc)
        assert main(["validate", "--config", str(config)]) == 1
        assert "DMSP-OLS" in capsys.readouterr().err

    def test_duplicate_dataset_kind_rejected(self, tmp_path, capsys):
        doc = run_config_doc()
        doc["datasets"][1]["kind"] = "VSC-NTL"
        doc["datasets"][1]["name"] = "other"
        config = write_json(tmp_path / "run.json", doc)
        assert main(["validate", "--config", str(config)]) == 1
        assert "duplicate" in capsys.readouterr().err

    def test_unknown_config_label_rejected(self, tmp_path, capsys):
        scene = write_json(tmp_path / "scene.json", VSC_SCENE)
        main(["simulate", "--config", str(scene), "--out", str(tmp_path / "simv")])
        doc = run_config_doc()
        doc["datasets"] = [doc["datasets"][0]]
        doc["configs"] = ["raw", "sparkle"]
        config = write_json(tmp_path / "run.json", doc)
        assert main(["validate", "--config", str(config)]) == 1
        assert "sparkle" in capsys.readouterr().err

    def test_threshold_label_for_vnp46a2_rejected(self, tmp_path, capsys):
        doc = run_config_doc()
        doc["datasets"] = [doc["datasets"][1]]
        doc["configs"] = ["clip"]
        config = write_json(tmp_path / "run.json", doc)
        assert main(["validate", "--config", str(config)]) == 1
        assert "threshold" in capsys.readouterr().err

    def test_report_without_extraction_names_missing_files(self, tmp_path, capsys):
        scene = write_json(tmp_path / "scene.json", VSC_SCENE)
        main(["simulate", "--config", str(scene), "--out", str(tmp_path / "simv")])
        doc = run_config_doc()
        doc["datasets"] = [doc["datasets"][0]]
        config = write_json(tmp_path / "run.json", doc)
        assert main(["report", "--config", str(config)]) == 1
        assert "missing extraction outputs" in capsys.readouterr().err
