"""
The full pipeline from the command line
=======================================

Simulates a synthetic dataset to disk, validates a run configuration
against it, extracts per-zone time series for two method combinations,
and correlates the results into report.csv and case_study.csv. The same
four subcommands drive real data, with the simulated directory swapped
for downloaded rasters.
"""

import json
import tempfile
from pathlib import Path

from ntlpipe.cli import main

root = Path(tempfile.mkdtemp(prefix="ntl_cli_"))

# A scene spec is plain JSON: grid, zones, per-zone signal, and noise.
scene = {
    "seed": 9,
    "dataset": "VSC-NTL",
    "grid": {"ncols": 12, "nrows": 12, "x_origin": 0.0, "y_origin": 0.0, "cell_size": 1.0},
    "event_month": "2018-10",
    "zones": {
        "nx": 3,
        "ny": 2,
        "damage_ratios": [0.05, 0.1, 0.2, 0.3, 0.45, 0.6],
        "populations": [800, 1600, 2400, 3200, 4000, 4800],
    },
    "base_radiance": [18.0, 22.0, 26.0, 30.0, 34.0, 38.0],
    "noise": {"gaussian_sigma": 0.1, "bloom_rate": 0.03},
}
scene_path = root / "scene.json"
scene_path.write_text(json.dumps(scene, indent=2))

print("$ ntlpipe simulate")
main(["simulate", "--config", str(scene_path), "--out", str(root / "sim")])

# The run config points at the simulated directory exactly as it would
# point at real monthly composites. Relative paths resolve against the
# config file itself.
run = {
    "datasets": [{"kind": "VSC-NTL", "raster_dir": "sim/VSC-NTL"}],
    "zones": "sim/zones.geojson",
    "hurricanes": [{"name": "DEMO", "event_month": "2018-10"}],
    "configs": ["raw", "clip"],
    "output_dir": "out",
    "case_study_k": 3,
}
run_path = root / "run.json"
run_path.write_text(json.dumps(run, indent=2))

print("\n$ ntlpipe validate")
main(["validate", "--config", str(run_path)])

print("\n$ ntlpipe extract")
main(["extract", "--config", str(run_path)])

print("\n$ ntlpipe report")
main(["report", "--config", str(run_path)])

print("\nreport.csv:")
print((root / "out" / "report.csv").read_text().strip())

series = sorted((root / "out").rglob("Z01.csv"))[0]
print("\nfirst series file:", series.relative_to(root))
print("\n".join(series.read_text().splitlines()[:4]))
print("...")
print("outputs under:", root / "out")
