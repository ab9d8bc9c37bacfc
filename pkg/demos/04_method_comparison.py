"""
Ranking pre-processing methods on a synthetic hurricane
=======================================================

Plants a known damage signal in a noisy synthetic scene, recovers the
per-zone radiance drops under every method combination, and ranks the
combinations by how well the recovered drops correlate with the planted
damage ratios.
"""

import numpy as np

from ntlpipe import (
    Dataset,
    EventWindow,
    GridSpec,
    MonthIndex,
    NoiseSpec,
    SceneSpec,
    enumerate_configs,
    generate_scene,
    oracle_check,
    tile_zones,
)

# Twenty-five zones tile the grid; damage grows smoothly from light to
# severe so a perfect method would recover a correlation near one.
grid = GridSpec(ncols=30, nrows=30, x_origin=0.0, y_origin=0.0, cell_size=1.0)
damages = [0.01 + (0.6 - 0.01) * i / 24 for i in range(25)]
zones = tile_zones(grid, 5, 5, damages)
bases = np.random.default_rng(42).uniform(15.0, 40.0, 25)

# The noise model matters: flagged corruption overwrites almost a third
# of all observations with bright garbage, but marks them untrusted.
noise = NoiseSpec(gaussian_sigma=0.05, cloud_rate=0.3, corruption_scale=1.5)
scene = generate_scene(
    SceneSpec(
        seed=0,
        grid=grid,
        zones=zones,
        months=EventWindow(MonthIndex(2018, 10)),
        base_radiance=bases,
        dataset=Dataset.VNP46A2,
        noise=noise,
    )
)

# Every enumerated combination runs over the same scene. The oracle
# compares recovered drops against the noise-free truth recorded when
# the scene was generated.
print(f"{'methods':<16} {'recovered':>9} {'truth':>7}")
rows = []
for config in enumerate_configs(Dataset.VNP46A2):
    recovered, truth = oracle_check(scene, config)
    rows.append((config.label, recovered, truth))
    print(f"{config.label:<16} {recovered:>9.3f} {truth:>7.3f}")

best = max(rows, key=lambda row: row[1])
print("\nbest combination:", best[0])
print("quality filtering recovers the signal that raw leaves buried",
      "under flagged corruption.")
