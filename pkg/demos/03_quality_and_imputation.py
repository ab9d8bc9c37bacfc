"""
Quality decoding and temporal gap filling
=========================================

Decodes gap-filled-product quality words, applies the trust rule, and
refills an untrusted month of a pixel's history with a
temporal-proximity-weighted average of its own trusted past.
"""

import numpy as np

from ntlpipe import (
    Dataset,
    GridSpec,
    IntRaster,
    MonthIndex,
    RasterGrid,
    RasterStack,
    decode_vnp46a2_quality,
    impute_pixel,
    is_high_quality_vnp46a2,
    quality_filter_and_impute,
)

# Each pixel of the gap-filled product carries a 16-bit quality word.
# 114 encodes a clean land observation; adding the shadow bit gives 370.
for word in (114, 370):
    flags = decode_vnp46a2_quality(word)
    print(f"word {word}: background={flags.background.name}",
          f"mask_quality={flags.cloud_mask_quality.name}",
          f"confidence={flags.cloud_confidence.name}",
          f"shadow={flags.shadow}",
          f"-> trusted={is_high_quality_vnp46a2(flags)}")

# Gap filling weighs each trusted past month by the inverse of its
# distance, so the most recent observations dominate. The result always
# stays inside the range of the values that contributed.
history = [(6, 14.0, True), (9, 11.0, True), (11, 10.0, True)]
print("\nimputed value for month 12:", impute_pixel(history, t=12))
print("history without trusted months is left missing:",
      impute_pixel([(11, 9.0, False)], t=12))

# The same rule runs over whole stacks. Here one pixel loses its August
# observation to cloud; the filter replaces it from June and July.
spec = GridSpec(ncols=2, nrows=2, x_origin=0.0, y_origin=0.0, cell_size=1.0)
months = tuple(MonthIndex(2018, m) for m in (6, 7, 8))
frames = [np.full((2, 2), v) for v in (12.0, 9.0, 55.0)]
radiance = RasterStack(months, tuple(RasterGrid(spec, f) for f in frames))

counts = [np.ones((2, 2), dtype=int) for _ in months]
counts[2][0, 0] = 0
quality = RasterStack(months, tuple(IntRaster(spec, c) for c in counts))

filled = quality_filter_and_impute(radiance, quality, Dataset.VSC_NTL)
august = filled.get(MonthIndex(2018, 8))
print("\nAugust after filtering (cloudy pixel refilled, rest kept):")
print(august.values)
