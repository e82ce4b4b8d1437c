"""Still-image path, one stage at a time, on a synthetic hand.

    python3 demos/static_walkthrough.py [out_dir]

Writes each intermediate mask as PGM so the stages can be inspected, then
cross-validates a small static database.
"""
import os
import sys
import tempfile

import numpy as np

from gesturebot import pipeline, pnm, synth
from gesturebot.config import PipelineConfig
from gesturebot.hand import HandParams
from gesturebot.static_features import NAMES

out = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="static_")
os.makedirs(out, exist_ok=True)
cfg = PipelineConfig()

# a "victory" hand with a face next to it, light sensor noise
spec = synth.SynthSpec("static", synth.STATIC_GESTURES.index("victory"), seed=1, noise=4.0)
img, label = synth.gen_static(spec)
pnm.write(os.path.join(out, "input.ppm"), img)
print(f"input {img.width}x{img.height}, true class {label} ({cfg.name_of(label)})")

vec, st = pipeline.static_features(img, cfg, dump_dir=out)
skin = st["skin"]
print(f"skin pixels after noise filtering: {int(skin.sum())}")

# feature pixels are the ridge of the distance map; the hand is the blob
# holding most of them inside the finger-width band
p = HandParams()
band = [f for f in st["features"] if p.feat_lo <= f.value <= p.feat_hi]
print(f"feature pixels: {len(st['features'])}, in the finger band: {len(band)}")
print(f"selected blob {int(st['selected'].sum())} px -> wrist cut {int(st['cut'].sum())} px")

print("\nshape vector")
for name, v in zip(NAMES, vec.values):
    print(f"  {name:<26} {v:12.5g}")

# a database from 5 people x 7 shapes, 10-fold at k = 1, 3, 5
root = os.path.join(out, "dataset")
synth.write_dataset(root, "static", n_variants=5, noise=4.0)
db, report = pipeline.build_db(root, "static", cfg, os.path.join(out, "static.csv"))
print(f"\ndatabase: {report.rows} rows, {len(report.failures)} failures")
names = dict(enumerate(cfg.gesture_names, start=1))
for rep in pipeline.xval(db, cfg, [1, 3, 5]):
    print(f"k={rep.k}: {100 * rep.average:.1f}%")
print()
print(pipeline.xval(db, cfg, [1])[0].to_text(names))

res = pipeline.run_static(img, db, cfg)
print(f"classified as {res.label} ({cfg.name_of(res.label)}), votes {res.votes}")
print(f"intermediates in {out}")
assert np.array_equal(res.vector.values, vec.values)
