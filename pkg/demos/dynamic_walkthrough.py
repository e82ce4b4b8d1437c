"""Moving gestures: optical-flow tracking, the Small/Large gate, and both
feature paths.

    python3 demos/dynamic_walkthrough.py [out_dir]
"""
import os
import sys
import tempfile

import numpy as np

from gesturebot import pipeline, pnm, synth
from gesturebot.config import PipelineConfig
from gesturebot.dynamic_features import FrameSequence, dissimilarity_curve

out = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="dynamic_")
os.makedirs(out, exist_ok=True)
cfg = PipelineConfig()

for kind, name in (("small", "bye_right_hand"), ("large", "walk_left_to_right")):
    spec = synth.SynthSpec(kind, synth.KIND_NAMES[kind].index(name), seed=2)
    frames, label, path = synth.gen_sequence(spec)
    seq_dir = os.path.join(out, name)
    pnm.write_frames(seq_dir, frames)
    gate, transition, records = pipeline.gate_sequence(frames, cfg)
    print(f"{name}: {len(frames)} frames, true transition {synth.true_transition(path):.1f} px, "
          f"tracked {transition:.1f} px -> {gate.value}")
    for i, r in enumerate(records[:4]):
        print(f"  pair {i}: region {r.area} px at ({r.centroid[0]:.1f}, {r.centroid[1]:.1f})")

    vec, info = pipeline.dynamic_vector(frames, kind, cfg)
    if kind == "small":
        d = dissimilarity_curve(FrameSequence(frames))
        print("  dissimilarity at lag 2:", np.round(d, 3).tolist())
        print(f"  key frames {info['keyframes']} from candidates {info['candidates']}, "
              f"{len(info['regions'])} region(s), {info['axiality'].value}")
        pnm.write(os.path.join(out, f"{name}_difference.pgm"), info["diff"])
    print(f"  vector ({vec.values.size}):", np.round(vec.values[:12], 2).tolist())
    n = pipeline.flow_dump(frames[:3], os.path.join(out, f"{name}_flow"), cfg)
    print(f"  wrote {n} flow fields\n")

# databases from 8 people per class, then classify someone new
for kind in ("small", "large"):
    root = os.path.join(out, f"{kind}_set")
    synth.write_dataset(root, kind, n_variants=8)
    pipeline.build_db(root, kind, cfg, os.path.join(out, f"{kind}.csv"))

for kind, a in (("small", 4), ("large", 6)):
    frames, label, _ = synth.gen_sequence(synth.SynthSpec(kind, a, seed=9))
    res = pipeline.run_dynamic(frames, os.path.join(out, "small.csv"), os.path.join(out, "large.csv"), cfg)
    print(f"{cfg.name_of(label)}: gate {res.gate.value} ({res.transition:.1f} px), "
          f"predicted {cfg.name_of(res.label)} ({'right' if res.label == label else 'wrong'})")
print(f"\noutputs in {out}")
