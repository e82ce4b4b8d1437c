import json
import os

import numpy as np
import pytest

from gesturebot import config as config_mod
from gesturebot import pipeline, pnm, synth
from gesturebot.cli import main
from gesturebot.classifier import load_database
from gesturebot.config import PipelineConfig
from gesturebot.control_link import RobotServer
from gesturebot.errors import NoHandFoundError, NoMotionError, ParseError, StageError
from gesturebot.imaging import GRAY, RGB, Image
from gesturebot.optical_flow import Amplitude

CFG = PipelineConfig()


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    for kind in ("static", "small", "large"):
        synth.write_dataset(str(root / kind), kind, n_variants=3, noise=2.0 if kind == "static" else None)
    dbs = {}
    for kind in ("static", "small", "large"):
        path = str(root / f"{kind}.csv")
        pipeline.build_db(str(root / kind), kind, CFG, path)
        dbs[kind] = path
    return root, dbs


def test_run_static_labels_a_fresh_sample(corpus, tmp_path):
    _, dbs = corpus
    spec = synth.SynthSpec("static", synth.STATIC_GESTURES.index("victory"), seed=40, noise=2.0)
    img, label = synth.gen_static(spec)
    res = pipeline.run_static(img, dbs["static"], CFG)
    assert res.label == label == CFG.label_of("victory")
    assert res.vector.values.shape == (7,)
    path = tmp_path / "v.ppm"
    pnm.write(path, img)
    assert pipeline.run_static(str(path), dbs["static"], CFG).label == label


def test_resized_input_goes_through_the_work_size():
    img, _ = synth.gen_static(synth.SynthSpec("static", 5, seed=1, width=352, height=288))
    res = pipeline.run_static(img, None, CFG)
    assert res.label is None and res.stages["skin"].shape == (144, 176)


def test_blank_image_reports_no_hand(tmp_path, capsys):
    blank = Image(np.full((144, 176, 3), 40, np.uint8), RGB)
    with pytest.raises(StageError) as e:
        pipeline.run_static(blank)
    assert isinstance(e.value.cause, NoHandFoundError) and e.value.stage == "select_hand"
    path = tmp_path / "blank.ppm"
    pnm.write(path, blank)
    assert main(["static", str(path)]) == 3
    assert "select_hand" in capsys.readouterr().err


def test_corrupt_image_exits_2(tmp_path):
    path = tmp_path / "bad.ppm"
    path.write_bytes(b"P6\n176 144\n255\n\x00\x01")
    assert main(["static", str(path)]) == 2
    assert main(["static", str(tmp_path / "missing.ppm")]) == 2


def test_dump_round_trip(tmp_path):
    img, _ = synth.gen_static(synth.SynthSpec("static", 2, seed=3))
    vec, _ = pipeline.static_features(img, CFG, dump_dir=str(tmp_path))
    assert {"skin.pgm", "dt.pgm", "selected.pgm", "cut.pgm", "hand.pgm"} <= set(os.listdir(tmp_path))
    again, _ = pipeline.static_from_mask(pnm.read_mask(tmp_path / "skin.pgm"), CFG)
    assert np.array_equal(again.values, vec.values)


@pytest.mark.parametrize("kind,archetype", [("small", 1), ("large", 1)])
def test_run_dynamic_routes_and_labels(corpus, kind, archetype):
    _, dbs = corpus
    spec = synth.SynthSpec(kind, archetype, seed=40)
    frames, label, _ = synth.gen_sequence(spec)
    res = pipeline.run_dynamic(frames, dbs["small"], dbs["large"], CFG)
    assert res.gate == (Amplitude.SMALL if kind == "small" else Amplitude.LARGE)
    assert res.vector.values.shape == ((12,) if kind == "small" else (60,))
    assert res.label == label


def test_still_frames_exit_3(tmp_path):
    frames, _, _ = synth.gen_sequence(synth.SynthSpec("small", 0))
    pnm.write_frames(tmp_path / "still", [frames[0]] * 8)
    with pytest.raises(NoMotionError):
        pipeline.run_dynamic(str(tmp_path / "still"))
    assert main(["dynamic", str(tmp_path / "still")]) == 3
    assert main(["gate", str(tmp_path / "still")]) == 3


def test_short_sequence_is_an_input_error(tmp_path):
    frames, _, _ = synth.gen_sequence(synth.SynthSpec("small", 0))
    pnm.write_frames(tmp_path / "short", frames[:4])
    assert main(["dynamic", str(tmp_path / "short")]) == 2


def test_gate_and_flow_dump_commands(tmp_path, capsys):
    frames, _, _ = synth.gen_sequence(synth.SynthSpec("large", 0, seed=4), 7)
    seq = tmp_path / "seq"
    pnm.write_frames(seq, frames)
    assert main(["gate", str(seq)]) == 0
    assert capsys.readouterr().out.startswith("gate Large")
    assert main(["flow-dump", str(seq), "--dump-dir", str(tmp_path / "flow")]) == 0
    names = sorted(os.listdir(tmp_path / "flow"))
    assert len(names) == 18 and names[0] == "mask_0001.pgm"
    assert pnm.read(tmp_path / "flow" / "u_0003.pgm").colorspace == GRAY
    assert main(["flow-dump", str(seq)]) == 2


def test_build_db_shapes(corpus):
    _, dbs = corpus
    db = load_database(dbs["static"])
    assert db.dim == 7 and len(db) == 21 and db.kind == "Static7"
    assert sorted(set(db.labels.tolist())) == list(range(1, 8))
    assert load_database(dbs["small"]).dim == 12 and load_database(dbs["large"]).dim == 60
    assert set(load_database(dbs["large"]).labels.tolist()) == {CFG.label_of(n) for n in synth.LARGE_GESTURES}


def test_build_db_skips_bad_samples(tmp_path, capsys):
    root = tmp_path / "st"
    synth.write_dataset(str(root), "static", n_variants=3)
    os.remove(root / "fist" / "p00" / "s01.ppm")
    (root / "fist" / "p00" / "s01.ppm").write_bytes(b"P6 garbage")
    os.makedirs(root / "not_a_gesture" / "p00")
    os.link(root / "index" / "p00" / "s01.ppm", root / "not_a_gesture" / "p00" / "s01.ppm")
    out = tmp_path / "db.csv"
    assert main(["build-db", str(root), "--kind", "static", "--db", str(out)]) == 0
    text = capsys.readouterr().out
    assert "rows: 20" in text and "failures: 1" in text and "not_a_gesture" in text
    assert len(load_database(out)) == 20


def test_build_db_empty_root_exits_2(tmp_path):
    os.makedirs(tmp_path / "empty")
    assert main(["build-db", str(tmp_path / "empty"), "--kind", "static", "--db", str(tmp_path / "x.csv")]) == 2
    assert main(["build-db", str(tmp_path / "nowhere"), "--kind", "small", "--db", str(tmp_path / "x.csv")]) == 2


def test_build_db_is_byte_identical_across_runs(tmp_path):
    root = tmp_path / "st"
    synth.write_dataset(str(root), "static", n_variants=2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    pipeline.build_db(str(root), "static", CFG, str(a))
    pipeline.build_db(str(root), "static", CFG, str(b))
    assert a.read_bytes() == b.read_bytes()


def test_xval_command(corpus, capsys):
    _, dbs = corpus
    assert main(["xval", "--db", dbs["static"], "--k", "1-3"]) == 0
    out = capsys.readouterr().out
    assert "k=1 " in out and "k=2 " in out and "k=3 " in out and "victory" in out
    assert main(["xval", "--db", dbs["static"], "--k", "1,3", "--csv"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0].startswith("k,class,rate") and sum(r.startswith("3,average") for r in rows) == 1


def test_xval_more_folds_than_rows_exits_2(tmp_path):
    root = tmp_path / "st"
    synth.write_dataset(str(root), "static", n_variants=1)
    pipeline.build_db(str(root), "static", CFG, str(tmp_path / "db.csv"))
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"classifier": {"folds": 8}}))
    assert main(["xval", "--db", str(tmp_path / "db.csv"), "--config", str(cfg_path)]) == 2


def test_xval_seed_changes_folds_deterministically(corpus):
    _, dbs = corpus
    a = pipeline.xval(dbs["static"], config_mod.with_classifier(CFG, folds=3, seed=1))[0]
    b = pipeline.xval(dbs["static"], config_mod.with_classifier(CFG, folds=3, seed=1))[0]
    assert np.array_equal(a.confusion, b.confusion)


def test_config_round_trip(tmp_path):
    cfg = config_mod.from_dict({"classifier": {"k": 3, "voting": "inverse"}, "flow": {"gate_threshold": 35.0},
                                "extent_mode": "literal"})
    path = tmp_path / "cfg.json"
    config_mod.save(cfg, path)
    back = config_mod.load(path)
    assert back == cfg and back.classifier.k == 3 and back.flow.gate_threshold == 35.0
    assert config_mod.load(path).gesture_names == synth.ALL_GESTURES


@pytest.mark.parametrize("doc", [
    {"colour": 1},
    {"classifier": {"kk": 3}},
    {"classifier": 3},
    {"classifier": {"k": 0}},
    {"extent_mode": "diagonal"},
    {"gesture_names": ["a", "a"]},
    [],
])
def test_config_errors(tmp_path, doc):
    with pytest.raises(ParseError):
        config_mod.from_dict(doc)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    assert main(["xval", "--db", "unused.csv", "--config", str(path)]) == 2


def test_config_bad_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        config_mod.load(path)


def test_send_command(capsys):
    srv = RobotServer(synth.ALL_GESTURES, "127.0.0.1", 0)
    srv.start_background()
    try:
        assert main(["send", "14", "--port", str(srv.port)]) == 0
        assert capsys.readouterr().out.strip() == "ACK kowtow"
        assert main(["send", "23", "--port", str(srv.port)]) == 2
    finally:
        srv.shutdown()
        srv.server_close()


def test_synth_command(tmp_path, capsys):
    assert main(["synth", str(tmp_path), "--kinds", "static", "--variants", "1", "--noise", "3"]) == 0
    assert "wrote 7 samples" in capsys.readouterr().out
    assert sorted(os.listdir(tmp_path / "static")) == sorted(synth.STATIC_GESTURES)
