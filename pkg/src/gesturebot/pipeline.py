"""End-to-end runs: still image -> label, frame sequence -> gate + label,
dataset directories -> feature databases, databases -> cross-validation."""
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from . import pnm
from .classifier import (GestureDatabase, cross_validate, knn, load_database, normalize,
                         save_database)
from .config import PipelineConfig
from .dynamic_features import FrameSequence, sequence_vector, small_amplitude_vector
from .errors import GestureError, PreconditionError, StageError
from .hand import chamfer_dt, feature_pixels, recenter, select_hand, wrist_cut
from .imaging import RGB, Image, resize, rgb_to_ycbcr
from .optical_flow import (amplitude_gate, flow_to_gray, horn_schunck, motion_mask, track,
                           track_transition, Amplitude)
from .skin import filter_noise, gray_world, skin_mask
from .static_features import static_vector

log = logging.getLogger(__name__)

DB_KINDS = {"static": "Static7", "small": "Dynamic12", "large": "Sequence60"}


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except StageError:
        raise
    except (GestureError, ValueError, OSError) as exc:
        raise StageError(name, exc) from exc


def _dump(dump_dir, name, img):
    if dump_dir:
        os.makedirs(dump_dir, exist_ok=True)
        pnm.write(os.path.join(dump_dir, name), img)


@dataclass
class StaticResult:
    label: int | None
    vector: object
    votes: dict = field(default_factory=dict)
    stages: dict = field(default_factory=dict)


def static_skin(img, cfg=PipelineConfig()):
    """RGB still -> cleaned skin mask (resampled to the work size first)."""
    if not isinstance(img, Image) or img.colorspace != RGB:
        raise StageError("read", PreconditionError("static gestures need an RGB image"))
    if (img.width, img.height) != (cfg.work_width, cfg.work_height):
        img = _stage("resize", resize, img, cfg.work_width, cfg.work_height)
    if cfg.skin.apply_gray_world:
        img = _stage("gray_world", gray_world, img)
    ycc = _stage("rgb_to_ycbcr", rgb_to_ycbcr, img)
    raw = _stage("skin_mask", skin_mask, ycc, cfg.skin)
    return _stage("filter_noise", filter_noise, raw, cfg.skin)


def static_from_mask(mask, cfg=PipelineConfig(), label=None):
    """Cleaned skin mask -> (StaticVector, intermediates)."""
    dt = _stage("chamfer_dt", chamfer_dt, mask)
    feats = _stage("feature_pixels", feature_pixels, dt)
    hand = _stage("select_hand", select_hand, mask, feats, cfg.hand)
    cut = _stage("wrist_cut", wrist_cut, hand, cfg.hand, feats)
    centred = _stage("recenter", recenter, cut, cfg.hand.frame_size)
    vec = _stage("static_vector", static_vector, centred, label, cfg.extent_mode)
    return vec, {"dt": dt, "features": feats, "selected": hand, "cut": cut, "hand": centred}


def static_features(img, cfg=PipelineConfig(), label=None, dump_dir=None):
    mask = static_skin(img, cfg)
    _dump(dump_dir, "skin.pgm", mask)
    vec, stages = static_from_mask(mask, cfg, label)
    if dump_dir:
        _dump(dump_dir, "dt.pgm", np.clip(stages["dt"], 0, 255).astype(np.uint8))
        for key in ("selected", "cut", "hand"):
            _dump(dump_dir, f"{key}.pgm", stages[key])
    stages["skin"] = mask
    return vec, stages


def _classify(db, vec, cfg):
    if db is None:
        return None, {}
    k = min(cfg.classifier.k, len(db))
    return _stage("knn", knn, db, np.asarray(vec.values), k, cfg.classifier.voting_rule(),
                  metric=cfg.classifier.metric)


def _load_model(db):
    if db is None:
        return None
    if isinstance(db, (str, os.PathLike)):
        db = _stage("load_db", load_database, db)
    return db if db.norm is not None else normalize(db)


def run_static(image, db=None, cfg=PipelineConfig(), dump_dir=None):
    """Classify one still; ``image`` may be a path or an Image, ``db`` a path or database."""
    img = _stage("read", pnm.read, image) if isinstance(image, (str, os.PathLike)) else image
    vec, stages = static_features(img, cfg, dump_dir=dump_dir)
    label, votes = _classify(_load_model(db), vec, cfg)
    return StaticResult(label, vec, votes, stages)


@dataclass
class DynamicResult:
    gate: Amplitude
    transition: float
    label: int | None
    vector: object
    votes: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)


def _sequence(frames):
    if isinstance(frames, (str, os.PathLike)):
        frames = _stage("read", pnm.read_frames, frames)
    return frames if isinstance(frames, FrameSequence) else _stage("read", FrameSequence, list(frames))


def gate_sequence(frames, cfg=PipelineConfig()):
    seq = _sequence(frames)
    records = track(seq, cfg.flow)  # NoMotionError propagates unwrapped
    transition = track_transition(records)
    return amplitude_gate(transition, cfg.flow), transition, records


def dynamic_vector(seq, kind, cfg=PipelineConfig(), label=None):
    """Feature vector of a sequence whose amplitude class is already known."""
    seq = _sequence(seq)
    if kind == "small":
        vec, info = small_amplitude_vector(seq, cfg.dynamic, label)
        return vec, info
    if kind == "large":
        vec = sequence_vector(seq, cfg.dynamic, label)
        return vec, {"regions": vec.regions}
    raise PreconditionError(f"unknown dynamic kind {kind!r}")


def run_dynamic(frames, small_db=None, large_db=None, cfg=PipelineConfig(), dump_dir=None):
    """Gate a sequence, then classify it against the matching database."""
    seq = _sequence(frames)
    if len(seq) < 6:
        raise StageError("read", PreconditionError(f"need >= 6 frames, got {len(seq)}"))
    gate, transition, records = gate_sequence(seq, cfg)
    kind = "small" if gate == Amplitude.SMALL else "large"
    vec, info = dynamic_vector(seq, kind, cfg)
    info["records"] = records
    if dump_dir and kind == "small":
        _dump(dump_dir, "difference.pgm", info["diff"])
    label, votes = _classify(_load_model(small_db if kind == "small" else large_db), vec, cfg)
    return DynamicResult(gate, transition, label, vec, votes, info)


def flow_dump(frames, dump_dir, cfg=PipelineConfig()):
    """Write u, v (as gray) and the motion mask for every frame pair."""
    seq = _sequence(frames)
    for i in range(len(seq) - 1):
        flow = horn_schunck(seq.frames[i], seq.frames[i + 1], cfg.flow)
        _dump(dump_dir, f"u_{i + 1:04d}.pgm", flow_to_gray(flow.u))
        _dump(dump_dir, f"v_{i + 1:04d}.pgm", flow_to_gray(flow.v))
        _dump(dump_dir, f"mask_{i + 1:04d}.pgm", motion_mask(flow, cfg.flow))
    return len(seq) - 1


@dataclass
class IngestReport:
    rows: int = 0
    failures: list = field(default_factory=list)   # (sample path, message)
    skipped_classes: list = field(default_factory=list)

    def to_text(self):
        lines = [f"rows: {self.rows}", f"failures: {len(self.failures)}"]
        lines += [f"  {path}: {msg}" for path, msg in self.failures]
        if self.skipped_classes:
            lines.append(f"skipped class directories: {', '.join(self.skipped_classes)}")
        return "\n".join(lines) + "\n"


def _samples(root, kind):
    """(class name, person, sample path) in sorted order."""
    for cls in sorted(os.listdir(root)):
        cdir = os.path.join(root, cls)
        if not os.path.isdir(cdir):
            continue
        for person in sorted(os.listdir(cdir)):
            pdir = os.path.join(cdir, person)
            if not os.path.isdir(pdir):
                continue
            for name in sorted(os.listdir(pdir)):
                path = os.path.join(pdir, name)
                if kind == "static" and os.path.isfile(path):
                    yield cls, person, path
                elif kind != "static" and os.path.isdir(path):
                    yield cls, person, path


def build_db(root, kind, cfg=PipelineConfig(), out_path=None):
    """Feature database for every sample under ``root/<class>/<person>/<sample>``.

    Failed samples are logged and reported, not fatal. Labels are positions
    in ``cfg.gesture_names``.
    """
    if kind not in DB_KINDS:
        raise PreconditionError(f"kind must be one of {sorted(DB_KINDS)}")
    if not os.path.isdir(root):
        raise PreconditionError(f"{root} is not a directory")
    report = IngestReport()
    feats, labels, persons = [], [], []
    for cls, person, path in _samples(root, kind):
        if cls not in cfg.gesture_names:
            if cls not in report.skipped_classes:
                report.skipped_classes.append(cls)
                log.warning("class directory %s is not in gesture_names; skipped", cls)
            continue
        label = cfg.label_of(cls)
        try:
            if kind == "static":
                vec, _ = static_features(_stage("read", pnm.read, path), cfg, label)
            else:
                vec, _ = dynamic_vector(path, kind, cfg, label)
        except GestureError as exc:
            log.warning("sample %s failed: %s", path, exc)
            report.failures.append((path, str(exc)))
            continue
        feats.append(np.asarray(vec.values))
        labels.append(label)
        persons.append(person)
    if not feats:
        raise PreconditionError(f"no usable samples under {root}")
    report.rows = len(feats)
    db = GestureDatabase(np.array(feats), np.array(labels), tuple(persons), DB_KINDS[kind])
    if out_path:
        save_database(db, out_path)
    return db, report


def xval(db, cfg=PipelineConfig(), ks=None):
    """One ScoreReport per requested neighbour count."""
    if isinstance(db, (str, os.PathLike)):
        db = load_database(db)
    c = cfg.classifier
    return [cross_validate(db, k, c.folds, c.voting_rule(), c.seed, c.metric)
            for k in (ks or [c.k])]

