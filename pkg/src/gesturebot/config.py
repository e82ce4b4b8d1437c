"""Pipeline configuration: every tunable constant, loadable from JSON."""
import json
from dataclasses import asdict, dataclass, field, fields, replace

from .classifier import MAJORITY, InverseDistance
from .dynamic_features import DynamicParams
from .errors import ParseError, PreconditionError
from .hand import HandParams
from .optical_flow import FlowParams
from .skin import SkinParams
from .synth import ALL_GESTURES


@dataclass(frozen=True)
class ClassifierParams:
    k: int = 1
    voting: str = "majority"      # "majority" | "inverse"
    inverse_power: float = 1.0
    folds: int = 10
    seed: int = 0
    metric: str = "l1"            # "l1" | "euclidean"

    def __post_init__(self):
        if self.k < 1:
            raise PreconditionError("k must be >= 1")
        if self.voting not in ("majority", "inverse"):
            raise PreconditionError(f"unknown voting {self.voting!r}")
        if self.metric not in ("l1", "euclidean"):
            raise PreconditionError(f"unknown metric {self.metric!r}")
        if self.folds < 2:
            raise PreconditionError("folds must be >= 2")

    def voting_rule(self):
        return MAJORITY if self.voting == "majority" else InverseDistance(self.inverse_power)


@dataclass(frozen=True)
class PipelineConfig:
    skin: SkinParams = field(default_factory=SkinParams)
    hand: HandParams = field(default_factory=HandParams)
    flow: FlowParams = field(default_factory=FlowParams)
    dynamic: DynamicParams = field(default_factory=DynamicParams)
    classifier: ClassifierParams = field(default_factory=ClassifierParams)
    gesture_names: tuple = ALL_GESTURES
    work_width: int = 176          # stills of another size are resampled to this
    work_height: int = 144
    extent_mode: str = "radial"    # Dmax/Dmin: "radial" | "literal"

    def __post_init__(self):
        names = tuple(self.gesture_names)
        if not names:
            raise PreconditionError("gesture_names must not be empty")
        if len(set(names)) != len(names):
            raise PreconditionError("gesture_names must be unique")
        object.__setattr__(self, "gesture_names", names)
        if self.extent_mode not in ("radial", "literal"):
            raise PreconditionError(f"unknown extent_mode {self.extent_mode!r}")
        if self.work_width < 1 or self.work_height < 1:
            raise PreconditionError("work size must be positive")

    def label_of(self, name):
        try:
            return self.gesture_names.index(name) + 1
        except ValueError:
            raise PreconditionError(f"{name!r} is not in gesture_names") from None

    def name_of(self, label):
        if not 1 <= label <= len(self.gesture_names):
            return str(label)
        return self.gesture_names[label - 1]


_SECTIONS = {"skin": SkinParams, "hand": HandParams, "flow": FlowParams,
             "dynamic": DynamicParams, "classifier": ClassifierParams}


def to_dict(cfg):
    d = asdict(cfg)
    d["gesture_names"] = list(cfg.gesture_names)
    return d


def from_dict(d):
    if not isinstance(d, dict):
        raise ParseError("config must be a JSON object")
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(d) - known
    if unknown:
        raise ParseError(f"unknown config keys {sorted(unknown)}")
    kw = {}
    try:
        for key, val in d.items():
            if key in _SECTIONS:
                if not isinstance(val, dict):
                    raise ParseError(f"config section {key!r} must be an object")
                allowed = {f.name for f in fields(_SECTIONS[key])}
                bad = set(val) - allowed
                if bad:
                    raise ParseError(f"unknown keys in {key!r}: {sorted(bad)}")
                kw[key] = _SECTIONS[key](**val)
            else:
                kw[key] = val
        return PipelineConfig(**kw)
    except (TypeError, PreconditionError) as exc:
        raise ParseError(f"invalid config: {exc}") from None


def load(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return from_dict(data)


def save(cfg, path):
    with open(path, "w") as fh:
        json.dump(to_dict(cfg), fh, indent=2)
        fh.write("\n")


def with_classifier(cfg, **changes):
    return replace(cfg, classifier=replace(cfg.classifier, **changes))
