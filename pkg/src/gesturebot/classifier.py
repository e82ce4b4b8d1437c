"""k-nearest-neighbour classification and k-fold cross-validation."""
import csv
import io
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParseError, PreconditionError

log = logging.getLogger(__name__)

KINDS = {"Static7": 7, "Dynamic12": 12, "Sequence60": 60}


@dataclass(frozen=True)
class InverseDistance:
    """Distance-weighted voting: each neighbour adds 1 / d**n to its class."""

    n: float = 1.0


MAJORITY = "majority"


@dataclass(frozen=True)
class GestureDatabase:
    """Feature rows with integer class labels.

    ``norm`` holds the per-feature ``(min, max)`` arrays once the rows have
    been mapped to [0, 1]; queries go through :meth:`transform` with the same
    map.
    """

    features: np.ndarray
    labels: np.ndarray
    persons: tuple = ()
    kind: str | None = None
    norm: tuple | None = None

    def __post_init__(self):
        feats = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        labels = np.asarray(self.labels, dtype=np.int64)
        if feats.shape[0] != labels.shape[0]:
            raise PreconditionError(f"{feats.shape[0]} rows but {labels.shape[0]} labels")
        if self.kind is not None and KINDS.get(self.kind, feats.shape[1]) != feats.shape[1]:
            raise PreconditionError(f"kind {self.kind} needs dim {KINDS[self.kind]}, got {feats.shape[1]}")
        persons = tuple(self.persons) if self.persons else ("",) * len(labels)
        if len(persons) != len(labels):
            raise PreconditionError("persons must align with rows")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "persons", persons)

    @property
    def dim(self):
        return self.features.shape[1]

    def __len__(self):
        return self.features.shape[0]

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        return replace(self, features=self.features[idx], labels=self.labels[idx],
                       persons=tuple(self.persons[i] for i in idx))

    def transform(self, q):
        q = np.asarray(q, dtype=np.float64)
        if self.norm is None:
            return q
        lo, hi = self.norm
        span = hi - lo
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (q - lo) / safe, 0.0)


def normalize(db):
    """Min-max map every feature column to [0, 1]; constant columns go to 0."""
    if len(db) == 0:
        raise PreconditionError("cannot normalise an empty database")
    raw = db.features
    lo, hi = raw.min(axis=0), raw.max(axis=0)
    fitted = replace(db, norm=(lo, hi))
    return replace(fitted, features=fitted.transform(raw))


def distance(q, x, weights=None, metric="l1"):
    q = np.asarray(q, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if q.shape[-1] != x.shape[-1]:
        raise PreconditionError(f"dimension mismatch: {q.shape[-1]} vs {x.shape[-1]}")
    w = np.ones(q.shape[-1]) if weights is None else np.asarray(weights, dtype=np.float64)
    if np.any(w < 0):
        raise PreconditionError("feature weights must be non-negative")
    diff = np.abs(q - x)
    if metric == "l1":
        return (w * diff).sum(axis=-1)
    if metric == "euclidean":
        return np.sqrt((w * diff ** 2).sum(axis=-1))
    raise PreconditionError(f"unknown metric {metric!r}")


def knn(db, q, k=1, voting=MAJORITY, weights=None, metric="l1"):
    """Classify one raw query against ``db``.

    Returns ``(label, votes)`` with ``votes`` a ``{label: score}`` dict.
    Neighbours tied on distance are taken in row order. Majority ties fall to
    the larger summed inverse distance, then to the smaller label. With
    inverse-distance voting an exact match (d == 0) wins outright.
    """
    n = len(db)
    if n == 0:
        raise PreconditionError("empty database")
    if not 1 <= k <= n:
        raise PreconditionError(f"k must lie in [1, {n}], got {k}")
    d = distance(db.transform(q), db.features, weights, metric)
    nearest = np.argsort(d, kind="stable")[:k]
    nd, nl = d[nearest], db.labels[nearest]

    if isinstance(voting, InverseDistance):
        zero = nd == 0
        if zero.any():
            votes = {}
            for lab in nl[zero]:
                votes[int(lab)] = votes.get(int(lab), 0) + 1
            # several exact matches: plurality among them, then smallest label
            best = min(votes, key=lambda lab: (-votes[lab], lab))
            return best, {lab: float("inf") if lab == best else 0.0 for lab in votes}
        votes = {}
        for dist, lab in zip(nd, nl):
            votes[int(lab)] = votes.get(int(lab), 0.0) + 1.0 / dist ** voting.n
        best = min(votes, key=lambda lab: (-votes[lab], lab))
        return best, votes

    if voting != MAJORITY:
        raise PreconditionError(f"unknown voting scheme {voting!r}")
    counts, inv = {}, {}
    for dist, lab in zip(nd, nl):
        lab = int(lab)
        counts[lab] = counts.get(lab, 0) + 1
        inv[lab] = inv.get(lab, 0.0) + (np.inf if dist == 0 else 1.0 / dist)
    best = min(counts, key=lambda lab: (-counts[lab], -inv[lab], lab))
    return best, {lab: float(c) for lab, c in counts.items()}


def kfold_split(n_rows, k_folds, seed=0):
    """Fold id per row: seeded shuffle, then round-robin; sizes differ by <= 1."""
    if k_folds < 2:
        raise PreconditionError("need at least 2 folds")
    if k_folds > n_rows:
        raise PreconditionError(f"{k_folds} folds requested for {n_rows} rows")
    perm = np.random.default_rng(seed).permutation(n_rows)
    folds = np.empty(n_rows, dtype=int)
    folds[perm] = np.arange(n_rows) % k_folds
    return folds


@dataclass
class ScoreReport:
    classes: list
    confusion: np.ndarray
    k: int = 1
    warnings: list = field(default_factory=list)

    @property
    def rates(self):
        rows = self.confusion.sum(axis=1)
        return np.divide(np.diag(self.confusion), rows, out=np.zeros(len(rows)), where=rows > 0)

    @property
    def average(self):
        return float(self.rates.mean()) if len(self.classes) else 0.0

    def to_text(self, names=None):
        names = names or {}
        labels = [str(names.get(c, c)) for c in self.classes]
        width = max([5] + [len(s) for s in labels])
        lines = [f"k={self.k}  average recognition {100 * self.average:.1f}%", ""]
        lines.append(f"{'class':<{width}}  rate")
        for lab, rate in zip(labels, self.rates):
            lines.append(f"{lab:<{width}}  {100 * rate:5.1f}%")
        lines.append("")
        lines.append("confusion (rows true, columns predicted)")
        head = " " * width + "".join(f"{str(c):>6}" for c in self.classes)
        lines.append(head)
        for lab, row in zip(labels, self.confusion):
            lines.append(f"{lab:<{width}}" + "".join(f"{int(v):>6}" for v in row))
        lines.extend(f"warning: {w}" for w in self.warnings)
        return "\n".join(lines) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "class", "rate"] + [f"pred_{c}" for c in self.classes])
        for c, rate, row in zip(self.classes, self.rates, self.confusion):
            w.writerow([self.k, c, f"{rate:.6f}"] + [int(v) for v in row])
        w.writerow([self.k, "average", f"{self.average:.6f}"] + [""] * len(self.classes))
        return buf.getvalue()


def cross_validate(db, k_neighbors=1, k_folds=10, voting=MAJORITY, seed=0, metric="l1"):
    """k-fold scoring; each fold renormalises on its own training rows."""
    folds = kfold_split(len(db), k_folds, seed)
    classes = sorted(set(int(x) for x in db.labels))
    pos = {c: i for i, c in enumerate(classes)}
    confusion = np.zeros((len(classes), len(classes)), dtype=int)
    notes = []
    for f in range(k_folds):
        train = db.subset(np.flatnonzero(folds != f))
        test = np.flatnonzero(folds == f)
        missing = set(classes) - set(int(x) for x in train.labels)
        if missing:
            notes.append(f"fold {f}: training rows lack classes {sorted(missing)}")
        model = normalize(train)
        k = min(k_neighbors, len(model))
        for i in test:
            pred, _ = knn(model, db.features[i], k, voting, metric=metric)
            confusion[pos[int(db.labels[i])], pos[pred]] += 1
    for note in notes:
        log.warning(note)
    return ScoreReport(classes, confusion, k_neighbors, notes)


def save_database(db, path_or_file):
    """CSV: ``# kind=<kind>,dim=<dim>`` then ``label,person,f1..fdim`` rows."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        fh.write(f"# kind={db.kind or 'Custom'},dim={db.dim}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "person"] + [f"f{i + 1}" for i in range(db.dim)])
        for lab, person, row in zip(db.labels, db.persons, db.features):
            w.writerow([int(lab), person] + [repr(float(v)) for v in row])
    finally:
        if own:
            fh.close()


def load_database(path):
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ParseError("database must start with a '# kind=...,dim=...' line")
        meta = {}
        for part in first[1:].strip().split(","):
            key, _, val = part.partition("=")
            meta[key.strip()] = val.strip()
        try:
            dim = int(meta["dim"])
        except (KeyError, ValueError):
            raise ParseError(f"bad database header {first.strip()!r}") from None
        kind = meta.get("kind")
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["label", "person"] or len(header) != dim + 2:
            raise ParseError(f"bad column header {header!r}")
        feats, labels, persons = [], [], []
        for n, row in enumerate(reader, start=3):
            if not row:
                continue
            if len(row) != dim + 2:
                raise ParseError(f"line {n}: expected {dim + 2} fields, got {len(row)}")
            try:
                labels.append(int(row[0]))
                feats.append([float(v) for v in row[2:]])
            except ValueError as exc:
                raise ParseError(f"line {n}: {exc}") from None
            persons.append(row[1])
    if not labels:
        raise ParseError(f"{path}: database has no rows")
    kind = kind if kind in KINDS else None
    return GestureDatabase(np.array(feats), np.array(labels), tuple(persons), kind)
