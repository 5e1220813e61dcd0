"""Player trace recording and next-action prediction.

The trace is the companion's only training data: an append-only, tick-
ordered list of (feature vector, action kind, global point) entries.
Prediction is two-headed: one classifier for the action kind, one for
the region id, both trained on the same features. Region labels are
always computed through the region set passed at training time, never
the partition that existed when the action happened.
"""

import json
from collections import Counter
from dataclasses import dataclass, field

from .engine import ACTION_KINDS, FEATURE_NAMES, ActionKind
from .errors import DomainError, InsufficientDataError
from .regions import RegionSet

MODEL_VERSION = 1


@dataclass(frozen=True)
class TraceEntry:
    sv: tuple
    kind: ActionKind
    point: tuple  # (x, y) global cell
    tick: int


class Trace:
    def __init__(self):
        self.entries: list[TraceEntry] = []

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def record(self, sv, kind: ActionKind, point, tick: int) -> "Trace":
        if kind is ActionKind.IDLE:
            raise DomainError("idle actions are never recorded")
        if self.entries and tick <= self.entries[-1].tick:
            raise DomainError(
                f"tick {tick} not after last recorded tick {self.entries[-1].tick}"
            )
        self.entries.append(TraceEntry(tuple(sv), kind, (point[0], point[1]), tick))
        return self


@dataclass(frozen=True)
class FeatureConfig:
    indices: tuple = tuple(range(len(FEATURE_NAMES)))

    def __post_init__(self):
        if not self.indices:
            raise DomainError("feature config must select at least one feature")
        if len(set(self.indices)) != len(self.indices):
            raise DomainError("duplicate feature indices")

    def project(self, sv) -> tuple:
        return tuple(sv[i] for i in self.indices)


@dataclass(frozen=True)
class ClassifierKind:
    name: str  # "decision_tree" | "k_nearest" | "majority"
    max_depth: int = 8
    min_samples_split: int = 2
    k: int = 3

    def __post_init__(self):
        if self.name not in ("decision_tree", "k_nearest", "majority"):
            raise DomainError(f"unknown classifier kind {self.name}")
        if self.max_depth < 1 or self.k < 1:
            raise DomainError("max_depth and k must be >= 1")


def _majority(labels, order):
    """Most frequent label; ties go to the most recently seen one."""
    counts = Counter(labels)
    best = None
    best_key = None
    last_seen = {}
    for i, lab in zip(order, labels):
        last_seen[lab] = max(last_seen.get(lab, -1), i)
    for lab, c in counts.items():
        key = (c, last_seen[lab])
        if best_key is None or key > best_key:
            best = lab
            best_key = key
    return best


def _gini(labels) -> float:
    n = len(labels)
    if n == 0:
        return 0.0
    counts = Counter(labels)
    return 1.0 - sum((c / n) ** 2 for c in counts.values())


class DecisionTree:
    """Axis-aligned threshold tree, Gini impurity, deterministic."""

    def __init__(self, max_depth: int, min_samples_split: int):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.root = None

    def fit(self, X, y):
        order = list(range(len(y)))
        self.root = self._build(X, y, order, 0)
        return self

    def _build(self, X, y, order, depth):
        if (
            depth >= self.max_depth
            or len(y) < self.min_samples_split
            or len(set(y)) == 1
        ):
            return {"leaf": _majority(y, order)}
        n_features = len(X[0])
        n = len(y)
        parent_gini = _gini(y)
        best = None  # (gain, feature, threshold)
        for f in range(n_features):
            # single sorted sweep per feature with running class counts
            pairs = sorted((row[f], lab) for row, lab in zip(X, y))
            right = Counter(lab for _, lab in pairs)
            left = Counter()
            sl = 0  # sum of squared counts, left/right
            sr = sum(c * c for c in right.values())
            nl = 0
            for i in range(n - 1):
                v, lab = pairs[i]
                sl += 2 * left[lab] + 1
                sr -= 2 * right[lab] - 1
                left[lab] += 1
                right[lab] -= 1
                nl += 1
                if v == pairs[i + 1][0]:
                    continue
                nr = n - nl
                weighted = (nl - sl / nl + nr - sr / nr) / n
                gain = parent_gini - weighted
                if best is None or gain > best[0]:
                    best = (gain, f, (v + pairs[i + 1][0]) / 2)
        if best is None or best[0] <= 1e-12:
            return {"leaf": _majority(y, order)}
        _, f, thr = best
        lx, ly, lo_, rx, ry, ro_ = [], [], [], [], [], []
        for row, lab, i in zip(X, y, order):
            if row[f] <= thr:
                lx.append(row); ly.append(lab); lo_.append(i)
            else:
                rx.append(row); ry.append(lab); ro_.append(i)
        return {
            "f": f,
            "t": thr,
            "lo": self._build(lx, ly, lo_, depth + 1),
            "hi": self._build(rx, ry, ro_, depth + 1),
        }

    def predict(self, row):
        node = self.root
        while "leaf" not in node:
            node = node["lo"] if row[node["f"]] <= node["t"] else node["hi"]
        return node["leaf"]

    def to_dict(self):
        return {"type": "decision_tree", "root": self.root}


class KNearest:
    """k-NN on min-max-normalized features; ties broken by sample index."""

    def __init__(self, k: int):
        self.k = k
        self.X = []
        self.y = []
        self.mins = []
        self.ranges = []

    def fit(self, X, y):
        self.X = [list(row) for row in X]
        self.y = list(y)
        n_features = len(X[0])
        self.mins = [min(row[f] for row in X) for f in range(n_features)]
        self.ranges = [
            max(max(row[f] for row in X) - self.mins[f], 0) for f in range(n_features)
        ]
        return self

    def _norm(self, row):
        return [
            (v - m) / r if r else 0.0
            for v, m, r in zip(row, self.mins, self.ranges)
        ]

    def predict(self, row):
        q = self._norm(row)
        scored = []
        for i, (x, lab) in enumerate(zip(self.X, self.y)):
            nx = self._norm(x)
            d = sum((a - b) ** 2 for a, b in zip(nx, q))
            scored.append((d, i, lab))
        scored.sort()
        top = scored[: self.k]
        counts = Counter(lab for _, _, lab in top)
        best = None
        best_key = None
        for d, i, lab in top:
            key = (-counts[lab], i)
            if best_key is None or key < best_key:
                best = lab
                best_key = key
        return best

    def to_dict(self):
        return {
            "type": "k_nearest",
            "k": self.k,
            "X": self.X,
            "y": self.y,
            "mins": self.mins,
            "ranges": self.ranges,
        }


class MajorityClass:
    def __init__(self):
        self.label = None

    def fit(self, X, y):
        self.label = _majority(y, range(len(y)))
        return self

    def predict(self, row):
        return self.label

    def to_dict(self):
        return {"type": "majority", "label": self.label}


def _make_classifier(kind: ClassifierKind):
    if kind.name == "decision_tree":
        return DecisionTree(kind.max_depth, kind.min_samples_split)
    if kind.name == "k_nearest":
        return KNearest(kind.k)
    return MajorityClass()


@dataclass
class PredictorModel:
    kind_head: object
    region_head: object
    trained_at_tick: int
    feature_config: FeatureConfig
    classifier: ClassifierKind

    def to_json(self) -> str:
        return json.dumps(
            {
                "v": MODEL_VERSION,
                "classifier": self.classifier.name,
                "feature_indices": list(self.feature_config.indices),
                "trained_at_tick": self.trained_at_tick,
                "kind_head": self.kind_head.to_dict(),
                "region_head": self.region_head.to_dict(),
            },
            sort_keys=True,
            separators=(",", ":"),
        )


def train(
    trace: Trace,
    rs: RegionSet,
    kind: ClassifierKind,
    fc: FeatureConfig | None = None,
) -> PredictorModel:
    if len(trace) == 0:
        raise InsufficientDataError("cannot train on an empty trace")
    fc = fc or FeatureConfig()
    X = [fc.project(e.sv) for e in trace]
    y_kind = [e.kind.value for e in trace]
    y_region = [rs.lookup(e.point[0], e.point[1]) for e in trace]
    # fewer than two distinct kinds: a fancier model adds nothing
    head_kind = kind if len(set(y_kind)) >= 2 else ClassifierKind("majority")
    kind_head = _make_classifier(head_kind).fit(X, y_kind)
    region_head = _make_classifier(
        kind if len(set(y_region)) >= 2 else ClassifierKind("majority")
    ).fit(X, y_region)
    return PredictorModel(kind_head, region_head, trace.entries[-1].tick, fc, kind)


def predict_next(model: PredictorModel, sv) -> tuple:
    row = model.feature_config.project(sv)
    return (ActionKind(model.kind_head.predict(row)), model.region_head.predict(row))


# Forward-chaining windows: (train fraction, test fraction)
EVAL_WINDOWS = ((0.50, 0.15), (0.65, 0.15), (0.80, 0.15))


def evaluate_configs(trace: Trace, rs: RegionSet, candidates) -> tuple:
    """Score candidate (classifier, feature config) pairs with expanding
    forward-chained windows; return (best candidate, accuracy table).

    Traces are time-ordered, so later windows are never used to train
    earlier ones. Accuracy is kind-label accuracy averaged over windows;
    ties go to the earlier candidate in the list.
    """
    n = len(trace)
    if n < 10:
        raise InsufficientDataError(f"need at least 10 entries, have {n}")
    if not candidates:
        raise InsufficientDataError("no candidates supplied")
    entries = trace.entries
    table = []
    for kind, fc in candidates:
        accs = []
        for train_frac, test_frac in EVAL_WINDOWS:
            n_train = int(n * train_frac)
            n_test = max(1, int(n * test_frac))
            test = entries[n_train : n_train + n_test]
            if n_train < 1 or not test:
                continue
            sub = Trace()
            sub.entries = entries[:n_train]
            model = train(sub, rs, kind, fc)
            correct = sum(
                1 for e in test if predict_next(model, e.sv)[0] is e.kind
            )
            accs.append(correct / len(test))
        acc = sum(accs) / len(accs) if accs else 0.0
        table.append({"classifier": kind, "features": fc, "accuracy": acc})
    best_i = max(range(len(table)), key=lambda i: (table[i]["accuracy"], -i))
    return (candidates[best_i], table)


def seen_pairs(trace: Trace, rs: RegionSet) -> list:
    """Deduplicated (kind, region) pairs, regions under the CURRENT
    partition, first-occurrence order."""
    seen = []
    seen_set = set()
    for e in trace:
        pair = (e.kind, rs.lookup(e.point[0], e.point[1]))
        if pair not in seen_set:
            seen_set.add(pair)
            seen.append(pair)
    return seen


def unseen_actions(trace: Trace) -> list:
    performed = {e.kind for e in trace}
    return [k for k in ACTION_KINDS if k not in performed]


def action_distribution(kinds) -> dict:
    """Normalized histogram over action kinds."""
    items = [e.kind if isinstance(e, TraceEntry) else ActionKind(e) for e in kinds]
    if not items:
        raise InsufficientDataError("empty action list")
    counts = Counter(items)
    total = len(items)
    return {k: c / total for k, c in counts.items()}


def l1_distance(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    return sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)
