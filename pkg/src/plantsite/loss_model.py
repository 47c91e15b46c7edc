"""Gradient-boosted tree model for compartment-level tree-cover loss.

Hand-built boosting with logistic loss: each round fits a regression tree to
the residuals r = y - p (the negative gradient), with exact greedy
variance-gain splits over sorted feature values and Newton leaf values
sum(r) / sum(p*(1-p)). Raw scores accumulate as F = base + lr * sum(trees);
probabilities are sigmoid(F).

Training canonicalizes row order up front (lexicographic over the feature
matrix plus label), so the learned model is bit-identical no matter how the
caller ordered the rows.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .landscape.types import FEATURE_NAMES, Compartment, CompartmentFeatures, ValidationError

#: Gain below this is treated as no improvement; the node stays a leaf.
MIN_GAIN = 1e-12

#: Leaf Newton denominators below this are degenerate; such leaves emit 0.
MIN_HESSIAN_SUM = 1e-16


# ---------------------------------------------------------------------------
# Labels and splits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LossLabel:
    compartment_id: int
    label: int


def label_compartments(compartments: Sequence[Compartment]) -> list[LossLabel]:
    """Loss label per compartment: 1 iff cover in 2015 fell below 2003."""
    labels = []
    for comp in compartments:
        if comp.fc_2015_ha is None:
            raise ValidationError(
                f"compartment {comp.compartment_id}: fc_2015_ha missing, cannot label"
            )
        change = comp.fc_2015_ha - comp.features.fc_2003_ha
        labels.append(LossLabel(compartment_id=comp.compartment_id, label=1 if change < 0.0 else 0))
    return labels


def split_train_test(
    labeled: Sequence[tuple[Compartment, int]], seed: int
) -> tuple[list[tuple[Compartment, int]], list[tuple[Compartment, int]]]:
    """Seeded shuffle, then floor(0.8 n) train rows and the rest test."""
    if len(labeled) < 5:
        raise ValidationError(f"need at least 5 labeled compartments, got {len(labeled)}")
    rows = list(labeled)
    random.Random(seed).shuffle(rows)
    k = int(math.floor(0.8 * len(rows)))
    return rows[:k], rows[k:]


def labeled_pairs(compartments: Sequence[Compartment]) -> list[tuple[Compartment, int]]:
    by_id = {c.compartment_id: c for c in compartments}
    return [(by_id[lab.compartment_id], lab.label) for lab in label_compartments(compartments)]


# ---------------------------------------------------------------------------
# Model structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GbdtConfig:
    n_rounds: int = 100
    max_depth: int = 4
    learning_rate: float = 0.1
    min_leaf: int = 5
    feature_subsample: float = 1.0

    def __post_init__(self) -> None:
        if self.n_rounds < 0 or self.max_depth < 1 or self.min_leaf < 1:
            raise ValidationError("n_rounds >= 0, max_depth >= 1, min_leaf >= 1 required")
        if not (0.0 < self.learning_rate <= 1.0):
            raise ValidationError(f"learning_rate {self.learning_rate} out of (0,1]")
        if not (0.0 < self.feature_subsample <= 1.0):
            raise ValidationError(f"feature_subsample {self.feature_subsample} out of (0,1]")


@dataclass(frozen=True)
class TreeNode:
    """Internal node (feature/threshold/children set) or leaf (leaf_value set)."""

    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional[int] = None
    right: Optional[int] = None
    leaf_value: Optional[float] = None

    @property
    def is_leaf(self) -> bool:
        return self.leaf_value is not None


@dataclass(frozen=True)
class Tree:
    nodes: tuple[TreeNode, ...]

    def predict_row(self, row: np.ndarray) -> float:
        node = self.nodes[0]
        while not node.is_leaf:
            if row[node.feature] < node.threshold:
                node = self.nodes[node.left]
            else:
                node = self.nodes[node.right]
        return node.leaf_value

    def predict(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(len(x))
        for i in range(len(x)):
            out[i] = self.predict_row(x[i])
        return out


@dataclass(frozen=True)
class GbdtModel:
    base_score: float
    learning_rate: float
    trees: tuple[Tree, ...]
    config: GbdtConfig
    feature_names: tuple[str, ...] = FEATURE_NAMES
    #: per-round training logistic loss, index 0 = base score only;
    #: diagnostic, not serialized
    train_loss_history: tuple[float, ...] = field(default=(), compare=False)

    def raw_score(self, x: np.ndarray) -> np.ndarray:
        f = np.full(len(x), self.base_score)
        for tree in self.trees:
            f += self.learning_rate * tree.predict(x)
        return f


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _logistic_loss(y: np.ndarray, f: np.ndarray) -> float:
    # mean of log(1 + exp(-f)) for y=1 and log(1 + exp(f)) for y=0
    signed = np.where(y == 1, -f, f)
    return float(np.mean(np.logaddexp(0.0, signed)))


# ---------------------------------------------------------------------------
# Tree growing
# ---------------------------------------------------------------------------

def _best_split(
    x: np.ndarray, residual: np.ndarray, rows: np.ndarray, features: Sequence[int], min_leaf: int
) -> Optional[tuple[int, float, float]]:
    """(feature, threshold, gain) of the best variance-gain split, or None.

    Gain is the sum-of-squares identity S_L^2/n_L + S_R^2/n_R - S^2/n;
    thresholds are midpoints between consecutive distinct sorted values.
    Ties keep the first candidate found (lowest feature index, then lowest
    threshold), which makes growing order-independent.
    """
    n = len(rows)
    if n < 2 * min_leaf:
        return None
    r = residual[rows]
    total = float(r.sum())
    parent = total * total / n
    best: Optional[tuple[int, float, float]] = None
    for j in features:
        values = x[rows, j]
        order = np.argsort(values, kind="stable")
        xs = values[order]
        prefix = np.cumsum(r[order])
        cut = np.nonzero(xs[:-1] < xs[1:])[0]  # split between cut and cut+1
        if len(cut) == 0:
            continue
        n_left = cut + 1
        n_right = n - n_left
        ok = (n_left >= min_leaf) & (n_right >= min_leaf)
        if not ok.any():
            continue
        cut = cut[ok]
        n_left = n_left[ok]
        n_right = n_right[ok]
        s_left = prefix[cut]
        s_right = total - s_left
        gains = s_left * s_left / n_left + s_right * s_right / n_right - parent
        k = int(np.argmax(gains))
        gain = float(gains[k])
        if gain > MIN_GAIN and (best is None or gain > best[2]):
            threshold = float((xs[cut[k]] + xs[cut[k] + 1]) / 2.0)
            best = (j, threshold, gain)
    return best


def _grow_tree(
    x: np.ndarray,
    residual: np.ndarray,
    hessian: np.ndarray,
    rows: np.ndarray,
    features: Sequence[int],
    config: GbdtConfig,
) -> Tree:
    nodes: list[TreeNode] = []

    def leaf(rows_: np.ndarray) -> int:
        h_sum = float(hessian[rows_].sum())
        value = float(residual[rows_].sum()) / h_sum if h_sum > MIN_HESSIAN_SUM else 0.0
        nodes.append(TreeNode(leaf_value=value))
        return len(nodes) - 1

    def grow(rows_: np.ndarray, depth: int) -> int:
        if depth >= config.max_depth:
            return leaf(rows_)
        split = _best_split(x, residual, rows_, features, config.min_leaf)
        if split is None:
            return leaf(rows_)
        j, threshold, _ = split
        mask = x[rows_, j] < threshold
        index = len(nodes)
        nodes.append(TreeNode())  # placeholder until children are numbered
        left = grow(rows_[mask], depth + 1)
        right = grow(rows_[~mask], depth + 1)
        nodes[index] = TreeNode(feature=j, threshold=threshold, left=left, right=right)
        return index

    grow(rows, 0)
    return Tree(nodes=tuple(nodes))


# ---------------------------------------------------------------------------
# Training / prediction / evaluation
# ---------------------------------------------------------------------------

def _design_matrix(rows: Sequence[tuple[Compartment, int]]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([comp.features.as_vector() for comp, _ in rows], dtype=float)
    y = np.array([label for _, label in rows], dtype=float)
    return x, y


def train(
    train_rows: Sequence[tuple[Compartment, int]],
    config: GbdtConfig = GbdtConfig(),
    seed: int = 0,
) -> GbdtModel:
    if not train_rows:
        raise ValidationError("empty training set")
    x, y = _design_matrix(train_rows)
    positives = float(y.sum())
    if positives == 0.0 or positives == float(len(y)):
        raise ValidationError("training set has a single class; cannot fit log-odds")

    # canonical row order (features major, label as final tiebreak):
    # the model becomes independent of the caller's row ordering
    order = np.lexsort((y,) + tuple(x[:, j] for j in reversed(range(x.shape[1]))))
    x, y = x[order], y[order]

    prevalence = positives / len(y)
    base = math.log(prevalence / (1.0 - prevalence))
    rng = random.Random(seed)
    n_features = x.shape[1]
    all_rows = np.arange(len(y))

    f = np.full(len(y), base)
    history = [_logistic_loss(y, f)]
    trees: list[Tree] = []
    for _ in range(config.n_rounds):
        p = _sigmoid(f)
        residual = y - p
        hessian = p * (1.0 - p)
        if config.feature_subsample < 1.0:
            k = max(1, math.ceil(config.feature_subsample * n_features))
            features = sorted(rng.sample(range(n_features), k))
        else:
            features = range(n_features)
        tree = _grow_tree(x, residual, hessian, all_rows, features, config)
        trees.append(tree)
        f = f + config.learning_rate * tree.predict(x)
        history.append(_logistic_loss(y, f))

    return GbdtModel(
        base_score=base,
        learning_rate=config.learning_rate,
        trees=tuple(trees),
        config=config,
        feature_names=FEATURE_NAMES,
        train_loss_history=tuple(history),
    )


FeatureInput = Union[CompartmentFeatures, Mapping[str, float]]


def _feature_row(features: FeatureInput) -> np.ndarray:
    if isinstance(features, CompartmentFeatures):
        return np.array(features.as_vector())
    return np.array(CompartmentFeatures.from_mapping(dict(features)).as_vector())


def predict_proba(model: GbdtModel, features: FeatureInput) -> float:
    """P(tree-cover loss) for one compartment's feature vector."""
    row = _feature_row(features)[np.newaxis, :]
    return float(_sigmoid(model.raw_score(row))[0])


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    tp: int
    fp: int
    tn: int
    fn: int
    threshold: float
    precision_defined: bool
    recall_defined: bool


def evaluate(
    model: GbdtModel, test_rows: Sequence[tuple[Compartment, int]], threshold: float = 0.5
) -> EvalReport:
    """Confusion matrix at the threshold; predicted positive iff p >= threshold."""
    if not test_rows:
        raise ValidationError("empty test set")
    x, y = _design_matrix(test_rows)
    p = _sigmoid(model.raw_score(x))
    predicted = p >= threshold
    actual = y == 1.0
    tp = int(np.sum(predicted & actual))
    fp = int(np.sum(predicted & ~actual))
    tn = int(np.sum(~predicted & ~actual))
    fn = int(np.sum(~predicted & actual))
    precision_defined = (tp + fp) > 0
    recall_defined = (tp + fn) > 0
    return EvalReport(
        precision=tp / (tp + fp) if precision_defined else 0.0,
        recall=tp / (tp + fn) if recall_defined else 0.0,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        threshold=threshold,
        precision_defined=precision_defined,
        recall_defined=recall_defined,
    )


#: Score substituted for cells with no compartment assignment.
NEUTRAL_ML_SCORE = 50.0


def grid_ml_score(
    cell, model: GbdtModel, compartments: Sequence[Compartment]
) -> tuple[float, bool]:
    """(M, neutral_fill) for one cell: M = 100*(1 - p_loss) of its compartment.

    Cells with no compartment get the neutral score and a True flag.
    """
    if cell.compartment_id is None:
        return NEUTRAL_ML_SCORE, True
    by_id = {c.compartment_id: c for c in compartments}
    comp = by_id.get(cell.compartment_id)
    if comp is None:
        raise ValidationError(f"cell {cell.grid_id}: unknown compartment {cell.compartment_id}")
    return 100.0 * (1.0 - predict_proba(model, comp.features)), False


# ---------------------------------------------------------------------------
# JSON serialization (bit-exact round trip)
# ---------------------------------------------------------------------------

def _node_payload(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"leaf_value": node.leaf_value}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": node.left,
        "right": node.right,
    }


def model_to_json(model: GbdtModel) -> str:
    payload = {
        "base_score": model.base_score,
        "learning_rate": model.learning_rate,
        "trees": [{"nodes": [_node_payload(n) for n in tree.nodes]} for tree in model.trees],
        "config": asdict(model.config),
        "feature_names": list(model.feature_names),
    }
    return json.dumps(payload, indent=1) + "\n"


def model_from_json(text: str) -> GbdtModel:
    payload = json.loads(text)
    names = tuple(payload["feature_names"])
    if names != FEATURE_NAMES:
        raise ValidationError("model feature names do not match this build's feature set")
    trees = []
    for tree_payload in payload["trees"]:
        nodes = []
        for np_ in tree_payload["nodes"]:
            if "leaf_value" in np_:
                nodes.append(TreeNode(leaf_value=float(np_["leaf_value"])))
            else:
                nodes.append(
                    TreeNode(
                        feature=int(np_["feature"]),
                        threshold=float(np_["threshold"]),
                        left=int(np_["left"]),
                        right=int(np_["right"]),
                    )
                )
        trees.append(Tree(nodes=tuple(nodes)))
    return GbdtModel(
        base_score=float(payload["base_score"]),
        learning_rate=float(payload["learning_rate"]),
        trees=tuple(trees),
        config=GbdtConfig(**payload["config"]),
        feature_names=names,
    )


def save_model(model: GbdtModel, path: str | Path) -> None:
    Path(path).write_text(model_to_json(model))


def load_model(path: str | Path) -> GbdtModel:
    return model_from_json(Path(path).read_text())
