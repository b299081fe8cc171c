"""Forests (majority vote) and deep trees (cascade composition).

A deep tree applies its layers in order: layer 1 reads the raw features,
every later layer reads the raw features plus one augmented feature
holding the previous layer's label as a float. A cascade forest stacks
forests the same way but augments with per-class vote fractions instead
of a single hard label.
"""

import hashlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FeatureOutOfRange, SizeBudgetExceeded
from .rng import generator
from .tree import Leaf, Node, Tree, dim_of, evaluate, evaluate_batch, leaf_count, max_feature

TIE_NEGATIVE = "negative"  # lowest tied label; the reproducible default
TIE_POSITIVE = "positive"  # highest tied label
TIE_SEEDED = "seeded"  # uniform among tied labels, keyed by (seed, x)


@dataclass(frozen=True)
class SizeBudget:
    """Restricted-size membership: dim(tree) <= 6 * ambient_dim + 1."""

    ambient_dim: int

    @property
    def max_dim(self) -> int:
        return 6 * self.ambient_dim + 1

    def admits(self, tree: Tree) -> bool:
        return dim_of(tree) <= self.max_dim


def _require_budget(tree: Tree, ambient_dim: int, role: str):
    budget = SizeBudget(ambient_dim)
    if not budget.admits(tree):
        raise SizeBudgetExceeded(
            f"{role}: dim {dim_of(tree)} exceeds budget {budget.max_dim} "
            f"for ambient dimension {ambient_dim}"
        )
    if max_feature(tree) > ambient_dim:
        raise FeatureOutOfRange(
            f"{role}: references feature {max_feature(tree)} beyond ambient "
            f"dimension {ambient_dim}"
        )


def _point_stream_key(x) -> int:
    digest = hashlib.sha256(np.asarray(x, dtype=np.float64).tobytes()).digest()
    return int.from_bytes(digest[:8], "little")


def _break_tie(tied_labels, tie_rule, tie_seed, x):
    tied = sorted(int(v) for v in tied_labels)
    if tie_rule == TIE_NEGATIVE:
        return tied[0]
    if tie_rule == TIE_POSITIVE:
        return tied[-1]
    if tie_rule == TIE_SEEDED:
        rng = generator(0 if tie_seed is None else tie_seed, "forest.tie", _point_stream_key(x))
        return tied[int(rng.integers(len(tied)))]
    raise ValueError(f"unknown tie rule {tie_rule!r}")


@dataclass(frozen=True)
class Forest:
    """Majority vote over member trees.

    When ambient_dim is given, members must satisfy the restricted-size
    budget of that ambient space; trained forests pass None because the
    experiment models are unrestricted.
    """

    trees: tuple
    tie_rule: str = TIE_NEGATIVE
    tie_seed: Optional[int] = None
    ambient_dim: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        if not self.trees:
            raise ValueError("a forest needs at least one tree")
        if self.tie_rule not in (TIE_NEGATIVE, TIE_POSITIVE, TIE_SEEDED):
            raise ValueError(f"unknown tie rule {self.tie_rule!r}")
        if self.ambient_dim is not None:
            for tree in self.trees:
                _require_budget(tree, self.ambient_dim, "forest member")

    def member_predictions(self, X) -> np.ndarray:
        """(n_trees, m) label matrix."""
        return np.stack([evaluate_batch(tree, X) for tree in self.trees])

    def predict(self, x) -> int:
        return int(self.predict_batch(np.asarray(x, dtype=np.float64)[None, :])[0])

    def predict_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        votes = self.member_predictions(X)
        classes = np.unique(votes)
        counts = np.stack([(votes == c).sum(axis=0) for c in classes], axis=1)
        best = counts.max(axis=1)
        out = np.empty(X.shape[0], dtype=np.int64)
        for r in range(X.shape[0]):
            tied = classes[counts[r] == best[r]]
            if len(tied) == 1:
                out[r] = tied[0]
            else:
                out[r] = _break_tie(tied, self.tie_rule, self.tie_seed, X[r])
        return out

    def vote_fractions(self, X, classes) -> np.ndarray:
        """(m, n_classes) fraction of member votes per class, in class order."""
        votes = self.member_predictions(X)
        return np.stack([(votes == c).mean(axis=0) for c in classes], axis=1)


@dataclass(frozen=True)
class DeepTree:
    """Cascade of trees; layer d >= 2 reads feature n+1 = previous label."""

    layers: tuple
    input_dim: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValueError("a deep tree needs at least one layer")
        if self.input_dim is not None:
            _require_budget(self.layers[0], self.input_dim, "deep tree layer 1")
            for d, layer in enumerate(self.layers[1:], start=2):
                _require_budget(layer, self.input_dim + 1, f"deep tree layer {d}")

    @property
    def depth(self) -> int:
        return len(self.layers)

    def predict(self, x) -> int:
        x = np.asarray(x, dtype=np.float64)
        y = evaluate(self.layers[0], x)
        for layer in self.layers[1:]:
            y = evaluate(layer, np.append(x, float(y)))
        return int(y)

    def predict_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        y = evaluate_batch(self.layers[0], X)
        for layer in self.layers[1:]:
            augmented = np.column_stack([X, y.astype(np.float64)])
            y = evaluate_batch(layer, augmented)
        return y


@dataclass(frozen=True)
class CascadeForest:
    """Stack of forests; each later layer sees per-class vote fractions."""

    layers: tuple
    classes: tuple

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "classes", tuple(int(c) for c in self.classes))
        if not self.layers:
            raise ValueError("a cascade forest needs at least one layer")
        if not self.classes:
            raise ValueError("a cascade forest needs a class list")

    @property
    def depth(self) -> int:
        return len(self.layers)

    def augmented_inputs(self, X, layer_index: int) -> np.ndarray:
        """Input matrix consumed by the given 0-based layer."""
        X = np.asarray(X, dtype=np.float64)
        current = X
        for layer in self.layers[:layer_index]:
            fractions = layer.vote_fractions(current, self.classes)
            current = np.column_stack([X, fractions])
        return current

    def predict_batch(self, X) -> np.ndarray:
        return self.layers[-1].predict_batch(self.augmented_inputs(X, len(self.layers) - 1))

    def predict(self, x) -> int:
        return int(self.predict_batch(np.asarray(x, dtype=np.float64)[None, :])[0])


def model_dim(model) -> int:
    """Total parameter count; additive over ensemble members and layers."""
    if isinstance(model, (Leaf, Node)):
        return dim_of(model)
    if isinstance(model, Forest):
        return sum(dim_of(t) for t in model.trees)
    if isinstance(model, DeepTree):
        return sum(dim_of(t) for t in model.layers)
    if isinstance(model, CascadeForest):
        return sum(model_dim(layer) for layer in model.layers)
    raise TypeError(f"not a model: {type(model).__name__}")


def total_leaves(model) -> int:
    """Summed leaf count over every tree in the model."""
    if isinstance(model, (Leaf, Node)):
        return leaf_count(model)
    if isinstance(model, Forest):
        return sum(leaf_count(t) for t in model.trees)
    if isinstance(model, DeepTree):
        return sum(leaf_count(t) for t in model.layers)
    if isinstance(model, CascadeForest):
        return sum(total_leaves(layer) for layer in model.layers)
    raise TypeError(f"not a model: {type(model).__name__}")


def predict_batch(model, X) -> np.ndarray:
    """Uniform prediction entry point for any model kind."""
    if isinstance(model, (Leaf, Node)):
        return evaluate_batch(model, X)
    return model.predict_batch(X)
