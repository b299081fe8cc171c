"""Trees, forests, and cascades over discrete lattices: constructions,
exact analysis, training, and experiment harness."""

from .ensemble import CascadeForest, DeepTree, Forest, SizeBudget, model_dim, total_leaves
from .lattice import (
    ConstantConcept,
    LatticeSpace,
    ParityConcept,
    ProductDistribution,
    TabulatedConcept,
    UniformDistribution,
    parity_label,
)
from .sexpr import parse_model, print_model
from .tree import Leaf, Node, dim_of, evaluate, evaluate_batch, leaf_count, leaf_regions

__all__ = [
    "CascadeForest",
    "ConstantConcept",
    "DeepTree",
    "Forest",
    "LatticeSpace",
    "Leaf",
    "Node",
    "ParityConcept",
    "ProductDistribution",
    "SizeBudget",
    "TabulatedConcept",
    "UniformDistribution",
    "dim_of",
    "evaluate",
    "evaluate_batch",
    "leaf_count",
    "leaf_regions",
    "model_dim",
    "parity_label",
    "parse_model",
    "print_model",
    "total_leaves",
]

__version__ = "0.1.0"
