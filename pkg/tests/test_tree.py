import numpy as np
import pytest

from deeptrees.errors import FeatureOutOfRange
from deeptrees.lattice import LatticeSpace, ParityConcept
from deeptrees.rng import generator
from deeptrees.tree import (
    Leaf,
    Node,
    dim_of,
    evaluate,
    evaluate_batch,
    leaf_count,
    leaf_regions,
    max_feature,
    region_size,
    threshold_cut,
)

STUMP = Node(1, 1.0, Leaf(-1), Leaf(+1))

# hand-built parity tree over [2]^2: split x1 then x2 in each half
PARITY_2x2 = Node(
    1,
    1.0,
    Node(2, 1.0, Leaf(+1), Leaf(-1)),
    Node(2, 1.0, Leaf(-1), Leaf(+1)),
)


def random_tree(rng, space, max_extra_splits=6):
    """In-range random tree for round-trip and partition properties."""

    def build(bounds, budget):
        open_dims = [(j, lo, hi) for j, (lo, hi) in enumerate(bounds) if hi > lo]
        if budget <= 0 or not open_dims or rng.random() < 0.3:
            return Leaf(-1 if rng.random() < 0.5 else 1)
        j, lo, hi = open_dims[int(rng.integers(len(open_dims)))]
        cut = int(rng.integers(lo, hi))
        left = list(bounds)
        left[j] = (lo, cut)
        right = list(bounds)
        right[j] = (cut + 1, hi)
        split = int(rng.integers(0, budget))
        return Node(j + 1, float(cut), build(left, split), build(right, budget - 1 - split))

    return build([(1, space.p)] * space.n, max_extra_splits)


def test_eval_constant():
    assert evaluate(Leaf(+1), (9.9,)) == 1


def test_eval_stump_threshold_semantics():
    assert evaluate(STUMP, (1.0,)) == -1
    assert evaluate(STUMP, (2.0,)) == 1
    assert evaluate(STUMP, (1.0 + 1e-12,)) == 1


def test_eval_parity_tree_exhaustive():
    space = LatticeSpace(2, 2)
    concept = ParityConcept(space)
    for x in space.enumerate_points():
        assert evaluate(PARITY_2x2, x.astype(float)) == concept.label(x)


def test_eval_feature_out_of_range():
    with pytest.raises(FeatureOutOfRange):
        evaluate(Node(3, 0.5, Leaf(-1), Leaf(1)), (1.0, 2.0))
    with pytest.raises(FeatureOutOfRange):
        evaluate_batch(Node(3, 0.5, Leaf(-1), Leaf(1)), np.ones((4, 2)))


def test_batch_matches_single():
    rng = generator(0, "tree-batch")
    space = LatticeSpace(3, 4)
    tree = random_tree(rng, space)
    X = rng.random((64, 3)) * 4 + 0.5
    batch = evaluate_batch(tree, X)
    assert batch.tolist() == [evaluate(tree, x) for x in X]


def test_dims():
    assert (dim_of(Leaf(1)), leaf_count(Leaf(1))) == (1, 1)
    assert (dim_of(STUMP), leaf_count(STUMP)) == (4, 2)
    assert (dim_of(PARITY_2x2), leaf_count(PARITY_2x2)) == (10, 4)


def test_dim_identity_random_trees():
    rng = generator(1, "tree-dims")
    space = LatticeSpace(3, 4)
    for _ in range(50):
        tree = random_tree(rng, space, max_extra_splits=10)
        assert dim_of(tree) == 3 * (leaf_count(tree) - 1) + 1


def test_max_feature():
    assert max_feature(Leaf(1)) == 0
    assert max_feature(Node(5, 0.0, Leaf(1), Node(2, 1.0, Leaf(-1), Leaf(1)))) == 5


def test_threshold_cut():
    assert threshold_cut(2.5) == 2
    assert threshold_cut(2.0) == 2
    assert threshold_cut(0.3) == 0


def test_leaf_regions_constant():
    space = LatticeSpace(2, 2)
    assert leaf_regions(Leaf(+1), space) == [(((1, 2), (1, 2)), 1)]


def test_leaf_regions_stump():
    space = LatticeSpace(2, 2)
    assert leaf_regions(STUMP, space) == [
        (((1, 1), (1, 2)), -1),
        (((2, 2), (1, 2)), 1),
    ]


def test_leaf_regions_parity_tree():
    space = LatticeSpace(2, 2)
    regions = leaf_regions(PARITY_2x2, space)
    assert len(regions) == 4
    assert all(region_size(bounds) == 1 for bounds, _ in regions)
    for bounds, label in regions:
        point = np.array([lo for lo, _ in bounds])
        assert label == ParityConcept(space).label(point)


def test_leaf_regions_partition_random_trees():
    rng = generator(2, "tree-regions")
    space = LatticeSpace(3, 4)
    points = space.enumerate_points()
    for _ in range(40):
        tree = random_tree(rng, space, max_extra_splits=8)
        regions = leaf_regions(tree, space)
        assert sum(region_size(bounds) for bounds, _ in regions) == space.size
        covered = np.zeros(space.size, dtype=int)
        for bounds, label in regions:
            inside = np.ones(space.size, dtype=bool)
            for j, (lo, hi) in enumerate(bounds):
                inside &= (points[:, j] >= lo) & (points[:, j] <= hi)
            covered += inside
            # eval agrees with the region label on every member point
            if inside.any():
                values = evaluate_batch(tree, points[inside].astype(float))
                assert set(values.tolist()) == {label}
        assert np.all(covered == 1)


def test_negative_feature_index_rejected():
    with pytest.raises(FeatureOutOfRange):
        Node(0, 1.0, Leaf(1), Leaf(-1))
