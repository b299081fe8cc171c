"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s`. The benchmark criterion
needs the cached datasets and is skipped when they are unavailable.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from deeptrees.analysis import (
    forest_zero_error_leafbound,
    gini_gain_map,
    label_partition,
    risk_report,
    tree_complexity_oracle,
)
from deeptrees.construct import build_parity_deeptree, compile_report, compile_to_deeptree
from deeptrees.data_io import BUILTIN_MANIFESTS, SimulationSpec, fetch_dataset, generate_simulation
from deeptrees.ensemble import Forest, SizeBudget, model_dim, predict_batch
from deeptrees.errors import UnreachableSource
from deeptrees.experiments import (
    ExperimentConfig,
    GINI_COLUMNS,
    SIM_COLUMNS,
    leaves_to_target,
    random_cart_tree,
    random_region_tree,
    run_bounds_suite,
    run_gini_verification,
    run_simulation,
    run_uci,
    strip_wall_time,
    summarize_uci,
    uniform_zero_gain_check,
    write_table,
    _zero_error_trained_forest,
)
from deeptrees.lattice import LatticeSpace, ParityConcept, ProductDistribution, TabulatedConcept, UniformDistribution
from deeptrees.rng import generator
from deeptrees.tree import dim_of


def _report(number: int, ok: bool, detail: str, elapsed: float, limit: float):
    line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s / limit {limit:.0f}s) {detail}"
    print(line)
    assert ok, line
    assert elapsed < limit, f"criterion {number} exceeded its time budget: {line}"


def test_criterion_01_parity_construction():
    """Constructive upper bound: exact parity and dim <= 10pn on the whole grid."""
    start = time.perf_counter()
    failures = []
    for p in (2, 3, 4):
        for n in range(1, 9):
            space = LatticeSpace(n, p)
            cascade = build_parity_deeptree(p, n)
            points = space.enumerate_points()
            exact = np.array_equal(
                cascade.predict_batch(points.astype(float)),
                ParityConcept(space).labels(points),
            )
            dim = model_dim(cascade)
            budgets = SizeBudget(n).admits(cascade.layers[0]) and all(
                SizeBudget(n + 1).admits(layer) for layer in cascade.layers[1:]
            )
            if not (exact and dim <= 10 * p * n and budgets):
                failures.append((p, n, exact, dim))
    elapsed = time.perf_counter() - start
    _report(1, not failures, f"24 grid cells exact within 10pn; failures={failures}", elapsed, 10)


def test_criterion_02_oracle_lower_bounds():
    """Exhaustive search matches the leaf lower bound L >= p^n - 2*floor(eps*p^n)."""
    start = time.perf_counter()
    details = []
    ok = True
    for n, frozen_quarter in ((2, 3), (3, 5)):
        space = LatticeSpace(n, 2)
        concept = ParityConcept(space)
        dist = UniformDistribution(space)
        zero = tree_complexity_oracle(space, concept, dist, 0, max_leaves=space.size)
        quarter = tree_complexity_oracle(space, concept, dist, Fraction(1, 4), max_leaves=space.size)
        bound = space.size - 2 * int(Fraction(1, 4) * space.size)
        ok &= zero.search_exhaustive and zero.minimal_leaves == space.size
        ok &= quarter.minimal_leaves == frozen_quarter and quarter.minimal_leaves >= bound
        ok &= quarter.minimal_leaves >= space.size // 2  # the separation bound p^n/2
        # witnesses re-validated by independent enumeration
        ok &= risk_report(zero.witness, concept, dist, space).exact_risk == 0
        ok &= risk_report(quarter.witness, concept, dist, space).exact_risk <= Fraction(1, 4)
        details.append(f"[2]^{n}: eps=0 -> {zero.minimal_leaves}, eps=1/4 -> {quarter.minimal_leaves} (floor {bound})")
    elapsed = time.perf_counter() - start
    _report(2, ok, "; ".join(details), elapsed, 60)


def test_criterion_03_compiler_corpus():
    """100 CART trees on [4]^3: pointwise agreement and both size identities."""
    start = time.perf_counter()
    space = LatticeSpace(3, 4)
    points = space.enumerate_points().astype(float)
    checked = 0
    ok = True
    for i in range(100):
        source = random_cart_tree(space, seed=0, index=i)
        compiled = compile_to_deeptree(source, space)
        report = compile_report(source, space)
        agrees = np.array_equal(compiled.predict_batch(points), predict_batch(source, points))
        minority = min(report["d_plus"], report["d_minus"])
        exact = minority > 0 and report["compiled_dim"] == (6 * space.n + 4) * minority - 3
        bounded = report["compiled_dim"] <= (4 * space.n + 1) * report["source_dim"]
        ok &= agrees and exact and bounded
        checked += 1
    elapsed = time.perf_counter() - start
    _report(3, ok and checked == 100, f"{checked} compiled cascades agree with exact dims", elapsed, 30)


def test_criterion_04_forest_leaf_bound():
    """Zero-error forests keep at least p^n total leaves, constructed and trained."""
    from deeptrees.experiments import perfect_parity_tree
    from deeptrees.tree import Leaf

    start = time.perf_counter()
    ok = True
    details = []
    for p in (2, 3, 4):
        space = LatticeSpace(2, p)
        concept = ParityConcept(space)
        perfect = perfect_parity_tree(space)
        trained = _zero_error_trained_forest(space, seed=0)
        ok &= trained is not None  # the trained instance must genuinely participate
        instances = [Forest((perfect,)), Forest((perfect, perfect, Leaf(1)))]
        if trained is not None:
            instances.append(trained)
        for forest in instances:
            report = forest_zero_error_leafbound(forest, concept, space)
            ok &= report.holds
        details.append(f"p={p}: tight {space.size}>={space.size}, trained total {report.total_leaf_count}")
    elapsed = time.perf_counter() - start
    _report(4, ok, "; ".join(details), elapsed, 30)


def test_criterion_05_label_partitions():
    """Parity splits into p^n classes with class-count gap <= 1; the partition
    realizes the coincide-or-disjoint dichotomy."""
    start = time.perf_counter()
    ok = True
    counts = 0
    for p in (1, 2, 3, 4):
        for n in range(1, 7):
            space = LatticeSpace(n, p)
            part = label_partition(space, ParityConcept(space), r=1)
            gap = abs(part.count_with_label(1) - part.count_with_label(-1))
            ok &= part.class_count == space.size and gap <= 1
            # structural dichotomy at r=1: every class a singleton, and all
            # unit-step neighbors carry the opposite label
            ok &= all(len(members) == 1 for members in part.classes)
            counts += 1
    # independent BFS cross-check of the component structure on a random concept
    space = LatticeSpace(3, 3)
    rng = generator(99, "acceptance-partition")
    table = np.where(rng.random(space.size) < 0.5, -1, 1)
    concept = TabulatedConcept(space, table)
    part = label_partition(space, concept, r=1)
    points = space.enumerate_points()
    seen = np.full(space.size, -1)
    component = 0
    for origin in range(space.size):
        if seen[origin] >= 0:
            continue
        frontier = [origin]
        seen[origin] = component
        while frontier:
            i = frontier.pop()
            for j in range(space.size):
                if seen[j] < 0 and table[i] == table[j] and np.abs(points[i] - points[j]).sum() <= 1:
                    seen[j] = component
                    frontier.append(j)
        component += 1
    ok &= component == part.class_count
    for members in part.classes:
        ok &= len({int(seen[i]) for i in members}) == 1
    elapsed = time.perf_counter() - start
    _report(5, ok, f"{counts} parity grids exhaustive; BFS cross-check {component} classes", elapsed, 60)


def test_criterion_06_error_set_bound_corpus():
    """1000 random trees against parity: |E| >= (p^n - L)/2, exact integers."""
    start = time.perf_counter()
    ok = True
    checked = 0
    for space in (LatticeSpace(3, 4), LatticeSpace(4, 2), LatticeSpace(3, 3)):
        concept = ParityConcept(space)
        dist = UniformDistribution(space)
        rng = generator(17, "acceptance-error-floor", space.n, space.p)
        for _ in range(334):
            tree = random_region_tree(space, rng, max_extra_splits=10)
            report = risk_report(tree, concept, dist, space)
            ok &= 2 * report.error_set_size >= space.size - report.leaf_count
            ok &= 2 * report.proper_set_size <= space.size + report.leaf_count
            checked += 1
    elapsed = time.perf_counter() - start
    _report(6, ok and checked >= 1000, f"{checked} random trees satisfy the error floor", elapsed, 30)


def test_criterion_07_impurity_patterns():
    """Exact impurity maps: flat under uniform, midpoint pattern under a=3, broken under a=2."""
    start = time.perf_counter()
    ok = uniform_zero_gain_check(2) and uniform_zero_gain_check(3)
    space = LatticeSpace(2, 4)
    gm = gini_gain_map(space, ProductDistribution(space, 3), ParityConcept(space))
    ok &= gm.best == (1, 2) and gm.gains[gm.best] == Fraction(9, 392)
    cfg = ExperimentConfig(experiment="gini", gini_ns=(2, 4, 6), gini_a_values=(3, 2))
    rows, reports = run_gini_verification(cfg)
    verdicts = {r["subject"]: r["passed"] for r in reports}
    ok &= all(verdicts[f"n={n},a=3"] for n in (2, 4, 6))
    ok &= not any(verdicts[f"n={n},a=2"] for n in (2, 4, 6))
    # the optional high-dimensional case costs little once regions dedupe
    _, top = run_gini_verification(
        ExperimentConfig(experiment="gini", gini_ns=(8,), gini_a_values=(3,))
    )
    ok &= top[0]["passed"]
    elapsed = time.perf_counter() - start
    detail = "uniform flat; a=3 midpoint pattern n<=8; a=2 broken; root gain 9/392"
    _report(7, ok, detail, elapsed, 120)


def test_criterion_08_simulation_trends():
    """Desk-scale sweep reproduces the leaves-to-99% orderings."""
    start = time.perf_counter()
    cfg = ExperimentConfig(experiment="sim", seed=0, sim_sample_count=100_000)
    sim_rows = run_simulation(cfg)
    summary = leaves_to_target(sim_rows, 0.99)

    def best(subject, models):
        values = [summary[(subject, m)] for m in models if summary[(subject, m)] is not None]
        return min(values) if values else None

    dt2 = summary[("n=2", "DT-2")]
    rf9_n2 = summary[("n=2", "RF-9")]
    ok = dt2 is not None and abs(dt2 - 15) <= 7.5
    ok &= rf9_n2 is None or dt2 < rf9_n2
    details = [f"n=2: DT-2 {dt2} (band 15±7.5), RF-9 {rf9_n2}"]
    for subject in ("n=4", "n=8"):
        dt_best = best(subject, ["DT-2", "DT-3", "DT-4"])
        t_leaves = summary[(subject, "T")]
        rf_best = best(subject, ["RF-9", "RF-19", "RF-29"])
        ok &= dt_best is not None and t_leaves is not None
        ok &= dt_best < t_leaves
        ok &= rf_best is None or t_leaves < rf_best
        details.append(f"{subject}: DT {dt_best} < T {t_leaves} < RF {rf_best or 'fail'}")
    ok &= summary[("n=8", "RF-9")] is None  # the sweep cannot rescue RF-9 at n=8
    # deeper cascades need fewer leaves on the hardest input
    dt_n8 = [summary[("n=8", m)] for m in ("DT-2", "DT-3", "DT-4")]
    ok &= None not in dt_n8 and dt_n8[0] > dt_n8[1] > dt_n8[2]
    details.append(f"n=8 cascade depths: {dt_n8[0]} > {dt_n8[1]} > {dt_n8[2]}")
    elapsed = time.perf_counter() - start
    _report(8, ok, "; ".join(details), elapsed, 900)


def _cached_benchmarks():
    data = {}
    try:
        for name, manifest in BUILTIN_MANIFESTS.items():
            data[name] = fetch_dataset(manifest, offline=True)
    except UnreachableSource:
        return None
    return data


def test_criterion_09_benchmark_trends():
    """DF-2 beats RF at matched budgets on most cells; bigger trees help."""
    start = time.perf_counter()
    if _cached_benchmarks() is None:
        print("ACCEPTANCE 9: SKIP (benchmark datasets not cached; offline run)")
        pytest.skip("benchmark datasets not cached")
    cfg = ExperimentConfig(experiment="uci", seed=0, offline=True)
    rows = run_uci(cfg)
    summary = summarize_uci(rows)
    df_majorities = sum(1 for v in summary.values() if v["df_majority"])
    size_majorities = sum(1 for v in summary.values() if v["size_majority"])
    ok = df_majorities >= 2 and size_majorities >= 2
    elapsed = time.perf_counter() - start
    _report(9, ok, f"DF majority on {df_majorities}/3; size-32 majority on {size_majorities}/3", elapsed, 1800)


def test_criterion_10_determinism(tmp_path):
    """Reruns with the same config and seed rewrite the same bytes (minus wall time)."""
    start = time.perf_counter()
    sim_cfg = dict(
        experiment="sim", seed=3, sim_ns=(2,), sim_models=("T", "DT-2", "RF-3"),
        sim_depths=(1, 2, 3), sim_sample_count=4000,
    )
    ok = True
    tables = []
    for run in ("a", "b"):
        rows = run_simulation(ExperimentConfig(**sim_cfg))
        path = write_table(rows, SIM_COLUMNS, tmp_path / f"sim_{run}.csv")
        tables.append(strip_wall_time(path.read_text(encoding="utf-8")))
    ok &= tables[0] == tables[1]
    gini_cfg = ExperimentConfig(experiment="gini", gini_ns=(2,), gini_a_values=(3, 2))
    first_rows, _ = run_gini_verification(gini_cfg)
    second_rows, _ = run_gini_verification(gini_cfg)
    a = write_table(first_rows, GINI_COLUMNS, tmp_path / "gini_a.csv").read_bytes()
    b = write_table(second_rows, GINI_COLUMNS, tmp_path / "gini_b.csv").read_bytes()
    ok &= a == b
    bounds_cfg = ExperimentConfig(experiment="bounds", bounds_compile_corpus=5, bounds_error_corpus=25)
    ok &= run_bounds_suite(bounds_cfg) == run_bounds_suite(bounds_cfg)
    spec = SimulationSpec(n=2, sample_count=2000, seed=8)
    first = generate_simulation(spec)
    second = generate_simulation(spec)
    ok &= np.array_equal(first.X, second.X) and np.array_equal(first.y, second.y)
    elapsed = time.perf_counter() - start
    _report(10, ok, "sim/gini/bounds tables byte-identical modulo wall time", elapsed, 120)
