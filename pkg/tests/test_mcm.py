import numpy as np
import pytest

from mcmatrix import (
    BayesConfig,
    Direction,
    MCMConfig,
    ResultsMatrix,
    build_mcm,
    mcm_cell_invariance_check,
    mcm_report_to_dict,
)
from mcmatrix.errors import InvalidAlpha, PairNotInSubset, UnknownComparate
from mcmatrix.stability import significance_pattern

from conftest import fixture_matrix, load_fixture, random_matrix


def _matrix(scores, names=None, direction=Direction.HIGHER_IS_BETTER):
    scores = np.array(scores, dtype=float)
    names = names or tuple(f"c{i}" for i in range(scores.shape[0]))
    return ResultsMatrix(
        names, tuple(f"t{j}" for j in range(scores.shape[1])), scores, direction
    )


class TestBuildMcm:
    def test_all_pairs_count(self):
        rng = np.random.default_rng(0)
        matrix = random_matrix(rng, m=5, n=8)
        report = build_mcm(matrix)
        assert report.comparison_count == 10  # m (m - 1) / 2
        assert len(report.cells) == 20  # full off-diagonal grid

    def test_disjoint_focused_count(self):
        rng = np.random.default_rng(1)
        matrix = random_matrix(rng, m=5, n=6)
        names = matrix.comparates
        report = build_mcm(
            matrix,
            MCMConfig(row_comparates=names[:2], column_comparates=names[2:]),
        )
        assert report.comparison_count == 6
        assert len(report.cells) == 6

    def test_overlapping_focused_count(self):
        rng = np.random.default_rng(2)
        matrix = random_matrix(rng, m=4, n=6)
        names = matrix.comparates
        report = build_mcm(
            matrix,
            MCMConfig(row_comparates=names[:2], column_comparates=names[:3]),
        )
        assert report.comparison_count == 2 * 3 - 2  # |rows||cols| - |overlap|

    def test_ordering_by_mean_performance(self):
        matrix = _matrix(
            [[0.2, 0.2], [0.9, 0.9], [0.5, 0.7]], names=("low", "high", "mid")
        )
        report = build_mcm(matrix)
        assert report.row_order == ("high", "mid", "low")
        assert report.column_order == report.row_order

    def test_ordering_lower_is_better(self):
        matrix = _matrix(
            [[0.2, 0.2], [0.9, 0.9]], names=("small", "big"),
            direction=Direction.LOWER_IS_BETTER,
        )
        report = build_mcm(matrix)
        assert report.row_order == ("small", "big")

    def test_ties_break_lexicographically(self):
        matrix = _matrix([[0.5, 0.5], [0.5, 0.5]], names=("zeta", "alpha"))
        report = build_mcm(matrix)
        assert report.row_order == ("alpha", "zeta")

    def test_significance_is_uncorrected_per_cell(self):
        rng = np.random.default_rng(3)
        matrix = random_matrix(rng, m=5, n=10)
        report = build_mcm(matrix, MCMConfig(alpha=0.3))
        for pair, cell in report.cells.items():
            assert report.significance[pair] == (cell.p_value < 0.3)

    def test_grid_antisymmetry(self):
        rng = np.random.default_rng(4)
        matrix = random_matrix(rng, m=4, n=9)
        report = build_mcm(matrix)
        for a, b in report.cells:
            fwd, rev = report.cells[(a, b)], report.cells[(b, a)]
            assert rev.mean_difference == -fwd.mean_difference
            assert (rev.wins, rev.losses, rev.ties) == (fwd.losses, fwd.wins, fwd.ties)
            assert rev.p_value == fwd.p_value

    def test_pairwise_order_stable_under_set_changes(self):
        rng = np.random.default_rng(5)
        matrix = random_matrix(rng, m=6, n=7)
        full = build_mcm(matrix)
        a, b = full.row_order[1], full.row_order[3]
        small = build_mcm(matrix.select_comparates((b, a)))
        assert small.row_order == (a, b)

    def test_workers_do_not_change_the_report(self):
        rng = np.random.default_rng(6)
        matrix = random_matrix(rng, m=5, n=8)
        serial = build_mcm(matrix, workers=1)
        threaded = build_mcm(matrix, workers=4)
        assert serial.cells == threaded.cells
        assert serial.row_order == threaded.row_order

    def test_include_bayes_attaches_posteriors(self):
        rng = np.random.default_rng(7)
        matrix = random_matrix(rng, m=3, n=5)
        report = build_mcm(
            matrix,
            MCMConfig(include_bayes=True),
            bayes_config=BayesConfig(mc_samples=500, seed=1),
        )
        assert report.bayes is not None and len(report.bayes) == len(report.cells)
        post = next(iter(report.bayes.values()))
        assert post.theta_left + post.theta_rope + post.theta_right == pytest.approx(1.0)

    def test_guards(self):
        rng = np.random.default_rng(8)
        matrix = random_matrix(rng, m=3, n=4)
        with pytest.raises(InvalidAlpha):
            build_mcm(matrix, MCMConfig(alpha=0.0))
        with pytest.raises(UnknownComparate):
            build_mcm(matrix, MCMConfig(row_comparates=("nope",)))


class TestCellInvariance:
    def test_single_subset_trivially_true(self):
        rng = np.random.default_rng(9)
        matrix = random_matrix(rng, m=5, n=6)
        pair = (matrix.comparates[0], matrix.comparates[1])
        assert mcm_cell_invariance_check(matrix, pair, [matrix.comparates])

    def test_random_supersets(self):
        rng = np.random.default_rng(10)
        matrix = random_matrix(rng, m=8, n=10)
        pair = (matrix.comparates[2], matrix.comparates[5])
        others = [c for c in matrix.comparates if c not in pair]
        subsets = []
        for _ in range(20):
            extra = rng.choice(others, size=int(rng.integers(0, 4)), replace=False)
            subsets.append(tuple(pair) + tuple(extra))
        assert mcm_cell_invariance_check(matrix, pair, subsets)

    def test_pair_missing_from_subset(self):
        rng = np.random.default_rng(11)
        matrix = random_matrix(rng, m=4, n=5)
        pair = (matrix.comparates[0], matrix.comparates[1])
        with pytest.raises(PairNotInSubset):
            mcm_cell_invariance_check(matrix, pair, [matrix.comparates[1:]])

    def test_holm_flags_are_not_invariant(self):
        """The same supersets harness run against corrected flags must find
        a flip on the shipped witness, while the cells stay identical."""
        fixture = load_fixture("holm_flip")
        matrix = fixture_matrix(fixture)
        a, b = fixture["pair"]
        alpha = fixture["alpha"]

        small = significance_pattern(matrix, [a, b], fixture["small_family_extras"], alpha)
        large = significance_pattern(matrix, [a, b], fixture["large_family_extras"], alpha)
        assert small.non_significant_pairs != large.non_significant_pairs

        subset_small = (a, b, *fixture["small_family_extras"])
        subset_large = (a, b, *fixture["large_family_extras"])
        assert mcm_cell_invariance_check(matrix, (a, b), [subset_small, subset_large])


class TestReportJson:
    def test_schema_shape(self):
        rng = np.random.default_rng(12)
        matrix = random_matrix(rng, m=4, n=6)
        report = build_mcm(matrix)
        obj = mcm_report_to_dict(report)
        assert set(obj) >= {"ordering", "mean_performance", "alpha", "cells"}
        assert len(obj["cells"]) == len(report.cells)
        cell = obj["cells"][0]
        assert set(cell) >= {
            "row", "col", "mean_diff", "wins", "ties", "losses",
            "p", "p_method", "significant",
        }
        assert obj["ordering"] == list(report.row_order)

    def test_bayes_key_present_when_included(self):
        rng = np.random.default_rng(13)
        matrix = random_matrix(rng, m=3, n=4)
        report = build_mcm(
            matrix,
            MCMConfig(include_bayes=True),
            bayes_config=BayesConfig(mc_samples=200, seed=0),
        )
        obj = mcm_report_to_dict(report)
        assert all("bayes" in cell for cell in obj["cells"])
        sample = obj["cells"][0]["bayes"]
        assert set(sample) == {"theta_left", "theta_rope", "theta_right", "mc_samples"}
