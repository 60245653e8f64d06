#!/usr/bin/env python3
"""Search small integer score grids for manipulation witnesses.

Writes the test fixtures under tests/fixtures/:

* holm_flip.json       -- a pair whose corrected significance differs
                          between two comparate supersets although its raw
                          p-value is identical in both.
* rank_swap.json       -- a 4x3 grid where swapping one context comparate
                          for another strictly reverses a pair's
                          average-rank order.
* rank_swap_addone.json-- a grid where merely adding a comparate strictly
                          reverses the pair's average-rank order.
* weakened_variant.json-- a grid where adding a strictly weaker blend of
                          the target lifts it above a rival on average rank.

All searches are seeded, so rerunning this script reproduces the committed
fixtures byte for byte.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mcmatrix import (  # noqa: E402
    Direction,
    ResultsMatrix,
    detect_rank_swap,
    significance_pattern,
    weaken_comparate,
    wilcoxon_signed_rank,
)
from mcmatrix.stats import compute_ranks, oriented_differences  # noqa: E402

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
ALPHA = 0.05


def matrix_payload(matrix: ResultsMatrix) -> dict:
    return {
        "comparates": list(matrix.comparates),
        "tasks": list(matrix.tasks),
        "scores": [[float(x) for x in row] for row in matrix.scores],
        "direction": matrix.direction.value,
    }


def make_matrix(scores: np.ndarray) -> ResultsMatrix:
    m, n = scores.shape
    return ResultsMatrix(
        tuple(f"c{i}" for i in range(m)),
        tuple(f"t{j}" for j in range(n)),
        scores.astype(float),
        Direction.HIGHER_IS_BETTER,
    )


def find_holm_flip(seed: int = 1) -> dict:
    """Pair (c0, c1): significant alone, non-significant among c0..c3.

    Structure: c0/c1 score high with a raw p just under alpha; c2/c3 score
    far below them (four clean-sweep cross pairs with tiny p-values) and
    nearly tie each other (one large p).  In the six-pair family the
    (c0, c1) p-value then sits at the second-to-last step-down position,
    where the threshold alpha/2 is below it.
    """
    rng = np.random.default_rng(seed)
    n = 10
    for _ in range(100_000):
        c0 = np.round(rng.uniform(0.80, 0.95, size=n), 3)
        margins = np.round(rng.uniform(0.005, 0.05, size=n), 3)
        signs = np.ones(n)
        losers = rng.choice(n, size=3, replace=False)
        signs[losers] = -1.0
        c1 = np.round(c0 - signs * margins, 3)
        c2 = np.round(rng.uniform(0.30, 0.45, size=n), 3)
        c3 = np.round(c2 + rng.choice([-0.01, 0.0, 0.01], size=n), 3)
        if (c1 <= c2).any() or (c1 <= c3).any() or (c0 <= c2).any() or (c0 <= c3).any():
            continue
        matrix = make_matrix(np.vstack([c0, c1, c2, c3]))

        p01, _ = wilcoxon_signed_rank(oriented_differences(matrix, "c0", "c1"))
        if not (ALPHA / 2 < p01 <= ALPHA):
            continue
        small = significance_pattern(matrix, ["c0", "c1"], [], ALPHA)
        large = significance_pattern(matrix, ["c0", "c1"], ["c2", "c3"], ALPHA)
        if small.non_significant_pairs == frozenset() and large.non_significant_pairs == {
            (0, 1)
        }:
            return {
                "description": (
                    "corrected significance of (c0, c1) flips between the "
                    "pair alone and the four-comparate family while its raw "
                    "p-value is unchanged"
                ),
                "matrix": matrix_payload(matrix),
                "pair": ["c0", "c1"],
                "alpha": ALPHA,
                "small_family_extras": [],
                "large_family_extras": ["c2", "c3"],
                "raw_p": p01,
            }
    raise SystemExit("no holm-flip witness found")


def _strict_swap(matrix, pair, set_a, set_b) -> bool:
    report = detect_rank_swap(matrix, pair, set_a, set_b, ALPHA)
    return (
        report.swapped
        and report.better_a is not None
        and report.better_b is not None
    )


def find_rank_swap(seed: int = 2) -> dict:
    """4x3 grid: replacing context comparate c2 by c3 strictly reverses the
    average-rank order of (c0, c1)."""
    rng = np.random.default_rng(seed)
    for _ in range(1_000_000):
        scores = rng.integers(0, 10, size=(4, 3)).astype(float)
        matrix = make_matrix(scores)
        pair = ("c0", "c1")
        if _strict_swap(matrix, pair, ["c0", "c1", "c2"], ["c0", "c1", "c3"]):
            return {
                "description": (
                    "replacing one context comparate strictly reverses the "
                    "pair's average-rank order"
                ),
                "matrix": matrix_payload(matrix),
                "pair": list(pair),
                "set_a": ["c0", "c1", "c2"],
                "set_b": ["c0", "c1", "c3"],
                "alpha": ALPHA,
            }
    raise SystemExit("no rank-swap witness found")


def find_rank_swap_addone(seed: int = 3) -> dict:
    """Adding a single comparate strictly reverses the pair's order.

    Impossible on 3 tasks (one insertion moves the rank-difference total by
    at most the number of tasks the trailing comparate wins), so search
    n = 5 grids.
    """
    rng = np.random.default_rng(seed)
    for _ in range(1_000_000):
        scores = rng.integers(0, 10, size=(3, 5)).astype(float)
        matrix = make_matrix(scores)
        pair = ("c0", "c1")
        if _strict_swap(matrix, pair, ["c0", "c1"], ["c0", "c1", "c2"]):
            return {
                "description": (
                    "adding one comparate strictly reverses the pair's "
                    "average-rank order"
                ),
                "matrix": matrix_payload(matrix),
                "pair": list(pair),
                "set_a": ["c0", "c1"],
                "set_b": ["c0", "c1", "c2"],
                "alpha": ALPHA,
            }
    raise SystemExit("no add-one rank-swap witness found")


def find_weakened_variant(seed: int = 4) -> dict:
    """Adding a strictly weaker blend of c0 lifts c0 above rival c1.

    Comparates: c0 = target, c1 = rival, c2 = weak reference.  A weight-0.5
    blend of target and reference must be strictly below the target on
    every task yet strictly reverse the (c0, c1) average-rank order.
    """
    rng = np.random.default_rng(seed)
    weight = 0.5
    for _ in range(1_000_000):
        scores = rng.integers(0, 11, size=(3, 5)).astype(float)
        if not (scores[2] < scores[0]).all():
            continue  # reference must be strictly weaker than the target
        matrix = make_matrix(scores)
        augmented = weaken_comparate(matrix, "c0", "c2", weight, "c0~w")
        if not (augmented.row("c0~w") < augmented.row("c0")).all():
            continue
        before = compute_ranks(matrix.select_comparates(["c0", "c1"]))
        after = compute_ranks(augmented.select_comparates(["c0", "c1", "c0~w"]))
        if before.average_ranks[0] > before.average_ranks[1] and (
            after.average_ranks[0] < after.average_ranks[1]
        ):
            return {
                "description": (
                    "a strictly weaker weight-0.5 blend of the target lifts "
                    "the target above its rival on average rank"
                ),
                "matrix": matrix_payload(matrix),
                "target": "c0",
                "rival": "c1",
                "reference": "c2",
                "weight": weight,
                "context": ["c0", "c1"],
                "alpha": ALPHA,
            }
    raise SystemExit("no weakened-variant witness found")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for name, finder in [
        ("holm_flip", find_holm_flip),
        ("rank_swap", find_rank_swap),
        ("rank_swap_addone", find_rank_swap_addone),
        ("weakened_variant", find_weakened_variant),
    ]:
        fixture = finder()
        path = FIXTURES / f"{name}.json"
        path.write_text(json.dumps(fixture, indent=2) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
