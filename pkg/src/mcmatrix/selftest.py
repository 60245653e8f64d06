"""Embedded oracle suites for the `selftest` CLI subcommand.

Each suite checks an implementation against an independent route: the
signed-rank p against brute-force enumeration of all sign assignments, the
step-down correction against its worked examples, and per-task rank sums
against the closed form m(m+1)/2.  Everything is seeded and deterministic.
"""

from __future__ import annotations

from itertools import product
from typing import Callable

import numpy as np
from scipy.stats import rankdata

from .data import Direction, ResultsMatrix
from .stats import compute_ranks, holm_correction, wilcoxon_signed_rank

__all__ = ["run_selftest", "enumeration_pvalue"]


def enumeration_pvalue(diffs: np.ndarray) -> float:
    """Two-sided signed-rank p by enumerating all 2^k sign assignments.

    Independent route: ranks come from scipy and the distribution from
    explicit enumeration rather than subset-sum counting.
    """
    nz = diffs[diffs != 0.0]
    k = nz.size
    if k == 0:
        return 1.0
    ranks = rankdata(np.abs(nz))
    observed = float(ranks[nz > 0.0].sum())
    le = ge = 0
    for signs in product((0.0, 1.0), repeat=k):
        w = float(np.dot(signs, ranks))
        if w <= observed:
            le += 1
        if w >= observed:
            ge += 1
    return min(1.0, 2.0 * min(le, ge) / 2.0**k)


def _suite_wilcoxon(cases: int = 200) -> str:
    rng = np.random.default_rng(20240117)
    for _ in range(cases):
        k = int(rng.integers(1, 11))
        diffs = np.round(rng.normal(0.0, 1.0, size=k), 2)
        expected = enumeration_pvalue(diffs)
        got, _ = wilcoxon_signed_rank(diffs)
        if abs(got - expected) > 1e-12:
            raise AssertionError(
                f"signed-rank mismatch for {diffs.tolist()!r}: {got} vs {expected}"
            )
    return f"{cases} random vectors vs sign-enumeration oracle"


def _suite_holm() -> str:
    decisions = holm_correction(
        [("a", 0.01), ("b", 0.02), ("c", 0.04)], alpha=0.05
    )
    if not all(d.significant for d in decisions):
        raise AssertionError("ascending example should be fully significant")
    expected = [0.05 / 3, 0.05 / 2, 0.05]
    if any(abs(d.threshold - e) > 1e-15 for d, e in zip(decisions, expected)):
        raise AssertionError("unexpected step-down thresholds")

    decisions = holm_correction(
        [("a", 0.02), ("b", 0.03), ("c", 0.04)], alpha=0.05
    )
    if any(d.significant for d in decisions):
        raise AssertionError("first failure must stop all rejections")
    return "worked step-down examples"


def _suite_rank_sums(cases: int = 200) -> str:
    rng = np.random.default_rng(987654321)
    for _ in range(cases):
        m = int(rng.integers(2, 9))
        n = int(rng.integers(1, 21))
        scores = np.round(rng.uniform(0.0, 1.0, size=(m, n)), 2)
        matrix = ResultsMatrix(
            tuple(f"c{i}" for i in range(m)),
            tuple(f"t{j}" for j in range(n)),
            scores,
            Direction.HIGHER_IS_BETTER,
        )
        table = compute_ranks(matrix)
        target = m * (m + 1) / 2.0
        sums = table.ranks.sum(axis=0)
        if np.abs(sums - target).max() > 1e-9:
            raise AssertionError("per-task rank sums off target")
    return f"{cases} random matrices, per-task rank sums = m(m+1)/2"


def run_selftest(report: Callable[[str], None] = print) -> bool:
    """Run all suites; prints one PASS/FAIL line each, returns overall."""
    suites = [
        ("wilcoxon-enumeration", _suite_wilcoxon),
        ("holm-examples", _suite_holm),
        ("rank-sums", _suite_rank_sums),
    ]
    ok = True
    for name, suite in suites:
        try:
            detail = suite()
            report(f"PASS {name}: {detail}")
        except AssertionError as exc:
            ok = False
            report(f"FAIL {name}: {exc}")
    return ok
