"""Command-line interface.

Subcommands: ``mcm`` (comparison grid), ``cd`` (rank diagram), ``stats``
(full JSON dump), ``stability`` (manipulation experiments), ``selftest``
(embedded oracle suites).  Exit codes: 0 success, 1 usage error, 2
data/validation error, 3 internal invariant violation.

Every output embeds a metadata block with the tool version, a SHA-256 of
the input bytes, and the full effective configuration (including the
seed), and identical invocations on identical input produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .bayes import BayesConfig, bayesian_signed_rank
from .data import Direction, load_results
from .errors import InternalError, McmatrixError, TooFewComparates, TooFewTasks
from .mcm import MCMConfig, build_mcm, mcm_report_to_dict
from .render import RenderStyle, render_cd_diagram, render_mcm, render_pattern_graph
from .selftest import run_selftest
from .stability import (
    Exhaustive,
    Sampled,
    detect_rank_swap,
    enumerate_patterns,
    pattern_from_bitmask,
    weakened_variant_attack,
)
from .stats import (
    DEFAULT_EXACT_THRESHOLD,
    compute_ranks,
    friedman_test,
    oriented_differences,
    pairwise_comparison,
)

WORKERS_ENV = "MCMATRIX_WORKERS"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for data
    # errors, so usage problems are rethrown and mapped to exit code 1.
    def error(self, message):
        raise _UsageError(message)


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise _UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def _names(text: str) -> list[str]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise _UsageError(f"empty name list {text!r}")
    return names


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    p = Path(path)
    if not p.exists():
        raise _UsageError(f"input file {path!r} does not exist")
    return p.read_bytes()


def _write_output(path: str | None, payload: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(payload)


def _guess_format(path: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    if path.endswith(".json"):
        return "json"
    return "csv"


def _metadata(args: argparse.Namespace, payload: bytes, **extra) -> dict:
    config = {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in ("func", "input", "output") and value is not None
    }
    config["exact_threshold"] = DEFAULT_EXACT_THRESHOLD
    config.update(extra)
    return {
        "tool": "mcmatrix",
        "version": __version__,
        "input_sha256": hashlib.sha256(payload).hexdigest(),
        "config": config,
    }


def _json_bytes(obj: dict) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=False) + "\n").encode("utf-8")


def _bayes_config(args: argparse.Namespace) -> BayesConfig:
    return BayesConfig(
        rope=args.rope,
        mc_samples=args.mc_samples,
        seed=args.seed,
    )


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True,
                        help="results table path, or '-' for stdin")
    parser.add_argument("--input-format", choices=("csv", "json"), default=None,
                        help="input format (default: by file extension, csv otherwise)")
    parser.add_argument("--direction", required=True, choices=("higher", "lower"),
                        help="whether higher or lower scores are better (required)")


def _add_bayes_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--include-bayes", action="store_true",
                        help="attach Bayesian signed-rank posteriors")
    parser.add_argument("--rope", type=float, default=0.01,
                        help="region of practical equivalence half-width")
    parser.add_argument("--mc-samples", type=int, default=100_000,
                        help="Monte Carlo samples for the Bayesian test")
    parser.add_argument("--seed", type=int, default=0,
                        help="RNG seed (echoed into output metadata)")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="mcmatrix",
        description=(
            "Pairwise benchmark comparison matrices, critical-difference "
            "diagrams, and significance-stability experiments."
        ),
        epilog=(
            "Defaults: alpha 0.05, rope 0.01, mc-samples 100000, seed 0, "
            f"tie-epsilon 0, exact-threshold {DEFAULT_EXACT_THRESHOLD}; "
            f"worker count from ${WORKERS_ENV} (default 1)."
        ),
    )
    parser.add_argument("--version", action="version", version=f"mcmatrix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p_mcm = sub.add_parser("mcm", formatter_class=fmt,
                           help="build and render the comparison grid")
    _add_input_flags(p_mcm)
    p_mcm.add_argument("--alpha", type=float, default=0.05,
                       help="per-cell significance level (uncorrected by design)")
    p_mcm.add_argument("--rows", type=_names, default=None,
                       help="comma-separated row comparates (default: all)")
    p_mcm.add_argument("--cols", type=_names, default=None,
                       help="comma-separated column comparates (default: all)")
    p_mcm.add_argument("--tie-epsilon", type=float, default=0.0,
                       help="absolute difference treated as a tie")
    p_mcm.add_argument("--format", choices=("svg", "html", "json"), default="html",
                       help="output format")
    p_mcm.add_argument("--output", default=None, help="output path (default: stdout)")
    _add_bayes_flags(p_mcm)
    p_mcm.set_defaults(func=_cmd_mcm)

    p_cd = sub.add_parser("cd", formatter_class=fmt,
                          help="render the critical-difference diagram (SVG)")
    _add_input_flags(p_cd)
    p_cd.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p_cd.add_argument("--pairwise", choices=("nemenyi", "wilcoxon-holm"),
                      default="nemenyi", help="pairwise test joining the groups")
    p_cd.add_argument("--output", default=None, help="output path (default: stdout)")
    p_cd.set_defaults(func=_cmd_cd)

    p_stats = sub.add_parser("stats", formatter_class=fmt,
                             help="dump ranks, groupwise test, and all pairwise cells as JSON")
    _add_input_flags(p_stats)
    p_stats.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p_stats.add_argument("--tie-epsilon", type=float, default=0.0,
                         help="absolute difference treated as a tie")
    p_stats.add_argument("--output", default=None, help="output path (default: stdout)")
    _add_bayes_flags(p_stats)
    p_stats.set_defaults(func=_cmd_stats)

    p_stab = sub.add_parser("stability", help="comparate-set manipulation experiments")
    stab_sub = p_stab.add_subparsers(dest="experiment", required=True)

    p_enum = stab_sub.add_parser("enumerate", formatter_class=fmt,
                                 help="enumerate corrected significance patterns")
    _add_input_flags(p_enum)
    p_enum.add_argument("--core", type=_names, required=True,
                        help="comma-separated core comparates")
    p_enum.add_argument("--pool", type=_names, default=None,
                        help="extras pool (default: all non-core comparates)")
    p_enum.add_argument("--k-extra", type=int, required=True,
                        help="extras added per study")
    p_enum.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p_enum.add_argument("--sample", type=int, default=None,
                        help="sample this many subsets instead of exhausting")
    p_enum.add_argument("--seed", type=int, default=0,
                        help="seed for sampling and example selection")
    p_enum.add_argument("--render-patterns", default=None, metavar="DIR",
                        help="also write one pattern graph SVG per pattern")
    p_enum.add_argument("--output", default=None, help="output path (default: stdout)")
    p_enum.set_defaults(func=_cmd_enumerate)

    p_swap = stab_sub.add_parser("rank-swap", formatter_class=fmt,
                                 help="compare a pair's rank order between two sets")
    _add_input_flags(p_swap)
    p_swap.add_argument("--pair", type=_names, required=True,
                        help="the two comparates under study, comma-separated")
    p_swap.add_argument("--set-a", type=_names, required=True,
                        help="first comparate set")
    p_swap.add_argument("--set-b", type=_names, required=True,
                        help="second comparate set")
    p_swap.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p_swap.add_argument("--output", default=None, help="output path (default: stdout)")
    p_swap.set_defaults(func=_cmd_rank_swap)

    p_weak = stab_sub.add_parser("weaken", formatter_class=fmt,
                                 help="weakened-variant attack on average ranks")
    _add_input_flags(p_weak)
    p_weak.add_argument("--target", required=True, help="comparate to boost")
    p_weak.add_argument("--reference", required=True,
                        help="weaker comparate blended into the variant")
    p_weak.add_argument("--weights", required=True,
                        help="comma-separated blend weights in [0, 1]")
    p_weak.add_argument("--context", type=_names, required=True,
                        help="study comparates (must include the target)")
    p_weak.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p_weak.add_argument("--output", default=None, help="output path (default: stdout)")
    p_weak.set_defaults(func=_cmd_weaken)

    p_self = sub.add_parser("selftest", formatter_class=fmt,
                            help="run the embedded oracle suites")
    p_self.set_defaults(func=_cmd_selftest)

    return parser


def _load(args: argparse.Namespace) -> tuple:
    payload = _read_input(args.input)
    fmt = _guess_format(args.input, args.input_format)
    matrix = load_results(payload, fmt, Direction(args.direction))
    return matrix, payload


def _cmd_mcm(args: argparse.Namespace) -> int:
    matrix, payload = _load(args)
    workers = _default_workers()
    config = MCMConfig(
        alpha=args.alpha,
        row_comparates=tuple(args.rows) if args.rows else None,
        column_comparates=tuple(args.cols) if args.cols else None,
        include_bayes=args.include_bayes,
        tie_epsilon=args.tie_epsilon,
    )
    report = build_mcm(matrix, config, bayes_config=_bayes_config(args),
                       workers=workers)
    meta = _metadata(args, payload, workers=workers)
    if args.format == "json":
        out = dict(metadata=meta, **mcm_report_to_dict(report))
        _write_output(args.output, _json_bytes(out))
    else:
        _write_output(args.output, render_mcm(report, RenderStyle(),
                                              format=args.format, metadata=meta))
    return 0


def _cmd_cd(args: argparse.Namespace) -> int:
    matrix, payload = _load(args)
    meta = _metadata(args, payload)
    _write_output(
        args.output,
        render_cd_diagram(matrix, args.alpha, args.pairwise, metadata=meta),
    )
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    matrix, payload = _load(args)
    table = compute_ranks(matrix)
    try:
        stat, p = friedman_test(matrix)
        friedman = {"statistic": stat, "p_value": p}
    except (TooFewComparates, TooFewTasks) as exc:
        friedman = {"skipped": str(exc)}

    bayes_cfg = _bayes_config(args) if args.include_bayes else None
    cells = []
    for i, a in enumerate(matrix.comparates):
        for b in matrix.comparates[i + 1:]:
            cell = pairwise_comparison(matrix, a, b, args.tie_epsilon)
            entry = cell.to_dict()
            entry["significant"] = cell.p_value < args.alpha
            if bayes_cfg is not None:
                entry["bayes"] = bayesian_signed_rank(
                    oriented_differences(matrix, a, b), bayes_cfg
                ).to_dict()
            cells.append(entry)

    out = {
        "metadata": _metadata(args, payload),
        "direction": matrix.direction.value,
        "comparates": list(matrix.comparates),
        "tasks": list(matrix.tasks),
        "ranks": [[float(x) for x in row] for row in table.ranks],
        "average_ranks": {
            c: float(table.average_ranks[i]) for i, c in enumerate(matrix.comparates)
        },
        "friedman": friedman,
        "pairwise": cells,
    }
    _write_output(args.output, _json_bytes(out))
    return 0


def _cmd_enumerate(args: argparse.Namespace) -> int:
    matrix, payload = _load(args)
    core = tuple(args.core)
    pool = tuple(args.pool) if args.pool else tuple(
        c for c in matrix.comparates if c not in set(core)
    )
    mode = Sampled(args.sample, args.seed) if args.sample else Exhaustive()
    workers = _default_workers()
    enumeration = enumerate_patterns(
        matrix, core, pool, args.k_extra, args.alpha,
        mode=mode, example_seed=args.seed, workers=workers,
    )
    meta = _metadata(args, payload, pool=list(pool), workers=workers)
    out = dict(metadata=meta, **enumeration.to_dict())
    _write_output(args.output, _json_bytes(out))

    if args.render_patterns:
        directory = Path(args.render_patterns)
        directory.mkdir(parents=True, exist_ok=True)
        for mask in sorted(enumeration.pattern_counts):
            pattern = pattern_from_bitmask(core, mask)
            svg = render_pattern_graph(pattern, metadata=meta)
            (directory / f"pattern-{mask:#06x}.svg").write_bytes(svg)
    return 0


def _cmd_rank_swap(args: argparse.Namespace) -> int:
    matrix, payload = _load(args)
    if len(args.pair) != 2:
        raise _UsageError("--pair needs exactly two names")
    report = detect_rank_swap(
        matrix, (args.pair[0], args.pair[1]), args.set_a, args.set_b, args.alpha
    )
    out = {"metadata": _metadata(args, payload), **report.to_dict()}
    _write_output(args.output, _json_bytes(out))
    return 0


def _cmd_weaken(args: argparse.Namespace) -> int:
    matrix, payload = _load(args)
    try:
        weights = [float(w) for w in args.weights.split(",") if w.strip()]
    except ValueError:
        raise _UsageError(f"bad --weights value {args.weights!r}") from None
    if not weights:
        raise _UsageError("--weights must list at least one weight")
    report = weakened_variant_attack(
        matrix, args.target, args.reference, weights, args.context, args.alpha
    )
    out = {"metadata": _metadata(args, payload), **report.to_dict()}
    _write_output(args.output, _json_bytes(out))
    return 0


def _cmd_selftest(args: argparse.Namespace) -> int:
    return 0 if run_selftest() else 3


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except InternalError as exc:
        print(f"internal error (bug): {exc}", file=sys.stderr)
        return 3
    except McmatrixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:  # invariant violations are always bugs
        print(f"internal error (bug): {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
