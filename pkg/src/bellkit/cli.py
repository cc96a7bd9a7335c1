"""Command-line front end.

A thin client over the service handlers: each subcommand parses flags into
the corresponding request model, runs in-process, prints a one-line summary,
and optionally writes JSON/CSV files through the deterministic emitters.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import emit
from .errors import BellkitError
from .service.handlers import (
    handle_fid_pdf,
    handle_neighborhood,
    handle_scatter,
    handle_typicality,
    handle_verify,
)
from .service.models import (
    FidPdfRequest,
    NeighborhoodRequest,
    ScatterRequest,
    TargetModel,
    TypicalityRequest,
    VerifyRequest,
)

U64_MAX = (1 << 64) - 1


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError("must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _add_common(p: argparse.ArgumentParser, *, count_default: int,
                count_help: str, target: bool = True) -> None:
    p.add_argument("--seed", type=_u64, default=0, help="master seed (default 0)")
    p.add_argument("--count", type=_positive, default=count_default, help=count_help)
    p.add_argument("--bins", type=_positive, default=40,
                   help="histogram bin count (default 40)")
    p.add_argument("--workers", type=_positive, default=None,
                   help="worker processes; wall time only, never output bytes")
    p.add_argument("--out-json", metavar="PATH", help="write the stats JSON here")
    p.add_argument("--out-csv", metavar="PATH", help="write the CSV here")
    if target:
        p.add_argument("--target", metavar="PATH",
                       help="JSON file with a custom target (matrix + angles)")


def _load_target(path: str | None) -> TargetModel | None:
    if path is None:
        return None
    with open(path) as fh:
        data = json.load(fh)
    return TargetModel.model_validate(data)


def _write_stats_json(path: str | None, resp) -> None:
    if path:
        emit.write_json(path, resp.model_dump())


def _write_hist_csv(path: str | None, hist) -> None:
    if path:
        emit.write_histogram_csv(path, hist.bin_edges, hist.counts, hist.density())


def _cmd_typicality(args: argparse.Namespace) -> int:
    req = TypicalityRequest(seed=args.seed, count=args.count, starts=args.starts,
                            bins=args.bins, workers=args.workers)
    result, resp = handle_typicality(req)
    _write_stats_json(args.out_json, resp)
    _write_hist_csv(args.out_csv, result.stats.histogram)
    s = result.stats
    print(f"typicality n={s.n} mean={s.mean:.6f} variance={s.variance:.6f} "
          f"skewness={s.skewness:.6f} kurtosis={s.kurtosis:.6f} "
          f"p_violation={s.p_violation:.6f}")
    return 0


def _cmd_neighborhood(args: argparse.Namespace) -> int:
    req = NeighborhoodRequest(seed=args.seed, count=args.count, alpha=args.alpha,
                              budget=args.budget, bins=args.bins,
                              workers=args.workers, target=_load_target(args.target))
    result, resp = handle_neighborhood(req)
    _write_stats_json(args.out_json, resp)
    _write_hist_csv(args.out_csv, result.stats.histogram)
    s = result.stats
    exhausted = resp.extras["budget_exhausted"]
    print(f"neighborhood alpha={args.alpha:g} hits={result.hit_count} "
          f"generated={result.generated_count} "
          f"budget_exhausted={str(exhausted).lower()} "
          f"mean={s.mean:.6f} p_violation={s.p_violation:.6f}")
    return 0


def _cmd_scatter(args: argparse.Namespace) -> int:
    req = ScatterRequest(seed=args.seed, count=args.count, bins=args.bins,
                         workers=args.workers, target=_load_target(args.target))
    result, resp = handle_scatter(req)
    _write_stats_json(args.out_json, resp)
    if args.out_csv:
        emit.write_scatter_csv(args.out_csv, result.pairs())
    s = result.stats
    print(f"scatter n={s.n} fidelity_mean={resp.extras['fidelity_mean']:.6f} "
          f"bell_mean={s.mean:.6f} p_violation={s.p_violation:.6f}")
    return 0


def _cmd_fid_pdf(args: argparse.Namespace) -> int:
    req = FidPdfRequest(seed=args.seed, count=args.count, ensemble=args.ensemble,
                        bins=args.bins, workers=args.workers,
                        target=_load_target(args.target))
    result, resp = handle_fid_pdf(req)
    _write_stats_json(args.out_json, resp)
    _write_hist_csv(args.out_csv, result.histogram)
    print(f"fid-pdf ensemble={args.ensemble} n={result.n} "
          f"mean={result.mean:.6f} variance={result.variance:.6f}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    req = VerifyRequest(seed=args.seed, count=args.count, pairs=args.pairs,
                        oracle_tol=args.oracle_tol, target_tol=args.target_tol,
                        workers=args.workers, target=_load_target(args.target))
    resp = handle_verify(req)
    _write_stats_json(args.out_json, resp)
    for check in resp.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name:<16s} {check.detail}")
    if resp.passed:
        print("verify: all checks passed")
        return 0
    print("verify: FAILED", file=sys.stderr)
    return 1


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellkit",
        description="Random two-qubit states, Bell-functional maximization, "
                    "and fidelity-neighborhood statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser(
        "typicality",
        help="maximize the Bell functional over random filtered states",
    )
    _add_common(p, count_default=5000, count_help="number of states (default 5000)",
                target=False)
    p.add_argument("--starts", type=_positive, default=50,
                   help="optimizer restarts per state (default 50)")
    p.set_defaults(run=_cmd_typicality)

    p = sub.add_parser(
        "neighborhood",
        help="Bell statistics over states with fidelity to the target >= alpha",
    )
    _add_common(p, count_default=300,
                count_help="fidelity hits to collect (default 300)")
    p.add_argument("--alpha", type=float, required=True,
                   help="fidelity threshold, in (0, 1)")
    p.add_argument("--budget", type=_positive, default=2_000_000,
                   help="max states to generate while hunting hits (default 2000000)")
    p.set_defaults(run=_cmd_neighborhood)

    p = sub.add_parser(
        "scatter",
        help="per-state (fidelity, Bell value) pairs plus quadrant counts",
    )
    _add_common(p, count_default=10_000,
                count_help="number of states (default 10000)")
    p.set_defaults(run=_cmd_scatter)

    p = sub.add_parser(
        "fid-pdf",
        help="fidelity-to-target distribution for a chosen ensemble",
    )
    _add_common(p, count_default=100_000,
                count_help="number of states (default 100000)")
    p.add_argument("--ensemble", choices=["filtered", "hs", "bures"],
                   default="filtered", help="state ensemble (default filtered)")
    p.set_defaults(run=_cmd_fid_pdf)

    p = sub.add_parser(
        "verify",
        help="self-checks: target reproduction, oracle agreement, distance bounds",
    )
    _add_common(p, count_default=200,
                count_help="states in the oracle sweep (default 200)")
    p.add_argument("--pairs", type=_positive, default=200,
                   help="state pairs per ensemble in the distance sweep (default 200)")
    p.add_argument("--oracle-tol", type=float, default=1e-5,
                   help="max allowed |optimized - oracle| (default 1e-5)")
    p.add_argument("--target-tol", type=float, default=5e-3,
                   help="max allowed |target Bell - reference| (default 0.005)")
    p.set_defaults(run=_cmd_verify)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(run=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args)
    except BellkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # pydantic ValidationError and json decode errors both land here
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
