"""Bridges from request models to the experiment drivers.

Each handler returns (driver result, response model); the HTTP layer sends
the response, the CLI additionally uses the result for CSV emission.
"""

from __future__ import annotations

import numpy as np

from ..chsh import QUANTUM_BOUND, bell_value, horodecki_max, optimize_bell
from ..errors import BellkitError
from ..experiments import (
    EnsembleStats,
    NeighborhoodResult,
    NeighborhoodSpec,
    ScatterResult,
    TargetState,
    TypicalityResult,
    run_fid_pdf,
    run_scatter,
    run_typicality,
    sample_neighborhood,
)
from ..fidelity import check_fvg
from ..linalg import I2, partial_trace
from ..sampling import EnsembleKind, RngStream, states_block
from .models import (
    FidPdfRequest,
    HistogramModel,
    NeighborhoodRequest,
    ScatterRequest,
    StatsResponse,
    TypicalityRequest,
    VerifyCheck,
    VerifyRequest,
    VerifyResponse,
    nan_to_none,
)


def _resolve_target(model) -> TargetState:
    return model.to_target() if model is not None else TargetState.default()


def _stats_response(command: str, seed: int, stats: EnsembleStats, extras: dict) -> StatsResponse:
    return StatsResponse(
        command=command,
        seed=seed,
        n=stats.n,
        mean=nan_to_none(stats.mean),
        variance=nan_to_none(stats.variance),
        skewness=nan_to_none(stats.skewness),
        kurtosis=nan_to_none(stats.kurtosis),
        p_violation=nan_to_none(stats.p_violation),
        histogram=HistogramModel(
            edges=[float(e) for e in stats.histogram.bin_edges],
            counts=[int(c) for c in stats.histogram.counts],
        ),
        extras=extras,
    )


def handle_typicality(req: TypicalityRequest) -> tuple[TypicalityResult, StatsResponse]:
    result = run_typicality(req.count, starts=req.starts, seed=req.seed,
                            bins=req.bins, workers=req.workers)
    extras = {
        "starts": req.starts,
        "oracle_mean": float(result.oracle_values.mean()),
        "max_oracle_gap": float(np.abs(result.values - result.oracle_values).max()),
    }
    return result, _stats_response("typicality", req.seed, result.stats, extras)


def handle_neighborhood(req: NeighborhoodRequest) -> tuple[NeighborhoodResult, StatsResponse]:
    target = _resolve_target(req.target)
    # A budget below the requested hit count can never satisfy it, so clamp
    # min_hits to the budget (the scan is unchanged) and report exhaustion
    # against what the caller actually asked for.
    spec = NeighborhoodSpec(alpha=req.alpha, min_hits=min(req.count, req.budget),
                            budget=req.budget)
    result = sample_neighborhood(target, spec, seed=req.seed, bins=req.bins,
                                 workers=req.workers)
    exhausted = result.budget_exhausted or result.hit_count < req.count
    extras = {
        "alpha": req.alpha,
        "min_hits": req.count,
        "budget": req.budget,
        "hit_count": result.hit_count,
        "generated_count": result.generated_count,
        "budget_exhausted": exhausted,
        "hit_rate": (result.hit_count / result.generated_count
                     if result.generated_count else None),
    }
    return result, _stats_response("neighborhood", req.seed, result.stats, extras)


def handle_scatter(req: ScatterRequest) -> tuple[ScatterResult, StatsResponse]:
    target = _resolve_target(req.target)
    result = run_scatter(target, req.count, seed=req.seed, bins=req.bins,
                         workers=req.workers)
    extras = {
        "quadrants": result.quadrants,
        "fidelity_mean": float(result.fidelities.mean()),
    }
    return result, _stats_response("scatter", req.seed, result.stats, extras)


def handle_fid_pdf(req: FidPdfRequest) -> tuple[EnsembleStats, StatsResponse]:
    target = _resolve_target(req.target)
    stats = run_fid_pdf(target, EnsembleKind(req.ensemble), req.count,
                        seed=req.seed, bins=req.bins, workers=req.workers)
    extras = {"ensemble": req.ensemble}
    return stats, _stats_response("fid-pdf", req.seed, stats, extras)


def handle_verify(req: VerifyRequest) -> VerifyResponse:
    checks = []

    def add(name: str, passed: bool, detail: str):
        checks.append(VerifyCheck(name=name, passed=bool(passed), detail=detail))

    try:
        target = _resolve_target(req.target)
    except (BellkitError, ValueError) as exc:
        add("target_build", False, str(exc))
        return VerifyResponse(passed=False, checks=checks)

    value = bell_value(target.rho_t, target.optimal_settings)
    add(
        "target_bell",
        abs(value - target.reference_value) <= req.target_tol,
        f"target_bell={value:.6f} ref={target.reference_value} tol={req.target_tol:g}",
    )
    gap = 1.0 - value / QUANTUM_BOUND
    add("target_gap", 0.0 <= gap < 1.0, f"1-B/(2*sqrt2)={gap:.5f}")

    dev = max(
        float(np.max(np.abs(partial_trace(target.rho_t.mat, side) - I2 / 2)))
        for side in ("A", "B")
    )
    add("target_marginals", dev <= 1e-3, f"max_marginal_dev={dev:.2e} tol=1e-03")

    oracle = horodecki_max(target.rho_t)
    add("target_oracle", oracle >= value - 1e-6,
        f"oracle={oracle:.6f} value={value:.6f}")

    worst = 0.0
    for i in range(req.count):
        rho = states_block(EnsembleKind.FILTERED, req.seed, i, 1)[0]
        res = optimize_bell(rho, starts=50, rng=RngStream(req.seed, (1 << 32) + i))
        worst = max(worst, abs(res.value - res.oracle_value))
    add("oracle_sweep", worst <= req.oracle_tol,
        f"n={req.count} max_gap={worst:.2e} tol={req.oracle_tol:g}")

    violations = 0
    total = 0
    for kind in EnsembleKind:
        a = states_block(kind, req.seed, 0, req.pairs)
        b = states_block(kind, req.seed, req.pairs, req.pairs)
        for i in range(req.pairs):
            total += 1
            try:
                check_fvg(a[i], b[i])
            except BellkitError:
                violations += 1
    add("fvg_sweep", violations == 0, f"pairs={total} violations={violations}")

    return VerifyResponse(passed=all(c.passed for c in checks), checks=checks)
