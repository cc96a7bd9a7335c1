"""Acceptance gate: seven pinned criteria, one pass/fail line each.

Each test prints a single summary line (visible with ``pytest -s``) and the
test name itself identifies the criterion under ``pytest -v``.  Tolerance
bands and runtime budgets are fixed; loosening them here defeats the gate.
"""

import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from bellkit.chsh import QUANTUM_BOUND, bell_value, horodecki_max, optimize_bell
from bellkit.errors import BellkitError
from bellkit.experiments import (
    Histogram,
    NeighborhoodSpec,
    TargetState,
    run_typicality,
    sample_neighborhood,
)
from bellkit.fidelity import check_fvg, fidelity, fidelity_block
from bellkit.linalg import I2, hermitize, partial_trace, realign
from bellkit.sampling import (
    EnsembleKind,
    RngStream,
    filtered_state,
    filtered_states_block,
    haar_unitary,
    states_block,
)

OPT_STREAM = 1 << 32  # optimizer streams live far from the sampler streams


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_1_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(200):
        rho = filtered_state(RngStream(1, i))
        res = optimize_bell(rho, starts=50, rng=RngStream(1, OPT_STREAM + i))
        worst = max(worst, abs(res.value - res.oracle_value))
    elapsed = time.perf_counter() - t0
    _report(1, worst <= 1e-5 and elapsed <= 60.0,
            f"max |optimized - oracle| = {worst:.2e} over 200 states in {elapsed:.1f}s")


def test_criterion_2_typicality_moments():
    res = run_typicality(5000, seed=42)
    s = res.stats
    checks = (abs(s.mean - 1.416) <= 0.05
              and abs(s.variance - 0.163) <= 0.02
              and abs(s.skewness - (-0.251)) <= 0.15
              and abs(s.kurtosis - 2.706) <= 0.3
              and abs(s.p_violation - 0.052) <= 0.015)
    _report(2, checks,
            f"n=5000 mean={s.mean:.4f} var={s.variance:.4f} skew={s.skewness:.4f} "
            f"kurt={s.kurtosis:.4f} p={s.p_violation:.4f}")


def test_criterion_3_target_reproduction():
    t = TargetState.default()
    value = bell_value(t.rho_t.mat, t.optimal_settings)
    gap = 1.0 - value / QUANTUM_BOUND
    oracle = horodecki_max(t.rho_t.mat)
    dev = max(np.abs(partial_trace(t.rho_t.mat, side) - I2 / 2).max()
              for side in ("A", "B"))
    checks = (abs(value - 2.733) <= 5e-3
              and abs(gap - 0.0336) <= 2e-3
              and oracle >= value - 1e-6
              and dev <= 1e-3)
    _report(3, checks,
            f"value={value:.6f} gap={gap:.5f} oracle={oracle:.6f} marginal_dev={dev:.1e}")


def test_criterion_4_neighborhood_statistics():
    target = TargetState.default()
    r75 = sample_neighborhood(
        target, NeighborhoodSpec(alpha=0.75, min_hits=300, budget=2_000_000), seed=42)
    r85 = sample_neighborhood(
        target, NeighborhoodSpec(alpha=0.85, min_hits=300, budget=4_000_000), seed=42)
    checks = (r75.hit_count >= 300
              and abs(r75.stats.mean - 1.67) <= 0.07
              and abs(r75.stats.p_violation - 0.058) <= 0.03
              and r85.hit_count >= 300
              and abs(r85.stats.mean - 2.06) <= 0.07
              and abs(r85.stats.p_violation - 0.65) <= 0.08
              and r85.stats.mean - r75.stats.mean >= 0.2)
    _report(4, checks,
            f"a=0.75: mean={r75.stats.mean:.4f} p={r75.stats.p_violation:.4f} "
            f"({r75.generated_count} generated); "
            f"a=0.85: mean={r85.stats.mean:.4f} p={r85.stats.p_violation:.4f} "
            f"({r85.generated_count} generated); "
            f"monotone gap={r85.stats.mean - r75.stats.mean:.3f}")


@pytest.mark.skipif(not os.environ.get("BELLKIT_EXTENDED"),
                    reason="alpha=0.95 needs ~1e8 states; set BELLKIT_EXTENDED=1")
def test_criterion_4_extended_alpha_095():
    target = TargetState.default()
    res = sample_neighborhood(
        target, NeighborhoodSpec(alpha=0.95, min_hits=100, budget=400_000_000),
        seed=42)
    checks = (res.hit_count >= 100
              and abs(res.stats.mean - 2.49) <= 0.1
              and res.stats.p_violation >= 0.9)
    _report(4, checks,
            f"a=0.95: hits={res.hit_count} mean={res.stats.mean:.4f} "
            f"p={res.stats.p_violation:.4f} ({res.generated_count} generated)")


def test_criterion_5_invariant_suites():
    durations = {}

    t0 = time.perf_counter()
    worst = 0.0
    for rho in filtered_states_block(2, 0, 1000):
        for side in ("A", "B"):
            worst = max(worst, np.abs(partial_trace(rho, side) - I2 / 2).max())
    durations["marginals"] = time.perf_counter() - t0
    assert worst <= 1e-10

    t0 = time.perf_counter()
    gen = RngStream(3, 0).generator()
    for _ in range(200):
        m = gen.standard_normal((4, 4)) + 1j * gen.standard_normal((4, 4))
        assert np.array_equal(realign(realign(m)), m)
    durations["realign"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    worst = 0.0
    for i in range(500):
        u = haar_unitary(4, RngStream(5, i))
        worst = max(worst, np.abs(u @ u.conj().T - np.eye(4)).max())
    durations["unitarity"] = time.perf_counter() - t0
    assert worst <= 1e-12

    t0 = time.perf_counter()
    for i in range(200):
        a = states_block(EnsembleKind.HILBERT_SCHMIDT, 7, 2 * i, 1)[0]
        b = states_block(EnsembleKind.HILBERT_SCHMIDT, 7, 2 * i + 1, 1)[0]
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-10)
        u = haar_unitary(4, RngStream(7, OPT_STREAM + i))
        assert fidelity(u @ a @ u.conj().T, u @ b @ u.conj().T) == pytest.approx(
            fidelity(a, b), abs=1e-9)
    durations["fidelity"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    violations = 0
    for kind in EnsembleKind:
        block = states_block(kind, 11, 0, 2000)
        for a, b in zip(block[:1000], block[1000:]):
            try:
                check_fvg(a, b)
            except BellkitError:
                violations += 1
    durations["fvg"] = time.perf_counter() - t0
    assert violations == 0

    slowest = max(durations.values())
    detail = " ".join(f"{k}={v:.1f}s" for k, v in durations.items())
    _report(5, slowest <= 30.0, detail)


def test_criterion_6_ensemble_separation():
    target = TargetState.default()
    sqrt_t = target.sqrt_rho
    n = 100_000
    fids = {}
    for kind in EnsembleKind:
        block = states_block(kind, 42, 0, n)
        f = np.sort(fidelity_block(sqrt_t, block))
        hist = Histogram.from_samples(f, 0.0, 1.0, 40)
        integral = float((hist.density() * np.diff(hist.bin_edges)).sum())
        assert abs(integral - 1.0) <= 1e-9
        fids[kind] = f

    critical = 1.949 * np.sqrt(2.0 / n)  # two-sample, equal sizes, 0.999 level

    def ks(x, y):
        both = np.concatenate([x, y])
        cx = np.searchsorted(x, both, side="right") / x.size
        cy = np.searchsorted(y, both, side="right") / y.size
        return float(np.max(np.abs(cx - cy)))

    ks_hs = ks(fids[EnsembleKind.FILTERED], fids[EnsembleKind.HILBERT_SCHMIDT])
    ks_bures = ks(fids[EnsembleKind.FILTERED], fids[EnsembleKind.BURES])
    _report(6, ks_hs > critical and ks_bures > critical,
            f"KS(filtered, hs)={ks_hs:.4f} KS(filtered, bures)={ks_bures:.4f} "
            f"critical={critical:.5f}")


def test_criterion_7_byte_identical_outputs(tmp_path):
    def invoke(tag, extra):
        jpath = tmp_path / f"{tag}.json"
        cpath = tmp_path / f"{tag}.csv"
        cmd = [sys.executable, "-m", "bellkit.cli", "typicality",
               "--seed", "42", "--count", "2000",
               "--out-json", str(jpath), "--out-csv", str(cpath)] + extra
        proc = subprocess.run(cmd, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        return jpath.read_bytes(), cpath.read_bytes()

    first = invoke("run1", [])
    second = invoke("run2", [])
    w1 = invoke("w1", ["--workers", "1"])
    w8 = invoke("w8", ["--workers", "8"])
    identical = first == second == w1 == w8
    _report(7, identical,
            f"4 invocations, json={len(first[0])}B csv={len(first[1])}B, "
            f"all byte-identical={identical}")
