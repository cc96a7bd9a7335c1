"""Uhlmann fidelity and the distances derived from it.

F(rho1, rho2) = (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2, computed through
eigendecompositions with clamped roots so rank-deficient inputs (pure
states) stay stable.  The Bures distance sqrt(2 (1 - sqrt F)) and the trace
distance come with it, tied together by the two-sided bound

    1 - sqrt(F)  <=  T  <=  sqrt(1 - F)

which doubles as a cross-check on both computation paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundViolation, DimensionMismatch
from .linalg import as_matrix, hermitize, sqrtm_psd, trace_norm

_SANDWICH_SLACK = 1e-9


@dataclass(frozen=True)
class FidelityRecord:
    """Fidelity with its derived distances, validated against each other.

    Construction rejects records that break the trace-distance sandwich or
    the Bures relation, so an instance is evidence the numbers cohere.
    """

    fidelity: float
    bures_distance: float
    trace_distance: float

    def __post_init__(self):
        f = self.fidelity
        if not 0.0 <= f <= 1.0:
            raise BoundViolation(f"fidelity {f} outside [0, 1]")
        if not 0.0 <= self.trace_distance <= 1.0 + _SANDWICH_SLACK:
            raise BoundViolation(f"trace distance {self.trace_distance} outside [0, 1]")
        expected = math.sqrt(2.0 * (1.0 - math.sqrt(f)))
        if abs(self.bures_distance - expected) > 1e-10:
            raise BoundViolation("Bures distance inconsistent with fidelity")
        lower = 1.0 - math.sqrt(f)
        upper = math.sqrt(1.0 - f)
        if self.trace_distance < lower - _SANDWICH_SLACK or self.trace_distance > upper + _SANDWICH_SLACK:
            raise BoundViolation(
                f"trace distance {self.trace_distance} outside "
                f"[{lower}, {upper}] beyond slack"
            )


def _pair(rho1, rho2):
    a = as_matrix(rho1)
    b = as_matrix(rho2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"state shapes differ: {a.shape} vs {b.shape}")
    return a, b


def _fidelity_raw(rho1: np.ndarray, rho2: np.ndarray) -> float:
    s = sqrtm_psd(rho1)
    w = np.linalg.eigvalsh(hermitize(s @ rho2 @ s))
    root = np.sqrt(np.clip(w, 0.0, None)).sum()
    return float(root * root)


def fidelity(rho1, rho2) -> float:
    """Uhlmann fidelity, clamped to [0, 1]; symmetric in its arguments."""
    a, b = _pair(rho1, rho2)
    return min(max(_fidelity_raw(a, b), 0.0), 1.0)


def bures_distance(rho1, rho2) -> float:
    """sqrt(2 (1 - sqrt F)); ranges from 0 (equal) to sqrt 2 (orthogonal)."""
    return math.sqrt(2.0 * (1.0 - math.sqrt(fidelity(rho1, rho2))))


def trace_distance(rho1, rho2) -> float:
    """Half the trace norm of the difference."""
    a, b = _pair(rho1, rho2)
    return 0.5 * trace_norm(hermitize(a - b))


def check_fvg(rho1, rho2) -> FidelityRecord:
    """Fidelity, Bures and trace distance for a pair, cross-validated.

    Raises BoundViolation when the sandwich inequality fails beyond 1e-9,
    which signals a numerical defect rather than a property of the pair.
    """
    f = fidelity(rho1, rho2)
    return FidelityRecord(
        fidelity=f,
        bures_distance=math.sqrt(2.0 * (1.0 - math.sqrt(f))),
        trace_distance=trace_distance(rho1, rho2),
    )


def fidelity_block(sqrt_rho1: np.ndarray, rhos: np.ndarray) -> np.ndarray:
    """Fidelities of one reference state against a stack of states.

    Takes the reference's PSD square root (precompute once with
    ``sqrtm_psd``); same arithmetic as :func:`fidelity` applied slice-wise.
    """
    m = sqrt_rho1 @ rhos @ sqrt_rho1
    m = (m + m.conj().transpose(0, 2, 1)) / 2
    w = np.linalg.eigvalsh(m)
    roots = np.sqrt(np.clip(w, 0.0, None)).sum(axis=1)
    return np.clip(roots * roots, 0.0, 1.0)
