"""Reproducible random unitaries and two-qubit density matrices.

All draws go through :class:`RngStream`, a counter-based stream keyed by
``(master_seed, stream_index)``.  Sample ``i`` of an ensemble reads only
stream ``i``, so ensembles can be produced by any number of workers in any
order and still come out bit-identical.

Three state ensembles are provided:

* ``filtered``  - realign a Haar unitary and square it; both one-qubit
  marginals are exactly maximally mixed.
* ``hs``        - Ginibre square, normalized (Hilbert-Schmidt measure).
* ``bures``     - (I + U) G with U Haar and G Ginibre, squared and
  normalized (Bures measure).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BadDimension, NotConverged, NotUnitary, SingularMarginal
from .linalg import (
    I2,
    I4,
    DensityMatrix,
    Spectrum,
    as_matrix,
    herm_eig,
    hermitize,
    is_unitary,
    kron,
    partial_trace,
    realign,
    realign_many,
)

_U64 = 2**64


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream, a pure function of (seed, index).

    Every call to :meth:`generator` returns a fresh generator positioned at
    the start of the stream, so repeated draws from the same stream are
    identical by construction.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < _U64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        if not 0 <= self.stream_index < _U64:
            raise ValueError("stream_index must fit in an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


class EnsembleKind(str, enum.Enum):
    """Which random-state ensemble to draw from."""

    FILTERED = "filtered"
    HILBERT_SCHMIDT = "hs"
    BURES = "bures"


def _check_dim(n: int):
    if n not in (2, 4):
        raise BadDimension(f"supported sizes are 2 and 4, got {n}")


def _ginibre(n: int, gen: np.random.Generator) -> np.ndarray:
    # real and imaginary parts i.i.d. standard normal
    return gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))


def _haar(n: int, gen: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(n, gen))
    d = np.diagonal(r)
    return q * (d.conj() / np.abs(d))


def ginibre(n: int, rng: RngStream) -> np.ndarray:
    """n x n matrix with i.i.d. standard-normal real and imaginary parts."""
    _check_dim(n)
    return _ginibre(n, rng.generator())


def haar_unitary(n: int, rng: RngStream) -> np.ndarray:
    """Haar-distributed unitary from QR of a Ginibre sample.

    The R-diagonal phases are folded back into the columns so the map is
    measure-correct, not just unitary.
    """
    _check_dim(n)
    return _haar(n, rng.generator())


def _state_from_unitary(u: np.ndarray) -> np.ndarray:
    ur = realign(u)
    return hermitize(ur @ ur.conj().T) / 4.0


def filtered_state(rng: RngStream) -> DensityMatrix:
    """Random two-qubit state with both marginals exactly I/2.

    Built as R R^dag / 4 where R is the realignment of a Haar unitary;
    unitarity of the source forces the marginals.
    """
    return DensityMatrix.from_matrix(_state_from_unitary(_haar(4, rng.generator())))


def operator_schmidt_spectrum(u) -> Spectrum:
    """Schmidt coefficients (squared) of a 4x4 unitary seen as an operator.

    Returns the spectrum of R R^dag / 4, nonnegative and summing to 1.
    """
    u = as_matrix(u)
    if u.shape != (4, 4):
        raise BadDimension(f"expected a 4x4 unitary, got {u.shape}")
    if not is_unitary(u):
        raise NotUnitary("input is not unitary within tolerance")
    return herm_eig(_state_from_unitary(u))


def hs_state(rng: RngStream) -> DensityMatrix:
    """Random state under the Hilbert-Schmidt measure: G G^dag normalized."""
    g = _ginibre(4, rng.generator())
    m = hermitize(g @ g.conj().T)
    return DensityMatrix.from_matrix(m / np.trace(m).real)


def bures_state(rng: RngStream) -> DensityMatrix:
    """Random state under the Bures measure: (I+U) G G^dag (I+U)^dag normalized."""
    gen = rng.generator()
    g = _ginibre(4, gen)
    a = (I4 + _haar(4, gen)) @ g
    m = hermitize(a @ a.conj().T)
    return DensityMatrix.from_matrix(m / np.trace(m).real)


def _inv_sqrt_2x2(m: np.ndarray, floor: float) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    if w[0] < floor:
        raise SingularMarginal(f"marginal eigenvalue {w[0]:.3e} below {floor:.1e}")
    return (v / np.sqrt(w)) @ v.conj().T


def filter_normal_form(rho, tol: float = 1e-10, max_iter: int = 1000) -> DensityMatrix:
    """Local-filtering normal form: both marginals driven to I/2.

    Alternates F = (2 * marginal)^{-1/2} on each side until the larger
    marginal residual drops below ``tol``.  Requires a full-rank input
    (smallest eigenvalue above 1e-9); rank-deficient states are rejected,
    not regularized.  Raises SingularMarginal on rank deficiency and
    NotConverged after ``max_iter`` sweeps.
    """
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise BadDimension(f"expected a 4x4 state, got {rho.shape}")
    lo = np.linalg.eigvalsh(hermitize(rho))[0]
    if lo <= 1e-9:
        raise SingularMarginal(f"state eigenvalue {lo:.3e} too small to filter")
    half = I2 / 2
    floor = 1e-12
    for _ in range(max_iter):
        ra = partial_trace(rho, "A")
        rb = partial_trace(rho, "B")
        res = max(np.max(np.abs(ra - half)), np.max(np.abs(rb - half)))
        if res <= tol:
            rho = hermitize(rho) / np.trace(rho).real
            return DensityMatrix.from_matrix(rho)
        fa = _inv_sqrt_2x2(2.0 * hermitize(ra), floor)
        f = kron(fa, I2)
        rho = f @ rho @ f.conj().T
        fb = _inv_sqrt_2x2(2.0 * hermitize(partial_trace(rho, "B")), floor)
        f = kron(I2, fb)
        rho = f @ rho @ f.conj().T
        rho = hermitize(rho) / np.trace(rho).real
    raise NotConverged(f"marginals still off after {max_iter} sweeps")


# --- block kernels ---------------------------------------------------------
#
# Bit-identical to stacking the per-sample functions over stream indices
# start .. start+count-1 (numpy's stacked LAPACK routines factor each slice
# independently), but much faster for ensemble-sized runs.


def _ginibre_block(master_seed: int, start: int, count: int, n: int) -> np.ndarray:
    z = np.empty((count, n, n), dtype=complex)
    for i in range(count):
        gen = RngStream(master_seed, start + i).generator()
        z[i] = _ginibre(n, gen)
    return z


def _haar_from_ginibre(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d.conj() / np.abs(d))[:, None, :]


def filtered_states_block(master_seed: int, start: int, count: int) -> np.ndarray:
    """Stack of ``count`` filtered states for stream indices start..start+count-1."""
    u = _haar_from_ginibre(_ginibre_block(master_seed, start, count, 4))
    ur = realign_many(u)
    rho = ur @ ur.conj().transpose(0, 2, 1) / 4.0
    return (rho + rho.conj().transpose(0, 2, 1)) / 2


def hs_states_block(master_seed: int, start: int, count: int) -> np.ndarray:
    """Stack of ``count`` Hilbert-Schmidt states."""
    g = _ginibre_block(master_seed, start, count, 4)
    m = g @ g.conj().transpose(0, 2, 1)
    m = (m + m.conj().transpose(0, 2, 1)) / 2
    tr = np.trace(m, axis1=1, axis2=2).real
    return m / tr[:, None, None]


def bures_states_block(master_seed: int, start: int, count: int) -> np.ndarray:
    """Stack of ``count`` Bures states."""
    a = np.empty((count, 4, 4), dtype=complex)
    for i in range(count):
        gen = RngStream(master_seed, start + i).generator()
        g = _ginibre(4, gen)
        a[i] = (I4 + _haar(4, gen)) @ g
    m = a @ a.conj().transpose(0, 2, 1)
    m = (m + m.conj().transpose(0, 2, 1)) / 2
    tr = np.trace(m, axis1=1, axis2=2).real
    return m / tr[:, None, None]


_BLOCK_SAMPLERS = {
    EnsembleKind.FILTERED: filtered_states_block,
    EnsembleKind.HILBERT_SCHMIDT: hs_states_block,
    EnsembleKind.BURES: bures_states_block,
}


def states_block(kind: EnsembleKind, master_seed: int, start: int, count: int) -> np.ndarray:
    """Dispatch to the block sampler for ``kind``."""
    return _BLOCK_SAMPLERS[EnsembleKind(kind)](master_seed, start, count)
