"""Dense complex linear algebra for one- and two-qubit operators.

Everything here works on plain ``numpy`` arrays (complex128).  The only
container types are :class:`Spectrum`, the result of a Hermitian
eigendecomposition, and :class:`DensityMatrix`, a validated state wrapper
used at package boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDimension, NotHermitian, NotPSD

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances used by validation and clamping helpers."""

    hermiticity: float = 1e-10   # max |M - M^dag| accepted by DensityMatrix
    trace: float = 1e-10         # |tr(rho) - 1| accepted by DensityMatrix
    psd_clamp: float = 1e-10     # eigenvalues >= -psd_clamp are clamped to 0
    psd_reject: float = 1e-8     # below -psd_reject sqrtm_psd raises NotPSD
    herm_input: float = 1e-8     # hermiticity required by herm_eig
    unitarity: float = 1e-8      # |U^dag U - I| accepted as unitary


TOL = Tolerances()


def as_matrix(m) -> np.ndarray:
    """Coerce a DensityMatrix or array-like to a complex ndarray."""
    if isinstance(m, DensityMatrix):
        return m.mat
    return np.asarray(m, dtype=complex)


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def hermitize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M^dag) / 2."""
    return (m + m.conj().T) / 2


def is_hermitian(m: np.ndarray, atol: float = TOL.herm_input) -> bool:
    """Entry-wise hermiticity check."""
    return bool(np.max(np.abs(m - m.conj().T)) <= atol)


def is_unitary(m: np.ndarray, atol: float = TOL.unitarity) -> bool:
    """Entry-wise check of U^dag U = I."""
    m = np.asarray(m)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= atol)


def kron(a, b) -> np.ndarray:
    """Kronecker product of two matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise BadDimension("kron expects two 2-D matrices")
    return np.kron(a, b)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues (real, ascending) and matching orthonormal eigenvectors.

    ``eigenvectors[:, k]`` is the eigenvector for ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """V diag(w) V^dag."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def herm_eig(m, atol: float = TOL.herm_input) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix.

    Raises NotHermitian when the symmetry check fails.
    """
    m = as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadDimension(f"herm_eig expects a square matrix, got {m.shape}")
    if not is_hermitian(m, atol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(m)
    return Spectrum(eigenvalues=w, eigenvectors=v)


def sqrtm_psd(m, clamp: float = TOL.psd_clamp, reject: float = TOL.psd_reject) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in [-clamp, 0) are clamped to 0; below -reject raises NotPSD.
    """
    spec = herm_eig(m)
    w = spec.eigenvalues
    if w[0] < -reject:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3e} below -{reject:.1e}")
    w = np.clip(w, 0.0, None)
    v = spec.eigenvectors
    return hermitize((v * np.sqrt(w)) @ v.conj().T)


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduced 2x2 state of a two-qubit density matrix.

    ``keep`` selects the surviving subsystem, "A" (first factor) or "B".
    """
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise BadDimension(f"partial_trace expects a 4x4 matrix, got {rho.shape}")
    r = rho.reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijik->jk", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def realign(m) -> np.ndarray:
    """Block-to-row realignment of a 4x4 matrix.

    Each 2x2 block of the input is flattened (row-major) into one row of
    the output; the map is an involution.
    """
    m = as_matrix(m)
    if m.shape != (4, 4):
        raise BadDimension(f"realign expects a 4x4 matrix, got {m.shape}")
    return m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


def realign_many(ms: np.ndarray) -> np.ndarray:
    """Realign a stack of 4x4 matrices (batch axis first)."""
    n = ms.shape[0]
    return ms.reshape(n, 2, 2, 2, 2).transpose(0, 1, 3, 2, 4).reshape(n, 4, 4)


def trace_norm(m) -> float:
    """Sum of singular values."""
    m = as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadDimension(f"trace_norm expects a square matrix, got {m.shape}")
    return float(np.linalg.svd(m, compute_uv=False).sum())


class DensityMatrix:
    """Validated 4x4 (two-qubit) or 2x2 (single-qubit) density matrix.

    Instances are immutable; build them with :meth:`from_matrix`, which
    checks hermiticity, unit trace and positivity, optionally clamping
    slightly negative eigenvalues.
    """

    __slots__ = ("_mat",)

    def __init__(self, mat: np.ndarray):
        self._mat = mat
        self._mat.setflags(write=False)

    @property
    def mat(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    @classmethod
    def from_matrix(cls, mat, *, clamp: bool = False, tol: Tolerances = TOL) -> "DensityMatrix":
        m = np.array(np.asarray(mat, dtype=complex))
        if m.shape not in ((2, 2), (4, 4)):
            raise BadDimension(f"density matrix must be 2x2 or 4x4, got {m.shape}")
        if not is_hermitian(m, tol.hermiticity):
            raise NotHermitian("density matrix is not Hermitian within tolerance")
        m = hermitize(m)
        w, v = np.linalg.eigh(m)
        if clamp:
            w = np.clip(w, 0.0, None)
            m = hermitize((v * w) @ v.conj().T)
            m = m / np.trace(m).real
        else:
            if w[0] < -tol.psd_clamp:
                raise NotPSD(f"minimum eigenvalue {w[0]:.3e} below -{tol.psd_clamp:.1e}")
            if abs(np.trace(m).real - 1.0) > tol.trace:
                raise ValueError(f"trace {np.trace(m).real!r} differs from 1 beyond tolerance")
        return cls(m)

    def marginal(self, keep: str) -> "DensityMatrix":
        return DensityMatrix(hermitize(partial_trace(self._mat, keep)))

    def purity(self) -> float:
        return float(np.trace(self._mat @ self._mat).real)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, purity={self.purity():.4f})"
