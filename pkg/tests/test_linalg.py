import numpy as np
import pytest

from bellkit.errors import BadDimension, NotHermitian, NotPSD
from bellkit.linalg import (
    DensityMatrix,
    I2,
    hermitize,
    herm_eig,
    kron,
    partial_trace,
    realign,
    sqrtm_psd,
    trace_norm,
)

from conftest import KET00, MAXMIX, PHI_PLUS


def random_complex(gen, n=4):
    return gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))


def test_realign_is_an_involution(gen):
    for _ in range(20):
        m = random_complex(gen)
        # pure index permutation, so equality is exact
        assert np.array_equal(realign(realign(m)), m)


def test_realign_identity_by_hand():
    expected = np.zeros((4, 4))
    expected[0] = [1, 0, 0, 1]
    expected[3] = [1, 0, 0, 1]
    assert np.array_equal(realign(np.eye(4)), expected)


def test_realign_rejects_wrong_shape():
    with pytest.raises(BadDimension):
        realign(np.eye(2))


def test_partial_trace_of_product(gen):
    a = hermitize(random_complex(gen, 2))
    b = hermitize(random_complex(gen, 2))
    ab = kron(a, b)
    np.testing.assert_allclose(partial_trace(ab, "A"), a * np.trace(b), atol=1e-12)
    np.testing.assert_allclose(partial_trace(ab, "B"), b * np.trace(a), atol=1e-12)


def test_partial_trace_of_bell_state():
    for side in ("A", "B"):
        np.testing.assert_allclose(partial_trace(PHI_PLUS, side), I2 / 2, atol=1e-15)


def test_partial_trace_rejects_bad_side():
    with pytest.raises(ValueError):
        partial_trace(np.eye(4), "C")


def test_hermitize_is_bitwise_idempotent(gen):
    m = random_complex(gen)
    h = hermitize(m)
    assert np.array_equal(hermitize(h), h)


def test_herm_eig_sorted_and_reconstructs(gen):
    m = hermitize(random_complex(gen))
    spec = herm_eig(m)
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    np.testing.assert_allclose(spec.reconstruct(), m, atol=1e-12)


def test_herm_eig_rejects_non_hermitian(gen):
    with pytest.raises(NotHermitian):
        herm_eig(random_complex(gen))


def test_sqrtm_psd_squares_back(gen):
    g = random_complex(gen)
    m = hermitize(g @ g.conj().T)
    root = sqrtm_psd(m)
    np.testing.assert_allclose(root @ root, m, atol=1e-10)


def test_sqrtm_psd_clamps_tiny_negatives():
    m = np.diag([1.0, 0.5, 0.25, -1e-13]).astype(complex)
    root = sqrtm_psd(m)
    assert np.all(np.linalg.eigvalsh(root) >= 0)


def test_sqrtm_psd_rejects_clearly_negative():
    with pytest.raises(NotPSD):
        sqrtm_psd(np.diag([1.0, 0.5, 0.25, -1e-3]).astype(complex))


def test_trace_norm_known_value():
    assert trace_norm(np.diag([1.0, -2.0]).astype(complex)) == pytest.approx(3.0)


def test_density_matrix_accepts_valid_states():
    for mat in (MAXMIX, PHI_PLUS, KET00):
        rho = DensityMatrix.from_matrix(mat)
        assert rho.dim == 4
        assert np.trace(rho.mat).real == pytest.approx(1.0)


def test_density_matrix_rejects_non_hermitian():
    bad = MAXMIX + 1e-3 * np.array([[0, 1j, 0, 0]] + [[0] * 4] * 3)
    with pytest.raises(NotHermitian):
        DensityMatrix.from_matrix(bad)


def test_density_matrix_rejects_negative_eigenvalue():
    with pytest.raises(NotPSD):
        DensityMatrix.from_matrix(np.diag([1.1, -0.1, 0.0, 0.0]).astype(complex))


def test_density_matrix_rejects_bad_trace():
    with pytest.raises(ValueError):
        DensityMatrix.from_matrix(np.eye(4, dtype=complex))


def test_density_matrix_rejects_bad_shape():
    with pytest.raises(BadDimension):
        DensityMatrix.from_matrix(np.eye(3, dtype=complex) / 3)


def test_density_matrix_clamp_repairs_and_renormalizes():
    dirty = np.diag([1.05, -1e-6, 0.03, 0.02]).astype(complex)
    rho = DensityMatrix.from_matrix(dirty, clamp=True)
    w = np.linalg.eigvalsh(rho.mat)
    assert w.min() >= 0
    assert np.trace(rho.mat).real == pytest.approx(1.0, abs=1e-14)


def test_purity_range():
    assert DensityMatrix.from_matrix(MAXMIX).purity() == pytest.approx(0.25)
    assert DensityMatrix.from_matrix(PHI_PLUS).purity() == pytest.approx(1.0)


def test_marginal_returns_single_qubit_state():
    rho = DensityMatrix.from_matrix(PHI_PLUS)
    for side in ("A", "B"):
        np.testing.assert_allclose(rho.marginal(side).mat, I2 / 2, atol=1e-12)
