import numpy as np
import pytest

from gwiqutrit.errors import EigenConvergenceError, InputError
from gwiqutrit.linalg import check_hermitian, dagger, hermitian_eig, jacobi_eigh, kron


def random_hermitian(rng, n=9):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_3x3(rng):
    return rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))


def test_kron_matches_numpy(rng):
    a, b = random_3x3(rng), random_3x3(rng)
    assert np.allclose(kron(a, b), np.kron(a, b), atol=0)
    assert np.allclose(kron(a, b)[3 * 1 + 2, 3 * 0 + 1], a[1, 0] * b[2, 1])


def test_kron_is_bilinear(rng):
    for _ in range(200):
        a, a2, b, b2 = (random_3x3(rng) for _ in range(4))
        assert np.max(np.abs(kron(a + a2, b) - kron(a, b) - kron(a2, b))) < 1e-12
        assert np.max(np.abs(kron(a, b + b2) - kron(a, b) - kron(a, b2))) < 1e-12


@pytest.mark.parametrize("shape", [(2, 2), (3, 4), (9, 9)])
def test_kron_rejects_wrong_shape(shape):
    with pytest.raises(InputError):
        kron(np.zeros(shape), np.eye(3))


def test_dagger(rng):
    a = random_3x3(rng)
    assert np.array_equal(dagger(a), a.conj().T)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eigenvalue_sum_equals_trace(rng, method):
    for _ in range(50):
        h = random_hermitian(rng)
        dec = hermitian_eig(h, method=method)
        assert abs(dec.eigenvalues.sum() - np.trace(h).real) < 1e-9
        assert np.all(np.diff(dec.eigenvalues) >= 0)
        assert np.max(np.abs(dec.reconstruct() - h)) < 1e-9


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_diagonal_matrix_eigenvalues_exact(rng, method):
    d = rng.normal(size=9)
    dec = hermitian_eig(np.diag(d), method=method)
    assert np.array_equal(dec.eigenvalues, np.sort(d))


def test_jacobi_agrees_with_lapack(rng):
    for _ in range(20):
        h = random_hermitian(rng)
        a = hermitian_eig(h, method="jacobi")
        b = hermitian_eig(h, method="lapack")
        assert np.max(np.abs(a.eigenvalues - b.eigenvalues)) < 1e-11
        # eigenvectors agree up to phase for a generic (non-degenerate) spectrum
        overlaps = np.abs(np.sum(a.eigenvectors.conj() * b.eigenvectors, axis=0))
        assert np.all(overlaps > 1 - 1e-9)


def test_non_hermitian_rejected(rng):
    with pytest.raises(InputError):
        hermitian_eig(random_3x3(rng) + 5j * np.eye(3))
    with pytest.raises(InputError):
        check_hermitian(np.array([[0, 1], [0, 0]]))


def test_jacobi_cap_reports_residual(rng):
    with pytest.raises(EigenConvergenceError) as info:
        jacobi_eigh(random_hermitian(rng), max_sweeps=1)
    assert info.value.residual > 1e-12
    assert "residual" in str(info.value)


def test_unknown_method_rejected():
    with pytest.raises(InputError):
        hermitian_eig(np.eye(3), method="power")
