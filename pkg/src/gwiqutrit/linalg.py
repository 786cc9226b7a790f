"""Small dense complex linear algebra for qutrit (3x3) and two-qutrit (9x9) objects.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The Hermitian
eigensolver defaults to LAPACK (``numpy.linalg.eigh``); a cyclic complex
Jacobi solver is kept alongside as an independent route for cross-checks.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EigenConvergenceError, InputError

HERMITIAN_TOL = 1e-9


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order; ``eigenvectors[:, i]`` pairs with ``eigenvalues[i]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def vector(self, i):
        return self.eigenvectors[:, i]

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_cmatrix(a):
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m


def kron(a, b):
    """Kronecker product of two 3x3 matrices, ``(a⊗b)[3i+k, 3j+l] = a[i,j] b[k,l]``."""
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape != (3, 3) or b.shape != (3, 3):
        raise InputError(f"kron expects two 3x3 matrices, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def dagger(a):
    return as_cmatrix(a).conj().T


def hermiticity_defect(h):
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def check_hermitian(h, tol=HERMITIAN_TOL):
    h = as_cmatrix(h)
    if h.shape[0] != h.shape[1]:
        raise InputError(f"matrix is not square: {h.shape}")
    defect = hermiticity_defect(h)
    if defect >= tol:
        raise InputError(f"matrix is not Hermitian (max |H - H^dagger| = {defect:.3e})")
    return h


def _verify(h, evals, evecs, tol):
    residual = float(np.max(np.abs(h @ evecs - evecs * evals))) if h.size else 0.0
    gram = evecs.conj().T @ evecs
    ortho = float(np.max(np.abs(gram - np.eye(len(evals))))) if h.size else 0.0
    worst = max(residual, ortho)
    if worst > tol:
        raise EigenConvergenceError("eigendecomposition failed verification", worst)


def hermitian_eig(h, tol=1e-10, method="lapack"):
    """Full eigendecomposition of a Hermitian matrix.

    ``method`` is ``"lapack"`` or ``"jacobi"``.  The result is checked against
    ``H v = λ v`` and orthonormality at ``tol`` (max-norm, scaled by ‖H‖ when
    ‖H‖ > 1).
    """
    h = check_hermitian(h)
    h = 0.5 * (h + h.conj().T)
    if method == "lapack":
        evals, evecs = np.linalg.eigh(h)
    elif method == "jacobi":
        evals, evecs = jacobi_eigh(h)
    else:
        raise InputError(f"unknown eigensolver method {method!r}")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    _verify(h, evals, evecs, tol * scale)
    return EigenDecomposition(np.asarray(evals, dtype=float), evecs)


def jacobi_eigh(h, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi for complex Hermitian matrices.

    Each rotation first removes the phase of ``h[p, q]`` with a diagonal
    unitary, then applies the real symmetric Jacobi rotation.  Converged when
    the off-diagonal Frobenius norm falls below ``tol``; raises
    :class:`EigenConvergenceError` after ``max_sweeps`` sweeps.
    """
    a = np.array(h, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)

    offdiag = ~np.eye(n, dtype=bool)

    def off(m):
        return float(np.sqrt(np.sum(np.abs(m[offdiag]) ** 2)))

    for _ in range(max_sweeps):
        if off(a) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                mag = abs(g)
                if mag < 1e-300:
                    continue
                phase = g / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # J = diag(1, conj(phase)) @ R(c, s) on the (p, q) plane
                j = np.eye(n, dtype=np.complex128)
                j[p, p] = c
                j[p, q] = s
                j[q, p] = -s * np.conj(phase)
                j[q, q] = c * np.conj(phase)
                a = j.conj().T @ a @ j
                v = v @ j
    else:
        if off(a) >= tol:
            raise EigenConvergenceError("Jacobi iteration did not converge", off(a))
    evals = np.real(np.diag(a))
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]
