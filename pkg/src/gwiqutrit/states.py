"""Two-qutrit states: the pure isotropic and singlet kets, white-noise mixtures
and the four mixed families rho1..rho4.

Kets are length-9 complex arrays in the basis |00>, |01>, |02>, |10>, ..., |22>
(first index belongs to party A).  Density matrices are 9x9 complex arrays.
"""

import numpy as np

from .errors import InputError
from .linalg import as_cmatrix, hermitian_eig, hermiticity_defect

DIM = 9
NORM_TOL = 1e-12
POSITIVITY_FLOOR = -1e-10
FAMILIES = ("rho1", "rho2", "rho3", "rho4")


def basis_index(a, b):
    return 3 * a + b


def check_ket(amplitudes, tol=NORM_TOL):
    psi = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if psi.shape != (DIM,):
        raise InputError(f"a two-qutrit ket has 9 amplitudes, got {psi.size}")
    if not np.all(np.isfinite(psi)):
        raise InputError("ket has non-finite amplitudes")
    norm = float(np.sum(np.abs(psi) ** 2))
    if abs(norm - 1.0) > tol:
        raise InputError(f"ket is not normalized (norm^2 = {norm!r})")
    return psi


def normalize(amplitudes):
    psi = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    n = np.linalg.norm(psi)
    if n == 0:
        raise InputError("cannot normalize the zero vector")
    return check_ket(psi / n)


def isotropic():
    """(|00> + |11> + |22>)/sqrt(3)."""
    psi = np.zeros(DIM, dtype=np.complex128)
    psi[[0, 4, 8]] = 1 / np.sqrt(3)
    return psi


def singlet():
    """(|02> - |11> + |20>)/sqrt(3), the spin-0 state of two spin-1 particles."""
    psi = np.zeros(DIM, dtype=np.complex128)
    psi[basis_index(0, 2)] = 1
    psi[basis_index(1, 1)] = -1
    psi[basis_index(2, 0)] = 1
    return psi / np.sqrt(3)


def projector(psi):
    psi = check_ket(psi, tol=1e-9)
    return np.outer(psi, psi.conj())


def maximally_mixed():
    return np.eye(DIM, dtype=np.complex128) / DIM


def check_density(rho, tol=NORM_TOL):
    """Validate Hermiticity, unit trace and positivity (eigenvalue floor -1e-10)."""
    rho = as_cmatrix(rho)
    if rho.shape != (DIM, DIM):
        raise InputError(f"density matrix must be 9x9, got {rho.shape}")
    if hermiticity_defect(rho) > tol:
        raise InputError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise InputError(f"density matrix trace is {tr.real:.3e}, expected 1")
    lam_min = hermitian_eig(rho).eigenvalues[0]
    if lam_min < POSITIVITY_FLOOR:
        raise InputError(f"density matrix has negative eigenvalue {lam_min:.3e}")
    return rho


def _check_weight(name, x):
    if not (0.0 <= x <= 1.0):
        raise InputError(f"{name} must lie in [0, 1], got {x!r}")
    return float(x)


def noisy(psi, p):
    """White-noise mixture p|psi><psi| + (1-p) I/9."""
    p = _check_weight("p", p)
    return p * projector(psi) + (1 - p) * maximally_mixed()


def mixed_family(which, p, q=None):
    """The families rho1..rho4 built from the isotropic (psi1) and singlet (psi2) kets.

    rho1 = noisy(psi1, p), rho2 = noisy(psi2, p),
    rho3 = p|psi1><psi1| + (1-p)|psi2><psi2|,
    rho4 = p(q|psi1><psi1| + (1-q)|psi2><psi2|) + (1-p) I/9.
    """
    p = _check_weight("p", p)
    iso = projector(isotropic())
    sing = projector(singlet())
    if which == "rho1":
        rho = p * iso + (1 - p) * maximally_mixed()
    elif which == "rho2":
        rho = p * sing + (1 - p) * maximally_mixed()
    elif which == "rho3":
        rho = p * iso + (1 - p) * sing
    elif which == "rho4":
        if q is None:
            raise InputError("rho4 needs the mixing weight q")
        q = _check_weight("q", q)
        rho = p * (q * iso + (1 - q) * sing) + (1 - p) * maximally_mixed()
    else:
        raise InputError(f"unknown family {which!r}; expected one of {FAMILIES}")
    return rho


def named_state(name):
    if name == "isotropic":
        return isotropic()
    if name == "singlet":
        return singlet()
    raise InputError(f"unknown state {name!r}")


# JSON: complex arrays as [re, im] pairs, matrices row-major.

def to_pairs(a):
    a = np.asarray(a, dtype=np.complex128)
    return [[float(z.real), float(z.imag)] for z in a.reshape(-1)]


def from_pairs(pairs, shape=None):
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InputError("expected a list of [re, im] pairs")
    z = arr[:, 0] + 1j * arr[:, 1]
    if shape is not None:
        if z.size != int(np.prod(shape)):
            raise InputError(f"expected {int(np.prod(shape))} entries, got {z.size}")
        z = z.reshape(shape)
    return z


def ket_to_json(psi):
    return {"type": "ket", "amplitudes": to_pairs(check_ket(psi, tol=1e-9))}


def density_to_json(rho):
    return {"type": "density", "matrix": to_pairs(rho)}


def state_from_json(obj):
    """Load a ket or a density matrix and return the density matrix."""
    kind = obj.get("type")
    if kind == "ket":
        return projector(normalize(from_pairs(obj["amplitudes"])))
    if kind == "density":
        return check_density(from_pairs(obj["matrix"], (DIM, DIM)), tol=1e-9)
    raise InputError(f"unknown state type {kind!r}")
