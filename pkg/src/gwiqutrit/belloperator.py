"""Bell operators B = sum c[i,j,k,l] PA_ik ⊗ PB_jl and their top eigenpairs."""

from dataclasses import dataclass

import numpy as np

from .linalg import hermitian_eig, hermiticity_defect, kron
from .errors import NumericalError
from .states import to_pairs

DEGENERACY_GAP = 1e-9


@dataclass(frozen=True)
class BellOperator:
    matrix: np.ndarray
    label: str
    settings: object


@dataclass(frozen=True)
class BellMaximum:
    lambda_max: float
    state: np.ndarray
    violation: float
    degenerate: bool
    label: str
    settings: object

    def to_json(self):
        return {
            "label": self.label,
            "lambda_max": self.lambda_max,
            "violation": self.violation,
            "degenerate": self.degenerate,
            "state": to_pairs(self.state),
            "settings": self.settings.to_json() if self.settings is not None else None,
        }


def from_projectors(coeffs, pa, pb):
    """Bell operator from explicit projector sets pa, pb of shape (2, 3, 3, 3)."""
    b = np.zeros((9, 9), dtype=np.complex128)
    for (i, j, k, l), c in np.ndenumerate(coeffs):
        if c != 0:
            b += c * kron(pa[i, k], pb[j, l])
    return b


def bell_matrix_from_bases(coeffs, ea, eb):
    """Same operator from measurement bases: sum c |x_n><x_n| with x_n = e^A_ik ⊗ e^B_jl."""
    x = np.einsum("ika,jlb->ijklab", ea, eb).reshape(36, 9)
    return (x.T * coeffs.reshape(36)) @ x.conj()


def build(spec, settings):
    pa, pb = settings.projector_sets()
    b = from_projectors(spec.coeffs, pa, pb)
    if hermiticity_defect(b) > 1e-10:
        raise NumericalError("Bell operator is not Hermitian")
    return BellOperator(b, spec.label, settings)


def fix_phase(psi):
    """Multiply by a global phase so the largest-magnitude amplitude is real and positive."""
    psi = np.asarray(psi, dtype=np.complex128)
    k = int(np.argmax(np.abs(psi).round(12)))
    out = psi * (abs(psi[k]) / psi[k])
    out[k] = abs(psi[k])  # exactly real, no rounding residue
    return out


def top_eigenpair(matrix):
    dec = hermitian_eig(matrix)
    evals = dec.eigenvalues
    lam = float(evals[-1])
    top = np.flatnonzero(evals >= lam - DEGENERACY_GAP)
    degenerate = len(top) > 1
    if degenerate:
        # deterministic pick inside the top eigenspace
        cands = [fix_phase(dec.vector(i)) for i in top]
        keys = [tuple(np.round(np.abs(v), 12)) for v in cands]
        vec = cands[max(range(len(cands)), key=lambda n: keys[n])]
    else:
        vec = fix_phase(dec.vector(top[0]))
    return lam, vec / np.linalg.norm(vec), degenerate


def max_violation_state(spec, settings):
    op = build(spec, settings)
    lam, vec, degenerate = top_eigenpair(op.matrix)
    return BellMaximum(lam, vec, lam - spec.bound, degenerate, spec.label, settings)


def expectation(matrix, psi):
    psi = np.asarray(psi, dtype=np.complex128)
    return float(np.real(np.vdot(psi, matrix @ psi)))
