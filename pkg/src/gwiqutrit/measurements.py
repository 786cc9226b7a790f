"""Trichotomic observables (six-port beam splitter, spin-1 component) and joint
probability tables.

Outcome convention for both observable kinds: table index 0, 1, 2 carries the
outcome label +1, 0, -1.  For the six-port device, output port k is index k.
For spin-1, |0>, |1>, |2> are the S_z eigenstates with eigenvalues +1, 0, -1.

A measurement is stored either as a projector set (array of shape (3, 3, 3),
``P[k]`` the projector for outcome k) or, for the fast path, as a basis
(array of shape (3, 3), row k the unit vector e_k with P[k] = |e_k><e_k|).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .linalg import hermitian_eig, kron
from .states import DIM, check_density

TWO_PI = 2 * np.pi
OUTCOME_LABELS = ("+", "0", "-")
OUTCOME_VALUES = (1, 0, -1)
KINDS = ("sixport", "spin")

SPIN_X = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=np.complex128) / np.sqrt(2)
SPIN_Y = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=np.complex128) / np.sqrt(2)
SPIN_Z = np.diag([1, 0, -1]).astype(np.complex128)

_OMEGA = np.exp(2j * np.pi / 3)
_FOURIER = np.array([[_OMEGA ** (j * k) for k in range(3)] for j in range(3)]) / np.sqrt(3)


def fourier_matrix():
    """Unitary 3-mode DFT, entries exp(2πi jk/3)/sqrt(3) for j, k = 0, 1, 2."""
    return _FOURIER.copy()


# --- six-port -----------------------------------------------------------

def sixport_unitary(phases, side):
    """V = F diag(exp(i phi)), F the DFT on side A and its complex conjugate on side B."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (3,):
        raise InputError("a six-port setting has three phases")
    if side == "A":
        f = _FOURIER
    elif side == "B":
        f = _FOURIER.conj()
    else:
        raise InputError(f"side must be 'A' or 'B', got {side!r}")
    return f * np.exp(1j * phases)


def sixport_basis(phases, side):
    # e_k = V^dagger |k>, i.e. the conjugated k-th row of V
    return sixport_unitary(phases, side).conj()


def sixport_projectors(phases, side):
    v = sixport_unitary(phases, side)
    return np.stack([np.outer(v[k].conj(), v[k]) for k in range(3)])


# --- spin-1 ---------------------------------------------------------------

def direction(theta, phi):
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def spin_operator(theta, phi):
    n = direction(theta, phi)
    return n[0] * SPIN_X + n[1] * SPIN_Y + n[2] * SPIN_Z


def spin_projectors(theta, phi):
    """Spectral projectors of n·S for outcomes +1, 0, -1 (polynomial form)."""
    s = spin_operator(theta, phi)
    eye = np.eye(3)
    s2 = s @ s
    return np.stack([(s2 + s) / 2, eye - s2, (s2 - s) / 2])


def spin_basis(theta, phi):
    """Eigenvectors of n·S from the rotation exp(-i phi Sz) exp(-i theta Sy) applied to |+1>, |0>, |-1>."""
    c, s = np.cos(theta), np.sin(theta)
    em, ep = np.exp(-1j * phi), np.exp(1j * phi)
    r = np.sqrt(2)
    return np.array([
        [em * (1 + c) / 2, s / r, ep * (1 - c) / 2],
        [-em * s / r, c, ep * s / r],
        [em * (1 - c) / 2, -s / r, ep * (1 + c) / 2],
    ])


def check_projector_set(projs, tol=1e-10):
    """Raise NumericalError unless ``projs`` is a complete set of orthogonal rank-1 projectors."""
    projs = np.asarray(projs)
    if projs.shape != (3, 3, 3):
        raise InputError(f"projector set must have shape (3, 3, 3), got {projs.shape}")
    eye = np.eye(3)
    for k in range(3):
        p = projs[k]
        if np.max(np.abs(p - p.conj().T)) > tol:
            raise NumericalError(f"projector {k} is not Hermitian")
        if np.max(np.abs(p @ p - p)) > tol:
            raise NumericalError(f"projector {k} is not idempotent")
        if abs(np.trace(p) - 1) > tol:
            raise NumericalError(f"projector {k} does not have rank 1")
        for m in range(3):
            if m != k and np.max(np.abs(p @ projs[m])) > tol:
                raise NumericalError(f"projectors {k} and {m} are not orthogonal")
    if np.max(np.abs(projs.sum(axis=0) - eye)) > tol:
        raise NumericalError("projectors do not sum to the identity")
    return projs


# --- settings -------------------------------------------------------------

def _canonical_spin(theta, phi):
    # same direction, theta folded into [0, pi]
    theta = float(np.mod(theta, TWO_PI))
    if theta > np.pi:
        theta = TWO_PI - theta
        phi = phi + np.pi
    return theta, float(np.mod(phi, TWO_PI))


@dataclass(frozen=True)
class ScenarioSettings:
    """Settings for a1, a2 (party A) and b1, b2 (party B), all of one kind.

    Six-port settings are phase triples; spin settings are (theta, phi) pairs.
    """

    kind: str
    a1: tuple
    a2: tuple
    b1: tuple
    b2: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown observable kind {self.kind!r}")
        width = 3 if self.kind == "sixport" else 2
        for name in ("a1", "a2", "b1", "b2"):
            vals = tuple(float(x) for x in getattr(self, name))
            if len(vals) != width:
                raise InputError(f"{self.kind} setting {name} needs {width} angles, got {len(vals)}")
            if not all(np.isfinite(vals)):
                raise InputError(f"setting {name} has non-finite angles")
            if self.kind == "spin" and not (-1e-12 <= vals[0] <= np.pi + 1e-12):
                raise InputError(f"polar angle of {name} outside [0, pi]: {vals[0]}")
            object.__setattr__(self, name, vals)

    @property
    def dimension(self):
        return 12 if self.kind == "sixport" else 8

    def vector(self):
        return np.array(self.a1 + self.a2 + self.b1 + self.b2)

    @classmethod
    def from_vector(cls, kind, x):
        """Build canonical settings from a flat optimizer vector.

        Phases are wrapped into [0, 2π); spin directions are re-expressed with
        theta in [0, π] (theta -> -theta or 2π - theta, together with phi -> phi + π,
        which leaves the direction unchanged).
        """
        x = np.asarray(x, dtype=float)
        if kind == "sixport":
            if x.shape != (12,):
                raise InputError("six-port settings vector has 12 entries")
            x = np.mod(x, TWO_PI)
            return cls(kind, tuple(x[0:3]), tuple(x[3:6]), tuple(x[6:9]), tuple(x[9:12]))
        if kind == "spin":
            if x.shape != (8,):
                raise InputError("spin settings vector has 8 entries")
            pairs = [_canonical_spin(x[2 * i], x[2 * i + 1]) for i in range(4)]
            return cls(kind, *pairs)
        raise InputError(f"unknown observable kind {kind!r}")

    def projector_sets(self):
        """Return (PA, PB), each of shape (2, 3, 3, 3): [setting, outcome, row, col]."""
        if self.kind == "sixport":
            pa = [sixport_projectors(s, "A") for s in (self.a1, self.a2)]
            pb = [sixport_projectors(s, "B") for s in (self.b1, self.b2)]
        else:
            pa = [spin_projectors(*s) for s in (self.a1, self.a2)]
            pb = [spin_projectors(*s) for s in (self.b1, self.b2)]
        return np.stack(pa), np.stack(pb)

    def bases(self):
        """Return (EA, EB), each of shape (2, 3, 3): [setting, outcome, component]."""
        return bases_from_vector(self.kind, self.vector())

    def to_json(self):
        return {"kind": self.kind, "a1": list(self.a1), "a2": list(self.a2),
                "b1": list(self.b1), "b2": list(self.b2)}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["kind"], tuple(obj["a1"]), tuple(obj["a2"]), tuple(obj["b1"]), tuple(obj["b2"]))
        except KeyError as exc:
            raise InputError(f"settings JSON is missing {exc}") from None


def bases_from_vector(kind, x):
    """Measurement bases straight from an (uncanonicalized) optimizer vector."""
    if kind == "sixport":
        fa = _FOURIER.conj()
        fb = _FOURIER
        # conj(F diag(e^{i phi})) = conj(F) diag(e^{-i phi})
        ea = np.stack([fa * np.exp(-1j * x[0:3]), fa * np.exp(-1j * x[3:6])])
        eb = np.stack([fb * np.exp(-1j * x[6:9]), fb * np.exp(-1j * x[9:12])])
        return ea, eb
    if kind == "spin":
        ea = np.stack([spin_basis(x[0], x[1]), spin_basis(x[2], x[3])])
        eb = np.stack([spin_basis(x[4], x[5]), spin_basis(x[6], x[7])])
        return ea, eb
    raise InputError(f"unknown observable kind {kind!r}")


# --- probability tables -----------------------------------------------------

def joint_prob_table(rho, settings, norm_tol=1e-8):
    """values[i, j, k, l] = Tr[rho (PA_i,k ⊗ PB_j,l)] by explicit Kronecker products."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (DIM, DIM):
        raise InputError("joint_prob_table expects a 9x9 density matrix")
    pa, pb = settings.projector_sets()
    values = np.empty((2, 2, 3, 3))
    for i in range(2):
        for j in range(2):
            for k in range(3):
                for l in range(3):
                    values[i, j, k, l] = np.real(np.trace(rho @ kron(pa[i, k], pb[j, l])))
    return _finish_table(values, norm_tol)


def _finish_table(values, norm_tol):
    sums = values.sum(axis=(2, 3))
    if np.max(np.abs(sums - 1)) > norm_tol:
        raise NumericalError(f"probability table not normalized (worst block sum {sums.flat[np.argmax(np.abs(sums - 1))]!r})")
    if values.min() < -norm_tol:
        raise NumericalError(f"negative probability {values.min():.3e}")
    return np.clip(values, 0.0, 1.0)


def pure_components(rho, cutoff=1e-14):
    """Decompose rho as sum_r w_r |psi_r><psi_r|; returns weights and amplitude matrices (r, 3, 3)."""
    dec = hermitian_eig(rho)
    keep = dec.eigenvalues > cutoff
    weights = dec.eigenvalues[keep]
    kets = dec.eigenvectors[:, keep].T.reshape(-1, 3, 3)
    return weights, kets


def table_from_bases(weights, kets, ea, eb):
    """Fast probability table from a pure-component decomposition and measurement bases.

    The amplitude <e^A_ik ⊗ e^B_jl | psi> is conj(EA) psi conj(EB)^T, reshaped
    to the (i, j, k, l) table layout.
    """
    a = ea.reshape(6, 3).conj()
    b = eb.reshape(6, 3).conj()
    amps = a @ kets @ b.T  # (r, 6, 6) indexed (r, 3i+k, 3j+l)
    probs = np.tensordot(weights, amps.real ** 2 + amps.imag ** 2, axes=1)
    return probs.reshape(2, 3, 2, 3).transpose(0, 2, 1, 3)


def fast_joint_prob_table(rho, settings, norm_tol=1e-8):
    weights, kets = pure_components(check_density(rho, tol=1e-9))
    ea, eb = settings.bases()
    return _finish_table(table_from_bases(weights, kets, ea, eb), norm_tol)


def uniform_table():
    return np.full((2, 2, 3, 3), 1 / 9)


def deterministic_table(strategy):
    """0/1 table of a local deterministic strategy (a1, a2, b1, b2 outcome indices)."""
    a1, a2, b1, b2 = strategy
    t = np.zeros((2, 2, 3, 3))
    for i, a in enumerate((a1, a2)):
        for j, b in enumerate((b1, b2)):
            t[i, j, a, b] = 1.0
    return t
