import numpy as np
import pytest
from hypothesis import given, strategies as st
from jsonschema import validate

from gwiqutrit.errors import InputError
from gwiqutrit.measurements import spin_operator
from gwiqutrit.schema import load_schema
from gwiqutrit.states import (
    FAMILIES, basis_index, check_density, density_to_json, isotropic, ket_to_json, maximally_mixed,
    mixed_family, noisy, normalize, projector, singlet, state_from_json,
)


def random_ket(rng):
    return normalize(rng.normal(size=9) + 1j * rng.normal(size=9))


def test_isotropic_amplitudes():
    psi = isotropic()
    expected = np.zeros(9)
    expected[[basis_index(0, 0), basis_index(1, 1), basis_index(2, 2)]] = 1 / np.sqrt(3)
    assert np.allclose(psi, expected, atol=1e-15)


def test_singlet_amplitudes():
    psi = singlet()
    assert np.isclose(psi[basis_index(0, 2)], 1 / np.sqrt(3))
    assert np.isclose(psi[basis_index(1, 1)], -1 / np.sqrt(3))
    assert np.isclose(psi[basis_index(2, 0)], 1 / np.sqrt(3))
    assert np.count_nonzero(psi) == 3


def test_singlet_is_rotation_invariant():
    # total spin zero: (S_n ⊗ I + I ⊗ S_n) annihilates it for any direction
    s = spin_operator(0.7, 2.1)
    total = np.kron(s, np.eye(3)) + np.kron(np.eye(3), s)
    assert np.max(np.abs(total @ singlet())) < 1e-12


@given(st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_noisy_spectrum(p, seed):
    psi = random_ket(np.random.default_rng(seed))
    ev = np.linalg.eigvalsh(noisy(psi, p))
    expected = np.sort([p + (1 - p) / 9] + [(1 - p) / 9] * 8)
    assert np.max(np.abs(ev - expected)) < 1e-10


@pytest.mark.parametrize("p", [-0.01, 1.01, np.nan])
def test_noisy_rejects_bad_visibility(p):
    with pytest.raises(InputError):
        noisy(isotropic(), p)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_families_are_states(family, p):
    rho = mixed_family(family, p, q=0.4)
    check_density(rho)


def test_family_endpoints():
    assert np.allclose(mixed_family("rho1", 1.0), projector(isotropic()))
    assert np.allclose(mixed_family("rho2", 0.0), maximally_mixed())
    assert np.allclose(mixed_family("rho3", 0.0), projector(singlet()))
    assert np.allclose(mixed_family("rho4", 1.0, 1.0), projector(isotropic()))
    assert np.allclose(mixed_family("rho4", 1.0, 0.0), projector(singlet()))


def test_family_errors():
    with pytest.raises(InputError):
        mixed_family("rho4", 0.5)
    with pytest.raises(InputError):
        mixed_family("rho4", 0.5, 1.5)
    with pytest.raises(InputError):
        mixed_family("rho9", 0.5)


def test_check_density_rejects_invalid():
    with pytest.raises(InputError):
        check_density(np.eye(9))  # trace 9
    bad = maximally_mixed().copy()
    bad[0, 0] = -0.05
    bad[1, 1] = 2 / 9 + 0.05  # unit trace, Hermitian
    with pytest.raises(InputError):
        check_density(bad)  # negative eigenvalue
    with pytest.raises(InputError):
        check_density(np.eye(3) / 3)


def test_ket_validation():
    with pytest.raises(InputError):
        projector(np.ones(9))
    with pytest.raises(InputError):
        normalize(np.zeros(9))
    with pytest.raises(InputError):
        normalize(np.ones(8))


def test_json_round_trip(rng):
    psi = random_ket(rng)
    obj = ket_to_json(psi)
    validate(obj, load_schema("state"))
    assert np.allclose(state_from_json(obj), projector(psi), atol=1e-15)

    rho = mixed_family("rho4", 0.6, 0.3)
    obj = density_to_json(rho)
    validate(obj, load_schema("state"))
    assert np.allclose(state_from_json(obj), rho, atol=1e-15)
    with pytest.raises(InputError):
        state_from_json({"type": "mystery"})
