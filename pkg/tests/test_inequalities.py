import re

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from jsonschema import validate

from gwiqutrit.errors import InputError
from gwiqutrit.inequalities import (
    HEADLINE_LABEL, INTERCHANGES, PERMUTATIONS, InequalitySpec, by_name, cglmp, enumerate_gwi, evaluate, gwi,
    gwi_headline, lhv_max, violation, wu,
)
from gwiqutrit.measurements import KINDS, ScenarioSettings, deterministic_table, joint_prob_table
from gwiqutrit.schema import load_schema
from gwiqutrit.states import normalize, projector

GWIS = enumerate_gwi()
OUT = {"+": 0, "0": 1, "-": 2}

# the headline GWI as plain text, parsed independently of the library
HEADLINE = ("p(a1 0, b1 -) - p(a2 0, b1 -) - p(a2 -, b1 -) - p(a1 0, b2 -) - p(a1 -, b2 -)"
            " - p(a2 +, b2 +) - p(a2 +, b2 0) + p(a1 -, b1 -)")


def parse_terms(text):
    c = np.zeros((2, 2, 3, 3))
    for sign, i, a, j, b in re.findall(r"([+-]?)\s*p\(a(\d) ([+0-]), b(\d) ([+0-])\)", text):
        c[int(i) - 1, int(j) - 1, OUT[a], OUT[b]] += -1 if sign == "-" else 1
    return c


def cglmp_direct(t):
    """I3 from its definition with P(a^i = b^j + k mod 3)."""
    def p(i, j, k):
        return sum(t[i - 1, j - 1, a, b] for a in range(3) for b in range(3) if (a - b - k) % 3 == 0)
    return (p(1, 1, 0) + p(2, 1, -1) + p(2, 2, 0) + p(1, 2, 0)
            - p(1, 1, -1) - p(2, 1, 0) - p(2, 2, -1) - p(1, 2, 1))


def random_table(rng):
    t = rng.random((2, 2, 3, 3))
    return t / t.sum(axis=(2, 3), keepdims=True)


def test_forty_eight_distinct_gwis():
    assert len(GWIS) == 48
    assert len({s.label for s in GWIS}) == 48
    assert len({s.coeffs.tobytes() for s in GWIS}) == 48
    assert len(PERMUTATIONS) == 6 and len(INTERCHANGES) == 4


def test_gwi_shape():
    for s in GWIS:
        assert s.bound == 0
        assert s.coefficient_sum == -4
        assert np.count_nonzero(s.coeffs) == 8
        assert set(np.unique(s.coeffs)) <= {-1.0, 0.0, 1.0}


def test_headline_matches_text_and_enumeration():
    spec = gwi_headline()
    assert np.array_equal(spec.coeffs, parse_terms(HEADLINE))
    assert spec.label == HEADLINE_LABEL
    (match,) = [s for s in GWIS if np.array_equal(s.coeffs, spec.coeffs)]
    assert match.label == HEADLINE_LABEL


def test_template_a_identity_form():
    # template A with (m1, m2, m3) = (+, 0, -)
    text = ("p(a1 +, b1 0) - p(a2 +, b1 0) - p(a2 +, b1 +) - p(a1 +, b2 0) - p(a1 +, b2 +)"
            " - p(a2 -, b2 -) - p(a2 0, b2 -) + p(a1 +, b1 +)")
    spec = gwi("A", (0, 1, 2))
    assert spec.label == "GWI-A-(+,0,-)-id"
    assert np.array_equal(spec.coeffs, parse_terms(text))


def test_template_b_reproduces_headline():
    # template B with (m1, m2, m3) = (0, -, +) is term-for-term the headline form
    assert np.array_equal(gwi("B", (1, 2, 0)).coeffs, parse_terms(HEADLINE))


def test_interchange_swaps_setting_labels():
    base = gwi("A", (2, 0, 1))
    assert np.array_equal(gwi("A", (2, 0, 1), "sa").coeffs, base.coeffs[::-1])
    assert np.array_equal(gwi("A", (2, 0, 1), "sab").coeffs, base.coeffs[::-1, ::-1])
    with pytest.raises(InputError):
        gwi("A", (0, 0, 1))
    with pytest.raises(InputError):
        gwi("C", (0, 1, 2))


def test_cglmp_matches_definition(rng):
    spec = cglmp()
    assert spec.bound == 2
    for _ in range(200):
        t = random_table(rng)
        assert abs(evaluate(spec, t) - cglmp_direct(t)) < 1e-12


def test_lhv_maxima():
    for s in GWIS:
        cert = lhv_max(s)
        assert cert.max_value == 0
    assert lhv_max(cglmp()).max_value == 2
    assert lhv_max(wu()).max_value == 1


def test_lhv_argmax_is_attained():
    for spec in (gwi_headline(), cglmp(), wu()):
        cert = lhv_max(spec)
        assert evaluate(spec, deterministic_table(cert.argmax_strategy)) == cert.max_value


def test_shipped_bounds_hold_classically():
    for spec in (*GWIS, cglmp(), wu()):
        assert lhv_max(spec).max_value <= spec.bound


@settings(max_examples=1000)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1))
def test_evaluate_is_linear(seed, alpha):
    rng = np.random.default_rng(seed)
    spec = GWIS[seed % 48] if seed % 3 else cglmp()
    t1, t2 = random_table(rng), random_table(rng)
    lhs = evaluate(spec, alpha * t1 + (1 - alpha) * t2)
    rhs = alpha * evaluate(spec, t1) + (1 - alpha) * evaluate(spec, t2)
    assert abs(lhs - rhs) < 1e-12


def _random_qutrit(rng):
    return rng.normal(size=3) + 1j * rng.normal(size=3)


@settings(max_examples=1000)
@given(st.integers(0, 2**32 - 1))
def test_product_states_respect_gwi_bound(seed):
    rng = np.random.default_rng(seed)
    spec = GWIS[seed % 48]
    kind = KINDS[(seed // 48) % 2]
    psi = normalize(np.kron(_random_qutrit(rng), _random_qutrit(rng)))
    s = ScenarioSettings.from_vector(kind, rng.uniform(0, 7, 12 if kind == "sixport" else 8))
    assert evaluate(spec, joint_prob_table(projector(psi), s)) <= spec.bound + 1e-10


def test_violation_is_offset():
    t = np.full((2, 2, 3, 3), 1 / 9)
    assert violation(cglmp(), t) == evaluate(cglmp(), t) - 2
    assert np.isclose(evaluate(gwi_headline(), t), -4 / 9)


def test_by_name():
    assert by_name("gwi-eq3").label == HEADLINE_LABEL
    assert by_name("cglmp").label == "CGLMP"
    assert by_name("wu").bound == 1
    assert by_name("gwi:GWI-A-(+,0,-)-sab").label == "GWI-A-(+,0,-)-sab"
    for bad in ("gwi:nonsense", "chsh"):
        with pytest.raises(InputError):
            by_name(bad)


def test_spec_validation_and_json():
    with pytest.raises(InputError):
        InequalitySpec(np.zeros((2, 3, 3)), 0, "bad")
    with pytest.raises(InputError):
        InequalitySpec(np.full((2, 2, 3, 3), np.nan), 0, "bad")
    spec = cglmp()
    with pytest.raises(ValueError):
        spec.coeffs[0, 0, 0, 0] = 5
    obj = spec.to_json()
    validate(obj, load_schema("inequality"))
    back = InequalitySpec.from_json(obj)
    assert np.array_equal(back.coeffs, spec.coeffs) and back.bound == 2
    with pytest.raises(InputError):
        InequalitySpec.from_json({"bound": 0})
    with pytest.raises(InputError):
        evaluate(spec, np.zeros((2, 2, 3)))
