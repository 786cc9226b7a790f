"""Bell-type inequalities for two parties, two settings and three outcomes.

An inequality is a coefficient tensor ``coeffs[i, j, k, l]`` (same layout as a
joint probability table) with classical bound ``bound``: the local-realist
claim is ``sum(coeffs * table) <= bound``.

Outcome labels +1, 0, -1 map to indices 0, 1, 2.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .measurements import deterministic_table

PLUS, ZERO, MINUS = 0, 1, 2
LABEL_TO_INDEX = {"+": PLUS, "0": ZERO, "-": MINUS, "+1": PLUS, "-1": MINUS, "−": MINUS, "−1": MINUS}
INDEX_TO_LABEL = ("+", "0", "-")

# the six orderings (m1, m2, m3) of the outcome labels, in the order they are usually listed
PERMUTATIONS = ((PLUS, ZERO, MINUS), (PLUS, MINUS, ZERO), (ZERO, PLUS, MINUS),
                (ZERO, MINUS, PLUS), (MINUS, PLUS, ZERO), (MINUS, ZERO, PLUS))
INTERCHANGES = ("id", "sa", "sb", "sab")

HEADLINE_LABEL = "GWI-B-(0,-,+)-id"


@dataclass(frozen=True)
class InequalitySpec:
    coeffs: np.ndarray = field(repr=False)
    bound: float
    label: str

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (2, 2, 3, 3):
            raise InputError(f"coefficient tensor must have shape (2, 2, 3, 3), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InputError("coefficient tensor has non-finite entries")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "bound", float(self.bound))

    @property
    def coefficient_sum(self):
        return float(self.coeffs.sum())

    def to_json(self):
        return {"label": self.label, "bound": self.bound, "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(np.asarray(obj["coeffs"], dtype=float), obj["bound"], obj["label"])
        except KeyError as exc:
            raise InputError(f"inequality JSON is missing {exc}") from None


@dataclass(frozen=True)
class LhvCertificate:
    max_value: float
    argmax_strategy: tuple


def _term(c, sign, a_setting, a_out, b_setting, b_out):
    c[a_setting - 1, b_setting - 1, a_out, b_out] += sign


def _template_a(m1, m2, m3):
    # p(a1=m1,b1=m2) - p(a2=m1,b1=m2) - p(a2=m1,b1=m1) - p(a1=m1,b2=m2)
    # - p(a1=m1,b2=m1) - p(a2=m3,b2=m3) - p(a2=m2,b2=m3) + p(a1=m1,b1=m1)
    c = np.zeros((2, 2, 3, 3))
    _term(c, +1, 1, m1, 1, m2)
    _term(c, -1, 2, m1, 1, m2)
    _term(c, -1, 2, m1, 1, m1)
    _term(c, -1, 1, m1, 2, m2)
    _term(c, -1, 1, m1, 2, m1)
    _term(c, -1, 2, m3, 2, m3)
    _term(c, -1, 2, m2, 2, m3)
    _term(c, +1, 1, m1, 1, m1)
    return c


def _template_b(m1, m2, m3):
    # p(a1=m1,b1=m2) - p(a2=m1,b1=m2) - p(a2=m2,b1=m2) - p(a1=m1,b2=m2)
    # - p(a1=m2,b2=m2) - p(a2=m3,b2=m3) - p(a2=m3,b2=m1) + p(a1=m2,b1=m2)
    c = np.zeros((2, 2, 3, 3))
    _term(c, +1, 1, m1, 1, m2)
    _term(c, -1, 2, m1, 1, m2)
    _term(c, -1, 2, m2, 1, m2)
    _term(c, -1, 1, m1, 2, m2)
    _term(c, -1, 1, m2, 2, m2)
    _term(c, -1, 2, m3, 2, m3)
    _term(c, -1, 2, m3, 2, m1)
    _term(c, +1, 1, m2, 1, m2)
    return c


_TEMPLATES = {"A": _template_a, "B": _template_b}


def _interchange(c, how):
    if how == "id":
        return c
    if how == "sa":
        return c[::-1, :, :, :]
    if how == "sb":
        return c[:, ::-1, :, :]
    if how == "sab":
        return c[::-1, ::-1, :, :]
    raise InputError(f"unknown interchange {how!r}")


def gwi_label(template, perm, how):
    return f"GWI-{template}-({','.join(INDEX_TO_LABEL[m] for m in perm)})-{how}"


def gwi(template, perm, how="id"):
    """One generalized Wigner inequality: template "A" or "B", outcome ordering
    ``perm`` = (m1, m2, m3) as indices, and setting interchange ``how``."""
    if template not in _TEMPLATES:
        raise InputError(f"unknown GWI template {template!r}")
    perm = tuple(perm)
    if sorted(perm) != [0, 1, 2]:
        raise InputError(f"{perm} is not a permutation of the outcomes")
    coeffs = _interchange(_TEMPLATES[template](*perm), how)
    return InequalitySpec(np.ascontiguousarray(coeffs), 0.0, gwi_label(template, perm, how))


def enumerate_gwi():
    """All 2 templates x 6 outcome orderings x 4 setting interchanges = 48 GWIs (no deduplication)."""
    return [gwi(t, perm, how) for how in INTERCHANGES for t in ("A", "B") for perm in PERMUTATIONS]


def gwi_headline():
    """The headline GWI, written out term by term:

    p(a1 0, b1 -) - p(a2 0, b1 -) - p(a2 -, b1 -) - p(a1 0, b2 -) - p(a1 -, b2 -)
    - p(a2 +, b2 +) - p(a2 +, b2 0) + p(a1 -, b1 -) <= 0
    """
    c = np.zeros((2, 2, 3, 3))
    _term(c, +1, 1, ZERO, 1, MINUS)
    _term(c, -1, 2, ZERO, 1, MINUS)
    _term(c, -1, 2, MINUS, 1, MINUS)
    _term(c, -1, 1, ZERO, 2, MINUS)
    _term(c, -1, 1, MINUS, 2, MINUS)
    _term(c, -1, 2, PLUS, 2, PLUS)
    _term(c, -1, 2, PLUS, 2, ZERO)
    _term(c, +1, 1, MINUS, 1, MINUS)
    return InequalitySpec(c, 0.0, HEADLINE_LABEL)


def _difference_prob(c, sign, i, j, k):
    # adds sign * P(a^i = b^j + k mod 3)
    for b in range(3):
        c[i - 1, j - 1, (b + k) % 3, b] += sign


def cglmp():
    """CGLMP for d = 3 with outcome digit = table index; classical bound 2.

    I3 = P(a1=b1) + P(b1=a2+1) + P(a2=b2) + P(b2=a1)
       - P(a1=b1-1) - P(b1=a2) - P(a2=b2-1) - P(b2=a1-1)
    """
    c = np.zeros((2, 2, 3, 3))
    _difference_prob(c, +1, 1, 1, 0)
    _difference_prob(c, +1, 2, 1, -1)   # b1 = a2 + 1  <=>  a2 = b1 - 1
    _difference_prob(c, +1, 2, 2, 0)
    _difference_prob(c, +1, 1, 2, 0)
    _difference_prob(c, -1, 1, 1, -1)
    _difference_prob(c, -1, 2, 1, 0)
    _difference_prob(c, -1, 2, 2, -1)
    _difference_prob(c, -1, 1, 2, +1)   # b2 = a1 - 1  <=>  a1 = b2 + 1
    return InequalitySpec(c, 2.0, "CGLMP")


def wu():
    """S = P(a1+,b1+) - P(a1+,b2+) + P(a2+,b2+) + P(a2 0,b1 0) + P(a2 0,b1 -)
    + P(a2 -,b1 0) + P(a2 -,b1 -) <= 1."""
    c = np.zeros((2, 2, 3, 3))
    _term(c, +1, 1, PLUS, 1, PLUS)
    _term(c, -1, 1, PLUS, 2, PLUS)
    _term(c, +1, 2, PLUS, 2, PLUS)
    for a in (ZERO, MINUS):
        for b in (ZERO, MINUS):
            _term(c, +1, 2, a, 1, b)
    return InequalitySpec(c, 1.0, "WU")


def by_name(name):
    """Resolve ``gwi-eq3`` (alias ``gwi-headline``), ``cglmp``, ``wu`` or ``gwi:<label>``."""
    if name in ("gwi-eq3", "gwi-headline"):
        return gwi_headline()
    if name == "cglmp":
        return cglmp()
    if name == "wu":
        return wu()
    if name.startswith("gwi:"):
        label = name[4:]
        for spec in enumerate_gwi():
            if spec.label == label:
                return spec
        raise InputError(f"no GWI labelled {label!r} (see enumerate-gwi)")
    raise InputError(f"unknown inequality {name!r}")


def evaluate(spec, table):
    table = np.asarray(table, dtype=float)
    if table.shape != spec.coeffs.shape:
        raise InputError(f"table shape {table.shape} does not match {spec.coeffs.shape}")
    return float(np.sum(spec.coeffs * table))


def violation(spec, table):
    return evaluate(spec, table) - spec.bound


def lhv_max(spec):
    """Exact classical maximum over the 81 local deterministic strategies.

    Strategies are visited in lexicographic order of (a1, a2, b1, b2) and only a
    strictly larger value replaces the incumbent, so ties keep the smallest.
    """
    best_value, best = -np.inf, None
    for strategy in itertools.product(range(3), repeat=4):
        value = evaluate(spec, deterministic_table(strategy))
        if value > best_value:
            best_value, best = value, strategy
    return LhvCertificate(best_value, best)
