"""Test whether a three-outcome inequality collapses to a two-outcome one when
two outcomes are merged.

Merging outcomes {x, y} (singleton s) is possible only if, for every setting
pair (i, j), the coefficient block is constant on each cell of the induced
2x2 partition: (s, s) trivially, (s, {x,y}), ({x,y}, s) and ({x,y}, {x,y}).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .inequalities import INDEX_TO_LABEL

GROUPINGS = (frozenset({1, 2}), frozenset({0, 1}), frozenset({0, 2}))
REAL_TOL = 1e-12


@dataclass(frozen=True)
class Obstruction:
    setting_pair: tuple   # (i, j), 1-based
    cell: str             # e.g. "(+, {0,-})"
    entries: tuple        # ((k, l), coefficient) pairs that should agree

    def describe(self):
        i, j = self.setting_pair
        vals = ", ".join(f"p(a{i}={INDEX_TO_LABEL[k]}, b{j}={INDEX_TO_LABEL[l]}): {c:g}"
                         for (k, l), c in self.entries)
        return f"a{i}/b{j} cell {self.cell}: coefficients differ [{vals}]"


@dataclass(frozen=True)
class GroupingReport:
    grouping: frozenset
    obstructions: tuple = field(default_factory=tuple)

    @property
    def reducible(self):
        return not self.obstructions

    def grouping_label(self):
        return "{" + ",".join(INDEX_TO_LABEL[k] for k in sorted(self.grouping)) + "}"

    def to_json(self):
        return {
            "grouping": [INDEX_TO_LABEL[k] for k in sorted(self.grouping)],
            "reducible": self.reducible,
            "obstructions": [
                {"setting_pair": list(o.setting_pair), "cell": o.cell,
                 "entries": [{"a": INDEX_TO_LABEL[k], "b": INDEX_TO_LABEL[l], "coefficient": c}
                             for (k, l), c in o.entries]}
                for o in self.obstructions
            ],
        }

    def to_text(self):
        head = f"grouping {self.grouping_label()}: {'reducible' if self.reducible else 'NOT reducible'}"
        return "\n".join([head] + [f"  * {o.describe()}" for o in self.obstructions])


def parse_grouping(labels):
    """Grouping from outcome labels ('+', '0', '-') or indices."""
    idx = set()
    for x in labels:
        if isinstance(x, str):
            key = {"+": 0, "+1": 0, "0": 1, "-": 2, "-1": 2, "−": 2}.get(x.strip())
            if key is None:
                raise InputError(f"unknown outcome label {x!r}")
            idx.add(key)
        else:
            idx.add(int(x))
    if len(idx) != 2 or not idx <= {0, 1, 2}:
        raise InputError(f"a grouping is two distinct outcomes, got {labels!r}")
    return frozenset(idx)


def _is_integral(coeffs):
    return bool(np.all(coeffs == np.round(coeffs)))


def check_grouping(spec, grouping):
    grouping = parse_grouping(grouping)
    (s,) = {0, 1, 2} - grouping
    g = sorted(grouping)
    tol = 0.0 if _is_integral(spec.coeffs) else REAL_TOL
    name = "{" + ",".join(INDEX_TO_LABEL[k] for k in g) + "}"
    single = INDEX_TO_LABEL[s]
    cells = (
        (f"({single}, {name})", [(s, l) for l in g]),
        (f"({name}, {single})", [(k, s) for k in g]),
        (f"({name}, {name})", [(k, l) for k in g for l in g]),
    )
    found = []
    for i in range(2):
        for j in range(2):
            block = spec.coeffs[i, j]
            for cell, members in cells:
                vals = [float(block[k, l]) for k, l in members]
                if max(vals) - min(vals) > tol:
                    found.append(Obstruction((i + 1, j + 1), cell, tuple(zip(members, vals))))
    return GroupingReport(grouping, tuple(found))


def is_chsh_reducible(spec):
    reports = [check_grouping(spec, g) for g in GROUPINGS]
    return any(r.reducible for r in reports), reports


def two_outcome_form(singleton, q, r, s, t):
    """Coefficient tensor of the merged two-outcome form for the given singleton outcome.

    q, r, s, t are 2x2 arrays of coefficients for the (m1, m1), (m1, rest),
    (rest, m1) and (rest, rest) cells.
    """
    rest = [k for k in range(3) if k != singleton]
    c = np.zeros((2, 2, 3, 3))
    for i in range(2):
        for j in range(2):
            c[i, j, singleton, singleton] = q[i][j]
            for x in rest:
                c[i, j, singleton, x] = r[i][j]
                c[i, j, x, singleton] = s[i][j]
                for y in rest:
                    c[i, j, x, y] = t[i][j]
    return c
