"""Threshold visibilities under white noise.

At fixed settings the left-hand side for p|psi><psi| + (1-p) I/9 is affine in
p, so the threshold solves p L_pure + (1-p) L_noise = bound.  The closed form
is cross-checked by bisection on the directly evaluated mixture.
"""

from dataclasses import dataclass

from .errors import NumericalError
from .inequalities import evaluate
from .measurements import joint_prob_table, uniform_table
from .optimizer import OptConfig, global_max_violation
from .states import noisy

BISECTION_TOL = 1e-9
AGREEMENT_TOL = 1e-8
VIOLATION_TOL = 1e-9  # values this close to the bound count as no violation


@dataclass(frozen=True)
class ThresholdResult:
    p_star: object  # float, or None when the pure state does not violate
    pure_value: float
    noise_value: float
    bound: float
    label: str
    method: str
    bisection_p: object = None

    @property
    def violated(self):
        return self.p_star is not None

    def to_json(self):
        return {
            "label": self.label,
            "p_star": self.p_star if self.violated else "no violation",
            "pure_value": self.pure_value,
            "noise_value": self.noise_value,
            "bound": self.bound,
            "method": self.method,
            "bisection_p": self.bisection_p,
        }


def affine_threshold(pure_value, noise_value, bound):
    if pure_value <= bound + VIOLATION_TOL:
        return None
    denom = pure_value - noise_value
    if abs(denom) < 1e-12:
        raise NumericalError("pure and noise values coincide; threshold undefined")
    return (bound - noise_value) / denom


def _bisect(f, lo, hi, tol):
    # f(lo) <= 0 < f(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def threshold_visibility(spec, pure, settings):
    """Smallest visibility p at which ``spec`` is still violated at the given settings.

    ``settings`` should be (near-)optimal for ``pure``; the caller supplies them.
    """
    pure_value = evaluate(spec, joint_prob_table(noisy(pure, 1.0), settings))
    noise_value = evaluate(spec, uniform_table())
    p_star = affine_threshold(pure_value, noise_value, spec.bound)
    if p_star is None:
        return ThresholdResult(None, pure_value, noise_value, spec.bound, spec.label, "affine")
    if noise_value > spec.bound:
        # noise alone violates, hence so does every mixture; not possible for genuine local bounds
        return ThresholdResult(0.0, pure_value, noise_value, spec.bound, spec.label, "affine")

    def excess(p):
        return evaluate(spec, joint_prob_table(noisy(pure, p), settings)) - spec.bound

    p_bis = _bisect(excess, 0.0, 1.0, BISECTION_TOL)
    if abs(p_bis - p_star) > AGREEMENT_TOL:
        raise NumericalError(f"affine threshold {p_star!r} and bisection {p_bis!r} disagree")
    return ThresholdResult(p_star, pure_value, noise_value, spec.bound, spec.label, "affine", p_bis)


def threshold_at_global_max(spec, kind, config=None):
    """Threshold for the state that maximizes the violation (top Bell-operator eigenvector)."""
    res, top = global_max_violation(spec, kind, config or OptConfig())
    return threshold_visibility(spec, top.state, res.best_settings), res, top


def format_threshold_table(title, rows, columns):
    """Plain-text table: ``rows`` maps a state name to {column: ThresholdResult}."""
    width = max(len(c) for c in columns) + 2
    lines = [title, "State".ljust(12) + "".join(c.rjust(width) for c in columns)]
    for name, cells in rows.items():
        out = []
        for col in columns:
            r = cells[col]
            out.append(("%.3f" % r.p_star if r.violated else "---").rjust(width))
        lines.append(name.ljust(12) + "".join(out))
    return "\n".join(lines)
