"""Multi-start Nelder-Mead maximization of Bell-inequality values over measurement settings.

Each restart draws its D+1 initial simplex vertices uniformly from the box
domain.  Restart ``r`` uses its own Philox stream keyed by
``SeedSequence(rng_seed, spawn_key=(r,))``, so results do not depend on how
many restarts run or in which order.  Seeded restarts (known good settings,
warm starts) run first and carry the lowest restart indices.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .belloperator import BellMaximum, bell_matrix_from_bases, max_violation_state
from .errors import InputError, NumericalError
from .inequalities import evaluate
from .measurements import TWO_PI, ScenarioSettings, bases_from_vector, joint_prob_table, pure_components
from .states import check_density

DEFAULT_SEED = 20180101

# Reference optimal settings (angles quoted to two decimals) that land in the
# optimal basin under this package's outcome conventions; the CLI uses them
# as seeded restarts.
REFERENCE_SETTINGS = {
    ("gwi-eq3", "sixport", "isotropic"): (4.62, 3.02, 3.93, 2.46, 1.80, 0.81, 0.43, 4.80, 4.64, 4.01, 3.04, 0.98),
    ("gwi-eq3", "spin", "isotropic"): (1.52, 3.88, 2.60, 3.84, 0.03, 0.76, 1.08, 5.56),
    ("gwi-eq3", "spin", "singlet"): (1.09, 0.05, 0.02, 0.01, 0.52, 3.19, 0.56, 0.05),
    ("cglmp", "spin", "isotropic"): (0.45, 6.28, 1.35, 6.28, 0.0, 1.07, 0.90, 6.28),
    ("cglmp", "spin", "singlet"): (0.78, 5.72, 0.88, 4.47, 2.12, 3.08, 2.41, 1.92),
}


@dataclass(frozen=True)
class OptConfig:
    restarts: int = 200
    max_iterations: int = 2000
    tol: float = 1e-10
    rng_seed: int = DEFAULT_SEED
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    tie_tol: float = 1e-9
    seed_step: float = 0.1
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 0:
            raise InputError("restarts must be non-negative")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")
        if self.tol <= 0 or self.tie_tol < 0 or self.seed_step <= 0:
            raise InputError("tolerances and the seed step must be positive")
        if not (self.reflection > 0 and self.expansion > 1 and 0 < self.contraction < 1 and 0 < self.shrink < 1):
            raise InputError("invalid Nelder-Mead coefficients")
        if self.workers < 1:
            raise InputError("workers must be >= 1")

    def replace(self, **changes):
        return OptConfig(**{**asdict(self), **changes})

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown OptConfig fields: {sorted(unknown)}")
        return cls(**obj)


@dataclass
class OptResult:
    best_value: float
    best_point: np.ndarray
    restart_index: int
    evaluations: int
    history: list = field(default_factory=list)
    aborted: list = field(default_factory=list)
    best_settings: ScenarioSettings = None

    def to_json(self):
        return {
            "best_value": self.best_value,
            "best_point": [float(v) for v in self.best_point],
            "best_settings": self.best_settings.to_json() if self.best_settings is not None else None,
            "restart_index": self.restart_index,
            "evaluations": self.evaluations,
            "history": self.history,
            "aborted": self.aborted,
        }


class NonFiniteObjective(Exception):
    pass


def _simplex_search(fun, simplex, cfg):
    """Minimize ``fun`` from the given (D+1, D) simplex.  Returns (fmin, xmin, evaluations)."""
    s = np.array(simplex, dtype=float)
    n = s.shape[1]
    evals = 0

    def f(x):
        nonlocal evals
        evals += 1
        v = fun(x)
        if not math.isfinite(v):
            raise NonFiniteObjective(v)
        return v

    fv = np.array([f(p) for p in s])
    for _ in range(cfg.max_iterations):
        order = np.argsort(fv, kind="stable")
        s, fv = s[order], fv[order]
        if fv[-1] - fv[0] < cfg.tol:
            break
        centroid = s[:-1].mean(axis=0)
        worst = s[-1]
        xr = centroid + cfg.reflection * (centroid - worst)
        fr = f(xr)
        if fr < fv[0]:
            xe = centroid + cfg.expansion * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                s[-1], fv[-1] = xe, fe
            else:
                s[-1], fv[-1] = xr, fr
        elif fr < fv[-2]:
            s[-1], fv[-1] = xr, fr
        else:
            if fr < fv[-1]:
                xc = centroid + cfg.contraction * (xr - centroid)
            else:
                xc = centroid + cfg.contraction * (worst - centroid)
            fc = f(xc)
            if fc < min(fr, fv[-1]):
                s[-1], fv[-1] = xc, fc
            else:
                s[1:] = s[0] + cfg.shrink * (s[1:] - s[0])
                fv[1:] = [f(p) for p in s[1:]]
    k = int(np.argmin(fv))
    return float(fv[k]), s[k].copy(), evals


def _initial_simplex(r, n_seeded, seeds, lower, upper, cfg):
    d = len(lower)
    if r < n_seeded:
        x0 = np.asarray(seeds[r], dtype=float)
        return np.vstack([x0, x0 + cfg.seed_step * np.eye(d)])
    key = np.random.SeedSequence(cfg.rng_seed, spawn_key=(r - n_seeded,))
    rng = np.random.Generator(np.random.Philox(key))
    return lower + (upper - lower) * rng.random((d + 1, d))


def _run_restart(args):
    objective, r, n_seeded, seeds, lower, upper, cfg = args
    simplex = _initial_simplex(r, n_seeded, seeds, lower, upper, cfg)
    try:
        fmin, x, evals = _simplex_search(lambda p: -objective(p), simplex, cfg)
    except NonFiniteObjective:
        return r, None, None, 0
    return r, -fmin, x, evals


def nelder_mead(objective, bounds, config=None, seeds=()):
    """Maximize ``objective`` over the box ``bounds`` = [(lo, hi), ...].

    The objective itself must handle points outside the box (wrapping,
    reflection); the box only shapes the random initial simplices.  A restart
    whose objective returns a non-finite value is aborted and listed in
    ``OptResult.aborted``.  The winner is the lowest restart index whose value
    is within ``tie_tol`` of the overall maximum.
    """
    cfg = config or OptConfig()
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim != 2 or bounds.shape[1] != 2 or len(bounds) < 1:
        raise InputError("bounds must be a non-empty list of (lower, upper) pairs")
    if not np.all(np.isfinite(bounds)) or np.any(bounds[:, 1] <= bounds[:, 0]):
        raise InputError("bounds must be finite with lower < upper")
    lower, upper = bounds[:, 0], bounds[:, 1]
    seeds = [np.asarray(s, dtype=float) for s in seeds]
    for s in seeds:
        if s.shape != lower.shape:
            raise InputError(f"seed point has shape {s.shape}, expected {lower.shape}")
    total = len(seeds) + cfg.restarts
    if total == 0:
        raise InputError("nothing to do: no restarts and no seeds")

    jobs = [(objective, r, len(seeds), seeds, lower, upper, cfg) for r in range(total)]
    if cfg.workers > 1 and total > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_restart, jobs))
    else:
        outcomes = [_run_restart(job) for job in jobs]

    history, aborted, evaluations = [], [], 0
    for r, value, _, evals in outcomes:
        evaluations += evals
        if value is None:
            aborted.append(r)
            history.append(None)
        else:
            history.append(value)
    finite = [(r, v, x) for r, v, x, _ in outcomes if v is not None]
    if not finite:
        raise NumericalError("every restart produced a non-finite objective value")
    top = max(v for _, v, _ in finite)
    r, v, x = next(item for item in finite if item[1] >= top - cfg.tie_tol)
    return OptResult(v, x, r, evaluations, history, aborted)


# --- objectives --------------------------------------------------------------

def settings_bounds(kind):
    if kind == "sixport":
        return [(0.0, TWO_PI)] * 12
    if kind == "spin":
        return [(0.0, np.pi), (0.0, TWO_PI)] * 4
    raise InputError(f"unknown observable kind {kind!r}")


def _coeffs66(coeffs):
    # (i, j, k, l) -> (3i+k, 3j+l), the layout of the amplitude matrices
    return np.ascontiguousarray(np.asarray(coeffs).transpose(0, 2, 1, 3).reshape(6, 6))


class ViolationObjective:
    """Inequality value for a fixed state as a function of the flat settings vector.

    Angles outside the domain are harmless: phases are periodic and spin
    directions are computed from (theta, phi) directly.
    """

    def __init__(self, spec, rho, kind):
        self.kind = kind
        self.c66 = _coeffs66(spec.coeffs)
        self.weights, kets = pure_components(check_density(rho, tol=1e-9))
        self.kets = kets

    def __call__(self, x):
        ea, eb = bases_from_vector(self.kind, np.asarray(x))
        a = ea.reshape(6, 3).conj()
        b = eb.reshape(6, 3).conj()
        amps = a @ self.kets @ b.T
        probs = np.tensordot(self.weights, amps.real ** 2 + amps.imag ** 2, axes=1)
        return float(np.sum(self.c66 * probs))


class BellObjective:
    """Largest eigenvalue of the Bell operator as a function of the settings vector."""

    def __init__(self, spec, kind):
        self.kind = kind
        self.coeffs = spec.coeffs

    def __call__(self, x):
        ea, eb = bases_from_vector(self.kind, np.asarray(x))
        return float(np.linalg.eigvalsh(bell_matrix_from_bases(self.coeffs, ea, eb))[-1])


def _seed_vectors(kind, seeds):
    out = []
    for s in seeds:
        out.append(s.vector() if isinstance(s, ScenarioSettings) else np.asarray(s, dtype=float))
    dim = 12 if kind == "sixport" else 8
    for v in out:
        if v.shape != (dim,):
            raise InputError(f"{kind} seed needs {dim} angles")
    return out


def maximize_violation(spec, kind, rho, config=None, seeds=()):
    """Maximize the inequality's left-hand side for state ``rho`` over the settings of ``kind``.

    The reported value is re-evaluated through the trace-based probability
    table at the canonical settings.
    """
    cfg = config or OptConfig()
    objective = ViolationObjective(spec, rho, kind)
    res = nelder_mead(objective, settings_bounds(kind), cfg, _seed_vectors(kind, seeds))
    settings = ScenarioSettings.from_vector(kind, res.best_point)
    check = evaluate(spec, joint_prob_table(rho, settings))
    if abs(check - res.best_value) > 1e-9:
        raise NumericalError(f"optimum not reproducible: {res.best_value!r} vs {check!r}")
    res.best_value = check
    res.best_settings = settings
    return res


def global_max_violation(spec, kind, config=None, seeds=()):
    """Maximize the top Bell-operator eigenvalue over settings; returns (OptResult, BellMaximum)."""
    cfg = config or OptConfig()
    res = nelder_mead(BellObjective(spec, kind), settings_bounds(kind), cfg, _seed_vectors(kind, seeds))
    settings = ScenarioSettings.from_vector(kind, res.best_point)
    top: BellMaximum = max_violation_state(spec, settings)
    if abs(top.lambda_max - res.best_value) > 1e-9:
        raise NumericalError(f"optimum not reproducible: {res.best_value!r} vs {top.lambda_max!r}")
    res.best_value = top.lambda_max
    res.best_settings = settings
    return res, top
