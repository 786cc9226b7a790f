"""Command-line front end: ``gwiqutrit <command> [options]``.

Exit status: 0 on success, 1 on bad input, 2 on numerical failure.
"""

import argparse
import json
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputError, NumericalError
from .inequalities import INDEX_TO_LABEL, InequalitySpec, by_name, cglmp, enumerate_gwi, gwi_headline, lhv_max
from .measurements import KINDS
from .optimizer import DEFAULT_SEED, REFERENCE_SETTINGS, OptConfig, global_max_violation, maximize_violation
from .reducibility import is_chsh_reducible
from .robustness import format_threshold_table, threshold_visibility
from .states import FAMILIES, named_state, projector, state_from_json, to_pairs
from .sweeps import SWEEP_RESTARTS, default_grid, sweep, write_csv, write_json

DIGITS = 5


@dataclass
class RunManifest:
    command: str
    argv: list
    config: dict
    version: str = __version__
    duration_s: float = 0.0
    outputs: list = field(default_factory=list)

    def write(self, path):
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _fmt(x):
    return f"{x:.{DIGITS}f}"


def _resolve_inequality(name):
    if name.startswith("file:"):
        with open(name[5:]) as fh:
            return InequalitySpec.from_json(json.load(fh))
    return by_name(name)


def _resolve_state(name):
    """Return (density matrix, short name or None)."""
    if name.startswith("file:"):
        with open(name[5:]) as fh:
            return state_from_json(json.load(fh)), None
    return projector(named_state(name)), name


def _config(args, restarts_default):
    restarts = args.restarts if args.restarts is not None else restarts_default
    return OptConfig(restarts=restarts, max_iterations=args.max_iterations, tol=args.tol,
                     rng_seed=args.seed, workers=args.workers)


def _reference_seeds(args, state_name):
    if getattr(args, "no_reference_seed", False) or state_name is None:
        return []
    name = "gwi-eq3" if args.inequality == "gwi-headline" else args.inequality
    key = (name, args.observables, state_name)
    return [REFERENCE_SETTINGS[key]] if key in REFERENCE_SETTINGS else []


_DECIMAL = re.compile(r"\d\.\d")


def _tag_tolerances(text, note):
    """Append ``note`` to every line that prints a decimal number without naming its tolerance."""
    out = []
    for line in text.splitlines():
        if _DECIMAL.search(line) and "tol" not in line:
            line = f"{line}  [{note}]"
        out.append(line)
    return "\n".join(out)


def _emit(args, payload, text, note="tol 1e-10"):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(_tag_tolerances(text, note))


def _tol_note(cfg):
    return f"(Nelder-Mead spread tol {cfg.tol:g}, {cfg.restarts} restarts, seed {cfg.rng_seed})"


def _write_outputs(args, stem, payload, cfg, started):
    if not args.out:
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{stem}.json"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
    manifest = RunManifest(args.command, list(args.argv), cfg.to_json() if cfg else {},
                           duration_s=time.time() - started, outputs=[str(path)])
    manifest.write(out / f"{stem}.manifest.json")


# --- commands -------------------------------------------------------------------

def cmd_optimize(args):
    started = time.time()
    spec = _resolve_inequality(args.inequality)
    rho, state_name = _resolve_state(args.state)
    cfg = _config(args, OptConfig.restarts)
    res = maximize_violation(spec, args.observables, rho, cfg, seeds=_reference_seeds(args, state_name))
    payload = {"inequality": spec.label, "observables": args.observables, "state": args.state,
               "violation": res.best_value - spec.bound, "config": cfg.to_json(), **res.to_json()}
    angles = ", ".join(f"{v:.4f}" for v in res.best_settings.vector())
    text = "\n".join([
        f"inequality {spec.label}, {args.observables}, state {args.state}",
        f"max LHS    {_fmt(res.best_value)}  {_tol_note(cfg)}",
        f"violation  {_fmt(res.best_value - spec.bound)}  (bound {spec.bound:g})",
        f"settings   ({angles}) rad",
    ])
    _emit(args, payload, text, "re-evaluation tol 1e-09")
    _write_outputs(args, "optimize", payload, cfg, started)


def cmd_threshold(args):
    started = time.time()
    spec = _resolve_inequality(args.inequality)
    rho, state_name = _resolve_state(args.state)
    if state_name is None:
        raise InputError("threshold needs a pure state (isotropic or singlet)")
    cfg = _config(args, OptConfig.restarts)
    res = maximize_violation(spec, args.observables, rho, cfg, seeds=_reference_seeds(args, state_name))
    thr = threshold_visibility(spec, named_state(state_name), res.best_settings)
    payload = {"inequality": spec.label, "observables": args.observables, "state": args.state,
               "config": cfg.to_json(), "settings": res.best_settings.to_json(), **thr.to_json()}
    p_text = _fmt(thr.p_star) if thr.violated else "no violation"
    text = "\n".join([
        f"{args.state:<10} {spec.label:<18} {args.observables:<8} "
        f"L_pure {_fmt(thr.pure_value)}  L_noise {_fmt(thr.noise_value)}  p* {p_text}",
        f"  tolerances: affine solve vs bisection agree within 1e-08; {_tol_note(cfg)}",
    ])
    _emit(args, payload, text, "affine/bisection tol 1e-08")
    _write_outputs(args, "threshold", payload, cfg, started)


def cmd_global_max(args):
    started = time.time()
    spec = _resolve_inequality(args.inequality)
    cfg = _config(args, 60)
    res, top = global_max_violation(spec, args.observables, cfg)
    thr = threshold_visibility(spec, top.state, res.best_settings)
    payload = {**top.to_json(), "threshold": thr.to_json(), "config": cfg.to_json()}
    amps = "\n".join(f"  |{i // 3}{i % 3}>  {z.real:+.5f} {z.imag:+.5f}i" for i, z in enumerate(top.state))
    sv = np.linalg.svd(top.state.reshape(3, 3), compute_uv=False)
    text = "\n".join([
        f"inequality {spec.label}, {args.observables}",
        f"lambda_max {_fmt(top.lambda_max)}  {_tol_note(cfg)}",
        f"violation  {_fmt(top.violation)}",
        f"degenerate {top.degenerate}  (gap tol 1e-09)",
        "optimal state:",
        amps,
        f"Schmidt coefficients  {' '.join(_fmt(s) for s in sv)}",
        f"threshold visibility  {_fmt(thr.p_star) if thr.violated else 'no violation'}  (bisection agreement 1e-08)",
    ])
    _emit(args, payload, text, "eigen residual tol 1e-10")
    _write_outputs(args, "global_max", payload, cfg, started)


def cmd_sweep(args):
    started = time.time()
    if args.family == "rho4" and args.q is None:
        raise InputError("--q is required for rho4")
    cfg = _config(args, SWEEP_RESTARTS)
    series = sweep(args.family, args.observables, args.q, default_grid(args.grid_points), cfg)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    stem = f"sweep_{args.family}" + (f"_q{args.q:g}" if args.family == "rho4" else "") + f"_{args.observables}"
    csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
    write_csv([series], csv_path)
    write_json([series], json_path)
    RunManifest(args.command, list(args.argv), cfg.to_json(), duration_s=time.time() - started,
                outputs=[str(csv_path), str(json_path)]).write(out / f"{stem}.manifest.json")
    if args.format == "json":
        print(json.dumps(series.to_json(), indent=2))
    elif args.format == "csv":
        print(csv_path.read_text(), end="")
    else:
        lines = [f"{stem}: {len(series.points)} points {_tol_note(cfg)}"]
        lines += [f"  p {pt.p:.3f}  w_max {_fmt(pt.w_max)}" for pt in series.points]
        lines.append(f"wrote {csv_path} and {json_path}")
        print(_tag_tolerances("\n".join(lines), f"spread tol {cfg.tol:g}"))


def cmd_lhv_check(args):
    spec = _resolve_inequality(args.inequality)
    cert = lhv_max(spec)
    strategy = dict(zip(("a1", "a2", "b1", "b2"), (INDEX_TO_LABEL[k] for k in cert.argmax_strategy)))
    payload = {"label": spec.label, "bound": spec.bound, "max_value": cert.max_value, "argmax_strategy": strategy}
    text = "\n".join([
        f"{spec.label}: classical maximum {cert.max_value:g} over 81 deterministic strategies (exact, tol 0)",
        f"stated bound {spec.bound:g}; argmax " + " ".join(f"{k}={v}" for k, v in strategy.items()),
    ])
    _emit(args, payload, text)


def cmd_reducibility(args):
    spec = _resolve_inequality(args.inequality)
    reducible, reports = is_chsh_reducible(spec)
    payload = {"label": spec.label, "reducible": reducible, "groupings": [r.to_json() for r in reports]}
    text = "\n".join([f"{spec.label}: {'reducible' if reducible else 'not reducible'} by grouping two outcomes"]
                     + [r.to_text() for r in reports])
    _emit(args, payload, text)


def cmd_enumerate(args):
    specs = enumerate_gwi()
    if args.format == "json":
        print(json.dumps([s.to_json() for s in specs], indent=2))
    else:
        for s in specs:
            print(s.label)


def cmd_tables(args):
    started = time.time()
    cfg = _config(args, OptConfig.restarts)
    payload = {"config": cfg.to_json(), "tables": {}}
    blocks = []
    titles = {"sixport": "Threshold visibilities, six-port beam splitters", "spin": "Threshold visibilities, spin-1 components"}
    for kind in KINDS:
        rows = {}
        for state_name in ("isotropic", "singlet"):
            rows[state_name] = {}
            for ineq, spec in (("gwi-eq3", gwi_headline()), ("cglmp", cglmp())):
                key = (ineq, kind, state_name)
                seeds = [] if args.no_reference_seed or key not in REFERENCE_SETTINGS else [REFERENCE_SETTINGS[key]]
                res = maximize_violation(spec, kind, projector(named_state(state_name)), cfg, seeds=seeds)
                thr = threshold_visibility(spec, named_state(state_name), res.best_settings)
                rows[state_name]["GWI" if ineq == "gwi-eq3" else "CGLMP"] = thr
                payload["tables"].setdefault(kind, []).append(
                    {"state": state_name, "inequality": ineq, "settings": res.best_settings.to_json(), **thr.to_json()})
        blocks.append(format_threshold_table(titles[kind], rows, ["GWI", "CGLMP"]))
    blocks.append(f"threshold visibilities to 3 decimals; affine/bisection agreement 1e-08; {_tol_note(cfg)}")
    _emit(args, payload, "\n\n".join(blocks), "affine/bisection tol 1e-08")
    _write_outputs(args, "tables", payload, cfg, started)


# --- parser -------------------------------------------------------------------------

def _add_opt_flags(p):
    p.add_argument("--restarts", type=int, default=None, help="random restarts")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--max-iterations", type=int, default=OptConfig.max_iterations)
    p.add_argument("--tol", type=float, default=OptConfig.tol)
    p.add_argument("--workers", type=int, default=1)


def _add_common(p, formats=("text", "json")):
    p.add_argument("--format", choices=formats, default="text")


def build_parser():
    parser = _Parser(prog="gwiqutrit", description="Generalized Wigner and CGLMP inequalities for two qutrits.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ineq_help = "gwi-eq3 | gwi:<label> | cglmp | wu | file:<path>"
    for name, func, helptext in (("optimize", cmd_optimize, "maximize an inequality over settings for a state"),
                                 ("threshold", cmd_threshold, "white-noise threshold visibility")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--inequality", default="gwi-eq3", help=ineq_help)
        p.add_argument("--observables", choices=KINDS, default="sixport")
        p.add_argument("--state", default="isotropic", help="isotropic | singlet | file:<path>")
        p.add_argument("--no-reference-seed", action="store_true", help="skip the reference-settings restart")
        p.add_argument("--out", help="directory for JSON result + manifest")
        _add_opt_flags(p)
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("global-max", help="maximal violation over states via the Bell operator")
    p.add_argument("--inequality", default="gwi-eq3", help=ineq_help)
    p.add_argument("--observables", choices=KINDS, default="sixport")
    p.add_argument("--out")
    _add_opt_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_global_max)

    p = sub.add_parser("sweep", help="maximal GWI value along a mixed-state family (CSV + JSON)")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--grid-points", type=int, default=51)
    p.add_argument("--observables", choices=KINDS, default="sixport")
    p.add_argument("--out", default=".")
    _add_opt_flags(p)
    _add_common(p, ("text", "json", "csv"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("lhv-check", help="classical maximum by enumerating deterministic strategies")
    p.add_argument("--inequality", default="gwi-eq3", help=ineq_help)
    _add_common(p)
    p.set_defaults(func=cmd_lhv_check)

    p = sub.add_parser("reducibility", help="outcome-grouping (CHSH reduction) check")
    p.add_argument("--inequality", default="gwi-eq3", help=ineq_help)
    _add_common(p)
    p.set_defaults(func=cmd_reducibility)

    p = sub.add_parser("enumerate-gwi", help="list the 48 GWI labels")
    _add_common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("tables", help="threshold-visibility tables for both observable kinds")
    p.add_argument("--no-reference-seed", action="store_true")
    p.add_argument("--out")
    _add_opt_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
