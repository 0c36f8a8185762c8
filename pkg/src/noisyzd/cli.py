"""Command-line front end.

Every command prints JSON (or CSV for the scans) with floats rounded to
12 significant digits, so repeated runs are byte-identical.

Exit codes: 0 ok, 2 bad arguments, 3 degenerate chain, 4 infeasible
synthesis, 5 degenerate pin, 6 internal consistency failure.
"""

import argparse
import io
import json
import math
import sys

import numpy as np

from . import errors
from .game_model import ExpectedPayoffs, NoiseModel, StagePayoffs, expected_stage_payoffs
from .markov import build_transition_matrix, spectral_gap, stationary_distribution
from .policy import DEFAULT
from .scan import default_chi_grid, scan_extortion, scan_pinning
from .sim_oracle import SimConfig, simulate
from .synthesis import (
    extortion_relation,
    fullcoop_payoffs,
    max_phi,
    pinning_strategy,
    strong_extortion_feasibility,
    weak_extortion_strategy,
)
from .zd_core import determinant_payoffs, fit_linear_relation

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_DEGENERATE_CHAIN = 3
EXIT_INFEASIBLE = 4
EXIT_DEGENERATE_PIN = 5
EXIT_INTERNAL = 6

NOISE_KEYS = ("epsilon", "r", "noise_strength")
# strong-check falls back to these when no payoffs are given
CLASSIC_PAYOFFS = "3,0,5,1"


class UsageError(Exception):
    pass


def _round(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(format(x, ".12g")) if math.isfinite(x) else None
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _emit_json(data, args):
    text = json.dumps(_round(data), indent=2) + "\n"
    _write(text, args)


def _write(text, args):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def load_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


# ---------------------------------------------------------------- parsing


def _game_flags(parser):
    g = parser.add_argument_group("game")
    g.add_argument("--G", type=float, help="temptation increment (u(D,g) = 1 + G)")
    g.add_argument("--L", type=float, help="sucker loss (u(C,b) = -L)")
    g.add_argument("--epsilon", type=float, help="one-sided perception error")
    g.add_argument("--r", type=float, help="two-sided perception error")
    g.add_argument("--noise-strength", dest="noise_strength", type=float,
                   help="epsilon + r, split 2:1 between epsilon and r")
    g.add_argument("--payoffs", help="expected payoffs R,S,T,P (overrides G and L)")
    g.add_argument("--config", help="key=value file; flags override it")
    g.add_argument("--out", help="write output here instead of stdout")
    g.add_argument("--format", choices=("json", "csv"))
    t = parser.add_argument_group("tolerances")
    t.add_argument("--residual-tol", type=float)
    t.add_argument("--oracle-tol", type=float)
    t.add_argument("--feasibility-tol", type=float)
    t.add_argument("--bisection-tol", type=float)


def _strategy_flags(parser, prefix):
    for i in range(1, 5):
        parser.add_argument(f"--{prefix}{i}", type=float)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="noisyzd",
        description="Zero-determinant strategies in repeated PD games with perception noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("payoffs", help="expected stage payoffs")
    _game_flags(p)

    p = sub.add_parser("analyze", help="long-run payoffs of a strategy pair")
    _game_flags(p)
    _strategy_flags(p, "p")
    _strategy_flags(p, "q")
    p.add_argument("--dump-matrix", action="store_true")

    p = sub.add_parser("pin", help="pinning strategy from (p1, p4)")
    _game_flags(p)
    p.add_argument("--p1", type=float)
    p.add_argument("--p4", type=float)

    p = sub.add_parser("pin-scan", help="pinning feasible region on a grid")
    _game_flags(p)
    p.add_argument("--grid", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("extort", help="(chi, Delta) weak-extortion strategy")
    _game_flags(p)
    p.add_argument("--chi", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--phi", type=float, help="defaults to half the largest feasible phi")

    p = sub.add_parser("extort-scan", help="Delta bounds versus chi")
    _game_flags(p)
    p.add_argument("--grid", type=int, help="number of log-spaced chi points")
    p.add_argument("--chi-min", type=float)
    p.add_argument("--chi-max", type=float)
    p.add_argument("--delta-resolution", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("strong-check", help="strong-extortion (Delta = 0) feasibility")
    _game_flags(p)
    p.add_argument("--chi", type=float)

    p = sub.add_parser("simulate", help="Monte Carlo play")
    _game_flags(p)
    _strategy_flags(p, "p")
    _strategy_flags(p, "q")
    p.add_argument("--stages", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--initial", choices=("CC", "CD", "DC", "DD"))
    return parser


DEFAULTS = {
    "grid": None,
    "chi_min": 1.0,
    "chi_max": 20.0,
    "delta_resolution": 400,
    "delta": 0.0,
    "stages": 10**6,
    "seed": 0,
    "initial": "CC",
    "workers": 1,
}


def _merge_config(args):
    config = load_config(args.config) if args.config else {}
    cli_noise = any(getattr(args, k, None) is not None for k in NOISE_KEYS)
    for key, raw in config.items():
        if key == "config" or not hasattr(args, key):
            raise UsageError(f"unknown config key {key!r}")
        if cli_noise and key in NOISE_KEYS:
            continue
        if getattr(args, key) is None:
            setattr(args, key, _coerce(key, raw))
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


_STRING_KEYS = {"payoffs", "initial", "format", "out"}
_INT_KEYS = {"grid", "seed", "stages", "workers", "delta_resolution"}


def _coerce(key, raw):
    if key in _STRING_KEYS:
        return raw
    try:
        return int(raw) if key in _INT_KEYS else float(raw)
    except ValueError as exc:
        raise UsageError(f"config key {key!r}: bad value {raw!r}") from exc


def noise_from_args(args):
    pair = args.epsilon is not None or args.r is not None
    if pair and args.noise_strength is not None:
        raise UsageError("--noise-strength is mutually exclusive with --epsilon/--r")
    if pair:
        if args.epsilon is None or args.r is None:
            raise UsageError("--epsilon and --r must be given together")
        return NoiseModel.from_pair(args.epsilon, args.r)
    if args.noise_strength is None:
        raise UsageError("give either --epsilon and --r, or --noise-strength")
    return NoiseModel.from_strength(args.noise_strength)


def payoffs_from_args(args, noise):
    """Returns ``(stage_payoffs or None, expected)``."""
    if args.payoffs is not None:
        if args.G is not None or args.L is not None:
            raise UsageError("--payoffs is mutually exclusive with --G/--L")
        try:
            values = [float(x) for x in args.payoffs.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad --payoffs {args.payoffs!r}") from exc
        if len(values) != 4:
            raise UsageError("--payoffs needs four values R,S,T,P")
        return None, ExpectedPayoffs(*values)
    if args.G is None or args.L is None:
        raise UsageError("give --G and --L, or --payoffs R,S,T,P")
    stage = StagePayoffs(args.G, args.L)
    return stage, expected_stage_payoffs(stage, noise)


def tolerances_from_args(args):
    return DEFAULT.override(
        residual=args.residual_tol,
        oracle=args.oracle_tol,
        feasibility=args.feasibility_tol,
        bisection=args.bisection_tol,
    )


def _vector(args, prefix):
    values = [getattr(args, f"{prefix}{i}") for i in range(1, 5)]
    if any(v is None for v in values):
        raise UsageError(f"--{prefix}1 .. --{prefix}4 are all required")
    return values


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _noise_dict(noise):
    return {"tau": noise.tau, "epsilon": noise.epsilon, "r": noise.r}


# ---------------------------------------------------------------- commands


def cmd_payoffs(args):
    noise = noise_from_args(args)
    _, e = payoffs_from_args(args, noise)
    _emit_json({**e.as_dict(), "pd_ordering": e.is_pd, **_noise_dict(noise)}, args)


def cmd_analyze(args):
    noise = noise_from_args(args)
    _, e = payoffs_from_args(args, noise)
    tol = tolerances_from_args(args)
    p, q = _vector(args, "p"), _vector(args, "q")
    m = build_transition_matrix(p, q, noise)
    v = stationary_distribution(m, tol.stationary_rank)
    eig_x, eig_y = float(v @ e.u_x), float(v @ e.u_y)
    det_x, det_y = determinant_payoffs(p, q, noise, e, tol.singular)
    relation, residual = fit_linear_relation(p, noise, e)
    report = {
        "s_x_determinant": det_x,
        "s_y_determinant": det_y,
        "s_x_eigenvector": eig_x,
        "s_y_eigenvector": eig_y,
        "discrepancy": max(abs(det_x - eig_x), abs(det_y - eig_y)),
        "spectral_gap": spectral_gap(m),
        "stationary": v,
        "relation_alpha": relation.alpha if relation else None,
        "relation_beta": relation.beta if relation else None,
        "relation_gamma": relation.gamma if relation else None,
        "relation_residual": residual,
        "relation_enforced": relation is not None and residual <= tol.residual,
    }
    if args.dump_matrix:
        report["matrix"] = m
    _emit_json(report, args)


def cmd_pin(args):
    noise = noise_from_args(args)
    _, e = payoffs_from_args(args, noise)
    _require(args, "p1", "p4")
    sol = pinning_strategy(args.p1, args.p4, noise, e, tolerances_from_args(args))
    _emit_json(sol.as_dict(), args)


def cmd_pin_scan(args):
    noise = noise_from_args(args)
    _, e = payoffs_from_args(args, noise)
    result = scan_pinning(noise, e, args.grid or 200, tolerances_from_args(args), args.workers)
    if (args.format or "csv") == "csv":
        buf = io.StringIO()
        result.write_csv(buf)
        _write(buf.getvalue(), args)
    else:
        _emit_json({
            **result.summary(),
            "cells": [
                {"p1": c.p1, "p4": c.p4, "feasible": c.feasible, "p2": c.p2,
                 "p3": c.p3, "pinned_sY": c.pinned_sY}
                for c in result.cells
            ],
        }, args)


def cmd_extort(args):
    noise = noise_from_args(args)
    _, e = payoffs_from_args(args, noise)
    _require(args, "chi")
    e.require_pd()
    bound = max_phi(args.chi, args.delta, noise, e)
    phi = args.phi
    if phi is None:
        if not bound > 0.0:
            raise errors.InfeasibleError(
                f"no phi > 0 makes the ({args.chi}, {args.delta}) strategy feasible")
        phi = bound / 2.0 if math.isfinite(bound) else 1.0
    tol = tolerances_from_args(args)
    strategy = weak_extortion_strategy(args.chi, args.delta, phi, noise, e, tol.feasibility)
    s_x, s_y = fullcoop_payoffs(args.chi, args.delta, e)
    rel = extortion_relation(args.chi, args.delta, e)
    _emit_json({
        "p": strategy.to_list(),
        "chi": args.chi,
        "delta": args.delta,
        "l": e.P + args.delta,
        "phi": phi,
        "max_phi": bound,
        **rel.as_dict(),
        "fullcoop_s_x": s_x,
        "fullcoop_s_y": s_y,
    }, args)


def cmd_extort_scan(args):
    noise = noise_from_args(args)
    _, e = payoffs_from_args(args, noise)
    chis = default_chi_grid(args.grid or 100, args.chi_min, args.chi_max)
    result = scan_extortion(noise, e, chis, args.delta_resolution,
                            tolerances_from_args(args), args.workers)
    if (args.format or "csv") == "csv":
        buf = io.StringIO()
        result.write_csv(buf)
        _write(buf.getvalue(), args)
    else:
        _emit_json({
            "R_E": result.R_E,
            "P_E": result.P_E,
            "chi_threshold": result.threshold(),
            "negative_delta_feasible": result.negative_delta_feasible,
            "rows": [r.__dict__ for r in result.rows],
        }, args)


def cmd_strong_check(args):
    noise = noise_from_args(args)
    if args.payoffs is None and args.G is None and args.L is None:
        args.payoffs = CLASSIC_PAYOFFS
    _, e = payoffs_from_args(args, noise)
    _require(args, "chi")
    result = strong_extortion_feasibility(noise, e, args.chi)
    _emit_json({"verdict": "FEASIBLE" if result.feasible else "INFEASIBLE",
                **result.as_dict()}, args)


def cmd_simulate(args):
    noise = noise_from_args(args)
    stage, _ = payoffs_from_args(args, noise)
    if stage is None:
        raise UsageError("simulate needs realized payoffs: give --G and --L")
    config = SimConfig(_vector(args, "p"), _vector(args, "q"), noise, stage,
                       stages=args.stages, seed=args.seed, initial_state=args.initial)
    result = simulate(config)
    _emit_json({"seed": args.seed, "stages": args.stages, **result.as_dict()}, args)


COMMANDS = {
    "payoffs": cmd_payoffs,
    "analyze": cmd_analyze,
    "pin": cmd_pin,
    "pin-scan": cmd_pin_scan,
    "extort": cmd_extort,
    "extort-scan": cmd_extort_scan,
    "strong-check": cmd_strong_check,
    "simulate": cmd_simulate,
}

_EXIT_CODES = (
    (errors.NonUniqueStationaryError, EXIT_DEGENERATE_CHAIN),
    (errors.DegenerateChainError, EXIT_DEGENERATE_CHAIN),
    (errors.InfeasibleError, EXIT_INFEASIBLE),
    (errors.DegeneratePinError, EXIT_DEGENERATE_PIN),
    (errors.InternalConsistencyError, EXIT_INTERNAL),
    (errors.InvalidParameterError, EXIT_BAD_ARGS),
    (UsageError, EXIT_BAD_ARGS),
    (ValueError, EXIT_BAD_ARGS),
)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args)
        COMMANDS[args.command](args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except Exception as exc:
        for kind, code in _EXIT_CODES:
            if isinstance(exc, kind):
                detail = {"error": type(exc).__name__, "message": str(exc)}
                if isinstance(exc, errors.InfeasibleError):
                    detail["violations"] = exc.violations
                print(json.dumps(_round(detail)), file=sys.stderr)
                return code
        raise
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
