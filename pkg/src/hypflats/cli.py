"""Command-line front end: analytic evaluation, Monte Carlo validation and
parameter sweeps emitted as CSV/JSON.

Exit codes: 0 success, 2 invalid arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__, analytic, montecarlo
from .errors import HypflatsError, QuadratureError
from .quadrature import Tolerance
from .special import Curvature, FlatConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


@dataclass
class RunManifest:
    """Provenance record serialized alongside every CSV output."""

    command: str
    parameters: dict
    version: str = __version__
    seed: int | None = None
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def to_comment(self) -> str:
        return "# " + json.dumps(asdict(self), sort_keys=True)


def _curvature(value: str) -> float:
    K = float(value)
    if K >= 0:
        raise argparse.ArgumentTypeError(f"curvature K must be < 0, got {K}")
    return K


def _add_cfg_args(p, curvature=True):
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--gamma", type=int, required=True)
    if curvature:
        p.add_argument("--K", type=_curvature, required=True)
    p.add_argument("--u", type=float, required=True)


def _add_tol_arg(p):
    p.add_argument("--rel-tol", type=float, default=1e-9,
                   help="relative quadrature tolerance (default 1e-9)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hypflats",
        description="Intersection probabilities of random flats in hyperbolic space",
    )
    parser.add_argument("--output", help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", help="intersection probability")
    _add_cfg_args(p)
    _add_tol_arg(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("cdf", help="CDF of the intersection distance")
    _add_cfg_args(p)
    _add_tol_arg(p)
    p.add_argument("--delta", type=float, required=True)

    p = sub.add_parser("density-scan", help="distance density on a delta grid (CSV)")
    _add_cfg_args(p)
    _add_tol_arg(p)
    p.add_argument("--delta-min", type=float, required=True)
    p.add_argument("--delta-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)

    p = sub.add_parser("moment", help="moment of the intersection distance")
    _add_cfg_args(p)
    _add_tol_arg(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--conditional", action="store_true")

    p = sub.add_parser("phase", help="critical-regime limit constant rho")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--gamma", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    _add_tol_arg(p)

    p = sub.add_parser("scan-d", help="probability against dimension (CSV)")
    p.add_argument("--d-min", type=int, required=True)
    p.add_argument("--d-max", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--gamma", type=int, required=True)
    p.add_argument("--K", type=_curvature, required=True)
    p.add_argument("--u", type=float, required=True)
    _add_tol_arg(p)

    p = sub.add_parser("scan-K", help="probability against curvature (CSV)")
    _add_cfg_args(p, curvature=False)
    p.add_argument("--K-min", type=_curvature, required=True)
    p.add_argument("--K-max", type=_curvature, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--log-spaced", action="store_true")
    _add_tol_arg(p)

    p = sub.add_parser("scan-phase", help="probability along a curvature schedule (CSV)")
    p.add_argument("--mode", choices=("sub", "super", "crit"), required=True)
    p.add_argument("--kappa", type=float)
    p.add_argument("--d-max", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--gamma", type=int, required=True)
    p.add_argument("--u", type=float, required=True)
    _add_tol_arg(p)

    p = sub.add_parser("simulate", help="Monte Carlo check against the analytic law (JSON)")
    _add_cfg_args(p)
    _add_tol_arg(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: available parallelism)")

    return parser


def _manifest(args, stochastic=False):
    params = {
        k: v for k, v in sorted(vars(args).items())
        if k not in ("command", "output") and v is not None
    }
    return RunManifest(
        command=args.command,
        parameters=params,
        seed=getattr(args, "seed", None) if stochastic else None,
    )


def _emit_csv(args, header, rows, stochastic=False):
    lines = [_manifest(args, stochastic).to_comment(), header]
    lines += [",".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in row)
              for row in rows]
    return "\n".join(lines) + "\n"


def _cmd_prob(args, tol):
    cfg = FlatConfig(args.d, args.q, args.gamma, args.u)
    p = analytic.intersection_probability(cfg, Curvature(args.K), tol)
    if args.json:
        return json.dumps({"command": "prob", "d": args.d, "q": args.q,
                           "gamma": args.gamma, "curvature": args.K,
                           "u": args.u, "p": p}) + "\n"
    return f"{p:.12g}\n"


def _cmd_cdf(args, tol):
    cfg = FlatConfig(args.d, args.q, args.gamma, args.u)
    v = analytic.distance_cdf(cfg, Curvature(args.K), args.delta, tol)
    return f"{v:.12g}\n"


def _cmd_density_scan(args, tol):
    cfg = FlatConfig(args.d, args.q, args.gamma, args.u)
    K = Curvature(args.K)
    if args.steps < 1 or args.delta_min <= 0 or args.delta_max < args.delta_min:
        raise HypflatsError("need 0 < delta-min <= delta-max and steps >= 1")
    deltas = np.linspace(args.delta_min, args.delta_max, args.steps)
    rows = [(float(dd), analytic.distance_density(cfg, K, float(dd), tol))
            for dd in deltas]
    return _emit_csv(args, "delta,f", rows)


def _cmd_moment(args, tol):
    cfg = FlatConfig(args.d, args.q, args.gamma, args.u)
    res = analytic.moment(cfg, Curvature(args.K), args.alpha, args.conditional, tol)
    if res.divergent:
        return "divergent\n"
    return f"{res.value:.12g}\n"


def _cmd_phase(args, tol):
    rho = analytic.critical_constant_rho(args.u, args.q, args.gamma, args.kappa, tol)
    return f"{rho:.12g}\n"


def _cmd_scan_d(args, tol):
    if args.d_min > args.d_max:
        raise HypflatsError("need d-min <= d-max")
    K = Curvature(args.K)
    rows = []
    for d in range(args.d_min, args.d_max + 1):
        cfg = FlatConfig(d, args.q, args.gamma, args.u)
        rows.append((d, analytic.intersection_probability(cfg, K, tol)))
    return _emit_csv(args, "d,p", rows)


def _cmd_scan_K(args, tol):
    cfg = FlatConfig(args.d, args.q, args.gamma, args.u)
    if args.steps < 2:
        raise HypflatsError("need steps >= 2")
    if args.log_spaced:
        Ks = -np.geomspace(-args.K_min, -args.K_max, args.steps)
    else:
        Ks = np.linspace(args.K_min, args.K_max, args.steps)
    rows = [(float(K), analytic.intersection_probability(cfg, Curvature(float(K)), tol))
            for K in Ks]
    return _emit_csv(args, "K,p", rows)


_PHASE_SCHEDULES = {
    "sub": lambda d, kappa: -1.0 / d**2,
    "super": lambda d, kappa: -1.0 / math.sqrt(d),
    "crit": lambda d, kappa: -kappa / d,
}


def _cmd_scan_phase(args, tol):
    if args.mode == "crit":
        if args.kappa is None or args.kappa <= 0:
            raise HypflatsError("crit mode requires --kappa > 0")
        mode = analytic.PhaseMode.critical(args.kappa)
    else:
        if args.kappa is not None:
            raise HypflatsError("--kappa only applies to crit mode")
        mode = (analytic.PhaseMode.subcritical() if args.mode == "sub"
                else analytic.PhaseMode.supercritical())
    limit = analytic.phase_limit(mode, args.u, args.q, args.gamma, tol)
    schedule = _PHASE_SCHEDULES[args.mode]
    rows = []
    for d in range(args.q + 1, args.d_max + 1):
        K = schedule(d, args.kappa)
        cfg = FlatConfig(d, args.q, args.gamma, args.u)
        p = analytic.intersection_probability(cfg, Curvature(K), tol)
        rows.append((d, K, p, limit))
    return _emit_csv(args, "d,K,p,limit", rows)


def _cmd_simulate(args, tol):
    import os

    cfg = FlatConfig(args.d, args.q, args.gamma, args.u)
    K = Curvature(args.K)
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    summary = montecarlo.simulate_distance_distribution(
        cfg, K, args.trials, args.seed, threads
    )
    hits = len(summary.finite_samples)
    est = montecarlo.SimEstimate.from_counts(args.trials, hits, summary.seed)
    p = analytic.intersection_probability(cfg, K, tol)
    a = 1.0 - p
    atom_hat = summary.empty_count / args.trials
    atom_se = math.sqrt(max(atom_hat * (1 - atom_hat), 1e-300) / args.trials)
    if hits:
        grid = np.linspace(0.0, float(summary.finite_samples[-1]), 129)[1:]
        cdf_grid = analytic.distance_cdf_grid(cfg, K, grid, tol) / p
        from scipy.interpolate import PchipInterpolator

        interp = PchipInterpolator(np.concatenate(([0.0], grid)),
                                   np.concatenate(([0.0], cdf_grid)))
        ks = montecarlo.ks_statistic(summary.finite_samples,
                                     interp(summary.finite_samples))
    else:
        ks = math.nan
    out = {
        "command": "simulate",
        "d": args.d, "q": args.q, "gamma": args.gamma,
        "curvature": args.K, "u": args.u,
        "trials": args.trials, "seed": summary.seed,
        "p_hat": est.p_hat, "std_err": est.std_err,
        "analytic_p": p,
        "p_deviation_sigmas": (abs(est.p_hat - p) / est.std_err
                               if est.std_err > 0 else 0.0),
        "atom_hat": atom_hat, "analytic_atom": a,
        "atom_deviation_sigmas": (abs(atom_hat - a) / atom_se
                                  if atom_se > 0 else 0.0),
        "ks_statistic": ks,
        "version": __version__,
    }
    return json.dumps(out, sort_keys=True) + "\n"


_COMMANDS = {
    "prob": _cmd_prob,
    "cdf": _cmd_cdf,
    "density-scan": _cmd_density_scan,
    "moment": _cmd_moment,
    "phase": _cmd_phase,
    "scan-d": _cmd_scan_d,
    "scan-K": _cmd_scan_K,
    "scan-phase": _cmd_scan_phase,
    "simulate": _cmd_simulate,
}


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    rel = getattr(args, "rel_tol", 1e-9)
    tol = Tolerance(rel_tol=rel, abs_tol=min(1e-12, rel))
    try:
        text = _COMMANDS[args.command](args, tol)
    except QuadratureError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except HypflatsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
