"""Command-line interface.

Exit codes: 0 on success, 2 when the requested transport is infeasible at
the given time (or no chain certificate exists), 3 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .chain import chain_decompose, check_chain_certificate
from .costs import cost_family, cost_model_from_spec
from .errors import ChainSearchFailure, RelotError
from .experiments import (ExperimentConfig, emit_report,
                          run_continuity_experiment, run_theta_experiment)
from .measures import measure_from_csv
from .plans import plan_from_json
from .solver import OTInstance, cost_curve, critical_time, solve, theta_mass

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3


def _add_instance_args(p: argparse.ArgumentParser):
    p.add_argument("--cost", default="brenier",
                   help="built-in cost family name (brenier | quadratic_ball | finite_slope_demo)")
    p.add_argument("--cost-spec", help="JSON file with a full cost model spec (overrides --cost)")
    p.add_argument("--mu", required=True, help="source measure CSV (x_1..x_d,weight)")
    p.add_argument("--nu", required=True, help="target measure CSV")


def _load_instance(args) -> OTInstance:
    mu = measure_from_csv(Path(args.mu).read_text(encoding="utf-8"))
    nu = measure_from_csv(Path(args.nu).read_text(encoding="utf-8"))
    if args.cost_spec:
        model = cost_model_from_spec(json.loads(Path(args.cost_spec).read_text(encoding="utf-8")))
    else:
        model = cost_family(args.cost, mu.dimension)
    return OTInstance(mu, nu, model)


def _write_out(payload: dict, out: str | None):
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relot",
        description="Finite-support optimal transport under relativistic costs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal plan and value at a fixed time")
    _add_instance_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--out")

    p = sub.add_parser("critical-time", help="least time with a finite-cost coupling")
    _add_instance_args(p)
    p.add_argument("--out")

    p = sub.add_parser("curve", help="sample the cost curve on a grid (plus exact T)")
    _add_instance_args(p)
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True, help="output path (.csv or .json)")

    p = sub.add_parser("theta-mass", help="boundary-band mass of the optimal plan")
    _add_instance_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--band", type=float, default=1e-3)
    p.add_argument("--out")

    p = sub.add_parser("chain-check", help="search and verify a chain certificate")
    p.add_argument("--gamma", required=True, help="coupling JSON")
    p.add_argument("--gamma-prime", required=True)
    p.add_argument("--gamma0", required=True, help="sub-coupling of gamma, JSON")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--out")

    p = sub.add_parser("experiment", help="run a refinement experiment from a config")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    return parser


def _run(args) -> int:
    if args.command == "solve":
        instance = _load_instance(args)
        result = solve(instance, args.t)
        _write_out(result.to_payload(), args.out)
        return EXIT_OK if result.value.is_finite else EXIT_INFEASIBLE

    if args.command == "critical-time":
        instance = _load_instance(args)
        _write_out({"critical_time": critical_time(instance)}, args.out)
        return EXIT_OK

    if args.command == "curve":
        instance = _load_instance(args)
        curve = cost_curve(instance, args.t_min, args.t_max, args.steps)
        out = Path(args.out)
        if out.suffix.lower() == ".csv":
            out.write_text(curve.to_csv(), encoding="utf-8")
        else:
            out.write_text(json.dumps(curve.to_payload(), indent=2) + "\n", encoding="utf-8")
        return EXIT_OK

    if args.command == "theta-mass":
        instance = _load_instance(args)
        result = solve(instance, args.t)
        if not result.value.is_finite:
            _write_out({"t": args.t, "feasible": False}, args.out)
            return EXIT_INFEASIBLE
        tm = theta_mass(result, instance.cost_model, args.band)
        _write_out({"t": args.t, "feasible": True, **tm.to_payload()}, args.out)
        return EXIT_OK

    if args.command == "chain-check":
        gamma = plan_from_json(Path(args.gamma).read_text(encoding="utf-8"))
        gamma_prime = plan_from_json(Path(args.gamma_prime).read_text(encoding="utf-8"))
        gamma0 = plan_from_json(Path(args.gamma0).read_text(encoding="utf-8"))
        try:
            cert = chain_decompose(gamma, gamma_prime, gamma0, args.eps)
        except ChainSearchFailure as exc:
            _write_out(
                {"found": False, "max_feasible_eps": exc.max_feasible_eps}, args.out
            )
            return EXIT_INFEASIBLE
        violations = check_chain_certificate(cert, gamma, gamma_prime, gamma0)
        _write_out(
            {"found": True, "violations": violations, **cert.to_payload()}, args.out
        )
        return EXIT_OK if not violations else EXIT_INFEASIBLE

    if args.command == "experiment":
        payload = json.loads(Path(args.config).read_text(encoding="utf-8"))
        config = ExperimentConfig.from_payload(payload)
        if config.experiment == "continuity":
            report = run_continuity_experiment(config)
        else:
            report = run_theta_experiment(config)
        emit_report(report, args.format, args.out)
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (RelotError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"relot: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
