"""Command Line Starting Point"""
import argparse
import json
import logging
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from kronred.errors import AssumptionError, ConfigurationError, KronError
from kronred.network.potential import Network, dissipated_power, min_heat_check, power_balance_check
from kronred.network.reduction import SamplingPlan, effective_curve
from kronred.network.solver import reduced_potential, solve_interior
from kronred.pipeline import reduce_network
from kronred.tools.checks import run_checks
from kronred.tools.helper import RuntimeConfig, get_runtime_config
from kronred.utils.helper import (certificate_to_schema, curve_csv, dump_reduced, format_table, format_vector,
                                  labels, load_network, parse_network_file, read_text, write_text)

logger = logging.getLogger("kronred")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_ASSUMPTION = 4


def parse_assignments(net: Network, assignments: Optional[List[str]]) -> np.ndarray:
    """
    Boundary potentials from NAME=VALUE strings, in boundary order.

    Raises:
        ConfigurationError: malformed, unknown, duplicate or missing assignments.
    """
    values: Dict[str, float] = {}
    for item in assignments or []:
        name, sep, raw = item.rpartition("=")
        if not sep or not name:
            raise ConfigurationError(f"boundary assignment {item!r} is not NAME=VALUE")
        if name not in net.boundary_names:
            raise ConfigurationError(f"{name!r} is not a boundary node (boundary: {', '.join(net.boundary_names)})")
        if name in values:
            raise ConfigurationError(f"boundary node {name!r} assigned twice")
        try:
            values[name] = float(raw)
        except ValueError as exc:
            raise ConfigurationError(f"boundary value {raw!r} for {name!r} is not a number") from exc
    missing = [name for name in net.boundary_names if name not in values]
    if missing:
        raise ConfigurationError(f"missing boundary assignment for {', '.join(missing)}")
    return np.array([values[name] for name in net.boundary_names])


def cmd_check(args, _config: RuntimeConfig) -> int:
    report = run_checks(parse_network_file(read_text(args.file)))
    if args.json:
        write_text(None, json.dumps(report.to_dict(), indent=2) + "\n")
    else:
        rows = [(c.name, "pass" if c.passed else "FAIL", c.measured, c.detail) for c in report.checks]
        write_text(None, format_table(rows, ["check", "result", "measured", "detail"]) + "\n")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_solve(args, _config: RuntimeConfig) -> int:
    net = load_network(args.file)
    z_boundary = parse_assignments(net, args.assign)
    solution = solve_interior(net, z_boundary)
    text = labels(net.domain)
    central_names = [net.graph.node_ids[i] for i in net.partition.central]
    balance = power_balance_check(net, solution.z)
    sections = [
        f"interior {text['potential']} z_C ({solution.iterations} iterations, residual {solution.final_residual:.3e})",
        format_vector(central_names, solution.z_C),
        "",
        f"boundary {text['current']} J_B",
        format_vector(net.boundary_names, solution.J_B),
        "",
        f"reduced potential K_hat = {reduced_potential(net, z_boundary, solution):.17g}",
        "",
        format_table([(f"edge {text['power']}", balance.edge_power),
                      (f"nodal {text['power']}", balance.nodal_power),
                      ("difference", balance.difference),
                      ("balanced", str(balance.passed))], ["quantity", "value"]),
    ]
    write_text(None, "\n".join(sections) + "\n")
    return EXIT_OK


def _plan(args, config: RuntimeConfig) -> SamplingPlan:
    return SamplingPlan(count=args.samples, radius=args.range, seed=args.seed, refine_points=args.refine_points,
                        holdout=args.holdout, basis_size=args.basis_size, workers=config["threads"])


def cmd_reduce(args, config: RuntimeConfig) -> int:
    net = load_network(args.file)
    try:
        reduced = reduce_network(net, _plan(args, config), config)
    except AssumptionError as exc:
        if exc.certificate is not None:
            document = {"domain": net.domain.value, "nodes": list(net.boundary_names), "edges": [],
                        "certificate": certificate_to_schema(exc.certificate).model_dump()}
            write_text(args.out, json.dumps(document, indent=2) + "\n")
        raise
    write_text(args.out, dump_reduced(reduced))
    certificate = reduced.certificate
    if not certificate.accepted:
        logger.warning("reduction not accepted: held-out residual %.3e", certificate.consistency_residual)
        return EXIT_ASSUMPTION
    return EXIT_OK


def cmd_curve(args, _config: RuntimeConfig) -> int:
    net = load_network(args.file)
    pair = [name.strip() for name in args.pair.split(",")]
    if len(pair) != 2 or pair[0] == pair[1]:
        raise ConfigurationError(f"--pair needs two distinct node names, got {args.pair!r}")
    if args.points < 2 or not args.vmin < args.vmax:
        raise ConfigurationError("curve grid needs --points >= 2 and --vmin < --vmax")
    points = effective_curve(net, pair[0], pair[1], np.linspace(args.vmin, args.vmax, args.points))
    write_text(args.out, curve_csv(points))
    failed = [p for p in points if not p.ok]
    if failed:
        logger.error("%d of %d curve points failed, first at V=%r: %s",
                     len(failed), len(points), failed[0].V, failed[0].message)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_power(args, _config: RuntimeConfig) -> int:
    net = load_network(args.file)
    z_boundary = parse_assignments(net, args.assign)
    solution = solve_interior(net, z_boundary)
    balance = power_balance_check(net, solution.z)
    text = labels(net.domain)
    rows = [("V.I (edges)", balance.edge_power),
            ("psi.J (nodes)", balance.nodal_power),
            ("difference", balance.difference),
            (f"dissipated {text['power']}", dissipated_power(net, solution.z))]
    if args.homogeneity is not None:
        report = min_heat_check(net, z_boundary, args.homogeneity, seed=args.seed)
        rows.append(("min-heat max difference", report.max_difference))
        rows.append(("min-heat agrees", str(report.passed)))
    write_text(None, format_table(rows, ["quantity", "value"]) + "\n")
    return EXIT_OK if balance.passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kronred", description="Kron reduction of nonlinear resistive networks.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="run structural and numerical checks")
    check.add_argument("file")
    check.add_argument("--json", action="store_true", help="emit the report as JSON")
    check.set_defaults(handler=cmd_check)

    for name, handler, help_text in (("solve", cmd_solve, "solve for the interior potentials"),
                                     ("power", cmd_power, "power bookkeeping at the solved state")):
        verb = commands.add_parser(name, help=help_text)
        verb.add_argument("file")
        verb.add_argument("-z", "--assign", action="append", metavar="NAME=VALUE",
                          help="boundary potential (repeat for every boundary node)")
        verb.set_defaults(handler=handler)
        if name == "power":
            verb.add_argument("--homogeneity", type=float, metavar="K",
                              help="also compare against dissipated-power minimisation for degree K")
            verb.add_argument("--seed", type=int, default=0)

    reduce_ = commands.add_parser("reduce", help="Kron-reduce onto the boundary nodes")
    reduce_.add_argument("file")
    reduce_.add_argument("--samples", type=int, default=SamplingPlan.count)
    reduce_.add_argument("--range", type=float, default=SamplingPlan.radius)
    reduce_.add_argument("--seed", type=int, default=SamplingPlan.seed)
    reduce_.add_argument("--refine-points", type=int, default=SamplingPlan.refine_points)
    reduce_.add_argument("--holdout", type=int, default=SamplingPlan.holdout)
    reduce_.add_argument("--basis-size", type=int, default=SamplingPlan.basis_size)
    reduce_.add_argument("--out", default="-")
    reduce_.set_defaults(handler=cmd_reduce)

    curve = commands.add_parser("curve", help="effective two-terminal curve as CSV")
    curve.add_argument("file")
    curve.add_argument("--pair", required=True, metavar="A,B")
    curve.add_argument("--vmin", type=float, default=-3.0)
    curve.add_argument("--vmax", type=float, default=3.0)
    curve.add_argument("--points", type=int, default=41)
    curve.add_argument("--out", default="-")
    curve.set_defaults(handler=cmd_curve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs one verb and returns its exit code."""
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = get_runtime_config()
    except ConfigurationError as exc:
        sys.stderr.write(f"kronred: {exc}\n")
        return exc.exit_code

    level = logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else config["log_level"]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.handler(args, config)
    except KronError as exc:
        sys.stderr.write(f"kronred: {type(exc).__name__}: {exc}\n")
        return exc.exit_code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
