#!/usr/bin/env python3
"""
Command-line front end: theta, params, verify, capacity and reproduce
"""
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple
import argparse
import json
import logging
import sys

from pydantic import ValidationError

from channels import QuantumChannelPayload
from config import get_settings
from errors import NCGraphError, ParseError, UnknownCaseError
from graphs import Graph, GraphPayload
from numkernel import Tolerance
from opsys import OperatorSystem, OperatorSystemPayload, graph_system
from params import ParamCertificate, bounds_report, replay_certificate
from reproduce import REGISTRY, RunOptions, run_suite
from theta import capacity_report, lovasz_theta

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_CLAIM_FAILURE = 1
EXIT_INPUT_ERROR = 2


def load_json(path: str) -> Dict[str, Any]:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as e:
        raise ParseError(f"file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{path} is not valid JSON: {e}") from e


def load_graph(path: str) -> Graph:
    try:
        return GraphPayload.model_validate(load_json(path)).to_graph()
    except ValidationError as e:
        raise ParseError(f"{path} is not a graph file: {e}") from e


def load_target(path: str, tol: Tolerance):
    """A graph, operator system or quantum channel, decided by the keys present"""
    data = load_json(path)
    try:
        if "edges" in data:
            return GraphPayload.model_validate(data).to_graph()
        if "kraus" in data:
            return QuantumChannelPayload.model_validate(data).to_channel()
        if "basis" in data:
            return OperatorSystemPayload.model_validate(data).to_system(tol)
    except ValidationError as e:
        raise ParseError(f"{path} does not match its schema: {e}") from e
    raise ParseError(f"{path} has none of the keys 'edges', 'kraus' or 'basis'")


def as_system(target, tol: Tolerance) -> OperatorSystem:
    if isinstance(target, Graph):
        return graph_system(target)
    if isinstance(target, OperatorSystem):
        return target
    from channels import confusability_system

    return confusability_system(target, tol)


def cmd_theta(args, tol: Tolerance) -> Tuple[Dict[str, Any], bool]:
    g = load_graph(args.graph_file)
    value = lovasz_theta(g)
    return {"command": "theta", "n": g.n, "edges": len(g.edges), "theta": value}, True


def cmd_params(args, tol: Tolerance) -> Tuple[Dict[str, Any], bool]:
    system = as_system(load_target(args.input_file, tol), tol)
    report = bounds_report(system, effort=args.effort, seed=args.seed, budget=args.budget, starts=args.starts, tol=tol)
    consistent = all(
        i.upper.value is None or i.lower.value is None or i.lower.value <= i.upper.value for i in report.intervals
    )
    return {"command": "params", **report.model_dump()}, consistent


def cmd_verify(args, tol: Tolerance) -> Tuple[Dict[str, Any], bool]:
    system = as_system(load_target(args.system_file, tol), tol)
    try:
        cert = ParamCertificate.from_payload(load_json(args.certificate_file))
    except (KeyError, ValueError, ValidationError) as e:
        raise ParseError(f"{args.certificate_file} is not a certificate file: {e}") from e
    replayed = replay_certificate(cert, system, tol)
    ok = replayed.verified and replayed.value == cert.value
    return {
        "command": "verify",
        "parameter": cert.parameter,
        "direction": cert.direction,
        "claimed": cert.value,
        "recomputed": replayed.value,
        "verified": ok,
        "notes": replayed.notes,
    }, ok


def cmd_capacity(args, tol: Tolerance) -> Tuple[Dict[str, Any], bool]:
    target = load_target(args.input_file, tol)
    if isinstance(target, OperatorSystem):
        raise ParseError("capacity needs a graph or a channel file")
    report = capacity_report(target, effort=args.effort, seed=args.seed)
    return {"command": "capacity", **report.model_dump()}, report.consistent


def cmd_reproduce(args, tol: Tolerance) -> Tuple[Dict[str, Any], bool]:
    ids = list(REGISTRY) if args.case == "all" else [args.case]
    if args.case != "all" and args.case not in REGISTRY:
        raise UnknownCaseError(f"unknown case {args.case!r}; known cases: {', '.join(REGISTRY)}")
    options = RunOptions(seed=args.seed, budget=args.budget, starts=args.starts, effort=args.effort)
    report = run_suite(ids, options, timed=not args.no_timestamp)
    for case in report.cases:
        icon = {"pass": "✅", "fail": "❌", "out-of-scope-noted": "📝"}[case.status]
        print(f"{icon} {case.id}: {case.title} ({len(case.claims)} claims)", file=sys.stderr)
    return {"command": "reproduce", **report.model_dump()}, report.passed


COMMANDS = {
    "theta": cmd_theta,
    "params": cmd_params,
    "verify": cmd_verify,
    "capacity": cmd_capacity,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="ncgraph",
        description="Bounds and certificates for confusability graphs of classical and quantum channels",
    )
    parser.add_argument("--tol", type=float, default=None, help="Override every numerical tolerance")
    parser.add_argument("--seed", type=int, default=settings.default_seed, help="Seed of the first randomized start")
    parser.add_argument("--budget", type=int, default=None, help="Iterations per randomized start")
    parser.add_argument("--starts", type=int, default=None, help="Randomized starts per search")
    parser.add_argument("--effort", choices=["quick", "full"], default=settings.effort)
    parser.add_argument("--json", dest="json_out", default=None, help="Write the report to this path")
    parser.add_argument("--no-timestamp", action="store_true", help="Omit timestamps and timings from reports")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("theta", help="Lovász theta of a graph")
    p.add_argument("graph_file")
    p = sub.add_parser("params", help="Certified bounds for alpha, beta, gamma and inter")
    p.add_argument("input_file", help="Graph, operator system or channel file")
    p = sub.add_parser("verify", help="Re-verify a certificate against a system")
    p.add_argument("certificate_file")
    p.add_argument("system_file")
    p = sub.add_parser("capacity", help="Capacity chain for a graph or channel")
    p.add_argument("input_file")
    p = sub.add_parser("reproduce", help="Run reproduction cases")
    p.add_argument("case", help=f"'all' or one of: {', '.join(REGISTRY)}")
    return parser


def tolerance_from(value: Optional[float]) -> Tolerance:
    if value is None:
        return Tolerance.from_settings()
    base = Tolerance.from_settings()
    return Tolerance(
        rank_rel=value, psd_abs=value, subspace_angle=value, membership=value, block_zero_rel=base.block_zero_rel
    )


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)

    try:
        tol = tolerance_from(args.tol)
        report, passed = COMMANDS[args.command](args, tol)
    except (ParseError, UnknownCaseError, ValidationError) as e:
        logger.error(f"Input error: {e}")
        return EXIT_INPUT_ERROR
    except NCGraphError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_INPUT_ERROR

    if not args.no_timestamp:
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if args.json_out:
        try:
            Path(args.json_out).write_text(text + "\n")
        except OSError as e:
            logger.error(f"Cannot write report: {e}")
            return EXIT_INPUT_ERROR
        logger.info(f"Report written to {args.json_out}")
    else:
        print(text)
    return EXIT_PASS if passed else EXIT_CLAIM_FAILURE


if __name__ == "__main__":
    sys.exit(main())
