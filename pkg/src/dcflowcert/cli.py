"""Command-line frontend.

Four subcommands over a grid file: ``validate`` (parse + invariants +
voltage-band precondition), ``exists`` (existence certificate with
recovered voltages), ``unique`` (uniqueness certificate or counterexample),
and ``sweep`` (scale all injections by a grid of factors and tabulate the
existence pipeline per factor).

Exit codes are a function of the certificate status only: 0 when a
solution is found / uniqueness is certified, 1 when the relaxation is
infeasible / a counterexample is found, 2 when undecided/unknown, and 3 on
input or usage errors.

JSON reports are byte-identical across runs for identical inputs, flags,
and seed; stage timings are therefore reported in text output only.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .errors import SchemaError, TopologyError
from .existence import ExistenceConfig, ExistenceStatus, run_existence
from .loadflow import NewtonConfig, SecurityMode, check_security
from .netmodel import Network, check_condition1, parse_network, scale_injections
from .cvxsolver import SolverConfig
from .uniqueness import FalsifyConfig, UniquenessStatus, certify_or_falsify

_EXIT_OK = 0
_EXIT_REFUTED = 1
_EXIT_UNDECIDED = 2
_EXIT_INPUT = 3

_EXISTENCE_EXIT = {
    ExistenceStatus.SOLUTION_FOUND: _EXIT_OK,
    ExistenceStatus.P1_INFEASIBLE: _EXIT_REFUTED,
    ExistenceStatus.UNDECIDED: _EXIT_UNDECIDED,
}
_UNIQUENESS_EXIT = {
    UniquenessStatus.UNIQUE_CERTIFIED: _EXIT_OK,
    UniquenessStatus.COUNTEREXAMPLE_FOUND: _EXIT_REFUTED,
    UniquenessStatus.UNKNOWN: _EXIT_UNDECIDED,
}


@dataclass
class RunReport:
    """Machine-readable record of one CLI invocation.

    timing_ms is kept out of the serialized report so that identical runs
    produce byte-identical JSON.
    """

    command: str
    input_digest: str
    tool_version: str = __version__
    existence: dict | None = None
    uniqueness: dict | None = None
    validation: dict | None = None
    sweep: dict | None = None
    timing_ms: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "input_digest": self.input_digest,
            "tool_version": self.tool_version,
            "existence": self.existence,
            "uniqueness": self.uniqueness,
        }
        if self.validation is not None:
            doc["validation"] = self.validation
        if self.sweep is not None:
            doc["sweep"] = self.sweep
        return json.dumps(doc, indent=2)


def _fmt(value: float) -> str:
    return "%.17g" % value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcflowcert",
        description="Existence and uniqueness certificates for secure DC load flow.",
    )
    parser.add_argument("--version", action="version", version=f"dcflowcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser):
        p.add_argument("--network", required=True, help="path to the grid JSON file")
        p.add_argument("--tol", type=float, default=1e-8, help="solver duality-gap tolerance")
        p.add_argument("--max-iter", type=int, default=200, help="Newton budget per centering stage")
        p.add_argument("--margin", type=float, default=1e-9, help="strictness margin for security checks")
        p.add_argument("--seed", type=int, default=42, help="seed for the singularity search")
        p.add_argument("--starts", type=int, default=32, help="multi-start count for the singularity search")
        p.add_argument(
            "--output", choices=("text", "json", "csv"), default="text", help="report format"
        )

    add_common(sub.add_parser("validate", help="parse the grid file and check invariants"))
    add_common(sub.add_parser("exists", help="existence certificate + recovered voltages"))
    add_common(sub.add_parser("unique", help="uniqueness certificate or counterexample"))
    sweep = sub.add_parser("sweep", help="injection-scaling study over a factor grid")
    add_common(sweep)
    sweep.add_argument("--lambda-max", type=float, default=1.0, help="largest scaling factor")
    sweep.add_argument("--steps", type=int, default=11, help="number of grid points (>= 2)")
    return parser


def _existence_config(args) -> ExistenceConfig:
    return ExistenceConfig(
        solver=SolverConfig(tol=args.tol, max_iter=args.max_iter),
        newton=NewtonConfig(),
        strict_margin=args.margin,
    )


def _load_network(args) -> tuple[Network, str]:
    with open(args.network, "rb") as handle:
        raw = handle.read()
    digest = "sha256:" + hashlib.sha256(raw).hexdigest()
    return parse_network(raw.decode("utf-8")), digest


def _security_summary(net, cert, margin):
    if cert.voltages is None:
        return None
    report = check_security(net, cert.voltages, SecurityMode.STRICT, margin)
    return min(report.worst_voltage_margin, report.worst_current_margin)


def _cmd_validate(args) -> int:
    start = time.perf_counter()
    net, digest = _load_network(args)
    verdict = check_condition1(net)
    report = RunReport(
        command="validate",
        input_digest=digest,
        validation={
            "valid": True,
            "n_pq": net.n_pq,
            "n_branches": len(net.branches),
            "condition1": verdict.to_dict(),
        },
    )
    report.timing_ms["validate"] = 1000.0 * (time.perf_counter() - start)
    if args.output == "json":
        print(report.to_json())
    else:
        print(f"valid grid: {net.n_pq} PQ bus(es), {len(net.branches)} branch(es)")
        margins = ", ".join(_fmt(m) for m in verdict.margins)
        if verdict.holds:
            print(f"condition on voltage band holds (margins: {margins})")
        else:
            print(f"warning: voltage-band condition fails (margins: {margins})")
        print(f"elapsed: {report.timing_ms['validate']:.1f} ms")
    return _EXIT_OK


def _cmd_exists(args) -> int:
    net, digest = _load_network(args)
    start = time.perf_counter()
    run = run_existence(net, _existence_config(args))
    elapsed = 1000.0 * (time.perf_counter() - start)
    cert = run.certificate
    report = RunReport(command="exists", input_digest=digest, existence=cert.to_dict())
    report.timing_ms["exists"] = elapsed
    if args.output == "json":
        print(report.to_json())
    else:
        print(f"status: {cert.status.value}")
        if cert.voltages is not None:
            print("voltages: " + " ".join(_fmt(v) for v in cert.voltages.values))
            print(f"residual after polish: {_fmt(cert.residual_after_polish)}")
            worst = _security_summary(net, cert, args.margin)
            print(f"worst strict security margin: {_fmt(worst)}")
        if cert.tightness_alpha is not None:
            print(
                f"tightness gaps: alpha={_fmt(cert.tightness_alpha)} "
                f"beta={_fmt(cert.tightness_beta)}"
            )
        holds = "holds" if cert.condition1.holds else "fails"
        print(f"voltage-band condition {holds}")
        print(f"elapsed: {elapsed:.1f} ms")
    return _EXISTENCE_EXIT[cert.status]


def _cmd_unique(args) -> int:
    net, digest = _load_network(args)
    start = time.perf_counter()
    cert = certify_or_falsify(net, FalsifyConfig(starts=args.starts, seed=args.seed))
    elapsed = 1000.0 * (time.perf_counter() - start)
    report = RunReport(command="unique", input_digest=digest, uniqueness=cert.to_dict())
    report.timing_ms["unique"] = elapsed
    if args.output == "json":
        print(report.to_json())
    else:
        print(f"status: {cert.status.value}")
        print(f"method: {cert.method.value}")
        print(f"margin: {_fmt(cert.margin)}")
        if cert.counterexample is not None:
            ce = cert.counterexample
            print("singular point: " + " ".join(_fmt(v) for v in ce.voltages.values))
            print(f"sigma_min: {_fmt(ce.sigma_min)}")
        print(f"elapsed: {elapsed:.1f} ms")
    return _UNIQUENESS_EXIT[cert.status]


def _sweep_grid(lambda_max: float, steps: int) -> list[float]:
    if lambda_max == 0.0:
        return [0.0]
    return [lambda_max * i / (steps - 1) for i in range(steps)]


def _cmd_sweep(args) -> int:
    if args.steps < 2:
        raise ValueError("--steps must be at least 2")
    if args.lambda_max < 0:
        raise ValueError("--lambda-max must be nonnegative")
    net, digest = _load_network(args)
    cfg = _existence_config(args)
    rows = []
    last_found = None
    for lam in _sweep_grid(args.lambda_max, args.steps):
        run = run_existence(scale_injections(net, lam), cfg)
        cert = run.certificate
        margin = _security_summary(scale_injections(net, lam), cert, args.margin)
        if cert.status is ExistenceStatus.SOLUTION_FOUND:
            last_found = lam
        rows.append(
            {
                "lambda": lam,
                "status": cert.status.value,
                "tightness_alpha": cert.tightness_alpha,
                "tightness_beta": cert.tightness_beta,
                "margin": margin,
                "voltages": None
                if cert.voltages is None
                else [float(v) for v in cert.voltages.values],
            }
        )

    report = RunReport(
        command="sweep",
        input_digest=digest,
        sweep={
            "lambda_max": args.lambda_max,
            "steps": args.steps,
            "rows": rows,
            "largest_solution_found_lambda": last_found,
        },
    )
    if args.output == "json":
        print(report.to_json())
    else:
        header = ["lambda", "status", "tightness_alpha", "tightness_beta", "margin"]
        header += [f"v_{n}" for n in range(1, net.n_pq + 1)]
        print(",".join(header))
        for row in rows:
            cells = [_fmt(row["lambda"]), row["status"]]
            for key in ("tightness_alpha", "tightness_beta", "margin"):
                cells.append("" if row[key] is None else _fmt(row[key]))
            if row["voltages"] is None:
                cells.extend([""] * net.n_pq)
            else:
                cells.extend(_fmt(v) for v in row["voltages"])
            print(",".join(cells))
        note = "none" if last_found is None else _fmt(last_found)
        print(f"largest lambda with SolutionFound: {note}", file=sys.stderr)
    return _EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "exists": _cmd_exists,
    "unique": _cmd_unique,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (SchemaError, TopologyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
