"""Constructive existence certificates for secure load-flow solutions.

The pipeline assembles a convex relaxation of the load-flow equations over
the (non-strict) security region, solves it by the interior-point module,
and then verifies everything the certificate claims instead of trusting
the relaxation:

  * per-bus squared-voltage variables must match v_n^2 (tightness),
  * per-pair product variables must match v_n * v_k (tightness),
  * Newton polish must confirm a genuine load-flow root,
  * the strict security constraints must hold with a small margin,
  * the voltage-band precondition 2*v_min > v_max > v0 > v_min must hold.

Relaxation layout, per PQ bus n with neighbour set K(n):

    maximize   sum_n v_n
    subject to (sum_{k in K(n)} g_nk) a_n - sum_{k in K(n)\\{0}} g_nk b_nk
                   - g_n0 v0 [0 in K(n)] v_n = p_n
               v_n^2 <= a_n
               b_nk >= 0,  b_nk^2 <= a_n a_k
               v_min <= v_n <= v_max,  |g_nk (v_n - v_k)| <= i_max_nk

where a_n relaxes v_n^2 and b_nk relaxes v_n*v_k. Pairs with the slack bus
get no product variable: the equality rows never reference them and there
is no squared-voltage variable for the slack to pair with.

A failed relaxation is reported as "existence not certified", never as
"no solution exists": feasibility of the relaxation is a sufficient
condition only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cvxsolver import ConvexProgram, SolveOutcome, SolveStatus, SolverConfig, solve
from .errors import NoConvergence
from .loadflow import (
    NewtonConfig,
    SecurityMode,
    VoltageProfile,
    check_security,
    newton_solve,
)
from .netmodel import Condition1Verdict, Network, check_condition1


@dataclass(frozen=True, eq=False)
class P1Instance:
    """Assembled relaxation with the variable layout needed to read it back."""

    program: ConvexProgram
    v_index: dict
    alpha_index: dict
    beta_index: dict

    def voltages(self, x: np.ndarray) -> np.ndarray:
        return np.array([x[self.v_index[n]] for n in sorted(self.v_index)])

    def alphas(self, x: np.ndarray) -> np.ndarray:
        return np.array([x[self.alpha_index[n]] for n in sorted(self.alpha_index)])

    def betas(self, x: np.ndarray) -> dict:
        return {pair: float(x[idx]) for pair, idx in self.beta_index.items()}


def build_p1(net: Network) -> P1Instance:
    """Assemble the relaxation for a validated network.

    Variable order: v_1..v_N, then the squared-voltage block, then one
    product variable per ordered PQ pair (n, k) with k a non-slack
    neighbour of n; both (n, k) and (k, n) are instantiated.
    """
    n_pq = net.n_pq
    v_index = {n: n - 1 for n in range(1, n_pq + 1)}
    alpha_index = {n: n_pq + n - 1 for n in range(1, n_pq + 1)}
    pairs = [
        (n, k)
        for n in range(1, n_pq + 1)
        for k in sorted(net.neighbors(n))
        if k != 0
    ]
    beta_index = {pair: 2 * n_pq + pos for pos, pair in enumerate(pairs)}
    num_vars = 2 * n_pq + len(pairs)

    objective = np.zeros(num_vars)
    objective[:n_pq] = 1.0
    prog = ConvexProgram(num_vars=num_vars, linear_objective=objective)

    for n in range(1, n_pq + 1):
        row = np.zeros(num_vars)
        row[alpha_index[n]] = net.incident_sum[n - 1]
        for k in net.neighbors(n):
            if k != 0:
                row[beta_index[(n, k)]] -= net.branch_between(n, k).conductance
        if net.touches_slack(n):
            row[v_index[n]] = -net.slack_coupling[n - 1] * net.v0
        prog.equalities.append((row, float(net.injections[n - 1])))

    for n in range(1, n_pq + 1):
        prog.quad_ineqs.append((v_index[n], alpha_index[n]))
        prog.set_bounds(v_index[n], lower=net.limits.v_min, upper=net.limits.v_max)

    for (n, k), idx in beta_index.items():
        prog.rotated_cones.append((idx, alpha_index[n], alpha_index[k]))
        prog.set_bounds(idx, lower=0.0)

    for br in net.branches:
        row = np.zeros(num_vars)
        limit = br.current_limit
        if br.from_bus == 0:
            # |g (v_k - v0)| <= i_max, one-sided pair with the constant folded in
            row[v_index[br.to_bus]] = br.conductance
            prog.linear_ineqs.append((row.copy(), limit + br.conductance * net.v0))
            prog.linear_ineqs.append((-row, limit - br.conductance * net.v0))
        else:
            row[v_index[br.from_bus]] = br.conductance
            row[v_index[br.to_bus]] = -br.conductance
            prog.linear_ineqs.append((row.copy(), limit))
            prog.linear_ineqs.append((-row, limit))

    return P1Instance(
        program=prog, v_index=v_index, alpha_index=alpha_index, beta_index=beta_index
    )


def solve_p1(inst: P1Instance, cfg: SolverConfig | None = None) -> SolveOutcome:
    """Run phase I and the barrier path on an assembled instance."""
    return solve(inst.program, cfg or SolverConfig())


@dataclass(frozen=True)
class TightnessReport:
    alpha_gap: float
    beta_gap: float
    tol: float
    passed: bool


def default_tight_tol(inst: P1Instance) -> float:
    """1e-6 scaled by the injection magnitude, so the gap test is unit-free."""
    rhs = [abs(b) for _, b in inst.program.equalities]
    return 1e-6 * max(1.0, max(rhs) if rhs else 1.0)


def verify_tightness(
    inst: P1Instance, out: SolveOutcome, tight_tol: float | None = None
) -> TightnessReport:
    """Measure how far the relaxation variables sit from v^2 and v_n*v_k.

    At a true optimizer both gaps vanish; this check is what turns a
    relaxation optimum into a claimed load-flow solution, so it is always
    evaluated numerically and never assumed.
    """
    if out.status is not SolveStatus.OPTIMAL:
        raise ValueError("tightness is only defined for an Optimal outcome")
    tol = default_tight_tol(inst) if tight_tol is None else tight_tol
    x = out.x
    volts = inst.voltages(x)
    alphas = inst.alphas(x)
    alpha_gap = float(np.max(np.abs(alphas - volts**2))) if len(volts) else 0.0
    beta_gap = 0.0
    for (n, k), idx in inst.beta_index.items():
        beta_gap = max(beta_gap, abs(float(x[idx]) - float(volts[n - 1] * volts[k - 1])))
    return TightnessReport(
        alpha_gap=alpha_gap, beta_gap=beta_gap, tol=tol, passed=alpha_gap <= tol and beta_gap <= tol
    )


class ExistenceStatus(Enum):
    SOLUTION_FOUND = "SolutionFound"
    P1_INFEASIBLE = "P1Infeasible"
    UNDECIDED = "Undecided"


@dataclass
class ExistenceConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    strict_margin: float = 1e-9
    tight_tol: float | None = None


@dataclass(frozen=True, eq=False)
class ExistenceCertificate:
    """Machine-checkable existence verdict with margins and provenance."""

    status: ExistenceStatus
    voltages: VoltageProfile | None
    tightness_alpha: float | None
    tightness_beta: float | None
    residual_after_polish: float | None
    strict_security: bool | None
    condition1: Condition1Verdict

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "voltages": None if self.voltages is None else [float(v) for v in self.voltages.values],
            "tightness_alpha": self.tightness_alpha,
            "tightness_beta": self.tightness_beta,
            "residual_after_polish": self.residual_after_polish,
            "strict_security": self.strict_security,
            "condition1": self.condition1.to_dict(),
        }


def refine_and_check(
    net: Network,
    inst: P1Instance,
    out: SolveOutcome,
    cfg: ExistenceConfig | None = None,
) -> ExistenceCertificate:
    """Turn a solve outcome into a certificate.

    Optimal outcomes are accepted only after the tightness gaps pass, a
    Newton polish reconfirms the root, the strict security constraints hold
    at the polished voltages, and the voltage-band precondition holds.
    Everything else is Undecided; relaxation infeasibility is reported as
    its own status (existence not certified, not disproved).
    """
    cfg = cfg or ExistenceConfig()
    condition1 = check_condition1(net)

    if out.status is SolveStatus.INFEASIBLE:
        return ExistenceCertificate(
            status=ExistenceStatus.P1_INFEASIBLE,
            voltages=None,
            tightness_alpha=None,
            tightness_beta=None,
            residual_after_polish=None,
            strict_security=None,
            condition1=condition1,
        )
    if out.status is not SolveStatus.OPTIMAL:
        return ExistenceCertificate(
            status=ExistenceStatus.UNDECIDED,
            voltages=None,
            tightness_alpha=None,
            tightness_beta=None,
            residual_after_polish=None,
            strict_security=None,
            condition1=condition1,
        )

    tightness = verify_tightness(inst, out, cfg.tight_tol)
    raw = inst.voltages(out.x)
    polished = None
    residual_after = None
    strict_ok = None
    if tightness.passed:
        try:
            polished = newton_solve(net, raw, cfg.newton)
            residual_after = polished.residual_norm
            report = check_security(net, polished, SecurityMode.STRICT, cfg.strict_margin)
            strict_ok = report.ok
        except NoConvergence:
            polished = None

    certified = (
        tightness.passed
        and polished is not None
        and residual_after is not None
        and residual_after <= cfg.newton.tol
        and bool(strict_ok)
        and condition1.holds
    )
    return ExistenceCertificate(
        status=ExistenceStatus.SOLUTION_FOUND if certified else ExistenceStatus.UNDECIDED,
        voltages=polished if certified else None,
        tightness_alpha=tightness.alpha_gap,
        tightness_beta=tightness.beta_gap,
        residual_after_polish=residual_after,
        strict_security=strict_ok,
        condition1=condition1,
    )


@dataclass(eq=False)
class ExistenceRun:
    instance: P1Instance
    outcome: SolveOutcome
    certificate: ExistenceCertificate


def run_existence(net: Network, cfg: ExistenceConfig | None = None) -> ExistenceRun:
    """Assemble, solve, and certify in one call."""
    cfg = cfg or ExistenceConfig()
    inst = build_p1(net)
    out = solve_p1(inst, cfg.solver)
    cert = refine_and_check(net, inst, out, cfg)
    return ExistenceRun(instance=inst, outcome=out, certificate=cert)


__all__ = [
    "ExistenceCertificate",
    "ExistenceConfig",
    "ExistenceRun",
    "ExistenceStatus",
    "P1Instance",
    "TightnessReport",
    "build_p1",
    "default_tight_tol",
    "refine_and_check",
    "run_existence",
    "solve_p1",
    "verify_tightness",
]
