"""Load-flow residuals, Jacobians, a damped Newton solver, and security checks.

At each PQ bus n the load-flow mismatch is

    r_n(v) = (sum_k g_nk) v_n^2 - (sum_k g_nk v_k) v_n - p_n

with the sum over the neighbours K(n) and the slack voltage v0 substituted
for slack neighbours. The Jacobian of r is

    J_nn = 2 (sum_k g_nk) v_n - sum_k g_nk v_k
    J_nk = -g_nk v_n               for PQ neighbours k
    J_nk = 0                       otherwise

All functions are pure over immutable inputs and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError, NoConvergence
from .netmodel import Network


@dataclass(frozen=True, eq=False)
class VoltageProfile:
    """Candidate PQ voltages with their cached residual norm."""

    values: np.ndarray
    residual_norm: float
    newton_iterations: int | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, net: Network, values) -> "VoltageProfile":
        vals = _as_values(net, values)
        norm = float(np.max(np.abs(residual(net, vals)))) if len(vals) else 0.0
        return cls(values=vals, residual_norm=norm)

    def __len__(self) -> int:
        return len(self.values)


def _as_values(net: Network, v) -> np.ndarray:
    vals = v.values if isinstance(v, VoltageProfile) else np.asarray(v, dtype=float)
    if vals.ndim != 1 or len(vals) != net.n_pq:
        raise DimensionError(
            f"expected a voltage vector of length {net.n_pq}, got shape {vals.shape}"
        )
    return vals


def residual(net: Network, v) -> np.ndarray:
    """Load-flow mismatch vector at the PQ buses."""
    vals = _as_values(net, v)
    neighbour_flow = net.pq_coupling @ vals + net.slack_coupling * net.v0
    return net.incident_sum * vals**2 - neighbour_flow * vals - net.injections


def jacobian(net: Network, v) -> np.ndarray:
    """Analytic Jacobian of the load-flow mismatch with respect to PQ voltages."""
    vals = _as_values(net, v)
    neighbour_flow = net.pq_coupling @ vals + net.slack_coupling * net.v0
    jac = -net.pq_coupling * vals[:, None]
    diag = 2.0 * net.incident_sum * vals - neighbour_flow
    jac[np.diag_indices_from(jac)] = diag
    return jac


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-10
    max_iter: int = 50
    max_step_halvings: int = 30


def newton_solve(net: Network, v_init=None, cfg: NewtonConfig | None = None) -> VoltageProfile:
    """Damped Newton iteration on the load-flow equations.

    Starts flat (all voltages at v0) unless ``v_init`` is given. The step is
    halved while the residual norm fails to decrease. Raises NoConvergence
    when the iteration budget is exhausted, the Jacobian turns singular,
    or damping stalls.
    """
    cfg = cfg or NewtonConfig()
    if v_init is None:
        vals = np.full(net.n_pq, net.v0)
    else:
        vals = _as_values(net, v_init).copy()
        if np.any(vals <= 0):
            raise ValueError("initial voltages must be strictly positive")

    res = residual(net, vals)
    norm = float(np.max(np.abs(res)))
    for it in range(cfg.max_iter):
        if norm <= cfg.tol:
            return VoltageProfile(values=vals, residual_norm=norm, newton_iterations=it)
        try:
            step = np.linalg.solve(jacobian(net, vals), -res)
        except np.linalg.LinAlgError:
            raise NoConvergence("singular Jacobian in Newton step", it, norm) from None
        if not np.all(np.isfinite(step)):
            raise NoConvergence("non-finite Newton step", it, norm)

        scale = 1.0
        for _ in range(cfg.max_step_halvings + 1):
            trial = vals + scale * step
            trial_res = residual(net, trial)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm < norm:
                break
            scale *= 0.5
        else:
            raise NoConvergence("damping stalled without residual decrease", it, norm)
        vals, res, norm = trial, trial_res, trial_norm

    if norm <= cfg.tol:
        return VoltageProfile(values=vals, residual_norm=norm, newton_iterations=cfg.max_iter)
    raise NoConvergence("iteration budget exhausted", cfg.max_iter, norm)


class SecurityMode(Enum):
    STRICT = "strict"
    NON_STRICT = "non-strict"


@dataclass(frozen=True)
class SecurityReport:
    """Security slacks of a voltage profile; violations are reported, never thrown."""

    voltage_ok: bool
    current_ok: bool
    worst_voltage_margin: float
    worst_current_margin: float
    violations: tuple[tuple[str, float], ...]

    @property
    def ok(self) -> bool:
        return self.voltage_ok and self.current_ok


def check_security(
    net: Network,
    v,
    mode: SecurityMode = SecurityMode.STRICT,
    margin: float = 0.0,
) -> SecurityReport:
    """Evaluate band and current limits.

    Strict mode requires v_min + margin < v_n < v_max - margin and
    |g_nk (v_n - v_k)| < i_max - margin; non-strict mode uses <= with
    margin forced to zero. Reported margins already account for ``margin``,
    so ok means every margin is > 0 (strict) or >= 0 (non-strict).
    """
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    vals = _as_values(net, v)
    strict = mode is SecurityMode.STRICT
    eff = margin if strict else 0.0

    def bad(slack: float) -> bool:
        return slack <= 0 if strict else slack < 0

    violations: list[tuple[str, float]] = []
    voltage_margins = []
    for n in range(1, net.n_pq + 1):
        lo = vals[n - 1] - net.limits.v_min - eff
        hi = net.limits.v_max - vals[n - 1] - eff
        voltage_margins.extend((lo, hi))
        if bad(lo):
            violations.append((f"v_min[{n}]", lo))
        if bad(hi):
            violations.append((f"v_max[{n}]", hi))

    full = np.concatenate(([net.v0], vals))
    current_margins = []
    for br in net.branches:
        flow = br.conductance * (full[br.from_bus] - full[br.to_bus])
        slack = br.current_limit - abs(flow) - eff
        current_margins.append(slack)
        if bad(slack):
            violations.append((f"i[{br.from_bus}-{br.to_bus}]", slack))

    voltage_ok = not any(name.startswith("v") for name, _ in violations)
    current_ok = not any(name.startswith("i") for name, _ in violations)
    return SecurityReport(
        voltage_ok=voltage_ok,
        current_ok=current_ok,
        worst_voltage_margin=float(min(voltage_margins)),
        worst_current_margin=float(min(current_margins)) if current_margins else float("inf"),
        violations=tuple(violations),
    )
