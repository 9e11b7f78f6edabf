"""Equality-constrained log-barrier interior-point solver.

Maximizes a linear objective over linear equalities plus three inequality
classes: linear rows a.x <= b, scalar quadratics x_i^2 <= x_j, and rotated
cones x_i^2 <= x_j*x_k with x_j, x_k >= 0 (optional variable bounds fold
into the linear rows). Each class contributes the standard self-concordant
barrier:

    -log(b - a.x)
    -log(x_j - x_i^2)
    -log(x_j*x_k - x_i^2) - log(x_j) - log(x_k)

The centering problems minimize  t*f0(x) + Phi(x)  subject to A x = b by a
feasible-start Newton method with backtracking; t grows by 10x per outer
stage from 1/mu0 until the duality-gap bound nu/t (nu = total log count)
drops below the requested tolerance.

Phase I minimizes a uniform slack s over {f_i(x) <= s, A x = b} with the
same machinery, which either produces a strictly feasible interior point
(s* decisively negative) or a violation measure s* > 0. Rotated cones
enter phase I through their smoothed second-order-cone residual

    sqrt(4 x_i^2 + (x_j - x_k)^2 + eps^2) - (x_j + x_k) <= s,

a convex and everywhere-smooth over-approximation whose satisfaction with
s < 0 implies strict membership in the cone.

Infeasibility is decided three-valued: s* above 1e-6 is Infeasible, s*
below the feasibility tolerance is feasible, and the band in between is
reported as NumericalFailure (cannot decide).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg


class SolveStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    MAX_ITER = "MaxIter"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass
class ConvexProgram:
    """Program data; the objective vector is maximized.

    equalities and linear_ineqs hold (coefficients, rhs) pairs; quad_ineqs
    holds (i, j) meaning x_i^2 <= x_j; rotated_cones holds (i, j, k) meaning
    x_i^2 <= x_j*x_k with x_j, x_k >= 0. lower/upper map variable index to
    an optional bound.
    """

    num_vars: int
    linear_objective: np.ndarray
    equalities: list = field(default_factory=list)
    linear_ineqs: list = field(default_factory=list)
    quad_ineqs: list = field(default_factory=list)
    rotated_cones: list = field(default_factory=list)
    lower: dict = field(default_factory=dict)
    upper: dict = field(default_factory=dict)

    def set_bounds(self, index: int, lower: float | None = None, upper: float | None = None):
        if lower is not None:
            self.lower[index] = float(lower)
        if upper is not None:
            self.upper[index] = float(upper)

    def validate(self):
        n = self.num_vars
        if n < 1:
            raise ValueError("program needs at least one variable")
        if len(np.asarray(self.linear_objective, dtype=float)) != n:
            raise ValueError("objective length does not match num_vars")
        for name, rows in (("equality", self.equalities), ("inequality", self.linear_ineqs)):
            for coeffs, _ in rows:
                if len(np.asarray(coeffs, dtype=float)) != n:
                    raise ValueError(f"{name} row length does not match num_vars")
        for i, j in self.quad_ineqs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"quad inequality ({i},{j}) out of range")
        for i, j, k in self.rotated_cones:
            if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
                raise ValueError(f"rotated cone ({i},{j},{k}) out of range")
        for idx in list(self.lower) + list(self.upper):
            if not 0 <= idx < n:
                raise ValueError(f"bound index {idx} out of range")


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8                      # duality-gap bound at exit
    max_iter: int = 200                    # Newton steps per centering stage
    mu0: float = 1.0                       # initial barrier weight
    mu_shrink: float = 0.1                 # barrier weight factor per outer stage
    feas_tol: float = 1e-8
    interior_eps: float = 1e-10
    infeasibility_threshold: float = 1e-6  # phase-I optimum above this is Infeasible
    center_tol: float = 1e-10              # Newton decrement^2 / 2 at a center
    center_slack: float = 1e-6             # plateaued decrement still accepted as centered
    armijo: float = 0.25
    backtrack: float = 0.5
    max_backtracks: int = 60
    phase1_gap: float = 1e-10
    phase1_cap: float = 1.0                # phase-I slack is kept above -cap
    phase1_box: float = 1e4                # soft coordinate box keeping phase I bounded
    cone_smoothing: float = 1e-12


@dataclass(eq=False)
class SolveOutcome:
    status: SolveStatus
    x: np.ndarray | None
    objective: float
    kkt_residual: float
    iterations: int
    phase1_violation: float
    outer_objectives: tuple = ()
    message: str = ""


@dataclass(eq=False)
class Phase1Result:
    status: SolveStatus                    # OPTIMAL means a strictly feasible point was found
    point: np.ndarray | None
    violation: float
    iterations: int = 0


class _KKTFailure(Exception):
    """KKT system unsolvable beyond the regularization ladder."""


# -- barrier terms ------------------------------------------------------------


class _QuadTerm:
    """-log(x_j - x_i^2 [+ x_s]) for the constraint x_i^2 <= x_j [+ s]."""

    nu = 1

    def __init__(self, i: int, j: int, s_index: int | None = None):
        self.i, self.j, self.s = i, j, s_index

    def logs(self, x):
        slack = x[self.j] - x[self.i] ** 2
        if self.s is not None:
            slack += x[self.s]
        return (slack,)

    def add_grad_hess(self, x, grad, hess):
        (slack,) = self.logs(x)
        gs = np.zeros(len(x))
        gs[self.j] += 1.0
        gs[self.i] -= 2.0 * x[self.i]
        if self.s is not None:
            gs[self.s] += 1.0
        grad -= gs / slack
        hess += np.outer(gs, gs) / slack**2
        hess[self.i, self.i] += 2.0 / slack


class _ConeTerm:
    """-log(x_j*x_k - x_i^2) - log(x_j) - log(x_k) for the rotated cone."""

    nu = 3

    def __init__(self, i: int, j: int, k: int):
        self.i, self.j, self.k = i, j, k

    def logs(self, x):
        q = x[self.j] * x[self.k] - x[self.i] ** 2
        return (q, x[self.j], x[self.k])

    def add_grad_hess(self, x, grad, hess):
        i, j, k = self.i, self.j, self.k
        q, xj, xk = self.logs(x)
        gq = np.zeros(len(x))
        gq[i] += -2.0 * x[i]
        gq[j] += xk
        gq[k] += xj
        grad -= gq / q
        grad[j] -= 1.0 / xj
        grad[k] -= 1.0 / xk
        hess += np.outer(gq, gq) / q**2
        hess[i, i] += 2.0 / q
        hess[j, k] -= 1.0 / q
        hess[k, j] -= 1.0 / q
        hess[j, j] += 1.0 / xj**2
        hess[k, k] += 1.0 / xk**2


class _SocShiftTerm:
    """Phase-I surrogate for a rotated cone: -log(x_j + x_k + s - r(x)) with
    r = sqrt(4 x_i^2 + (x_j - x_k)^2 + eps^2)."""

    nu = 1

    def __init__(self, i: int, j: int, k: int, s_index: int, eps: float):
        self.i, self.j, self.k, self.s = i, j, k, s_index
        self.eps = eps

    def _radius(self, x):
        d = x[self.j] - x[self.k]
        return d, float(np.sqrt(4.0 * x[self.i] ** 2 + d * d + self.eps**2))

    def logs(self, x):
        d, r = self._radius(x)
        return (x[self.j] + x[self.k] + x[self.s] - r,)

    def add_grad_hess(self, x, grad, hess):
        i, j, k, s = self.i, self.j, self.k, self.s
        d, r = self._radius(x)
        (slack,) = self.logs(x)
        # gradient of f = r - x_j - x_k - s; barrier is -log(-f)
        gf = np.zeros(len(x))
        gf[i] += 4.0 * x[i] / r
        gf[j] += d / r - 1.0
        gf[k] += -d / r - 1.0
        gf[s] += -1.0
        grad += gf / slack
        hess += np.outer(gf, gf) / slack**2
        # curvature of r: H_u/(2r) - (grad u)(grad u)^T/(4 r^3), u = r^2
        gu = np.zeros(len(x))
        gu[i] += 8.0 * x[i]
        gu[j] += 2.0 * d
        gu[k] += -2.0 * d
        ejk = np.zeros(len(x))
        ejk[j] += 1.0
        ejk[k] -= 1.0
        hr = -np.outer(gu, gu) / (4.0 * r**3)
        hr += np.outer(ejk, ejk) / r
        hr[i, i] += 4.0 / r
        hess += hr / slack


class _Barrier:
    """Batched barrier over one linear block plus quadratic/cone terms."""

    def __init__(self, dim: int, lin_rows: np.ndarray, lin_rhs: np.ndarray, terms: list):
        self.dim = dim
        self.lin_rows = lin_rows
        self.lin_rhs = lin_rhs
        self.terms = terms
        self.nu = len(lin_rhs) + sum(t.nu for t in terms)

    def slacks(self, x) -> np.ndarray:
        parts = [self.lin_rhs - self.lin_rows @ x]
        for term in self.terms:
            parts.append(np.asarray(term.logs(x)))
        return np.concatenate(parts) if parts else np.zeros(0)

    def grad_hess(self, x):
        grad = np.zeros(self.dim)
        hess = np.zeros((self.dim, self.dim))
        if len(self.lin_rhs):
            s = self.lin_rhs - self.lin_rows @ x
            inv = 1.0 / s
            grad += self.lin_rows.T @ inv
            hess += (self.lin_rows * (inv**2)[:, None]).T @ self.lin_rows
        for term in self.terms:
            term.add_grad_hess(x, grad, hess)
        return grad, hess


def _bound_rows(prog: ConvexProgram, dim: int):
    rows, rhs = [], []
    for coeffs, b in prog.linear_ineqs:
        row = np.zeros(dim)
        row[: prog.num_vars] = np.asarray(coeffs, dtype=float)
        rows.append(row)
        rhs.append(float(b))
    for idx in sorted(prog.lower):
        row = np.zeros(dim)
        row[idx] = -1.0
        rows.append(row)
        rhs.append(-prog.lower[idx])
    for idx in sorted(prog.upper):
        row = np.zeros(dim)
        row[idx] = 1.0
        rows.append(row)
        rhs.append(prog.upper[idx])
    if rows:
        return np.array(rows), np.array(rhs)
    return np.zeros((0, dim)), np.zeros(0)


def _main_barrier(prog: ConvexProgram) -> _Barrier:
    rows, rhs = _bound_rows(prog, prog.num_vars)
    terms = [_QuadTerm(i, j) for i, j in prog.quad_ineqs]
    terms += [_ConeTerm(i, j, k) for i, j, k in prog.rotated_cones]
    return _Barrier(prog.num_vars, rows, rhs, terms)


def _phase1_barrier(prog: ConvexProgram, cfg: SolverConfig) -> _Barrier:
    dim = prog.num_vars + 1
    rows, rhs = _bound_rows(prog, dim)
    rows[:, -1] = -1.0  # every f_i(x) <= s
    # soft coordinate box |x_i| <= box + s: keeps every centering stage bounded
    # even when the program's feasible set is unbounded
    box = np.zeros((2 * prog.num_vars, dim))
    for i in range(prog.num_vars):
        box[2 * i, i] = 1.0
        box[2 * i + 1, i] = -1.0
    box[:, -1] = -1.0
    cap = np.zeros(dim)
    cap[-1] = -1.0  # s >= -phase1_cap
    rows = np.vstack([rows, box, cap])
    rhs = np.concatenate([rhs, np.full(2 * prog.num_vars, cfg.phase1_box), [cfg.phase1_cap]])
    terms = [_QuadTerm(i, j, s_index=dim - 1) for i, j in prog.quad_ineqs]
    terms += [
        _SocShiftTerm(i, j, k, s_index=dim - 1, eps=cfg.cone_smoothing)
        for i, j, k in prog.rotated_cones
    ]
    return _Barrier(dim, rows, rhs, terms)


def _phase1_worst(prog: ConvexProgram, x: np.ndarray, eps: float, box: float) -> float:
    """Largest constraint residual f_i(x) over the phase-I inequality terms."""
    worst = float(np.max(np.abs(x), initial=0.0) - box)
    for coeffs, b in prog.linear_ineqs:
        worst = max(worst, float(np.asarray(coeffs, dtype=float) @ x - b))
    for idx, lo in prog.lower.items():
        worst = max(worst, lo - x[idx])
    for idx, up in prog.upper.items():
        worst = max(worst, x[idx] - up)
    for i, j in prog.quad_ineqs:
        worst = max(worst, x[i] ** 2 - x[j])
    for i, j, k in prog.rotated_cones:
        r = np.sqrt(4.0 * x[i] ** 2 + (x[j] - x[k]) ** 2 + eps**2)
        worst = max(worst, float(r - x[j] - x[k]))
    return worst


# -- equality preprocessing ----------------------------------------------------


def _equality_matrix(prog: ConvexProgram):
    """Rank-reduced equality system (A, b, inconsistent, residual)."""
    if not prog.equalities:
        return np.zeros((0, prog.num_vars)), np.zeros(0), False, 0.0
    full = np.array([np.asarray(a, dtype=float) for a, _ in prog.equalities])
    rhs = np.array([float(b) for _, b in prog.equalities])
    x_ls, *_ = np.linalg.lstsq(full, rhs, rcond=None)
    residual = float(np.max(np.abs(full @ x_ls - rhs)))
    if residual > 1e-9 * (1.0 + np.max(np.abs(rhs))):
        return full, rhs, True, residual
    kept: list[int] = []
    basis: list[np.ndarray] = []
    for idx, row in enumerate(full):
        r = row.copy()
        for q in basis:
            r -= (q @ r) * q
        for q in basis:  # second pass stabilizes near-dependent rows
            r -= (q @ r) * q
        norm = np.linalg.norm(r)
        if norm > 1e-10 * (1.0 + np.linalg.norm(row)):
            kept.append(idx)
            basis.append(r / norm)
    return full[kept], rhs[kept], False, residual


# -- Newton centering -----------------------------------------------------------


def _kkt_solve(hess, eq_rows, rhs_top):
    """Solve the symmetric KKT system [[H, A^T], [A, 0]] via dense factorization,
    escalating through diagonal regularization and least squares."""
    n = hess.shape[0]
    k = eq_rows.shape[0]
    scale = float(np.mean(np.abs(np.diag(hess)))) + 1.0
    rhs = rhs_top if k == 0 else np.concatenate([rhs_top, np.zeros(k)])
    kkt0 = None
    for reg in (0.0, 1e-12, 1e-9, 1e-6):
        hr = hess + (reg * scale) * np.eye(n)
        if k == 0:
            kkt = hr
        else:
            kkt = np.block([[hr, eq_rows.T], [eq_rows, np.zeros((k, k))]])
        if kkt0 is None:
            kkt0 = kkt
        try:
            with warnings.catch_warnings():
                # extreme-barrier conditioning is expected; the back-error
                # check below decides whether the solution is usable
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                sol = scipy.linalg.solve(kkt, rhs, assume_a="sym")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError):
            continue
        if not np.all(np.isfinite(sol)):
            continue
        back_err = np.max(np.abs(kkt @ sol - rhs))
        if back_err <= 1e-8 * (np.max(np.abs(kkt)) * np.max(np.abs(sol)) + np.max(np.abs(rhs)) + 1.0):
            return sol[:n]
    sol, *_ = np.linalg.lstsq(kkt0, rhs, rcond=None)
    if np.all(np.isfinite(sol)):
        back_err = np.max(np.abs(kkt0 @ sol - rhs))
        if back_err <= 1e-6 * (np.max(np.abs(kkt0)) * np.max(np.abs(sol)) + np.max(np.abs(rhs)) + 1.0):
            return sol[:n]
    raise _KKTFailure("KKT system singular beyond recovery")


def _center(barrier: _Barrier, eq_rows: np.ndarray, c_min: np.ndarray, t: float,
            x0: np.ndarray, cfg: SolverConfig):
    """Minimize t*(c_min.x) + Phi(x) subject to the equalities holding at x0.

    Line search differences the barrier through slack ratios, which stays
    accurate when t is large and the absolute objective values no longer
    resolve the decrement. Returns (x, converged, iterations, decrement^2).
    """
    x = x0
    lam2 = 0.0
    best_lam2 = np.inf
    stale = 0
    for it in range(cfg.max_iter):
        grad_phi, hess = barrier.grad_hess(x)
        grad = t * c_min + grad_phi
        dx = _kkt_solve(hess, eq_rows, -grad)
        lam2 = max(float(dx @ hess @ dx), 0.0)
        if lam2 / 2.0 <= cfg.center_tol:
            return x, True, it, lam2
        # near the rounding floor of the slack evaluations the decrement
        # plateaus; a plateaued but small decrement is an acceptable center
        if lam2 < 0.5 * best_lam2:
            best_lam2 = lam2
            stale = 0
        else:
            stale += 1
        if stale >= 12:
            return x, lam2 / 2.0 <= cfg.center_slack, it, lam2
        s0 = barrier.slacks(x)
        c_dx = float(c_min @ dx)
        step = 1.0
        accepted = False
        for _ in range(cfg.max_backtracks):
            xt = x + step * dx
            st = barrier.slacks(xt)
            if np.all(st > 0.0):
                dphi = t * step * c_dx - float(np.sum(np.log(st / s0)))
                if dphi <= -cfg.armijo * step * lam2:
                    accepted = True
                    break
            step *= cfg.backtrack
        if not accepted:
            # rounding floor: the decrement no longer produces descent
            return x, lam2 / 2.0 <= cfg.center_slack, it + 1, lam2
        x = xt
    return x, False, cfg.max_iter, lam2


# -- public operations -----------------------------------------------------------


def phase1(prog: ConvexProgram, cfg: SolverConfig | None = None) -> Phase1Result:
    """Find a strictly feasible interior point or measure infeasibility.

    Minimizes the uniform slack s over {f_i(x) <= s, A x = b}. OPTIMAL carries
    the point; INFEASIBLE carries the minimized violation; the undecidable
    band between feas_tol and the infeasibility threshold, and any
    breakdown, comes back as NUMERICAL_FAILURE.
    """
    cfg = cfg or SolverConfig()
    prog.validate()
    eq_rows, eq_rhs, inconsistent, eq_residual = _equality_matrix(prog)
    if inconsistent:
        return Phase1Result(SolveStatus.INFEASIBLE, None, violation=eq_residual)

    n = prog.num_vars
    if len(eq_rhs):
        x0, *_ = np.linalg.lstsq(eq_rows, eq_rhs, rcond=None)
    else:
        x0 = np.zeros(n)
        for idx in range(n):
            lo, up = prog.lower.get(idx), prog.upper.get(idx)
            if lo is not None and up is not None:
                x0[idx] = 0.5 * (lo + up)
            elif lo is not None:
                x0[idx] = lo + 1.0
            elif up is not None:
                x0[idx] = up - 1.0

    if not (prog.linear_ineqs or prog.lower or prog.upper or prog.quad_ineqs or prog.rotated_cones):
        return Phase1Result(SolveStatus.OPTIMAL, x0, violation=0.0)

    barrier = _phase1_barrier(prog, cfg)
    s0 = max(
        _phase1_worst(prog, x0, cfg.cone_smoothing, cfg.phase1_box), -cfg.phase1_cap + 0.5
    ) + 1.0
    z = np.append(x0, s0)
    eq_ext = np.hstack([eq_rows, np.zeros((eq_rows.shape[0], 1))])
    c_min = np.zeros(n + 1)
    c_min[-1] = 1.0

    # the central value s_t brackets the optimum: s_t - gap <= s* <= s_t, so
    # most instances decide long before the barrier weight gets extreme
    t = 1.0 / cfg.mu0
    iters = 0
    infeasible_decided = False
    try:
        while True:
            z, converged, it, _ = _center(barrier, eq_ext, c_min, t, z, cfg)
            iters += it
            if not converged:
                return Phase1Result(
                    SolveStatus.NUMERICAL_FAILURE, None, max(float(z[-1]), 0.0), iters
                )
            s_t = float(z[-1])
            gap = barrier.nu / t
            if not infeasible_decided and s_t <= cfg.feas_tol:
                break
            if s_t - gap > cfg.infeasibility_threshold:
                infeasible_decided = True
                if gap <= 1e-3 * s_t:  # violation measure refined to ~0.1%
                    break
            if gap <= cfg.phase1_gap:
                break
            t /= cfg.mu_shrink
    except _KKTFailure:
        return Phase1Result(SolveStatus.NUMERICAL_FAILURE, None, max(float(z[-1]), 0.0), iters)

    s_star = float(z[-1])
    x = z[:n]
    if s_star > cfg.infeasibility_threshold:
        if np.max(np.abs(x), initial=0.0) >= 0.99 * cfg.phase1_box:
            # the soft box shaped the optimum; the violation measure is not
            # a property of the program, so refuse to declare infeasibility
            return Phase1Result(SolveStatus.NUMERICAL_FAILURE, None, s_star, iters)
        return Phase1Result(SolveStatus.INFEASIBLE, None, s_star, iters)
    if s_star > cfg.feas_tol:
        return Phase1Result(SolveStatus.NUMERICAL_FAILURE, None, max(s_star, 0.0), iters)
    main = _main_barrier(prog)
    if main.nu and float(np.min(main.slacks(x))) < cfg.interior_eps:
        return Phase1Result(SolveStatus.NUMERICAL_FAILURE, None, max(s_star, 0.0), iters)
    return Phase1Result(SolveStatus.OPTIMAL, x, max(s_star, 0.0), iters)


def solve(prog: ConvexProgram, cfg: SolverConfig | None = None) -> SolveOutcome:
    """Phase I followed by the barrier path; on OPTIMAL the reported
    kkt_residual is the certified duality-gap bound nu * mu_final <= tol."""
    cfg = cfg or SolverConfig()
    prog.validate()
    c = np.asarray(prog.linear_objective, dtype=float)

    stage1 = phase1(prog, cfg)
    if stage1.status is not SolveStatus.OPTIMAL:
        return SolveOutcome(
            status=stage1.status,
            x=None,
            objective=float("nan"),
            kkt_residual=float("nan"),
            iterations=stage1.iterations,
            phase1_violation=stage1.violation,
            message="phase I did not produce a strictly feasible point"
            if stage1.status is SolveStatus.NUMERICAL_FAILURE
            else "",
        )

    barrier = _main_barrier(prog)
    if barrier.nu == 0:
        return SolveOutcome(
            status=SolveStatus.NUMERICAL_FAILURE,
            x=stage1.point,
            objective=float(c @ stage1.point),
            kkt_residual=float("nan"),
            iterations=stage1.iterations,
            phase1_violation=stage1.violation,
            message="program has no inequality terms; barrier stage undefined",
        )
    eq_rows, _, _, _ = _equality_matrix(prog)

    x = stage1.point
    t = 1.0 / cfg.mu0
    iters = 0
    lam2 = 0.0
    status = SolveStatus.OPTIMAL
    outer_objectives: list[float] = []
    message = ""
    try:
        while True:
            x, converged, it, lam2 = _center(barrier, eq_rows, -c, t, x, cfg)
            iters += it
            if not converged:
                status = SolveStatus.MAX_ITER
                message = "centering exhausted its Newton budget"
                break
            outer_objectives.append(float(c @ x))
            # target half the tolerance so the off-center correction below
            # still certifies a gap within tol
            if barrier.nu / t <= 0.5 * cfg.tol:
                break
            t /= cfg.mu_shrink
    except _KKTFailure as exc:
        status = SolveStatus.NUMERICAL_FAILURE
        message = str(exc)

    if status is SolveStatus.OPTIMAL and constraint_violations(prog, x) > cfg.feas_tol:
        status = SolveStatus.NUMERICAL_FAILURE
        message = "final point failed the independent feasibility check"

    gap_bound = (barrier.nu / t) * (1.0 + float(np.sqrt(lam2)))
    return SolveOutcome(
        status=status,
        x=x,
        objective=float(c @ x),
        kkt_residual=gap_bound,
        iterations=iters,
        phase1_violation=stage1.violation,
        outer_objectives=tuple(outer_objectives),
        message=message,
    )


def constraint_violations(prog: ConvexProgram, x: np.ndarray) -> float:
    """Largest constraint violation at x, evaluated directly from the program
    data (independent of any solver bookkeeping); feasible points give <= 0."""
    worst = -np.inf
    for coeffs, b in prog.equalities:
        worst = max(worst, abs(float(np.asarray(coeffs, dtype=float) @ x - b)))
    for coeffs, b in prog.linear_ineqs:
        worst = max(worst, float(np.asarray(coeffs, dtype=float) @ x - b))
    for idx, lo in prog.lower.items():
        worst = max(worst, lo - float(x[idx]))
    for idx, up in prog.upper.items():
        worst = max(worst, float(x[idx]) - up)
    for i, j in prog.quad_ineqs:
        worst = max(worst, float(x[i] ** 2 - x[j]))
    for i, j, k in prog.rotated_cones:
        worst = max(worst, float(x[i] ** 2 - x[j] * x[k]), float(-x[j]), float(-x[k]))
    return worst
