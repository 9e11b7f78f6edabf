"""Uniqueness certificates via Jacobian nonsingularity over the security box.

A load-flow solution inside the security region is unique whenever the
mismatch Jacobian J(v) is nonsingular on that region. Every entry of J is
affine in v, so over the box [v_min, v_max]^N the family of Jacobians has
an exact interval enclosure center +/- radius. Two sound tests certify
that the enclosure contains no singular matrix:

  * Gershgorin: every row's worst-case diagonal strictly dominates the
    worst-case off-diagonal absolute sum;
  * midpoint-radius regularity: spectral_radius(|C^-1| R) < 1, with the
    spectral radius of the nonnegative matrix |C^-1| R bounded from above
    by Collatz-Wielandt ratios under power iteration.

Both tests relax the actual search region (the box plus current-limit
cuts) to the plain box, which only enlarges the matrix family and keeps
the certificates sound. The converse direction is a seeded multi-start
projected-gradient search that minimizes the smallest singular value of
J(v) over the polytope; a point with sigma_min ~ 0 together with the
corresponding right singular direction is a verified witness that the
nonsingularity hypothesis fails. Failure to find one is reported as
Unknown, never as a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .loadflow import VoltageProfile, jacobian
from .netmodel import Network


class UniquenessStatus(Enum):
    UNIQUE_CERTIFIED = "UniqueCertified"
    COUNTEREXAMPLE_FOUND = "CounterexampleFound"
    UNKNOWN = "Unknown"


class CertificateMethod(Enum):
    GERSHGORIN = "Gershgorin"
    MIDPOINT_RADIUS = "MidpointRadius"
    NONE = "none"


@dataclass(frozen=True, eq=False)
class Counterexample:
    """A security-feasible voltage vector with a unit null direction of J."""

    voltages: VoltageProfile
    gamma: np.ndarray
    sigma_min: float


@dataclass(frozen=True, eq=False)
class UniquenessCertificate:
    status: UniquenessStatus
    method: CertificateMethod
    margin: float
    counterexample: Counterexample | None = None

    def to_dict(self) -> dict:
        ce = None
        if self.counterexample is not None:
            ce = {
                "v": [float(v) for v in self.counterexample.voltages.values],
                "gamma": [float(g) for g in self.counterexample.gamma],
                "sigma_min": self.counterexample.sigma_min,
            }
        return {
            "status": self.status.value,
            "method": self.method.value,
            "margin": self.margin,
            "counterexample": ce,
        }


@dataclass(frozen=True, eq=False)
class IntervalJacobian:
    """Entrywise-exact enclosure of J(v) over the box [v_min, v_max]^N."""

    center: np.ndarray
    radius: np.ndarray


def interval_jacobian(net: Network) -> IntervalJacobian:
    """Center at the box midpoint; radii from the affine entry coefficients.

    J_nn = 2 (sum_k g_nk) v_n - sum_{PQ k} g_nk v_k - g_n0 v0 has half-range
    (2 sum_k g_nk + sum_{PQ k} g_nk) * w/2 over a box of width w, and the
    off-diagonal J_nk = -g_nk v_n has half-range g_nk * w/2.
    """
    mid = 0.5 * (net.limits.v_min + net.limits.v_max)
    half_width = 0.5 * (net.limits.v_max - net.limits.v_min)
    center = jacobian(net, np.full(net.n_pq, mid))
    off_sums = net.pq_coupling.sum(axis=1)
    radius = net.pq_coupling * half_width
    radius[np.diag_indices_from(radius)] = (2.0 * net.incident_sum + off_sums) * half_width
    return IntervalJacobian(center=center, radius=radius)


def gershgorin_certificate(net: Network) -> UniquenessCertificate:
    """Row-wise dominance over the whole box.

    Row n certifies when 2 (sum_k g_nk) v_min - g_n0 v0 - (sum_{PQ k} g_nk) v_max
    exceeds (sum_{PQ k} g_nk) v_max; the margin is the smallest row slack.
    """
    v_min, v_max = net.limits.v_min, net.limits.v_max
    off_sums = net.pq_coupling.sum(axis=1)
    diag_floor = 2.0 * net.incident_sum * v_min - net.slack_coupling * net.v0 - off_sums * v_max
    off_ceiling = off_sums * v_max
    margin = float(np.min(diag_floor - off_ceiling))
    status = UniquenessStatus.UNIQUE_CERTIFIED if margin > 0 else UniquenessStatus.UNKNOWN
    return UniquenessCertificate(status=status, method=CertificateMethod.GERSHGORIN, margin=margin)


def _spectral_radius_upper(matrix: np.ndarray, max_iter: int = 10000, tol: float = 1e-13) -> float:
    """Upper bound on the spectral radius of a nonnegative matrix.

    Power iteration on M + I (aperiodic, same Perron structure) keeps the
    iterate positive; each Collatz-Wielandt ratio max_i (Mx)_i / x_i is a
    rigorous upper bound, so returning the best observed bound never
    under-certifies.
    """
    n = matrix.shape[0]
    x = np.full(n, 1.0 / n)
    best = np.inf
    prev = np.inf
    for _ in range(max_iter):
        mx = matrix @ x
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(x > 0, mx / np.where(x > 0, x, 1.0), np.where(mx > 0, np.inf, 0.0))
        bound = float(np.max(ratios))
        best = min(best, bound)
        if abs(prev - bound) <= tol * (1.0 + abs(bound)):
            break
        prev = bound
        x = mx + x
        norm = float(np.max(x))
        if norm == 0.0:
            return 0.0
        x /= norm
    return best


def midpoint_radius_certificate(net: Network) -> UniquenessCertificate:
    """Beeck-style interval regularity: rho(|C^-1| R) < 1 over the box."""
    enclosure = interval_jacobian(net)
    try:
        center_inv = np.linalg.inv(enclosure.center)
    except np.linalg.LinAlgError:
        return UniquenessCertificate(
            status=UniquenessStatus.UNKNOWN,
            method=CertificateMethod.MIDPOINT_RADIUS,
            margin=0.0,
        )
    rho = _spectral_radius_upper(np.abs(center_inv) @ enclosure.radius)
    margin = 1.0 - rho
    status = UniquenessStatus.UNIQUE_CERTIFIED if margin > 0 else UniquenessStatus.UNKNOWN
    return UniquenessCertificate(
        status=status, method=CertificateMethod.MIDPOINT_RADIUS, margin=margin
    )


# -- falsification ------------------------------------------------------------


@dataclass(frozen=True)
class FalsifyConfig:
    starts: int = 32
    seed: int = 42
    singular_tol: float | None = None      # default: 1e-8 * ||center||_inf
    max_rounds: int = 200                  # gradient steps per start
    max_step_shrinks: int = 40
    projection_cycles: int = 200


def _current_halfspaces(net: Network):
    """Rows (a, b) with a.v <= b for both signs of every branch current limit."""
    rows = []
    for br in net.branches:
        a = np.zeros(net.n_pq)
        if br.from_bus == 0:
            a[br.to_bus - 1] = br.conductance
            offset = br.conductance * net.v0
            rows.append((a.copy(), br.current_limit + offset))
            rows.append((-a, br.current_limit - offset))
        else:
            a[br.from_bus - 1] = br.conductance
            a[br.to_bus - 1] = -br.conductance
            rows.append((a.copy(), br.current_limit))
            rows.append((-a, br.current_limit))
    return rows


def _project_security(net: Network, v: np.ndarray, cfg: FalsifyConfig) -> np.ndarray:
    """Cyclic projection onto the box intersected with the current-limit cuts."""
    rows = _current_halfspaces(net)
    out = v.copy()
    for _ in range(cfg.projection_cycles):
        out = np.clip(out, net.limits.v_min, net.limits.v_max)
        worst = 0.0
        for a, b in rows:
            excess = float(a @ out - b)
            if excess > 0:
                out -= a * (excess / float(a @ a))
                worst = max(worst, excess)
        box_excess = max(
            float(np.max(net.limits.v_min - out, initial=0.0)),
            float(np.max(out - net.limits.v_max, initial=0.0)),
        )
        if worst <= 1e-12 and box_excess <= 1e-12:
            break
    return out


def _security_violation(net: Network, v: np.ndarray) -> float:
    worst = max(
        float(np.max(net.limits.v_min - v, initial=-np.inf)),
        float(np.max(v - net.limits.v_max, initial=-np.inf)),
    )
    for a, b in _current_halfspaces(net):
        worst = max(worst, float(a @ v - b))
    return worst


def _sigma_min_grad(net: Network, v: np.ndarray):
    """Smallest singular value of J(v), its right singular vector, and the
    gradient d sigma / d v_m = u^T (dJ/dv_m) gamma."""
    u_mat, svals, vt = np.linalg.svd(jacobian(net, v))
    sigma = float(svals[-1])
    u = u_mat[:, -1]
    gamma = vt[-1]
    coupling = net.pq_coupling
    grad = u * (2.0 * net.incident_sum * gamma - coupling @ gamma) - coupling @ (u * gamma)
    return sigma, gamma, grad


def falsify_p2(net: Network, cfg: FalsifyConfig | None = None) -> UniquenessCertificate:
    """Seeded multi-start projected gradient descent on sigma_min(J(v)).

    Candidates below the singularity threshold are polished toward the
    numerical floor, then re-verified from scratch (null residual, unit
    direction, security membership) before a counterexample is reported.
    The margin carries the smallest sigma_min observed either way.
    """
    cfg = cfg or FalsifyConfig()
    enclosure = interval_jacobian(net)
    scale = float(np.max(np.sum(np.abs(enclosure.center), axis=1)))
    singular_tol = cfg.singular_tol if cfg.singular_tol is not None else 1e-8 * scale
    polish_target = max(1e-14 * scale, singular_tol * 1e-6)

    rng = np.random.default_rng(cfg.seed)
    best_sigma = np.inf
    best_v = None
    span = net.limits.v_max - net.limits.v_min
    for _ in range(cfg.starts):
        v = _project_security(
            net, rng.uniform(net.limits.v_min, net.limits.v_max, net.n_pq), cfg
        )
        sigma, _, grad = _sigma_min_grad(net, v)
        step = max(span, 1e-3)
        for _ in range(cfg.max_rounds):
            if sigma <= polish_target:
                break
            moved = False
            for _ in range(cfg.max_step_shrinks):
                trial = _project_security(net, v - step * grad, cfg)
                trial_sigma, _, trial_grad = _sigma_min_grad(net, trial)
                if trial_sigma < sigma:
                    v, sigma, grad = trial, trial_sigma, trial_grad
                    step *= 1.5
                    moved = True
                    break
                step *= 0.5
            if not moved:
                break
        if sigma < best_sigma:
            best_sigma, best_v = sigma, v
        if best_sigma <= polish_target:
            break

    if best_v is not None and best_sigma <= singular_tol:
        sigma, gamma, _ = _sigma_min_grad(net, best_v)
        null_residual = float(np.max(np.abs(jacobian(net, best_v) @ gamma)))
        unit_defect = abs(float(gamma @ gamma) - 1.0)
        if (
            null_residual <= singular_tol
            and unit_defect <= 1e-9
            and _security_violation(net, best_v) <= 1e-9
        ):
            witness = Counterexample(
                voltages=VoltageProfile.from_values(net, best_v),
                gamma=gamma,
                sigma_min=sigma,
            )
            return UniquenessCertificate(
                status=UniquenessStatus.COUNTEREXAMPLE_FOUND,
                method=CertificateMethod.NONE,
                margin=best_sigma,
                counterexample=witness,
            )
    return UniquenessCertificate(
        status=UniquenessStatus.UNKNOWN,
        method=CertificateMethod.NONE,
        margin=float(best_sigma),
    )


def certify_or_falsify(net: Network, cfg: FalsifyConfig | None = None) -> UniquenessCertificate:
    """Cheap certificate first, sharper certificate second, falsifier last."""
    cert = gershgorin_certificate(net)
    if cert.status is UniquenessStatus.UNIQUE_CERTIFIED:
        return cert
    cert = midpoint_radius_certificate(net)
    if cert.status is UniquenessStatus.UNIQUE_CERTIFIED:
        return cert
    return falsify_p2(net, cfg)
