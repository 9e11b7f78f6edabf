"""Residual/Jacobian kernels, the Newton oracle, and security checks."""

import math

import numpy as np
import pytest

from dcflowcert.errors import DimensionError, NoConvergence
from dcflowcert.loadflow import (
    NewtonConfig,
    SecurityMode,
    VoltageProfile,
    check_security,
    jacobian,
    newton_solve,
    residual,
)

from helpers import random_network, three_bus_chain, two_bus

HIGH_ROOT = (1.0 + math.sqrt(0.8)) / 2.0  # solves 10 v^2 - 10 v + 0.5 = 0


def fd_jacobian(net, v, h=1e-6):
    """Central finite differences of the residual, the independent oracle."""
    v = np.asarray(v, dtype=float)
    n = len(v)
    out = np.zeros((n, n))
    for m in range(n):
        bump = np.zeros(n)
        bump[m] = h
        out[:, m] = (residual(net, v + bump) - residual(net, v - bump)) / (2.0 * h)
    return out


class TestResidual:
    def test_flat_zero_injection(self):
        assert residual(two_bus(p=0.0), [1.0]) == pytest.approx([0.0])

    def test_flat_with_load(self):
        assert residual(two_bus(), [1.0]) == pytest.approx([0.5])

    def test_closed_form_root(self):
        assert abs(residual(two_bus(), [HIGH_ROOT])[0]) < 1e-6

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            residual(two_bus(), [1.0, 1.0])

    def test_chain_slack_substitution(self):
        net = three_bus_chain(p1=0.0, p2=0.0)
        assert residual(net, [1.0, 1.0]) == pytest.approx([0.0, 0.0])


class TestJacobian:
    def test_two_bus_values(self):
        net = two_bus()
        np.testing.assert_allclose(jacobian(net, [1.0]), [[10.0]], atol=1e-12)
        np.testing.assert_allclose(jacobian(net, [0.9]), [[8.0]], atol=1e-12)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        for seed in range(20):
            net = random_network(seed, meshed=(seed % 2 == 0))
            for _ in range(10):
                v = rng.uniform(0.5, 1.5, net.n_pq)
                analytic = jacobian(net, v)
                approx = fd_jacobian(net, v)
                scale = max(1.0, np.max(np.abs(analytic)))
                assert np.max(np.abs(analytic - approx)) / scale < 1e-5


class TestVoltageProfile:
    def test_cached_residual_matches(self):
        net = three_bus_chain()
        prof = VoltageProfile.from_values(net, [0.97, 0.95])
        recomputed = float(np.max(np.abs(residual(net, prof.values))))
        assert abs(prof.residual_norm - recomputed) <= 1e-12

    def test_values_read_only(self):
        prof = VoltageProfile.from_values(two_bus(), [1.0])
        with pytest.raises(ValueError):
            prof.values[0] = 2.0


class TestNewton:
    def test_closed_form_root(self):
        prof = newton_solve(two_bus(), [1.0])
        assert prof.values[0] == pytest.approx(HIGH_ROOT, abs=1e-8)
        assert prof.residual_norm <= 1e-10

    def test_flat_solution(self):
        prof = newton_solve(two_bus(p=0.0), [1.05])
        assert prof.values[0] == pytest.approx(1.0, abs=1e-10)

    def test_no_real_solution(self):
        net = two_bus(p=-3.0)
        for start in ([1.0], [0.6], [1.4]):
            with pytest.raises(NoConvergence):
                newton_solve(net, start)

    def test_flat_start_default(self):
        prof = newton_solve(two_bus())
        assert prof.values[0] == pytest.approx(HIGH_ROOT, abs=1e-8)

    def test_converges_on_light_random_networks(self):
        for seed in range(40):
            net = random_network(seed, meshed=(seed % 3 == 0))
            prof = newton_solve(net)
            assert prof.residual_norm <= NewtonConfig().tol

    def test_requires_positive_start(self):
        with pytest.raises(ValueError):
            newton_solve(two_bus(), [-1.0])


class TestSecurity:
    def test_interior_point_ok(self):
        report = check_security(two_bus(), [HIGH_ROOT], SecurityMode.STRICT, 0.0)
        assert report.ok
        assert report.worst_current_margin == pytest.approx(1.0 - 0.527864, abs=1e-6)
        assert report.worst_voltage_margin == pytest.approx(HIGH_ROOT - 0.9, abs=1e-6)

    def test_boundary_semantics(self):
        net = two_bus()
        at_min = [net.limits.v_min]
        assert not check_security(net, at_min, SecurityMode.STRICT).voltage_ok
        report = check_security(net, at_min, SecurityMode.NON_STRICT)
        assert report.voltage_ok

    def test_violation_listed_with_slack(self):
        report = check_security(two_bus(), [0.8], SecurityMode.NON_STRICT)
        assert not report.voltage_ok
        names = dict(report.violations)
        assert names["v_min[1]"] == pytest.approx(-0.1)

    def test_current_violation(self):
        report = check_security(two_bus(i_max=0.4), [HIGH_ROOT], SecurityMode.STRICT)
        assert not report.current_ok
        assert report.violations[0][0] == "i[0-1]"

    def test_monotone_in_margin(self):
        net = two_bus()
        margins = [0.0, 1e-6, 1e-3, 0.04]
        passing = [
            check_security(net, [HIGH_ROOT], SecurityMode.STRICT, m).ok for m in margins
        ]
        # once a margin fails, every larger margin fails
        for looser, tighter in zip(passing, passing[1:]):
            assert looser or not tighter

    def test_nonstrict_ignores_margin(self):
        net = two_bus()
        report = check_security(net, [net.limits.v_min], SecurityMode.NON_STRICT, 0.05)
        assert report.voltage_ok
