"""Relaxation assembly, tightness verification, and certificates."""

import math

import numpy as np
import pytest

from dcflowcert.cvxsolver import SolveStatus, constraint_violations, phase1
from dcflowcert.existence import (
    ExistenceConfig,
    ExistenceStatus,
    build_p1,
    refine_and_check,
    run_existence,
    solve_p1,
    verify_tightness,
)
from dcflowcert.loadflow import newton_solve, residual

from helpers import random_network, star, three_bus_chain, two_bus

HIGH_ROOT = (1.0 + math.sqrt(0.8)) / 2.0


class TestBuild:
    def test_two_bus_layout(self):
        net = two_bus()
        inst = build_p1(net)
        prog = inst.program
        # one voltage and one squared-voltage variable; no product variables
        assert prog.num_vars == 2
        assert inst.beta_index == {}
        assert len(prog.equalities) == 1
        row, rhs = prog.equalities[0]
        assert rhs == pytest.approx(-0.5)
        assert row[inst.alpha_index[1]] == pytest.approx(10.0)
        assert row[inst.v_index[1]] == pytest.approx(-10.0)
        assert prog.quad_ineqs == [(inst.v_index[1], inst.alpha_index[1])]
        assert prog.lower[inst.v_index[1]] == pytest.approx(0.9)
        assert prog.upper[inst.v_index[1]] == pytest.approx(1.1)
        assert len(prog.linear_ineqs) == 2  # both signs of the line current

    def test_chain_instantiates_both_product_vars(self):
        inst = build_p1(three_bus_chain())
        assert set(inst.beta_index) == {(1, 2), (2, 1)}
        assert len(inst.program.rotated_cones) == 2
        for (n, k), idx in inst.beta_index.items():
            assert inst.program.lower[idx] == 0.0
            cone = (idx, inst.alpha_index[n], inst.alpha_index[k])
            assert cone in inst.program.rotated_cones

    def test_slack_indicator_zero_off_slack_rows(self):
        # bus 2 in the chain has no slack neighbour: its row carries no
        # voltage term at all
        inst = build_p1(three_bus_chain())
        row, _ = inst.program.equalities[1]
        v_cols = [inst.v_index[n] for n in (1, 2)]
        assert all(row[c] == 0.0 for c in v_cols)

    def test_equality_rows_match_pq_buses(self):
        for seed in range(10):
            net = random_network(seed, meshed=True)
            inst = build_p1(net)
            assert len(inst.program.equalities) == net.n_pq
            assert len(inst.program.quad_ineqs) == net.n_pq
            assert len(inst.program.rotated_cones) == len(inst.beta_index)

    def test_relaxation_contains_newton_solution(self):
        # lifting a secure root of the oracle must be feasible for the program
        from dcflowcert.loadflow import SecurityMode, check_security

        for seed in range(10):
            net = random_network(seed)
            prof = newton_solve(net)
            if not check_security(net, prof, SecurityMode.NON_STRICT).ok:
                continue
            inst = build_p1(net)
            x = np.zeros(inst.program.num_vars)
            for n, idx in inst.v_index.items():
                x[idx] = prof.values[n - 1]
            for n, idx in inst.alpha_index.items():
                x[idx] = prof.values[n - 1] ** 2
            for (n, k), idx in inst.beta_index.items():
                x[idx] = prof.values[n - 1] * prof.values[k - 1]
            assert constraint_violations(inst.program, x) <= 1e-8


class TestSolveP1:
    def test_two_bus_closed_form(self):
        out = solve_p1(build_p1(two_bus()))
        assert out.status is SolveStatus.OPTIMAL
        inst = build_p1(two_bus())
        assert inst.voltages(out.x)[0] == pytest.approx(HIGH_ROOT, abs=1e-6)

    def test_zero_injection_caps_at_slack_voltage(self):
        inst = build_p1(two_bus(p=0.0))
        out = solve_p1(inst)
        assert out.status is SolveStatus.OPTIMAL
        assert inst.voltages(out.x)[0] == pytest.approx(1.0, abs=1e-6)

    def test_overload_infeasible(self):
        out = solve_p1(build_p1(two_bus(p=-3.0)))
        assert out.status is SolveStatus.INFEASIBLE
        assert out.phase1_violation > 1e-6

    def test_phase1_on_overload(self):
        result = phase1(build_p1(two_bus(p=-3.0)).program)
        assert result.status is SolveStatus.INFEASIBLE
        assert result.violation > 1e-6


class TestTightness:
    def test_two_bus_tight(self):
        inst = build_p1(two_bus())
        out = solve_p1(inst)
        report = verify_tightness(inst, out)
        assert report.passed
        assert report.alpha_gap <= 1e-6
        assert report.beta_gap == 0.0

    def test_perturbed_point_fails(self):
        inst = build_p1(two_bus())
        out = solve_p1(inst)
        out.x[inst.alpha_index[1]] += 0.01
        report = verify_tightness(inst, out)
        assert not report.passed
        assert report.alpha_gap == pytest.approx(0.01, abs=1e-6)

    def test_chain_products_match_oracle(self):
        net = three_bus_chain()
        inst = build_p1(net)
        out = solve_p1(inst)
        report = verify_tightness(inst, out)
        assert report.passed and report.beta_gap <= 1e-6
        prof = newton_solve(net)
        cross = prof.values[0] * prof.values[1]
        assert inst.betas(out.x)[(1, 2)] == pytest.approx(cross, abs=1e-5)

    def test_requires_optimal(self):
        inst = build_p1(two_bus(p=-3.0))
        out = solve_p1(inst)
        with pytest.raises(ValueError):
            verify_tightness(inst, out)


class TestCertificates:
    def test_solution_found(self):
        net = two_bus()
        run = run_existence(net)
        cert = run.certificate
        assert cert.status is ExistenceStatus.SOLUTION_FOUND
        assert cert.voltages.values[0] == pytest.approx(HIGH_ROOT, abs=1e-6)
        assert cert.residual_after_polish <= 1e-10
        assert cert.strict_security is True
        assert cert.condition1.holds

    def test_infeasible(self):
        cert = run_existence(two_bus(p=-3.0)).certificate
        assert cert.status is ExistenceStatus.P1_INFEASIBLE
        assert cert.voltages is None

    def test_condition1_failure_undecided_even_if_tight(self):
        net = two_bus(v_min=0.5)
        run = run_existence(net)
        cert = run.certificate
        assert run.outcome.status is SolveStatus.OPTIMAL
        assert not cert.condition1.holds
        assert cert.status is ExistenceStatus.UNDECIDED
        assert cert.tightness_alpha <= 1e-6  # tight, yet not certified

    def test_certificate_serialization(self):
        cert = run_existence(two_bus()).certificate
        doc = cert.to_dict()
        assert doc["status"] == "SolutionFound"
        assert doc["condition1"]["holds"] is True
        assert len(doc["voltages"]) == 1

    def test_star_network(self):
        cert = run_existence(star()).certificate
        assert cert.status is ExistenceStatus.SOLUTION_FOUND


class TestCorpusProperties:
    """Seeded sweep: executable content of the existence guarantee."""

    def test_optimal_implies_certified(self):
        cfg = ExistenceConfig()
        for seed in range(60):
            net = random_network(seed, meshed=(seed % 2 == 1))
            run = run_existence(net, cfg)
            if run.outcome.status is SolveStatus.OPTIMAL:
                cert = run.certificate
                assert cert.status is ExistenceStatus.SOLUTION_FOUND, f"seed {seed}"
                assert cert.tightness_alpha <= 1e-6
                assert cert.tightness_beta <= 1e-6
                assert cert.strict_security is True
                vals = cert.voltages.values
                assert float(np.max(np.abs(residual(net, vals)))) <= 1e-8

    def test_polish_agrees_with_relaxation(self):
        for seed in range(30):
            net = random_network(seed)
            run = run_existence(net)
            if run.certificate.status is ExistenceStatus.SOLUTION_FOUND:
                raw = run.instance.voltages(run.outcome.x)
                moved = np.max(np.abs(run.certificate.voltages.values - raw))
                assert moved <= 1e-5
