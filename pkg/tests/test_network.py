"""Tests for rate bookkeeping, fairness, evaluation, and baselines."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risqnet import channel as ch
from risqnet import geometry as geo
from risqnet import network as net

RIS = geo.Point3(250.0, 200.0, 62.5)


def near_user(r_min=1e4, f_min=0.6, weight=1.0) -> net.User:
    return net.User(geo.Point3(250.0, 200.0, 10.0), weight, r_min, f_min)


def far_user(r_min=1e4, f_min=0.3, weight=1.0) -> net.User:
    return net.User(geo.Point3(400.0, 350.0, 10.0), weight, r_min, f_min)


class TestRateFidelityTradeoff:
    def test_midpoint(self):
        assert net.rate_from_alpha_s(0.25) == (5e5, 0.75)

    def test_low_endpoint(self):
        r, lam = net.rate_from_alpha_s(0.0005)
        assert r == pytest.approx(1000.0, rel=1e-15)
        assert lam == pytest.approx(0.9995, rel=1e-15)

    def test_near_upper_end(self):
        r, lam = net.rate_from_alpha_s(0.4999)
        assert r == pytest.approx(999800.0, rel=1e-15)
        assert lam == pytest.approx(0.5001, rel=1e-12)

    def test_rejects_out_of_range(self):
        for bad in (0.0004, 0.5, 0.7, -0.1):
            with pytest.raises(ValueError):
                net.rate_from_alpha_s(bad)

    @given(st.floats(net.ALPHA_S_MIN, net.ALPHA_S_MAX))
    def test_rate_inversion_round_trips(self, alpha_s):
        r, _ = net.rate_from_alpha_s(alpha_s)
        assert net.alpha_s_from_rate(r) == pytest.approx(alpha_s, rel=1e-12)

    def test_inversion_clamps(self):
        assert net.alpha_s_from_rate(0.0) == net.ALPHA_S_MIN
        assert net.alpha_s_from_rate(2e6) == net.ALPHA_S_MAX
        with pytest.raises(ValueError):
            net.alpha_s_from_rate(-1.0)

    def test_bell_state_for_rate(self):
        state = net.bell_state_for_rate(5e5)
        assert state.lam00 == pytest.approx(0.75, rel=1e-15)
        assert state.lam01 == state.lam10 == state.lam11
        assert sum(state.as_tuple()) == pytest.approx(1.0, abs=1e-15)


class TestEffectiveEgr:
    def test_below_capacity(self):
        assert net.effective_egr(1e5, 0.5, 1e7) == 5e4

    def test_capacity_cap(self):
        assert net.effective_egr(2e7, 1.0, 1e7) == 1e7

    def test_dead_link(self):
        assert net.effective_egr(1e6, 0.0, 1e7) == 0.0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            net.effective_egr(-1.0, 0.5, 1e7)


class TestE2ERate:
    def test_certain_success(self):
        assert net.e2e_rate(1.0, 12345.0) == 12345.0

    def test_no_success(self):
        assert net.e2e_rate(0.0, 1e6) == 0.0

    def test_scaling(self):
        assert net.e2e_rate(0.37, 1e5) == pytest.approx(3.7e4, rel=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            net.e2e_rate(1.2, 1.0)
        with pytest.raises(ValueError):
            net.e2e_rate(0.5, -1.0)


class TestWfi:
    def test_equal_rates_equal_weights(self):
        assert net.wfi([3.0, 3.0, 3.0], [1.0, 1.0, 1.0]) == pytest.approx(1.0, abs=1e-15)

    def test_single_active_user(self):
        assert net.wfi([5.0, 0.0, 0.0, 0.0], [1.0] * 4) == pytest.approx(0.25, abs=1e-15)

    def test_weights_balance_unequal_rates(self):
        assert net.wfi([4.0, 2.0], [1.0, 2.0]) == pytest.approx(1.0, abs=1e-15)

    @settings(max_examples=200)
    @given(st.lists(st.floats(0.0, 1e6), min_size=1, max_size=5), st.floats(1.0, 1e6))
    def test_jain_bounds_with_equal_weights(self, rates, extra):
        rates = rates + [extra]
        n = len(rates)
        value = net.wfi(rates, [1.0] * n)
        assert 1.0 / n - 1e-12 <= value <= 1.0 + 1e-12

    @settings(max_examples=200)
    @given(
        st.lists(st.floats(1e-3, 1e3), min_size=2, max_size=5),
        st.floats(1e-3, 1e3),
    )
    def test_scale_invariant(self, rates, scale):
        weights = [1.0 + 0.5 * i for i in range(len(rates))]
        base = net.wfi(rates, weights)
        scaled = net.wfi([r * scale for r in rates], weights)
        assert scaled == pytest.approx(base, rel=1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            net.wfi([0.0, 0.0], [1.0, 1.0])
        with pytest.raises(ValueError):
            net.wfi([1.0, 2.0], [1.0])
        with pytest.raises(ValueError):
            net.wfi([1.0], [0.0])
        with pytest.raises(ValueError):
            net.wfi([-1.0], [1.0])


class TestTypeValidation:
    def test_user(self):
        pos = geo.Point3(0.0, 0.0, 10.0)
        with pytest.raises(ValueError):
            net.User(pos, 0.0, 1e4, 0.5)
        with pytest.raises(ValueError):
            net.User(pos, 1.0, -1.0, 0.5)
        with pytest.raises(ValueError):
            net.User(pos, 1.0, 1e4, 0.0)
        # a perfect-fidelity demand is representable (and never satisfiable)
        assert net.User(pos, 1.0, 1e4, 1.0).f_min == 1.0

    def test_environment(self):
        with pytest.raises(ValueError):
            net.Environment(0.0, 0.55, 8e-3, 1e-3)

    def test_scenario(self):
        with pytest.raises(ValueError):
            net.standard_scenario([])
        with pytest.raises(ValueError):
            net.standard_scenario([near_user()], delta_th=0.0)
        with pytest.raises(ValueError):
            net.standard_scenario([near_user()], p1=1.5)

    def test_solution(self):
        with pytest.raises(ValueError):
            net.Solution((-1.0,), RIS, (0,))
        with pytest.raises(ValueError):
            net.Solution((1.0,), RIS, (0, 2))


class TestLinkBudgets:
    def test_distances_are_two_leg_sums(self):
        sc = net.standard_scenario([near_user(), far_user()])
        buds = net.link_budgets(sc, RIS)
        for b, u in zip(buds, sc.users):
            assert b.d_e2e == geo.e2e_distance(sc.qbs, RIS, u.position)

    def test_farther_user_fares_worse(self):
        sc = net.standard_scenario([near_user(), far_user()])
        near, far = net.link_budgets(sc, RIS)
        assert near.d_e2e < far.d_e2e
        assert near.p_succ > far.p_succ
        assert near.eta > far.eta
        assert near.p_pd < far.p_pd

    def test_eta_composition(self):
        sc = net.standard_scenario([near_user()])
        (b,) = net.link_budgets(sc, RIS)
        env = sc.environment
        model = ch.composite_model_at_distance(
            b.d_e2e, sc.link, env.cn2, env.aperture_radius, env.divergence, env.jitter_sigma
        )
        vt = model.pointing.vartheta
        expected = b.varsigma * model.h_pl * model.pointing.a0 * vt / (vt + 1.0)
        assert b.eta == pytest.approx(expected, rel=1e-12)

    def test_mode_selection_follows_threshold(self):
        passive_sc = net.standard_scenario([near_user()])
        (b,) = net.link_budgets(passive_sc, RIS)
        assert b.varsigma == 0.97
        starved_sc = net.standard_scenario([near_user()], snr_threshold=1e9)
        (b2,) = net.link_budgets(starved_sc, RIS)
        assert b2.varsigma == 1.1


class TestEvaluate:
    def feasible_instance(self):
        sc = net.standard_scenario([near_user()])
        sol = net.Solution((5e5,), RIS, (0,) * 64)
        return sc, sol

    def test_feasible_single_user(self):
        sc, sol = self.feasible_instance()
        ev = net.evaluate(sc, sol)
        assert ev.feasible
        assert [c.name for c in ev.constraints] == [
            "memory_cap",
            "rate_floor",
            "fidelity_floor",
            "fairness",
            "region",
            "modes_binary",
        ]
        assert ev.weighted_sum == pytest.approx(ev.p_succ[0] * 5e5, rel=1e-12)
        assert ev.wfi == pytest.approx(1.0, abs=1e-15)
        assert ev.r_e2e[0] == net.e2e_rate(ev.p_succ[0], 5e5)

    def test_deterministic(self):
        sc, sol = self.feasible_instance()
        assert net.evaluate(sc, sol) == net.evaluate(sc, sol)

    def test_budget_reuse_matches(self):
        sc, sol = self.feasible_instance()
        buds = net.link_budgets(sc, sol.ris_pos)
        assert net.evaluate(sc, sol, budgets=buds) == net.evaluate(sc, sol)

    def test_overfull_memory_flips_only_that_constraint(self):
        sc = net.standard_scenario([near_user(f_min=0.3)])
        ok = net.evaluate(sc, net.Solution((sc.c_max,), RIS, (0,) * 64))
        over = net.evaluate(sc, net.Solution((sc.c_max + 1.0,), RIS, (0,) * 64))
        assert ok.constraint("memory_cap").satisfied
        assert not over.constraint("memory_cap").satisfied
        assert over.constraint("memory_cap").slack == pytest.approx(-1.0, abs=1e-6)
        for name in ("rate_floor", "fidelity_floor", "fairness", "region", "modes_binary"):
            assert over.constraint(name).satisfied == ok.constraint(name).satisfied

    def test_perfect_fidelity_demand_is_infeasible(self):
        sc = net.standard_scenario([near_user(f_min=1.0)])
        ev = net.evaluate(sc, net.Solution((5e5,), RIS, (0,) * 64))
        assert not ev.constraint("fidelity_floor").satisfied
        assert not ev.feasible

    def test_relaxing_thresholds_preserves_feasibility(self):
        sc, sol = self.feasible_instance()
        assert net.evaluate(sc, sol).feasible
        relaxed = net.standard_scenario([near_user(r_min=0.0, f_min=1e-6)], delta_th=0.1)
        assert net.evaluate(relaxed, sol).feasible

    def test_region_violation(self):
        sc, _ = self.feasible_instance()
        outside = net.Solution((5e5,), geo.Point3(10.0, 200.0, 62.5), (0,) * 64)
        ev = net.evaluate(sc, outside)
        c = ev.constraint("region")
        assert not c.satisfied
        assert c.slack == pytest.approx(-40.0, rel=1e-12)

    def test_zero_allocation_fails_fairness_and_floors(self):
        sc, _ = self.feasible_instance()
        ev = net.evaluate(sc, net.Solution((0.0,), RIS, (0,) * 64))
        assert ev.wfi == 0.0
        assert ev.weighted_sum == 0.0
        assert not ev.constraint("fairness").satisfied
        assert not ev.constraint("rate_floor").satisfied

    def test_dimension_mismatch(self):
        sc, sol = self.feasible_instance()
        with pytest.raises(ValueError):
            net.evaluate(sc, net.Solution((5e5, 5e5), RIS, (0,) * 64))
        with pytest.raises(ValueError):
            net.evaluate(sc, net.Solution((5e5,), RIS, (0,) * 8))

    def test_csv_rows(self):
        sc, sol = self.feasible_instance()
        ev = net.evaluate(sc, sol)
        rows = net.evaluation_rows(ev)
        assert len(net.EVALUATION_CSV_HEADER) == 7
        assert len(rows) == 1
        user, d, p, pd, eta, r, f = rows[0]
        assert user == 0
        assert (d, p, pd, eta, r, f) == (
            ev.d_e2e[0],
            ev.p_succ[0],
            ev.p_pd[0],
            ev.eta[0],
            ev.r_e2e[0],
            ev.fidelity[0],
        )


class TestBaselines:
    def test_rate_max_greedy_shape(self):
        sc = net.standard_scenario([near_user(), far_user()])
        sol = net.baseline_rate_max(sc, RIS)
        buds = net.link_budgets(sc, RIS)
        assert buds[0].eta > buds[1].eta
        assert sol.r_in[1] == pytest.approx(1e4 / buds[1].p_succ, rel=1e-12)
        assert sol.r_in[0] == pytest.approx(sc.c_max - sol.r_in[1], rel=1e-12)
        assert sum(sol.r_in) == pytest.approx(sc.c_max, rel=1e-12)

    def test_rate_max_tie_breaks_to_first(self):
        sc = net.standard_scenario([near_user(), near_user()])
        sol = net.baseline_rate_max(sc, RIS)
        assert sol.r_in[0] > sol.r_in[1]

    def test_rate_max_skips_dead_floors(self):
        sc = net.standard_scenario([near_user(), far_user(r_min=0.0)])
        sol = net.baseline_rate_max(sc, RIS)
        assert sol.r_in[1] == 0.0
        assert sol.r_in[0] == sc.c_max

    def test_log_rate_equal_weights_split_evenly(self):
        sc = net.standard_scenario([near_user(), far_user()], c_max=1e6)
        sol = net.baseline_log_rate(sc, RIS)
        assert sol.r_in == (5e5, 5e5)

    def test_log_rate_weight_proportional(self):
        sc = net.standard_scenario([near_user(weight=1.0), far_user(weight=3.0)], c_max=1e6)
        sol = net.baseline_log_rate(sc, RIS)
        assert sol.r_in[0] == pytest.approx(2.5e5, rel=1e-12)
        assert sol.r_in[1] == pytest.approx(7.5e5, rel=1e-12)

    def test_log_rate_caps_and_redistributes(self):
        sc = net.standard_scenario([near_user(weight=1.0), far_user(weight=9.0)], c_max=2e6)
        sol = net.baseline_log_rate(sc, RIS)
        assert sol.r_in == (net.R_IN_CAP, net.R_IN_CAP)

    def test_log_rate_fairer_than_rate_max_here(self):
        sc = net.standard_scenario([near_user(f_min=0.3), far_user(f_min=0.3)])
        greedy = net.evaluate(sc, net.baseline_rate_max(sc, RIS))
        prop = net.evaluate(sc, net.baseline_log_rate(sc, RIS))
        assert greedy.wfi < prop.wfi

    def test_baselines_return_passive_modes(self):
        sc = net.standard_scenario([near_user()])
        for sol in (net.baseline_rate_max(sc, RIS), net.baseline_log_rate(sc, RIS)):
            assert sol.modes == (0,) * 64
            assert sol.ris_pos == RIS
