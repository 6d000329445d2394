"""Tests for pvgrid.simulator — per-step balance, runs, and comparisons."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pvgrid.compensation import FixedCapacitor, NoCompensator, Statcom
from pvgrid.errors import CalibrationFailure, GridMismatch, InvalidScenario
from pvgrid.pv_model import PVArraySpec, PVModuleSpec
from pvgrid.simulator import (
    GridSpec,
    IrradianceStep,
    LoadStep,
    PowerFlowRecord,
    Scenario,
    TimeSeries,
    compare_runs,
    run,
    step,
)

from conftest import REF_MODULE, make_scenario, random_scenario


def _assert_balanced(record: PowerFlowRecord) -> None:
    """Independent balance oracle: P and Q must sum to zero at the PCC."""
    scale = (
        math.hypot(record.p_grid, record.q_grid)
        + math.hypot(record.p_load, record.q_load)
        + abs(record.p_inv)
        + math.hypot(record.p_comp_loss, record.q_comp)
        + 1.0
    )
    resid_p = record.p_grid + record.p_inv - record.p_load - record.p_comp_loss
    resid_q = record.q_grid + record.q_comp - record.q_load
    assert abs(resid_p) <= 1e-9 * scale, f"P residual {resid_p:.3e} at t={record.t}"
    assert abs(resid_q) <= 1e-9 * scale, f"Q residual {resid_q:.3e} at t={record.t}"


# ======================================================================
# Scenario validation
# ======================================================================


class TestScenarioValidation:
    """Constructor invariants of the scenario container."""

    def test_valid_scenario_builds(self):
        """The default builder produces a valid scenario."""
        s = make_scenario()
        assert s.times() == pytest.approx([0.0, 0.01, 0.02, 0.03, 0.04, 0.05])

    def test_efficiency_bounds(self):
        """Inverter efficiency outside (0, 1] is rejected."""
        with pytest.raises(InvalidScenario):
            make_scenario(efficiency=0.0)
        with pytest.raises(InvalidScenario):
            make_scenario(efficiency=1.2)

    def test_dt_positive(self):
        """Non-positive dt is rejected."""
        with pytest.raises(InvalidScenario):
            make_scenario(dt=0.0)

    def test_profile_must_start_at_zero(self):
        """A profile whose first segment starts late leaves t=0 undefined."""
        with pytest.raises(InvalidScenario):
            make_scenario(irradiance=((0.05, 1000.0, 25.0),))

    def test_profile_must_be_sorted(self):
        """Unsorted or duplicate segment starts are rejected."""
        with pytest.raises(InvalidScenario):
            make_scenario(load=((0.0, 1e5, 1e5), (0.02, 2e5, 0.0), (0.01, 1e5, 0.0)))

    def test_irradiance_domain(self):
        """Negative irradiance and out-of-range cell temperature are rejected."""
        with pytest.raises(InvalidScenario):
            make_scenario(irradiance=((0.0, -5.0, 25.0),))
        with pytest.raises(InvalidScenario):
            make_scenario(irradiance=((0.0, 1000.0, 120.0),))

    def test_grid_spec_positive(self):
        """Grid voltage, frequency, and dc link must be positive."""
        with pytest.raises(InvalidScenario):
            GridSpec(v_phase=0.0, f=50.0, v_dc=700.0)

    def test_zero_horizon_single_instant(self):
        """t_end = 0 still defines the t = 0 record."""
        s = make_scenario(t_end=0.0)
        assert s.times() == [0.0]

    def test_time_grid_count_is_robust(self):
        """Horizons that are float-inexact multiples of dt keep the endpoint."""
        s = make_scenario(t_end=0.2, dt=0.01)
        ts = s.times()
        assert len(ts) == 21
        assert ts[-1] == pytest.approx(0.2)


# ======================================================================
# Single-step equilibrium
# ======================================================================


class TestStep:
    """One equilibrium solve."""

    def test_uncompensated_grid_carries_load_q(self, ref_params):
        """Without compensation q_grid equals q_load exactly."""
        s = make_scenario(load=((0.0, 50_000.0, 100_000.0),))
        r = step(s, ref_params, 0.0)
        assert r.q_grid == 100_000.0
        assert r.q_comp == 0.0 and r.p_comp_loss == 0.0

    def test_inverter_power_is_scaled_mpp(self, ref_params):
        """p_inv = efficiency * p_pv and q_inv = 0."""
        s = make_scenario(efficiency=0.95)
        r = step(s, ref_params, 0.0)
        assert r.p_inv == 0.95 * r.p_pv
        assert r.q_inv == 0.0

    def test_balance_identities(self, ref_params):
        """The grid picks up exactly what load + losses - inverter leave."""
        s = make_scenario(
            load=((0.0, 80_000.0, 60_000.0),),
            compensator=Statcom(q_max=50_000.0, loss_floor_w=800.0),
        )
        r = step(s, ref_params, 0.0)
        assert r.p_grid == r.p_load + r.p_comp_loss - r.p_inv
        assert r.q_grid == r.q_load - r.q_comp
        assert r.q_comp == 50_000.0  # clamped at the rating
        _assert_balanced(r)

    def test_segment_boundary_uses_new_segment(self, ref_params):
        """A record taken exactly at t_start switches to the new values."""
        s = make_scenario(
            load=((0.0, 10_000.0, 0.0), (0.02, 99_000.0, 5_000.0)), t_end=0.05
        )
        before = step(s, ref_params, 0.019999)
        boundary = step(s, ref_params, 0.02)
        assert before.p_load == 10_000.0
        assert boundary.p_load == 99_000.0
        assert boundary.q_load == 5_000.0

    def test_dark_step_produces_zero_pv(self, ref_params):
        """g = 0 yields p_pv = 0 without raising."""
        s = make_scenario(irradiance=((0.0, 0.0, 25.0),))
        r = step(s, ref_params, 0.0)
        assert r.p_pv == 0.0 and r.p_inv == 0.0

    def test_zero_exchange_reports_unity_pf(self, ref_params):
        """p_grid = q_grid = 0 is reported as pf 1 by convention."""
        s = make_scenario(
            irradiance=((0.0, 0.0, 25.0),), load=((0.0, 0.0, 0.0),)
        )
        r = step(s, ref_params, 0.0)
        assert r.p_grid == 0.0 and r.q_grid == 0.0
        assert r.pf_grid == 1.0

    def test_out_of_range_time_rejected(self, ref_params):
        """t outside [0, t_end] is a caller error."""
        s = make_scenario(t_end=0.05)
        with pytest.raises(ValueError):
            step(s, ref_params, 0.06)
        with pytest.raises(ValueError):
            step(s, ref_params, -0.01)


# ======================================================================
# Full runs
# ======================================================================


class TestRun:
    """Whole-grid simulation."""

    def test_record_count(self):
        """floor(t_end/dt) + 1 records, times on the dt grid."""
        series = run(make_scenario(t_end=0.2, dt=0.01))
        assert len(series.records) == 21
        assert series.records[0].t == 0.0
        assert series.records[-1].t == pytest.approx(0.2)

    def test_zero_horizon(self):
        """t_end = 0 produces exactly one record."""
        series = run(make_scenario(t_end=0.0))
        assert len(series.records) == 1

    def test_every_record_balances(self):
        """The balance oracle holds at every step of a stepped scenario."""
        series = run(
            make_scenario(
                irradiance=((0.0, 1000.0, 25.0), (0.03, 400.0, 30.0)),
                load=((0.0, 50_000.0, 100_000.0), (0.02, 120_000.0, -30_000.0)),
                compensator=FixedCapacitor(q_rated=80_000.0, v_rated=230.0),
            )
        )
        for r in series.records:
            _assert_balanced(r)

    def test_profile_steps_show_up_on_grid(self):
        """Records before/after a boundary reflect the segment change."""
        series = run(
            make_scenario(
                irradiance=((0.0, 1000.0, 25.0), (0.03, 200.0, 25.0)), t_end=0.05
            )
        )
        by_t = {round(r.t, 6): r for r in series.records}
        assert by_t[0.02].p_pv > by_t[0.03].p_pv
        assert by_t[0.03].p_pv == by_t[0.04].p_pv

    def test_run_is_deterministic(self):
        """Two runs of equal scenarios produce identical record tuples."""
        a = run(make_scenario(scenario_id="same"))
        b = run(make_scenario(scenario_id="same"))
        assert a == b

    def test_mpp_consistent_between_step_and_run(self, ref_params):
        """run() and step() agree at a shared instant."""
        s = make_scenario()
        series = run(s)
        single = step(s, ref_params, 0.02)
        match = [r for r in series.records if r.t == 0.02][0]
        assert match == single

    def test_uncalibratable_module_raises(self):
        """A datasheet with no single-diode solution fails as CalibrationFailure."""
        impossible = PVModuleSpec(p_mp=280.0, v_mp=35.9, i_mp=7.8, v_oc=36.3, i_sc=7.84)
        s = Scenario(
            grid=GridSpec(v_phase=230.0, f=50.0, v_dc=700.0),
            array=PVArraySpec(module=impossible, n_series=10, n_parallel=47),
            inverter_efficiency=0.997,
            irradiance_profile=(IrradianceStep(0.0, 1000.0, 25.0),),
            load_profile=(LoadStep(0.0, 1e5, 1e5),),
            compensator=NoCompensator(),
            t_end=0.02,
            dt=0.01,
        )
        with pytest.raises(CalibrationFailure):
            run(s)

    def test_random_scenarios_balance(self):
        """Property: every record of 100 random scenarios balances."""
        rng = np.random.default_rng(31)
        for i in range(100):
            series = run(random_scenario(rng, i))
            assert len(series.records) == 6
            for r in series.records:
                _assert_balanced(r)
                assert 0.0 <= r.pf_grid <= 1.0


# ======================================================================
# Bundled reference cases
# ======================================================================


class TestBundledCases:
    """End-to-end behavior of the shipped reference scenarios."""

    def test_case2_real_power_swing(self):
        """Grid import collapses once irradiance steps to full sun.

        Before the 0.1 s step the array runs at half sun and the grid
        covers roughly half the 100 kW load; after it, PV carries nearly
        everything and the residual import stays below 6 kW.
        """
        from pvgrid.scenario_io import bundled_scenario_text, parse_scenario

        series = run(parse_scenario(bundled_scenario_text("case2")))
        before = [r for r in series.records if r.t < 0.1]
        after = [r for r in series.records if r.t >= 0.1]
        assert before and after
        for r in before:
            assert 45_000.0 <= r.p_grid <= 60_000.0, f"t={r.t}: p_grid {r.p_grid:.0f} W"
        for r in after:
            assert abs(r.p_grid) <= 6_000.0, f"t={r.t}: p_grid {r.p_grid:.0f} W"

    def test_case1_pf_recovers_after_step(self):
        """Case 1 grid pf is poor under PV surplus and both flows reverse-free."""
        from pvgrid.scenario_io import bundled_scenario_text, parse_scenario

        series = run(parse_scenario(bundled_scenario_text("case1")))
        for r in series.records:
            _assert_balanced(r)
            assert r.q_grid == 100_000.0  # uncompensated load Q rides the grid


# ======================================================================
# Run comparison
# ======================================================================


class TestCompareRuns:
    """Grid-Q dominance between two runs."""

    def test_self_comparison_is_null(self):
        """A run against itself has zero deltas and no winner."""
        series = run(make_scenario(scenario_id="base"))
        report = compare_runs(series, series)
        assert all(d == 0.0 for d in report.delta_q_grid)
        assert all(d == 0.0 for d in report.delta_pf_grid)
        assert report.winner is None
        assert report.max_abs_q_grid_a == report.max_abs_q_grid_b

    def test_statcom_beats_uncompensated(self):
        """Full compensation wins against none on a reactive load."""
        load = ((0.0, 100_000.0, 150_000.0),)
        none_run = run(make_scenario(load=load, scenario_id="plain"))
        stat_run = run(
            make_scenario(
                load=load,
                compensator=Statcom(q_max=200_000.0),
                scenario_id="statcom",
            )
        )
        report = compare_runs(none_run, stat_run)
        assert report.winner == "statcom"
        assert report.max_abs_q_grid_b == 0.0
        assert report.max_abs_q_grid_a == 150_000.0
        assert all(d == -150_000.0 for d in report.delta_q_grid)

    def test_pf_deltas_reflect_improvement(self):
        """Compensation lifts pf_grid from 0.4472 toward unity."""
        load = ((0.0, 50_000.0, 100_000.0),)
        none_run = run(make_scenario(load=load, scenario_id="plain"))
        stat_run = run(
            make_scenario(
                load=load, compensator=Statcom(q_max=150_000.0), scenario_id="statcom"
            )
        )
        report = compare_runs(none_run, stat_run)
        assert all(d > 0.5 for d in report.delta_pf_grid), report.delta_pf_grid

    def test_mismatched_grids_rejected(self):
        """Different time grids cannot be compared."""
        a = run(make_scenario(t_end=0.05))
        b = run(make_scenario(t_end=0.03))
        with pytest.raises(GridMismatch):
            compare_runs(a, b)

    def test_crossing_runs_have_no_winner(self):
        """If each run wins somewhere, the verdict is None."""
        load_a = ((0.0, 1e5, 50_000.0), (0.03, 1e5, 0.0))
        load_b = ((0.0, 1e5, 0.0), (0.03, 1e5, 50_000.0))
        a = run(make_scenario(load=load_a, scenario_id="a"))
        b = run(make_scenario(load=load_b, scenario_id="b"))
        report = compare_runs(a, b)
        assert report.winner is None


# ======================================================================
# Output containers
# ======================================================================


class TestContainers:
    """Record and series invariants."""

    def test_series_requires_records(self):
        """An empty record tuple is rejected."""
        with pytest.raises(InvalidScenario):
            TimeSeries(scenario_id="x", records=())

    def test_series_requires_increasing_times(self):
        """Record times must be strictly increasing."""
        r = run(make_scenario()).records[0]
        with pytest.raises(InvalidScenario):
            TimeSeries(scenario_id="x", records=(r, r))

    def test_record_pf_domain(self):
        """pf_grid outside [0, 1] is rejected."""
        with pytest.raises(InvalidScenario):
            PowerFlowRecord(
                t=0.0, p_pv=0.0, p_inv=0.0, q_inv=0.0, p_load=0.0, q_load=0.0,
                q_comp=0.0, p_comp_loss=0.0, p_grid=0.0, q_grid=0.0,
                pf_grid=1.5, v_dc=700.0,
            )
