"""
Tests for the network object model, signals and scenario validation.
"""

import json
from dataclasses import replace

import numpy as np
import pytest

from src.data import generate_random_scenario, load_scenario, parse_scenario
from src.exceptions import DomainError, ScenarioFormatError
from src.network import (
    DistributionRates,
    InitialState,
    PiecewiseConstantSignal,
    ProcessorParams,
    Topology,
    density_flux_bounds,
    eval_signal,
    queue_bounds,
    validate_scenario,
)


class TestSignals:
    def test_piecewise_inflow_values(self, diamond_piecewise):
        sig = diamond_piecewise.inflows["0"]
        assert eval_signal(sig, 12.0) == 2.0
        assert eval_signal(sig, 7.0) == 0.0
        assert eval_signal(sig, 3.0) == 1.0
        assert eval_signal(sig, 22.5) == 0.5

    def test_right_continuous_at_breakpoints(self, diamond_piecewise):
        sig = diamond_piecewise.inflows["0"]
        assert eval_signal(sig, 10.0) == 2.0
        assert eval_signal(sig, 5.0) == 0.0
        assert eval_signal(sig, 30.0) == 0.0

    def test_constant_signal(self, diamond):
        sig = diamond.inflows["0"]
        for t in (0.0, 3.0, 17.25, 30.0):
            assert eval_signal(sig, t) == 1.5

    @pytest.mark.parametrize("t", [-0.5, 30.5])
    def test_outside_domain(self, diamond, t):
        with pytest.raises(DomainError):
            eval_signal(diamond.inflows["0"], t)

    def test_integral(self, diamond_piecewise):
        sig = diamond_piecewise.inflows["0"]
        assert sig.integral() == pytest.approx(5 * 1.0 + 5 * 2.0 + 5 * 0.5)
        assert sig.integral(4.0, 11.0) == pytest.approx(1.0 + 2.0)

    def test_step_pieces(self, diamond_piecewise):
        assert diamond_piecewise.step_pieces(2.0, 0.1) == [(pytest.approx(2.05), 0.1)]
        # a breakpoint on the step end does not cut
        assert len(diamond_piecewise.step_pieces(4.9, 0.1)) == 1
        pieces = diamond_piecewise.step_pieces(9.95, 0.1)
        assert [w for _, w in pieces] == [pytest.approx(0.05), pytest.approx(0.05)]
        assert pieces[0][0] < 10.0 < pieces[1][0]

    def test_problems_reported(self):
        sig = PiecewiseConstantSignal.from_lists([0.0, 2.0, 1.0], [1.0, -1.0, 0.0], 5.0)
        issues = sig.problems()
        assert any("strictly increasing" in issue for issue in issues)
        assert any("nonnegative" in issue for issue in issues)


class TestTopology:
    def test_diamond_sets(self, diamond):
        topo = diamond.topology
        assert topo.num_edges == 7
        assert topo.inflow_vertices == ("0",)
        assert topo.outflow_vertices == ("5",)
        assert topo.outgoing("1") == [1, 2]
        assert topo.ingoing("4") == [4, 5]
        assert not topo.has_cycle()

    def test_cycle_is_a_warning(self):
        topo = Topology.from_pairs([(1, "a", "b"), (2, "b", "c"), (3, "c", "b"), (4, "c", "d")])
        violations, warnings = topo.problems()
        assert violations == []
        assert any("cycle" in w for w in warnings)

    def test_unreachable_vertex_warning(self):
        topo = Topology((), declared_vertices=())
        assert topo.problems()[0] == ["network has no edges"]
        topo = Topology.from_pairs([(1, "a", "b"), (2, "c", "d"), (3, "d", "c")])
        assert topo.inflow_vertices == ("a",)
        assert topo.unreachable_vertices() == ["c", "d"]
        _, warnings = topo.problems()
        assert any("not reachable" in w for w in warnings)

    def test_self_loop_and_duplicate_ids(self):
        topo = Topology.from_pairs([(1, "a", "a"), (1, "a", "b")])
        violations, _ = topo.problems()
        assert any("self-loop" in v for v in violations)
        assert any("duplicate edge ids" in v for v in violations)


class TestValidation:
    def test_bundled_scenarios_are_valid(self, diamond, diamond_piecewise, single_processor):
        for scenario in (diamond, diamond_piecewise, single_processor):
            report = validate_scenario(scenario)
            assert report.violations == []
            assert report.cfl_dt_max == pytest.approx(0.1)

    def test_distribution_sum_violation(self, diamond):
        horizon = diamond.horizon
        rates = dict(diamond.distribution.rates)
        rates["1"] = {
            1: PiecewiseConstantSignal.constant(0.6, horizon),
            2: PiecewiseConstantSignal.constant(0.6, horizon),
        }
        broken = replace(diamond, distribution=DistributionRates(rates))
        report = validate_scenario(broken)
        assert "distribution rates sum 1.2 ≠ 1 at vertex 1" in report.violations

    def test_time_dependent_distribution_sum(self, diamond):
        horizon = diamond.horizon
        rates = dict(diamond.distribution.rates)
        rates["1"] = {
            1: PiecewiseConstantSignal.from_lists([0.0, 10.0], [0.5, 0.6], horizon),
            2: PiecewiseConstantSignal.constant(0.5, horizon),
        }
        report = validate_scenario(replace(diamond, distribution=DistributionRates(rates)))
        assert any("distribution rates sum 1.1" in v for v in report.violations)

    def test_zero_velocity(self, diamond):
        velocity = (0.0,) + diamond.processors.velocity[1:]
        broken = replace(diamond, processors=replace(diamond.processors, velocity=velocity))
        report = validate_scenario(broken)
        assert "velocity must be positive on edge 1" in report.violations

    def test_negative_initial_queue_names_field(self, diamond):
        queues = (-1.0,) + diamond.initial.queues[1:]
        broken = replace(diamond, initial=replace(diamond.initial, queues=queues))
        report = validate_scenario(broken)
        assert not report.ok
        assert any("initial.queues" in v for v in report.violations)

    def test_dx_must_divide_length(self, diamond):
        report = validate_scenario(replace(diamond, dx=0.3))
        assert any("does not divide length" in v for v in report.violations)

    def test_explicit_dt_beyond_cfl(self, diamond):
        report = validate_scenario(replace(diamond, dt=0.2))
        assert any("CFL" in v for v in report.violations)

    def test_regime_out_of_range(self, diamond):
        regimes = (3,) + diamond.initial.regimes[1:]
        report = validate_scenario(replace(diamond, initial=replace(diamond.initial, regimes=regimes)))
        assert any("initial regime 3" in v for v in report.violations)

    def test_beta_out_of_range(self, diamond):
        spec = replace(diamond.rates, beta=tuple(1.5 for _ in diamond.rates.beta))
        report = validate_scenario(replace(diamond, rates=spec))
        assert any("beta must lie in [0, 1]" in v for v in report.violations)

    def test_missing_inflow_signal(self, diamond):
        report = validate_scenario(replace(diamond, inflows={}))
        assert "inflow vertex 0 has no inflow signal" in report.violations

    def test_idempotent(self, diamond_piecewise):
        assert validate_scenario(diamond_piecewise) == validate_scenario(diamond_piecewise)

    def test_distribution_sums_to_one_at_sampled_times(self, diamond):
        rng = np.random.default_rng(11)
        topo = diamond.topology
        for t in rng.uniform(0.0, diamond.horizon, size=1000):
            shares = diamond.split_table(t)
            for v in ("1", "2"):
                assert abs(shares[topo.outgoing(v)].sum() - 1.0) <= 1e-12

    @pytest.mark.parametrize("seed", range(20))
    def test_random_scenarios_validate(self, seed):
        scenario = generate_random_scenario(np.random.default_rng(seed))
        assert validate_scenario(scenario).violations == []
        assert scenario.num_edges <= 5
        assert not scenario.topology.has_cycle()


class TestBounds:
    def test_diamond_queue_bound(self, diamond):
        bounds = queue_bounds(diamond)
        assert bounds[0] == pytest.approx(45.0)
        assert np.all(bounds[1:] > 0)

    def test_density_flux_bound(self, diamond):
        assert np.allclose(density_flux_bounds(diamond), 2.0)

    def test_density_bound_uses_initial_peak(self, make_line):
        scenario = make_line(density=3.0)
        assert density_flux_bounds(scenario)[0] == pytest.approx(3.0)


class TestScenarioFiles:
    def test_diamond_parameters(self, diamond):
        assert diamond.num_edges == 7
        assert diamond.cell_counts == (10,) * 7
        assert diamond.time_step == pytest.approx(0.1)
        assert diamond.rates.down_ref[0] == pytest.approx(1 / 0.85)
        assert diamond.rates.rep_ref[0] == pytest.approx(1 / 0.15)
        assert diamond.initial.regimes == (2,) * 7
        assert diamond.initial_mass() == 0.0

    def test_missing_key_is_format_error(self):
        with pytest.raises(ScenarioFormatError):
            parse_scenario({"topology": {"edges": []}})

    def test_wrong_type_is_format_error(self):
        with pytest.raises(ScenarioFormatError):
            parse_scenario({"topology": {"edges": [{"id": "x", "from": 0, "to": 1}]}})

    def test_invalid_json_is_format_error(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json", encoding="utf-8")
        with pytest.raises(ScenarioFormatError):
            load_scenario(path)

    def test_unreadable_file_is_format_error(self, tmp_path):
        with pytest.raises(ScenarioFormatError):
            load_scenario(tmp_path / "missing.json")

    def test_defaults_for_interval_and_densities(self, tmp_path):
        doc = {
            "topology": {"edges": [{"id": 1, "from": "s", "to": "t"}]},
            "processors": {"1": {"velocity": 1.0, "capacities": [0.0, 2.0]}},
            "inflows": {"s": 1.0},
            "rates": {"variant": "linear_load_dependent", "down_ref": 1.0, "rep_ref": 2.0},
            "numerics": {"dx": 0.25, "horizon": 5.0, "output_step": 0.5},
        }
        path = tmp_path / "small.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        scenario = load_scenario(path)
        assert scenario.processors.a == (0.0,)
        assert scenario.processors.length == (1.0,)
        assert scenario.initial.densities == ((0.0,) * 4,)
        assert scenario.initial.regimes == (2,)
        assert scenario.rates.beta == (0.0,)
        assert scenario.dt is None
        assert validate_scenario(scenario).ok
