"""
Tests for the upwind / forward Euler solver of the deterministic network.
"""

import numpy as np
import pytest

from src.exceptions import CFLViolationError, DomainError
from src.network import PiecewiseConstantSignal
from src.solver import (
    FlowCursor,
    FluxLedger,
    Grid,
    NetworkState,
    compute_g_in,
    compute_g_out,
    evolve,
    exit_fluxes,
    flux,
    l1_distance,
    step_g_in,
    upwind_edge_step,
)

ALL_UP = (2,) * 7


def random_state(grid: Grid, rng: np.random.Generator, peak: float = 2.0) -> NetworkState:
    return NetworkState(
        time=0.0,
        queues=rng.uniform(0.0, 2.0, size=grid.num_edges),
        densities=rng.uniform(0.0, peak, size=grid.total_cells),
        grid=grid,
        ledger=FluxLedger.empty(grid.num_edges),
    )


class TestKernels:
    @pytest.mark.parametrize("rho, mu, v, expected", [
        (1.5, 2.0, 1.0, 1.5),
        (3.0, 2.0, 1.0, 2.0),
        (0.0, 2.0, 1.0, 0.0),
    ])
    def test_flux(self, rho, mu, v, expected):
        assert flux(rho, mu, v) == expected

    def test_flux_rejects_negative_density(self):
        with pytest.raises(AssertionError):
            flux(-1.0, 2.0, 1.0)

    def test_g_in_on_diamond(self, diamond):
        grid = Grid.from_scenario(diamond)
        state = NetworkState.zeros(grid)
        exits = np.zeros(7)
        exits[0] = 1.5
        g_in = compute_g_in(state, exits, 3.0, diamond)
        assert g_in[0] == 1.5
        assert g_in[1] == pytest.approx(0.75)
        assert g_in[2] == pytest.approx(0.75)
        assert np.all(g_in[3:] == 0.0)

    def test_g_out_branches(self):
        assert compute_g_out(0.0, 1.5, 2.0, 0.1) == 1.5
        assert compute_g_out(5.0, 1.5, 2.0, 0.1) == 2.0

    def test_g_out_limiter_drains_queue(self):
        q, g_in, dt = 0.05, 1.0, 0.1
        g_out = compute_g_out(q, g_in, 2.0, dt)
        assert g_out == pytest.approx(1.5, abs=1e-15)
        assert q + dt * (g_in - g_out) == pytest.approx(0.0, abs=1e-15)

    def test_upwind_constant_state_is_fixed_point(self):
        rho, exit_flux = upwind_edge_step(np.full(10, 1.0), 1.0, 2.0, 1.0, 0.1, 0.1)
        assert np.array_equal(rho, np.full(10, 1.0))
        assert exit_flux == 1.0

    def test_upwind_single_step(self):
        rho, exit_flux = upwind_edge_step(np.array([1.0, 0.0]), 1.0, 2.0, 1.0, 0.1, 0.1)
        assert np.allclose(rho, [1.0, 1.0])
        assert exit_flux == 0.0

    def test_upwind_saturated(self):
        rho, exit_flux = upwind_edge_step(np.array([3.0, 3.0]), 2.0, 2.0, 1.0, 0.1, 0.1)
        assert np.array_equal(rho, [3.0, 3.0])
        assert exit_flux == 2.0

    def test_upwind_cfl_violation(self):
        with pytest.raises(CFLViolationError):
            upwind_edge_step(np.zeros(3), 0.0, 2.0, 1.0, 0.2, 0.1)


class TestEvolve:
    def test_zero_state_stays_zero(self, make_line):
        scenario = make_line(edges=3, inflow=0.0, horizon=5.0)
        grid = Grid.from_scenario(scenario)
        state = evolve(NetworkState.initial(scenario, grid), (2, 2, 2), 5.0, scenario)
        assert state.time == 5.0
        assert not np.any(state.queues)
        assert not np.any(state.densities)

    def test_semigroup_split_at_grid_time(self, diamond):
        grid = Grid.from_scenario(diamond)
        start = NetworkState.initial(diamond, grid)
        whole = evolve(start, ALL_UP, 30.0, diamond)
        split = evolve(evolve(start, ALL_UP, 13.0, diamond), ALL_UP, 30.0, diamond)
        assert np.allclose(whole.queues, split.queues, rtol=0.0, atol=1e-12)
        assert np.allclose(whole.densities, split.densities, rtol=0.0, atol=1e-12)

    def test_diamond_mass_balance(self, diamond):
        grid = Grid.from_scenario(diamond)
        state = evolve(NetworkState.initial(diamond, grid), ALL_UP, 30.0, diamond)
        total = state.network_mass() + state.ledger.outflow
        assert total == pytest.approx(45.0, rel=1e-9)
        assert state.ledger.inflow == pytest.approx(45.0, rel=1e-12)

    def test_mass_balance_with_failed_processor(self, diamond_piecewise):
        grid = Grid.from_scenario(diamond_piecewise)
        regimes = (2, 1, 2, 2, 2, 2, 2)
        state = evolve(NetworkState.initial(diamond_piecewise, grid), regimes, 30.0, diamond_piecewise)
        assert state.network_mass() + state.ledger.outflow == pytest.approx(17.5, rel=1e-9)
        # edge 2 is down, so everything routed to it waits in its queue
        assert state.queues[1] > 0.0
        assert state.edge_contents()[1] == 0.0

    def test_inflow_breakpoint_inside_a_step(self, make_line):
        inflow = PiecewiseConstantSignal.from_lists([0.0, 0.04, 5.03], [0.0, 2.0, 0.0], 10.0)
        scenario = make_line(inflow=inflow, regimes=(1,))
        grid = Grid.from_scenario(scenario)
        state = evolve(NetworkState.initial(scenario, grid), (1,), 10.0, scenario)
        assert scenario.total_inflow() == pytest.approx(9.98, rel=1e-12)
        assert state.ledger.inflow == pytest.approx(9.98, rel=1e-10)
        # capacity 0 keeps every arrival in the queue
        assert state.queues[0] == pytest.approx(9.98, rel=1e-10)

    def test_step_average_over_a_breakpoint(self, make_line):
        inflow = PiecewiseConstantSignal.from_lists([0.0, 0.25], [4.0, 0.0], 1.0)
        scenario = make_line(inflow=inflow, regimes=(1,), horizon=1.0)
        grid = Grid.from_scenario(scenario)
        state = NetworkState.initial(scenario, grid)
        g_in, injected = step_g_in(state, np.zeros(1), 0.2, 0.1, scenario)
        assert injected == pytest.approx(0.2)
        assert g_in[0] == pytest.approx(2.0)

    def test_off_grid_target(self, diamond):
        grid = Grid.from_scenario(diamond)
        state = evolve(NetworkState.initial(diamond, grid), ALL_UP, 2.35, diamond)
        assert state.time == 2.35
        assert state.ledger.inflow == pytest.approx(1.5 * 2.35, rel=1e-12)

    def test_backwards_is_domain_error(self, diamond):
        grid = Grid.from_scenario(diamond)
        state = evolve(NetworkState.initial(diamond, grid), ALL_UP, 1.0, diamond)
        with pytest.raises(DomainError):
            evolve(state, ALL_UP, 0.5, diamond)

    def test_beyond_horizon_is_domain_error(self, diamond):
        grid = Grid.from_scenario(diamond)
        with pytest.raises(DomainError):
            evolve(NetworkState.initial(diamond, grid), ALL_UP, 31.0, diamond)

    def test_step_mass_balance_per_edge(self, diamond):
        grid = Grid.from_scenario(diamond)
        rng = np.random.default_rng(3)
        state = random_state(grid, rng)
        after = evolve(state, ALL_UP, grid.dt, diamond)
        ledger = after.ledger
        before = state.queues + state.edge_contents()
        now = after.queues + after.edge_contents()
        expected = before + grid.dt * (ledger.g_in - ledger.exit_flux)
        assert np.allclose(now, expected, rtol=1e-12, atol=1e-12)

    def test_nonnegativity_and_maximum_principle(self, diamond):
        grid = Grid.from_scenario(diamond)
        rng = np.random.default_rng(5)
        for _ in range(10):
            state = random_state(grid, rng, peak=2.0)
            regimes = tuple(int(r) for r in rng.integers(1, 3, size=7))
            final = evolve(state, regimes, 5.0, diamond)
            assert np.all(final.queues >= 0.0)
            assert np.all(final.densities >= 0.0)
            assert np.all(grid.cell_velocity * final.densities <= 2.0 + 1e-12)

    def test_exit_fluxes_capped(self, diamond):
        grid = Grid.from_scenario(diamond)
        state = random_state(grid, np.random.default_rng(1), peak=5.0)
        assert np.all(exit_fluxes(state, np.full(7, 2.0)) <= 2.0)


class TestContraction:
    def test_l1_distance_examples(self, make_line):
        scenario = make_line()
        grid = Grid.from_scenario(scenario)
        zero = NetworkState.zeros(grid)
        assert l1_distance(zero, zero) == 0.0
        shifted = NetworkState(0.0, zero.queues + 0.3, zero.densities, grid)
        assert l1_distance(zero, shifted) == pytest.approx(0.3)
        full = NetworkState(0.0, zero.queues, np.ones(grid.total_cells), grid)
        assert l1_distance(zero, full) == pytest.approx(1.0)

    def test_l1_distance_grid_mismatch(self, make_line):
        a = NetworkState.zeros(Grid.from_scenario(make_line(edges=1)))
        b = NetworkState.zeros(Grid.from_scenario(make_line(edges=2)))
        with pytest.raises(DomainError):
            l1_distance(a, b)

    def test_l1_contraction_on_random_pairs(self, diamond):
        grid = Grid.from_scenario(diamond)
        rng = np.random.default_rng(2024)
        for _ in range(100):
            a = random_state(grid, rng)
            b = NetworkState(
                0.0,
                np.maximum(a.queues + rng.normal(0.0, 0.5, size=7), 0.0),
                np.clip(a.densities + rng.normal(0.0, 0.5, size=grid.total_cells), 0.0, 2.0),
                grid,
                FluxLedger.empty(7),
            )
            regimes = tuple(int(r) for r in rng.integers(1, 3, size=7))
            distance = l1_distance(a, b)
            for k in range(1, 21):
                t = grid.grid_time(k)
                a = evolve(a, regimes, t, diamond)
                b = evolve(b, regimes, t, diamond)
                current = l1_distance(a, b)
                assert current <= distance + 1e-12
                distance = current


class TestFlowCursor:
    def test_peek_matches_fresh_evolution(self, diamond_piecewise):
        grid = Grid.from_scenario(diamond_piecewise)
        start = evolve(NetworkState.initial(diamond_piecewise, grid), ALL_UP, 3.37, diamond_piecewise)
        regimes = (2, 2, 1, 2, 2, 2, 1)
        cursor = FlowCursor(start, regimes, diamond_piecewise)
        for t in (3.4, 3.95, 4.0, 7.123, 12.5, 12.55, 29.99, 30.0):
            peeked = cursor.peek(t)
            fresh = evolve(start, regimes, t, diamond_piecewise)
            assert peeked.time == fresh.time
            assert np.array_equal(peeked.queues, fresh.queues)
            assert np.array_equal(peeked.densities, fresh.densities)
            assert peeked.ledger.outflow == fresh.ledger.outflow
