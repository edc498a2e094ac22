import math

import numpy as np
import pytest

import evacgame as eg
from evacgame import rng
from evacgame.network import ConfigurationError

PAPER0 = eg.paper_coefficient_matrix(0.0)


class TestRates:
    def test_evacuation_rate(self):
        assert eg.evacuation_rate(np.array([1, 0, 1, 1], dtype=np.uint8)) == 0.75

    def test_final_rate_window(self, small_ws):
        traj = eg.Trajectory(200, 10)
        for t in range(11):
            d = np.zeros(200, dtype=np.uint8)
            d[: 10 * t] = 1
            traj.record(t, d)
        # last 4 recorded rates are 0.35, 0.40, 0.45, 0.50
        assert eg.final_rate(traj, window=4) == pytest.approx(0.425)

    def test_final_rate_window_too_long(self):
        traj = eg.Trajectory(10, 5)
        with pytest.raises(ConfigurationError):
            eg.final_rate(traj, window=6)

    def test_aggregate_runs(self):
        mean, sd = eg.aggregate_runs([0.2, 0.4, 0.6])
        assert mean == pytest.approx(0.4)
        assert sd == pytest.approx(np.std([0.2, 0.4, 0.6], ddof=1))

    def test_aggregate_single_run_sd_zero(self):
        assert eg.aggregate_runs([0.7]) == (0.7, 0.0)

    def test_aggregate_empty(self):
        with pytest.raises(ValueError):
            eg.aggregate_runs([])


class TestSwitchCounts:
    def test_hand_built_trajectory(self, path3):
        traj = eg.Trajectory(3, 2)
        traj.record(0, np.array([1, 0, 1], dtype=np.uint8))
        traj.record(1, np.array([0, 0, 1], dtype=np.uint8))  # node 0 (deg 1) switches
        traj.record(2, np.array([0, 1, 0], dtype=np.uint8))  # nodes 1 (deg 2), 2 (deg 1)
        counts = eg.switch_counts_by_degree(traj, path3)
        assert set(counts) == {1, 2}
        assert counts[1].tolist() == [1, 1]
        assert counts[2].tolist() == [0, 1]

    def test_totals_match_direct_count(self, small_ws):
        initial = (rng.stream(8, "init").random(200) < 0.5).astype(np.uint8)
        traj = eg.run(
            small_ws, initial, eg.SimulationConfig(matrix=PAPER0, timesteps=40, seed=2)
        )
        counts = eg.switch_counts_by_degree(traj, small_ws)
        total = sum(int(c.sum()) for c in counts.values())
        direct = 0
        for t in range(1, 41):
            direct += int((traj.decisions_at(t) != traj.decisions_at(t - 1)).sum())
        assert total == direct
        assert total > 0


class TestHeatmap:
    def test_rows_sorted_by_degree(self, small_ws):
        initial = (rng.stream(8, "init").random(200) < 0.5).astype(np.uint8)
        traj = eg.run(
            small_ws, initial, eg.SimulationConfig(matrix=PAPER0, timesteps=10, seed=2)
        )
        hm = eg.decision_heatmap(traj, small_ws, rank_seed=0)
        assert hm.shape == (200, 11)
        rank = eg.degree_rank(small_ws, eg.Order.HIGHEST_FIRST, seed=0)
        degs = small_ws.degrees[rank.ranked_nodes]
        assert (np.diff(degs) <= 0).all()
        assert np.array_equal(hm[:, 0], initial[rank.ranked_nodes])
        # column means equal the recorded rates
        assert np.allclose(hm.mean(axis=0), traj.rates)


class TestDegreeContribution:
    @pytest.fixture
    def tiny_rank(self):
        # 3 nodes of degree 2 (triangle) plus 4 of degree 1 in pairs
        g = eg.Graph(7, [(0, 1), (0, 2), (1, 2), (3, 4), (5, 6)])
        return eg.degree_rank(g, eg.Order.HIGHEST_FIRST, seed=0)

    def test_telescoping_decomposition(self, tiny_rank):
        thresholds = [float(c) for _, c in tiny_rank.cumulative_thresholds]
        assert thresholds == [pytest.approx(3 / 7), 1.0]
        final_rates = {
            (0.0, 0.0): 0.10,
            (0.0, 3 / 7): 0.50,
            (0.0, 1.0): 0.90,
            (0.1, 0.0): 0.30,
            (0.1, 3 / 7): 0.80,
            (0.1, 1.0): 1.00,
        }
        rows = eg.degree_contribution(final_rates, tiny_rank)
        assert rows[0].degree is None
        assert math.isnan(rows[0].population_pct)
        assert rows[0].rate_change[0.0] == pytest.approx(10.0)
        assert rows[1].degree == 2
        assert rows[1].population_pct == pytest.approx(100 * 3 / 7)
        assert rows[1].rate_change[0.0] == pytest.approx(40.0)
        assert rows[1].rate_change_per_agent[0.0] == pytest.approx(40.0 / 3)
        assert rows[2].degree == 1
        assert rows[2].rate_change[0.1] == pytest.approx(20.0)
        # start row plus all changes telescopes to the gamma = 1 rate
        for theta in (0.0, 0.1):
            total = sum(r.rate_change[theta] for r in rows)
            assert total == pytest.approx(100.0 * final_rates[(theta, 1.0)])

    def test_missing_rate_rejected(self, tiny_rank):
        with pytest.raises(ConfigurationError):
            eg.degree_contribution({(0.0, 0.0): 0.1}, tiny_rank)
