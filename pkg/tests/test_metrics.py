import unittest
from dataclasses import replace

import numpy as np

from edca_markov.core.dtmc.measures import sojourn_times
from edca_markov.core.exceptions import StateSpaceError
from edca_markov.core.metrics.delay import access_delay_table, total_delay
from edca_markov.core.metrics.loss import queue_distribution, time_share
from edca_markov.core.metrics.report import compute_metrics
from edca_markov.core.metrics.throughput import idle_probability, success_probability
from edca_markov.core.model_config.arrivals import ArrivalKernel, rho
from edca_markov.core.model_config.profiles import reference_scenario
from edca_markov.core.schemas.documents import ROW_COLUMNS, MetricsDocument, metric_rows
from edca_markov.core.solver.fixed_point import solve

DATA_RATE = 54e6


def single_ac(flows: int = 1, **changes):
    scenario = reference_scenario(flows=flows)
    return replace(scenario, acs=(replace(scenario.acs[1], **changes),))


class TestZeroLoad(unittest.TestCase):
    def test_everything_vanishes(self):
        metrics = compute_metrics(solve(reference_scenario(load_bps=0.0)))
        self.assertAlmostEqual(metrics.p_idle, 1.0, places=9)
        self.assertAlmostEqual(metrics.total_throughput, 0.0, places=12)
        for ac in metrics.per_ac:
            with self.subTest(ac=ac.name):
                self.assertAlmostEqual(ac.throughput, 0.0, places=12)
                self.assertAlmostEqual(ac.plr, 0.0, places=12)
                self.assertEqual(ac.mean_delay, 0.0)
                self.assertAlmostEqual(ac.mean_queue_length, 0.0, places=12)
                self.assertAlmostEqual(ac.queue_distribution[0], 1.0, places=12)


class TestReferenceScenario(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.solved = solve(reference_scenario())
        cls.metrics = compute_metrics(cls.solved)

    def test_throughput_bounds(self):
        self.assertTrue(0.0 <= self.metrics.p_idle <= 1.0)
        self.assertLessEqual(self.metrics.total_throughput, 1.0)
        self.assertAlmostEqual(self.metrics.total_throughput, sum(ac.throughput for ac in self.metrics.per_ac))
        for ac in self.metrics.per_ac:
            self.assertGreater(ac.throughput, 0.0)
            self.assertAlmostEqual(ac.throughput_bps, ac.throughput * DATA_RATE)

    def test_per_ac_success_probabilities_by_hand(self):
        # AC1 的 d = 1：只能在第 2 个空闲时隙之后发送；AC3 的 d = 0
        tau_low, tau_high = self.solved.taus
        p_i = self.metrics.p_idle
        p_low = 5 * tau_low * p_i * (1 - tau_low) ** 4 * (1 - tau_high) ** 5
        p_high = 5 * tau_high * ((1 - p_i) * (1 - tau_high) ** 4 + p_i * (1 - tau_low) ** 5 * (1 - tau_high) ** 4)
        self.assertAlmostEqual(self.metrics.per_ac[0].p_s, p_low, places=14)
        self.assertAlmostEqual(self.metrics.per_ac[1].p_s, p_high, places=14)

    def test_idle_probability_is_cached_value(self):
        self.assertAlmostEqual(idle_probability(self.solved), self.metrics.p_idle, places=12)

    def test_loss_below_knee(self):
        for ac in self.metrics.per_ac:
            self.assertLess(ac.plr, 1e-3)

    def test_queue_distribution(self):
        for ac in self.metrics.per_ac:
            dist = np.array(ac.queue_distribution)
            self.assertEqual(len(dist), 11)
            self.assertAlmostEqual(float(dist.sum()), 1.0, places=10)
            self.assertAlmostEqual(float(np.dot(np.arange(11), dist)), ac.mean_queue_length, places=12)

    def test_access_delay_is_affine_in_counter(self):
        for i in self.solved.active():
            table = access_delay_table(self.solved, i)
            t_bs = self.solved.durations[i].t_bs
            for stage in table.access:
                np.testing.assert_allclose(np.diff(stage), t_bs, rtol=1e-12)
            self.assertGreater(self.metrics.per_ac[i].mean_delay, table.mean_access * 0.5)
            self.assertAlmostEqual(total_delay(self.solved, i, table), self.metrics.per_ac[i].mean_delay)

    def test_documents(self):
        document = MetricsDocument.from_metrics(self.metrics)
        dumped = document.model_dump()
        self.assertEqual(dumped["scenario"], "reference")
        self.assertEqual(len(dumped["per_ac"]), 2)
        self.assertEqual(dumped["per_ac"][1]["name"], "AC3")
        rows = metric_rows(self.metrics, (5, 5), axis="offered_load_per_ac", value=2e6)
        self.assertEqual([row.ac for row in rows], ["AC1", "AC3"])
        self.assertTrue(all(row.status == "ok" for row in rows))
        self.assertEqual(tuple(rows[0].model_dump()), ROW_COLUMNS)


class TestLoadRegimes(unittest.TestCase):
    def test_linear_region_carries_offered_load(self):
        load = 1e6
        metrics = compute_metrics(solve(reference_scenario(load_bps=load)))
        for ac in metrics.per_ac:
            with self.subTest(ac=ac.name):
                self.assertAlmostEqual(ac.throughput / (5 * load / DATA_RATE), 1.0, delta=0.03)

    def test_txop_increases_saturation_throughput(self):
        plain = compute_metrics(solve(reference_scenario(load_bps=5e6)))
        bursty = compute_metrics(solve(reference_scenario(load_bps=5e6, txop=True)))
        self.assertGreater(bursty.total_throughput, plain.total_throughput)
        self.assertEqual([ac.n_txop for ac in bursty.per_ac], [11, 5])

    def test_full_buffer_dominates_near_saturation(self):
        metrics = compute_metrics(solve(reference_scenario(load_bps=5e6)))
        low = metrics.per_ac[0]
        self.assertEqual(int(np.argmax(low.queue_distribution)), len(low.queue_distribution) - 1)
        self.assertGreater(low.plr, 1e-3)


class TestReducedCases(unittest.TestCase):
    def test_lone_station_succeeds_whenever_it_sends(self):
        solved = solve(single_ac(flows=1))
        self.assertEqual(solved.p_cs[0], 0.0)
        self.assertAlmostEqual(success_probability(solved, 0), solved.taus[0], places=12)
        table = access_delay_table(solved, 0)
        t_s = solved.durations[0].t_s
        for stage in table.access:
            self.assertAlmostEqual(float(stage[0]), t_s, places=15)

    def test_single_attempt_access_delay(self):
        solved = solve(single_ac(flows=3, retry_limit=1, m=0))
        dur = solved.durations[0]
        table = access_delay_table(solved, 0)
        self.assertEqual(len(table.access), 1)
        self.assertAlmostEqual(table.mean_access, dur.t_s + dur.t_bs * 7 / 2, places=15)

    def test_single_packet_buffer_delay(self):
        solved = solve(single_ac(flows=3, queue_size=1))
        table = access_delay_table(solved, 0)
        space = solved.steady_states[0].space
        p_lr = solved.p_cs[0] ** solved.scenario.acs[0].retry_limit
        for j, k in ((0, 0), (0, 5), (2, 10)):
            with self.subTest(j=j, k=k):
                expected = (1 - p_lr) * table.A(j, k) + p_lr * table.A_d(j, k)
                self.assertAlmostEqual(table.D(j, k, 1), expected, places=15)
                # 缓存满时到达的包被丢弃，不计入时延
                self.assertEqual(table.per_state[space.idx(j, k, 1)], 0.0)
                self.assertEqual(table.b_bar[space.idx(j, k, 1)], 0.0)
        self.assertAlmostEqual(float(table.b_bar.sum()), 1.0, places=12)

    def test_arrival_behind_head_waits_for_its_own_access(self):
        solved = solve(single_ac(flows=3))
        table = access_delay_table(solved, 0)
        space = solved.steady_states[0].space
        p_lr = table.p_lr
        # 队首正在退避，到达的包排第 2 位，N = 1 时要再经历一次完整的接入
        expected = (1 - p_lr) * (table.A(1, 4) + table.mean_access * (1 - p_lr)) \
            + p_lr * (table.A_d(1, 4) + table.mean_access * (1 - p_lr))
        self.assertAlmostEqual(table.per_state[space.idx(1, 4, 1)], expected, places=15)
        self.assertAlmostEqual(table.per_state[space.idx(0, 3, 0)], table.A(0, 3), places=15)
        self.assertAlmostEqual(table.per_state[space.idx(0, 0, 0)], table.mean_access_idle, places=15)

    def test_silent_ac_does_not_succeed(self):
        solved = solve(reference_scenario().with_ac(0, lam=0.0))
        self.assertAlmostEqual(success_probability(solved, 0), 0.0, places=12)


class TestTxopDelay(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.solved = solve(reference_scenario(load_bps=2.5e6, txop=True))
        cls.table = access_delay_table(cls.solved, 1)

    def test_remaining_exchanges(self):
        table = self.table
        self.assertEqual(table.n_txop, 5)
        t_exc = table.t_exc
        # (0,-2) 时还剩 3 个交换，排第 3 位的包在本次 TXOP 内发出
        self.assertAlmostEqual(table.D(0, -2, 3), 3 * t_exc, places=15)
        self.assertAlmostEqual(table.D(0, -1, 4), 4 * t_exc, places=15)
        # (0,-4) 时只剩 1 个交换，其余的包等下一次接入
        self.assertAlmostEqual(table.D(0, -4, 3), t_exc + table.tail_delay(2), places=15)
        self.assertAlmostEqual(table.D(0, -3, 3), 2 * t_exc + table.tail_delay(1), places=15)
        self.assertAlmostEqual(table.tail_delay(1), table.mean_access * (1 - table.p_lr), places=15)

    def test_arrival_during_exchange(self):
        space = self.solved.steady_states[1].space
        self.assertAlmostEqual(self.table.per_state[space.idx(0, -4, 2)], self.table.D(0, -4, 3), places=15)
        # TXOP 结束状态不占时间，不会看到到达
        self.assertEqual(self.table.b_bar[space.idx(0, -5, 2)], 0.0)
        self.assertEqual(self.table.per_state[space.idx(0, -5, 2)], 0.0)

    def test_tagged_position_must_be_positive(self):
        with self.assertRaises(StateSpaceError):
            self.table.D(0, -1, 0)


class TestTimeWeighting(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.solved = solve(reference_scenario(load_bps=2e6))

    def test_queue_distribution_weights_by_sojourn(self):
        solved = self.solved
        for i in solved.active():
            with self.subTest(i=i):
                state, dur = solved.steady_states[i], solved.durations[i]
                kernel = ArrivalKernel.for_ac(solved.scenario.acs[i])
                times = sojourn_times(state.space, dur, solved.p_cs[i], rho(kernel, solved.scenario.phy),
                                      solved.scenario.phy.t_slot)
                _, _, l = state.space.coords
                weighted = np.bincount(l, weights=state.b * times, minlength=state.space.queue_size + 1)
                np.testing.assert_allclose(queue_distribution(solved, i), weighted / weighted.sum(), rtol=1e-12)
                np.testing.assert_allclose(time_share(solved, i).sum(), 1.0, rtol=1e-12)

    def test_lone_station_sees_idle_channel(self):
        solved = solve(single_ac(flows=1))
        dur = solved.durations[0]
        self.assertAlmostEqual(dur.p_busy, 0.0, places=15)
        table = access_delay_table(solved, 0)
        self.assertAlmostEqual(table.mean_access_idle, dur.t_s, places=15)

    def test_idle_busy_prob_matches_collision_prob_for_one_ac(self):
        solved = solve(single_ac(flows=5))
        self.assertAlmostEqual(solved.durations[0].p_busy, solved.p_cs[0], places=12)


if __name__ == "__main__":
    unittest.main()
