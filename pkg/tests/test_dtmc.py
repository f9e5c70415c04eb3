import math
import os
import tempfile
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import sparse
from scipy.sparse.csgraph import breadth_first_order

from edca_markov.core.dtmc.measures import dump_triplets, mean_txop_duration, tau
from edca_markov.core.dtmc.state_space import enumerate_states
from edca_markov.core.dtmc.steady_state import residual_of, steady_state
from edca_markov.core.dtmc.transitions import build_transition_matrix
from edca_markov.core.exceptions import StateSpaceError, SteadyStateError
from edca_markov.core.model_config.arrivals import ArrivalKernel, rho
from edca_markov.core.model_config.profiles import PHY_PROFILES
from edca_markov.core.model_config.types import AcConfig
from edca_markov.core.solver.types import DurationSet

PHY = PHY_PROFILES["80211g"]


def tiny_ac(lam: float = 100.0, **kw) -> AcConfig:
    params = dict(aifsn=2, cw_min=1, m=0, retry_limit=1, txop_limit=0.0, queue_size=1,
                  payload_bits=8000, lam=lam, flows=1, name="tiny")
    params.update(kw)
    return AcConfig(**params)


def durations(n_txop: int = 1, t_s=250e-6, t_c=280e-6, t_exc=240e-6, t_bs=20e-6, t_b=300e-6) -> DurationSet:
    return DurationSet(aifs=28e-6, t_s=t_s, t_c=t_c, t_exc=t_exc, n_txop=n_txop,
                       t_txop=t_s, t_bs=t_bs, t_b=t_b)


def dense_stationary(matrix) -> np.ndarray:
    p = np.asarray(sparse.csr_matrix(matrix).todense())
    n = p.shape[0]
    a = np.vstack([p.T - np.eye(n), np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    b, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    return b


class TestStateSpace(unittest.TestCase):
    def test_smallest_space(self):
        space = enumerate_states(tiny_ac(), 1)
        self.assertEqual(len(space), 6)
        self.assertEqual(space.states(), [
            (0, -1, 0), (0, 0, 0), (0, 1, 0),
            (0, -1, 1), (0, 0, 1), (0, 1, 1),
        ])
        for i, state in enumerate(space.states()):
            self.assertEqual(space.idx(*state), i)

    def test_closed_form_count(self):
        ac = tiny_ac(cw_min=7, m=3, retry_limit=7, queue_size=10)
        space = enumerate_states(ac, 1)
        windows = [7, 15, 31, 63, 63, 63, 63]
        expected = sum(w + 1 for w in windows) * 10 + (7 + 1) + (10 + 1)
        self.assertEqual(len(space), expected)
        self.assertEqual(space.windows, tuple(windows))

    def test_txop_states_only_at_stage_zero(self):
        space = enumerate_states(tiny_ac(retry_limit=3, m=1, queue_size=2), 4)
        self.assertIn((0, -4, 2), space)
        self.assertNotIn((1, -1, 2), space)
        self.assertNotIn((1, 0, 0), space)
        with self.assertRaises(StateSpaceError):
            space.idx(1, 0, 0)
        counts = space.region_counts
        self.assertEqual(counts["txop"], 4 * 3)
        self.assertEqual(sum(counts.values()), len(space))

    def test_invalid_txop_count(self):
        with self.assertRaises(StateSpaceError):
            enumerate_states(tiny_ac(), 0)


class TestTransitionMatrix(unittest.TestCase):
    def test_golden_six_state_matrix(self):
        """最小链 (r=1, W_0=1, QS=1, N=1) 的每个元素"""
        lam, p = 100.0, 0.2
        dur = durations()
        ac = tiny_ac(lam=lam)
        matrix = build_transition_matrix(ac, PHY, p, dur, ArrivalKernel.for_ac(ac))

        def none(t):
            return math.exp(-lam * t)

        r = -math.expm1(-lam * PHY.t_slot)
        a_bs, a_b, a_s = none(dur.t_bs), none(dur.t_b), none(dur.t_s)
        expected = np.zeros((6, 6))
        # (0,-1,0)：TXOP 结束，后退避在 W_0 上均匀
        expected[0, 1] = expected[0, 2] = 0.5
        # (0,0,0)：空闲状态
        expected[1, 1] = (1 - p) * (1 - r) + p * a_b
        expected[1, 4] = expected[1, 5] = p / 2 * (1 - a_b)
        expected[1, 0] = (1 - p) * r * a_s
        expected[1, 3] = (1 - p) * r * (1 - a_s)
        # (0,1,0)：递减
        expected[2, 1] = a_bs
        expected[2, 4] = 1 - a_bs
        # (0,-1,1)：TXOP 用尽
        expected[3, 4] = expected[3, 5] = 0.5
        # (0,0,1)：缓存满，成功或重试丢弃后确定地回到 l=0
        expected[4, 0] = 1 - p
        expected[4, 1] = expected[4, 2] = p / 2
        # (0,1,1)
        expected[5, 4] = 1.0
        np.testing.assert_allclose(matrix.toarray(), expected, atol=1e-15)

    def test_decrement_row_structure(self):
        ac = tiny_ac(cw_min=7, m=3, retry_limit=7, queue_size=10)
        space = enumerate_states(ac, 1)
        matrix = build_transition_matrix(ac, PHY, 0.3, durations(), ArrivalKernel.for_ac(ac), space)
        row = matrix.getrow(space.idx(0, 5, 2))
        targets = [space.states()[c] for c in row.indices]
        self.assertTrue(targets)
        for j, k, l in targets:
            self.assertEqual((j, k), (0, 4))
            self.assertGreaterEqual(l, 2)

    def test_collision_free_success(self):
        ac = tiny_ac(cw_min=7, m=3, retry_limit=7, queue_size=5, lam=500.0)
        space = enumerate_states(ac, 1)
        matrix = build_transition_matrix(ac, PHY, 0.0, durations(), ArrivalKernel.for_ac(ac), space)
        for j in range(ac.retry_limit):
            row = matrix.getrow(space.idx(j, 0, 3))
            for col in row.indices:
                j2, k2, _ = space.states()[col]
                self.assertEqual((j2, k2), (0, -1))

    def test_txop_exchange_on_full_buffer_keeps_arrivals(self):
        lam, qs = 1500.0, 3
        dur = durations(n_txop=3)
        ac = tiny_ac(lam=lam, cw_min=3, m=1, retry_limit=2, queue_size=qs)
        space = enumerate_states(ac, 3)
        matrix = build_transition_matrix(ac, PHY, 0.2, dur, ArrivalKernel.for_ac(ac), space).toarray()
        row = matrix[space.idx(0, -1, qs)]
        none = math.exp(-lam * dur.t_exc)
        self.assertGreater(row[space.idx(0, -2, qs)], 0.0)
        self.assertAlmostEqual(row[space.idx(0, -2, qs)], 1.0 - none, places=14)
        self.assertAlmostEqual(row[space.idx(0, -2, qs - 1)], none, places=14)
        # 退避中的成功仍然确定地回到 QS-1
        success = matrix[space.idx(0, 0, qs)]
        self.assertAlmostEqual(success[space.idx(0, -1, qs - 1)], 0.8, places=14)
        self.assertEqual(success[space.idx(0, -1, qs)], 0.0)

    def test_every_state_reachable_from_idle(self):
        ac = tiny_ac(cw_min=3, m=1, retry_limit=3, queue_size=3, lam=2000.0)
        space = enumerate_states(ac, 3)
        matrix = build_transition_matrix(ac, PHY, 0.3, durations(n_txop=3), ArrivalKernel.for_ac(ac), space)
        order = breadth_first_order(matrix, space.idx(0, 0, 0), directed=True, return_predecessors=False)
        self.assertEqual(len(order), len(space))

    def test_rejects_mismatched_space(self):
        ac = tiny_ac()
        with self.assertRaises(StateSpaceError):
            build_transition_matrix(ac, PHY, 0.1, durations(n_txop=2), ArrivalKernel.for_ac(ac),
                                    enumerate_states(ac, 1))
        with self.assertRaises(StateSpaceError):
            build_transition_matrix(ac, PHY, 1.0, durations(), ArrivalKernel.for_ac(ac))

    @settings(max_examples=40, deadline=None)
    @given(
        cw_min=st.sampled_from([1, 3, 7]),
        r=st.integers(min_value=1, max_value=3),
        qs=st.integers(min_value=1, max_value=4),
        n_txop=st.integers(min_value=1, max_value=3),
        lam=st.floats(min_value=0.0, max_value=5000.0),
        p_c=st.floats(min_value=0.0, max_value=0.9),
    )
    def test_rows_stochastic_and_steady_state_matches_dense(self, cw_min, r, qs, n_txop, lam, p_c):
        ac = tiny_ac(lam=lam, cw_min=cw_min, retry_limit=r, m=r - 1, queue_size=qs)
        dur = durations(n_txop=n_txop)
        matrix = build_transition_matrix(ac, PHY, p_c, dur, ArrivalKernel.for_ac(ac))
        sums = np.asarray(matrix.sum(axis=1)).ravel()
        self.assertLessEqual(np.abs(sums - 1.0).max(), 1e-12)

        b = steady_state(matrix)
        self.assertLess(residual_of(matrix, b), 1e-10)
        np.testing.assert_allclose(b, dense_stationary(matrix), atol=1e-9)


class TestSteadyState(unittest.TestCase):
    def test_symmetric_two_state(self):
        b = steady_state(sparse.csr_matrix([[0.5, 0.5], [0.5, 0.5]]))
        np.testing.assert_allclose(b, [0.5, 0.5], atol=1e-12)

    def test_near_identity_chain(self):
        eps = 1e-4
        rng = np.random.default_rng(3)
        n = 50
        noise = rng.random((n, n))
        p = (1 - eps) * np.eye(n) + eps * noise / noise.sum(axis=1, keepdims=True)
        b = steady_state(sparse.csr_matrix(p))
        np.testing.assert_allclose(b, dense_stationary(p), atol=1e-10)

    def test_golden_fixture_matches_dense(self):
        ac = tiny_ac()
        matrix = build_transition_matrix(ac, PHY, 0.1, durations(), ArrivalKernel.for_ac(ac))
        np.testing.assert_allclose(steady_state(matrix), dense_stationary(matrix), atol=1e-12)

    def test_rejects_non_square(self):
        with self.assertRaises(SteadyStateError):
            steady_state(sparse.csr_matrix(np.ones((2, 3)) / 3))


class TestMeasures(unittest.TestCase):
    def test_tau_on_golden_fixture(self):
        p_c = 0.1
        ac = tiny_ac()
        kernel = ArrivalKernel.for_ac(ac)
        space = enumerate_states(ac, 1)
        matrix = build_transition_matrix(ac, PHY, p_c, durations(), kernel, space)
        b = dense_stationary(matrix)
        r = rho(kernel, PHY)
        # (0,0,1) 发送；空闲状态以 ρ(1-p_c) 直接发送；分母只含 k >= 0 的状态
        expected = (b[4] + b[1] * r * (1 - p_c)) / (b[1] + b[2] + b[4] + b[5])
        self.assertAlmostEqual(tau(b, space, p_c, r), expected, places=12)

    def test_tau_is_zero_without_traffic(self):
        ac = tiny_ac(lam=0.0, cw_min=7, m=3, retry_limit=7, queue_size=5)
        kernel = ArrivalKernel.for_ac(ac)
        space = enumerate_states(ac, 1)
        b = steady_state(build_transition_matrix(ac, PHY, 0.0, durations(), kernel, space))
        self.assertAlmostEqual(float(b[space.idx(0, 0, 0)]), 1.0, places=12)
        self.assertAlmostEqual(tau(b, space, 0.0, rho(kernel, PHY)), 0.0, places=12)

    def test_single_exchange_txop_is_success_time(self):
        ac = tiny_ac()
        space = enumerate_states(ac, 1)
        dur = durations()
        b = steady_state(build_transition_matrix(ac, PHY, 0.1, dur, ArrivalKernel.for_ac(ac), space))
        t_txop, fallback = mean_txop_duration(b, space, dur)
        self.assertAlmostEqual(t_txop, dur.t_s, places=15)
        self.assertFalse(fallback)

    def test_exhausted_txop(self):
        ac = tiny_ac(queue_size=3)
        space = enumerate_states(ac, 2)
        dur = durations(n_txop=2)
        b = np.zeros(len(space))
        b[space.idx(0, -2, 2)] = 0.25
        b[space.idx(0, -2, 3)] = 0.75
        t_txop, fallback = mean_txop_duration(b, space, dur)
        self.assertAlmostEqual(t_txop, dur.t_exc + dur.t_s, places=15)
        self.assertFalse(fallback)

    def test_txop_fallback_without_weight(self):
        ac = tiny_ac(queue_size=3)
        space = enumerate_states(ac, 2)
        dur = durations(n_txop=2)
        b = np.zeros(len(space))
        b[space.idx(0, 0, 0)] = 1.0
        self.assertEqual(mean_txop_duration(b, space, dur), (dur.t_s, True))

    def test_dump_triplets(self):
        ac = tiny_ac()
        space = enumerate_states(ac, 1)
        matrix = build_transition_matrix(ac, PHY, 0.2, durations(), ArrivalKernel.for_ac(ac), space)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "chain.txt")
            dump_triplets(space, matrix, path)
            with open(path, encoding="utf-8") as f:
                lines = f.read().splitlines()
        self.assertEqual(lines[0], f"# states 6 nnz {matrix.nnz}")
        self.assertEqual(lines[1], "# state 0 0 -1 0")
        triplets = [line.split() for line in lines if not line.startswith("#")]
        self.assertEqual(len(triplets), matrix.nnz)
        total = sum(float(v) for row, _, v in triplets if row == "1")
        self.assertAlmostEqual(total, 1.0, places=12)


if __name__ == "__main__":
    unittest.main()
