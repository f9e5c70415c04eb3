"""
时隙级 EDCA 离散事件仿真器（每个站点一个 AC），基于 simpy

时间以整数纳秒表示。忙时段结束于 E 之后，第 n 个退避时隙（n >= 1）
从 E + AIFS_min + (n-1)·T_slot 开始；d_i 个额外 AIFS 时隙之后 AC_i 才能计数，
即 n >= d_i + 1。退避计数 c 的站点在 max(进入时隙, d_i+1) + c 号时隙发送；
同一时隙发送的站点全部碰撞。计数过程中遇到的忙时隙同样计数一次，然后冻结到下一个空闲期。

每个站点有一个到达进程，信道进程不逐个时隙推进，而是直接等到下一次发送；
空闲期内的到达会唤醒信道进程重新计算。同一时刻的事件顺序：
忙时段（或其中一次交换）的结束先于到达，到达先于空闲期内的发送。
"""
import math
from pathlib import Path
from typing import IO, Generator, Optional, Sequence

import numpy as np
import simpy

from edca_markov.core.exceptions import SimulationError
from edca_markov.core.logger import logger
from edca_markov.core.model_config.phy import aifs_of, collision_duration, cw_at_stage, exchange_duration, \
    success_duration, txop_packets
from edca_markov.core.model_config.types import Scenario, StationMode
from edca_markov.core.sim.arrivals import NEVER, NS, ArrivalStream
from edca_markov.core.sim.types import AcSimStats, ArrivalProcess, SimStats, StationState

Process = Generator[simpy.Event, object, None]


def _ns(seconds: float) -> int:
    return int(round(seconds * NS))


class _AcTiming:
    """单个 AC 的整数纳秒时序"""

    def __init__(self, scenario: Scenario, i: int):
        ac, phy, mode = scenario.acs[i], scenario.phy, scenario.access_mode
        aifs = aifs_of(ac, phy)
        self.first_exchange = _ns(success_duration(ac, phy, mode) - aifs)
        self.exchange = _ns(exchange_duration(ac, phy, mode))
        self.collision = _ns(collision_duration(ac, phy, mode) - aifs)
        self.n_txop = txop_packets(ac, phy, mode)
        self.windows = tuple(cw_at_stage(ac, j) for j in range(ac.retry_limit))
        self.queue_size = ac.queue_size
        self.payload_bits = ac.payload_bits


class Simulator:
    def __init__(self, scenario: Scenario, seed: int, duration: float,
                 arrivals: Optional[Sequence[ArrivalProcess]] = None, trace: Optional[IO[str]] = None):
        if scenario.station_mode != StationMode.HETEROGENEOUS:
            raise SimulationError("the simulator supports one AC per station (heterogeneous mode) only")
        if not duration > 0 or not math.isfinite(duration):
            raise SimulationError(f"duration must be finite and > 0, got {duration}")
        if duration * NS >= NEVER:
            raise SimulationError(f"duration {duration}s overflows the nanosecond clock")
        if arrivals is None:
            arrivals = [ArrivalProcess.for_ac(ac) for ac in scenario.acs]
        if len(arrivals) != len(scenario.acs):
            raise SimulationError(f"expected {len(scenario.acs)} arrival processes, got {len(arrivals)}")

        self.scenario = scenario
        self.seed = seed
        self.end = _ns(duration)
        self.trace = trace
        phy = scenario.phy
        self.slot = _ns(phy.t_slot)
        active = [ac for ac in scenario.acs if ac.active]
        aifsn_min = min(ac.aifsn for ac in active)
        self.aifs_min = _ns(phy.sifs + aifsn_min * phy.t_slot)
        self.timing = [_AcTiming(scenario, i) for i in range(len(scenario.acs))]

        self.stats = SimStats(
            scenario=scenario.name, seed=seed, duration=duration, data_rate=phy.data_rate,
            per_ac=[AcSimStats(name=ac.name or f"AC{i}", stations=ac.flows) for i, ac in enumerate(scenario.acs)],
        )
        for i, ac in enumerate(scenario.acs):
            self.stats.per_ac[i].queue_time_ns = np.zeros(ac.queue_size + 1, dtype=np.int64)

        self.stations: list[StationState] = []
        for i, ac in enumerate(scenario.acs):
            for _ in range(ac.flows):
                self.stations.append(StationState(station=len(self.stations), ac=i, d=ac.aifsn - aifsn_min))

        # 每个站点两条独立的随机流：到达与退避
        children = np.random.SeedSequence(seed).spawn(2 * len(self.stations))
        self.backoff_rng = [np.random.default_rng(children[2 * s + 1]) for s in range(len(self.stations))]
        self.streams = [
            ArrivalStream(arrivals[st.ac], np.random.default_rng(children[2 * st.station]))
            for st in self.stations
        ]

        self.env = simpy.Environment()
        self.busy = False
        self.wakeup: Optional[simpy.Event] = None
        self.period_start = 0        # 上一个忙时段结束的时刻 E

    # ------------------------------------------------------------------ 工具

    def _log(self, t: int, st: StationState, event: str):
        if self.trace is not None:
            self.trace.write(f"{t} {st.station} {st.ac} {event} {len(st.queue)}\n")

    def _slot_start(self, n: int) -> int:
        return self.period_start + self.aifs_min + (n - 1) * self.slot

    def _slot_at_or_after(self, t: int) -> int:
        offset = t - self.period_start - self.aifs_min
        if offset <= 0:
            return 1
        return -(-offset // self.slot) + 1

    def _draw(self, st: StationState, stage: int) -> int:
        w = self.timing[st.ac].windows[stage]
        value = int(self.backoff_rng[st.station].integers(0, w + 1))
        self.stats.per_ac[st.ac].cw_draws[(stage, value)] += 1
        return value

    def _queue_changed(self, st: StationState, t: int):
        # 直方图只覆盖 [0, 仿真结束]
        t = min(t, self.end)
        hist = self.stats.per_ac[st.ac].queue_time_ns
        hist[len(st.queue)] += max(0, t - st.last_change)
        st.last_change = max(st.last_change, t)

    def _wake(self):
        if self.wakeup is not None and not self.wakeup.triggered:
            self.wakeup.succeed()

    # ------------------------------------------------------------------ 到达

    def _arrive(self, t: int, st: StationState, busy: bool):
        stats = self.stats.per_ac[st.ac]
        stats.generated += 1
        if len(st.queue) >= self.timing[st.ac].queue_size:
            stats.queue_drops += 1
            self._log(t, st, "drop_full")
            return
        was_empty = not st.queue
        self._queue_changed(st, t)
        st.queue.append(t)
        self._log(t, st, "arrival")
        if not was_empty:
            return
        if busy:
            if not st.active:
                # 信道忙时到达空闲站点：从 W_0 抽取退避
                st.active = True
                st.stage = 0
                st.counter = self._draw(st, 0)
            return
        s = self._slot_at_or_after(t)
        if st.active and st.tx_slot >= s:
            return
        # 信道空闲：AIFS 完成后立即发送
        st.active = True
        st.stage = 0
        st.counter = 0
        st.start_slot = st.tx_slot = max(s, st.d + 1)

    def _source(self, st: StationState) -> Process:
        """站点的到达进程，只产生时刻 < 仿真结束的到达"""
        stream = self.streams[st.station]
        while True:
            t = stream.next_time()
            if t >= self.end:
                return
            yield self.env.timeout(t - self.env.now)
            # 同一时刻已经排定的信道事件先执行
            yield self.env.timeout(0)
            busy = self.busy
            self._arrive(t, st, busy)
            if not busy:
                self._wake()

    # ------------------------------------------------------------------ 信道

    def _begin_period(self, t: int):
        self.period_start = t
        for st in self.stations:
            if st.active:
                st.start_slot = st.d + 1
                st.tx_slot = st.start_slot + st.counter

    def _next_transmission(self) -> Optional[int]:
        slots = [st.tx_slot for st in self.stations if st.active and st.queue]
        return min(slots) if slots else None

    def _channel(self) -> Process:
        env = self.env
        while env.now < self.end:
            n_star = self._next_transmission()
            t_star = self._slot_start(n_star) if n_star is not None else NEVER
            if t_star > env.now:
                self.wakeup = env.event()
                yield env.timeout(min(t_star, self.end) - env.now) | self.wakeup
                continue
            # 同一时刻的到达先处理，它们可能加入本时隙的发送
            yield env.timeout(0)
            yield from self._transmit(self._next_transmission())

    def run(self) -> SimStats:
        self._begin_period(0)
        for st in self.stations:
            self.env.process(self._source(st))
        self.env.run(until=self.env.process(self._channel()))
        self.stats.elapsed = max(self.end, self.env.now) / NS

        self.stats.idle_slots += max(0, self._slot_at_or_after(self.end) - 1)
        for st in self.stations:
            self._queue_changed(st, self.end)
            self.stats.per_ac[st.ac].queued_at_end += len(st.queue)
        return self.stats

    def _transmit(self, n_star: int) -> Process:
        """在当前时刻（第 n_star 个时隙的起点）开始一个忙时段"""
        t_star = self.env.now
        transmitters = [st for st in self.stations if st.active and st.queue and st.tx_slot == n_star]
        # 其他站点：计数经过的时隙（含本忙时隙），已完成后退避且队列为空的站点转入空闲
        for st in self.stations:
            if not st.active or st in transmitters:
                continue
            if not st.queue and st.tx_slot <= n_star:
                st.active = False
                st.counter = 0
                continue
            st.counter = st.tx_slot - max(n_star + 1, st.start_slot)

        self.stats.idle_slots += n_star - 1
        self.stats.busy_slots += 1
        for st in transmitters:
            self._log(t_star, st, "tx_start")

        self.busy = True
        if len(transmitters) == 1:
            yield from self._txop(transmitters[0])
        else:
            yield from self._collision(transmitters)
        self.busy = False
        self._begin_period(self.env.now)

    def _txop(self, st: StationState) -> Process:
        timing = self.timing[st.ac]
        stats = self.stats.per_ac[st.ac]
        stats.successes += 1
        exchanges = 0
        while True:
            exchanges += 1
            yield self.env.timeout(timing.first_exchange if exchanges == 1 else timing.exchange)
            t_end = self.env.now
            self._queue_changed(st, t_end)
            arrived = st.queue.popleft()
            stats.delivered += 1
            stats.delivered_bits += timing.payload_bits
            stats.delays_ns.append(t_end - arrived)
            self._log(t_end, st, "success")
            if exchanges >= timing.n_txop or not st.queue:
                break
        stats.max_burst = max(stats.max_burst, exchanges)
        # TXOP 之后必须再做一次退避（后退避）
        st.stage = 0
        st.counter = self._draw(st, 0)
        st.active = True
        self._log(t_end, st, "txop_end")

    def _collision(self, colliders: list[StationState]) -> Process:
        yield self.env.timeout(max(self.timing[st.ac].collision for st in colliders))
        t_end = self.env.now
        for st in colliders:
            stats = self.stats.per_ac[st.ac]
            stats.collisions += 1
            self._log(t_end, st, "collision")
            if st.stage < len(self.timing[st.ac].windows) - 1:
                st.stage += 1
            else:
                self._queue_changed(st, t_end)
                st.queue.popleft()
                stats.retry_drops += 1
                self._log(t_end, st, "drop_retry")
                st.stage = 0
            st.counter = self._draw(st, st.stage)
            st.active = True


def run(scenario: Scenario, seed: int, duration: float, arrivals: Optional[Sequence[ArrivalProcess]] = None,
        trace_path: Optional[Path | str] = None) -> SimStats:
    """
    运行一次仿真；同一组参数与种子的结果完全相同

    Args:
        arrivals: 各 AC 的到达过程，None 时按 AC 配置中的 traffic 生成
        trace_path: 逐事件追踪文件，每行 "<ns> <station> <ac> <event> <queue_len>"
    """
    logger.debug(f"仿真开始: 场景 '{scenario.name}', 种子 {seed}, 时长 {duration}s")
    if trace_path is None:
        stats = Simulator(scenario, seed, duration, arrivals).run()
    else:
        with open(trace_path, "w", encoding="utf-8") as trace:
            stats = Simulator(scenario, seed, duration, arrivals, trace=trace).run()
    if not stats.conserved:
        raise SimulationError(f"packet conservation violated in run with seed {seed}")
    return stats
