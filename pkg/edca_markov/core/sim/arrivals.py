"""
每个站点的到达时间流（ns）
"""
import numpy as np

from edca_markov.core.model_config.types import TrafficKind
from edca_markov.core.sim.types import ArrivalProcess

NS = 1_000_000_000
NEVER = np.iinfo(np.int64).max


class ArrivalStream:
    """按时间顺序产生到达时刻，rate 为 0 时永远不产生"""

    def __init__(self, process: ArrivalProcess, rng: np.random.Generator):
        self.process = process
        self.rng = rng
        self._now = 0.0                 # 秒
        self._phase_end = 0.0
        self._on = True
        if process.rate <= 0:
            return
        if process.kind == TrafficKind.CBR:
            # 随机相位，避免所有站点同时发包
            self._now = rng.uniform(0.0, 1.0 / process.rate)
        elif process.kind == TrafficKind.ON_OFF:
            duty = process.on_mean / (process.on_mean + process.off_mean)
            self._on = bool(rng.random() < duty)
            mean = process.on_mean if self._on else process.off_mean
            self._phase_end = rng.exponential(mean)
            self._now = rng.uniform(0.0, 1.0 / process.peak_rate)

    def next_time(self) -> int:
        process = self.process
        if process.rate <= 0:
            return NEVER
        if process.kind == TrafficKind.POISSON:
            self._now += self.rng.exponential(1.0 / process.rate)
            return int(round(self._now * NS))
        if process.kind == TrafficKind.CBR:
            t = self._now
            self._now += 1.0 / process.rate
            return int(round(t * NS))
        return self._next_on_off()

    def _next_on_off(self) -> int:
        process = self.process
        period = 1.0 / process.peak_rate
        while True:
            if self._on and self._now < self._phase_end:
                t = self._now
                self._now += period
                return int(round(t * NS))
            if self._on:
                # 开启阶段结束，进入关闭阶段
                self._on = False
                start = self._phase_end
                self._phase_end = start + self.rng.exponential(process.off_mean)
            else:
                self._on = True
                start = self._phase_end
                self._phase_end = start + self.rng.exponential(process.on_mean)
                self._now = start
