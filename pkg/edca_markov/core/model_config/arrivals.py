"""
泊松到达核：给定区间长度 T 下队列长度的条件转移概率 p_nt / p_st

缓存有限，超出 QS 的到达全部并入 l' = QS 的尾部概率。
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from edca_markov.core.exceptions import ArrivalDomainError
from edca_markov.core.model_config.types import AcConfig, PhyTiming


@dataclass(frozen=True)
class ArrivalKernel:
    lam: float          # packets/s
    queue_size: int

    @classmethod
    def for_ac(cls, ac: AcConfig) -> "ArrivalKernel":
        return cls(lam=ac.lam, queue_size=ac.queue_size)

    def pmf(self, k: np.ndarray | int, t: float) -> np.ndarray:
        """Pr(N_t = k)，对数形式计算避免大 k 溢出"""
        k = np.asarray(k, dtype=float)
        mean = self.lam * t
        if mean <= 0.0:
            return np.where(k == 0, 1.0, 0.0)
        if np.isinf(mean):
            # 饱和极限：有限个到达的概率全为 0，质量全部落在尾部
            return np.zeros_like(k)
        out = np.exp(k * np.log(mean) - mean - gammaln(k + 1.0))
        return np.where(k < 0, 0.0, out)

    def nt_matrix(self, t: float) -> np.ndarray:
        """(QS+1)×(QS+1) 矩阵，行 l、列 l' 为 p_nt(l', t | l)"""
        return _nt_matrix(self.lam, self.queue_size, float(t))

    def st_matrix(self, t: float) -> np.ndarray:
        """行 l、列 l' 为 p_st(l', t | l)；l = 0 行无定义，置 0"""
        return _st_matrix(self.lam, self.queue_size, float(t))


def _tail_row(probs: np.ndarray) -> np.ndarray:
    """最后一列放入尾部质量 1 - Σ，截断到 [0, 1]"""
    row = probs.copy()
    row[-1] = min(1.0, max(0.0, 1.0 - probs[:-1].sum()))
    return row


@lru_cache(maxsize=512)
def _nt_matrix(lam: float, qs: int, t: float) -> np.ndarray:
    kernel = ArrivalKernel(lam, qs)
    matrix = np.zeros((qs + 1, qs + 1))
    for l in range(qs + 1):
        probs = kernel.pmf(np.arange(qs + 1 - l), t)
        matrix[l, l:] = _tail_row(probs) if l < qs else 1.0
    matrix.setflags(write=False)
    return matrix


@lru_cache(maxsize=512)
def _st_matrix(lam: float, qs: int, t: float) -> np.ndarray:
    kernel = ArrivalKernel(lam, qs)
    matrix = np.zeros((qs + 1, qs + 1))
    for l in range(1, qs + 1):
        probs = kernel.pmf(np.arange(qs + 2 - l), t)
        matrix[l, l - 1:] = _tail_row(probs)
    matrix.setflags(write=False)
    return matrix


def arrival_count_prob(kernel: ArrivalKernel, k: int, t: float) -> float:
    """Pr(N_{t} = k) = e^{-λt}(λt)^k / k!"""
    if k < 0 or t < 0:
        raise ArrivalDomainError(f"need k >= 0 and t >= 0, got k={k}, t={t}")
    return float(kernel.pmf(k, t))


def p_nt(kernel: ArrivalKernel, l_after: int, t: float, l_before: int) -> float:
    """区间内没有发送时，队列从 l 变为 l' 的概率"""
    qs = kernel.queue_size
    if not 0 <= l_before <= qs or not 0 <= l_after <= qs:
        raise ArrivalDomainError(f"queue lengths must lie in [0, {qs}], got l={l_before}, l'={l_after}")
    if l_after < l_before:
        raise ArrivalDomainError(f"p_nt undefined for l'={l_after} < l={l_before}")
    if t < 0:
        raise ArrivalDomainError(f"interval must be non-negative, got {t}")
    return float(kernel.nt_matrix(t)[l_before, l_after])


def p_st(kernel: ArrivalKernel, l_after: int, t: float, l_before: int) -> float:
    """区间内发送了一个包时，队列从 l 变为 l' 的概率"""
    qs = kernel.queue_size
    if l_before == 0:
        raise ArrivalDomainError("p_st needs a packet to send, got l=0")
    if not 1 <= l_before <= qs or not 0 <= l_after <= qs:
        raise ArrivalDomainError(f"queue lengths must lie in [0, {qs}], got l={l_before}, l'={l_after}")
    if l_after < l_before - 1:
        raise ArrivalDomainError(f"p_st undefined for l'={l_after} < l-1={l_before - 1}")
    if t < 0:
        raise ArrivalDomainError(f"interval must be non-negative, got {t}")
    return float(kernel.st_matrix(t)[l_before, l_after])


def rho(kernel: ArrivalKernel, phy: PhyTiming) -> float:
    """一个时隙内有包到达的概率 ρ = 1 - e^{-λ T_slot}"""
    if np.isinf(kernel.lam):
        return 1.0
    return float(-np.expm1(-kernel.lam * phy.t_slot))
