import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from edca_markov.core.dtmc.state_space import StateSpace
from edca_markov.core.exceptions import SteadyStateError
from edca_markov.core.logger import logger

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SteadyState:
    """稳态分布 b 以及由它得到的 τ 与 T_txop"""
    space: StateSpace
    b: np.ndarray = field(repr=False)
    tau: float
    t_txop: float
    txop_fallback: bool = False


def residual_of(matrix: sparse.spmatrix, b: np.ndarray) -> float:
    """‖bP - b‖₁"""
    return float(np.abs(matrix.T @ b - b).sum())


def _direct_solve(matrix: sparse.csr_matrix) -> np.ndarray | None:
    n = matrix.shape[0]
    a = (matrix.T - sparse.identity(n, format="csr")).tocsr()
    # 第一行替换为归一化约束 Σb = 1
    a = sparse.vstack([sparse.csr_matrix(np.ones((1, n))), a[1:]], format="csc")
    rhs = np.zeros(n)
    rhs[0] = 1.0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", MatrixRankWarning)
            b = spsolve(a, rhs)
    except (RuntimeError, MatrixRankWarning, ValueError) as e:
        logger.warning(f"稀疏直接求解失败，改用幂迭代: {e}")
        return None
    if not np.all(np.isfinite(b)):
        return None
    return b


def _power_iteration(matrix: sparse.csr_matrix, tol: float, max_iters: int, damping: float = 0.5) -> np.ndarray:
    n = matrix.shape[0]
    b = np.full(n, 1.0 / n)
    pt = matrix.T.tocsr()
    for _ in range(max_iters):
        # 阻尼（惰性链）消除周期性
        nxt = (1.0 - damping) * b + damping * (pt @ b)
        nxt /= nxt.sum()
        if np.abs(nxt - b).sum() < tol * 1e-2:
            return nxt
        b = nxt
    return b


def _normalise(b: np.ndarray) -> np.ndarray:
    b = np.where(b < 0.0, 0.0, b)
    total = b.sum()
    if total <= 0.0:
        raise SteadyStateError("stationary vector vanished after clipping")
    return b / total


def steady_state(matrix: sparse.spmatrix, tol: float = RESIDUAL_TOL, max_iters: int = 200_000) -> np.ndarray:
    """
    求 bP = b, Σb = 1

    先用稀疏直接解，失败或残差过大时退回阻尼幂迭代。

    Raises:
        SteadyStateError: 两种方法都达不到残差要求
    """
    matrix = sparse.csr_matrix(matrix)
    if matrix.shape[0] != matrix.shape[1]:
        raise SteadyStateError(f"transition matrix must be square, got {matrix.shape}")

    b = _direct_solve(matrix)
    if b is not None:
        b = _normalise(b)
        residual = residual_of(matrix, b)
        if residual < tol:
            return b
        logger.warning(f"直接求解残差 {residual:.3e} 超过阈值，改用幂迭代")

    b = _normalise(_power_iteration(matrix, tol, max_iters))
    residual = residual_of(matrix, b)
    if residual >= tol:
        logger.error(f"稳态求解失败，残差 {residual:.3e}")
        raise SteadyStateError("steady-state solve did not reach the residual target", residual=residual)
    return b
