"""Monte Carlo column engine.

An estimate battery is a list of Columns, each computing one per-draw
statistic of a sorted gain row:

    pow:  y = (base + num * x[user] / den) ** expo
    log2: y = expo * log2(base + num * x[user] / den)
    den  = d0 + sum_j coef_j * x[idx_j]

This covers every expectation the capacity formulas need: powered SINR
terms for effective capacities (with in-group SIC interference in the
denominator), OMA terms, ratio statistics for high-SNR plateaus, and plain
rates for ergodic limits. Evaluating many columns on shared draws gives
common random numbers across compared quantities; the full cross-column
covariance of the sample means supports delta-method errors for totals and
for paired differences between competing partitions.

Chunking is part of the determinism contract: chunk k always consumes RNG
substream (stream, k) and partial sums are reduced in chunk order, so
results are independent of thread count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import eval_columns
from .channel import CHUNK_SIZE, GainSampler, RngSpec

__all__ = ["Column", "ColumnBlock", "ColumnStats", "pack_columns",
           "column_stats", "log2_mean_combination"]

_LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class Column:
    """One per-draw statistic; see module docstring for semantics."""
    kind: str                     # "pow" | "log2"
    user: int                     # 0-based index into the sorted gain row
    base: float
    num: float
    expo: float                   # exponent (pow) or prefactor (log2)
    d0: float = 1.0
    denom: tuple[tuple[int, float], ...] = ()   # ((gain index, coef), ...)

    def __post_init__(self):
        if self.kind not in ("pow", "log2"):
            raise ValueError(f"unknown column kind {self.kind!r}")
        if self.user < 0:
            raise ValueError("user index must be >= 0")


@dataclass(frozen=True)
class ColumnBlock:
    """Columns packed into flat arrays for the kernel backends."""
    m: int
    k: int
    kind: np.ndarray
    user: np.ndarray
    base: np.ndarray
    num: np.ndarray
    expo: np.ndarray
    d0: np.ndarray
    dptr: np.ndarray
    didx: np.ndarray
    dcoef: np.ndarray

    def arrays(self):
        return (self.kind, self.user, self.base, self.num, self.expo,
                self.d0, self.dptr, self.didx, self.dcoef)


def pack_columns(columns: list[Column], m: int) -> ColumnBlock:
    k = len(columns)
    if k == 0:
        raise ValueError("need at least one column")
    kind = np.zeros(k, dtype=np.uint8)
    user = np.zeros(k, dtype=np.int32)
    base = np.zeros(k)
    num = np.zeros(k)
    expo = np.zeros(k)
    d0 = np.zeros(k)
    dptr = np.zeros(k + 1, dtype=np.int32)
    didx: list[int] = []
    dcoef: list[float] = []
    for j, c in enumerate(columns):
        if c.user >= m or any(i >= m or i < 0 for i, _ in c.denom):
            raise ValueError(f"column {j} references a gain index >= m={m}")
        kind[j] = 0 if c.kind == "pow" else 1
        user[j] = c.user
        base[j], num[j], expo[j], d0[j] = c.base, c.num, c.expo, c.d0
        for i, w in c.denom:
            didx.append(i)
            dcoef.append(w)
        dptr[j + 1] = len(didx)
    return ColumnBlock(
        m=m, k=k, kind=kind, user=user, base=base, num=num, expo=expo, d0=d0,
        dptr=dptr, didx=np.asarray(didx, dtype=np.int32),
        dcoef=np.asarray(dcoef, dtype=np.float64))


@dataclass
class ColumnStats:
    """Sample means of the columns with delta-method uncertainty data."""
    n: int
    mean: np.ndarray                    # (k,)
    var_mean: np.ndarray                # (k,) variance of each sample mean
    cov_mean: np.ndarray | None = None  # (k,k) covariance of the means

    def se(self, j: int) -> float:
        return float(np.sqrt(self.var_mean[j]))


def _reduce_chunks(results, k, cross):
    s_tot = np.zeros(k)
    q_tot = np.zeros((k, k)) if cross else np.zeros(k)
    for s, q in results:
        s_tot += s
        q_tot += q
    return s_tot, q_tot


def column_stats(sampler: GainSampler, columns: list[Column], n: int, *,
                 threads: int = 1, cross: bool = False) -> ColumnStats:
    """Estimate E[y_j] for every column over n shared draws.

    cross=True also accumulates the full cross-moment matrix so totals and
    paired differences get exact delta-method covariances.
    """
    block = pack_columns(columns, sampler.m)
    chunks = list(sampler.chunks(n))

    def work(item):
        ci, size = item
        g = sampler.chunk_matrix(ci, size)
        y = eval_columns(g, *block.arrays())
        s = y.sum(axis=0)
        q = y.T @ y if cross else np.einsum("ij,ij->j", y, y)
        return s, q

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, chunks))
    else:
        results = [work(c) for c in chunks]

    s_tot, q_tot = _reduce_chunks(results, block.k, cross)
    mean = s_tot / n
    if n < 2:
        nan = np.full(block.k, np.nan)
        return ColumnStats(n=n, mean=mean, var_mean=nan, cov_mean=None)
    if cross:
        cov = (q_tot - n * np.outer(mean, mean)) / (n - 1)
        # clamp tiny negative diagonals from cancellation
        d = np.arange(block.k)
        cov[d, d] = np.maximum(cov[d, d], 0.0)
        cov_mean = cov / n
        return ColumnStats(n=n, mean=mean, var_mean=cov_mean[d, d].copy(),
                           cov_mean=cov_mean)
    var = np.maximum(q_tot / n - mean ** 2, 0.0) * (n / (n - 1.0))
    return ColumnStats(n=n, mean=mean, var_mean=var / n, cov_mean=None)


def log2_mean_combination(stats: ColumnStats, terms: list[tuple[int, float]]
                          ) -> tuple[float, float]:
    """Value and std error of  sum_t w_t * log2(mean_{j_t}).

    terms is [(column index, weight), ...]. Covers single ECs
    (w = 1/beta), totals over members, ratio statistics (+w/-w pairs) and
    differences between partitions (opposite-sign weights), using the
    cross-column covariance when the stats carry one.
    """
    val = 0.0
    grad = np.zeros(len(stats.mean))
    for j, w in terms:
        mj = stats.mean[j]
        val += w * np.log2(mj)
        grad[j] += w / (mj * _LN2)
    if stats.cov_mean is not None:
        var = float(grad @ stats.cov_mean @ grad)
    else:
        var = float((grad ** 2) @ stats.var_mean)
    return val, float(np.sqrt(max(var, 0.0)))
