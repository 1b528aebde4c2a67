"""Rayleigh block-fading channel model: ordered unit-mean exponential gains.

Order statistics of M i.i.d. unit-mean exponentials: density of the i-th
smallest is

    f_(i)(x) = psi_i f(x) (1-F(x))^(M-i) F(x)^(i-1),
    psi_i = 1/B(i, M-i+1) = M!/((i-1)!(M-i)!),

with f(x)=e^-x, F(x)=1-e^-x. Sampling is deterministic given an RngSpec:
uniforms come from PCG64 seeded through SeedSequence(seed, spawn_key=
(stream, chunk)), transformed by the inverse CDF and sorted. Chunked
consumers (the Monte Carlo driver) see exactly the same draws as the
OrderedGains stream for equal (seed, stream).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ._kernels import sorted_gains

__all__ = [
    "RngSpec",
    "OrderedGains",
    "GainSampler",
    "CHUNK_SIZE",
    "ordered_pdf",
    "ordered_cdf",
    "joint_pdf_two",
    "order_stat_mean",
    "sample_ordered_gains",
]

# Fixed chunk granularity: part of the reproducibility contract (chunk k of a
# run always consumes substream (stream, k) regardless of worker count).
CHUNK_SIZE = 1 << 16


@dataclass(frozen=True)
class RngSpec:
    """Deterministic RNG identity: (seed, stream) -> reproducible draws."""
    seed: int
    stream: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream < 0:
            raise ValueError("seed and stream must be nonnegative")

    def generator(self, *subkeys: int) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream, *subkeys))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, offset: int) -> "RngSpec":
        return RngSpec(self.seed, self.stream + offset)


@dataclass(frozen=True)
class OrderedGains:
    """One block-fading realization: sorted channel power gains."""
    gains: tuple[float, ...]

    def __post_init__(self):
        g = self.gains
        if any(not math.isfinite(v) or v < 0 for v in g):
            raise ValueError(f"gains must be finite and nonnegative: {g}")
        if any(g[i] > g[i + 1] for i in range(len(g) - 1)):
            raise ValueError(f"gains must be sorted ascending: {g}")

    def __len__(self):
        return len(self.gains)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.gains, dtype=dtype)


def ordered_pdf(i: int, m: int, x):
    """Density of the i-th smallest of m unit-mean exponential gains.

    Vectorized in x; zero for x < 0.
    """
    if not (1 <= i <= m):
        raise ValueError(f"order index i={i} out of range 1..{m}")
    x = np.asarray(x, dtype=np.float64)
    psi = math.factorial(m) / (math.factorial(i - 1) * math.factorial(m - i))
    with np.errstate(invalid="ignore"):
        cdf = -np.expm1(-x)
        val = psi * np.exp(-x * (m - i + 1)) * cdf ** (i - 1)
    val = np.where(x >= 0, val, 0.0)
    return float(val) if val.ndim == 0 else val


def ordered_cdf(i: int, m: int, x):
    """CDF of the i-th smallest gain: P(at least i of m below x)."""
    if not (1 <= i <= m):
        raise ValueError(f"order index i={i} out of range 1..{m}")
    x = np.asarray(x, dtype=np.float64)
    p = -np.expm1(-np.maximum(x, 0.0))
    total = np.zeros_like(p)
    for k in range(i, m + 1):
        total += math.comb(m, k) * p ** k * (1.0 - p) ** (m - k)
    return float(total) if total.ndim == 0 else total


def joint_pdf_two(x1, x2):
    """Joint density of the two ordered gains for M=2: 2 e^-x1 e^-x2 on x1<=x2."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    val = 2.0 * np.exp(-x1 - x2)
    val = np.where((x1 >= 0) & (x2 >= x1), val, 0.0)
    return float(val) if val.ndim == 0 else val


def order_stat_mean(i: int, m: int) -> float:
    """E[x_(i)] = sum_{k=m-i+1}^{m} 1/k (exact)."""
    if not (1 <= i <= m):
        raise ValueError(f"order index i={i} out of range 1..{m}")
    return sum(1.0 / k for k in range(m - i + 1, m + 1))


class GainSampler:
    """Chunked deterministic source of sorted gain matrices.

    chunk_matrix(k, size) is a pure function of (m, rng, k): the Monte Carlo
    driver may evaluate chunks in any worker arrangement and still reduce
    identical numbers in chunk order.
    """

    def __init__(self, m: int, rng: RngSpec):
        if m < 1:
            raise ValueError(f"m must be >= 1, got {m}")
        self.m = m
        self.rng = rng

    def chunk_matrix(self, chunk_index: int, size: int) -> np.ndarray:
        gen = self.rng.generator(chunk_index)
        u = gen.random((size, self.m))
        return sorted_gains(u)

    def chunks(self, n: int) -> Iterator[tuple[int, int]]:
        """Yield (chunk_index, size) covering n draws."""
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        full, rem = divmod(n, CHUNK_SIZE)
        for k in range(full):
            yield k, CHUNK_SIZE
        if rem:
            yield full, rem

    def matrices(self, n: int) -> Iterator[np.ndarray]:
        for k, size in self.chunks(n):
            yield self.chunk_matrix(k, size)


def sample_ordered_gains(m: int, rng: RngSpec, n: int) -> Iterator[OrderedGains]:
    """Stream n OrderedGains draws, deterministic given (m, rng)."""
    sampler = GainSampler(m, rng)
    for mat in sampler.matrices(n):
        for row in mat:
            yield OrderedGains(tuple(row))
