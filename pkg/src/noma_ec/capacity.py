"""Rates and effective capacities for two-user and M-user uplink NOMA.

Effective capacity of user i with normalized negative QoS exponent
beta_i < 0 over a block-fading channel:

    Ec_i = (1/beta_i) log2 E[(1 + SINR_i)^(s_i beta_i)]      [NOMA]

where s_i is the resource share of the rate expression (1 for full
multiplexing, g/M for a NOMA group of g of M users, 1/M per OMA slot with
doubled transmit power). Uplink SIC decodes the strongest user first, so
user i (ranked i-th weakest) sees interference only from weaker users
l < i.

Two-user closed forms over the ordered Rayleigh gains reduce to the
confluent hypergeometric function of the second kind (weak user, both OMA
users) and to an incomplete-gamma series or its exact single-integral
counterpart (strong user). The strong user's series is the finite-binomial
double expansion; it is numerically healthy when 1/(rho P2) is moderate
and is automatically replaced by the exact quadrature form outside that
window (the series' alternating Taylor part cancels catastrophically at
very low SNR).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from . import mc
from .channel import GainSampler, OrderedGains, RngSpec
from .special_functions import (
    ConvergenceError,
    SpecialFnAccuracy,
    _adaptive_quad_01,
    hyp_u,
    upper_gamma,
    upper_gamma_scaled,
)

__all__ = [
    "NetworkConfig",
    "EcEstimate",
    "rate_noma_uplink",
    "rate_oma",
    "rate_pair",
    "ec_monte_carlo",
    "ec1_closed_form",
    "ec2_closed_form",
    "ec2_quadrature",
    "ec2_auto",
    "ec_oma_closed_form",
    "totals",
    "two_user_mc",
    "group_ec_terms",
    "oma_ec_terms",
    "full_noma_terms",
]

_LN2 = math.log(2.0)
_ACC = SpecialFnAccuracy()


@dataclass(frozen=True)
class NetworkConfig:
    """System parameters: user count, power split, transmit SNR, QoS exponents.

    powers are the in-block NOMA coefficients of the users ranked weakest
    (index 0) to strongest; they sum to 1 per resource block. rho is linear
    transmit SNR (dB conversion happens at the CLI boundary only). betas
    are the per-user normalized negative QoS exponents; beta -> 0- models a
    delay-tolerant user.
    """
    m: int
    powers: tuple[float, ...]
    rho: float
    betas: tuple[float, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if len(self.powers) != self.m or len(self.betas) != self.m:
            raise ValueError(
                f"powers/betas must have length m={self.m}, got "
                f"{len(self.powers)}/{len(self.betas)}")
        if any(p <= 0 for p in self.powers):
            raise ValueError(f"powers must be positive: {self.powers}")
        if abs(sum(self.powers) - 1.0) > 1e-9:
            raise ValueError(
                f"powers must sum to 1, got {sum(self.powers)!r}")
        if not (self.rho >= 0):
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if any(b >= 0 for b in self.betas):
            raise ValueError(f"betas must be negative: {self.betas}")

    @classmethod
    def two_user(cls, rho: float, p1: float = 0.2, p2: float = 0.8,
                 beta1: float = -1.0, beta2: float = -1.0) -> "NetworkConfig":
        return cls(m=2, powers=(p1, p2), rho=rho, betas=(beta1, beta2))

    @property
    def thetas(self) -> tuple[float, ...]:
        """QoS exponents theta_i = -beta_i ln2 (block length x bandwidth = 1)."""
        return tuple(-b * _LN2 for b in self.betas)

    def with_rho(self, rho: float) -> "NetworkConfig":
        return replace(self, rho=rho)

    def with_betas(self, betas: Sequence[float]) -> "NetworkConfig":
        return replace(self, betas=tuple(betas))


@dataclass(frozen=True)
class EcEstimate:
    """An effective-capacity value with its evaluation provenance.

    std_error is 0 for deterministic methods and None when a stochastic
    estimate had too few samples for a variance (n < 2).
    """
    value: float
    method: str                      # closed_form | quadrature | monte_carlo
    n_samples: int = 0
    std_error: float | None = 0.0

    def __post_init__(self):
        if self.method not in ("closed_form", "quadrature", "monte_carlo"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.std_error is not None and self.std_error < 0:
            raise ValueError("std_error must be >= 0")


def _as_matrix(gains) -> np.ndarray:
    g = np.asarray(gains, dtype=np.float64)
    return g[None, :] if g.ndim == 1 else g


def rate_noma_uplink(i: int, gains, cfg: NetworkConfig):
    """Instantaneous rate of user i under full NOMA multiplexing with SIC.

    R_i = log2(1 + rho P_i x_i / (1 + rho sum_{l<i} P_l x_l)); gains may be
    one OrderedGains/row or an (n, M) matrix (vectorized).
    """
    if not (1 <= i <= cfg.m):
        raise ValueError(f"user index {i} out of range 1..{cfg.m}")
    g = _as_matrix(gains)
    if g.shape[1] != cfg.m:
        raise ValueError(f"gains must have {cfg.m} components")
    interf = np.zeros(g.shape[0])
    for l in range(i - 1):
        interf += cfg.rho * cfg.powers[l] * g[:, l]
    r = np.log2(1.0 + cfg.rho * cfg.powers[i - 1] * g[:, i - 1]
                / (1.0 + interf))
    return float(r[0]) if np.asarray(gains).ndim == 1 else r


def rate_oma(i: int, gains, cfg: NetworkConfig, share: float):
    """Rate of user i alone in its slot (share of resources, doubled power).

    R = share * log2(1 + 2 rho P_i x_i); share=1/2 for two users, 1/M in
    the M-user schedule, and share=1 degenerates to a full-band
    single-user link.
    """
    if not (1 <= i <= cfg.m):
        raise ValueError(f"user index {i} out of range 1..{cfg.m}")
    if not (0 < share <= 1):
        raise ValueError(f"share must be in (0,1], got {share}")
    g = _as_matrix(gains)
    r = share * np.log2(1.0 + 2.0 * cfg.rho * cfg.powers[i - 1] * g[:, i - 1])
    return float(r[0]) if np.asarray(gains).ndim == 1 else r


_ROLE_NAMES = {"weak": 1, "middle": 2, "strong": -1}


def rate_pair(role, group_gains, group_powers, rho: float, m_total: int,
              group_size: int | None = None):
    """In-group rate of one member of a NOMA group time-shared over M users.

    The group of g users gets share g/M of the block; within it, SIC runs
    as in the full system (member ranked r sees the weaker members'
    interference). role is a 1-based in-group rank or one of
    "weak"/"middle"/"strong".
    """
    gg = np.asarray(group_gains, dtype=np.float64)
    if gg.ndim == 1:
        gg = gg[None, :]
        squeeze = True
    else:
        squeeze = False
    g = gg.shape[1]
    if group_size is not None and group_size != g:
        raise ValueError(f"group_size {group_size} != gains length {g}")
    if len(group_powers) != g:
        raise ValueError("group_powers length must match group size")
    if m_total % g != 0:
        raise ValueError(f"group size {g} must divide m_total={m_total}")
    if isinstance(role, str):
        role = _ROLE_NAMES.get(role, 0)
        if role == -1:
            role = g
        if role == 0 or role > g:
            raise ValueError(f"unknown role for group of {g}")
    if not (1 <= role <= g):
        raise ValueError(f"role {role} out of range 1..{g}")
    share = g / m_total
    interf = np.zeros(gg.shape[0])
    for l in range(role - 1):
        interf += rho * group_powers[l] * gg[:, l]
    r = share * np.log2(1.0 + rho * group_powers[role - 1] * gg[:, role - 1]
                        / (1.0 + interf))
    return float(r[0]) if squeeze else r


def ec_monte_carlo(rate_fn, beta: float, sampler: GainSampler, n: int, *,
                   threads: int = 1) -> EcEstimate:
    """EC by direct sampling: (1/beta) log2( (1/n) sum 2^(beta R_k) ).

    rate_fn must be vectorized: it maps an (n_chunk, M) matrix of sorted
    gains to a length-n_chunk rate array. Standard error comes from the
    sample variance of 2^(beta R) through the log (delta method); with
    n < 2 it is None.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if beta >= 0:
        raise ValueError(f"beta must be negative, got {beta}")

    def work(item):
        ci, size = item
        g = sampler.chunk_matrix(ci, size)
        y = np.exp2(beta * np.asarray(rate_fn(g), dtype=np.float64))
        return y.sum(), (y * y).sum()

    chunks = list(sampler.chunks(n))
    if threads > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, chunks))
    else:
        results = [work(c) for c in chunks]
    s = sum(r[0] for r in results)
    q = sum(r[1] for r in results)
    mean = s / n
    value = math.log2(mean) / beta
    if n < 2:
        return EcEstimate(value, "monte_carlo", n, None)
    var_mean = max(q / n - mean * mean, 0.0) * (n / (n - 1.0)) / n
    se = math.sqrt(var_mean) / (abs(beta) * _LN2 * mean)
    return EcEstimate(value, "monte_carlo", n, se)


# ---------------------------------------------------------------------------
# two-user closed forms


def ec1_closed_form(cfg: NetworkConfig) -> EcEstimate:
    """Weak-user NOMA EC: (1/b1) log2( (2/(P1 rho)) U(1, 2+b1, 2/(rho P1)) )."""
    b1 = cfg.betas[0]
    p1 = cfg.powers[0]
    if cfg.rho == 0.0:
        return EcEstimate(0.0, "closed_form")
    z = 2.0 / (cfg.rho * p1)
    value = math.log2(z * hyp_u(1.0, 2.0 + b1, z)) / b1
    return EcEstimate(value, "closed_form")


def _ec2_series_value(p1: float, p2: float, rho: float, b2: float,
                      nb: int) -> float:
    """Strong-user EC via the binomial/Taylor incomplete-gamma series.

    nb is the binomial expansion order (-b2 when b2 is a negative integer;
    the floor surrogate uses ceil(-b2)). Raises ConvergenceError when the
    Taylor part stalls or alternating cancellation has destroyed the sum.
    """
    c = 1.0 / (rho * p2)
    if 2.0 / rho > 600.0:
        raise ConvergenceError(
            f"series prefactor e^(2/rho) overflows at rho={rho:g}",
            partial=math.nan, terms=0)
    g_tail = upper_gamma(1.0 + b2, c)
    total = 0.0
    max_contrib = 0.0
    for j in range(nb + 1):
        w = math.comb(nb, j) * (rho * p1) ** j
        s_j = 0.0
        term_pow = 1.0   # (-1)^k (p2-p1)^k / k!
        for k in range(501):
            if k > 0:
                term_pow *= -(p2 - p1) / k
            bracket = (upper_gamma(2.0 + b2 + j + k, c)
                       - c ** (1 + j + k) * g_tail)
            term = term_pow / (1.0 + j + k) * bracket
            s_j += term
            max_contrib = max(max_contrib, abs(w * term))
            if k >= 1 and abs(term) < 1e-12 * max(abs(s_j), 1e-300):
                break
        else:
            raise ConvergenceError(
                "Taylor part of the strong-user series did not converge "
                f"within 500 terms (rho={rho:g}, b2={b2:g})",
                partial=s_j, terms=500)
        total += w * s_j
    pref = (2.0 * p2 ** (1.0 - b2) * (rho * p2) ** b2
            * math.exp(2.0 / rho))   # e^(1/(rho P2)) e^(-(P1-P2)/(rho P2))
    if total <= 0 or max_contrib > 1e10 * abs(total):
        raise ConvergenceError(
            "alternating cancellation destroyed the strong-user series "
            f"(max term {max_contrib:.3e} vs sum {total:.3e} at rho={rho:g})",
            partial=math.log2(abs(pref * total)) / b2 if total else math.nan,
            terms=nb)
    return math.log2(pref * total) / b2


def ec2_closed_form(cfg: NetworkConfig,
                    paper_faithful_floor: bool = False) -> EcEstimate:
    """Strong-user NOMA EC via the incomplete-gamma series.

    The series requires an integer QoS exponent; non-integer beta2 is
    routed to the exact quadrature form unless paper_faithful_floor is
    set, which instead substitutes floor(beta2) into the binomial order
    (an uncontrolled approximation, kept for comparison). The series is
    also replaced by quadrature where its alternating part would cancel
    catastrophically (very low SNR).
    """
    b2 = cfg.betas[1]
    p1, p2 = cfg.powers[0], cfg.powers[1]
    if cfg.rho == 0.0:
        return EcEstimate(0.0, "closed_form")
    is_int = abs(b2 - round(b2)) < 1e-12
    if not is_int and not paper_faithful_floor:
        return ec2_quadrature(cfg)
    c = 1.0 / (cfg.rho * p2)
    if 2.0 * abs(p2 - p1) * c > 14.0 or 2.0 / cfg.rho > 600.0:
        # alternating Taylor part loses ~e^(2|P2-P1|c) digits; the exact
        # integral is immune
        if paper_faithful_floor and not is_int:
            raise ConvergenceError(
                f"floor-series unusable at rho={cfg.rho:g} "
                "(cancellation window exceeded)", partial=math.nan, terms=0)
        return ec2_quadrature(cfg)
    nb = int(round(-b2)) if is_int else math.ceil(-b2)
    value = _ec2_series_value(p1, p2, cfg.rho, b2, nb)
    return EcEstimate(value, "closed_form")


def ec2_quadrature(cfg: NetworkConfig,
                   accuracy: SpecialFnAccuracy | None = None) -> EcEstimate:
    """Strong-user NOMA EC by adaptive quadrature of the single-integral form.

    E[(1+SINR_2)^b2] = 2 (rho P2)^b2 e^(1/(rho P2)) *
        Int_0^inf (1+rho P1 x)^(-b2) e^((P1-P2)x/P2)
                  Gamma(1+b2, (1+rho x)/(rho P2)) dx.

    Folding the prefactor exponential into the scaled gamma
    (e^z Gamma(a, z)) turns the weight into e^(-2x) exactly, which the
    substitution x = -ln(1-s)/2 absorbs; the result is stable at any SNR.
    Valid for any real b2 < 0; also the cross-oracle for the series path.
    """
    acc = accuracy or _ACC
    b2 = cfg.betas[1]
    p1, p2 = cfg.powers[0], cfg.powers[1]
    if cfg.rho == 0.0:
        return EcEstimate(0.0, "quadrature")
    rho = cfg.rho
    c = 1.0 / (rho * p2)

    def integrand(s):
        x = -np.log1p(-s) / 2.0
        out = np.empty_like(x)
        for idx, xv in enumerate(x):
            gs = upper_gamma_scaled(1.0 + b2, (1.0 + rho * xv) * c, acc)
            out[idx] = (1.0 + rho * p1 * xv) ** (-b2) * gs
        return out

    budget = max(2, acc.max_terms // 15)   # ~15 integrand points/interval
    q = _adaptive_quad_01(integrand, acc.rel_tol, budget)
    value = math.log2((rho * p2) ** b2 * q) / b2
    return EcEstimate(value, "quadrature")


def ec2_auto(cfg: NetworkConfig) -> EcEstimate:
    """Series where healthy, exact quadrature elsewhere (see ec2_closed_form)."""
    return ec2_closed_form(cfg)


def ec_oma_closed_form(i: int, cfg: NetworkConfig) -> EcEstimate:
    """Two-user OMA EC (half block, doubled power) for user i in {1, 2}."""
    if cfg.m != 2:
        raise ValueError("ec_oma_closed_form is the two-user form")
    if i not in (1, 2):
        raise ValueError(f"user index must be 1 or 2, got {i}")
    if cfg.rho == 0.0:
        return EcEstimate(0.0, "closed_form")
    b = cfg.betas[i - 1]
    p = cfg.powers[i - 1]
    rho = cfg.rho
    if i == 1:
        z = 1.0 / (rho * p)
        val = math.log2(z * hyp_u(1.0, 2.0 + b / 2.0, z)) / b
    else:
        s = 0.0
        for k in (0, 1):
            s += (-1.0) ** k * hyp_u(1.0, 2.0 + b / 2.0,
                                     (1.0 + k) / (2.0 * rho * p))
        val = math.log2(s / (rho * p)) / b
    return EcEstimate(val, "closed_form")


# ---------------------------------------------------------------------------
# column batteries for Monte Carlo estimation


def group_ec_terms(groups, group_powers, cfg: NetworkConfig,
                   start: int = 0):
    """Columns and per-member (column, weight) terms for NOMA group ECs.

    Member ranked r in a group of g (share g/M of the block) contributes
    (1/beta) log2 E[(1+SINR)^(g beta / M)] to the total. Returns
    (columns, member_terms) where member_terms[t] = (start+t_col, 1/beta).
    """
    m = cfg.m
    cols: list[mc.Column] = []
    terms: list[tuple[int, float]] = []
    for grp, pw in zip(groups, group_powers):
        if len(grp) != len(pw):
            raise ValueError("group and its power vector disagree in size")
        share = len(grp) / m
        prefix: list[tuple[int, float]] = []
        for rank_in_group, (u, p) in enumerate(zip(grp, pw)):
            beta = cfg.betas[u - 1]
            cols.append(mc.Column(
                kind="pow", user=u - 1, base=1.0, num=cfg.rho * p,
                expo=share * beta, d0=1.0, denom=tuple(prefix)))
            terms.append((start + len(cols) - 1, 1.0 / beta))
            prefix.append((u - 1, cfg.rho * p))
    return cols, terms


def oma_ec_terms(groups, group_powers, cfg: NetworkConfig, start: int = 0):
    """Columns/terms for the OMA baseline of a partitioned system.

    Each user keeps its in-group power coefficient, doubled, in a 1/M
    slot: Ec = (1/beta) log2 E[(1+2 rho P x)^(beta/M)].
    """
    m = cfg.m
    cols: list[mc.Column] = []
    terms: list[tuple[int, float]] = []
    for grp, pw in zip(groups, group_powers):
        for u, p in zip(grp, pw):
            beta = cfg.betas[u - 1]
            cols.append(mc.Column(
                kind="pow", user=u - 1, base=1.0, num=2.0 * cfg.rho * p,
                expo=beta / m))
            terms.append((start + len(cols) - 1, 1.0 / beta))
    return cols, terms


def full_noma_terms(cfg: NetworkConfig, start: int = 0):
    """Columns/terms for full-multiplexing NOMA over all M users."""
    cols: list[mc.Column] = []
    terms: list[tuple[int, float]] = []
    prefix: list[tuple[int, float]] = []
    for u in range(1, cfg.m + 1):
        beta = cfg.betas[u - 1]
        cols.append(mc.Column(
            kind="pow", user=u - 1, base=1.0,
            num=cfg.rho * cfg.powers[u - 1], expo=beta, d0=1.0,
            denom=tuple(prefix)))
        terms.append((start + len(cols) - 1, 1.0 / beta))
        prefix.append((u - 1, cfg.rho * cfg.powers[u - 1]))
    return cols, terms


def _mc_total(stats: mc.ColumnStats, terms) -> EcEstimate:
    val, se = mc.log2_mean_combination(stats, terms)
    return EcEstimate(val, "monte_carlo", stats.n, se)


def totals(cfg: NetworkConfig, partition=None, *, n: int = 100_000,
           rng: RngSpec | None = None, threads: int = 1) -> dict:
    """Sum ECs of the NOMA system and its OMA baseline.

    M=2 (no partition): {"v_n", "v_o"} from the closed forms. With a
    partition (object with .groups/.group_powers, or a (groups, powers)
    pair): {"ec_tot", "ec_tot_oma"} by Monte Carlo over the global order
    statistics, since a group's gains are not a standalone two-user
    system's.
    """
    if partition is None:
        if cfg.m != 2:
            raise ValueError("totals without a partition requires M=2")
        if cfg.rho == 0.0:
            zero = EcEstimate(0.0, "closed_form")
            return {"v_n": zero, "v_o": zero}
        e1 = ec1_closed_form(cfg)
        e2 = ec2_auto(cfg)
        o1 = ec_oma_closed_form(1, cfg)
        o2 = ec_oma_closed_form(2, cfg)
        method = ("closed_form" if e2.method == "closed_form"
                  else "quadrature")
        return {
            "v_n": EcEstimate(e1.value + e2.value, method),
            "v_o": EcEstimate(o1.value + o2.value, "closed_form"),
        }
    groups = getattr(partition, "groups", None)
    group_powers = getattr(partition, "group_powers", None)
    if groups is None:
        groups, group_powers = partition
    covered = sorted(u for grp in groups for u in grp)
    if covered != list(range(1, cfg.m + 1)):
        raise ValueError(
            f"partition {groups} does not cover users 1..{cfg.m} exactly")
    if rng is None:
        raise ValueError("partition totals need an RngSpec")
    noma_cols, noma_terms = group_ec_terms(groups, group_powers, cfg)
    oma_cols, oma_terms = oma_ec_terms(groups, group_powers, cfg,
                                       start=len(noma_cols))
    sampler = GainSampler(cfg.m, rng)
    stats = mc.column_stats(sampler, noma_cols + oma_cols, n,
                            threads=threads, cross=True)
    return {
        "ec_tot": _mc_total(stats, noma_terms),
        "ec_tot_oma": _mc_total(stats, oma_terms),
    }


def two_user_mc(cfg: NetworkConfig, rng: RngSpec, n: int, *,
                threads: int = 1) -> dict[str, EcEstimate]:
    """Monte Carlo ECs of the two-user system on shared draws.

    Returns {"ec1", "ec2", "oma1", "oma2"}; the shared draws make the
    estimates directly comparable against the closed forms with common
    random numbers.
    """
    if cfg.m != 2:
        raise ValueError("two_user_mc requires M=2")
    rho = cfg.rho
    b1, b2 = cfg.betas
    p1, p2 = cfg.powers
    cols = [
        mc.Column("pow", 0, 1.0, rho * p1, b1),
        mc.Column("pow", 1, 1.0, rho * p2, b2, denom=((0, rho * p1),)),
        mc.Column("pow", 0, 1.0, 2.0 * rho * p1, b1 / 2.0),
        mc.Column("pow", 1, 1.0, 2.0 * rho * p2, b2 / 2.0),
    ]
    stats = mc.column_stats(GainSampler(2, rng), cols, n, threads=threads)
    names = ("ec1", "ec2", "oma1", "oma2")
    betas = (b1, b2, b1, b2)
    out = {}
    for j, (name, beta) in enumerate(zip(names, betas)):
        val = math.log2(stats.mean[j]) / beta
        se = stats.se(j) / (abs(beta) * _LN2 * stats.mean[j])
        out[name] = EcEstimate(val, "monte_carlo", n, se)
    return out
