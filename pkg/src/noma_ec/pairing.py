"""Partition enumeration and exhaustive total-EC search over user groupings.

Users 1..M are ranked weakest to strongest by channel gain. A partition
splits them into equal-size NOMA groups that time-share the block; the
search evaluates every partition's total EC by Monte Carlo on one shared
set of ordered-gain draws (common random numbers), so partition
differences carry exact paired standard errors instead of independent
ones. Rankings that the draws cannot separate at 3 sigma are flagged
inconclusive with an estimate of the sample count that would.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from . import mc
from .capacity import (
    EcEstimate,
    NetworkConfig,
    full_noma_terms,
    group_ec_terms,
    oma_ec_terms,
)
from .channel import GainSampler, RngSpec

__all__ = [
    "GROUP_POWER_RATIO",
    "Partition",
    "SearchResult",
    "SchemeGap",
    "SchemeComparison",
    "default_group_powers",
    "default_full_powers",
    "enumerate_pairings",
    "enumerate_groupings",
    "best_partition",
    "compare_schemes",
]

# Consecutive in-group power coefficients keep this ratio; for pairs it
# reproduces the canonical (0.2, 0.8) split, and larger groups extend the
# same geometric ladder.
GROUP_POWER_RATIO = 4.0

MAX_ENUMERATION_M = 12


def default_group_powers(group_size: int) -> tuple[float, ...]:
    """Geometric in-group power ladder: ratio-4 steps, normalized to 1.

    group_size=2 gives (0.2, 0.8); group_size=3 gives (1, 4, 16)/21.
    """
    if group_size < 1:
        raise ValueError(f"group_size must be >= 1, got {group_size}")
    raw = [GROUP_POWER_RATIO ** k for k in range(group_size)]
    norm = sum(raw)
    return tuple(r / norm for r in raw)


def default_full_powers(m: int) -> tuple[float, ...]:
    """Full-multiplexing power ladder over all M users (same geometric rule)."""
    return default_group_powers(m)


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of users 1..M by equal-size groups with in-group powers.

    Group members are listed weakest first; each group's power vector is
    aligned with its members and sums to 1 (each group spends the full
    block power during its share of the block).
    """
    groups: tuple[tuple[int, ...], ...]
    group_powers: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.groups:
            raise ValueError("a partition needs at least one group")
        if len(self.group_powers) != len(self.groups):
            raise ValueError("one power vector per group is required")
        sizes = {len(g) for g in self.groups}
        if len(sizes) != 1:
            raise ValueError(f"group sizes must be uniform, got {sizes}")
        seen: set[int] = set()
        for grp, pw in zip(self.groups, self.group_powers):
            if list(grp) != sorted(grp):
                raise ValueError(f"group {grp} is not ascending")
            if len(pw) != len(grp):
                raise ValueError(f"group {grp} has {len(pw)} power entries")
            if any(p <= 0 for p in pw):
                raise ValueError(f"group powers must be positive: {pw}")
            if abs(sum(pw) - 1.0) > 1e-9:
                raise ValueError(f"group powers must sum to 1: {pw}")
            if seen & set(grp):
                raise ValueError(f"user(s) {seen & set(grp)} appear twice")
            seen |= set(grp)
        if seen != set(range(1, len(seen) + 1)):
            raise ValueError(
                f"groups must cover 1..{len(seen)} exactly, got {sorted(seen)}")

    @property
    def m(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def group_size(self) -> int:
        return len(self.groups[0])

    def label(self) -> str:
        return "|".join("-".join(str(u) for u in g) for g in self.groups)


def _make(groups, group_powers=None) -> Partition:
    groups = tuple(tuple(g) for g in groups)
    if group_powers is None:
        pw = default_group_powers(len(groups[0]))
        group_powers = tuple(pw for _ in groups)
    else:
        group_powers = tuple(tuple(p) for p in group_powers)
    return Partition(groups, group_powers)


def enumerate_groupings(m: int, group_size: int = 3,
                        group_powers=None) -> list[Partition]:
    """All partitions of 1..M into equal groups, lexicographically ordered.

    Count is M! / ((g!)^(M/g) (M/g)!). Each partition's groups are listed
    by ascending leader, so the enumeration is canonical and free of
    duplicates. group_powers (one vector applied to every group) defaults
    to the geometric ladder.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if m > MAX_ENUMERATION_M:
        raise ValueError(
            f"exhaustive enumeration is guarded at m <= {MAX_ENUMERATION_M}, "
            f"got {m}")
    if group_size < 2:
        raise ValueError(f"group_size must be >= 2, got {group_size}")
    if m % group_size != 0:
        raise ValueError(f"group size {group_size} does not divide m={m}")
    if group_powers is not None:
        group_powers = tuple(float(p) for p in group_powers)
        if len(group_powers) != group_size:
            raise ValueError(
                f"group_powers must have {group_size} entries per group")

    out: list[Partition] = []

    def recurse(remaining: tuple[int, ...], acc: list[tuple[int, ...]]):
        if not remaining:
            out.append(_make(acc, None if group_powers is None
                             else tuple(group_powers for _ in acc)))
            return
        head, rest = remaining[0], remaining[1:]
        for companions in combinations(rest, group_size - 1):
            group = (head,) + companions
            left = tuple(u for u in rest if u not in companions)
            recurse(left, acc + [group])

    recurse(tuple(range(1, m + 1)), [])
    return out


def enumerate_pairings(m: int, group_powers=None) -> list[Partition]:
    """All perfect matchings of 1..M into pairs; count is (M-1)!!."""
    if m % 2 != 0:
        raise ValueError(f"pairing requires an even user count, got m={m}")
    return enumerate_groupings(m, 2, group_powers)


@dataclass(frozen=True)
class SearchResult:
    """Ranked outcome of an exhaustive partition search on shared draws.

    ranked pairs each Partition with its total-EC estimate, best first
    (ties keep enumeration order and are surfaced via the separation
    fields, never broken silently). oma_per_partition aligns with ranked
    and holds each partition's own OMA baseline (every user alone in a
    1/M slot at doubled power, keeping its in-group coefficient);
    oma_total is the winner's. top2_sigma is the paired significance of
    the top-two difference; when it falls below 3, inconclusive is set
    and required_samples estimates the draw count that would separate
    them at 3 sigma.
    """
    ranked: tuple[tuple[Partition, EcEstimate], ...]
    oma_total: EcEstimate
    oma_per_partition: tuple[EcEstimate, ...]
    full_noma_total: EcEstimate | None = None
    top2_sigma: float | None = None
    inconclusive: bool = False
    required_samples: int | None = None

    @property
    def best(self) -> Partition:
        return self.ranked[0][0]


class _Battery:
    """Deduplicating column battery shared by every partition in a search."""

    def __init__(self):
        self.columns: list[mc.Column] = []
        self._index: dict[mc.Column, int] = {}

    def add_terms(self, cols, terms) -> list[tuple[int, float]]:
        remapped = []
        for local, weight in terms:
            col = cols[local]
            j = self._index.get(col)
            if j is None:
                j = len(self.columns)
                self._index[col] = j
                self.columns.append(col)
            remapped.append((j, weight))
        return sorted(remapped)


def _estimate(stats: mc.ColumnStats, terms) -> EcEstimate:
    value, se = mc.log2_mean_combination(stats, terms)
    return EcEstimate(value, "monte_carlo", stats.n, se)


def _paired_gap(stats: mc.ColumnStats, hi_terms, lo_terms):
    """(difference, std_error) of two log2-combinations on shared draws.

    Weights are merged per column before evaluation so that terms shared
    by both sides cancel exactly; two identical term lists give exactly
    (0.0, 0.0) rather than accumulated rounding noise with zero variance.
    """
    acc: dict[int, float] = {}
    for j, w in hi_terms:
        acc[j] = acc.get(j, 0.0) + w
    for j, w in lo_terms:
        acc[j] = acc.get(j, 0.0) - w
    diff_terms = sorted((j, w) for j, w in acc.items() if w != 0.0)
    if not diff_terms:
        return 0.0, 0.0
    return mc.log2_mean_combination(stats, diff_terms)


def best_partition(cfg: NetworkConfig, partitions, n: int = 100_000,
                   rng: RngSpec | None = None, *,
                   threads: int = 1) -> SearchResult:
    """Exhaustive search for the partition with the largest total EC.

    All partitions are evaluated on one shared set of ordered-gain draws,
    so the ranking and its top-two separation use exact paired standard
    errors. Reruns with the same RngSpec reproduce the ranking exactly.
    """
    partitions = list(partitions)
    if not partitions:
        raise ValueError("no partitions supplied")
    for p in partitions:
        if p.m != cfg.m:
            raise ValueError(
                f"partition {p.label()} covers {p.m} users, config has {cfg.m}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = rng or RngSpec(seed=0)

    battery = _Battery()
    noma_terms = []
    oma_terms = []
    for p in partitions:
        cols, terms = group_ec_terms(p.groups, p.group_powers, cfg)
        noma_terms.append(battery.add_terms(cols, terms))
        cols, terms = oma_ec_terms(p.groups, p.group_powers, cfg)
        oma_terms.append(battery.add_terms(cols, terms))

    stats = mc.column_stats(GainSampler(cfg.m, rng), battery.columns, n,
                            threads=threads, cross=True)

    scored = [(_estimate(stats, t), _estimate(stats, o), p, t)
              for p, t, o in zip(partitions, noma_terms, oma_terms)]
    # stable sort keeps enumeration order among exact ties
    order = sorted(range(len(scored)), key=lambda i: -scored[i][0].value)
    ranked = tuple((scored[i][2], scored[i][0]) for i in order)
    oma_per = tuple(scored[i][1] for i in order)

    top2_sigma = None
    inconclusive = False
    required = None
    if len(order) > 1:
        diff, se = _paired_gap(stats, scored[order[0]][3], scored[order[1]][3])
        if se > 0:
            top2_sigma = abs(diff) / se
            inconclusive = top2_sigma < 3.0
            if inconclusive and diff != 0:
                required = math.ceil(n * (3.0 * se / abs(diff)) ** 2)
        else:
            top2_sigma = math.inf if diff != 0 else 0.0
            inconclusive = diff == 0.0
    return SearchResult(
        ranked=ranked,
        oma_total=oma_per[0],
        oma_per_partition=oma_per,
        top2_sigma=top2_sigma,
        inconclusive=inconclusive,
        required_samples=required,
    )


@dataclass(frozen=True)
class SchemeGap:
    """Paired difference between two schemes' totals on shared draws."""
    hi: str
    lo: str
    difference: float
    std_error: float

    @property
    def sigma(self) -> float:
        if self.std_error == 0.0:
            return math.inf if self.difference != 0 else 0.0
        return abs(self.difference) / self.std_error

    @property
    def separated(self) -> bool:
        return self.difference > 0 and self.sigma >= 3.0


@dataclass(frozen=True)
class SchemeComparison:
    """Totals of the four multiplexing schemes on one shared draw set.

    totals maps scheme name (full_noma, best_grouping, best_pairing, oma)
    to its estimate; schemes a given M cannot form (odd M for pairing,
    M not divisible by the group size for grouping) are absent. ordering
    lists the present schemes by descending total. gaps holds the paired
    differences along the expected chain full_noma >= best_grouping >=
    best_pairing >= oma (restricted to present schemes); conclusive means
    every link is positive and at least 3 sigma.
    """
    totals: dict[str, EcEstimate]
    ordering: tuple[str, ...]
    gaps: tuple[SchemeGap, ...]
    best_pairing: Partition | None = None
    best_grouping: Partition | None = None

    @property
    def conclusive(self) -> bool:
        return all(g.separated for g in self.gaps)


def compare_schemes(cfg: NetworkConfig, n: int = 100_000,
                    rng: RngSpec | None = None, *, threads: int = 1,
                    group_size: int = 3, pair_powers=None,
                    group_powers=None) -> SchemeComparison:
    """Full NOMA vs best grouping vs best pairing vs OMA, on shared draws.

    cfg.powers are the full-multiplexing coefficients (CLI default: the
    geometric ladder). Pair and group coefficients default to the same
    ladder; the OMA baseline uses the best pairing's per-user power
    assignment (each user alone in a 1/M slot at doubled power). With
    M=2 the comparison degenerates to the two-user NOMA-vs-OMA totals.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = rng or RngSpec(seed=0)
    m = cfg.m

    battery = _Battery()
    fn_cols, fn_terms = full_noma_terms(cfg)
    full_terms = battery.add_terms(fn_cols, fn_terms)

    pairings = enumerate_pairings(m, pair_powers) if m % 2 == 0 else []
    pair_noma, pair_oma = [], []
    for p in pairings:
        cols, terms = group_ec_terms(p.groups, p.group_powers, cfg)
        pair_noma.append(battery.add_terms(cols, terms))
        cols, terms = oma_ec_terms(p.groups, p.group_powers, cfg)
        pair_oma.append(battery.add_terms(cols, terms))

    groupings = (enumerate_groupings(m, group_size, group_powers)
                 if group_size != m and m % group_size == 0 else [])
    group_terms = []
    for p in groupings:
        cols, terms = group_ec_terms(p.groups, p.group_powers, cfg)
        group_terms.append(battery.add_terms(cols, terms))

    stats = mc.column_stats(GainSampler(m, rng), battery.columns, n,
                            threads=threads, cross=True)

    totals: dict[str, EcEstimate] = {"full_noma": _estimate(stats, full_terms)}
    chain: list[tuple[str, list]] = [("full_noma", full_terms)]
    best_pair = best_group = None

    if groupings:
        vals = [_estimate(stats, t) for t in group_terms]
        i = max(range(len(vals)), key=lambda k: vals[k].value)
        totals["best_grouping"] = vals[i]
        best_group = groupings[i]
        chain.append(("best_grouping", group_terms[i]))
    if pairings:
        vals = [_estimate(stats, t) for t in pair_noma]
        i = max(range(len(vals)), key=lambda k: vals[k].value)
        totals["best_pairing"] = vals[i]
        best_pair = pairings[i]
        chain.append(("best_pairing", pair_noma[i]))
        totals["oma"] = _estimate(stats, pair_oma[i])
        chain.append(("oma", pair_oma[i]))

    ordering = tuple(sorted(totals, key=lambda k: -totals[k].value))
    gaps = []
    for (hi, hi_t), (lo, lo_t) in zip(chain, chain[1:]):
        diff, se = _paired_gap(stats, hi_t, lo_t)
        gaps.append(SchemeGap(hi, lo, diff, se))
    return SchemeComparison(
        totals=totals,
        ordering=ordering,
        gaps=tuple(gaps),
        best_pairing=best_pair,
        best_grouping=best_group,
    )
