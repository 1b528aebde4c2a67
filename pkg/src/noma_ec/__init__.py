"""Effective capacity of uplink NOMA under statistical delay constraints.

Closed-form, quadrature, and Monte Carlo routes to the per-user effective
capacities of a two-user power-domain NOMA uplink over Rayleigh fading, an
OMA baseline, limit-law checks (high-SNR plateau and gap laws, low-SNR
slopes, ergodic limits), and exhaustive user-partition search for larger
networks. Monte Carlo hot loops run on a compiled extension when available,
with a NumPy fallback selected at import (set NOMA_EC_FORCE_FALLBACK=1 to
force the fallback).
"""
from ._kernels import BACKEND_NAME
from .special_functions import (
    ConvergenceError,
    SpecialFnAccuracy,
    exp_integral_e1,
    hyp_u,
    upper_gamma,
    upper_gamma_scaled,
)
from .channel import (
    CHUNK_SIZE,
    GainSampler,
    OrderedGains,
    RngSpec,
    joint_pdf_two,
    order_stat_mean,
    ordered_cdf,
    ordered_pdf,
    sample_ordered_gains,
)
from .mc import Column, ColumnStats, column_stats, log2_mean_combination
from .capacity import (
    EcEstimate,
    NetworkConfig,
    ec1_closed_form,
    ec2_auto,
    ec2_closed_form,
    ec2_quadrature,
    ec_monte_carlo,
    ec_oma_closed_form,
    full_noma_terms,
    group_ec_terms,
    oma_ec_terms,
    rate_noma_uplink,
    rate_oma,
    rate_pair,
    totals,
    two_user_mc,
)
from .asymptotics import (
    HIGH_SNR_RHO,
    LOW_SNR_RHO,
    QUANTITIES,
    LimitReport,
    ec2_high_snr_plateau,
    ergodic_limits,
    gap_derivative_check,
    pairing_gap_constant,
    sum_ec_low_snr_slope,
)
from .pairing import (
    Partition,
    SchemeComparison,
    SchemeGap,
    SearchResult,
    best_partition,
    compare_schemes,
    default_full_powers,
    default_group_powers,
    enumerate_groupings,
    enumerate_pairings,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "CHUNK_SIZE",
    "Column",
    "ColumnStats",
    "ConvergenceError",
    "EcEstimate",
    "GainSampler",
    "HIGH_SNR_RHO",
    "LOW_SNR_RHO",
    "LimitReport",
    "NetworkConfig",
    "OrderedGains",
    "Partition",
    "QUANTITIES",
    "RngSpec",
    "SchemeComparison",
    "SchemeGap",
    "SearchResult",
    "SpecialFnAccuracy",
    "best_partition",
    "column_stats",
    "compare_schemes",
    "default_full_powers",
    "default_group_powers",
    "ec1_closed_form",
    "ec2_auto",
    "ec2_closed_form",
    "ec2_quadrature",
    "ec2_high_snr_plateau",
    "ec_monte_carlo",
    "ec_oma_closed_form",
    "enumerate_groupings",
    "enumerate_pairings",
    "ergodic_limits",
    "exp_integral_e1",
    "full_noma_terms",
    "gap_derivative_check",
    "group_ec_terms",
    "hyp_u",
    "joint_pdf_two",
    "log2_mean_combination",
    "oma_ec_terms",
    "order_stat_mean",
    "ordered_cdf",
    "ordered_pdf",
    "pairing_gap_constant",
    "rate_noma_uplink",
    "rate_oma",
    "rate_pair",
    "sample_ordered_gains",
    "sum_ec_low_snr_slope",
    "totals",
    "two_user_mc",
    "upper_gamma",
    "upper_gamma_scaled",
    "__version__",
]
