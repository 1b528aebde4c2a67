"""Pure-NumPy kernel backend (reference implementation).

Semantics are the contract for the compiled backend: given the same inputs
the two produce the same results up to floating-point library differences.
"""
import numpy as np

NAME = "numpy"


def sorted_gains(u):
    """Map uniforms in [0,1) to unit-mean exponentials, sorted per row.

    Inverse-CDF transform -ln(1-u) keeps sample streams portable across
    platforms; the stable sort pins tie behavior (measure zero, but float
    ties happen).
    """
    return np.sort(-np.log1p(-u), axis=1, kind="stable")


def eval_columns(g, kind, user, base, num, expo, d0, dptr, didx, dcoef):
    """Evaluate per-draw statistic columns on sorted-gain rows.

    Column j computes  arg = base[j] + num[j] * g[:,user[j]] / den  with
    den = d0[j] + sum_p dcoef[p] * g[:,didx[p]] over p in [dptr[j], dptr[j+1]),
    then arg**expo[j] (kind 0) or expo[j]*log2(arg) (kind 1).
    """
    n = g.shape[0]
    k = kind.shape[0]
    out = np.empty((n, k), dtype=np.float64)
    for j in range(k):
        lo, hi = dptr[j], dptr[j + 1]
        if hi > lo:
            den = d0[j] + g[:, didx[lo:hi]] @ dcoef[lo:hi]
        else:
            den = np.full(n, d0[j])
        with np.errstate(divide="ignore"):
            arg = base[j] + num[j] * g[:, user[j]] / den
        if kind[j] == 0:
            out[:, j] = arg ** expo[j]
        else:
            out[:, j] = expo[j] * np.log2(arg)
    return out
