"""Real-valued special functions used by the effective-capacity closed forms.

Everything here is self-contained (no SciPy): the confluent hypergeometric
function of the second kind is evaluated by adaptive Gauss-Kronrod quadrature
of its integral representation, and the upper incomplete gamma function by a
Lentz continued fraction combined with a power series and the downward
recurrence, which extends it to non-positive first arguments.

Intended parameter ranges are the ones the capacity formulas produce:
moderate orders (|a| up to ~10) and positive arguments. Accuracy is
controlled by SpecialFnAccuracy and is ~1e-12 relative over those ranges.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpecialFnAccuracy",
    "ConvergenceError",
    "hyp_u",
    "upper_gamma",
    "upper_gamma_scaled",
    "exp_integral_e1",
]

_EULER_GAMMA = 0.5772156649015328606

# 15-point Kronrod nodes on [-1, 1] and weights, with the embedded 7-point
# Gauss rule on the odd-indexed nodes. Standard QUADPACK constants.
_XGK = np.array([
    -0.99145537112081263921, -0.94910791234275852453, -0.86486442335976907279,
    -0.74153118559939443986, -0.58608723546769113029, -0.40584515137739716691,
    -0.20778495500789846760, 0.0,
    0.20778495500789846760, 0.40584515137739716691, 0.58608723546769113029,
    0.74153118559939443986, 0.86486442335976907279, 0.94910791234275852453,
    0.99145537112081263921,
])
_WGK = np.array([
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801,
    0.20443294007529889241, 0.19035057806478540991, 0.16900472663926790283,
    0.14065325971552591875, 0.10479001032225018384, 0.06309209262997855329,
    0.02293532201052922496,
])
_WG = np.array([
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776, 0.38183005050511894495, 0.27970539148927666790,
    0.12948496616886969327,
])


@dataclass(frozen=True)
class SpecialFnAccuracy:
    """Accuracy knobs shared by the special-function evaluators.

    rel_tol bounds the relative error target; max_terms bounds series /
    continued-fraction iterations and quadrature subdivisions.
    """
    rel_tol: float = 1e-10
    max_terms: int = 10000

    def __post_init__(self):
        if not (0 < self.rel_tol < 1):
            raise ValueError(f"rel_tol must be in (0,1), got {self.rel_tol}")
        if self.max_terms < 10:
            raise ValueError(f"max_terms must be >= 10, got {self.max_terms}")


_DEFAULT = SpecialFnAccuracy()


class ConvergenceError(ArithmeticError):
    """Raised when an expansion fails to reach tolerance within its budget.

    Carries the partial value accumulated so far and the number of terms
    (or subdivisions) consumed.
    """

    def __init__(self, message: str, partial: float = math.nan, terms: int = 0):
        super().__init__(message)
        self.partial = partial
        self.terms = terms


def _adaptive_quad_01(f, rel_tol: float, max_intervals: int) -> float:
    """Integrate a vectorized integrand over (0, 1) by adaptive G7/K15.

    f maps an ndarray of abscissae to an ndarray of values; the Kronrod
    nodes are interior so the endpoints are never evaluated. Worst-interval
    bisection continues until the summed error estimate falls below
    rel_tol * |integral| (with a tiny absolute floor so an identically zero
    integrand terminates).
    """
    def gk(lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        y = f(mid + half * _XGK)
        ik = half * float(_WGK @ y)
        ig = half * float(_WG @ y[1::2])
        return ik, abs(ik - ig)

    val, err = gk(0.0, 1.0)
    heap = [(-err, 0.0, 1.0, val, err)]
    total, total_err = val, err
    count = 1
    while total_err > max(1e-305, rel_tol * abs(total)):
        if count >= max_intervals:
            raise ConvergenceError(
                f"quadrature: {count} subdivisions without reaching "
                f"rel_tol={rel_tol:g} (err~{total_err:.2e})",
                partial=total, terms=count)
        _, lo, hi, v0, e0 = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = gk(lo, mid)
        v2, e2 = gk(mid, hi)
        total += (v1 + v2) - v0
        total_err += (e1 + e2) - e0
        heapq.heappush(heap, (-e1, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2))
        count += 1
    return total


def hyp_u(a: float, b: float, z: float,
          accuracy: SpecialFnAccuracy | None = None) -> float:
    """Confluent hypergeometric function of the second kind U(a, b, z).

    Evaluated from the Laplace integral
        U(a,b,z) = (1/Gamma(a)) * Int_0^inf e^(-z t) t^(a-1) (1+t)^(b-a-1) dt,
    valid for a > 0, z > 0, any real b. The substitution t = -ln(1-s)/z
    absorbs the exponential weight and maps the integral onto (0,1); for
    a < 1 an additional power warp removes the algebraic endpoint
    singularity so the quadrature sees a smooth integrand.
    """
    acc = accuracy or _DEFAULT
    if not (a > 0):
        raise ValueError(f"hyp_u requires a > 0, got a={a}")
    if not (z > 0):
        raise ValueError(f"hyp_u requires z > 0, got z={z}")
    pw = b - a - 1.0

    if a >= 1.0:
        def integrand(s):
            t = -np.log1p(-s) / z
            return t ** (a - 1.0) * (1.0 + t) ** pw
    else:
        m = math.ceil(1.0 / a)

        def integrand(w):
            s = w ** m
            t = -np.log1p(-s) / z
            # t^(a-1) = (t/s)^(a-1) * w^(m(a-1)); combined with the Jacobian
            # m w^(m-1) the net w-exponent m*a-1 is nonnegative.
            return (m * (t / s) ** (a - 1.0) * w ** (m * a - 1.0)
                    * (1.0 + t) ** pw)

    budget = max(2, acc.max_terms // 15)   # ~15 integrand points/interval
    try:
        q = _adaptive_quad_01(integrand, acc.rel_tol, budget)
    except ConvergenceError as exc:
        exc.partial = exc.partial / (z * math.gamma(a))
        raise
    return q / (z * math.gamma(a))


def _gamma_cf_scaled(a: float, x: float, acc: SpecialFnAccuracy) -> float:
    """e^x Gamma(a, x) via the Legendre continued fraction (modified Lentz).

    Converges for x > 0 and any real a; efficient when x is not small
    relative to |a|.
    """
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for i in range(1, acc.max_terms + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 0.1 * acc.rel_tol:
            return x ** a * h
    raise ConvergenceError(
        f"continued fraction for Gamma({a},{x}) stalled after "
        f"{acc.max_terms} iterations", partial=x ** a * h, terms=acc.max_terms)


def _gamma_series_scaled(a: float, x: float, acc: SpecialFnAccuracy) -> float:
    """e^x Gamma(a, x) for a > 0 via the lower-incomplete power series.

    gamma(a,x) = x^a e^-x sum_n x^n / (a (a+1) ... (a+n)); the complement
    against Gamma(a) is well conditioned for x < a + 1.
    """
    term = 1.0 / a
    total = term
    for n in range(1, acc.max_terms + 1):
        term *= x / (a + n)
        total += term
        if abs(term) < acc.rel_tol * 1e-3 * abs(total):
            return math.exp(x) * math.gamma(a) - x ** a * total
    raise ConvergenceError(
        f"lower series for Gamma({a},{x}) stalled after {acc.max_terms} terms",
        partial=math.exp(x) * math.gamma(a) - x ** a * total,
        terms=acc.max_terms)


def _e1_series_scaled(x: float, acc: SpecialFnAccuracy) -> float:
    """e^x Gamma(0, x) for small x via E1(x) = -gamma - ln x + sum (-x)^k/(k k!)."""
    total = -_EULER_GAMMA - math.log(x)
    term = 1.0
    for k in range(1, acc.max_terms + 1):
        term *= -x / k
        total -= term / k
        if abs(term) < acc.rel_tol * 1e-3 * max(abs(total), 1e-30):
            return math.exp(x) * total
    raise ConvergenceError(
        f"E1 series at x={x} stalled after {acc.max_terms} terms",
        partial=math.exp(x) * total, terms=acc.max_terms)


def upper_gamma_scaled(a: float, x: float,
                       accuracy: SpecialFnAccuracy | None = None) -> float:
    """Scaled upper incomplete gamma e^x Gamma(a, x) for x > 0, any real a.

    The scaling removes the e^-x decay, so this stays representable for
    arbitrarily large x (it behaves like x^(a-1)); the capacity integrals
    rely on that to fold the scaling into their own exponentials.
    """
    acc = accuracy or _DEFAULT
    if not (x > 0):
        raise ValueError(f"upper_gamma_scaled requires x > 0, got x={x}")
    if a <= 0.5:
        # Snap near-integer non-positive orders onto the integer: the
        # series complement blows up as Gamma(a) ~ 1/a near 0, and the
        # downward recurrence would divide by s ~ 0 near any integer.
        # The snap's relative error is O(1e-12 * |dGamma/da| / Gamma).
        n_near = round(a)
        if n_near <= 0 and abs(a - n_near) < 1e-12:
            a = float(n_near)
    if a > 0:
        if x < a + 1.0:
            return _gamma_series_scaled(a, x, acc)
        return _gamma_cf_scaled(a, x, acc)
    # a <= 0: the continued fraction still converges when x dominates |a|;
    # otherwise climb down from a positive starting order.
    if x >= 1.5 + abs(a):
        return _gamma_cf_scaled(a, x, acc)
    n_int = round(a)
    if abs(a - n_int) < 1e-12:
        g = _e1_series_scaled(x, acc)   # e^x Gamma(0, x)
        s = 0.0
    else:
        steps = math.ceil(-a) + 1
        start = a + steps               # in (1, 2]
        g = _gamma_series_scaled(start, x, acc)
        s = start
        n_int = None
    # downward recurrence in scaled form: Gs(s-1) = (Gs(s) - x^(s-1)) / (s-1)
    if n_int is not None:
        for j in range(1, -n_int + 1):
            g = (g - x ** (-j)) / (-j)
        return g
    while s > a + 0.5:
        s -= 1.0
        g = (g - x ** s) / s
    return g


def upper_gamma(a: float, x: float,
                accuracy: SpecialFnAccuracy | None = None) -> float:
    """Upper incomplete gamma Gamma(a, x) = Int_x^inf t^(a-1) e^-t dt.

    Valid for x > 0 with any real a, including zero and negative orders
    (where the complete Gamma(a) diverges but the tail integral is finite).
    x = 0 is allowed only for a > 0, where the integral is Gamma(a).
    """
    acc = accuracy or _DEFAULT
    if x == 0.0:
        if a > 0:
            return math.gamma(a)
        raise ValueError(
            f"Gamma(a, x) diverges at x=0 for a={a} <= 0")
    if x < 0:
        raise ValueError(f"upper_gamma requires x >= 0, got x={x}")
    if x >= 745.0:
        # e^-x underflows to zero; so does Gamma(a, x) at any moderate a
        return 0.0
    return math.exp(-x) * upper_gamma_scaled(a, x, acc)


def exp_integral_e1(x: float, accuracy: SpecialFnAccuracy | None = None) -> float:
    """Exponential integral E1(x) = Gamma(0, x), x > 0."""
    return upper_gamma(0.0, x, accuracy)
