"""Special-function layer: frozen oracle values, identities, independent
quadrature cross-checks (scipy.integrate.quad on the defining integrals,
a different integrator than the one inside the implementation)."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from noma_ec.special_functions import (
    ConvergenceError,
    SpecialFnAccuracy,
    exp_integral_e1,
    hyp_u,
    upper_gamma,
    upper_gamma_scaled,
)

# Frozen via two independent routes (adaptive quadrature of the defining
# integral and arbitrary-precision evaluation), agreeing to <1e-13 rel.
U_FROZEN = [
    (1.0, 2.0, 2.0, 0.5),
    (1.0, 1.0, 1.0, 0.5963473623231941),
    (1.0, 0.0, 1.0, 0.403652637676806),
    (0.5, 1.5, 0.7, 1.1952286093345927),
    (2.0, 3.0, 0.3, 11.111111111111111),
    (1.0, 1.5, 0.01, 15.889286263174075),
    (1.0, 0.5, 5.0, 0.15842971109221216),
    (2.5, 1.0, 1.2, 0.0750302435499261),
]

GAMMA_FROZEN = [
    (2.5, 0.5, 1.2795775586565121),
    (1.0, 2.0, 0.1353352832366127),
    (0.0, 1.0, 0.21938393439552029),
    (-0.5, 0.25, 1.4154194561257571),
    (-1.0, 1.0, 0.14849550677592208),
    (-2.0, 0.5, 0.8864174571007137),
    (-1.5, 2.0, 0.011832994103345994),
    (0.0, 0.01, 4.037929576538114),
    (3.0, 7.0, 0.059272327761043554),
    (-3.0, 4.0, 3.7865599510282574e-05),
]


@pytest.mark.parametrize("a,b,z,expected", U_FROZEN)
def test_hyp_u_frozen(a, b, z, expected):
    assert hyp_u(a, b, z) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("a,x,expected", GAMMA_FROZEN)
def test_upper_gamma_frozen(a, x, expected):
    assert upper_gamma(a, x) == pytest.approx(expected, rel=1e-9)


def _u_quad(a, b, z):
    # full_output=1 keeps the reference integrator's roundoff chatter out
    # of the test log; the comparison tolerance is the actual gate.
    out = integrate.quad(
        lambda t: math.exp(-z * t) * t ** (a - 1.0) * (1.0 + t) ** (b - a - 1.0),
        0.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=500, full_output=1)
    return out[0] / math.gamma(a)


def test_hyp_u_against_quadrature_grid():
    # 20-point grid spanning the regimes the capacity formulas hit
    pts = [(a, b, z)
           for a in (0.5, 1.0, 2.0, 3.0)
           for (b, z) in ((1.0, 0.02), (2.5, 0.4), (0.7, 2.0), (1.9, 35.0),
                          (1.5, 800.0))]
    assert len(pts) == 20
    for a, b, z in pts:
        assert hyp_u(a, b, z) == pytest.approx(_u_quad(a, b, z), rel=1e-8), \
            (a, b, z)


def _gamma_quad(a, x):
    val, _ = integrate.quad(lambda t: t ** (a - 1.0) * math.exp(-t), x, np.inf,
                            epsabs=1e-15, epsrel=1e-12, limit=500)
    return val


def test_upper_gamma_against_quadrature_grid():
    pts = [(a, x)
           for a in (-3.0, -1.5, -0.5, 0.0, 2.5)
           for x in (0.05, 0.8, 3.0, 12.0)]
    assert len(pts) == 20
    for a, x in pts:
        assert upper_gamma(a, x) == pytest.approx(_gamma_quad(a, x), rel=1e-8), \
            (a, x)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 3.5])
@pytest.mark.parametrize("z", [0.05, 1.0, 20.0, 3000.0])
def test_u_kummer_identity(a, z):
    # U(a, a+1, z) = z^-a
    assert hyp_u(a, a + 1.0, z) == pytest.approx(z ** (-a), rel=1e-9)


@given(a=st.floats(-4.0, 4.0), x=st.floats(0.1, 20.0))
@settings(max_examples=60, deadline=None)
def test_gamma_recurrence(a, x):
    # Gamma(a+1, x) = a Gamma(a, x) + x^a e^-x
    lhs = upper_gamma(a + 1.0, x)
    rhs = a * upper_gamma(a, x) + x ** a * math.exp(-x)
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-290)


@pytest.mark.parametrize("x", [0.3, 1.0, 4.0, 30.0])
def test_gamma_order_one_is_exp(x):
    assert upper_gamma(1.0, x) == pytest.approx(math.exp(-x), rel=1e-11)


def test_e1_matches_gamma_zero():
    for x in (0.02, 0.7, 5.0):
        assert exp_integral_e1(x) == pytest.approx(upper_gamma(0.0, x), rel=1e-12)


def test_whittaker_identity_value():
    # e^(z/2) z^(1/2-u) Gamma(2u, z) at u=0, z=1 equals the Whittaker
    # function W_(u-1/2),u(z); frozen reference 0.3617029590877757.
    val = math.exp(0.5) * 1.0 ** 0.5 * upper_gamma(0.0, 1.0)
    assert val == pytest.approx(0.3617029590877757, rel=1e-10)


def test_scaled_gamma_consistency():
    for a, x in ((-1.0, 0.5), (0.0, 3.0), (2.2, 8.0), (-2.5, 14.0)):
        assert upper_gamma_scaled(a, x) == pytest.approx(
            math.exp(x) * upper_gamma(a, x), rel=1e-10)


def test_scaled_gamma_survives_huge_argument():
    # e^x Gamma(a, x) ~ x^(a-1): representable far beyond e^x overflow
    v = upper_gamma_scaled(0.0, 5.0e4)
    assert v == pytest.approx(1.0 / 5.0e4, rel=1e-3)
    v = upper_gamma_scaled(-1.0, 2.0e6)
    assert 0 < v < 1e-6


@given(a=st.floats(-2.0, 3.0), x=st.floats(0.1, 10.0),
       dx=st.floats(0.1, 5.0))
@settings(max_examples=40, deadline=None)
def test_gamma_monotone_decreasing_in_x(a, x, dx):
    assert upper_gamma(a, x + dx) < upper_gamma(a, x) * (1 + 1e-12)


def test_domain_errors():
    with pytest.raises(ValueError):
        hyp_u(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        hyp_u(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        hyp_u(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        upper_gamma(0.0, 0.0)
    with pytest.raises(ValueError):
        upper_gamma(-1.0, -0.5)
    assert upper_gamma(2.5, 0.0) == pytest.approx(math.gamma(2.5), rel=1e-12)


def test_accuracy_validation():
    with pytest.raises(ValueError):
        SpecialFnAccuracy(rel_tol=0.0)
    with pytest.raises(ValueError):
        SpecialFnAccuracy(max_terms=3)


def test_convergence_error_carries_partial():
    tight = SpecialFnAccuracy(rel_tol=1e-10, max_terms=40)
    with pytest.raises(ConvergenceError) as einfo:
        hyp_u(0.51, 1.2, 1e-6, accuracy=tight)
    err = einfo.value
    assert err.terms > 0
    assert math.isfinite(err.partial)
