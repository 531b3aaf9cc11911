"""Theta evaluation: pinned values, normalization, and functional equations."""

import cmath
import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynhecke import ThetaParams, ThetaRangeError, theta, theta_derivative_at_zero

TAU = 0.9j

# Reference value for theta(0.2 + 0.1i) at tau = 0.9i, frozen from the
# extended-precision oracle below (dps=50, 512 product terms):
#   0.1969084912606129161728399 + 0.08349050216017810851920972j
FROZEN_POINT = 0.2 + 0.1j
FROZEN_VALUE = 0.1969084912606129 + 0.08349050216017811j


def oracle_theta(x, tau, terms=512, dps=50):
    """Same product, evaluated independently in extended precision."""
    import mpmath as mp

    with mp.workdps(dps):
        q = mp.e ** (2j * mp.pi * tau)
        u = mp.e ** (2j * mp.pi * x)
        uinv = mp.e ** (-2j * mp.pi * x)
        prod = mp.mpc(1)
        euler = mp.mpc(1)
        qp = mp.mpc(1)
        for _ in range(terms):
            qp *= q
            prod *= (1 - qp * u) * (1 - qp * uinv)
            euler *= 1 - qp
        half = mp.e ** (1j * mp.pi * x)
        return complex((half - 1 / half) * prod / (2j * mp.pi * euler**2))


def test_vanishes_at_zero():
    params = ThetaParams()
    assert theta(0.0, params) == 0.0


def test_frozen_reference_value():
    params = ThetaParams(tau=TAU, truncation=64)
    assert abs(theta(FROZEN_POINT, params) - FROZEN_VALUE) < params.tol_abs


def test_oracle_reproduces_frozen_value():
    assert abs(oracle_theta(FROZEN_POINT, TAU) - FROZEN_VALUE) < 1e-15


def test_antisymmetry_spot():
    params = ThetaParams(tau=0.8j)
    x = 0.31 + 0.07j
    assert abs(theta(-x, params) + theta(x, params)) < params.tol_rel


def test_period_one_spot():
    params = ThetaParams(tau=0.7j)
    x = 0.13
    assert abs(theta(x + 1, params) + theta(x, params)) < params.tol_rel


@pytest.mark.parametrize(
    "tau,truncation,tol",
    [
        (0.8j, 64, 1e-8),
        (0.5 + 0.9j, 64, 1e-8),
        # tiny |q|: the product degenerates to its prefactor, whose additive
        # derivative at 0 is exactly 1
        (2.0j, 8, 1e-10),
    ],
)
def test_derivative_at_zero(tau, truncation, tol):
    params = ThetaParams(tau=tau, truncation=truncation)
    assert abs(theta_derivative_at_zero(params) - 1.0) < tol


@settings(max_examples=60, deadline=None, derandomize=True)
@given(a=st.floats(0.05, 0.95), b=st.floats(0.05, 0.95))
def test_functional_equations(a, b):
    params = ThetaParams()
    x = a + b * params.tau
    tx = theta(x, params)
    ref = max(abs(tx), 1e-30)
    assert abs(theta(-x, params) + tx) / ref < params.tol_rel
    assert abs(theta(x + 1, params) + tx) / ref < params.tol_rel
    factor = -cmath.exp(-1j * math.pi * params.tau - 2j * math.pi * x)
    assert abs(theta(x + params.tau, params) - factor * tx) / ref < params.tol_rel


@settings(max_examples=25, deadline=None, derandomize=True)
@given(a=st.floats(0.05, 0.95), b=st.floats(0.05, 0.95))
def test_truncation_consistency(a, b):
    params = ThetaParams()
    doubled = dataclasses.replace(params, truncation=2 * params.truncation)
    x = a + b * params.tau
    assert abs(theta(x, doubled) - theta(x, params)) < params.tol_abs


def test_simple_zero_at_origin():
    params = ThetaParams()
    x0 = 0.1 + 0.05j
    ratios = [theta(x0 * 2.0**-k, params) / (x0 * 2.0**-k) for k in range(12)]
    errors = [abs(r - 1.0) for r in ratios]
    assert errors[-1] < 1e-6
    assert errors[-1] < errors[0]


def test_rejects_bad_params():
    with pytest.raises(ValueError):
        ThetaParams(tau=0.5)  # real tau
    with pytest.raises(ValueError):
        ThetaParams(truncation=0)
    with pytest.raises(ValueError):
        # tail bound cannot reach tol_abs with one term at this tau
        ThetaParams(tau=0.01j, truncation=1)


def test_range_errors():
    params = ThetaParams()
    with pytest.raises(ValueError):
        theta(complex("nan"), params)
    with pytest.raises(ThetaRangeError):
        theta(40j * params.tau.imag, params)


def test_deterministic():
    params = ThetaParams()
    x = 0.37 + 0.21j
    assert theta(x, params) == theta(x, params)
