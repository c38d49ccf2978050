import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kzbreak.analytic import OMEGA
from kzbreak.errors import DomainError
from kzbreak.pcf import pcf_d

from oracles import mp_pcfd, weber_ode

rng = np.random.default_rng(20240611)


def test_order_zero_identity():
    assert pcf_d(0, 2) == pytest.approx(math.exp(-1), rel=1e-15)
    for _ in range(200):
        r, th = 10 * math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi)
        z = cmath.rect(r, th)
        assert abs(pcf_d(0, z) * cmath.exp(z * z / 4) - 1) <= 1e-10


def test_known_values():
    # D_1(z) = z exp(-z^2/4), D_2(z) = (z^2 - 1) exp(-z^2/4)
    for z in (0.3, 1.7 - 0.4j, 3j, -2.5):
        e = cmath.exp(-z * z / 4)
        assert pcf_d(1, z) == pytest.approx(z * e, rel=1e-13)
        assert pcf_d(2, z) == pytest.approx((z * z - 1) * e, rel=1e-13)
    # D_{-1}(0) = sqrt(pi/2)
    assert pcf_d(-1, 0) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-14)


def test_origin_against_ode_initial_data():
    for nu in (-1, -0.5 + 0.3j, -1 - 2j, 0.7j):
        assert pcf_d(nu, 0) == pytest.approx(weber_ode(nu, 1e-300), rel=1e-12)


def _random_point():
    nu = complex(rng.uniform(-3, 1), rng.uniform(-3, 3))
    z = cmath.rect(rng.uniform(0, 4), rng.uniform(0, 2 * math.pi))
    return nu, z


def test_weber_ode_oracle():
    for _ in range(50):
        nu, z = _random_point()
        ref = weber_ode(nu, z)
        assert abs(pcf_d(nu, z) - ref) <= 1e-8 * max(1.0, abs(ref))


def test_recurrence():
    for _ in range(40):
        nu, z = _random_point()
        a, b, c = pcf_d(nu + 1, z), pcf_d(nu, z), pcf_d(nu - 1, z)
        scale = max(abs(a), abs(z * b), abs(nu * c), 1e-300)
        assert abs(a - z * b + nu * c) <= 1e-8 * scale


def test_weber_equation_second_difference():
    h = 1e-3
    for _ in range(10):
        nu, z = _random_point()
        y = [pcf_d(nu, z + k * h) for k in (-1, 0, 1)]
        d2 = (y[0] - 2 * y[1] + y[2]) / h**2
        residual = d2 + (nu + 0.5 - z * z / 4) * y[1]
        assert abs(residual) <= 1e-5 * max(1.0, abs(y[1]))


@pytest.mark.parametrize("s", [0.5, 5.0, 12.0, 20.0, 28.0])
@pytest.mark.parametrize("kappa", [0.05, 1.0, 6.0])
def test_quench_arguments_match_mpmath(s, kappa):
    """The diagonal z = e^{i pi/4} s with orders -i kappa and -1 - i kappa."""
    for nu in (-1j * kappa, -1 - 1j * kappa):
        for z in (OMEGA * s, -OMEGA * s):
            ref = mp_pcfd(nu, z)
            assert abs(pcf_d(nu, z) - ref) <= 1e-10 * abs(ref)


def test_fig2_parameter_point_matches_ode():
    # x_c = 1.22, tau/tau0 = 1 at J = 2 pi 31.75 kHz
    J = 2 * math.pi * 31.75e3
    dm = 2 * J * 1.22
    T = dm / J**2
    kappa = J**2 * T / (4 * dm)
    z = OMEGA * math.sqrt(T * dm) / 2
    nu = -1 - 1j * kappa
    assert abs(pcf_d(nu, z) - weber_ode(nu, z)) <= 1e-8 * abs(weber_ode(nu, z))


@given(st.floats(-4, 2), st.floats(-4, 4), st.floats(0, 30), st.floats(0, 2 * math.pi))
@settings(max_examples=40)
def test_matches_mpmath_property(nr, ni, r, th):
    nu, z = complex(nr, ni), cmath.rect(r, th)
    ref = mp_pcfd(nu, z)
    val = pcf_d(nu, z)
    # relative to the local dominant-solution scale, which is what the series controls
    scale = max(abs(ref), math.exp(-r * r / 4) * (1 + r) ** abs(nr), 1e-300)
    assert abs(val - ref) <= 1e-9 * scale


def test_domain():
    with pytest.raises(DomainError):
        pcf_d(0.5, 50.5)
    with pytest.raises(DomainError):
        pcf_d(complex("nan"), 1)
