"""Parabolic cylinder functions D_nu(z) for complex order and argument.

Evaluated from the Kummer-function representation

    D_nu(z) = 2^(nu/2) exp(-z^2/4) [ sqrt(pi)/Gamma((1-nu)/2) M(-nu/2, 1/2, z^2/2)
                                     - sqrt(2 pi) z/Gamma(-nu/2) M((1-nu)/2, 3/2, z^2/2) ]

with both power series summed in multiprecision.  The Kummer series loses
roughly |z|^2/(2 ln 10) digits to cancellation, so the working precision is
raised until the measured loss leaves at least ``target_digits`` intact.
"""
from __future__ import annotations

import cmath
import math

import mpmath

from .errors import AccuracyError, DomainError

MAX_ABS_Z = 50.0
MAX_TERMS = 200_000


def _kummer(a, b, x, tol):
    """Sum M(a, b, x); returns (value, largest term magnitude)."""
    term = mpmath.mpc(1)
    total = mpmath.mpc(1)
    biggest = mpmath.mpf(1)
    ax = abs(x)
    quiet = 0
    k = 0
    while True:
        term = term * (a + k) / (b + k) * x / (k + 1)
        k += 1
        total += term
        mag = abs(term)
        if mag > biggest:
            biggest = mag
        if k > ax and mag <= tol * abs(total):
            quiet += 1
            if quiet >= 2:
                return total, biggest
        else:
            quiet = 0
        if k >= MAX_TERMS:
            raise AccuracyError("Kummer series did not converge", float(mag / max(abs(total), tol)))


def pcf_d(nu: complex, z: complex, target_digits: int = 15) -> complex:
    """D_nu(z) for |z| <= 50, accurate to about 10^-target_digits relative."""
    nu = complex(nu)
    z = complex(z)
    if not (cmath.isfinite(nu) and cmath.isfinite(z)):
        raise DomainError("nu and z must be finite")
    if abs(z) > MAX_ABS_Z:
        raise DomainError(f"|z| = {abs(z):.3g} exceeds the supported bound {MAX_ABS_Z}")
    if z == 0:
        return complex(mpmath.power(2, nu / 2) * mpmath.sqrt(mpmath.pi) * mpmath.rgamma((1 - nu) / 2))

    x_mag = abs(z) ** 2 / 2
    dps = target_digits + 10 + int(x_mag / math.log(10)) + int(math.log10(1.0 + abs(nu)))
    for _ in range(6):
        with mpmath.workdps(dps):
            value, lost = _evaluate(nu, z, mpmath.mpf(10) ** (-dps))
        if dps - lost >= target_digits + 5:
            result = complex(value)
            if not (cmath.isfinite(result)):
                raise AccuracyError("D_nu(z) outside double range")
            return result
        dps = int(lost) + target_digits + 15
    raise AccuracyError("could not recover enough digits for D_nu(z)", 10.0 ** (lost - dps))


def _evaluate(nu, z, tol):
    nu_m = mpmath.mpc(nu)
    z_m = mpmath.mpc(z)
    x = z_m * z_m / 2
    m1, big1 = _kummer(-nu_m / 2, mpmath.mpf(0.5), x, tol)
    m2, big2 = _kummer((1 - nu_m) / 2, mpmath.mpf(1.5), x, tol)
    c1 = mpmath.sqrt(mpmath.pi) * mpmath.rgamma((1 - nu_m) / 2)
    c2 = mpmath.sqrt(2 * mpmath.pi) * z_m * mpmath.rgamma(-nu_m / 2)
    bracket = c1 * m1 - c2 * m2
    scale = max(abs(c1) * big1, abs(c2) * big2)
    lost = 0.0
    if bracket == 0:
        lost = float("inf") if scale > 0 else 0.0
    elif scale > 0:
        lost = max(0.0, float(mpmath.log10(scale / abs(bracket))))
    value = mpmath.power(2, nu_m / 2) * mpmath.exp(-z_m * z_m / 4) * bracket
    return value, lost
