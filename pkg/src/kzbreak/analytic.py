"""Closed-form results for finite-range linear quenches.

Two exact propagators built from parabolic cylinder functions:

* ``symmetric_final_state``: delta = 4 dmax t/T on [-T/4, T/4] (equivalently
  the symmetric protocol on [0, T/2]), arbitrary initial state.
* ``halframp_final_state``: delta = dmax t/T on [0, T] with coupling p,
  starting from the lower eigenstate (-1, 1)/sqrt(2) at delta = 0.

Both come from the Weber form of the amplitude equations: with
z = e^{i pi/4} sqrt(r) t (r the sweep rate) the first amplitude is a
combination of D_{-1-i kappa}(+-z) and the second of D_{-i kappa}(+-z),
kappa = J^2 / r.  Every block below is a separate helper so each can be
checked against direct integration.

The remaining functions are the breakdown predictions: the Landau-Zener
formula, the plateau x_c^2/(1+x_c^2), the critical inverse quench rate and
the adiabatic-impulse freezing time.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainError
from .hamiltonian import eigenvectors
from .pcf import pcf_d
from .states import QubitState

OMEGA = cmath.exp(1j * math.pi / 4)  # principal (-1)^(1/4)
SQRT2 = math.sqrt(2.0)


def _positive(**kw):
    for name, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be positive and finite, got {v!r}")


# -- symmetric quench ---------------------------------------------------------

@dataclass(frozen=True)
class SymmetricBlocks:
    """Parabolic-cylinder values entering the symmetric-quench propagator.

    ``z`` is the end-point argument e^{i pi/4} sqrt(T dmax)/2; ``d0_*`` hold
    D_{-i kappa}(+-z) and ``d1_*`` hold D_{-1-i kappa}(+-z).
    """

    kappa: float
    k: float  # sqrt(J^2 T / dmax)
    z: complex
    d0_plus: complex
    d0_minus: complex
    d1_plus: complex
    d1_minus: complex


def symmetric_blocks(coupling: float, delta_max: float, period: float) -> SymmetricBlocks:
    _positive(coupling=coupling, delta_max=delta_max, period=period)
    kappa = coupling**2 * period / (4 * delta_max)
    z = -OMEGA * (-period / 4) * math.sqrt(4 * delta_max / period)
    nu0 = -1j * kappa
    nu1 = -1 - 1j * kappa
    return SymmetricBlocks(
        kappa=kappa,
        k=math.sqrt(coupling**2 * period / delta_max),
        z=z,
        d0_plus=pcf_d(nu0, z),
        d0_minus=pcf_d(nu0, -z),
        d1_plus=pcf_d(nu1, z),
        d1_minus=pcf_d(nu1, -z),
    )


def block_a(b: SymmetricBlocks, alpha0: complex) -> complex:
    return 2 * SQRT2 * alpha0 * b.d0_plus * b.d1_plus


def block_b(b: SymmetricBlocks, alpha0: complex) -> complex:
    return 2 * SQRT2 * alpha0 * b.d0_minus * b.d1_minus


def block_c(b: SymmetricBlocks, beta0: complex) -> complex:
    return OMEGA * b.k * (-SQRT2 * beta0) * (b.d1_plus**2 - b.d1_minus**2)


def block_e(b: SymmetricBlocks) -> complex:
    return b.d0_minus * b.d1_plus


def block_f(b: SymmetricBlocks) -> complex:
    return b.d0_plus * b.d1_minus


def block_a_prime(b: SymmetricBlocks, beta0: complex) -> complex:
    return SQRT2 * b.k * beta0 * b.d0_plus * b.d1_plus


def block_b_prime(b: SymmetricBlocks, beta0: complex) -> complex:
    return SQRT2 * b.k * beta0 * b.d0_minus * b.d1_minus


def block_c_prime(b: SymmetricBlocks, alpha0: complex) -> complex:
    return 2 * OMEGA**3 * (-SQRT2 * alpha0) * (b.d0_plus**2 - b.d0_minus**2)


def block_e_prime(b: SymmetricBlocks) -> complex:
    return SQRT2 * b.k * b.d0_minus * b.d1_plus


def block_f_prime(b: SymmetricBlocks) -> complex:
    return SQRT2 * b.k * b.d0_plus * b.d1_minus


def symmetric_final_state(coupling: float, delta_max: float, period: float,
                          initial: QubitState) -> QubitState:
    """State at t = T/4 after the ramp delta = 4 dmax t/T started at t = -T/4.

    Note the signs: the C block enters the first amplitude with a minus sign
    and the second amplitude carries no overall sign flip.  This is the
    combination that reproduces direct integration of the Hamiltonian
    [[-delta/2, J], [J, delta/2]].
    """
    b = symmetric_blocks(coupling, delta_max, period)
    a0, b0 = initial.alpha, initial.beta
    alpha = (block_a(b, a0) + block_b(b, a0) - block_c(b, b0)) / (2 * SQRT2 * (block_e(b) + block_f(b)))
    beta = (block_a_prime(b, b0) + block_b_prime(b, b0) + block_c_prime(b, a0)) / (
        block_e_prime(b) + block_f_prime(b))
    return QubitState(alpha, beta)


def lz_defect_density_analytic(coupling: float, delta_max: float, period: float) -> float:
    """Closed-form defect density for the symmetric quench from the upper eigenstate."""
    _, psi, _ = eigenvectors(coupling, -delta_max)
    final = symmetric_final_state(coupling, delta_max, period, QubitState.from_vector(psi))
    _, _, phi = eigenvectors(coupling, delta_max)
    return min(1.0, float(abs(np.vdot(phi, final.vector)) ** 2))


# -- half ramp ----------------------------------------------------------------

LOWER_AT_CROSSING = QubitState(-1 / SQRT2 + 0j, 1 / SQRT2 + 0j)


@dataclass(frozen=True)
class HalfRampBlocks:
    """Coefficients of the half-ramp propagator.

    ``a1``/``a2`` weight the solutions anchored at +z and -z; they follow
    from D_nu(0) = 2^(nu/2) sqrt(pi) / Gamma((1 - nu)/2), which is where the
    Gamma factors come from.
    """

    kappa: float
    z: complex
    q: complex  # beta = q [a1 D0(z) - a2 D0(-z)]
    a1: complex
    a2: complex


def halframp_blocks(p: float, delta_max: float, period: float,
                    initial: QubitState = LOWER_AT_CROSSING) -> HalfRampBlocks:
    _positive(p=p, delta_max=delta_max, period=period)
    kappa = p**2 * period / delta_max
    root_kappa = math.sqrt(kappa)
    ik2 = 0.5j * kappa
    two_pow = mpmath.power(2, ik2)
    g_half = mpmath.gamma(0.5 + ik2)
    g_one = mpmath.gamma(1 + ik2)
    pref = two_pow / (2 * mpmath.sqrt(mpmath.pi))
    # alpha0 / D1(0) and beta0 / (q D0(0)) with 1/q = e^{i pi/4} sqrt(kappa)
    alpha_part = SQRT2 * initial.alpha * g_one
    beta_part = OMEGA * root_kappa * initial.beta * g_half
    a1 = complex(pref * (alpha_part + beta_part))
    a2 = complex(pref * (alpha_part - beta_part))
    z = OMEGA * math.sqrt(period * delta_max)
    return HalfRampBlocks(kappa=kappa, z=z, q=1 / (OMEGA * root_kappa), a1=a1, a2=a2)


def block_a_ramp(b: HalfRampBlocks) -> complex:
    return b.a1 * pcf_d(-1 - 1j * b.kappa, b.z)


def block_b_ramp(b: HalfRampBlocks) -> complex:
    return b.a2 * pcf_d(-1 - 1j * b.kappa, -b.z)


def block_a_ramp_beta(b: HalfRampBlocks) -> complex:
    return b.q * b.a1 * pcf_d(-1j * b.kappa, b.z)


def block_b_ramp_beta(b: HalfRampBlocks) -> complex:
    return -b.q * b.a2 * pcf_d(-1j * b.kappa, -b.z)


def halframp_final_state(p: float, delta_max: float, period: float,
                         initial: QubitState = LOWER_AT_CROSSING) -> QubitState:
    """State at t = T for delta = dmax t/T, coupling p >= 0."""
    if p == 0:
        _positive(delta_max=delta_max, period=period)
        phase = cmath.exp(0.25j * delta_max * period)
        return QubitState(initial.alpha * phase, initial.beta / phase)
    b = halframp_blocks(p, delta_max, period, initial)
    return QubitState(block_a_ramp(b) + block_b_ramp(b), block_a_ramp_beta(b) + block_b_ramp_beta(b))


# -- breakdown predictions -----------------------------------------------------

def lz_probability(gap: float, sweep_velocity: float) -> float:
    """exp(-2 pi xi) with adiabaticity xi = gap^2 / (4 v)."""
    if not sweep_velocity > 0:
        raise DomainError("sweep velocity must be positive")
    if gap < 0:
        raise DomainError("gap must be non-negative")
    if math.isinf(sweep_velocity):
        return 1.0
    return math.exp(-2 * math.pi * gap**2 / (4 * sweep_velocity))


def adiabatic_occupation(eps):
    """eps^2 / (1 + eps^2): lower-level weight of a frozen state at relative detuning eps."""
    eps = np.asarray(eps, dtype=float)
    out = eps**2 / (1 + eps**2)
    return float(out) if out.ndim == 0 else out


def plateau_prediction(x_c: float) -> float:
    """Sudden-limit defect density x_c^2/(1 + x_c^2), x_c = dmax/2J."""
    if not x_c > 0:
        raise DomainError("x_c must be positive")
    if math.isinf(x_c):
        return 1.0
    return adiabatic_occupation(x_c)


def critical_quench_time(coupling: float, delta_max: float, alpha_fit: float = 1.0) -> float:
    """Dimensionless critical quench time tau_Qc/tau_0 = 1/(alpha x_c sqrt(1 + x_c^2))."""
    _positive(coupling=coupling, delta_max=delta_max, alpha_fit=alpha_fit)
    x = delta_max / (2 * coupling)
    return 1.0 / (alpha_fit * x * math.sqrt(1 + x * x))


def freezing_time_kz(v_rate, coupling: float, alpha_fit: float = 1.0):
    """Adiabatic-impulse freezing time t_hat for sweep rate v.

    Solves alpha t_hat = tau(t_hat) with tau = 1/sqrt(4J^2 + v^2 t_hat^2):

        t_hat^2 = -2J^2/v^2 + sqrt(4 J^4 alpha^4 + v^2 alpha^2)/(v^2 alpha^2)
                = 1 / (2 J^2 alpha^2 + sqrt(4 J^4 alpha^4 + v^2 alpha^2))

    The second form is used; it is free of cancellation and shows the
    radicand is never negative.
    """
    _positive(coupling=coupling, alpha_fit=alpha_fit)
    v = np.asarray(v_rate, dtype=float)
    if np.any(~(v > 0)):
        raise DomainError("sweep rate must be positive")
    a2 = alpha_fit**2
    j2 = coupling**2
    t = 1.0 / np.sqrt(2 * j2 * a2 + np.sqrt(4 * j2 * j2 * a2 * a2 + v * v * a2))
    return float(t) if t.ndim == 0 else t


def adiabatic_impulse_density(tau_ratio, alpha_fit: float = 1.0):
    """KZ-branch defect density for a Landau-Zener sweep.

    ``tau_ratio`` is tau_Q/tau_0 = 4 J^2 / v.  In units J = 1 the frozen
    relative detuning is eps_hat = v t_hat / 2J and the defect density is
    eps_hat^2/(1 + eps_hat^2).
    """
    tau_ratio = np.asarray(tau_ratio, dtype=float)
    v = 4.0 / tau_ratio
    eps_hat = v * freezing_time_kz(v, 1.0, alpha_fit) / 2.0
    return adiabatic_occupation(eps_hat)


@dataclass(frozen=True)
class KzTimescales:
    tau0: float
    tau_c: float
    t_hat_c: float
    v_c: float
    t_hat_kz: float
    alpha_fit: float


def kz_timescales(coupling: float, delta_max: float, alpha_fit: float = 1.0,
                  v_rate: float | None = None) -> KzTimescales:
    """Freezing scales of a finite-range LZ quench; t_hat_kz is taken at ``v_rate`` (default v_c)."""
    _positive(coupling=coupling, delta_max=delta_max, alpha_fit=alpha_fit)
    tau0 = 1 / (2 * coupling)
    x = delta_max / (2 * coupling)
    tau_c = tau0 / math.sqrt(1 + x * x)
    t_hat_c = tau_c / alpha_fit
    v_c = alpha_fit * delta_max * math.sqrt(4 * coupling**2 + delta_max**2)
    v = v_c if v_rate is None else v_rate
    return KzTimescales(tau0, tau_c, t_hat_c, v_c, freezing_time_kz(v, coupling, alpha_fit), alpha_fit)
