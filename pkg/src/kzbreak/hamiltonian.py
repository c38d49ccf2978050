"""Driven two-level Hamiltonian, its eigensystem, and the detuning schedules.

Frequencies are angular (rad/s) and hbar = 1.  The Hamiltonian is

    H = [[-delta/2, J], [J, delta/2]]

with coupling ``J`` (or the synthetic momentum ``p`` in the lattice model).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateHamiltonianError, DomainError
from .states import QubitState

TWO_PI = 2.0 * math.pi


def khz(f_khz: float) -> float:
    """Angular frequency of a cyclic frequency given in kHz, i.e. 2*pi*f*1e3."""
    return TWO_PI * f_khz * 1e3


def to_khz(omega: float) -> float:
    return omega / (TWO_PI * 1e3)


class ProtocolKind(str, Enum):
    SYMMETRIC = "symmetric"
    HALF_RAMP = "halframp"
    TRIANGULAR = "triangular"


@dataclass(frozen=True)
class QuenchProtocol:
    """A linear detuning schedule.

    symmetric:  delta(t) = -dmax + 4 dmax t / T on [0, T/2]
    halframp:   delta(t) = dmax t / T on [0, T]
    triangular: periodic zig-zag between -dmax and +dmax with period T,
                repeated ``n_periods`` times.
    """

    kind: ProtocolKind
    delta_max: float
    period: float
    n_periods: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ProtocolKind(self.kind))
        if not (math.isfinite(self.delta_max) and self.delta_max > 0):
            raise DomainError(f"delta_max must be positive and finite, got {self.delta_max!r}")
        if not (math.isfinite(self.period) and self.period > 0):
            raise DomainError(f"period must be positive and finite, got {self.period!r}")
        if int(self.n_periods) != self.n_periods or self.n_periods < 1:
            raise DomainError(f"n_periods must be a positive integer, got {self.n_periods!r}")

    @classmethod
    def symmetric(cls, delta_max: float, period: float) -> QuenchProtocol:
        return cls(ProtocolKind.SYMMETRIC, delta_max, period)

    @classmethod
    def half_ramp(cls, delta_max: float, period: float) -> QuenchProtocol:
        return cls(ProtocolKind.HALF_RAMP, delta_max, period)

    @classmethod
    def triangular(cls, delta_max: float, period: float, n_periods: int = 1) -> QuenchProtocol:
        return cls(ProtocolKind.TRIANGULAR, delta_max, period, n_periods)

    @property
    def duration(self) -> float:
        if self.kind is ProtocolKind.SYMMETRIC:
            return self.period / 2
        if self.kind is ProtocolKind.HALF_RAMP:
            return self.period
        return self.n_periods * self.period

    @property
    def sweep_rate(self) -> float:
        """|d delta / dt| on every linear segment."""
        if self.kind is ProtocolKind.HALF_RAMP:
            return self.delta_max / self.period
        return 4.0 * self.delta_max / self.period

    @property
    def breakpoints(self) -> np.ndarray:
        """Times where the schedule changes slope (including both ends)."""
        if self.kind is not ProtocolKind.TRIANGULAR:
            return np.array([0.0, self.duration])
        return np.arange(2 * self.n_periods + 1) * (self.period / 2)

    def detuning(self, t):
        """Vectorized schedule without range checks (used inside integrators)."""
        dm, T = self.delta_max, self.period
        if self.kind is ProtocolKind.SYMMETRIC:
            return -dm + 4.0 * dm * t / T
        if self.kind is ProtocolKind.HALF_RAMP:
            return dm * t / T
        t = np.asarray(t, dtype=float)
        n = np.minimum(np.floor(t / T), self.n_periods - 1)
        u = t - n * T
        rising = -dm + 4.0 * dm * u / T
        falling = dm - 4.0 * dm * (u - T / 2) / T
        out = np.where(u <= T / 2, rising, falling)
        return float(out) if out.ndim == 0 else out


def detuning_at(protocol: QuenchProtocol, t):
    """delta(t) for ``protocol``; raises DomainError outside [0, duration]."""
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > protocol.duration):
        raise DomainError(f"t outside [0, {protocol.duration!r}] for {protocol.kind.value} protocol")
    return protocol.detuning(t)


def hamiltonian_matrix(coupling: float, detuning: float) -> np.ndarray:
    return np.array([[-detuning / 2, coupling], [coupling, detuning / 2]], dtype=complex)


@dataclass(frozen=True)
class TwoLevelHamiltonian:
    coupling: float
    detuning: float

    @property
    def matrix(self) -> np.ndarray:
        return hamiltonian_matrix(self.coupling, self.detuning)

    def eigensystem(self) -> EigenSystem:
        return eigensystem(self.coupling, self.detuning)


@dataclass(frozen=True)
class EigenSystem:
    lambda_plus: float
    lambda_minus: float
    psi_upper: QubitState
    phi_lower: QubitState


def eigenvectors(coupling, detuning):
    """Vectorized eigen-decomposition.

    Returns ``(lam, psi, phi)`` where ``lam = sqrt(J^2 + (delta/2)^2)`` and
    ``psi``/``phi`` have shape ``(2, ...)``: the upper and lower normalized
    eigenvectors with the coupling component real and non-negative.  The
    cancellation-prone component is rewritten as J^2/(lam +- delta/2), which
    keeps J -> 0 well defined for delta != 0.
    """
    J = np.asarray(coupling, dtype=float)
    h = np.asarray(detuning, dtype=float) / 2.0
    if np.any(J < 0):
        raise DomainError("coupling must be non-negative")
    lam = np.hypot(J, h)
    if np.any(lam == 0):
        raise DegenerateHamiltonianError("J = 0 and delta = 0: eigenvectors undefined")
    with np.errstate(divide="ignore", invalid="ignore"):
        # psi ~ (lam - h, J); phi ~ (-(lam + h), J)
        psi_a = np.where(h > 0, J / (lam + np.abs(h)), (lam - h) / np.where(J > 0, J, 1.0))
        psi_b = np.ones_like(lam)
        psi_flip = (h <= 0) & (J == 0)
        psi_a = np.where(psi_flip, 1.0, psi_a)
        psi_b = np.where(psi_flip, 0.0, psi_b)

        phi_a = np.where(h < 0, -J / (lam + np.abs(h)), -(lam + h) / np.where(J > 0, J, 1.0))
        phi_b = np.ones_like(lam)
        phi_flip = (h >= 0) & (J == 0)
        phi_a = np.where(phi_flip, -1.0, phi_a)
        phi_b = np.where(phi_flip, 0.0, phi_b)
    psi = np.stack([psi_a, psi_b]) / np.hypot(psi_a, psi_b)
    phi = np.stack([phi_a, phi_b]) / np.hypot(phi_a, phi_b)
    return lam, psi.astype(complex), phi.astype(complex)


def eigensystem(coupling: float, detuning: float) -> EigenSystem:
    lam, psi, phi = eigenvectors(coupling, detuning)
    lam = float(lam)
    return EigenSystem(lam, -lam, QubitState.from_vector(psi), QubitState.from_vector(phi))


def minimum_gap(coupling: float) -> float:
    """Gap at the avoided crossing (delta = 0), i.e. 2J."""
    if coupling <= 0:
        raise DomainError("coupling must be positive")
    return 2.0 * coupling
