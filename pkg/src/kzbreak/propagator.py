"""Adaptive integration of the two-level Schrodinger equation.

    i d(alpha)/dt = -delta(t)/2 alpha + J beta
    i d(beta)/dt  =  J alpha + delta(t)/2 beta

The integrator is an embedded 8(5,3) Dormand-Prince scheme (scipy's DOP853)
acting directly on complex amplitudes.  States are never renormalized; the
norm drift is returned with every result.  Because the flow is unitary,
local errors are not amplified, so the sum of per-step tolerances is a
rigorous-in-spirit bound on the global error; it is reported as
``error_bound``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, StiffnessError
from .hamiltonian import QuenchProtocol, eigenvectors
from .states import QubitState

__all__ = [
    "QubitState",
    "IntegratorConfig",
    "Evolution",
    "evolve",
    "evolve_schedule",
    "evolve_batch",
    "defect_density",
    "upper_population",
    "lz_passage_trace",
    "lz_defect_density",
    "single_pass_transition",
]


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float | None = None  # None -> duration / 100
    initial_step: float | None = None

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive, got {v!r}")
        for name in ("max_step", "initial_step"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise DomainError(f"{name} must be positive, got {v!r}")

    def step_limit(self, duration: float) -> float:
        cap = abs(duration) / 100.0
        return cap if self.max_step is None else min(self.max_step, cap)


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class Evolution:
    state: QubitState
    norm_drift: float
    error_bound: float
    n_steps: int


def _check_normalized(vec: np.ndarray, what: str = "initial state") -> None:
    norms = np.sqrt(np.sum(np.abs(vec) ** 2, axis=0))
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise DomainError(f"{what} must be normalized (|norm - 1| <= 1e-9)")


def _integrate(couplings: np.ndarray, detuning: Callable[[float], float], knots: Sequence[float],
               y0: np.ndarray, config: IntegratorConfig):
    """Integrate a batch of independent qubits through every knot.

    ``couplings`` has shape (N,), ``y0`` shape (2, N).  Returns the states at
    each knot, shape (len(knots), 2, N), and the number of accepted steps.
    Integration restarts at each knot so slope kinks of the schedule never
    fall inside a step.
    """
    J = np.asarray(couplings, dtype=float)
    n = J.size

    def rhs(t, y):
        a = y[:n]
        b = y[n:]
        h = 0.5 * detuning(t)
        return np.concatenate((-1j * (J * b - h * a), -1j * (J * a + h * b)))

    y = np.concatenate((y0[0], y0[1])).astype(complex)
    out = [y.copy()]
    steps = 0
    total = abs(knots[-1] - knots[0])
    max_step = config.step_limit(total) if total > 0 else np.inf
    for t0, t1 in zip(knots[:-1], knots[1:]):
        if t1 == t0:
            out.append(y.copy())
            continue
        kwargs = {}
        if config.initial_step is not None:
            kwargs["first_step"] = min(config.initial_step, abs(t1 - t0))
        sol = solve_ivp(rhs, (t0, t1), y, method="DOP853", rtol=config.rel_tol,
                        atol=config.abs_tol, max_step=max_step, **kwargs)
        if sol.status != 0:
            raise StiffnessError(f"integration failed: {sol.message}", float(sol.t[-1]))
        y = sol.y[:, -1]
        steps += sol.t.size - 1
        out.append(y.copy())
    states = np.array(out).reshape(len(knots), 2, n)
    return states, steps


def _result(vec: np.ndarray, steps: int, config: IntegratorConfig) -> Evolution:
    norm = float(np.sqrt(np.sum(np.abs(vec) ** 2)))
    bound = steps * math.sqrt(2.0) * (config.abs_tol + config.rel_tol)
    return Evolution(QubitState.from_vector(vec), abs(norm - 1.0), bound, steps)


def evolve_schedule(coupling: float, detuning: Callable[[float], float], t_start: float, t_end: float,
                    initial: QubitState, config: IntegratorConfig = DEFAULT_CONFIG,
                    breakpoints: Sequence[float] = ()) -> Evolution:
    """Evolve under an arbitrary detuning callable from ``t_start`` to ``t_end``.

    ``t_end < t_start`` integrates backwards in time (applies U^dagger).
    """
    y0 = initial.vector.reshape(2, 1)
    _check_normalized(y0)
    lo, hi = sorted((t_start, t_end))
    inner = [b for b in breakpoints if lo < b < hi]
    knots = [t_start, *sorted(inner, reverse=bool(t_end < t_start)), t_end]
    states, steps = _integrate(np.array([coupling], dtype=float), detuning, knots, y0, config)
    return _result(states[-1, :, 0], steps, config)


def evolve(coupling: float, protocol: QuenchProtocol, initial: QubitState,
           config: IntegratorConfig = DEFAULT_CONFIG) -> Evolution:
    """Evolve ``initial`` over the whole protocol and return the final state."""
    return evolve_schedule(coupling, protocol.detuning, 0.0, protocol.duration, initial, config,
                           breakpoints=protocol.breakpoints)


def evolve_batch(couplings, protocol: QuenchProtocol, initial, config: IntegratorConfig = DEFAULT_CONFIG):
    """Evolve one qubit per coupling value simultaneously.

    ``initial`` is a length-2 vector shared by all members or a (2, N) array.
    Returns ``(final, norm_drift, error_bound)`` with ``final`` of shape (2, N).
    Step control acts on the whole batch, so every member is at least as
    accurate as it would be alone.
    """
    J = np.atleast_1d(np.asarray(couplings, dtype=float))
    y0 = np.asarray(initial, dtype=complex)
    if y0.ndim == 1:
        y0 = np.repeat(y0.reshape(2, 1), J.size, axis=1)
    _check_normalized(y0)
    knots = list(protocol.breakpoints)
    states, steps = _integrate(J, protocol.detuning, knots, y0, config)
    final = states[-1]
    drift = float(np.max(np.abs(np.sqrt(np.sum(np.abs(final) ** 2, axis=0)) - 1.0)))
    bound = steps * math.sqrt(2.0 * J.size) * (config.abs_tol + config.rel_tol)
    return final, drift, bound


def _overlap_sq(vec, target) -> float:
    return min(1.0, float(abs(np.vdot(target, vec)) ** 2))


def defect_density(final: QubitState, coupling: float, delta_final: float) -> float:
    """Population in the lower instantaneous eigenstate, |<Phi(t_f)|chi(t_f)>|^2."""
    _, _, phi = eigenvectors(coupling, delta_final)
    return _overlap_sq(final.vector, phi)


def upper_population(final: QubitState, coupling: float, delta_final: float) -> float:
    """Population in the upper instantaneous eigenstate, |<Psi(t_f)|chi(t_f)>|^2."""
    _, psi, _ = eigenvectors(coupling, delta_final)
    return _overlap_sq(final.vector, psi)


def lz_defect_density(coupling: float, delta_max: float, period: float,
                      config: IntegratorConfig = DEFAULT_CONFIG) -> tuple[float, Evolution]:
    """Symmetric quench from the upper eigenstate at -delta_max; n at t = T/2."""
    protocol = QuenchProtocol.symmetric(delta_max, period)
    _, psi, _ = eigenvectors(coupling, -delta_max)
    ev = evolve(coupling, protocol, QubitState.from_vector(psi), config)
    return defect_density(ev.state, coupling, delta_max), ev


def single_pass_transition(coupling: float, delta_max: float, period: float,
                           config: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Probability of a non-adiabatic transition in one sweep -dmax -> +dmax.

    Measured in the instantaneous eigenbasis: the system starts in the upper
    eigenstate and the result is the final lower-eigenstate population.  For
    dmax >> J this is the quantity the Landau-Zener formula predicts.
    """
    return lz_defect_density(coupling, delta_max, period, config)[0]


def lz_passage_trace(coupling: float, protocol: QuenchProtocol, initial: QubitState,
                     config: IntegratorConfig = DEFAULT_CONFIG, sample_times=None):
    """Population of the first basis state at each sample time.

    The first basis state is the upper diabatic level at t = 0 (where
    delta = -delta_max).  Returns ``(times, states, p_upper)`` with ``states``
    of shape (len(times), 2).
    """
    if sample_times is None:
        sample_times = np.linspace(0.0, protocol.duration, 401)
    times = np.asarray(sample_times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise DomainError("sample_times must be a non-empty 1-D sequence")
    if np.any(np.diff(times) < 0):
        raise DomainError("sample_times must be sorted")
    if times[0] < 0 or times[-1] > protocol.duration:
        raise DomainError("sample_times outside the protocol duration")
    y0 = initial.vector.reshape(2, 1)
    _check_normalized(y0)
    knots = np.union1d(np.concatenate(([0.0], times)), protocol.breakpoints)
    knots = knots[knots <= times[-1]]
    states, _ = _integrate(np.array([coupling]), protocol.detuning, list(knots), y0, config)
    idx = np.searchsorted(knots, times)
    picked = states[idx, :, 0]
    return times, picked, np.abs(picked[:, 0]) ** 2
