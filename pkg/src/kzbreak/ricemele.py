"""Rice-Mele quench in the continuum limit v = w.

Near ka = pi the Bloch Hamiltonian reduces to a two-level problem with
coupling p = w (ka - pi).  Each momentum is quenched with the half ramp
delta = dmax t/T starting from the lower eigenstate at the gap closing,
and the upper-band population at t = T is integrated up to the cutoff
momentum p_m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import analytic
from .errors import AccuracyError, DomainError, UnsupportedRegimeError
from .hamiltonian import QuenchProtocol, eigenvectors
from .propagator import DEFAULT_CONFIG, IntegratorConfig, evolve_batch
from .states import QubitState

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

ENGINES = ("numeric", "analytic", "tomographic")
CONVERGENCE_GATE = 1e-3


@dataclass(frozen=True)
class RmParams:
    v_hop: float
    w_hop: float
    lattice_a: float = 1.0
    u: float = 0.0


def bloch_hamiltonian(params: RmParams, k: float) -> np.ndarray:
    """(v + w cos ka) sx + (w sin ka) sy + u sz."""
    ka = k * params.lattice_a
    if not (-1e-12 <= ka <= 2 * math.pi + 1e-12):
        raise DomainError("k must lie in [0, 2 pi / a]")
    return ((params.v_hop + params.w_hop * math.cos(ka)) * SIGMA_X
            + params.w_hop * math.sin(ka) * SIGMA_Y + params.u * SIGMA_Z)


def map_to_experiment(params: RmParams, k: float) -> float:
    """Synthetic momentum p = w (ka - pi); only defined for v = w."""
    if params.v_hop != params.w_hop:
        raise UnsupportedRegimeError("the two-level mapping needs the continuum limit v = w")
    return params.w_hop * (k * params.lattice_a - math.pi)


def experiment_hamiltonian(p: float, delta: float) -> np.ndarray:
    """p sx + delta sz."""
    return p * SIGMA_X + delta * SIGMA_Z


def cutoff_momentum(quench_rate: float, delta_max: float) -> float:
    """p_m = 2 pi sqrt(min(v, v_c)) with v_c = dmax^2."""
    if not (quench_rate > 0 and delta_max > 0):
        raise DomainError("quench rate and delta_max must be positive")
    return 2 * math.pi * math.sqrt(min(quench_rate, delta_max**2))


def collapse_coordinate(p, period: float, delta_max: float):
    """Dimensionless momentum p sqrt(T / dmax)."""
    if not (period > 0 and delta_max > 0):
        raise DomainError("T and delta_max must be positive")
    out = np.asarray(p, dtype=float) * math.sqrt(period / delta_max)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MomentumGrid:
    p_values: np.ndarray = field(repr=False)
    p_max: float

    def __post_init__(self):
        p = np.asarray(self.p_values, dtype=float)
        if p.ndim != 1 or p.size < 16:
            raise DomainError("momentum grid needs at least 16 points")
        if p[0] != 0 or p[-1] != self.p_max or np.any(np.diff(p) <= 0):
            raise DomainError("momentum grid must increase strictly from 0 to p_max")
        object.__setattr__(self, "p_values", p)

    @classmethod
    def uniform(cls, p_max: float, n_points: int = 129) -> MomentumGrid:
        p = np.linspace(0.0, p_max, n_points)
        p[-1] = p_max
        return cls(p, p_max)

    @property
    def n_points(self) -> int:
        return self.p_values.size

    def refined(self) -> MomentumGrid:
        """Grid with every interval halved (contains this grid as its even points)."""
        p = np.empty(2 * self.n_points - 1)
        p[0::2] = self.p_values
        p[1::2] = 0.5 * (self.p_values[:-1] + self.p_values[1:])
        return MomentumGrid(p, self.p_max)


@dataclass(frozen=True)
class SweepResult:
    delta_max: float
    T: float
    tau_Q: float
    n_total: float
    p_values: np.ndarray = field(repr=False)
    n_p: np.ndarray = field(repr=False)
    source: str
    convergence: float | None = None


def _final_upper_population(p_values, delta_max, final):
    _, psi, _ = eigenvectors(p_values, delta_max)
    amp = np.sum(np.conj(psi) * final, axis=0)
    return np.minimum(1.0, np.abs(amp) ** 2)


def final_states(p_values, delta_max: float, period: float, engine: str = "numeric",
                 config: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Final states (2, N) of the half-ramp quench for every momentum."""
    p_values = np.atleast_1d(np.asarray(p_values, dtype=float))
    if np.any(p_values < 0):
        raise DomainError("momenta must be non-negative")
    if engine in ("numeric", "tomographic"):
        protocol = QuenchProtocol.half_ramp(delta_max, period)
        final, _, _ = evolve_batch(p_values, protocol, analytic.LOWER_AT_CROSSING.vector, config)
        return final
    if engine == "analytic":
        return np.array([analytic.halframp_final_state(float(p), delta_max, period).vector
                         for p in p_values]).T
    raise DomainError(f"unknown engine {engine!r}; expected one of {ENGINES}")


def momentum_profile(p_values, delta_max: float, period: float, engine: str = "numeric",
                     config: IntegratorConfig = DEFAULT_CONFIG, shots=None, seed_coords=()):
    """n(p) for every momentum in ``p_values``.

    The tomographic engine reconstructs each final state from simulated
    projective measurements (``shots`` is a tomography.ShotConfig) and
    derives a per-momentum seed from ``seed_coords`` and the momentum index.
    """
    p_values = np.atleast_1d(np.asarray(p_values, dtype=float))
    final = final_states(p_values, delta_max, period, engine, config)
    if engine != "tomographic":
        return _final_upper_population(p_values, delta_max, final)
    from . import tomography

    if shots is None:
        raise DomainError("tomographic engine needs a ShotConfig")
    _, psi, _ = eigenvectors(p_values, delta_max)
    out = np.empty(p_values.size)
    for i in range(p_values.size):
        cfg = tomography.ShotConfig(shots.shots_per_basis,
                                    tomography.derive_seed(shots.rng_seed, *seed_coords, i))
        state = QubitState.from_vector(final[:, i])
        rho = tomography.tomograph(state, cfg).rho
        out[i] = tomography.overlap_defect(rho, QubitState.from_vector(psi[:, i]))
    return out


def momentum_resolved_defect(p: float, delta_max: float, period: float, engine: str = "numeric",
                             config: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Upper-band population at t = T for one momentum."""
    if engine == "tomographic":
        raise DomainError("use momentum_profile for the tomographic engine")
    return float(momentum_profile([p], delta_max, period, engine, config)[0])


def total_defect_density(delta_max: float, period: float, grid: MomentumGrid | None = None,
                         engine: str = "numeric", n_points: int = 129,
                         config: IntegratorConfig = DEFAULT_CONFIG, check_convergence: bool = True,
                         shots=None, seed_coords=()) -> SweepResult:
    """Simpson integral of n(p) over [0, p_m].

    With ``check_convergence`` the profile is evaluated on the grid with
    halved spacing as well; a relative change above 0.1 % raises
    AccuracyError.  The returned total always uses ``grid`` itself.
    """
    if not (delta_max > 0 and period > 0):
        raise DomainError("delta_max and T must be positive")
    p_m = cutoff_momentum(delta_max / period, delta_max)
    if grid is None:
        grid = MomentumGrid.uniform(p_m, n_points)
    elif not math.isclose(grid.p_max, p_m, rel_tol=1e-12):
        raise DomainError(f"grid.p_max = {grid.p_max!r} differs from the cutoff {p_m!r}")

    convergence = None
    if check_convergence:
        fine = grid.refined()
        n_fine = momentum_profile(fine.p_values, delta_max, period, engine, config, shots, seed_coords)
        n_p = n_fine[0::2]
        total = float(simpson(n_p, x=grid.p_values))
        total_fine = float(simpson(n_fine, x=fine.p_values))
        convergence = abs(total_fine - total) / total if total > 0 else abs(total_fine)
        if engine != "tomographic" and convergence >= CONVERGENCE_GATE:
            raise AccuracyError("momentum quadrature not converged", convergence)
    else:
        n_p = momentum_profile(grid.p_values, delta_max, period, engine, config, shots, seed_coords)
        total = float(simpson(n_p, x=grid.p_values))
    return SweepResult(delta_max, period, period / delta_max, total, grid.p_values, n_p, engine, convergence)
