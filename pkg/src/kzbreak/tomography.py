"""Simulated single-qubit state tomography.

Each of the six projectors (|0>, |1>, |+>, |->, |+i>, |-i>) is measured in
its own run of ``shots_per_basis`` shots, as when |0> is read out after a
pi pulse, so paired probabilities need not sum to one.  Randomness comes
from Philox streams keyed by (seed, basis, projector).
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .states import QubitState

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

_S = 1 / np.sqrt(2)
PROJECTORS = {
    "Z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    "X": (np.array([_S, _S], dtype=complex), np.array([_S, -_S], dtype=complex)),
    "Y": (np.array([_S, 1j * _S], dtype=complex), np.array([_S, -1j * _S], dtype=complex)),
}
_BASIS_INDEX = {"Z": 0, "X": 1, "Y": 2}


@dataclass(frozen=True)
class ShotConfig:
    """``shots_per_basis = 0`` selects exact (infinite-shot) probabilities."""

    shots_per_basis: int = 10_000
    rng_seed: int = 0

    def __post_init__(self):
        if int(self.shots_per_basis) != self.shots_per_basis or self.shots_per_basis < 0:
            raise DomainError("shots_per_basis must be a non-negative integer")
        if not 0 <= int(self.rng_seed) < 2**64:
            raise DomainError("rng_seed must fit in 64 bits")

    @property
    def exact(self) -> bool:
        return self.shots_per_basis == 0


def derive_seed(base_seed: int, *coords) -> int:
    """Deterministic 64-bit seed for a sweep coordinate tuple."""
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<Q", int(base_seed) % 2**64))
    for c in coords:
        if isinstance(c, float):
            h.update(b"f" + c.hex().encode())
        else:
            h.update(b"s" + repr(c).encode())
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class StokesVector:
    S0: float
    S1: float
    S2: float
    S3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.S0, self.S1, self.S2, self.S3])

    @property
    def bloch_length(self) -> float:
        return float(np.sqrt(self.S1**2 + self.S2**2 + self.S3**2))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise DomainError("density matrix must be 2x2")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_state(cls, state: QubitState) -> DensityMatrix:
        return cls(state.projector())

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def is_physical(self, tol: float = 1e-12) -> bool:
        return (self.hermiticity_error() <= tol and abs(self.trace - 1) <= tol
                and self.eigenvalues.min() >= -tol)

    def to_json(self) -> dict:
        return {"re": self.matrix.real.tolist(), "im": self.matrix.imag.tolist()}


def _stream(seed: int, basis: str, which: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) % 2**64, _BASIS_INDEX[basis], which])
    return np.random.Generator(np.random.Philox(ss))


def simulate_measurement(state: QubitState, basis: str, cfg: ShotConfig) -> tuple[float, float]:
    """Empirical probabilities of the two projectors of ``basis`` (Z, X or Y)."""
    if basis not in PROJECTORS:
        raise DomainError(f"basis must be one of Z, X, Y; got {basis!r}")
    if abs(state.norm - 1) > 1e-9:
        raise DomainError("state must be normalized")
    vec = state.vector
    out = []
    for which, proj in enumerate(PROJECTORS[basis]):
        p = min(1.0, max(0.0, abs(np.vdot(proj, vec)) ** 2))
        if cfg.exact:
            out.append(p)
        else:
            k = _stream(cfg.rng_seed, basis, which).binomial(cfg.shots_per_basis, p)
            out.append(k / cfg.shots_per_basis)
    return out[0], out[1]


def stokes_from_populations(p_z0: float, p_z1: float, p_xp: float, p_xm: float,
                            p_yp: float, p_ym: float) -> StokesVector:
    return StokesVector(p_z0 + p_z1, p_xp - p_xm, p_yp - p_ym, p_z0 - p_z1)


def density_from_stokes(s: StokesVector) -> DensityMatrix:
    """rho = 1/2 sum_i S_i sigma_i (Hermitian, trace S0, possibly not PSD)."""
    return DensityMatrix(0.5 * sum(si * sig for si, sig in zip(s.as_array(), PAULI)))


def stokes_from_density(rho: DensityMatrix) -> StokesVector:
    return StokesVector(*(float(np.real(np.trace(rho.matrix @ sig))) for sig in PAULI))


def project_physical(rho: DensityMatrix) -> DensityMatrix:
    """Clip negative eigenvalues to zero and renormalize the trace."""
    m = rho.matrix
    if np.max(np.abs(m - m.conj().T)) > 1e-9 * max(1.0, np.max(np.abs(m))):
        raise DomainError("input must be Hermitian")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if np.all(w >= 0) and np.isclose(w.sum(), 1.0, rtol=0, atol=1e-15):
        return DensityMatrix(m)
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if total <= 0:
        raise DomainError("matrix has no positive spectral weight")
    out = (v * (w / total)) @ v.conj().T
    return DensityMatrix(0.5 * (out + out.conj().T))


@dataclass(frozen=True)
class TomographyResult:
    stokes: StokesVector
    rho_raw: DensityMatrix
    rho: DensityMatrix
    shots: int
    seed: int

    def to_json(self) -> dict:
        return {
            "rho": self.rho.to_json(),
            "rho_raw": self.rho_raw.to_json(),
            "stokes": self.stokes.as_array().tolist(),
            "shots": self.shots,
            "seed": self.seed,
        }


def tomograph(state: QubitState, cfg: ShotConfig) -> TomographyResult:
    """Measure all three bases, reconstruct and project onto physical states."""
    pz = simulate_measurement(state, "Z", cfg)
    px = simulate_measurement(state, "X", cfg)
    py = simulate_measurement(state, "Y", cfg)
    s = stokes_from_populations(*pz, *px, *py)
    raw = density_from_stokes(s)
    return TomographyResult(s, raw, project_physical(raw), cfg.shots_per_basis, cfg.rng_seed)


def overlap_defect(rho: DensityMatrix, target: QubitState) -> float:
    """Tr(rho |t><t|) clipped to [0, 1]."""
    v = target.vector
    val = float(np.real(np.vdot(v, rho.matrix @ v)))
    return min(1.0, max(0.0, val))
