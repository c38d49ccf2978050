"""Pure qubit states."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QubitState:
    """Amplitudes (alpha, beta) on the two basis states.

    Normalization is not enforced on construction: propagated states keep
    whatever norm drift the integrator produced so it can be inspected.
    """

    alpha: complex
    beta: complex

    @classmethod
    def from_vector(cls, vec) -> QubitState:
        vec = np.asarray(vec, dtype=complex).reshape(2)
        return cls(complex(vec[0]), complex(vec[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    @property
    def norm(self) -> float:
        return float(np.hypot(abs(self.alpha), abs(self.beta)))

    def normalized(self) -> QubitState:
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return QubitState(self.alpha / n, self.beta / n)

    def overlap(self, other: QubitState) -> complex:
        """<self|other>."""
        return complex(np.conj(self.alpha) * other.alpha + np.conj(self.beta) * other.beta)

    def populations(self) -> tuple[float, float]:
        return abs(self.alpha) ** 2, abs(self.beta) ** 2

    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())


def basis_state(index: int) -> QubitState:
    return QubitState(1.0 + 0j, 0j) if index == 0 else QubitState(0j, 1.0 + 0j)
