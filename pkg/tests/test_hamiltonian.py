import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kzbreak.errors import DegenerateHamiltonianError, DomainError
from kzbreak.hamiltonian import (QuenchProtocol, TwoLevelHamiltonian, detuning_at, eigensystem,
                                 eigenvectors, hamiltonian_matrix, khz, minimum_gap)
from kzbreak.propagator import IntegratorConfig, evolve_schedule
from kzbreak.states import QubitState

S2 = 1 / math.sqrt(2)
freq = st.floats(1e-3, 1e6)
signed = st.floats(-1e6, 1e6)


def test_khz_is_angular():
    assert khz(5.25) == pytest.approx(32986.7, rel=1e-5)


def test_detuning_examples():
    dm, T = 3.0, 8.0
    assert detuning_at(QuenchProtocol.symmetric(dm, T), T / 4) == pytest.approx(0, abs=1e-15)
    assert detuning_at(QuenchProtocol.symmetric(dm, T), 0) == -dm
    assert detuning_at(QuenchProtocol.symmetric(dm, T), T / 2) == pytest.approx(dm)
    assert detuning_at(QuenchProtocol.half_ramp(dm, T), 0) == 0
    assert detuning_at(QuenchProtocol.half_ramp(dm, T), T) == pytest.approx(dm)
    tri = QuenchProtocol.triangular(dm, T)
    assert detuning_at(tri, 3 * T / 4) == pytest.approx(0, abs=1e-15)
    assert detuning_at(tri, T / 2) == pytest.approx(dm)
    assert detuning_at(tri, T) == pytest.approx(-dm)


def test_triangular_matches_hand_evaluation():
    dm, T = 2.0, 1.0
    tri = QuenchProtocol.triangular(dm, T, n_periods=3)
    t = np.array([0.1, 0.3, 0.6, 0.9, 1.1, 2.45, 2.95])

    def by_hand(x):
        u = x % T
        return -dm + 4 * dm * u / T if u <= T / 2 else 3 * dm - 4 * dm * u / T

    np.testing.assert_allclose(detuning_at(tri, t), [by_hand(x) for x in t], atol=1e-12)


@pytest.mark.parametrize("proto", [QuenchProtocol.symmetric(1.0, 2.0), QuenchProtocol.half_ramp(1.0, 2.0),
                                   QuenchProtocol.triangular(1.0, 2.0, 2)])
def test_out_of_range_time(proto):
    with pytest.raises(DomainError):
        detuning_at(proto, -1e-9)
    with pytest.raises(DomainError):
        detuning_at(proto, proto.duration * (1 + 1e-9))


@given(st.floats(0.1, 1e6), st.floats(1e-6, 1.0), st.integers(1, 4))
def test_triangular_continuous_at_breakpoints(dm, T, n):
    tri = QuenchProtocol.triangular(dm, T, n)
    for b in tri.breakpoints[1:-1]:
        eps = 1e-12 * T
        assert abs(tri.detuning(b - eps) - tri.detuning(b + eps)) <= 1e-9 * dm


def test_invalid_protocol():
    for args in [(0, 1), (1, 0), (-1, 1), (math.inf, 1)]:
        with pytest.raises(DomainError):
            QuenchProtocol.symmetric(*args)
    with pytest.raises(DomainError):
        QuenchProtocol.triangular(1, 1, 0)


def test_eigensystem_at_crossing():
    es = eigensystem(2.0, 0.0)
    assert es.lambda_plus == 2.0 and es.lambda_minus == -2.0
    np.testing.assert_allclose(es.psi_upper.vector, [S2, S2], atol=1e-15)
    np.testing.assert_allclose(es.phi_lower.vector, [-S2, S2], atol=1e-15)


def test_eigensystem_unnormalized_form():
    J, dm = khz(31.75), khz(41)
    es = eigensystem(J, -dm)
    lam = es.lambda_plus
    v = np.array([lam + dm / 2, J])
    np.testing.assert_allclose(es.psi_upper.vector, v / np.linalg.norm(v), rtol=1e-13)


def test_eigenvalue_fig2_point():
    es = eigensystem(khz(31.75), khz(41))
    assert es.lambda_plus == pytest.approx(khz(math.hypot(31.75, 20.5)), rel=1e-14)


@given(freq, signed)
def test_eigensystem_properties(J, delta):
    H = hamiltonian_matrix(J, delta)
    es = eigensystem(J, delta)
    psi, phi = es.psi_upper.vector, es.phi_lower.vector
    assert abs(np.vdot(psi, phi)) < 1e-12
    assert abs(np.linalg.norm(psi) - 1) < 1e-12 and abs(np.linalg.norm(phi) - 1) < 1e-12
    scale = es.lambda_plus
    assert np.max(np.abs(H @ psi - es.lambda_plus * psi)) <= 1e-12 * scale
    assert np.max(np.abs(H @ phi - es.lambda_minus * phi)) <= 1e-12 * scale
    rebuilt = es.lambda_plus * np.outer(psi, psi.conj()) + es.lambda_minus * np.outer(phi, phi.conj())
    assert np.max(np.abs(rebuilt - H)) <= 1e-12 * scale
    assert psi[1].real >= 0 and psi[1].imag == 0 and phi[1].real >= 0


def test_eigensystem_vectorized_matches_scalar():
    J = np.array([1.0, 2.0, 0.5])
    d = np.array([-3.0, 0.0, 7.0])
    lam, psi, phi = eigenvectors(J, d)
    for i in range(3):
        es = eigensystem(J[i], d[i])
        np.testing.assert_allclose(psi[:, i], es.psi_upper.vector)
        np.testing.assert_allclose(phi[:, i], es.phi_lower.vector)


def test_zero_coupling_limits():
    es = eigensystem(0.0, -2.0)
    np.testing.assert_allclose(es.psi_upper.vector, [1, 0])
    np.testing.assert_allclose(es.phi_lower.vector, [0, 1])
    es = eigensystem(0.0, 2.0)
    np.testing.assert_allclose(es.psi_upper.vector, [0, 1])
    np.testing.assert_allclose(np.abs(es.phi_lower.vector), [1, 0])
    with pytest.raises(DegenerateHamiltonianError):
        eigensystem(0.0, 0.0)
    with pytest.raises(DomainError):
        eigensystem(-1.0, 0.0)


def test_hamiltonian_type():
    h = TwoLevelHamiltonian(1.0, 2.0)
    m = h.matrix
    assert np.allclose(m, m.conj().T) and abs(np.trace(m)) == 0
    assert h.eigensystem().lambda_plus == pytest.approx(math.sqrt(2))


def test_minimum_gap():
    assert minimum_gap(khz(31.75)) == pytest.approx(khz(63.5))
    assert minimum_gap(khz(18.11)) == pytest.approx(khz(36.22))
    assert minimum_gap(1) == 2
    with pytest.raises(DomainError):
        minimum_gap(0)


def test_time_shifted_sweep_is_equivalent():
    """[0, T/2] with the symmetric schedule equals the centered ramp on [-T/4, T/4]."""
    J, dm, T = 1.0, 3.0, 5.0
    init = QubitState.from_vector(eigensystem(J, -dm).psi_upper.vector)
    proto = QuenchProtocol.symmetric(dm, T)
    cfg = IntegratorConfig(1e-12, 1e-14)
    a = evolve_schedule(J, proto.detuning, 0.0, T / 2, init, cfg).state
    b = evolve_schedule(J, lambda t: 4 * dm * t / T, -T / 4, T / 4, init, cfg).state
    np.testing.assert_allclose(a.vector, b.vector, atol=1e-9)
