import numpy as np
import pytest
from hypothesis import given, strategies as st

from sepsim import linalg as la
from sepsim.errors import NonUnitary

from conftest import unitaries

PLUS = np.array([1, 1]) / np.sqrt(2)
MINUS = np.array([1, -1]) / np.sqrt(2)


def same_ray(u, v, tol=1e-12):
    return abs(abs(np.vdot(u, v)) - 1) < tol


def test_eig2_identity_is_degenerate_computational():
    p, q = la.eig2(la.I2)
    assert p.value == pytest.approx(1) and q.value == pytest.approx(1)
    np.testing.assert_allclose(p.vector, [1, 0])
    np.testing.assert_allclose(q.vector, [0, 1])


def test_eig2_pauli_x():
    p, q = la.eig2(la.X)
    assert p.value == pytest.approx(1) and q.value == pytest.approx(-1)
    np.testing.assert_allclose(p.vector, PLUS, atol=1e-15)
    np.testing.assert_allclose(q.vector, MINUS, atol=1e-15)


def test_eig2_t_gate():
    p, q = la.eig2(la.T)
    assert p.value == pytest.approx(1)
    assert q.value == pytest.approx(np.exp(1j * np.pi / 4))
    np.testing.assert_allclose(p.vector, [1, 0])
    np.testing.assert_allclose(q.vector, [0, 1])


def test_eig2_rejects_non_unitary():
    with pytest.raises(NonUnitary):
        la.eig2(1.1 * la.X)


def test_eig2_global_phase_identity():
    p, q = la.eig2(1j * la.I2)
    assert p.value == pytest.approx(1j) and q.value == pytest.approx(1j)


def test_eig2_reconstructs_haar_unitaries():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        u = la.haar_unitary(rng)
        pairs = la.eig2(u)
        recon = sum(p.value * np.outer(p.vector, p.vector.conj()) for p in pairs)
        worst = max(worst, la.frobenius_distance(u, recon))
        assert abs(np.vdot(pairs[0].vector, pairs[1].vector)) < 1e-12
    assert worst <= 1e-9


@given(unitaries())
def test_eig2_vectors_are_eigenvectors(u):
    for p in la.eig2(u):
        assert np.linalg.norm(u @ p.vector - p.value * p.vector) <= 1e-9
        assert abs(abs(p.value) - 1) < 1e-12
        # phase convention: largest component real positive
        k = np.argmax(np.abs(p.vector))
        assert abs(p.vector[k].imag) < 1e-12 and p.vector[k].real > 0


@given(unitaries(), st.floats(0, 2 * np.pi))
def test_eig2_near_degenerate_falls_back(v, theta):
    # eigenvalue gap 1e-10 is below the degeneracy tolerance
    u = np.exp(1j * theta) * v @ np.diag([1, np.exp(1e-10j)]) @ v.conj().T
    p, q = la.eig2(u)
    np.testing.assert_allclose(p.vector, [1, 0])
    np.testing.assert_allclose(q.vector, [0, 1])
    assert abs(p.value - np.exp(1j * theta)) < 1e-9


def test_commutator_norm_examples():
    assert la.commutator_norm(la.X, la.Z) == pytest.approx(2 * np.sqrt(2))
    assert la.commutator_norm(la.Z, la.S) == 0.0
    # [H, X] = [Z, X] / sqrt(2) = sqrt(2) i Y, whose Frobenius norm is 2
    assert la.commutator_norm(la.H, la.X) == pytest.approx(2.0)


@given(unitaries(), unitaries())
def test_commutator_norm_symmetric(a, b):
    assert la.commutator_norm(a, b) == pytest.approx(la.commutator_norm(b, a), abs=1e-14)
    assert la.commutator_norm(a, a) == 0.0


def test_proportionality_phase_examples():
    assert la.proportionality_phase(la.X, 1j * la.X) == pytest.approx(1j)
    assert la.proportionality_phase(la.X, la.Z) is None
    assert la.proportionality_phase(la.I2, la.I2) == pytest.approx(1)


def test_proportionality_phase_recovers_random_phase():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        a = la.haar_unitary(rng)
        phi = np.exp(2j * np.pi * rng.random())
        got = la.proportionality_phase(a, phi * a)
        assert got is not None and abs(got - phi) <= 1e-9


def test_is_diagonal_in_examples():
    assert la.is_diagonal_in(la.Z, la.COMPUTATIONAL)
    assert not la.is_diagonal_in(la.X, la.COMPUTATIONAL)
    assert la.is_diagonal_in(la.X, la.HADAMARD)


@given(unitaries())
def test_is_diagonal_in_own_eigenbasis(u):
    assert la.is_diagonal_in(u, la.eigenbasis(u))


def test_qubit_basis_rejects_non_orthonormal():
    with pytest.raises(NonUnitary):
        la.QubitBasis([1, 0], [1, 1] / np.sqrt(2))


@given(unitaries())
def test_basis_label_of_up_to_phase(u):
    b = la.QubitBasis.from_matrix(u)
    assert b.label_of(np.exp(0.7j) * b.v1) == 1
    assert b.label_of(b.v0) == 0
    assert b.label_of((b.v0 + b.v1) / np.sqrt(2)) is None


@given(unitaries())
def test_canonical_basis_keeps_rays(u):
    b = la.QubitBasis.from_matrix(u)
    c = b.canonical()
    assert c.same_as(b)
    assert abs(c.v0[0]) >= abs(c.v1[0]) - 1e-12


def test_plumbing():
    a = np.arange(4).reshape(2, 2) + 1j
    np.testing.assert_allclose(la.dagger(la.dagger(a)), a)
    np.testing.assert_allclose(la.matmul(la.X, la.X, la.Z), la.Z)
    assert la.kron(la.I2, la.X).shape == (4, 4)
    assert la.frobenius_distance(la.X, la.X) == 0.0
    assert la.inner([1, 0], [0, 1]) == 0
    assert la.is_unitary(la.H) and not la.is_unitary(2 * la.H)


@given(st.integers(2, 4), st.integers(0, 2 ** 31))
def test_haar_unitary_is_unitary(dim, seed):
    u = la.haar_unitary(np.random.default_rng(seed), dim)
    assert la.unitarity_defect(u) < 1e-12
