import numpy as np
import pytest

from sepsim import linalg as la
from sepsim.circuit import Circuit, single, two
from sepsim.errors import TooLarge
from sepsim.gates import SWAP
from sepsim.oracle import (Verdict, clusters, exact_normalized_trace, is_fully_product,
                           max_product_defect, product_eigenbasis_verdict,
                           purity_identity_check, report_csv, report_rows,
                           verify_eigenvector)

from conftest import CNOT, CNOT21, CZ


def test_exact_trace_examples():
    assert exact_normalized_trace(Circuit(5)) == pytest.approx(1)
    assert exact_normalized_trace(Circuit(2, [single(0, la.Z)])) == pytest.approx(0)
    t = exact_normalized_trace(Circuit(1, [single(0, la.T)]))
    assert t.real == pytest.approx(0.8535533905932737) and t.imag == pytest.approx(0.35355339059327373)


def test_exact_trace_cap():
    with pytest.raises(TooLarge):
        exact_normalized_trace(Circuit(11))


def test_verify_eigenvector_examples():
    plus = np.array([1, 1]) / np.sqrt(2)
    assert verify_eigenvector(CNOT, np.kron([0, 1], plus)) == pytest.approx(1)
    assert verify_eigenvector(CNOT, np.kron([0, 1], [1, 0])) is None


def test_is_fully_product_examples():
    assert is_fully_product(np.eye(8)[0])
    assert not is_fully_product(np.array([1, 0, 0, 1]) / np.sqrt(2))
    plus, minus = np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)
    assert is_fully_product(np.kron(np.kron(plus, [0, 1]), minus))


def test_purity_examples():
    phi = la.haar_unitary(np.random.default_rng(0), 8)[:, 0]
    assert purity_identity_check(np.eye(8), phi) == pytest.approx((1, 1))
    assert purity_identity_check(la.X, np.array([1, 0])) == pytest.approx((0.5, 0.5))


def test_purity_identity_random():
    rng = np.random.default_rng(1)
    for n in range(1, 5):
        u = la.haar_unitary(rng, 2 ** n)
        phi = la.haar_unitary(rng, 2 ** n)[:, 0]
        a, b = purity_identity_check(u, phi)
        assert abs(a - b) <= 1e-10


def test_verdict_examples():
    assert product_eigenbasis_verdict(CNOT) is Verdict.YES
    assert product_eigenbasis_verdict(SWAP) is Verdict.NO
    assert product_eigenbasis_verdict(CNOT21 @ CNOT) is Verdict.NO
    assert product_eigenbasis_verdict(np.eye(8)) is Verdict.YES
    assert product_eigenbasis_verdict(la.H) is Verdict.YES


def test_verdict_degenerate_two_qubit_clusters():
    # CZ: eigenvalue 1 is threefold, handled by the complement rule
    assert product_eigenbasis_verdict(CZ) is Verdict.YES
    # SWAP conjugated by a product unitary keeps its entangled singlet
    rng = np.random.default_rng(2)
    v = np.kron(la.haar_unitary(rng), la.haar_unitary(rng))
    assert product_eigenbasis_verdict(v @ SWAP @ v.conj().T) is Verdict.NO
    # twofold clusters spanned by Bell vectors that still contain products
    bell = np.array([[1, 0, 0, 1], [1, 0, 0, -1], [0, 1, 1, 0], [0, 1, -1, 0]]).T / np.sqrt(2)
    u = bell @ np.diag([1, 1, -1, -1]) @ bell.conj().T
    assert product_eigenbasis_verdict(u) is Verdict.YES
    # a nondegenerate Bell eigenvector decides No
    u = bell @ np.diag([1, 1, -1, 1j]) @ bell.conj().T
    assert product_eigenbasis_verdict(u) is Verdict.NO


def test_verdict_nondegenerate_entangled_three_qubits():
    rng = np.random.default_rng(3)
    assert product_eigenbasis_verdict(la.haar_unitary(rng, 8)) is Verdict.NO


def test_greedy_finds_product_basis_in_degenerate_cluster():
    # CNOT on (0, 1) of three qubits: eigenvalue 1 has multiplicity six
    u = np.kron(CNOT, np.eye(2))
    rng = np.random.default_rng(4)
    v = np.kron(np.kron(la.haar_unitary(rng), la.haar_unitary(rng)), la.haar_unitary(rng))
    assert product_eigenbasis_verdict(v @ u @ v.conj().T) is Verdict.YES


def test_verdict_unknown_when_search_fails():
    # span{GHZ, W} holds no product vector, so the greedy search cannot finish
    ghz = np.zeros(8)
    ghz[[0, 7]] = 1 / np.sqrt(2)
    w3 = np.zeros(8)
    w3[[1, 2, 4]] = 1 / np.sqrt(3)
    p = np.outer(ghz, ghz) + np.outer(w3, w3)
    u = np.eye(8) - 2 * p
    assert product_eigenbasis_verdict(u) is Verdict.UNKNOWN


def test_clusters_wrap_around():
    vals = np.exp(1j * np.array([np.pi - 1e-10, -np.pi + 1e-10, 0.0]))
    groups = clusters(vals)
    assert sorted(map(sorted, groups)) == [[0, 1], [2]]


def test_report():
    row = report_rows(Circuit(2, [two(0, 1, CNOT)]))
    assert row["verdict"] == "Yes" and row["trace_re"] == pytest.approx(0.5)
    assert max_product_defect(np.eye(4)) == 0.0
    text = report_csv([{"name": "cnot", **row}])
    assert text.splitlines()[0] == "name,trace_re,trace_im,verdict,max_product_defect"
