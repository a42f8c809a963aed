"""Small dense complex linear algebra on qubit-sized objects.

Matrices are plain ``numpy`` complex arrays of shape (2, 2) or (4, 4); vectors
have shape (2,) or (4,).  Tensor slot 0 is the most significant index, so
``kron(a, b)[2*i + k, 2*j + l] == a[i, j] * b[k, l]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import NonUnitary

TOL_UNITARY = 1e-9
TOL_EIG = 1e-9
TOL_COMMUTE = 1e-8
TOL_PROP = 1e-8
TOL_DEGENERATE = 1e-8
# modulus ties when ordering / phase-fixing eigenvectors
_TIE = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
T = np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex)
PAULIS = (X, Y, Z)


def as_matrix(m, dim: Optional[int] = None) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise ValueError(f"expected a {dim}x{dim} matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def matmul(*ms: np.ndarray) -> np.ndarray:
    """Product ``ms[0] @ ms[1] @ ...`` (rightmost acts first)."""
    out = ms[0]
    for m in ms[1:]:
        out = out @ m
    return out


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def inner(u: np.ndarray, v: np.ndarray) -> complex:
    """<u|v>, antilinear in the first argument."""
    return complex(np.vdot(u, v))


def norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def unitarity_defect(m: np.ndarray) -> float:
    m = np.asarray(m)
    return frobenius_distance(dagger(m) @ m, np.eye(m.shape[0]))


def is_unitary(m: np.ndarray, tol: float = TOL_UNITARY) -> bool:
    return unitarity_defect(m) <= tol


def require_unitary(m: np.ndarray, tol: float = TOL_UNITARY, gate_index=None) -> np.ndarray:
    if not is_unitary(m, tol):
        raise NonUnitary(f"unitarity defect {unitarity_defect(m):.3e} > {tol:g}", gate_index)
    return m


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Scale ``v`` so that its largest-modulus component is real positive.

    Among components of equal modulus (to ~1e-12) the first one wins.
    """
    v = np.asarray(v, dtype=complex)
    mods = np.abs(v)
    k = int(np.flatnonzero(mods >= mods.max() - _TIE)[0])
    if mods[k] == 0:
        return v
    return v * (np.conj(v[k]) / mods[k])


def perp(v: np.ndarray) -> np.ndarray:
    """The orthogonal complement of a unit 2-vector (up to phase)."""
    return np.array([-np.conj(v[1]), np.conj(v[0])], dtype=complex)


def _basis_order_key(v: np.ndarray):
    # |<0|v>| descending, then larger Re(v[1]) first (so |+> precedes |->)
    return (-round(abs(v[0]), 12), -round(float(np.real(v[1])), 12))


@dataclass(frozen=True, eq=False)
class QubitBasis:
    """An orthonormal pair of single-qubit states ``{v0, v1}``."""

    v0: np.ndarray
    v1: np.ndarray

    def __post_init__(self):
        v0 = np.asarray(self.v0, dtype=complex).reshape(2)
        v1 = np.asarray(self.v1, dtype=complex).reshape(2)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "v1", v1)
        gram = np.array([[np.vdot(v0, v0), np.vdot(v0, v1)], [np.vdot(v1, v0), np.vdot(v1, v1)]])
        if frobenius_distance(gram, I2) > 2 * TOL_UNITARY:
            raise NonUnitary("basis vectors are not orthonormal")

    @property
    def matrix(self) -> np.ndarray:
        """Unitary whose columns are ``v0`` and ``v1``."""
        return np.column_stack([self.v0, self.v1])

    def vector(self, label: int) -> np.ndarray:
        return self.v1 if label else self.v0

    def projector(self, label: int) -> np.ndarray:
        v = self.vector(label)
        return np.outer(v, np.conj(v))

    def diag(self, d0: complex, d1: complex) -> np.ndarray:
        """The operator ``d0|v0><v0| + d1|v1><v1|``."""
        return d0 * self.projector(0) + d1 * self.projector(1)

    def diagonal_of(self, m: np.ndarray) -> np.ndarray:
        """The two diagonal entries of ``m`` written in this basis."""
        return np.array([np.vdot(self.v0, m @ self.v0), np.vdot(self.v1, m @ self.v1)])

    def label_of(self, s: np.ndarray, tol: float = TOL_EIG) -> Optional[int]:
        """Which basis vector ``s`` equals up to global phase, if any."""
        s = np.asarray(s, dtype=complex)
        nrm = np.linalg.norm(s)
        for label in (0, 1):
            if abs(abs(np.vdot(self.vector(label), s)) - nrm) <= tol * max(1.0, nrm):
                return label
        return None

    def canonical(self) -> "QubitBasis":
        """Same basis, ordered and phase-fixed deterministically."""
        a, b = canonical_phase(self.v0), canonical_phase(self.v1)
        if _basis_order_key(b) < _basis_order_key(a):
            a, b = b, a
        return QubitBasis(a, b)

    def same_as(self, other: "QubitBasis", tol: float = TOL_EIG) -> bool:
        """True if both bases contain the same two rays (in any order)."""
        return other.label_of(self.v0, tol) is not None and other.label_of(self.v1, tol) is not None

    def __repr__(self):
        return f"QubitBasis(v0={np.round(self.v0, 6)}, v1={np.round(self.v1, 6)})"

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "QubitBasis":
        m = np.asarray(m, dtype=complex)
        return cls(m[:, 0], m[:, 1])


COMPUTATIONAL = QubitBasis(np.array([1, 0]), np.array([0, 1]))
HADAMARD = QubitBasis(np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2))


class EigenPair2(NamedTuple):
    value: complex
    vector: np.ndarray


def eig2(u: np.ndarray, tol_degenerate: float = TOL_DEGENERATE) -> tuple[EigenPair2, EigenPair2]:
    """Closed-form eigendecomposition of a 2x2 unitary.

    The eigenvalues solve the characteristic quadratic.  When they coincide to
    within ``tol_degenerate`` the matrix is a multiple of the identity and the
    computational basis is returned.  Vectors are phase-canonical and ordered by
    decreasing ``|<0|v>|``.
    """
    u = as_matrix(u, 2)
    require_unitary(u)
    a, b, c, d = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    half_tr = (a + d) / 2
    root = np.sqrt(((a - d) / 2) ** 2 + b * c)
    lam1, lam2 = half_tr + root, half_tr - root
    if abs(lam1 - lam2) <= tol_degenerate:
        lam = half_tr / abs(half_tr)
        return (EigenPair2(complex(lam), COMPUTATIONAL.v0.copy()),
                EigenPair2(complex(lam), COMPUTATIONAL.v1.copy()))
    # two candidate null vectors of (u - lam1 I); keep the better conditioned one
    c1 = np.array([b, lam1 - a])
    c2 = np.array([lam1 - d, c])
    v = c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2
    v = v / np.linalg.norm(v)
    w = perp(v)
    pairs = []
    for vec in (v, w):
        vec = canonical_phase(vec)
        lam = np.vdot(vec, u @ vec)
        pairs.append(EigenPair2(complex(lam / abs(lam)), vec))
    pairs.sort(key=lambda p: (_basis_order_key(p.vector), np.angle(p.value) % (2 * np.pi)))
    return pairs[0], pairs[1]


def eigenbasis(u: np.ndarray) -> QubitBasis:
    p, q = eig2(u)
    return QubitBasis(p.vector, q.vector)


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of ``ab - ba``."""
    return float(np.linalg.norm(a @ b - b @ a))


def commutes(a: np.ndarray, b: np.ndarray, tol: float = TOL_COMMUTE) -> bool:
    return commutator_norm(a, b) <= tol


def proportionality_phase(a: np.ndarray, b: np.ndarray, tol: float = TOL_PROP) -> Optional[complex]:
    """Unit-modulus ``phi`` with ``b == phi * a`` (to ``tol``), else None."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    k = np.unravel_index(int(np.argmax(np.abs(a))), a.shape)
    if abs(a[k]) == 0:
        return None
    phi = b[k] / a[k]
    if phi == 0:
        return None
    phi = phi / abs(phi)
    if frobenius_distance(b, phi * a) <= tol:
        return complex(phi)
    return None


def is_diagonal_in(m: np.ndarray, basis: QubitBasis, tol: float = TOL_COMMUTE) -> bool:
    """Whether ``m`` has no off-diagonal weight when written in ``basis``."""
    v = basis.matrix
    r = dagger(v) @ m @ v
    return abs(r[0, 1]) <= tol and abs(r[1, 0]) <= tol


def is_scalar(m: np.ndarray, tol: float = TOL_PROP) -> bool:
    return proportionality_phase(np.eye(m.shape[0]), m, tol) is not None


def haar_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_basis(rng: np.random.Generator) -> QubitBasis:
    return QubitBasis.from_matrix(haar_unitary(rng, 2))


def random_phases(rng: np.random.Generator, k: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(k))
