"""Basis-controlled two-qubit gates and their recognition.

A basis-controlled gate acts as ``|a><a| (x) B + |a'><a'| (x) C`` where
``{a, a'}`` is an orthonormal basis of the control qubit.  A two-qubit unitary
has a product eigenbasis exactly when it can be written this way, controlled on
one of its two qubits.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import linalg as la
from .errors import ControlNotInBasis, NonUnitary
from .linalg import QubitBasis

# reconstruction tolerance for recognised forms
TOL_DECOMPOSE = 1e-8
# smallest singular value of the commutant system treated as zero
_TOL_NULL = 1e-7

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


class Slot(enum.IntEnum):
    FIRST = 0
    SECOND = 1


class GateKind(enum.Enum):
    ORDINARY = "ordinary"
    PHASE = "phase"
    PRODUCT = "product"


def branch_kind(b: np.ndarray, c: np.ndarray) -> GateKind:
    if la.proportionality_phase(b, c) is not None:
        return GateKind.PRODUCT
    if la.commutes(b, c):
        return GateKind.PHASE
    return GateKind.ORDINARY


@dataclass(frozen=True, eq=False)
class BasisControlledGate:
    """``branch0`` acts on the target when the control is ``control_basis.v0``,
    ``branch1`` when it is ``control_basis.v1``."""

    control_slot: Slot
    control_basis: QubitBasis
    branch0: np.ndarray
    branch1: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "control_slot", Slot(self.control_slot))
        for name in ("branch0", "branch1"):
            m = la.as_matrix(getattr(self, name), 2)
            la.require_unitary(m)
            object.__setattr__(self, name, m)

    @property
    def kind(self) -> GateKind:
        return branch_kind(self.branch0, self.branch1)

    def branch(self, label: int) -> np.ndarray:
        return self.branch1 if label else self.branch0

    @property
    def target_slot(self) -> Slot:
        return Slot(1 - self.control_slot)

    def __repr__(self):
        return (f"BasisControlledGate({self.control_slot.name}, {self.control_basis!r}, "
                f"B={np.round(self.branch0, 6).tolist()}, C={np.round(self.branch1, 6).tolist()})")


def to_matrix(g: BasisControlledGate) -> np.ndarray:
    p0, p1 = g.control_basis.projector(0), g.control_basis.projector(1)
    if g.control_slot == Slot.FIRST:
        return np.kron(p0, g.branch0) + np.kron(p1, g.branch1)
    return np.kron(g.branch0, p0) + np.kron(g.branch1, p1)


def controlled(basis: QubitBasis, b, c, slot: Slot = Slot.FIRST) -> BasisControlledGate:
    return BasisControlledGate(slot, basis, b, c)


def _to_first(m: np.ndarray, slot: Slot) -> np.ndarray:
    return m if slot == Slot.FIRST else SWAP @ m @ SWAP


def branches_in(m: np.ndarray, slot: Slot, basis: QubitBasis,
                tol: float = TOL_DECOMPOSE) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Branches of ``m`` controlled on ``slot`` in ``basis``, if it has that form."""
    w = np.kron(basis.matrix, la.I2)
    r = la.dagger(w) @ _to_first(m, slot) @ w
    if np.linalg.norm(r[:2, 2:]) > tol or np.linalg.norm(r[2:, :2]) > tol:
        return None
    return r[:2, :2].copy(), r[2:, 2:].copy()


def control_basis_candidates(m: np.ndarray, slot: Slot) -> Optional[QubitBasis]:
    """A basis on ``slot`` in which ``m`` is block diagonal, found from the
    commutant of ``m`` among operators ``h (x) I``; None if only scalars commute.

    When every such ``h`` commutes (``m`` acts trivially on the slot) the
    computational basis is returned.
    """
    mf = _to_first(m, Slot(slot))
    cols = []
    for p in la.PAULIS:
        k = np.kron(p, la.I2)
        cols.append((mf @ k - k @ mf).reshape(-1))
    a = np.column_stack(cols)
    real = np.vstack([a.real, a.imag])
    _, s, vh = np.linalg.svd(real)
    null = int(np.sum(s <= _TOL_NULL))
    if null == 0:
        return None
    if null >= 2:
        return la.COMPUTATIONAL
    c = vh[-1]
    c = c / np.linalg.norm(c)
    h = c[0] * la.X + c[1] * la.Y + c[2] * la.Z
    # h is Hermitian with h @ h = I, so it is also unitary
    return la.eigenbasis(h).canonical()


def controlled_form(m: np.ndarray, slot: Slot, basis: Optional[QubitBasis] = None,
                    tol: float = TOL_DECOMPOSE) -> Optional[BasisControlledGate]:
    """Write ``m`` as a gate controlled on ``slot``; in ``basis`` if given."""
    slot = Slot(slot)
    if basis is None:
        basis = control_basis_candidates(m, slot)
        if basis is None:
            return None
    br = branches_in(m, slot, basis, tol)
    if br is None:
        return None
    try:
        g = BasisControlledGate(slot, basis, br[0], br[1])
    except NonUnitary:
        return None
    if la.frobenius_distance(to_matrix(g), m) > tol:
        return None
    return g


def decompose_4x4(u) -> Optional[BasisControlledGate]:
    """Basis-controlled form of a two-qubit unitary, or None when it has no
    product eigenbasis.  Control on the first qubit is preferred."""
    u = la.require_unitary(la.as_matrix(u, 4))
    for slot in (Slot.FIRST, Slot.SECOND):
        g = controlled_form(u, slot)
        if g is not None:
            return g
    return None


class ProductEigenvector4(NamedTuple):
    value: complex
    first: np.ndarray
    second: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return np.kron(self.first, self.second)


def product_eigenbasis(g: BasisControlledGate) -> list[ProductEigenvector4]:
    """``{a b, a b', a' c, a' c'}`` with ``b``, ``c`` eigenvectors of the branches."""
    out = []
    for label in (0, 1):
        a = g.control_basis.vector(label)
        for pair in la.eig2(g.branch(label)):
            if g.control_slot == Slot.FIRST:
                out.append(ProductEigenvector4(pair.value, a, pair.vector))
            else:
                out.append(ProductEigenvector4(pair.value, pair.vector, a))
    return out


def _product_gate(u: np.ndarray, v: np.ndarray) -> BasisControlledGate:
    """``u (x) v`` as a gate controlled on the first qubit in the eigenbasis of u."""
    p, q = la.eig2(u)
    return BasisControlledGate(Slot.FIRST, QubitBasis(p.vector, q.vector), p.value * v, q.value * v)


def absorb_singles(pre_i, pre_j, g: BasisControlledGate, post_i, post_j) -> Optional[BasisControlledGate]:
    """Fold single-qubit gates around ``g`` into one basis-controlled gate.

    Computes a gate equal to ``(post_i (x) post_j) g (pre_i (x) pre_j)`` (``i``
    the first slot) when one of three situations holds: proportional branches
    (a product of single-qubit gates); control-side singles that map some basis
    onto the control basis and back again (control stays put); commuting
    branches (control moves to the other qubit).  None otherwise.
    """
    singles = [la.as_matrix(x, 2) for x in (pre_i, pre_j, post_i, post_j)]
    pre_i, pre_j, post_i, post_j = singles
    if g.control_slot == Slot.FIRST:
        pre_c, pre_t, post_c, post_t = pre_i, pre_j, post_i, post_j
    else:
        pre_c, pre_t, post_c, post_t = pre_j, pre_i, post_j, post_i
    a = g.control_basis
    b = post_t @ g.branch0 @ pre_t
    c = post_t @ g.branch1 @ pre_t

    phi = la.proportionality_phase(g.branch0, g.branch1)
    if phi is not None:
        u = post_c @ a.diag(1.0, phi) @ pre_c
        out = _product_gate(u, b)
        if g.control_slot == Slot.SECOND:
            out = BasisControlledGate(Slot.SECOND, out.control_basis, out.branch0, out.branch1)
        return out

    # same control line: pre_c must carry some basis e onto a, and post_c carry a back onto e
    e = QubitBasis(la.dagger(pre_c) @ a.v0, la.dagger(pre_c) @ a.v1)
    back = [post_c @ a.vector(k) for k in (0, 1)]
    phase = [np.vdot(e.vector(k), back[k]) for k in (0, 1)]
    if all(abs(abs(ph) - 1) <= la.TOL_EIG for ph in phase):
        return BasisControlledGate(g.control_slot, e, phase[0] * b, phase[1] * c)

    if la.commutes(b, c):
        # commuting branches: control moves to the other line, in their common eigenbasis
        f = la.eigenbasis(b) if not la.is_scalar(b) else la.eigenbasis(c)
        db, dc = f.diagonal_of(b), f.diagonal_of(c)
        branches = [post_c @ a.diag(db[k], dc[k]) @ pre_c for k in (0, 1)]
        return BasisControlledGate(g.target_slot, f, branches[0], branches[1])
    return None


def apply_to_product(g: BasisControlledGate, s_ctrl, s_tgt) -> tuple[np.ndarray, np.ndarray]:
    """Action of ``g`` on ``s_ctrl (x) s_tgt`` when the control factor is a basis
    state of ``g`` (up to phase).  Returns the new (control, target) factors."""
    s_ctrl = np.asarray(s_ctrl, dtype=complex)
    s_tgt = np.asarray(s_tgt, dtype=complex)
    label = g.control_basis.label_of(s_ctrl)
    if label is None:
        raise ControlNotInBasis("control factor is not a state of the control basis")
    return s_ctrl, g.branch(label) @ s_tgt
