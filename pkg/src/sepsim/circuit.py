"""Circuit data model, JSON schema and dense unitary assembly.

Gate ``k`` in ``Circuit.gates`` is applied after gates ``0..k-1``, so the
circuit unitary is ``U_{r-1} ... U_1 U_0``.  Qubit 0 is the most significant
bit of a computational-basis index.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import linalg as la
from .errors import GateIndexError, NonUnitary, SchemaError, TooLarge
from .gates import BasisControlledGate, Slot, to_matrix
from .jsonio import (decode_matrix, decode_vector, dumps, encode_matrix,
                     encode_vector, loads)

DEFAULT_CAP = 10


@dataclass(frozen=True, eq=False)
class SingleGate:
    qubit: int
    u: np.ndarray

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    @property
    def matrix(self) -> np.ndarray:
        return self.u


@dataclass(frozen=True, eq=False)
class TwoGate:
    """Arbitrary two-qubit unitary ``m``; qubit ``i`` is its first tensor slot."""

    i: int
    j: int
    m: np.ndarray

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.i, self.j)

    @property
    def matrix(self) -> np.ndarray:
        return self.m


@dataclass(frozen=True, eq=False)
class ControlledGate:
    """Basis-controlled gate with control on qubit ``i`` and target ``j``."""

    i: int
    j: int
    g: BasisControlledGate

    def __post_init__(self):
        if self.g.control_slot != Slot.FIRST:
            raise ValueError("ControlledGate stores its control in the first slot")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.i, self.j)

    @property
    def matrix(self) -> np.ndarray:
        return to_matrix(self.g)


Gate = Union[SingleGate, TwoGate, ControlledGate]


@dataclass(frozen=True, eq=False)
class Circuit:
    n: int
    gates: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    def __len__(self):
        return len(self.gates)

    def prefix(self, k: int) -> "Circuit":
        return Circuit(self.n, self.gates[:k])


def single(q: int, u) -> SingleGate:
    return SingleGate(q, la.as_matrix(u, 2))


def two(i: int, j: int, m) -> TwoGate:
    return TwoGate(i, j, la.as_matrix(m, 4))


def cu(i: int, j: int, basis, b, c) -> ControlledGate:
    return ControlledGate(i, j, BasisControlledGate(Slot.FIRST, basis, b, c))


def validate(c: Circuit, tol: float = la.TOL_UNITARY) -> Circuit:
    if not isinstance(c.n, int) or c.n < 1:
        raise SchemaError("n must be a positive integer")
    for k, g in enumerate(c.gates):
        qs = g.qubits
        if any(q < 0 or q >= c.n for q in qs):
            raise GateIndexError(k)
        if len(qs) == 2 and qs[0] == qs[1]:
            raise GateIndexError(k, "two-qubit gate acts twice on one qubit")
        if not la.is_unitary(g.matrix, tol):
            raise NonUnitary(f"defect {la.unitarity_defect(g.matrix):.3e}", gate_index=k)
    return c


# ---------------------------------------------------------------- JSON

def _require(d, key, k):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"gate {k}: missing field {key!r}")
    return d[key]


def _int(v, what):
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"{what} must be an integer")
    return v


def gate_from_json(d, k: int = 0) -> Gate:
    kind = _require(d, "kind", k)
    where = f"gate {k}"
    try:
        if kind == "single":
            return SingleGate(_int(_require(d, "q", k), where), decode_matrix(_require(d, "u", k), 2, where))
        if kind == "two":
            return TwoGate(_int(_require(d, "i", k), where), _int(_require(d, "j", k), where),
                           decode_matrix(_require(d, "m", k), 4, where))
        if kind == "cu":
            basis = _require(d, "basis", k)
            if not isinstance(basis, list) or len(basis) != 2:
                raise SchemaError(f"{where}: basis must be two vectors")
            v0, v1 = (decode_vector(v, 2, where) for v in basis)
            b = decode_matrix(_require(d, "b", k), 2, where)
            c = decode_matrix(_require(d, "c", k), 2, where)
            try:
                bcg = BasisControlledGate(Slot.FIRST, la.QubitBasis(v0, v1), b, c)
            except NonUnitary as exc:
                raise NonUnitary(str(exc), gate_index=k) from None
            return ControlledGate(_int(_require(d, "i", k), where), _int(_require(d, "j", k), where), bcg)
    except ValueError as exc:
        if isinstance(exc, (SchemaError, NonUnitary)):
            raise
        raise SchemaError(f"{where}: {exc}") from None
    raise SchemaError(f"gate {k}: unknown kind {kind!r}")


def gate_to_json(g: Gate) -> dict:
    if isinstance(g, SingleGate):
        return {"kind": "single", "q": g.qubit, "u": encode_matrix(g.u)}
    if isinstance(g, TwoGate):
        return {"kind": "two", "i": g.i, "j": g.j, "m": encode_matrix(g.m)}
    return {"kind": "cu", "i": g.i, "j": g.j,
            "basis": [encode_vector(g.g.control_basis.v0), encode_vector(g.g.control_basis.v1)],
            "b": encode_matrix(g.g.branch0), "c": encode_matrix(g.g.branch1)}


def from_json(doc) -> Circuit:
    if not isinstance(doc, dict):
        raise SchemaError("document must be an object")
    if "n" not in doc or "gates" not in doc:
        raise SchemaError("document needs 'n' and 'gates'")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("n must be a positive integer")
    if not isinstance(doc["gates"], list):
        raise SchemaError("gates must be a list")
    gates = [gate_from_json(d, k) for k, d in enumerate(doc["gates"])]
    return validate(Circuit(n, gates))


def to_json(c: Circuit) -> dict:
    return {"n": c.n, "gates": [gate_to_json(g) for g in c.gates]}


def parse(text) -> Circuit:
    return from_json(loads(text))


def serialize(c: Circuit) -> bytes:
    return dumps(to_json(c)).encode("utf-8")


# ---------------------------------------------------------------- unitaries

def apply_gate(state: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply ``gate`` to the leading ``n`` qubit axes of ``state``.

    ``state`` has shape ``(2**n, ...)``; trailing axes are carried along.
    """
    rest = state.shape[1:]
    t = state.reshape((2,) * n + rest)
    qs = gate.qubits
    k = len(qs)
    m = gate.matrix.reshape((2,) * (2 * k))
    t = np.tensordot(m, t, axes=(list(range(k, 2 * k)), list(qs)))
    # tensordot puts the gate's output axes first; move them back into place
    t = np.moveaxis(t, list(range(k)), list(qs))
    return t.reshape(state.shape)


def build_full_unitary(c: Circuit, cap: int = DEFAULT_CAP) -> np.ndarray:
    if c.n > cap:
        raise TooLarge(f"n = {c.n} exceeds the dense cap {cap}")
    u = np.eye(2 ** c.n, dtype=complex)
    for g in c.gates:
        u = apply_gate(u, g, c.n)
    return u


def embed(m: np.ndarray, qubits, n: int) -> np.ndarray:
    """Dense ``2**n`` operator of a 1- or 2-qubit matrix on ``qubits``."""
    g = SingleGate(qubits[0], m) if len(qubits) == 1 else TwoGate(qubits[0], qubits[1], m)
    return apply_gate(np.eye(2 ** n, dtype=complex), g, n)
