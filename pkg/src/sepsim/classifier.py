"""Gate-by-gate admission of circuits whose every prefix has a product eigenbasis.

The classifier keeps the circuit unitary in a structured form.  Every qubit line
is in one of three states:

* *free* -- only single-qubit gates so far, accumulated into ``w``;
* *basis line* -- the line has a fixed basis and every eigenvector holds one of
  its two states there.  A basis line is reported as a **control** when some
  target's action depends on it non-commutatively, otherwise as **ambiguous**;
* *target* -- acted on by gates controlled by basis lines; its single-qubit
  action ``U_x`` depends on the labels ``x`` of those lines.

Diagonal interactions between basis lines are stored as phase tables.  With
``K`` the basis lines the full unitary is exactly::

    sum_x |x><x|_K  phase(x)  (x)_targets U_x  (x)_free w

so ``|x>`` together with eigenvectors of each ``U_x`` and ``w`` is a product
eigenbasis.  A gate is admitted when the structured form can be updated to
include it; the update rules follow the role-pair rows of the admission table
(control/ambiguous/target/free on each side).  A line pair that has only ever
interacted with itself is tracked as a whole 4x4 unitary and decided exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from . import linalg as la
from .circuit import Circuit, ControlledGate, SingleGate, TwoGate, apply_gate
from .errors import NotDiagonal
from .jsonio import encode_matrix, encode_vector
from .gates import (SWAP, BasisControlledGate, Slot, controlled_form,
                    decompose_4x4, to_matrix)
from .linalg import QubitBasis

CAP_CONTROLS = 12

NO_PRODUCT_EIGENBASIS = "no product eigenbasis"
SINGLE_OFF_BASIS = "single-qubit gate not diagonal in control basis"
CONDITION_OVERFLOW = "condition check overflow"


# ---------------------------------------------------------------- line states

@dataclass(frozen=True, eq=False)
class Action:
    """One step of a target line's history.

    ``branches[x]`` is applied when the lines in ``controls`` carry labels ``x``;
    a plain single-qubit gate has no controls and ``branches`` of shape (2, 2).
    """

    controls: tuple
    branches: np.ndarray

    def matrix(self, labels) -> np.ndarray:
        return self.branches[tuple(labels[c] for c in self.controls)]


@dataclass(frozen=True, eq=False)
class PhaseTable:
    """Phase ``values[x]`` picked up when basis ``lines`` carry labels ``x``."""

    lines: tuple
    values: np.ndarray

    def phase(self, labels) -> complex:
        return complex(self.values[tuple(labels[q] for q in self.lines)])


@dataclass(frozen=True, eq=False)
class Free:
    w: np.ndarray


@dataclass(frozen=True, eq=False)
class Target:
    actions: tuple
    local_prefix: np.ndarray

    @property
    def controls(self) -> tuple:
        return tuple(sorted({c for a in self.actions for c in a.controls}))

    def unitary(self, labels) -> np.ndarray:
        u = self.local_prefix
        for a in self.actions:
            u = a.matrix(labels) @ u
        return u


@dataclass(frozen=True, eq=False)
class BasisLine:
    basis: QubitBasis


# reported roles -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Control:
    basis: QubitBasis
    targets: tuple
    # (target line, labels of the other controls of that target)
    witness: tuple


@dataclass(frozen=True, eq=False)
class Ambiguous:
    basis: QubitBasis
    diagonal_partners: tuple
    targets: tuple = ()


QubitRole = Union[Free, Control, Target, Ambiguous]


@dataclass(frozen=True, eq=False)
class Placed:
    """An admitted gate in decomposed form.

    Two-qubit entries act as ``to_matrix(gate) @ kron(pre[0], pre[1])`` on
    ``qubits`` (``gate`` is controlled on ``qubits[0]`` when its slot is FIRST).
    A pair of lines that only interact with each other keeps a single entry
    that absorbs every later gate on the pair.
    """

    gate_indices: tuple
    qubits: tuple
    single: Optional[np.ndarray] = None
    pre: Optional[tuple] = None
    gate: Optional[BasisControlledGate] = None

    @property
    def matrix(self) -> np.ndarray:
        if self.single is not None:
            return self.single
        return to_matrix(self.gate) @ np.kron(self.pre[0], self.pre[1])


@dataclass(frozen=True)
class Rejection:
    gate_index: int
    rule: str
    detail: str = ""

    def __bool__(self):
        return False


class CircuitRejected(Exception):
    def __init__(self, rejection: Rejection):
        self.rejection = rejection
        super().__init__(f"gate {rejection.gate_index} rejected: {rejection.rule} ({rejection.detail})")


# ---------------------------------------------------------------- state

@dataclass(eq=False)
class Classification:
    n: int
    lines: list = field(default_factory=list)
    tables: list = field(default_factory=list)
    admitted: list = field(default_factory=list)
    component: list = field(default_factory=list)
    pairs: dict = field(default_factory=dict)
    gates_seen: int = 0
    attach_commuting: str = "ambiguous"
    cap_controls: int = CAP_CONTROLS

    @classmethod
    def fresh(cls, n: int, attach_commuting: str = "ambiguous", cap_controls: int = CAP_CONTROLS):
        if attach_commuting not in ("ambiguous", "target"):
            raise ValueError("attach_commuting must be 'ambiguous' or 'target'")
        return cls(n, [Free(la.I2) for _ in range(n)], [], [], list(range(n)), {}, 0,
                   attach_commuting, cap_controls)

    def copy(self) -> "Classification":
        return replace(self, lines=list(self.lines), tables=list(self.tables),
                       admitted=list(self.admitted), component=list(self.component),
                       pairs=dict(self.pairs))

    # queries ------------------------------------------------------------
    def kind(self, q: int) -> str:
        ln = self.lines[q]
        return "free" if isinstance(ln, Free) else "target" if isinstance(ln, Target) else "basis"

    @property
    def basis_lines(self) -> list:
        return [q for q in range(self.n) if isinstance(self.lines[q], BasisLine)]

    def dependents(self, b: int) -> tuple:
        return tuple(t for t in range(self.n)
                     if isinstance(self.lines[t], Target) and b in self.lines[t].controls)

    def partners(self, b: int) -> tuple:
        return tuple(sorted({q for t in self.tables if b in t.lines for q in t.lines} - {b}))

    def members(self, q: int) -> list:
        return [k for k in range(self.n) if self.component[k] == self.component[q]]

    def phase(self, labels) -> complex:
        p = 1.0 + 0j
        for t in self.tables:
            p *= t.phase(labels)
        return p

    def line_unitary(self, q: int, labels) -> np.ndarray:
        """Single-qubit action on a free or target line given basis-line labels."""
        ln = self.lines[q]
        if isinstance(ln, Free):
            return ln.w
        if isinstance(ln, Target):
            return ln.unitary(labels)
        raise ValueError(f"line {q} is a basis line")

    def witness(self, b: int) -> Optional[tuple]:
        """A target and control string on which ``b``'s two branches do not commute."""
        for t in self.dependents(b):
            others = [c for c in self.lines[t].controls if c != b]
            if len(others) > self.cap_controls:
                continue
            for bits in itertools.product((0, 1), repeat=len(others)):
                labels = dict(zip(others, bits))
                u0 = self.lines[t].unitary({**labels, b: 0})
                u1 = self.lines[t].unitary({**labels, b: 1})
                if not la.commutes(u0, u1):
                    return (t, tuple(sorted(labels.items())))
        return None

    def role(self, q: int) -> QubitRole:
        ln = self.lines[q]
        if not isinstance(ln, BasisLine):
            return ln
        deps = self.dependents(q)
        w = self.witness(q) if deps else None
        if w is not None:
            return Control(ln.basis, deps, w)
        return Ambiguous(ln.basis, self.partners(q), deps)

    @property
    def roles(self) -> list:
        return [self.role(q) for q in range(self.n)]

    def role_name(self, q: int) -> str:
        return type(self.role(q)).__name__

    # unitaries ----------------------------------------------------------
    def replay_unitary(self) -> np.ndarray:
        """Product of the admitted entries (equals the circuit unitary)."""
        u = np.eye(2 ** self.n, dtype=complex)
        for p in self.admitted:
            g = SingleGate(p.qubits[0], p.single) if p.single is not None else TwoGate(*p.qubits, p.matrix)
            u = apply_gate(u, g, self.n)
        return u

    def structured_unitary(self) -> np.ndarray:
        """The unitary described by the line states and phase tables."""
        n = self.n
        ks = self.basis_lines
        total = np.zeros((2 ** n, 2 ** n), dtype=complex)
        for bits in itertools.product((0, 1), repeat=len(ks)):
            labels = dict(zip(ks, bits))
            op = np.ones((1, 1), dtype=complex)
            for q in range(n):
                if q in labels:
                    m = self.lines[q].basis.projector(labels[q])
                else:
                    m = self.line_unitary(q, labels)
                op = np.kron(op, m)
            total += self.phase(labels) * op
        return total


# ---------------------------------------------------------------- updates

def _add_table(st: Classification, lines: tuple, values: np.ndarray):
    values = np.asarray(values, dtype=complex)
    order = np.argsort(lines)
    lines = tuple(int(lines[k]) for k in order)
    values = np.transpose(values, order)
    for k, t in enumerate(st.tables):
        if t.lines == lines:
            st.tables[k] = PhaseTable(lines, t.values * values)
            return
    st.tables.append(PhaseTable(lines, values))


def _pair_table(basis_o: QubitBasis, h0, h1) -> np.ndarray:
    return np.array([basis_o.diagonal_of(h0), basis_o.diagonal_of(h1)])


def _attach_fresh(st: Classification, o: int, c: int, h0, h1):
    """Line ``o`` (with nothing left to undo) now receives ``h0``/``h1`` controlled by ``c``."""
    if st.attach_commuting == "ambiguous" and la.commutes(h0, h1):
        f = la.eigenbasis(h1 if la.is_scalar(h0) else h0).canonical()
        st.lines[o] = BasisLine(f)
        _add_table(st, (c, o), _pair_table(f, h0, h1))
    else:
        st.lines[o] = Target((Action((c,), np.stack([h0, h1])),), la.I2)


def _to_target(st: Classification, o: int):
    """Rewrite basis line ``o`` (no dependents) as a target of its table partners."""
    b = st.lines[o].basis
    p0, p1 = b.projector(0), b.projector(1)
    actions, keep = [], []
    for t in st.tables:
        if o not in t.lines:
            keep.append(t)
            continue
        ax = t.lines.index(o)
        vals = np.moveaxis(t.values, ax, -1)
        branches = vals[..., 0, None, None] * p0 + vals[..., 1, None, None] * p1
        actions.append(Action(tuple(q for q in t.lines if q != o), branches))
    st.tables = keep
    st.lines[o] = Target(tuple(actions), la.I2)


def _append_action(st: Classification, t: int, action: Action):
    ln = st.lines[t]
    st.lines[t] = Target(ln.actions + (action,), ln.local_prefix)


def _union(st: Classification, a: int, b: int):
    ca, cb = st.component[a], st.component[b]
    if ca == cb:
        return
    st.component = [ca if c == cb else c for c in st.component]
    st.pairs = {k: v for k, v in st.pairs.items() if not (k & {a, b})}


def _diagonal_condition(st: Classification, t: int):
    """For target ``t``: is ``W_0^dag W_x`` diagonal in one basis for every control
    string ``x``?  Returns ``(W_0, basis or None, controls, {x: D_x})`` or a reason."""
    ln = st.lines[t]
    ks = ln.controls
    if len(ks) > st.cap_controls:
        return f"{CONDITION_OVERFLOW}: line {t} has {len(ks)} controls"
    ws = {bits: ln.unitary(dict(zip(ks, bits))) for bits in itertools.product((0, 1), repeat=len(ks))}
    w0 = ws[(0,) * len(ks)]
    ds = {bits: la.dagger(w0) @ w for bits, w in ws.items()}
    basis = None
    for d in ds.values():
        if not la.is_scalar(d):
            basis = la.eigenbasis(d).canonical()
            break
    if basis is not None and not all(la.is_diagonal_in(d, basis) for d in ds.values()):
        return f"target line {t}: relative actions share no diagonal basis"
    return w0, basis, ks, ds


def _split_product(m: np.ndarray):
    """``(u, v)`` with ``m == kron(u, v)`` if ``m`` is a product operator."""
    r = m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    uu, s, vh = np.linalg.svd(r)
    if s[1] > la.TOL_PROP:
        return None
    u = np.sqrt(s[0]) * uu[:, 0].reshape(2, 2)
    v = np.sqrt(s[0]) * vh[0].reshape(2, 2)
    scale = np.linalg.norm(u) / np.sqrt(2)
    return u / scale, v * scale


def _admit_single(st: Classification, q: int, u: np.ndarray, index: int) -> Optional[Rejection]:
    mem = st.members(q)
    key = frozenset(mem)
    if len(mem) == 2 and key in st.pairs:
        other = mem[0] if mem[1] == q else mem[1]
        m = np.kron(u, la.I2)
        return _merge_pair(st, key, m, (q, other), index)
    ln = st.lines[q]
    if isinstance(ln, Free):
        st.lines[q] = Free(u @ ln.w)
    elif isinstance(ln, Target):
        _append_action(st, q, Action((), u))
    else:
        if la.is_diagonal_in(u, ln.basis):
            _add_table(st, (q,), ln.basis.diagonal_of(u))
        elif not st.dependents(q):
            _to_target(st, q)
            _append_action(st, q, Action((), u))
        else:
            return Rejection(index, SINGLE_OFF_BASIS,
                             f"line {q} controls {list(st.dependents(q))}; gate is off its basis")
    st.admitted.append(Placed((index,), (q,), single=u))
    return None


def _set_pair_roles(st: Classification, a: int, b: int, g: BasisControlledGate):
    st.tables = [t for t in st.tables if not set(t.lines) & {a, b}]
    c, o = (a, b) if g.control_slot == Slot.FIRST else (b, a)
    phi = la.proportionality_phase(g.branch0, g.branch1)
    if phi is not None:
        st.lines[c] = Free(g.control_basis.diag(1.0, phi))
        st.lines[o] = Free(g.branch0)
        return
    st.lines[c] = BasisLine(g.control_basis)
    _attach_fresh(st, o, c, g.branch0, g.branch1)


def _merge_pair(st: Classification, key, m: np.ndarray, qubits: tuple, index: int) -> Optional[Rejection]:
    k = st.pairs[key]
    entry = st.admitted[k]
    a, b = entry.qubits
    if qubits != (a, b):
        m = SWAP @ m @ SWAP
    combined = m @ to_matrix(entry.gate)
    g = decompose_4x4(combined)
    if g is None:
        return Rejection(index, NO_PRODUCT_EIGENBASIS,
                         f"unitary on lines ({a}, {b}) is not basis-controlled on either line")
    st.admitted[k] = replace(entry, gate=g, gate_indices=entry.gate_indices + (index,))
    _set_pair_roles(st, a, b, g)
    return None


def _try_control(st: Classification, c: int, o: int, gc: np.ndarray, index: int) -> Optional[str]:
    """Admit ``gc`` (``c`` in the first slot) as a gate controlled on ``c``.
    Mutates ``st`` and returns None on success, else a reason."""
    lc, lo = st.lines[c], st.lines[o]
    promote = None
    if isinstance(lc, BasisLine):
        pc, fixed = la.I2, lc.basis
    elif isinstance(lc, Free):
        pc, fixed = lc.w, None
    else:
        cond = _diagonal_condition(st, c)
        if isinstance(cond, str):
            return cond
        pc, fixed, ks, ds = cond
        promote = (ks, ds)
    po = lo.w if isinstance(lo, Free) else la.I2
    g = controlled_form(gc @ np.kron(pc, po), Slot.FIRST, fixed)
    if g is None:
        where = " in its basis" if fixed is not None else ""
        return f"gate is not controlled on line {c}{where}"
    e, h0, h1 = g.control_basis, g.branch0, g.branch1

    if promote is not None:
        ks, ds = promote
        vals = np.empty((2,) * (len(ks) + 1), dtype=complex)
        for bits, d in ds.items():
            vals[bits] = e.diagonal_of(d)
        st.lines[c] = BasisLine(e)
        _add_table(st, tuple(ks) + (c,), vals)
    elif isinstance(lc, Free):
        st.lines[c] = BasisLine(e)

    if isinstance(lo, Free):
        _attach_fresh(st, o, c, h0, h1)
    elif isinstance(lo, Target):
        _append_action(st, o, Action((c,), np.stack([h0, h1])))
    else:
        bo = lo.basis
        if la.is_diagonal_in(h0, bo) and la.is_diagonal_in(h1, bo):
            _add_table(st, (c, o), _pair_table(bo, h0, h1))
        elif not st.dependents(o):
            _to_target(st, o)
            _append_action(st, o, Action((c,), np.stack([h0, h1])))
        else:
            return f"line {o} controls {list(st.dependents(o))} and the gate is off its basis"

    fresh = len(st.members(c)) == 1 and len(st.members(o)) == 1
    st.admitted.append(Placed((index,), (c, o), pre=(la.dagger(pc), la.dagger(po)), gate=g))
    _union(st, c, o)
    if fresh:
        st.pairs[frozenset((c, o))] = len(st.admitted) - 1
    return None


def _row_label(st: Classification, q: int) -> str:
    return st.role_name(q).lower()


def _admit_two(st: Classification, i: int, j: int, m: np.ndarray, index: int) -> Optional[Rejection]:
    key = frozenset((i, j))
    if key in st.pairs:
        return _merge_pair(st, key, m, (i, j), index)
    split = _split_product(m)
    if split is not None:
        r = _admit_single(st, i, split[0], index)
        return r if r is not None else _admit_single(st, j, split[1], index)
    reasons = []
    for c, o in ((i, j), (j, i)):
        gc = m if c == i else SWAP @ m @ SWAP
        trial = st.copy()
        why = _try_control(trial, c, o, gc, index)
        if why is None:
            st.__dict__.update(trial.__dict__)
            return None
        reasons.append(f"control on {c}: {why}")
    if st.kind(i) == "free" and st.kind(j) == "free":
        rule = NO_PRODUCT_EIGENBASIS
    elif all(CONDITION_OVERFLOW in r for r in reasons if "target line" in r or CONDITION_OVERFLOW in r) \
            and any(CONDITION_OVERFLOW in r for r in reasons):
        rule = CONDITION_OVERFLOW
    else:
        rule = f"{_row_label(st, i)}x{_row_label(st, j)}"
    return Rejection(index, rule, "; ".join(reasons))


# ---------------------------------------------------------------- public API

def classify_step(state: Classification, gate, index: Optional[int] = None):
    """Admit one gate.  Returns a new Classification, or a Rejection."""
    if index is None:
        index = state.gates_seen
    st = state.copy()
    if isinstance(gate, SingleGate):
        r = _admit_single(st, gate.qubit, gate.u, index)
    elif isinstance(gate, (TwoGate, ControlledGate)):
        r = _admit_two(st, gate.i, gate.j, gate.matrix, index)
    else:
        raise TypeError(f"not a gate: {gate!r}")
    if r is not None:
        return r
    st.gates_seen = index + 1
    return st


def classify_circuit(c: Circuit, attach_commuting: str = "ambiguous",
                     cap_controls: int = CAP_CONTROLS) -> Union[Classification, Rejection]:
    st = Classification.fresh(c.n, attach_commuting, cap_controls)
    for k, g in enumerate(c.gates):
        st = classify_step(st, g, k)
        if isinstance(st, Rejection):
            return st
    return st


def retarget_diagonal(state: Classification, line: int,
                      basis: Optional[QubitBasis] = la.COMPUTATIONAL,
                      new_target: Optional[int] = None) -> Classification:
    """Turn target ``line``, whose action is diagonal in ``basis`` for every
    control string, into a basis line; a former control with no other
    dependents becomes the target.  ``basis=None`` searches for a common basis.
    """
    ln = state.lines[line]
    if not isinstance(ln, Target):
        raise NotDiagonal(f"line {line} is not a target")
    ks = ln.controls
    if len(ks) > state.cap_controls:
        raise NotDiagonal(f"{CONDITION_OVERFLOW}: {len(ks)} controls")
    us = {bits: ln.unitary(dict(zip(ks, bits))) for bits in itertools.product((0, 1), repeat=len(ks))}
    if basis is None:
        basis = la.COMPUTATIONAL
        for u in us.values():
            if not la.is_scalar(u):
                basis = la.eigenbasis(u).canonical()
                break
    if not all(la.is_diagonal_in(u, basis) for u in us.values()):
        raise NotDiagonal(f"line {line} is not diagonal in the requested basis for every control string")
    st = state.copy()
    vals = np.empty((2,) * (len(ks) + 1), dtype=complex)
    for bits, u in us.items():
        vals[bits] = basis.diagonal_of(u)
    st.lines[line] = BasisLine(basis)
    _add_table(st, tuple(ks) + (line,), vals)
    candidates = [new_target] if new_target is not None else list(ks)
    for k in candidates:
        if k in ks and isinstance(st.lines[k], BasisLine) and not st.dependents(k):
            _to_target(st, k)
            break
    return st


# ---------------------------------------------------------------- reports

def _encode_basis(b: QubitBasis) -> list:
    return [encode_vector(b.v0), encode_vector(b.v1)]


def _encode_action(a: Action) -> dict:
    flat = a.branches.reshape(-1, 2, 2)
    return {"controls": list(a.controls), "branches": [encode_matrix(m) for m in flat]}


def role_report(cls: Classification, q: int) -> dict:
    r = cls.role(q)
    out = {"qubit": q, "role": type(r).__name__}
    if isinstance(r, Free):
        out["w"] = encode_matrix(r.w)
    elif isinstance(r, Target):
        out["controls"] = list(r.controls)
        out["actions"] = [_encode_action(a) for a in r.actions]
        out["local_prefix"] = encode_matrix(r.local_prefix)
    elif isinstance(r, Control):
        out["basis"] = _encode_basis(r.basis)
        out["targets"] = list(r.targets)
        t, labels = r.witness
        out["witness"] = {"target": t, "labels": {str(k): v for k, v in labels}}
    else:
        out["basis"] = _encode_basis(r.basis)
        out["diagonal_partners"] = list(r.diagonal_partners)
        out["targets"] = list(r.targets)
    return out


def report(result) -> dict:
    """JSON-ready summary of a Classification or a Rejection."""
    if isinstance(result, Rejection):
        return {"accepted": False, "gate_index": result.gate_index, "rule": result.rule,
                "detail": result.detail}
    return {"accepted": True, "n": result.n, "gates": result.gates_seen,
            "roles": [role_report(result, q) for q in range(result.n)],
            "phase_tables": [{"lines": list(t.lines), "values": encode_vector(t.values)}
                             for t in result.tables],
            "admitted": len(result.admitted)}
