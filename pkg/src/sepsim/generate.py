"""Random circuits built so that every prefix is admitted by the classifier."""
from __future__ import annotations

import numpy as np

from . import linalg as la
from .circuit import Circuit, ControlledGate, SingleGate, TwoGate
from .classifier import (BasisLine, Classification, Free, Rejection, Target,
                         _diagonal_condition, classify_step)
from .gates import SWAP, BasisControlledGate, Slot, to_matrix

MAX_ATTEMPTS = 20


def _branch_pair(rng, st: Classification, o: int):
    """Two branch unitaries for partner line ``o`` that its state can take."""
    ln = st.lines[o]
    if isinstance(ln, BasisLine) and (st.dependents(o) or rng.random() < 0.5):
        return ln.basis.diag(*la.random_phases(rng, 2)), ln.basis.diag(*la.random_phases(rng, 2))
    h0 = la.haar_unitary(rng)
    if rng.random() < 0.25:
        # commuting branches give phase-kind gates
        f = la.eigenbasis(h0)
        return h0, f.diag(*la.random_phases(rng, 2))
    return h0, la.haar_unitary(rng)


def _propose_single(rng, st: Classification, q: int) -> SingleGate:
    ln = st.lines[q]
    if isinstance(ln, BasisLine) and (st.dependents(q) or rng.random() < 0.5):
        return SingleGate(q, ln.basis.diag(*la.random_phases(rng, 2)))
    return SingleGate(q, la.haar_unitary(rng))


def _propose_two(rng, st: Classification, i: int, j: int):
    c, o = (i, j) if rng.random() < 0.5 else (j, i)
    lc, lo = st.lines[c], st.lines[o]
    if isinstance(lc, BasisLine):
        pc, basis = la.I2, lc.basis
    elif isinstance(lc, Free):
        pc, basis = lc.w, la.haar_basis(rng)
    else:
        cond = _diagonal_condition(st, c)
        if isinstance(cond, str):
            return None
        pc, basis = cond[0], cond[1] if cond[1] is not None else la.haar_basis(rng)
    po = lo.w if isinstance(lo, Free) else la.I2
    h0, h1 = _branch_pair(rng, st, o)
    g = BasisControlledGate(Slot.FIRST, basis, h0, h1)
    if rng.random() < 0.3 and np.allclose(pc, la.I2) and np.allclose(po, la.I2):
        return ControlledGate(c, o, g)
    m = to_matrix(g) @ np.kron(la.dagger(pc), la.dagger(po))
    if c > o and rng.random() < 0.5:
        return TwoGate(o, c, SWAP @ m @ SWAP)
    return TwoGate(c, o, m)


def generate_product_control_circuit(n: int, depth: int, seed: int,
                                     p_single: float = 0.3) -> Circuit:
    """Forward-sample ``depth`` gates, each admitted by the classifier."""
    if n < 2 or depth < 1:
        raise ValueError("need n >= 2 and depth >= 1")
    rng = np.random.default_rng(seed)
    st = Classification.fresh(n)
    gates = []
    for k in range(depth):
        nxt = None
        for _ in range(MAX_ATTEMPTS):
            if rng.random() < p_single:
                g = _propose_single(rng, st, int(rng.integers(n)))
            else:
                i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
                g = _propose_two(rng, st, i, j)
            if g is None:
                continue
            nxt = classify_step(st, g, k)
            if not isinstance(nxt, Rejection):
                break
            nxt = None
        if nxt is None:
            # an identity gate is always admitted
            g = SingleGate(int(rng.integers(n)), la.I2.copy())
            nxt = classify_step(st, g, k)
        gates.append(g)
        st = nxt
    return Circuit(n, gates)
