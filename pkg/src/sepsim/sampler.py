"""Eigenvector sampling and Monte-Carlo estimation of the normalized trace.

A label string picks one product eigenvector of an accepted circuit: basis lines
take ``basis.vector(label)``, target and free lines take the ``label``-th
``eig2`` eigenvector of their single-qubit action.  Every label string is
equally likely, so the average eigenphase over uniform labels is ``Tr(U)/2^n``.

Randomness is counter based: sample ``s`` reads output words ``s*m .. s*m+m-1``
of a Philox stream keyed by the seed (``m = ceil(n/64)``), so any sample can be
regenerated on its own and the estimate does not depend on evaluation order.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import linalg as la
from .circuit import Circuit
from .classifier import (BasisLine, CircuitRejected, Classification, Rejection,
                         classify_circuit)
from .errors import NotClassified, PhaseIncoherent
from .gates import Slot, apply_to_product

TOL_OVERLAP = 1e-7
# second Schmidt coefficient below which a joint state is split
_TOL_SPLIT = 1e-9
_WORD = 64


class ProductEigenvector(NamedTuple):
    factors: tuple
    labels: tuple

    @property
    def vector(self) -> np.ndarray:
        out = np.ones(1, dtype=complex)
        for f in self.factors:
            out = np.kron(out, f)
        return out


@dataclass(frozen=True)
class TraceEstimate:
    value: float
    basis: str
    epsilon: float
    delta: float
    samples: int
    seed: int


def sample_count(epsilon: float, delta: float) -> int:
    """Hoeffding: averages of ``S`` values in [-1, 1] are within ``epsilon`` of
    the mean with probability at least ``1 - delta``."""
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise ValueError("need 0 < epsilon < 1 and 0 < delta < 1")
    return math.ceil(2.0 / epsilon ** 2 * math.log(2.0 / delta))


def _require_classification(cls) -> Classification:
    if isinstance(cls, Rejection):
        raise NotClassified(f"circuit was rejected at gate {cls.gate_index}")
    if not isinstance(cls, Classification):
        raise NotClassified("expected an accepted Classification")
    return cls


def eigenvector_for_labels(cls: Classification, labels) -> ProductEigenvector:
    cls = _require_classification(cls)
    labels = tuple(int(b) for b in labels)
    if len(labels) != cls.n:
        raise ValueError(f"need {cls.n} labels")
    ks = {q: labels[q] for q in cls.basis_lines}
    factors = []
    for q in range(cls.n):
        ln = cls.lines[q]
        if isinstance(ln, BasisLine):
            factors.append(ln.basis.vector(labels[q]))
        else:
            factors.append(la.eig2(cls.line_unitary(q, ks))[labels[q]].vector)
    return ProductEigenvector(tuple(factors), labels)


def sample_eigenvector(cls: Classification, rng_state: np.random.Generator) -> ProductEigenvector:
    cls = _require_classification(cls)
    bits = rng_state.integers(0, 2, size=cls.n)
    return eigenvector_for_labels(cls, bits)


class _GroupedState:
    """A product of small joint states; lines sit alone whenever possible."""

    def __init__(self, factors):
        self.groups = {q: ((q,), np.array(f, dtype=complex)) for q, f in enumerate(factors)}

    def apply_single(self, q: int, u: np.ndarray):
        qs, t = self.groups[q]
        ax = qs.index(q)
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [ax])), 0, ax)
        self._store(qs, t)

    def apply_pair(self, p):
        a, b = p.qubits
        qa, ta = self.groups[a]
        if len(qa) == 1 and self.groups[b][0] == (b,):
            out = _pair_fast(p, ta, self.groups[b][1])
            if out is not None:
                self._store((a,), out[0])
                self._store((b,), out[1])
                return
        if b in qa:
            qs, t = qa, ta
        else:
            qb, tb = self.groups[b]
            qs, t = qa + qb, np.multiply.outer(ta, tb)
        m = p.matrix.reshape(2, 2, 2, 2)
        axes = [qs.index(a), qs.index(b)]
        t = np.moveaxis(np.tensordot(m, t, axes=([2, 3], axes)), [0, 1], axes)
        self._split(qs, t)

    def _store(self, qs, t):
        for q in qs:
            self.groups[q] = (qs, t)

    def _split(self, qs, t):
        qs = list(qs)
        while len(qs) > 1:
            for k, q in enumerate(qs):
                mat = np.moveaxis(t, k, 0).reshape(2, -1)
                u, s, vh = np.linalg.svd(mat, full_matrices=False)
                if s[1] <= _TOL_SPLIT:
                    self._store((q,), s[0] * u[:, 0])
                    qs.pop(k)
                    t = vh[0].reshape((2,) * len(qs))
                    break
            else:
                break
        self._store(tuple(qs), t)

    def factor(self, q: int) -> Optional[np.ndarray]:
        qs, t = self.groups[q]
        return t if len(qs) == 1 else None


def _pair_fast(p, fa: np.ndarray, fb: np.ndarray):
    """Admitted entry ``p`` on ``fa (x) fb`` when its control factor sits in the control basis."""
    fa, fb = p.pre[0] @ fa, p.pre[1] @ fb
    g = p.gate
    ctrl, tgt = (fa, fb) if g.control_slot == Slot.FIRST else (fb, fa)
    if g.control_basis.label_of(ctrl) is None:
        return None
    ctrl, tgt = apply_to_product(g, ctrl, tgt)
    return (ctrl, tgt) if g.control_slot == Slot.FIRST else (tgt, ctrl)


def eigenphase(c: Circuit, v: ProductEigenvector, cls: Optional[Classification] = None) -> complex:
    """Eigenvalue of ``v`` found by evolving its factors through the admitted gates.

    Factors stay separate while each two-qubit entry has its control factor in
    the control basis.  Otherwise the two lines are evolved jointly until a
    Schmidt test splits them again; the final state must be a product.
    """
    if cls is None:
        cls = classify_circuit(c)
    cls = _require_classification(cls)
    state = _GroupedState(v.factors)
    for p in cls.admitted:
        if p.single is not None:
            state.apply_single(p.qubits[0], p.single)
        else:
            state.apply_pair(p)
    lam = 1.0 + 0j
    for k, f in enumerate(v.factors):
        g = state.factor(k)
        if g is None:
            raise PhaseIncoherent(f"line {k} ends entangled with other lines")
        ov = np.vdot(f, g)
        if abs(ov) < 1 - TOL_OVERLAP:
            raise PhaseIncoherent(f"factor {k} overlap {abs(ov):.3e} below threshold")
        lam *= ov
    return complex(lam / abs(lam))


def label_bits(n: int, samples: int, seed: int) -> np.ndarray:
    """Labels of samples ``0 .. samples-1``, shape ``(samples, n)``."""
    words = -(-n // _WORD)
    raw = np.random.Philox(key=seed).random_raw(samples * words).astype(np.uint64).reshape(samples, words)
    k = np.arange(n)
    return ((raw[:, k // _WORD] >> (k % _WORD).astype(np.uint64)) & np.uint64(1)).astype(np.int8)


def sample_phases(cls: Classification, c: Circuit, labels: np.ndarray) -> np.ndarray:
    """Eigenphase for each row of ``labels``; repeated label strings are evaluated once."""
    uniq, inverse = np.unique(labels, axis=0, return_inverse=True)
    vals = np.array([eigenphase(c, eigenvector_for_labels(cls, row), cls) for row in uniq])
    return vals[np.asarray(inverse).reshape(-1)]


def estimate_normalized_trace(c: Circuit, basis: str = "X", epsilon: float = 0.05,
                              delta: float = 0.01, seed: int = 0,
                              cls: Optional[Classification] = None,
                              return_samples: bool = False):
    basis = basis.upper()
    if basis not in ("X", "Y"):
        raise ValueError("basis must be X or Y")
    s = sample_count(epsilon, delta)
    if cls is None:
        cls = classify_circuit(c)
        if isinstance(cls, Rejection):
            raise CircuitRejected(cls)
    cls = _require_classification(cls)
    labels = label_bits(c.n, s, seed)
    lam = sample_phases(cls, c, labels)
    part = lam.real if basis == "X" else lam.imag
    est = TraceEstimate(float(np.mean(part)), basis, epsilon, delta, s, seed)
    if return_samples:
        return est, labels, lam
    return est


def estimate_to_json(est: TraceEstimate) -> dict:
    return asdict(est)


def audit_csv(labels: np.ndarray, lam: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample_index", "label_bits", "re_lambda", "im_lambda"])
    for s, (row, z) in enumerate(zip(labels, lam)):
        w.writerow([s, "".join(str(int(b)) for b in row), repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()
