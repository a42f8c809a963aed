"""Dense brute-force ground truth for small circuits.

Everything here works on the full ``2^n x 2^n`` unitary and shares no code
with the classifier or sampler beyond circuit assembly, so it can referee them.
"""
from __future__ import annotations

import csv
import enum
import io
from typing import Optional

import numpy as np
import scipy.linalg

from .circuit import DEFAULT_CAP, Circuit, build_full_unitary
from .errors import TooLarge

TOL_PRODUCT = 1e-8
TOL_CLUSTER = 1e-8
TOL_EIGVEC = 1e-7
# greedy product search inside a degenerate eigenspace
GREEDY_RESTARTS = 50
GREEDY_SWEEPS = 200
GREEDY_TOL = 1e-7
GREEDY_BUDGET = 2e8


class Verdict(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


def exact_normalized_trace(c: Circuit, cap: int = DEFAULT_CAP) -> complex:
    u = build_full_unitary(c, cap)
    return complex(np.trace(u) / u.shape[0])


def _assemble(v) -> np.ndarray:
    if hasattr(v, "factors"):
        out = np.ones(1, dtype=complex)
        for f in v.factors:
            out = np.kron(out, f)
        return out
    return np.asarray(v, dtype=complex)


def verify_eigenvector(u_full: np.ndarray, v) -> Optional[complex]:
    """``<v|U|v>`` if ``v`` (a vector or product of factors) is an eigenvector of ``U``."""
    x = _assemble(v)
    if x.shape[0] != u_full.shape[0]:
        raise ValueError("dimension mismatch")
    ux = u_full @ x
    lam = complex(np.vdot(x, ux))
    if np.linalg.norm(ux - lam * x) > TOL_EIGVEC:
        return None
    return lam


def cut_singular_values(s: np.ndarray, n: int) -> np.ndarray:
    """Second singular value across each single-qubit cut ``k | rest``."""
    t = np.asarray(s, dtype=complex).reshape((2,) * n)
    out = np.empty(n)
    for k in range(n):
        sv = np.linalg.svd(np.moveaxis(t, k, 0).reshape(2, -1), compute_uv=False)
        out[k] = sv[1]
    return out


def is_fully_product(s: np.ndarray, tol: float = TOL_PRODUCT) -> bool:
    s = np.asarray(s, dtype=complex)
    n = int(round(np.log2(s.shape[0])))
    if n <= 1:
        return True
    return bool(np.all(cut_singular_values(s, n) <= tol))


def purity_identity_check(u_full: np.ndarray, phi: np.ndarray, cap: int = DEFAULT_CAP) -> tuple[float, float]:
    """Clean-qubit purity after the controlled-``U`` on ``|+>|phi>``, computed
    from the explicit joint density matrix, next to ``1/2 + |<phi|U|phi>|^2/2``."""
    phi = np.asarray(phi, dtype=complex)
    d = phi.shape[0]
    if int(np.log2(d)) > cap:
        raise TooLarge(f"{int(np.log2(d))} qubits exceed the dense cap {cap}")
    psi = np.concatenate([phi, u_full @ phi]) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    r4 = rho.reshape(2, d, 2, d)
    rho_a = np.einsum("ikjk->ij", r4)
    purity = float(np.real(np.trace(rho_a @ rho_a)))
    formula = 0.5 + 0.5 * abs(np.vdot(phi, u_full @ phi)) ** 2
    return purity, float(formula)


# ---------------------------------------------------------------- eigenbases

def eigendecompose(u_full: np.ndarray):
    """Eigenvalues and orthonormal eigenvectors of a unitary via complex Schur."""
    t, z = scipy.linalg.schur(np.asarray(u_full, dtype=complex), output="complex")
    return np.diag(t).copy(), z


def clusters(values: np.ndarray, tol: float = TOL_CLUSTER) -> list[list[int]]:
    """Group indices of eigenvalues closer than ``tol`` (single linkage on the circle)."""
    order = np.argsort(np.angle(values))
    groups = [[int(order[0])]]
    for a, b in zip(order[:-1], order[1:]):
        if abs(values[b] - values[a]) <= tol:
            groups[-1].append(int(b))
        else:
            groups.append([int(b)])
    if len(groups) > 1 and abs(values[groups[0][0]] - values[groups[-1][-1]]) <= tol:
        groups[0] = groups.pop() + groups[0]
    return groups


def _product_in_span_2(q: np.ndarray) -> list[np.ndarray]:
    """Product vectors in the span of the two columns of ``q`` (two qubits).

    ``det(s M1 + t M2) = a s^2 + b s t + c t^2`` vanishes exactly on product vectors.
    """
    m1, m2 = q[:, 0].reshape(2, 2), q[:, 1].reshape(2, 2)
    a = np.linalg.det(m1)
    c = np.linalg.det(m2)
    b = np.linalg.det(m1 + m2) - a - c
    if max(abs(a), abs(b), abs(c)) <= TOL_PRODUCT:
        # every vector of the span is a product
        return [q[:, 0], q[:, 1]]
    if abs(a) > TOL_PRODUCT:
        disc = np.sqrt(b * b - 4 * a * c)
        roots = [((-b + disc) / (2 * a), 1.0), ((-b - disc) / (2 * a), 1.0)]
    elif abs(b) > TOL_PRODUCT:
        roots = [(1.0, 0.0), (-c / b, 1.0)]
    else:
        roots = [(1.0, 0.0)]
    out = []
    for s, t in roots:
        v = s * q[:, 0] + t * q[:, 1]
        v = v / np.linalg.norm(v)
        if is_fully_product(v, 1e-7):
            out.append(v)
    return out


def _schmidt_factors(v: np.ndarray):
    u, s, vh = np.linalg.svd(v.reshape(2, 2))
    return u[:, 0], vh[0]


def _two_qubit_cluster_basis(q: np.ndarray) -> Optional[list[np.ndarray]]:
    d = q.shape[1]
    if d == 1:
        return [q[:, 0]] if is_fully_product(q[:, 0]) else None
    if d == 4:
        return list(np.eye(4, dtype=complex))
    if d == 2:
        cands = _product_in_span_2(q)
        for x in cands:
            for y in cands:
                if abs(np.vdot(x, y)) <= 1e-7:
                    return [x, y]
        return None
    # d == 3: the complement is a single vector |a>|b>; if it is a product,
    # {|a>|b'>, |a'>|0>, |a'>|1>} spans this cluster
    comp = scipy.linalg.null_space(q.conj().T)[:, 0]
    if not is_fully_product(comp, 1e-7):
        return None
    a, b = _schmidt_factors(comp)
    ap = np.array([-np.conj(a[1]), np.conj(a[0])])
    bp = np.array([-np.conj(b[1]), np.conj(b[0])])
    return [np.kron(a, bp), np.kron(ap, [1, 0]), np.kron(ap, [0, 1])]


def _greedy_cluster_basis(q: np.ndarray, n: int, rng: np.random.Generator, budget: list) -> Optional[list]:
    """Peel product vectors off the span of ``q`` by alternating single-qubit fits."""
    found = []
    r = q.copy()
    while r.shape[1] > 0:
        d = r.shape[1]
        best = None
        for restart in range(GREEDY_RESTARTS):
            if restart == 0:
                # start from the computational state with the most weight in the span
                idx = int(np.argmax(np.sum(np.abs(r) ** 2, axis=1)))
                bits = [(idx >> (n - 1 - k)) & 1 for k in range(n)]
                fs = [np.eye(2, dtype=complex)[b] for b in bits]
            else:
                fs = []
                for _ in range(n):
                    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
                    fs.append(z / np.linalg.norm(z))
            rt = r.conj().T.reshape((d,) + (2,) * n)
            prev = -1.0
            for _ in range(GREEDY_SWEEPS):
                budget[0] += n * d * 2 ** n
                if budget[0] > GREEDY_BUDGET:
                    return None
                for k in range(n):
                    t = rt
                    # contract every factor except k, highest axis first
                    for j in reversed(range(n)):
                        if j == k:
                            continue
                        t = np.tensordot(t, fs[j], axes=([1 + j], [0]))
                    # t has shape (d, 2): maps factor k to overlaps with the span
                    _, s, vh = np.linalg.svd(t)
                    fs[k] = vh[0].conj()
                v = fs[0]
                for f in fs[1:]:
                    v = np.kron(v, f)
                ov = float(np.linalg.norm(r.conj().T @ v))
                if abs(ov - prev) < 1e-14:
                    break
                prev = ov
            if ov >= 1 - GREEDY_TOL:
                best = v
                break
        if best is None:
            return None
        found.append(best)
        rest = r - np.outer(best, best.conj() @ r)
        u, s, _ = np.linalg.svd(rest, full_matrices=False)
        r = u[:, : d - 1]
    return found


def product_eigenbasis_verdict(u_full: np.ndarray, cap: int = DEFAULT_CAP, seed: int = 0):
    """Yes / No / Unknown: does ``u_full`` have an orthonormal product eigenbasis?

    Nondegenerate eigenvectors decide exactly.  Degenerate eigenspaces are
    decided exactly for two qubits and searched greedily otherwise; a failed
    greedy search gives Unknown.
    """
    u_full = np.asarray(u_full, dtype=complex)
    dim = u_full.shape[0]
    n = int(round(np.log2(dim)))
    if n > cap:
        raise TooLarge(f"n = {n} exceeds the dense cap {cap}")
    if n <= 1:
        return Verdict.YES
    vals, z = eigendecompose(u_full)
    groups = clusters(vals)
    rng = np.random.default_rng(seed)
    budget = [0.0]
    unknown = False
    for g in groups:
        q = z[:, g]
        if len(g) == 1:
            if not is_fully_product(q[:, 0]):
                return Verdict.NO
            continue
        if n == 2:
            if _two_qubit_cluster_basis(q) is None:
                return Verdict.NO
            continue
        if not unknown and _greedy_cluster_basis(q, n, rng, budget) is None:
            unknown = True
    return Verdict.UNKNOWN if unknown else Verdict.YES


def max_product_defect(u_full: np.ndarray) -> float:
    """Largest cut singular value over the Schur eigenvectors (0 for product vectors)."""
    n = int(round(np.log2(u_full.shape[0])))
    if n <= 1:
        return 0.0
    _, z = eigendecompose(u_full)
    return float(max(cut_singular_values(z[:, k], n).max() for k in range(z.shape[1])))


def report_rows(c: Circuit, cap: int = DEFAULT_CAP) -> dict:
    u = build_full_unitary(c, cap)
    tr = complex(np.trace(u) / u.shape[0])
    return {"trace_re": tr.real, "trace_im": tr.imag,
            "verdict": product_eigenbasis_verdict(u, cap).value,
            "max_product_defect": max_product_defect(u)}


def report_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["name", "trace_re", "trace_im", "verdict", "max_product_defect"],
                       lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
