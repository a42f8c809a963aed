"""Classifier verdicts next to the dense product-eigenbasis verdict.

Accepted circuits must never get an oracle No.  Rejected circuits may still
have a product eigenbasis (the gate rules are sufficient, not necessary); the
table counts how often that happens.

    python3 scripts/oracle_agreement.py --n 3 --count 200
"""
import argparse
import collections
from dataclasses import dataclass

import numpy as np

from sepsim import linalg as la
from sepsim.circuit import Circuit, TwoGate, build_full_unitary
from sepsim.classifier import Rejection, classify_circuit
from sepsim.gates import BasisControlledGate, Slot, to_matrix
from sepsim.generate import generate_product_control_circuit
from sepsim.oracle import product_eigenbasis_verdict


@dataclass
class AgreementConfig:
    n: int = 3
    count: int = 200
    depth: int = 4
    seed: int = 0


def _random_controlled_circuit(rng, n, depth):
    gates = []
    for _ in range(depth):
        i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
        g = BasisControlledGate(Slot.FIRST, la.haar_basis(rng), la.haar_unitary(rng), la.haar_unitary(rng))
        gates.append(TwoGate(i, j, to_matrix(g)))
    return Circuit(n, gates)


def run(cfg: AgreementConfig):
    rng = np.random.default_rng(cfg.seed)
    table = collections.Counter()
    rules = collections.Counter()
    for k in range(cfg.count):
        if k % 2:
            c = generate_product_control_circuit(cfg.n, cfg.depth, int(rng.integers(2 ** 31)))
        else:
            c = _random_controlled_circuit(rng, cfg.n, cfg.depth)
        res = classify_circuit(c)
        v = product_eigenbasis_verdict(build_full_unitary(c))
        acc = "accepted" if not isinstance(res, Rejection) else "rejected"
        table[acc, v.value] += 1
        if acc == "rejected":
            rules[res.rule] += 1
    return table, rules


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(AgreementConfig()).items():
        p.add_argument(f"--{name}", type=int, default=default)
    cfg = AgreementConfig(**vars(p.parse_args()))
    table, rules = run(cfg)
    print(f"n = {cfg.n}, depth = {cfg.depth}, {cfg.count} circuits")
    print(f"{'classifier':>10} {'oracle':>8} {'count':>6}")
    for (acc, v), m in sorted(table.items()):
        print(f"{acc:>10} {v:>8} {m:>6}")
    print("rejection rules:")
    for rule, m in rules.most_common():
        print(f"  {m:5d}  {rule}")
    if table["accepted", "No"]:
        raise SystemExit("accepted circuit with an oracle No")


if __name__ == "__main__":
    main()
