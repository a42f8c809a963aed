"""Estimator error against the dense trace over a grid of (n, epsilon).

    python3 scripts/accuracy_sweep.py --out accuracy.csv
"""
import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from sepsim.generate import generate_product_control_circuit
from sepsim.oracle import exact_normalized_trace
from sepsim.sampler import estimate_normalized_trace


@dataclass
class SweepConfig:
    sizes: list = field(default_factory=lambda: [3, 4, 6, 8])
    epsilons: list = field(default_factory=lambda: [0.2, 0.1, 0.05])
    delta: float = 0.01
    depth: int = 20
    circuits: int = 20
    seed: int = 0


def run(cfg: SweepConfig, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "epsilon", "samples", "mean_abs_err", "max_abs_err", "within_eps", "seconds"])
    rng = np.random.default_rng(cfg.seed)
    for n in cfg.sizes:
        circuits = [generate_product_control_circuit(n, cfg.depth, int(rng.integers(2 ** 31)))
                    for _ in range(cfg.circuits)]
        exact = [exact_normalized_trace(c) for c in circuits]
        for eps in cfg.epsilons:
            t0 = time.perf_counter()
            errs = []
            for k, (c, tr) in enumerate(zip(circuits, exact)):
                for basis, ref in (("X", tr.real), ("Y", tr.imag)):
                    est = estimate_normalized_trace(c, basis, eps, cfg.delta, seed=k)
                    errs.append(abs(est.value - ref))
            errs = np.array(errs)
            w.writerow([n, eps, est.samples, f"{errs.mean():.5f}", f"{errs.max():.5f}",
                        f"{np.mean(errs <= eps):.3f}", f"{time.perf_counter() - t0:.2f}"])
            out.flush()


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--circuits", type=int, default=SweepConfig.circuits)
    p.add_argument("--depth", type=int, default=SweepConfig.depth)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    p.add_argument("--out", default="-")
    a = p.parse_args()
    cfg = SweepConfig(circuits=a.circuits, depth=a.depth, seed=a.seed)
    if a.out == "-":
        run(cfg, sys.stdout)
    else:
        with open(a.out, "w") as fh:
            run(cfg, fh)


if __name__ == "__main__":
    main()
