"""Wall time of classification and estimation as the register grows.

No dense unitary is built, so sizes well past the oracle cap are fine.

    python3 scripts/scaling.py --sizes 8 16 32 64
"""
import argparse
import time
from dataclasses import dataclass, field

from sepsim.classifier import classify_circuit
from sepsim.generate import generate_product_control_circuit
from sepsim.sampler import estimate_normalized_trace


@dataclass
class ScalingConfig:
    sizes: list = field(default_factory=lambda: [8, 16, 32, 64])
    depth_per_qubit: int = 3
    epsilon: float = 0.1
    delta: float = 0.05
    seed: int = 0


def run(cfg: ScalingConfig):
    print(f"{'n':>4} {'depth':>6} {'gen s':>8} {'classify s':>11} {'estimate s':>11} {'value':>9}")
    for n in cfg.sizes:
        depth = cfg.depth_per_qubit * n
        t0 = time.perf_counter()
        c = generate_product_control_circuit(n, depth, cfg.seed)
        t1 = time.perf_counter()
        cls = classify_circuit(c)
        t2 = time.perf_counter()
        est = estimate_normalized_trace(c, "X", cfg.epsilon, cfg.delta, cfg.seed, cls=cls)
        t3 = time.perf_counter()
        print(f"{n:>4} {depth:>6} {t1 - t0:>8.2f} {t2 - t1:>11.3f} {t3 - t2:>11.2f} {est.value:>9.4f}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=ScalingConfig().sizes)
    p.add_argument("--depth-per-qubit", type=int, default=ScalingConfig.depth_per_qubit)
    p.add_argument("--seed", type=int, default=ScalingConfig.seed)
    a = p.parse_args()
    run(ScalingConfig(sizes=a.sizes, depth_per_qubit=a.depth_per_qubit, seed=a.seed))


if __name__ == "__main__":
    main()
