"""Timing and block structure of generated *-algebras for images of random traces.

    python3 scripts/span_scaling.py --n 2 --max-total 24
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from factorizable import block_structure, generated_image, random_trace


@dataclass(frozen=True)
class ScalingConfig:
    n: int = 2
    max_total: int = 24
    seed: int = 0


def run(cfg: ScalingConfig):
    rng = np.random.default_rng(cfg.seed)
    for total in range(cfg.n, cfg.max_total + 1, cfg.n):
        # split the ambient dimension into at most three blocks of multiples of n
        units = total // cfg.n
        cuts = sorted(rng.choice(np.arange(1, units), size=min(2, units - 1), replace=False)) if units > 1 else []
        sizes = np.diff([0, *cuts, units]) * cfg.n
        blocks = tuple(int(s) for s in sizes)
        tr = random_trace(cfg.n, blocks, tuple(rng.dirichlet(np.ones(len(blocks)))), rng)
        start = time.perf_counter()
        image = generated_image(tr)
        bs = block_structure(image, rng)
        yield total, blocks, image.dim, bs.blocks, time.perf_counter() - start


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=ScalingConfig.n)
    p.add_argument("--max-total", type=int, default=ScalingConfig.max_total)
    p.add_argument("--seed", type=int, default=ScalingConfig.seed)
    args = p.parse_args()
    cfg = ScalingConfig(args.n, args.max_total, args.seed)
    print(f"{'D':>3} {'blocks':<14} {'dim':>5} {'structure':<24} {'s':>6}")
    for total, blocks, dim, structure, secs in run(cfg):
        print(f"{total:>3} {str(blocks):<14} {dim:>5} {str(structure):<24} {secs:>6.2f}")


if __name__ == "__main__":
    main()
