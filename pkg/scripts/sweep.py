"""Random-instance sweep: build traces, push them through phi, and check the channel axioms.

    python3 scripts/sweep.py --trials 40 --seed 0
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

import numpy as np

from factorizable import (
    channel_from_ancilla,
    phi,
    random_trace,
    trace_from_ancilla,
    verify_channel,
)
from factorizable.matrix_core import haar_unitary, max_abs
from factorizable.tracial import FiniteTracialAlgebra


@dataclass(frozen=True)
class SweepConfig:
    trials: int = 40
    seed: int = 0
    ns: tuple[int, ...] = (2, 3)
    max_block: int = 12
    max_blocks: int = 3
    ancilla_dims: tuple[int, ...] = field(default=(1, 2, 3, 4))


def random_blocks(rng, n, cfg):
    count = int(rng.integers(1, cfg.max_blocks + 1))
    return tuple(int(n * rng.integers(1, cfg.max_block // n + 1)) for _ in range(count))


def run(cfg: SweepConfig) -> list[dict]:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for t in range(cfg.trials):
        n = cfg.ns[t % len(cfg.ns)]
        blocks = random_blocks(rng, n, cfg)
        weights = tuple(rng.dirichlet(np.ones(len(blocks))))
        start = time.perf_counter()
        r = verify_channel(phi(random_trace(n, blocks, weights, rng)))
        # same channel through the ancilla route and back
        d = int(rng.choice(cfg.ancilla_dims))
        u = haar_unitary(n * d, rng)
        ancilla = FiniteTracialAlgebra.full(d)
        gap = max_abs(channel_from_ancilla(u, ancilla).choi - phi(trace_from_ancilla(u, ancilla)).choi)
        rows.append({
            "n": n, "blocks": blocks, "flags": r.flags, "min_eig": r.min_eigenvalue,
            "ancilla_gap": gap, "ms": 1e3 * (time.perf_counter() - start),
        })
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=SweepConfig.trials)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    args = p.parse_args()
    rows = run(SweepConfig(trials=args.trials, seed=args.seed))
    print(f"{'n':>2} {'blocks':<14} {'cp/un/tp':<10} {'min eig':>10} {'ancilla gap':>12} {'ms':>7}")
    for r in rows:
        flags = "".join("T" if f else "F" for f in r["flags"])
        print(f"{r['n']:>2} {str(r['blocks']):<14} {flags:<10} {r['min_eig']:>10.2e} {r['ancilla_gap']:>12.1e} {r['ms']:>7.1f}")
    bad = [r for r in rows if not all(r["flags"]) or r["ancilla_gap"] > 1e-9]
    print(f"{len(rows) - len(bad)}/{len(rows)} instances verified")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
