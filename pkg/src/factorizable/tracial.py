"""Finite-dimensional tracial algebras ``(M, tau_M) = (+)_j (M_{d_j}, c_j tr_{d_j})``.

Elements are block-diagonal matrices in M_D with ``D = sum_j d_j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix_core import DEFAULT_POLICY, TolerancePolicy, max_abs


@dataclass(frozen=True)
class FiniteTracialAlgebra:
    blocks: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        weights = tuple(float(w) for w in self.weights)
        if not blocks:
            raise ValueError("at least one block is required")
        if any(b < 1 for b in blocks):
            raise ValueError("block dimensions must be positive")
        if len(weights) != len(blocks):
            raise ValueError("one weight per block is required")
        check_weights(weights)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def full(cls, d: int) -> "FiniteTracialAlgebra":
        return cls((d,), (1.0,))

    @property
    def dim(self) -> int:
        return sum(self.blocks)

    @property
    def offsets(self) -> list[int]:
        return list(np.cumsum((0,) + self.blocks)[:-1])

    def block_slice(self, j: int) -> slice:
        off = self.offsets[j]
        return slice(off, off + self.blocks[j])

    def block(self, x: np.ndarray, j: int) -> np.ndarray:
        s = self.block_slice(j)
        return x[..., s, s]

    def embed(self, parts) -> np.ndarray:
        """Block-diagonal matrix from a list of per-block matrices."""
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for j, p in enumerate(parts):
            s = self.block_slice(j)
            out[s, s] = p
        return out

    def block_projection(self, j: int) -> np.ndarray:
        p = np.zeros((self.dim, self.dim), dtype=np.complex128)
        s = self.block_slice(j)
        p[s, s] = np.eye(self.blocks[j])
        return p

    def trace(self, x: np.ndarray) -> complex:
        """``tau_M(x) = sum_j c_j tr_{d_j}(x_j)``; off-block entries are ignored."""
        return complex(sum(c * np.trace(self.block(x, j)) / d
                           for j, (d, c) in enumerate(zip(self.blocks, self.weights))))

    def is_element(self, x: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
        x = np.asarray(x)
        mask = np.ones((self.dim, self.dim), dtype=bool)
        for j in range(len(self.blocks)):
            s = self.block_slice(j)
            mask[s, s] = False
        return max_abs(x[mask]) < pol.eps_eq

    def is_faithful(self, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
        return all(w > pol.eps_eq for w in self.weights)


def check_weights(weights, pol: TolerancePolicy = DEFAULT_POLICY):
    if any(w < -pol.eps_eq for w in weights):
        raise ValueError("trace weights must be non-negative")
    if abs(sum(weights) - 1) > pol.eps_eq:
        raise ValueError(f"trace weights must sum to 1, got {sum(weights)!r}")
