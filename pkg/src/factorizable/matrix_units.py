"""Systems of n x n matrix units, i.e. unital embeddings of M_n into M_d."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matrix_core import (
    DEFAULT_POLICY,
    TolerancePolicy,
    adjoint,
    as_matrix,
    haar_unitary,
    is_unitary,
    max_abs,
    projection_onto_range,
)


@dataclass(frozen=True, eq=False)
class MatrixUnitSystem:
    """Family ``{f_ij}`` stored as an array of shape ``(n, n, d, d)``.

    Tensor order throughout the package is (system) x (ancilla), so the
    embedding ``x -> x (x) 1_k`` has ``f_ij = kron(e_ij, I_k)``.
    """

    units: np.ndarray

    def __post_init__(self):
        units = np.asarray(self.units, dtype=np.complex128)
        if units.ndim != 4 or units.shape[0] != units.shape[1] or units.shape[2] != units.shape[3]:
            raise ValueError(f"matrix units must have shape (n, n, d, d), got {units.shape}")
        object.__setattr__(self, "units", units)

    @property
    def n(self) -> int:
        return self.units.shape[0]

    @property
    def d(self) -> int:
        return self.units.shape[2]

    def __getitem__(self, ij) -> np.ndarray:
        return self.units[ij]

    def image(self, x: np.ndarray) -> np.ndarray:
        """The embedding ``x -> sum_ij x_ij f_ij`` applied to ``x`` in M_n."""
        x = np.asarray(x)
        if x.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} matrix, got {x.shape}")
        return np.einsum("ij,ijpq->pq", x, self.units)

    def conjugate(self, v: np.ndarray) -> "MatrixUnitSystem":
        """``v f_ij v*``."""
        return MatrixUnitSystem(v @ self.units @ adjoint(v))


@dataclass(frozen=True)
class UnitsReport:
    passed: bool
    max_residual: float
    worst_relation: str

    def as_dict(self) -> dict:
        return {
            "pass": self.passed,
            "max_residual": self.max_residual,
            "worst_relation": self.worst_relation,
        }


def standard_units(n: int) -> MatrixUnitSystem:
    if n < 1:
        raise ValueError("n must be positive")
    units = np.zeros((n, n, n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            units[i, j, i, j] = 1
    return MatrixUnitSystem(units)


def tensor_units(n: int, k: int) -> MatrixUnitSystem:
    """Units of ``x -> x (x) 1_k`` inside M_n (x) M_k."""
    e = standard_units(n).units
    return MatrixUnitSystem(np.einsum("ijab,pq->ijapbq", e, np.eye(k)).reshape(n, n, n * k, n * k))


def ancilla_side_units(n: int, k: int) -> MatrixUnitSystem:
    """Units of ``y -> 1_k (x) y`` inside M_k (x) M_n."""
    e = standard_units(n).units
    return MatrixUnitSystem(np.einsum("pq,ijab->ijpaqb", np.eye(k), e).reshape(n, n, n * k, n * k))


def validate_units(sys: MatrixUnitSystem, pol: TolerancePolicy = DEFAULT_POLICY) -> UnitsReport:
    """Check ``f_ij f_kl = delta_jk f_il``, ``f_ij* = f_ji`` and ``sum_i f_ii = 1``.

    Product relations are examined first, then adjoints, then the unit;
    the first relation attaining the largest residual is reported.
    """
    f = sys.units
    n, d = sys.n, sys.d
    worst, label = 0.0, "none"

    def consider(res: float, name: str):
        nonlocal worst, label
        if res > worst:
            worst, label = res, name

    # products[i, j, k, l] = f_ij f_kl
    products = np.einsum("ijab,klbc->ijklac", f, f)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    target = f[i, l] if j == k else 0
                    rhs = f"f_{i+1}{l+1}" if j == k else "0"
                    consider(max_abs(products[i, j, k, l] - target),
                             f"f_{i+1}{j+1}*f_{k+1}{l+1} = {rhs}")
    for i in range(n):
        for j in range(n):
            consider(max_abs(adjoint(f[i, j]) - f[j, i]), f"f_{i+1}{j+1}^* = f_{j+1}{i+1}")
    consider(max_abs(np.einsum("iiab->ab", f) - np.eye(d)), "sum_i f_ii = 1")
    return UnitsReport(worst < pol.eps_eq, worst, label)


def random_unital_embedding(n: int, d: int, rng) -> MatrixUnitSystem:
    """``u (e_ij (x) I_{d/n}) u*`` for a Haar unitary ``u``.

    ``rng`` is a ``numpy.random.Generator`` or an integer seed.
    """
    if n < 1 or d % n:
        raise ValueError(f"no unital embedding of M_{n} into M_{d}: {n} does not divide {d}")
    rng = np.random.default_rng(rng)
    return tensor_units(n, d // n).conjugate(haar_unitary(d, rng))


def intertwiner(
    f: MatrixUnitSystem, fp: MatrixUnitSystem, pol: TolerancePolicy = DEFAULT_POLICY
) -> np.ndarray:
    """Unitary ``u`` with ``u fp_ij u* = f_ij`` for all ``i, j``.

    Built as ``sum_k f_k1 w fp_1k`` where ``w`` carries an eigenbasis of
    ``range(fp_11)`` onto one of ``range(f_11)`` in index order.
    """
    if f.n != fp.n or f.d != fp.d:
        raise ValueError("unit systems differ in order or ambient dimension")
    src = projection_onto_range(fp[0, 0], pol)
    dst = projection_onto_range(f[0, 0], pol)
    if src.shape[1] != dst.shape[1]:
        raise ValueError("f_11 and fp_11 have different ranks; systems are not unital in M_d")
    w = dst @ adjoint(src)
    return sum(f[k, 0] @ w @ fp[0, k] for k in range(f.n))


def units_from_unitaries(
    n: int, unitaries: Sequence[np.ndarray], pol: TolerancePolicy = DEFAULT_POLICY
) -> MatrixUnitSystem:
    """Matrix units in M_n (x) M_d with ``f_11 = e_11 (x) 1`` and ``f_1j = e_1j (x) u_j``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if len(unitaries) != n - 1:
        raise ValueError(f"expected {n - 1} unitaries u_2..u_n, got {len(unitaries)}")
    us = [as_matrix(u) for u in unitaries]
    d = us[0].shape[0]
    for j, u in enumerate(us, start=2):
        if u.shape != (d, d):
            raise ValueError("unitaries must share a dimension")
        if not is_unitary(u, pol):
            raise ValueError(f"u_{j} is not unitary")
    e = standard_units(n)
    first_row = [np.kron(e[0, 0], np.eye(d))] + [np.kron(e[0, j], u) for j, u in enumerate(us, start=1)]
    units = np.empty((n, n, n * d, n * d), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            units[i, j] = adjoint(first_row[i]) @ first_row[j]
    return MatrixUnitSystem(units)


def generator_blocks(b: np.ndarray, n: int) -> np.ndarray:
    """The ``g_ij`` in ``b = sum_ij e_ij (x) g_ij``, as an ``(n, n, d, d)`` array."""
    b = as_matrix(b)
    if b.shape[0] % n:
        raise ValueError(f"dimension {b.shape[0]} is not divisible by {n}")
    d = b.shape[0] // n
    return b.reshape(n, d, n, d).transpose(0, 2, 1, 3).copy()


def assemble_blocks(g: np.ndarray) -> np.ndarray:
    """Inverse of :func:`generator_blocks`."""
    g = np.asarray(g)
    n, _, d, _ = g.shape
    return g.transpose(0, 2, 1, 3).reshape(n * d, n * d)


def direct_sum_units(*systems: MatrixUnitSystem) -> MatrixUnitSystem:
    n = systems[0].n
    if any(s.n != n for s in systems):
        raise ValueError("systems must share their order")
    total = sum(s.d for s in systems)
    units = np.zeros((n, n, total, total), dtype=np.complex128)
    off = 0
    for s in systems:
        units[:, :, off:off + s.d, off:off + s.d] = s.units
        off += s.d
    return MatrixUnitSystem(units)
