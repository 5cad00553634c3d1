"""Choi-matrix calculus for linear maps on M_n.

Index convention: ``choi[i*n + k, j*n + l] = C(i,j;k,l) = T(e_ij)[k, l]``,
i.e. ``C_T = sum_ij e_ij (x) T(e_ij)`` with the input copy as the first
tensor factor.  Coefficients are taken against the unnormalized trace.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .matrix_core import (
    DEFAULT_POLICY,
    TolerancePolicy,
    TraceFunctional,
    adjoint,
    as_matrix,
    is_unitary,
    max_abs,
    min_eigenvalue,
    unit_matrix,
)
from .matrix_units import MatrixUnitSystem, validate_units
from .tracial import FiniteTracialAlgebra


@dataclass(frozen=True, eq=False)
class Channel:
    n: int
    choi: np.ndarray

    def __post_init__(self):
        choi = as_matrix(self.choi)
        if choi.shape != (self.n ** 2, self.n ** 2):
            raise ValueError(f"Choi matrix for n={self.n} must be {self.n**2}x{self.n**2}")
        object.__setattr__(self, "choi", choi)

    @classmethod
    def from_choi(cls, choi) -> "Channel":
        choi = as_matrix(choi)
        n = int(round(np.sqrt(choi.shape[0])))
        if n * n != choi.shape[0]:
            raise ValueError("Choi matrix dimension is not a perfect square")
        return cls(n, choi)

    def coefficients(self) -> np.ndarray:
        """``C[i, j, k, l] = C(i,j;k,l)``."""
        n = self.n
        return self.choi.reshape(n, n, n, n).transpose(0, 2, 1, 3)

    def images(self) -> np.ndarray:
        """``T(e_ij)`` stacked as an ``(n, n, n, n)`` array."""
        return self.coefficients()

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return apply_choi(self, x)


@dataclass(frozen=True)
class ChannelReport:
    cp: bool
    unital: bool
    trace_preserving: bool
    min_eigenvalue: float
    unital_residual: float
    tp_residual: float

    @property
    def flags(self) -> tuple[bool, bool, bool]:
        return (self.cp, self.unital, self.trace_preserving)

    @property
    def passed(self) -> bool:
        return all(self.flags)

    def as_dict(self) -> dict:
        return {
            "cp": self.cp,
            "unital": self.unital,
            "tp": self.trace_preserving,
            "min_eigenvalue": None if np.isnan(self.min_eigenvalue) else self.min_eigenvalue,
            "unital_residual": self.unital_residual,
            "tp_residual": self.tp_residual,
        }


LinearMap = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


def choi_of_map(n: int, T: LinearMap) -> Channel:
    """Assemble ``sum_ij e_ij (x) T(e_ij)``.

    ``T`` is either a callable on n x n matrices or the array of its values
    ``T(e_ij)`` with shape ``(n, n, n, n)``.
    """
    if callable(T):
        images = np.array([[T(unit_matrix(n, i, j)) for j in range(n)] for i in range(n)],
                          dtype=np.complex128)
    else:
        images = np.asarray(T, dtype=np.complex128)
    if images.shape != (n, n, n, n):
        raise ValueError(f"map values must have shape {(n, n, n, n)}, got {images.shape}")
    choi = images.transpose(0, 2, 1, 3).reshape(n * n, n * n)
    return Channel(n, choi)


def apply_choi(ch: Channel, x: np.ndarray) -> np.ndarray:
    """``T(x) = sum_ij x_ij sum_kl C(i,j;k,l) e_kl``."""
    x = np.asarray(x)
    if x.shape != (ch.n, ch.n):
        raise ValueError(f"expected a {ch.n}x{ch.n} matrix, got {x.shape}")
    return np.einsum("ij,ijkl->kl", x, ch.coefficients())


def partial_traces(ch: Channel) -> tuple[np.ndarray, np.ndarray]:
    """``((Tr (x) id)(C), (id (x) Tr)(C))``, i.e. ``T(1)`` and ``[Tr T(e_ij)]``."""
    c = ch.coefficients()
    return np.einsum("iikl->kl", c), np.einsum("ijkk->ij", c)


def verify_channel(ch: Channel, pol: TolerancePolicy = DEFAULT_POLICY) -> ChannelReport:
    eye = np.eye(ch.n)
    t_one, traces = partial_traces(ch)
    unital_res = max_abs(t_one - eye)
    tp_res = max_abs(traces - eye)
    if max_abs(ch.choi - adjoint(ch.choi)) > pol.eps_eq:
        # not Hermiticity preserving, so not CP
        lam, cp = float("nan"), False
    else:
        lam = min_eigenvalue(ch.choi, pol)
        cp = lam >= -pol.eps_psd
    return ChannelReport(cp, unital_res < pol.eps_eq, tp_res < pol.eps_eq, lam, unital_res, tp_res)


def channel_distance(a: Channel, b: Channel) -> float:
    """``||C_a - C_b||_HS / n``."""
    if a.n != b.n:
        raise ValueError("channels act on different dimensions")
    return float(np.linalg.norm(a.choi - b.choi)) / a.n


# ---------------------------------------------------------------------------
# ancilla realizations


def ancilla_partial_trace(y: np.ndarray, n: int, ancilla: FiniteTracialAlgebra) -> np.ndarray:
    """``(id_n (x) tau_N)(y)`` for ``y`` in M_n (x) M_D, blocks of N weighted."""
    D = ancilla.dim
    y = np.asarray(y).reshape(n, D, n, D).transpose(0, 2, 1, 3)
    out = np.empty((n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            out[a, b] = ancilla.trace(y[a, b])
    return out


def composite_trace(n: int, ancilla: FiniteTracialAlgebra) -> TraceFunctional:
    """The trace ``tr_n (x) tau_N`` on M_n (x) N."""
    return lambda y: complex(np.trace(ancilla_partial_trace(y, n, ancilla))) / n


def in_composite(u: np.ndarray, n: int, ancilla: FiniteTracialAlgebra,
                 pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    """Whether ``u`` lies in M_n (x) N, i.e. every ``(a, b)`` slice is block diagonal."""
    D = ancilla.dim
    slices = np.asarray(u).reshape(n, D, n, D).transpose(0, 2, 1, 3)
    return all(ancilla.is_element(slices[a, b], pol) for a in range(n) for b in range(n))


def channel_from_ancilla(
    u: np.ndarray, ancilla: FiniteTracialAlgebra, pol: TolerancePolicy = DEFAULT_POLICY
) -> Channel:
    """Choi matrix of ``x -> (id_n (x) tau_N)(u (x (x) 1_N) u*)``."""
    u = as_matrix(u)
    D = ancilla.dim
    if u.shape[0] % D:
        raise ValueError(f"unitary dimension {u.shape[0]} is not a multiple of the ancilla dimension {D}")
    n = u.shape[0] // D
    if not is_unitary(u, pol):
        raise ValueError("u is not unitary")
    if not in_composite(u, n, ancilla, pol):
        raise ValueError("u does not lie in M_n (x) N")
    images = np.empty((n, n, n, n), dtype=np.complex128)
    ud = adjoint(u)
    for i in range(n):
        for j in range(n):
            y = u @ np.kron(unit_matrix(n, i, j), np.eye(D)) @ ud
            images[i, j] = ancilla_partial_trace(y, n, ancilla)
    return choi_of_map(n, images)


def embedding_adjoint(
    y: np.ndarray,
    beta_units: MatrixUnitSystem,
    tau: TraceFunctional,
    pol: TolerancePolicy = DEFAULT_POLICY,
    check: bool = True,
) -> np.ndarray:
    """``beta*(y) = sum_ij n <y, f_ij>_tau e_ij`` where ``f_ij = beta(e_ij)``."""
    if check:
        report = validate_units(beta_units, pol)
        if not report.passed:
            raise ValueError(f"invalid matrix units: {report.worst_relation}")
    n = beta_units.n
    y = np.asarray(y)
    out = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            out[i, j] = n * tau(beta_units[j, i] @ y)
    return out


def factorized_channel(
    alpha_units: MatrixUnitSystem,
    beta_units: MatrixUnitSystem,
    tau: TraceFunctional,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> Channel:
    """The map ``beta* o alpha`` for two unital embeddings into the same tracial algebra."""
    n = alpha_units.n
    images = np.array([[embedding_adjoint(alpha_units[i, j], beta_units, tau, pol, check=(i == j == 0))
                        for j in range(n)] for i in range(n)])
    return choi_of_map(n, images)


# ---------------------------------------------------------------------------
# named maps


def identity_channel(n: int) -> Channel:
    return choi_of_map(n, lambda x: x)


def depolarizing_channel(n: int) -> Channel:
    """``x -> tr_n(x) 1``."""
    return choi_of_map(n, lambda x: np.trace(x) / n * np.eye(n))


def transpose_map(n: int) -> Channel:
    return choi_of_map(n, lambda x: x.T)


def conjugation_channel(v: np.ndarray) -> Channel:
    """``x -> v x v*``."""
    v = as_matrix(v)
    return choi_of_map(v.shape[0], lambda x: v @ x @ adjoint(v))
