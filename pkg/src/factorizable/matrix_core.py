"""Dense complex linear algebra shared by the rest of the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Every
numerical decision (equality, positivity, rank) goes through a
:class:`TolerancePolicy` so that thresholds are explicit and uniform.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

TraceFunctional = Callable[[np.ndarray], complex]


@dataclass(frozen=True)
class TolerancePolicy:
    eps_eq: float = 1e-9
    eps_psd: float = 1e-9
    eps_rank: float = 1e-9

    def __post_init__(self):
        for name in ("eps_eq", "eps_psd", "eps_rank"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def uniform(cls, eps: float) -> "TolerancePolicy":
        return cls(eps, eps, eps)


DEFAULT_POLICY = TolerancePolicy()


def as_matrix(m) -> np.ndarray:
    """Coerce to a square complex128 array, raising on any other shape."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def full_trace(x: np.ndarray) -> complex:
    """Unnormalized trace ``Tr``."""
    return complex(np.trace(x))


def normalized_trace(x: np.ndarray) -> complex:
    """Normalized trace ``tr``, with ``tr(I) = 1``."""
    return complex(np.trace(x)) / x.shape[0]


def hs_inner(a: np.ndarray, b: np.ndarray, tau: TraceFunctional = full_trace) -> complex:
    """Inner product ``<a, b>_tau = tau(b* a)``, linear in ``a``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return tau(adjoint(b) @ a)


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def allclose(a, b, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    return max_abs(np.asarray(a) - np.asarray(b)) < pol.eps_eq


def hermitian_part(m: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    m = as_matrix(m)
    if max_abs(m - adjoint(m)) > pol.eps_eq:
        raise ValueError("matrix is not Hermitian within eps_eq")
    return (m + adjoint(m)) / 2


def min_eigenvalue(m: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(m, pol))[0])


def is_psd(m: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    return min_eigenvalue(m, pol) >= -pol.eps_psd


def numerical_rank(m: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY) -> int:
    s = np.linalg.svd(np.asarray(m), compute_uv=False)
    return int(np.sum(s > pol.eps_rank))


def orthonormal_basis(
    vectors: Sequence[np.ndarray],
    inner: Callable[[np.ndarray, np.ndarray], complex] = hs_inner,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> list[np.ndarray]:
    """Gram-Schmidt with one re-orthogonalization pass.

    Vectors whose residual norm is not above ``eps_rank`` are dropped, so
    the output length equals the dimension of the span.
    """
    basis: list[np.ndarray] = []
    for v in vectors:
        w = np.array(v, dtype=np.complex128)
        for _ in range(2):
            for q in basis:
                w = w - inner(w, q) * q
        norm = np.sqrt(max(inner(w, w).real, 0.0))
        if norm > pol.eps_rank:
            basis.append(w / norm)
    return basis


def orthonormal_rows(
    rows: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY
) -> np.ndarray:
    """Orthonormal basis (as rows) of the row span of a 2-D array.

    Euclidean inner product; this is the vectorized path used for
    flattened matrices under the Hilbert-Schmidt inner product.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.complex128))
    if rows.shape[0] == 0:
        return rows
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    return vh[s > pol.eps_rank]


def null_space(linear_map: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY) -> list[np.ndarray]:
    """Kernel of a linear map acting on flattened ``d x d`` matrices.

    ``linear_map`` has ``d**2`` columns (row-major flattening).  Returns an
    orthonormal (Hilbert-Schmidt) list of ``d x d`` matrices.
    """
    linear_map = np.atleast_2d(np.asarray(linear_map, dtype=np.complex128))
    cols = linear_map.shape[1]
    d = int(round(np.sqrt(cols)))
    if d * d != cols:
        raise ValueError("linear map does not act on a square matrix space")
    if linear_map.shape[0] == 0:
        return list(np.eye(cols, dtype=np.complex128).reshape(cols, d, d))
    return [np.conj(row).reshape(d, d) for row in kernel_rows(linear_map, pol)]


def kernel_rows(a: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """Rows ``v^H`` with ``a v = 0``, orthonormal, at singular-value cutoff ``eps_rank``."""
    m, n = a.shape
    if m > n:
        # same kernel, square problem
        a = np.linalg.qr(a, mode="r")
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = int(np.sum(s > pol.eps_rank))
    return vh[rank:]


def commutator_map(g: np.ndarray) -> np.ndarray:
    """Matrix of ``x -> x g - g x`` on row-major flattened ``x``."""
    d = g.shape[0]
    eye = np.eye(d)
    return np.kron(eye, g.T) - np.kron(g, eye)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def is_unitary(u: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    u = as_matrix(u)
    return max_abs(u @ adjoint(u) - np.eye(u.shape[0])) < pol.eps_eq


def unit_matrix(n: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1
    return e


def projection_onto_range(p: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """Isometry (columns) onto the range of a Hermitian projection."""
    w, v = np.linalg.eigh(hermitian_part(p, pol))
    return v[:, w > 0.5]
