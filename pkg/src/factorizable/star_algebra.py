"""Finite-dimensional *-subalgebras of M_d.

A subalgebra is stored as a Hilbert-Schmidt orthonormal basis.  Generated
algebras come from span saturation; commutants and centers from null
spaces of stacked commutator maps; the Wedderburn block data from the
spectral projections of a random self-adjoint central element.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .matrix_core import (
    DEFAULT_POLICY,
    TolerancePolicy,
    TraceFunctional,
    adjoint,
    commutator_map,
    hs_inner,
    kernel_rows,
    max_abs,
    null_space,
    orthonormal_basis,
    orthonormal_rows,
)
from .matrix_units import MatrixUnitSystem, validate_units
from .tracial import FiniteTracialAlgebra

CLUSTER_GAP = 1e-6
MAX_CENTER_ATTEMPTS = 5


@dataclass(frozen=True, eq=False)
class StarSubalgebra:
    ambient_dim: int
    basis: np.ndarray  # (k, d, d), HS-orthonormal
    contains_unit: bool
    generators: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def flat(self) -> np.ndarray:
        return self.basis.reshape(self.dim, -1)

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        """HS coordinates of ``x`` (or a stack of matrices) along the basis."""
        x = np.asarray(x)
        flat = x.reshape(-1, self.ambient_dim ** 2)
        return flat @ np.conj(self.flat).T

    def project(self, x: np.ndarray) -> np.ndarray:
        c = self.coordinates(x)
        return (c @ self.flat).reshape(np.shape(x))

    def residual(self, x: np.ndarray) -> float:
        """Largest entrywise distance from ``x`` (or each of a stack) to the span."""
        return max_abs(np.asarray(x) - self.project(x))

    def contains(self, x: np.ndarray, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
        return self.residual(x) < pol.eps_rank * 10

    def spanning_set(self) -> np.ndarray:
        """A set whose commutant is the commutant of the algebra."""
        if self.generators is None:
            return self.basis
        return np.concatenate([self.generators, adjoint(self.generators)])


@dataclass(frozen=True)
class BlockStructure:
    blocks: list[tuple[int, int]]  # (block_dim m_j, multiplicity k_j)
    central_projections: list[np.ndarray] = field(repr=False)


@dataclass(frozen=True)
class KernelIdeal:
    projection: np.ndarray
    basis: list[np.ndarray]

    @property
    def dim(self) -> int:
        return len(self.basis)


def _extend(q: np.ndarray, candidates: np.ndarray, pol: TolerancePolicy, chunk: int = 64) -> np.ndarray:
    """New orthonormal rows spanning ``candidates`` modulo the row span of ``q``.

    Candidates are absorbed in chunks so that later ones are projected
    against everything found so far and mostly vanish before any SVD.
    """
    found = []
    for start in range(0, candidates.shape[0], chunk):
        r = candidates[start:start + chunk]
        basis = np.vstack([q] + found) if found else q
        for _ in range(2):
            if basis.shape[0]:
                r = r - (r @ np.conj(basis).T) @ basis
        if np.max(np.linalg.norm(r, axis=1)) <= pol.eps_rank:
            continue
        new = orthonormal_rows(r, pol)
        if new.shape[0]:
            found.append(new)
    return np.vstack(found) if found else q[:0]


def generated_algebra(
    generators: Sequence[np.ndarray],
    unital: bool = True,
    pol: TolerancePolicy = DEFAULT_POLICY,
    ambient_dim: Optional[int] = None,
) -> StarSubalgebra:
    """Smallest *-closed, multiplicatively closed span containing ``generators``.

    Saturation multiplies every newly found basis element by the *-closed
    generating set until a full round adds nothing.  The span of all words
    in a *-closed set is already *-closed, so this reaches the same algebra
    as saturating under all pairwise products.
    """
    gens = [np.asarray(g, dtype=np.complex128) for g in generators]
    if gens:
        d = gens[0].shape[0]
        if any(g.shape != (d, d) for g in gens):
            raise ValueError("generators must share a square shape")
    elif ambient_dim is None:
        raise ValueError("ambient_dim is required when there are no generators")
    else:
        d = ambient_dim
    seeds = gens + [adjoint(g) for g in gens]
    if unital:
        seeds.append(np.eye(d, dtype=np.complex128))
    if not seeds:
        return StarSubalgebra(d, np.zeros((0, d, d), dtype=np.complex128), False, np.zeros((0, d, d)))

    s = orthonormal_rows(np.array([x.reshape(-1) for x in seeds]), pol)
    q = s
    frontier = s
    s_mats = s.reshape(-1, d, d)
    while frontier.shape[0] and q.shape[0] < d * d:
        f_mats = frontier.reshape(-1, d, d)
        products = (s_mats[:, None] @ f_mats[None, :]).reshape(-1, d * d)
        new = _extend(q, products, pol)
        q = np.vstack([q, new])
        frontier = new
    basis = q.reshape(-1, d, d)
    alg = StarSubalgebra(d, basis, False, np.array(gens).reshape(-1, d, d) if gens else None)
    has_unit = alg.residual(np.eye(d)) < 10 * pol.eps_rank
    return StarSubalgebra(d, basis, has_unit, alg.generators)


def commutant(alg: StarSubalgebra, pol: TolerancePolicy = DEFAULT_POLICY) -> StarSubalgebra:
    """``{x : x g = g x}`` over the generators (or basis) of ``alg``."""
    d = alg.ambient_dim
    span = alg.spanning_set()
    if len(span) == 0:
        basis = np.eye(d * d, dtype=np.complex128).reshape(-1, d, d)
    else:
        stacked = np.vstack([commutator_map(g) for g in span])
        basis = np.array(null_space(stacked, pol)).reshape(-1, d, d)
    return StarSubalgebra(d, basis, True)


def center(alg: StarSubalgebra, pol: TolerancePolicy = DEFAULT_POLICY) -> StarSubalgebra:
    """``alg`` intersected with its commutant, solved in the algebra's own coordinates.

    Commutators of algebra elements stay in the algebra, so the constraint
    for each generator is a ``k x k`` system rather than ``d^2 x d^2``.
    """
    d, k = alg.ambient_dim, alg.dim
    span = alg.spanning_set()
    rows = []
    for g in span:
        comm = alg.basis @ g - g @ alg.basis  # (k, d, d)
        rows.append(alg.coordinates(comm).T)  # column c: coordinates of [a_c, g]
    if not rows:
        return alg
    coeffs = np.conj(kernel_rows(np.vstack(rows), pol))
    basis = np.einsum("ck,kij->cij", coeffs, alg.basis)
    has_unit = alg.contains_unit
    return StarSubalgebra(d, basis, has_unit)


def _cluster(values: np.ndarray, gap: float) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] < gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def block_structure(
    alg: StarSubalgebra,
    rng=None,
    pol: TolerancePolicy = DEFAULT_POLICY,
    cluster_gap: float = CLUSTER_GAP,
) -> BlockStructure:
    """Wedderburn data ``[(m_j, k_j)]`` and minimal central projections of a unital algebra.

    ``rng`` seeds the generic central element (default seed 0).  Raises
    ``RuntimeError`` when five random elements all fail to separate the
    center.
    """
    if not alg.contains_unit:
        raise ValueError("block_structure requires an algebra containing the identity")
    rng = np.random.default_rng(0 if rng is None else rng)
    z = center(alg, pol)
    herm = np.concatenate([(z.basis + adjoint(z.basis)) / 2,
                           (z.basis - adjoint(z.basis)) / 2j])
    for _ in range(MAX_CENTER_ATTEMPTS):
        h = np.einsum("k,kij->ij", rng.standard_normal(len(herm)), herm)
        w, v = np.linalg.eigh((h + adjoint(h)) / 2)
        groups = _cluster(w, cluster_gap)
        if len(groups) != z.dim:
            continue
        projections = [v[:, g] @ adjoint(v[:, g]) for g in groups]
        if max(alg.residual(p) for p in projections) > 1e-7:
            continue
        break
    else:
        raise RuntimeError("could not separate the center with a generic element")

    def first_index(p):
        return int(np.argmax(np.abs(np.diag(p)) > 1e-6))

    projections.sort(key=first_index)
    blocks = []
    for p in projections:
        ideal = alg.coordinates(p @ alg.basis)  # p a_k, in algebra coordinates
        span_dim = int(np.sum(np.linalg.svd(ideal, compute_uv=False) > pol.eps_rank))
        m = int(round(np.sqrt(span_dim)))
        if m * m != span_dim:
            raise RuntimeError(f"central summand has non-square dimension {span_dim}")
        rank = int(round(np.trace(p).real))
        blocks.append((m, rank // m))
    return BlockStructure(blocks, projections)


def same_span(a: StarSubalgebra, b: StarSubalgebra) -> tuple[bool, float]:
    """Equality of spans: equal dimension plus mutual residuals."""
    if a.dim != b.dim:
        return False, float("inf")
    res = max(a.residual(b.basis) if b.dim else 0.0, b.residual(a.basis) if a.dim else 0.0)
    return True, res


def conditional_expectation(
    x: np.ndarray,
    units: MatrixUnitSystem,
    tau: TraceFunctional,
    pol: TolerancePolicy = DEFAULT_POLICY,
    check: bool = True,
) -> np.ndarray:
    """``E(x) = sum_ij n <x, f_ij>_tau f_ij``, the tau-preserving expectation onto span{f_ij}."""
    if check:
        report = validate_units(units, pol)
        if not report.passed:
            raise ValueError(f"invalid matrix units: {report.worst_relation}")
    n = units.n
    out = np.zeros_like(units.units[0, 0])
    for i in range(n):
        for j in range(n):
            out = out + n * hs_inner(x, units[i, j], tau) * units[i, j]
    return out


def expectation_onto_span(
    x: np.ndarray,
    spanning: Sequence[np.ndarray],
    tau: TraceFunctional,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> np.ndarray:
    """Orthogonal projection onto a span in the ``tau``-inner product."""
    q = orthonormal_basis(spanning, lambda a, b: hs_inner(a, b, tau), pol)
    out = np.zeros_like(np.asarray(x, dtype=np.complex128))
    for v in q:
        out = out + hs_inner(x, v, tau) * v
    return out


def trace_kernel_ideal(
    blocks: Sequence[int], weights: Sequence[float], pol: TolerancePolicy = DEFAULT_POLICY
) -> KernelIdeal:
    """``{a : tau(a* a) = 0}`` for the block trace with the given (unnormalized) weights.

    It is the sum of the blocks carrying zero weight.
    """
    if len(blocks) != len(weights):
        raise ValueError("one weight per block is required")
    if any(w < -pol.eps_eq for w in weights):
        raise ValueError("trace weights must be non-negative")
    total = sum(blocks)
    projection = np.zeros((total, total), dtype=np.complex128)
    basis = []
    off = 0
    for dj, w in zip(blocks, weights):
        if w <= pol.eps_eq:
            projection[off:off + dj, off:off + dj] = np.eye(dj)
            for p in range(dj):
                for q in range(dj):
                    e = np.zeros((total, total), dtype=np.complex128)
                    e[off + p, off + q] = 1
                    basis.append(e)
        off += dj
    return KernelIdeal(projection, basis)


def algebra_kernel_ideal(algebra: FiniteTracialAlgebra, pol: TolerancePolicy = DEFAULT_POLICY) -> KernelIdeal:
    return trace_kernel_ideal(algebra.blocks, algebra.weights, pol)


def trace_gram(alg: StarSubalgebra, tau: TraceFunctional) -> np.ndarray:
    """``G[a, b] = tau(x_a* x_b)`` over the basis of ``alg``; PSD for a positive trace."""
    k = alg.dim
    g = np.empty((k, k), dtype=np.complex128)
    adj = adjoint(alg.basis)
    for a in range(k):
        for b in range(k):
            g[a, b] = tau(adj[a] @ alg.basis[b])
    return (g + adjoint(g)) / 2


def kernel_in_subalgebra(
    alg: StarSubalgebra, grams: Sequence[np.ndarray], pol: TolerancePolicy = DEFAULT_POLICY
) -> np.ndarray:
    """Elements of ``alg`` annihilated by every quadratic form in ``grams``.

    With a single Gram matrix this is ``{a in alg : tau(a* a) = 0}``; with
    several it is the intersection of the corresponding kernels.
    """
    total = sum(grams)
    w, v = np.linalg.eigh(total)
    coeffs = v[:, w < pol.eps_eq]
    return np.einsum("kc,kij->cij", coeffs, alg.basis)
