"""Finite-dimensional traces on M_n * M_n and the map to factorizable channels.

A trace is given by a finite tracial algebra ``(M, tau_M)`` together with two
unital systems of matrix units ``g`` (first copy) and ``f`` (second copy),
one pair per block of ``M``; the trace is ``tau_M`` composed with the
representation they determine.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channels import Channel, channel_distance
from .matrix_core import (
    DEFAULT_POLICY,
    TolerancePolicy,
    adjoint,
    as_matrix,
    max_abs,
    projection_onto_range,
)
from .matrix_units import (
    MatrixUnitSystem,
    direct_sum_units,
    random_unital_embedding,
    standard_units,
    tensor_units,
    ancilla_side_units,
    validate_units,
)
from .star_algebra import (
    StarSubalgebra,
    block_structure,
    generated_algebra,
    kernel_in_subalgebra,
    trace_gram,
)
from .tracial import FiniteTracialAlgebra, check_weights


@dataclass(frozen=True, eq=False)
class FiniteDimTrace:
    n: int
    algebra: FiniteTracialAlgebra
    g_units: tuple[MatrixUnitSystem, ...]
    f_units: tuple[MatrixUnitSystem, ...]

    @property
    def g(self) -> MatrixUnitSystem:
        """The first-copy units assembled block-diagonally in M_D."""
        return direct_sum_units(*self.g_units)

    @property
    def f(self) -> MatrixUnitSystem:
        return direct_sum_units(*self.f_units)

    def represent(self, side: int, x: np.ndarray) -> np.ndarray:
        """Image of ``iota_side(x)`` in M_D."""
        if side not in (1, 2):
            raise ValueError("side must be 1 or 2")
        return (self.g if side == 1 else self.f).image(x)


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """``values[i, j, k, l] = tau(f_kl* g_ij)``."""

    n: int
    values: np.ndarray


def trace_from_pair(
    n: int,
    g_units,
    f_units,
    algebra: FiniteTracialAlgebra,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> FiniteDimTrace:
    """Package two unital unit systems in ``algebra`` as a trace on M_n * M_n.

    Units may be given per block (a sequence) or as one block-diagonal
    system on the whole of M_D.
    """
    def split(units, name):
        if isinstance(units, MatrixUnitSystem):
            if units.d != algebra.dim:
                raise ValueError(f"{name}: ambient dimension {units.d} != {algebra.dim}")
            for i in range(n):
                for j in range(n):
                    if not algebra.is_element(units[i, j], pol):
                        raise ValueError(f"{name}: units are not block diagonal")
            units = [MatrixUnitSystem(algebra.block(units.units, b)) for b in range(len(algebra.blocks))]
        units = tuple(units)
        if len(units) != len(algebra.blocks):
            raise ValueError(f"{name}: one unit system per block is required")
        for b, (sys, dj) in enumerate(zip(units, algebra.blocks)):
            if dj % n:
                raise ValueError(f"block {b} has dimension {dj}, not divisible by n={n}")
            if sys.n != n or sys.d != dj:
                raise ValueError(f"{name}: block {b} system has shape ({sys.n}, {sys.d}), expected ({n}, {dj})")
            report = validate_units(sys, pol)
            if not report.passed:
                raise ValueError(f"{name}: block {b} violates {report.worst_relation} "
                                 f"(residual {report.max_residual:.3g})")
        return units

    if n < 1:
        raise ValueError("n must be positive")
    return FiniteDimTrace(n, algebra, split(g_units, "g_units"), split(f_units, "f_units"))


def evaluate_word(tr: FiniteDimTrace, word: Sequence[tuple[int, np.ndarray]]) -> complex:
    """``tau_M`` of the product of the represented letters; the empty word gives 1."""
    prod = np.eye(tr.algebra.dim, dtype=np.complex128)
    for side, x in word:
        x = np.asarray(x)
        if x.shape != (tr.n, tr.n):
            raise ValueError(f"letter has shape {x.shape}, expected {(tr.n, tr.n)}")
        prod = prod @ tr.represent(side, x)
    return tr.algebra.trace(prod)


def correlation_matrix(tr: FiniteDimTrace) -> CorrelationMatrix:
    n = tr.n
    values = np.zeros((n, n, n, n), dtype=np.complex128)
    for g, f, d, c in zip(tr.g_units, tr.f_units, tr.algebra.blocks, tr.algebra.weights):
        # tr_d(f_kl* g_ij) = tr_d(f_lk g_ij)
        values += c / d * np.einsum("lkpq,ijqp->ijkl", f.units, g.units)
    return CorrelationMatrix(n, values)


def phi(tr: FiniteDimTrace) -> Channel:
    """The factorizable channel with ``C(i,j;k,l) = n tau(f_kl* g_ij)``."""
    n = tr.n
    k = correlation_matrix(tr).values
    return Channel(n, n * k.transpose(0, 2, 1, 3).reshape(n * n, n * n))


def phi_apply(tr: FiniteDimTrace, x: np.ndarray) -> np.ndarray:
    """``Phi(tau)(x) = sum_ij n tau(iota_2(e_ij)* iota_1(x)) e_ij``, evaluated word by word."""
    n = tr.n
    e = standard_units(n)
    out = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            out[i, j] = n * evaluate_word(tr, [(2, e[j, i]), (1, x)])
    return out


def same_phi_fiber(t1: FiniteDimTrace, t2: FiniteDimTrace, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    if t1.n != t2.n:
        raise ValueError("traces live on different free products")
    return max_abs(correlation_matrix(t1).values - correlation_matrix(t2).values) < pol.eps_eq


def phi_distance(t1: FiniteDimTrace, t2: FiniteDimTrace) -> float:
    return channel_distance(phi(t1), phi(t2))


# ---------------------------------------------------------------------------
# convex structure


def convex_combine(
    traces: Sequence[FiniteDimTrace],
    coeffs: Sequence[float],
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> FiniteDimTrace:
    """Direct sum of the representations with trace ``sum_k c_k tau_k``.

    Blocks keep their order and are concatenated; weights are scaled by the
    coefficients (zero coefficients leave zero-weight blocks in place).
    """
    if not traces:
        raise ValueError("at least one trace is required")
    if len(coeffs) != len(traces):
        raise ValueError("one coefficient per trace is required")
    check_weights(coeffs, pol)
    n = traces[0].n
    if any(t.n != n for t in traces):
        raise ValueError("traces must share n")
    blocks, weights, gs, fs = [], [], [], []
    for t, c in zip(traces, coeffs):
        blocks += t.algebra.blocks
        weights += [max(c, 0.0) * w for w in t.algebra.weights]
        gs += t.g_units
        fs += t.f_units
    total = sum(weights)
    algebra = FiniteTracialAlgebra(tuple(blocks), tuple(w / total for w in weights))
    return FiniteDimTrace(n, algebra, tuple(gs), tuple(fs))


def faithful_weights(count: int) -> list[float]:
    """``2^-k / (1 - 2^-count)`` for ``k = 1..count``."""
    if count < 1:
        raise ValueError("at least one trace is required")
    raw = [2.0 ** -k for k in range(1, count + 1)]
    total = 1 - 2.0 ** -count
    return [r / total for r in raw]


def faithful_combination(traces: Sequence[FiniteDimTrace], pol: TolerancePolicy = DEFAULT_POLICY) -> FiniteDimTrace:
    if not traces:
        raise ValueError("at least one trace is required")
    return convex_combine(traces, faithful_weights(len(traces)), pol)


def generated_image(tr: FiniteDimTrace, pol: TolerancePolicy = DEFAULT_POLICY) -> StarSubalgebra:
    """The image of M_n * M_n in M_D, generated by ``g_1j, f_1j`` and their adjoints."""
    g, f = tr.g, tr.f
    gens = [g[0, j] for j in range(1, tr.n)] + [f[0, j] for j in range(1, tr.n)]
    if not gens:
        gens = [np.eye(tr.algebra.dim)]
    return generated_algebra(gens, unital=True, pol=pol)


def decompose_trace(
    tr: FiniteDimTrace, rng=None, pol: TolerancePolicy = DEFAULT_POLICY
) -> list[tuple[float, FiniteDimTrace]]:
    """Extremal decomposition ``tau = sum_j c_j tau_j`` with ``c_j = tau(e_j)``.

    The ``e_j`` are the minimal central projections of the image algebra.
    Each component is the compression of the representation to
    ``range(e_j)`` with its normalized trace; zero-weight summands are
    dropped.
    """
    image = generated_image(tr, pol)
    structure = block_structure(image, rng, pol)
    g, f = tr.g, tr.f
    out = []
    for p in structure.central_projections:
        weight = tr.algebra.trace(p).real
        if weight <= pol.eps_eq:
            continue
        v = projection_onto_range(p, pol)
        r = v.shape[1]
        comp_g = MatrixUnitSystem(adjoint(v) @ g.units @ v)
        comp_f = MatrixUnitSystem(adjoint(v) @ f.units @ v)
        comp = trace_from_pair(tr.n, [comp_g], [comp_f], FiniteTracialAlgebra.full(r), pol)
        out.append((weight, comp))
    total = sum(w for w, _ in out)
    return [(w / total, c) for w, c in out]


def recombine(components: Sequence[tuple[float, FiniteDimTrace]], pol: TolerancePolicy = DEFAULT_POLICY) -> FiniteDimTrace:
    return convex_combine([c for _, c in components], [w for w, _ in components], pol)


# ---------------------------------------------------------------------------
# kernel ideals of traces inside a common image


def restricted_to(tr: FiniteDimTrace, weights: Sequence[float]) -> FiniteDimTrace:
    """Same representation, different block weights."""
    return FiniteDimTrace(tr.n, FiniteTracialAlgebra(tr.algebra.blocks, tuple(weights)), tr.g_units, tr.f_units)


def kernel_ideal(
    tr: FiniteDimTrace, image: Optional[StarSubalgebra] = None, pol: TolerancePolicy = DEFAULT_POLICY
) -> np.ndarray:
    """``{b in pi(M_n * M_n) : tau_M(b* b) = 0}``, the image of ``I_tau``.

    Returned as a stack of matrices spanning the ideal inside ``image``
    (default: the generated image of ``tr``).
    """
    image = generated_image(tr, pol) if image is None else image
    return kernel_in_subalgebra(image, [trace_gram(image, tr.algebra.trace)], pol)


def component_traces(combined: FiniteDimTrace, sizes: Sequence[int]) -> list[FiniteDimTrace]:
    """The inputs of a combination, re-expressed on the combined algebra.

    ``sizes`` lists how many blocks each input contributed; input ``k``
    keeps its own (renormalized) weights and gives zero weight to every
    other block.
    """
    out, start = [], 0
    w = combined.algebra.weights
    for size in sizes:
        mass = sum(w[start:start + size])
        weights = [0.0] * len(w)
        for b in range(start, start + size):
            weights[b] = w[b] / mass
        out.append(restricted_to(combined, weights))
        start += size
    return out


def kernel_intersection(
    traces: Sequence[FiniteDimTrace], image: StarSubalgebra, pol: TolerancePolicy = DEFAULT_POLICY
) -> np.ndarray:
    """``I_tau1 cap I_tau2 cap ...`` for traces sharing one representation."""
    return kernel_in_subalgebra(image, [trace_gram(image, t.algebra.trace) for t in traces], pol)


# ---------------------------------------------------------------------------
# standard instances


def identity_pair_trace(n: int) -> FiniteDimTrace:
    """Both copies of M_n mapped identically onto M_n, with ``tr_n``."""
    e = standard_units(n)
    return trace_from_pair(n, [e], [e], FiniteTracialAlgebra.full(n))


def tensor_pair_trace(n: int) -> FiniteDimTrace:
    """``g = x (x) 1`` and ``f = 1 (x) x`` in M_n (x) M_n with ``tr_n (x) tr_n``."""
    return trace_from_pair(n, [tensor_units(n, n)], [ancilla_side_units(n, n)], FiniteTracialAlgebra.full(n * n))


def trace_from_ancilla(u: np.ndarray, ancilla: FiniteTracialAlgebra, pol: TolerancePolicy = DEFAULT_POLICY) -> FiniteDimTrace:
    """``g_ij = u (e_ij (x) 1) u*``, ``f_ij = e_ij (x) 1`` in M_n (x) N with ``tr_n (x) tau_N``.

    M_n (x) N is reorganized as ``(+)_j M_n (x) M_{d_j}`` so that the result
    is block diagonal; the weights are those of ``tau_N``.
    """
    u = as_matrix(u)
    D = ancilla.dim
    n = u.shape[0] // D
    blocks = u.reshape(n, D, n, D)
    gs, fs = [], []
    for j, dj in enumerate(ancilla.blocks):
        s = ancilla.block_slice(j)
        uj = blocks[:, s, :, s].reshape(n * dj, n * dj)
        gs.append(tensor_units(n, dj).conjugate(uj))
        fs.append(tensor_units(n, dj))
    algebra = FiniteTracialAlgebra(tuple(n * d for d in ancilla.blocks), ancilla.weights)
    return trace_from_pair(n, gs, fs, algebra, pol)


def random_trace(
    n: int, blocks: Sequence[int], weights: Sequence[float], rng, pol: TolerancePolicy = DEFAULT_POLICY
) -> FiniteDimTrace:
    """Independent Haar-random unital embeddings of both copies in every block."""
    rng = np.random.default_rng(rng)
    algebra = FiniteTracialAlgebra(tuple(blocks), tuple(weights))
    gs = [random_unital_embedding(n, d, rng) for d in algebra.blocks]
    fs = [random_unital_embedding(n, d, rng) for d in algebra.blocks]
    return trace_from_pair(n, gs, fs, algebra, pol)
