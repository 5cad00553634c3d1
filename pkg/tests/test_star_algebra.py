import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from factorizable.matrix_core import adjoint, haar_unitary, max_abs, normalized_trace
from factorizable.matrix_units import MatrixUnitSystem, random_unital_embedding, standard_units
from factorizable.star_algebra import (
    block_structure,
    center,
    commutant,
    conditional_expectation,
    expectation_onto_span,
    generated_algebra,
    same_span,
    trace_kernel_ideal,
)
from factorizable.tracial import FiniteTracialAlgebra

from conftest import random_block_algebra_generators, random_complex

E2 = standard_units(2)


def test_generated_algebra_examples():
    assert generated_algebra([E2[0, 0], E2[0, 1]]).dim == 4
    assert generated_algebra([np.eye(3)]).dim == 1
    diag = generated_algebra([np.diag([1.0, 2.0])])
    assert diag.dim == 2
    assert diag.contains_unit


def test_generated_algebra_is_closed(rng):
    gens, _ = random_block_algebra_generators(rng, 5)
    alg = generated_algebra(gens[:3])
    b = alg.basis
    assert max_abs(np.einsum("kij,lij->kl", b.conj(), b) - np.eye(alg.dim)) < 1e-9
    assert alg.residual(adjoint(b)) < 1e-9
    assert alg.residual(b[:, None] @ b[None, :]) < 1e-9


def test_degenerate_generators():
    zero = generated_algebra([], unital=False, ambient_dim=3)
    assert zero.dim == 0 and not zero.contains_unit
    nonunital = generated_algebra([np.diag([1.0, 0.0, 0.0])], unital=False)
    assert nonunital.dim == 1 and not nonunital.contains_unit
    with pytest.raises(ValueError):
        generated_algebra([])


def test_commutant_examples():
    full = generated_algebra([E2[0, 1]])
    assert commutant(full).dim == 1
    scalars = generated_algebra([np.eye(3)])
    assert commutant(scalars).dim == 9
    diag = generated_algebra([np.diag([1.0, 2.0])])
    com = commutant(diag)
    assert com.dim == 2
    assert same_span(com, diag)[0]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_bicommutant(seed, d):
    rng = np.random.default_rng(seed)
    gens, _ = random_block_algebra_generators(rng, d)
    alg = generated_algebra(gens)
    equal, res = same_span(commutant(commutant(alg)), alg)
    assert equal and res < 1e-8


def test_block_structure_examples():
    assert block_structure(generated_algebra([E2[0, 1]])).blocks == [(2, 1)]
    assert block_structure(generated_algebra([np.diag([1.0, 2.0])])).blocks == [(1, 1), (1, 1)]
    # span dimension 4 and unit rank 6 force a single 2x2 block of multiplicity 3
    m2_tensor_i3 = generated_algebra([np.kron(E2[0, 1], np.eye(3))])
    assert m2_tensor_i3.dim == 4
    assert block_structure(m2_tensor_i3).blocks == [(2, 3)]


def test_block_structure_requires_unit():
    with pytest.raises(ValueError):
        block_structure(generated_algebra([np.diag([1.0, 0.0])], unital=False))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_block_structure_properties(seed, d):
    rng = np.random.default_rng(seed)
    gens, parts = random_block_algebra_generators(rng, d)
    alg = generated_algebra(gens)
    bs = block_structure(alg, rng)
    assert sum(m * m for m, _ in bs.blocks) == alg.dim
    assert sum(m * k for m, k in bs.blocks) == d
    assert sorted(bs.blocks) == sorted(parts)
    ps = bs.central_projections
    assert max_abs(sum(ps) - np.eye(d)) < 1e-9
    for i, p in enumerate(ps):
        assert max_abs(p @ alg.basis - alg.basis @ p) < 1e-9
        for q in ps[i + 1:]:
            assert max_abs(p @ q) < 1e-9


def test_center_of_direct_sum():
    gens = [np.kron(np.diag([1.0, 0.0]), random_complex(np.random.default_rng(0), 2, 2)),
            np.kron(np.diag([0.0, 1.0]), random_complex(np.random.default_rng(1), 2, 2))]
    assert center(generated_algebra(gens)).dim == 2


def test_conditional_expectation_examples(rng):
    x = random_complex(rng, 3, 3)
    one = MatrixUnitSystem(np.eye(3)[None, None])
    assert max_abs(conditional_expectation(x, one, normalized_trace) - normalized_trace(x) * np.eye(3)) < 1e-12
    a, b, c, d = 1.0, 2.0 + 1j, -3.0, 4.5
    got = expectation_onto_span(np.array([[a, b], [c, d]]), [E2[0, 0], E2[1, 1]], normalized_trace)
    assert max_abs(got - np.diag([a, d])) < 1e-12


def _ambient(rng):
    algebra = FiniteTracialAlgebra((4, 6), (0.35, 0.65))
    units = [random_unital_embedding(2, 4, rng), random_unital_embedding(2, 6, rng)]
    f = MatrixUnitSystem(np.array([[algebra.embed([u[i, j] for u in units]) for j in range(2)] for i in range(2)]))
    return algebra, f


def _random_element(rng, algebra):
    return algebra.embed([random_complex(rng, d, d) for d in algebra.blocks])


def test_conditional_expectation_properties(rng):
    algebra, f = _ambient(rng)
    tau = algebra.trace
    x, y = _random_element(rng, algebra), _random_element(rng, algebra)
    ex = conditional_expectation(x, f, tau)
    assert max_abs(conditional_expectation(ex, f, tau) - ex) < 1e-10
    assert abs(tau(ex) - tau(x)) < 1e-10
    ey = conditional_expectation(y, f, tau)
    assert abs(tau(adjoint(y) @ ex) - tau(adjoint(ey) @ x)) < 1e-10
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    lhs = conditional_expectation(f[a, b] @ x @ f[c, d], f, tau)
                    assert max_abs(lhs - f[a, b] @ ex @ f[c, d]) < 1e-10


def test_conditional_expectation_rejects_invalid_units():
    bad = standard_units(2).units.copy()
    bad[0, 1] *= 2
    with pytest.raises(ValueError):
        conditional_expectation(np.eye(2), MatrixUnitSystem(bad), normalized_trace)


def test_trace_kernel_ideal_examples():
    assert trace_kernel_ideal([3], [1.0]).dim == 0
    ideal = trace_kernel_ideal([2, 2], [1.0, 0.0])
    assert ideal.dim == 4
    assert max_abs(ideal.projection - np.diag([0, 0, 1, 1])) == 0
    assert trace_kernel_ideal([2, 2], [0.5, 0.5]).dim == 0
    with pytest.raises(ValueError):
        trace_kernel_ideal([2, 2], [1.5, -0.5])


def test_trace_kernel_ideal_is_annihilated():
    algebra = FiniteTracialAlgebra((2, 3, 1), (0.6, 0.0, 0.4))
    ideal = trace_kernel_ideal(algebra.blocks, algebra.weights)
    assert ideal.dim == 9
    for a in ideal.basis:
        assert abs(algebra.trace(adjoint(a) @ a)) < 1e-9
