"""Factorizable quantum channels on M_n and finite-dimensional traces on M_n * M_n."""
from .channels import (
    Channel,
    ChannelReport,
    apply_choi,
    channel_distance,
    channel_from_ancilla,
    choi_of_map,
    embedding_adjoint,
    factorized_channel,
    verify_channel,
)
from .free_product import (
    CorrelationMatrix,
    FiniteDimTrace,
    convex_combine,
    correlation_matrix,
    decompose_trace,
    evaluate_word,
    faithful_combination,
    generated_image,
    kernel_ideal,
    phi,
    random_trace,
    recombine,
    same_phi_fiber,
    trace_from_ancilla,
    trace_from_pair,
)
from .matrix_core import DEFAULT_POLICY, TolerancePolicy, haar_unitary, hs_inner, is_psd
from .matrix_units import (
    MatrixUnitSystem,
    generator_blocks,
    intertwiner,
    random_unital_embedding,
    standard_units,
    units_from_unitaries,
    validate_units,
)
from .star_algebra import (
    BlockStructure,
    StarSubalgebra,
    block_structure,
    commutant,
    conditional_expectation,
    generated_algebra,
    trace_kernel_ideal,
)
from .tracial import FiniteTracialAlgebra

__version__ = "0.1.0"
