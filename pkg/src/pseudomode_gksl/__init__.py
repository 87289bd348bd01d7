"""Pseudomode, non-Hermitian and GKSL dynamics for zero-temperature non-Markovian decay."""

__version__ = "0.1.0"

from .gksl import LindbladModel, Trajectory, build_gksl_from_heff, liouvillian_matrix, propagate
from .nonhermitian import HeffDecomposition, NotDissipative, decompose_heff, evolve_psi, evolve_R, trace_decay_rate
from .pseudomode import (
    DiscretizedBath,
    PseudomodeParams,
    build_pseudomode_heff,
    discretize_bath,
    evolve_friedrichs,
    memory_kernel,
    reduced_density_matrix,
    solve_volterra,
    spectral_density,
)
from .quantum_core import (
    Tolerances,
    coherent_coupling_h,
    dissipator_D,
    normalization_reconstruction,
    partial_trace_over_indices,
    validate_density_matrix,
)
from .secondquant import build_second_quantized_gksl, embed_one_particle, partial_trace_tensor
