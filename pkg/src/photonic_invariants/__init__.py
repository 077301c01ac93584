"""Lie-algebraic invariants of photonic states under passive linear optics."""

from .bounds import (
    BoundReport,
    CompareConfig,
    FeasibilityReport,
    compare,
    heralded_bound,
    norm_chain,
    sector_distances,
    spectral_distance,
    tangent_distances,
)
from .catalog import (
    coherent,
    fock,
    from_spec,
    gamma,
    mixed,
    noon,
    photon_added_coherent,
    product,
    superposition,
    to_spec,
)
from .errors import (
    CapacityError,
    ComplexityError,
    ContractViolation,
    InvalidArgument,
    PreconditionError,
)
from .fock_core import (
    FockSector,
    HermitianOperator,
    PhotonicState,
    SectorBlock,
    enumerate_basis,
    expectation,
    fock_sector,
    hermitian_spectrum,
    make_mixed,
    make_pure,
    sector_dimension,
    state_from_blocks,
)
from .invariants import (
    SubspaceDecomposition,
    coefficient_vector,
    covariance,
    equivariant_eigenspaces,
    h_rho,
    higher_preimage,
    higher_projection,
    higher_traces,
    nested_commutator,
    subspace_spectra,
    superoperator_matrix,
    tangent_coefficient_projection,
    tangent_orthogonal_projection,
)
from .lie import (
    ScatteringMatrix,
    adjoint_matrix,
    amplitude_permanent,
    beam_splitter,
    compose,
    dphi,
    evolve_state,
    haar_unitary,
    image_basis,
    permanent,
    phase_shifter,
    photonic_unitary,
    u_basis,
    unitary_from_hamiltonian,
    unitary_from_spec,
)
from .reports import InvariantReport, invariant_reports

__version__ = "0.1.0"
