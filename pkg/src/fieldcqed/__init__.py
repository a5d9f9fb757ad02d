"""Circuit-QED toolkit: transmons, transmission-line modes, their coupling,
open-boundary baths, and dynamics, with built-in consistency checks."""

from .bath import (
    BathDiscretization,
    CavityModes,
    InterfaceClosure,
    RegionPartition,
    cavity_modes_1d,
    coupling_coefficients,
    decay_simulation,
    global_mode_frequencies,
    normal_mode_spectrum,
    port_continuum,
)
from .coupled import (
    CoupledHamiltonian,
    CouplingSpec,
    build_full_hamiltonian,
    build_nn_hamiltonian,
    coupling_strength,
    field_coupling_strength,
    field_reduction_check,
    total_excitation_op,
)
from .dynamics import (
    ClassicalState,
    Trajectory,
    classical_trajectory,
    ehrenfest_check,
    evolve,
    first_return_period,
)
from .errors import (
    CapacityError,
    ConfigError,
    ContractViolationError,
    DimensionMismatchError,
    FieldCqedError,
    ModelError,
    NumericError,
    StepSizeError,
)
from .qops import (
    MAX_DIM,
    Operator,
    StateVector,
    annihilation_op,
    commutator,
    evolve_step,
    expectation,
    identity_op,
    number_op,
    tensor_product,
)
from .transmon import (
    TransmonParams,
    TransmonSolution,
    TunnelingSign,
    anharmonicity,
    build_charge_hamiltonian,
    charge_dispersion,
    charge_matrix_element,
    charge_number_op,
    cos_phi_op,
    sin_phi_op,
    solve,
    transition_dispersion,
)
from .txline import (
    BoundaryCondition,
    LineParams,
    LongitudinalNorm,
    ModeSet,
    TEMCrossSection,
    compute_modes,
    energy_correspondence,
    matched_cross_section,
    mode_operator_coeffs,
    tem_cross_section,
)

__version__ = "0.1.0"
