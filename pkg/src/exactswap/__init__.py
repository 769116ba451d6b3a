"""Exact state-swap probabilities for spin chains via eigenspaces of W(tau) = P U(tau)."""

from .errors import ConvergenceError, ExactSwapError, NonUnitaryError, NumericalContractError, ValidationError
from .sector import (
    XY,
    ZERO,
    ModelParams,
    SectorBasis,
    SectorState,
    SpectralData,
    basis_state,
    make_basis,
    one_magnon_hamiltonian,
    propagator,
    spectrum,
    superposition,
    xy_spectrum,
)
from .linalg import (
    UnitaryEigensystem,
    cluster_probabilities,
    cluster_subspace_weights,
    eigenspace_projection_probability,
    hermitian_eig,
    jacobi_eigh,
    unitarity_defect,
    unitary_eig,
)
from .exchange import (
    Completion,
    ExchangeOperator,
    ExchangeSpec,
    Kind,
    build,
    parse_exchange,
    verify_exchange,
)
from .analysis import (
    ScanConfig,
    ScanRecord,
    SweepRecord,
    compose_w,
    exact_transfer_search,
    joint_fidelity,
    scan_tau,
    swap_probability_profile,
    sweep_chain_sizes,
    tau_grid,
)

__version__ = "0.1.0"
