"""Quantum Fisher information of thermal two-spin XX chains with DM interaction."""

__version__ = "0.1.0"

from .numerics import EigenSystem, eigh, fidelity, mat_func, max_eig_sym3
from .qfi import (
    EstimationSetup,
    QfiResult,
    UnboundedUncertainty,
    c_matrix,
    cramer_rao,
    direction_grid_max,
    fidelity_qfi_oracle,
    fisher_in_direction,
    qfi,
)
from .spin_model import ModelParams, analytic_spectrum, build_hamiltonian, collective_operator, pauli_site
from .thermal import DensityMatrix, closed_form_state, gibbs_state, ground_state_limit

__all__ = [
    "DensityMatrix",
    "EigenSystem",
    "EstimationSetup",
    "ModelParams",
    "QfiResult",
    "UnboundedUncertainty",
    "analytic_spectrum",
    "build_hamiltonian",
    "c_matrix",
    "closed_form_state",
    "collective_operator",
    "cramer_rao",
    "direction_grid_max",
    "eigh",
    "fidelity",
    "fidelity_qfi_oracle",
    "fisher_in_direction",
    "gibbs_state",
    "ground_state_limit",
    "mat_func",
    "max_eig_sym3",
    "pauli_site",
    "qfi",
]
