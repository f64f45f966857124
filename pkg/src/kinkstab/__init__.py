"""Kink stability toolkit for NLS equations with competing power nonlinearities.

Construct kink profiles, discretize the linearized operators in weighted
spaces, verify the transition-point spectral criterion F_R(0) < 0 with its
limiting products, and demonstrate orbital stability by direct time
evolution with modulation tracking.
"""

__version__ = "0.1.0"

from .discretize import (
    GridSpec,
    PAPER_Z_GRID,
    TridiagonalOperator,
    assemble_Lminus_weighted,
    assemble_Lpm_x,
    assemble_LR_z,
)
from .evolution import (
    FieldState,
    ModulationFit,
    StabilityReport,
    decomposition_check,
    energy,
    eta,
    eta_sup_check,
    kink_state,
    modulation_fit,
    rho_R,
    stability_experiment,
    step_cn,
)
from .linalg import DenseSymmetric, EigenPair, dense_sym_eigs, lowest_eigenpairs, simpson, sturm_count, thomas_solve
from .profiles import (
    CUBIC_QUINTIC,
    KinkProfile,
    NonlinearityParams,
    PotentialSet,
    build_general_profile,
    cubic_quintic_profile,
    threshold_R0,
    x_of_z,
    z_of_x,
)
from .spectra import (
    BlockSpectrum,
    CriterionRow,
    F_of_lambda,
    block_spectrum,
    constrained_ground_eigenvalue,
    criterion_scan,
)

__all__ = [
    "__version__",
    "GridSpec",
    "PAPER_Z_GRID",
    "TridiagonalOperator",
    "assemble_LR_z",
    "assemble_Lminus_weighted",
    "assemble_Lpm_x",
    "FieldState",
    "ModulationFit",
    "StabilityReport",
    "decomposition_check",
    "energy",
    "eta",
    "eta_sup_check",
    "kink_state",
    "modulation_fit",
    "rho_R",
    "stability_experiment",
    "step_cn",
    "DenseSymmetric",
    "EigenPair",
    "dense_sym_eigs",
    "lowest_eigenpairs",
    "simpson",
    "sturm_count",
    "thomas_solve",
    "CUBIC_QUINTIC",
    "KinkProfile",
    "NonlinearityParams",
    "PotentialSet",
    "build_general_profile",
    "cubic_quintic_profile",
    "threshold_R0",
    "x_of_z",
    "z_of_x",
    "BlockSpectrum",
    "CriterionRow",
    "F_of_lambda",
    "block_spectrum",
    "constrained_ground_eigenvalue",
    "criterion_scan",
]
