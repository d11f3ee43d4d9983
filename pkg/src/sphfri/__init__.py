"""Recovery of Dirac ensembles on the sphere from spherical-harmonic coefficients."""
from .config import Tolerances
from .errors import (
    AmbiguousNullSpaceError,
    BandlimitError,
    DomainError,
    DuplicateNodeError,
    SphFriError,
)
from .experiment import ExperimentConfig, compute_errors, match_diracs, records_to_csv, run_experiment
from .fri_model import DiracEnsemble, InstanceGenConfig, eval_bandlimited, forward_sh_coefficients, generate_instance
from .recovery import (
    RecoveryResult,
    annihilating_row_count,
    build_annihilating_matrix,
    estimate_xk,
    extract_dpm,
    recover,
    recover_alpha,
    recover_phi,
    recover_theta,
    required_bandlimit,
)
from .sh_core import (
    ShCoefficients,
    SphDirection,
    build_legendre_poly_table,
    eval_associated_legendre,
    eval_ylm,
    eval_ylm_all,
)

__version__ = "0.1.0"
