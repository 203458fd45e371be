"""Rank-N singular perturbations of self-adjoint operators.

Pencil machinery (krein), an exact matrix oracle (matrixmodel), closed
form Laplacian kernels with point traces (greens), generic 1-d
multiplier kernels (multiplier), a real-line pole solver (spectral),
and the identity verification suite (verify).
"""

from .bessel import k0_bessel
from .errors import *  # noqa: F401,F403 - flat exception namespace
from .greens import (
    LaplacianGrid1DEvaluator,
    LaplacianKernel,
    LaplacianPointEvaluator,
    PointSet,
    g0,
    gamma_matrix,
    gbreve_apply_1d,
    gz,
    renormalized_diagonal,
)
from .krein import (
    ExtensionProblem,
    GammaEvaluator,
    ThetaMatrix,
    admissible_real,
    boundary_residual,
    gamma_theta,
    krein_apply,
    min_eig_hermitian,
)
from .matrixmodel import (
    MatrixEvaluator,
    MatrixModel,
    base_resolvent,
    direct_eigs,
    g_maps,
    gamma,
    random_model,
    random_theta,
    woodbury_extension,
)
from .multiplier import (
    Multiplier1D,
    MultiplierAnchoredEvaluator,
    anchored_gamma_1d,
    multiplier_gz_1d,
)
from .spectral import (
    SpectrumReport,
    charge_vector,
    eigenfunction_eval,
    eigenfunction_l2_norm,
    scan_spectrum,
    verify_eigenpair,
)
from .verify import (
    CheckResult,
    VerificationReport,
    check_base_identities,
    check_extension,
    check_gamma_identities,
    run_verification,
)

__version__ = "0.1.0"
