"""Perfect state-mirror XX spin chains.

Design mirror spectra, rebuild the mirror-symmetric chain that carries them,
and compute free-fermion dynamics and spin correlations at any temperature.
"""

from .dynamics import (
    ThermalState,
    mirror_error,
    mirror_phase,
    periodicity_check,
    propagator,
    transfer_amplitude,
    transfer_fidelity,
    zz_correlation,
)
from .errors import ConvergenceError, ValidationError
from .inverse_problem import (
    AnnealSchedule,
    ReconstructionReport,
    coupling_variation,
    reconstruct_annealing,
    reconstruct_direct,
    spectral_weights,
    tune_cosine_amplitude,
)
from .jacobi_core import (
    EigenSystem,
    SymmetricChainSpec,
    TridiagonalMatrix,
    build_single_particle_matrix,
    check_parity,
    check_sign_changes,
    diagonalize,
)
from .mirror_design import (
    MirrorCertificate,
    SpectrumSpec,
    certify_spectrum,
    cosine_distorted_spectrum,
    gap_criterion,
    linear_spectrum,
    quadratic_spectrum,
)
from .series import CorrelationSeries
from .string_correlators import pfaffian, xx_correlation, xx_cross_correlation

__version__ = "0.1.0"
