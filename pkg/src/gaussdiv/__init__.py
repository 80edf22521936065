"""Divisibility classification of Gaussian continuous-variable quantum processes.

The library decides whether a Gaussian process is Markovian, weakly
non-Markovian, or strongly non-Markovian from the positivity degree of its
intermediate maps, and detects the operational signature of the weak class:
phase-insensitive amplification with less added noise than the quantum limit.
"""

from .channels import (
    GaussianMap,
    PositivityVerdict,
    ScanSpec,
    apply,
    classify_positivity,
    compose,
    extend,
    is_cp,
    is_kpositive_falsifier,
    is_positive_falsifier,
    is_positive_one_mode,
    quantum_limit_gap,
)
from .divisibility import (
    CLASS_MARKOVIAN,
    CLASS_STRONG,
    CLASS_WEAK,
    REGION_CP,
    REGION_NP,
    REGION_P,
    Crossing,
    DivisibilityReport,
    GaussianProcess,
    LocalRates,
    RegionSample,
    TrajectoryPoint,
    check_intermediate_cp,
    check_intermediate_p_one_mode,
    classify_point,
    classify_process,
    intermediate_map,
    local_rates,
    trajectory,
)
from .errors import QuadratureError, SingularMapError
from .models import (
    AmplificationWindow,
    CallableRates,
    PhysicalityResult,
    PiecewiseConstantRates,
    QbmParams,
    RateProfile,
    amplification_windows,
    canonical_variance_product,
    damping_profile,
    is_physical,
    phase_insensitive_process,
    physicality_eigenvalues,
    physicality_integrals,
    qbm_coefficients,
    qbm_process,
    qbm_rate_profile,
)
from .oracle import (
    TheoremCheck,
    WitnessState,
    random_gaussian_map,
    tmsv_witness,
    verify_theorem1,
)
from .quadrature import CumulativeIntegral
from .symplectic import (
    EulerFactors,
    GaussianState,
    euler_decompose,
    hermitian_min_eig,
    is_symplectic,
    is_valid_covariance,
    random_symplectic,
    symplectic_eigenvalues,
    symplectic_form,
)

__version__ = "0.1.0"
