"""Unitary sparsifying transform learning by alternating minimization."""
from .analysis import (
    ConjectureResult,
    SpectralReport,
    compute_q1,
    compute_q2,
    epsilon_bound,
    masked_spectral_norm,
    monte_carlo_conjecture,
    spectral_report,
    support_superset_check,
    verify_recursion,
)
from .generative import GenerativeModel, SamplerConfig, random_unitary, sample_sparse_coeffs, synthesize
from .learner import (
    INIT_KINDS,
    LearnerConfig,
    RunTrace,
    hard_threshold,
    make_initializer,
    objective,
    operator_update,
    run,
    sparse_code,
)

__version__ = "0.1.0"
