"""Spiked Wishart beta-ensembles: samplers, exact densities, and edge laws.

Three independent constructions of the same eigenvalue law (bidiagonal,
secular rank-one update, bidiagonal pencil), the multi-spike recursion,
contour-integral densities, Painleve II soft-edge distributions, the
stochastic Airy operator, and a statistical harness proving the pieces
agree.
"""

from .airy import AiryEval, airy, airy_kernel, density_blind, density_species_y
from .densities import (
    ContourQuadrature,
    branch_point_integral,
    da_conditional_pdf,
    hard_edge_gap,
    hyp1f1_residue_beta2,
    hyp1f1_spiked,
    joint_pdf,
    log_spiked_pdf,
    spiked_pdf,
)
from .errors import InputDomainError, NumericalError, SpikedWishartError
from .linalg import (
    BidiagonalPencil,
    SpectrumSample,
    SymTridiag,
    pencil_eigenvalues,
    recurrence_eval,
    tridiag_eigenvalues,
    tridiag_first_components,
)
from .painleve import (
    PainleveTable,
    lax_propagate,
    pde_residual,
    solve_hastings_mcleod,
    spiked_edge_cdf,
    tw_goe_cdf,
)
from .sampling import (
    BidiagonalModel,
    InterlacedPair,
    RobinSAOConfig,
    SpikeConfig,
    default_sao_config,
    goe_edge_scaled_samples,
    rank_one_update,
    sample_bidiagonal,
    sample_gamma,
    sample_multi_spike,
    sample_pencil,
    sample_secular_pair,
    sample_stochastic_airy,
    spectrum_from_bidiagonal,
)
from .stats import KSResult, equivalence_suite, ks_one_sample, ks_two_sample

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
