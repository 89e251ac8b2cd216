"""nblfit: the negative binomial-Lindley count distribution.

Exact pmf evaluation, moment/ML/EM estimation, goodness of fit, and the
compound aggregate-claims model.
"""

from .compound import (
    CompoundDistribution,
    ContinuousSeverity,
    DiscreteSeverity,
    compound_cdf,
    compound_continuous,
    compound_discrete,
    compound_monte_carlo,
    exponential_severity,
)
from .data import REFERENCE, ReferenceTable, zaire_dataset
from .distributions import (
    LindleyParams,
    MixingDensityParams,
    NbParams,
    NblParams,
    lindley_pdf,
    mixing_pdf,
    nb_pmf,
    nbl_factorial_moment,
    nbl_mean,
    nbl_pmf_direct,
    nbl_pmf_recursive,
    nbl_variance,
    posterior_expectation,
)
from .estimate import (
    CountData,
    EmState,
    FitResult,
    em_e_step,
    em_m_step,
    fit_em,
    fit_mle,
    fit_moments,
    log_likelihood,
)
from .estimator import NegativeBinomialLindley
from .gof import GofReport, chi_square_from_expected, chi_square_test, expected_counts

__version__ = "0.1.0"

__all__ = [
    "CompoundDistribution",
    "ContinuousSeverity",
    "CountData",
    "DiscreteSeverity",
    "EmState",
    "FitResult",
    "GofReport",
    "LindleyParams",
    "MixingDensityParams",
    "NbParams",
    "NblParams",
    "NegativeBinomialLindley",
    "REFERENCE",
    "ReferenceTable",
    "chi_square_from_expected",
    "chi_square_test",
    "compound_cdf",
    "compound_continuous",
    "compound_discrete",
    "compound_monte_carlo",
    "em_e_step",
    "em_m_step",
    "expected_counts",
    "exponential_severity",
    "fit_em",
    "fit_mle",
    "fit_moments",
    "lindley_pdf",
    "log_likelihood",
    "mixing_pdf",
    "nb_pmf",
    "nbl_factorial_moment",
    "nbl_mean",
    "nbl_pmf_direct",
    "nbl_pmf_recursive",
    "nbl_variance",
    "posterior_expectation",
    "zaire_dataset",
]
