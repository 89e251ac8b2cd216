"""Embedded reference dataset and published benchmark constants.

The bundled data are the 1974 Zaire automobile liability policy counts for
private cars (n = 4000), the standard benchmark for heavily right-skewed,
overdispersed claim-frequency models.  The reference table collects the
published fitted values for the NBL model and the two competitor models
(negative binomial and Poisson-inverse Gaussian) used in documentation and
regression tests; the competitor models themselves are not implemented.
"""

from dataclasses import dataclass, field
from typing import Tuple

from .estimate import CountData

ZAIRE_ENTRIES = ((0, 3719), (1, 232), (2, 38), (3, 7), (4, 3), (5, 1))


def zaire_dataset() -> CountData:
    """The Zaire 1974 automobile liability counts (counts 0..5, n = 4000)."""
    return CountData(ZAIRE_ENTRIES)


@dataclass(frozen=True)
class ReferenceTable:
    """Published fitted quantities for the Zaire data."""

    observed: Tuple[int, ...] = tuple(f for _, f in ZAIRE_ENTRIES)
    nbl_expected: Tuple[float, ...] = (3718.82, 232.98, 36.59, 8.21, 2.26, 0.72)
    nb_expected: Tuple[float, ...] = (3719.22, 229.90, 39.91, 8.42, 1.93, 0.46)
    pig_expected: Tuple[float, ...] = (3718.58, 234.54, 34.86, 8.32, 2.45, 0.80)
    chi_square: dict = field(
        default_factory=lambda: {"nbl": 0.06, "nb": 1.17, "pig": 0.54}
    )
    p_value: dict = field(
        default_factory=lambda: {"nbl": 0.8033, "nb": 0.5570, "pig": 0.7620}
    )
    log_likelihood: dict = field(
        default_factory=lambda: {"nbl": -1183.430, "nb": -1183.550, "pig": -1183.524}
    )
    mle: Tuple[float, float] = (0.486, 6.381)
    mle_std_errors: Tuple[float, float] = (0.12, 1.50)
    em: Tuple[float, float] = (0.509, 6.663)
    em_iterations: int = 155
    em_log_likelihood: float = -1183.45
    sample_mean: float = 0.08
    sample_variance: float = 0.12


REFERENCE = ReferenceTable()
