"""Goodness-of-fit protocol: expected counts, pooled chi-square, p-value.

The chi-square table pools trailing rows (largest counts first) until every
pooled cell has expected frequency at least five, then computes the Pearson
statistic on counts over the pooled cells.  Degrees of freedom default to
cells - 1 - dof_penalty with dof_penalty the number of estimated parameters.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .distributions import NblParams, nbl_pmf_direct
from .errors import InsufficientCells
from .estimate import CountData, log_likelihood
from .specfun import log_gamma, upper_inc_gamma


@dataclass(frozen=True)
class GofReport:
    cells: Tuple[Tuple[str, int, float], ...]  # (label, observed, expected)
    pooled_from: int
    chi_square: float
    dof: int
    p_value: float
    log_likelihood: float


def chi_square_p_value(chi_square: float, dof: int) -> float:
    """Upper-tail probability of the chi-square distribution."""
    if chi_square <= 0:
        return 1.0
    return upper_inc_gamma(dof / 2.0, chi_square / 2.0).value / math.exp(
        log_gamma(dof / 2.0)
    )


def expected_counts(
    data: CountData, params: NblParams
) -> List[Tuple[str, float]]:
    """Fitted count for every observed count value, plus the open tail cell."""
    n = data.n
    out = [(str(c), n * nbl_pmf_direct(params, c)) for c in data.counts]
    tail = n - sum(e for _, e in out)
    out.append((f">{data.counts.max()}", tail))
    return out


def _pool(labels, observed, expected, min_expected=5.0):
    cells = [[lab, obs, exp] for lab, obs, exp in zip(labels, observed, expected)]
    while len(cells) > 1 and cells[-1][2] < min_expected:
        last = cells.pop()
        cells[-1][0] = f"{cells[-1][0]}+{last[0]}"
        cells[-1][1] += last[1]
        cells[-1][2] += last[2]
    return cells


def chi_square_test(
    data: CountData, params: NblParams, dof_penalty: int = 2
) -> GofReport:
    """Pearson chi-square test of the fitted NBL model on grouped counts."""
    n = data.n
    labels = [str(c) for c in data.counts]
    observed = [int(f) for f in data.freqs]
    expected = [n * nbl_pmf_direct(params, int(c)) for c in data.counts]
    n_unpooled = len(labels)
    cells = _pool(labels, observed, expected)
    if len(cells) <= dof_penalty + 1:
        raise InsufficientCells(
            f"only {len(cells)} cells remain after pooling; "
            f"need more than {dof_penalty + 1}"
        )
    chi_square = sum((obs - exp) ** 2 / exp for _, obs, exp in cells)
    dof = len(cells) - 1 - dof_penalty
    pooled_from = len(cells) - 1 if len(cells) < n_unpooled else n_unpooled
    return GofReport(
        cells=tuple((lab, obs, exp) for lab, obs, exp in cells),
        pooled_from=pooled_from,
        chi_square=chi_square,
        dof=dof,
        p_value=chi_square_p_value(chi_square, dof),
        log_likelihood=log_likelihood(data, params),
    )


def chi_square_from_expected(
    observed: Sequence[float], expected: Sequence[float], dof: int
) -> Tuple[float, float]:
    """Pearson statistic and p-value for externally supplied expected counts.

    The caller is responsible for any pooling; this entry point exists so
    published reference columns for other models can be checked without
    implementing those models.
    """
    if len(observed) != len(expected):
        raise ValueError("observed and expected must have equal length")
    chi_square = sum((o - e) ** 2 / e for o, e in zip(observed, expected))
    return chi_square, chi_square_p_value(chi_square, dof)
