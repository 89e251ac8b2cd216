"""Scikit-learn style estimator wrapping the NBL fitting routines.

The estimator consumes raw count samples (one nonnegative integer per
observation), groups them internally, and exposes the fitted parameters as
trailing-underscore attributes in the usual sklearn fashion.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .distributions import NblParams, nbl_pmf_direct
from .estimate import CountData, fit_em, fit_mle, fit_moments, log_likelihood


def _as_counts(X):
    X = np.asarray(X)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    if X.ndim != 1:
        raise ValueError(f"expected a 1d array of counts, got shape {X.shape}")
    if X.size and (np.any(X < 0) or np.any(X != np.floor(X))):
        raise ValueError("counts must be nonnegative integers")
    return X.astype(int)


def _group(X):
    counts, freqs = np.unique(X, return_counts=True)
    return CountData(list(zip(counts, freqs)))


class NegativeBinomialLindley(BaseEstimator):
    """Negative binomial-Lindley count model.

    Parameters
    ----------
    method : {"mle", "em", "moments"}
        Fitting procedure.  "mle" and "em" are seeded by the factorial-moment
        estimates unless an explicit start is given.
    start : tuple of (r, theta), optional
        Starting point overriding the moment seed.
    tol : float
        Relative log-likelihood change at which EM stops.
    max_iter : int
        EM iteration budget.
    """

    def __init__(self, method="mle", start=None, tol=1e-10, max_iter=2000):
        self.method = method
        self.start = start
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        data = _group(_as_counts(X))
        if self.method == "moments":
            result = fit_moments(data)
        else:
            if self.start is not None:
                start = NblParams(*self.start)
            else:
                start = fit_moments(data).params
            if self.method == "mle":
                result = fit_mle(data, start)
            elif self.method == "em":
                result = fit_em(data, start, tol=self.tol, max_iter=self.max_iter)
            else:
                raise ValueError(f"unknown method {self.method!r}")
        self.r_ = result.params.r
        self.theta_ = result.params.theta
        self.log_likelihood_ = result.log_likelihood
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.std_errors_ = result.std_errors
        return self

    def predict_proba(self, X):
        """Model pmf evaluated at each count in X."""
        check_is_fitted(self, "r_")
        params = NblParams(self.r_, self.theta_)
        return np.array([nbl_pmf_direct(params, int(x)) for x in _as_counts(X)])

    def score(self, X, y=None):
        """Mean per-observation log-likelihood of X under the fitted model."""
        check_is_fitted(self, "r_")
        data = _group(_as_counts(X))
        return log_likelihood(data, NblParams(self.r_, self.theta_)) / data.n
