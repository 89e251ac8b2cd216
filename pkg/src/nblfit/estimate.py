"""Parameter estimation for the NBL distribution.

Three fitters operate on grouped count data (distinct count, frequency):

* ``fit_moments`` — matches the first two sample factorial moments; the
  theta equation is a polynomial with a single positive root, found by
  bracketed root-finding, after which r has a closed form.
* ``fit_mle`` — derivative-free simplex maximisation of the exact
  log-likelihood over (log r, log theta), with standard errors from the
  inverse numerical Hessian.
* ``fit_em`` — an EM algorithm treating the latent Lindley rate lambda_i of
  each observation as missing data.  The E-step computes posterior
  expectations of lambda, log lambda and log(1+lambda); the M-step updates
  theta in closed form and r through the inverse digamma function.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize, special

from .distributions import NblParams, nbl_log_pmf
from .errors import DegenerateData, DomainError, NoRoot, NonConvergence
from .specfun import digamma, inv_digamma, log_hyp_u


@dataclass(frozen=True)
class CountData:
    """Grouped sample: (count, frequency) pairs with counts strictly increasing."""

    entries: Tuple[Tuple[int, int], ...]

    def __init__(self, entries: Sequence[Tuple[int, int]]):
        entries = tuple((int(c), int(f)) for c, f in entries)
        for (c0, _), (c1, _) in zip(entries, entries[1:]):
            if c1 <= c0:
                raise DomainError("counts must be strictly increasing")
        if any(c < 0 for c, _ in entries):
            raise DomainError("counts must be nonnegative")
        if any(f < 1 for _, f in entries):
            raise DomainError("frequencies must be positive")
        if sum(f for _, f in entries) < 2:
            raise DomainError("need a total sample size of at least 2")
        object.__setattr__(self, "entries", entries)

    @property
    def counts(self) -> np.ndarray:
        return np.array([c for c, _ in self.entries])

    @property
    def freqs(self) -> np.ndarray:
        return np.array([f for _, f in self.entries])

    @property
    def n(self) -> int:
        return int(self.freqs.sum())

    def mean(self) -> float:
        return float(self.freqs @ self.counts) / self.n

    def variance(self) -> float:
        """Sample variance with the n-1 divisor."""
        m = self.mean()
        ss = float(self.freqs @ (self.counts - m) ** 2)
        return ss / (self.n - 1)

    def factorial_moment(self, k: int) -> float:
        """Sample estimate of E[X(X-1)...(X-k+1)]."""
        x = self.counts.astype(float)
        term = np.ones_like(x)
        for j in range(k):
            term *= x - j
        return float(self.freqs @ term) / self.n


@dataclass(frozen=True)
class FitResult:
    params: NblParams
    log_likelihood: float
    method: str
    iterations: int = 0
    converged: bool = True
    std_errors: Optional[Tuple[float, float]] = None


@dataclass
class EmState:
    """Current EM parameter values plus per-entry posterior pseudo-values.

    ``pseudo_r``, ``pseudo_s`` and ``pseudo_t`` are E(lambda_i | x_i),
    E(log lambda_i | x_i) and E(log(lambda_i + x_i) | x_i).  ``pseudo_u``
    carries E(log(1 + lambda_i) | x_i), the quantity the complete-data
    likelihood actually couples to r; it is filled by the same E-step.
    """

    r_hat: float
    theta_hat: float
    pseudo_r: np.ndarray = field(default_factory=lambda: np.array([]))
    pseudo_s: np.ndarray = field(default_factory=lambda: np.array([]))
    pseudo_t: np.ndarray = field(default_factory=lambda: np.array([]))
    pseudo_u: np.ndarray = field(default_factory=lambda: np.array([]))


def log_likelihood(data: CountData, params: NblParams) -> float:
    """Grouped log-likelihood: each distinct count evaluated once."""
    return float(
        sum(f * nbl_log_pmf(params, c) for c, f in data.entries)
    )


def _moment_equation(theta, f1, f2):
    return theta * (2.0 + theta) ** 2 * f2 - 2.0 * f1 * (3.0 + theta) * (
        theta * (1.0 + f1 * (1.0 + theta)) + 2.0
    )


def fit_moments(data: CountData) -> FitResult:
    """Factorial-moment matching: solve for theta, then recover r."""
    f1 = data.factorial_moment(1)
    f2 = data.factorial_moment(2)
    if f2 == 0.0:
        raise DegenerateData("all counts <= 1: second factorial moment vanishes")
    if f1 <= 0.0:
        raise DegenerateData("sample mean is zero")
    lo, hi = 1e-8, 1e6
    flo, fhi = _moment_equation(lo, f1, f2), _moment_equation(hi, f1, f2)
    if flo * fhi > 0:
        raise NoRoot(
            "moment equation has no positive root; data incompatible with the model"
        )
    theta = optimize.brentq(_moment_equation, lo, hi, args=(f1, f2), xtol=1e-10)
    r = f1 * theta * (1.0 + theta) / (2.0 + theta)
    params = NblParams(r, theta)
    return FitResult(
        params=params,
        log_likelihood=log_likelihood(data, params),
        method="moments",
    )


def _neg_log_likelihood_log_coords(p, data):
    params = NblParams(math.exp(p[0]), math.exp(p[1]))
    return -log_likelihood(data, params)


def _hessian_std_errors(data, r, theta):
    """Standard errors from the inverse central-difference Hessian of -l."""

    def nll(p):
        return -log_likelihood(data, NblParams(p[0], p[1]))

    p0 = np.array([r, theta])
    h = 1e-4 * np.maximum(1.0, np.abs(p0))
    hess = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            if i == j:
                ei = np.zeros(2)
                ei[i] = h[i]
                hess[i, i] = (nll(p0 + ei) - 2.0 * nll(p0) + nll(p0 - ei)) / h[i] ** 2
            else:
                ei, ej = np.zeros(2), np.zeros(2)
                ei[i], ej[j] = h[i], h[j]
                hess[i, j] = (
                    nll(p0 + ei + ej)
                    - nll(p0 + ei - ej)
                    - nll(p0 - ei + ej)
                    + nll(p0 - ei - ej)
                ) / (4.0 * h[i] * h[j])
    try:
        eigvals = np.linalg.eigvalsh(hess)
        if eigvals.min() <= 0:
            return None
        cov = np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        return None
    if cov[0, 0] <= 0 or cov[1, 1] <= 0:
        return None
    return (math.sqrt(cov[0, 0]), math.sqrt(cov[1, 1]))


def fit_mle(data: CountData, start: NblParams) -> FitResult:
    """Maximum likelihood via Nelder-Mead on (log r, log theta)."""
    p0 = np.array([math.log(start.r), math.log(start.theta)])
    res = optimize.minimize(
        _neg_log_likelihood_log_coords,
        p0,
        args=(data,),
        method="Nelder-Mead",
        options={"fatol": 1e-10, "xatol": 1e-8, "maxfev": 10000},
    )
    if not res.success:
        raise NonConvergence(f"MLE search did not converge: {res.message}")
    r, theta = math.exp(res.x[0]), math.exp(res.x[1])
    params = NblParams(r, theta)
    return FitResult(
        params=params,
        log_likelihood=-res.fun,
        method="mle",
        iterations=int(res.nfev),
        converged=True,
        std_errors=_hessian_std_errors(data, r, theta),
    )


def _posterior_log_moments(x, r, theta):
    """(E(log lam | x), E(log(lam+x) | x), E(log(1+lam) | x)) by quadrature.

    The shared posterior weight is lam^x (1+lam)^(1-r-x) e^(-theta lam),
    rescaled by its value at the mode so the quadrature stays O(1).
    """
    # mode of the log-weight: theta*l^2 + (theta + r - 1)*l - x = 0
    b = theta + r - 1.0
    mode = (-b + math.sqrt(b * b + 4.0 * theta * x)) / (2.0 * theta) if x > 0 else 0.0
    peak = (
        x * math.log(mode) + (1.0 - r - x) * math.log1p(mode) - theta * mode
        if mode > 0
        else 0.0
    )

    def weight(lam):
        with np.errstate(divide="ignore"):
            logw = x * np.log(lam) + (1.0 - r - x) * np.log1p(lam) - theta * lam
        return np.exp(logw - peak)

    split = mode if mode > 0 else 1.0

    def integral(g):
        opts = dict(epsabs=1e-13, epsrel=1e-10, limit=200)
        lo, _ = integrate.quad(lambda lam: g(lam) * weight(lam), 0.0, split, **opts)
        hi, _ = integrate.quad(lambda lam: g(lam) * weight(lam), split, np.inf, **opts)
        return lo + hi

    den = integral(lambda lam: 1.0)
    s = integral(np.log) / den
    t = s if x == 0 else integral(lambda lam: np.log(lam + x)) / den
    u = integral(np.log1p) / den
    return s, t, u


def em_e_step(data: CountData, state: EmState) -> EmState:
    """Fill the posterior pseudo-values at the current (r_hat, theta_hat)."""
    r, theta = state.r_hat, state.theta_hat
    log_den = {c: log_hyp_u(c + 1.0, 3.0 - r, theta)[0] for c, _ in data.entries}
    pr, ps, pt, pu = [], [], [], []
    for c, _ in data.entries:
        log_num, _ = log_hyp_u(c + 2.0, 4.0 - r, theta)
        pr.append((1.0 + c) * math.exp(log_num - log_den[c]))
        s, t, u = _posterior_log_moments(c, r, theta)
        ps.append(s)
        pt.append(t)
        pu.append(u)
    return EmState(
        r_hat=r,
        theta_hat=theta,
        pseudo_r=np.array(pr),
        pseudo_s=np.array(ps),
        pseudo_t=np.array(pt),
        pseudo_u=np.array(pu),
    )


def em_m_step(data: CountData, state: EmState) -> EmState:
    """Closed-form theta update; r update by solving the digamma equation.

    theta maximises the Lindley part given mean(E(lambda_i | x_i)); r solves
    Psi(r) = mean(Psi(r + x_i)) - mean(E(log(1+lambda_i) | x_i)), the
    stationarity condition of the complete-data likelihood in r, iterated to
    a fixed point so every M-step is an exact maximisation.
    """
    if state.pseudo_r.size == 0:
        raise DomainError("M-step requires pseudo-values; run em_e_step first")
    freqs = data.freqs.astype(float)
    n = data.n
    sum_r = float(freqs @ state.pseudo_r)
    theta_new = (n - sum_r + math.sqrt(sum_r ** 2 + 6.0 * n * sum_r + n ** 2)) / (
        2.0 * sum_r
    )
    mean_u = float(freqs @ state.pseudo_u) / n
    counts = data.counts.astype(float)
    r_new = state.r_hat
    for _ in range(200):
        target = float(freqs @ special.psi(r_new + counts)) / n - mean_u
        r_next = inv_digamma(target)
        if abs(r_next - r_new) <= 1e-12 * max(1.0, r_new):
            r_new = r_next
            break
        r_new = r_next
    return EmState(
        r_hat=r_new,
        theta_hat=theta_new,
        pseudo_r=state.pseudo_r,
        pseudo_s=state.pseudo_s,
        pseudo_t=state.pseudo_t,
        pseudo_u=state.pseudo_u,
    )


def fit_em(
    data: CountData,
    start: NblParams,
    tol: float = 1e-10,
    max_iter: int = 2000,
) -> FitResult:
    """Alternate E and M steps until the relative log-likelihood change < tol."""
    state = EmState(r_hat=start.r, theta_hat=start.theta)
    ll = log_likelihood(data, start)
    delta = math.inf
    iterations = 0
    converged = False
    while iterations < max_iter:
        if delta <= tol:
            converged = True
            break
        state = em_m_step(data, em_e_step(data, state))
        ll_new = log_likelihood(data, NblParams(state.r_hat, state.theta_hat))
        delta = abs((ll_new - ll) / ll)
        ll = ll_new
        iterations += 1
    else:
        converged = delta <= tol
    return FitResult(
        params=NblParams(state.r_hat, state.theta_hat),
        log_likelihood=ll,
        method="em",
        iterations=iterations,
        converged=converged,
    )
