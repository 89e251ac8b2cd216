"""The negative binomial-Lindley (NBL) distribution and its building blocks.

An NBL variate is negative binomial with size r and success probability
1/(1+lambda), where lambda itself is Lindley(theta) distributed.  The pmf has
a closed form in terms of the confluent hypergeometric function U:

    p(x) = theta^2 (r)_x / (1+theta) * U(x+1, 3-r, theta)

together with a Kummer-transformed variant that is often better conditioned,

    p(x) = theta^r (r)_x / (1+theta) * U(x+r-1, r-1, theta),

valid whenever x+r-1 > 0.  Both are implemented; the direct pmf picks the
form whose quadrature reports the smaller error.

A second evaluation route is the two-term recursion

    p_r(x) = ((r+x-1)/x) p_r(x-1) - (r/x) p_{r+1}(x-1)

seeded by p_r(0) = theta^r e^theta Gamma(2-r, theta) / (1+theta).  The
recursion couples the parameter family r, r+1, ..., so a triangular table is
filled over the shift index.  The triangle amplifies rounding error roughly
like a binomial coefficient in x, so it runs at elevated precision scaled to
the requested length; results are returned as ordinary floats.
"""

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy import special

from .errors import DomainError, NumericalInstability, Overflow
from .specfun import bessel_k, log_gamma, log_hyp_u, log_pochhammer


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if not (value > 0) or not math.isfinite(value):
            raise DomainError(f"{name} must be a positive finite real, got {value}")


@dataclass(frozen=True)
class NblParams:
    """Parameters (r, theta) of the NBL distribution."""

    r: float
    theta: float

    def __post_init__(self):
        _require_positive(r=self.r, theta=self.theta)


@dataclass(frozen=True)
class NbParams:
    """Parameters (r, lambda) of the plain negative binomial distribution."""

    r: float
    lam: float

    def __post_init__(self):
        _require_positive(r=self.r, lam=self.lam)


@dataclass(frozen=True)
class LindleyParams:
    theta: float

    def __post_init__(self):
        _require_positive(theta=self.theta)


@dataclass(frozen=True)
class MixingDensityParams:
    """Parameters of the gamma-Lindley density mixing the Poisson rate."""

    r: float
    theta: float

    def __post_init__(self):
        _require_positive(r=self.r, theta=self.theta)


def nb_pmf(params: NbParams, x: int) -> float:
    """Negative binomial pmf with success probability 1/(1+lambda)."""
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    r, lam = params.r, params.lam
    log_p = (
        log_pochhammer(r, x)
        - special.gammaln(x + 1)
        - (r + x) * math.log1p(lam)
        + x * math.log(lam)
    )
    return math.exp(log_p)


def lindley_pdf(params: LindleyParams, lam: float) -> float:
    """Density of the Lindley distribution at lam > 0."""
    if lam <= 0:
        raise DomainError(f"lam must be > 0, got {lam}")
    th = params.theta
    return th * th / (1.0 + th) * (1.0 + lam) * math.exp(-th * lam)


def nbl_log_pmf(params: NblParams, x: float) -> float:
    """log p(x), choosing between the two U-based forms.

    Accepts real x >= 0 (non-integer arguments arise in posterior moments).
    """
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    r, th = params.r, params.theta
    common = log_pochhammer(r, x) if isinstance(x, (int, np.integer)) else (
        special.gammaln(r + x) - special.gammaln(r)
    )
    common -= math.log1p(th)

    log_a, err_a = log_hyp_u(x + 1.0, 3.0 - r, th)
    best = 2.0 * math.log(th) + common + log_a
    best_err = err_a
    if x + r - 1.0 > 0.0:
        log_b, err_b = log_hyp_u(x + r - 1.0, r - 1.0, th)
        if err_b < best_err:
            best = r * math.log(th) + common + log_b
    return best


def nbl_pmf_direct(params: NblParams, x) -> float:
    """NBL probability mass at x via the U-function closed form."""
    return math.exp(nbl_log_pmf(params, x))


def _seed_chain(r, theta, count):
    """p_{r+k}(0) for k = 0..count-1, at the current mpmath precision.

    Uses the scaled tail-gamma h(a) = Gamma(a, z) z^(-a) e^z, which obeys
    h(a-1) = (z h(a) - 1)/(a - 1) and keeps every intermediate O(1):
    p_{r+k}(0) = theta^2 h(2-r-k) / (1+theta).  The step onto a = 1 uses
    Gamma(0, z) = E1(z).
    """
    z = mp.mpf(theta)
    rm = mp.mpf(r)
    a = 2 - rm
    shift = 0
    while a <= 0:
        a += 1
        shift += 1

    def descend(h, a):
        return mp.e1(z) * mp.e ** z if a == 1 else (z * h - 1) / (a - 1)

    h = mp.gammainc(a, z) * z ** (-a) * mp.e ** z
    seeds = []
    for _ in range(shift):
        h = descend(h, a)
        a -= 1
    seeds.append(h)
    for _ in range(count - 1):
        h = descend(h, a)
        a -= 1
        seeds.append(h)
    scale = z * z / (1 + z)
    return [scale * h for h in seeds]


def nbl_pmf_recursive(params: NblParams, x_max: int) -> np.ndarray:
    """The full pmf prefix p(0..x_max) via the two-term recursion."""
    if x_max < 0:
        raise DomainError(f"x_max must be >= 0, got {x_max}")
    r, th = params.r, params.theta
    # the triangle loses ~ x_max * log10(2) digits in the worst case
    dps = 30 + math.ceil(0.602 * x_max)
    with mp.workdps(dps):
        rm = mp.mpf(r)
        tier = _seed_chain(r, th, x_max + 2)
        out = [tier[0]]
        for x in range(1, x_max + 1):
            keep = x_max - x + 1
            tier = [
                ((rm + k + x - 1) / x) * tier[k] - ((rm + k) / x) * tier[k + 1]
                for k in range(keep + 1)
            ]
            out.append(tier[0])
        probs = np.array([float(p) for p in out])
    bad = probs < -1e-12
    if bad.any():
        raise NumericalInstability(
            f"recursion produced negative probability {probs[bad].min():.3e}"
        )
    return np.clip(probs, 0.0, None)


def nbl_factorial_moment(params: NblParams, k: int) -> float:
    """k-th factorial moment E[X(X-1)...(X-k+1)], k >= 1."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    r, th = params.r, params.theta
    log_m = (
        log_pochhammer(r, k)
        + log_gamma(k + 1.0)
        + math.log(k + th + 1.0)
        - math.log1p(th)
        - k * math.log(th)
    )
    value = math.exp(log_m)
    if not math.isfinite(value):
        raise Overflow(f"factorial moment of order {k} overflows")
    return value


def nbl_mean(params: NblParams) -> float:
    r, th = params.r, params.theta
    return (2.0 + th) / (1.0 + th) * r / th


def nbl_variance(params: NblParams) -> float:
    r, th = params.r, params.theta
    num = r * (6.0 * (1.0 + th) + (4.0 + th) * ((1.0 + th) * th + r * th) + 2.0 * r)
    return num / (th * th * (1.0 + th) ** 2)


def mixing_pdf(params: MixingDensityParams, z: float) -> float:
    """Density of the latent Poisson rate (the gamma-Lindley mixture)."""
    if z <= 0:
        raise DomainError(f"z must be > 0, got {z}")
    r, th = params.r, params.theta
    arg = 2.0 * math.sqrt(th * z)
    k1 = bessel_k(r - 2.0, arg).value
    k2 = bessel_k(r - 1.0, arg).value
    log_front = (
        math.log(2.0)
        + (r / 2.0 + 1.0) * math.log(th)
        + (r / 2.0 - 1.0) * math.log(z)
        - math.log1p(th)
        - log_gamma(r)
    )
    return math.exp(log_front) * (z * k1 + math.sqrt(th * z) * k2)


def posterior_expectation(params: NblParams, x: int, s: float) -> float:
    """E(lambda^s | X = x) under the Lindley prior on lambda.

    The posterior density is proportional to lam^x (1+lam)^(1-r-x) e^(-theta
    lam); both posterior moments reduce to ratios of U-function integrals:

        E(lambda^s | x) = Gamma(x+s+1) U(x+s+1, 3-r+s, theta)
                          / (Gamma(x+1) U(x+1, 3-r, theta)).
    """
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if s == 0:
        return 1.0
    if x + s <= 0:
        raise DomainError(f"posterior moment requires x + s > 0, got {x + s}")
    r, th = params.r, params.theta
    log_num, _ = log_hyp_u(x + s + 1.0, 3.0 - r + s, th)
    log_den, _ = log_hyp_u(x + 1.0, 3.0 - r, th)
    return math.exp(
        special.gammaln(x + s + 1.0) + log_num - special.gammaln(x + 1.0) - log_den
    )
