"""Real-valued special functions used throughout the package.

The central routine is the confluent hypergeometric function of the second
kind, evaluated through its integral representation

    U(a, b, z) = (1/Gamma(a)) * int_0^inf t^(a-1) (1+t)^(b-a-1) e^(-z t) dt

by adaptive quadrature in log space, with the contour split at the
integrand's mode so large (a, z) stay well conditioned.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NonConvergence, Overflow

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class EvalResult:
    """A numerical value together with a conservative absolute error bound."""

    value: float
    abs_error_estimate: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise Overflow("non-finite value in EvalResult")
        if self.abs_error_estimate < 0:
            raise ValueError("negative error estimate")


def _integrand_mode(a, b, z):
    """Positive stationary point of (a-1)log t + (b-a-1)log(1+t) - z t, or 0."""
    if a <= 1.0:
        return 0.0
    # derivative zero  <=>  z t^2 + (z - b + 2) t - (a - 1) = 0
    p = z - b + 2.0
    q = -(a - 1.0)
    disc = math.sqrt(p * p - 4.0 * z * q)
    return (-p + disc) / (2.0 * z)


def log_hyp_u(a, b, z):
    """Return (log U(a,b,z), relative error estimate).

    Working in logs keeps the evaluation usable far beyond the range where
    U itself is representable (it underflows quickly in a and z).
    """
    if a <= 0 or z <= 0:
        raise DomainError(f"log_hyp_u requires a > 0 and z > 0, got a={a}, z={z}")

    mode = _integrand_mode(a, b, z)
    shift = (a - 1.0) * math.log(mode) + (b - a - 1.0) * math.log1p(mode) - z * mode \
        if mode > 0 else 0.0

    def f(t):
        with np.errstate(divide="ignore"):
            ell = (a - 1.0) * np.log(t) + (b - a - 1.0) * np.log1p(t) - z * t
        return np.exp(ell - shift)

    split = mode if mode > 0 else 1.0
    i1, e1 = integrate.quad(f, 0.0, split, epsabs=1e-14, epsrel=1e-12, limit=200)
    i2, e2 = integrate.quad(f, split, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    total = i1 + i2
    if total <= 0:
        raise NonConvergence("quadrature for U(a,b,z) lost all significance")
    rel_err = (e1 + e2) / total
    if rel_err > 1e-9:
        raise NonConvergence(
            f"quadrature for U({a},{b},{z}) reached relative error {rel_err:.2e}"
        )
    log_value = shift + math.log(total) - special.gammaln(a)
    return log_value, rel_err


def hyp_u(a, b, z):
    """Confluent hypergeometric function U(a, b, z) for a > 0, z > 0."""
    log_value, rel_err = log_hyp_u(a, b, z)
    value = math.exp(log_value)
    if not math.isfinite(value):
        raise Overflow(f"U({a},{b},{z}) overflows double precision")
    return EvalResult(value, max(1e-300, rel_err * abs(value)))


def upper_inc_gamma(a, z):
    """Upper incomplete gamma Gamma(a, z) for any real a and z > 0.

    For a <= 0 the value is reached by the downward recurrence
    Gamma(a-1, z) = (Gamma(a, z) - z^(a-1) e^(-z)) / (a - 1), started from a
    shifted argument in the positive half-line where the regularised form is
    available directly.  The step landing on a = 0 uses the exponential
    integral E1(z) = Gamma(0, z).
    """
    if z <= 0:
        raise DomainError(f"upper_inc_gamma requires z > 0, got z={z}")
    if a > 0:
        if a < 1.0 and special.gammaln(a) >= 700.0:
            # a this close to zero makes Gamma(a) overflow while Gamma(a, z)
            # stays finite; the limit E1(z) is exact to working precision
            value = float(special.exp1(z))
        else:
            value = special.gammaincc(a, z) * math.exp(special.gammaln(a))
        return EvalResult(value, max(1e-300, 1e-13 * abs(value)))

    steps = math.ceil(abs(a)) + 1
    c = a + steps
    value = special.gammaincc(c, z) * math.exp(special.gammaln(c))
    err = 1e-13 * abs(value)
    for _ in range(steps):
        c -= 1.0
        if abs(c) < 1e-290:  # on (or numerically at) the a = 0 pole
            value = special.exp1(z)
            err = 1e-13 * abs(value)
        else:
            value = (value - z ** c * math.exp(-z)) / c
            err = (err + 1e-15 * abs(value)) / abs(c)
    return EvalResult(value, max(1e-300, err))


def bessel_k(nu, z):
    """Modified Bessel function of the second kind K_nu(z), z > 0."""
    if z <= 0:
        raise DomainError(f"bessel_k requires z > 0, got z={z}")
    value = float(special.kv(abs(nu), z))
    if not math.isfinite(value):
        raise Overflow(f"K_{nu}({z}) overflows double precision")
    return EvalResult(value, max(1e-300, 1e-12 * abs(value)))


def log_gamma(x):
    """Natural log of the gamma function for x > 0."""
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got x={x}")
    return float(special.gammaln(x))


def log_pochhammer(a, n):
    """log of the rising factorial (a)_n = Gamma(a+n)/Gamma(a), a > 0, n >= 0."""
    if a <= 0:
        raise DomainError(f"log_pochhammer requires a > 0, got a={a}")
    if n < 0:
        raise DomainError(f"log_pochhammer requires n >= 0, got n={n}")
    if n == 0:
        return 0.0
    return float(special.gammaln(a + n) - special.gammaln(a))


def digamma(x):
    """Digamma function Psi(x) for x > 0."""
    if x <= 0:
        raise DomainError(f"digamma requires x > 0, got x={x}")
    return float(special.psi(x))


def inv_digamma(y, tol=1e-12, max_iter=64):
    """Inverse of the digamma function: the x > 0 with Psi(x) = y.

    Newton iteration on Psi with the usual piecewise initial guess; steps
    that would leave the domain are halved (Psi is monotone, so this always
    recovers).
    """
    x = math.exp(y) + 0.5 if y >= -2.22 else -1.0 / (y + EULER_GAMMA)
    if x <= 0:
        x = 1e-8
    for _ in range(max_iter):
        f = special.psi(x) - y
        if abs(f) <= tol:
            return float(x)
        step = f / special.polygamma(1, x)
        while x - step <= 0:
            step *= 0.5
        x -= step
    if abs(special.psi(x) - y) <= 1e-10:
        return float(x)
    raise NonConvergence(f"inv_digamma did not converge for y={y}")
