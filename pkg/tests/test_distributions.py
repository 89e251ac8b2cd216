import math

import numpy as np
import pytest
from scipy import integrate

from nblfit.distributions import (
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
from nblfit.errors import DomainError

TABLE_NBL = [3718.82, 232.98, 36.59, 8.21, 2.26, 0.72]
# the same column computed to full precision at (0.486, 6.381)
TABLE_EXACT = [3719.06062, 232.791491, 36.5494856, 8.20057588, 2.2626092, 0.71765556]


class TestParams:
    def test_positivity_enforced(self):
        with pytest.raises(DomainError):
            NblParams(0.0, 1.0)
        with pytest.raises(DomainError):
            NblParams(1.0, -2.0)
        with pytest.raises(DomainError):
            NbParams(1.0, 0.0)
        with pytest.raises(DomainError):
            LindleyParams(0.0)


class TestNbPmf:
    def test_geometric_case(self):
        assert nb_pmf(NbParams(1.0, 1.0), 0) == pytest.approx(0.5, rel=1e-12)

    def test_r2_case(self):
        assert nb_pmf(NbParams(2.0, 1.0), 1) == pytest.approx(0.25, rel=1e-12)

    def test_normalization(self):
        p = NbParams(3.3, 0.7)
        assert sum(nb_pmf(p, x) for x in range(501)) == pytest.approx(1.0, abs=1e-12)


class TestLindley:
    def test_value_near_zero(self):
        assert lindley_pdf(LindleyParams(1.0), 1e-12) == pytest.approx(0.5, rel=1e-9)

    def test_normalization(self):
        val, _ = integrate.quad(lambda t: lindley_pdf(LindleyParams(2.5), t), 0, np.inf)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_mean(self):
        val, _ = integrate.quad(
            lambda t: t * lindley_pdf(LindleyParams(1.0), t), 0, np.inf
        )
        assert val == pytest.approx(1.5, rel=1e-10)


class TestNblPmf:
    def test_p0_geometric_lindley(self):
        # closed form p(0) = theta/(1+theta)
        assert nbl_pmf_direct(NblParams(1.0, 1.0), 0) == pytest.approx(0.5, rel=1e-10)

    def test_published_zero_cell(self):
        assert nbl_pmf_direct(NblParams(0.486, 6.381), 0) == pytest.approx(
            3718.82 / 4000, abs=1e-4
        )

    def test_published_two_cell(self):
        assert nbl_pmf_direct(NblParams(0.486, 6.381), 2) == pytest.approx(
            36.59 / 4000, abs=2e-5
        )

    def test_exact_values_at_rounded_params(self):
        p = NblParams(0.486, 6.381)
        for x, ref in enumerate(TABLE_EXACT):
            assert 4000 * nbl_pmf_direct(p, x) == pytest.approx(ref, rel=1e-7)

    def test_recursive_single_point(self):
        assert nbl_pmf_recursive(NblParams(1.0, 1.0), 0)[0] == pytest.approx(
            0.5, rel=1e-12
        )

    def test_recursive_reproduces_published_column(self):
        probs = 4000 * nbl_pmf_recursive(NblParams(0.486, 6.381), 5)
        for got, ref in zip(probs, TABLE_NBL):
            assert got == pytest.approx(ref, abs=0.25)
        for got, ref in zip(probs, TABLE_EXACT):
            assert got == pytest.approx(ref, rel=1e-7)

    def test_recursive_matches_direct(self):
        p = NblParams(2.0, 5.0)
        rec = nbl_pmf_recursive(p, 50)
        for x in range(51):
            assert rec[x] == pytest.approx(nbl_pmf_direct(p, x), rel=1e-8)

    def test_geometric_lindley_special_case(self):
        # r = 1: p(x) = int lam^x (1+lam)^-(x+1) g(lam) dlam
        theta = 1.7
        p = NblParams(1.0, theta)
        for x in [0, 1, 5]:
            val, _ = integrate.quad(
                lambda lam: lam ** x
                / (1 + lam) ** (x + 1)
                * lindley_pdf(LindleyParams(theta), lam),
                0,
                np.inf,
            )
            assert nbl_pmf_direct(p, x) == pytest.approx(val, rel=1e-9)


class TestMoments:
    def test_first_factorial_moment_is_mean(self):
        p = NblParams(0.7, 2.3)
        assert nbl_factorial_moment(p, 1) == pytest.approx(nbl_mean(p), rel=1e-12)

    def test_second_factorial_moment_r1_theta1(self):
        assert nbl_factorial_moment(NblParams(1.0, 1.0), 2) == pytest.approx(
            8.0, rel=1e-12
        )

    def test_third_factorial_moment_reference(self):
        # brute-force sum of x(x-1)(x-2) p(x) agrees with the closed form
        assert nbl_factorial_moment(NblParams(0.5, 2.0), 3) == pytest.approx(
            2.8125, rel=1e-12
        )

    def test_factorial_moments_match_brute_force(self):
        p = NblParams(1.0, 1.0)
        pmf = nbl_pmf_recursive(p, 400)
        x = np.arange(401, dtype=float)
        for k in [1, 2, 3]:
            term = np.ones_like(x)
            for j in range(k):
                term *= x - j
            assert nbl_factorial_moment(p, k) == pytest.approx(
                float(term @ pmf), rel=1e-6
            )

    def test_mean_zaire(self):
        assert nbl_mean(NblParams(0.486, 6.381)) == pytest.approx(0.0865, abs=5e-4)

    def test_variance_closed_form_vs_factorial_moments(self):
        for r, th in [(1.0, 1.0), (0.486, 6.381), (3.0, 0.5)]:
            p = NblParams(r, th)
            m1 = nbl_factorial_moment(p, 1)
            m2 = nbl_factorial_moment(p, 2)
            assert nbl_variance(p) == pytest.approx(m2 + m1 - m1 * m1, rel=1e-10)

    def test_variance_r1_theta1(self):
        # oracle: sum x^2 p(x) - mean^2 = 7.25
        assert nbl_variance(NblParams(1.0, 1.0)) == pytest.approx(7.25, rel=1e-12)


class TestMixingDensity:
    def test_normalization(self):
        val, _ = integrate.quad(
            lambda z: mixing_pdf(MixingDensityParams(2.0, 3.0), z), 0, np.inf
        )
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_mean_matches_count_mean(self):
        # X | sigma is Poisson, so E(Z) = E(X)
        params = MixingDensityParams(2.0, 3.0)
        val, _ = integrate.quad(lambda z: z * mixing_pdf(params, z), 0, np.inf)
        assert val == pytest.approx(nbl_mean(NblParams(2.0, 3.0)), abs=1e-8)

    def test_poisson_mixture_identity(self):
        params = MixingDensityParams(2.0, 3.0)
        p = NblParams(2.0, 3.0)
        for x in range(4):
            val, _ = integrate.quad(
                lambda z: math.exp(-z)
                * z ** x
                / math.factorial(x)
                * mixing_pdf(params, z),
                0,
                np.inf,
                limit=200,
            )
            assert val == pytest.approx(nbl_pmf_direct(p, x), abs=1e-7)

    def test_domain(self):
        with pytest.raises(DomainError):
            mixing_pdf(MixingDensityParams(1.0, 1.0), 0.0)


class TestPosteriorExpectation:
    def test_s_zero(self):
        assert posterior_expectation(NblParams(2.0, 3.0), 4, 0.0) == 1.0

    def test_geometric_lindley_mean(self):
        # posterior at x=0, r=1, theta=1 is proportional to e^-lam: mean 1
        assert posterior_expectation(NblParams(1.0, 1.0), 0, 1.0) == pytest.approx(
            1.0, rel=1e-9
        )

    def test_quadrature_reference(self):
        # oracle: ratio of quadratures with weight lam^x (1+lam)^(1-r-x) e^(-th lam)
        assert posterior_expectation(NblParams(0.486, 6.381), 2, 1.0) == pytest.approx(
            0.40709165291983115, rel=1e-8
        )

    def test_domain(self):
        with pytest.raises(DomainError):
            posterior_expectation(NblParams(1.0, 1.0), 0, -1.0)
