import math

import numpy as np
import pytest

from nblfit.compound import (
    CompoundDistribution,
    ContinuousSeverity,
    DiscreteSeverity,
    EmpiricalCdf,
    compound_cdf,
    compound_continuous,
    compound_discrete,
    compound_monte_carlo,
    exponential_severity,
)
from nblfit.distributions import NblParams, nbl_pmf_recursive
from nblfit.errors import (
    DomainError,
    OutOfRange,
    SeverityMassAtZero,
    UnnormalizedSeverity,
)


def brute_force_discrete(params, severity, y_max):
    """Convolution-based aggregate pmf, independent of the recursion."""
    pmf = nbl_pmf_recursive(params, 4 * y_max + 200)
    sev = np.zeros(y_max + 1)
    for s, p in severity.pmf.items():
        if s <= y_max:
            sev[s] = p
    conv = np.zeros(y_max + 1)
    conv[0] = 1.0
    total = pmf[0] * conv.copy()
    for n in range(1, len(pmf)):
        conv = np.convolve(conv, sev)[: y_max + 1]
        if not conv.any():
            break
        total += pmf[n] * conv
    return total


class TestSeverityValidation:
    def test_mass_at_zero_rejected(self):
        with pytest.raises(SeverityMassAtZero):
            DiscreteSeverity({0: 0.5, 1: 0.5})

    def test_unnormalized_rejected(self):
        with pytest.raises(UnnormalizedSeverity):
            DiscreteSeverity({1: 0.7, 2: 0.2})

    def test_continuous_unnormalized_rejected(self):
        with pytest.raises(UnnormalizedSeverity):
            ContinuousSeverity(density=lambda y: math.exp(-y) / 2, mean=1.0)

    def test_negative_mean_rejected(self):
        with pytest.raises(DomainError):
            ContinuousSeverity(density=lambda y: math.exp(-y), mean=-1.0)

    def test_exponential_constructor(self):
        sev = exponential_severity(2.0)
        assert sev.density(0.0) == pytest.approx(0.5)
        assert sev.mean == 2.0


class TestCompoundDiscrete:
    def test_degenerate_severity_is_count_pmf(self):
        # unit claims: S = X, so the aggregate pmf equals the claim-count pmf
        params = NblParams(0.7, 2.0)
        dist = compound_discrete(params, DiscreteSeverity({1: 1.0}), 20)
        pmf = nbl_pmf_recursive(params, 20)
        assert dist.atom_at_zero == pytest.approx(pmf[0], rel=1e-12)
        for y in range(1, 21):
            assert dist.pmf(y) == pytest.approx(pmf[y], rel=1e-10)

    @pytest.mark.parametrize(
        "pmf_spec",
        [
            {1: 0.6, 2: 0.4},
            {1: 0.25, 2: 0.5, 3: 0.25},
            {2: 0.5, 5: 0.5},
        ],
    )
    def test_matches_brute_force(self, pmf_spec):
        params = NblParams(1.3, 1.5)
        sev = DiscreteSeverity(pmf_spec)
        dist = compound_discrete(params, sev, 30)
        ref = brute_force_discrete(params, sev, 30)
        assert dist.atom_at_zero == pytest.approx(ref[0], rel=1e-10)
        for y in range(1, 31):
            assert dist.pmf(y) == pytest.approx(ref[y], rel=1e-8, abs=1e-15)

    def test_total_mass(self):
        params = NblParams(1.0, 5.0)
        dist = compound_discrete(params, DiscreteSeverity({1: 0.5, 2: 0.5}), 120)
        total = dist.atom_at_zero + dist.values.sum()
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_mean_wald_identity(self):
        # E(S) = E(X) E(Y)
        from nblfit.distributions import nbl_mean

        params = NblParams(1.0, 5.0)
        sev = DiscreteSeverity({1: 0.5, 3: 0.5})
        dist = compound_discrete(params, sev, 200)
        mean = float(dist.grid @ dist.values)
        assert mean == pytest.approx(nbl_mean(params) * 2.0, rel=1e-6)

    def test_pmf_out_of_range(self):
        dist = compound_discrete(NblParams(1.0, 5.0), DiscreteSeverity({1: 1.0}), 5)
        with pytest.raises(OutOfRange):
            dist.pmf(6)

    def test_negative_ymax(self):
        with pytest.raises(DomainError):
            compound_discrete(NblParams(1.0, 1.0), DiscreteSeverity({1: 1.0}), -1)


class TestCompoundContinuous:
    def test_total_mass_exponential(self):
        # (r, theta) = (1, 5): light tail, atom + integral of density near 1
        params = NblParams(1.0, 5.0)
        sev = exponential_severity(1.0)
        dist = compound_continuous(params, sev, 12.0, mesh=128)
        mass = dist.atom_at_zero + np.trapezoid(dist.values, dist.grid)
        assert mass == pytest.approx(1.0, abs=2e-3)

    def test_atom_is_zero_count_probability(self):
        params = NblParams(1.0, 5.0)
        dist = compound_continuous(params, exponential_severity(1.0), 5.0, mesh=64)
        assert dist.atom_at_zero == pytest.approx(
            nbl_pmf_recursive(params, 0)[0], rel=1e-10
        )

    def test_density_nonnegative_and_decaying(self):
        params = NblParams(1.0, 5.0)
        dist = compound_continuous(params, exponential_severity(1.0), 10.0, mesh=128)
        assert np.all(dist.values >= 0)
        assert dist.values[-1] < dist.values[len(dist.values) // 4]

    def test_mesh_floor(self):
        with pytest.raises(DomainError):
            compound_continuous(
                NblParams(1.0, 5.0), exponential_severity(1.0), 5.0, mesh=8
            )

    def test_bad_ymax(self):
        with pytest.raises(DomainError):
            compound_continuous(
                NblParams(1.0, 5.0), exponential_severity(1.0), 0.0
            )


class TestCompoundCdf:
    def test_discrete_cdf_monotone(self):
        dist = compound_discrete(
            NblParams(1.0, 2.0), DiscreteSeverity({1: 0.5, 2: 0.5}), 40
        )
        vals = [compound_cdf(dist, y) for y in range(41)]
        assert vals[0] == pytest.approx(dist.atom_at_zero)
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] <= 1.0 + 1e-12

    def test_continuous_cdf_monotone(self):
        dist = compound_continuous(
            NblParams(1.0, 5.0), exponential_severity(1.0), 8.0, mesh=64
        )
        ys = np.linspace(0.0, 8.0, 33)
        vals = [compound_cdf(dist, y) for y in ys]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_out_of_range(self):
        dist = compound_discrete(NblParams(1.0, 2.0), DiscreteSeverity({1: 1.0}), 5)
        with pytest.raises(OutOfRange):
            compound_cdf(dist, 7.0)
        with pytest.raises(OutOfRange):
            compound_cdf(dist, -1.0)


class TestMonteCarlo:
    def test_deterministic_given_seed(self):
        params = NblParams(1.0, 2.0)
        sev = DiscreteSeverity({1: 0.5, 2: 0.5})
        a = compound_monte_carlo(params, sev, 2000, seed=42)
        b = compound_monte_carlo(params, sev, 2000, seed=42)
        assert np.array_equal(a.totals, b.totals)

    def test_zero_atom_frequency(self):
        params = NblParams(1.0, 5.0)
        ecdf = compound_monte_carlo(params, DiscreteSeverity({1: 1.0}), 100000, seed=1)
        p0 = nbl_pmf_recursive(params, 0)[0]
        assert ecdf(0.0) == pytest.approx(p0, abs=4 * ecdf.std_error(0.0) + 1e-3)

    def test_matches_exact_discrete_cdf(self):
        params = NblParams(1.0, 2.0)
        sev = DiscreteSeverity({1: 0.5, 2: 0.5})
        dist = compound_discrete(params, sev, 60)
        ecdf = compound_monte_carlo(params, sev, 50000, seed=3)
        for y in [0.0, 1.0, 3.0, 8.0]:
            se = max(ecdf.std_error(y), 1e-4)
            assert abs(compound_cdf(dist, y) - ecdf(y)) < 4 * se

    def test_continuous_sampler_required(self):
        sev = ContinuousSeverity(density=lambda y: math.exp(-y), mean=1.0)
        with pytest.raises(DomainError):
            compound_monte_carlo(NblParams(1.0, 2.0), sev, 10, seed=0)

    def test_empirical_cdf_queries(self):
        ecdf = EmpiricalCdf(np.array([0.0, 0.0, 1.0, 2.0]))
        assert ecdf(0.0) == 0.5
        assert ecdf(1.5) == 0.75
        assert ecdf.std_error(0.0) == pytest.approx(math.sqrt(0.25 / 4))
