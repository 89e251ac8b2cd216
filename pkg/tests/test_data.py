import pytest

from nblfit.data import REFERENCE, ZAIRE_ENTRIES, zaire_dataset


class TestZaire:
    def test_sample_size(self):
        data = zaire_dataset()
        assert data.n == 4000
        assert data.counts.tolist() == [0, 1, 2, 3, 4, 5]
        assert data.freqs.tolist() == [3719, 232, 38, 7, 3, 1]

    def test_summary_statistics(self):
        data = zaire_dataset()
        assert data.mean() == pytest.approx(REFERENCE.sample_mean, abs=0.01)
        assert data.variance() == pytest.approx(REFERENCE.sample_variance, abs=0.005)

    def test_overdispersion(self):
        data = zaire_dataset()
        assert data.variance() > data.mean()


class TestReferenceTable:
    def test_columns_align_with_observed(self):
        assert len(REFERENCE.observed) == len(ZAIRE_ENTRIES)
        for column in (
            REFERENCE.nbl_expected,
            REFERENCE.nb_expected,
            REFERENCE.pig_expected,
        ):
            assert len(column) == len(REFERENCE.observed)
            assert sum(column) == pytest.approx(4000.0, abs=1.0)

    def test_benchmark_keys(self):
        for table in (REFERENCE.chi_square, REFERENCE.p_value, REFERENCE.log_likelihood):
            assert set(table) == {"nbl", "nb", "pig"}
