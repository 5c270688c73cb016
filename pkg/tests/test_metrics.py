import numpy as np
import pytest

from conftest import pad, unit
from xldrift.errors import (
    DegenerateVectorError,
    DimensionError,
    InsufficientDataError,
)
from xldrift.metrics import (
    cosine,
    euclidean,
    normalize,
    round_half_even,
    summary_stats,
)


class TestNormalize:
    def test_three_four_five(self):
        v = normalize(pad(3, 4))
        assert v[0] == pytest.approx(0.6)
        assert v[1] == pytest.approx(0.8)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-6)

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            v = normalize(rng.standard_normal(384))
            again = normalize(v)
            assert np.max(np.abs(again - v)) < 1e-7

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateVectorError):
            normalize(np.zeros(384))

    def test_direction_preserved(self):
        v = pad(2, -5, 1)
        n = normalize(v)
        assert cosine(v, n) == pytest.approx(1.0)


class TestEuclidean:
    def test_identity(self):
        v = unit(pad(1, 2, 3))
        assert euclidean(v, v) == 0.0

    def test_orthogonal_unit_vectors(self):
        assert euclidean(pad(1), pad(0, 1)) == pytest.approx(np.sqrt(2), abs=1e-6)

    def test_antipodal_unit_vectors(self):
        assert euclidean(pad(1), pad(-1)) == pytest.approx(2.0, abs=1e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            euclidean(np.zeros(384), np.zeros(383))

    def test_symmetry_exact(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a = rng.standard_normal(384).astype(np.float32)
            b = rng.standard_normal(384).astype(np.float32)
            assert euclidean(a, b) == euclidean(b, a)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            a, b, c = (unit(rng.standard_normal(384)) for _ in range(3))
            assert euclidean(a, c) <= euclidean(a, b) + euclidean(b, c) + 1e-9


class TestCosine:
    def test_identical(self):
        v = pad(1, 2, 3)
        assert cosine(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine(pad(1), pad(0, 1)) == pytest.approx(0.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateVectorError):
            cosine(np.zeros(384), pad(1))

    def test_squared_distance_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            u = unit(rng.standard_normal(384))
            v = unit(rng.standard_normal(384))
            assert euclidean(u, v) ** 2 == pytest.approx(2 - 2 * cosine(u, v), abs=1e-9)


class TestSummaryStats:
    def test_textbook(self):
        st = summary_stats([1.0, 2.0, 3.0])
        assert st.mean == pytest.approx(2.0)
        assert st.sd == pytest.approx(1.0)
        assert st.var == pytest.approx(1.0)
        assert st.n == 3

    def test_constant_list(self):
        st = summary_stats([0.5] * 100)
        assert st.mean == pytest.approx(0.5)
        assert st.sd == 0.0
        assert st.var == 0.0

    def test_var_is_sd_squared(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            st = summary_stats(rng.standard_normal(50))
            assert st.var == pytest.approx(st.sd**2, rel=1e-9)

    def test_translation_invariance(self):
        rng = np.random.default_rng(5)
        values = rng.standard_normal(40)
        base = summary_stats(values)
        shifted = summary_stats(values + 7.25)
        assert shifted.mean == pytest.approx(base.mean + 7.25)
        assert shifted.sd == pytest.approx(base.sd, abs=1e-12)

    def test_too_few_values(self):
        with pytest.raises(InsufficientDataError):
            summary_stats([1.0])


def test_round_half_even():
    assert round_half_even(0.625, 2) == 0.62
    assert round_half_even(0.635, 2) == 0.64
    assert round_half_even(0.761, 2) == 0.76
    assert round_half_even(2.85, 1) == 2.8
