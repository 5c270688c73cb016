import numpy as np
import pytest

from conftest import make_point
from xldrift.corpus import DIMENSION
from xldrift.errors import InsufficientDataError
from xldrift.projection import export_plot_data, pca_2d
from xldrift.corpus import CoordinateType


def points_from_matrix(x, ctype=CoordinateType.NATIVE_EN):
    return [make_point(f"p{i:04d}", row, ctype=ctype) for i, row in enumerate(x)]


def planar_cloud(seed, n=40):
    """Points confined to a random 2-D plane in 384-d."""
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((DIMENSION, 2)))
    coeffs = rng.standard_normal((n, 2)) * [3.0, 1.0]
    return coeffs @ basis.T


def eigh_fractions(x):
    """Oracle: variance fractions from a dense eigendecomposition."""
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (len(x) - 1)
    vals = np.linalg.eigvalsh(cov)
    total = vals.sum()
    return vals[-1] / total, vals[-2] / total


class TestPca2d:
    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            pca_2d(points_from_matrix(np.zeros((2, DIMENSION))))

    def test_planar_data_recovered(self):
        x = planar_cloud(0)
        proj = pca_2d(points_from_matrix(x))
        assert sum(proj.variance_fractions) == pytest.approx(1.0, abs=1e-6)
        # all pairwise distances survive the projection
        for i in range(0, len(x), 7):
            for j in range(i + 1, len(x), 5):
                original = np.linalg.norm(x[i] - x[j])
                projected = np.linalg.norm(proj.coords[i] - proj.coords[j])
                assert projected == pytest.approx(original, abs=1e-6)

    def test_identical_points_degenerate(self):
        x = np.tile(np.arange(DIMENSION, dtype=float), (5, 1))
        proj = pca_2d(points_from_matrix(x))
        assert proj.variance_fractions == (0.0, 0.0)
        assert not proj.components.any()
        assert not proj.coords.any()

    def test_rank_one_second_component_zero(self):
        direction = np.zeros(DIMENSION)
        direction[3] = 1.0
        x = np.outer([1.0, 2.0, 4.0, 8.0], direction)
        proj = pca_2d(points_from_matrix(x))
        assert proj.variance_fractions[0] == pytest.approx(1.0, abs=1e-9)
        assert proj.variance_fractions[1] == 0.0
        assert not proj.components[1].any()

    def test_matches_eigendecomposition_oracle(self):
        rng = np.random.default_rng(1)
        for trial in range(5):
            n = int(rng.integers(20, 200))
            x = rng.standard_normal((n, DIMENSION)) * rng.uniform(0.5, 3.0, DIMENSION)
            proj = pca_2d(points_from_matrix(x))
            expected = eigh_fractions(x)
            assert proj.variance_fractions[0] == pytest.approx(expected[0], abs=1e-6)
            assert proj.variance_fractions[1] == pytest.approx(expected[1], abs=1e-6)

    def test_components_orthonormal(self):
        x = np.random.default_rng(2).standard_normal((50, DIMENSION))
        proj = pca_2d(points_from_matrix(x))
        gram = proj.components @ proj.components.T
        assert np.allclose(gram, np.eye(2), atol=1e-6)

    def test_sign_convention(self):
        x = np.random.default_rng(3).standard_normal((30, DIMENSION))
        proj = pca_2d(points_from_matrix(x))
        for component in proj.components:
            assert component[np.argmax(np.abs(component))] > 0

    def test_rotation_invariance(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((40, DIMENSION))
        rotation, _ = np.linalg.qr(rng.standard_normal((DIMENSION, DIMENSION)))
        a = pca_2d(points_from_matrix(x)).coords
        b = pca_2d(points_from_matrix(x @ rotation.T)).coords
        for i in range(0, 40, 5):
            for j in range(i + 1, 40, 3):
                da = np.linalg.norm(a[i] - a[j])
                db = np.linalg.norm(b[i] - b[j])
                assert db == pytest.approx(da, abs=1e-6)

    def test_projected_coordinates_centered(self):
        x = np.random.default_rng(5).standard_normal((60, DIMENSION)) + 4.0
        proj = pca_2d(points_from_matrix(x))
        assert np.abs(proj.coords.mean(axis=0)).max() < 1e-6


class TestExportPlotData:
    def test_two_points_two_series(self, tmp_path):
        points = [
            make_point("a", np.arange(DIMENSION), ctype=CoordinateType.NATIVE_JA),
            make_point("a", np.arange(DIMENSION)[::-1], ctype=CoordinateType.MT_EN),
            make_point("b", np.ones(DIMENSION), ctype=CoordinateType.NATIVE_JA),
        ]
        proj = pca_2d(points)
        path = tmp_path / "plot.tsv"
        export_plot_data(proj, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "key\tseries\tx\ty"
        assert len(lines) == 4
        series = {line.split("\t")[1] for line in lines[1:]}
        assert series == {"native_ja", "mt_en"}

    def test_round_trip_precision(self, tmp_path):
        x = np.random.default_rng(6).standard_normal((10, DIMENSION))
        proj = pca_2d(points_from_matrix(x))
        path = tmp_path / "plot.tsv"
        export_plot_data(proj, path)
        for line, expected in zip(path.read_text().strip().split("\n")[1:], proj.coords):
            _, _, xs, ys = line.split("\t")
            assert abs(float(xs) - expected[0]) < 1e-9
            assert abs(float(ys) - expected[1]) < 1e-9

    def test_identical_vectors_identical_coordinates(self, tmp_path):
        shared = np.random.default_rng(7).standard_normal(DIMENSION)
        points = [
            make_point("a", shared, ctype=CoordinateType.NATIVE_JA),
            make_point("a", shared, ctype=CoordinateType.MT_EN),
            make_point("b", shared * -1, ctype=CoordinateType.NATIVE_JA),
            make_point("c", shared * 0.5, ctype=CoordinateType.NATIVE_JA),
        ]
        proj = pca_2d(points)
        assert np.allclose(proj.coords[0], proj.coords[1], atol=1e-12)

    def test_empty_rejected(self, tmp_path):
        proj = pca_2d(points_from_matrix(np.random.default_rng(8).standard_normal((3, DIMENSION))))
        proj.keys = []
        with pytest.raises(InsufficientDataError):
            export_plot_data(proj, tmp_path / "x.tsv")
