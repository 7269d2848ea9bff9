"""
Tests de lectura, normalización, particiones y ruido de etiquetas.
"""

import numpy as np
import pytest

from data import (
    Dataset,
    DataError,
    FeatureScaler,
    SplitSpec,
    inject_label_noise,
    load_csv,
    normalize_minmax,
    split,
    standardize_labels,
)


class TestDataset:
    """Tests del tipo Dataset."""

    def test_vector_labels_become_column(self):
        ds = Dataset(features=[[1.0], [2.0]], labels=[3.0, 4.0])
        assert ds.labels.shape == (2, 1)
        assert (ds.n, ds.d_x, ds.d_y) == (2, 1, 1)

    def test_rejects_row_mismatch(self):
        with pytest.raises(DataError):
            Dataset(features=np.zeros((3, 2)), labels=np.zeros(2))

    def test_rejects_nan(self):
        with pytest.raises(DataError):
            Dataset(features=[[np.nan]], labels=[1.0])

    def test_arrays_are_read_only(self, tiny_dataset):
        with pytest.raises(ValueError):
            tiny_dataset.features[0, 0] = 5.0

    def test_subset_keeps_domains(self):
        ds = Dataset(features=np.arange(4.0), labels=np.arange(4.0), domain_ids=[0, 0, 1, 1])
        sub = ds.subset([3, 0])
        assert sub.labels[:, 0].tolist() == [3.0, 0.0]
        assert sub.domain_ids.tolist() == [1, 0]


class TestLoadCsv:
    """Tests del lector de CSV."""

    def test_basic_parse(self, write_csv):
        path = write_csv("a,b,y\n1,2,3\n4,5,6\n7,8,9\n")
        ds = load_csv(path, ["y"])
        assert (ds.n, ds.d_x, ds.d_y) == (3, 2, 1)
        assert ds.column_names == ["a", "b"]
        assert ds.labels[:, 0].tolist() == [3.0, 6.0, 9.0]

    def test_missing_cell_filled_with_mean(self, write_csv):
        path = write_csv("a,y\n1.0,0\n,1\n3.0,2\n")
        ds = load_csv(path, ["y"])
        assert ds.features[1, 0] == pytest.approx(2.0)

    def test_question_mark_is_missing(self, write_csv):
        path = write_csv("a,y\n1.0,0\n?,1\n5.0,2\n")
        ds = load_csv(path, ["y"])
        assert ds.features[1, 0] == pytest.approx(3.0)

    def test_malformed_row(self, write_csv):
        path = write_csv("a,b,y\n1,2,3\n4,5\n")
        with pytest.raises(DataError):
            load_csv(path, ["y"])

    def test_non_numeric_cell(self, write_csv):
        path = write_csv("a,y\nhola,1\n")
        with pytest.raises(DataError):
            load_csv(path, ["y"])

    def test_unknown_label_column(self, write_csv):
        path = write_csv("a,y\n1,2\n")
        with pytest.raises(DataError):
            load_csv(path, ["z"])

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(tmp_path / "no_existe.csv", ["y"])

    def test_domain_column(self, write_csv):
        path = write_csv("a,site,y\n1,norte,1\n2,sur,2\n3,norte,3\n")
        ds = load_csv(path, ["y"], domain_column="site")
        assert ds.d_x == 1
        assert ds.domain_ids.tolist() == [0, 1, 0]


class TestNormalization:
    """Tests de min-max y estandarización."""

    def test_minmax_column(self):
        ds = Dataset(features=[[2.0], [4.0], [6.0]], labels=[0.0, 0.0, 0.0])
        scaled, _ = normalize_minmax(ds)
        assert scaled.features[:, 0].tolist() == pytest.approx([0.0, 0.5, 1.0])

    def test_constant_column_maps_to_zero(self):
        ds = Dataset(features=[[5.0], [5.0]], labels=[1.0, 2.0])
        scaled, _ = normalize_minmax(ds)
        assert scaled.features[:, 0].tolist() == [0.0, 0.0]

    def test_out_of_range_extrapolates(self):
        scaler = FeatureScaler(mins=np.array([0.0]), maxs=np.array([10.0]))
        assert scaler.transform_features(np.array([[12.0]]))[0, 0] == pytest.approx(1.2)

    def test_labels_untouched_by_minmax(self, tiny_dataset):
        scaled, _ = normalize_minmax(tiny_dataset)
        np.testing.assert_array_equal(scaled.labels, tiny_dataset.labels)

    def test_label_standardization_round_trip(self, tiny_dataset):
        standardized, scaler = standardize_labels(tiny_dataset)
        assert standardized.labels.mean() == pytest.approx(0.0)
        assert standardized.labels.std() == pytest.approx(1.0)
        np.testing.assert_allclose(scaler.inverse_labels(standardized.labels), tiny_dataset.labels)


class TestSplits:
    """Tests de particiones."""

    def test_fraction_sizes_and_determinism(self):
        ds = Dataset(features=np.arange(10.0), labels=np.arange(10.0))
        spec = SplitSpec(0.8, 0.1, 0.1, seed=7)
        first = split(ds, spec)
        second = split(ds, spec)
        assert tuple(p.n for p in first) == (8, 1, 1)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.labels, b.labels)

    def test_splits_are_disjoint_and_cover(self):
        ds = Dataset(features=np.arange(50.0), labels=np.arange(50.0))
        parts = split(ds, SplitSpec(0.6, 0.2, 0.2, seed=3))
        values = np.concatenate([p.labels[:, 0] for p in parts])
        assert sorted(values.tolist()) == list(range(50))

    def test_by_domain_test_shares_one_domain(self):
        ds = Dataset(features=np.arange(6.0), labels=np.arange(6.0), domain_ids=[0, 0, 1, 1, 2, 2])
        train, val, test = split(ds, SplitSpec(2 / 3, 0.0, 1 / 3, seed=1, mode="by-domain"))
        assert val is None
        assert len(set(test.domain_ids.tolist())) == 1
        assert not set(test.domain_ids.tolist()) & set(train.domain_ids.tolist())

    def test_zero_fraction_split_is_none(self):
        ds = Dataset(features=np.arange(20.0), labels=np.arange(20.0))
        train, val, test = split(ds, SplitSpec(0.8, 0.0, 0.2, seed=2))
        assert val is None
        assert train.n + test.n == 20

    def test_by_domain_requires_domains(self, tiny_dataset):
        with pytest.raises(DataError):
            split(tiny_dataset, SplitSpec(mode="by-domain"))

    def test_fixed_counts(self):
        ds = Dataset(features=np.zeros((1503, 5)), labels=np.zeros(1503))
        parts = split(ds, SplitSpec(seed=0, mode="fixed-counts", counts=(1003, 300, 200)))
        assert tuple(p.n for p in parts) == (1003, 300, 200)

    def test_fixed_counts_too_large(self, tiny_dataset):
        with pytest.raises(DataError):
            split(tiny_dataset, SplitSpec(mode="fixed-counts", counts=(2, 1, 1)))

    def test_fractions_must_sum_to_one(self, tiny_dataset):
        with pytest.raises(DataError):
            split(tiny_dataset, SplitSpec(0.5, 0.1, 0.1))


class TestLabelNoise:
    """Tests de inyección de ruido."""

    def test_zero_fraction_is_identity(self, tiny_dataset):
        assert inject_label_noise(tiny_dataset, 0.0, seed=1) is tiny_dataset

    def test_noise_scale(self):
        gen = np.random.default_rng(0)
        ds = Dataset(features=np.zeros((10000, 1)), labels=gen.standard_normal(10000))
        noisy = inject_label_noise(ds, 0.3, seed=5)
        diff = noisy.labels - ds.labels
        expected = 0.3 * ds.labels.std()
        # 3 errores estándar de la desviación muestral
        assert abs(diff.std() - expected) < 3 * expected / np.sqrt(2 * 10000)
        np.testing.assert_array_equal(noisy.features, ds.features)

    def test_single_row_unchanged(self):
        ds = Dataset(features=[[1.0]], labels=[2.0])
        assert inject_label_noise(ds, 0.5, seed=0).labels[0, 0] == 2.0

    def test_same_seed_same_noise(self, tiny_dataset):
        a = inject_label_noise(tiny_dataset, 0.3, seed=9)
        b = inject_label_noise(tiny_dataset, 0.3, seed=9)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_negative_fraction(self, tiny_dataset):
        with pytest.raises(DataError):
            inject_label_noise(tiny_dataset, -0.1, seed=0)
