import numpy as np
import pytest

from ilsll.core import make_rng
from ilsll.featsel import (
    FRIEDMAN_N_FEATURES,
    Dataset,
    FsProblem,
    IngestionError,
    friedman_generate,
    friedman_samples,
    friedman_target,
    load_dataset,
    make_split,
    write_dataset_csv,
)


def write_csv(path, text):
    path.write_text(text)
    return str(path)


class TestLoadDataset:
    def test_default_target_is_last_column(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "a,b,y\n1,2,0\n3,4,1\n")
        ds = load_dataset(p, "classification")
        assert ds.feature_names == ["a", "b"]
        assert ds.features.tolist() == [[1, 2], [3, 4]]
        assert ds.targets.tolist() == [0, 1]

    def test_target_by_name_and_index(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "y,a\n5,1\n7,2\n9,3\n")
        by_name = load_dataset(p, "regression", target_column="y")
        by_index = load_dataset(p, "regression", target_column=0)
        assert by_name.features.tolist() == by_index.features.tolist() == [[1], [2], [3]]

    def test_regression_targets_minmax_scaled(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "a,y\n1,10\n2,20\n3,15\n")
        ds = load_dataset(p, "regression")
        assert ds.targets.tolist() == [0.0, 1.0, 0.5]

    def test_class_labels_densified_by_first_appearance(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "a,y\n1,7\n2,3\n3,7\n4,5\n")
        ds = load_dataset(p, "classification")
        assert ds.targets.tolist() == [0, 1, 0, 2]
        assert ds.n_classes == 3

    def test_non_numeric_cell_reports_position(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "a,y\n1,0\nx,1\n")
        with pytest.raises(IngestionError, match="row 3"):
            load_dataset(p, "classification")

    def test_ragged_row_rejected(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "a,b,y\n1,2,0\n3,4\n")
        with pytest.raises(IngestionError):
            load_dataset(p, "classification")

    def test_missing_target_name(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "a,y\n1,0\n")
        with pytest.raises(IngestionError):
            load_dataset(p, "classification", target_column="z")

    def test_unknown_task(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "a,y\n1,0\n2,1\n")
        with pytest.raises(IngestionError):
            load_dataset(p, "ranking")


def toy_classification(n=20, n_features=4, seed=60):
    rng = make_rng(seed)
    features = rng.normal(size=(n, n_features))
    targets = rng.integers(0, 2, size=n)
    return Dataset(
        features=features,
        targets=targets.astype(np.int64),
        task="classification",
        feature_names=[f"f{i}" for i in range(n_features)],
    )


class TestSplit:
    def test_seventy_thirty_counts(self):
        rng = make_rng(61)
        ds = Dataset(
            features=rng.normal(size=(506, 13)),
            targets=rng.random(506),
            task="regression",
            feature_names=[f"f{i}" for i in range(13)],
        )
        inst = make_split(ds, 1)
        assert len(inst.train_idx) == 354
        assert len(inst.test_idx) == 152

    def test_split_partitions_rows(self):
        inst = make_split(toy_classification(), 2)
        joined = sorted(list(inst.train_idx) + list(inst.test_idx))
        assert joined == list(range(20))

    def test_split_is_seed_deterministic(self):
        a = make_split(toy_classification(), 3)
        b = make_split(toy_classification(), 3)
        assert a.train_idx.tolist() == b.train_idx.tolist()

    def test_too_few_examples(self):
        ds = toy_classification(n=8)
        with pytest.raises(ValueError):
            make_split(ds, 0)


def brute_force_knn_predict(inst, mask, query_row, k=3):
    """Independent linear-scan 3-NN on standardized features."""
    sel = np.nonzero(np.asarray(mask))[0]
    q = (np.asarray(query_row, dtype=float) - inst.mean) * inst.scale
    dists = []
    for idx, row in enumerate(inst._train_std):
        d = sum((q[s] - row[s]) ** 2 for s in sel)
        dists.append((d, idx))
    dists.sort()
    top = [idx for _, idx in dists[:k]]
    if inst.task == "classification":
        votes = {}
        for idx in top:
            c = int(inst.train_y[idx])
            votes[c] = votes.get(c, 0) + 1
        best = max(votes.values())
        return min(c for c, v in votes.items() if v == best)
    return float(np.mean([inst.train_y[idx] for idx in top]))


class TestKnn:
    def test_matches_brute_force_scan(self):
        inst = make_split(toy_classification(), 4)
        mask = np.array([1, 1, 1, 1], dtype=np.uint8)
        for row in inst.test_x:
            assert inst.knn_predict(mask, row) == brute_force_knn_predict(
                inst, mask, row
            )

    def test_partial_mask_matches_brute_force(self):
        inst = make_split(toy_classification(seed=62), 5)
        mask = np.array([1, 0, 1, 0], dtype=np.uint8)
        for row in inst.test_x:
            assert inst.knn_predict(mask, row) == brute_force_knn_predict(
                inst, mask, row
            )

    def test_regression_prediction_is_neighbor_mean(self):
        rng = make_rng(63)
        ds = Dataset(
            features=rng.normal(size=(30, 3)),
            targets=rng.random(30),
            task="regression",
            feature_names=["a", "b", "c"],
        )
        inst = make_split(ds, 6)
        mask = np.ones(3, dtype=np.uint8)
        for row in inst.test_x[:5]:
            assert inst.knn_predict(mask, row) == pytest.approx(
                brute_force_knn_predict(inst, mask, row)
            )

    def test_empty_mask_falls_back_to_majority(self):
        inst = make_split(toy_classification(seed=64), 7)
        counts = np.bincount(inst.train_y)
        pred = inst.knn_predict(np.zeros(4, dtype=np.uint8), inst.test_x[0])
        assert pred == int(np.argmax(counts))


class TestFitness:
    def test_hand_scored_toy_set(self):
        # 12 examples, one feature equal to the class: 3-NN is always right
        features = np.array([[float(i % 2)] for i in range(12)])
        targets = np.array([i % 2 for i in range(12)], dtype=np.int64)
        ds = Dataset(
            features=features, targets=targets, task="classification",
            feature_names=["f0"],
        )
        inst = make_split(ds, 8)
        value = inst.evaluate(np.array([1], dtype=np.uint8))
        # accuracy 1.0, no sparsity bonus with the single feature selected
        assert value == pytest.approx(0.98)

    def test_sparsity_bonus(self):
        inst = make_split(toy_classification(seed=65), 9)
        all_off = inst.evaluate(np.zeros(4, dtype=np.uint8))
        preds = np.full(len(inst.test_y), inst._fallback)
        acc = float(np.mean(preds == inst.test_y))
        assert all_off == pytest.approx(0.98 * acc + 0.02)

    def test_memoized(self):
        inst = make_split(toy_classification(seed=66), 10)
        calls = []
        original = inst._predict_std

        def counting(mask, rows):
            calls.append(1)
            return original(mask, rows)

        inst._predict_std = counting
        bits = np.array([1, 0, 1, 1], dtype=np.uint8)
        first = inst.evaluate(bits)
        second = inst.evaluate(bits.copy())
        assert first == second
        assert len(calls) == 1

    def test_problem_adapter(self):
        inst = make_split(toy_classification(seed=67), 11)
        problem = FsProblem(inst)
        assert problem.n == 4
        bits = np.array([1, 1, 0, 0], dtype=np.uint8)
        assert problem.evaluate(bits) == inst.evaluate(bits)
        with pytest.raises(ValueError):
            problem.evaluate(np.zeros(3, dtype=np.uint8))


class TestFriedman:
    def test_target_at_origin(self):
        expected = 9.0 * np.exp(-9.0) - 0.8
        assert friedman_target(np.zeros(FRIEDMAN_N_FEATURES)) == pytest.approx(
            expected, abs=1e-12
        )
        assert expected == pytest.approx(-0.7989, abs=5e-4)

    def test_target_depends_only_on_first_eight(self, rng):
        u = rng.random(FRIEDMAN_N_FEATURES)
        v = u.copy()
        v[8:] = rng.random(FRIEDMAN_N_FEATURES - 8)
        assert friedman_target(u) == pytest.approx(friedman_target(v), abs=1e-12)

    def test_inputs_on_eleven_level_grid(self):
        u, _, _, _ = friedman_samples(200, make_rng(70))
        levels = np.unique(np.round(u * 10))
        assert np.allclose(u * 10, np.round(u * 10), atol=1e-12)
        assert levels.min() >= 0 and levels.max() <= 10

    def test_signal_to_noise_ratio(self):
        u, clean, noisy, sigma = friedman_samples(10_000, make_rng(71))
        ratio = np.var(clean, ddof=1) / sigma**2
        assert 1.8 <= ratio <= 2.2

    def test_generated_dataset_shape_and_scaling(self):
        ds = friedman_generate(300, make_rng(72))
        assert ds.features.shape == (300, FRIEDMAN_N_FEATURES)
        assert ds.task == "regression"
        assert ds.targets.min() == pytest.approx(0.0)
        assert ds.targets.max() == pytest.approx(1.0)


class TestCsvRoundTrip:
    def test_write_then_load(self, tmp_path):
        ds = friedman_generate(50, make_rng(73))
        path = tmp_path / "fr.csv"
        write_dataset_csv(path, ds.features, ds.targets, ds.feature_names)
        loaded = load_dataset(str(path), "regression")
        assert loaded.features.shape == ds.features.shape
        assert np.allclose(loaded.features, ds.features)
        # loader re-applies min-max scaling; already-scaled targets round trip
        assert np.allclose(loaded.targets, ds.targets)
