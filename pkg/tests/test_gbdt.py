"""Boosted tree training and prediction contracts."""

import numpy as np
import pytest

from contact_complexity import gbdt
from contact_complexity.textvec import SparseVector


def _toy_separable(n_per_class=20, seed=0):
    """Two clusters split cleanly on feature 0."""
    rng = np.random.default_rng(seed)
    X = np.vstack([
        rng.normal([-2.0, 0.0], 0.5, size=(n_per_class, 2)),
        rng.normal([2.0, 0.0], 0.5, size=(n_per_class, 2)),
    ])
    y = np.array([0] * n_per_class + [1] * n_per_class)
    return X, y


def _random_sparse(rng, n, n_features, max_nnz=12):
    vecs = []
    for _ in range(n):
        k = int(rng.integers(1, min(max_nnz, n_features)))
        idx = np.sort(rng.choice(n_features, size=k, replace=False)).astype(np.int32)
        vals = rng.random(k) + 0.01
        vecs.append(SparseVector(indices=idx, values=vals / np.linalg.norm(vals)))
    return vecs


class TestTrain:
    def test_separable_toy_set_reaches_full_accuracy(self):
        X, y = _toy_separable()
        ens = gbdt.train(X, y, gbdt.GbdtConfig(
            task="binary", n_rounds=20, max_depth=2, min_samples_leaf=1))
        probs = gbdt.predict_proba_many(ens, X)
        assert np.mean((probs[:, 1] >= 0.5) == y) == 1.0

    def test_single_leaf_model_predicts_class_prior(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(24, 3))
        y = np.array([0] * 6 + [1] * 12 + [2] * 6)
        ens = gbdt.train(X, y, gbdt.GbdtConfig(
            task="multiclass", n_rounds=1, learning_rate=1.0, max_depth=0,
            min_samples_leaf=1))
        for x in rng.normal(size=(5, 3)):
            np.testing.assert_allclose(
                gbdt.predict_proba(ens, x), [0.25, 0.5, 0.25], atol=1e-12)

    def test_training_is_deterministic(self, tmp_path):
        X, y = _toy_separable(seed=4)
        cfg = gbdt.GbdtConfig(task="binary", n_rounds=8, max_depth=3, min_samples_leaf=2)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        gbdt.save_model(a, gbdt.train(X, y, cfg))
        gbdt.save_model(b, gbdt.train(X, y, cfg))
        assert a.read_bytes() == b.read_bytes()

    def test_training_log_loss_non_increasing(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(300, 6))
        y = (X[:, 0] + 0.4 * rng.normal(size=300) > 0).astype(np.int64)
        ens = gbdt.train(X, y, gbdt.GbdtConfig(
            task="binary", n_rounds=40, max_depth=3, min_samples_leaf=5))
        losses = ens.train_log_loss
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_rejects_degenerate_data(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="at least 2"):
            gbdt.train(rng.normal(size=(1, 2)), np.array([0]),
                       gbdt.GbdtConfig(task="binary"))
        with pytest.raises(ValueError, match="single class"):
            gbdt.train(rng.normal(size=(8, 2)), np.zeros(8, dtype=np.int64),
                       gbdt.GbdtConfig(task="binary"))
        with pytest.raises(ValueError, match="missing"):
            gbdt.train(rng.normal(size=(8, 2)), np.array([0, 0, 0, 0, 2, 2, 2, 2]),
                       gbdt.GbdtConfig(task="multiclass", n_classes=3))
        with pytest.raises(ValueError, match="learning_rate"):
            gbdt.train(rng.normal(size=(8, 2)), np.array([0, 1] * 4,),
                       gbdt.GbdtConfig(task="binary", learning_rate=0.0))

    def test_sparse_rejects_negative_values(self):
        vecs = [SparseVector(indices=np.array([0], np.int32), values=np.array([-1.0])),
                SparseVector(indices=np.array([1], np.int32), values=np.array([1.0]))]
        with pytest.raises(ValueError, match="nonnegative"):
            gbdt.train(vecs, np.array([0, 1]), gbdt.GbdtConfig(task="binary"))

    def test_sparse_and_dense_agree_on_same_data(self):
        rng = np.random.default_rng(8)
        n, f = 200, 15
        vecs = _random_sparse(rng, n, f)
        dense = np.zeros((n, f))
        for i, v in enumerate(vecs):
            dense[i, v.indices] = v.values
        y = (dense[:, 0] + dense[:, 3] > 0.3).astype(np.int64)
        cfg = gbdt.GbdtConfig(task="binary", n_rounds=10, max_depth=3, min_samples_leaf=5)
        ens_sparse = gbdt.train(vecs, y, cfg)
        ens_dense = gbdt.train(dense, y, cfg)
        ps = gbdt.predict_proba_many(ens_sparse, vecs, n_features=f)
        pd = gbdt.predict_proba_many(ens_dense, dense)
        np.testing.assert_allclose(ps, pd, atol=1e-12)


class TestPredict:
    def test_zero_scores_give_uniform_distributions(self):
        # all-zero leaves arise from a zero-gradient fit: constant labels are
        # rejected, so construct the ensemble directly
        leaf = gbdt.Tree(
            feature=np.array([-1], np.int32), threshold=np.zeros(1),
            left=np.array([-1], np.int32), right=np.array([-1], np.int32),
            value=np.zeros(1))
        binary = gbdt.BoostedEnsemble(
            task="binary", n_classes=2, n_rounds=2, learning_rate=0.5,
            base_scores=np.zeros(1), trees=[[leaf], [leaf]])
        np.testing.assert_allclose(gbdt.predict_proba(binary, np.zeros(3)), [0.5, 0.5])
        multi = gbdt.BoostedEnsemble(
            task="multiclass", n_classes=3, n_rounds=1, learning_rate=0.5,
            base_scores=np.zeros(3), trees=[[leaf, leaf, leaf]])
        np.testing.assert_allclose(gbdt.predict_proba(multi, np.zeros(3)), [1 / 3] * 3)
        staged = gbdt.staged_predict_proba(binary, np.zeros(3))
        assert all(np.array_equal(s, staged[0]) for s in staged)

    def test_staged_final_equals_predict_bit_exactly(self):
        rng = np.random.default_rng(17)
        n, f = 300, 12
        vecs = _random_sparse(rng, n, f)
        y = rng.integers(0, 3, size=n)
        y[:3] = [0, 1, 2]
        ens = gbdt.train(vecs, y, gbdt.GbdtConfig(
            task="multiclass", n_classes=3, n_rounds=12, max_depth=3,
            min_samples_leaf=5))
        for _ in range(50):
            x = _random_sparse(rng, 1, f)[0]
            staged = gbdt.staged_predict_proba(ens, x)
            assert len(staged) == 12
            assert np.array_equal(staged[-1], gbdt.predict_proba(ens, x))
            for s in staged:
                assert abs(s.sum() - 1.0) < 1e-9
                assert np.all(s >= 0) and np.all(s <= 1)

    def test_single_round_staged_is_predict(self):
        X, y = _toy_separable(seed=2)
        ens = gbdt.train(X, y, gbdt.GbdtConfig(
            task="binary", n_rounds=1, max_depth=2, min_samples_leaf=1))
        staged = gbdt.staged_predict_proba(ens, X[0])
        assert len(staged) == 1
        assert np.array_equal(staged[0], gbdt.predict_proba(ens, X[0]))

    def test_staged_log_loss_non_increasing_on_toy_set(self):
        X, y = _toy_separable(seed=3)
        ens = gbdt.train(X, y, gbdt.GbdtConfig(
            task="binary", n_rounds=20, max_depth=2, min_samples_leaf=1))
        staged = gbdt.staged_probs_many(ens, X)  # (M, n, 2)
        p_true = staged[:, np.arange(len(y)), y]
        losses = -np.mean(np.log(np.clip(p_true, 1e-15, None)), axis=1)
        assert np.all(np.diff(losses) <= 1e-12)

    def test_batch_matches_single_row(self):
        rng = np.random.default_rng(23)
        X, y = _toy_separable(seed=5)
        ens = gbdt.train(X, y, gbdt.GbdtConfig(
            task="binary", n_rounds=10, max_depth=2, min_samples_leaf=1))
        batch = gbdt.predict_proba_many(ens, X)
        for i in (0, 7, 39):
            np.testing.assert_allclose(batch[i], gbdt.predict_proba(ens, X[i]), atol=1e-12)
        staged_batch = gbdt.staged_probs_many(ens, X)
        singles = gbdt.staged_predict_proba(ens, X[7])
        for t in range(10):
            np.testing.assert_allclose(staged_batch[t, 7], singles[t], atol=1e-12)


class TestPersistence:
    def test_round_trip_reproduces_predictions_bit_exactly(self, tmp_path):
        rng = np.random.default_rng(31)
        n, f = 250, 10
        vecs = _random_sparse(rng, n, f)
        y = rng.integers(0, 4, size=n)
        y[:4] = [0, 1, 2, 3]
        ens = gbdt.train(vecs, y, gbdt.GbdtConfig(
            task="multiclass", n_classes=4, n_rounds=6, max_depth=4,
            min_samples_leaf=4))
        path = tmp_path / "model.txt"
        gbdt.save_model(path, ens)
        loaded = gbdt.load_model(path)
        for i in range(20):
            assert np.array_equal(
                gbdt.predict_proba(ens, vecs[i]), gbdt.predict_proba(loaded, vecs[i]))

    def test_save_is_idempotent(self, tmp_path):
        X, y = _toy_separable(seed=6)
        ens = gbdt.train(X, y, gbdt.GbdtConfig(
            task="binary", n_rounds=4, max_depth=2, min_samples_leaf=1))
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        gbdt.save_model(a, ens)
        gbdt.save_model(b, gbdt.load_model(a))
        assert a.read_bytes() == b.read_bytes()

    def test_load_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("not a model\n")
        with pytest.raises(Exception, match="gbdt-v1"):
            gbdt.load_model(path)
