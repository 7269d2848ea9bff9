"""
Tests de MAML de primer orden con aumento de la consulta.
"""

import numpy as np
import pytest

from data.dataset import Dataset
from metalearn import (
    MetaConfig,
    MetaLearnError,
    inner_adapt,
    meta_evaluate,
    meta_train,
    metamix_query,
)
from models import RidgeModel, fcn_init
from synthgen import MetaTaskSpec, gen_meta_tasks


def _linear_task(gen, w, n=10):
    X = gen.uniform(-1, 1, size=(2 * n, 1))
    ds = Dataset(features=X, labels=w * X[:, 0])
    return ds.subset(range(n)), ds.subset(range(n, 2 * n))


class TestMetaConfig:
    """Tests de la validación de MetaConfig."""

    def test_zero_inner_steps_rejected(self):
        with pytest.raises(MetaLearnError):
            MetaConfig(inner_steps=0)

    def test_unknown_pairing(self):
        with pytest.raises(MetaLearnError):
            MetaConfig(pairing="cosine")

    def test_to_dict(self):
        assert MetaConfig(hidden_sizes=(8,)).to_dict()["hidden_sizes"] == [8]


class TestInnerAdapt:
    """Tests de inner_adapt."""

    def test_hand_gradient(self):
        support = Dataset(features=[[1.0]], labels=[2.0])
        phi = inner_adapt(RidgeModel(theta=[0.0]), support, MetaConfig(inner_lr=0.5, inner_steps=1))
        assert phi.coef == pytest.approx([2.0])

    def test_fixed_point(self):
        support = Dataset(features=[[1.0], [2.0]], labels=[3.0, 6.0])
        phi = inner_adapt(RidgeModel(theta=[3.0]), support, MetaConfig(inner_steps=5))
        assert phi.coef == pytest.approx([3.0])

    def test_does_not_mutate_theta(self, rng):
        theta = fcn_init([2, 4, 1], rng)
        before = theta.get_flat()
        support = Dataset(features=rng.standard_normal((5, 2)), labels=rng.standard_normal(5))
        phi = inner_adapt(theta, support, MetaConfig(inner_steps=3))
        np.testing.assert_array_equal(theta.get_flat(), before)
        assert not np.array_equal(phi.get_flat(), before)


class TestMetamixQuery:
    """Tests de metamix_query."""

    def test_single_support_forced(self, rng):
        support = Dataset(features=[[1.0]], labels=[1.0])
        query = Dataset(features=[[0.0], [2.0], [4.0]], labels=[0.0, 2.0, 4.0])
        out = metamix_query(support, query, MetaConfig(pairing="uniform"), rng)
        assert out.partners.tolist() == [0, 0, 0]
        assert out.dataset.n == 3

    def test_nearest_label_limit(self):
        support = Dataset(features=[[0.0], [1.0]], labels=[4.9, 80.0])
        query = Dataset(features=np.zeros((200, 1)), labels=np.full(200, 5.0))
        cfg = MetaConfig(pairing="label", bandwidth_sigma=1e-3)
        out = metamix_query(support, query, cfg, np.random.default_rng(0))
        assert np.all(out.partners == 0)

    def test_convexity_and_recorded_mixing(self, rng):
        support = Dataset(features=rng.standard_normal((6, 2)), labels=rng.standard_normal(6))
        query = Dataset(features=rng.standard_normal((9, 2)), labels=rng.standard_normal(9))
        out = metamix_query(support, query, MetaConfig(pairing="label", bandwidth_sigma=0.5), rng)
        lam = out.lambdas[:, None]
        expected = lam * support.features[out.partners] + (1 - lam) * query.features
        np.testing.assert_allclose(out.dataset.features, expected)
        low = np.minimum(query.labels[:, 0], support.labels[out.partners, 0])
        high = np.maximum(query.labels[:, 0], support.labels[out.partners, 0])
        y = out.dataset.labels[:, 0]
        assert np.all((y >= low - 1e-12) & (y <= high + 1e-12))

    def test_none_pairing_returns_query(self, rng):
        support = Dataset(features=[[1.0]], labels=[1.0])
        query = Dataset(features=[[0.0]], labels=[0.0])
        out = metamix_query(support, query, MetaConfig(pairing="none"), rng)
        assert out.dataset is query

    def test_huge_bandwidth_matches_uniform(self):
        support = Dataset(features=np.zeros((4, 1)), labels=[0.0, 1.0, 5.0, 20.0])
        query = Dataset(features=np.zeros((1, 1)), labels=[0.5])
        counts = {}
        for pairing, sigma in (("label", 1e8), ("uniform", 1.0)):
            out = [metamix_query(support, query, MetaConfig(pairing=pairing, bandwidth_sigma=sigma),
                                 np.random.default_rng(s)).partners[0] for s in range(200)]
            counts[pairing] = out
        assert counts["label"] == counts["uniform"]


class TestMetaTrain:
    """Tests de meta_train y meta_evaluate."""

    def test_zero_outer_lr_keeps_theta(self, rng):
        tasks = [_linear_task(rng, w) for w in (1.0, 2.0)]
        model = fcn_init([1, 4, 1], rng)
        cfg = MetaConfig(outer_lr=0.0, max_iterations=5, meta_batch_size=2)
        result = meta_train(tasks, cfg, seed=0, model=model)
        np.testing.assert_array_equal(result.model.get_flat(), model.get_flat())
        assert len(result.outer_losses) == 5

    def test_deterministic(self):
        tasks = gen_meta_tasks(MetaTaskSpec(M=5, N_m=20, p=4, s=2, support_shots=5, query_shots=5, seed=0)).train_tasks
        cfg = MetaConfig(max_iterations=10, meta_batch_size=2, support_shots=5, query_shots=5, hidden_sizes=(8,))
        a = meta_train(tasks, cfg, seed=3)
        b = meta_train(tasks, cfg, seed=3)
        assert a.outer_losses == b.outer_losses

    def test_linear_task_converges(self):
        gen = np.random.default_rng(0)
        task = _linear_task(gen, 2.0, n=20)
        cfg = MetaConfig(outer_lr=0.05, inner_lr=0.1, inner_steps=1, pairing="none", max_iterations=400)
        result = meta_train([task], cfg, seed=0, model=RidgeModel(theta=[0.0]))
        evaluation = meta_evaluate(result.model, [task], cfg)
        assert evaluation.mean_mse <= 1e-3

    def test_no_tasks(self):
        with pytest.raises(MetaLearnError):
            meta_train([], MetaConfig(), seed=0)

    def test_oracle_zero_mse_and_single_task_interval(self):
        task = _linear_task(np.random.default_rng(1), 3.0)
        evaluation = meta_evaluate(RidgeModel(theta=[3.0]), [task], MetaConfig(inner_steps=2))
        assert evaluation.mean_mse == pytest.approx(0.0, abs=1e-20)
        assert evaluation.half_width == 0.0
        assert evaluation.degenerate_interval

    def test_interval_shrinks_with_more_tasks(self):
        gen = np.random.default_rng(2)
        tasks = [_linear_task(gen, w) for w in gen.uniform(1.0, 2.0, size=400)]
        model = RidgeModel(theta=[0.0])
        cfg = MetaConfig(inner_steps=1, inner_lr=0.01)
        small = meta_evaluate(model, tasks[:100], cfg)
        large = meta_evaluate(model, tasks, cfg)
        assert small.half_width / large.half_width == pytest.approx(2.0, rel=0.2)
