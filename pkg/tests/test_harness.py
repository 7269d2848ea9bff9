"""
Tests de configuración, entrenamiento por brazo y ejecutores de experimentos.
Usan datasets sintéticos pequeños; las corridas Monte Carlo completas están
marcadas como slow.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from data.dataset import Dataset
from harness import (
    ARMS,
    ConfigError,
    ExperimentError,
    arm_policy,
    config_from_dict,
    dump_pair_table,
    invariance_score,
    load_config,
    run_experiment,
    run_invariance,
    run_meta,
    run_noise,
    run_sweep,
    run_tabular,
    run_theorem1,
    run_theorem3,
    train_fcn,
    validate_theorem3,
)
from harness import invariance, tabular
from harness.config import MixConfig, TrainingConfig
from harness.invariance import kl_on_grid
from harness.parallel import run_seeds
from mixer import MixPolicy
from models import DivergenceError
from storage import aggregate, payload_equal

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

SMALL_TRAINING = {"hidden_sizes": [16, 16], "lr": 0.01, "batch_size": 32, "epochs": 3}


def _tabular_cfg(**overrides):
    data = {
        "kind": "tabular-train",
        "seeds": [0, 1],
        "arms": ["erm", "mixup", "cmixup"],
        "dataset": {
            "synthetic": {"generator": "single-index", "N": 200, "p": 6, "s": 2, "K": 3},
            "split": {"train_fraction": 0.6, "val_fraction": 0.2, "test_fraction": 0.2},
        },
        "mix": {"bandwidth_sigma": 0.5, "beta_alpha": 2.0},
        "training": SMALL_TRAINING,
    }
    data.update(overrides)
    return config_from_dict(data)


def _pooled_std(a, b):
    # Piso para semillas con RMSE casi idéntico
    return max(float(np.sqrt((a ** 2 + b ** 2) / 2)), 1e-3)


def _seed_job(cfg, seed):
    return [{"seed": seed, "value": cfg * seed}]


class TestConfig:
    """Tests de la carga y validación de configuraciones."""

    @pytest.mark.parametrize("name", sorted(p.name for p in CONFIG_DIR.glob("*.json")))
    def test_shipped_configs_parse(self, name):
        cfg = load_config(CONFIG_DIR / name)
        assert cfg.seeds

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError):
            config_from_dict({"kind": "theorem1", "seeds": [0], "colour": "red"})

    def test_unknown_section_key(self):
        with pytest.raises(ConfigError):
            config_from_dict({"kind": "theorem1", "seeds": [0], "mix": {"sigma": 1.0}})

    def test_missing_kind(self):
        with pytest.raises(ConfigError):
            config_from_dict({"seeds": [0]})

    def test_unknown_arm(self):
        with pytest.raises(ConfigError):
            _tabular_cfg(arms=["erm", "cutmix"])

    def test_tabular_requires_dataset(self):
        with pytest.raises(ConfigError):
            config_from_dict({"kind": "tabular-train", "seeds": [0]})

    def test_invalid_split(self):
        with pytest.raises(ConfigError):
            _tabular_cfg(dataset={"synthetic": {"generator": "single-index"},
                                  "split": {"train_fraction": 0.9, "val_fraction": 0.9, "test_fraction": 0.0}})

    def test_empty_seeds(self):
        with pytest.raises(ConfigError):
            config_from_dict({"kind": "theorem1", "seeds": []})

    def test_invalid_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{no es json", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_dataset_file(self, tmp_path):
        cfg = config_from_dict({"kind": "tabular-train", "seeds": [0],
                                "dataset": {"path": "no_existe.csv", "label_columns": ["y"]}}, tmp_path)
        with pytest.raises(ConfigError):
            cfg.dataset_path()

    def test_to_dict_is_json(self):
        json.dumps(_tabular_cfg().to_dict())


class TestArmPolicy:
    """Tests del mapeo brazo -> política."""

    def test_every_arm_maps(self):
        mix = MixConfig()
        for arm in ARMS:
            policy = arm_policy(arm, mix)
            assert (policy is None) == (arm == "erm")

    def test_manifold_uses_hidden_site(self):
        policy = arm_policy("manifold-mixup", MixConfig(site="input", manifold_site="hidden-2"))
        assert policy.metric == "uniform"
        assert policy.site == 2

    def test_batch_scope(self):
        assert arm_policy("cmixup-batch", MixConfig()).scope == "batch"

    def test_cmixup_uses_configured_site(self):
        assert arm_policy("cmixup", MixConfig(site="hidden-1")).site == 1


class TestTrainFcn:
    """Tests del entrenador."""

    def test_erm_reduces_loss(self, linear_dataset):
        training = TrainingConfig(hidden_sizes=(16,), lr=0.01, batch_size=16, epochs=30)
        outcome = train_fcn(linear_dataset, None, None, training, seed=0)
        assert outcome.train_losses[-1] < outcome.train_losses[0]
        assert outcome.best_epoch == 30

    def test_best_epoch_selection(self, linear_dataset):
        val = linear_dataset.subset(range(10))
        training = TrainingConfig(hidden_sizes=(8,), epochs=5, batch_size=16)
        outcome = train_fcn(linear_dataset, val, MixPolicy(metric="label", bandwidth_sigma=0.5), training, seed=1)
        assert len(outcome.val_rmse) == 5
        assert outcome.best_val_rmse == min(outcome.val_rmse)

    @pytest.mark.parametrize("arm", ["manifold-mixup", "cmixup-batch", "cmixup-representation-label"])
    def test_arm_variants_train(self, linear_dataset, arm):
        training = TrainingConfig(hidden_sizes=(8, 8), epochs=2, batch_size=16)
        policy = arm_policy(arm, MixConfig(bandwidth_sigma=0.5))
        outcome = train_fcn(linear_dataset, None, policy, training, seed=2)
        assert all(np.isfinite(outcome.train_losses))

    def test_site_beyond_network(self, linear_dataset):
        policy = MixPolicy(metric="label", site="hidden-3")
        with pytest.raises(ConfigError):
            train_fcn(linear_dataset, None, policy, TrainingConfig(hidden_sizes=(4,), epochs=1), seed=0)

    def test_deterministic(self, linear_dataset):
        training = TrainingConfig(hidden_sizes=(8,), epochs=2, batch_size=16)
        policy = MixPolicy(metric="label", bandwidth_sigma=0.5)
        a = train_fcn(linear_dataset, None, policy, training, seed=4)
        b = train_fcn(linear_dataset, None, policy, training, seed=4)
        np.testing.assert_array_equal(a.model.get_flat(), b.model.get_flat())

    def test_predictions_in_original_units(self):
        gen = np.random.default_rng(0)
        X = gen.uniform(size=(64, 2))
        ds = Dataset(features=X, labels=1000.0 + 10.0 * X[:, 0])
        training = TrainingConfig(hidden_sizes=(8,), epochs=40, batch_size=16)
        outcome = train_fcn(ds, None, None, training, seed=0)
        assert abs(outcome.predict(X).mean() - 1000.0 - 5.0) < 5.0


class TestRunSeeds:
    """Tests de la ejecución por semillas."""

    def test_sorted_by_seed(self):
        records = run_seeds(_seed_job, 2, [3, 1, 2])
        assert [r["seed"] for r in records] == [1, 2, 3]

    def test_processes_match_serial(self):
        assert run_seeds(_seed_job, 2, [2, 0, 1], jobs=2) == run_seeds(_seed_job, 2, [2, 0, 1], jobs=1)


class TestRunTabular:
    """Tests de run_tabular y run_noise sobre datos sintéticos."""

    def test_records_per_seed_and_arm(self):
        result = run_tabular(_tabular_cfg())
        assert len(result.records) == 2 * 3
        assert set(result.aggregates) == {"erm", "mixup", "cmixup"}
        assert all(r["status"] == "ok" for r in result.records)

    def test_aggregates_recomputable(self):
        result = run_tabular(_tabular_cfg())
        again = aggregate(result.records, ("test_rmse", "test_mape", "best_val_rmse"), group_by="arm")
        for arm, stats in again.items():
            assert stats["test_rmse"]["mean"] == pytest.approx(result.aggregates[arm]["test_rmse"]["mean"], abs=1e-12)

    def test_reproducible_payload(self):
        cfg = _tabular_cfg(seeds=[0])
        assert payload_equal(run_tabular(cfg), run_tabular(cfg))

    def test_divergence_recorded(self, monkeypatch):
        real = tabular.train_fcn

        def diverging_erm(train, val, policy, *args, **kwargs):
            if policy is None:
                raise DivergenceError("pérdida no finita", step=7, loss=float("nan"))
            return real(train, val, policy, *args, **kwargs)

        monkeypatch.setattr(tabular, "train_fcn", diverging_erm)
        result = run_tabular(_tabular_cfg(seeds=[0], arms=["erm", "mixup"]))
        assert result.records[0]["status"] == "diverged"
        assert result.records[0]["step"] == 7
        assert result.records[1]["status"] == "ok"
        assert result.summary["diverged"] == 1

    def test_all_diverged_raises(self, monkeypatch):
        def diverging(*args, **kwargs):
            raise DivergenceError("pérdida no finita", step=3, loss=float("nan"))

        monkeypatch.setattr(tabular, "train_fcn", diverging)
        with pytest.raises(ExperimentError):
            run_tabular(_tabular_cfg(seeds=[0, 1], arms=["erm", "cmixup"]))

    def test_noise_run(self):
        cfg = _tabular_cfg(kind="noise-robustness", seeds=[0], arms=["erm", "cmixup"])
        result = run_experiment(cfg)
        assert len(result.records) == 2

    def test_noise_only_touches_train(self):
        cfg = _tabular_cfg(seeds=[0])
        noisy = _tabular_cfg(kind="noise-robustness", seeds=[0])
        _, val_clean, test_clean = tabular.prepare_splits(cfg, 0)
        train_noisy, val_noisy, test_noisy = tabular.prepare_splits(noisy, 0)
        train_clean, _, _ = tabular.prepare_splits(cfg, 0)
        np.testing.assert_array_equal(val_clean.labels, val_noisy.labels)
        np.testing.assert_array_equal(test_clean.labels, test_noisy.labels)
        assert not np.array_equal(train_clean.labels, train_noisy.labels)

    def test_csv_dataset(self, tmp_path):
        gen = np.random.default_rng(0)
        X = gen.uniform(size=(80, 2))
        lines = ["a,b,y"] + [f"{a},{b},{a + 2 * b}" for a, b in X]
        (tmp_path / "toy.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        cfg = config_from_dict({
            "kind": "tabular-train", "seeds": [0], "arms": ["erm"],
            "dataset": {"path": "toy.csv", "label_columns": ["y"],
                        "split": {"mode": "fixed-counts", "counts": [50, 15, 15]}},
            "training": SMALL_TRAINING,
        }, config_dir=tmp_path)
        result = run_tabular(cfg)
        assert result.records[0]["status"] == "ok"

    def test_dump_pair_table(self, tmp_path):
        path = dump_pair_table(_tabular_cfg(), tmp_path / "pairs.csv")
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header == "anchor,candidate,distance,probability"


class TestTheorems:
    """Tests de las simulaciones de ordenamiento."""

    def test_theorem1_small(self):
        cfg = config_from_dict({
            "kind": "theorem1", "seeds": [0, 1],
            "theorem": {"generator": {"N": 400, "p": 8, "s": 2, "K": 3, "sigma_xi": 0.2}, "n_test": 200},
        })
        result = run_theorem1(cfg)
        assert len(result.records) == 2
        record = result.records[0]
        for policy in ("uniform", "feature", "label"):
            assert record[f"mse_{policy}"] >= 0
        assert record["same_cluster_label"] > record["same_cluster_uniform"]
        assert 0.0 <= result.summary["ordering_fraction"] <= 1.0

    def test_theorem3_small(self):
        cfg = config_from_dict({"kind": "theorem3", "seeds": [0, 1]})
        result = run_theorem3(cfg)
        for record in result.records:
            assert record["pairing_bound_holds"]
            assert record["a_block_ratio"] <= 0.25
        assert result.summary["pairing_bound_fraction"] == 1.0

    def test_theorem3_rejects_invalid_regime(self):
        cfg = config_from_dict({"kind": "theorem3", "seeds": [0],
                                "theorem": {"generator": {"n": 2000, "sigma_eps": 0.1}}})
        with pytest.raises(ConfigError) as info:
            validate_theorem3(cfg)
        assert "p1²" in str(info.value)

    def test_theorem3_unenforced_regime_runs(self):
        cfg = config_from_dict({
            "kind": "theorem3", "seeds": [0],
            "theorem": {"generator": {"n": 60, "p1": 10, "p2": 4, "sigma_a": 0.0}, "enforce_regime": False},
        })
        result = run_theorem3(cfg)
        assert result.records[0]["status"] == "ok"


class TestInvariance:
    """Tests del puntaje de invariancia."""

    def test_identical_domains_score_zero(self):
        gen = np.random.default_rng(0)
        h = gen.standard_normal((200, 3))
        hidden = np.vstack([h, h])
        labels = np.concatenate([np.arange(200.0), np.arange(200.0)])
        domains = np.repeat([0, 1], 200)
        report = invariance_score(hidden, labels, domains, n_bins=5)
        assert report.score == pytest.approx(0.0, abs=1e-6)
        assert report.evaluated_pairs == 5 * 2

    def test_shifted_domains_score_larger(self):
        gen = np.random.default_rng(1)
        base = gen.standard_normal(400)
        shifted = np.concatenate([base[:200], base[200:] + 10.0])
        labels = np.concatenate([np.arange(200.0), np.arange(200.0)])
        domains = np.repeat([0, 1], 200)
        report = invariance_score(shifted, labels, domains, n_bins=4)
        assert report.score > 1.0

    def test_tiny_groups_skipped(self):
        hidden = np.array([0.0, 1.0, 2.0, 3.0])
        report = invariance_score(hidden, np.arange(4.0), np.array([0, 1, 0, 1]), n_bins=2)
        assert report.skipped_groups == 4
        assert report.score == 0.0

    def test_kl_of_identical_densities(self):
        grid = np.linspace(-4, 4, 512)
        p = np.exp(-grid ** 2 / 2)
        assert kl_on_grid(p, p, grid) == pytest.approx(0.0, abs=1e-12)

    def test_run_invariance_small(self):
        cfg = config_from_dict({
            "kind": "invariance", "seeds": [0], "arms": ["erm", "cmixup"],
            "mix": {"bandwidth_sigma": 0.1},
            "training": SMALL_TRAINING,
            "invariance": {"generator": {"n": 60, "p1": 6, "p2": 3, "sigma_eps": 0.01, "a_mean": 1.0}, "n_bins": 4},
        })
        result = run_invariance(cfg)
        assert {r["arm"] for r in result.records} == {"erm", "cmixup"}
        assert "cmixup_below_erm_fraction" in result.summary

    def test_invariance_divergence_recorded_per_arm(self, monkeypatch):
        real = invariance.train_fcn

        def diverging_cmixup(train, val, policy, *args, **kwargs):
            if policy is not None:
                raise DivergenceError("pérdida no finita", step=2, loss=float("inf"))
            return real(train, val, policy, *args, **kwargs)

        monkeypatch.setattr(invariance, "train_fcn", diverging_cmixup)
        cfg = config_from_dict({
            "kind": "invariance", "seeds": [0], "arms": ["erm", "cmixup"],
            "training": SMALL_TRAINING,
            "invariance": {"generator": {"n": 60, "p1": 6, "p2": 3, "sigma_eps": 0.01, "a_mean": 1.0}, "n_bins": 4},
        })
        result = run_invariance(cfg)
        by_arm = {r["arm"]: r for r in result.records}
        assert by_arm["erm"]["status"] == "ok"
        assert by_arm["cmixup"]["status"] == "diverged"
        assert by_arm["cmixup"]["step"] == 2
        assert result.summary["diverged"] == 1
        assert result.summary["cmixup_below_erm_fraction"] is None
        assert set(result.aggregates) == {"erm"}


class TestSweepAndMeta:
    """Tests del barrido y del experimento de meta-aprendizaje."""

    def test_sigma_sweep_table(self):
        cfg = _tabular_cfg(kind="bandwidth-sweep", seeds=[0], sweep={"parameter": "sigma", "grid": [0.01, 100.0]})
        result = run_sweep(cfg)
        assert [row["value"] for row in result.table] == [0.01, 100.0]
        assert all(row["erm_mean_rmse"] is not None for row in result.table)
        assert result.summary["failed_points"] == 0

    def test_failed_point_recorded(self, monkeypatch):
        from harness import sweeps

        real = sweeps.run_tabular

        def flaky(cfg, jobs=1):
            if cfg.arms == ("cmixup",) and cfg.mix.beta_alpha == 0.5:
                raise DivergenceError("explotó", step=1)
            return real(cfg, jobs)

        monkeypatch.setattr(sweeps, "run_tabular", flaky)
        cfg = _tabular_cfg(kind="alpha-sweep", seeds=[0], sweep={"parameter": "alpha", "grid": [0.5, 2.0]})
        result = sweeps.run_sweep(cfg)
        assert result.summary["failed_points"] == 1
        assert result.table[0]["mean_rmse"] is None
        assert result.table[1]["mean_rmse"] is not None

    def test_sigma_sweep_over_theorem1(self):
        cfg = config_from_dict({
            "kind": "bandwidth-sweep", "seeds": [0, 1],
            "theorem": {"generator": {"N": 300, "p": 6, "s": 2, "K": 3}, "n_test": 200},
            "sweep": {"parameter": "sigma", "grid": [0.05, 5.0], "target": "theorem1"},
        })
        result = run_sweep(cfg)
        assert [row["value"] for row in result.table] == [0.05, 5.0]
        assert result.summary["target"] == "theorem1"
        assert result.summary["failed_points"] == 0
        assert all(0.0 <= row["ordering_fraction"] <= 1.0 for row in result.table)
        assert all(row["mean_mse_label"] is not None for row in result.table)
        assert {r["value"] for r in result.records} == {0.05, 5.0}
        assert all(r["status"] == "ok" for r in result.records)

    def test_sigma_sweep_over_theorem1_changes_label_bandwidth(self, monkeypatch):
        from harness import sweeps

        seen = []

        def fake(cfg, jobs=1):
            seen.append((cfg.kind, cfg.theorem.label_sigma))
            return run_theorem1(cfg, jobs)

        monkeypatch.setitem(sweeps._THEOREM_TARGETS, "theorem1",
                            (fake, *sweeps._THEOREM_TARGETS["theorem1"][1:]))
        cfg = config_from_dict({
            "kind": "bandwidth-sweep", "seeds": [0],
            "theorem": {"generator": {"N": 200, "p": 6, "s": 2, "K": 3}, "n_test": 100},
            "sweep": {"parameter": "sigma", "grid": [0.02, 0.4], "target": "theorem1"},
        })
        sweeps.run_sweep(cfg)
        assert seen == [("theorem1", 0.02), ("theorem1", 0.4)]

    def test_sweep_target_validation(self):
        with pytest.raises(ConfigError):
            config_from_dict({"kind": "bandwidth-sweep", "seeds": [0]})
        with pytest.raises(ConfigError):
            config_from_dict({"kind": "alpha-sweep", "seeds": [0],
                              "sweep": {"parameter": "alpha", "grid": [1.0], "target": "theorem3"}})

    def test_meta_small(self):
        cfg = config_from_dict({
            "kind": "meta", "seeds": [0],
            "meta": {
                "generator": {"M": 4, "N_m": 20, "p": 4, "s": 2, "support_shots": 5, "query_shots": 5,
                              "n_target_tasks": 3},
                "maml": {"max_iterations": 3, "meta_batch_size": 2, "hidden_sizes": [8]},
                "pairings": ["none", "uniform", "label"],
            },
        })
        result = run_meta(cfg)
        assert [r["pairing"] for r in result.records] == ["none", "uniform", "label"]
        assert all(len(r["outer_losses"]) == 3 for r in result.records)
        assert set(result.summary["mean_mse"]) == {"label", "none", "uniform"}

    def test_meta_invalid_section(self):
        cfg = config_from_dict({"kind": "meta", "seeds": [0], "meta": {"maml": {"inner_steps": 0}}})
        with pytest.raises(ConfigError):
            run_meta(cfg)


@pytest.mark.slow
class TestAcceptance:
    """Corridas Monte Carlo en los regímenes por defecto (pytest -m slow)."""

    def test_theorem1_ordering(self):
        result = run_experiment(load_config(CONFIG_DIR / "theorem1.json"), jobs=4)
        assert result.summary["ordering_fraction"] >= 0.9
        assert result.aggregates["same_cluster_label"]["mean"] >= 0.95
        assert result.aggregates["same_cluster_uniform"]["mean"] == pytest.approx(0.2, abs=0.05)

    def test_theorem3_ordering(self):
        result = run_experiment(load_config(CONFIG_DIR / "theorem3.json"), jobs=4)
        assert result.summary["ordering_fraction_param"] >= 0.9
        assert result.summary["pairing_bound_fraction"] == 1.0

    def test_invariance_ordering(self):
        result = run_experiment(load_config(CONFIG_DIR / "invariance.json"), jobs=4)
        assert result.summary["cmixup_below_erm_fraction"] >= 0.8

    def test_sweep_endpoints_match_erm_and_mixup(self):
        cfg = _tabular_cfg(
            kind="bandwidth-sweep", seeds=[0, 1, 2],
            dataset={
                "synthetic": {"generator": "single-index", "N": 600, "p": 6, "s": 2, "K": 3},
                "split": {"train_fraction": 0.6, "val_fraction": 0.2, "test_fraction": 0.2},
            },
            training={**SMALL_TRAINING, "epochs": 30},
            sweep={"parameter": "sigma", "grid": [1e-6, 1e6]},
        )
        result = run_sweep(cfg)
        tiny, huge = result.table
        assert result.summary["failed_points"] == 0
        erm, mixup = result.aggregates["erm"], result.aggregates["mixup"]
        assert abs(tiny["mean_rmse"] - erm["mean"]) <= 2 * _pooled_std(tiny["std_rmse"], erm["std"])
        assert abs(huge["mean_rmse"] - mixup["mean"]) <= 2 * _pooled_std(huge["std_rmse"], mixup["std"])

    def test_noise_robustness(self):
        cfg = _tabular_cfg(
            kind="noise-robustness", seeds=[0, 1, 2], arms=["erm", "mixup", "cmixup"],
            dataset={
                "synthetic": {"generator": "single-index", "N": 600, "p": 6, "s": 2, "K": 3},
                "noise_std_fraction": 0.3,
                "split": {"train_fraction": 0.6, "val_fraction": 0.2, "test_fraction": 0.2},
            },
            training={**SMALL_TRAINING, "epochs": 30},
        )
        result = run_noise(cfg)
        assert all(r["status"] == "ok" for r in result.records)
        assert set(result.aggregates) == {"erm", "mixup", "cmixup"}
        erm = result.aggregates["erm"]["test_rmse"]
        cmixup = result.aggregates["cmixup"]["test_rmse"]
        assert cmixup["mean"] <= erm["mean"] + 2 * _pooled_std(cmixup["std"], erm["std"])

    def test_meta_ordering(self):
        cfg = load_config(CONFIG_DIR / "meta.json").with_seeds(range(10))
        result = run_experiment(cfg, jobs=4)
        by_seed = {}
        for r in result.records:
            by_seed.setdefault(r["seed"], {})[r["pairing"]] = r["mean_mse"]
        wins = np.mean([v["label"] <= v["uniform"] for v in by_seed.values()])
        assert wins >= 0.7
        means = result.summary["mean_mse"]
        assert max(means["label"], means["uniform"]) < means["none"]
