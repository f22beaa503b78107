"""
Tests for the training objectives, AdamW and the seeded training loop.
"""

import numpy as np
import pandas as pd
import pytest
from scipy.optimize import minimize_scalar

from src.autodiff import ops
from src.autodiff.tensor import Parameter, Tape
from src.models.schemas import GrudConfig
from src.training import trainer
from src.training.losses import gaussian_nll, positive_class_weight, weighted_bce
from src.training.optimizer import adamw_step, init_adamw
from src.training.schemas import TrainConfig
from src.training.trainer import evaluate_loss, train_model
from src.utils.errors import TrainingDiverged


class TestWeightedBce:
    """Class-weighted binary cross-entropy."""

    def test_positive_at_zero_logit(self):
        assert weighted_bce(np.array([0.0]), np.array([1.0]), 1.0).item() == pytest.approx(np.log(2.0))

    def test_alpha_from_prevalence(self):
        assert positive_class_weight(0.1456) == pytest.approx(0.8544 / 0.1456)
        assert positive_class_weight(0.1456) == pytest.approx(5.8681, abs=1e-4)

    def test_no_positives(self):
        assert positive_class_weight(0.0, eps=1e-6) == pytest.approx(1e6)

    def test_extreme_logits_stay_finite(self):
        assert weighted_bce(np.array([-100.0]), np.array([0.0]), 5.0).item() == pytest.approx(0.0, abs=1e-40)
        loss = weighted_bce(np.array([1e4, -1e4]), np.array([0.0, 1.0]), 2.0).item()
        assert np.isfinite(loss)

    def test_weight_scales_positive_term(self):
        one = weighted_bce(np.array([0.3]), np.array([1.0]), 1.0).item()
        three = weighted_bce(np.array([0.3]), np.array([1.0]), 3.0).item()
        assert three == pytest.approx(3.0 * one)


class TestGaussianNll:
    """Heteroscedastic Gaussian negative log-likelihood."""

    def test_perfect_unit_scale(self):
        assert gaussian_nll(np.array([0.2]), np.array([1.0]), np.array([0.2])).item() == 0.0

    def test_unit_residual(self):
        assert gaussian_nll(np.array([0.0]), np.array([1.0]), np.array([1.0])).item() == pytest.approx(0.5)

    @pytest.mark.parametrize("residual", [0.3, 1.0, 2.5])
    def test_optimal_scale_is_residual(self, residual):
        search = minimize_scalar(
            lambda s: gaussian_nll(np.array([0.0]), np.array([s]), np.array([residual])).item(),
            bounds=(1e-3, 10.0), method="bounded", options={"xatol": 1e-8},
        )
        assert search.x == pytest.approx(residual, rel=1e-4)


class TestAdamW:
    """Decoupled weight decay and bias-corrected moments."""

    def test_zero_gradient_no_decay(self):
        w = Parameter("w", np.array([0.5, -1.0]))
        state = init_adamw({"w": w})
        adamw_step({"w": w}, state, TrainConfig(weight_decay=0.0), grads={"w": np.zeros(2)})
        np.testing.assert_array_equal(w.data, [0.5, -1.0])

    def test_first_step(self):
        w = Parameter("w", np.array([1.0]))
        state = init_adamw({"w": w})
        adamw_step({"w": w}, state, TrainConfig(lr=1e-3, weight_decay=0.0), grads={"w": np.array([1.0])})
        assert w.data[0] == pytest.approx(1.0 - 1e-3 / (1.0 + 1e-8), rel=1e-12)
        assert state.step == 1

    def test_decay_only(self):
        w = Parameter("w", np.array([2.0]))
        state = init_adamw({"w": w})
        adamw_step({"w": w}, state, TrainConfig(lr=1e-3, weight_decay=0.01), grads={"w": np.array([0.0])})
        assert w.data[0] == pytest.approx(2.0 * (1.0 - 1e-3 * 0.01), rel=1e-12)

    def test_uses_parameter_grad_by_default(self):
        w = Parameter("w", np.array([1.0]))
        with Tape() as tape:
            loss = ops.sum(ops.mul(w, w))
        tape.backward(loss)
        state = init_adamw({"w": w})
        adamw_step({"w": w}, state, TrainConfig(lr=0.1, weight_decay=0.0))
        assert w.data[0] == pytest.approx(0.9, rel=1e-6)


class TestTrainModel:
    """The seeded training loop."""

    def _config(self, **kw):
        base = dict(epochs=2, batch_size=16, seeds=[0], lr=1e-2)
        base.update(kw)
        return TrainConfig(**base)

    def test_bit_identical_runs(self, tiny_dataset, tiny_grud_config):
        a = train_model("classification", "grud", tiny_dataset, self._config(), 4, tiny_grud_config)
        b = train_model("classification", "grud", tiny_dataset, self._config(), 4, tiny_grud_config)
        for name in a.model.params:
            np.testing.assert_array_equal(a.model.params[name].data, b.model.params[name].data)
        assert a.train_losses == b.train_losses

    def test_step_budget(self, tiny_dataset, tiny_grud_config):
        # 36 training windows, batch 16 -> 3 steps per epoch
        result = train_model("forecasting", "grud", tiny_dataset, self._config(epochs=3), 0, tiny_grud_config)
        assert result.steps == 9
        assert len(result.train_losses) == 3
        assert len(result.val_losses) == 3

    def test_each_epoch_visits_train_once(self, tiny_dataset, tiny_grud_config, monkeypatch):
        batches = []
        task_loss = trainer.task_loss

        def recording_loss(model, view, idx, alpha):
            if view.name == "train":
                batches.append(np.array(idx))
            return task_loss(model, view, idx, alpha)

        monkeypatch.setattr(trainer, "task_loss", recording_loss)
        train_model("forecasting", "grud", tiny_dataset, self._config(epochs=2), 0, tiny_grud_config)

        n_train = len(tiny_dataset.split("train"))
        assert len(batches) == 2 * 3
        epochs = [np.concatenate(batches[:3]), np.concatenate(batches[3:])]
        for order in epochs:
            np.testing.assert_array_equal(np.sort(order), np.arange(n_train))
        assert not np.array_equal(epochs[0], epochs[1])

    def test_alpha_from_train_prevalence(self, tiny_dataset, tiny_grud_config):
        result = train_model("classification", "grud", tiny_dataset, self._config(epochs=1), 0, tiny_grud_config)
        prevalence = tiny_dataset.split("train").prevalence
        assert result.alpha == pytest.approx((1.0 - prevalence) / prevalence)

    def test_loss_decreases(self, tiny_dataset, tiny_grud_config):
        config = self._config(epochs=15, lr=2e-2)
        result = train_model("classification", "grud", tiny_dataset, config, 0, tiny_grud_config)
        assert result.train_losses[-1] < result.train_losses[0]

    def test_never_reads_test(self, tiny_dataset, tiny_transformer_config):
        train_model("forecasting", "transformer", tiny_dataset, self._config(epochs=1), 0,
                    tiny_transformer_config)
        assert not tiny_dataset.touched("test")

    def test_training_log(self, tmp_path, tiny_dataset, tiny_grud_config):
        log = tmp_path / "train_log.csv"
        train_model("forecasting", "grud", tiny_dataset, self._config(), 0, tiny_grud_config,
                    run_id="grud-forecasting-s0", log_path=log)
        frame = pd.read_csv(log)
        assert list(frame.columns) == ["run_id", "epoch", "split", "loss"]
        assert frame["epoch"].tolist() == [1, 1, 2, 2]
        assert frame["split"].tolist() == ["train", "val", "train", "val"]

    def test_divergence(self, tiny_dataset):
        config = GrudConfig(hidden_dim=4, train_mean=[float("nan")])
        with pytest.raises(TrainingDiverged) as info:
            train_model("classification", "grud", tiny_dataset, self._config(), 0, config, run_id="bad")
        assert info.value.step == 0
        assert info.value.run_id == "bad"
        assert info.value.exit_code == 3

    def test_evaluate_loss_matches_full_batch(self, tiny_dataset, tiny_grud_config):
        result = train_model("forecasting", "grud", tiny_dataset, self._config(epochs=1), 0, tiny_grud_config)
        val = tiny_dataset.split("val")
        out = result.model.forward(val.x_tilde)
        full = gaussian_nll(out.mu_tilde, out.sigma_n, val.y_tilde).item()
        assert evaluate_loss(result.model, val, None, batch_size=5) == pytest.approx(full, rel=1e-12)
