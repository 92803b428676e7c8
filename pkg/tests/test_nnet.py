"""Tests for mfnnmc.nnet: networks, Adam, training and checkpoints.

Coverage:
- Architecture validation and forward shapes
- Backpropagation against central differences
- Adam update rule
- Training determinism, validation split, divergence
- Bit-exact checkpoint round trip
"""

import math

import numpy as np
import pytest

from mfnnmc.exceptions import ConfigurationError, InputError, TrainingDivergenceError
from mfnnmc.nnet import (
    AdamState,
    Architecture,
    NetworkParams,
    ReduceOnPlateau,
    TrainingConfig,
    adam_step,
    forward,
    forward_batch,
    init_network,
    load_checkpoint,
    loss_and_gradient,
    save_checkpoint,
    train,
)
from mfnnmc.validation import CHECK_ARCHITECTURES, GRADIENT_TOLERANCE, check_gradients, gradient_error


class TestArchitecture:
    """Tests for Architecture validation."""

    def test_layer_widths(self):
        """layer_widths lists input, hidden and output widths in order."""
        arch = Architecture(input_width=2, hidden_widths=(20, 20, 20, 20), output_width=1)

        assert arch.layer_widths == [2, 20, 20, 20, 20, 1]
        assert arch.num_layers == 5
        assert arch.weight_shapes()[0] == (20, 2)
        assert arch.weight_shapes()[-1] == (1, 20)

    def test_no_hidden_layer_rejected(self):
        """An architecture without hidden layers is a ConfigurationError."""
        with pytest.raises(ConfigurationError) as exc_info:
            Architecture(input_width=1, hidden_widths=(), output_width=1)

        assert exc_info.value.errors[0]["field"] == "hidden_widths"

    def test_zero_width_rejected(self):
        """Zero widths are rejected."""
        with pytest.raises(ConfigurationError):
            Architecture(input_width=1, hidden_widths=(4, 0), output_width=1)

    def test_output_activation_must_be_identity(self):
        """The output layer is always affine."""
        with pytest.raises(ConfigurationError):
            Architecture(input_width=1, hidden_widths=(4,), output_width=1, output_activation="relu")

    def test_dict_round_trip(self):
        """to_dict/from_dict preserve the architecture."""
        arch = Architecture(input_width=3, hidden_widths=(30, 30), output_width=1, hidden_activation="tanh")

        assert Architecture.from_dict(arch.to_dict()) == arch


class TestForward:
    """Tests for init_network and forward evaluation."""

    def test_init_is_deterministic(self):
        """The same seed gives identical parameters, a different seed does not."""
        arch = Architecture(input_width=2, hidden_widths=(10, 10), output_width=1)

        a = init_network(arch, 3)
        b = init_network(arch, 3)
        c = init_network(arch, 4)

        assert np.array_equal(a.flat(), b.flat())
        assert not np.array_equal(a.flat(), c.flat())

    def test_biases_start_at_zero(self):
        """init_network sets every bias to zero."""
        params = init_network(Architecture(input_width=1, hidden_widths=(5,), output_width=1), 0)

        assert all(np.all(b == 0.0) for b in params.biases)

    def test_forward_shapes(self):
        """forward returns (n_out,), forward_batch returns (B, n_out)."""
        arch = Architecture(input_width=2, hidden_widths=(6, 6), output_width=1)
        params = init_network(arch, 1)

        assert forward(params, [0.1, 0.2]).shape == (1,)
        assert forward_batch(params, np.zeros((7, 2))).shape == (7, 1)

    def test_forward_matches_batch(self):
        """Single-input and batched evaluation agree."""
        arch = Architecture(input_width=2, hidden_widths=(6, 6), output_width=1)
        params = init_network(arch, 1)
        x = np.array([[0.3, -0.4], [1.0, 2.0]])

        batched = forward_batch(params, x)

        for i in range(2):
            assert np.allclose(forward(params, x[i]), batched[i], rtol=0, atol=1e-15)

    def test_wrong_input_length_raises(self):
        """Input length different from n_0 is an InputError."""
        params = init_network(Architecture(input_width=2, hidden_widths=(4,), output_width=1), 0)

        with pytest.raises(InputError):
            forward(params, [1.0, 2.0, 3.0])

    def test_relu_network_by_hand(self):
        """A one-hidden-layer ReLU network computes W2 relu(W1 x + b1) + b2."""
        arch = Architecture(input_width=1, hidden_widths=(2,), output_width=1)
        params = NetworkParams(
            arch,
            weights=(np.array([[1.0], [-1.0]]), np.array([[2.0, 3.0]])),
            biases=(np.array([0.0, 0.5]), np.array([1.0])),
        )

        # hidden: relu(0.25), relu(0.25) -> output 2*0.25 + 3*0.25 + 1
        assert forward(params, [0.25])[0] == pytest.approx(2.25)

    def test_flat_round_trip(self):
        """from_flat inverts flat."""
        arch = Architecture(input_width=3, hidden_widths=(4, 5), output_width=1)
        params = init_network(arch, 9)

        rebuilt = NetworkParams.from_flat(arch, params.flat())

        assert np.array_equal(rebuilt.flat(), params.flat())
        assert params.num_parameters() == 3 * 4 + 4 + 4 * 5 + 5 + 5 + 1


class TestGradient:
    """Backpropagation against central differences."""

    @pytest.mark.parametrize("name", list(CHECK_ARCHITECTURES))
    def test_gradient_matches_finite_differences(self, name):
        """Per-coordinate relative gradient error stays below 1e-4 on every campaign network."""
        arch = CHECK_ARCHITECTURES[name]

        for seed in range(5):
            assert gradient_error(arch, seed) <= GRADIENT_TOLERANCE

    def test_full_gradient_check_passes(self):
        """The validate check covers all four campaign networks."""
        result = check_gradients(cases=3)

        assert result.passed, result.detail
        assert set(result.detail["max_relative_error"]) == set(CHECK_ARCHITECTURES)

    def test_batch_order_does_not_matter(self):
        """Permuting the batch leaves loss and gradient unchanged to 1e-12."""
        arch = Architecture(input_width=2, hidden_widths=(20, 20, 20, 20), output_width=1)
        params = init_network(arch, 4)
        rng = np.random.default_rng(11)
        x = rng.uniform(-1.0, 1.0, (16, 2))
        t = rng.standard_normal((16, 1))
        perm = rng.permutation(16)

        loss, grads = loss_and_gradient(params, list(zip(x, t)))
        loss_p, grads_p = loss_and_gradient(params, list(zip(x[perm], t[perm])))

        assert loss_p == pytest.approx(loss, abs=1e-12)
        assert np.max(np.abs(grads_p.flat() - grads.flat())) <= 1e-12

    def test_tanh_gradient(self):
        """Smooth activations pass the same check."""
        arch = Architecture(input_width=2, hidden_widths=(6, 6), output_width=1, hidden_activation="tanh")
        params = init_network(arch, 2)
        batch = [([0.1, 0.9], [0.3]), ([0.5, 0.2], [-0.7])]

        _, grads = loss_and_gradient(params, batch)
        theta = params.flat()
        g = grads.flat()
        step = 1e-6
        for k in range(0, theta.size, 7):
            plus, minus = theta.copy(), theta.copy()
            plus[k] += step
            minus[k] -= step
            lp, _ = loss_and_gradient(NetworkParams.from_flat(arch, plus), batch)
            lm, _ = loss_and_gradient(NetworkParams.from_flat(arch, minus), batch)
            assert (lp - lm) / (2 * step) == pytest.approx(g[k], abs=1e-6)

    def test_empty_batch_raises(self):
        """Loss of an empty batch is an InputError."""
        params = init_network(Architecture(input_width=1, hidden_widths=(3,), output_width=1), 0)

        with pytest.raises(InputError):
            loss_and_gradient(params, [])


class TestAdam:
    """Tests for adam_step."""

    def test_first_step_moves_by_learning_rate(self):
        """With bias correction the first step is lr·sign(g) up to epsilon."""
        arch = Architecture(input_width=1, hidden_widths=(2,), output_width=1)
        params = init_network(arch, 0)
        grads = params.map(lambda a: np.full_like(a, 0.5))

        updated, state = adam_step(params, AdamState.fresh(params), grads, lr=0.01)

        assert state.t == 1
        assert np.allclose(params.flat() - updated.flat(), 0.01, atol=1e-9)

    def test_scalar_quadratic_converges(self):
        """1000 steps at lr 0.05 on (p - 3)² from p = 0 end within 1e-2 of 3."""
        arch = Architecture(input_width=1, hidden_widths=(1,), output_width=1)
        base = init_network(arch, 0)
        zero_w = tuple(np.zeros_like(w) for w in base.weights)
        zero_b = np.zeros_like(base.biases[0])
        params = NetworkParams(arch, base.weights, (base.biases[0], np.array([0.0])))
        state = AdamState.fresh(params)

        for _ in range(1000):
            p = params.biases[-1][0]
            grads = NetworkParams(arch, zero_w, (zero_b, np.array([2.0 * (p - 3.0)])))
            params, state = adam_step(params, state, grads, lr=0.05)

        assert abs(params.biases[-1][0] - 3.0) < 1e-2
        assert state.t == 1000

    def test_zero_learning_rate_keeps_parameters(self):
        """lr = 0 leaves parameters unchanged but advances the moments."""
        arch = Architecture(input_width=1, hidden_widths=(2,), output_width=1)
        params = init_network(arch, 0)
        grads = params.map(lambda a: np.ones_like(a))

        updated, state = adam_step(params, AdamState.fresh(params), grads, lr=0.0)

        assert np.array_equal(updated.flat(), params.flat())
        assert state.t == 1
        assert np.all(state.v.flat() >= 0.0)

    def test_mismatched_shapes_raise(self):
        """Gradients of another architecture are rejected."""
        p1 = init_network(Architecture(input_width=1, hidden_widths=(2,), output_width=1), 0)
        p2 = init_network(Architecture(input_width=1, hidden_widths=(3,), output_width=1), 0)

        with pytest.raises(InputError):
            adam_step(p1, AdamState.fresh(p1), p2, lr=0.01)


class TestTrain:
    """Tests for the training loop."""

    def _data(self, n=40):
        x = np.linspace(0.0, 1.0, n).reshape(-1, 1)
        return x, np.sin(3.0 * x)

    def test_loss_decreases(self, tiny_arch_1d):
        """Training reduces the loss on a smooth target."""
        cfg = TrainingConfig(epochs=200, batch_size=8, learning_rate=0.01)

        _, history = train(tiny_arch_1d, self._data(), cfg, seed=0)

        assert len(history.train_loss) == 200
        assert history.train_loss[-1] < history.train_loss[0]

    def test_single_point_is_fit_exactly(self, tiny_arch_1d):
        """A dataset of one repeated point is driven below 1e-8 MSE."""
        x = np.full((16, 1), 0.3)
        t = np.full((16, 1), 0.7)
        cfg = TrainingConfig(
            epochs=500,
            batch_size=4,
            learning_rate=0.01,
            lr_schedule=ReduceOnPlateau(patience=10, factor=0.5, min_lr=1e-6),
        )

        params, history = train(tiny_arch_1d, (x, t), cfg, seed=0)

        assert history.final_train_loss < 1e-8
        assert history.final_train_loss < history.train_loss[0]
        assert forward(params, [0.3])[0] == pytest.approx(0.7, abs=1e-4)

    def test_training_is_deterministic(self, tiny_arch_1d, tiny_training):
        """Same seeds give bit-identical parameters."""
        a, _ = train(tiny_arch_1d, self._data(), tiny_training, seed=1)
        b, _ = train(tiny_arch_1d, self._data(), tiny_training, seed=1)

        assert np.array_equal(a.flat(), b.flat())

    def test_shuffle_seed_changes_result(self, tiny_arch_1d, tiny_training):
        """A different shuffle seed gives different parameters."""
        a, _ = train(tiny_arch_1d, self._data(), tiny_training, seed=1)
        b, _ = train(tiny_arch_1d, self._data(), tiny_training.with_shuffle_seed(5), seed=1)

        assert not np.array_equal(a.flat(), b.flat())

    def test_pair_list_dataset(self, tiny_arch_1d, tiny_training):
        """A list of (input, target) pairs trains like the array form."""
        x, t = self._data()
        pairs = [([xi], [ti]) for xi, ti in zip(x[:, 0], t[:, 0])]

        a, _ = train(tiny_arch_1d, pairs, tiny_training, seed=2)
        b, _ = train(tiny_arch_1d, (x, t), tiny_training, seed=2)

        assert np.array_equal(a.flat(), b.flat())

    def test_validation_loss_recorded(self, tiny_arch_1d):
        """A validation split records one validation loss per epoch."""
        cfg = TrainingConfig(epochs=4, batch_size=4, learning_rate=0.01, validation_fraction=0.25)

        _, history = train(tiny_arch_1d, self._data(), cfg, seed=0)

        assert len(history.val_loss) == 4
        assert all(math.isfinite(v) for v in history.val_loss)

    def test_dataset_smaller_than_batch_rejected(self, tiny_arch_1d):
        """Fewer points than batch_size/(1 - validation_fraction) is a ConfigurationError."""
        cfg = TrainingConfig(epochs=1, batch_size=32, learning_rate=0.01)

        with pytest.raises(ConfigurationError):
            train(tiny_arch_1d, self._data(n=10), cfg, seed=0)

    def test_invalid_hyperparameters_rejected(self):
        """Non-positive epochs or learning rate are ConfigurationErrors."""
        with pytest.raises(ConfigurationError) as exc_info:
            TrainingConfig(epochs=0, batch_size=1, learning_rate=-1.0)

        fields = {e["field"] for e in exc_info.value.errors}
        assert {"epochs", "learning_rate"} <= fields

    def test_divergence_raises(self, tiny_arch_1d):
        """Huge targets and learning rate drive the loss to inf."""
        x, _ = self._data()
        t = np.full_like(x, 1e300)
        cfg = TrainingConfig(epochs=3, batch_size=4, learning_rate=1e3)

        with pytest.raises(TrainingDivergenceError) as exc_info:
            train(tiny_arch_1d, (x, t), cfg, seed=0)

        assert exc_info.value.epoch == 0
        assert not math.isfinite(exc_info.value.loss)

    def test_reduce_on_plateau_lowers_learning_rate(self, tiny_arch_1d):
        """With patience 1 the recorded learning rate eventually drops."""
        cfg = TrainingConfig(
            epochs=60,
            batch_size=40,
            learning_rate=0.5,
            lr_schedule=ReduceOnPlateau(patience=1, factor=0.5, min_lr=1e-4),
        )

        _, history = train(tiny_arch_1d, self._data(), cfg, seed=0)

        assert history.learning_rate[0] == 0.5
        assert min(history.learning_rate) < 0.5
        assert min(history.learning_rate) >= 1e-4


class TestCheckpoint:
    """Tests for save_checkpoint / load_checkpoint."""

    def test_bit_exact_round_trip(self, tmp_path):
        """A loaded network reproduces every parameter and prediction bit-exactly."""
        arch = Architecture(input_width=2, hidden_widths=(20, 20, 20, 20), output_width=1)
        params = init_network(arch, 11)
        params = NetworkParams.from_flat(arch, params.flat() + 1e-3 * np.arange(params.num_parameters()))
        path = save_checkpoint(params, tmp_path / "net.ckpt", extra={"note": "x"})

        loaded = load_checkpoint(path)
        x = np.random.default_rng(0).uniform(size=(50, 2))

        assert loaded.arch == arch
        assert np.array_equal(loaded.flat(), params.flat())
        assert np.array_equal(forward_batch(loaded, x), forward_batch(params, x))

    def test_not_a_checkpoint(self, tmp_path):
        """A JSON file of another format is rejected."""
        path = tmp_path / "other.json"
        path.write_text('{"format": "something"}')

        with pytest.raises(InputError):
            load_checkpoint(path)
