import math

import numpy as np
import pytest

from autoll.errors import ConfigurationError, ShapeError
from autoll.nn import (AdamState, MlpNetwork, TrainHyper, adam_step, bce_loss,
                       glorot_init, mlp_backward, mlp_forward,
                       weight_decay_penalty)
from autoll.rng import make_rng


class TestGlorotInit:
    def test_first_layer_bound_is_inverse_sqrt_fan_in(self):
        net = glorot_init([100, 10, 1], make_rng(0))
        assert np.all(np.abs(net.weights[0]) <= 0.1)
        assert np.all(np.abs(net.weights[1]) <= 1.0 / math.sqrt(10))

    def test_biases_are_exactly_zero(self):
        net = glorot_init([7, 3, 1], make_rng(1))
        for b in net.biases:
            assert np.all(b == 0.0)

    def test_same_seed_gives_identical_networks(self):
        a = glorot_init([5, 4, 2], make_rng(42))
        b = glorot_init([5, 4, 2], make_rng(42))
        assert np.array_equal(a.theta, b.theta)

    def test_weights_fill_the_bound_interval(self):
        net = glorot_init([100, 50], make_rng(3))
        assert net.weights[0].max() > 0.09
        assert net.weights[0].min() < -0.09

    @pytest.mark.parametrize("sizes", [[], [5], [5, 0, 1], [5, -2, 1]])
    def test_bad_layer_sizes_rejected(self, sizes):
        with pytest.raises(ConfigurationError):
            glorot_init(sizes, make_rng(0))


class TestForward:
    def test_zero_network_outputs_half(self):
        net = MlpNetwork([4, 3, 2])
        out, _ = mlp_forward(net, np.array([0.3, -1.0, 2.0, 0.0]))
        assert np.all(out == 0.5)

    def test_single_unit_identity_weight(self):
        net = MlpNetwork.from_arrays([1, 1], [[1.0]], [[0.0]])
        out, _ = mlp_forward(net, np.array([0.0]))
        assert out[0] == 0.5

    def test_single_unit_affine(self):
        # sigmoid(2*1 - 1) = sigmoid(1)
        net = MlpNetwork.from_arrays([1, 1], [[2.0]], [[-1.0]])
        out, _ = mlp_forward(net, np.array([1.0]))
        assert out[0] == pytest.approx(0.7310585786300049, abs=1e-15)

    def test_outputs_strictly_inside_unit_interval(self):
        rng = make_rng(7)
        net = glorot_init([6, 5, 3], rng)
        x = rng.normal(size=(40, 6)) * 5
        out, _ = mlp_forward(net, x)
        assert np.all(out > 0.0) and np.all(out < 1.0)

    def test_cache_holds_every_activation(self):
        net = glorot_init([3, 4, 2], make_rng(0))
        x = np.array([0.1, 0.2, 0.3])
        out, cache = mlp_forward(net, x)
        assert len(cache) == 3
        assert np.array_equal(cache[0], x)
        assert np.array_equal(cache[-1], out)

    def test_dimension_mismatch_raises(self):
        net = MlpNetwork([4, 2])
        with pytest.raises(ShapeError):
            mlp_forward(net, np.zeros(5))


class TestBceLoss:
    def test_half_prediction_certain_target(self):
        assert bce_loss(0.5, 1.0) == pytest.approx(math.log(2), abs=1e-15)
        assert bce_loss(0.5, 0.0) == pytest.approx(math.log(2), abs=1e-15)

    def test_confident_correct_prediction(self):
        assert bce_loss(0.9, 1.0) == pytest.approx(-math.log(0.9), abs=1e-15)

    def test_continuous_target(self):
        assert bce_loss(0.5, 0.5) == pytest.approx(math.log(2), abs=1e-15)

    def test_elementwise_on_arrays(self):
        out = bce_loss(np.array([0.5, 0.9]), np.array([1.0, 1.0]))
        assert out == pytest.approx([math.log(2), -math.log(0.9)])

    @pytest.mark.parametrize("x", [0.0, 1.0, -0.1, 1.1])
    def test_prediction_domain_guard(self, x):
        with pytest.raises(ValueError):
            bce_loss(x, 0.5)

    @pytest.mark.parametrize("y", [-0.01, 1.01])
    def test_target_range_guard(self, y):
        with pytest.raises(ValueError):
            bce_loss(0.5, y)

    def test_tiny_prediction_is_clamped_not_infinite(self):
        assert np.isfinite(bce_loss(1e-300, 1.0))


def _loss_for_fd(net, x, coeffs, lam):
    """Scalar probe loss: dot(output, coeffs) + lam * sum(W**2)."""
    out, _ = mlp_forward(net, x)
    return float(np.sum(out * coeffs)) + weight_decay_penalty(net, lam=lam)


class TestBackward:
    def test_zero_output_gradient_gives_zero_parameter_gradient(self):
        net = glorot_init([4, 3, 2], make_rng(0))
        x = make_rng(1).random((5, 4))
        out, cache = mlp_forward(net, x)
        grad, _ = mlp_backward(net, cache, np.zeros_like(out))
        assert np.all(grad == 0.0)

    def test_decay_only_gradient(self):
        lam = 0.25
        net = glorot_init([4, 3], make_rng(0))
        x = make_rng(1).random(4)
        out, cache = mlp_forward(net, x)
        grad, _ = mlp_backward(net, cache, np.zeros_like(out), lam=lam)
        gw, gb = net.views_of(grad)
        assert np.allclose(gw[0], 2 * lam * net.weights[0], rtol=0, atol=0)
        assert np.all(gb[0] == 0.0)

    @pytest.mark.parametrize("sizes,lam", [
        ([3, 2, 1], 0.0),
        ([4, 3, 2], 0.0),
        ([2, 2, 2, 1], 1e-3),
        ([5, 2], 0.1),
    ])
    def test_matches_central_finite_differences(self, sizes, lam):
        # independent oracle: perturb each parameter by +-h and difference
        rng = make_rng(17)
        net = glorot_init(sizes, rng)
        assert net.theta.size <= 50
        x = rng.random((3, sizes[0]))
        coeffs = rng.normal(size=(3, sizes[-1]))
        out, cache = mlp_forward(net, x)
        grad, _ = mlp_backward(net, cache, coeffs, lam=lam)
        h = 1e-5
        for k in range(net.theta.size):
            saved = net.theta[k]
            net.theta[k] = saved + h
            up = _loss_for_fd(net, x, coeffs, lam)
            net.theta[k] = saved - h
            down = _loss_for_fd(net, x, coeffs, lam)
            net.theta[k] = saved
            fd = (up - down) / (2 * h)
            rel = abs(grad[k] - fd) / max(abs(fd), 1e-6)
            assert rel < 1e-4, f"param {k}: analytic {grad[k]} vs fd {fd}"

    def test_input_gradient_matches_finite_differences(self):
        rng = make_rng(23)
        net = glorot_init([4, 3, 2], rng)
        x = rng.random(4)
        coeffs = rng.normal(size=2)
        out, cache = mlp_forward(net, x)
        _, dinput = mlp_backward(net, cache, coeffs)
        h = 1e-5
        for k in range(4):
            bumped = x.copy()
            bumped[k] += h
            up = float(np.sum(mlp_forward(net, bumped)[0] * coeffs))
            bumped[k] -= 2 * h
            down = float(np.sum(mlp_forward(net, bumped)[0] * coeffs))
            fd = (up - down) / (2 * h)
            assert abs(dinput[k] - fd) / max(abs(fd), 1e-6) < 1e-4

    def test_skipping_input_gradient_keeps_parameter_gradient(self):
        rng = make_rng(5)
        net = glorot_init([4, 3, 1], rng)
        x = rng.random((6, 4))
        out, cache = mlp_forward(net, x)
        dout = rng.normal(size=out.shape)
        full, dinput = mlp_backward(net, cache, dout)
        skipped, nothing = mlp_backward(net, cache, dout, need_input_grad=False)
        assert np.array_equal(full, skipped)
        assert nothing is None
        assert dinput is not None

    def test_cache_mismatch_raises(self):
        net = glorot_init([4, 3, 1], make_rng(0))
        out, cache = mlp_forward(net, np.zeros(4))
        with pytest.raises(ShapeError):
            mlp_backward(net, cache[:-1], out)


class TestAdam:
    def test_zero_gradient_leaves_parameters_unchanged(self):
        params = [np.array([1.0, -2.0]), np.array([[3.0]])]
        state = AdamState.zeros(params)
        new, state = adam_step(params, [np.zeros(2), np.zeros((1, 1))],
                               state, TrainHyper())
        assert np.array_equal(new[0], params[0])
        assert np.array_equal(new[1], params[1])

    def test_first_step_moves_by_learning_rate_times_sign(self):
        hyper = TrainHyper()
        params = [np.array([0.7])]
        state = AdamState.zeros(params)
        g = 0.3
        new, state = adam_step(params, [np.array([g])], state, hyper)
        delta = float(new[0][0] - 0.7)
        # bias-corrected first step: -eta * g / (|g| + eps)
        assert delta == pytest.approx(-hyper.eta * g / (abs(g) + hyper.epsilon),
                                      abs=1e-15)
        assert delta == pytest.approx(-0.01, abs=1e-6)

    def test_step_counter_increments_by_one(self):
        params = [np.zeros(3)]
        state = AdamState.zeros(params)
        for expected in (1, 2, 3):
            _, state = adam_step(params, [np.ones(3)], state, TrainHyper())
            assert state.t == expected

    def test_shape_mismatch_raises(self):
        params = [np.zeros(3)]
        state = AdamState.zeros(params)
        with pytest.raises(ShapeError):
            adam_step(params, [np.zeros(4)], state, TrainHyper())

    def test_descends_a_quadratic(self):
        # minimize (p - 2)^2; gradient 2(p - 2)
        p = [np.array([10.0])]
        state = AdamState.zeros(p)
        hyper = TrainHyper(eta=0.1)
        for _ in range(600):
            p, state = adam_step(p, [2 * (p[0] - 2.0)], state, hyper)
        assert p[0][0] == pytest.approx(2.0, abs=1e-2)


class TestTrainHyper:
    def test_defaults(self):
        h = TrainHyper()
        assert (h.eta, h.beta1, h.beta2) == (1e-2, 0.9, 0.999)
        assert h.epsilon == 1e-8
        assert h.lam == 1e-10

    @pytest.mark.parametrize("kw", [
        {"beta1": 1.0}, {"beta2": 0.0}, {"epsilon": 0.0}, {"lam": -1.0}])
    def test_validation(self, kw):
        with pytest.raises(ConfigurationError):
            TrainHyper(**kw).validate()
