import numpy as np
import pytest

from dcfod.nn import Adam, Linear, Mlp, check_gradients, matmul, sgd_step, xavier_uniform


def triple_loop_matmul(a, b):
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for k in range(a.shape[1]):
                out[i, j] += a[i, k] * b[k, j]
    return out


class TestMatmul:
    def test_identity(self):
        a = np.arange(6.0).reshape(2, 3)
        assert np.array_equal(matmul(np.eye(2), a), a)

    def test_hand_case(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        b = np.array([[1.0], [1.0]])
        assert np.array_equal(matmul(a, b), np.array([[3.0], [7.0]]))

    def test_against_triple_loop(self):
        rng = np.random.default_rng(42)
        a = rng.normal(size=(5, 7))
        b = rng.normal(size=(7, 3))
        assert np.allclose(matmul(a, b), triple_loop_matmul(a, b), atol=1e-12, rtol=0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            matmul(np.zeros((2, 3)), np.zeros((2, 3)))


class TestMlpForward:
    def test_zero_net_gives_zero(self):
        mlp = Mlp((4, 3, 2), np.random.default_rng(0))
        for layer in mlp.layers:
            layer.weight[...] = 0.0
        x = np.random.default_rng(1).normal(size=(5, 4))
        assert np.array_equal(mlp.forward(x), np.zeros((5, 2)))

    def test_single_linear_layer_is_affine(self):
        mlp = Mlp((3, 2), np.random.default_rng(0))
        x = np.random.default_rng(1).normal(size=(4, 3))
        w, b = mlp.layers[0].weight, mlp.layers[0].bias
        assert np.allclose(mlp.forward(x), x @ w.T + b)

    def test_eval_mode_dropout_is_identity(self):
        x = np.random.default_rng(1).normal(size=(6, 4))
        with_drop = Mlp((4, 3, 2), np.random.default_rng(0), input_dropout=0.1)
        without = Mlp((4, 3, 2), np.random.default_rng(0), input_dropout=0.0)
        assert np.array_equal(with_drop.forward(x, training=False), without.forward(x))

    def test_train_mode_dropout_scales_kept_units(self):
        mlp = Mlp((4, 2), np.random.default_rng(0), input_dropout=0.5)
        x = np.ones((200, 4))
        out_in = mlp._dropout_mask  # not set yet
        mlp.forward(x, training=True)
        mask = mlp._dropout_mask
        assert out_in is None
        assert set(np.unique(mask)) <= {0.0, 2.0}  # inverted dropout at rate 0.5
        # keep rate roughly half
        assert 0.3 < np.mean(mask > 0) < 0.7

    def test_shape_check(self):
        mlp = Mlp((4, 2), np.random.default_rng(0))
        with pytest.raises(ValueError, match="first layer width"):
            mlp.forward(np.zeros((3, 5)))


class TestBackward:
    def test_zero_upstream_gives_zero_grads(self):
        mlp = Mlp((3, 4, 2), np.random.default_rng(0))
        x = np.random.default_rng(1).normal(size=(5, 3))
        mlp.forward(x)
        gx, grads = mlp.backward(np.zeros((5, 2)))
        assert np.array_equal(gx, np.zeros_like(x))
        for g in grads:
            assert np.array_equal(g, np.zeros_like(g))

    def test_bias_grad_of_sum_loss_is_ones(self):
        # L = sum(output) for a single linear layer: dL/db = batch size per unit
        mlp = Mlp((3, 2), np.random.default_rng(0))
        x = np.random.default_rng(1).normal(size=(5, 3))
        mlp.forward(x)
        _, grads = mlp.backward(np.ones((5, 2)))
        assert np.array_equal(grads[1], np.full(2, 5.0))

    def test_backward_before_forward_raises(self):
        mlp = Mlp((3, 2), np.random.default_rng(0))
        with pytest.raises(RuntimeError, match="before forward"):
            mlp.backward(np.zeros((1, 2)))

    def test_three_layer_net_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        mlp = Mlp((3, 4, 3, 2), np.random.default_rng(3))
        # move off the ReLU kinks
        for layer in mlp.layers:
            layer.bias += rng.normal(0, 0.3, size=layer.bias.shape)
        x = rng.normal(size=(4, 3))
        target = rng.normal(size=(4, 2))

        def loss():
            diff = mlp.forward(x) - target
            return float(np.sum(diff * diff))

        def grads():
            out = mlp.forward(x)
            _, gs = mlp.backward(2.0 * (out - target))
            return gs

        report = check_gradients(mlp.parameters(), loss, grads, step=1e-5, tolerance=1e-4)
        assert report.passed, report.messages
        assert report.max_rel_error < 1e-4

    def test_dropout_training_gradient_matches_finite_differences(self):
        # freezing the mask (same generator state before every forward) makes
        # the train-mode loss deterministic, so central differences apply
        rng = np.random.default_rng(11)
        mlp = Mlp((4, 3, 2), np.random.default_rng(5), input_dropout=0.3)
        for layer in mlp.layers:
            layer.bias += rng.normal(0, 0.3, size=layer.bias.shape)
        x = rng.normal(size=(6, 4))
        target = rng.normal(size=(6, 2))

        def fixed_mask_forward():
            mlp.rng = np.random.default_rng(99)
            return mlp.forward(x, training=True)

        def loss():
            diff = fixed_mask_forward() - target
            return float(np.sum(diff * diff))

        def grads():
            out = fixed_mask_forward()
            _, gs = mlp.backward(2.0 * (out - target))
            return gs

        report = check_gradients(mlp.parameters(), loss, grads, step=1e-5, tolerance=1e-4)
        assert report.passed, report.messages

    def test_dropout_backward_uses_cached_mask(self):
        mlp = Mlp((4, 2), np.random.default_rng(0), input_dropout=0.5)
        x = np.random.default_rng(1).normal(size=(6, 4))
        mlp.forward(x, training=True)
        mask = mlp._dropout_mask.copy()
        gx, _ = mlp.backward(np.ones((6, 2)))
        expected = (np.ones((6, 2)) @ mlp.layers[0].weight) * mask
        assert np.allclose(gx, expected)


class TestOptimizers:
    def test_sgd_zero_lr_is_noop(self):
        p = np.array([1.0, -2.0])
        sgd_step([p], [np.array([5.0, 5.0])], 0.0)
        assert np.array_equal(p, [1.0, -2.0])

    def test_sgd_arithmetic(self):
        p = np.array([1.0])
        sgd_step([p], [np.array([2.0])], 0.5)
        assert p[0] == 0.0

    def test_sgd_quadratic_contraction(self):
        # gradient of 0.5 * theta^2 is theta: each step multiplies by (1 - lr)
        p = np.array([1.0])
        for _ in range(10):
            sgd_step([p], [p.copy()], 0.1)
        assert np.isclose(p[0], 0.9 ** 10)

    def test_sgd_shape_mismatch(self):
        with pytest.raises(ValueError):
            sgd_step([np.zeros(2)], [np.zeros(3)], 0.1)

    def test_adam_descends_quadratic(self):
        p = np.array([5.0])
        opt = Adam([p])
        for _ in range(300):
            opt.step([p.copy()], lr=0.1)
        assert abs(p[0]) < 1e-2


class TestInitialization:
    def test_xavier_bound(self):
        rng = np.random.default_rng(0)
        for fan_in, fan_out in [(3, 5), (100, 7), (64, 64)]:
            w = xavier_uniform(rng, fan_out, fan_in)
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            assert np.all(np.abs(w) <= bound)
            assert w.shape == (fan_out, fan_in)

    def test_bias_starts_at_zero(self):
        layer = Linear(4, 3, np.random.default_rng(0))
        assert np.array_equal(layer.bias, np.zeros(3))

    def test_same_seed_bit_identical_init_and_masks(self):
        def build():
            mlp = Mlp((5, 4, 2), np.random.default_rng(123), input_dropout=0.2)
            out = mlp.forward(np.ones((7, 5)), training=True)
            return mlp, out

        a_net, a_out = build()
        b_net, b_out = build()
        for pa, pb in zip(a_net.parameters(), b_net.parameters()):
            assert np.array_equal(pa, pb)
        assert np.array_equal(a_net._dropout_mask, b_net._dropout_mask)
        assert np.array_equal(a_out, b_out)


class TestCheckGradients:
    def test_flags_a_wrong_gradient(self):
        p = np.array([1.0, 2.0])

        def loss():
            return float(np.sum(p * p))

        def bad_grads():
            return [3.0 * p]  # true gradient is 2p

        report = check_gradients([p], loss, bad_grads)
        assert not report.passed
        assert report.max_rel_error > 0.1

    def test_reports_per_block(self):
        p1, p2 = np.array([1.0]), np.array([2.0, 3.0])

        def loss():
            return float(p1[0] ** 2 + np.sum(p2 ** 2))

        def grads():
            return [2.0 * p1, 2.0 * p2]

        report = check_gradients([p1, p2], loss, grads)
        assert report.passed
        assert len(report.block_errors) == 2
