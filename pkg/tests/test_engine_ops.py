"""Layer kernel tests: frozen examples, naive-loop oracles, finite differences."""

import numpy as np
import pytest

from facever.engine import (
    conv2d_backward,
    conv2d_forward,
    fc_backward,
    fc_forward,
    maxpool2d_backward,
    maxpool2d_forward,
    numeric_gradient,
    relative_grad_error,
    relu_backward,
    relu_forward,
    softmax,
    softmax_xent,
)
from facever.engine.reference import conv2d_naive, maxpool2d_naive
from facever.errors import ConfigurationError, DimensionError, LabelError

GRAD_TOL = 1e-4


def _rand(rng, *shape):
    return rng.normal(size=shape).astype(np.float64)


class TestConvForward:
    def test_degenerate_1x1(self):
        x = np.array([[[[2.0]]]])
        w = np.array([[[[3.0]]]])
        b = np.array([0.5])
        y, _ = conv2d_forward(x, w, b, 1, 0)
        assert y.shape == (1, 1, 1, 1)
        assert y[0, 0, 0, 0] == pytest.approx(2.0 * 3.0 + 0.5)

    def test_cnn_m_conv1_shape(self):
        # floor((58 - 5) / 1) + 1 = 54
        x = np.zeros((1, 58, 58, 3))
        w = np.zeros((16, 5, 5, 3))
        y, _ = conv2d_forward(x, w, np.zeros(16), 1, 0)
        assert y.shape == (1, 54, 54, 16)

    def test_matches_naive_reference(self):
        rng = np.random.default_rng(11)
        x = _rand(rng, 1, 8, 8, 2)
        w = _rand(rng, 3, 3, 3, 2)
        b = _rand(rng, 3)
        y, _ = conv2d_forward(x, w, b, 1, 0)
        np.testing.assert_allclose(y, conv2d_naive(x, w, b, 1, 0), atol=1e-6)

    @pytest.mark.parametrize("stride,pad", [(1, 0), (2, 0), (1, 1), (2, 1), (3, 2)])
    def test_matches_naive_strided_padded(self, stride, pad):
        rng = np.random.default_rng(stride * 10 + pad)
        x = _rand(rng, 2, 7, 9, 3)
        w = _rand(rng, 4, 3, 3, 3)
        b = _rand(rng, 4)
        y, _ = conv2d_forward(x, w, b, stride, pad)
        np.testing.assert_allclose(y, conv2d_naive(x, w, b, stride, pad), atol=1e-6)

    def test_linear_in_input_up_to_duplicate_bias(self):
        rng = np.random.default_rng(3)
        x1 = _rand(rng, 1, 6, 6, 2)
        x2 = _rand(rng, 1, 6, 6, 2)
        w = _rand(rng, 3, 3, 3, 2)
        b = _rand(rng, 3)
        a, c = 1.7, -0.4
        mixed, _ = conv2d_forward(a * x1 + c * x2, w, b)
        y1, _ = conv2d_forward(x1, w, b)
        y2, _ = conv2d_forward(x2, w, b)
        bias_map, _ = conv2d_forward(np.zeros_like(x1), w, b)
        np.testing.assert_allclose(
            mixed, a * y1 + c * y2 - (a + c - 1) * bias_map, atol=1e-6
        )

    def test_channel_mismatch_raises(self):
        with pytest.raises(DimensionError):
            conv2d_forward(np.zeros((1, 5, 5, 2)), np.zeros((3, 3, 3, 1)), np.zeros(3))

    def test_nonpositive_stride_raises(self):
        with pytest.raises(ConfigurationError):
            conv2d_forward(np.zeros((1, 5, 5, 1)), np.zeros((1, 3, 3, 1)), np.zeros(1), stride=0)

    def test_kernel_larger_than_input_raises(self):
        with pytest.raises(DimensionError):
            conv2d_forward(np.zeros((1, 2, 2, 1)), np.zeros((1, 3, 3, 1)), np.zeros(1))


class TestConvBackward:
    @pytest.mark.parametrize("stride,pad", [(1, 0), (2, 1)])
    def test_gradients_match_finite_differences(self, stride, pad):
        rng = np.random.default_rng(42 + stride + pad)
        x = _rand(rng, 2, 6, 6, 2)
        w = _rand(rng, 3, 3, 3, 2)
        b = _rand(rng, 3)
        y, cache = conv2d_forward(x, w, b, stride, pad)
        upstream = _rand(rng, *y.shape)
        gx, gw, gb = conv2d_backward(upstream, w, cache)

        def loss():
            out, _ = conv2d_forward(x, w, b, stride, pad)
            return float((out * upstream).sum())

        assert relative_grad_error(gx, numeric_gradient(loss, x)) < GRAD_TOL
        assert relative_grad_error(gw, numeric_gradient(loss, w)) < GRAD_TOL
        assert relative_grad_error(gb, numeric_gradient(loss, b)) < GRAD_TOL


class TestMaxPool:
    def test_single_window(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(1, 2, 2, 1)
        y, _ = maxpool2d_forward(x, 2, 2)
        assert y.reshape(-1).tolist() == [4.0]

    def test_cnn_m_conv3_output_shape(self):
        # floor((5 - 2) / 2) + 1 = 2
        y, _ = maxpool2d_forward(np.zeros((1, 5, 5, 48)), 2, 2)
        assert y.shape == (1, 2, 2, 48)

    def test_backward_routes_to_argmax(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(1, 2, 2, 1)
        _, cache = maxpool2d_forward(x, 2, 2)
        g = np.full((1, 1, 1, 1), 7.0)
        gx = maxpool2d_backward(g, cache)
        expected = np.zeros((1, 2, 2, 1))
        expected[0, 1, 1, 0] = 7.0
        np.testing.assert_array_equal(gx, expected)

    def test_forward_matches_naive(self):
        rng = np.random.default_rng(5)
        x = _rand(rng, 2, 7, 7, 3)
        for window, stride in [(2, 2), (3, 2), (2, 1)]:
            y, _ = maxpool2d_forward(x, window, stride)
            np.testing.assert_array_equal(y, maxpool2d_naive(x, window, stride))

    def test_stride_defaults_to_window(self):
        x = np.arange(16.0).reshape(1, 4, 4, 1)
        y_default, _ = maxpool2d_forward(x, 2)
        y_explicit, _ = maxpool2d_forward(x, 2, 2)
        np.testing.assert_array_equal(y_default, y_explicit)

    def test_gradient_mass_is_conserved(self):
        rng = np.random.default_rng(9)
        x = _rand(rng, 2, 9, 9, 2)
        for window, stride in [(2, 2), (3, 2)]:
            y, cache = maxpool2d_forward(x, window, stride)
            g = _rand(rng, *y.shape)
            gx = maxpool2d_backward(g, cache)
            assert gx.sum() == pytest.approx(g.sum(), rel=1e-12)

    def test_window_too_large_raises(self):
        with pytest.raises(DimensionError):
            maxpool2d_forward(np.zeros((1, 2, 2, 1)), 3)


class TestRelu:
    def test_forward(self):
        np.testing.assert_array_equal(
            relu_forward(np.array([-1.0, 0.0, 2.0])), np.array([0.0, 0.0, 2.0])
        )

    def test_backward_masks_nonpositive(self):
        x = np.array([-1.0, 0.0, 2.0])
        g = np.array([5.0, 5.0, 5.0])
        np.testing.assert_array_equal(relu_backward(x, g), np.array([0.0, 0.0, 5.0]))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(17)
        x = _rand(rng, 4, 5) + 0.05  # keep clear of the kink at 0
        upstream = _rand(rng, 4, 5)
        gx = relu_backward(x, upstream)

        def loss():
            return float((relu_forward(x) * upstream).sum())

        assert relative_grad_error(gx, numeric_gradient(loss, x)) < GRAD_TOL


class TestFullyConnected:
    def test_identity_weights(self):
        x = np.arange(6.0).reshape(2, 3)
        y = fc_forward(x, np.eye(3), np.zeros(3))
        np.testing.assert_array_equal(y, x)

    def test_cnn_m_fc_parameter_count(self):
        # flattened (2, 2, 48) = 192 inputs -> 160 units
        w = np.zeros((160, 192))
        b = np.zeros(160)
        assert w.size + b.size == 192 * 160 + 160 == 30880

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(23)
        x = _rand(rng, 3, 4)
        w = _rand(rng, 5, 4)
        b = _rand(rng, 5)
        upstream = _rand(rng, 3, 5)
        gx, gw, gb = fc_backward(upstream, x, w)

        def loss():
            return float((fc_forward(x, w, b) * upstream).sum())

        assert relative_grad_error(gx, numeric_gradient(loss, x)) < GRAD_TOL
        assert relative_grad_error(gw, numeric_gradient(loss, w)) < GRAD_TOL
        assert relative_grad_error(gb, numeric_gradient(loss, b)) < GRAD_TOL

    def test_din_mismatch_raises(self):
        with pytest.raises(DimensionError):
            fc_forward(np.zeros((2, 3)), np.zeros((5, 4)), np.zeros(5))


class TestSoftmaxXent:
    def test_two_equal_logits(self):
        loss, _ = softmax_xent(np.array([[0.0, 0.0]]), np.array([0]))
        assert loss == pytest.approx(np.log(2.0))

    def test_uniform_4000_classes(self):
        loss, _ = softmax_xent(np.zeros((2, 4000)), np.array([17, 3999]))
        assert loss == pytest.approx(np.log(4000.0))
        assert loss == pytest.approx(8.294, abs=5e-4)

    def test_softmax_rows_are_distributions(self):
        rng = np.random.default_rng(31)
        p = softmax(rng.normal(size=(20, 7)) * 30)
        assert (p >= 0).all()
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-6)

    def test_loss_nonnegative(self):
        rng = np.random.default_rng(37)
        logits = rng.normal(size=(10, 5))
        labels = rng.integers(0, 5, size=10)
        loss, _ = softmax_xent(logits, labels)
        assert loss >= 0.0

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(41)
        logits = _rand(rng, 3, 7)
        labels = rng.integers(0, 7, size=3)
        _, grad = softmax_xent(logits.copy(), labels)

        def loss():
            value, _ = softmax_xent(logits, labels)
            return value

        assert relative_grad_error(grad, numeric_gradient(loss, logits)) < 1e-5

    def test_out_of_range_label_raises(self):
        with pytest.raises(LabelError):
            softmax_xent(np.zeros((1, 3)), np.array([3]))
