"""CNN engine: layer kernels, naive references, gradient checking, training."""

from .ops import (
    conv2d_backward,
    conv2d_forward,
    conv_output_extent,
    fc_backward,
    fc_forward,
    maxpool2d_backward,
    maxpool2d_forward,
    relu_backward,
    relu_forward,
    softmax,
    softmax_xent,
)
from .gradcheck import numeric_gradient, relative_grad_error
from .network import LayerParams, Network, load_model, save_model
from .trainer import TrainConfig, sgd_step, train

__all__ = [
    "conv2d_forward",
    "conv2d_backward",
    "conv_output_extent",
    "maxpool2d_forward",
    "maxpool2d_backward",
    "relu_forward",
    "relu_backward",
    "fc_forward",
    "fc_backward",
    "softmax",
    "softmax_xent",
    "numeric_gradient",
    "relative_grad_error",
    "LayerParams",
    "Network",
    "save_model",
    "load_model",
    "TrainConfig",
    "sgd_step",
    "train",
]
