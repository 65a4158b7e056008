"""Runtime network: parameters, forward/backward over an architecture spec."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import architectures as arch
from ..container import MAGIC_MODEL, read_container, write_container
from ..errors import DimensionError
from . import ops

WEIGHT_INIT_STD = 0.01


@dataclass
class LayerParams:
    """Weights/biases plus their gradient buffers (same shapes)."""

    weights: np.ndarray
    biases: np.ndarray
    weight_grad: np.ndarray = field(default=None)  # type: ignore[assignment]
    bias_grad: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.weight_grad is None:
            self.weight_grad = np.zeros_like(self.weights)
        if self.bias_grad is None:
            self.bias_grad = np.zeros_like(self.biases)
        if self.weight_grad.shape != self.weights.shape:
            raise DimensionError("weight_grad shape must equal weights shape")
        if self.bias_grad.shape != self.biases.shape:
            raise DimensionError("bias_grad shape must equal biases shape")

    def zero_grads(self):
        self.weight_grad[...] = 0
        self.bias_grad[...] = 0

    @classmethod
    def gaussian(cls, shape, n_out, rng, dtype):
        w = rng.normal(0.0, WEIGHT_INIT_STD, size=shape).astype(dtype)
        b = np.zeros(n_out, dtype=dtype)
        return cls(weights=w, biases=b)


class _ConvLayer:
    def __init__(self, descriptor: arch.Conv, cin: int, rng, dtype):
        self.d = descriptor
        self.params = LayerParams.gaussian(
            (descriptor.filters, descriptor.kernel, descriptor.kernel, cin),
            descriptor.filters,
            rng,
            dtype,
        )
        self._cache = None

    def forward(self, x, keep_cache=True):
        y, cache = ops.conv2d_forward(
            x, self.params.weights, self.params.biases, self.d.stride, self.d.pad
        )
        self._cache = cache if keep_cache else None
        return y

    def backward(self, grad_out):
        gx, gw, gb = ops.conv2d_backward(grad_out, self.params.weights, self._cache)
        self.params.weight_grad += gw
        self.params.bias_grad += gb
        self._cache = None
        return gx


class _PoolLayer:
    def __init__(self, descriptor: arch.MaxPool):
        self.d = descriptor
        self._cache = None

    def forward(self, x, keep_cache=True):
        y, cache = ops.maxpool2d_forward(x, self.d.window, self.d.stride)
        self._cache = cache if keep_cache else None
        return y

    def backward(self, grad_out):
        gx = ops.maxpool2d_backward(grad_out, self._cache)
        self._cache = None
        return gx


class _ReluLayer:
    def __init__(self):
        self._x = None

    def forward(self, x, keep_cache=True):
        self._x = x if keep_cache else None
        return ops.relu_forward(x)

    def backward(self, grad_out):
        gx = ops.relu_backward(self._x, grad_out)
        self._x = None
        return gx


class _FcLayer:
    """Fully connected layer; flattens 4-d inputs row-major over (h, w, c)."""

    def __init__(self, descriptor: arch.Fc, fan_in: int, rng, dtype):
        self.d = descriptor
        self.params = LayerParams.gaussian((descriptor.units, fan_in), descriptor.units, rng, dtype)
        self._x = None
        self._in_shape = None

    def forward(self, x, keep_cache=True):
        self._in_shape = x.shape
        if x.ndim > 2:
            x = x.reshape(x.shape[0], -1)
        self._x = x if keep_cache else None
        return ops.fc_forward(x, self.params.weights, self.params.biases)

    def backward(self, grad_out):
        gx, gw, gb = ops.fc_backward(grad_out, self._x, self.params.weights)
        self.params.weight_grad += gw
        self.params.bias_grad += gb
        self._x = None
        return gx.reshape(self._in_shape)


class Network:
    """A runnable instance of an ArchitectureSpec with its own parameters."""

    def __init__(self, spec: arch.ArchitectureSpec, rng=None, dtype=np.float32):
        self.spec = spec
        self.dtype = np.dtype(dtype)
        rng = rng if rng is not None else np.random.default_rng(0)
        shapes = arch.infer_shapes(spec)
        self.layers = []
        in_shape = spec.input_shape
        for descriptor, out_shape in zip(spec.layers, shapes):
            if isinstance(descriptor, arch.Conv):
                self.layers.append(_ConvLayer(descriptor, in_shape[2], rng, self.dtype))
            elif isinstance(descriptor, arch.MaxPool):
                self.layers.append(_PoolLayer(descriptor))
            elif isinstance(descriptor, arch.Relu):
                self.layers.append(_ReluLayer())
            elif isinstance(descriptor, arch.Fc):
                fan_in = 1
                for extent in in_shape:
                    fan_in *= extent
                self.layers.append(_FcLayer(descriptor, fan_in, rng, self.dtype))
            elif isinstance(descriptor, arch.Softmax):
                self.layers.append(None)  # handled by the loss
            in_shape = out_shape

    @property
    def param_layers(self):
        return [l for l in self.layers if isinstance(l, (_ConvLayer, _FcLayer))]

    @property
    def params(self):
        return [l.params for l in self.param_layers]

    def _check_input(self, x):
        expected = self.spec.input_shape
        if x.ndim != 4 or x.shape[1:] != expected:
            raise DimensionError(
                f"network expects input [N,{expected[0]},{expected[1]},{expected[2]}], "
                f"got {x.shape}"
            )

    def logits(self, x, keep_cache=False):
        """Forward pass to the classifier logits."""
        self._check_input(x)
        out = x.astype(self.dtype, copy=False)
        for layer in self.layers:
            if layer is None:
                continue
            out = layer.forward(out, keep_cache=keep_cache)
        return out

    def loss_and_grads(self, x, labels):
        """Forward + backward; accumulates parameter gradients. Returns loss."""
        logits = self.logits(x, keep_cache=True)
        loss, grad = ops.softmax_xent(logits, labels)
        grad = grad.astype(self.dtype, copy=False)
        for layer in reversed(self.layers):
            if layer is None:
                continue
            grad = layer.backward(grad)
        return loss, logits

    def features(self, x, post_relu: bool = True):
        """Activations of the 160-unit feature layer.

        post_relu selects the rectified output (default); the raw
        pre-activation is exposed for ablations.
        """
        self._check_input(x)
        feature_idx = self.spec.feature_index
        out = x.astype(self.dtype, copy=False)
        for idx, layer in enumerate(self.layers):
            if layer is None:
                continue
            out = layer.forward(out, keep_cache=False)
            if idx == feature_idx and not post_relu:
                return out
            if idx == feature_idx + 1 and post_relu:
                return out
        raise DimensionError("architecture has no feature layer")  # pragma: no cover

    def state_arrays(self):
        """Parameter arrays in declaration order, as an ordered dict."""
        out = {}
        for i, p in enumerate(self.params):
            out[f"layer{i}_weights"] = p.weights
            out[f"layer{i}_biases"] = p.biases
        return out

    def load_state_arrays(self, arrays):
        for i, p in enumerate(self.params):
            w = arrays[f"layer{i}_weights"]
            b = arrays[f"layer{i}_biases"]
            if w.shape != p.weights.shape or b.shape != p.biases.shape:
                raise DimensionError(f"layer {i} parameter shape mismatch on load")
            p.weights = w.astype(self.dtype)
            p.biases = b.astype(self.dtype)
            p.weight_grad = np.zeros_like(p.weights)
            p.bias_grad = np.zeros_like(p.biases)


def save_model(path, network: Network, extra_meta: dict | None = None,
               extra_arrays: dict | None = None) -> None:
    """Write a model container (magic FVB1): architecture + parameters."""
    meta = {
        "architecture": network.spec.to_dict(),
        "element_width": network.dtype.itemsize * 8,
    }
    if extra_meta:
        meta.update(extra_meta)
    arrays = network.state_arrays()
    if extra_arrays:
        arrays.update(extra_arrays)
    write_container(path, MAGIC_MODEL, meta, arrays)


def load_model(path):
    """Read a model container; returns (network, meta, extra_arrays)."""
    meta, arrays = read_container(path, expected_magic=MAGIC_MODEL)
    spec = arch.ArchitectureSpec.from_dict(meta["architecture"])
    dtype = np.float32 if meta.get("element_width", 32) == 32 else np.float64
    network = Network(spec, rng=np.random.default_rng(0), dtype=dtype)
    network.load_state_arrays(arrays)
    known = set(network.state_arrays().keys())
    extra = {k: v for k, v in arrays.items() if k not in known}
    return network, meta, extra
