"""The three benchmark CNN architectures (small / medium / large).

All three take 58x58 inputs, end in a 160-unit feature layer and a softmax
classifier over the training identities.  ReLU follows every convolution
and the feature layer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ArchitectureError, ConfigurationError

ARCH_NAMES = ("cnn-s", "cnn-m", "cnn-l")
INPUT_SIZE = 58
FEATURE_UNITS = 160
DEFAULT_CLASSES = 4000


@dataclass(frozen=True)
class Conv:
    filters: int
    kernel: int
    stride: int = 1
    pad: int = 0


@dataclass(frozen=True)
class MaxPool:
    window: int
    stride: int | None = None  # defaults to window


@dataclass(frozen=True)
class Relu:
    pass


@dataclass(frozen=True)
class Fc:
    units: int


@dataclass(frozen=True)
class Softmax:
    pass


@dataclass(frozen=True)
class ArchitectureSpec:
    name: str
    channels: int
    layers: tuple

    @property
    def input_shape(self):
        return (INPUT_SIZE, INPUT_SIZE, self.channels)

    @property
    def feature_index(self) -> int:
        """Index of the 160-unit FC layer (the feature layer)."""
        fcs = [i for i, l in enumerate(self.layers) if isinstance(l, Fc)]
        return fcs[-2]

    def to_dict(self) -> dict:
        layers = []
        for layer in self.layers:
            d = {"kind": type(layer).__name__.lower()}
            d.update(vars(layer))
            layers.append(d)
        return {"name": self.name, "channels": self.channels, "layers": layers}

    @classmethod
    def from_dict(cls, data: dict) -> "ArchitectureSpec":
        kinds = {"conv": Conv, "maxpool": MaxPool, "relu": Relu, "fc": Fc, "softmax": Softmax}
        layers = []
        for entry in data["layers"]:
            entry = dict(entry)
            kind = entry.pop("kind")
            if kind not in kinds:
                raise ConfigurationError(f"unknown layer kind {kind!r}")
            layers.append(kinds[kind](**entry))
        return cls(name=data["name"], channels=int(data["channels"]), layers=tuple(layers))


def _conv_block(filters, kernel, stride, pad, pool_window=None, pool_stride=None):
    block = [Conv(filters, kernel, stride, pad), Relu()]
    if pool_window is not None:
        block.append(MaxPool(pool_window, pool_stride))
    return block


def build_arch(name: str, channels: int, num_classes: int = DEFAULT_CLASSES) -> ArchitectureSpec:
    """Construct one of the three architectures by name ("cnn-s"/"cnn-m"/"cnn-l").

    num_classes is the softmax width; it is read from the training fold's
    subject count at build time rather than fixed, since each 9-split union
    has a slightly different identity count.
    """
    key = name.lower()
    if key not in ARCH_NAMES:
        raise ConfigurationError(f"unknown architecture {name!r}; expected one of {ARCH_NAMES}")
    if channels not in (1, 3):
        raise ConfigurationError(f"channels must be 1 or 3, got {channels}")
    if num_classes < 2:
        raise ConfigurationError(f"num_classes must be >= 2, got {num_classes}")

    layers: list = []
    if key == "cnn-s":
        layers += _conv_block(12, 5, 1, 0, pool_window=2)
        layers += _conv_block(24, 4, 1, 0, pool_window=2)
        layers += _conv_block(32, 3, 2, 0, pool_window=2)
    elif key == "cnn-m":
        layers += _conv_block(16, 5, 1, 0, pool_window=2)
        layers += _conv_block(32, 4, 1, 0, pool_window=2)
        layers += _conv_block(48, 3, 2, 0, pool_window=2)
    else:  # cnn-l
        layers += _conv_block(16, 3, 1, 1)
        layers += _conv_block(16, 3, 1, 1, pool_window=2)
        layers += _conv_block(32, 3, 1, 1, pool_window=3, pool_stride=2)
        layers += _conv_block(48, 3, 1, 1, pool_window=2)
    layers += [Fc(FEATURE_UNITS), Relu(), Fc(num_classes), Softmax()]
    return ArchitectureSpec(name=key, channels=channels, layers=tuple(layers))


def infer_shapes(spec: ArchitectureSpec):
    """Per-layer output shapes, starting from the 58x58 input.

    Spatial shapes are (h, w, c); FC layers onward are (units,).
    """
    shape = spec.input_shape
    trace = []
    for idx, layer in enumerate(spec.layers):
        if isinstance(layer, Conv):
            h, w, c = shape
            oh = (h + 2 * layer.pad - layer.kernel) // layer.stride + 1
            ow = (w + 2 * layer.pad - layer.kernel) // layer.stride + 1
            if oh <= 0 or ow <= 0:
                raise ArchitectureError(
                    f"{spec.name} layer {idx} ({layer}) yields nonpositive extent {oh}x{ow}"
                )
            shape = (oh, ow, layer.filters)
        elif isinstance(layer, MaxPool):
            h, w, c = shape
            stride = layer.stride or layer.window
            oh = (h - layer.window) // stride + 1
            ow = (w - layer.window) // stride + 1
            if oh <= 0 or ow <= 0:
                raise ArchitectureError(
                    f"{spec.name} layer {idx} ({layer}) yields nonpositive extent {oh}x{ow}"
                )
            shape = (oh, ow, c)
        elif isinstance(layer, Fc):
            size = 1
            for extent in shape:
                size *= extent
            shape = (layer.units,)
        elif isinstance(layer, (Relu, Softmax)):
            pass
        else:
            raise ArchitectureError(f"unknown layer type {layer!r}")
        trace.append(shape)
    return trace


def num_params(spec: ArchitectureSpec) -> int:
    """Total weight + bias count over all parameterized layers."""
    total = 0
    shape = spec.input_shape
    for layer, out_shape in zip(spec.layers, infer_shapes(spec)):
        if isinstance(layer, Conv):
            cin = shape[2]
            total += layer.filters * layer.kernel * layer.kernel * cin + layer.filters
        elif isinstance(layer, Fc):
            fan_in = 1
            for extent in shape:
                fan_in *= extent
            total += layer.units * fan_in + layer.units
        shape = out_shape
    return total
