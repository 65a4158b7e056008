"""Face crops, grey conversion, flips, mean subtraction and local patches.

All operations are pure functions over float arrays shaped (H, W, C).
Crops are 58x58 with the eye centers mapped to fixed reference points
(row 23, columns 19 and 39); the reference geometry is a documented choice,
not dictated by the source data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DimensionError, GeometryError, IngestionError

CROP_SIZE = 58
# (x, y) positions the eye centers land on inside the 58x58 crop
REF_LEFT_EYE = (19.0, 23.0)
REF_RIGHT_EYE = (39.0, 23.0)

GREY_WEIGHTS = (0.299, 0.587, 0.114)  # ITU-R 601 luma

PATCH_POSITIONS = ("top-left", "top-right", "bottom-left", "bottom-right", "center")
PATCH_SCALES = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8)


def _as_image(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim == 2:
        img = img[:, :, None]
    if img.ndim != 3:
        raise DimensionError(f"expected (H, W, C) image, got shape {img.shape}")
    return img


def bilinear_sample(img, xs, ys):
    """Sample img at fractional (x, y) positions, clamping to the edges."""
    img = _as_image(img)
    h, w = img.shape[:2]
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (xs - x0)[..., None]
    fy = (ys - y0)[..., None]
    top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
    bottom = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy


def crop_face(raw, left_eye, right_eye):
    """58x58 crop with the eyes at the reference points.

    left_eye / right_eye are (x, y) pixel coordinates in the raw image.
    The crop applies the similarity transform taking the reference eye
    segment onto the source eye segment; samples outside the raw image
    clamp to the nearest edge pixel.
    """
    raw = _as_image(raw)
    lx, ly = float(left_eye[0]), float(left_eye[1])
    rx, ry = float(right_eye[0]), float(right_eye[1])
    vx, vy = rx - lx, ry - ly
    if math.hypot(vx, vy) < 1e-9:
        raise GeometryError("eye centers coincide; cannot determine crop geometry")
    if vx <= 0:
        raise GeometryError("eyes must be horizontally ordered (left eye left of right)")

    ref_dx = REF_RIGHT_EYE[0] - REF_LEFT_EYE[0]
    a = vx / ref_dx
    b = vy / ref_dx
    xs_o, ys_o = np.meshgrid(
        np.arange(CROP_SIZE, dtype=np.float64) - REF_LEFT_EYE[0],
        np.arange(CROP_SIZE, dtype=np.float64) - REF_LEFT_EYE[1],
    )
    xs = a * xs_o - b * ys_o + lx
    ys = b * xs_o + a * ys_o + ly
    return bilinear_sample(raw, xs, ys)


def to_grey(img):
    """Collapse an RGB image to one luminance channel."""
    img = _as_image(img)
    if img.shape[2] != 3:
        raise DimensionError(f"grey conversion expects 3 channels, got {img.shape[2]}")
    r, g, b = GREY_WEIGHTS
    grey = r * img[:, :, 0] + g * img[:, :, 1] + b * img[:, :, 2]
    return grey[:, :, None]


def flip_h(img):
    """Column-reversed copy (horizontal mirror)."""
    return _as_image(img)[:, ::-1, :].copy()


def mean_image(images):
    """Per-pixel, per-channel mean over an iterable of equally-shaped images."""
    total = None
    count = 0
    for img in images:
        img = _as_image(img)
        if total is None:
            total = np.zeros(img.shape, dtype=np.float64)
        elif img.shape != total.shape:
            raise DimensionError(
                f"inconsistent image shapes in mean: {img.shape} vs {total.shape}"
            )
        total += img
        count += 1
    if count == 0:
        raise IngestionError("cannot compute the mean of an empty training set")
    return total / count


def subtract_mean(img, mean):
    img = _as_image(img)
    if img.shape != mean.shape:
        raise DimensionError(f"mean shape {mean.shape} does not match image {img.shape}")
    return img - mean


def bilinear_resize(img, out_h: int, out_w: int):
    """Bilinear resize with corner alignment (corners map to corners)."""
    img = _as_image(img)
    h, w = img.shape[:2]
    ys_scale = (h - 1) / (out_h - 1) if out_h > 1 else 0.0
    xs_scale = (w - 1) / (out_w - 1) if out_w > 1 else 0.0
    xs, ys = np.meshgrid(
        np.arange(out_w, dtype=np.float64) * xs_scale,
        np.arange(out_h, dtype=np.float64) * ys_scale,
    )
    return bilinear_sample(img, xs, ys)


@dataclass(frozen=True)
class PatchSpec:
    """One of the 30 (position, scale) local crops."""

    position: str
    scale_index: int

    def __post_init__(self):
        if self.position not in PATCH_POSITIONS:
            raise ConfigurationError(f"unknown patch position {self.position!r}")
        if not 0 <= self.scale_index < len(PATCH_SCALES):
            raise ConfigurationError(f"scale_index must be in [0, 6), got {self.scale_index}")

    @property
    def scale(self) -> float:
        return PATCH_SCALES[self.scale_index]

    @property
    def side(self) -> int:
        return math.floor(CROP_SIZE * self.scale)

    @property
    def index(self) -> int:
        return PATCH_POSITIONS.index(self.position) * len(PATCH_SCALES) + self.scale_index

    @property
    def tag(self) -> str:
        return f"p{self.index:02d}"


def all_patch_specs() -> list[PatchSpec]:
    """The fixed ordering of all 30 patches: position-major, scale-minor."""
    return [
        PatchSpec(position, scale_index)
        for position in PATCH_POSITIONS
        for scale_index in range(len(PATCH_SCALES))
    ]


def patch_by_index(index: int) -> PatchSpec:
    specs = all_patch_specs()
    if not 0 <= index < len(specs):
        raise ConfigurationError(f"patch index must be in [0, 30), got {index}")
    return specs[index]


def extract_patch(img, spec: PatchSpec):
    """Crop the spec's corner/center region and upsample back to 58x58."""
    img = _as_image(img)
    if img.shape[0] != CROP_SIZE or img.shape[1] != CROP_SIZE:
        raise DimensionError(f"patch extraction expects 58x58 input, got {img.shape}")
    d = spec.side
    row0, col0 = {
        "top-left": (0, 0),
        "top-right": (0, CROP_SIZE - d),
        "bottom-left": (CROP_SIZE - d, 0),
        "bottom-right": (CROP_SIZE - d, CROP_SIZE - d),
        "center": ((CROP_SIZE - d) // 2, (CROP_SIZE - d) // 2),
    }[spec.position]
    crop = img[row0 : row0 + d, col0 : col0 + d, :]
    return bilinear_resize(crop, CROP_SIZE, CROP_SIZE)
