"""Deterministic synthetic face-like dataset.

Each identity gets a rendered prototype (face oval, eyes, nose, mouth, and
a low-frequency texture field, all with identity-specific parameters).
Images of an identity vary by small translations, feature jitter, a strong
multiplicative gain (illumination), and pixel noise, giving controlled
intra-class variation.  Every image re-renders from a seed derived from
(dataset seed, identity, image), so results never depend on generation
order and rebuilds are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from .lfw import DatasetIndex, ImageRecord, Pair, PairList, image_id
from .preprocess import CROP_SIZE


@dataclass
class SyntheticConfig:
    identities: int = 50
    images_per_identity: int = 40
    channels: int = 1
    folds: int = 10
    pairs_per_fold: int = 600
    seed: int = 0
    gain_low: float = 0.45
    gain_high: float = 1.6
    shift_px: float = 1.5
    jitter_px: float = 0.6
    noise_std: float = 0.02

    def validate(self):
        if self.identities < self.folds:
            raise ConfigurationError("need at least one identity per fold")
        if self.images_per_identity < 2:
            raise ConfigurationError("need >= 2 images per identity for matched pairs")
        if self.channels not in (1, 3):
            raise ConfigurationError(f"channels must be 1 or 3, got {self.channels}")
        if self.pairs_per_fold % 2:
            raise ConfigurationError("pairs_per_fold must be even (half matched)")


def _identity_name(idx: int) -> str:
    return f"synth{idx:03d}"


def _bump(ys, xs, cy, cx, sy, sx, amp):
    return amp * np.exp(-(((ys - cy) ** 2) / (2 * sy**2) + ((xs - cx) ** 2) / (2 * sx**2)))


class SyntheticSource:
    """Renders 58x58 images on demand; caches rendered pixels."""

    def __init__(self, cfg: SyntheticConfig):
        cfg.validate()
        self.cfg = cfg
        self.channels = cfg.channels
        self._cache: dict[str, np.ndarray] = {}
        self._identity_params: dict[int, dict] = {}
        ys, xs = np.mgrid[0:CROP_SIZE, 0:CROP_SIZE]
        self._ys = ys.astype(np.float64)
        self._xs = xs.astype(np.float64)

    def _params_for(self, identity: int) -> dict:
        params = self._identity_params.get(identity)
        if params is not None:
            return params
        rng = np.random.default_rng(np.random.SeedSequence((self.cfg.seed, 1, identity)))
        params = {
            "oval": (29 + rng.uniform(-1, 1), 29 + rng.uniform(-1.5, 1.5),
                     20 + rng.uniform(-2, 2), 14 + rng.uniform(-2, 2),
                     0.45 + rng.uniform(-0.05, 0.05)),
            "eyes": [
                (23 + rng.uniform(-2, 2), 19 + rng.uniform(-2, 2),
                 2.2 + rng.uniform(-0.7, 0.9), 3.0 + rng.uniform(-0.8, 1.0),
                 rng.uniform(-0.45, 0.45)),
                (23 + rng.uniform(-2, 2), 39 + rng.uniform(-2, 2),
                 2.2 + rng.uniform(-0.7, 0.9), 3.0 + rng.uniform(-0.8, 1.0),
                 rng.uniform(-0.45, 0.45)),
            ],
            "nose": (32 + rng.uniform(-2, 2), 29 + rng.uniform(-2, 2),
                     4.0 + rng.uniform(-1, 1.5), 1.8 + rng.uniform(-0.5, 0.7),
                     rng.uniform(-0.35, 0.35)),
            "mouth": (42 + rng.uniform(-2.5, 2.5), 29 + rng.uniform(-2.5, 2.5),
                      1.7 + rng.uniform(-0.4, 0.8), 6.0 + rng.uniform(-2, 2.5),
                      rng.uniform(-0.4, 0.4)),
            # low-frequency identity texture: a handful of 2-d cosines
            "texture": [
                (rng.uniform(0.05, 0.25), rng.uniform(0.05, 0.25),
                 rng.uniform(0, 2 * np.pi), rng.uniform(0.04, 0.12),
                 rng.uniform(0, 2 * np.pi))
                for _ in range(5)
            ],
            "tint": rng.uniform(0.85, 1.15, size=3),
        }
        self._identity_params[identity] = params
        return params

    def _render(self, identity: int, image_num: int) -> np.ndarray:
        cfg = self.cfg
        params = self._params_for(identity)
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 2, identity, image_num)))
        dy = rng.uniform(-cfg.shift_px, cfg.shift_px)
        dx = rng.uniform(-cfg.shift_px, cfg.shift_px)
        ys = self._ys - dy
        xs = self._xs - dx

        cy, cx, ry, rx, base = params["oval"]
        dist = ((ys - cy) / ry) ** 2 + ((xs - cx) / rx) ** 2
        img = base / (1.0 + np.exp(8.0 * (dist - 1.0)))

        for cy_f, cx_f, sy_f, sx_f, amp in params["eyes"] + [params["nose"], params["mouth"]]:
            jy = rng.normal(0.0, cfg.jitter_px)
            jx = rng.normal(0.0, cfg.jitter_px)
            img = img + _bump(ys, xs, cy_f + jy, cx_f + jx, sy_f, sx_f, amp)

        for fy, fx, phase, amp, orient in params["texture"]:
            img = img + amp * np.cos(fy * ys + fx * xs * np.cos(orient) + phase)

        gain = rng.uniform(cfg.gain_low, cfg.gain_high)
        img = gain * img + rng.normal(0.0, cfg.noise_std, size=img.shape)
        img = np.clip(img, 0.0, 3.0)[:, :, None]
        if cfg.channels == 3:
            img = img * params["tint"][None, None, :]
        return img.astype(np.float32)

    def image(self, img_id: str) -> np.ndarray:
        cached = self._cache.get(img_id)
        if cached is None:
            name, num = img_id.rsplit("_", 1)
            identity = int(name.removeprefix("synth"))
            cached = self._render(identity, int(num))
            self._cache[img_id] = cached
        return cached


def _build_pairs(cfg: SyntheticConfig, index: DatasetIndex) -> PairList:
    folds = []
    for fold in range(cfg.folds):
        identities = index.identities_in_fold(fold)
        matched_pool = []
        for name in identities:
            ids = index.subjects[name]
            matched_pool.extend(
                (ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))
            )
        unmatched_pool = []
        for i in range(len(identities)):
            for j in range(i + 1, len(identities)):
                for a in index.subjects[identities[i]]:
                    for b in index.subjects[identities[j]]:
                        unmatched_pool.append((a, b))
        half = cfg.pairs_per_fold // 2
        if half > len(matched_pool) or half > len(unmatched_pool):
            raise ConfigurationError(
                f"fold {fold} cannot supply {half} matched and unmatched pairs"
            )
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 3, fold)))
        matched_idx = rng.choice(len(matched_pool), size=half, replace=False)
        unmatched_idx = rng.choice(len(unmatched_pool), size=half, replace=False)
        pairs = [Pair(*matched_pool[i], True) for i in sorted(matched_idx)]
        pairs += [Pair(*unmatched_pool[i], False) for i in sorted(unmatched_idx)]
        folds.append(pairs)
    return PairList(folds=folds)


def build_synthetic(cfg: SyntheticConfig):
    """Create (DatasetIndex, PairList, SyntheticSource) for a config."""
    cfg.validate()
    subjects = {}
    images = {}
    fold_of = {}
    for idx in range(cfg.identities):
        name = _identity_name(idx)
        ids = [image_id(name, n) for n in range(1, cfg.images_per_identity + 1)]
        subjects[name] = ids
        fold_of[name] = idx % cfg.folds
        for img in ids:
            images[img] = ImageRecord(path=None, eyes=None)
    index = DatasetIndex(
        subjects=subjects, images=images, fold_of_identity=fold_of, n_folds=cfg.folds
    )
    pairs = _build_pairs(cfg, index)
    return index, pairs, SyntheticSource(cfg)
