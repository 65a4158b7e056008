"""LFW-style dataset ingestion: pairs/people files, folds, image records.

The text formats are the standard whitespace-separated ones: pairs files
start with a "folds pairs-per-half" count line, followed per fold by the
matched lines ("name i j") and the unmatched lines ("name1 i name2 j").
People files start with a fold count, then per fold a size line followed by
"name image-count" lines.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, IngestionError, PairParseError
from .preprocess import crop_face, to_grey

# Assumed eye centers for 250x250 deep-funneled images; individual images
# can be overridden through an eye-coordinate CSV.
DEFAULT_FUNNELED_EYES = ((98.0, 115.0), (152.0, 115.0))


def image_id(name: str, number: int) -> str:
    return f"{name}_{number:04d}"


def identity_of(img_id: str) -> str:
    return img_id.rsplit("_", 1)[0]


@dataclass(frozen=True)
class Pair:
    a: str
    b: str
    matched: bool


@dataclass
class PairList:
    folds: list[list[Pair]]

    @property
    def num_folds(self) -> int:
        return len(self.folds)

    def all_pairs(self) -> list[Pair]:
        return [pair for fold in self.folds for pair in fold]


@dataclass(frozen=True)
class ImageRecord:
    path: str | None
    eyes: tuple[tuple[float, float], tuple[float, float]] | None


@dataclass
class DatasetIndex:
    subjects: dict[str, list[str]]
    images: dict[str, ImageRecord]
    fold_of_identity: dict[str, int]
    n_folds: int = 10

    def identities_in_fold(self, fold: int) -> list[str]:
        return sorted(n for n, f in self.fold_of_identity.items() if f == fold)

    def training_identities(self, test_fold: int) -> list[str]:
        return sorted(n for n, f in self.fold_of_identity.items() if f != test_fold)


@dataclass
class FoldData:
    """Everything one cross-validation round needs, leakage-free."""

    fold: int
    train_identities: list[str]
    labels: dict[str, int]
    train_image_ids: list[str]
    test_pairs: list[Pair]

    @property
    def num_classes(self) -> int:
        return len(self.train_identities)


def _tokens(line: str):
    return line.split()


def parse_pairs(path) -> PairList:
    """Parse a standard pairs file into per-fold matched/unmatched pairs."""
    if not os.path.exists(path):
        raise IngestionError(f"pairs file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise PairParseError(f"{path}:1: empty pairs file")

    head = _tokens(lines[0])
    try:
        if len(head) == 2:
            n_folds, per_half = int(head[0]), int(head[1])
        elif len(head) == 1:
            n_folds, per_half = 1, int(head[0])
        else:
            raise ValueError
    except ValueError:
        raise PairParseError(f"{path}:1: malformed count line {lines[0]!r}") from None

    folds: list[list[Pair]] = []
    lineno = 1
    for fold in range(n_folds):
        pairs: list[Pair] = []
        for half, is_match in ((0, True), (1, False)):
            for _ in range(per_half):
                lineno += 1
                if lineno > len(lines):
                    raise PairParseError(f"{path}:{lineno}: unexpected end of file")
                toks = _tokens(lines[lineno - 1])
                try:
                    if is_match:
                        if len(toks) != 3:
                            raise ValueError
                        name, i, j = toks[0], int(toks[1]), int(toks[2])
                        pairs.append(Pair(image_id(name, i), image_id(name, j), True))
                    else:
                        if len(toks) != 4:
                            raise ValueError
                        n1, i, n2, j = toks[0], int(toks[1]), toks[2], int(toks[3])
                        pairs.append(Pair(image_id(n1, i), image_id(n2, j), False))
                except ValueError:
                    raise PairParseError(
                        f"{path}:{lineno}: malformed pair line {lines[lineno - 1]!r}"
                    ) from None
        folds.append(pairs)
    return PairList(folds=folds)


def write_pairs_file(pairs: PairList, path) -> None:
    """Write a PairList back out in the standard text format."""
    per_half = len(pairs.folds[0]) // 2 if pairs.folds else 0
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{pairs.num_folds}\t{per_half}\n")
        for fold in pairs.folds:
            matched = [p for p in fold if p.matched]
            unmatched = [p for p in fold if not p.matched]
            for p in matched:
                name, i = p.a.rsplit("_", 1)
                _, j = p.b.rsplit("_", 1)
                fh.write(f"{name}\t{int(i)}\t{int(j)}\n")
            for p in unmatched:
                n1, i = p.a.rsplit("_", 1)
                n2, j = p.b.rsplit("_", 1)
                fh.write(f"{n1}\t{int(i)}\t{n2}\t{int(j)}\n")


def parse_people(path) -> list[list[tuple[str, int]]]:
    """Parse a people file into per-fold (name, image-count) lists."""
    if not os.path.exists(path):
        raise IngestionError(f"people file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise PairParseError(f"{path}:1: empty people file")
    try:
        n_folds = int(lines[0].strip())
    except ValueError:
        raise PairParseError(f"{path}:1: malformed fold count {lines[0]!r}") from None

    folds: list[list[tuple[str, int]]] = []
    lineno = 1
    for fold in range(n_folds):
        lineno += 1
        if lineno > len(lines):
            raise PairParseError(f"{path}:{lineno}: unexpected end of file")
        try:
            count = int(lines[lineno - 1].strip())
        except ValueError:
            raise PairParseError(
                f"{path}:{lineno}: malformed fold size {lines[lineno - 1]!r}"
            ) from None
        people = []
        for _ in range(count):
            lineno += 1
            if lineno > len(lines):
                raise PairParseError(f"{path}:{lineno}: unexpected end of file")
            toks = _tokens(lines[lineno - 1])
            try:
                if len(toks) != 2:
                    raise ValueError
                people.append((toks[0], int(toks[1])))
            except ValueError:
                raise PairParseError(
                    f"{path}:{lineno}: malformed people line {lines[lineno - 1]!r}"
                ) from None
        folds.append(people)
    return folds


def _parse_eye_csv(path):
    overrides = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if parts[0] == "image_id":  # header
                continue
            try:
                if len(parts) != 5:
                    raise ValueError
                overrides[parts[0]] = (
                    (float(parts[1]), float(parts[2])),
                    (float(parts[3]), float(parts[4])),
                )
            except ValueError:
                raise PairParseError(f"{path}:{lineno}: malformed eye line {line!r}") from None
    return overrides


def load_lfw(root_dir, pairs_file, people_file, eye_csv=None):
    """Build a DatasetIndex and PairList from an LFW-style directory."""
    if not os.path.isdir(root_dir):
        raise IngestionError(f"image directory not found: {root_dir}")
    people = parse_people(people_file)
    pairs = parse_pairs(pairs_file)
    eyes = _parse_eye_csv(eye_csv) if eye_csv else {}

    subjects: dict[str, list[str]] = {}
    images: dict[str, ImageRecord] = {}
    fold_of: dict[str, int] = {}
    for fold, entries in enumerate(people):
        for name, count in entries:
            ids = [image_id(name, i) for i in range(1, count + 1)]
            subjects[name] = ids
            fold_of[name] = fold
            for img in ids:
                path = os.path.join(root_dir, name, f"{img}.jpg")
                images[img] = ImageRecord(
                    path=path, eyes=eyes.get(img, DEFAULT_FUNNELED_EYES)
                )

    for fold in pairs.folds:
        for pair in fold:
            for img in (pair.a, pair.b):
                if img not in images:
                    raise IngestionError(
                        f"pair references {img} which is absent from the people file"
                    )
    index = DatasetIndex(
        subjects=subjects, images=images, fold_of_identity=fold_of, n_folds=len(people)
    )
    return index, pairs


def make_fold_datasets(index: DatasetIndex, pairs: PairList, fold: int) -> FoldData:
    """Training identities/images of the 9 splits plus the held-out test pairs."""
    if not 0 <= fold < index.n_folds:
        raise ConfigurationError(f"fold must be in [0, {index.n_folds}), got {fold}")
    train_identities = index.training_identities(fold)
    labels = {name: i for i, name in enumerate(train_identities)}
    train_image_ids = [img for name in train_identities for img in index.subjects[name]]
    return FoldData(
        fold=fold,
        train_identities=train_identities,
        labels=labels,
        train_image_ids=train_image_ids,
        test_pairs=list(pairs.folds[fold]),
    )


class LfwSource:
    """Loads, crops, and (optionally) grey-converts LFW images on demand."""

    def __init__(self, index: DatasetIndex, channels: int = 3):
        if channels not in (1, 3):
            raise ConfigurationError(f"channels must be 1 or 3, got {channels}")
        self.index = index
        self.channels = channels

    def image(self, img_id: str) -> np.ndarray:
        from PIL import Image  # deferred: only LFW runs need it

        record = self.index.images.get(img_id)
        if record is None or record.path is None:
            raise IngestionError(f"unknown image id {img_id}")
        if not os.path.exists(record.path):
            raise IngestionError(f"image file missing: {record.path}")
        with Image.open(record.path) as im:
            raw = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
        left, right = record.eyes
        cropped = crop_face(raw, left, right)
        if self.channels == 1:
            cropped = to_grey(cropped)
        return cropped.astype(np.float32)
