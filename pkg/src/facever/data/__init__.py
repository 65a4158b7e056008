"""Dataset ingestion and image preprocessing."""

from .preprocess import (
    CROP_SIZE,
    PATCH_POSITIONS,
    PATCH_SCALES,
    PatchSpec,
    all_patch_specs,
    bilinear_resize,
    crop_face,
    extract_patch,
    flip_h,
    mean_image,
    subtract_mean,
    to_grey,
)
from .lfw import (
    DatasetIndex,
    FoldData,
    Pair,
    PairList,
    identity_of,
    image_id,
    load_lfw,
    make_fold_datasets,
    parse_pairs,
    parse_people,
    write_pairs_file,
    LfwSource,
)
from .synthetic import SyntheticConfig, SyntheticSource, build_synthetic

__all__ = [
    "CROP_SIZE",
    "PATCH_POSITIONS",
    "PATCH_SCALES",
    "PatchSpec",
    "all_patch_specs",
    "bilinear_resize",
    "crop_face",
    "extract_patch",
    "flip_h",
    "mean_image",
    "subtract_mean",
    "to_grey",
    "DatasetIndex",
    "FoldData",
    "Pair",
    "PairList",
    "identity_of",
    "image_id",
    "load_lfw",
    "make_fold_datasets",
    "parse_pairs",
    "parse_people",
    "write_pairs_file",
    "LfwSource",
    "SyntheticConfig",
    "SyntheticSource",
    "build_synthetic",
]
