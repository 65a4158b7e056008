"""Binary container format: round trips, magics, atomicity."""

import os

import numpy as np
import pytest

from facever.container import (
    MAGIC_FEATURES,
    MAGIC_JB,
    MAGIC_MODEL,
    MAGIC_TENSORS,
    read_container,
    write_container,
)
from facever.errors import ContainerError


def test_round_trip(tmp_path):
    path = tmp_path / "x.fvt"
    arrays = {
        "a": np.arange(12, dtype=np.float32).reshape(3, 4),
        "b": np.linspace(0, 1, 5),
        "ids": np.array([3, 1, 4], dtype=np.int64),
    }
    meta = {"kind": "test", "nested": {"k": [1, 2]}}
    write_container(path, MAGIC_TENSORS, meta, arrays)
    got_meta, got = read_container(path, expected_magic=MAGIC_TENSORS)
    assert got_meta == meta
    for name in arrays:
        np.testing.assert_array_equal(got[name], arrays[name])
        assert got[name].dtype == arrays[name].dtype


def test_wrong_magic_rejected(tmp_path):
    path = tmp_path / "m.fvb"
    write_container(path, MAGIC_MODEL, {}, {"w": np.zeros(2)})
    with pytest.raises(ContainerError, match="magic"):
        read_container(path, expected_magic=MAGIC_JB)


def test_truncated_file_rejected(tmp_path):
    path = tmp_path / "f.fvf"
    write_container(path, MAGIC_FEATURES, {}, {"w": np.zeros(100)})
    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 2])
    with pytest.raises(ContainerError, match="truncated"):
        read_container(path)


def test_write_is_byte_deterministic(tmp_path):
    a = tmp_path / "a.fvb"
    b = tmp_path / "b.fvb"
    arrays = {"w": np.arange(6, dtype=np.float64)}
    meta = {"z": 1, "a": 2}
    write_container(a, MAGIC_MODEL, meta, arrays)
    write_container(b, MAGIC_MODEL, meta, arrays)
    assert a.read_bytes() == b.read_bytes()


def test_no_temp_files_left_behind(tmp_path):
    path = tmp_path / "x.fvt"
    write_container(path, MAGIC_TENSORS, {}, {"a": np.zeros(3)})
    leftovers = [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]
    assert leftovers == []
