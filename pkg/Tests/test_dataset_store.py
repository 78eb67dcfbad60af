# Tests/test_dataset_store.py
import struct

import pytest

from Models.errors import ChecksumError, NotADatasetError, TruncatedDatasetError, UnsupportedVersionError
from Services.dataset_store import FORMAT_VERSION, MAGIC, dataset_bytes, load_dataset, parse_dataset
from Services.preprocess import preprocess


def test_save_then_load_is_equal(f1_dataset, f1_dataset_file):
    loaded = load_dataset(f1_dataset_file)
    assert loaded.timetable == f1_dataset.timetable
    assert loaded.transfers == f1_dataset.transfers
    assert loaded.prefix_trees == f1_dataset.prefix_trees
    assert loaded.split_prefix == f1_dataset.split_prefix
    assert loaded.postfix == f1_dataset.postfix
    assert loaded.strategy == "halving"
    assert loaded.meta["counts"]["reduced_transfers"] == 2


def test_synthetic_round_trip(synthetic_dataset):
    loaded = parse_dataset(dataset_bytes(synthetic_dataset))
    assert loaded == synthetic_dataset


def test_files_are_deterministic(f1):
    first, _ = preprocess(f1)
    second, _ = preprocess(f1)
    assert dataset_bytes(first) == dataset_bytes(second)


def test_bad_magic(f1_dataset):
    data = b"NOTTREES" + dataset_bytes(f1_dataset)[len(MAGIC):]
    with pytest.raises(NotADatasetError, match="not a dataset file"):
        parse_dataset(data)
    with pytest.raises(NotADatasetError):
        parse_dataset(b"")


def test_newer_version(f1_dataset):
    data = bytearray(dataset_bytes(f1_dataset))
    struct.pack_into("<I", data, len(MAGIC), FORMAT_VERSION + 1)
    with pytest.raises(UnsupportedVersionError, match=f"unsupported version: {FORMAT_VERSION + 1}"):
        parse_dataset(bytes(data))


def test_truncated(f1_dataset):
    data = dataset_bytes(f1_dataset)
    with pytest.raises(TruncatedDatasetError):
        parse_dataset(data[:-10])
    with pytest.raises(TruncatedDatasetError):
        parse_dataset(data[:12])


def test_corrupted_payload(f1_dataset):
    data = bytearray(dataset_bytes(f1_dataset))
    data[-1] ^= 0xFF
    with pytest.raises(ChecksumError):
        parse_dataset(bytes(data))
