# Services/dataset_store.py
"""
Versioned binary dataset file. The layout is documented in
docs/dataset_format.md; all integers are little-endian.
"""
import hashlib
import json
import logging
import struct
import zlib
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from Models.dataset import Dataset
from Models.errors import (
    ChecksumError,
    DatasetError,
    NotADatasetError,
    TruncatedDatasetError,
    UnsupportedVersionError,
)
from Models.timetable import Footpath, Line, Stop, Timetable, Trip
from Models.transfers import TransferSet
from Models.trees import PostfixTree, PrefixTree, SearchTree, TreeNode

logger = logging.getLogger(__name__)

MAGIC = b"TBTREES\0"
FORMAT_VERSION = 1
HEADER = struct.Struct("<8sII")
TABLE_ENTRY = struct.Struct("<4sQQI")
ARRAY_HEADER = struct.Struct("<cQ")
SECTION_ORDER = (b"META", b"STOP", b"FOOT", b"TRIP", b"LINE", b"XFER", b"PFXT", b"SPFX", b"POST")

Column = Tuple[str, Union[np.ndarray, Sequence[int], bytes]]


def _encode_columns(columns: Sequence[Column]) -> bytes:
    parts = [struct.pack("<I", len(columns))]
    for kind, data in columns:
        if kind == "b":
            raw = bytes(data)
            count = len(raw)
        else:
            array = np.asarray(data, dtype="<i8" if kind == "i" else "<u8")
            raw = array.tobytes()
            count = array.size
        parts.append(ARRAY_HEADER.pack(kind.encode(), count))
        parts.append(raw)
    return b"".join(parts)


def _decode_columns(tag: bytes, payload: bytes) -> List[Union[np.ndarray, bytes]]:
    def need(offset: int, size: int) -> None:
        if offset + size > len(payload):
            raise TruncatedDatasetError(f"section {tag.decode()} ends early")

    need(0, 4)
    (count,) = struct.unpack_from("<I", payload, 0)
    offset = 4
    columns: List[Union[np.ndarray, bytes]] = []
    for _ in range(count):
        need(offset, ARRAY_HEADER.size)
        kind, length = ARRAY_HEADER.unpack_from(payload, offset)
        offset += ARRAY_HEADER.size
        if kind == b"b":
            need(offset, length)
            columns.append(payload[offset:offset + length])
            offset += length
        else:
            need(offset, 8 * length)
            dtype = "<i8" if kind == b"i" else "<u8"
            columns.append(np.frombuffer(payload, dtype=dtype, count=length, offset=offset).astype(dtype[1:]))
            offset += 8 * length
    return columns


def _json(value) -> bytes:
    return json.dumps(value, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _offsets(lengths: Sequence[int]) -> np.ndarray:
    offsets = np.zeros(len(lengths) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(lengths)
    return offsets


# Timetable sections

def _encode_timetable(tt: Timetable) -> Dict[bytes, bytes]:
    trips, lines = tt.trips, tt.lines
    return {
        b"STOP": _encode_columns([
            ("i", [s.min_change_time for s in tt.stops]),
            ("b", _json([s.name for s in tt.stops])),
        ]),
        b"FOOT": _encode_columns([
            ("i", [f.from_stop for f in tt.footpaths]),
            ("i", [f.to_stop for f in tt.footpaths]),
            ("i", [f.duration for f in tt.footpaths]),
        ]),
        b"TRIP": _encode_columns([
            ("i", [t.line for t in trips]),
            ("i", _offsets([len(t.stops) for t in trips])),
            ("i", [s for t in trips for s in t.stops]),
            ("i", [a for t in trips for a in t.arrivals]),
            ("i", [d for t in trips for d in t.departures]),
            ("b", _json([t.name for t in trips])),
        ]),
        b"LINE": _encode_columns([
            ("i", _offsets([len(line.stops) for line in lines])),
            ("i", [s for line in lines for s in line.stops]),
            ("i", _offsets([len(line.trips) for line in lines])),
            ("i", [t for line in lines for t in line.trips]),
        ]),
    }


def _split(flat: np.ndarray, offsets: np.ndarray) -> List[Tuple[int, ...]]:
    values = flat.tolist()
    bounds = offsets.tolist()
    return [tuple(values[bounds[i]:bounds[i + 1]]) for i in range(len(bounds) - 1)]


def _decode_timetable(sections: Dict[bytes, List], num_days: int) -> Timetable:
    mct, names = sections[b"STOP"]
    stops = [Stop(i, name, int(m)) for i, (name, m) in enumerate(zip(json.loads(names), mct.tolist()))]

    src, dst, dur = sections[b"FOOT"]
    footpaths = [Footpath(a, b, d) for a, b, d in zip(src.tolist(), dst.tolist(), dur.tolist())]

    line_ids, offsets, flat_stops, flat_arr, flat_dep, trip_names = sections[b"TRIP"]
    trip_stops = _split(flat_stops, offsets)
    trip_arr = _split(flat_arr, offsets)
    trip_dep = _split(flat_dep, offsets)
    trips = [
        Trip(i, line, trip_stops[i], trip_arr[i], trip_dep[i], name)
        for i, (line, name) in enumerate(zip(line_ids.tolist(), json.loads(trip_names)))
    ]

    stop_offsets, line_stops, trip_offsets, line_trips = sections[b"LINE"]
    lines = [
        Line(i, stops_, trips_)
        for i, (stops_, trips_) in enumerate(zip(_split(line_stops, stop_offsets), _split(line_trips, trip_offsets)))
    ]
    return Timetable(stops, footpaths, trips, lines, num_days)


# Trees

def _encode_trees(trees: Sequence[SearchTree]) -> bytes:
    roots, sizes = [], []
    parent, line, index, entry_exit, is_cut, bits, dest_counts, dests = [], [], [], [], [], [], [], []
    for tree in trees:
        roots.append(tree.root_stop)
        local: Dict[int, int] = {}
        nodes = list(tree.nodes())
        sizes.append(len(nodes))
        for i, node in enumerate(nodes):
            local[id(node)] = i
            parent.append(-1 if node.parent is tree.root else local[id(node.parent)])
            line.append(node.line)
            index.append(node.index)
            entry_exit.append(node.entry_exit)
            is_cut.append(int(node.is_cut))
            bits.append(node.direction_bits)
            dest_counts.append(len(node.destinations))
            dests.extend(sorted(node.destinations))
    return _encode_columns([
        ("i", roots), ("i", _offsets(sizes)),
        ("i", parent), ("i", line), ("i", index), ("i", entry_exit), ("i", is_cut),
        ("u", np.array(bits, dtype=np.uint64)),
        ("i", _offsets(dest_counts)), ("i", dests),
    ])


def _decode_trees(columns: List, tree_type: type) -> List[SearchTree]:
    roots, tree_offsets, parent, line, index, entry_exit, is_cut, bits, dest_offsets, dests = (
        c.tolist() for c in columns
    )
    trees = []
    for t, root_stop in enumerate(roots):
        tree = tree_type(root_stop=root_stop)
        placed: List[TreeNode] = []
        for k in range(tree_offsets[t], tree_offsets[t + 1]):
            above = tree.root if parent[k] < 0 else placed[parent[k]]
            node = above.ensure_child(line[k], index[k])
            node.entry_exit = entry_exit[k]
            node.is_cut = bool(is_cut[k])
            node.direction_bits = int(bits[k])
            node.destinations = set(dests[dest_offsets[k]:dest_offsets[k + 1]])
            placed.append(node)
        trees.append(tree)
    return trees


# File

def dataset_bytes(dataset: Dataset) -> bytes:
    ts = dataset.transfers
    meta = dict(dataset.meta)
    meta["num_days"] = dataset.timetable.num_days
    sections = {b"META": _encode_columns([("b", _json(meta))])}
    sections.update(_encode_timetable(dataset.timetable))
    sections[b"XFER"] = _encode_columns([
        ("i", [ts.initial_count]),
        ("i", ts.from_trip), ("i", ts.exit_index), ("i", ts.to_trip), ("i", ts.board_index),
    ])
    sections[b"PFXT"] = _encode_trees(dataset.prefix_trees)
    sections[b"SPFX"] = _encode_trees(dataset.split_prefix)
    sections[b"POST"] = _encode_trees(dataset.postfix)

    offset = HEADER.size + TABLE_ENTRY.size * len(SECTION_ORDER)
    table, body = [], []
    for tag in SECTION_ORDER:
        payload = sections[tag]
        table.append(TABLE_ENTRY.pack(tag, offset, len(payload), zlib.crc32(payload)))
        body.append(payload)
        offset += len(payload)
    return HEADER.pack(MAGIC, FORMAT_VERSION, len(SECTION_ORDER)) + b"".join(table) + b"".join(body)


def save_dataset(path: Union[str, Path], dataset: Dataset) -> int:
    """Write the dataset; returns the file size in bytes."""
    data = dataset_bytes(dataset)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(data)
    logger.info(f"Saved dataset to {path} ({len(data)} bytes)")
    return len(data)


def parse_dataset(data: bytes) -> Dataset:
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise NotADatasetError("bad magic")
    if len(data) < HEADER.size:
        raise TruncatedDatasetError("header ends early")
    _, version, count = HEADER.unpack_from(data, 0)
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(version)
    if len(data) < HEADER.size + TABLE_ENTRY.size * count:
        raise TruncatedDatasetError("section table ends early")

    sections: Dict[bytes, List] = {}
    for k in range(count):
        tag, offset, length, crc = TABLE_ENTRY.unpack_from(data, HEADER.size + TABLE_ENTRY.size * k)
        if offset + length > len(data):
            raise TruncatedDatasetError(f"section {tag.decode(errors='replace')} ends past end of file")
        payload = data[offset:offset + length]
        if zlib.crc32(payload) != crc:
            raise ChecksumError(f"checksum mismatch in section {tag.decode(errors='replace')}")
        sections[tag] = _decode_columns(tag, payload)

    missing = [tag.decode() for tag in SECTION_ORDER if tag not in sections]
    if missing:
        raise DatasetError(f"missing sections: {', '.join(missing)}")

    meta = json.loads(sections[b"META"][0])
    num_days = meta.pop("num_days", 1)
    initial, from_trip, exit_index, to_trip, board_index = sections[b"XFER"]
    return Dataset(
        timetable=_decode_timetable(sections, num_days),
        transfers=TransferSet(from_trip, exit_index, to_trip, board_index, initial_count=int(initial[0])),
        prefix_trees=_decode_trees(sections[b"PFXT"], PrefixTree),
        split_prefix=_decode_trees(sections[b"SPFX"], PrefixTree),
        postfix=_decode_trees(sections[b"POST"], PostfixTree),
        meta=meta,
    )


def load_dataset(path: Union[str, Path]) -> Dataset:
    data = Path(path).read_bytes()
    dataset = parse_dataset(data)
    logger.debug(f"Loaded dataset {path}: {dataset.timetable}")
    return dataset


def file_digest(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
