# wcindex/services/index_file.py

from __future__ import annotations

import json
import logging
import struct
import zlib
from pathlib import Path
from typing import Union

import numpy as np

from wcindex.services.errors import IndexFileError
from wcindex.services.suffix_core import Alphabet, TextIndex
from wcindex.services.suffix_tree import SuffixTree
from wcindex.services.wildcard_engine import IndexParams, WildcardIndex, assemble_index

logger = logging.getLogger(__name__)

MAGIC = b"WCIX"
FORMAT_VERSION = 1
SECTIONS = (b"PARM", b"TEXT", b"SARR", b"LCPA", b"TREE", b"MARK")

# Layout: magic, <I version, then per section: 4-byte tag, <Q length, payload, <I crc32.


def _pack_section(tag: bytes, payload: bytes) -> bytes:
    return tag + struct.pack("<Q", len(payload)) + payload + struct.pack("<I", zlib.crc32(payload))


def _int_array(values) -> bytes:
    return np.asarray(values, dtype="<i8").tobytes()


def to_bytes(index: WildcardIndex) -> bytes:
    parent, depth, suffix = index.tree.to_arrays()
    payloads = {
        b"PARM": json.dumps(index.params.as_dict(), sort_keys=True).encode("utf-8"),
        b"TEXT": _int_array(index.text.text),
        b"SARR": _int_array(index.text.suffix_array()),
        b"LCPA": _int_array(index.text.lcp_array),
        b"TREE": _int_array(parent) + _int_array(depth) + _int_array(suffix),
        b"MARK": struct.pack("<Q", len(index.partition.B)) + index.partition.B.packed(),
    }
    out = [MAGIC, struct.pack("<I", FORMAT_VERSION)]
    out.extend(_pack_section(tag, payloads[tag]) for tag in SECTIONS)
    return b"".join(out)


def _read_sections(data: bytes) -> dict[bytes, bytes]:
    if len(data) < 8 or data[:4] != MAGIC:
        raise IndexFileError("not an index file (bad magic)")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != FORMAT_VERSION:
        raise IndexFileError(f"unsupported index file version {version}, expected {FORMAT_VERSION}")
    sections: dict[bytes, bytes] = {}
    offset = 8
    while offset < len(data):
        if offset + 12 > len(data):
            raise IndexFileError("truncated section header")
        tag = data[offset:offset + 4]
        (length,) = struct.unpack_from("<Q", data, offset + 4)
        start = offset + 12
        stop = start + length
        if stop + 4 > len(data):
            raise IndexFileError(f"section {tag!r} is truncated")
        payload = data[start:stop]
        (crc,) = struct.unpack_from("<I", data, stop)
        if zlib.crc32(payload) != crc:
            raise IndexFileError(f"checksum mismatch in section {tag!r}")
        sections[tag] = payload
        offset = stop + 4
    missing = [t.decode() for t in SECTIONS if t not in sections]
    if missing:
        raise IndexFileError(f"missing sections: {missing}")
    return sections


def _ints(payload: bytes) -> np.ndarray:
    if len(payload) % 8:
        raise IndexFileError("integer section length is not a multiple of 8")
    return np.frombuffer(payload, dtype="<i8").astype(np.int64)


def from_bytes(data: bytes) -> WildcardIndex:
    sections = _read_sections(data)
    try:
        params = IndexParams.from_dict(json.loads(sections[b"PARM"].decode("utf-8")))
    except (ValueError, TypeError, KeyError) as e:
        raise IndexFileError(f"bad parameter block: {e}") from e

    text = _ints(sections[b"TEXT"])
    sa = _ints(sections[b"SARR"])
    lcp = _ints(sections[b"LCPA"])
    if not len(text) == len(sa) == len(lcp):
        raise IndexFileError("text, suffix array and LCP sections disagree in length")
    tree_arrays = _ints(sections[b"TREE"])
    if len(tree_arrays) % 3:
        raise IndexFileError("tree section is not three equal arrays")
    parent, depth, suffix = np.split(tree_arrays, 3)

    idx = TextIndex(text, sa, lcp, Alphabet(params.alphabet), sa_sample_rate=params.sa_sample_rate)
    tree = SuffixTree(idx, parent.tolist(), depth.tolist(), suffix.tolist())
    index = assemble_index(idx, params, tree=tree)

    mark = sections[b"MARK"]
    if len(mark) < 8:
        raise IndexFileError("marking section is shorter than its 8-byte header")
    (bits,) = struct.unpack_from("<Q", mark, 0)
    if bits != len(index.partition.B) or mark[8:] != index.partition.B.packed():
        raise IndexFileError("rebuilt marking does not match the stored one")
    logger.info("loaded index n=%d from %d bytes", idx.n, len(data))
    return index


def save_index(index: WildcardIndex, path: Union[str, Path]) -> int:
    data = to_bytes(index)
    Path(path).write_bytes(data)
    logger.info("wrote %d bytes to %s", len(data), path)
    return len(data)


def load_index(path: Union[str, Path]) -> WildcardIndex:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise IndexFileError(f"cannot read {path}: {e}") from e
    return from_bytes(data)
