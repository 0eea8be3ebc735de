import struct
import zlib

import pytest

from wcindex.services.errors import IndexFileError
from wcindex.services.index_file import (
    FORMAT_VERSION,
    MAGIC,
    from_bytes,
    load_index,
    save_index,
    to_bytes,
)
from wcindex.services.stats import QueryCounters


def test_round_trip(banana_index, tmp_path):
    path = tmp_path / "banana.wcix"
    size = save_index(banana_index, path)
    assert size == path.stat().st_size
    loaded = load_index(path)
    assert loaded.params == banana_index.params
    assert loaded.text.suffix_array().tolist() == banana_index.text.suffix_array().tolist()
    assert loaded.tree.to_arrays() == banana_index.tree.to_arrays()
    for pattern in ("?a", "a?a", "n?", ""):
        c1, c2 = QueryCounters(), QueryCounters()
        assert loaded.match(pattern, "accelerated", c1) == banana_index.match(pattern, "accelerated", c2)
        assert c1 == c2


def test_bad_magic(banana_index):
    data = to_bytes(banana_index)
    with pytest.raises(IndexFileError, match="magic"):
        from_bytes(b"XXXX" + data[4:])


def test_unsupported_version(banana_index):
    data = to_bytes(banana_index)
    with pytest.raises(IndexFileError, match="version"):
        from_bytes(data[:4] + struct.pack("<I", FORMAT_VERSION + 1) + data[8:])


def test_checksum_mismatch(banana_index):
    data = bytearray(to_bytes(banana_index))
    data[20] ^= 0xFF          # first byte of the first payload
    with pytest.raises(IndexFileError, match="checksum"):
        from_bytes(bytes(data))


def test_truncated(banana_index):
    with pytest.raises(IndexFileError, match="truncated"):
        from_bytes(to_bytes(banana_index)[:-3])


def test_missing_sections():
    with pytest.raises(IndexFileError, match="missing"):
        from_bytes(MAGIC + struct.pack("<I", FORMAT_VERSION))


def test_unreadable_path(tmp_path):
    with pytest.raises(IndexFileError):
        load_index(tmp_path / "absent.wcix")


def test_short_marking_section(banana_index):
    data = to_bytes(banana_index)
    start = data.rindex(b"MARK")
    payload = b"\x01\x02"
    forged = data[:start] + b"MARK" + struct.pack("<Q", len(payload)) + payload + struct.pack("<I", zlib.crc32(payload))
    with pytest.raises(IndexFileError, match="marking"):
        from_bytes(forged)
