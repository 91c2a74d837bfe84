"""Tiny binary container format shared by the index and encoder files.

Layout: 4-byte magic, u32 format version, u32 header length, UTF-8 JSON
header (canonical key order), then raw little-endian array sections in
the order the header's writer emitted them. Everything is written in a
canonical order, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import io
import json
import struct
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


class FormatError(Exception):
    pass


class Writer:
    def __init__(self, magic: bytes, header: dict):
        assert len(magic) == 4
        self._magic = magic
        self._header = header
        self._buf = io.BytesIO()

    def array(self, arr: np.ndarray) -> None:
        self._buf.write(np.ascontiguousarray(arr).tobytes())

    def u32(self, value: int) -> None:
        self._buf.write(struct.pack("<I", value))

    def bytes(self, data: bytes) -> None:
        self._buf.write(data)

    def string(self, text: str) -> None:
        data = text.encode("utf-8")
        self._buf.write(struct.pack("<H", len(data)))
        self._buf.write(data)

    def save(self, path: str | Path) -> None:
        header = json.dumps(self._header, sort_keys=True, separators=(",", ":"))
        header_bytes = header.encode("utf-8")
        with open(path, "wb") as f:
            f.write(self._magic)
            f.write(struct.pack("<II", FORMAT_VERSION, len(header_bytes)))
            f.write(header_bytes)
            f.write(self._buf.getvalue())


class Reader:
    def __init__(self, path: str | Path, magic: bytes):
        data = Path(path).read_bytes()
        if data[:4] != magic:
            raise FormatError(f"{path}: bad magic {data[:4]!r}, expected {magic!r}")
        version, header_len = struct.unpack_from("<II", data, 4)
        if version != FORMAT_VERSION:
            raise FormatError(f"{path}: unsupported format version {version}")
        self.header = json.loads(data[12 : 12 + header_len].decode("utf-8"))
        self._data = data
        self._at = 12 + header_len

    def array(self, dtype, count: int) -> np.ndarray:
        dtype = np.dtype(dtype)
        nbytes = dtype.itemsize * count
        arr = np.frombuffer(self._data, dtype=dtype, count=count, offset=self._at)
        self._at += nbytes
        return arr

    def u32(self) -> int:
        (value,) = struct.unpack_from("<I", self._data, self._at)
        self._at += 4
        return value

    def string(self) -> str:
        (length,) = struct.unpack_from("<H", self._data, self._at)
        self._at += 2
        text = self._data[self._at : self._at + length].decode("utf-8")
        self._at += length
        return text
