"""Versioned binary snapshots of model state.

File layout (all integers little-endian)::

    magic  b"SBSN" | u16 version | u64 payload length | 32-byte sha256 | payload

The payload is a recursive tagged encoding of the state tree: one tag byte
per value, then the value body.  Supported values: None, bool, int (i64),
float (f64), str, bytes, list, dict with str keys, and float64/int64 numpy
arrays (flattened; shapes are stored alongside where the owner needs them).
Restoring verifies the checksum first and refuses unknown versions, so a
truncated or flipped byte surfaces as `SnapshotCorruptError`, never as a
silently wrong model.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

MAGIC = b"SBSN"
VERSION = 1

_T_NONE = 0
_T_BOOL = 1
_T_INT = 2
_T_FLOAT = 3
_T_STR = 4
_T_BYTES = 5
_T_LIST = 6
_T_DICT = 7
_T_F64ARRAY = 8
_T_I64ARRAY = 9

_I64_MIN = -(1 << 63)
_I64_MAX = (1 << 63) - 1


class SnapshotError(ValueError):
    """Base error for unreadable snapshot files."""


class SnapshotVersionError(SnapshotError):
    pass


class SnapshotCorruptError(SnapshotError):
    pass


def encode(value) -> bytes:
    out = bytearray()
    _encode_into(out, value)
    return bytes(out)


def _encode_into(out: bytearray, value) -> None:
    if value is None:
        out.append(_T_NONE)
    elif isinstance(value, bool):
        out.append(_T_BOOL)
        out.append(1 if value else 0)
    elif isinstance(value, (int, np.integer)):
        v = int(value)
        if not (_I64_MIN <= v <= _I64_MAX):
            raise SnapshotError(f"integer out of i64 range: {v}")
        out.append(_T_INT)
        out += struct.pack("<q", v)
    elif isinstance(value, (float, np.floating)):
        out.append(_T_FLOAT)
        out += struct.pack("<d", float(value))
    elif isinstance(value, str):
        raw = value.encode("utf-8")
        out.append(_T_STR)
        out += struct.pack("<I", len(raw))
        out += raw
    elif isinstance(value, bytes):
        out.append(_T_BYTES)
        out += struct.pack("<I", len(value))
        out += value
    elif isinstance(value, np.ndarray):
        flat = np.ascontiguousarray(value).ravel()
        if flat.dtype.kind == "f":
            out.append(_T_F64ARRAY)
            data = flat.astype("<f8", copy=False).tobytes()
        elif flat.dtype.kind in "iu":
            out.append(_T_I64ARRAY)
            data = flat.astype("<i8", copy=False).tobytes()
        else:
            raise SnapshotError(f"unsupported array dtype {value.dtype}")
        out += struct.pack("<I", flat.size)
        out += data
    elif isinstance(value, (list, tuple)):
        out.append(_T_LIST)
        out += struct.pack("<I", len(value))
        for item in value:
            _encode_into(out, item)
    elif isinstance(value, dict):
        out.append(_T_DICT)
        out += struct.pack("<I", len(value))
        for key, item in value.items():
            if not isinstance(key, str):
                raise SnapshotError(f"dict keys must be str, got {type(key)}")
            raw = key.encode("utf-8")
            out += struct.pack("<I", len(raw))
            out += raw
            _encode_into(out, item)
    else:
        raise SnapshotError(f"cannot encode value of type {type(value)}")


def decode(buf: bytes):
    value, offset = _decode_from(buf, 0)
    if offset != len(buf):
        raise SnapshotCorruptError("trailing bytes after payload")
    return value


def _decode_from(buf: bytes, offset: int):
    try:
        tag = buf[offset]
    except IndexError:
        raise SnapshotCorruptError("payload truncated") from None
    offset += 1
    if tag == _T_NONE:
        return None, offset
    if tag == _T_BOOL:
        return bool(buf[offset]), offset + 1
    if tag == _T_INT:
        (v,) = struct.unpack_from("<q", buf, offset)
        return v, offset + 8
    if tag == _T_FLOAT:
        (v,) = struct.unpack_from("<d", buf, offset)
        return v, offset + 8
    if tag in (_T_STR, _T_BYTES):
        (length,) = struct.unpack_from("<I", buf, offset)
        offset += 4
        raw = buf[offset : offset + length]
        if len(raw) != length:
            raise SnapshotCorruptError("payload truncated")
        offset += length
        return (raw.decode("utf-8") if tag == _T_STR else raw), offset
    if tag == _T_F64ARRAY:
        (count,) = struct.unpack_from("<I", buf, offset)
        offset += 4
        end = offset + 8 * count
        if end > len(buf):
            raise SnapshotCorruptError("payload truncated")
        return np.frombuffer(buf, dtype="<f8", count=count, offset=offset).copy(), end
    if tag == _T_I64ARRAY:
        (count,) = struct.unpack_from("<I", buf, offset)
        offset += 4
        end = offset + 8 * count
        if end > len(buf):
            raise SnapshotCorruptError("payload truncated")
        return np.frombuffer(buf, dtype="<i8", count=count, offset=offset).copy(), end
    if tag == _T_LIST:
        (count,) = struct.unpack_from("<I", buf, offset)
        offset += 4
        items = []
        for _ in range(count):
            item, offset = _decode_from(buf, offset)
            items.append(item)
        return items, offset
    if tag == _T_DICT:
        (count,) = struct.unpack_from("<I", buf, offset)
        offset += 4
        out = {}
        for _ in range(count):
            (klen,) = struct.unpack_from("<I", buf, offset)
            offset += 4
            key = buf[offset : offset + klen].decode("utf-8")
            offset += klen
            out[key], offset = _decode_from(buf, offset)
        return out, offset
    raise SnapshotCorruptError(f"unknown tag byte {tag}")


def dump_bytes(payload: dict) -> bytes:
    body = encode(payload)
    digest = hashlib.sha256(body).digest()
    header = MAGIC + struct.pack("<HQ", VERSION, len(body))
    return header + digest + body


def load_bytes(raw: bytes) -> dict:
    if len(raw) < len(MAGIC) + 2 + 8 + 32:
        raise SnapshotCorruptError("file too short to be a snapshot")
    if raw[:4] != MAGIC:
        raise SnapshotCorruptError("bad magic; not a snapshot file")
    version, length = struct.unpack_from("<HQ", raw, 4)
    if version != VERSION:
        raise SnapshotVersionError(
            f"snapshot version {version} not supported (expected {VERSION})"
        )
    digest = raw[14:46]
    body = raw[46:]
    if len(body) != length:
        raise SnapshotCorruptError(
            f"payload length mismatch: header says {length}, file has {len(body)}"
        )
    if hashlib.sha256(body).digest() != digest:
        raise SnapshotCorruptError("checksum mismatch; snapshot is corrupt")
    return decode(body)


def save_snapshot(path, payload: dict) -> None:
    Path(path).write_bytes(dump_bytes(payload))


def load_snapshot(path) -> dict:
    return load_bytes(Path(path).read_bytes())
