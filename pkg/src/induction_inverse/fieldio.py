"""Reader and writer for VFLD binary field files.

Layout, all little-endian::

    b"VFLD"                magic
    u16                    format version (1)
    u16                    flags, bit 0: 0 = torus grid, 1 = slab
    u8                     d
    u32 x d                sample counts per axis
    f64 x d                torus: periods L_i; slab: half-widths W_j then S
    slab only: f64 x d     normal n
               f64 x d     background field F
               f64 x d(d-1)  surface basis, one row per surface direction
    u8                     component count (= d)
    u64                    checksum: sum of payload bytes mod 2**64
    payload                f64, component-outermost, row-major

For slabs the last count is the number of nodes along the characteristics
(odd, centred on the trace plane); a count of 1 stores a surface trace.
"""

from __future__ import annotations

import os
import struct
import tempfile
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FieldFileError
from .fields import GridVectorField
from .lattice import TorusLattice

__all__ = [
    "MAGIC",
    "VERSION",
    "FieldFile",
    "encode",
    "decode",
    "write_field",
    "read_field",
    "write_grid_field",
    "read_grid_field",
    "atomic_write_bytes",
    "atomic_write_text",
]

MAGIC = b"VFLD"
VERSION = 1
FLAG_SLAB = 0x1


@dataclass(eq=False)
class FieldFile:
    counts: tuple
    extents: tuple
    data: np.ndarray
    slab: bool = False
    normal: Optional[np.ndarray] = None
    background: Optional[np.ndarray] = None
    basis: Optional[np.ndarray] = None

    @property
    def d(self) -> int:
        return len(self.counts)


def _checksum(payload: bytes) -> int:
    return int(np.frombuffer(payload, dtype=np.uint8).sum(dtype=np.uint64))


def encode(ff: FieldFile) -> bytes:
    d = ff.d
    data = np.ascontiguousarray(ff.data, dtype="<f8")
    if data.shape != (d,) + tuple(ff.counts):
        raise FieldFileError(f"payload shape {data.shape} does not match counts {ff.counts}")
    parts = [
        MAGIC,
        struct.pack("<HHB", VERSION, FLAG_SLAB if ff.slab else 0, d),
        struct.pack(f"<{d}I", *ff.counts),
        struct.pack(f"<{d}d", *ff.extents),
    ]
    if ff.slab:
        basis = np.asarray(ff.basis, dtype=float).reshape(d - 1, d)
        parts.append(struct.pack(f"<{d}d", *np.asarray(ff.normal, dtype=float)))
        parts.append(struct.pack(f"<{d}d", *np.asarray(ff.background, dtype=float)))
        parts.append(struct.pack(f"<{d * (d - 1)}d", *basis.ravel()))
    payload = data.tobytes(order="C")
    parts.append(struct.pack("<BQ", d, _checksum(payload)))
    parts.append(payload)
    return b"".join(parts)


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.buf):
            raise FieldFileError("truncated VFLD header")
        out = struct.unpack_from(fmt, self.buf, self.pos)
        self.pos += size
        return out


def decode(buf: bytes) -> FieldFile:
    if buf[:4] != MAGIC:
        raise FieldFileError("not a VFLD file (bad magic)")
    r = _Reader(buf)
    r.pos = 4
    version, flags, d = r.take("<HHB")
    if version != VERSION:
        raise FieldFileError(f"unsupported VFLD version {version}")
    if d not in (2, 3):
        raise FieldFileError(f"unsupported dimension {d}")
    counts = r.take(f"<{d}I")
    extents = r.take(f"<{d}d")
    slab = bool(flags & FLAG_SLAB)
    normal = background = basis = None
    if slab:
        normal = np.array(r.take(f"<{d}d"))
        background = np.array(r.take(f"<{d}d"))
        basis = np.array(r.take(f"<{d * (d - 1)}d")).reshape(d - 1, d)
    ncomp, checksum = r.take("<BQ")
    if ncomp != d:
        raise FieldFileError(f"component count {ncomp} != dimension {d}")
    payload = buf[r.pos :]
    expected = 8 * d * int(np.prod(counts))
    if len(payload) != expected:
        raise FieldFileError(f"payload has {len(payload)} bytes, expected {expected}")
    if _checksum(payload) != checksum:
        raise FieldFileError("VFLD checksum mismatch")
    data = np.frombuffer(payload, dtype="<f8").reshape((d,) + tuple(counts)).astype(float)
    return FieldFile(tuple(counts), tuple(extents), data, slab, normal, background, basis)


def atomic_write_bytes(path, blob: bytes):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def write_field(path, ff: FieldFile):
    atomic_write_bytes(path, encode(ff))


def read_field(path) -> FieldFile:
    try:
        with open(path, "rb") as fh:
            buf = fh.read()
    except OSError as exc:
        raise FieldFileError(f"cannot read {path}: {exc}") from exc
    return decode(buf)


def write_grid_field(path, f: GridVectorField):
    write_field(path, FieldFile(f.lattice.N, f.lattice.L, f.data))


def read_grid_field(path) -> GridVectorField:
    ff = read_field(path)
    if ff.slab:
        raise FieldFileError(f"{path} holds a slab, expected a torus field")
    return GridVectorField(TorusLattice(ff.extents, ff.counts), ff.data)
