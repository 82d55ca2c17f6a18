"""Report and field persistence.

JSON reports are written with sorted keys and a trailing newline so that
equal objects give equal bytes.  Sweep tables are CSV.  Space-time fields
use a small little-endian binary layout:

======  ==========  ============================================
offset  type        content
======  ==========  ============================================
0       8 bytes     magic ``b"SKDVFLD1"``
8       uint64      number of time nodes ``nt``
16      uint64      number of space points ``nx``
24      uint64      flags (bit 0: field is real valued)
32      float64     spatial period
40      float64     ``t_min``
48      float64     ``t_max``
56      float64     ``nt * nx`` complex values, row-major in (time, space),
                    each as (real, imaginary)
======  ==========  ============================================
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .exceptions import GridError
from .grid import SpaceTimeField, SpatialGrid, TimeGrid

MAGIC = b"SKDVFLD1"
_HEADER = struct.Struct("<8sQQQddd")


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_default, allow_nan=True) + "\n"


def write_json(path, obj):
    path = Path(path)
    path.write_text(dumps_json(obj), encoding="utf-8")
    return path


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_text(path, text):
    path = Path(path)
    path.write_text(text, encoding="utf-8", newline="")
    return path


def field_to_bytes(f):
    v = np.asarray(f.values)
    head = _HEADER.pack(MAGIC, f.temporal.num_nodes, f.spatial.num_points, int(f.is_real_valued),
                        f.spatial.period, f.temporal.t_min, f.temporal.t_max)
    return head + np.ascontiguousarray(v, dtype="<c16").tobytes()


def field_from_bytes(buf):
    if len(buf) < _HEADER.size:
        raise GridError("truncated field header")
    magic, nt, nx, flags, period, t0, t1 = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise GridError("not a field dump (bad magic)")
    body = np.frombuffer(buf, dtype="<c16", offset=_HEADER.size)
    if body.size != nt * nx:
        raise GridError(f"field body has {body.size} values, header says {nt * nx}")
    spatial = SpatialGrid(int(nx), period)
    temporal = TimeGrid(t0, t1, int(nt) - 1)
    real = bool(flags & 1)
    vals = body.reshape(nt, nx)
    return SpaceTimeField(spatial, temporal, vals.real.copy() if real else vals.copy(), real)


def write_field(path, f):
    path = Path(path)
    path.write_bytes(field_to_bytes(f))
    return path


def read_field(path):
    return field_from_bytes(Path(path).read_bytes())


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_bytes(b):
    return hashlib.sha256(b).hexdigest()
