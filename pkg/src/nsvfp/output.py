"""Serialization: diagnostics CSV, binary field snapshots, run manifest.

The CSV prints floats with 17 significant digits so the values round-trip
bit-exactly and reruns compare byte-identically.  Snapshots are raw 64-bit
little-endian reals behind a small self-describing header, which makes the
write-then-read cycle reproduce the in-memory arrays exactly.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .diagnostics import RECORD_FIELDS, DiagnosticsRecord

SNAPSHOT_MAGIC = b"NSVFP1D\x00"
_HEADER = struct.Struct("<qqdd")  # nx, nv, v_max, t


def format_float(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


class DiagnosticsWriter:
    """Appends one CSV row per record; flushes so partial output survives."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "w", newline="")
        self._fh.write(",".join(RECORD_FIELDS) + "\n")
        self._fh.flush()

    def append(self, record: DiagnosticsRecord):
        values = [format_float(getattr(record, name)) for name in RECORD_FIELDS]
        self._fh.write(",".join(values) + "\n")
        self._fh.flush()

    def close(self):
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_diagnostics(path):
    """CSV back into a dict of float arrays keyed by column name."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    columns = np.array(rows, dtype=float).T if rows else np.empty((len(header), 0))
    return {name: columns[i] for i, name in enumerate(header)}


def write_snapshot(path, rho, m, f, v_max, t):
    """Header (nx, nv, v_max, t), then row-major f, then rho, then m."""
    rho = np.ascontiguousarray(rho, dtype="<f8")
    m = np.ascontiguousarray(m, dtype="<f8")
    f = np.ascontiguousarray(f, dtype="<f8")
    nx, nv = f.shape
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(_HEADER.pack(nx, nv, float(v_max), float(t)))
        fh.write(f.tobytes())
        fh.write(rho.tobytes())
        fh.write(m.tobytes())


def read_snapshot(path):
    """Inverse of :func:`write_snapshot`; returns (rho, m, f, header dict)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(SNAPSHOT_MAGIC))
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: not a field snapshot")
        nx, nv, v_max, t = _HEADER.unpack(fh.read(_HEADER.size))
        f = np.frombuffer(fh.read(8 * nx * nv), dtype="<f8").reshape(nx, nv).copy()
        rho = np.frombuffer(fh.read(8 * nx), dtype="<f8").copy()
        m = np.frombuffer(fh.read(8 * nx), dtype="<f8").copy()
    return rho, m, f, {"nx": nx, "nv": nv, "v_max": v_max, "t": t}


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(path, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
