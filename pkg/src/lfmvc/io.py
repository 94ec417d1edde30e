"""Readers and writers for feature, kernel and label files.

Binary kernel layout: an 8-byte little-endian unsigned ``n`` followed by
``n*n`` little-endian float64 values in row-major order.
"""
import csv
import struct
from pathlib import Path

import numpy as np

from .errors import InvalidShape, ParseError, TruncatedFile

_HEADER = struct.Struct("<Q")


def _read_float_rows(path):
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(f"{path}:{lineno}: expected {width} columns, got {len(vals)}")
            rows.append(vals)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def read_features(path):
    return _read_float_rows(path)


def write_features(path, X):
    np.savetxt(path, np.asarray(X, dtype=np.float64), delimiter=",", fmt="%.17g")


def read_labels(path):
    labels = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip().split(",")[0].strip()
            if not s:
                continue
            try:
                v = float(s)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: not an integer label: {s!r}") from None
            if v != int(v) or v < 0:
                raise ParseError(f"{path}:{lineno}: labels must be non-negative integers, got {s!r}")
            labels.append(int(v))
    if not labels:
        raise ParseError(f"{path}: no labels")
    return np.asarray(labels, dtype=np.int64)


def write_labels(path, labels):
    with open(path, "w") as fh:
        for v in np.asarray(labels, dtype=np.int64):
            fh.write(f"{int(v)}\n")


def read_kernel_binary(path):
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise TruncatedFile(f"{path}: {len(data)} bytes, shorter than the 8-byte header")
    (n,) = _HEADER.unpack_from(data)
    need = _HEADER.size + 8 * n * n
    if len(data) != need:
        kind = TruncatedFile if len(data) < need else ParseError
        raise kind(f"{path}: header says n={n} ({need} bytes) but file has {len(data)} bytes")
    K = np.frombuffer(data, dtype="<f8", offset=_HEADER.size, count=n * n)
    return K.reshape(n, n).astype(np.float64)


def write_kernel_binary(path, K):
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidShape(f"kernel must be square, got {K.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(K.shape[0]))
        fh.write(np.ascontiguousarray(K, dtype="<f8").tobytes())


def read_kernel(path):
    """Load a kernel from ``.bin`` (binary layout above) or CSV."""
    path = Path(path)
    if path.suffix.lower() in (".bin", ".f64", ".kbin"):
        return read_kernel_binary(path)
    K = _read_float_rows(path)
    if K.shape[0] != K.shape[1]:
        raise InvalidShape(f"{path}: kernel is {K.shape[0]}x{K.shape[1]}, not square")
    return K


def write_kernel(path, K):
    path = Path(path)
    if path.suffix.lower() in (".bin", ".f64", ".kbin"):
        write_kernel_binary(path, K)
    else:
        np.savetxt(path, np.asarray(K, dtype=np.float64), delimiter=",", fmt="%.17g")
