"""Snapshot files (binary FRDE1, CSV, PGM) and the diagnostics table."""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .grid import Grid2D, Space

MAGIC = b"FRDE1"
# magic, Nx, Ny, Lx, Ly, components, t, space (0 physical / 1 spectral)
_HEADER = struct.Struct("<5sIIddIdB")
_SPACE_CODE = {Space.PHYSICAL: 0, Space.SPECTRAL: 1}


class SnapshotFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SnapshotData:
    grid: Grid2D
    t: float
    space: Space
    fields: tuple[np.ndarray, ...]


def encode_snapshot(fields: Sequence[np.ndarray], grid: Grid2D, t: float,
                    space: Space = Space.PHYSICAL) -> bytes:
    header = _HEADER.pack(MAGIC, grid.Nx, grid.Ny, grid.Lx, grid.Ly, len(fields), t, _SPACE_CODE[space])
    payload = b"".join(np.ascontiguousarray(f, dtype="<f8").tobytes(order="C") for f in fields)
    return header + payload


def decode_snapshot(data: bytes) -> SnapshotData:
    if len(data) < _HEADER.size or data[:5] != MAGIC:
        raise SnapshotFormatError("not an FRDE1 snapshot")
    magic, nx, ny, lx, ly, ncomp, t, code = _HEADER.unpack_from(data)
    expected = ncomp * nx * ny * 8
    payload = data[_HEADER.size:]
    if len(payload) != expected:
        raise SnapshotFormatError(f"payload has {len(payload)} bytes, header implies {expected}")
    flat = np.frombuffer(payload, dtype="<f8")
    fields = tuple(flat[i * nx * ny:(i + 1) * nx * ny].reshape(nx, ny).astype(np.float64)
                   for i in range(ncomp))
    space = Space.PHYSICAL if code == 0 else Space.SPECTRAL
    return SnapshotData(Grid2D(lx, ly, nx, ny), t, space, fields)


def _write_bytes(path: Path, data: bytes) -> None:
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def write_binary(path: str | Path, fields: Sequence[np.ndarray], grid: Grid2D, t: float) -> Path:
    path = Path(path)
    _write_bytes(path, encode_snapshot(fields, grid, t))
    return path


def read_snapshot(path: str | Path) -> SnapshotData:
    return decode_snapshot(Path(path).read_bytes())


def write_csv(path: str | Path, fields: Sequence[np.ndarray], grid: Grid2D,
              names: Sequence[str]) -> Path:
    path = Path(path)
    X, Y = grid.mesh()
    cols = [X.ravel(), Y.ravel()] + [np.asarray(f).ravel() for f in fields]
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", *names])
            for row in zip(*cols):
                writer.writerow([f"{v:.17g}" for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def write_pgm(path: str | Path, field: np.ndarray) -> Path:
    """8-bit binary PGM with linear min-max scaling; the range goes to ``<path>.txt``.

    Image rows run from the top (largest y) down; columns follow x.
    """
    path = Path(path)
    values = np.asarray(field, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        scaled = np.round((values - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros_like(values)
    image = scaled.astype(np.uint8).T[::-1]
    height, width = image.shape
    _write_bytes(path, f"P5\n{width} {height}\n255\n".encode("ascii") + image.tobytes())
    sidecar = path.with_name(path.name + ".txt")
    try:
        sidecar.write_text(f"min = {lo:.17g}\nmax = {hi:.17g}\nscaling = linear\n")
    except OSError as exc:
        raise OSError(f"cannot write {sidecar}: {exc.strerror}") from exc
    return path


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise SnapshotFormatError(f"{path} is not a binary PGM")
    width, height = (int(x) for x in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(height, width)


def write_table(path: str | Path, rows: Iterable[dict]) -> Path:
    """CSV with the union of row keys as header (first-seen order)."""
    path = Path(path)
    rows = list(rows)
    header: list[str] = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row.get(k, "")) for k in header])
    return path


def _fmt(value) -> str:
    # shortest string that round-trips exactly
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)
