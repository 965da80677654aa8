"""Minimal binary PGM (P5, 8-bit) reader/writer.

Only what the concealment tooling needs: single-channel bytes, maxval up
to 255, comment lines allowed anywhere in the header. Loss masks ride the
same format with the convention that pixel value 0 marks a lost sample.
"""

from __future__ import annotations

import numpy as np

from .errors import FormatError, ShapeError


def _header_tokens(blob: bytes, path) -> tuple[list[int], int]:
    """Parse 'P5 <width> <height> <maxval>' allowing comments; return offset past header."""
    if blob[:2] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (P5) file")
    pos = 2
    tokens: list[int] = []
    while len(tokens) < 3:
        if pos >= len(blob):
            raise FormatError(f"{path}: truncated header")
        ch = blob[pos : pos + 1]
        if ch in b" \t\r\n":
            pos += 1
        elif ch == b"#":
            line_end = blob.find(b"\n", pos)
            pos = len(blob) if line_end < 0 else line_end + 1
        elif ch.isdigit():
            start = pos
            while pos < len(blob) and blob[pos : pos + 1].isdigit():
                pos += 1
            tokens.append(int(blob[start:pos]))
        else:
            raise FormatError(f"{path}: unexpected byte {ch!r} in header")
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(blob) or blob[pos : pos + 1] not in b" \t\r\n":
        raise FormatError(f"{path}: missing whitespace after maxval")
    return tokens, pos + 1


def read_pgm(path) -> np.ndarray:
    """Read a P5 file into a (height, width) uint8 array."""
    with open(path, "rb") as fh:
        blob = fh.read()
    (width, height, maxval), offset = _header_tokens(blob, path)
    if width < 1 or height < 1:
        raise FormatError(f"{path}: non-positive dimensions {width}x{height}")
    if not (0 < maxval <= 255):
        raise FormatError(f"{path}: maxval {maxval} unsupported (8-bit only)")
    raster = blob[offset : offset + width * height]
    if len(raster) != width * height:
        raise FormatError(
            f"{path}: raster holds {len(raster)} bytes, header implies {width * height}"
        )
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path, values) -> None:
    """Write a 2-D array as P5, rounding and clamping to [0, 255]."""
    arr = np.asarray(values)
    if arr.ndim != 2 or arr.size == 0:
        raise ShapeError(f"image must be non-empty 2-D, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        arr = arr.real
    data = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
    height, width = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(data.tobytes())
