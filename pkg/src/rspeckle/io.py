"""Bit-exact file I/O for image grids.

Raw-float format ("SPKIMG1"): a 64-byte ASCII header
``SPKIMG1\\n`` ``w=<int>\\n`` ``h=<int>\\n`` ``pitch=<decimal meters>\\n``
padded with spaces to 64 bytes, followed by width*height little-endian
float64 samples in row-major order.

PGM support: export to 16-bit P5 (min-max normalized) for human viewing and
import from 8/16-bit P5/P2 with caller-supplied pitch.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import FormatError, TruncationError
from .grids import ImageGrid

MAGIC = b"SPKIMG1\n"
HEADER_SIZE = 64


def write_image(path, img: ImageGrid) -> None:
    header = MAGIC + f"w={img.width}\nh={img.height}\npitch={img.pitch!r}\n".encode("ascii")
    if len(header) > HEADER_SIZE:
        raise FormatError(f"header overflows {HEADER_SIZE} bytes: pitch={img.pitch!r}")
    header = header.ljust(HEADER_SIZE, b" ")
    payload = np.ascontiguousarray(img.data, dtype="<f8").tobytes()
    Path(path).write_bytes(header + payload)


def read_image(path) -> ImageGrid:
    blob = Path(path).read_bytes()
    if len(blob) < HEADER_SIZE:
        raise FormatError(f"{path}: file shorter than the {HEADER_SIZE}-byte header")
    header = blob[:HEADER_SIZE]
    if not header.startswith(MAGIC):
        raise FormatError(f"{path}: bad magic {header[:8]!r}")
    fields = {}
    for line in header[len(MAGIC) :].decode("ascii", errors="replace").split("\n"):
        line = line.strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}: malformed header line {line!r}")
        key, value = line.split("=", 1)
        fields[key.strip()] = value.strip()
    try:
        width = int(fields["w"])
    except (KeyError, ValueError):
        raise FormatError(f"{path}: bad or missing header field 'w'") from None
    try:
        height = int(fields["h"])
    except (KeyError, ValueError):
        raise FormatError(f"{path}: bad or missing header field 'h'") from None
    try:
        pitch = float(fields["pitch"])
    except (KeyError, ValueError):
        raise FormatError(f"{path}: bad or missing header field 'pitch'") from None
    if width < 1 or height < 1:
        raise FormatError(f"{path}: non-positive dimensions {width}x{height}")

    expected = width * height * 8
    payload = blob[HEADER_SIZE:]
    if len(payload) != expected:
        raise TruncationError(
            f"{path}: header claims {width}x{height} ({expected} bytes) "
            f"but payload carries {len(payload)} bytes"
        )
    samples = np.frombuffer(payload, dtype="<f8").reshape(height, width)
    return ImageGrid(samples, pitch)


def write_pgm(path, img: ImageGrid) -> None:
    """16-bit grayscale preview, min-max normalized to [0, 65535]."""
    data = img.data
    lo, hi = float(data.min()), float(data.max())
    if hi > lo:
        scaled = (data - lo) / (hi - lo) * 65535.0
    else:
        scaled = np.zeros_like(data)
    pixels = np.round(scaled).astype(">u2")
    header = f"P5\n{img.width} {img.height}\n65535\n".encode("ascii")
    Path(path).write_bytes(header + pixels.tobytes())


_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\S+)")


def read_pgm(path, pitch: float) -> ImageGrid:
    """Import an 8/16-bit PGM (P5 binary or P2 ASCII); samples promoted to float64."""
    blob = Path(path).read_bytes()
    pos = 0
    tokens = []
    while len(tokens) < 4:
        m = _PGM_TOKEN.match(blob, pos)
        if m is None:
            raise FormatError(f"{path}: truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    magic = tokens[0]
    if magic not in (b"P5", b"P2"):
        raise FormatError(f"{path}: not a PGM file (magic {magic!r})")
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError:
        raise FormatError(f"{path}: non-integer PGM header field") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise FormatError(f"{path}: bad PGM geometry {width}x{height} maxval={maxval}")

    if magic == b"P5":
        payload = blob[pos + 1 :]  # single whitespace byte after maxval
        dtype = ">u2" if maxval > 255 else "u1"
        expected = width * height * (2 if maxval > 255 else 1)
        if len(payload) < expected:
            raise TruncationError(
                f"{path}: PGM payload has {len(payload)} bytes, expected {expected}"
            )
        samples = np.frombuffer(payload[:expected], dtype=dtype)
    else:
        values = blob[pos:].split()
        if len(values) < width * height:
            raise TruncationError(
                f"{path}: PGM carries {len(values)} samples, expected {width * height}"
            )
        samples = np.array([int(v) for v in values[: width * height]])
    return ImageGrid(samples.astype(np.float64).reshape(height, width), pitch)
