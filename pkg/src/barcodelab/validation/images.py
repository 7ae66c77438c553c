"""Image dimensions from file headers only (no decode).

Supports JPEG (SOF markers) and PNG (IHDR); enough for the megapixel cap
on submission packages.
"""

from __future__ import annotations

import struct

_JPEG_SOF_MARKERS = set(range(0xC0, 0xD0)) - {0xC4, 0xC8, 0xCC}


def image_dimensions(data: bytes) -> tuple:
    """(width, height) read from the header; raises ValueError on junk."""
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        if len(data) < 24:
            raise ValueError("truncated PNG header")
        width, height = struct.unpack(">II", data[16:24])
        return width, height
    if data[:2] == b"\xff\xd8":
        pos = 2
        size = len(data)
        while pos + 4 <= size:
            if data[pos] != 0xFF:
                pos += 1
                continue
            marker = data[pos + 1]
            if marker in (0xD8, 0x01) or 0xD0 <= marker <= 0xD7:
                pos += 2
                continue
            if pos + 4 > size:
                break
            seg_len = struct.unpack(">H", data[pos + 2 : pos + 4])[0]
            if marker in _JPEG_SOF_MARKERS:
                if pos + 9 > size:
                    break
                height, width = struct.unpack(">HH", data[pos + 5 : pos + 9])
                return width, height
            pos += 2 + seg_len
        raise ValueError("no JPEG frame header found")
    raise ValueError("not a JPEG or PNG file")


def megapixels(data: bytes) -> float:
    width, height = image_dimensions(data)
    return width * height / 1_000_000.0
