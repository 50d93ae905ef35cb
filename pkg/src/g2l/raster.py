"""Pixel images, drawing primitives, the built-in 5x7 bitmap font, and image codecs.

Rasterization is deliberately integer-only and deterministic: inclusive
rectangle corners, distance-test disc fill, Bresenham lines, no anti-aliasing.
Images are stored as row-major uint8 arrays of shape (height, width, channels).
"""

from __future__ import annotations

import math
import struct
import zlib
from typing import Iterable, NamedTuple

import numpy as np

from ._font_data import GLYPH_ROWS

GLYPH_W = 5
GLYPH_H = 7
GLYPH_GAP = 1  # units of whitespace between adjacent glyph boxes
WORD_GAP = 3   # units of whitespace a space character leaves between ink

HORIZONTAL = "horizontal"
VERTICAL = "vertical"  # rotated 90 degrees counterclockwise, reads bottom-to-top
ORIENTATIONS = (HORIZONTAL, VERTICAL)


class RasterError(ValueError):
    """Bad argument to a raster operation."""


class DecodeError(RasterError):
    """Corrupt or unsupported image data; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class Box(NamedTuple):
    """Axis-aligned pixel rectangle, top-left origin."""

    x: int
    y: int
    w: int
    h: int

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_dict(cls, d: dict) -> "Box":
        return cls(d["x"], d["y"], d["w"], d["h"])


class RasterImage:
    """A width x height pixel grid with 1 (grayscale) or 3 (RGB) channels."""

    def __init__(self, pixels: np.ndarray):
        if pixels.ndim != 3 or pixels.shape[2] not in (1, 3):
            raise RasterError(f"pixel array must be (h, w, 1|3), got {pixels.shape}")
        if pixels.dtype != np.uint8:
            raise RasterError("pixel array must be uint8")
        self.pixels = pixels

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def copy(self) -> "RasterImage":
        return RasterImage(self.pixels.copy())

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RasterImage)
            and self.pixels.shape == other.pixels.shape
            and bool(np.array_equal(self.pixels, other.pixels))
        )


def create_image(width: int, height: int, channels: int = 3, fill=255) -> RasterImage:
    """Create a solid-color image. fill is a single intensity or an RGB tuple."""
    if width < 1 or height < 1:
        raise RasterError(f"image dimensions must be >= 1, got {width}x{height}")
    if channels not in (1, 3):
        raise RasterError(f"channels must be 1 or 3, got {channels}")
    color = _normalize_color(fill, channels)
    px = np.empty((height, width, channels), dtype=np.uint8)
    px[:, :] = color
    return RasterImage(px)


def _normalize_color(color, channels: int) -> np.ndarray:
    if isinstance(color, (int, np.integer)):
        vals = (int(color),) * channels
    else:
        vals = tuple(int(v) for v in color)
        if len(vals) == 1:
            vals = vals * channels
    if len(vals) != channels:
        raise RasterError(f"color {color!r} does not fit {channels} channel(s)")
    if any(v < 0 or v > 255 for v in vals):
        raise RasterError(f"color components must be in [0, 255], got {color!r}")
    return np.array(vals, dtype=np.uint8)


def luminance(img: RasterImage) -> np.ndarray:
    """Per-pixel luminance (0.299 R + 0.587 G + 0.114 B) as float32, shape (h, w)."""
    px = img.pixels.astype(np.float32)
    if img.channels == 1:
        return px[:, :, 0]
    return 0.299 * px[:, :, 0] + 0.587 * px[:, :, 1] + 0.114 * px[:, :, 2]


# ---------------------------------------------------------------------------
# drawing primitives


def draw_rect(img: RasterImage, x0: int, y0: int, x1: int, y1: int, color) -> RasterImage:
    """Fill the rectangle with inclusive corners (x0, y0)-(x1, y1), clipped."""
    c = _normalize_color(color, img.channels)
    xa, xb = sorted((int(x0), int(x1)))
    ya, yb = sorted((int(y0), int(y1)))
    xa, xb = max(xa, 0), min(xb, img.width - 1)
    ya, yb = max(ya, 0), min(yb, img.height - 1)
    if xa > xb or ya > yb:
        return img
    img.pixels[ya : yb + 1, xa : xb + 1] = c
    return img


def _disc_mask(img: RasterImage, cx: int, cy: int, r: int):
    """Clipped window (slices) and the in-disc mask for pixel centers."""
    x0, x1 = max(cx - r, 0), min(cx + r, img.width - 1)
    y0, y1 = max(cy - r, 0), min(cy + r, img.height - 1)
    if x0 > x1 or y0 > y1 or r < 0:
        return None
    ys, xs = np.ogrid[y0 : y1 + 1, x0 : x1 + 1]
    mask = (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r
    return (slice(y0, y1 + 1), slice(x0, x1 + 1)), mask


def draw_disc(img: RasterImage, cx: int, cy: int, r: int, color) -> RasterImage:
    """Fill the disc of pixels whose center distance from (cx, cy) is <= r."""
    c = _normalize_color(color, img.channels)
    win = _disc_mask(img, int(cx), int(cy), int(r))
    if win is None:
        return img
    sl, mask = win
    img.pixels[sl][mask] = c
    return img


def draw_wedge(
    img: RasterImage, cx: int, cy: int, r: int, start_deg: float, end_deg: float, color
) -> RasterImage:
    """Fill the disc sector swept counterclockwise from start_deg to end_deg.

    Angles are in degrees, measured counterclockwise from the positive x axis
    with y pointing up on screen. A sweep of >= 360 degrees fills the disc.
    """
    c = _normalize_color(color, img.channels)
    sweep = float(end_deg) - float(start_deg)
    if sweep <= 0:
        return img
    win = _disc_mask(img, int(cx), int(cy), int(r))
    if win is None:
        return img
    sl, mask = win
    if sweep < 360.0:
        ys, xs = np.ogrid[sl[0], sl[1]]
        ang = np.degrees(np.arctan2(cy - ys, xs - cx))
        rel = np.mod(ang - float(start_deg), 360.0)
        mask = mask & (rel < sweep)
    img.pixels[sl][mask] = c
    return img


def draw_line(img: RasterImage, x0: int, y0: int, x1: int, y1: int, color) -> RasterImage:
    """Draw a 1-pixel Bresenham line, clipped to the image."""
    c = _normalize_color(color, img.channels)
    x0, y0, x1, y1 = int(x0), int(y0), int(x1), int(y1)
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    xs, ys = [], []
    x, y = x0, y0
    while True:
        xs.append(x)
        ys.append(y)
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy
    xa = np.array(xs)
    ya = np.array(ys)
    keep = (xa >= 0) & (xa < img.width) & (ya >= 0) & (ya < img.height)
    img.pixels[ya[keep], xa[keep]] = c
    return img


# ---------------------------------------------------------------------------
# bitmap font and text


class BitmapFont:
    """The embedded fixed-width 5x7 font over printable ASCII 32-126."""

    def __init__(self, patterns: dict | None = None):
        patterns = patterns if patterns is not None else GLYPH_ROWS
        self.glyphs: dict[str, np.ndarray] = {}
        for code in range(32, 127):
            ch = chr(code)
            rows = patterns[ch]
            if len(rows) != GLYPH_H or any(len(r) != GLYPH_W for r in rows):
                raise RasterError(f"glyph {ch!r} is not {GLYPH_W}x{GLYPH_H}")
            self.glyphs[ch] = np.array(
                [[cell == "#" for cell in row] for row in rows], dtype=bool
            )
        self._rotated = {ch: np.rot90(g) for ch, g in self.glyphs.items()}
        self._scaled: dict[tuple[str, int, str], np.ndarray] = {}

    def glyph(self, ch: str, orientation: str = HORIZONTAL) -> np.ndarray:
        if orientation == HORIZONTAL:
            return self.glyphs[ch]
        return self._rotated[ch]

    def scaled_glyph(self, ch: str, scale: int, orientation: str = HORIZONTAL) -> np.ndarray:
        key = (ch, scale, orientation)
        cached = self._scaled.get(key)
        if cached is None:
            g = self.glyph(ch, orientation)
            cached = np.kron(g, np.ones((scale, scale), dtype=bool)) if scale > 1 else g
            self._scaled[key] = cached
        return cached

    def ink_bounds(self, ch: str, orientation: str = HORIZONTAL):
        """Tight (min_row, max_row, min_col, max_col) of a glyph's ink, or None."""
        g = self.glyph(ch, orientation)
        rows = np.any(g, axis=1)
        if not rows.any():
            return None
        cols = np.any(g, axis=0)
        r = np.flatnonzero(rows)
        c = np.flatnonzero(cols)
        return int(r[0]), int(r[-1]), int(c[0]), int(c[-1])


_DEFAULT_FONT: BitmapFont | None = None


def default_font() -> BitmapFont:
    global _DEFAULT_FONT
    if _DEFAULT_FONT is None:
        _DEFAULT_FONT = BitmapFont()
    return _DEFAULT_FONT


def _check_text(text: str):
    if not text:
        raise RasterError("text must be non-empty")
    for ch in text:
        if not (32 <= ord(ch) <= 126):
            raise RasterError(f"character {ch!r} is outside printable ASCII 32-126")


def _layout(text: str) -> tuple[list[tuple[str, int]], int]:
    """Pen positions in font units along the reading direction.

    Non-space glyphs advance 6 units (5 box + 1 gap); a space advances 2 more,
    so neighbouring words end up 3 units of whitespace apart. Returns the list
    of (char, pen) for non-space characters and the total advance in units.
    """
    placed = []
    pen = 0
    for ch in text:
        if ch == " ":
            pen += WORD_GAP - GLYPH_GAP
        else:
            placed.append((ch, pen))
            pen += GLYPH_W + GLYPH_GAP
    return placed, pen


def _ink_extent(text: str, font: BitmapFont) -> tuple[int, int, int, int] | None:
    """Tight ink bounds of a horizontal layout, in font units: (u0, u1, r0, r1)."""
    placed, _ = _layout(text)
    u0 = u1 = r0 = r1 = None
    for ch, pen in placed:
        b = font.ink_bounds(ch)
        if b is None:
            continue
        mnr, mxr, mnc, mxc = b
        lo, hi = pen + mnc, pen + mxc
        u0 = lo if u0 is None else min(u0, lo)
        u1 = hi if u1 is None else max(u1, hi)
        r0 = mnr if r0 is None else min(r0, mnr)
        r1 = mxr if r1 is None else max(r1, mxr)
    if u0 is None:
        return None
    return u0, u1, r0, r1


def text_extent(
    text: str, scale: int = 1, orientation: str = HORIZONTAL, font: BitmapFont | None = None
) -> tuple[int, int]:
    """Tight (width, height) in pixels that draw_text would ink for this text.

    For strings of full-box glyphs (uppercase and digits) this equals the
    nominal metric: width = 5*n*s + (n-1)*s for n glyphs at scale s.
    """
    _check_text(text)
    font = font or default_font()
    ext = _ink_extent(text, font)
    if ext is None:
        return (0, 0)
    u0, u1, r0, r1 = ext
    w = (u1 - u0 + 1) * scale
    h = (r1 - r0 + 1) * scale
    if orientation == VERTICAL:
        return (h, w)
    return (w, h)


def draw_text(
    img: RasterImage,
    x: int,
    y: int,
    text: str,
    scale: int = 1,
    orientation: str = HORIZONTAL,
    color=0,
    font: BitmapFont | None = None,
) -> Box:
    """Draw text with its nominal box anchored at top-left (x, y).

    Returns the tight bounding box of the pixels actually inked. Horizontal
    text reads left to right; vertical text is rotated 90 degrees CCW and
    reads bottom to top.
    """
    _check_text(text)
    if scale < 1:
        raise RasterError(f"scale must be >= 1, got {scale}")
    if orientation not in ORIENTATIONS:
        raise RasterError(f"unknown orientation {orientation!r}")
    font = font or default_font()
    c = _normalize_color(color, img.channels)
    placed, total = _layout(text)

    for ch, pen in placed:
        mask = font.scaled_glyph(ch, scale, orientation)
        if orientation == HORIZONTAL:
            gx, gy = x + pen * scale, y
        else:
            gx, gy = x, y + (total - GLYPH_GAP - pen - GLYPH_W) * scale
        _blit(img, gx, gy, mask, c)

    ext = _ink_extent(text, font)
    if ext is None:
        return Box(x, y, 0, 0)
    u0, u1, r0, r1 = ext
    w = (u1 - u0 + 1) * scale
    h = (r1 - r0 + 1) * scale
    if orientation == HORIZONTAL:
        return Box(x + u0 * scale, y + r0 * scale, w, h)
    # rotated CCW: reading axis maps to -y, glyph rows map to +x
    span = total - GLYPH_GAP  # units from first box start to last box end
    by = y + (span - 1 - u1) * scale
    bx = x + r0 * scale
    return Box(bx, by, h, w)


def _blit(img: RasterImage, x: int, y: int, mask: np.ndarray, color: np.ndarray):
    h, w = mask.shape
    x0, y0 = max(x, 0), max(y, 0)
    x1, y1 = min(x + w, img.width), min(y + h, img.height)
    if x0 >= x1 or y0 >= y1:
        return
    sub = mask[y0 - y : y1 - y, x0 - x : x1 - x]
    img.pixels[y0:y1, x0:x1][sub] = color


# ---------------------------------------------------------------------------
# codecs

_PNG_SIG = b"\x89PNG\r\n\x1a\n"


def encode_png(img: RasterImage) -> bytes:
    """Encode as 8-bit non-interlaced PNG (grayscale or truecolor)."""
    color_type = 0 if img.channels == 1 else 2
    ihdr = struct.pack(">IIBBBBB", img.width, img.height, 8, color_type, 0, 0, 0)
    row_len = img.width * img.channels
    raw = bytearray()
    flat = img.pixels.reshape(img.height, row_len)
    for r in range(img.height):
        raw.append(0)  # filter type None
        raw += flat[r].tobytes()
    idat = zlib.compress(bytes(raw), 6)
    out = bytearray(_PNG_SIG)
    for tag, data in ((b"IHDR", ihdr), (b"IDAT", idat), (b"IEND", b"")):
        out += struct.pack(">I", len(data))
        out += tag
        out += data
        out += struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)
    return bytes(out)


def decode_png(data: bytes) -> RasterImage:
    if not data.startswith(_PNG_SIG):
        raise DecodeError("not a PNG file (bad signature)", offset=0)
    pos = len(_PNG_SIG)
    width = height = channels = None
    idat = bytearray()
    first_idat_at = None
    seen_iend = False
    while pos < len(data):
        if pos + 8 > len(data):
            raise DecodeError("truncated chunk header", offset=pos)
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        body_at = pos + 8
        if body_at + length + 4 > len(data):
            raise DecodeError(f"truncated {tag!r} chunk", offset=pos)
        body = data[body_at : body_at + length]
        (crc,) = struct.unpack(">I", data[body_at + length : body_at + length + 4])
        if zlib.crc32(tag + body) & 0xFFFFFFFF != crc:
            raise DecodeError(f"CRC mismatch in {tag!r} chunk", offset=pos)
        if tag == b"IHDR":
            width, height, depth, color_type, comp, filt, interlace = struct.unpack(
                ">IIBBBBB", body
            )
            if depth != 8:
                raise DecodeError(f"unsupported bit depth {depth}", offset=body_at)
            if color_type not in (0, 2):
                raise DecodeError(f"unsupported color type {color_type}", offset=body_at)
            if interlace != 0:
                raise DecodeError("interlaced PNG not supported", offset=body_at)
            channels = 1 if color_type == 0 else 3
        elif tag == b"IDAT":
            if first_idat_at is None:
                first_idat_at = pos
            idat += body
        elif tag == b"IEND":
            seen_iend = True
            break
        pos = body_at + length + 4
    if width is None:
        raise DecodeError("missing IHDR chunk", offset=len(_PNG_SIG))
    if not idat:
        raise DecodeError("missing IDAT data", offset=pos)
    if not seen_iend:
        raise DecodeError("missing IEND chunk", offset=pos)
    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as e:
        raise DecodeError(f"corrupt IDAT stream: {e}", offset=first_idat_at) from e
    stride = width * channels
    expected = height * (stride + 1)
    if len(raw) != expected:
        raise DecodeError(
            f"decompressed size {len(raw)} != expected {expected}", offset=first_idat_at
        )
    px = _unfilter(raw, width, height, channels, first_idat_at or 0)
    return RasterImage(px)


def _unfilter(raw: bytes, width: int, height: int, channels: int, offset: int) -> np.ndarray:
    stride = width * channels
    bpp = channels
    out = np.zeros((height, stride), dtype=np.uint8)
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, stride + 1)
    for r in range(height):
        ftype = int(arr[r, 0])
        row = arr[r, 1:].astype(np.int32)
        prev = out[r - 1].astype(np.int32) if r > 0 else np.zeros(stride, dtype=np.int32)
        if ftype == 0:
            cur = row
        elif ftype == 2:
            cur = (row + prev) & 0xFF
        elif ftype in (1, 3, 4):
            cur = np.zeros(stride, dtype=np.int32)
            for i in range(stride):
                a = cur[i - bpp] if i >= bpp else 0
                b = prev[i]
                if ftype == 1:
                    cur[i] = (row[i] + a) & 0xFF
                elif ftype == 3:
                    cur[i] = (row[i] + (a + b) // 2) & 0xFF
                else:
                    c = prev[i - bpp] if i >= bpp else 0
                    p = a + b - c
                    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                    if pa <= pb and pa <= pc:
                        pred = a
                    elif pb <= pc:
                        pred = b
                    else:
                        pred = c
                    cur[i] = (row[i] + pred) & 0xFF
        else:
            raise DecodeError(f"unknown PNG filter type {ftype}", offset=offset)
        out[r] = cur.astype(np.uint8)
    return out.reshape(height, width, channels)


def encode_pnm(img: RasterImage) -> bytes:
    """Encode as binary PGM (1 channel) or PPM (3 channels)."""
    magic = b"P5" if img.channels == 1 else b"P6"
    header = magic + f" {img.width} {img.height} 255\n".encode()
    return header + img.tobytes()


def decode_pnm(data: bytes) -> RasterImage:
    if data[:2] not in (b"P5", b"P6"):
        raise DecodeError("not a binary PGM/PPM file", offset=0)
    channels = 1 if data[:2] == b"P5" else 3
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if pos == start:
            raise DecodeError("truncated PNM header", offset=pos)
        try:
            fields.append(int(data[start:pos]))
        except ValueError:
            raise DecodeError("malformed PNM header field", offset=start) from None
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    if maxval != 255:
        raise DecodeError(f"unsupported PNM maxval {maxval}", offset=2)
    if width < 1 or height < 1:
        raise DecodeError(f"bad PNM dimensions {width}x{height}", offset=2)
    need = width * height * channels
    body = data[pos : pos + need]
    if len(body) != need:
        raise DecodeError(f"PNM pixel data truncated ({len(body)} of {need} bytes)", offset=pos)
    px = np.frombuffer(body, dtype=np.uint8).reshape(height, width, channels).copy()
    return RasterImage(px)


def encode_image(img: RasterImage, fmt: str) -> bytes:
    if fmt == "png":
        return encode_png(img)
    if fmt in ("ppm", "pgm", "pnm"):
        return encode_pnm(img)
    raise RasterError(f"unsupported image format {fmt!r}")


def decode_image(data: bytes) -> RasterImage:
    """Decode PNG or binary PNM, sniffing the container from magic bytes."""
    if data.startswith(_PNG_SIG) or data[:4] == _PNG_SIG[:4]:
        return decode_png(data)
    if data[:2] in (b"P5", b"P6"):
        return decode_pnm(data)
    raise DecodeError("unrecognized image format (expected PNG or binary PNM)", offset=0)


def write_image(img: RasterImage, path) -> None:
    path = str(path)
    ext = path.rsplit(".", 1)[-1].lower() if "." in path else "png"
    data = encode_image(img, "png" if ext == "png" else "pnm" if ext in ("ppm", "pgm", "pnm") else ext)
    with open(path, "wb") as f:
        f.write(data)


def read_image(path) -> RasterImage:
    with open(str(path), "rb") as f:
        data = f.read()
    return decode_image(data)
