"""Image rasters: codecs, PSNR, bicubic resampling and flips.

Images are float64 numpy arrays of shape (H, W, C) with values in [0, 1].
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from .featuremap import axis_number


class ImageFormatError(ValueError):
    """Unreadable or unsupported image file."""


class UnsupportedFormatError(ImageFormatError):
    pass


class MalformedHeaderError(ImageFormatError):
    pass


class TruncatedImageError(ImageFormatError):
    pass


def as_image(arr) -> np.ndarray:
    """Coerce to an (H, W, C) float64 array clamped to [0, 1]."""
    img = np.asarray(arr, dtype=np.float64)
    if img.ndim == 2:
        img = img[..., None]
    if img.ndim != 3 or min(img.shape) < 1:
        raise ValueError(f"expected an (H, W, C) image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite values")
    return np.clip(img, 0.0, 1.0)


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB for [0, 1] images; inf when identical.

    One MSE over all pixels and channels.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def cubic_kernel(x, a: float = -0.5):
    x = np.abs(np.asarray(x, dtype=np.float64))
    x2, x3 = x * x, x * x * x
    near = (a + 2.0) * x3 - (a + 3.0) * x2 + 1.0
    far = a * x3 - 5.0 * a * x2 + 8.0 * a * x - 4.0 * a
    return np.where(x <= 1.0, near, np.where(x < 2.0, far, 0.0))


def cubic_weights(t, a: float = -0.5) -> np.ndarray:
    """The four tap weights for fractional offset ``t`` in [0, 1)."""
    t = np.asarray(t, dtype=np.float64)
    return np.stack(
        [cubic_kernel(t + 1.0, a), cubic_kernel(t, a), cubic_kernel(1.0 - t, a), cubic_kernel(2.0 - t, a)],
        axis=-1,
    )


def _resample_matrix(n_in: int, n_out: int, a: float) -> np.ndarray:
    # Center-aligned: output pixel o samples input position (o + 0.5) * n_in / n_out - 0.5.
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    base = np.floor(src).astype(np.int64)
    w = cubic_weights(src - base, a)
    m = np.zeros((n_out, n_in))
    rows = np.arange(n_out)
    for tap in range(4):
        idx = np.clip(base - 1 + tap, 0, n_in - 1)
        np.add.at(m, (rows, idx), w[:, tap])
    return m


def bicubic_resize(img, H: int, W: int, a: float = -0.5) -> np.ndarray:
    """Separable cubic-convolution resize with edge replication, clamped to [0, 1]."""
    if H < 1 or W < 1:
        raise ValueError(f"target size must be positive, got {H}x{W}")
    img = np.asarray(img, dtype=np.float64)
    squeeze = img.ndim == 2
    if squeeze:
        img = img[..., None]
    mr = _resample_matrix(img.shape[0], H, a)
    mc = _resample_matrix(img.shape[1], W, a)
    out = np.einsum("ia,abc,jb->ijc", mr, img, mc)
    np.clip(out, 0.0, 1.0, out=out)
    return out[..., 0] if squeeze else out


def flip_image(img, axis) -> np.ndarray:
    """Reverse pixel order along ``axis`` (see ``featuremap.axis_number``)."""
    return np.flip(np.asarray(img), axis=axis_number(axis)).copy()


def to_uint8(img) -> np.ndarray:
    return np.round(np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)


def from_uint8(arr) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.uint8)
    if arr.ndim == 2:
        arr = arr[..., None]
    return arr.astype(np.float64) / 255.0


# -- PPM (binary P6, 8-bit) --------------------------------------------------


def _ppm_tokens(data: bytes, count: int):
    """First ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise MalformedHeaderError("PPM header ended early")
        tokens.append(data[start:pos])
    return tokens, pos


def decode_ppm(data: bytes) -> np.ndarray:
    if data[:2] != b"P6":
        if data[:1] == b"P" and data[1:2].isdigit():
            raise UnsupportedFormatError(f"only binary P6 PPM is supported, got {data[:2].decode()}")
        raise UnsupportedFormatError("not a PPM file")
    tokens, pos = _ppm_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise MalformedHeaderError(f"non-numeric PPM header fields {tokens[1:]}") from None
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"bad PPM size {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormatError(f"only 8-bit PPM (maxval 255) is supported, got {maxval}")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise MalformedHeaderError("missing whitespace after PPM header")
    pos += 1
    need = width * height * 3
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise TruncatedImageError(f"PPM payload truncated: {len(payload)} of {need} bytes")
    return from_uint8(np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3))


def encode_ppm(img) -> bytes:
    img = np.asarray(img)
    if img.ndim == 2:
        img = img[..., None]
    if img.shape[2] == 1:
        img = np.repeat(img, 3, axis=2)
    if img.shape[2] != 3:
        raise ValueError(f"PPM needs 1 or 3 channels, got {img.shape[2]}")
    h, w = img.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + to_uint8(img).tobytes()


# -- dispatch ------------------------------------------------------------------

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def load_image(path) -> np.ndarray:
    """Read a P6 PPM or an 8-bit PNG into an (H, W, C) float image."""
    data = Path(path).read_bytes()
    if data[:1] == b"P":
        return decode_ppm(data)
    if data[:8] == PNG_MAGIC:
        return _load_png(path)
    raise UnsupportedFormatError(f"{path}: unrecognized image format")


def _load_png(path) -> np.ndarray:
    from PIL import Image as PILImage

    try:
        with PILImage.open(path) as im:
            im.load()
            if im.mode not in ("L", "RGB", "RGBA", "P", "LA"):
                raise UnsupportedFormatError(f"{path}: unsupported PNG mode {im.mode}")
            if im.mode in ("P", "RGBA", "LA"):
                im = im.convert("RGB")
            arr = np.asarray(im, dtype=np.uint8)
    except OSError as exc:
        raise TruncatedImageError(f"{path}: {exc}") from exc
    return from_uint8(arr)


def save_image(img, path) -> None:
    """Write by extension: .ppm (P6) or .png (8-bit gray or RGB)."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".ppm":
        Path(path).write_bytes(encode_ppm(img))
    elif ext == ".png":
        from PIL import Image as PILImage

        arr = to_uint8(img)
        if arr.ndim == 3 and arr.shape[2] == 1:
            arr = arr[..., 0]
        PILImage.fromarray(arr).save(path)
    else:
        raise UnsupportedFormatError(f"cannot write {path}: use .ppm or .png")
