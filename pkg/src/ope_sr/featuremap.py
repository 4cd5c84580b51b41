"""Feature maps of OPE latent codes and the OPEF binary format.

OPEF layout, little-endian::

    b"OPEF"  u32 version=1  u32 h  u32 w  u32 channels  u32 n
    h*w*channels*(2n+1)^2 float32 values, order [row][col][channel][coefficient]
"""

from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass

import numpy as np

from .basis import OpeConfig
from .geometry import GridSpec

MAGIC = b"OPEF"
VERSION = 1
HEADER = struct.Struct("<4sIIIII")
# Largest payload we agree to allocate (values, not bytes).
MAX_VALUES = 2**31 - 1


class OpefError(ValueError):
    """Base class for malformed OPEF streams."""


class BadMagicError(OpefError):
    pass


class VersionMismatchError(OpefError):
    pass


class TruncatedPayloadError(OpefError):
    pass


class SizeOverflowError(OpefError):
    pass


AXES = {"x": 0, "y": 1, "vertical": 0, "horizontal": 1}


def axis_number(axis) -> int:
    """Map an axis name to 0 (x, rows) or 1 (y, columns).

    "vertical" mirrors top to bottom (reverses rows, the x axis) and
    "horizontal" mirrors left to right (reverses columns, the y axis).
    """
    if axis in (0, 1):
        return int(axis)
    try:
        return AXES[axis]
    except KeyError:
        raise ValueError(f"unknown flip axis {axis!r}; use one of {sorted(AXES)}") from None


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """h x w grid of per-channel latent codes, stored as float32.

    ``data`` has shape (h, w, channels, (2n+1)^2) and is read-only.
    """

    data: np.ndarray
    cfg: OpeConfig

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float32, copy=True)
        if data.ndim != 4:
            raise ValueError(f"feature map data must be 4-D (h, w, c, dim), got shape {data.shape}")
        h, w, c, d = data.shape
        if h < 1 or w < 1 or c < 1:
            raise ValueError(f"feature map needs h, w, channels >= 1, got {data.shape}")
        if d != self.cfg.dim:
            raise ValueError(f"coefficient dimension {d} does not match (2n+1)^2={self.cfg.dim}")
        if not np.all(np.isfinite(data)):
            raise ValueError("feature map coefficients must be finite")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.data.shape[0], self.data.shape[1])

    @property
    def h(self) -> int:
        return self.data.shape[0]

    @property
    def w(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def coefficients(self, row: int, col: int, channel: int) -> np.ndarray:
        return self.data[row, col, channel]

    def scaled(self, alpha: float) -> "FeatureMap":
        return FeatureMap(self.data * np.float32(alpha), self.cfg)

    def __eq__(self, other):
        if not isinstance(other, FeatureMap):
            return NotImplemented
        return (
            self.cfg == other.cfg
            and self.data.shape == other.data.shape
            and self.data.tobytes() == other.data.tobytes()
        )

    def __repr__(self):
        return f"FeatureMap(h={self.h}, w={self.w}, channels={self.channels}, n={self.cfg.n})"


def random_feature_map(h: int, w: int, n: int, channels: int = 3, seed=None, scale: float = 0.2) -> FeatureMap:
    """Synthetic feature map: DC around 0.5, other coefficients ~ N(0, scale)."""
    rng = np.random.default_rng(seed)
    cfg = OpeConfig(n)
    data = rng.normal(0.0, scale, size=(h, w, channels, cfg.dim))
    data[..., 0] = rng.uniform(0.2, 0.8, size=(h, w, channels))
    return FeatureMap(data, cfg)


def sine_parity(cfg: OpeConfig, axis) -> np.ndarray:
    """+1/-1 per flat coefficient: -1 where the factor along ``axis`` is a sine."""
    ax = axis_number(axis)
    k = np.arange(cfg.axis_dim)
    odd = np.where((k > 0) & (k % 2 == 0), -1.0, 1.0)
    ones = np.ones(cfg.axis_dim)
    sign = np.outer(odd, ones) if ax == 0 else np.outer(ones, odd)
    return sign.reshape(-1).astype(np.float32)


def flip(fm: FeatureMap, axis) -> FeatureMap:
    """Mirror the represented continuous image along ``axis``.

    Cells are reversed along the axis and every coefficient whose basis
    factor along that axis is a sine changes sign, so rendering commutes with
    mirroring.
    """
    ax = axis_number(axis)
    data = np.flip(fm.data, axis=ax) * sine_parity(fm.cfg, ax)
    return FeatureMap(data, fm.cfg)


def flip_spatial(fm: FeatureMap, axis) -> FeatureMap:
    """Reverse cell order only, leaving coefficients untouched.

    Kept for comparison; it does not commute with rendering once sine
    coefficients are non-zero.
    """
    return FeatureMap(np.flip(fm.data, axis=axis_number(axis)), fm.cfg)


def write_opef(fm: FeatureMap, sink) -> None:
    """Write ``fm`` to a path or binary file object."""
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "wb") as f:
            write_opef(fm, f)
        return
    sink.write(HEADER.pack(MAGIC, VERSION, fm.h, fm.w, fm.channels, fm.cfg.n))
    sink.write(np.ascontiguousarray(fm.data, dtype="<f4").tobytes())


def read_opef(source) -> FeatureMap:
    """Read a feature map from a path, bytes, or binary file object."""
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as f:
            return read_opef(f)

    head = source.read(HEADER.size)
    if len(head) < 4 or head[:4] != MAGIC:
        raise BadMagicError(f"bad magic {head[:4]!r}, expected {MAGIC!r}")
    if len(head) < HEADER.size:
        raise TruncatedPayloadError(f"header truncated: {len(head)} of {HEADER.size} bytes")
    _, version, h, w, c, n = HEADER.unpack(head)
    if version != VERSION:
        raise VersionMismatchError(f"unsupported OPEF version {version}, expected {VERSION}")
    if h == 0 or w == 0 or c == 0:
        raise OpefError(f"empty feature map dimensions {h}x{w}x{c}")
    count = h * w * c * (2 * n + 1) ** 2
    if count > MAX_VALUES:
        raise SizeOverflowError(f"payload of {count} values exceeds limit {MAX_VALUES}")
    payload = source.read(4 * count)
    if len(payload) < 4 * count:
        raise TruncatedPayloadError(f"payload truncated: {len(payload)} of {4 * count} bytes")
    cfg = OpeConfig(n)
    data = np.frombuffer(payload, dtype="<f4").reshape(h, w, c, cfg.dim)
    return FeatureMap(data, cfg)
