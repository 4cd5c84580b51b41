"""Parameter-free OPE upscaling: render a feature map at any resolution.

Each target pixel is a linear combination of latent coefficients with the
OPE vector of its relative coordinate.  With patch ensemble the four
surrounding latent codes are blended by diagonal-rectangle area weights.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .basis import OpeConfig, ope
from .featuremap import FeatureMap
from .geometry import (
    cell_centers,
    check_domain,
    fetched_centers,
    nearest_cell,
    neighborhood_arrays,
    virtual_center,
)

# Gathered coefficients per work unit (float64 elements).  Chunking depends
# only on the inputs, never on the thread count.
CHUNK_ELEMENTS = 2**22


class EnsembleMode(enum.Enum):
    FULL = "full"  # area-weighted blend of four codes, halved relative frame
    NO_EXT = "no-ext"  # blend of four codes, plain relative frame
    NO_INTERP = "no-interp"  # nearest code only, halved relative frame
    NONE = "none"  # nearest code only, plain relative frame

    @property
    def interpolates(self) -> bool:
        return self in (EnsembleMode.FULL, EnsembleMode.NO_EXT)

    @property
    def extended(self) -> bool:
        return self in (EnsembleMode.FULL, EnsembleMode.NO_INTERP)

    @classmethod
    def parse(cls, value) -> "EnsembleMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            raise ValueError(f"unknown ensemble mode {value!r}; use one of {[m.value for m in cls]}") from None


def render_single(z, xr, yr, cfg) -> float:
    """Dot product of one latent vector with the OPE vector at (xr, yr)."""
    cfg = cfg if isinstance(cfg, OpeConfig) else OpeConfig(cfg)
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != cfg.dim:
        raise ValueError(f"latent length {z.shape[-1]} does not match (2n+1)^2={cfg.dim}")
    return np.dot(z, ope(xr, yr, cfg))


def _coef_table(fm: FeatureMap) -> np.ndarray:
    # (h*w, channels, dim) in float64; one row gather per ensemble member.
    h, w, c, d = fm.data.shape
    return fm.data.astype(np.float64).reshape(h * w, c, d)


def _render_points(table, fm: FeatureMap, qx, qy, mode: EnsembleMode) -> np.ndarray:
    """Render flat query arrays; returns (P, channels), unclamped.

    Each pixel is a stack of independent (channels x dim) @ (dim,) products,
    so its value does not depend on which other pixels share the batch.
    """
    h, w = fm.h, fm.w
    qx = np.asarray(qx, dtype=np.float64)
    qy = np.asarray(qy, dtype=np.float64)

    if mode.interpolates:
        rows, cols, _, _, weights = neighborhood_arrays(qx, qy, fm.grid, merge_clamped=True)
        cx, cy = fetched_centers(rows, cols, fm.grid)
    else:
        rows = nearest_cell(qx, h)[:, None]
        cols = nearest_cell(qy, w)[:, None]
        cx = virtual_center(rows, h)
        cy = virtual_center(cols, w)
        weights = None

    sx, sy = (h / 2.0, w / 2.0) if mode.extended else (float(h), float(w))
    p = ope((qx[:, None] - cx) * sx, (qy[:, None] - cy) * sy, fm.cfg)  # (P, M, dim)
    codes = table[rows * w + cols]  # (P, M, C, dim)
    vals = (codes @ p[..., None])[..., 0]  # (P, M, C)

    if weights is None:
        return vals[:, 0, :]
    out = vals[:, 0, :] * weights[:, 0, None]
    for t in range(1, 4):
        out = out + vals[:, t, :] * weights[:, t, None]
    return out


def render_pixel(fm: FeatureMap, q, mode=EnsembleMode.FULL) -> np.ndarray:
    """Per-channel value of the continuous image at absolute point ``q``."""
    mode = EnsembleMode.parse(mode)
    qx, qy = float(q[0]), float(q[1])
    check_domain(qx, qy)
    return _render_points(_coef_table(fm), fm, np.array([qx]), np.array([qy]), mode)[0]


def render_image(fm: FeatureMap, H: int, W: int, mode=EnsembleMode.FULL, threads: int = 1, clamp: bool = True) -> np.ndarray:
    """Render ``fm`` to an H x W x channels image sampled at pixel centers.

    ``threads`` only changes scheduling; chunk boundaries are fixed, so the
    output is bit-identical for any thread count.  Values are clamped to
    [0, 1] unless ``clamp`` is False.
    """
    mode = EnsembleMode.parse(mode)
    H, W = int(H), int(W)
    if H < 1 or W < 1:
        raise ValueError(f"target size must be positive, got {H}x{W}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")

    table = _coef_table(fm)
    xs = cell_centers(H)
    ys = cell_centers(W)
    out = np.empty((H, W, fm.channels), dtype=np.float64)
    step = max(1, CHUNK_ELEMENTS // (4 * fm.cfg.dim * fm.channels * W))
    starts = range(0, H, step)

    def work(r0):
        r1 = min(H, r0 + step)
        qx = np.repeat(xs[r0:r1], W)
        qy = np.tile(ys, r1 - r0)
        out[r0:r1] = _render_points(table, fm, qx, qy, mode).reshape(r1 - r0, W, fm.channels)

    if threads == 1:
        for r0 in starts:
            work(r0)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))

    if clamp:
        np.clip(out, 0.0, 1.0, out=out)
    return out


def op_count(cfg, H: int, W: int, channels: int = 3) -> int:
    """Estimated multiply-accumulates to render an H x W image.

    Per pixel and per ensemble member: one dot product per channel, the OPE
    outer product, and two 1D encodings of 2n+1 terms each.
    """
    cfg = cfg if isinstance(cfg, OpeConfig) else OpeConfig(cfg)
    per_member = channels * cfg.dim + cfg.dim + 2 * cfg.axis_dim
    return int(H) * int(W) * 4 * per_member
