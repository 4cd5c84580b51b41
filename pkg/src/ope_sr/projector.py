"""Analytic encoder: project image windows onto the OPE basis.

A latent code for a cell of an image downscaled by ``r`` is the discrete
projection of the 2r x 2r pixel window centered on that cell:

    z[k] = 1/4 * sum over samples of  value * P[k](x', y') * (1/r)^2

where (x', y') is the sample position in the cell's extended relative frame
(spacing 1/r, so the window spans [-1, 1]).  The (1/r)^2 factor is the
per-sample area; without it a constant image would come back scaled by r^2.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .basis import OpeConfig, gamma, ope
from .featuremap import FeatureMap

log = logging.getLogger(__name__)


def window_offsets(r: int) -> np.ndarray:
    """Relative coordinates of the 2r samples along one axis of a window.

    For even r these are the midpoints of 2r equal cells of [-1, 1].  For odd
    r the window starts floor(r/2) pixels before the cell and is shifted by
    half a pixel relative to the cell center.
    """
    if r < 1:
        raise ValueError(f"downscale factor must be >= 1, got {r}")
    m = np.arange(2 * r, dtype=np.float64)
    return (m - (r // 2) + 0.5 - 0.5 * r) / r


def _check_window(samples: np.ndarray) -> int:
    if samples.ndim < 2 or samples.shape[0] != samples.shape[1]:
        raise ValueError(f"window must be square, got shape {samples.shape[:2]}")
    side = samples.shape[0]
    if side < 2 or side % 2:
        raise ValueError(f"window side must be even and >= 2, got {side}")
    return side // 2


def project_window(samples, cfg, rel_coords=None) -> np.ndarray:
    """Latent vector of one 2r x 2r scalar window.

    ``rel_coords`` has shape (2r, 2r, 2) and defaults to the canonical grid
    from :func:`window_offsets`.
    """
    cfg = cfg if isinstance(cfg, OpeConfig) else OpeConfig(cfg)
    samples = np.asarray(samples, dtype=np.float64)
    r = _check_window(samples)
    if rel_coords is None:
        t = window_offsets(r)
        xr, yr = np.meshgrid(t, t, indexing="ij")
    else:
        rel_coords = np.asarray(rel_coords, dtype=np.float64)
        if rel_coords.shape != samples.shape[:2] + (2,):
            raise ValueError(f"rel_coords shape {rel_coords.shape} does not match window {samples.shape[:2]}")
        xr, yr = rel_coords[..., 0], rel_coords[..., 1]
    p = ope(xr, yr, cfg)
    return 0.25 / r**2 * np.einsum("ab,abk->k", samples, p)


def synthesize_window(z, r: int, cfg) -> np.ndarray:
    """Evaluate a single latent vector at the canonical 2r x 2r sample grid."""
    cfg = cfg if isinstance(cfg, OpeConfig) else OpeConfig(cfg)
    t = window_offsets(r)
    xr, yr = np.meshgrid(t, t, indexing="ij")
    return ope(xr, yr, cfg) @ np.asarray(z, dtype=np.float64)


def encode_image(img, r: int, cfg, border: str = "symmetric") -> FeatureMap:
    """Encode an H x W x C image into an (H/r) x (W/r) feature map.

    Out-of-image samples are mirrored about the image edge
    (``numpy.pad`` mode ``border``).
    """
    cfg = cfg if isinstance(cfg, OpeConfig) else OpeConfig(cfg)
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[..., None]
    if isinstance(r, bool) or int(r) != r or r < 1:
        raise ValueError(f"downscale factor must be a positive integer, got {r}")
    r = int(r)
    H, W, _ = img.shape
    if H % r or W % r:
        raise ValueError(f"image size {H}x{W} is not divisible by r={r}")

    before, after = r // 2, r - r // 2
    padded = np.pad(img, ((before, after), (before, after), (0, 0)), mode=border)
    # (h, w, C, 2r, 2r)
    windows = sliding_window_view(padded, (2 * r, 2 * r), axis=(0, 1))[::r, ::r]
    g = gamma(window_offsets(r), cfg)  # (2r, A)
    t = windows @ g  # contract columns -> (h, w, C, 2r, A)
    z = np.einsum("hwcaj,ai->hwcij", t, g) * (0.25 / r**2)
    h, w, c = z.shape[:3]
    return FeatureMap(z.reshape(h, w, c, cfg.dim), cfg)


def encode_pixels(img, n: int = 0) -> FeatureMap:
    """One latent per pixel for standalone upsampling of a low-res image.

    With one sample per cell only the constant basis is recoverable, so the
    latent of each cell is its pixel value and the effective max frequency is
    0.  A 2x2 window cannot be centered on a pixel and would blur and shift
    the image, so the pixel itself is used.
    """
    if n > 0:
        log.warning("max frequency %d needs %d samples per axis but one LR pixel gives 1; using n=0", n, 2 * n + 1)
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[..., None]
    return FeatureMap(img[..., None], OpeConfig(0))
