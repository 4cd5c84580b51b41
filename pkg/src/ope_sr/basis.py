"""Orthogonal position encoding (OPE) basis.

The one-variable encoding is

    gamma(t) = [1, sqrt2 cos(pi t), sqrt2 sin(pi t), ..., sqrt2 cos(n pi t), sqrt2 sin(n pi t)]

and the 2D encoding is the row-major flattening of the outer product
gamma(x)^T gamma(y), so entry (i, j) sits at ``i * (2n + 1) + j``.  Under the
inner product <g, h> = 1/4 * integral over [-1, 1]^2 of g h, these products
form an orthonormal family.

Axis index 0 is the constant, odd index 2k-1 is sqrt2 cos(k pi t) and even
index 2k is sqrt2 sin(k pi t).  All indexing is 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class OpeConfig:
    """Max frequency ``n`` and the sizes derived from it."""

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise TypeError(f"max frequency must be an integer, got {self.n!r}")
        if self.n < 0:
            raise ValueError(f"max frequency must be >= 0, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def axis_dim(self) -> int:
        return 2 * self.n + 1

    @property
    def dim(self) -> int:
        return self.axis_dim ** 2


@dataclass(frozen=True)
class BasisIndex:
    """Position (i, j) of a basis function e_{i,j}; i runs along x, j along y."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise ValueError(f"basis indices must be non-negative, got ({self.i}, {self.j})")

    def flat(self, cfg: OpeConfig) -> int:
        if self.i >= cfg.axis_dim or self.j >= cfg.axis_dim:
            raise ValueError(f"index ({self.i}, {self.j}) out of range for n={cfg.n}")
        return self.i * cfg.axis_dim + self.j

    @classmethod
    def from_flat(cls, flat: int, cfg: OpeConfig) -> "BasisIndex":
        if not 0 <= flat < cfg.dim:
            raise ValueError(f"flat index {flat} out of range for n={cfg.n}")
        return cls(*divmod(flat, cfg.axis_dim))


def _as_config(cfg) -> OpeConfig:
    return cfg if isinstance(cfg, OpeConfig) else OpeConfig(cfg)


def axis_kind(k: int) -> str:
    """'const', 'cos' or 'sin' for axis index ``k``."""
    if k == 0:
        return "const"
    return "cos" if k % 2 == 1 else "sin"


def axis_frequency(k: int) -> int:
    return (k + 1) // 2


def _axis_function(k: int, t):
    if k == 0:
        return np.ones_like(np.asarray(t, dtype=np.float64))
    freq = axis_frequency(k)
    if k % 2 == 1:
        return SQRT2 * np.cos(freq * np.pi * t)
    return SQRT2 * np.sin(freq * np.pi * t)


def gamma(t, cfg) -> np.ndarray:
    """One-variable encoding.

    ``t`` may be a scalar or an array; the encoding is appended as a new
    trailing axis of length 2n+1.
    """
    cfg = _as_config(cfg)
    t = np.asarray(t, dtype=np.float64)
    out = np.empty(t.shape + (cfg.axis_dim,), dtype=np.float64)
    out[..., 0] = 1.0
    for k in range(1, cfg.n + 1):
        angle = k * np.pi * t
        out[..., 2 * k - 1] = SQRT2 * np.cos(angle)
        out[..., 2 * k] = SQRT2 * np.sin(angle)
    return out


def ope(x, y, cfg) -> np.ndarray:
    """2D encoding flat(gamma(x)^T gamma(y)), broadcasting over x and y."""
    cfg = _as_config(cfg)
    gx = gamma(x, cfg)
    gy = gamma(y, cfg)
    outer = gx[..., :, None] * gy[..., None, :]
    return outer.reshape(outer.shape[:-2] + (cfg.dim,))


def basis_eval(idx: BasisIndex, x, y):
    """Value of the single basis function e_{i,j} at (x, y)."""
    if not isinstance(idx, BasisIndex):
        idx = BasisIndex(*idx)
    return _axis_function(idx.i, np.asarray(x, dtype=np.float64)) * _axis_function(
        idx.j, np.asarray(y, dtype=np.float64)
    )


def basis_function(idx) -> Callable:
    """Return e_{i,j} as a callable of (x, y)."""
    if not isinstance(idx, BasisIndex):
        idx = BasisIndex(*idx)
    return lambda x, y: basis_eval(idx, x, y)


def midpoints(m: int) -> np.ndarray:
    """Centers of ``m`` equal cells partitioning [-1, 1]."""
    if m < 1:
        raise ValueError(f"need at least one quadrature point, got m={m}")
    return -1.0 + (2.0 * np.arange(m) + 1.0) / m


def inner_product(fa: Callable, fb: Callable, m: int) -> float:
    """Composite-midpoint estimate of 1/4 * integral of fa*fb over [-1, 1]^2.

    Each of the m^2 cell centers carries weight (2/m)^2.
    """
    t = midpoints(m)
    xx, yy = np.meshgrid(t, t, indexing="ij")
    vals = np.asarray(fa(xx, yy), dtype=np.float64) * np.asarray(fb(xx, yy), dtype=np.float64)
    return float(0.25 * (2.0 / m) ** 2 * np.sum(vals))


def gram_matrix(cfg, m: int) -> np.ndarray:
    """Gram matrix of all (2n+1)^2 basis functions under midpoint quadrature.

    Separable: the 2D Gram matrix is the Kronecker product of the 1D Gram
    matrices, each computed with weight 1/2 * 2/m per midpoint.
    """
    cfg = _as_config(cfg)
    g = gamma(midpoints(m), cfg)
    g1 = (g.T @ g) / m
    return np.kron(g1, g1)


def gram_matrix_direct(cfg, m: int) -> np.ndarray:
    """Same Gram matrix, built pair by pair from full 2D evaluations."""
    cfg = _as_config(cfg)
    t = midpoints(m)
    xx, yy = np.meshgrid(t, t, indexing="ij")
    p = ope(xx, yy, cfg).reshape(-1, cfg.dim)
    return 0.25 * (2.0 / m) ** 2 * (p.T @ p)
