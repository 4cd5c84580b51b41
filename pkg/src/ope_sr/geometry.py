"""Coordinate bookkeeping between pixel grids, latent grids and relative frames.

Every grid partitions [-1, 1]^2 into equal cells.  ``x`` runs along rows
(height) and ``y`` along columns (width).  Functions accept scalars or numpy
arrays; the array forms are what the renderer uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Member order of a patch-ensemble neighborhood: (row offset, col offset).
MEMBERS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class GridSpec:
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid needs at least one cell per axis, got {self.rows}x{self.cols}")


@dataclass(frozen=True)
class EnsembleNeighborhood:
    """Four latent cells surrounding a query point.

    ``indices`` are clamped (row, col) fetch indices, ``virtual_centers`` are
    the unclamped centers used for geometry, ``rel_coords`` are the query in
    each member's extended relative frame and ``weights`` the normalized
    diagonal-rectangle areas.  All tuples follow the ``MEMBERS`` order.
    """

    indices: tuple
    virtual_centers: tuple
    rel_coords: tuple
    weights: tuple


def cell_center(k, m: int):
    """Center of cell ``k`` out of ``m`` equal cells on [-1, 1]."""
    if np.any(np.asarray(k) < 0) or np.any(np.asarray(k) >= m):
        raise IndexError(f"cell index {k} out of range for {m} cells")
    return virtual_center(k, m)


def virtual_center(k, m):
    # No range check: neighborhoods extrapolate to k = -1 and k = m.
    return -1.0 + (2.0 * k + 1.0) / m


def cell_centers(m: int) -> np.ndarray:
    return virtual_center(np.arange(m, dtype=np.float64), m)


def relative_coords_ext(q, center, grid: GridSpec):
    """Query in the extended (halved) relative frame of a latent cell."""
    return ((q[0] - center[0]) * grid.rows / 2.0, (q[1] - center[1]) * grid.cols / 2.0)


def relative_coords_base(q, center, grid: GridSpec):
    """Query in the plain relative frame of a latent cell (no halving)."""
    return ((q[0] - center[0]) * grid.rows, (q[1] - center[1]) * grid.cols)


def check_domain(*coords):
    for c in coords:
        c = np.asarray(c)
        if not np.all(np.isfinite(c)) or np.any(c < -1.0) or np.any(c > 1.0):
            raise ValueError("query coordinates must lie in [-1, 1]")


def axis_bracket(q, m: int):
    """Per-axis part of a neighborhood.

    Returns ``(lo, c_lo, c_hi, w_lo, w_hi)``: the lower unclamped cell index,
    the two bracketing virtual centers and the unnormalized 1D weights.  Each
    1D weight is the distance to the *opposite* center, so the product of two
    of them is the diagonal rectangle area.
    """
    q = np.asarray(q, dtype=np.float64)
    lo = np.floor(((q + 1.0) * m - 1.0) / 2.0).astype(np.int64)
    c_lo = virtual_center(lo, m)
    c_hi = virtual_center(lo + 1, m)
    return lo, c_lo, c_hi, np.abs(c_hi - q), np.abs(q - c_lo)


def nearest_cell(q, m: int):
    """Index of the cell containing ``q`` (upper edge belongs to the last cell)."""
    q = np.asarray(q, dtype=np.float64)
    return np.clip(np.floor((q + 1.0) * m / 2.0).astype(np.int64), 0, m - 1)


def _merge(lo, w_lo, w_hi, m):
    # Both brackets clamp to one cell: give it the whole axis weight exactly.
    same = (lo < 0) | (lo + 1 > m - 1)
    return np.where(same, 1.0, w_lo), np.where(same, 0.0, w_hi)


def neighborhood_arrays(qx, qy, grid: GridSpec, merge_clamped: bool = False):
    """Vectorized neighborhood for arrays of queries.

    Returns ``rows, cols, cx, cy, weights``, each with a trailing axis of
    length 4 in ``MEMBERS`` order.  ``rows``/``cols`` are clamped fetch
    indices and ``cx``/``cy`` the virtual centers.  Weights come from the
    virtual centers; relative coordinates must use the fetched cells' own
    centers (see :func:`fetched_centers`).

    With ``merge_clamped`` the two weights of an axis whose brackets fetch
    the same cell are pooled into one member as (1, 0).  Those members
    render identically, so the blend is unchanged except that a lone code
    is reproduced without rounding from weights summing to 1 - eps.
    """
    lo_x, cx_lo, cx_hi, wx_lo, wx_hi = axis_bracket(qx, grid.rows)
    lo_y, cy_lo, cy_hi, wy_lo, wy_hi = axis_bracket(qy, grid.cols)
    if merge_clamped:
        wx_lo, wx_hi = _merge(lo_x, wx_lo, wx_hi, grid.rows)
        wy_lo, wy_hi = _merge(lo_y, wy_lo, wy_hi, grid.cols)
    rows = np.stack([lo_x, lo_x, lo_x + 1, lo_x + 1], axis=-1)
    cols = np.stack([lo_y, lo_y + 1, lo_y, lo_y + 1], axis=-1)
    cx = np.stack([cx_lo, cx_lo, cx_hi, cx_hi], axis=-1)
    cy = np.stack([cy_lo, cy_hi, cy_lo, cy_hi], axis=-1)
    s = np.stack([wx_lo * wy_lo, wx_lo * wy_hi, wx_hi * wy_lo, wx_hi * wy_hi], axis=-1)
    total = ((s[..., 0] + s[..., 1]) + s[..., 2]) + s[..., 3]
    weights = s / total[..., None]
    np.clip(rows, 0, grid.rows - 1, out=rows)
    np.clip(cols, 0, grid.cols - 1, out=cols)
    return rows, cols, cx, cy, weights


def fetched_centers(rows, cols, grid: GridSpec):
    """Centers of the (clamped) fetched cells.

    At the border a clamped member is evaluated in its own frame, so an
    edge code is never sampled one cell away from where it was fitted.
    """
    return virtual_center(rows, grid.rows), virtual_center(cols, grid.cols)


def neighborhood(q, grid: GridSpec) -> EnsembleNeighborhood:
    """Patch-ensemble neighborhood of a single query point."""
    qx, qy = float(q[0]), float(q[1])
    check_domain(qx, qy)
    rows, cols, cx, cy, w = neighborhood_arrays(qx, qy, grid)
    centers = tuple((float(a), float(b)) for a, b in zip(cx, cy))
    fx, fy = fetched_centers(rows, cols, grid)
    rel = tuple(relative_coords_ext((qx, qy), c, grid) for c in zip(fx, fy))
    return EnsembleNeighborhood(
        indices=tuple((int(r), int(c)) for r, c in zip(rows, cols)),
        virtual_centers=centers,
        rel_coords=tuple((float(a), float(b)) for a, b in rel),
        weights=tuple(float(v) for v in w),
    )
