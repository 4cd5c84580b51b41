import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ope_sr.geometry import (
    GridSpec,
    cell_center,
    neighborhood,
    neighborhood_arrays,
    relative_coords_base,
    relative_coords_ext,
)

coords = st.floats(-1.0, 1.0, allow_nan=False)
sizes = st.integers(1, 9)


def test_cell_center_examples():
    assert cell_center(0, 1) == 0.0
    assert cell_center(0, 2) == -0.5
    assert cell_center(1, 2) == 0.5
    assert cell_center(2, 4) == 0.25
    with pytest.raises(IndexError):
        cell_center(4, 4)
    with pytest.raises(IndexError):
        cell_center(-1, 4)


def test_grid_rejects_empty():
    with pytest.raises(ValueError):
        GridSpec(0, 3)


def test_relative_coords_examples():
    g2, g4 = GridSpec(2, 2), GridSpec(4, 4)
    assert relative_coords_ext((-0.5, -0.5), (-0.5, -0.5), g2) == (0.0, 0.0)
    assert relative_coords_ext((0.0, 0.0), (-0.5, -0.5), g2) == (0.5, 0.5)
    assert relative_coords_ext((0.25, -0.25), (0.25, 0.25), g4) == (0.0, -1.0)
    assert relative_coords_base((0.0, 0.0), (-0.5, -0.5), g2) == (1.0, 1.0)
    assert relative_coords_base((0.3, 0.1), (0.3, 0.1), g4) == (0.0, 0.0)
    assert relative_coords_base((0.25, -0.25), (0.25, 0.25), g4) == (0.0, -2.0)


def test_query_on_center_has_unit_weight():
    grid = GridSpec(4, 6)
    nb = neighborhood((cell_center(1, 4), cell_center(3, 6)), grid)
    w = np.array(nb.weights)
    k = int(np.argmax(w))
    assert w[k] == pytest.approx(1.0, abs=1e-12)
    assert np.delete(w, k) == pytest.approx(0.0, abs=1e-12)
    assert nb.indices[k] == (1, 3)
    assert nb.rel_coords[k] == pytest.approx((0.0, 0.0), abs=1e-12)


def test_midpoint_of_four_centers():
    grid = GridSpec(4, 4)
    nb = neighborhood((0.0, 0.0), grid)
    assert nb.weights == pytest.approx((0.25,) * 4)
    assert sorted(nb.indices) == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_corner_clamps_to_single_cell():
    # Hand-derived: per axis the bracketing virtual centers are -1.5 and -0.5,
    # so the 1D weights are |-0.5 + 0.9| = 0.4 (virtual cell) and 0.6 (real
    # cell); the rectangle areas are 0.16, 0.24, 0.24, 0.36 with total 1.
    nb = neighborhood((-0.9, -0.9), GridSpec(2, 2))
    assert nb.indices == ((0, 0),) * 4
    assert nb.virtual_centers == ((-1.5, -1.5), (-1.5, -0.5), (-0.5, -1.5), (-0.5, -0.5))
    assert nb.weights == pytest.approx((0.16, 0.24, 0.24, 0.36), abs=1e-12)
    assert sum(nb.weights) == pytest.approx(1.0, abs=1e-12)
    # every clamped member is evaluated in the frame of the cell actually fetched
    assert all(rc == pytest.approx((-0.4, -0.4)) for rc in nb.rel_coords)  # (q - c) * h / 2 with c = -0.5


def test_outside_domain_rejected():
    with pytest.raises(ValueError):
        neighborhood((1.01, 0.0), GridSpec(2, 2))


@given(coords, coords, sizes, sizes)
def test_partition_of_unity_and_rel_range(qx, qy, rows, cols):
    nb = neighborhood((qx, qy), GridSpec(rows, cols))
    assert abs(sum(nb.weights) - 1.0) < 1e-12
    assert min(nb.weights) >= 0.0
    for a, b in nb.rel_coords:
        assert -1.0 - 1e-12 <= a <= 1.0 + 1e-12
        assert -1.0 - 1e-12 <= b <= 1.0 + 1e-12
    for r, c in nb.indices:
        assert 0 <= r < rows and 0 <= c < cols


@pytest.mark.parametrize("m", [2, 3, 5])
def test_weights_continuous_across_boundaries(m):
    grid = GridSpec(m, m)
    q = np.linspace(-1.0, 1.0, 20001)
    rows, cols, _, _, w = neighborhood_arrays(q, np.full_like(q, 0.123), grid)
    # total weight per fetched cell, as a function of the query position
    per_cell = np.zeros((q.size, m * m))
    for t in range(4):
        np.add.at(per_cell, (np.arange(q.size), rows[:, t] * m + cols[:, t]), w[:, t])
    jumps = np.abs(np.diff(per_cell, axis=0)).max()
    step = q[1] - q[0]
    # Lipschitz bound: weights move by at most step * (m / 2) per sample
    assert jumps <= step * m / 2 + 1e-9


@given(coords, coords, sizes, sizes)
def test_mirror_symmetry(qx, qy, rows, cols):
    grid = GridSpec(rows, cols)
    a = neighborhood((qx, qy), grid)
    b = neighborhood((-qx, qy), grid)
    wa = {}
    for (r, c), w in zip(a.indices, a.weights):
        wa[(rows - 1 - r, c)] = wa.get((rows - 1 - r, c), 0.0) + w
    wb = {}
    for idx, w in zip(b.indices, b.weights):
        wb[idx] = wb.get(idx, 0.0) + w
    keys = set(wa) | set(wb)
    for k in keys:
        assert abs(wa.get(k, 0.0) - wb.get(k, 0.0)) < 1e-9


@given(coords, coords, sizes, sizes)
def test_merged_weights_preserve_per_cell_totals(qx, qy, rows, cols):
    grid = GridSpec(rows, cols)
    r0, c0, _, _, w0 = neighborhood_arrays(qx, qy, grid)
    r1, c1, _, _, w1 = neighborhood_arrays(qx, qy, grid, merge_clamped=True)
    a, b = {}, {}
    for r, c, w in zip(r0, c0, w0):
        a[(r, c)] = a.get((r, c), 0.0) + w
    for r, c, w in zip(r1, c1, w1):
        b[(r, c)] = b.get((r, c), 0.0) + w
    for k in set(a) | set(b):
        assert abs(a.get(k, 0.0) - b.get(k, 0.0)) < 1e-12
