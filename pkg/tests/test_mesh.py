import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mms_surface.element import Axis
from mms_surface.mesh import BoundaryScaling, MeshSpec, Side, build_mesh
from mms_surface.surfaces import FIVE_POINTS

sizes = st.integers(1, 12)


def test_three_by_two_counts():
    m = build_mesh(MeshSpec(3, 2))
    assert m.n_elements == 6
    assert len(m.interior_edges()) == 7
    assert len(m.v_edges) == 4 and len(m.h_edges) == 3
    assert len(m.boundary_sides) == 10


@given(sizes, sizes)
def test_edge_and_side_budget(nx, ny):
    m = build_mesh(MeshSpec(nx, ny))
    # every element has four sides: each is either interior (shared) or on the boundary
    assert 2 * len(m.interior_edges()) + len(m.boundary_sides) == 4 * m.n_elements


@given(sizes, sizes, st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 10), st.floats(0.1, 10))
def test_elements_tile_domain(nx, ny, x0, y0, lx, ly):
    m = build_mesh(MeshSpec(nx, ny, (x0, x0 + lx, y0, y0 + ly)))
    assert m.x_edges[0] == x0 and m.x_edges[-1] == x0 + lx
    assert m.y_edges[-1] == y0 + ly
    assert np.all(np.diff(m.x_edges) > 0) and np.all(np.diff(m.y_edges) > 0)
    assert np.sum(m.element_a * m.element_b) == pytest.approx(lx * ly, rel=1e-12)


@given(st.integers(8, 60), st.integers(1, 4), st.floats(0.05, 1.0))
def test_scaling_is_symmetric_and_tiles(n, rows, factor):
    m = build_mesh(MeshSpec(n, n, scaling=BoundaryScaling(rows, factor)))
    w = m.widths
    np.testing.assert_allclose(w, w[::-1], rtol=1e-12)
    assert w.sum() == pytest.approx(1.0, rel=1e-12)
    h = w[0] / factor
    np.testing.assert_allclose(w[:rows], BoundaryScaling(rows, factor).relative_widths() * h, rtol=1e-12)
    assert np.all(w <= h * (1 + 1e-12))
    assert np.all(np.diff(w[: rows + 1]) >= -1e-15)


def test_scaling_rows_must_fit():
    with pytest.raises(ValueError):
        build_mesh(MeshSpec(5, 5, scaling=BoundaryScaling(3, 0.5)))
    with pytest.raises(ValueError):
        BoundaryScaling(4, 0.0)


def test_quarter_points_on_lines_with_scaling():
    m = build_mesh(MeshSpec(251, 251, scaling=BoundaryScaling(4, 0.4)))
    for t in (0.25, 0.5, 0.75):
        assert m.nearest_line(Axis.X, t).coordinate == pytest.approx(t, abs=1e-12)


@pytest.mark.parametrize("bad", [(0, 1), (1, 0)])
def test_invalid_spec(bad):
    with pytest.raises(ValueError):
        MeshSpec(*bad)
    with pytest.raises(ValueError):
        MeshSpec(2, 2, (0, 0, 0, 1))


def test_locate_ties_and_offsets():
    m = build_mesh(MeshSpec(4, 4))
    eid, off = m.locate_element((0.25, 0.6))
    # on the edge between columns 0 and 1 the lower index wins
    assert m.col_row(eid) == (0, 2)
    assert off == pytest.approx((0.125, -0.025))
    assert m.locate_element((1.0, 1.0))[0] == 15
    with pytest.raises(ValueError):
        m.locate_element((1.01, 0.5))


def test_five_points_sit_on_element_centers():
    m = build_mesh(MeshSpec(251, 251, (-np.pi / 2, np.pi / 2, -np.pi / 2, np.pi / 2)))
    for p in FIVE_POINTS:
        _, off = m.locate_element(p)
        assert max(abs(off[0]), abs(off[1])) < 1e-12


@given(sizes, sizes)
def test_skeleton_lines_cover_each_element_twice(nx, ny):
    m = build_mesh(MeshSpec(nx, ny))
    lines = m.skeleton_lines()
    assert len(lines) == nx + ny
    seen = np.zeros(m.n_elements, int)
    for ln in lines:
        seen[list(ln.elements)] += 1
    assert np.all(seen == 2)


def test_skeleton_line_order_and_coordinates():
    m = build_mesh(MeshSpec(3, 2, (0, 3, 0, 1)))
    ln = m.skeleton_line(Axis.Y, 1)
    assert ln.elements == (1, 4) and ln.coordinate == pytest.approx(1.5)
    assert m.skeleton_line(Axis.X, 1).elements == (3, 4, 5)
    with pytest.raises(IndexError):
        m.skeleton_line(Axis.X, 2)


def test_boundary_elements_ordered_by_arclength():
    m = build_mesh(MeshSpec(3, 2))
    assert list(m.boundary_elements(Side.LEFT)) == [0, 3]
    assert list(m.boundary_elements(Side.RIGHT)) == [2, 5]
    assert list(m.boundary_elements(Side.TOP)) == [3, 4, 5]
    assert m.side_midpoint(5, Side.RIGHT) == pytest.approx((1.0, 0.75))


def test_geometry_groups_partition_elements():
    m = build_mesh(MeshSpec(12, 9, scaling=BoundaryScaling(2, 0.5)))
    ids = np.sort(np.concatenate(list(m.geometry_groups().values())))
    np.testing.assert_array_equal(ids, np.arange(m.n_elements))
    assert "boundary scaling" in m.summary()
