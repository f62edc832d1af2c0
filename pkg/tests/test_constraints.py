import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mms_surface.constraints import (
    PointConstraint,
    constraint_contributions,
    default_cutoff,
    kernel_weight,
    read_constraints,
    spread_weights,
)
from mms_surface.mesh import MeshSpec, build_mesh
from mms_surface.surfaces import surface


def test_kernel_reference_values():
    assert kernel_weight(0.0, 50.0, 2.0, 3.0) == 1.0
    assert kernel_weight(2.0 * 0.7, 0.7, 2.0, 3.0, cutoff=float("inf")) == pytest.approx(0.5)
    assert kernel_weight(default_cutoff(2.0, 3.0) * 1.001, 50.0, 2.0, 3.0) == 0.0
    assert kernel_weight(0.3, float("inf"), 2.0, 3.0) == 1.0
    with pytest.raises(ValueError):
        kernel_weight(-1.0, 1.0, 1.0, 1.0)


@given(st.floats(0.01, 100), st.lists(st.floats(0, 5), min_size=2, max_size=20))
def test_kernel_monotone_in_distance(zeta, ds):
    d = np.sort(ds)
    a = kernel_weight(d, zeta, 1.0, 2.0, cutoff=float("inf"))
    assert np.all(np.diff(a) <= 1e-15)
    assert np.all((a > 0) & (a <= 1))


@given(st.floats(0.01, 100), st.floats(0, 0.2))
def test_kernel_continuous_in_zeta(zeta, d):
    a = kernel_weight(d, zeta, 1.0, 1.0)
    b = kernel_weight(d, zeta * (1 + 1e-6), 1.0, 1.0)
    assert abs(a - b) <= 1e-5


def test_spread_weights():
    m = build_mesh(MeshSpec(21, 21))
    attach = m.eid(10, 10)
    sw = spread_weights(m, attach, None, None)
    assert list(sw.elements) == [attach] and list(sw.weights) == [1.0]
    sw = spread_weights(m, attach, 50.0, None)
    assert sw.elements[0] == attach and sw.weights[0] == 1.0
    d = np.hypot(*(m.element_centers[sw.elements] - m.element_centers[attach]).T)
    assert d.max() <= 0.2
    # every element within the cutoff is included
    all_d = np.hypot(*(m.element_centers - m.element_centers[attach]).T)
    assert len(sw.elements) == np.count_nonzero(all_d <= 0.2)
    # zero cutoff also keeps the reaction in one element
    assert len(spread_weights(m, attach, 50.0, 0.0).elements) == 1


def test_constraint_validation_and_conflicts():
    with pytest.raises(ValueError):
        PointConstraint((0, 0), 1.0, zeta=0.0)
    with pytest.raises(ValueError):
        PointConstraint((0, 0), 1.0, cutoff=-1.0)
    m = build_mesh(MeshSpec(4, 4))
    with pytest.raises(ValueError, match="same element"):
        constraint_contributions(m, [PointConstraint((0.1, 0.1), 1), PointConstraint((0.2, 0.2), 2)])
    with pytest.raises(ValueError, match="outside"):
        constraint_contributions(m, [PointConstraint((1.5, 0.1), 1)])


def test_read_constraints(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("x,y,target\n0.0, 0.0, 1.0\n# note\n\n")
    (pc,) = read_constraints(p, zeta=50.0)
    assert pc == PointConstraint((0.0, 0.0), 1.0, 50.0, None)
    p.write_text("0.5, 0.25\n")
    (pc,) = read_constraints(p, surface=surface("cosine_product"))
    assert pc.target == pytest.approx(np.cos(0.5) * np.cos(0.25))
    with pytest.raises(ValueError, match=":1:"):
        read_constraints(p)
    p.write_text("0.5, abc, 1\n")
    with pytest.raises(ValueError, match=":1:"):
        read_constraints(p)
