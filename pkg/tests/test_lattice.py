import numpy as np
import pytest
from hypothesis import given, strategies as st

from percolab import lattice

DOMAINS = [lattice.box(7), lattice.rhombus(4, 6), lattice.disk(5), lattice.annulus(2, 6),
           lattice.half_plane_annulus(2, 5), lattice.square_box(5), lattice.square_annulus(1, 4)]


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: d.signature())
def test_neighbour_relation_is_symmetric(dom):
    for x, row in enumerate(dom.nbr):
        for y in row:
            if y >= 0:
                assert x in dom.nbr[y]


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: d.signature())
def test_keys_unique_and_arcs_nonempty(dom):
    assert np.unique(dom.keys).size == dom.n_cells
    for name in lattice.arc_labels(dom):
        assert dom.arc(name).any(), name
        assert len(lattice.boundary_arc(dom, name)) > 0


@given(st.integers(1, 5), st.integers(1, 6))
def test_annuli_nest(r, extra):
    R = r + extra
    inner = set(map(int, lattice.annulus(r, R).keys))
    outer = set(map(int, lattice.annulus(r, R + 3).keys))
    assert inner <= outer


@given(st.integers(1, 8))
def test_square_box_bond_count(m):
    assert lattice.square_box(m).n_cells == m * m + (m - 1) * (m - 1)


def test_half_plane_cells_are_upper():
    dom = lattice.half_plane_annulus(3, 8)
    assert (dom.cells[:, 1] >= 0).all()
    assert set(lattice.arc_labels(dom)) >= {"inner", "outer", "left", "right"}


def test_annulus_hole_removed():
    full, ring = lattice.disk(6), lattice.annulus(3, 6)
    assert ring.n_cells < full.n_cells
    pos = lattice.cell_positions(ring)
    assert (np.hypot(pos[:, 0], pos[:, 1]) > 2.0).all()


@pytest.mark.parametrize("bad", [lambda: lattice.annulus(5, 5), lambda: lattice.annulus(0, 4),
                                 lambda: lattice.box(0), lambda: lattice.rhombus(0, 2),
                                 lambda: lattice.make_domain("disk", 3, lattice=lattice.SQUARE)])
def test_invalid_domains_raise(bad):
    with pytest.raises(ValueError):
        bad()


def test_unknown_arc_names_the_choices():
    with pytest.raises(ValueError, match="inner"):
        lattice.annulus(1, 3).arc("left")


def test_boundary_edges_touch_exterior():
    dom = lattice.box(6)
    edges = lattice.boundary_edges(dom)
    assert edges.shape[1] == 4
    assert (dom.grid.code[edges[:, 1]] >= 0).all()
    assert (dom.grid.code[edges[:, 2]] < 0).all()
    assert set(lattice.boundary_edges(dom, "left")[:, 3]) <= set(edges[:, 3])


def test_enumeration_is_stable():
    a = lattice.enumerate_cells(lattice.box(5))
    b = lattice.enumerate_cells(lattice.box(5))
    assert a == b and len(a) == lattice.box(5).n_cells
