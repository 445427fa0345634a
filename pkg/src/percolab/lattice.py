"""Domains on the triangular site lattice and the square bond lattice.

Triangular sites use axial coordinates ``(u, v)`` embedded at
``(u + v/2, sqrt(3) v / 2)``.  The square bond lattice is stored through its
medial tiling by half-size squares: a square centred at ``(i/2, j/2)`` is a
vertex (``i, j`` even, always white), a face (both odd, always black) or a bond
(mixed parity, random).  Edge-adjacency of these squares reproduces primal
connectivity for white and dual connectivity for black, so one cluster code
serves both lattices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _hex
from ._hex import BOTTOM, FAR, INNER, LEFT, OUTER, RIGHT, TOP

TRIANGULAR = "triangular"
SQUARE = "square"

_TAG_TRI = np.uint64(1) << np.uint64(60)
_TAG_SQ = np.uint64(2) << np.uint64(60)
_OFF = 1 << 20


class Site(NamedTuple):
    u: int
    v: int

    def position(self) -> tuple[float, float]:
        return (self.u + self.v / 2.0, np.sqrt(3.0) * self.v / 2.0)


class Bond(NamedTuple):
    endpoint_a: tuple[int, int]
    endpoint_b: tuple[int, int]


@dataclass(frozen=True)
class HexGrid:
    """Padded axial window holding cell indices (>= 0) and exterior labels (< 0)."""
    u0: int
    v0: int
    W: int
    rows: int
    code: np.ndarray = field(repr=False)

    def gid(self, u, v):
        return (np.asarray(v) - self.v0) * self.W + (np.asarray(u) - self.u0)

    def uv(self, g):
        g = np.asarray(g)
        return g % self.W + self.u0, g // self.W + self.v0


@dataclass(frozen=True, eq=False)
class Domain:
    kind: str
    lattice: str
    params: tuple
    cells: np.ndarray = field(repr=False)
    keys: np.ndarray = field(repr=False)
    nbr: np.ndarray = field(repr=False)
    fixed: np.ndarray = field(repr=False)
    arcs: dict = field(repr=False)
    grid: HexGrid | None = field(default=None, repr=False)
    coords: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_cells(self) -> int:
        return int(self.cells.shape[0])

    @property
    def n_nodes(self) -> int:
        return int(self.nbr.shape[0])

    def node_colors(self, bits: np.ndarray) -> np.ndarray:
        if self.fixed.size == 0:
            return np.asarray(bits, dtype=np.int8)
        return np.concatenate([np.asarray(bits, dtype=np.int8), self.fixed])

    def arc(self, which: str) -> np.ndarray:
        if which not in self.arcs:
            raise ValueError(f"domain {self.kind} has no boundary arc {which!r}; "
                             f"expected one of {sorted(self.arcs)}")
        return self.arcs[which]

    def signature(self) -> str:
        return f"{self.lattice}:{self.kind}{self.params}"


def site_keys(uv: np.ndarray) -> np.ndarray:
    u = (uv[:, 0] + _OFF).astype(np.uint64)
    v = (uv[:, 1] + _OFF).astype(np.uint64)
    return _TAG_TRI | (u << np.uint64(21)) | v


def medial_keys(ij: np.ndarray) -> np.ndarray:
    i = (ij[:, 0] + _OFF).astype(np.uint64)
    j = (ij[:, 1] + _OFF).astype(np.uint64)
    return _TAG_SQ | (i << np.uint64(22)) | j


# ----------------------------------------------------------------- triangular

def _tri_domain(kind, params, uv, labeller, arcs_fn) -> Domain:
    order = np.lexsort((uv[:, 0], uv[:, 1]))
    uv = np.ascontiguousarray(uv[order])
    if uv.shape[0] == 0:
        raise ValueError(f"{kind}{params} contains no cells")
    pad = 3
    u0 = int(uv[:, 0].min()) - pad
    v0 = int(uv[:, 1].min()) - pad
    W = int(uv[:, 0].max()) - u0 + pad + 1
    rows = int(uv[:, 1].max()) - v0 + pad + 1
    code = np.full(W * rows, FAR, dtype=np.int32)
    g = (uv[:, 1] - v0) * W + (uv[:, 0] - u0)
    code[g] = np.arange(uv.shape[0], dtype=np.int32)
    # label every non-cell hexagon adjacent to the domain
    nb = uv[:, None, :] + _hex.NEIGHBOURS[None, :, :]
    gn = (nb[..., 1] - v0) * W + (nb[..., 0] - u0)
    ext = np.unique(gn[code[gn] < 0])
    eu, ev = ext % W + u0, ext // W + v0
    code[ext] = labeller(np.stack([eu, ev], axis=1))
    nbr = code[gn].astype(np.int32)
    nbr[nbr < 0] = -1
    grid = HexGrid(u0, v0, W, rows, code)
    dom = Domain(kind, TRIANGULAR, params, uv, site_keys(uv), nbr,
                 np.zeros(0, dtype=np.int8), {}, grid)
    dom.arcs.update(arcs_fn(dom, code[gn]))
    return dom


def _arcs_by_label(labels: dict[str, int]):
    def fn(dom, ncode):
        return {name: (ncode == lab).any(axis=1) for name, lab in labels.items()}
    return fn


def _row_labeller(uv_cells: np.ndarray):
    """Left/right/top/bottom labels for a region made of contiguous rows."""
    vmin, vmax = uv_cells[:, 1].min(), uv_cells[:, 1].max()
    span = {}
    for u, v in uv_cells:
        lo, hi = span.get(v, (u, u))
        span[v] = (min(lo, u), max(hi, u))

    def lab(uv):
        out = np.empty(uv.shape[0], dtype=np.int32)
        for n, (u, v) in enumerate(uv):
            if v > vmax:
                out[n] = TOP
            elif v < vmin:
                out[n] = BOTTOM
            elif u < span[v][0]:
                out[n] = LEFT
            else:
                out[n] = RIGHT
        return out
    return lab


def _box_sites(R: int) -> np.ndarray:
    v = np.arange(0, 2 * R + 2)
    u = np.arange(-R - 3, R + 3)
    uu, vv = np.meshgrid(u, v)
    uv = np.stack([uu.ravel(), vv.ravel()], axis=1)
    c = _hex.hex_corner_xh(uv)
    X, H = c[..., 0], c[..., 1]
    ok = ((X >= 0) & (X <= 6 * R) & (H >= 0) & (H * H <= 12 * R * R)).all(axis=1)
    return uv[ok]


def _disk_sites(R: int) -> np.ndarray:
    m = 2 * R + 3
    u = np.arange(-m, m + 1)
    uu, vv = np.meshgrid(u, u)
    uv = np.stack([uu.ravel(), vv.ravel()], axis=1)
    # cheap prefilter on the centre distance before the exact test
    x = uv[:, 0] + uv[:, 1] / 2.0
    y = np.sqrt(3.0) * uv[:, 1] / 2.0
    uv = uv[x * x + y * y <= (R + 1.5) ** 2]
    return uv[_hex.hexes_meeting_disk(uv, 36 * R * R)]


def _disk_labeller(R: int):
    def lab(uv):
        inside = _hex.hexes_meeting_disk(uv, 36 * R * R)
        return np.where(inside, FAR, OUTER).astype(np.int32)
    return lab


def box(R: int, lattice: str = TRIANGULAR) -> Domain:
    """Box of side R.

    Triangular: the sites whose hexagons lie inside ``[0, R]^2``.
    Square: the self-dual ``(R+1) x R`` bond rectangle.
    """
    if lattice == SQUARE:
        return square_box(R)
    if R < 1:
        raise ValueError("box side R must be >= 1")
    uv = _box_sites(R)
    if uv.shape[0] == 0:
        raise ValueError(f"box side {R} admits no hexagon")
    return _tri_domain("box", (R,), uv, _row_labeller(uv),
                       _arcs_by_label({"left": LEFT, "right": RIGHT, "top": TOP, "bottom": BOTTOM}))


def rhombus(width: int, height: int) -> Domain:
    """Hex-board rhombus: ``0 <= u < width``, ``0 <= v < height``."""
    if width < 1 or height < 1:
        raise ValueError("rhombus sides must be >= 1")
    uu, vv = np.meshgrid(np.arange(width), np.arange(height))
    uv = np.stack([uu.ravel(), vv.ravel()], axis=1)
    return _tri_domain("rhombus", (width, height), uv, _row_labeller(uv),
                       _arcs_by_label({"left": LEFT, "right": RIGHT, "top": TOP, "bottom": BOTTOM}))


def disk(R: int) -> Domain:
    """All hexagons meeting the closed disk of radius R (no hole)."""
    if R < 1:
        raise ValueError("disk radius must be >= 1")
    uv = _disk_sites(R)
    return _tri_domain("disk", (R,), uv, _disk_labeller(R), _arcs_by_label({"outer": OUTER}))


def _check_radii(r, R):
    if not (r >= 1 and R >= 1):
        raise ValueError(f"radii must be positive, got r={r}, R={R}")
    if r >= R:
        raise ValueError(f"annulus needs r < R, got r={r}, R={R}")


def annulus(r: int, R: int, lattice: str = TRIANGULAR) -> Domain:
    """Hexagons meeting the closed R-disk minus those inside the open r-disk.

    The removed hole is the union of hexagons lying in the open r-disk.  The
    inner arc holds the cells bordering the hole; the outer arc holds the
    cells with a neighbour outside the R-disk region.
    """
    if lattice == SQUARE:
        return square_annulus(r, R)
    _check_radii(r, R)
    uv = _disk_sites(R)
    uv = uv[~_hex.hexes_inside_open_disk(uv, 36 * r * r)]
    return _tri_domain("annulus", (r, R), uv, _annulus_labeller(r, R), _annulus_arcs(r))


def half_plane_annulus(r: int, R: int) -> Domain:
    """Annulus cells with ``Im z >= 0``; the real axis splits into left/right sides."""
    _check_radii(r, R)
    uv = _disk_sites(R)
    uv = uv[~_hex.hexes_inside_open_disk(uv, 36 * r * r) & (uv[:, 1] >= 0)]
    base = _annulus_labeller(r, R)

    def lab(e):
        out = base(e)
        side = (out == FAR) & (e[:, 1] < 0)
        out[side] = np.where(e[side, 0] >= 1, RIGHT, LEFT)
        return out
    return _tri_domain("halfplane", (r, R), uv, lab, _annulus_arcs(r, sides=True))


def _annulus_labeller(r, R):
    def lab(e):
        out = np.full(e.shape[0], FAR, dtype=np.int32)
        out[~_hex.hexes_meeting_disk(e, 36 * R * R)] = OUTER
        out[_hex.hexes_inside_open_disk(e, 36 * r * r)] = INNER
        return out
    return lab


def _annulus_arcs(r, sides=False):
    def fn(dom, ncode):
        arcs = {"inner": (ncode == INNER).any(axis=1),
                "outer": (ncode == OUTER).any(axis=1)}
        if sides:
            arcs["left"] = (ncode == LEFT).any(axis=1)
            arcs["right"] = (ncode == RIGHT).any(axis=1)
        return arcs
    return fn


# --------------------------------------------------------------------- square

def _medial_domain(kind, params, ij: np.ndarray, arc_masks) -> Domain:
    par = (ij[:, 0] & 1) + (ij[:, 1] & 1)
    is_bond = par == 1
    bonds = ij[is_bond]
    fixed_ij = ij[~is_bond]
    order = np.lexsort((bonds[:, 0], bonds[:, 1]))
    bonds = bonds[order]
    forder = np.lexsort((fixed_ij[:, 0], fixed_ij[:, 1]))
    fixed_ij = fixed_ij[forder]
    nodes = np.concatenate([bonds, fixed_ij])
    fixed = np.where((fixed_ij[:, 0] & 1) == 0, 1, 0).astype(np.int8)
    lo = nodes.min(axis=0) - 1
    span = nodes.max(axis=0) - lo + 2
    lut = np.full(span[0] * span[1], -1, dtype=np.int64)
    lut[(nodes[:, 1] - lo[1]) * span[0] + nodes[:, 0] - lo[0]] = np.arange(nodes.shape[0])
    steps = np.array([(1, 0), (0, 1), (-1, 0), (0, -1)])
    nb = nodes[:, None, :] + steps[None]
    nbr = lut[(nb[..., 1] - lo[1]) * span[0] + nb[..., 0] - lo[0]].astype(np.int32)
    # bond endpoints in lattice units
    a = np.where(bonds % 2 == 1, (bonds - 1) // 2, bonds // 2)
    b = np.where(bonds % 2 == 1, (bonds + 1) // 2, bonds // 2)
    cells = np.concatenate([a, b], axis=1)
    arcs = {name: fn(nodes) for name, fn in arc_masks.items()}
    return Domain(kind, SQUARE, params, cells, medial_keys(bonds), nbr, fixed, arcs,
                  None, nodes)


def square_box(m: int) -> Domain:
    """Bonds of the ``(m+1) x m`` rectangle whose dual is a rotated copy of itself.

    Vertices ``0 <= x <= m``, ``0 <= y <= m-1``; every horizontal bond, and the
    vertical bonds with ``1 <= x <= m-1``.  Left-right primal crossings and
    top-bottom dual crossings are complementary, so the crossing probability is 1/2.
    """
    if m < 1:
        raise ValueError("square box size must be >= 1")
    ii, jj = np.meshgrid(np.arange(0, 2 * m + 1), np.arange(0, 2 * m - 1))
    ij = np.stack([ii.ravel(), jj.ravel()], axis=1)
    i, j = ij[:, 0], ij[:, 1]
    vert_bond = (i % 2 == 0) & (j % 2 == 1)
    keep = ~(vert_bond & ((i == 0) | (i == 2 * m)))
    ij = ij[keep]
    arcs = {"left": lambda n: n[:, 0] == 0, "right": lambda n: n[:, 0] == 2 * m,
            "bottom": lambda n: n[:, 1] == 0, "top": lambda n: n[:, 1] == 2 * m - 2}
    return _medial_domain("box", (m,), ij, arcs)


def square_annulus(r: int, R: int) -> Domain:
    """Square ring ``r <= |z|_inf <= R`` of the medial tiling (sup-norm radii)."""
    _check_radii(r, R)
    k = np.arange(-2 * R, 2 * R + 1)
    ii, jj = np.meshgrid(k, k)
    ij = np.stack([ii.ravel(), jj.ravel()], axis=1)
    nrm = np.abs(ij).max(axis=1)
    ij = ij[nrm >= 2 * r]
    arcs = {"inner": lambda n: np.abs(n).max(axis=1) == 2 * r,
            "outer": lambda n: np.abs(n).max(axis=1) == 2 * R}
    return _medial_domain("annulus", (r, R), ij, arcs)


# ----------------------------------------------------------------- operations

def make_domain(kind: str, *params: int, lattice: str = TRIANGULAR) -> Domain:
    kinds = {"box": box, "annulus": annulus}
    if kind in kinds:
        return kinds[kind](*params, lattice=lattice)
    if lattice != TRIANGULAR:
        raise ValueError(f"{kind} is only defined on the triangular lattice")
    return {"halfplane": half_plane_annulus, "rhombus": rhombus, "disk": disk}[kind](*params)


def enumerate_cells(domain: Domain) -> list:
    """Cells in index order (row-major in the lattice, stable across runs)."""
    if domain.lattice == TRIANGULAR:
        return [Site(int(u), int(v)) for u, v in domain.cells]
    return [Bond((int(a), int(b)), (int(c), int(d))) for a, b, c, d in domain.cells]


def arc_labels(domain: Domain) -> list[str]:
    return list(domain.arcs)


def boundary_arc(domain: Domain, which: str) -> list:
    """Random cells on a boundary arc.

    For the square lattice the arcs are stored on medial nodes; the bonds
    reported are those touching a node of the arc.
    """
    mask = domain.arc(which)
    if domain.lattice == TRIANGULAR:
        idx = np.flatnonzero(mask)
    else:
        nodes = np.flatnonzero(mask)
        touch = set(int(i) for i in nodes if i < domain.n_cells)
        for n in nodes:
            touch.update(int(x) for x in domain.nbr[n] if 0 <= x < domain.n_cells)
        idx = np.array(sorted(touch), dtype=np.int64)
    cells = enumerate_cells(domain)
    return [cells[i] for i in idx]


def boundary_edges(domain: Domain, which: str | None = None) -> np.ndarray:
    """Hex-lattice edges between a domain cell and an exterior hexagon.

    Returns an ``(m, 4)`` array ``(edge_id, cell_gid, ext_gid, label)``
    optionally restricted to one exterior label.
    """
    grid = _require_grid(domain)
    W = grid.W
    out = []
    names = {v: k for k, v in _hex.LABEL_NAMES.items()}
    want = names[which] if which is not None else None
    gcell = grid.gid(domain.cells[:, 0], domain.cells[:, 1])
    for g in gcell:
        for vid in _hex.hex_vertices(int(g), W):
            hs = _hex.vertex_hexes(vid, W)
            for k in range(3):
                a, b = hs[(k + 1) % 3], hs[(k + 2) % 3]
                ca, cb = grid.code[a], grid.code[b]
                if (ca >= 0) == (cb >= 0):
                    continue
                cell, ext = (a, b) if ca >= 0 else (b, a)
                lab = grid.code[ext]
                if want is not None and lab != want:
                    continue
                out.append((_hex.edge_id(vid, k, W), cell, ext, lab))
    arr = np.array(sorted(set(out)), dtype=np.int64).reshape(-1, 4)
    return arr


def edge_midpoint(domain: Domain, eid: int) -> tuple[float, float]:
    grid = _require_grid(domain)
    g, k = divmod(int(eid), 3)
    a = 2 * g
    b = _hex.vertex_nbrs(a, grid.W)[k]
    xa, ha = _hex.vertex_xh(a, grid.W, grid.u0, grid.v0)
    xb, hb = _hex.vertex_xh(b, grid.W, grid.u0, grid.v0)
    return ((xa + xb) / 12.0, np.sqrt(3.0) * (ha + hb) / 12.0)


def _require_grid(domain: Domain) -> HexGrid:
    if domain.grid is None:
        raise ValueError("hexagonal geometry exists only on the triangular lattice")
    return domain.grid


def cell_positions(domain: Domain) -> np.ndarray:
    if domain.lattice == TRIANGULAR:
        u, v = domain.cells[:, 0], domain.cells[:, 1]
        return np.stack([u + v / 2.0, np.sqrt(3.0) * v / 2.0], axis=1)
    return (domain.cells[:, :2] + domain.cells[:, 2:]) / 2.0
