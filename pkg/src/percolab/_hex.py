"""Integer geometry of the hexagonal tiling dual to the triangular lattice.

Cells live on a padded rectangular grid in axial coordinates; ``g`` is the
row-major grid index of cell ``(u, v)``.  Every hex-lattice vertex is the
centroid of a lattice triangle and is named ``2*g`` (the up-triangle with
lower-left corner ``(u, v)``) or ``2*g + 1`` (the down-triangle
``(u+1, v), (u, v+1), (u+1, v+1)``).

Points are written in integer coordinates ``(X, H)`` with
``x = X / 6`` and ``y = sqrt(3) * H / 6``.  Then a site sits at
``(6u + 3v, 3v)``, an up vertex at ``(6u + 3v + 3, 3v + 1)``, a down vertex at
``(6u + 3v + 6, 3v + 2)`` and ``|z|^2 = (X^2 + 3 H^2) / 36``.

The three hexagons around a vertex are listed counter-clockwise and the k-th
neighbouring vertex is the one across the edge *opposite* to the k-th
hexagon.  That edge separates the other two hexagons.
"""
from __future__ import annotations

import numpy as np
from numba import njit

# exterior labels stored in the grid code array (cells are >= 0)
FAR = -1
LEFT = -2
RIGHT = -3
TOP = -4
BOTTOM = -5
OUTER = -6
INNER = -7

LABEL_NAMES = {LEFT: "left", RIGHT: "right", TOP: "top", BOTTOM: "bottom",
               OUTER: "outer", INNER: "inner", FAR: "far"}


@njit(cache=True, inline="always")
def vertex_hexes(vid, W):
    g = vid >> 1
    if vid & 1 == 0:
        return g, g + 1, g + W
    return g + 1, g + W + 1, g + W


@njit(cache=True, inline="always")
def vertex_nbrs(vid, W):
    g = vid >> 1
    if vid & 1 == 0:
        return 2 * g + 1, 2 * (g - 1) + 1, 2 * (g - W) + 1
    return 2 * (g + W), 2 * g, 2 * (g + 1)


@njit(cache=True, inline="always")
def edge_id(vid, k, W):
    """Canonical id of the edge from ``vid`` to its k-th neighbour."""
    g = vid >> 1
    if vid & 1 == 0:
        return 3 * g + k
    if k == 0:
        return 3 * (g + W) + 2
    if k == 1:
        return 3 * g
    return 3 * (g + 1) + 1


@njit(cache=True, inline="always")
def vertex_xh(vid, W, u0, v0):
    g = vid >> 1
    u = g % W + u0
    v = g // W + v0
    if vid & 1 == 0:
        return 6 * u + 3 * v + 3, 3 * v + 1
    return 6 * u + 3 * v + 6, 3 * v + 2


@njit(cache=True, inline="always")
def hex_xh(g, W, u0, v0):
    u = g % W + u0
    v = g // W + v0
    return 6 * u + 3 * v, 3 * v


@njit(cache=True)
def hex_vertices(g, W):
    """The six vertices of hexagon ``g``, counter-clockwise from the east."""
    out = np.empty(6, dtype=np.int64)
    out[0] = 2 * (g - W) + 1   # down(u, v-1)
    out[1] = 2 * g             # up(u, v)
    out[2] = 2 * (g - 1) + 1   # down(u-1, v)
    out[3] = 2 * (g - 1)       # up(u-1, v)
    out[4] = 2 * (g - W - 1) + 1  # down(u-1, v-1)
    out[5] = 2 * (g - W)       # up(u, v-1)
    return out


@njit(cache=True, inline="always")
def ray_cross(x1, h1, x2, h2):
    """Signed crossing of segment 1->2 with the ray {H = 1/2, X > 1}.

    Inputs are *doubled* integer coordinates, so the ray is {H2 = 1, X2 > 2}
    and no hex vertex or edge midpoint lies on the line H2 = 1.
    """
    a = h1 - 1
    b = h2 - 1
    if (a < 0) == (b < 0):
        return 0
    # crossing abscissa exceeds 2  <=>  (x1-2)(h2-h1) + (x2-x1)(1-h1) has the sign of (h2-h1)
    s = (x1 - 2) * (h2 - h1) + (x2 - x1) * (1 - h1)
    if h2 > h1:
        return 1 if s > 0 else 0
    return -1 if s < 0 else 0


@njit(cache=True, inline="always")
def segment_meets_disk(xa, ha, xb, hb, r36):
    """Exact test: does segment A-B (plain integer coords) meet |z|^2 <= r36/36?"""
    dx = xb - xa
    dh = hb - ha
    gaa = xa * xa + 3 * ha * ha
    num = -(xa * dx + 3 * ha * dh)
    den = dx * dx + 3 * dh * dh
    if num <= 0:
        return gaa <= r36
    if num >= den:
        return xb * xb + 3 * hb * hb <= r36
    return gaa * den - num * num <= r36 * den


# numpy versions used while building domains -----------------------------------

HEX_OFFSETS = np.array([(3, 1), (0, 2), (-3, 1), (-3, -1), (0, -2), (3, -1)], dtype=np.int64)
NEIGHBOURS = np.array([(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)], dtype=np.int64)


def hex_corner_xh(uv: np.ndarray) -> np.ndarray:
    """(n, 6, 2) integer corners of the hexagons of sites ``uv``."""
    cx = 6 * uv[:, 0] + 3 * uv[:, 1]
    ch = 3 * uv[:, 1]
    return np.stack([cx, ch], axis=1)[:, None, :] + HEX_OFFSETS[None, :, :]


def hexes_meeting_disk(uv: np.ndarray, r36: int) -> np.ndarray:
    """Exact: hexagon intersects the closed disk |z|^2 <= r36 / 36."""
    c = hex_corner_xh(uv)
    a = c
    b = np.roll(c, -1, axis=1)
    xa, ha = a[..., 0], a[..., 1]
    dx, dh = b[..., 0] - xa, b[..., 1] - ha
    gaa = xa * xa + 3 * ha * ha
    gbb = b[..., 0] ** 2 + 3 * b[..., 1] ** 2
    num = -(xa * dx + 3 * ha * dh)
    den = dx * dx + 3 * dh * dh
    inner = gaa * den - num * num <= r36 * den
    hit = np.where(num <= 0, gaa <= r36, np.where(num >= den, gbb <= r36, inner))
    origin_inside = (uv[:, 0] == 0) & (uv[:, 1] == 0)
    return hit.any(axis=1) | origin_inside


def hexes_inside_open_disk(uv: np.ndarray, r36: int) -> np.ndarray:
    """Exact: every corner strictly inside |z|^2 < r36 / 36 (hexagon is convex)."""
    c = hex_corner_xh(uv)
    return ((c[..., 0] ** 2 + 3 * c[..., 1] ** 2) < r36).all(axis=1)
