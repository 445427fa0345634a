"""Interface walks on the hexagonal grid (numba kernels).

Both walks keep black hexagons on their left and white ones on their right.
At a vertex the three hexagons are: ``L`` and ``Rh`` (the two sides of the
incoming edge) and ``F`` (the one in front).  A white ``F`` sends the walk
left, along the edge between ``L`` and ``F``; a black ``F`` sends it right.

Cell colours are read through ``_colour`` which pulls lazily from the
counter-based generator and records the first read of each cell, so the
revealed set is exactly the set of cells whose colour was needed.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from . import _hex
from .rng import bit

# edge codes for the chordal walk
EC_NONE = 0
EC_BLACK = 1
EC_WHITE = 2
EC_TERMINAL = 10  # + (-label)

STOP_TERMINAL = 1
STOP_DISK = 2
STOP_LOOP = 3
STOP_TARGET = 4
STUCK = -1


@njit(cache=True)
def _colour(cell, bits, keys, seed, trial, p, seen, stamp, revealed, nrev):
    """Colour of ``cell``; records the first read.  Returns (colour, nrev)."""
    b = bits[cell]
    if b < 0:
        b = bit(seed, trial, keys[cell], p)
        bits[cell] = b
    if seen[cell] != stamp:
        seen[cell] = stamp
        revealed[nrev] = cell
        nrev += 1
    return b, nrev


@njit(cache=True)
def _index_of(nb, x):
    for j in range(3):
        if nb[j] == x:
            return j
    return -1


@njit(cache=True)
def chordal_walk(code, W, prev, cur, e0, ecode, flip,
                 bits, keys, seed, trial, p, seen, stamp, revealed, nrev,
                 vmark, vstamp, path, lhex, rhex):
    """Walk from ``cur`` (entered from ``prev``) until a terminal boundary edge.

    Returns (status, label, path_len, nrev).  ``path`` receives the vertices,
    ``lhex``/``rhex`` the hexagons on either side of each traversed edge
    (including the entry edge).
    """
    n = 0
    vmark[cur] = vstamp
    path[n] = cur
    hc = _hex.vertex_hexes(cur, W)
    nb = _hex.vertex_nbrs(cur, W)
    k = _index_of(nb, prev)
    lhex[n] = hc[(k + 1) % 3]
    rhex[n] = hc[(k + 2) % 3]
    n += 1
    maxlen = path.shape[0]
    while True:
        hc = _hex.vertex_hexes(cur, W)
        nb = _hex.vertex_nbrs(cur, W)
        k = _index_of(nb, prev)
        f = hc[k]
        lh = hc[(k + 1) % 3]
        rh = hc[(k + 2) % 3]
        nl = nb[(k + 2) % 3]
        nr = nb[(k + 1) % 3]
        el = _hex.edge_id(cur, (k + 2) % 3, W)
        er = _hex.edge_id(cur, (k + 1) % 3, W)
        fc = code[f] >= 0
        okl = (fc or code[lh] >= 0) and vmark[nl] != vstamp and el != e0
        okr = (fc or code[rh] >= 0) and vmark[nr] != vstamp and er != e0
        if not fc:
            if okl and ecode[el] >= EC_TERMINAL:
                return STOP_TERMINAL, EC_TERMINAL - ecode[el], n, nrev
            if okr and ecode[er] >= EC_TERMINAL:
                return STOP_TERMINAL, EC_TERMINAL - ecode[er], n, nrev
        if okl and okr:
            if fc:
                col, nrev = _colour(code[f], bits, keys, seed, trial, p, seen, stamp, revealed, nrev)
                white = (col ^ flip) == 1
            else:
                white = ecode[el] == EC_WHITE
            go_left = white
        elif okl:
            go_left = True
        elif okr:
            go_left = False
        else:
            return STUCK, 0, n, nrev
        if n >= maxlen:
            return STUCK, 0, n, nrev
        if go_left:
            nxt = nl
            lhex[n] = lh
            rhex[n] = f
        else:
            nxt = nr
            lhex[n] = f
            rhex[n] = rh
        prev = cur
        cur = nxt
        vmark[cur] = vstamp
        path[n] = cur
        n += 1


# ------------------------------------------------------------------ radial walk

@njit(cache=True)
def _edge_in_domain(code, a, b):
    return code[a] >= 0 or code[b] >= 0


@njit(cache=True)
def _bfs_step(code, W, queue, head, tail, mark, mymark, othermark, vmark, vstamp, dead,
              qa, qb):
    """Expand one vertex. Returns (head, tail, status) with status
    0 = continue, 1 = exhausted, 2 = found target, 3 = met the other side."""
    if head >= tail:
        return head, tail, 1
    x = queue[head]
    head += 1
    hx = _hex.vertex_hexes(x, W)
    nx = _hex.vertex_nbrs(x, W)
    for j in range(3):
        y = nx[j]
        if not _edge_in_domain(code, hx[(j + 1) % 3], hx[(j + 2) % 3]):
            continue
        if vmark[y] == vstamp or dead[y] == vstamp:
            continue
        if mark[y] == othermark:
            return head, tail, 3
        if mark[y] == mymark:
            continue
        mark[y] = mymark
        queue[tail] = y
        tail += 1
        if y == qa or y == qb:
            return head, tail, 2
    return head, tail, 0


@njit(cache=True)
def _feasibility(code, W, a, b, vmark, vstamp, dead, qa, qb, mark, mstamp, qA, qB):
    """Lockstep search from candidate vertices a and b.

    Returns (fa, fb): whether each candidate can still reach an endpoint of
    the target edge avoiding visited vertices.  Exhausted searches mark
    their vertices dead.
    """
    ma = mstamp
    mb = mstamp + 1
    mark[a] = ma
    mark[b] = mb
    ha, ta = 0, 1
    hb, tb = 0, 1
    qA[0] = a
    qB[0] = b
    fa = 1 if (a == qa or a == qb) else 0  # 1 found, -1 dead, 0 unknown
    fb = 1 if (b == qa or b == qb) else 0
    while fa == 0 or fb == 0:
        if fa == 0:
            ha, ta, s = _bfs_step(code, W, qA, ha, ta, mark, ma, mb, vmark, vstamp, dead, qa, qb)
            if s == 1:
                fa = -1
                for t in range(ta):
                    dead[qA[t]] = vstamp
            elif s == 2:
                fa = 1
            elif s == 3:
                return True, True
        if fb == 0:
            hb, tb, s = _bfs_step(code, W, qB, hb, tb, mark, mb, ma, vmark, vstamp, dead, qa, qb)
            if s == 1:
                fb = -1
                for t in range(tb):
                    dead[qB[t]] = vstamp
            elif s == 2:
                fb = 1
            elif s == 3:
                return True, True
        if fa == -1 and fb == 0:
            return False, True
        if fb == -1 and fa == 0:
            return True, False
    return fa == 1, fb == 1


@njit(cache=True)
def _reach(code, W, a, vmark, vstamp, dead, qa, qb, mark, mstamp, qA):
    """Single-sided version of ``_feasibility``."""
    if a == qa or a == qb:
        return True
    mark[a] = mstamp
    qA[0] = a
    h, t = 0, 1
    while True:
        h, t, s = _bfs_step(code, W, qA, h, t, mark, mstamp, -1, vmark, vstamp, dead, qa, qb)
        if s == 1:
            for i in range(t):
                dead[qA[i]] = vstamp
            return False
        if s == 2:
            return True


@njit(cache=True)
def _dbl(vid, W, u0, v0):
    x, h = _hex.vertex_xh(vid, W, u0, v0)
    return 2 * x, 2 * h


@njit(cache=True)
def radial_walk(code, W, u0, v0, a0, b0, c0, o0, q_edge, qa, qb, hole, truncate,
                bits, keys, seed, trial, p, seen, stamp, revealed, nrev,
                vmark, vstamp, wind, dead, mark, mstamp, qA, qB, path):
    """Radial interface from the midpoint of edge (a0, b0) towards the target edge.

    The walk first moves to ``a0`` (so the caller orients the start from the
    colour of ``c0``; ``o0`` is the exterior hexagon across the start edge).
    Stops when it reaches a corner of a hexagon flagged in ``hole``, when a
    counter-clockwise loop around the origin is completed (if ``truncate``),
    or when the target edge is chosen.

    ``dead`` and ``vmark`` use the stamp ``vstamp``; ``mark`` uses stamps from
    ``mstamp`` upwards.  Returns (status, path_len, nrev, mstamp).
    """
    xa, ha = _dbl(a0, W, u0, v0)
    xb, hb = _dbl(b0, W, u0, v0)
    px = (xa + xb) // 2
    ph = (ha + hb) // 2
    n = 0
    vmark[a0] = vstamp
    wind[a0] = _hex.ray_cross(px, ph, xa, ha)
    path[n] = a0
    n += 1
    if _touches(a0, W, hole):
        return STOP_DISK, n, nrev, mstamp
    prev = b0
    cur = a0
    maxlen = path.shape[0]
    while True:
        hc = _hex.vertex_hexes(cur, W)
        nb = _hex.vertex_nbrs(cur, W)
        k = _index_of(nb, prev)
        f = hc[k]
        lh = hc[(k + 1) % 3]
        rh = hc[(k + 2) % 3]
        nl = nb[(k + 2) % 3]
        nr = nb[(k + 1) % 3]
        el = _hex.edge_id(cur, (k + 2) % 3, W)
        er = _hex.edge_id(cur, (k + 1) % 3, W)
        # the target edge ends the walk, so it stays usable after a visit to its far end
        okl = el == q_edge or (_edge_in_domain(code, f, lh) and vmark[nl] != vstamp
                               and dead[nl] != vstamp)
        okr = er == q_edge or (_edge_in_domain(code, f, rh) and vmark[nr] != vstamp
                               and dead[nr] != vstamp)
        if okl and okr:
            if el == q_edge or er == q_edge:
                # the target edge is always feasible; the other needs checking
                fl = True
                fr = True
                if el == q_edge:
                    fr = _reach(code, W, nr, vmark, vstamp, dead, qa, qb, mark, mstamp, qA)
                else:
                    fl = _reach(code, W, nl, vmark, vstamp, dead, qa, qb, mark, mstamp, qA)
                mstamp += 2
            elif code[f] >= 0 and _fresh(f, W, cur, vmark, vstamp):
                fl = True
                fr = True
            else:
                fl, fr = _feasibility(code, W, nl, nr, vmark, vstamp, dead, qa, qb,
                                      mark, mstamp, qA, qB)
                mstamp += 2
        else:
            fl = okl
            fr = okr
        if fl and fr:
            if code[f] < 0:
                return STUCK, n, nrev, mstamp
            col, nrev = _colour(code[f], bits, keys, seed, trial, p, seen, stamp, revealed, nrev)
            go_left = col == 1
        elif fl:
            go_left = True
        elif fr:
            go_left = False
        else:
            return STUCK, n, nrev, mstamp
        if go_left:
            nxt = nl
            e = el
        else:
            nxt = nr
            e = er
        if e == q_edge:
            return STOP_TARGET, n, nrev, mstamp
        if n >= maxlen:
            return STUCK, n, nrev, mstamp
        x1, h1 = _dbl(cur, W, u0, v0)
        x2, h2 = _dbl(nxt, W, u0, v0)
        wind[nxt] = wind[cur] + _hex.ray_cross(x1, h1, x2, h2)
        vmark[nxt] = vstamp
        path[n] = nxt
        n += 1
        prev = cur
        cur = nxt
        if _touches(cur, W, hole):
            return STOP_DISK, n, nrev, mstamp
        if truncate and _ccw_loop(cur, W, u0, v0, vmark, vstamp, wind, c0, o0, px, ph):
            return STOP_LOOP, n, nrev, mstamp


@njit(cache=True)
def _touches(v, W, hole):
    hs = _hex.vertex_hexes(v, W)
    return hole[hs[0]] or hole[hs[1]] or hole[hs[2]]


@njit(cache=True)
def _fresh(f, W, cur, vmark, vstamp):
    vs = _hex.hex_vertices(f, W)
    for i in range(6):
        if vs[i] != cur and vmark[vs[i]] == vstamp:
            return False
    return True


@njit(cache=True)
def _ccw_loop(v, W, u0, v0, vmark, vstamp, wind, c0, o0, px, ph):
    """Does arriving at ``v`` close a counter-clockwise loop around the origin?

    For each hexagon containing ``v`` and each earlier point ``u`` on its
    boundary, the loop is the walk from ``u`` to ``v`` followed by the chord
    ``[v, u]``; its winding number is exact integer arithmetic.
    """
    xv, hv = _dbl(v, W, u0, v0)
    hs = _hex.vertex_hexes(v, W)
    for j in range(3):
        h = hs[j]
        vs = _hex.hex_vertices(h, W)
        for i in range(6):
            u = vs[i]
            if u == v or vmark[u] != vstamp:
                continue
            xu, hu = _dbl(u, W, u0, v0)
            if wind[v] - wind[u] + _hex.ray_cross(xv, hv, xu, hu) == 1:
                return True
        if h == c0 or h == o0:
            # the start point p0 lies on these two hexagons, with winding 0
            if wind[v] + _hex.ray_cross(xv, hv, px, ph) == 1:
                return True
    return False


# --------------------------------------------------------- fully coloured walk

ACT_BLACK = 0
ACT_WHITE = 1
ACT_STOP = 2


@njit(cache=True)
def colour_walk(act, W, prev, cur, path, lhex, rhex):
    """Interface walk through hexagons with known acting colours.

    ``act`` gives each grid hexagon black, white or stop.  The walk enters
    ``cur`` from ``prev`` and ends when the hexagon in front is a stop
    hexagon, whose grid id is returned with the path length (-1 on overflow).
    """
    n = 0
    maxlen = path.shape[0]
    while True:
        hc = _hex.vertex_hexes(cur, W)
        nb = _hex.vertex_nbrs(cur, W)
        k = _index_of(nb, prev)
        if n >= maxlen:
            return -1, n
        path[n] = cur
        lhex[n] = hc[(k + 1) % 3]
        rhex[n] = hc[(k + 2) % 3]
        n += 1
        f = hc[k]
        if act[f] == ACT_STOP:
            return f, n
        prev = cur
        if act[f] == ACT_WHITE:
            cur = nb[(k + 2) % 3]
        else:
            cur = nb[(k + 1) % 3]
