"""Numba kernels for connectivity on node graphs and interfaces on hex grids."""
from __future__ import annotations

import numpy as np
from numba import njit

from . import _hex


@njit(cache=True)
def flood(nbr, colors, seeds, c, allowed):
    """Nodes of colour ``c`` reachable from seed nodes of colour ``c``."""
    n = nbr.shape[0]
    seen = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(n):
        if seeds[i] and allowed[i] and colors[i] == c:
            seen[i] = True
            stack[top] = i
            top += 1
    while top > 0:
        top -= 1
        x = stack[top]
        for k in range(nbr.shape[1]):
            y = nbr[x, k]
            if y >= 0 and not seen[y] and allowed[y] and colors[y] == c:
                seen[y] = True
                stack[top] = y
                top += 1
    return seen


@njit(cache=True)
def connects(nbr, colors, src, dst, c, allowed):
    seen = flood(nbr, colors, src, c, allowed)
    for i in range(nbr.shape[0]):
        if seen[i] and dst[i]:
            return True
    return False


@njit(cache=True)
def crossing_clusters(nbr, colors, inner, outer, c, allowed):
    """Label clusters of colour ``c`` that touch ``inner``; count those touching ``outer``.

    Returns (count, label) where label[i] is the cluster id (>= 0) of node i
    for crossing clusters and -1 elsewhere.
    """
    n = nbr.shape[0]
    comp = np.full(n, -1, dtype=np.int64)
    label = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    members = np.empty(n, dtype=np.int64)
    count = 0
    for s in range(n):
        if not inner[s] or comp[s] >= 0 or colors[s] != c or not allowed[s]:
            continue
        comp[s] = s
        stack[0] = s
        top = 1
        m = 0
        hit = False
        while top > 0:
            top -= 1
            x = stack[top]
            members[m] = x
            m += 1
            if outer[x]:
                hit = True
            for k in range(nbr.shape[1]):
                y = nbr[x, k]
                if y >= 0 and comp[y] < 0 and allowed[y] and colors[y] == c:
                    comp[y] = s
                    stack[top] = y
                    top += 1
        if hit:
            for t in range(m):
                label[members[t]] = count
            count += 1
    return count, label


@njit(cache=True)
def annulus_interfaces(code, colors, W, u0, v0, outer_cells):
    """Trace every interface that starts on the outer boundary of an annulus.

    An interface is a maximal path of hex edges separating two cells of
    different colours.  Returns the outer endpoints (vertex ids) of the
    interfaces that end on the inner boundary.
    """
    ends = []
    for ci in range(outer_cells.shape[0]):
        g = outer_cells[ci]
        vs = _hex.hex_vertices(g, W)
        for q in range(6):
            v = vs[q]
            hs = _hex.vertex_hexes(v, W)
            # exactly one outer exterior hexagon and two cells of different colours
            ext = -1
            ncell = 0
            for j in range(3):
                if code[hs[j]] >= 0:
                    ncell += 1
                elif code[hs[j]] == _hex.OUTER:
                    ext = j
            if ext < 0 or ncell != 2:
                continue
            a = code[hs[(ext + 1) % 3]]
            b = code[hs[(ext + 2) % 3]]
            if a != code[g] or colors[a] == colors[b]:
                continue
            prev = v
            cur = _hex.vertex_nbrs(v, W)[ext]
            while True:
                hc = _hex.vertex_hexes(cur, W)
                nb = _hex.vertex_nbrs(cur, W)
                k = 0
                for j in range(3):
                    if nb[j] == prev:
                        k = j
                f = code[hc[k]]
                if f < 0:
                    if f == _hex.INNER:
                        ends.append(v)
                    break
                left = code[hc[(k + 1) % 3]]
                if colors[f] == colors[left]:
                    nxt = nb[(k + 1) % 3]
                else:
                    nxt = nb[(k + 2) % 3]
                prev = cur
                cur = nxt
    out = np.empty(len(ends), dtype=np.int64)
    for i in range(len(ends)):
        out[i] = ends[i]
    return out


@njit(cache=True)
def count_boundary_interfaces(code, colors, W, outer_cells):
    """Number of interface endpoints on the outer boundary (crossing or not)."""
    total = 0
    for ci in range(outer_cells.shape[0]):
        vs = _hex.hex_vertices(outer_cells[ci], W)
        for q in range(6):
            hs = _hex.vertex_hexes(vs[q], W)
            ext = -1
            ncell = 0
            for j in range(3):
                if code[hs[j]] >= 0:
                    ncell += 1
                elif code[hs[j]] == _hex.OUTER:
                    ext = j
            if ext >= 0 and ncell == 2 and code[hs[(ext + 1) % 3]] == code[outer_cells[ci]]:
                if colors[code[hs[(ext + 1) % 3]]] != colors[code[hs[(ext + 2) % 3]]]:
                    total += 1
    return total
