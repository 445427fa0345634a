"""Slow independent reference implementations used only by the tests."""
from __future__ import annotations

from collections import deque

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


def adjacency(domain):
    rows, cols = [], []
    for i, row in enumerate(domain.nbr):
        for j in row:
            if j >= 0:
                rows.append(i)
                cols.append(j)
    return rows, cols


def components(domain, colors):
    """Same-colour cluster labels via scipy's connected components."""
    rows, cols = adjacency(domain)
    rows, cols = np.array(rows), np.array(cols)
    keep = colors[rows] == colors[cols]
    n = domain.n_nodes
    m = coo_matrix((np.ones(keep.sum()), (rows[keep], cols[keep])), shape=(n, n))
    return connected_components(m, directed=False)[1]


def crossing_count(domain, colors, color, a="inner", b="outer"):
    lab = components(domain, colors)
    A, B = domain.arc(a), domain.arc(b)
    sel = colors == color
    return len(set(lab[A & sel]) & set(lab[B & sel]))


def bfs_connects(domain, colors, color, a, b):
    A, B = domain.arc(a), domain.arc(b)
    seen = set(int(i) for i in np.flatnonzero(A & (colors == color)))
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        if B[x]:
            return True
        for y in domain.nbr[x]:
            if y >= 0 and y not in seen and colors[y] == color:
                seen.add(int(y))
                queue.append(int(y))
    return False


def _simple_paths(domain, colors, color, start, goal):
    """All simple same-colour paths from a start cell to a goal cell, leaving
    the start arc immediately and stopping at the first goal cell."""
    out = []

    def rec(path, used):
        x = path[-1]
        if goal[x]:
            out.append(frozenset(path))
            return
        for y in domain.nbr[x]:
            y = int(y)
            if y >= 0 and y not in used and colors[y] == color and not start[y]:
                used.add(y)
                path.append(y)
                rec(path, used)
                path.pop()
                used.discard(y)

    for s in np.flatnonzero(start & (colors == color)):
        rec([int(s)], {int(s)})
    return list(set(out))


def _left_part(domain, cut):
    allowed = np.ones(domain.n_cells, dtype=bool)
    allowed[list(cut)] = False
    seeds = [int(i) for i in np.flatnonzero(domain.arc("left") & allowed)]
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        x = queue.popleft()
        for y in domain.nbr[x]:
            if y >= 0 and allowed[y] and y not in seen:
                seen.add(int(y))
                queue.append(int(y))
    return seen


def half_plane_brute(domain, bits, colors_seq):
    """Search for disjoint crossings ordered right to left by exhaustion."""
    inner, outer = domain.arc("inner"), domain.arc("outer")
    paths = {c: _simple_paths(domain, bits, c, inner, outer) for c in set(colors_seq)}
    lefts = {}

    def left_of(p):
        if p not in lefts:
            lefts[p] = _left_part(domain, p)
        return lefts[p]

    def rec(i, chosen):
        if i == len(colors_seq):
            return True
        for p in paths[colors_seq[i]]:
            if all(p <= left_of(q) for q in chosen):
                if rec(i + 1, chosen + [p]):
                    return True
        return False

    return rec(0, [])


def disjoint_paths(domain, nodes, a="inner", b="outer"):
    """Maximum number of node-disjoint paths from arc a to arc b inside ``nodes``.

    Max flow on the split graph: node x becomes in = 2x, out = 2x+1 with unit
    capacity between them.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_flow

    n = domain.n_nodes
    src, snk = 2 * n, 2 * n + 1
    cap = {}
    inside = set(int(x) for x in np.flatnonzero(nodes))
    A, B = domain.arc(a), domain.arc(b)
    for x in inside:
        cap[(2 * x, 2 * x + 1)] = 1
        if A[x]:
            cap[(src, 2 * x)] = 1
        if B[x]:
            cap[(2 * x + 1, snk)] = 1
        for y in domain.nbr[x]:
            if y >= 0 and int(y) in inside:
                cap[(2 * x + 1, 2 * int(y))] = 1
    if not cap:
        return 0
    (rows, cols), vals = zip(*cap.keys()), list(cap.values())
    m = csr_matrix((vals, (rows, cols)), shape=(2 * n + 2, 2 * n + 2), dtype=np.int32)
    return int(maximum_flow(m, src, snk).flow_value)


def five_arm_oracle(domain, colors):
    lab = components(domain, colors)
    A, B = domain.arc("inner"), domain.arc("outer")
    crossing = {c: sorted(set(lab[A & (colors == c)]) & set(lab[B & (colors == c)]))
                for c in (0, 1)}
    mo, mc = len(crossing[1]), len(crossing[0])
    if mo < 2 or mc < 2:
        return False
    if mo >= 3:
        return True
    return any(disjoint_paths(domain, lab == cid) >= 2 for cid in crossing[1])
