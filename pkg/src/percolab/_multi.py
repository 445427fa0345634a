"""Arm events for a whole list of outer radii from one lazily sampled plane.

Cell colours are keyed by lattice coordinates, so the annulus ``(r, R_k)``
is literally a sub-domain of ``(r, R_max)`` carrying the same bits.  A
crossing of the small annulus is the prefix of a path in the big one, so
one search per sample settles every radius.  Only the cells a search
touches are ever hashed.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from numba import njit

from . import _hex, lattice, rng


@njit(cache=True, inline="always")
def _colour(cell, keys, seed, trial, col, cstamp, stamp):
    if cstamp[cell] != stamp:
        col[cell] = rng.bit(seed, trial, keys[cell], 0.5)
        cstamp[cell] = stamp
    return col[cell]


@njit(cache=True)
def _arm_search(nbr, keys, clvl, allowed, seeds, c, K, seed, trial, col, cstamp, vstamp,
                stamp, stack):
    """Largest level reached by colour-``c`` clusters grown from ``seeds``.

    Depth first: when an arm exists the search tends to run out to it long
    before the whole cluster is read, which is several times cheaper than
    breadth first at large radii.
    """
    best = 0
    sp = 0
    for s in seeds:
        if vstamp[s] != stamp and _colour(s, keys, seed, trial, col, cstamp, stamp) == c:
            vstamp[s] = stamp
            stack[sp] = s
            sp += 1
    while sp > 0:
        sp -= 1
        x = stack[sp]
        if clvl[x] > best:
            best = clvl[x]
            if best >= K:
                return K
        for j in range(6):
            y = nbr[x, j]
            if y < 0 or not allowed[y] or vstamp[y] == stamp:
                continue
            if _colour(y, keys, seed, trial, col, cstamp, stamp) == c:
                vstamp[y] = stamp
                stack[sp] = y
                sp += 1
    return best


@njit(cache=True)
def _one_arm_batch(nbr, keys, clvl, allowed, seeds, c, K, seed, trial0, trials):
    n = keys.shape[0]
    col = np.zeros(n, dtype=np.int8)
    cstamp = np.full(n, -1, dtype=np.int64)
    vstamp = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    out = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        out[t] = _arm_search(nbr, keys, clvl, allowed, seeds, c, K, seed,
                          np.uint64(trial0 + t), col, cstamp, vstamp, t, stack)
    return out


@njit(cache=True)
def _interface_batch(code, W, hexlvl, starts, exts, keys, K, seed, trial0, trials):
    """Per trial and level k, how many interfaces from the hole reach level k."""
    n = keys.shape[0]
    col = np.zeros(n, dtype=np.int8)
    cstamp = np.full(n, -1, dtype=np.int64)
    out = np.zeros((trials, K + 1), dtype=np.int64)
    for t in range(trials):
        trial = np.uint64(trial0 + t)
        for s in range(starts.shape[0]):
            v = starts[s]
            ext = exts[s]
            hs = _hex.vertex_hexes(v, W)
            a = code[hs[(ext + 1) % 3]]
            b = code[hs[(ext + 2) % 3]]
            if _colour(a, keys, seed, trial, col, cstamp, t) == \
                    _colour(b, keys, seed, trial, col, cstamp, t):
                continue
            prev = v
            cur = _hex.vertex_nbrs(v, W)[ext]
            best = 0
            while True:
                hc = _hex.vertex_hexes(cur, W)
                nb = _hex.vertex_nbrs(cur, W)
                k = 0
                for j in range(3):
                    if nb[j] == prev:
                        k = j
                f = code[hc[k]]
                if f < 0:
                    if f != _hex.INNER:
                        best = K
                    break
                if hexlvl[hc[k]] > best:
                    best = hexlvl[hc[k]]
                left = code[hc[(k + 1) % 3]]
                cf = _colour(f, keys, seed, trial, col, cstamp, t)
                if cf == _colour(left, keys, seed, trial, col, cstamp, t):
                    nxt = nb[(k + 1) % 3]
                else:
                    nxt = nb[(k + 2) % 3]
                prev = cur
                cur = nxt
            out[t, best] += 1
    # cumulative from the top: entry k-1 counts walks reaching level >= k
    res = np.zeros((trials, K), dtype=np.int64)
    for t in range(trials):
        acc = 0
        for k in range(K, 0, -1):
            acc += out[t, k]
            res[t, k - 1] = acc
    return res


class MultiRadius:
    """Geometry for the annuli ``(r, R_k)``, all embedded in ``(r, max R_k)``."""

    def __init__(self, r: int, radii: tuple, half_plane: bool = False):
        radii = tuple(sorted(set(int(R) for R in radii)))
        if not radii or radii[0] <= r:
            raise ValueError(f"outer radii must exceed r={r}, got {radii}")
        self.r, self.radii, self.half_plane = r, radii, half_plane
        big = lattice.annulus(r, radii[-1])
        self.domain = big
        grid = big.grid
        self.K = len(radii)
        g = np.arange(grid.code.size)
        uv = np.stack([g % grid.W + grid.u0, g // grid.W + grid.v0], axis=1)
        lvl = np.zeros(g.size, dtype=np.int64)
        for R in radii:
            lvl += ~_hex.hexes_meeting_disk(uv, 36 * R * R)
        self.hexlvl = lvl
        gc = grid.gid(big.cells[:, 0], big.cells[:, 1])
        nb = big.cells[:, None, :] + _hex.NEIGHBOURS[None, :, :]
        gn = grid.gid(nb[..., 0], nb[..., 1])
        self.clvl = lvl[gn].max(axis=1)
        self.allowed = big.cells[:, 1] >= 0 if half_plane else np.ones(big.n_cells, dtype=bool)
        self.seeds = np.flatnonzero(big.arc("inner") & self.allowed).astype(np.int64)
        self.keys = big.keys.astype(np.uint64)
        self._gc = gc
        self._starts = None

    def one_arm(self, color: int, seed: int, trial0: int, trials: int) -> np.ndarray:
        """(trials, K) booleans: colour-``color`` crossing of each annulus."""
        best = _one_arm_batch(self.domain.nbr, self.keys, self.clvl, self.allowed, self.seeds,
                              color, self.K, np.uint64(seed), trial0, trials)
        return best[:, None] >= np.arange(1, self.K + 1)[None, :]

    def interface_counts(self, seed: int, trial0: int, trials: int) -> np.ndarray:
        """(trials, K) number of interfaces crossing each annulus."""
        if self.half_plane:
            raise ValueError("interface counts are only set up for full annuli")
        grid = self.domain.grid
        if self._starts is None:
            self._starts = _inner_starts(grid.code, grid.W, self._gc)
        starts, exts = self._starts
        return _interface_batch(grid.code, grid.W, self.hexlvl, starts, exts, self.keys,
                                self.K, np.uint64(seed), trial0, trials)


def _inner_starts(code, W, gcells):
    starts, exts = [], []
    seen = set()
    for g in gcells:
        for v in _hex.hex_vertices(int(g), W):
            v = int(v)
            if v in seen:
                continue
            seen.add(v)
            hs = _hex.vertex_hexes(v, W)
            kinds = [code[h] for h in hs]
            if sum(k == _hex.INNER for k in kinds) == 1 and sum(k >= 0 for k in kinds) == 2:
                starts.append(v)
                exts.append(next(j for j in range(3) if kinds[j] == _hex.INNER))
    return np.array(starts, dtype=np.int64), np.array(exts, dtype=np.int64)


@lru_cache(maxsize=16)
def multi_radius(r: int, radii: tuple, half_plane: bool = False) -> MultiRadius:
    return MultiRadius(r, radii, half_plane)
