"""Static critical configurations and brute-force event decisions.

Everything here looks at the whole configuration; it is the reference that
the exploration algorithms are checked against.  Colours: 1 = open/white,
0 = closed/black.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import _graph, _hex, _walk, rng
from .lattice import SQUARE, TRIANGULAR, Domain

WHITE = 1
BLACK = 0

BOX_LEFT_RIGHT = "box-left-right"
ONE_ARM = "one-arm"
ALTERNATING = "alternating"
HALF_PLANE = "half-plane"
J_CLUSTERS = "j-clusters"
FIVE_ARM = "five-arm"
CELL_OPEN = "cell-open"

_ANNULAR = {ONE_ARM, ALTERNATING, J_CLUSTERS, FIVE_ARM}


@dataclass(frozen=True)
class Configuration:
    domain: Domain = field(repr=False)
    bits: np.ndarray = field(repr=False)
    seed: int = 0
    trial: int = 0

    def __post_init__(self):
        if self.bits.shape != (self.domain.n_cells,):
            raise ValueError(f"expected {self.domain.n_cells} bits, got {self.bits.shape}")

    @property
    def colors(self) -> np.ndarray:
        return self.domain.node_colors(self.bits)

    def with_bits(self, bits) -> "Configuration":
        return Configuration(self.domain, np.asarray(bits, dtype=np.int8), self.seed, self.trial)


@dataclass(frozen=True)
class EventSpec:
    """An event on a domain.

    ``colors`` lists half-plane arm colours from the right-hand side of the
    real axis counter-clockwise to the left-hand side.
    """
    kind: str
    color: int = WHITE
    k: int = 1
    colors: tuple = ()
    j: int = 1
    cell: int = 0

    def __post_init__(self):
        if self.kind == ALTERNATING and (self.k < 2 or self.k % 2):
            raise ValueError(f"alternating arm count must be even and >= 2, got {self.k}")
        if self.kind == HALF_PLANE and (len(self.colors) != self.k or self.k < 1):
            raise ValueError("half-plane colour sequence must have length k >= 1")
        if self.kind == J_CLUSTERS and self.j < 1:
            raise ValueError(f"j must be >= 1, got {self.j}")
        if self.color not in (WHITE, BLACK) or any(c not in (WHITE, BLACK) for c in self.colors):
            raise ValueError("colours are 0 (black) or 1 (white)")

    @property
    def label(self) -> str:
        if self.kind == ONE_ARM:
            return f"one-arm({'white' if self.color else 'black'})"
        if self.kind == ALTERNATING:
            return f"alternating({self.k})"
        if self.kind == HALF_PLANE:
            return "half-plane(" + "".join("wb"[1 - c] for c in self.colors) + ")"
        if self.kind == J_CLUSTERS:
            return f"j-clusters({self.j},{'white' if self.color else 'black'})"
        if self.kind == CELL_OPEN:
            return f"cell-open({self.cell})"
        return self.kind


def box_left_right() -> EventSpec:
    return EventSpec(BOX_LEFT_RIGHT)


def one_arm(color: int = WHITE) -> EventSpec:
    return EventSpec(ONE_ARM, color=color)


def alternating_arms(k: int) -> EventSpec:
    return EventSpec(ALTERNATING, k=k)


def half_plane_arms(colors) -> EventSpec:
    colors = tuple(int(c) for c in colors)
    return EventSpec(HALF_PLANE, k=len(colors), colors=colors)


def j_clusters(j: int, color: int = WHITE) -> EventSpec:
    return EventSpec(J_CLUSTERS, color=color, j=j)


def five_arm() -> EventSpec:
    """Polychromatic five arms (open, open, closed, open, closed up to rotation)."""
    return EventSpec(FIVE_ARM, k=5)


def cell_open(i: int) -> EventSpec:
    return EventSpec(CELL_OPEN, cell=i)


# ------------------------------------------------------------------- sampling

def sample(domain: Domain, p: float = 0.5, seed: int = 0, trial: int = 0) -> Configuration:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p >= 1.0:
        bits = np.ones(domain.n_cells, dtype=np.int8)
    else:
        bits = rng.bits(seed, trial, domain.keys, p)
    return Configuration(domain, bits, seed, trial)


def constant(domain: Domain, value: int) -> Configuration:
    return Configuration(domain, np.full(domain.n_cells, value, dtype=np.int8))


# ------------------------------------------------------------ numba kernels

K_CONNECT = 0
K_JCLUSTERS = 1
K_ALTERNATING = 2
K_CELL = 3


@njit(cache=True)
def _event_value(kind, nbr, colors, a_mask, b_mask, c, j, allowed):
    if kind == K_CONNECT:
        return _graph.connects(nbr, colors, a_mask, b_mask, c, allowed)
    if kind == K_JCLUSTERS:
        m, _lab = _graph.crossing_clusters(nbr, colors, a_mask, b_mask, c, allowed)
        return m >= j
    if kind == K_ALTERNATING:
        mw, _lw = _graph.crossing_clusters(nbr, colors, a_mask, b_mask, 1, allowed)
        mb, _lb = _graph.crossing_clusters(nbr, colors, a_mask, b_mask, 0, allowed)
        return 2 * min(mw, mb) >= j
    return colors[j] == 1


@njit(cache=True)
def _pivotal_kernel(kind, nbr, colors, a_mask, b_mask, c, j, allowed, ncells):
    base = _event_value(kind, nbr, colors, a_mask, b_mask, c, j, allowed)
    out = np.zeros(ncells, dtype=np.bool_)
    for i in range(ncells):
        colors[i] = 1 - colors[i]
        out[i] = _event_value(kind, nbr, colors, a_mask, b_mask, c, j, allowed) != base
        colors[i] = 1 - colors[i]
    return out


@njit(cache=True)
def _two_disjoint(nbr, label, cid, inner, outer):
    """Two vertex-disjoint inner-to-outer paths inside cluster ``cid``?

    Unit vertex capacities via in/out splitting; two augmenting-path searches.
    """
    n = nbr.shape[0]
    d = nbr.shape[1]
    f_node = np.zeros(n, dtype=np.int8)
    f_edge = np.zeros((n, d), dtype=np.int8)
    f_src = np.zeros(n, dtype=np.int8)
    f_snk = np.zeros(n, dtype=np.int8)
    # search state s = 2*x (in-copy) or 2*x+1 (out-copy)
    par = np.empty(2 * n, dtype=np.int64)
    queue = np.empty(2 * n, dtype=np.int64)
    for _round in range(2):
        par[:] = -2
        head = 0
        tail = 0
        for x in range(n):
            if label[x] == cid and inner[x] and f_src[x] == 0:
                par[2 * x] = -1
                queue[tail] = 2 * x
                tail += 1
        end = -1
        while head < tail and end < 0:
            s = queue[head]
            head += 1
            x = s >> 1
            if s & 1 == 0:
                # in-copy: forward through the vertex, or back along a used edge
                if f_node[x] == 0 and par[s + 1] == -2:
                    par[s + 1] = s
                    queue[tail] = s + 1
                    tail += 1
                for k in range(d):
                    y = nbr[x, k]
                    if y < 0 or label[y] != cid:
                        continue
                    for kk in range(d):
                        if nbr[y, kk] == x and f_edge[y, kk] == 1 and par[2 * y + 1] == -2:
                            par[2 * y + 1] = s
                            queue[tail] = 2 * y + 1
                            tail += 1
            else:
                if outer[x] and f_snk[x] == 0:
                    end = s
                    break
                if f_node[x] == 1 and par[s - 1] == -2:
                    par[s - 1] = s
                    queue[tail] = s - 1
                    tail += 1
                for k in range(d):
                    y = nbr[x, k]
                    if y < 0 or label[y] != cid:
                        continue
                    if f_edge[x, k] == 0 and par[2 * y] == -2:
                        par[2 * y] = s
                        queue[tail] = 2 * y
                        tail += 1
        if end < 0:
            return False
        f_snk[end >> 1] = 1
        s = end
        while par[s] != -1:
            t = par[s]
            xs, xt = s >> 1, t >> 1
            if t & 1 == 0 and s & 1 == 1 and xs == xt:
                f_node[xs] = 1
            elif t & 1 == 1 and s & 1 == 0 and xs == xt:
                f_node[xs] = 0
            elif t & 1 == 1 and s & 1 == 0:
                for k in range(d):
                    if nbr[xt, k] == xs:
                        f_edge[xt, k] = 1
            else:
                # t in-copy of xt, s out-copy of xs: cancel flow xs -> xt
                for k in range(d):
                    if nbr[xs, k] == xt:
                        f_edge[xs, k] = 0
            s = t
        f_src[s >> 1] = 1
    return True


# ------------------------------------------------------------------ decisions

def _check(config: Configuration, event: EventSpec):
    dom = config.domain
    if event.kind == BOX_LEFT_RIGHT and dom.kind not in ("box", "rhombus"):
        raise ValueError(f"{event.label} needs a box domain, got {dom.kind}")
    if event.kind in _ANNULAR and dom.kind != "annulus":
        raise ValueError(f"{event.label} needs an annulus domain, got {dom.kind}")
    if event.kind == HALF_PLANE and dom.kind != "halfplane":
        raise ValueError(f"{event.label} needs a half-plane annulus, got {dom.kind}")
    if event.kind == CELL_OPEN and not 0 <= event.cell < dom.n_cells:
        raise ValueError(f"cell {event.cell} outside the domain")


def _kernel_args(config: Configuration, event: EventSpec):
    dom = config.domain
    if event.kind == BOX_LEFT_RIGHT:
        return K_CONNECT, dom.arc("left"), dom.arc("right"), WHITE, 0
    if event.kind == ONE_ARM:
        return K_CONNECT, dom.arc("inner"), dom.arc("outer"), event.color, 0
    if event.kind == J_CLUSTERS:
        return K_JCLUSTERS, dom.arc("inner"), dom.arc("outer"), event.color, event.j
    if event.kind == ALTERNATING:
        return K_ALTERNATING, dom.arc("inner"), dom.arc("outer"), WHITE, event.k
    if event.kind == CELL_OPEN:
        empty = np.zeros(dom.n_nodes, dtype=np.bool_)
        return K_CELL, empty, empty, WHITE, event.cell
    return None


def decide(config: Configuration, event: EventSpec) -> bool:
    _check(config, event)
    dom = config.domain
    colors = config.colors
    if event.kind == ALTERNATING and dom.lattice == TRIANGULAR:
        return 2 * (len(interface_endpoints(config)) // 2) >= event.k
    if event.kind == HALF_PLANE:
        return half_plane_peel(config, event.colors)
    if event.kind == FIVE_ARM:
        return _five_arm(config)
    kind, a, b, c, j = _kernel_args(config, event)
    allowed = np.ones(dom.n_nodes, dtype=np.bool_)
    return bool(_event_value(kind, dom.nbr, colors, a, b, c, j, allowed))


def count_crossing_clusters(config: Configuration, color: int) -> int:
    dom = config.domain
    if dom.kind not in ("annulus",):
        raise ValueError(f"crossing clusters need an annulus domain, got {dom.kind}")
    allowed = np.ones(dom.n_nodes, dtype=np.bool_)
    m, _ = _graph.crossing_clusters(dom.nbr, config.colors, dom.arc("inner"),
                                    dom.arc("outer"), int(color), allowed)
    return int(m)


def interface_endpoints(config: Configuration) -> np.ndarray:
    """Outer endpoints (hex vertex ids) of interfaces crossing a triangular annulus."""
    dom = config.domain
    grid = dom.grid
    outer = grid.gid(dom.cells[dom.arc("outer"), 0], dom.cells[dom.arc("outer"), 1])
    return _graph.annulus_interfaces(grid.code, config.colors, grid.W, grid.u0, grid.v0,
                                     outer.astype(np.int64))


def _five_arm(config: Configuration) -> bool:
    dom = config.domain
    colors = config.colors
    inner, outer = dom.arc("inner"), dom.arc("outer")
    allowed = np.ones(dom.n_nodes, dtype=np.bool_)
    mo, lab = _graph.crossing_clusters(dom.nbr, colors, inner, outer, WHITE, allowed)
    mc, _ = _graph.crossing_clusters(dom.nbr, colors, inner, outer, BLACK, allowed)
    if mo < 2 or mc < 2:
        return False
    if mo >= 3:
        return True
    # exactly two open clusters: one of them must carry two disjoint arms
    return any(_two_disjoint(dom.nbr, lab, cid, inner, outer) for cid in range(mo))


def pivotal_set(config: Configuration, event: EventSpec) -> np.ndarray:
    """Indices of cells whose single flip changes the event."""
    _check(config, event)
    dom = config.domain
    args = _kernel_args(config, event)
    if args is not None:
        kind, a, b, c, j = args
        colors = config.colors.copy()
        allowed = np.ones(dom.n_nodes, dtype=np.bool_)
        piv = _pivotal_kernel(kind, dom.nbr, colors, a, b, c, j, allowed, dom.n_cells)
        return np.flatnonzero(piv)
    base = decide(config, event)
    bits = config.bits.copy()
    out = []
    for i in range(dom.n_cells):
        bits[i] ^= 1
        if decide(config.with_bits(bits), event) != base:
            out.append(i)
        bits[i] ^= 1
    return np.array(out, dtype=np.int64)


# ------------------------------------------------------------- half-plane arms

def _junction(grid) -> tuple[int, int]:
    """Entry (prev, cur) at the vertex shared by the hole, the right side and a cell."""
    code, W = grid.code, grid.W
    found = []
    for g in np.flatnonzero(code == _hex.INNER):
        for vid in _hex.hex_vertices(int(g), W):
            hs = _hex.vertex_hexes(int(vid), W)
            nb = _hex.vertex_nbrs(int(vid), W)
            for k in range(3):
                f, lh, rh = hs[k], hs[(k + 1) % 3], hs[(k + 2) % 3]
                if code[f] >= 0 and code[lh] == _hex.INNER and code[rh] == _hex.RIGHT:
                    found.append((int(nb[k]), int(vid)))
    found = sorted(set(found))
    if len(found) != 1:
        raise RuntimeError(f"expected one hole/right junction, found {len(found)}")
    return found[0]


def half_plane_peel(config: Configuration, colors) -> bool:
    """Disjoint crossings with the given colours, ordered right to left.

    Greedy: take the right-most crossing of the first colour, keep only the
    cells strictly to its left, repeat with the next colour.  The right-most
    crossing is the inner-side boundary of an interface started where the
    hole meets the right-hand side.
    """
    dom = config.domain
    grid = dom.grid
    code, W = grid.code, grid.W
    cell_gid = grid.gid(dom.cells[:, 0], dom.cells[:, 1])
    ext = code < 0
    act = np.full(code.shape[0], _walk.ACT_STOP, dtype=np.int8)
    region = np.ones(dom.n_cells, dtype=np.bool_)
    left_seed = dom.arc("left")
    prev, cur = _junction(grid)
    size = 2 * code.shape[0]
    path = np.empty(size, dtype=np.int64)
    lhex = np.empty(size, dtype=np.int64)
    rhex = np.empty(size, dtype=np.int64)
    bits = config.bits
    for c in colors:
        # the sought colour walks on the left (black side), everything else right
        act[:] = _walk.ACT_STOP
        act[ext & (code == _hex.INNER)] = _walk.ACT_BLACK
        act[ext & (code == _hex.RIGHT)] = _walk.ACT_WHITE
        act[cell_gid] = np.where(region & (bits == c), _walk.ACT_BLACK, _walk.ACT_WHITE)
        stop, n = _walk.colour_walk(act, W, prev, cur, path, lhex, rhex)
        if stop < 0:
            raise RuntimeError("interface walk overflow")
        if code[stop] != _hex.OUTER:
            return False
        lh = lhex[:n]
        inner_idx = np.flatnonzero(code[lh] == _hex.INNER)
        t = int(inner_idx[-1])
        gamma = code[lh[t + 1:]]
        gamma = np.unique(gamma[gamma >= 0])
        if t > 0:
            prev = int(path[t - 1])
        cur = int(path[t])
        allowed = region.copy()
        allowed[gamma] = False
        zeros = np.zeros(dom.n_cells, dtype=np.int8)
        region = _graph.flood(dom.nbr, zeros, left_seed & allowed, 0, allowed)
    return True
