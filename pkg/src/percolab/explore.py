"""Bit-revealing exploration algorithms.

The chordal interface answers box crossings by following the colour
boundary that starts on the right-hand side.  The truncated radial interface
answers annulus crossings.  Both read cell colours lazily from the same
counter-based generator as :mod:`percolab.sampler`, so an exploration and a
full sample of the same ``(seed, trial)`` see the same bits.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass, field

import numpy as np

from . import _hex, _walk, lattice, rng
from ._hex import BOTTOM, LABEL_NAMES, LEFT, OUTER, RIGHT, TOP
from .lattice import Domain
from .sampler import Configuration, interface_endpoints

_SALT_START = 0x5157


@dataclass
class ExplorationRun:
    """One interface together with the cells it had to look at."""
    path: np.ndarray = field(repr=False)      # hex-lattice vertex ids, in order
    revealed: np.ndarray = field(repr=False)  # cell indices, in order of first read
    outcome: bool
    start_edge: int
    start_point: tuple
    target: str
    status: str
    domain: Domain = field(repr=False, default=None)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.path[:-1].tolist(), self.path[1:].tolist()))

    def points(self) -> np.ndarray:
        """Path vertices in plane coordinates."""
        g = self.domain.grid
        xy = np.array([_hex.vertex_xh(int(v), g.W, g.u0, g.v0) for v in self.path], dtype=float)
        return np.stack([xy[:, 0] / 6.0, np.sqrt(3.0) * xy[:, 1] / 6.0], axis=1)


@dataclass
class RevealmentRecord:
    counts: np.ndarray = field(repr=False)
    trials: int
    domain: Domain = field(repr=False, default=None)

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / max(self.trials, 1)

    @property
    def delta_hat(self) -> float:
        return float(self.counts.max() / self.trials) if self.counts.size else 0.0

    def merge(self, other: "RevealmentRecord") -> "RevealmentRecord":
        return RevealmentRecord(self.counts + other.counts, self.trials + other.trials, self.domain)


@dataclass(frozen=True)
class SeparationSample:
    s_value: float
    interface_count: int


# ------------------------------------------------------------ shared state

class _Workspace:
    """Reusable buffers for one domain; stamps avoid clearing between runs."""

    def __init__(self, domain: Domain):
        g = domain.grid
        nv = 2 * g.code.shape[0]
        self.domain = domain
        self.bits = np.full(domain.n_cells, -1, dtype=np.int8)
        self.seen = np.zeros(domain.n_cells, dtype=np.int64)
        self.revealed = np.empty(domain.n_cells, dtype=np.int64)
        self.vmark = np.zeros(nv, dtype=np.int64)
        self.dead = np.zeros(nv, dtype=np.int64)
        self.mark = np.zeros(nv, dtype=np.int64)
        self.wind = np.zeros(nv, dtype=np.int64)
        self.qA = np.empty(nv, dtype=np.int64)
        self.qB = np.empty(nv, dtype=np.int64)
        self.path = np.empty(nv, dtype=np.int64)
        self.lhex = np.empty(nv, dtype=np.int64)
        self.rhex = np.empty(nv, dtype=np.int64)
        self.ecode = np.zeros(3 * g.code.shape[0], dtype=np.int8)
        self.stamp = 0
        self.vstamp = 0
        self.mstamp = 1

    def load(self, config: Configuration | None):
        """Fix the bits for a run: explicit ones from ``config`` or lazy (-1)."""
        self.bits[:] = -1
        if config is not None:
            self.bits[:] = _transfer(config, self.domain)
        self.stamp += 1


_WORKSPACES: "weakref.WeakKeyDictionary[Domain, _Workspace]" = weakref.WeakKeyDictionary()
_CYCLES: "weakref.WeakKeyDictionary[Domain, tuple]" = weakref.WeakKeyDictionary()
_DISKS: dict[int, Domain] = {}


def _workspace(domain: Domain) -> _Workspace:
    ws = _WORKSPACES.get(domain)
    if ws is None:
        ws = _WORKSPACES[domain] = _Workspace(domain)
    return ws


def _transfer(config: Configuration, target: Domain) -> np.ndarray:
    """Bits of ``config`` re-indexed onto ``target`` through the cell keys; -1 if absent."""
    src = config.domain
    if src is target:
        return config.bits
    order = np.argsort(src.keys)
    pos = np.searchsorted(src.keys[order], target.keys)
    pos = np.minimum(pos, len(order) - 1)
    hit = src.keys[order][pos] == target.keys
    out = np.full(target.n_cells, -1, dtype=np.int8)
    out[hit] = config.bits[order][pos[hit]]
    return out


def _endpoints(eid: int, W: int) -> tuple[int, int]:
    g, k = divmod(int(eid), 3)
    a = 2 * g
    return a, int(_hex.vertex_nbrs(a, W)[k])


def _oriented(eid: int, cell_g: int, W: int) -> tuple[int, int]:
    """Endpoints (a, b) of a boundary edge such that walking a -> b keeps the cell on the left."""
    a, b = _endpoints(eid, W)
    hb = _hex.vertex_hexes(b, W)
    k = list(_hex.vertex_nbrs(b, W)).index(a)
    if hb[(k + 1) % 3] == cell_g:
        return a, b
    return b, a


def boundary_cycle(domain: Domain) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Boundary edges of the domain in counter-clockwise order.

    Returns (edge ids, exterior labels, oriented endpoints (m, 2)).  The
    domain interior is on the left of each oriented edge.
    """
    got = _CYCLES.get(domain)
    if got is not None:
        return got
    g = domain.grid
    code, W = g.code, g.W
    be = lattice.boundary_edges(domain)
    eid0, cell0 = int(be[0, 0]), int(be[0, 1])
    prev, cur = _oriented(eid0, cell0, W)
    eids, labels, ends = [], [], []
    e, ext = eid0, int(be[0, 2])
    while True:
        eids.append(e)
        labels.append(int(code[ext]))
        ends.append((prev, cur))
        hc = _hex.vertex_hexes(cur, W)
        nb = list(_hex.vertex_nbrs(cur, W))
        k = nb.index(prev)
        f = hc[k]
        if code[f] >= 0:
            j, ext = (k + 1) % 3, hc[(k + 2) % 3]
        else:
            j, ext = (k + 2) % 3, f
        e = int(_hex.edge_id(cur, j, W))
        prev, cur = cur, int(nb[j])
        if e == eid0:
            break
    if len(eids) != be.shape[0]:
        raise RuntimeError("domain boundary is not a single closed curve")
    out = (np.array(eids, dtype=np.int64), np.array(labels, dtype=np.int64),
           np.array(ends, dtype=np.int64))
    _CYCLES[domain] = out
    return out


def start_edges(domain: Domain, label: int) -> np.ndarray:
    """Positions in the boundary cycle whose exterior hexagon carries ``label``."""
    _, labels, _ = boundary_cycle(domain)
    return np.flatnonzero(labels == label)


def _start_index(domain, label, seed, trial, start):
    idx = start_edges(domain, label)
    if idx.size == 0:
        raise ValueError(f"domain has no {LABEL_NAMES[label]} boundary")
    if start is None:
        start = rng.choice(seed, trial, idx.size, _SALT_START)
    if not 0 <= start < idx.size:
        raise ValueError(f"start index {start} outside 0..{idx.size - 1}")
    return int(idx[start])


def _midpoint(ws: _Workspace, a: int, b: int) -> tuple[float, float]:
    g = ws.domain.grid
    xa, ha = _hex.vertex_xh(a, g.W, g.u0, g.v0)
    xb, hb = _hex.vertex_xh(b, g.W, g.u0, g.v0)
    return ((xa + xb) / 12.0, np.sqrt(3.0) * (ha + hb) / 12.0)


def _read(ws: _Workspace, cell: int, seed, trial, p) -> int:
    """Colour of one cell through the recording reader."""
    col, n = _walk._colour(cell, ws.bits, ws.domain.keys, seed, trial, p, ws.seen,
                           ws.stamp, ws.revealed, ws.nrev)
    ws.nrev = n
    return int(col)


# --------------------------------------------------------------- chordal

def _chordal(ws: _Workspace, pos: int, zeta: tuple, flip: int, seed, trial, p) -> ExplorationRun:
    dom = ws.domain
    g = dom.grid
    eids, labels, ends = boundary_cycle(dom)
    m = eids.shape[0]
    code = ws.ecode
    # counter-clockwise from p0 until zeta acts white, clockwise acts black
    terminal = np.isin(labels, zeta)
    code[eids] = np.where(terminal, _walk.EC_TERMINAL - labels, _walk.EC_NONE)
    i = (pos + 1) % m
    while not terminal[i] and i != pos:
        code[eids[i]] = _walk.EC_WHITE
        i = (i + 1) % m
    i = (pos - 1) % m
    while not terminal[i] and i != pos:
        code[eids[i]] = _walk.EC_BLACK
        i = (i - 1) % m
    e0 = int(eids[pos])
    a, b = int(ends[pos, 0]), int(ends[pos, 1])
    k = list(_hex.vertex_nbrs(b, g.W)).index(a)
    c0 = int(g.code[_hex.vertex_hexes(b, g.W)[(k + 1) % 3]])
    white = (_read(ws, c0, seed, trial, p) ^ flip) == 1
    # keep black on the left: a black c0 (on the left of a -> b) sends the walk to b
    prev, cur = (b, a) if white else (a, b)
    ws.vstamp += 1
    status, label, n, nrev = _walk.chordal_walk(
        g.code, g.W, prev, cur, e0, code, flip, ws.bits, dom.keys, seed, trial, p,
        ws.seen, ws.stamp, ws.revealed, ws.nrev, ws.vmark, ws.vstamp, ws.path, ws.lhex, ws.rhex)
    ws.nrev = nrev
    if status != _walk.STOP_TERMINAL:
        raise RuntimeError("chordal interface got stuck")
    return ExplorationRun(ws.path[:n].copy(), ws.revealed[:nrev].copy(), label == LEFT, e0,
                          _midpoint(ws, a, b), "+".join(LABEL_NAMES[z] for z in zeta),
                          LABEL_NAMES[label], dom)


def chordal_interface(domain: Domain, start: int | None = None, zeta=("top", "left"),
                      flip: int = 0, seed: int = 0, trial: int = 0,
                      config: Configuration | None = None, p: float = 0.5) -> ExplorationRun:
    """Interface from the midpoint of a right-hand boundary edge to the arc ``zeta``.

    Black stays on the left.  ``flip=1`` swaps the roles of the colours.
    ``outcome`` is whether the walk ended on the left-hand side.
    """
    names = {v: k for k, v in LABEL_NAMES.items()}
    try:
        zeta = tuple(names[z] for z in zeta)
    except KeyError as err:
        raise ValueError(f"unknown boundary arc {err}") from None
    if not zeta or RIGHT in zeta:
        raise ValueError("zeta must be a non-empty set of arcs away from the start side")
    ws = _workspace(domain)
    ws.load(config)
    ws.nrev = 0
    pos = _start_index(domain, RIGHT, seed, trial, start)
    return _chordal(ws, pos, zeta, flip, seed, trial, p)


@dataclass
class BoxCrossing:
    Q: bool
    beta: ExplorationRun
    beta_prime: ExplorationRun
    revealed: np.ndarray = field(repr=False)


def box_crossing_algorithm(domain: Domain, seed: int = 0, trial: int = 0,
                           config: Configuration | None = None, start: int | None = None,
                           p: float = 0.5) -> BoxCrossing:
    """Left-right crossing from two interfaces started at one random right edge.

    The first runs to the top or left side, the second (colours exchanged)
    to the bottom or left side; the box is crossed iff either ends on the
    left.  Both read one configuration, so ``revealed`` is their union.
    """
    if domain.lattice != lattice.TRIANGULAR or domain.kind not in ("box", "rhombus"):
        raise ValueError("the box algorithm needs a triangular box or rhombus")
    ws = _workspace(domain)
    ws.load(config)
    ws.nrev = 0
    pos = _start_index(domain, RIGHT, seed, trial, start)
    beta = _chordal(ws, pos, (TOP, LEFT), 0, seed, trial, p)
    beta2 = _chordal(ws, pos, (BOTTOM, LEFT), 1, seed, trial, p)
    return BoxCrossing(beta.outcome or beta2.outcome, beta, beta2, ws.revealed[:ws.nrev].copy())


# ---------------------------------------------------------------- radial

def disk_domain(R: int) -> Domain:
    dom = _DISKS.get(R)
    if dom is None:
        dom = _DISKS[R] = lattice.disk(R)
    return dom


def hole_mask(domain: Domain, r: int) -> np.ndarray:
    """Grid flags for the hexagons lying in the open r-disk (empty for r <= 0)."""
    g = domain.grid
    flags = np.zeros(g.code.shape[0], dtype=np.bool_)
    if r > 0:
        inside = _hex.hexes_inside_open_disk(domain.cells, 36 * r * r)
        flags[g.gid(domain.cells[inside, 0], domain.cells[inside, 1])] = True
    return flags


def _target_edge(domain: Domain):
    """The edge between the origin hexagon and its east neighbour."""
    g = domain.grid
    h0 = int(g.gid(0, 0))
    vs = _hex.hex_vertices(h0, g.W)
    qa, qb = int(vs[0]), int(vs[1])
    k = list(_hex.vertex_nbrs(qb, g.W)).index(qa)
    return int(_hex.edge_id(qb, k, g.W)), qa, qb


_STATUS = {_walk.STOP_DISK: "hole", _walk.STOP_LOOP: "loop", _walk.STOP_TARGET: "target"}


def _radial(domain: Domain, hole: np.ndarray, truncate: bool, seed, trial, config, start, p):
    ws = _workspace(domain)
    ws.load(config)
    ws.nrev = 0
    g = domain.grid
    eids, labels, ends = boundary_cycle(domain)
    pos = _start_index(domain, OUTER, seed, trial, start)
    a, b = int(ends[pos, 0]), int(ends[pos, 1])
    hb = _hex.vertex_hexes(b, g.W)
    k = list(_hex.vertex_nbrs(b, g.W)).index(a)
    c0g, o0g = int(hb[(k + 1) % 3]), int(hb[(k + 2) % 3])
    white = _read(ws, int(g.code[c0g]), seed, trial, p) == 1
    a0, b0 = (a, b) if white else (b, a)
    q_edge, qa, qb = _target_edge(domain)
    ws.vstamp += 1
    status, n, nrev, ms = _walk.radial_walk(
        g.code, g.W, g.u0, g.v0, a0, b0, c0g, o0g, q_edge, qa, qb, hole, truncate,
        ws.bits, domain.keys, seed, trial, p, ws.seen, ws.stamp, ws.revealed, ws.nrev,
        ws.vmark, ws.vstamp, ws.wind, ws.dead, ws.mark, ws.mstamp, ws.qA, ws.qB, ws.path)
    ws.mstamp = ms
    ws.nrev = nrev
    if status not in _STATUS:
        raise RuntimeError("radial interface got stuck")
    return ExplorationRun(ws.path[:n].copy(), ws.revealed[:nrev].copy(),
                          status == _walk.STOP_DISK, int(eids[pos]), _midpoint(ws, a, b),
                          "q0", _STATUS[status], domain)


def radial_interface(R: int, seed: int = 0, trial: int = 0, config: Configuration | None = None,
                     start: int | None = None, truncate: bool = True, hole_radius: int = 0,
                     p: float = 0.5) -> ExplorationRun:
    """Radial interface in the R-disk from a random boundary edge towards the origin.

    With ``truncate`` the walk stops once it closes a counter-clockwise loop
    around the origin; with ``hole_radius > 0`` it also stops on reaching a
    hexagon of the open ``hole_radius``-disk.  Status is "target", "loop" or
    "hole".
    """
    dom = disk_domain(R)
    return _radial(dom, hole_mask(dom, hole_radius), truncate, seed, trial, config, start, p)


def annulus_algorithm(r: int, R: int, seed: int = 0, trial: int = 0,
                      config: Configuration | None = None, start: int | None = None,
                      p: float = 0.5) -> tuple[bool, ExplorationRun]:
    """White crossing of the annulus from the truncated radial interface."""
    if not 1 <= r < R:
        raise ValueError(f"annulus algorithm needs 1 <= r < R, got r={r}, R={R}")
    run = radial_interface(R, seed, trial, config, start, True, r, p)
    return run.outcome, run


# ------------------------------------------------------------ revealment

def measure_revealment(algorithm: str, params: tuple, trials: int, seed: int = 0,
                       trial0: int = 0) -> RevealmentRecord:
    """Per-cell frequency of being read, over ``trials`` independent runs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if algorithm == "box":
        (R,) = params
        dom = lattice.box(R)
        counts = np.zeros(dom.n_cells, dtype=np.int64)
        for t in range(trial0, trial0 + trials):
            counts[box_crossing_algorithm(dom, seed, t).revealed] += 1
    elif algorithm == "annulus":
        r, R = params
        dom = disk_domain(R)
        hole = hole_mask(dom, r)
        counts = np.zeros(dom.n_cells, dtype=np.int64)
        for t in range(trial0, trial0 + trials):
            counts[_radial(dom, hole, True, seed, t, None, None, 0.5).revealed] += 1
    elif algorithm == "rhombus":
        w, h = params
        dom = lattice.rhombus(w, h)
        counts = np.zeros(dom.n_cells, dtype=np.int64)
        for t in range(trial0, trial0 + trials):
            counts[box_crossing_algorithm(dom, seed, t).revealed] += 1
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected box, annulus or rhombus")
    return RevealmentRecord(counts, trials, dom)


# ------------------------------------------------------------ separation

def separation_statistic(config: Configuration) -> SeparationSample:
    """Least distance between outer endpoints of interfaces crossing the annulus."""
    dom = config.domain
    if dom.kind != "annulus" or dom.lattice != lattice.TRIANGULAR:
        raise ValueError("separation statistic needs a triangular annulus")
    ends = interface_endpoints(config)
    n = int(ends.shape[0])
    if n < 2:
        return SeparationSample(float("inf"), n)
    g = dom.grid
    xh = np.array([_hex.vertex_xh(int(v), g.W, g.u0, g.v0) for v in ends], dtype=float)
    xy = np.stack([xh[:, 0] / 6.0, np.sqrt(3.0) * xh[:, 1] / 6.0], axis=1)
    d = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(-1))
    d[np.diag_indices(n)] = np.inf
    return SeparationSample(float(d.min()), n)
