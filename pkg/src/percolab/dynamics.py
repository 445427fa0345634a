"""Continuous-time dynamical percolation on a finite domain.

Every cell carries a rate-1 Poisson clock; at each ring its colour is
replaced by a fresh fair coin.  The state at time 0 is the static sample of
the same ``(seed, trial)``, and the clock of a cell is a pure function of
``(seed, trial, cell key)``, so trajectories are generated lazily and
reproducibly in any order.

Only rings that change a colour matter for events; those are called flips.
Time sets are stored as sorted half-open intervals ``[a, b)``, matching the
right-continuity of the process.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import fourier, rng, sampler
from .lattice import Domain
from .sampler import Configuration, EventSpec

EPS_LEVELS = 16


# ------------------------------------------------------------------ clocks

@njit(cache=True)
def _cell_base(seed, trial, key):
    return rng.hash4(seed, trial, key, rng.STREAM_CLOCK)


@njit(cache=True)
def _ring(base, j):
    """Inter-arrival gap and coin of the j-th ring of a cell."""
    u = rng.uniform(base, np.uint64(j), np.uint64(0), rng.STREAM_CLOCK)
    gap = -math.log1p(-u)
    coin = 1 if rng.uniform(base, np.uint64(j), np.uint64(1), rng.STREAM_CLOCK) < 0.5 else 0
    return gap, coin


@njit(cache=True)
def _count_rings(base, T):
    t = 0.0
    j = 0
    while True:
        gap, _c = _ring(base, j)
        t += gap
        if t > T:
            return j
        j += 1


@njit(cache=True)
def _cell_rings(seed, trial, key, T):
    base = _cell_base(seed, trial, key)
    m = _count_rings(base, T)
    times = np.empty(m, dtype=np.float64)
    coins = np.empty(m, dtype=np.int8)
    t = 0.0
    for j in range(m):
        gap, c = _ring(base, j)
        t += gap
        times[j] = t
        coins[j] = c
    return times, coins


@njit(cache=True)
def _all_flips(seed, trial, keys, initial, T):
    """Colour-changing rings of all cells, sorted by time."""
    n = keys.shape[0]
    total = 0
    bases = np.empty(n, dtype=np.uint64)
    for i in range(n):
        bases[i] = _cell_base(seed, trial, keys[i])
        total += _count_rings(bases[i], T)
    cells = np.empty(total, dtype=np.int64)
    times = np.empty(total, dtype=np.float64)
    k = 0
    for i in range(n):
        state = initial[i]
        t = 0.0
        j = 0
        while True:
            gap, c = _ring(bases[i], j)
            t += gap
            if t > T:
                break
            if c != state:
                cells[k] = i
                times[k] = t
                k += 1
                state = c
            j += 1
    order = np.argsort(times[:k], kind="mergesort")
    return cells[:k][order], times[:k][order]


@njit(cache=True)
def _states_at(seed, trial0, trials, keys, t):
    """Bits at time 0 and time t for consecutive trials."""
    n = keys.shape[0]
    x0 = np.empty((trials, n), dtype=np.int8)
    xt = np.empty((trials, n), dtype=np.int8)
    for r in range(trials):
        trial = np.uint64(trial0 + r)
        for i in range(n):
            s = rng.bit(seed, trial, keys[i], 0.5)
            x0[r, i] = s
            base = _cell_base(seed, trial, keys[i])
            clock = 0.0
            j = 0
            while True:
                gap, c = _ring(base, j)
                clock += gap
                if clock > t:
                    break
                s = c
                j += 1
            xt[r, i] = s
    return x0, xt


# ------------------------------------------------------------ trajectories

@dataclass
class Trajectory:
    """Rings of every cell on ``[0, T]``; per-cell lists are built on first use."""
    domain: Domain = field(repr=False)
    T: float
    seed: int = 0
    trial: int = 0
    _rings: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"horizon must be positive, got {self.T}")

    @property
    def initial(self) -> np.ndarray:
        return sampler.sample(self.domain, 0.5, self.seed, self.trial).bits

    def rings(self, cell: int) -> tuple[np.ndarray, np.ndarray]:
        """Ring times (strictly increasing) and the coin drawn at each."""
        if cell not in self._rings:
            key = self.domain.keys[cell]
            self._rings[cell] = _cell_rings(np.uint64(self.seed), np.uint64(self.trial),
                                            np.uint64(key), float(self.T))
        return self._rings[cell]

    def flips(self) -> tuple[np.ndarray, np.ndarray]:
        """(cells, times) of colour changes over all cells, in time order."""
        return _all_flips(np.uint64(self.seed), np.uint64(self.trial),
                          self.domain.keys.astype(np.uint64), self.initial, float(self.T))

    def state_at(self, t: float) -> np.ndarray:
        if not 0 <= t <= self.T:
            raise ValueError(f"time {t} outside [0, {self.T}]")
        bits = self.initial.copy()
        cells, times = self.flips()
        for c in cells[times <= t]:
            bits[c] ^= 1
        return bits

    def configuration(self, t: float) -> Configuration:
        return Configuration(self.domain, self.state_at(t), self.seed, self.trial)

    def export(self, path) -> None:
        """Write ``cell time coin`` lines for every ring, sorted by time."""
        rows = []
        for c in range(self.domain.n_cells):
            times, coins = self.rings(c)
            rows += [(t, c, int(k)) for t, k in zip(times, coins)]
        rows.sort()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for t, c, k in rows:
                fh.write(f"{c} {float(t)!r} {k}\n")


def generate_trajectory(domain: Domain, T: float, seed: int = 0, trial: int = 0) -> Trajectory:
    return Trajectory(domain, float(T), seed, trial)


@dataclass(frozen=True)
class FlipHistory:
    """Initial bits plus time-ordered flips; enough to evaluate any event path."""
    domain: Domain = field(repr=False)
    T: float
    initial: np.ndarray = field(repr=False)
    cells: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, traj: Trajectory) -> "FlipHistory":
        cells, times = traj.flips()
        return cls(traj.domain, traj.T, traj.initial, cells, times)

    def reversed(self) -> "FlipHistory":
        final = self.initial.copy()
        np.bitwise_xor.at(final, self.cells, 1)
        return FlipHistory(self.domain, self.T, final, self.cells[::-1].copy(),
                           (self.T - self.times[::-1]).copy())


# ----------------------------------------------------------------- time sets

@dataclass(frozen=True)
class TimeSet:
    T: float
    intervals: np.ndarray
    label: str = ""
    flips: int = 0

    def __post_init__(self):
        iv = self.intervals
        if iv.size and (np.any(iv[:, 0] >= iv[:, 1]) or np.any(iv[1:, 0] <= iv[:-1, 1])
                        or iv[0, 0] < 0 or iv[-1, 1] > self.T):
            raise ValueError("intervals must be disjoint, sorted and inside [0, T]")

    @property
    def measure(self) -> float:
        return float((self.intervals[:, 1] - self.intervals[:, 0]).sum())

    @property
    def boundary_count(self) -> int:
        """Endpoints strictly inside (0, T)."""
        ends = self.intervals.ravel()
        return int(((ends > 0) & (ends < self.T)).sum())

    def contains(self, t: float) -> bool:
        iv = self.intervals
        return bool(np.any((iv[:, 0] <= t) & (t < iv[:, 1])))


@njit(cache=True)
def _scan(kind, nbr, colors, a_mask, b_mask, c, j, allowed, cells, times, T):
    value = sampler._event_value(kind, nbr, colors, a_mask, b_mask, c, j, allowed)
    ends = np.empty(cells.shape[0] + 2, dtype=np.float64)
    m = 0
    if value:
        ends[m] = 0.0
        m += 1
    for e in range(cells.shape[0]):
        colors[cells[e]] = 1 - colors[cells[e]]
        now = sampler._event_value(kind, nbr, colors, a_mask, b_mask, c, j, allowed)
        if now != value:
            ends[m] = times[e]
            m += 1
            value = now
    if value:
        ends[m] = T
        m += 1
    return ends[:m]


def _scan_python(hist: FlipHistory, event: EventSpec) -> np.ndarray:
    bits = hist.initial.copy()
    value = sampler.decide(Configuration(hist.domain, bits), event)
    ends = [0.0] if value else []
    for c, t in zip(hist.cells, hist.times):
        bits[c] ^= 1
        now = sampler.decide(Configuration(hist.domain, bits), event)
        if now != value:
            ends.append(float(t))
            value = now
    if value:
        ends.append(hist.T)
    return np.array(ends, dtype=np.float64)


def _merge_touching(ends: np.ndarray) -> np.ndarray:
    # two flips at the same instant cannot happen a.s.; guard against a zero-length gap anyway
    iv = ends.reshape(-1, 2)
    keep = iv[:, 1] > iv[:, 0]
    return iv[keep]


def time_set(hist: FlipHistory, event: EventSpec) -> TimeSet:
    """Exact maximal intervals on which ``event`` holds along a flip history."""
    cfg = Configuration(hist.domain, hist.initial)
    sampler._check(cfg, event)
    args = None
    if event.kind != sampler.ALTERNATING or hist.domain.lattice != "triangular":
        args = sampler._kernel_args(cfg, event)
    if args is None:
        ends = _scan_python(hist, event)
    else:
        kind, a, b, c, j = args
        colors = cfg.colors.copy()
        allowed = np.ones(hist.domain.n_nodes, dtype=np.bool_)
        ends = _scan(kind, hist.domain.nbr, colors, a, b, c, j, allowed,
                     hist.cells.astype(np.int64), hist.times, float(hist.T))
    return TimeSet(hist.T, _merge_touching(ends), event.label, int(hist.cells.size))


def crossing_time_set(domain: Domain, event: EventSpec, T: float, seed: int = 0,
                      trial: int = 0) -> TimeSet:
    return time_set(FlipHistory.of(generate_trajectory(domain, T, seed, trial)), event)


# -------------------------------------------------------------- statistics

@dataclass(frozen=True)
class MeanEstimate:
    mean: float
    stderr: float
    trials: int

    def within(self, value: float, sigmas: float = 4.0) -> bool:
        return abs(self.mean - value) <= sigmas * max(self.stderr, 1e-15)


def _mean(x) -> MeanEstimate:
    x = np.asarray(x, dtype=np.float64)
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.inf
    return MeanEstimate(float(x.mean()), se, int(x.size))


def evaluate_many(domain: Domain, event: EventSpec, bits: np.ndarray) -> np.ndarray:
    """Event value for each row of a (trials, cells) bit matrix."""
    n = domain.n_cells
    if n <= 16:
        table = event_truth_table(domain, event).values
        idx = bits.astype(np.int64) @ (1 << np.arange(n, dtype=np.int64))
        return table[idx].astype(bool)
    return np.array([sampler.decide(Configuration(domain, row), event) for row in bits])


_TABLES: dict = {}


def event_truth_table(domain: Domain, event: EventSpec) -> fourier.TruthTable:
    """Indicator of ``event`` as a function of the cell bits (bit i = cell i)."""
    key = (id(domain), event)
    if key not in _TABLES:
        n = domain.n_cells
        if n > fourier.MAX_BITS:
            raise ValueError(f"{n} cells is too many for a truth table")
        xs = np.arange(1 << n, dtype=np.int64)
        rows = ((xs[:, None] >> np.arange(n)) & 1).astype(np.int8)
        vals = [int(sampler.decide(Configuration(domain, r), event)) for r in rows]
        _TABLES[key] = (domain, fourier.TruthTable(n, np.array(vals, dtype=np.int64)))
    return _TABLES[key][1]


@dataclass(frozen=True)
class Correlation:
    t: float
    estimate: MeanEstimate
    exact: float | None = None

    @property
    def agrees(self) -> bool | None:
        return None if self.exact is None else self.estimate.within(self.exact)


def spectral_correlation(f: fourier.TruthTable, t: float) -> float:
    """Sum over S of coefficient^2 * exp(-t |S|)."""
    w = fourier.level_weights(fourier.walsh_transform(f))
    return float(sum(float(wk) * math.exp(-t * k) for k, wk in enumerate(w)))


def correlation_products(domain: Domain, event: EventSpec, t: float, seed: int, trial0: int,
                         trials: int) -> np.ndarray:
    """f(state at 0) * f(state at t) for consecutive trials."""
    if t < 0:
        raise ValueError(f"lag must be nonnegative, got {t}")
    x0, xt = _states_at(np.uint64(seed), trial0, trials, domain.keys.astype(np.uint64), float(t))
    return (evaluate_many(domain, event, x0) & evaluate_many(domain, event, xt)).astype(np.int8)


def time_correlation(domain: Domain, event: EventSpec, t: float, trials: int,
                     seed: int = 0, trial0: int = 0, chunk: int = 100_000) -> Correlation:
    """Monte Carlo E[f(state at 0) f(state at t)], with the spectral value when small."""
    if t < 0:
        raise ValueError(f"lag must be nonnegative, got {t}")
    prods = [correlation_products(domain, event, t, seed, trial0 + start,
                                  min(chunk, trials - start))
             for start in range(0, trials, chunk)]
    est = _mean(np.concatenate(prods))
    exact = None
    if domain.n_cells <= 12:
        exact = spectral_correlation(event_truth_table(domain, event), t)
    return Correlation(float(t), est, exact)


@dataclass(frozen=True)
class FlipCount:
    N: MeanEstimate
    T: float

    @property
    def influence(self) -> float:
        return 2.0 * self.N.mean / self.T

    @property
    def influence_stderr(self) -> float:
        return 2.0 * self.N.stderr / self.T


def flip_boundary_count(domain: Domain, event: EventSpec, T: float, trials: int,
                        seed: int = 0, trial0: int = 0) -> FlipCount:
    """Mean number of switches of the event in (0, T); twice its rate estimates the influence."""
    counts = [crossing_time_set(domain, event, T, seed, trial0 + r).boundary_count
              for r in range(trials)]
    return FlipCount(_mean(counts), float(T))


def static_influence(domain: Domain, event: EventSpec, trials: int, seed: int = 0,
                     trial0: int = 0) -> MeanEstimate:
    """Mean size of the pivotal set over static samples."""
    sizes = [sampler.pivotal_set(sampler.sample(domain, 0.5, seed, trial0 + r), event).size
             for r in range(trials)]
    return _mean(sizes)


def eps_grid(T: float, levels: int = EPS_LEVELS) -> np.ndarray:
    return T * 2.0 ** -np.arange(1, levels + 1)


def covering_numbers(ts: TimeSet, eps) -> np.ndarray:
    """Fewest length-eps intervals covering the set; greedy from the left is optimal."""
    eps = np.atleast_1d(np.asarray(eps, dtype=np.float64))
    if np.any(eps <= 0):
        raise ValueError("eps must be positive")
    out = np.zeros(eps.size, dtype=np.int64)
    for q, e in enumerate(eps):
        reach = -math.inf
        count = 0
        for a, b in ts.intervals:
            if b <= reach:
                continue
            start = max(a, reach)
            m = max(1, math.ceil((b - start) / e - 1e-9))
            count += m
            reach = start + m * e
        out[q] = count
    return out


def covering_bound(ts: TimeSet, eps) -> np.ndarray:
    eps = np.atleast_1d(np.asarray(eps, dtype=np.float64))
    return 2.0 * ts.measure / eps + 4 * ts.boundary_count + 1


def _riesz_kernel(x, gamma):
    return np.abs(x) ** (2.0 - gamma) / ((1.0 - gamma) * (2.0 - gamma))


def riesz_energy(ts: TimeSet, gamma: float, normalize: float | None = None) -> float:
    """Double integral of |t - s|^-gamma against Lebesgue measure on the set.

    With ``normalize`` the measure is divided by that mass first.
    """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    iv = ts.intervals
    if iv.size == 0:
        return 0.0
    a, b = iv[:, 0][:, None], iv[:, 1][:, None]
    c, d = iv[:, 0][None, :], iv[:, 1][None, :]
    G = lambda x: _riesz_kernel(x, gamma)  # noqa: E731
    energy = float((G(b - c) - G(a - c) - G(b - d) + G(a - d)).sum())
    if normalize is not None:
        if not normalize > 0:
            raise ValueError(f"normalising mass must be positive, got {normalize}")
        energy = energy / normalize / normalize
    return energy


@dataclass(frozen=True)
class DimensionBound:
    value: float | None
    regime: str

    @property
    def empty(self) -> bool:
        return self.regime == "empty"


def dimension_bound(p_hat: float, i_hat: float) -> DimensionBound:
    """Upper bound 1 / (1 - log P / log I) on the dimension of the exceptional set."""
    if not 0 < p_hat <= 1:
        raise ValueError(f"probability must lie in (0, 1], got {p_hat}")
    if not i_hat > 0:
        raise ValueError(f"influence must be positive, got {i_hat}")
    if i_hat <= 1:
        return DimensionBound(None, "empty")
    denom = 1.0 - math.log(p_hat) / math.log(i_hat)
    if denom == 0:
        return DimensionBound(None, "undefined")
    return DimensionBound(1.0 / denom, "bound")


@dataclass
class ExceptionalTimeStats:
    N: np.ndarray
    X: np.ndarray
    eps: np.ndarray
    covering: np.ndarray
    bound_violations: int
    p_hat: MeanEstimate
    i_hat: float

    @property
    def second_moment_ratio(self) -> float:
        m2 = float((self.X ** 2).mean())
        return float(self.X.mean()) ** 2 / m2 if m2 > 0 else math.nan


def exceptional_time_stats(domain: Domain, event: EventSpec, T: float, trials: int,
                           seed: int = 0, trial0: int = 0,
                           levels: int = EPS_LEVELS) -> ExceptionalTimeStats:
    eps = eps_grid(T, levels)
    N = np.empty(trials, dtype=np.int64)
    X = np.empty(trials)
    cov = np.empty((trials, eps.size), dtype=np.int64)
    start = np.empty(trials, dtype=bool)
    bad = 0
    for r in range(trials):
        ts = crossing_time_set(domain, event, T, seed, trial0 + r)
        N[r] = ts.boundary_count
        X[r] = ts.measure
        cov[r] = covering_numbers(ts, eps)
        bad += int(np.sum(cov[r] > covering_bound(ts, eps)))
        start[r] = ts.contains(0.0)
    return ExceptionalTimeStats(N, X, eps, cov, bad, _mean(start), 2.0 * N.mean() / T)
