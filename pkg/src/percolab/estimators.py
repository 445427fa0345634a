"""Arm probabilities, exponent fits and the other Monte Carlo summaries.

All estimates are driven by ``(seed, trial)`` pairs, so related events and
different radii are decided on the same configurations whenever that is
possible.  Confidence intervals are Wilson score intervals at 95%.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import _multi, dynamics, explore, lattice, rng, sampler
from .sampler import EventSpec

Z95 = 1.959963984540054

ONE_ARM_EXPONENT = -5.0 / 48.0
FIVE_ARM_EXPONENT = -2.0


def alternating_exponent(k: int) -> float:
    """Whole-plane k arms, not all of one colour (k >= 2)."""
    return (1.0 - k * k) / 12.0


def half_plane_exponent(k: int) -> float:
    return -k * (k + 1) / 6.0


def reference_exponent(event: EventSpec) -> float | None:
    if event.kind == sampler.ONE_ARM:
        return ONE_ARM_EXPONENT
    if event.kind == sampler.ALTERNATING:
        return alternating_exponent(event.k)
    if event.kind == sampler.HALF_PLANE:
        return half_plane_exponent(len(event.colors))
    if event.kind == sampler.FIVE_ARM:
        return FIVE_ARM_EXPONENT
    return None


class InsufficientTrials(ValueError):
    pass


def wilson(successes: int, trials: int) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(0.95, method="wilson")
    return (float(ci.low), float(ci.high))


@dataclass(frozen=True)
class ArmEstimate:
    event: EventSpec
    r: int
    R: int
    trials: int
    successes: int
    seed: int = 0
    trial0: int = 0
    lattice: str = lattice.TRIANGULAR
    conventional: bool = False

    def __post_init__(self):
        if not 0 <= self.successes <= self.trials:
            raise ValueError(f"successes {self.successes} outside 0..{self.trials}")

    @property
    def p_hat(self) -> float:
        if self.conventional:
            return 1.0
        return self.successes / self.trials if self.trials else math.nan

    @property
    def ci(self) -> tuple[float, float]:
        if self.conventional:
            return (1.0, 1.0)
        return wilson(self.successes, self.trials)

    @property
    def log_var(self) -> float:
        """Delta-method variance of log p_hat."""
        p = self.p_hat
        if self.conventional:
            return 0.0
        if self.successes == 0:
            return math.inf
        return max(1.0 - p, 1.0 / self.trials) / (self.trials * p)

    @property
    def stderr(self) -> float:
        if self.conventional or not self.trials:
            return 0.0
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.trials)


def _convention(event, r, R, lat, seed, trial0) -> ArmEstimate:
    return ArmEstimate(event, r, R, 0, 0, seed, trial0, lat, conventional=True)


def arm_domain(event: EventSpec, r: int, R: int, lat: str = lattice.TRIANGULAR):
    if event.kind == sampler.HALF_PLANE:
        return lattice.half_plane_annulus(r, R)
    if event.kind == sampler.FIVE_ARM:
        lat = lattice.SQUARE
    if event.kind not in sampler._ANNULAR:
        raise ValueError(f"{event.label} is not an arm event")
    return lattice.annulus(r, R, lattice=lat)


def estimate_arm(event: EventSpec, r: int, R: int, trials: int, seed: int = 0,
                 trial0: int = 0, lat: str = lattice.TRIANGULAR, method: str = "decide",
                 p: float = 0.5) -> ArmEstimate:
    """Monte Carlo arm probability.

    ``method`` is ``decide`` (full sample, brute force), ``explore`` (the
    annulus exploration, one-arm only) or ``multi`` (lazy search shared
    across radii).  For ``r >= R`` the answer is 1 by convention and nothing
    is sampled.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if r >= R:
        return _convention(event, r, R, lat, seed, trial0)
    if method == "multi":
        return estimate_arm_curve(event, r, (R,), trials, seed, trial0, lat)[0]
    if method == "explore":
        if event.kind != sampler.ONE_ARM or event.color != sampler.WHITE or p != 0.5:
            raise ValueError("the exploration estimator handles the white one-arm event only")
        hits = sum(explore.annulus_algorithm(r, R, seed, trial0 + t)[0] for t in range(trials))
        return ArmEstimate(event, r, R, trials, int(hits), seed, trial0, lat)
    if method != "decide":
        raise ValueError(f"unknown method {method!r}")
    dom = arm_domain(event, r, R, lat)
    hits = sum(sampler.decide(sampler.sample(dom, p, seed, trial0 + t), event)
               for t in range(trials))
    return ArmEstimate(event, r, R, trials, int(hits), seed, trial0, dom.lattice)


def _multi_supported(event: EventSpec, lat: str) -> bool:
    if lat != lattice.TRIANGULAR:
        return False
    if event.kind in (sampler.ONE_ARM, sampler.ALTERNATING):
        return True
    return event.kind == sampler.HALF_PLANE and len(event.colors) == 1


def arm_outcomes(event: EventSpec, r: int, radii, seed: int, trial0: int, trials: int,
                 lat: str = lattice.TRIANGULAR) -> np.ndarray:
    """(trials, len(radii)) event indicators; radii must all exceed r."""
    radii = [int(R) for R in radii]
    if any(R <= r for R in radii):
        raise ValueError(f"outer radii must exceed r={r}")
    if _multi_supported(event, lat):
        half = event.kind == sampler.HALF_PLANE
        order = sorted(set(radii))
        mr = _multi.multi_radius(r, tuple(order), half)
        if event.kind == sampler.ALTERNATING:
            ok = mr.interface_counts(seed, trial0, trials) >= event.k
        else:
            color = event.colors[0] if half else event.color
            ok = mr.one_arm(color, seed, trial0, trials)
        return ok[:, [order.index(R) for R in radii]]
    # arm events are decreasing in R on nested annuli sharing their bits, so a
    # trial that fails at some radius is skipped at every larger one
    order = sorted(set(radii))
    doms = [arm_domain(event, r, R, lat) for R in order]
    ok = np.zeros((trials, len(order)), dtype=bool)
    for t in range(trials):
        for q, dom in enumerate(doms):
            if not sampler.decide(sampler.sample(dom, 0.5, seed, trial0 + t), event):
                break
            ok[t, q] = True
    return ok[:, [order.index(R) for R in radii]]


def estimate_arm_curve(event: EventSpec, r: int, radii, trials: int, seed: int = 0,
                       trial0: int = 0, lat: str = lattice.TRIANGULAR,
                       chunk: int = 5000) -> list[ArmEstimate]:
    """Estimates for every outer radius, all from the same configurations."""
    radii = [int(R) for R in radii]
    live = sorted({R for R in radii if R > r})
    hits = np.zeros(len(live), dtype=np.int64)
    if live:
        for start in range(0, trials, chunk):
            m = min(chunk, trials - start)
            hits += arm_outcomes(event, r, live, seed, trial0 + start, m, lat).sum(axis=0)
    found = {R: ArmEstimate(event, r, R, trials, int(h), seed, trial0, lat)
             for R, h in zip(live, hits)}
    return [found.get(R) or _convention(event, r, R, lat, seed, trial0) for R in radii]


# ------------------------------------------------------------------- fits

@dataclass(frozen=True)
class ExponentFit:
    log_R: np.ndarray = field(repr=False)
    log_p: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    slope: float
    stderr: float
    intercept: float
    reference: float | None = None
    tolerance: float | None = None

    @property
    def deviation(self) -> float | None:
        return None if self.reference is None else self.slope - self.reference

    @property
    def verdict(self) -> bool | None:
        if self.reference is None or self.tolerance is None:
            return None
        return abs(self.slope - self.reference) <= self.tolerance


def fit_power_law(R, p, sigma=None, reference=None, tolerance=None) -> ExponentFit:
    """Weighted least squares of log p on log R; ``sigma`` is the error of log p."""
    x = np.log(np.asarray(R, dtype=np.float64))
    y = np.log(np.asarray(p, dtype=np.float64))
    if x.size < 3:
        raise ValueError(f"need at least 3 radii, got {x.size}")
    if not np.all(np.isfinite(y)):
        raise InsufficientTrials("zero success count at some radius; cannot fit")
    s = np.ones_like(x) if sigma is None else np.asarray(sigma, dtype=np.float64)
    s = np.maximum(s, 1e-12)
    coef, cov = np.polyfit(x, y, 1, w=1.0 / s, cov="unscaled")
    return ExponentFit(x, y, s, float(coef[0]), float(math.sqrt(cov[0, 0])), float(coef[1]),
                       reference, tolerance)


def fit_exponent(estimates: list[ArmEstimate], reference: float | None = None,
                 tolerance: float | None = None, drop_smallest: bool = True) -> ExponentFit:
    """Log-log slope of the arm probability against R (the smallest R is dropped by default)."""
    est = sorted((e for e in estimates if not e.conventional), key=lambda e: e.R)
    if drop_smallest:
        est = est[1:]
    if len(est) < 3:
        raise ValueError(f"need at least 3 radii after dropping, got {len(est)}")
    zero = [e.R for e in est if e.successes == 0]
    if zero:
        raise InsufficientTrials(f"no successes at R={zero}; increase trials")
    if reference is None:
        reference = reference_exponent(est[0].event)
    sig = [math.sqrt(e.log_var) for e in est]
    return fit_power_law([e.R for e in est], [e.p_hat for e in est], sig, reference, tolerance)


# --------------------------------------------------------- quasi-multiplicativity

@dataclass(frozen=True)
class QuasiMultRow:
    r: int
    r1: int
    r2: int
    ratio: float
    log_stderr: float
    flagged: bool = False

    @property
    def ci(self) -> tuple[float, float]:
        if self.flagged:
            return (math.nan, math.nan)
        s = Z95 * self.log_stderr
        return (self.ratio * math.exp(-s), self.ratio * math.exp(s))


@dataclass(frozen=True)
class QuasiMultReport:
    j: int
    rows: list

    @property
    def spread(self) -> float:
        """max / min ratio over the unflagged triples."""
        ok = [row.ratio for row in self.rows if not row.flagged]
        return max(ok) / min(ok) if ok else math.nan


_QM_STRIDE = 1 << 32


def _qm_plan(triples) -> dict[int, list[int]]:
    need: dict[int, set] = {}
    for r, r1, r2 in triples:
        if not r <= r1 <= r2 or r == r2:
            raise ValueError(f"triple {(r, r1, r2)} must satisfy r <= r' <= r'' and r < r''")
        for a, b in ((r, r1), (r1, r2), (r, r2)):
            if a < b:
                need.setdefault(a, set()).add(b)
    return {r: sorted(outs) for r, outs in sorted(need.items())}


def quasi_mult_counts(j: int, triples, seed: int, trial0: int, trials: int) -> dict:
    """Success counts per (r, R) pair; each inner radius uses its own trial block."""
    event = sampler.alternating_arms(j)
    counts = {}
    for r, outs in _qm_plan(triples).items():
        # disjoint trial blocks keep the three factors of a ratio independent
        ok = arm_outcomes(event, r, outs, seed, r * _QM_STRIDE + trial0, trials)
        for R, h in zip(outs, ok.sum(axis=0)):
            counts[(r, R)] = int(h)
    return counts


def quasi_mult_from_counts(j: int, triples, counts: dict, trials: int) -> QuasiMultReport:
    event = sampler.alternating_arms(j)

    def est(a, b):
        if a >= b:
            return _convention(event, a, b, lattice.TRIANGULAR, 0, 0)
        return ArmEstimate(event, a, b, trials, counts[(a, b)])

    rows = []
    for r, r1, r2 in triples:
        parts = [est(r, r1), est(r1, r2), est(r, r2)]
        if any(e.successes == 0 and not e.conventional for e in parts):
            rows.append(QuasiMultRow(r, r1, r2, math.nan, math.inf, True))
            continue
        a, b, c = (e.p_hat for e in parts)
        se = math.sqrt(sum(e.log_var for e in parts))
        rows.append(QuasiMultRow(r, r1, r2, a * b / c, se))
    return QuasiMultReport(j, rows)


def check_j(j: int):
    if j <= 0 or j % 2:
        raise ValueError(f"j must be a positive even number, got {j}")


def quasi_mult_table(j: int, triples, trials: int, seed: int = 0, trial0: int = 0) -> QuasiMultReport:
    """alpha_j(r, r') alpha_j(r', r'') / alpha_j(r, r'') for each triple."""
    check_j(j)
    triples = [tuple(int(x) for x in t) for t in triples]
    counts = quasi_mult_counts(j, triples, seed, trial0, trials)
    return quasi_mult_from_counts(j, triples, counts, trials)


def increasing_triples(radii) -> list[tuple[int, int, int]]:
    radii = sorted(set(int(x) for x in radii))
    return [(a, b, c) for i, a in enumerate(radii) for k, b in enumerate(radii[i + 1:], i + 1)
            for c in radii[k + 1:]]


# ------------------------------------------------------------- separation

@dataclass(frozen=True)
class SeparationTail:
    a: float
    R: int
    deltas: np.ndarray
    tail: np.ndarray
    trials: int
    crossed: int

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(self.tail * (1 - self.tail) / self.trials)

    def slope(self) -> float | None:
        ok = (self.tail > 0) & (self.deltas > 0) & (self.deltas < 1)
        if ok.sum() < 2:
            return None
        return float(np.polyfit(np.log(self.deltas[ok]), np.log(self.tail[ok]), 1)[0])


def separation_tail(a: float, R: int, deltas, trials: int, seed: int = 0,
                    trial0: int = 0) -> SeparationTail:
    """Empirical P[s(aR, R) < delta R] for each delta."""
    return tail_from_values(a, R, deltas, separation_values(a, R, seed, trial0, trials))


def separation_values(a: float, R: int, seed: int, trial0: int, trials: int) -> np.ndarray:
    """s(aR, R) per trial; infinite when fewer than two interfaces cross."""
    if not 0 < a < 1:
        raise ValueError(f"a must lie in (0, 1), got {a}")
    r = max(1, int(round(a * R)))
    if r >= R:
        raise ValueError(f"a * R rounds to {r}, which is not below R={R}")
    dom = lattice.annulus(r, R)
    return np.array([explore.separation_statistic(sampler.sample(dom, 0.5, seed, trial0 + t)).s_value
                     for t in range(trials)], dtype=np.float64)


def tail_from_values(a: float, R: int, deltas, s: np.ndarray) -> SeparationTail:
    d = np.asarray(deltas, dtype=np.float64)
    tail = (s[None, :] < d[:, None] * R).mean(axis=1)
    return SeparationTail(a, R, d, tail, int(s.size), int(np.isfinite(s).sum()))


# -------------------------------------------------------- noise sensitivity

_STREAM_NOISE = (3, 4)


@dataclass(frozen=True)
class NoisePoint:
    m: int
    eps: float
    value: float
    stderr: float
    trials: int


def _check_eps(eps_list) -> np.ndarray:
    eps = np.asarray(eps_list, dtype=np.float64)
    if np.any((eps < 0) | (eps > 0.5)):
        raise ValueError("eps must lie in [0, 1/2]")
    return eps


def noise_samples(m: int, eps_list, seed: int, trial0: int, trials: int,
                  lat: str = lattice.TRIANGULAR) -> np.ndarray:
    """(2, len(eps), trials) crossing indicators of two independent eps-perturbations."""
    eps = _check_eps(eps_list)
    dom = lattice.box(m, lattice=lat)
    ev = sampler.box_left_right()
    out = np.zeros((2, eps.size, trials), dtype=np.int8)
    for t in range(trials):
        cfg = sampler.sample(dom, 0.5, seed, trial0 + t)
        for side, stream in enumerate(_STREAM_NOISE):
            u = rng.uniforms(seed, trial0 + t, dom.keys, stream)
            for q, e in enumerate(eps):
                out[side, q, t] = sampler.decide(cfg.with_bits(cfg.bits ^ (u < e)), ev)
    return out


def noise_from_samples(m: int, eps_list, samples: np.ndarray) -> list[NoisePoint]:
    eps = _check_eps(eps_list)
    trials = samples.shape[2]
    out = []
    for q, e in enumerate(eps):
        f1, f2 = samples[0, q].astype(np.float64), samples[1, q].astype(np.float64)
        mean = 0.5 * (f1.mean() + f2.mean())
        prod = f1 * f2
        # influence function of mean(prod) - mean^2
        infl = prod - mean * (f1 + f2)
        se = float(infl.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.inf
        out.append(NoisePoint(m, float(e), float(prod.mean() - mean * mean), se, trials))
    return out


def noise_sensitivity_curve(m: int, eps_list, trials: int, seed: int = 0, trial0: int = 0,
                            lat: str = lattice.TRIANGULAR) -> list[NoisePoint]:
    """Paired-resampling estimate of Var(E[f(Y) | X]) for the left-right crossing of Box(m)."""
    return noise_from_samples(m, eps_list, noise_samples(m, eps_list, seed, trial0, trials, lat))


# ------------------------------------------------------- dimension pipeline

@dataclass(frozen=True)
class DimensionEstimate:
    p_hat: float
    i_hat: float
    i_stderr: float
    bound: dynamics.DimensionBound


def dimension_estimate(domain, event: EventSpec, T: float, trials: int, seed: int = 0,
                       trial0: int = 0) -> DimensionEstimate:
    """Plug the static probability and the flip-count influence into the dimension formula."""
    hits = sum(sampler.decide(sampler.sample(domain, 0.5, seed, trial0 + t), event)
               for t in range(trials))
    fc = dynamics.flip_boundary_count(domain, event, T, trials, seed, trial0)
    p_hat = max(hits, 1) / trials
    i_hat = max(fc.influence, 1e-300)
    return DimensionEstimate(p_hat, fc.influence, fc.influence_stderr,
                             dynamics.dimension_bound(p_hat, i_hat))
