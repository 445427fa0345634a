"""Fourier-Walsh analysis of small functions on {0,1}^n and exact revealment.

Inputs and subsets are both encoded as integers: bit ``i`` of ``x`` is the
value of coordinate ``i`` and bit ``i`` of ``S`` says whether ``i`` is in
``S``.  Characters are ``chi_S(x) = (-1)^{|S & x|}``, so a 1-bit contributes
-1.  Integer-valued functions are transformed exactly and every quantity
that feeds an inequality check is a :class:`fractions.Fraction`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

MAX_BITS = 24
MAX_ENUM_BITS = 12


def popcount(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    out = np.zeros_like(a)
    while np.any(a):
        out += a & 1
        a = a >> 1
    return out


@dataclass(frozen=True)
class TruthTable:
    n: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.n <= MAX_BITS:
            raise ValueError(f"n must be in 0..{MAX_BITS}, got {self.n}")
        if self.values.shape != (1 << self.n,):
            raise ValueError(f"need {1 << self.n} values, got {self.values.shape}")

    @classmethod
    def from_function(cls, n: int, fn: Callable[[Sequence[int]], float]) -> "TruthTable":
        vals = [fn([(x >> i) & 1 for i in range(n)]) for x in range(1 << n)]
        kind = np.int64 if all(float(v).is_integer() for v in vals) else np.float64
        return cls(n, np.array(vals, dtype=kind))

    @property
    def exact(self) -> bool:
        return np.issubdtype(self.values.dtype, np.integer)

    def __call__(self, x: int):
        return self.values[x]

    def norm2(self) -> Fraction | float:
        """Squared L2 norm under the uniform measure."""
        if self.exact:
            return Fraction(int((self.values.astype(object) ** 2).sum()), 1 << self.n)
        return float((self.values ** 2).mean())

    def mean(self):
        if self.exact:
            return Fraction(int(self.values.sum()), 1 << self.n)
        return float(self.values.mean())


class SpectralVector:
    """Coefficients ``raw[S] / 2^n``; ``raw`` is integral for integer inputs."""

    def __init__(self, n: int, raw: np.ndarray):
        self.n = n
        self.raw = raw

    @property
    def exact(self) -> bool:
        return self.raw.dtype == object or np.issubdtype(self.raw.dtype, np.integer)

    @property
    def coeffs(self) -> np.ndarray:
        return self.raw.astype(np.float64) / float(1 << self.n)

    def coefficient(self, S: int):
        if self.exact:
            return Fraction(int(self.raw[S]), 1 << self.n)
        return float(self.coeffs[S])

    def total_weight(self):
        if self.exact:
            return Fraction(int((self.raw.astype(object) ** 2).sum()), 1 << (2 * self.n))
        return float((self.coeffs ** 2).sum())


def _butterfly(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    h = 1
    n = a.shape[0]
    while h < n:
        a = a.reshape(-1, 2, h)
        lo = a[:, 0, :].copy()
        hi = a[:, 1, :]
        a[:, 0, :] = lo + hi
        a[:, 1, :] = lo - hi
        a = a.reshape(n)
        h *= 2
    return a


def walsh_transform(f: TruthTable) -> SpectralVector:
    """All coefficients by the in-place butterfly, O(n 2^n)."""
    if f.n > MAX_BITS:
        raise ValueError(f"n={f.n} exceeds {MAX_BITS}")
    if f.exact:
        # int64 is safe: |raw| <= 2^n max|f| for the table sizes we allow
        return SpectralVector(f.n, _butterfly(f.values.astype(np.int64)))
    return SpectralVector(f.n, _butterfly(f.values.astype(np.float64)))


def inverse_transform(sv: SpectralVector) -> np.ndarray:
    """Function values recovered from the coefficients."""
    if sv.exact:
        # the butterfly is its own inverse up to a factor 2^n, which raw already carries
        return _butterfly(sv.raw) >> sv.n
    return _butterfly(sv.coeffs)


def level_weight(sv: SpectralVector, k: int):
    if not 0 <= k <= sv.n:
        raise ValueError(f"level {k} outside 0..{sv.n}")
    sel = popcount(np.arange(1 << sv.n)) == k
    if sv.exact:
        return Fraction(int((sv.raw[sel].astype(object) ** 2).sum()), 1 << (2 * sv.n))
    return float((sv.coeffs[sel] ** 2).sum())


def level_weights(sv: SpectralVector) -> list:
    return [level_weight(sv, k) for k in range(sv.n + 1)]


def noise_stability(sv: SpectralVector, eps) -> float | Fraction:
    """Sum over non-empty S of coefficient^2 * (1 - 2 eps)^(2|S|)."""
    if not 0 <= eps <= 1:
        raise ValueError(f"eps must be in [0, 1], got {eps}")
    rho = 1 - 2 * eps
    w = level_weights(sv)
    return sum(w[k] * rho ** (2 * k) for k in range(1, sv.n + 1))


def noise_stability_mc(f: TruthTable, eps: float, trials: int, seed: int = 0):
    """Paired re-sampling estimate of Var(E[f(Y) | X]); returns (estimate, stderr).

    Y1 and Y2 are independent eps-perturbations of one uniform X, so
    E[f(Y1) f(Y2)] = E[E[f(Y)|X]^2].
    """
    gen = np.random.default_rng(seed)
    n = f.n
    x = gen.integers(0, 1 << n, size=trials) if n else np.zeros(trials, dtype=np.int64)
    weights = 1 << np.arange(n)

    def perturb():
        flips = (gen.random((trials, n)) < eps).astype(np.int64) @ weights if n else 0
        return x ^ flips

    v = f.values.astype(np.float64)
    a, b = v[perturb()], v[perturb()]
    m = 0.5 * (a.mean() + b.mean())
    prod = a * b
    est = prod.mean() - m * m
    return float(est), float(prod.std(ddof=1) / math.sqrt(trials))


@dataclass(frozen=True)
class InfluenceVector:
    per_index: tuple

    @property
    def total(self) -> Fraction:
        return sum(self.per_index, Fraction(0))

    def __getitem__(self, i):
        return self.per_index[i]

    def __len__(self):
        return len(self.per_index)


def influences(f: TruthTable) -> InfluenceVector:
    """Probability that flipping coordinate i changes f, for each i."""
    idx = np.arange(1 << f.n)
    out = []
    for i in range(f.n):
        diff = int((f.values != f.values[idx ^ (1 << i)]).sum())
        out.append(Fraction(diff, 1 << f.n))
    return InfluenceVector(tuple(out))


# ------------------------------------------------------------ query algorithms

class Stop(NamedTuple):
    value: float


@dataclass(frozen=True)
class QueryAlgorithm:
    """A randomized procedure reading bits one at a time.

    ``randomness`` lists (label, probability) pairs covering the whole
    random input, so enumeration over it is exact.  ``run(x, r)`` returns
    the output and the queried indices in order.
    """
    n: int
    randomness: tuple
    run: Callable[[int, object], tuple]
    name: str = "algorithm"
    adaptive: bool = True


def stepwise(n: int, step: Callable[[dict, object], int | Stop], randomness: Iterable,
             name: str = "algorithm") -> QueryAlgorithm:
    """Build an algorithm from a rule mapping (revealed bits, randomness) to the next move."""
    rand = tuple((r, Fraction(w)) for r, w in randomness)

    def run(x, r):
        seen: dict[int, int] = {}
        order = []
        while True:
            move = step(dict(seen), r)
            if isinstance(move, Stop):
                return move.value, tuple(order)
            i = int(move)
            if i in seen:
                raise RuntimeError(f"{name} queried bit {i} twice")
            if not 0 <= i < n:
                raise RuntimeError(f"{name} queried bit {i} outside 0..{n - 1}")
            seen[i] = (x >> i) & 1
            order.append(i)

    return QueryAlgorithm(n, rand, run, name)


def _check_enumerable(alg: QueryAlgorithm):
    if alg.n > MAX_ENUM_BITS:
        raise ValueError(f"n={alg.n} too large to enumerate (max {MAX_ENUM_BITS})")
    if sum(w for _, w in alg.randomness) != 1:
        raise ValueError("randomness weights must sum to 1")


def _runs(alg: QueryAlgorithm):
    for x in range(1 << alg.n):
        for r, w in alg.randomness:
            value, order = alg.run(x, r)
            yield x, w, value, order


@dataclass
class ExactRevealment:
    per_bit: list
    delta: Fraction


def exact_revealment(alg: QueryAlgorithm, n: int | None = None) -> ExactRevealment:
    """P[i in J] for every bit by enumerating inputs and randomness."""
    if n is not None and n != alg.n:
        raise ValueError(f"algorithm reads {alg.n} bits, not {n}")
    _check_enumerable(alg)
    total = [Fraction(0)] * alg.n
    scale = Fraction(1, 1 << alg.n)
    for _x, w, _v, order in _runs(alg):
        for i in set(order):
            total[i] += w * scale
    return ExactRevealment(total, max(total) if total else Fraction(0))


class NotExact(ValueError):
    pass


@dataclass
class LevelCheck:
    k: int
    weight: Fraction
    bound: Fraction
    slack: Fraction

    @property
    def ok(self) -> bool:
        return self.slack >= 0


@dataclass
class TheoremReport:
    name: str
    delta: Fraction
    norm2: Fraction
    levels: list
    expected_variance: Fraction = Fraction(0)

    @property
    def violations(self) -> int:
        return sum(not c.ok for c in self.levels)


def determines(f: TruthTable, alg: QueryAlgorithm) -> bool:
    return all(v == f(x) for x, _w, v, _o in _runs(alg))


def conditionally_uniform(alg: QueryAlgorithm) -> bool:
    """Given the read set and its bits, are the remaining bits still uniform?

    Holds automatically for genuine query algorithms; fails for witnesses
    chosen by looking at all bits.
    """
    _check_enumerable(alg)
    groups: dict = {}
    for x, w, _v, order in _runs(alg):
        A = frozenset(order)
        mask = sum(1 << i for i in A)
        key = (A, x & mask)
        groups.setdefault(key, {})
        rest = x & ~mask
        groups[key][rest] = groups[key].get(rest, Fraction(0)) + w
    for (A, _xa), dist in groups.items():
        free = alg.n - len(A)
        vals = [dist.get(rest, Fraction(0)) for rest in _completions(alg.n, A)]
        if len(vals) != (1 << free) or len(set(vals)) != 1:
            return False
    return True


def _completions(n, A):
    free = [i for i in range(n) if i not in A]
    for bits in itertools.product((0, 1), repeat=len(free)):
        yield sum(b << i for b, i in zip(bits, free))


def check_theorem_noise(f: TruthTable, alg: QueryAlgorithm) -> TheoremReport:
    """Level-k weight against revealment * k * ||f||^2 for k = 1..n, exactly."""
    if not f.exact:
        raise ValueError("exact checks need an integer-valued truth table")
    if f.n != alg.n:
        raise ValueError(f"function has {f.n} bits, algorithm {alg.n}")
    if not determines(f, alg):
        raise NotExact(f"{alg.name} does not determine the function; use check_generalized")
    delta = exact_revealment(alg).delta
    sv = walsh_transform(f)
    nrm = f.norm2()
    levels = []
    for k in range(1, f.n + 1):
        w = level_weight(sv, k)
        bound = delta * k * nrm
        levels.append(LevelCheck(k, w, bound, bound - w))
    return TheoremReport(alg.name, delta, nrm, levels)


def expected_restricted_variance(f: TruthTable, alg: QueryAlgorithm) -> Fraction:
    """E over runs of the variance of f with the read bits fixed and the others uniform."""
    _check_enumerable(alg)
    cache: dict = {}
    total = Fraction(0)
    scale = Fraction(1, 1 << f.n)
    for x, w, _v, order in _runs(alg):
        A = frozenset(order)
        mask = sum(1 << i for i in A)
        key = (A, x & mask)
        if key not in cache:
            vals = [int(f(key[1] | rest)) for rest in _completions(f.n, A)]
            m = Fraction(sum(vals), len(vals))
            cache[key] = Fraction(sum(v * v for v in vals), len(vals)) - m * m
        total += w * scale * cache[key]
    return total


def check_generalized(f: TruthTable, alg: QueryAlgorithm) -> TheoremReport:
    """Level-k weight against 2 k delta ||f||^2 + 2 E[var(f restricted to the read bits)]."""
    if not f.exact:
        raise ValueError("exact checks need an integer-valued truth table")
    delta = exact_revealment(alg).delta
    ev = expected_restricted_variance(f, alg)
    sv = walsh_transform(f)
    nrm = f.norm2()
    levels = []
    for k in range(1, f.n + 1):
        w = level_weight(sv, k)
        bound = 2 * k * delta * nrm + 2 * ev
        levels.append(LevelCheck(k, w, bound, bound - w))
    return TheoremReport(alg.name, delta, nrm, levels, ev)


# ------------------------------------------------------------------- corpus

def and_function(n: int) -> TruthTable:
    return TruthTable.from_function(n, lambda b: int(all(b)))


def dictator(n: int = 1, i: int = 0) -> TruthTable:
    return TruthTable.from_function(n, lambda b: b[i])


def majority3() -> TruthTable:
    return TruthTable.from_function(3, lambda b: int(sum(b) >= 2))


def parity(n: int) -> TruthTable:
    return TruthTable.from_function(n, lambda b: sum(b) % 2)


def tribes(width: int = 2, count: int = 2) -> TruthTable:
    n = width * count
    return TruthTable.from_function(
        n, lambda b: int(any(all(b[t * width:(t + 1) * width]) for t in range(count))))


def random_order_and(n: int) -> QueryAlgorithm:
    """Read the bits of AND in a uniformly random order, stopping at the first 0."""
    perms = list(itertools.permutations(range(n)))
    w = Fraction(1, len(perms))

    def step(seen, perm):
        if any(v == 0 for v in seen.values()):
            return Stop(0)
        if len(seen) == n:
            return Stop(1)
        return perm[len(seen)]

    return stepwise(n, step, [(p, w) for p in perms], f"random-order AND_{n}")


def random_order_and_truncated(n: int, budget: int) -> QueryAlgorithm:
    """As :func:`random_order_and`, but gives up after ``budget`` reads (not exact)."""
    perms = list(itertools.permutations(range(n)))
    w = Fraction(1, len(perms))

    def step(seen, perm):
        if any(v == 0 for v in seen.values()):
            return Stop(0)
        if len(seen) == n:
            return Stop(1)
        if len(seen) >= budget:
            return Stop(1)
        return perm[len(seen)]

    return stepwise(n, step, [(p, w) for p in perms], f"AND_{n} stop after {budget}")


def read_all(n: int, f: TruthTable | None = None) -> QueryAlgorithm:
    def step(seen, _r):
        if len(seen) == n:
            x = sum(v << i for i, v in seen.items())
            return Stop(f(x) if f is not None else 0)
        return len(seen)
    return stepwise(n, step, [(None, 1)], f"read-all({n})")


def read_nothing(n: int, guess=0) -> QueryAlgorithm:
    return stepwise(n, lambda seen, r: Stop(guess), [(None, 1)], "read-nothing")


def read_bit(n: int, i: int = 0) -> QueryAlgorithm:
    return stepwise(n, lambda seen, r: Stop(seen[i]) if i in seen else i, [(None, 1)],
                    f"read-bit-{i}")


def majority3_algorithm() -> QueryAlgorithm:
    """Read bits 0 and 1; read bit 2 only if they disagree."""
    def step(seen, _r):
        if len(seen) < 2:
            return len(seen)
        if len(seen) == 2 and seen[0] == seen[1]:
            return Stop(seen[0])
        if len(seen) == 2:
            return 2
        return Stop(int(sum(seen.values()) >= 2))
    return stepwise(3, step, [(None, 1)], "majority-3")


def tribes_algorithm(width: int = 2, count: int = 2) -> QueryAlgorithm:
    """Scan tribes left to right, leaving a tribe at its first 0."""
    n = width * count

    def step(seen, _r):
        for t in range(count):
            block = range(t * width, (t + 1) * width)
            vals = [seen.get(i) for i in block]
            if 0 in vals:
                continue
            if all(v == 1 for v in vals):
                return Stop(1)
            return next(i for i in block if i not in seen)
        return Stop(0)

    return stepwise(n, step, [(None, 1)], f"tribes-{width}x{count}")


def rhombus_crossing(width: int = 3, height: int = 3):
    """Left-right crossing of a small hex board with the two-interface algorithm."""
    from . import explore, lattice, sampler

    dom = lattice.rhombus(width, height)
    n = dom.n_cells
    f = TruthTable(n, np.array([
        int(sampler.decide(sampler.Configuration(dom, _bits(x, n)), sampler.box_left_right()))
        for x in range(1 << n)], dtype=np.int64))
    from ._hex import RIGHT
    starts = explore.start_edges(dom, RIGHT).size

    def run(x, r):
        cfg = sampler.Configuration(dom, _bits(x, n))
        res = explore.box_crossing_algorithm(dom, config=cfg, start=r)
        return int(res.Q), tuple(int(i) for i in res.revealed)

    alg = QueryAlgorithm(n, tuple((r, Fraction(1, starts)) for r in range(starts)), run,
                         f"rhombus-{width}x{height} crossing")
    return f, alg


def _bits(x: int, n: int) -> np.ndarray:
    return np.array([(x >> i) & 1 for i in range(n)], dtype=np.int8)


def recursive_majority(h: int, signed: bool = True) -> TruthTable:
    """Majority of three applied recursively h times (n = 3^h), values +-1 if signed."""
    n = 3 ** h

    def maj(b):
        level = list(b)
        while len(level) > 1:
            level = [int(sum(level[i:i + 3]) >= 2) for i in range(0, len(level), 3)]
        return 1 - 2 * level[0] if signed else level[0]

    return TruthTable.from_function(n, maj)


def recursive_majority_witness(h: int) -> QueryAlgorithm:
    """A symmetric witness of size 2^h: at every gate keep two agreeing inputs.

    When all three inputs of a gate agree, the pair is chosen uniformly, so
    each bit lies in the witness with probability (2/3)^h.  The choice looks
    at bits outside the witness, so it is not a query algorithm.
    """
    n = 3 ** h
    gates = sum(3 ** j for j in range(h))
    choices = list(itertools.product(range(3), repeat=gates))
    w = Fraction(1, len(choices))

    def run(x, r):
        bits = [(x >> i) & 1 for i in range(n)]
        r = list(r)

        def rec(lo, size):
            if size == 1:
                return bits[lo], [lo]
            third = size // 3
            subs = [rec(lo + t * third, third) for t in range(3)]
            drop = r.pop()
            vals = [s[0] for s in subs]
            out = int(sum(vals) >= 2)
            agree = [t for t in range(3) if vals[t] == out]
            keep = agree if len(agree) == 2 else [t for t in range(3) if t != drop]
            return out, subs[keep[0]][1] + subs[keep[1]][1]

        v, wit = rec(0, n)
        return 1 - 2 * v, tuple(wit)

    return QueryAlgorithm(n, tuple((c, w) for c in choices), run,
                          f"recursive-majority witness h={h}", adaptive=False)


def builtin_corpus() -> list[tuple[str, TruthTable, QueryAlgorithm]]:
    corpus = [(f"AND_{n}", and_function(n), random_order_and(n)) for n in (2, 3, 4, 5)]
    corpus += [
        ("dictator", dictator(1), read_bit(1, 0)),
        ("majority-3", majority3(), majority3_algorithm()),
        ("tribes-4", tribes(2, 2), tribes_algorithm(2, 2)),
        ("parity-3", parity(3), read_all(3, parity(3))),
    ]
    f, alg = rhombus_crossing(3, 3)
    corpus.append(("rhombus-3x3", f, alg))
    return corpus


# ------------------------------------------------------------------------ I/O

def write_truth_table(f: TruthTable, path) -> None:
    """Plain text: n, then the 2^n values with inputs in lexicographic order.

    Lexicographic order takes coordinate 0 as the most significant digit.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{f.n}\n")
        for lex in range(1 << f.n):
            fh.write(f"{f.values[_lex_to_index(lex, f.n)]}\n")


def read_truth_table(path) -> TruthTable:
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"{path}: empty truth table file")
    n = int(tokens[0])
    raw = tokens[1:]
    if len(raw) != 1 << n:
        raise ValueError(f"{path}: expected {1 << n} values for n={n}, found {len(raw)}")
    vals = [float(t) for t in raw]
    kind = np.int64 if all(v.is_integer() for v in vals) else np.float64
    out = np.empty(1 << n, dtype=kind)
    for lex, v in enumerate(vals):
        out[_lex_to_index(lex, n)] = v
    return TruthTable(n, out)


def _lex_to_index(lex: int, n: int) -> int:
    return sum(((lex >> (n - 1 - i)) & 1) << i for i in range(n))
