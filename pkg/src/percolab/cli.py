"""Command-line front end.

Every subcommand writes ``<name>.csv`` (the payload) and ``<name>.json``
(a manifest with the configuration, a content hash of the payload and
timing).  Trials are cut into fixed shards whose results are merged in
shard order, so payloads do not depend on ``--workers``.
"""
from __future__ import annotations

import csv
import functools
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import __version__, dynamics, estimators, explore, fourier, lattice, sampler

SCHEMA = 1
SHARD = 1000
DEFAULT_OUT = "percolab-out"


# ------------------------------------------------------------------ plumbing

def shards(trials: int, size: int = SHARD) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, trials)) for lo in range(0, trials, size)]


def run_sharded(fn, trials: int, workers: int) -> list:
    """``fn(lo, hi)`` over the fixed shards, results in shard order."""
    jobs = shards(trials)
    los, his = [j[0] for j in jobs], [j[1] for j in jobs]
    if workers <= 1 or len(jobs) <= 1:
        return [fn(lo, hi) for lo, hi in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, los, his))


def git_blob_hash(data: bytes) -> str:
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, Fraction):
        return str(v)
    return v


def render_csv(rows: list[dict]) -> bytes:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue().encode("utf-8")


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    v = _fmt(v)
    if isinstance(v, float) or (isinstance(v, str) and v in ("inf", "nan", "-inf")):
        f = float(v)
        return f if np.isfinite(f) else str(f)
    return v


def write_outputs(ctx: dict, name: str, rows: list[dict], summary: dict,
                  gnuplot: tuple | None = None) -> Path:
    out = Path(ctx["out"])
    out.mkdir(parents=True, exist_ok=True)
    payload = render_csv(rows)
    (out / f"{name}.csv").write_bytes(payload)
    manifest = {
        "schema": SCHEMA,
        "tool": "percolab",
        "version": __version__,
        "subcommand": name,
        "config": _jsonable(ctx["config"]),
        "payload": {"file": f"{name}.csv", "sha1": git_blob_hash(payload), "rows": len(rows)},
        "summary": _jsonable(summary),
        "records": _jsonable(rows),
        "started": ctx["started"],
        "wall_clock_s": time.time() - ctx["t0"],
    }
    (out / f"{name}.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    if ctx["gnuplot"] and gnuplot is not None:
        xs, ys, es = gnuplot
        lines = [f"{_fmt(x)} {_fmt(y)} {_fmt(e)}" for x, y, e in zip(xs, ys, es)]
        (out / f"{name}.dat").write_text("# x y err\n" + "\n".join(lines) + "\n",
                                         encoding="utf-8")
    click.echo(f"wrote {out / f'{name}.csv'} ({len(rows)} rows)")
    return out


def verify_manifest(path) -> bool:
    """True when the payload next to a manifest still matches its recorded hash."""
    path = Path(path)
    m = json.loads(path.read_text(encoding="utf-8"))
    data = (path.parent / m["payload"]["file"]).read_bytes()
    return git_blob_hash(data) == m["payload"]["sha1"]


def common(trials_default: int | None = 1000):
    def deco(f):
        f = click.option("--emit-gnuplot-data", "gnuplot", is_flag=True,
                         help="Also write x/y/err columns to <name>.dat.")(f)
        f = click.option("--out", type=click.Path(file_okay=False),
                         default=lambda: os.environ.get("PERCOLAB_OUT", DEFAULT_OUT),
                         show_default="$PERCOLAB_OUT or percolab-out",
                         help="Output directory.")(f)
        f = click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)(f)
        if trials_default is not None:
            f = click.option("--trials", type=click.IntRange(min=1), default=trials_default,
                             show_default=True)(f)
        f = click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=0,
                         show_default=True)(f)

        @functools.wraps(f)
        def wrapper(**kw):
            ctx = {"out": kw.pop("out"), "gnuplot": kw.pop("gnuplot"), "t0": time.time(),
                   "started": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                   "config": {"subcommand": click.get_current_context().info_name, **kw}}
            try:
                f(ctx, **kw)
            except click.exceptions.ClickException:
                raise
            except Exception as exc:  # runtime failure, not a usage error
                click.echo(f"error: {exc}", err=True)
                sys.exit(1)
        return wrapper
    return deco


def parse_ints(text: str, name: str) -> list[int]:
    try:
        vals = [int(x) for x in text.replace("x", ",").split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}",
                                 param_hint=name) from None
    if not vals:
        raise click.BadParameter("empty list", param_hint=name)
    return vals


def parse_floats(text: str, name: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}",
                                 param_hint=name) from None
    if not vals:
        raise click.BadParameter("empty list", param_hint=name)
    return vals


def parse_domain(text: str, lat: str) -> lattice.Domain:
    kind, _, rest = text.partition(":")
    try:
        params = parse_ints(rest, "--domain")
        return lattice.make_domain(kind, *params, lattice=lat)
    except (KeyError, TypeError, ValueError) as exc:
        raise click.BadParameter(f"cannot build domain {text!r}: {exc}",
                                 param_hint="--domain") from None


EVENTS = ["box-left-right", "one-arm", "two-arm", "alternating", "half-plane", "j-clusters",
          "five-arm", "cell-open"]


def make_event(name: str, k: int, j: int, color: int, colors: str | None, cell: int) -> EventSpec:
    try:
        if name == "box-left-right":
            return sampler.box_left_right()
        if name == "one-arm":
            return sampler.one_arm(color)
        if name == "two-arm":
            return sampler.alternating_arms(2)
        if name == "alternating":
            return sampler.alternating_arms(k)
        if name == "half-plane":
            seq = parse_ints(colors or "1", "--colors")
            return sampler.half_plane_arms(tuple(seq))
        if name == "j-clusters":
            return sampler.j_clusters(j, color)
        if name == "five-arm":
            return sampler.five_arm()
        return sampler.cell_open(cell)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--event") from None


EventSpec = sampler.EventSpec


def event_options(default="one-arm"):
    return functools.partial(_event_options, default=default)


def _event_options(f, default):
    f = click.option("--cell", type=click.IntRange(min=0), default=0, help="cell-open index.")(f)
    f = click.option("--colors", default=None, help="half-plane colours, e.g. 1,0,1.")(f)
    f = click.option("--color", type=click.IntRange(0, 1), default=1, show_default=True)(f)
    f = click.option("--j", "j", type=click.IntRange(min=1), default=2, show_default=True)(f)
    f = click.option("--k", "k", type=click.IntRange(min=1), default=4, show_default=True)(f)
    f = click.option("--event", type=click.Choice(EVENTS), default=default,
                     show_default=True)(f)
    return f


def _lattice_opt(f):
    return click.option("--lattice", "lat", type=click.Choice([lattice.TRIANGULAR, lattice.SQUARE]),
                        default=lattice.TRIANGULAR, show_default=True)(f)


@click.group()
@click.version_option(__version__, prog_name="percolab")
def main():
    """Critical percolation laboratory."""


# ------------------------------------------------------------- arm estimates

def _arm_shard(event, r, radii, seed, lat, lo, hi):
    return estimators.arm_outcomes(event, r, radii, seed, lo, hi - lo, lat).sum(axis=0)


def _arm_rows(ctx, event, r, radii, trials, seed, workers, lat):
    live = [R for R in radii if R > r]
    hits = np.zeros(len(live), dtype=np.int64)
    if live:
        fn = functools.partial(_arm_shard, event, r, tuple(live), seed, lat)
        for h in run_sharded(fn, trials, workers):
            hits += h
    found = dict(zip(live, hits))
    ests = []
    for R in radii:
        if R in found:
            ests.append(estimators.ArmEstimate(event, r, R, trials, int(found[R]), seed, 0, lat))
        else:
            ests.append(estimators._convention(event, r, R, lat, seed, 0))
    rows = []
    for e in ests:
        lo, hi = e.ci
        rows.append({"event": event.label, "lattice": lat, "r": e.r, "R": e.R,
                     "trials": e.trials, "successes": e.successes, "p_hat": e.p_hat,
                     "ci_low": lo, "ci_high": hi, "convention": e.conventional,
                     "seed": seed, "trial_lo": 0, "trial_hi": e.trials})
    return ests, rows


def _check_lattice(event, lat):
    if event.kind == sampler.FIVE_ARM and lat != lattice.SQUARE:
        raise click.BadParameter("five-arm is measured on the square lattice; pass --lattice square",
                                 param_hint="--lattice")


@main.command("arm-estimate")
@event_options()
@_lattice_opt
@click.option("--r", "r", type=click.IntRange(min=1), required=True, help="Inner radius.")
@click.option("--R", "R", type=click.IntRange(min=1), default=None, help="Outer radius.")
@click.option("--radii", default=None, help="Several outer radii, comma separated.")
@common()
def arm_estimate(ctx, event, k, j, color, colors, cell, lat, r, R, radii, seed, trials, workers):
    """Arm-event probability alpha(r, R) with a Wilson interval."""
    if R is None and radii is None:
        raise click.BadParameter("give --R or --radii", param_hint="--R")
    radii_l = parse_ints(radii, "--radii") if radii else [R]
    if any(x < 1 for x in radii_l):
        raise click.BadParameter("radii must be >= 1", param_hint="--radii")
    ev = make_event(event, k, j, color, colors, cell)
    _check_lattice(ev, lat)
    ests, rows = _arm_rows(ctx, ev, r, radii_l, trials, seed, workers, lat)
    write_outputs(ctx, "arm-estimate", rows, {"points": len(rows)},
                  ([e.R for e in ests], [e.p_hat for e in ests], [e.stderr for e in ests]))


@main.command("fit-exponent")
@event_options()
@_lattice_opt
@click.option("--r", "r", type=click.IntRange(min=1), default=4, show_default=True)
@click.option("--radii", default="8,16,32,64,128", show_default=True)
@click.option("--tolerance", type=float, default=None)
@click.option("--keep-smallest", is_flag=True, help="Do not drop the smallest radius.")
@common()
def fit_exponent(ctx, event, k, j, color, colors, cell, lat, r, radii, tolerance, keep_smallest,
                 seed, trials, workers):
    """Log-log slope of alpha(r, R) in R."""
    radii_l = sorted(parse_ints(radii, "--radii"))
    if any(x <= r for x in radii_l):
        raise click.BadParameter(f"every radius must exceed --r={r}", param_hint="--radii")
    if len(radii_l) < 3 + (0 if keep_smallest else 1):
        raise click.BadParameter("need at least 3 radii in the fit", param_hint="--radii")
    ev = make_event(event, k, j, color, colors, cell)
    _check_lattice(ev, lat)
    ests, rows = _arm_rows(ctx, ev, r, radii_l, trials, seed, workers, lat)
    fit = estimators.fit_exponent(ests, tolerance=tolerance, drop_smallest=not keep_smallest)
    summary = {"slope": fit.slope, "stderr": fit.stderr, "reference": fit.reference,
               "tolerance": tolerance, "verdict": fit.verdict}
    click.echo(f"slope {fit.slope:.4f} +- {fit.stderr:.4f} (reference {fit.reference})")
    write_outputs(ctx, "fit-exponent", rows, summary,
                  (np.log([e.R for e in ests]), np.log([e.p_hat for e in ests]),
                   [np.sqrt(e.log_var) for e in ests]))


# ---------------------------------------------------------------- revealment

def _reveal_shard(alg, params, seed, lo, hi):
    return explore.measure_revealment(alg, params, hi - lo, seed, lo).counts


@main.command("revealment")
@click.option("--alg", type=click.Choice(["box", "annulus"]), required=True)
@click.option("--R", "R", type=click.IntRange(min=2), required=True)
@click.option("--r", "r", type=click.IntRange(min=1), default=None, help="Hole radius (annulus).")
@common()
def revealment(ctx, alg, R, r, seed, trials, workers):
    """Per-cell revealment frequencies of an exploration algorithm."""
    if alg == "annulus":
        if r is None or r >= R:
            raise click.BadParameter("annulus needs 1 <= --r < --R", param_hint="--r")
        params = (r, R)
        dom = explore.disk_domain(R)
    else:
        params = (R,)
        dom = lattice.box(R)
    fn = functools.partial(_reveal_shard, alg, params, seed)
    counts = sum(run_sharded(fn, trials, workers))
    rows = [{"cell": i, "u": int(dom.cells[i, 0]), "v": int(dom.cells[i, 1]),
             "count": int(c), "frequency": c / trials, "seed": seed, "trial_lo": 0,
             "trial_hi": trials} for i, c in enumerate(counts)]
    delta = float(counts.max() / trials)
    click.echo(f"delta_hat {delta:.5f}")
    write_outputs(ctx, "revealment", rows,
                  {"delta_hat": delta, "argmax_cell": int(counts.argmax())},
                  (np.arange(counts.size), counts / trials,
                   np.sqrt(counts / trials * (1 - counts / trials) / trials)))


# ------------------------------------------------------------------- fourier

@main.command("fourier-check")
@click.option("--corpus", type=click.Choice(["builtin"]), default=None)
@click.option("--table", "table", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Truth table file; checked against the read-everything algorithm.")
@common(trials_default=None)
def fourier_check(ctx, corpus, table, seed, workers):
    """Exact level-weight inequality for (function, algorithm) pairs."""
    if (corpus is None) == (table is None):
        raise click.BadParameter("give exactly one of --corpus or --table", param_hint="--corpus")
    if corpus:
        pairs = fourier.builtin_corpus()
    else:
        f = fourier.read_truth_table(table)
        if not f.exact:
            raise click.BadParameter("exact checks need integer values", param_hint="--table")
        pairs = [(Path(table).name, f, fourier.read_all(f.n, f))]
    rows = []
    violations = 0
    for name, f, alg in pairs:
        rep = fourier.check_theorem_noise(f, alg)
        violations += rep.violations
        for lv in rep.levels:
            rows.append({"name": name, "n": f.n, "delta": rep.delta, "k": lv.k,
                         "weight": lv.weight, "bound": lv.bound, "slack": lv.slack,
                         "weight_float": float(lv.weight), "bound_float": float(lv.bound),
                         "ok": lv.ok, "seed": seed, "trial_lo": 0, "trial_hi": 0})
    click.echo(f"{len(pairs)} pairs, {violations} violations")
    write_outputs(ctx, "fourier-check", rows, {"pairs": len(pairs), "violations": violations},
                  (list(range(len(rows))), [r_["weight_float"] for r_ in rows],
                   [0.0] * len(rows)))
    if violations:
        click.echo("inequality violated", err=True)
        sys.exit(1)


# ------------------------------------------------------------------ dynamics

def _corr_shard(domain_text, lat, event, t, seed, lo, hi):
    dom = parse_domain(domain_text, lat)
    return dynamics.correlation_products(dom, event, t, seed, lo, hi - lo)


@main.command("dynamics-correlation")
@event_options("box-left-right")
@_lattice_opt
@click.option("--domain", "domain_text", default="rhombus:3,3", show_default=True)
@click.option("--t", "ts", default="0.25,0.5,1", show_default=True, help="Lags.")
@common(trials_default=100000)
def dynamics_correlation(ctx, event, k, j, color, colors, cell, lat, domain_text, ts,
                         seed, trials, workers):
    """E[f(state at 0) f(state at t)], with the spectral sum on small domains."""
    lags = parse_floats(ts, "--t")
    if any(t < 0 for t in lags):
        raise click.BadParameter("lags must be nonnegative", param_hint="--t")
    dom = parse_domain(domain_text, lat)
    ev = make_event(event, k, j, color, colors, cell)
    rows = []
    for t in lags:
        fn = functools.partial(_corr_shard, domain_text, lat, ev, t, seed)
        prod = np.concatenate(run_sharded(fn, trials, workers))
        est = dynamics._mean(prod)
        exact = (dynamics.spectral_correlation(dynamics.event_truth_table(dom, ev), t)
                 if dom.n_cells <= 12 else None)
        rows.append({"domain": domain_text, "event": ev.label, "t": t, "mean": est.mean,
                     "stderr": est.stderr, "exact": "" if exact is None else exact,
                     "trials": trials, "seed": seed, "trial_lo": 0, "trial_hi": trials})
    write_outputs(ctx, "dynamics-correlation", rows, {"lags": lags},
                  (lags, [r_["mean"] for r_ in rows], [r_["stderr"] for r_ in rows]))


def _times_shard(domain_text, lat, event, T, seed, lo, hi):
    dom = parse_domain(domain_text, lat)
    eps = dynamics.eps_grid(T)
    out = []
    for trial in range(lo, hi):
        ts = dynamics.crossing_time_set(dom, event, T, seed, trial)
        cov = dynamics.covering_numbers(ts, eps)
        bad = int(np.sum(cov > dynamics.covering_bound(ts, eps)))
        out.append((trial, ts.measure, ts.boundary_count, len(ts.intervals), ts.flips,
                    int(ts.contains(0.0)), bad))
    return out


@main.command("crossing-times")
@event_options("box-left-right")
@_lattice_opt
@click.option("--domain", "domain_text", default="box:8", show_default=True)
@click.option("--T", "T", type=click.FloatRange(min=0, min_open=True), default=1.0,
              show_default=True)
@common(trials_default=100)
def crossing_times(ctx, event, k, j, color, colors, cell, lat, domain_text, T, seed, trials,
                   workers):
    """Time sets of an event along dynamical trajectories."""
    dom = parse_domain(domain_text, lat)
    ev = make_event(event, k, j, color, colors, cell)
    fn = functools.partial(_times_shard, domain_text, lat, ev, T, seed)
    recs = [x for part in run_sharded(fn, trials, workers) for x in part]
    rows = [{"trial": tr, "measure": m, "boundary_count": n, "intervals": iv, "flips": fl,
             "holds_at_0": h0, "covering_violations": bad, "seed": seed, "trial_lo": tr,
             "trial_hi": tr + 1} for tr, m, n, iv, fl, h0, bad in recs]
    N = np.array([r_["boundary_count"] for r_ in rows], dtype=float)
    X = np.array([r_["measure"] for r_ in rows])
    summary = {"mean_N": N.mean(), "influence_hat": 2 * N.mean() / T, "mean_X": X.mean(),
               "covering_violations": sum(r_["covering_violations"] for r_ in rows)}
    write_outputs(ctx, "crossing-times", rows, summary,
                  ([r_["trial"] for r_ in rows], X, [0.0] * len(rows)))


@main.command("dimension-bound")
@click.option("--p", "p", type=float, default=None, help="Event probability.")
@click.option("--i", "i", type=float, default=None, help="Total influence.")
@event_options("box-left-right")
@_lattice_opt
@click.option("--domain", "domain_text", default=None,
              help="Estimate P and I by simulation on this domain instead.")
@click.option("--T", "T", type=click.FloatRange(min=0, min_open=True), default=1.0)
@common()
def dimension_bound(ctx, p, i, event, k, j, color, colors, cell, lat, domain_text, T, seed,
                    trials, workers):
    """Upper bound on the dimension of exceptional times, 1 / (1 - log P / log I)."""
    if domain_text is None:
        if p is None or i is None:
            raise click.BadParameter("give --p and --i, or --domain", param_hint="--p")
        if not 0 < p <= 1:
            raise click.BadParameter("must lie in (0, 1]", param_hint="--p")
        if not i > 0:
            raise click.BadParameter("must be positive", param_hint="--i")
        p_hat, i_hat, i_se, lo, hi = p, i, 0.0, 0, 0
    else:
        dom = parse_domain(domain_text, lat)
        ev = make_event(event, k, j, color, colors, cell)
        fn = functools.partial(_times_shard, domain_text, lat, ev, T, seed)
        recs = [x for part in run_sharded(fn, trials, workers) for x in part]
        N = np.array([x[2] for x in recs], dtype=float)
        p_hat = max(sum(x[5] for x in recs), 1) / trials
        i_hat = 2 * N.mean() / T
        i_se = 2 * N.std(ddof=1) / np.sqrt(trials) / T if trials > 1 else float("inf")
        lo, hi = 0, trials
        if i_hat <= 0:
            i_hat = 1.0
        del dom
    b = dynamics.dimension_bound(p_hat, i_hat)
    rows = [{"p_hat": p_hat, "i_hat": i_hat, "i_stderr": i_se,
             "bound": "" if b.value is None else b.value, "regime": b.regime,
             "seed": seed, "trial_lo": lo, "trial_hi": hi}]
    click.echo(f"{b.regime}: {b.value}")
    write_outputs(ctx, "dimension-bound", rows, {"regime": b.regime, "bound": b.value},
                  ([i_hat], [b.value if b.value is not None else float("nan")], [0.0]))


# ------------------------------------------------------------- quasi-mult etc

def _qm_shard(j, triples, seed, lo, hi):
    return estimators.quasi_mult_counts(j, triples, seed, lo, hi - lo)


@main.command("quasi-mult")
@click.option("--j", "j", type=click.IntRange(min=2), default=2, show_default=True)
@click.option("--radii", default="4,8,16,32,64", show_default=True)
@common()
def quasi_mult(ctx, j, radii, seed, trials, workers):
    """alpha_j(r, r') alpha_j(r', r'') / alpha_j(r, r'') over increasing triples."""
    try:
        estimators.check_j(j)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--j") from None
    triples = estimators.increasing_triples(parse_ints(radii, "--radii"))
    if not triples:
        raise click.BadParameter("need at least three distinct radii", param_hint="--radii")
    fn = functools.partial(_qm_shard, j, tuple(triples), seed)
    counts: dict = {}
    for part in run_sharded(fn, trials, workers):
        for key, c in part.items():
            counts[key] = counts.get(key, 0) + c
    rep = estimators.quasi_mult_from_counts(j, triples, counts, trials)
    rows = []
    for row in rep.rows:
        lo, hi = row.ci
        rows.append({"r": row.r, "r1": row.r1, "r2": row.r2, "ratio": row.ratio,
                     "ci_low": lo, "ci_high": hi, "flagged": row.flagged, "seed": seed,
                     "trial_lo": 0, "trial_hi": trials})
    click.echo(f"spread {rep.spread:.3f}")
    write_outputs(ctx, "quasi-mult", rows, {"spread": rep.spread},
                  (list(range(len(rows))), [r_["ratio"] for r_ in rows],
                   [row.log_stderr * row.ratio for row in rep.rows]))


def _sep_shard(a, R, seed, lo, hi):
    return estimators.separation_values(a, R, seed, lo, hi - lo)


@main.command("separation-tail")
@click.option("--a", "a", type=click.FloatRange(0, 1, min_open=True, max_open=True),
              default=0.5, show_default=True)
@click.option("--R", "R", type=click.IntRange(min=2), default=32, show_default=True)
@click.option("--deltas", default="0.02,0.05,0.1,0.2,0.5,1,2", show_default=True)
@common()
def separation_tail(ctx, a, R, deltas, seed, trials, workers):
    """Empirical P[s(aR, R) < delta R]."""
    d = parse_floats(deltas, "--deltas")
    if round(a * R) >= R or round(a * R) < 1:
        raise click.BadParameter("a * R must round into 1..R-1", param_hint="--a")
    fn = functools.partial(_sep_shard, a, R, seed)
    s = np.concatenate(run_sharded(fn, trials, workers))
    tail = estimators.tail_from_values(a, R, d, s)
    rows = [{"a": a, "R": R, "delta": dd, "tail": tt, "stderr": se, "trials": trials,
             "seed": seed, "trial_lo": 0, "trial_hi": trials}
            for dd, tt, se in zip(tail.deltas, tail.tail, tail.stderr)]
    write_outputs(ctx, "separation-tail", rows, {"crossed": tail.crossed, "slope": tail.slope()},
                  (tail.deltas, tail.tail, tail.stderr))


def _noise_shard(m, eps, lat, seed, lo, hi):
    return estimators.noise_samples(m, eps, seed, lo, hi - lo, lat)


@main.command("noise-curve")
@_lattice_opt
@click.option("--m", "ms", default="16,32,64", show_default=True, help="Box sizes.")
@click.option("--eps", "eps", default="0.05,0.1,0.2", show_default=True,
              help="Flip probabilities in [0, 1/2].")
@common()
def noise_curve(ctx, lat, ms, eps, seed, trials, workers):
    """Noise sensitivity of the left-right box crossing."""
    sizes = parse_ints(ms, "--m")
    rows = []
    e = parse_floats(eps, "--eps")
    if any(not 0 <= x <= 0.5 for x in e):
        raise click.BadParameter("noise levels must lie in [0, 1/2]", param_hint="--eps")
    for m in sizes:
        fn = functools.partial(_noise_shard, m, tuple(e), lat, seed)
        samples = np.concatenate(run_sharded(fn, trials, workers), axis=2)
        for pt in estimators.noise_from_samples(m, e, samples):
            rows.append({"m": m, "eps": pt.eps, "value": pt.value, "stderr": pt.stderr,
                         "trials": trials, "seed": seed, "trial_lo": 0, "trial_hi": trials})
    write_outputs(ctx, "noise-curve", rows, {"sizes": sizes},
                  ([r_["m"] for r_ in rows], [r_["value"] for r_ in rows],
                   [r_["stderr"] for r_ in rows]))


if __name__ == "__main__":
    main()
