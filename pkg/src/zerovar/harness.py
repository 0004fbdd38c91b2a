"""Monte Carlo experiments on zero counts: configuration, execution, reporting.

Trial ``t`` draws its polynomials from the Philox stream ``(master_seed, t)``.
Trials are processed in fixed blocks of ``batch_size`` whatever the number of
workers, and results are merged in trial order, so a run is reproducible bit
for bit.  A trial whose solver fails is re-drawn from the sub-stream
``redraw = 1, 2, ...`` of the same stream and logged.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import SeedSpec, complex_normals, sample, sample_system
from .errors import (
    DegenerateSystem,
    NearBoundaryZero,
    PreconditionError,
    RootAtInfinity,
    RootFindingFailure,
    SolverAbort,
)
from .geometry import contains, domain_to_dict, domain_from_dict
from .roots import (
    ENUMERATE_MAX_N,
    aberth_batch,
    all_roots,
    count_zeros_contour,
    normalized_coeffs,
    solve_system_2d,
)
from .variance import expected_count, predicted_variance, variance_boundary_exact

__all__ = [
    "ExperimentConfig",
    "NRecord",
    "ExperimentSummary",
    "CountResult",
    "ScalingTable",
    "expected_count",
    "simulate_counts",
    "run_counting_experiment",
    "scaling_study",
    "mc_bipotential_check",
    "load_config",
    "write_outputs",
    "MAX_REJECTION_RATE",
]

log = logging.getLogger(__name__)

MAX_REJECTION_RATE = 1e-3
MAX_REDRAWS = 16
_RECOVERABLE = (RootAtInfinity, RootFindingFailure, NearBoundaryZero, DegenerateSystem)


@dataclass
class ExperimentConfig:
    """One counting experiment (or a scaling study when ``degrees`` has several entries)."""

    m: int
    degrees: tuple
    domain: object
    trials: int
    master_seed: int
    k: int | None = None
    method: str = "auto"
    workers: int = 1
    batch_size: int = 64
    out_prefix: str | None = None

    def __post_init__(self):
        if isinstance(self.degrees, int):
            self.degrees = (self.degrees,)
        self.degrees = tuple(int(n) for n in self.degrees)
        if self.k is None:
            self.k = self.m
        if self.trials < 100:
            raise PreconditionError("trials must be >= 100")
        if self.k > self.m:
            raise PreconditionError("k must not exceed m")
        if self.k != self.m:
            raise PreconditionError("only point counting (k = m) is supported")
        if self.m not in (1, 2):
            raise PreconditionError("Monte Carlo counting is implemented for m = 1, 2")
        if self.m == 2 and max(self.degrees) > 12:
            raise PreconditionError("the m = 2 solver supports N <= 12")
        if any(n < 1 for n in self.degrees):
            raise PreconditionError("degrees must be >= 1")
        if self.method not in ("auto", "enumerate", "contour"):
            raise PreconditionError(f"unknown method {self.method!r}")
        if self.method == "contour" and self.m != 1:
            raise PreconditionError("contour counting is for m = 1")
        if self.workers < 1 or self.batch_size < 1:
            raise PreconditionError("workers and batch_size must be positive")
        SeedSpec(self.master_seed)
        if getattr(self.domain, "dim", None) != self.m:
            raise PreconditionError("domain dimension does not match m")

    def echo(self) -> dict:
        d = {
            "m": self.m,
            "k": self.k,
            "degrees": list(self.degrees),
            "domain": domain_to_dict(self.domain),
            "trials": self.trials,
            "seed": self.master_seed,
            "method": self.method,
            "workers": self.workers,
            "batch_size": self.batch_size,
        }
        if self.out_prefix:
            d["out_prefix"] = self.out_prefix
        return d


def load_config(path) -> ExperimentConfig:
    """Read a TOML run file (keys: m, degree|degrees, k, domain.kind, domain.params, ...)."""
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    if "degree" in raw and "degrees" in raw:
        raise PreconditionError("give either degree or degrees, not both")
    degrees = raw.get("degrees", raw.get("degree"))
    if degrees is None:
        raise PreconditionError("config needs degree or degrees")
    m = int(raw.get("m", 1))
    return ExperimentConfig(
        m=m,
        degrees=degrees,
        domain=domain_from_dict(raw["domain"], m),
        trials=int(raw["trials"]),
        master_seed=int(raw.get("seed", 0)),
        k=int(raw.get("k", m)),
        method=str(raw.get("method", "auto")),
        workers=int(raw.get("workers", 1)),
        batch_size=int(raw.get("batch_size", 64)),
        out_prefix=raw.get("out_prefix"),
    )


# ---------------------------------------------------------------------------
# Trials


@dataclass
class CountResult:
    """Per-trial counts for several domains drawn from the same polynomials."""

    counts: np.ndarray  # (trials, domains) int
    redraws: np.ndarray  # (trials,) int
    events: list = field(default_factory=list)

    @property
    def rejected_trials(self) -> int:
        return int(np.count_nonzero(self.redraws))


def _resolve_method(m, N, method):
    if m == 2:
        return "enumerate"
    if method == "auto":
        return "enumerate" if N <= ENUMERATE_MAX_N else "contour"
    return method


def _count_one(m, N, domains, seed, method, redraw):
    """Counts for one draw; raises a recoverable solver error on failure."""
    if m == 1:
        p = sample(1, N, seed, redraw=redraw)
        if method == "contour":
            return [count_zeros_contour(p, U) for U in domains]
        z = all_roots(p).points
        return [int(np.count_nonzero(contains(U, z))) for U in domains]
    pts = solve_system_2d(*sample_system(2, N, 2, seed, redraw=redraw)).points
    return [int(np.count_nonzero(contains(U, pts))) for U in domains]


def _redraw_loop(m, N, domains, seed, method, first_error):
    events = [(seed.stream_id, 0, type(first_error).__name__)]
    for r in range(1, MAX_REDRAWS + 1):
        try:
            return _count_one(m, N, domains, seed, method, r), r, events
        except _RECOVERABLE as exc:
            events.append((seed.stream_id, r, type(exc).__name__))
    raise SolverAbort(f"trial {seed.stream_id} failed {MAX_REDRAWS} redraws")


def _run_block(args):
    m, N, domains, master_seed, start, stop, method = args
    counts = np.zeros((stop - start, len(domains)), dtype=np.int64)
    redraws = np.zeros(stop - start, dtype=np.int64)
    events = []
    pending = []
    if m == 1 and method == "enumerate" and N > 1:
        polys = [sample(1, N, SeedSpec(master_seed, t)) for t in range(start, stop)]
        A = np.stack([normalized_coeffs(p) for p in polys])
        lead_ok = np.abs(A[:, -1]) >= 1e-300 * np.max(np.abs(A), axis=1)
        z, ok = aberth_batch(A)
        for i in range(stop - start):
            if ok[i] and lead_ok[i]:
                counts[i] = [np.count_nonzero(contains(U, z[i])) for U in domains]
            else:
                err = RootFindingFailure("residual gate") if lead_ok[i] else RootAtInfinity("leading")
                pending.append((i, err))
    else:
        for i, t in enumerate(range(start, stop)):
            try:
                counts[i] = _count_one(m, N, domains, SeedSpec(master_seed, t), method, 0)
            except _RECOVERABLE as exc:
                pending.append((i, exc))
    for i, exc in pending:
        seed = SeedSpec(master_seed, start + i)
        c, r, ev = _redraw_loop(m, N, domains, seed, method, exc)
        counts[i] = c
        redraws[i] = r
        events.extend(ev)
    return counts, redraws, events


def simulate_counts(
    m: int,
    N: int,
    domains,
    trials: int,
    master_seed: int,
    method: str = "auto",
    workers: int = 1,
    batch_size: int = 64,
) -> CountResult:
    """Zero counts of ``trials`` independent draws in each of ``domains``.

    Raises
    ------
    SolverAbort
        More than ``1e-3 * trials`` trials needed a re-draw.
    """
    domains = list(domains)
    meth = _resolve_method(m, N, method)
    blocks = [
        (m, N, domains, master_seed, s, min(s + batch_size, trials), meth)
        for s in range(0, trials, batch_size)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, blocks))
    else:
        parts = [_run_block(b) for b in blocks]
    res = CountResult(
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        [e for p in parts for e in p[2]],
    )
    for ev in res.events:
        log.info("re-drew trial %d (attempt %d failed: %s)", *ev)
    if res.rejected_trials > MAX_REJECTION_RATE * trials:
        raise SolverAbort(f"{res.rejected_trials} of {trials} trials rejected (limit {MAX_REJECTION_RATE:g})")
    return res


# ---------------------------------------------------------------------------
# Summaries


@dataclass
class NRecord:
    N: int
    trials: int
    mean_count: float
    se_mean: float
    var_count: float
    se_var: float
    rejected_trials: int
    expected_count_exact: float
    predicted_variance: float
    exact_variance: float | None
    wall_time: float = 0.0


SUMMARY_FIELDS = [
    "N",
    "trials",
    "mean_count",
    "se_mean",
    "var_count",
    "se_var",
    "rejected_trials",
    "expected_count_exact",
    "predicted_variance",
    "exact_variance",
]


@dataclass
class ExperimentSummary:
    config: ExperimentConfig
    records: list
    counts: dict = field(default_factory=dict, repr=False)  # N -> per-trial counts
    events: list = field(default_factory=list, repr=False)

    def summary_csv(self) -> str:
        """Summary table without timings (stable across repeated runs)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for r in self.records:
            w.writerow([_fmt(getattr(r, f)) for f in SUMMARY_FIELDS])
        return buf.getvalue()


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def moments(x: np.ndarray):
    """Mean, its SE, unbiased variance and its SE from the fourth central moment."""
    x = np.asarray(x, dtype=float)
    n = x.size
    mean = float(x.mean())
    d = x - mean
    m2 = float(np.mean(d * d))
    m4 = float(np.mean(d**4))
    var = m2 * n / (n - 1)
    se_var = math.sqrt(max(m4 - m2 * m2, 0.0) / n)
    return mean, math.sqrt(var / n), var, se_var


def _record(cfg, N, counts, rejected, wall):
    mean, se_mean, var, se_var = moments(counts)
    exact = float(variance_boundary_exact(cfg.domain, N)) if cfg.m == 1 else None
    return NRecord(
        N=N,
        trials=int(counts.size),
        mean_count=mean,
        se_mean=se_mean,
        var_count=var,
        se_var=se_var,
        rejected_trials=rejected,
        expected_count_exact=float(expected_count(cfg.m, N, cfg.domain)),
        predicted_variance=float(predicted_variance(cfg.m, cfg.k, N, cfg.domain)),
        exact_variance=exact,
        wall_time=wall,
    )


def run_counting_experiment(cfg: ExperimentConfig) -> ExperimentSummary:
    """Run every degree of ``cfg`` and summarize the counts in ``cfg.domain``."""
    records, counts, events = [], {}, []
    for N in cfg.degrees:
        t0 = time.perf_counter()
        res = simulate_counts(
            cfg.m, N, [cfg.domain], cfg.trials, cfg.master_seed, cfg.method, cfg.workers, cfg.batch_size
        )
        c = res.counts[:, 0]
        counts[N] = c
        events += [(N, *e) for e in res.events]
        records.append(_record(cfg, N, c, res.rejected_trials, time.perf_counter() - t0))
    summary = ExperimentSummary(cfg, records, counts, events)
    if cfg.out_prefix:
        write_outputs(summary, cfg.out_prefix)
    return summary


@dataclass
class ScalingTable:
    """Per-N rows with the fitted log-log slope of the variance."""

    summary: ExperimentSummary
    slope: float
    slope_se: float
    intercept: float
    ratio: list  # var / predicted
    rel_fluct: list  # sd / mean
    fluct_slope: float

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "mean_count", "var_count", "se_var", "predicted_variance", "ratio", "rel_fluct"])
        for r, q, f in zip(self.summary.records, self.ratio, self.rel_fluct):
            w.writerow([r.N, repr(r.mean_count), repr(r.var_count), repr(r.se_var),
                        repr(r.predicted_variance), repr(q), repr(f)])
        w.writerow([])
        w.writerow(["slope", repr(self.slope), "slope_se", repr(self.slope_se),
                    "intercept", repr(self.intercept), "fluct_slope", repr(self.fluct_slope)])
        return buf.getvalue()


def _wls(x, y, se):
    """Weighted least-squares line; returns slope, its SE, intercept."""
    wt = 1.0 / np.asarray(se) ** 2
    X = np.stack([np.ones_like(x), x], axis=1)
    cov = np.linalg.inv(X.T @ (X * wt[:, None]))
    beta = cov @ (X.T @ (wt * y))
    return float(beta[1]), float(math.sqrt(cov[1, 1])), float(beta[0])


def scaling_study(cfg: ExperimentConfig) -> ScalingTable:
    """Variance growth over ``cfg.degrees`` (at least three of them)."""
    if len(cfg.degrees) < 3:
        raise PreconditionError("a scaling study needs at least three degrees")
    summ = run_counting_experiment(cfg)
    recs = summ.records
    logN = np.log([r.N for r in recs])
    logV = np.log([r.var_count for r in recs])
    se = [r.se_var / r.var_count for r in recs]
    slope, slope_se, icpt = _wls(logN, logV, se)
    ratio = [r.var_count / r.predicted_variance for r in recs]
    fluct = [math.sqrt(r.var_count) / r.mean_count for r in recs]
    fslope = float(np.polyfit(logN, np.log(fluct), 1)[0])
    table = ScalingTable(summ, slope, slope_se, icpt, ratio, fluct, fslope)
    if cfg.out_prefix:
        Path(f"{cfg.out_prefix}_scaling.csv").write_text(table.csv())
    return table


# ---------------------------------------------------------------------------
# Output files


def _build_id() -> str:
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=Path(__file__).resolve().parent,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        rev = ""
    return f"zerovar-{__version__}" + (f"+g{rev}" if rev else "")


def write_outputs(summary: ExperimentSummary, prefix) -> None:
    """``<prefix>_summary.csv``, ``<prefix>_counts.csv`` and ``<prefix>_meta.json``."""
    prefix = str(prefix)
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}_summary.csv").write_text(summary.summary_csv())
    with open(f"{prefix}_counts.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "trial", "count"])
        for N, c in summary.counts.items():
            for t, v in enumerate(c):
                w.writerow([N, t, int(v)])
    meta = {
        "config": summary.config.echo(),
        "build": _build_id(),
        "seed": summary.config.master_seed,
        "rejections": {str(r.N): r.rejected_trials for r in summary.records},
        "redraw_events": [list(e) for e in summary.events],
        "wall_time_s": {str(r.N): r.wall_time for r in summary.records},
    }
    Path(f"{prefix}_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Bipotential moment


def mc_bipotential_check(t: float, trials: int = 1_000_000, seed: int = 0, chunk: int = 1 << 18) -> dict:
    """Monte Carlo ``E log|Y1| log|Y2|`` with ``Y1 = X1``, ``Y2 = t X1 + sqrt(1-t^2) X2``.

    Returns ``{"estimate", "se", "trials"}``.
    """
    if not 0.0 <= t <= 1.0:
        raise PreconditionError("t must lie in [0, 1]")
    if trials < 10_000:
        raise PreconditionError("need at least 1e4 trials")
    gen = SeedSpec(seed, 0).generator()
    s = ss = 0.0
    done = 0
    c = math.sqrt(max(0.0, 1.0 - t * t))
    while done < trials:
        n = min(chunk, trials - done)
        x1 = complex_normals(gen, n)
        x2 = complex_normals(gen, n)
        y2 = t * x1 + c * x2
        v = np.log(np.abs(x1)) * np.log(np.abs(y2))
        s += math.fsum(v)
        ss += math.fsum(v * v)
        done += n
    mean = s / trials
    var = (ss - trials * mean * mean) / (trials - 1)
    return {"estimate": mean, "se": math.sqrt(var / trials), "trials": trials}


def record_dict(r: NRecord) -> dict:
    return asdict(r)
