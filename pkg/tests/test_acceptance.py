"""Acceptance criteria 1-9.  Each test prints one ``ACCEPTANCE n: PASS/FAIL`` line.

Seeds are fixed constants chosen before any run.  Monte Carlo results are
cached per (criterion, workers) so criterion 9 can compare repeated runs.
"""

import csv
import io
import math
from functools import lru_cache

import numpy as np

from zerovar.bipotential import g_moment, pair_correlation
from zerovar.geometry import (
    Annulus,
    Ball,
    Disk,
    Rectangle,
    centered_chart,
    fs_distance,
    fs_tan2_distance,
    sample_fs_uniform,
)
from zerovar.harness import ExperimentConfig, mc_bipotential_check, moments, run_counting_experiment, scaling_study
from zerovar.harness import simulate_counts
from zerovar.kernel import p_n
from zerovar.variance import (
    nu_constant,
    nu_m1_closed,
    variance_boundary_exact,
    variance_bulk_exact,
    zeta,
)

from oracles import nu_m1_reference, zeta_mp

SEED_C2, SEED_C3, SEED_C5, SEED_C6, SEED_C7, SEED_C8 = 1002, 1003, 1005, 1006, 1007, 1008

C3_DOMAINS = {
    "disk": Disk(0, 1),
    "annulus": Annulus(0, 0.5, 1),
    "rectangle": Rectangle(-0.5 - 0.5j, 0.5 + 0.5j),
}
C8_TRIALS = 20_000
C9_M2_PREFIX = 1_000


# ---------------------------------------------------------------------------
# cached Monte Carlo runs


@lru_cache(maxsize=None)
def c2_run(workers: int):
    out = {}
    for r in (0.5, 1.0, 2.0):
        cfg = ExperimentConfig(m=1, degrees=1, domain=Disk(0, r), trials=100_000, master_seed=SEED_C2, workers=workers)
        out[r] = run_counting_experiment(cfg).summary_csv()
    return out


def _counts_csv(N, names, counts):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "domain", "trials", "mean_count", "se_mean", "var_count", "se_var"])
    for j, name in enumerate(names):
        w.writerow([N, name, counts.shape[0], *(repr(v) for v in moments(counts[:, j]))])
    return buf.getvalue()


@lru_cache(maxsize=None)
def c3_run(workers: int):
    names = list(C3_DOMAINS)
    out = {}
    for N in (10, 20, 50):
        res = simulate_counts(1, N, [C3_DOMAINS[k] for k in names], 50_000, SEED_C3, workers=workers)
        out[N] = (res.counts, _counts_csv(N, names, res.counts))
    return out


@lru_cache(maxsize=None)
def c5_run():
    return {t: mc_bipotential_check(t, 1_000_000, seed=SEED_C5) for t in (0.0, 0.3, 0.5, 0.7, 0.95, 1.0)}


def c8_config(trials, workers):
    return ExperimentConfig(
        m=2, degrees=(4, 6, 8), domain=Ball.centered(2), trials=trials, master_seed=SEED_C8, workers=workers
    )


@lru_cache(maxsize=None)
def c8_run(trials: int, workers: int):
    return scaling_study(c8_config(trials, workers))


# ---------------------------------------------------------------------------


def test_criterion_1_universal_constants(acceptance):
    ref11 = zeta_mp(1.5) / (8 * math.pi**1.5)
    e11 = abs(nu_constant(1, 1) / ref11 - 1)
    em = [abs(nu_constant(m, 1) / nu_m1_reference(m) - 1) for m in range(1, 7)]
    closed = [abs(nu_m1_closed(m) / nu_m1_reference(m) - 1) for m in range(1, 7)]
    ok = e11 <= 1e-9 and max(em) <= 1e-10 and max(closed) <= 1e-10
    acceptance(1, ok, f"nu11 rel err {e11:.1e}; max nu_m1 rel err {max(em):.1e} (m=1..6)")
    assert ok
    assert abs(zeta(1.5) / zeta_mp(1.5) - 1) < 1e-12


def test_criterion_2_bernoulli(acceptance):
    lines, ok = [], True
    runs = c2_run(1)
    for r in (0.5, 1.0, 2.0):
        want = r * r / (1 + r * r) ** 2
        exact = variance_boundary_exact(Disk(0, r), 1)
        rel = abs(exact / want - 1)
        row = dict(zip(*list(csv.reader(io.StringIO(runs[r])))))
        z = (float(row["var_count"]) - want) / float(row["se_var"])
        ok &= rel <= 1e-5 and abs(z) < 3
        lines.append(f"r={r}: exact rel {rel:.1e}, MC z={z:+.2f}")
    acceptance(2, ok, "; ".join(lines))
    assert ok


def test_criterion_3_three_way(acceptance):
    runs = c3_run(1)
    worst_rel, worst_z, ok = 0.0, 0.0, True
    for N in (10, 20, 50):
        counts = runs[N][0]
        for j, (name, U) in enumerate(C3_DOMAINS.items()):
            b = variance_boundary_exact(U, N)
            k = variance_bulk_exact(U, N)
            rel = abs(b - k) / k
            _, _, var, se_var = moments(counts[:, j])
            zb, zk = (var - b) / se_var, (var - k) / se_var
            worst_rel = max(worst_rel, rel)
            worst_z = max(worst_z, abs(zb), abs(zk))
            ok &= rel < 1e-3 and abs(zb) < 3 and abs(zk) < 3
            print(f"  N={N} {name}: boundary={b:.8f} bulk={k:.8f} MC={var:.5f}+-{se_var:.5f} z={zb:+.2f}")
    acceptance(3, ok, f"max |boundary-bulk|/bulk {worst_rel:.1e}; max |z| vs MC {worst_z:.2f} (9 cells, 5e4 trials)")
    assert ok


def test_criterion_4_asymptotic_law(acceptance):
    Ns = np.array([64, 256, 1024, 4096])
    lead = nu_constant(1, 1) * math.pi
    v = np.array([variance_boundary_exact(Disk(0, 1), int(N)) for N in Ns])
    dev = np.abs(v / (np.sqrt(Ns) * lead) - 1)
    c = dev[0] * Ns[0] ** 0.4  # constant fixed by the smallest degree
    bound_ok = bool(np.all(dev <= c * Ns**-0.4 * (1 + 1e-9)))
    monotone = bool(np.all(np.diff(dev) < 0))
    slope = float(np.polyfit(np.log(Ns), np.log(v), 1)[0])
    ok = bound_ok and monotone and abs(slope - 0.5) <= 0.03
    acceptance(
        4,
        ok,
        "|ratio-1| = " + ", ".join(f"{d:.2e}" for d in dev) + f" (c={c:.3f}); slope {slope:.4f}",
    )
    assert ok


def test_criterion_5_bipotential_moment(acceptance):
    res = c5_run()
    zs = {t: (r["estimate"] - g_moment(t)) / r["se"] for t, r in res.items()}
    ok = all(abs(z) < 3 for z in zs.values())
    acceptance(5, ok, "z = " + ", ".join(f"t={t}: {z:+.2f}" for t, z in zs.items()) + " (1e6 trials each)")
    assert ok


def _kernel_error(N, rng, chart):
    z0 = sample_fs_uniform(rng, 100)
    R = math.sqrt(math.log(N))
    u = R * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    v = R * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    a, b = chart(z0, u / math.sqrt(N)), chart(z0, v / math.sqrt(N))
    return float(np.max(np.abs(p_n(a, b, N) - np.exp(-np.abs(u - v) ** 2 / 2))))


def test_criterion_6_kernel_scaling(acceptance):
    Ns = np.array([1e2, 1e3, 1e4])
    rng = np.random.default_rng(SEED_C6)
    errs = np.array([_kernel_error(int(N), rng, lambda z0, x: np.array([centered_chart(c, y) for c, y in zip(z0, x)]))
                     for N in Ns])
    expo = float(np.polyfit(np.log(Ns), np.log(errs), 1)[0])
    ok = expo <= -0.4
    acceptance(6, ok, "max errors " + ", ".join(f"{e:.2e}" for e in errs) + f"; fitted exponent {expo:.3f}")
    assert ok


def test_criterion_7_correlation_normalization(acceptance):
    N = 500
    dmin = N**-0.4
    rng = np.random.default_rng(SEED_C7)
    z, w = [], []
    while len(z) < 100:
        a, b = sample_fs_uniform(rng, 1)[0], sample_fs_uniform(rng, 1)[0]
        if fs_distance(a, b) >= dmin:
            z.append(a)
            w.append(b)
    z, w = np.array(z), np.array(w)
    dev = np.abs(pair_correlation(fs_tan2_distance(z, w), N) - 1)
    bad = int(np.count_nonzero(dev >= 1e-3))
    d = fs_distance(z, w)
    ok = bad == 0
    detail = f"{bad}/100 pairs with |g-1| >= 1e-3 (max {dev.max():.2e} at dist {d[np.argmax(dev)]:.4f}; threshold dist {dmin:.4f})"
    acceptance(7, ok, detail)
    assert ok


def test_criterion_8_two_dimensional_points(acceptance):
    table = c8_run(C8_TRIALS, 1)
    recs = table.summary.records
    z_mean = [(r.mean_count - r.N**2 / 4) / r.se_mean for r in recs]
    var = [r.var_count for r in recs]
    a = all(abs(z) < 3 for z in z_mean)
    b = all(x > 0 for x in var) and bool(np.all(np.diff(var) > 0)) and 1.0 <= table.slope <= 2.0
    c = all(0.5 <= q <= 2.0 for q in table.ratio)
    ok = a and b and c
    acceptance(
        8,
        ok,
        "mean z " + ", ".join(f"{z:+.2f}" for z in z_mean)
        + "; var " + ", ".join(f"{x:.3f}" for x in var)
        + f"; slope {table.slope:.3f}+-{table.slope_se:.3f}; ratio " + ", ".join(f"{q:.3f}" for q in table.ratio),
    )
    assert ok


def test_criterion_9_determinism(acceptance):
    same2 = c2_run(1) == c2_run(2)
    r1, r2 = c3_run(1), c3_run(2)
    same3 = all(r1[N][1] == r2[N][1] and np.array_equal(r1[N][0], r2[N][0]) for N in r1)
    first = c5_run()
    c5_run.cache_clear()
    same5 = repr(first) == repr(c5_run())
    full = c8_run(C8_TRIALS, 1).summary
    pa = run_counting_experiment(c8_config(C9_M2_PREFIX, 1))
    pb = run_counting_experiment(c8_config(C9_M2_PREFIX, 2))
    same8 = pa.summary_csv() == pb.summary_csv() and all(
        np.array_equal(pa.counts[N], full.counts[N][:C9_M2_PREFIX]) for N in pa.counts
    )
    ok = same2 and same3 and same5 and same8
    acceptance(
        9,
        ok,
        f"criterion 2 {same2}, 3 {same3}, 5 {same5}, 8 (first {C9_M2_PREFIX} trials) {same8}; workers 1 vs 2",
    )
    assert ok
