"""Command line entry point: ``zerovar <subcommand> ...``.

Exit codes: 0 success, 1 invalid input, 2 quadrature failure, 3 solver abort.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .bipotential import g_moment
from .ensemble import SeedSpec, coefficient_rows, sample_system
from .errors import PreconditionError, QuadratureError, SolverAbort
from .geometry import domain_from_dict
from .harness import load_config, mc_bipotential_check, run_counting_experiment, scaling_study
from .kernel import grad_lambda, lambda_n
from .variance import constant_table, variance_boundary_exact, variance_bulk_exact


def _parse_domain(text: str, m: int = 1):
    """Domain as JSON text or a path to a JSON file."""
    p = Path(text)
    raw = p.read_text() if p.is_file() else text
    try:
        spec = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"domain must be JSON, e.g. '{{\"kind\": \"disk\", \"params\": {{\"radius\": 1}}}}': {exc}")
    return domain_from_dict(spec, m)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline=""), True


def cmd_sample(a):
    fh, close = _open_out(a.out)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["stream_id", "component", "J", "re", "im"])
    sys_ = sample_system(a.m, a.degree, a.k or a.m, SeedSpec(a.seed, a.stream))
    for l, p in enumerate(sys_):
        w.writerows(coefficient_rows(p, a.stream, l))
    if close:
        fh.close()
    return 0


def cmd_variance_mc(a):
    cfg = load_config(a.config)
    if a.workers:
        cfg.workers = a.workers
    summ = run_counting_experiment(cfg)
    sys.stdout.write(summ.summary_csv())
    return 0


def cmd_scaling(a):
    cfg = load_config(a.config)
    if a.workers:
        cfg.workers = a.workers
    sys.stdout.write(scaling_study(cfg).csv())
    return 0


def cmd_variance_exact(a):
    U = _parse_domain(a.domain)
    f = variance_boundary_exact if a.method == "boundary" else variance_bulk_exact
    print(f"N,method,variance\n{a.degree},{a.method},{f(U, a.degree)!r}")
    return 0


def cmd_constants(a):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["m", "k", "nu", "rel_err_estimate"])
    for m, k, nu, err in constant_table(a.max_m).rows():
        w.writerow([m, k, repr(nu), f"{err:.3e}"])
    return 0


def cmd_kernel_check(a):
    w0 = complex(a.w)
    x = np.linspace(-a.extent, a.extent, a.grid)
    z = (x[:, None] + 1j * x[None, :]).ravel()
    lam = lambda_n(z, w0, a.degree)
    fh, close = _open_out(a.out)
    out = csv.writer(fh, lineterminator="\n")
    out.writerow(["z_re", "z_im", "w_re", "w_im", "lambda", "p", "gz_re", "gz_im", "gw_re", "gw_im"])
    for zi, li in zip(z, np.atleast_1d(lam)):
        try:
            gz, gw = grad_lambda(zi, w0, a.degree)
        except ZeroDivisionError:
            gz = gw = complex("nan")
        vals = [zi.real, zi.imag, w0.real, w0.imag, li, math.exp(-li), gz.real, gz.imag, gw.real, gw.imag]
        out.writerow([repr(float(v)) for v in vals])
    if close:
        fh.close()
    return 0


def cmd_bipotential(a):
    r = mc_bipotential_check(a.t, a.trials, a.seed)
    g = float(g_moment(a.t))
    print("t,estimate,se,g_moment,z_score")
    print(f"{a.t!r},{r['estimate']!r},{r['se']!r},{g!r},{(r['estimate'] - g) / r['se']!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zerovar", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log re-draws and progress")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("sample", help="write the raw Gaussian coefficients of one draw")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--k", type=int, default=None, help="number of polynomials (default m)")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--stream", type=int, default=0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("variance-mc", help="Monte Carlo zero counts from a TOML config")
    s.add_argument("--config", required=True)
    s.add_argument("--workers", type=int, default=None)
    s.set_defaults(func=cmd_variance_mc)

    s = sub.add_parser("scaling-study", help="Monte Carlo over several degrees with log-log fit")
    s.add_argument("--config", required=True)
    s.add_argument("--workers", type=int, default=None)
    s.set_defaults(func=cmd_scaling)

    s = sub.add_parser("variance-exact", help="exact number variance for m = 1")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--domain", required=True, help="JSON domain spec or path to one")
    s.add_argument("--method", choices=["boundary", "bulk"], default="boundary")
    s.set_defaults(func=cmd_variance_exact)

    s = sub.add_parser("constants", help="table of nu_mk")
    s.add_argument("--max-m", type=int, default=6)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("kernel-check", help="dump Lambda, P and gradients on a grid of z")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--grid", type=int, default=11, help="grid points per axis")
    s.add_argument("--extent", type=float, default=2.0)
    s.add_argument("--w", default="0.5", help="second point, e.g. 0.5+0.2j")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_kernel_check)

    s = sub.add_parser("bipotential-check", help="Monte Carlo E log|Y1| log|Y2|")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--trials", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_bipotential)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except QuadratureError as exc:
        print(f"quadrature failed: {exc}", file=sys.stderr)
        return 2
    except SolverAbort as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return 3
    except (PreconditionError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
