"""Number variance of zeros in a domain: exact evaluators and the universal constants.

For m = 1 two exact routes are provided.  The boundary route integrates the
mixed antiholomorphic derivative of the bipotential over ∂U x ∂U; the bulk
route integrates the pair correlation over U x U.  For general (m, k) only
the leading asymptotics ``N^{2k-m-1/2} nu_mk Vol(∂U)`` are available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from .bipotential import boundary_kernel, pair_correlation
from .errors import PreconditionError, QuadratureError
from .geometry import (
    Annulus,
    AreaQuadrature,
    Ball,
    Disk,
    Rectangle,
    _panel_gauss,
    area_nodes,
    boundary_nodes,
    boundary_volume,
    domain_volume,
    fs_tan2_distance,
)

__all__ = [
    "zeta",
    "n_coeff",
    "bose_integral",
    "nu_constant",
    "nu_constant_with_error",
    "nu_m1_closed",
    "predicted_variance",
    "expected_count",
    "variance_boundary_exact",
    "variance_bulk_exact",
    "ConstantEntry",
    "ConstantTable",
    "constant_table",
    "BOUNDARY_SIGN",
]

# Global sign of the boundary double integral, fixed by the one-zero case:
# for N = 1 the count in Disk(0, r) is Bernoulli(p), p = r^2/(1+r^2), so the
# result must equal p(1-p) > 0.  See tests/test_variance.py.
BOUNDARY_SIGN = -1.0

MAX_BOUNDARY_NODES = 1 << 15

# ---------------------------------------------------------------------------
# Riemann zeta for real s > 1

# B_{2k} / (2k)! for k = 1..8
_B2K_FACT = [
    1.0 / 12,
    -1.0 / 720,
    1.0 / 30240,
    -1.0 / 1209600,
    1.0 / 47900160,
    -691.0 / 1307674368000,
    1.0 / 74724249600,
    -3617.0 / 10670622842880000,
]


def zeta(s: float) -> float:
    """Riemann zeta for real ``s > 1``: direct sum to M = 16 plus Euler-Maclaurin tail."""
    if not s > 1:
        raise PreconditionError("zeta is implemented for real s > 1")
    M = 16
    head = math.fsum(n ** (-s) for n in range(1, M))
    tail = M ** (1 - s) / (s - 1) + 0.5 * M ** (-s)
    rising = s  # s (s+1) ... (s+2k-2)
    for k, c in enumerate(_B2K_FACT, start=1):
        tail += c * rising * M ** (-s - 2 * k + 1)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return head + tail


# ---------------------------------------------------------------------------
# Universal constants


def n_coeff(m: int, j: int) -> int:
    """``n(m, j) = sum_{l=1}^{j} (m-l)! / (j-l)!`` (an integer)."""
    if not 1 <= j <= m:
        raise PreconditionError(f"need 1 <= j <= m, got m={m}, j={j}")
    return sum(math.factorial(m - l) // math.factorial(j - l) for l in range(1, j + 1))


@lru_cache(maxsize=None)
def _bose(m: int, j: int):
    def near(r):
        # r^{2m} / (e^{r^2} - 1)^j with the ratio r^2 / expm1(r^2) kept bounded
        q = r * r / np.expm1(r * r) if r > 0 else 1.0
        return q**j * r ** (2 * m - 2 * j)

    def far(u):
        # r = sqrt(u): r^{2m} (e^{r^2}-1)^{-j} dr = u^{m-1/2} e^{-ju} (1-e^{-u})^{-j} du / 2
        return 0.5 * u ** (m - 0.5) * math.exp(-j * u) / (-math.expm1(-u)) ** j

    a, ea = integrate.quad(near, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    b, eb = integrate.quad(far, 1.0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=200)
    return a + b, ea + eb


def bose_integral(m: int, j: int) -> float:
    """``J(m, j) = ∫_0^∞ r^{2m} / (e^{r^2} - 1)^j dr`` for ``1 <= j <= m``."""
    if not 1 <= j <= m:
        raise PreconditionError(f"need 1 <= j <= m, got m={m}, j={j}")
    return _bose(m, j)[0]


def nu_constant_with_error(m: int, k: int):
    """``(nu_mk, relative error estimate)`` from the Bose-integral formula."""
    if not 1 <= k <= m:
        raise PreconditionError(f"need 1 <= k <= m, got m={m}, k={k}")
    pref = (
        math.pi ** (m - 2 * k - 0.5)
        * math.factorial(k)
        * math.factorial(m - 1)
        / (4.0 * math.gamma(m + 0.5) * math.factorial(m - k) ** 2)
    )
    total = 0.0
    err = 0.0
    for j in range(1, k + 1):
        c = n_coeff(m, j) / (j * math.factorial(k - j))
        val, e = _bose(m, j)
        total += c * val
        err += abs(c) * e
    nu = pref * total
    return nu, err / abs(total)


def nu_constant(m: int, k: int) -> float:
    """Universal constant ``nu_mk`` in the variance of the k-codimensional zero volume."""
    return nu_constant_with_error(m, k)[0]


def nu_m1_closed(m: int) -> float:
    """Closed form ``nu_m1 = pi^{m-5/2} zeta(m + 1/2) / 8``."""
    if m < 1:
        raise PreconditionError("m must be >= 1")
    return math.pi ** (m - 2.5) * zeta(m + 0.5) / 8.0


@dataclass
class ConstantEntry:
    nu: float
    rel_err: float
    bose_integrals: tuple
    n_coeffs: tuple


@dataclass
class ConstantTable:
    """``nu_mk`` for ``1 <= k <= m <= max_m`` with their ingredients."""

    entries: dict = field(default_factory=dict)

    def rows(self):
        return [(m, k, e.nu, e.rel_err) for (m, k), e in sorted(self.entries.items())]


def constant_table(max_m: int = 6) -> ConstantTable:
    table = ConstantTable()
    for m in range(1, max_m + 1):
        for k in range(1, m + 1):
            nu, err = nu_constant_with_error(m, k)
            table.entries[(m, k)] = ConstantEntry(
                nu,
                err,
                tuple(bose_integral(m, j) for j in range(1, k + 1)),
                tuple(n_coeff(m, j) for j in range(1, k + 1)),
            )
    return table


# ---------------------------------------------------------------------------
# Asymptotics and the mean


def expected_count(m: int, N: int, U) -> float:
    """``E N_U = N^m m! Vol_FS(U) / pi^m``."""
    return N**m * math.factorial(m) * domain_volume(U, m) / math.pi**m


def predicted_variance(m: int, k: int, N: int, U) -> float:
    """Leading term ``N^{2k-m-1/2} nu_mk Vol_{2m-1}(∂U)``."""
    if not 1 <= k <= m:
        raise PreconditionError(f"need 1 <= k <= m, got m={m}, k={k}")
    if N < 1:
        raise PreconditionError("N must be >= 1")
    return N ** (2 * k - m - 0.5) * nu_constant(m, k) * boundary_volume(U, m)


# ---------------------------------------------------------------------------
# Exact variance, m = 1

_CHUNK = 1 << 22  # pair evaluations per block


def _boundary_sum(U, N: int, n: int) -> float:
    z = boundary_nodes(U, n)
    w = boundary_nodes(U, n, staggered=True)
    a = np.conj(z.dz)
    b = np.conj(w.dz)
    rows = max(1, _CHUNK // len(w))
    total = 0.0 + 0.0j
    for i in range(0, len(z), rows):
        M = boundary_kernel(z.points[i : i + rows, None], w.points[None, :], N)
        total += a[i : i + rows] @ (M @ b)
    return float(BOUNDARY_SIGN * total.real)


def variance_boundary_exact(U, N: int, rtol: float = 1e-6, n0: int | None = None) -> float:
    """``Var(N_U) = -∫∫_{∂U x ∂U} ∂̄_z ∂̄_w Q_N`` by a product rule on the boundary.

    One factor uses the boundary nodes, the other the staggered set, so no
    node pair lies on the diagonal.  Starting from ``max(64, 8 ceil(sqrt N))``
    nodes per curve, the node count is doubled until successive values agree
    to ``rtol``.

    Raises
    ------
    QuadratureError
        No convergence before ``2^15`` nodes per curve.
    """
    if U.dim != 1:
        raise PreconditionError("the boundary formula is for m = 1")
    n = n0 or max(64, 8 * math.ceil(math.sqrt(N)))
    prev = _boundary_sum(U, N, n)
    while 2 * n <= MAX_BOUNDARY_NODES:
        n *= 2
        cur = _boundary_sum(U, N, n)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise QuadratureError(f"boundary integral not converged at {n} nodes per curve")


def _rect_grid(U: Rectangle, per_unit: float, sym_x: bool, sym_y: bool):
    order = 8

    def axis(a, b, half):
        panels = max(1, math.ceil(per_unit * (b - a) / order))
        if half:
            panels += panels % 2  # symmetric nodes, none on the axis
        return _panel_gauss(np.linspace(a, b, panels + 1), order)

    x, wx = axis(U.lo.real, U.hi.real, sym_x)
    y, wy = axis(U.lo.imag, U.hi.imag, sym_y)
    full = AreaQuadrature((x[:, None] + 1j * y[None, :]).ravel(), (wx[:, None] * wy[None, :]).ravel())
    fx = x > 0 if sym_x else np.ones(x.shape, bool)
    fy = y > 0 if sym_y else np.ones(y.shape, bool)
    mult = (2.0 if sym_x else 1.0) * (2.0 if sym_y else 1.0)
    zx, zy = x[fx], y[fy]
    half = AreaQuadrature(
        (zx[:, None] + 1j * zy[None, :]).ravel(), mult * (wx[fx][:, None] * wy[fy][None, :]).ravel()
    )
    return half, full


def _bulk_nodes(U, per_unit: float):
    """(z rule, w rule): the z rule may be reduced by symmetries of the pair integrand.

    The integrand depends on (z, w) through FS distance and |z|, |w|, so it is
    invariant under simultaneous rotation about 0 and under simultaneous
    reflection in either axis.
    """
    if isinstance(U, Ball):
        U = Disk(complex(U.center[0]), U.radius)
    if isinstance(U, (Disk, Annulus)) and U.center == 0:
        full = area_nodes(U, per_unit)
        r0, r1 = (U.r_inner, U.r_outer) if isinstance(U, Annulus) else (0.0, U.radius)
        order = 8
        panels = max(1, math.ceil(per_unit * (r1 - r0) / order))
        r, wr = _panel_gauss(np.linspace(r0, r1, panels + 1), order)
        return AreaQuadrature(r.astype(complex), 2 * np.pi * r * wr), full
    if isinstance(U, Rectangle):
        sym_x = U.lo.real == -U.hi.real
        sym_y = U.lo.imag == -U.hi.imag
        return _rect_grid(U, per_unit, sym_x, sym_y)
    full = area_nodes(U, per_unit)
    return full, full


def _pair_integral(Z: AreaQuadrature, W: AreaQuadrature, N: int) -> float:
    rz = N / (np.pi * (1 + np.abs(Z.points) ** 2) ** 2) * Z.weight
    rw = N / (np.pi * (1 + np.abs(W.points) ** 2) ** 2) * W.weight
    rows = max(1, _CHUNK // W.points.size)
    total = 0.0
    for i in range(0, Z.points.size, rows):
        tau = fs_tan2_distance(Z.points[i : i + rows, None], W.points[None, :], 1)
        h = np.asarray(pair_correlation(tau, N)) - 1.0
        total += float(rz[i : i + rows] @ (h @ rw))
    return total


def variance_bulk_exact(U, N: int, rtol: float = 2e-5, max_levels: int = 6) -> float:
    """``Var(N_U) = E N_U + ∫∫_{U x U} rho(z) rho(w) (g(z, w) - 1)``.

    Composite Gauss-Legendre panels (plus the periodic trapezoid in angle for
    round domains) with about ``8 sqrt(N)`` nodes per unit chart length, so a
    panel never exceeds the correlation length ``N^{-1/2}``; the density is
    raised by half until successive values agree to ``rtol``.  Round domains
    centered at 0 reduce the outer integral to a radius.

    Raises
    ------
    QuadratureError
        No convergence within ``max_levels`` refinements.
    """
    if U.dim != 1:
        raise PreconditionError("the bulk formula is for m = 1")
    mean = expected_count(1, N, U)
    per_unit = max(24.0, 8.0 * math.sqrt(N))
    prev = None
    for _ in range(max_levels):
        Z, W = _bulk_nodes(U, per_unit)
        cur = mean + _pair_integral(Z, W, N)
        if prev is not None and abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
        per_unit *= 1.5
    raise QuadratureError("bulk double integral did not converge")
