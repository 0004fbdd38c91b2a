"""Dilogarithm bipotential of the variance current and the pair correlation (m = 1).

    G̃(t) = Li2(t^2) / (4 pi^2),      F(λ) = G̃(e^{-λ}),      Q_N = F(Λ_N).

All derivatives of F are expressed through ``x = e^{-2λ}``, which keeps them
finite for large λ and lets ``1 - x = -expm1(-2λ)`` carry the diagonal
singularity accurately.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DiagonalEvaluation, PreconditionError, SingularityError
from .geometry import as_points, fs_tan2_distance
from .kernel import grad_lambda, p_n

__all__ = [
    "EULER_GAMMA",
    "dilog",
    "gtilde",
    "g_moment",
    "f_deriv",
    "q_n",
    "dbar_dbar_q",
    "boundary_kernel",
    "k21_density",
    "pair_correlation",
    "mean_density",
]

EULER_GAMMA = 0.577215664901532860606512090082
PI2 = math.pi**2
_ZETA2 = PI2 / 6.0
_N_SERIES = 64  # x <= 1/2: x^64/64^2 < 1e-22
_DIAG_TOL = 1e-8


def _out(x):
    return x[()] if np.ndim(x) == 0 else x


def _li2_series(x):
    n = np.arange(_N_SERIES, 0, -1, dtype=float)
    acc = np.zeros_like(x)
    for k in n:
        acc = (acc + 1.0 / (k * k)) * x
    return acc


def dilog(x):
    """``Li2(x) = sum x^n / n^2`` for x in [0, 1].

    Direct series for ``x <= 1/2``; above that the reflection
    ``Li2(x) = pi^2/6 - log(x) log(1-x) - Li2(1-x)``.
    """
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
        raise PreconditionError("dilog argument must lie in [0, 1]")
    lo = x <= 0.5
    out = np.empty_like(x)
    out[lo] = _li2_series(x[lo])
    xh = x[~lo]
    yh = 1.0 - xh
    with np.errstate(divide="ignore", invalid="ignore"):
        refl = _ZETA2 - np.where(yh > 0, np.log(xh) * np.log(yh), 0.0) - _li2_series(yh)
    out[~lo] = refl
    return _out(out)


def gtilde(t):
    """``G̃(t) = Li2(t^2) / (4 pi^2)`` on [0, 1]; G̃(1) = 1/24."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)) or np.any(np.isnan(t)):
        raise PreconditionError("gtilde argument must lie in [0, 1]")
    return _out(dilog(t * t) / (4.0 * PI2))


def g_moment(t):
    """``E(log|Y1| log|Y2|)`` for unit complex Gaussians with ``|E Y1 Ȳ2| = t``."""
    return _out(EULER_GAMMA**2 / 4.0 + PI2 * np.asarray(gtilde(t)))


def f_deriv(lam, order: int = 0):
    """Derivative of ``F(λ) = G̃(e^{-λ})`` of the given order (0 to 4).

    With ``x = e^{-2λ}``:
    F' = log(1-x) / (2 pi^2),  F'' = x / (pi^2 (1-x)),
    F''' = -2x / (pi^2 (1-x)^2),  F'''' = 4x(1+x) / (pi^2 (1-x)^3).
    """
    lam = np.asarray(lam, dtype=float)
    if order not in (0, 1, 2, 3, 4):
        raise PreconditionError("order must be 0..4")
    if order == 0:
        if np.any(lam < 0):
            raise PreconditionError("F is defined for lambda >= 0")
        return _out(gtilde(np.exp(-lam)))
    if np.any(lam <= 0):
        raise SingularityError("F^(j), j >= 1, is singular at lambda = 0")
    x = np.exp(-2.0 * lam)
    omx = -np.expm1(-2.0 * lam)
    if order == 1:
        return _out(np.log1p(-x) / (2.0 * PI2))
    if order == 2:
        return _out(x / (PI2 * omx))
    if order == 3:
        return _out(-2.0 * x / (PI2 * omx**2))
    return _out(4.0 * x * (1.0 + x) / (PI2 * omx**3))


def q_n(z, w, N: int, m: int = 1):
    """Pluri-bipotential ``Q_N(z, w) = G̃(P_N(z, w))``, in [0, 1/24]."""
    return _out(np.asarray(gtilde(np.clip(p_n(z, w, N, m), 0.0, 1.0))))


def _check_off_diagonal(tau):
    if np.any(np.arctan(np.sqrt(tau)) < _DIAG_TOL):
        raise DiagonalEvaluation("two-point quantity requested within 1e-8 of the diagonal")


def dbar_dbar_q(z, w, N: int, m: int = 1) -> np.ndarray:
    """Coefficient matrix ``M_ab = ∂²Q_N / ∂z̄_a ∂w̄_b = F''(Λ) ∂Λ/∂z̄_a ∂Λ/∂w̄_b``.

    The term ``F'(Λ) ∂²Λ/∂z̄∂w̄`` is absent because that mixed derivative of Λ
    vanishes identically on CP^m.  Returns shape ``(..., m, m)``.
    """
    tau = fs_tan2_distance(z, w, m)
    _check_off_diagonal(tau)
    lam = 0.5 * N * np.log1p(tau)
    gz, gw = grad_lambda(z, w, N, m)
    gz = as_points(gz, m)
    gw = as_points(gw, m)
    f2 = np.asarray(f_deriv(lam, 2))
    return f2[..., None, None] * gz[..., :, None] * gw[..., None, :]


def boundary_kernel(z, w, N: int):
    """Scalar ``∂²Q_N/∂z̄∂w̄`` for m = 1, in a form without poles at antipodes.

    ``-(N^2 / 4 pi^2) (z-w)^2 y^{N-1} / ((1+|z|^2)^2 (1+|w|^2)^2 (1 - y^N))``
    with ``y = cos^2 d(z, w) = 1 / (1 + tan^2 d)``.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    tau = fs_tan2_distance(z, w, 1)
    _check_off_diagonal(tau)
    l1p = np.log1p(tau)
    num = np.exp(-(N - 1) * l1p) if N > 1 else np.ones_like(l1p)
    den = -np.expm1(-N * l1p)
    a = 1.0 + np.abs(z) ** 2
    b = 1.0 + np.abs(w) ** 2
    return _out(-(N * N / (4.0 * PI2)) * (z - w) ** 2 * num / (a * a * b * b * den))


def mean_density(z, N: int):
    """Expected zero density ``N / (pi (1+|z|^2)^2)`` per chart Lebesgue measure (m = 1)."""
    z = np.asarray(z, dtype=complex)
    return _out(N / (math.pi * (1.0 + np.abs(z) ** 2) ** 2))


def k21_density(z, w, N: int):
    """Two-point intensity of the zeros (m = 1), per Lebesgue x Lebesgue on the chart.

    ``4 ∂⁴Q_N/∂z∂z̄∂w∂w̄ + ρ(z) ρ(w)``, with the fourth derivative expanded by
    the chain rule through Λ_N.  Accurate off the diagonal; near it the terms
    cancel like ``1/λ`` and :func:`pair_correlation` should be used instead.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    tau = fs_tan2_distance(z, w, 1)
    _check_off_diagonal(tau)
    lam = 0.5 * N * np.log1p(tau)
    A = 1.0 + np.abs(z) ** 2
    B = 1.0 + np.abs(w) ** 2
    C = 1.0 + z * np.conj(w)
    h = 0.5 * N
    lz = h * (np.conj(z) / A - np.conj(w) / C)
    lw = h * (np.conj(w) / B - np.conj(z) / np.conj(C))
    lzzb = h / A**2
    lwwb = h / B**2
    lzwb = -h / C**2
    az = np.abs(lz) ** 2
    aw = np.abs(lw) ** 2
    f2, f3, f4 = (np.asarray(f_deriv(lam, k)) for k in (2, 3, 4))
    third = aw * lzzb + 2.0 * np.real(lw * np.conj(lz) * lzwb) + az * lwwb
    q4 = f4 * az * aw + f3 * third + f2 * (np.abs(lzwb) ** 2 + lzzb * lwwb)
    return _out(4.0 * q4 + mean_density(z, N) * mean_density(w, N))


def pair_correlation(tau, N: int):
    """Normalized pair correlation ``k21 / (ρ ρ)`` as a function of ``tan^2 d``.

    By SU(2) invariance it depends on the pair only through their distance:

        g - 1 = [N² τ² (1+x)/(1-x)² - 2Nτ(2+τ)/(1-x) + (2 + 2τ + τ²)] x/(1-x),

    ``x = (1+τ)^{-N}``.  Below ``Nτ = 1e-4`` the leading Taylor terms
    ``(N-1)² τ (2+τ) / (4N)`` are used.  For N = 1 there is one zero and g = 0.
    """
    tau = np.asarray(tau, dtype=float)
    if N == 1:
        return _out(np.zeros_like(tau))
    t = np.minimum(tau, 1e100)
    l1p = np.log1p(t)
    x = np.exp(-N * l1p)
    omx = -np.expm1(-N * l1p)
    small = N * t < 1e-4
    with np.errstate(divide="ignore", invalid="ignore"):
        br = N * N * t * t * (1 + x) / omx**2 - 2 * N * t * (2 + t) / omx + (2 + 2 * t + t * t)
        g = 1.0 + br * x / omx
    series = (N - 1) ** 2 * t * (2 + t) / (4.0 * N)
    return _out(np.where(small, series, g))
