"""Normalized Szegő kernel of O(N) -> CP^m with the Fubini-Study metric.

With the monomial orthonormal basis the normalized kernel is

    P_N(z, w) = |1 + z.w̄|^N / ((1 + |z|^2)(1 + |w|^2))^{N/2} = cos(d(z, w))^N,

and ``Λ_N = -log P_N = (N/2) log(1 + tan^2 d)``.  The tangent form is used
throughout because it has no cancellation near the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleError
from .geometry import as_points, fs_tan2_distance

__all__ = ["KernelEval", "lambda_n", "p_n", "grad_lambda", "kernel_eval"]


def _out(x):
    return x[()] if np.ndim(x) == 0 else x


def lambda_n(z, w, N: int, m: int = 1):
    """``Λ_N(z, w) = -log P_N(z, w)``; ``inf`` where ``1 + z.w̄ = 0``."""
    tau = fs_tan2_distance(z, w, m)
    return _out(0.5 * N * np.log1p(tau))


def p_n(z, w, N: int, m: int = 1):
    """Normalized Szegő kernel ``P_N = exp(-Λ_N)``, in [0, 1]."""
    tau = fs_tan2_distance(z, w, m)
    with np.errstate(divide="ignore"):
        return _out(np.exp(-0.5 * N * np.log1p(tau)))


def grad_lambda(z, w, N: int, m: int = 1):
    """Antiholomorphic gradients ``(∂Λ/∂z̄_a, ∂Λ/∂w̄_b)``.

    ``∂Λ/∂z̄_a = (N/2) [z_a / (1 + |z|^2) - w_a / (1 + z̄.w)]`` and the same with
    z and w exchanged.  Arrays have a trailing axis of length m, except for
    m = 1 where points are bare complex numbers.
    """
    zp = as_points(z, m)
    wp = as_points(w, m)
    zp, wp = np.broadcast_arrays(zp, wp)
    inner = 1.0 + np.sum(np.conj(zp) * wp, axis=-1)  # 1 + z̄.w
    scale = np.sqrt((1.0 + np.sum(np.abs(zp) ** 2, -1)) * (1.0 + np.sum(np.abs(wp) ** 2, -1)))
    if np.any(np.abs(inner) <= 1e-300 * scale):
        raise PoleError("1 + z̄.w = 0: gradient of Λ has a pole")
    nz = 1.0 + np.sum(np.abs(zp) ** 2, axis=-1)
    nw = 1.0 + np.sum(np.abs(wp) ** 2, axis=-1)
    gz = 0.5 * N * (zp / nz[..., None] - wp / inner[..., None])
    gw = 0.5 * N * (wp / nw[..., None] - zp / np.conj(inner)[..., None])
    if m == 1:
        return _out(gz[..., 0]), _out(gw[..., 0])
    return gz, gw


@dataclass
class KernelEval:
    """Λ_N and its antiholomorphic gradients at one pair of points."""

    lam: float
    grad_zbar: np.ndarray
    grad_wbar: np.ndarray

    @property
    def p(self) -> float:
        return float(np.exp(-self.lam))


def kernel_eval(z, w, N: int, m: int = 1) -> KernelEval:
    gz, gw = grad_lambda(z, w, N, m)
    return KernelEval(float(lambda_n(z, w, N, m)), np.atleast_1d(gz), np.atleast_1d(gw))
