"""Zeros of sampled polynomials: enumeration, contour counting, 2x2 systems.

Univariate polynomials are handled on the Riemann sphere: a point with
``|z| <= 1`` is evaluated by Horner's rule on the coefficients, a point with
``|z| > 1`` through the reversed polynomial in ``y = 1/z``.  Both branches
only ever see arguments of modulus at most one, so neither overflows.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .ensemble import RandomPolynomial, log_weights, multi_indices
from .errors import (
    DegenerateSystem,
    NearBoundaryZero,
    PreconditionError,
    RootAtInfinity,
    RootFindingFailure,
)
from .geometry import Annulus, Ball, Disk, Rectangle, contains

__all__ = [
    "ZeroMethod",
    "ZeroSet",
    "normalized_coeffs",
    "aberth_batch",
    "all_roots",
    "count_zeros_contour",
    "solve_system_2d",
    "count_in_domain",
    "ENUMERATE_MAX_N",
]

log = logging.getLogger(__name__)

ENUMERATE_MAX_N = 200
RESIDUAL_TOL = 1e-8
SYSTEM_RESIDUAL_TOL = 1e-6
CONTOUR_MAX_NODES = 1 << 20
_MAX_ITER = 500


class ZeroMethod(str, enum.Enum):
    ENUMERATED = "enumerated"
    CONTOUR = "contour"


@dataclass
class ZeroSet:
    """Zeros of a polynomial (system).

    ``points`` is ``(n,)`` complex for m = 1 and ``(n, 2)`` for m = 2.  A
    contour-counted set carries no points, only ``count``.
    """

    points: np.ndarray
    method: ZeroMethod = ZeroMethod.ENUMERATED
    count: int = field(default=-1)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        if self.count < 0:
            self.count = int(self.points.shape[0])

    def __len__(self) -> int:
        return self.count


def normalized_coeffs(p: RandomPolynomial) -> np.ndarray:
    """Weighted coefficients ``c_J sqrt(binom(N, J))`` divided by their largest modulus.

    The weights are combined in log space so large N does not overflow.
    """
    c = p.coeffs
    lw = log_weights(p.m, p.N)
    with np.errstate(divide="ignore"):
        lm = np.log(np.abs(c)) + lw
    top = np.max(lm)
    if not np.isfinite(top):
        raise PreconditionError("zero polynomial")
    return np.exp(lm - top) * np.exp(1j * np.angle(c))


# ---------------------------------------------------------------------------
# Univariate evaluation on the sphere


def _sphere_horner(A, z):
    """Horner pass over coefficient rows ``A`` (B, N+1) at points ``z`` (B, n).

    Returns ``(val, dval, bound, inside, x)`` where for ``|z| <= 1`` ``val`` is
    p(z) and for ``|z| > 1`` it is the reversed polynomial at ``x = 1/z``;
    ``bound`` is the matching sum of ``|a_j| |x|^j`` used for residual gates.
    """
    N = A.shape[1] - 1
    inside = np.abs(z) <= 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(inside, z, 1.0 / z)
    ax = np.abs(x)
    absA = np.abs(A)
    val = np.where(inside, A[:, N, None], A[:, 0, None])
    bound = np.where(inside, absA[:, N, None], absA[:, 0, None])
    dval = np.zeros_like(val)
    for i in range(N):
        c = np.where(inside, A[:, N - 1 - i, None], A[:, i + 1, None])
        ca = np.where(inside, absA[:, N - 1 - i, None], absA[:, i + 1, None])
        dval = dval * x + val
        val = val * x + c
        bound = bound * ax + ca
    return val, dval, bound, inside, x


def _newton_ratio(A, z):
    """``p(z) / p'(z)`` evaluated stably on both hemispheres."""
    N = A.shape[1] - 1
    val, dval, _, inside, x = _sphere_horner(A, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        r_in = val / dval
        r_out = z * val / (N * val - x * dval)
    return np.where(inside, r_in, r_out)


def _relative_residual(A, z):
    val, _, bound, _, _ = _sphere_horner(A, z)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.abs(val) / bound


def _initial_guesses(N: int) -> np.ndarray:
    k = np.arange(N)
    theta = 2.0 * np.pi * (k + 0.25) / N
    jitter = 1e-3 * np.sin(2.399963229728653 * (k + 1))  # golden-angle sequence
    return (1.0 + jitter) * np.exp(1j * theta)


def aberth_batch(A: np.ndarray, tol: float = 1e-14, max_iter: int = _MAX_ITER):
    """Aberth-Ehrlich simultaneous iteration on a batch of univariate polynomials.

    Parameters
    ----------
    A : complex ndarray (B, N+1)
        Coefficients in increasing powers, leading coefficient nonzero.

    Returns
    -------
    roots : complex ndarray (B, N)
    ok : bool ndarray (B,)
        Whether every root of the row passed the residual gate
        ``|p(z)| <= 1e-8 sum |a_j| |z|^j``.

    Each root stops moving once its correction drops below ``tol`` relative to
    ``max(|z|, 1)``; the rows of the batch never interact.
    """
    A = np.asarray(A, dtype=complex)
    B, N1 = A.shape
    N = N1 - 1
    if N < 1:
        raise PreconditionError("degree must be >= 1")
    if N == 1:
        z = -A[:, :1] / A[:, 1:]
        return z, np.isfinite(z[:, 0])
    z = np.tile(_initial_guesses(N), (B, 1))
    frozen = np.zeros(z.shape, dtype=bool)
    eye = np.eye(N, dtype=bool)
    for _ in range(max_iter):
        r = _newton_ratio(A, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            diff = z[:, :, None] - z[:, None, :]
            inv = np.where(eye, 0.0, 1.0 / diff)
            s = inv.sum(axis=2)
            w = r / (1.0 - r * s)
        w = np.where(frozen | ~np.isfinite(w), 0.0, w)
        z = z - w
        frozen |= np.abs(w) <= tol * np.maximum(np.abs(z), 1.0)
        if frozen.all():
            break
    r = _newton_ratio(A, z)
    z = np.where(np.isfinite(r), z - r, z)
    res = _relative_residual(A, z)
    ok = np.all(np.isfinite(z) & (res <= RESIDUAL_TOL), axis=1)
    return z, ok


def _check_leading(a):
    if abs(a[-1]) < 1e-300 * np.max(np.abs(a)):
        raise RootAtInfinity("leading coefficient is negligible")


def all_roots(p: RandomPolynomial) -> ZeroSet:
    """All N zeros of a univariate polynomial by Aberth-Ehrlich iteration.

    Raises
    ------
    RootAtInfinity
        Leading weighted coefficient below ``1e-300`` times the largest one.
    RootFindingFailure
        Some root misses the residual gate.
    """
    if p.m != 1:
        raise PreconditionError("all_roots is for m = 1")
    a = normalized_coeffs(p)
    _check_leading(a)
    z, ok = aberth_batch(a[None, :])
    if not ok[0]:
        raise RootFindingFailure("Aberth iteration failed the residual gate")
    return ZeroSet(z[0], ZeroMethod.ENUMERATED)


# ---------------------------------------------------------------------------
# Argument principle


def _contour_pieces(U):
    """Smooth boundary pieces: ('circle', center, radius, orientation) or ('segment', z0, z1)."""
    if isinstance(U, Disk):
        return [("circle", U.center, U.radius, 1.0)]
    if isinstance(U, Ball):
        if U.dim != 1:
            raise PreconditionError("contour counting is for m = 1 domains")
        return [("circle", complex(U.center[0]), U.radius, 1.0)]
    if isinstance(U, Annulus):
        return [("circle", U.center, U.r_outer, 1.0), ("circle", U.center, U.r_inner, -1.0)]
    if isinstance(U, Rectangle):
        lo, hi = U.lo, U.hi
        c = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)]
        return [("segment", c[i], c[(i + 1) % 4]) for i in range(4)]
    raise TypeError(f"unknown domain {U!r}")


def _param(piece, t):
    """Point and velocity ``(z(t), z'(t))`` of a piece parameterized by t in [0, 1]."""
    if piece[0] == "circle":
        _, c, r, orient = piece
        e = np.exp(2j * np.pi * orient * t)
        return c + r * e, 2j * np.pi * orient * r * e
    _, z0, z1 = piece
    return z0 + (z1 - z0) * t, np.full(t.shape, z1 - z0)


def _phase_and_rate(a, z, dz):
    """``arg p(z)`` and ``d arg p / dt = Im(p'(z) z'(t) / p(z))``."""
    N = a.size - 1
    val, dval, _, inside, x = _sphere_horner(a[None, :], z[None, :])
    val, dval, inside, x = val[0], dval[0], inside[0], x[0]
    if np.any(val == 0):
        raise NearBoundaryZero("polynomial vanishes at a contour node")
    with np.errstate(divide="ignore", invalid="ignore"):
        ld = np.where(inside, dval / val, (N * val - x * dval) / (z * val))
    ph = np.where(inside, np.angle(val), N * np.angle(z) + np.angle(val))
    return ph, np.imag(ld * dz)


def _wrap(x):
    return x - 2.0 * np.pi * np.round(x / (2.0 * np.pi))


_MAX_STEP = np.pi / 3  # largest accepted phase increment per interval
_BRANCH_TOL = np.pi / 6  # allowed gap between increment and its trapezoid estimate


def _piece_winding(a, piece, n0, budget):
    """Total change of ``arg p`` along one piece, and the number of nodes used.

    Phase increments between neighbouring nodes are exact modulo 2 pi.  An
    interval is accepted when its increment is below pi/3 and agrees with the
    trapezoid integral of ``d arg p / dt`` over it; otherwise it is bisected.
    Refinement therefore concentrates around zeros close to the contour.
    """
    t = np.linspace(0.0, 1.0, n0 + 1)
    z, dz = _param(piece, t)
    ph, rate = _phase_and_rate(a, z, dz)
    lo_t, hi_t = t[:-1], t[1:]
    lo_ph, hi_ph = ph[:-1], ph[1:]
    lo_r, hi_r = rate[:-1], rate[1:]
    total, used = 0.0, n0 + 1
    while lo_t.size:
        inc = _wrap(hi_ph - lo_ph)
        trap = 0.5 * (hi_t - lo_t) * (lo_r + hi_r)
        good = (np.abs(inc) < _MAX_STEP) & (np.abs(inc - trap) < _BRANCH_TOL)
        total += float(np.sum(inc[good]))
        bad = ~good
        if not bad.any():
            break
        lo_t, hi_t = lo_t[bad], hi_t[bad]
        lo_ph, hi_ph, lo_r, hi_r = lo_ph[bad], hi_ph[bad], lo_r[bad], hi_r[bad]
        used += lo_t.size
        if used > budget or np.min(hi_t - lo_t) < 1e-15:
            raise NearBoundaryZero("zero on or extremely close to the contour")
        mid = 0.5 * (lo_t + hi_t)
        zm, dzm = _param(piece, mid)
        pm, rm = _phase_and_rate(a, zm, dzm)
        lo_t, hi_t = np.concatenate([lo_t, mid]), np.concatenate([mid, hi_t])
        lo_ph, hi_ph = np.concatenate([lo_ph, pm]), np.concatenate([pm, hi_ph])
        lo_r, hi_r = np.concatenate([lo_r, rm]), np.concatenate([rm, hi_r])
    return total, used


def count_zeros_contour(p: RandomPolynomial, U, max_nodes: int = CONTOUR_MAX_NODES) -> int:
    """Number of zeros inside ``U`` by the argument principle.

    The winding number of ``p`` around ``∂U`` is accumulated from phase
    increments between nodes, starting from ``max(64, 2N)`` nodes per smooth
    piece and bisecting adaptively (see :func:`_piece_winding`).  A zero at
    distance δ from the contour costs O(log 1/δ) extra nodes.

    Raises
    ------
    NearBoundaryZero
        More than ``max_nodes`` nodes on a piece, or the winding number is not
        within 0.01 of an integer (a zero sits on or very near ∂U).
    """
    if p.m != 1:
        raise PreconditionError("contour counting is for m = 1")
    a = normalized_coeffs(p)
    n0 = max(64, 2 * p.N)
    total = sum(_piece_winding(a, pc, n0, max_nodes)[0] for pc in _contour_pieces(U)) / (2.0 * np.pi)
    k = round(total)
    if not abs(total - k) < 0.01:
        raise NearBoundaryZero(f"winding number {total:.4f} is not close to an integer")
    return int(k)


def count_in_domain(zs: ZeroSet, U) -> int:
    """Number of enumerated zeros lying in the open domain ``U``."""
    if zs.method != ZeroMethod.ENUMERATED:
        raise PreconditionError("count_in_domain needs an enumerated zero set")
    if zs.points.size == 0:
        return 0
    return int(np.count_nonzero(contains(U, zs.points)))


# ---------------------------------------------------------------------------
# Two polynomials in two variables


def _coeff_grid(p: RandomPolynomial) -> np.ndarray:
    """Dense ``C[i, j]`` = coefficient of ``z1^i z2^j`` (normalized weights)."""
    a = normalized_coeffs(p)
    J = multi_indices(2, p.N)
    C = np.zeros((p.N + 1, p.N + 1), dtype=complex)
    C[J[:, 0], J[:, 1]] = a
    return C


def _eval2(C, z1, z2):
    """Value, gradient and modulus bound of ``sum C_ij z1^i z2^j`` at point arrays."""
    n = C.shape[0]
    k = np.arange(n)
    z1 = np.asarray(z1, dtype=complex)[..., None]
    z2 = np.asarray(z2, dtype=complex)[..., None]
    km = np.maximum(k - 1, 0)
    p1, p2 = z1**k, z2**k
    d1, d2 = k * z1**km, k * z2**km
    val = np.einsum("...i,ij,...j->...", p1, C, p2)
    g1 = np.einsum("...i,ij,...j->...", d1, C, p2)
    g2 = np.einsum("...i,ij,...j->...", p1, C, d2)
    bound = np.einsum("...i,ij,...j->...", np.abs(p1), np.abs(C), np.abs(p2))
    return val, g1, g2, bound


def _newton2(C1, C2, z1, z2, steps: int = 6):
    """Vectorized Newton polish of approximate common zeros."""
    z1 = np.array(z1, dtype=complex)
    z2 = np.array(z2, dtype=complex)
    for _ in range(steps):
        f1, a11, a12, _ = _eval2(C1, z1, z2)
        f2, a21, a22, _ = _eval2(C2, z1, z2)
        det = a11 * a22 - a12 * a21
        with np.errstate(divide="ignore", invalid="ignore"):
            d1 = (a22 * f1 - a12 * f2) / det
            d2 = (a11 * f2 - a21 * f1) / det
        good = np.isfinite(d1) & np.isfinite(d2)
        z1 = np.where(good, z1 - d1, z1)
        z2 = np.where(good, z2 - d2, z2)
    return z1, z2


def _system_residual(C1, C2, z1, z2):
    out = 0.0
    for C in (C1, C2):
        v, _, _, b = _eval2(C, z1, z2)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.maximum(out, np.where(b > 0, np.abs(v) / b, np.abs(v)))
    return out


def _sylvester_pencil(C1, C2):
    """Companion pencil ``(A, B)`` of ``S(z1) = sum_k S_k z1^k``.

    ``S(z1)`` is the Sylvester matrix of ``p1(z1, .)`` and ``p2(z1, .)`` in
    z2, so ``S(z1) [1, z2, ..., z2^{2N-1}]^T`` stacks ``z2^i p1`` and
    ``z2^i p2``.  Its eigenvectors carry that Vandermonde vector.
    """
    N = C1.shape[0] - 1
    n = 2 * N
    S = np.zeros((N + 1, n, n), dtype=complex)
    for i in range(N):
        S[:, i, i : i + N + 1] = C1
        S[:, N + i, i : i + N + 1] = C2
    d = N
    size = n * d
    A = np.zeros((size, size), dtype=complex)
    B = np.eye(size, dtype=complex)
    A[: size - n, n:] = np.eye(size - n)
    for k in range(d):
        A[size - n :, k * n : (k + 1) * n] = -S[k]
    B[size - n :, size - n :] = S[d]
    return A, B, n


def _roots_in_z2(C, z1):
    """Roots in z2 of ``sum_ij C_ij z1^i z2^j`` at fixed z1, or None if it vanishes."""
    n = C.shape[0]
    coef = (z1 ** np.arange(n)) @ C  # coefficient of z2^j
    scale = np.max(np.abs(coef))
    if scale == 0:
        return None
    nz = np.nonzero(np.abs(coef) > 1e-12 * scale)[0]
    top = nz[-1]
    if top == 0:
        return np.array([], dtype=complex)
    return np.roots(coef[: top + 1][::-1])


def _cluster(z1s, tol):
    labels = -np.ones(z1s.size, dtype=int)
    nclus = 0
    for i in range(z1s.size):
        if labels[i] < 0:
            close = (labels < 0) & (np.abs(z1s - z1s[i]) <= tol * (1 + abs(z1s[i])))
            labels[close] = nclus
            nclus += 1
    return labels, nclus


def _assemble(C1, C2, z1s, vecs, tol=1e-6):
    """Pair each z1 with its z2 and polish; ``vecs`` (optional) are pencil eigenvectors."""
    target = z1s.size
    labels, nclus = _cluster(z1s, tol)
    P1, P2 = [], []
    for c in range(nclus):
        idx = np.nonzero(labels == c)[0]
        if vecs is not None and idx.size == 1:
            v = vecs[:, idx[0]]
            den = np.vdot(v[:-1], v[:-1])
            if den != 0:
                q1, q2 = _newton2(C1, C2, [z1s[idx[0]]], [np.vdot(v[:-1], v[1:]) / den])
                if _system_residual(C1, C2, q1, q2)[0] <= SYSTEM_RESIDUAL_TOL:
                    P1.append(q1[0])
                    P2.append(q2[0])
                    continue
        z1c = complex(np.mean(z1s[idx]))
        cands = [r for Ca in (C1, C2) if (r := _roots_in_z2(Ca, z1c)) is not None]
        if not cands:
            raise DegenerateSystem("both polynomials vanish identically on a z1 fibre")
        cands = np.concatenate(cands)
        score = _system_residual(C1, C2, np.full(cands.shape, z1c), cands)
        chosen = []
        for j in np.argsort(score, kind="stable"):
            z2 = cands[j]
            if all(abs(z2 - q) > tol * (1 + abs(q)) for q in chosen):
                chosen.append(z2)
            if len(chosen) == idx.size:
                break
        P1 += [z1c] * len(chosen)
        P2 += chosen

    if len(P1) != target:
        raise DegenerateSystem(f"recovered {len(P1)} of {target} points")
    z1, z2 = _newton2(C1, C2, P1, P2)
    res = np.max(_system_residual(C1, C2, z1, z2))
    if not res <= SYSTEM_RESIDUAL_TOL:
        raise DegenerateSystem(f"residual {res:.2e} exceeds {SYSTEM_RESIDUAL_TOL}")
    pts = np.stack([z1, z2], axis=1)
    scale = 1 + np.abs(pts).sum(axis=1)
    dist = np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2)
    np.fill_diagonal(dist, np.inf)
    if np.any(dist < 1e-8 * scale[:, None]):
        raise DegenerateSystem("repeated common zero")
    return pts


def _finite_smallest(alpha, beta, target):
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(np.abs(beta) > 1e-14 * np.abs(alpha), alpha / beta, np.inf)
    order = np.argsort(np.abs(lam), kind="stable")[:target]
    if not np.all(np.isfinite(lam[order])):
        raise DegenerateSystem("fewer than N^2 finite eigenvalues")
    return lam[order], order


def solve_system_2d(p1: RandomPolynomial, p2: RandomPolynomial) -> ZeroSet:
    """Common zeros of two polynomials on C^2 (N <= 12).

    z2 is eliminated with the Sylvester matrix; the resulting polynomial
    eigenvalue problem in z1 is linearized as a companion pencil of size
    ``2N^2`` whose ``N^2`` finite eigenvalues are the z1 coordinates of the
    common zeros.  A first pass takes eigenvalues only and pairs each group of
    k equal z1 values with the k roots of ``p1(z1, .)`` or ``p2(z1, .)`` on
    which the other polynomial is smallest.  If that fails, a second pass
    reads z2 off the Vandermonde structure of the eigenvectors for every
    simple eigenvalue.  Points are polished by Newton's method.

    Raises
    ------
    DegenerateSystem
        Wrong number of points, a repeated point, or a residual above 1e-6.
    """
    if p1.m != 2 or p2.m != 2 or p1.N != p2.N:
        raise PreconditionError("solve_system_2d needs two m = 2 polynomials of equal degree")
    N = p1.N
    if N > 12:
        raise PreconditionError("solve_system_2d supports N <= 12")
    C1, C2 = _coeff_grid(p1), _coeff_grid(p2)
    target = N * N
    A, B, n = _sylvester_pencil(C1, C2)
    alpha, beta = scipy.linalg.eigvals(A, B, homogeneous_eigvals=True)
    z1s, _ = _finite_smallest(alpha, beta, target)
    try:
        return ZeroSet(_assemble(C1, C2, z1s, None), ZeroMethod.ENUMERATED)
    except DegenerateSystem as exc:
        log.debug("root matching failed (%s); retrying with eigenvectors", exc)
    w, vr = scipy.linalg.eig(A, B, right=True, homogeneous_eigvals=True)
    z1s, order = _finite_smallest(w[0], w[1], target)
    return ZeroSet(_assemble(C1, C2, z1s, vr[:n, order]), ZeroMethod.ENUMERATED)
