"""Fubini-Study geometry on an affine chart of CP^m and integration domains.

Conventions
-----------
Points are complex arrays whose last axis has length ``m``; for ``m = 1`` a bare
complex scalar or array is accepted everywhere.  The metric is normalized so
that the volume form is ``(1 + |z|^2)^{-(m+1)}`` times Lebesgue measure on the
chart, giving ``Vol(CP^m) = pi^m / m!`` and ``Vol(CP^1) = pi``.  Curves in
``CP^1`` have line element ``|dz| / (1 + |z|^2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate

from .errors import PreconditionError

__all__ = [
    "Disk",
    "Annulus",
    "Rectangle",
    "Ball",
    "Domain",
    "BoundaryQuadrature",
    "AreaQuadrature",
    "as_points",
    "fs_volume_density",
    "fs_tan2_distance",
    "fs_distance",
    "domain_volume",
    "boundary_volume",
    "boundary_nodes",
    "area_nodes",
    "contains",
    "centered_chart",
    "sample_fs_uniform",
    "domain_from_dict",
    "domain_to_dict",
]


def as_points(z, m: int | None = None) -> np.ndarray:
    """Return ``z`` as a complex array of shape ``(..., m)``.

    For ``m = 1`` (or None) points are bare complex numbers of any shape and
    a coordinate axis is appended.
    """
    arr = np.asarray(z, dtype=complex)
    if m is None or m == 1:
        return arr[..., None]
    if arr.shape[-1] != m:
        raise PreconditionError(f"expected trailing axis of length {m}, got shape {arr.shape}")
    return arr


def _sqnorm(p: np.ndarray) -> np.ndarray:
    return np.sum(p.real**2 + p.imag**2, axis=-1)


def fs_volume_density(z, m: int = 1):
    """Density of the Fubini-Study volume form with respect to chart Lebesgue measure.

    Returns ``(1 + |z|^2)^{-(m+1)}``.
    """
    p = as_points(z, m)
    m = p.shape[-1]
    out = (1.0 + _sqnorm(p)) ** (-(m + 1))
    return out[()] if np.ndim(out) == 0 else out


def fs_tan2_distance(z, w, m: int = 1):
    """``tan^2`` of the Fubini-Study distance, computed without cancellation.

    Uses ``(1+|z|^2)(1+|w|^2) - |1 + z.conj(w)|^2 = |z-w|^2 + sum_{a<b} |z_a w_b - z_b w_a|^2``.
    Returns ``inf`` where ``1 + z.conj(w) = 0``.
    """
    zp = as_points(z, m)
    wp = as_points(w, m)
    zp, wp = np.broadcast_arrays(zp, wp)
    d = _sqnorm(zp - wp)
    mm = zp.shape[-1]
    for a in range(mm):
        for b in range(a + 1, mm):
            x = zp[..., a] * wp[..., b] - zp[..., b] * wp[..., a]
            d = d + (x.real**2 + x.imag**2)
    # real and imaginary parts written out so that swapping z and w is exact
    re = 1.0 + np.sum(zp.real * wp.real + zp.imag * wp.imag, axis=-1)
    im = np.sum(zp.imag * wp.real - zp.real * wp.imag, axis=-1)
    den = re * re + im * im
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(den > 0, d / np.where(den > 0, den, 1.0), np.inf)
    return tau[()] if np.ndim(tau) == 0 else tau


def fs_distance(z, w, m: int = 1):
    """Geodesic distance ``arccos(|1 + z.w̄| / sqrt((1+|z|^2)(1+|w|^2)))``; at most pi/2."""
    return np.arctan(np.sqrt(fs_tan2_distance(z, w, m)))


# ---------------------------------------------------------------------------
# Domains


def _check_chart(chart: int) -> None:
    if int(chart) != chart or chart < 0:
        raise PreconditionError(f"chart index must be a nonnegative integer, got {chart!r}")


@dataclass(frozen=True)
class Disk:
    """Euclidean disk ``|z - center| < radius`` in a chart of CP^1."""

    center: complex = 0j
    radius: float = 1.0
    chart: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise PreconditionError("Disk radius must be positive and finite")
        if not np.isfinite(self.center):
            raise PreconditionError("Disk center must be finite")
        _check_chart(self.chart)

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Annulus:
    """Euclidean annulus ``r_inner < |z - center| < r_outer`` in a chart of CP^1."""

    center: complex = 0j
    r_inner: float = 0.5
    r_outer: float = 1.0
    chart: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "r_inner", float(self.r_inner))
        object.__setattr__(self, "r_outer", float(self.r_outer))
        if not (0 < self.r_inner < self.r_outer and math.isfinite(self.r_outer)):
            raise PreconditionError("Annulus needs 0 < r_inner < r_outer < inf")
        if not np.isfinite(self.center):
            raise PreconditionError("Annulus center must be finite")
        _check_chart(self.chart)

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle with opposite corners ``lo`` and ``hi`` (CP^1 only)."""

    lo: complex = -0.5 - 0.5j
    hi: complex = 0.5 + 0.5j
    chart: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lo", complex(self.lo))
        object.__setattr__(self, "hi", complex(self.hi))
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise PreconditionError("Rectangle corners must be finite")
        if not (self.lo.real < self.hi.real and self.lo.imag < self.hi.imag):
            raise PreconditionError("Rectangle corners must be strictly ordered in both coordinates")
        _check_chart(self.chart)

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Ball:
    """Euclidean ball ``|z - center| < radius`` in a chart of CP^m, any m."""

    center: tuple = (0j,)
    radius: float = 1.0
    chart: int = 0
    _c: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=complex))
        if c.ndim != 1:
            raise PreconditionError("Ball center must be a flat sequence of coordinates")
        object.__setattr__(self, "center", tuple(complex(x) for x in c))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "_c", c)
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise PreconditionError("Ball radius must be positive and finite")
        if not np.all(np.isfinite(c)):
            raise PreconditionError("Ball center must be finite")
        _check_chart(self.chart)

    @classmethod
    def centered(cls, m: int, radius: float = 1.0) -> "Ball":
        return cls(center=(0j,) * m, radius=radius)

    @property
    def dim(self) -> int:
        return len(self.center)


Domain = Union[Disk, Annulus, Rectangle, Ball]


def _domain_dim(U: Domain, m: int | None) -> int:
    if m is not None and m != U.dim:
        raise PreconditionError(f"{type(U).__name__} lives in dimension {U.dim}, not m={m}")
    return U.dim


# ---------------------------------------------------------------------------
# Volumes


def _cap_height(center: complex, radius: float) -> float:
    """Signed plane height ``a`` of the image of ``|z - c| = r`` on the unit sphere.

    The disk interior maps to ``{n.X < a}`` for the unit normal ``n``; the
    interior is a cap of area fraction ``(1 + a) / 2``.
    """
    c2 = abs(center) ** 2
    r2 = radius**2
    nrm = math.sqrt(4.0 * c2 + (1.0 - c2 + r2) ** 2)
    return -(1.0 + c2 - r2) / nrm


def _disk_volume(center: complex, radius: float) -> float:
    return math.pi * (1.0 + _cap_height(center, radius)) / 2.0


def _circle_length(center: complex, radius: float) -> float:
    a = _cap_height(center, radius)
    # 1 - a^2 computed as a product to stay accurate for tiny circles
    return math.pi * math.sqrt(max((1.0 - a) * (1.0 + a), 0.0))


def _rect_volume(lo: complex, hi: complex) -> float:
    y0, y1 = lo.imag, hi.imag

    def inner(x):
        a2 = 1.0 + x * x
        a = math.sqrt(a2)

        def prim(y):
            return y / (2 * a2 * (a2 + y * y)) + math.atan(y / a) / (2 * a2 * a)

        return prim(y1) - prim(y0)

    val, _ = integrate.quad(inner, lo.real, hi.real, epsabs=0, epsrel=1e-13, limit=200)
    return val


def _rect_perimeter(lo: complex, hi: complex) -> float:
    def horiz(y, x0, x1):
        b = math.sqrt(1 + y * y)
        return (math.atan(x1 / b) - math.atan(x0 / b)) / b

    return (
        horiz(lo.imag, lo.real, hi.real)
        + horiz(hi.imag, lo.real, hi.real)
        + horiz(lo.real, lo.imag, hi.imag)
        + horiz(hi.real, lo.imag, hi.imag)
    )


def _sphere_area(m: int) -> float:
    """Euclidean area of the unit sphere S^{2m-1}."""
    return 2.0 * math.pi**m / math.factorial(m - 1)


def _ball_volume_offcenter(c: np.ndarray, R: float) -> float:
    m = c.size
    g = float(np.linalg.norm(c))
    # x = Re<c/|c|, theta> for theta uniform on S^{2m-1}: density (1-x^2)^{m-3/2}
    cm = math.gamma(m) / (math.sqrt(math.pi) * math.gamma(m - 0.5))
    if m == 1:
        # arcsine law; substitute x = cos(phi)
        def f(phi, t):
            x = math.cos(phi)
            return t * (1.0 + g * g + t * t + 2 * t * g * x) ** (-2) / math.pi

        val, _ = integrate.dblquad(f, 0, R, 0, math.pi, epsabs=0, epsrel=1e-12)
        return _sphere_area(1) * val

    def f(x, t):
        return (
            t ** (2 * m - 1)
            * cm
            * (1 - x * x) ** (m - 1.5)
            * (1.0 + g * g + t * t + 2 * t * g * x) ** (-(m + 1))
        )

    val, _ = integrate.dblquad(f, 0, R, -1, 1, epsabs=0, epsrel=1e-12)
    return _sphere_area(m) * val


def _ball_boundary_offcenter(c: np.ndarray, R: float) -> float:
    m = c.size
    g = float(np.linalg.norm(c))
    if m == 1:
        return _circle_length(complex(c[0]), R)
    # zeta = <c/|c|, theta> has density (m-1)/pi (1-|zeta|^2)^{m-2} on the unit disk
    def f(phi, rho):
        s2 = g * g + R * R + 2 * g * R * rho * math.cos(phi)
        zt2 = g * g * rho * rho + R * R + 2 * g * R * rho * math.cos(phi)
        dens = (m - 1) / math.pi * (1 - rho * rho) ** (m - 2) * rho
        return dens * (1 + s2) ** (-(m + 0.5)) * math.sqrt(1 + zt2)

    val, _ = integrate.dblquad(f, 0, 1, 0, 2 * math.pi, epsabs=0, epsrel=1e-12)
    return _sphere_area(m) * R ** (2 * m - 1) * val


def domain_volume(U: Domain, m: int | None = None) -> float:
    """Fubini-Study volume ``int_U omega^m / m!``.

    Closed forms are used for disks, annuli and centered balls; rectangles and
    off-center balls use adaptive quadrature of a reduced integrand.
    """
    m = _domain_dim(U, m)
    if isinstance(U, Disk):
        vol = _disk_volume(U.center, U.radius)
    elif isinstance(U, Annulus):
        vol = _disk_volume(U.center, U.r_outer) - _disk_volume(U.center, U.r_inner)
    elif isinstance(U, Rectangle):
        vol = _rect_volume(U.lo, U.hi)
    elif isinstance(U, Ball):
        c = U._c
        if np.all(c == 0):
            R2 = U.radius**2
            vol = math.pi**m / math.factorial(m) * (R2 / (1 + R2)) ** m
        else:
            vol = _ball_volume_offcenter(c, U.radius)
    else:
        raise TypeError(f"unknown domain {U!r}")
    if vol <= 0.0:
        warnings.warn(f"domain {U!r} has numerically zero volume", RuntimeWarning, stacklevel=2)
        return 0.0
    return float(vol)


def boundary_volume(U: Domain, m: int | None = None) -> float:
    """Fubini-Study hypersurface volume of the boundary of ``U``."""
    m = _domain_dim(U, m)
    if isinstance(U, Disk):
        return _circle_length(U.center, U.radius)
    if isinstance(U, Annulus):
        return _circle_length(U.center, U.r_outer) + _circle_length(U.center, U.r_inner)
    if isinstance(U, Rectangle):
        return _rect_perimeter(U.lo, U.hi)
    if isinstance(U, Ball):
        c = U._c
        if np.all(c == 0):
            R = U.radius
            return _sphere_area(m) * R ** (2 * m - 1) / (1 + R * R) ** m
        return _ball_boundary_offcenter(c, U.radius)
    raise TypeError(f"unknown domain {U!r}")


def contains(U: Domain, z) -> bool | np.ndarray:
    """True where ``z`` lies in the open domain; boundary points are excluded."""
    p = as_points(z, U.dim)
    if isinstance(U, Ball):
        out = _sqnorm(p - U._c) < U.radius**2
    else:
        q = p[..., 0]
        if isinstance(U, Disk):
            out = np.abs(q - U.center) < U.radius
        elif isinstance(U, Annulus):
            r = np.abs(q - U.center)
            out = (r > U.r_inner) & (r < U.r_outer)
        elif isinstance(U, Rectangle):
            out = (
                (q.real > U.lo.real)
                & (q.real < U.hi.real)
                & (q.imag > U.lo.imag)
                & (q.imag < U.hi.imag)
            )
        else:
            raise TypeError(f"unknown domain {U!r}")
    return bool(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Boundary and area quadrature (m = 1)


@dataclass
class BoundaryQuadrature:
    """Nodes on the oriented boundary of a CP^1 domain.

    Attributes
    ----------
    points : complex ndarray (n,)
    tangent : complex ndarray (n,)
        Unit Euclidean tangent, oriented so the domain lies to the left.
    weight : ndarray (n,)
        Fubini-Study arclength carried by each node.
    piece : int ndarray (n,)
        Index of the smooth boundary piece containing each node.
    periodic : list of bool
        Whether each piece is a closed curve (trapezoidal spacing).
    """

    points: np.ndarray
    tangent: np.ndarray
    weight: np.ndarray
    piece: np.ndarray
    periodic: list

    @property
    def dz(self) -> np.ndarray:
        """Complex line element ``z'(s) ds`` at each node."""
        return self.weight * (1.0 + np.abs(self.points) ** 2) * self.tangent

    def __len__(self) -> int:
        return self.points.size


def _circle_nodes(center, radius, n, offset, clockwise):
    k = np.arange(n, dtype=float) + offset
    theta = 2.0 * np.pi * k / n
    if clockwise:
        theta = -theta
    e = np.exp(1j * theta)
    pts = center + radius * e
    tan = (-1j if clockwise else 1j) * e
    wt = (2.0 * np.pi / n) * radius / (1.0 + np.abs(pts) ** 2)
    return pts, tan, wt


def _graded_panels(n_uniform: int, levels: int) -> np.ndarray:
    """Breakpoints in [0, 1]: uniform panels with ``levels`` geometric halvings at both ends."""
    h = 1.0 / n_uniform
    inner = np.linspace(0.0, 1.0, n_uniform + 1)
    grade = h * 0.5 ** np.arange(1, levels + 1)
    return np.unique(np.concatenate([inner, grade, 1.0 - grade]))


_CORNER_FS_WIDTH = 2e-4  # smallest graded panel, in Fubini-Study length


def _panel_gauss(breaks: np.ndarray, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    t = (a + b) / 2 + (b - a) / 2 * x[None, :]
    wt = (b - a) / 2 * w[None, :]
    return t.ravel(), wt.ravel()


def _segment_nodes(z0, z1, n, staggered, order=8):
    """Gauss-Legendre panels on the edge ``z0 -> z1`` with about ``n`` nodes.

    Panels are halved toward both corners until they reach a Fubini-Study
    width of about ``_CORNER_FS_WIDTH``, which keeps nodes of the default and
    staggered rules well apart while resolving the corner kink.
    """
    n_uniform = max(1, math.ceil(n / order))
    length = abs(z1 - z0)
    scale = 1.0 + max(abs(z0), abs(z1)) ** 2
    ratio = (length / n_uniform) / (_CORNER_FS_WIDTH * scale)
    levels = int(min(8, max(0, math.floor(math.log2(ratio))))) if ratio > 1 else 0
    breaks = _graded_panels(n_uniform, levels)
    t, wt = _panel_gauss(breaks, order + 1 if staggered else order)
    pts = z0 + (z1 - z0) * t
    tan = np.full(pts.shape, (z1 - z0) / length)
    fsw = wt * length / (1.0 + np.abs(pts) ** 2)
    return pts, tan, fsw


def boundary_nodes(U: Domain, resolution: int, staggered: bool = False) -> BoundaryQuadrature:
    """Quadrature nodes on the positively oriented boundary of a CP^1 domain.

    Closed curves get ``resolution`` equally spaced nodes (periodic trapezoid).
    Straight edges share ``resolution`` in proportion to their length and get
    composite Gauss-Legendre panels, graded toward the corners, with no node
    at a corner.
    ``staggered=True`` returns a node set disjoint from the default one
    (half-step shift on circles, one extra Gauss point per panel on edges) so
    that products of the two never sample the diagonal.
    """
    if resolution < 8:
        raise PreconditionError("resolution must be >= 8")
    if U.dim != 1:
        raise PreconditionError("boundary nodes are only provided for m = 1 domains")
    off = 0.5 if staggered else 0.0
    parts = []
    periodic = []
    if isinstance(U, (Disk, Ball)):
        c = U.center if isinstance(U, Disk) else U.center[0]
        parts.append(_circle_nodes(c, U.radius, resolution, off, False))
        periodic.append(True)
    elif isinstance(U, Annulus):
        parts.append(_circle_nodes(U.center, U.r_outer, resolution, off, False))
        parts.append(_circle_nodes(U.center, U.r_inner, resolution, off, True))
        periodic += [True, True]
    elif isinstance(U, Rectangle):
        lo, hi = U.lo, U.hi
        corners = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)]
        perim = 2.0 * ((hi - lo).real + (hi - lo).imag)
        for i in range(4):
            a, b = corners[i], corners[(i + 1) % 4]
            share = resolution * abs(b - a) / perim
            parts.append(_segment_nodes(a, b, share, staggered))
            periodic.append(False)
    else:
        raise TypeError(f"unknown domain {U!r}")
    pts = np.concatenate([p[0] for p in parts])
    tan = np.concatenate([p[1] for p in parts])
    wt = np.concatenate([p[2] for p in parts])
    piece = np.concatenate([np.full(p[0].size, i) for i, p in enumerate(parts)])
    return BoundaryQuadrature(pts, tan, wt, piece, periodic)


@dataclass
class AreaQuadrature:
    """Tensor-product rule on a CP^1 domain; weights are chart Lebesgue measure."""

    points: np.ndarray
    weight: np.ndarray


def _radial_rule(r0: float, r1: float, n: int, order: int = 8):
    panels = max(1, math.ceil(n / order))
    return _panel_gauss(np.linspace(r0, r1, panels + 1), order)


def area_nodes(U: Domain, density: float) -> AreaQuadrature:
    """Area quadrature with roughly ``density`` nodes per unit chart length.

    Disks and annuli use Gauss-Legendre panels in the radius and the periodic
    trapezoid in angle; rectangles use tensor Gauss-Legendre panels.
    """
    if U.dim != 1:
        raise PreconditionError("area nodes are only provided for m = 1 domains")
    if isinstance(U, (Disk, Ball, Annulus)):
        if isinstance(U, Annulus):
            c, r0, r1 = U.center, U.r_inner, U.r_outer
        else:
            c, r0, r1 = (U.center if isinstance(U, Disk) else U.center[0]), 0.0, U.radius
        r, wr = _radial_rule(r0, r1, math.ceil(density * (r1 - r0)))
        nth = max(16, math.ceil(density * 2 * math.pi * r1))
        th = 2 * np.pi * np.arange(nth) / nth
        pts = c + (r[:, None] * np.exp(1j * th)[None, :])
        wts = (wr * r)[:, None] * np.full(nth, 2 * np.pi / nth)[None, :]
        return AreaQuadrature(pts.ravel(), wts.ravel())
    if isinstance(U, Rectangle):
        x, wx = _radial_rule(U.lo.real, U.hi.real, math.ceil(density * (U.hi.real - U.lo.real)))
        y, wy = _radial_rule(U.lo.imag, U.hi.imag, math.ceil(density * (U.hi.imag - U.lo.imag)))
        pts = x[:, None] + 1j * y[None, :]
        return AreaQuadrature(pts.ravel(), (wx[:, None] * wy[None, :]).ravel())
    raise TypeError(f"unknown domain {U!r}")


# ---------------------------------------------------------------------------
# Isometries and sampling


def centered_chart(z0, zeta) -> np.ndarray:
    """Map coordinates ``zeta`` centered at ``z0`` into the chart, isometrically.

    Applies the unitary (Householder) map of C^{m+1} sending [1:0] to [1:z0]
    to the point [1:zeta].  ``zeta = 0`` maps to ``z0`` and the Fubini-Study
    metric at ``zeta = 0`` is Euclidean, so these are normal coordinates to
    first order and every kernel quantity is preserved exactly.
    """
    c = np.atleast_1d(np.asarray(z0, dtype=complex))
    m = c.size
    zp = as_points(zeta, m)
    s = float(_sqnorm(c))
    root = math.sqrt(1.0 + s)
    e = np.concatenate([[1.0 + 0j], c]) / root
    v = -e.copy()
    v[0] = s / (root * (root + 1.0))  # 1 - 1/root without cancellation
    vv = float(np.vdot(v, v).real)
    x = np.concatenate([np.ones(zp.shape[:-1] + (1,), dtype=complex), zp], axis=-1)
    if vv > 0:
        x = x - (2.0 / vv) * (x @ np.conj(v))[..., None] * v
    out = x[..., 1:] / x[..., :1]
    if m == 1 and np.ndim(z0) == 0:
        out = out[..., 0]
        return out[()] if out.ndim == 0 else out
    return out


def sample_fs_uniform(rng: np.random.Generator, n: int, m: int = 1) -> np.ndarray:
    """``n`` points distributed according to normalized Fubini-Study volume."""
    g = rng.standard_normal((n, m + 1, 2))
    v = g[..., 0] + 1j * g[..., 1]
    pts = v[:, 1:] / v[:, :1]
    return pts[:, 0] if m == 1 else pts


# ---------------------------------------------------------------------------
# Config text <-> domain


def _to_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise PreconditionError(f"complex number as [re, im] expected, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", ""))
    return complex(x)


def domain_from_dict(spec: dict, m: int = 1) -> Domain:
    """Build a domain from ``{"kind": ..., "params": {...}}`` (as found in run configs).

    Complex coordinates may be given as numbers, ``[re, im]`` pairs or strings
    like ``"0.5-0.5j"``.
    """
    kind = str(spec.get("kind", "")).lower()
    params = dict(spec.get("params", {}))
    chart = int(params.pop("chart", spec.get("chart", 0)))
    if kind == "disk":
        return Disk(_to_complex(params.get("center", 0)), float(params.get("radius", 1.0)), chart)
    if kind == "annulus":
        return Annulus(
            _to_complex(params.get("center", 0)),
            float(params["r_inner"]),
            float(params["r_outer"]),
            chart,
        )
    if kind == "rectangle":
        return Rectangle(_to_complex(params["lo"]), _to_complex(params["hi"]), chart)
    if kind == "ball":
        center = params.get("center", [0.0] * m)
        if not isinstance(center, (list, tuple)):
            center = [center]
        coords = tuple(_to_complex(c) for c in center)
        if len(coords) != m:
            raise PreconditionError(f"ball center has {len(coords)} coordinates, expected m={m}")
        return Ball(coords, float(params.get("radius", 1.0)), chart)
    raise PreconditionError(f"unknown domain kind {kind!r}")


def domain_to_dict(U: Domain) -> dict:
    """Inverse of :func:`domain_from_dict`; complex values become ``[re, im]``."""
    def c(x):
        return [x.real, x.imag]

    if isinstance(U, Disk):
        return {"kind": "disk", "params": {"center": c(U.center), "radius": U.radius, "chart": U.chart}}
    if isinstance(U, Annulus):
        return {
            "kind": "annulus",
            "params": {"center": c(U.center), "r_inner": U.r_inner, "r_outer": U.r_outer, "chart": U.chart},
        }
    if isinstance(U, Rectangle):
        return {"kind": "rectangle", "params": {"lo": c(U.lo), "hi": c(U.hi), "chart": U.chart}}
    if isinstance(U, Ball):
        return {
            "kind": "ball",
            "params": {"center": [c(x) for x in U.center], "radius": U.radius, "chart": U.chart},
        }
    raise TypeError(f"unknown domain {U!r}")
