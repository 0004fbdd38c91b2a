"""Hermitian Gaussian ensembles of degree-N polynomials on CP^m.

A random polynomial is ``p(z) = sum_J c_J sqrt(binom(N, J)) z^J`` over
multi-indices ``|J| <= N`` with i.i.d. standard complex Gaussian ``c_J``
(``E|c_J|^2 = 1``).  The raw ``c_J`` are stored; the weights are applied at
evaluation time in log space.

Random variates come from a counter-based Philox stream keyed on
``(master_seed, stream_id)``.  The counter's high words separate the
sub-streams used inside one trial (polynomial component, redraw attempt), so a
trial is reproducible no matter which worker or in which order it runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import PreconditionError

__all__ = [
    "SeedSpec",
    "RandomPolynomial",
    "PolySystem",
    "multi_indices",
    "log_weight",
    "log_weights",
    "sample",
    "sample_system",
    "evaluate",
    "horner",
    "coefficient_rows",
    "complex_normals",
]

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    """Seed of one trial: every variate is a function of these two integers."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v <= _U64:
                raise PreconditionError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self, offset: int = 0, redraw: int = 0) -> np.random.Generator:
        """Philox generator for sub-stream ``(offset, redraw)`` of this trial."""
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        counter = np.array([0, 0, offset, redraw], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key, counter=counter))


def complex_normals(gen: np.random.Generator, n: int) -> np.ndarray:
    """Standard complex normals by Box-Muller: modulus^2 ~ Exp(1), uniform phase."""
    u = gen.random(2 * n)
    r = np.sqrt(-np.log1p(-u[:n]))
    return r * np.exp(2j * np.pi * u[n:])


@lru_cache(maxsize=64)
def _multi_indices(m: int, N: int) -> np.ndarray:
    if m == 1:
        out = np.arange(N + 1, dtype=np.int64)[:, None]
        out.setflags(write=False)
        return out
    rows = []
    for total in range(N + 1):
        for first in range(total, -1, -1):
            for rest in _multi_indices(m - 1, total - first):
                if sum(rest) == total - first:
                    rows.append((first, *rest))
    out = np.array(rows, dtype=np.int64)
    out.setflags(write=False)
    return out


def multi_indices(m: int, N: int) -> np.ndarray:
    """All ``J`` in N^m with ``|J| <= N``, graded by ``|J|`` then reverse-lex.

    Shape ``(binom(N+m, m), m)``.  For ``m = 1`` row ``j`` is ``(j,)``.
    """
    if m < 1 or N < 0:
        raise PreconditionError("need m >= 1 and N >= 0")
    return _multi_indices(m, N)


def log_weight(N: int, J) -> float:
    """Half the log of the multinomial ``N! / ((N-|J|)! j_1! ... j_m!)``."""
    J = tuple(int(j) for j in np.atleast_1d(J))
    if any(j < 0 for j in J):
        raise PreconditionError("multi-index entries must be nonnegative")
    total = sum(J)
    if total > N:
        raise PreconditionError(f"|J| = {total} exceeds N = {N}")
    val = math.lgamma(N + 1) - math.lgamma(N - total + 1) - sum(math.lgamma(j + 1) for j in J)
    return 0.5 * val


@lru_cache(maxsize=64)
def _log_weights(m: int, N: int) -> np.ndarray:
    from scipy.special import gammaln

    J = multi_indices(m, N)
    out = 0.5 * (gammaln(N + 1) - gammaln(N - J.sum(axis=1) + 1) - gammaln(J + 1).sum(axis=1))
    out.setflags(write=False)
    return out


def log_weights(m: int, N: int) -> np.ndarray:
    """Vector of :func:`log_weight` over :func:`multi_indices` order."""
    return _log_weights(m, N)


@dataclass
class RandomPolynomial:
    """Degree-N polynomial in m variables stored by its raw Gaussian coefficients.

    ``coeffs[i]`` multiplies ``sqrt(binom(N, J_i)) z^{J_i}`` with ``J_i`` the
    i-th row of ``multi_indices(m, N)``.
    """

    m: int
    N: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        expected = math.comb(self.N + self.m, self.m)
        if self.coeffs.shape != (expected,):
            raise PreconditionError(
                f"expected {expected} coefficients for m={self.m}, N={self.N}, got {self.coeffs.shape}"
            )

    @property
    def indices(self) -> np.ndarray:
        return multi_indices(self.m, self.N)

    def coefficient(self, J) -> complex:
        J = tuple(int(j) for j in np.atleast_1d(J))
        hit = np.nonzero(np.all(self.indices == np.array(J), axis=1))[0]
        if hit.size == 0:
            raise KeyError(J)
        return complex(self.coeffs[hit[0]])

    def weighted(self) -> np.ndarray:
        """Monomial coefficients ``c_J sqrt(binom(N, J))`` (may overflow for N >~ 1500)."""
        return self.coeffs * np.exp(log_weights(self.m, self.N))

    def scaled(self, factor: complex) -> "RandomPolynomial":
        return RandomPolynomial(self.m, self.N, self.coeffs * factor)

    @classmethod
    def from_monomials(cls, m: int, N: int, monomials: dict) -> "RandomPolynomial":
        """Build from plain monomial coefficients ``{J: a_J}`` (weights divided out)."""
        idx = multi_indices(m, N)
        lw = log_weights(m, N)
        c = np.zeros(idx.shape[0], dtype=complex)
        lookup = {tuple(int(x) for x in row): i for i, row in enumerate(idx)}
        for J, a in monomials.items():
            key = tuple(int(j) for j in np.atleast_1d(J))
            if key not in lookup:
                raise PreconditionError(f"monomial {key} not allowed for m={m}, N={N}")
            i = lookup[key]
            c[i] = complex(a) * math.exp(-lw[i])
        return cls(m, N, c)

    @classmethod
    def from_roots(cls, roots: Iterable[complex], leading: complex = 1.0) -> "RandomPolynomial":
        """Univariate polynomial ``leading * prod (z - r)``."""
        roots = list(roots)
        a = np.poly(np.asarray(roots, dtype=complex)) * leading
        N = len(roots)
        return cls.from_monomials(1, N, {(j,): a[N - j] for j in range(N + 1)})


@dataclass
class PolySystem:
    """k independent polynomials sharing (m, N)."""

    polys: list

    def __post_init__(self):
        if not self.polys:
            raise PreconditionError("a system needs at least one polynomial")
        m, N = self.polys[0].m, self.polys[0].N
        if any(p.m != m or p.N != N for p in self.polys):
            raise PreconditionError("all members of a system must share m and N")
        if len(self.polys) > m:
            raise PreconditionError(f"k = {len(self.polys)} exceeds m = {m}")

    @property
    def m(self) -> int:
        return self.polys[0].m

    @property
    def N(self) -> int:
        return self.polys[0].N

    @property
    def k(self) -> int:
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __getitem__(self, i):
        return self.polys[i]


def sample(m: int, N: int, seed: SeedSpec, offset: int = 0, redraw: int = 0) -> RandomPolynomial:
    """Draw one polynomial from the Hermitian Gaussian ensemble."""
    if N < 1:
        raise PreconditionError("degree N must be >= 1")
    if m < 1:
        raise PreconditionError("dimension m must be >= 1")
    n = math.comb(N + m, m)
    return RandomPolynomial(m, N, complex_normals(seed.generator(offset, redraw), n))


def sample_system(m: int, N: int, k: int, seed: SeedSpec, redraw: int = 0) -> PolySystem:
    """k independent polynomials; component l uses sub-stream offset l."""
    if not 1 <= k <= m:
        raise PreconditionError(f"need 1 <= k <= m, got k={k}, m={m}")
    return PolySystem([sample(m, N, seed, offset=l, redraw=redraw) for l in range(k)])


def horner(p: RandomPolynomial, z):
    """Direct Horner evaluation of a univariate polynomial on weighted coefficients."""
    if p.m != 1:
        raise PreconditionError("horner is for m = 1")
    a = p.weighted()
    z = np.asarray(z, dtype=complex)
    acc = np.full(z.shape, a[-1], dtype=complex)
    for c in a[-2::-1]:
        acc = acc * z + c
    return acc[()] if acc.ndim == 0 else acc


def evaluate(p: RandomPolynomial, z, method: str = "log"):
    """Evaluate ``p`` at ``z`` (points of shape ``(..., m)``; bare complex for m = 1).

    ``method="log"`` folds the weights in log space: each term
    ``c_J exp(log_weight_J + J . log z)`` is formed relative to the largest
    term and the terms are summed in increasing magnitude.  ``"horner"`` is
    available for m = 1.  Results that exceed the float range come back as inf.
    """
    if method == "horner":
        return horner(p, z)
    if method != "log":
        raise PreconditionError(f"unknown method {method!r}")
    zp = np.asarray(z, dtype=complex)
    if p.m == 1 and (zp.ndim == 0 or zp.shape[-1] != 1):
        zp = zp[..., None]
    if zp.shape[-1] != p.m:
        raise PreconditionError(f"points must have trailing axis {p.m}")
    shape = zp.shape[:-1]
    pts = zp.reshape(-1, p.m)
    J = p.indices
    lw = log_weights(p.m, p.N)
    nz = p.coeffs != 0
    J, lw, c = J[nz], lw[nz], p.coeffs[nz]
    if c.size == 0:
        out = np.zeros(shape, dtype=complex)
        return out[()] if out.ndim == 0 else out
    with np.errstate(divide="ignore", invalid="ignore"):
        logz = np.log(pts)
        # 0^0 = 1: zero coordinates contribute nothing when the exponent is zero
        logz_mod = np.where(np.isneginf(logz.real), -np.inf, logz.real)
        expo = np.where(J[None, :, :] == 0, 0.0, J[None, :, :] * logz_mod[:, None, :]).sum(axis=2)
        phase = (J[None, :, :] * logz.imag[:, None, :]).sum(axis=2)
    mag = np.log(np.abs(c))[None, :] + lw[None, :] + expo
    top = np.max(mag, axis=1, keepdims=True)
    terms = np.exp(mag - top) * np.exp(1j * (np.angle(c)[None, :] + phase))
    order = np.argsort(np.abs(terms), axis=1)
    terms = np.take_along_axis(terms, order, axis=1)
    s = terms.sum(axis=1)
    with np.errstate(over="ignore"):
        out = s * np.exp(top[:, 0])
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def coefficient_rows(p: RandomPolynomial, stream_id: int, component: int = 0) -> list:
    """Audit rows ``(stream_id, component, J, Re c, Im c)`` with J as ``j1;j2;...``."""
    rows = []
    for J, c in zip(p.indices, p.coeffs):
        rows.append((stream_id, component, ";".join(str(int(j)) for j in J), float(c.real), float(c.imag)))
    return rows
