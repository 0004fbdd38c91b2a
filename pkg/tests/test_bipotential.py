import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerovar.bipotential import (
    EULER_GAMMA,
    boundary_kernel,
    dbar_dbar_q,
    dilog,
    f_deriv,
    g_moment,
    gtilde,
    k21_density,
    mean_density,
    pair_correlation,
    q_n,
)
from zerovar.errors import DiagonalEvaluation, PreconditionError, SingularityError
from zerovar.geometry import fs_tan2_distance

from oracles import k21_fd, li2, mixed_dbar_fd


def test_gtilde_examples():
    assert gtilde(0.0) == 0.0
    assert gtilde(1.0) == pytest.approx(1 / 24, abs=1e-15)
    partial = sum(0.25**n / n**2 for n in range(1, 60))
    assert gtilde(0.5) == pytest.approx(partial / (4 * math.pi**2), abs=1e-15)


@pytest.mark.parametrize("x", [0.0, 1e-8, 0.1, 0.3, 0.49, 0.5, 0.51, 0.7, 0.9, 0.999, 1 - 1e-10, 1.0])
def test_dilog_against_mpmath(x):
    assert dilog(x) == pytest.approx(li2(x), abs=1e-14)


def test_series_reflection_consistency():
    for x in np.linspace(0.49, 0.51, 21):
        series = sum(x**n / n**2 for n in range(1, 200))
        assert dilog(x) == pytest.approx(series, abs=1e-13)


def test_gtilde_domain():
    with pytest.raises(PreconditionError):
        gtilde(1.1)
    with pytest.raises(PreconditionError):
        gtilde(-0.1)


def test_g_moment_values():
    assert g_moment(0.0) == pytest.approx(EULER_GAMMA**2 / 4)
    assert g_moment(1.0) == pytest.approx(EULER_GAMMA**2 / 4 + math.pi**2 / 24)
    assert g_moment(0.5) == pytest.approx(EULER_GAMMA**2 / 4 + li2(0.25) / 4)


def test_f_deriv_examples():
    assert f_deriv(0.5 * math.log(2), 2) == pytest.approx(1 / math.pi**2)
    assert f_deriv(40.0, 1) == pytest.approx(-math.exp(-80.0) / (2 * math.pi**2))
    with pytest.raises(SingularityError):
        f_deriv(0.0, 1)
    assert f_deriv(0.0, 0) == pytest.approx(1 / 24)


@pytest.mark.parametrize("lam", [0.05, 0.3, 1.0, 3.0, 10.0])
@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_f_deriv_finite_differences(lam, order):
    h = 1e-5 * max(lam, 0.1)
    fd = (f_deriv(lam + h, order - 1) - f_deriv(lam - h, order - 1)) / (2 * h)
    assert f_deriv(lam, order) == pytest.approx(fd, rel=1e-6, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 300))
def test_f_signs(lam):
    assert f_deriv(lam, 1) < 0 < f_deriv(lam, 2)


def test_q_n_examples():
    assert q_n(0.2j, 0.2j, 5) == pytest.approx(1 / 24)
    w = 0.6 - 0.3j
    assert q_n(0, w, 4) == pytest.approx(gtilde((1 + abs(w) ** 2) ** -2))
    assert q_n(0.1, w, 4) == q_n(w, 0.1, 4)


def test_q_n_far_decay():
    # dist >= b sqrt(log N / N), b^2 > q+1: Q_N = O(N^-q); here q = 2
    b = math.sqrt(3.5)
    for N in (100, 1000, 10000):
        d = b * math.sqrt(math.log(N) / N)
        assert q_n(0, math.tan(d), N) <= N**-2


def test_dbar_dbar_example():
    assert dbar_dbar_q(0, 1, 2)[0, 0] == pytest.approx(-1 / (6 * math.pi**2))


@pytest.mark.parametrize("z, w, N", [(0.3 + 0.2j, -0.5 + 0.7j, 5), (0.1, 0.4j, 20), (1.5 - 1j, 0.2, 3)])
def test_dbar_dbar_finite_differences(z, w, N):
    fd = mixed_dbar_fd(lambda a, b: q_n(a, b, N), z, w)
    assert abs(dbar_dbar_q(z, w, N)[0, 0] - fd) < 1e-5
    assert boundary_kernel(z, w, N) == pytest.approx(dbar_dbar_q(z, w, N)[0, 0], rel=1e-12)


def test_dbar_dbar_m2_shape_and_rank():
    M = dbar_dbar_q(np.array([0.1, 0.2j]), np.array([-0.3, 0.5]), 4, 2)
    assert M.shape == (2, 2)
    assert abs(np.linalg.det(M)) < 1e-14 * np.abs(M).max() ** 2  # rank one


def test_boundary_kernel_at_antipode_is_finite():
    assert boundary_kernel(1.0, -1.0, 1) == pytest.approx(-1 / (4 * math.pi**2) * 4 / 16)
    assert boundary_kernel(1.0, -1.0, 3) == 0.0


def test_diagonal_is_an_error():
    with pytest.raises(DiagonalEvaluation):
        dbar_dbar_q(0.5, 0.5, 3)
    with pytest.raises(DiagonalEvaluation):
        k21_density(0.5, 0.5 + 1e-10, 3)


def test_dbar_dbar_scaling_near_diagonal():
    # at w = v / sqrt(N) each gradient factor is ~ sqrt(N) |v| / 2 and F'' stays O(1),
    # so the entry grows like N
    v = 0.8 + 0.3j
    vals = [abs(dbar_dbar_q(0, v / math.sqrt(N), N)[0, 0]) for N in (100, 1000, 10000)]
    slope = np.polyfit(np.log([100, 1000, 10000]), np.log(vals), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.02)


@pytest.mark.parametrize("z, w, N", [(0.3 + 0.2j, -0.1 + 0.5j, 5), (0.1, 0.35j, 20), (1.5 - 1j, 0.2, 3)])
def test_k21_against_high_precision_fd(z, w, N):
    assert k21_density(z, w, N) == pytest.approx(k21_fd(z, w, N), rel=1e-7)


def test_pair_correlation_matches_chain_rule():
    rng = np.random.default_rng(4)
    z = rng.normal(size=50) + 1j * rng.normal(size=50)
    w = rng.normal(size=50) + 1j * rng.normal(size=50)
    for N in (2, 5, 30):
        g = k21_density(z, w, N) / (mean_density(z, N) * mean_density(w, N))
        assert np.allclose(g, pair_correlation(fs_tan2_distance(z, w), N), rtol=1e-8, atol=1e-10)


def test_pair_correlation_one_zero():
    assert np.all(pair_correlation(np.array([1e-6, 0.3, 7.0]), 1) == 0.0)


def test_pair_correlation_series_branch_continuity():
    for N in (2, 10, 500):
        t = 1e-4 / N
        below = pair_correlation(t * (1 - 1e-9), N)
        above = pair_correlation(t * (1 + 1e-9), N)
        assert below == pytest.approx(above, rel=1e-5)


def test_k21_nonnegative_and_symmetric():
    rng = np.random.default_rng(6)
    z = rng.normal(size=400) + 1j * rng.normal(size=400)
    w = rng.normal(size=400) + 1j * rng.normal(size=400)
    for N in (1, 3, 40):
        k = k21_density(z, w, N)
        assert np.all(k >= -1e-12 * mean_density(z, N) * mean_density(w, N))
        assert np.allclose(k, k21_density(w, z, N))
    assert np.all(pair_correlation(np.logspace(-12, 3, 200), 500) >= 0)


def test_pair_correlation_far_regime():
    # beyond dist = 5/sqrt(N) the normalized correlation is 1 to 1e-3
    N = 500
    d = 5 / math.sqrt(N)
    assert abs(pair_correlation(math.tan(d) ** 2, N) - 1) < 1e-3


def test_pair_correlation_decay_profile_n500():
    # the decay is Gaussian in sqrt(N) d: at d = N^-0.4 the deviation is still
    # about 3e-2, it crosses 1e-3 near d = 0.15 and is below 1e-6 by d = 0.2
    N = 500
    dev = lambda d: abs(pair_correlation(math.tan(d) ** 2, N) - 1)
    assert dev(N**-0.4) == pytest.approx(0.0291, rel=0.01)
    assert dev(0.14) > 1e-3 > dev(0.16)
    assert dev(0.2) < 1e-6
