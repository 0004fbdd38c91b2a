import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerovar.errors import PoleError
from zerovar.geometry import fs_distance, sample_fs_uniform
from zerovar.kernel import grad_lambda, kernel_eval, lambda_n, p_n

from oracles import kernel_p_bruteforce

cplx = st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False)


def test_examples():
    assert lambda_n(0.3 - 0.1j, 0.3 - 0.1j, 9) == 0.0
    assert lambda_n(0, 1, 2) == pytest.approx(math.log(2))
    w = 0.7 + 0.2j
    assert p_n(0, w, 5) == pytest.approx((1 + abs(w) ** 2) ** -2.5)
    gz, gw = grad_lambda(0, 1, 2)
    assert gz == pytest.approx(-1.0)
    gz, gw = grad_lambda(0.4j, 0.4j, 6)
    assert abs(gz) < 1e-15 and abs(gw) < 1e-15


def test_infinite_at_antipode():
    assert math.isinf(lambda_n(1.0, -1.0, 3))
    assert p_n(1.0, -1.0, 3) == 0.0
    with pytest.raises(PoleError):
        grad_lambda(1.0, -1.0, 3)


@pytest.mark.parametrize("N", [1, 7, 30])
def test_bruteforce_basis_m1(N):
    rng = np.random.default_rng(N)
    for z, w in rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2)):
        assert p_n(z, w, N) == pytest.approx(kernel_p_bruteforce(z, w, N), rel=1e-10)


def test_bruteforce_basis_m2():
    rng = np.random.default_rng(2)
    for _ in range(3):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        w = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert p_n(z, w, 6, 2) == pytest.approx(kernel_p_bruteforce(z, w, 6, 2), rel=1e-10)


def _fd_dbar(f, x, h=1e-5):
    return 0.5 * ((f(x + h) - f(x - h)) / (2 * h) + 1j * (f(x + 1j * h) - f(x - 1j * h)) / (2 * h))


@settings(max_examples=40, deadline=None)
@given(cplx, cplx, st.integers(1, 40))
def test_gradient_finite_differences(z, w, N):
    if abs(1 + z * np.conj(w)) < 0.3:
        return
    gz, gw = grad_lambda(z, w, N)
    assert abs(gz - _fd_dbar(lambda x: lambda_n(x, w, N), z)) < 1e-6 * (1 + abs(gz))
    assert abs(gw - _fd_dbar(lambda x: lambda_n(z, x, N), w)) < 1e-6 * (1 + abs(gw))


def test_gradient_m2_finite_differences():
    rng = np.random.default_rng(8)
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    w = rng.normal(size=2) + 1j * rng.normal(size=2)
    N, h = 5, 1e-5
    gz, gw = grad_lambda(z, w, N, 2)
    for a in range(2):
        e = np.eye(2)[a]
        fd = 0.5 * (
            (lambda_n(z + h * e, w, N, 2) - lambda_n(z - h * e, w, N, 2)) / (2 * h)
            + 1j * (lambda_n(z + 1j * h * e, w, N, 2) - lambda_n(z - 1j * h * e, w, N, 2)) / (2 * h)
        )
        assert abs(gz[a] - fd) < 1e-6


@settings(max_examples=40, deadline=None)
@given(cplx, cplx)
def test_mixed_antiholomorphic_derivative_vanishes(z, w):
    if abs(1 + z * np.conj(w)) < 0.3:
        return
    h = 1e-4
    g = lambda x: grad_lambda(z, x, 4)[0]  # ∂Λ/∂z̄ as a function of w
    mixed = 0.5 * ((g(w + h) - g(w - h)) / (2 * h) + 1j * (g(w + 1j * h) - g(w - 1j * h)) / (2 * h))
    assert abs(mixed) < 1e-6 * (1 + abs(g(w)))


@settings(max_examples=300, deadline=None)
@given(cplx, cplx, st.integers(1, 200))
def test_symmetry_and_range(z, w, N):
    assert lambda_n(z, w, N) == lambda_n(w, z, N)
    assert 0.0 <= p_n(z, w, N) <= 1.0


def test_gradient_swap_symmetry():
    z, w = 0.3 + 0.8j, -1.2 + 0.1j
    gz, gw = grad_lambda(z, w, 7)
    gz2, gw2 = grad_lambda(w, z, 7)
    assert gz == pytest.approx(gw2) and gw == pytest.approx(gz2)


def test_far_off_diagonal_decay():
    # dist >= b sqrt(log N / N) with b^2 > 2k gives P_N <= N^{-k}
    rng = np.random.default_rng(3)
    for k in (1, 2):
        b = math.sqrt(2 * k + 0.5)
        for N in (100, 1000, 10000):
            z = sample_fs_uniform(rng, 2000)
            w = sample_fs_uniform(rng, 2000)
            far = fs_distance(z, w) >= b * math.sqrt(math.log(N) / N)
            assert np.all(p_n(z[far], w[far], N) <= N ** (-k))


def test_kernel_eval():
    ke = kernel_eval(0, 1, 2)
    assert ke.p == pytest.approx(0.5)
    assert ke.grad_zbar.shape == (1,)
