import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerovar.ensemble import (
    RandomPolynomial,
    SeedSpec,
    coefficient_rows,
    evaluate,
    horner,
    log_weight,
    multi_indices,
    sample,
    sample_system,
)
from zerovar.errors import PreconditionError


def test_multi_indices_count_and_order():
    for m, N in [(1, 5), (2, 4), (3, 3)]:
        J = multi_indices(m, N)
        assert J.shape == (math.comb(N + m, m), m)
        assert np.all(np.diff(J.sum(axis=1)) >= 0)
        assert len({tuple(r) for r in J}) == J.shape[0]


def test_log_weight():
    assert log_weight(4, (2, 1)) == pytest.approx(0.5 * math.log(12))
    assert log_weight(7, (3,)) == pytest.approx(0.5 * math.log(35))
    with pytest.raises(PreconditionError):
        log_weight(3, (2, 2))


def test_seed_validation():
    SeedSpec(2**64 - 1, 0)
    with pytest.raises(PreconditionError):
        SeedSpec(-1)
    with pytest.raises(PreconditionError):
        SeedSpec(2**64)


def test_sampling_is_deterministic_and_streams_differ():
    a = sample(1, 10, SeedSpec(3, 7))
    b = sample(1, 10, SeedSpec(3, 7))
    assert np.array_equal(a.coeffs, b.coeffs)
    assert not np.array_equal(a.coeffs, sample(1, 10, SeedSpec(3, 8)).coeffs)
    assert not np.array_equal(a.coeffs, sample(1, 10, SeedSpec(3, 7), redraw=1).coeffs)
    s = sample_system(2, 3, 2, SeedSpec(3, 7))
    assert not np.array_equal(s[0].coeffs, s[1].coeffs)


def test_coefficient_moments():
    c = np.concatenate([sample(1, 99, SeedSpec(1, t)).coeffs for t in range(400)])
    n = c.size
    assert abs(c.mean()) < 4 / math.sqrt(n)
    assert abs(np.mean(np.abs(c) ** 2) - 1) < 4 / math.sqrt(n)
    assert abs(np.mean(c * c)) < 4 / math.sqrt(n)  # circular symmetry


def test_evaluate_matches_direct_sum():
    p = sample(2, 4, SeedSpec(9))
    z = np.array([0.3 - 0.2j, 1.1 + 0.4j])
    direct = sum(
        c * math.exp(log_weight(4, J)) * z[0] ** J[0] * z[1] ** J[1] for c, J in zip(p.coeffs, p.indices)
    )
    assert evaluate(p, z) == pytest.approx(direct, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_log_and_horner_agree(seed, z):
    p = sample(1, 12, SeedSpec(seed))
    ref = horner(p, z)
    assert abs(evaluate(p, z) - ref) <= 1e-11 * np.sum(np.abs(p.weighted()) * abs(z) ** np.arange(13))


def test_from_roots_and_monomials():
    p = RandomPolynomial.from_roots([1, -1])
    assert horner(p, 1.0) == 0 and horner(p, 0.0) == -1
    q = RandomPolynomial.from_monomials(2, 2, {(1, 1): 3.0})
    assert evaluate(q, np.array([2.0, 5.0])) == pytest.approx(30.0)


def test_bad_coefficient_count():
    with pytest.raises(PreconditionError):
        RandomPolynomial(1, 3, np.zeros(3))
    with pytest.raises(PreconditionError):
        sample_system(1, 3, 2, SeedSpec(0))


def test_coefficient_rows():
    p = sample(2, 1, SeedSpec(4, 2))
    rows = coefficient_rows(p, 2, 1)
    assert [r[2] for r in rows] == ["0;0", "1;0", "0;1"]
    assert rows[0][:2] == (2, 1)
