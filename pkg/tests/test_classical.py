import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parisian import RiskModel, binomial, custom, geometric, poisson
from parisian.classical import (
    deficit_infinite,
    deficit_joint,
    dp_survival,
    dp_survival_series,
    first_passage_cdf,
    kendall_first_passage,
    kendall_table,
    ruin_infinite,
    seal_survival,
    seal_survival_series,
    tail_certificate,
)


def _enumerate_ruin(pmf, u, s_max):
    """Exhaustive law of (T_0, deficit) over claim sequences of length s_max."""
    w = pmf.weights.tolist()
    out = {}
    for ys in itertools.product(range(len(w)), repeat=s_max):
        prob = 1
        for y in ys:
            prob *= w[y]
        level = u
        for n, y in enumerate(ys, 1):
            level += 1 - y
            if level <= 0:
                out[(n, -level)] = out.get((n, -level), 0) + prob
                break
    return out


def test_zero_claims_never_ruin():
    m = RiskModel(custom([1.0]), 3)
    assert seal_survival(m, 25) == pytest.approx(1.0, abs=1e-15)
    assert dp_survival(m, 25) == 1.0
    assert deficit_joint(m, 10, 3).total() == 0
    assert ruin_infinite(m).value == 0


def test_one_step_ruin_probability(b33):
    m = RiskModel(b33, 2)
    assert 1 - seal_survival(m, 1) == pytest.approx(0.027, abs=1e-15)


def test_seal_equals_dp_small(b33):
    m = RiskModel(b33, 1)
    assert seal_survival(m, 5) == pytest.approx(dp_survival(m, 5), abs=1e-12)


def test_t_zero_is_one(b33):
    assert seal_survival(RiskModel(b33, 1), 0) == 1
    assert dp_survival(RiskModel(b33, 1), 0) == 1


def test_seal_exact_rational():
    p = binomial(3, 0.3, exact=True)
    s = seal_survival(RiskModel(p, 2), 6)
    assert isinstance(s, Fraction)
    enum = _enumerate_ruin(p, 2, 6)
    assert s == 1 - sum(enum.values())


def test_deficit_joint_single_step(b33):
    q = deficit_joint(RiskModel(b33, 1), 3, 3)
    assert q[1, 0] == pytest.approx(0.189, abs=1e-15)
    assert q[1, 1] == pytest.approx(0.027, abs=1e-15)


def test_deficit_joint_matches_enumeration():
    p = binomial(3, 0.3, exact=True)
    q = deficit_joint(RiskModel(p, 1), 5, 3)
    enum = _enumerate_ruin(p, 1, 5)
    for s in range(1, 6):
        for z in range(4):
            assert q[s, z] == enum.get((s, z), 0)


def test_deficit_marginal_consistency(light_family):
    for pmf in light_family:
        for u in (1, 3):
            m = RiskModel(pmf, u)
            q = deficit_joint(m, 30, pmf.support_max)
            seal = seal_survival_series(m, 30)
            diffs = seal[:-1] - seal[1:]
            np.testing.assert_allclose(q.time_marginal()[1:], diffs, atol=1e-10)


def test_kendall_hand_values(b33):
    assert kendall_first_passage(b33, 1, 1) == pytest.approx(0.343, abs=1e-15)
    assert kendall_first_passage(b33, 2, 2) == pytest.approx(0.343**2, abs=1e-15)
    assert kendall_first_passage(b33, 1, 2) == pytest.approx(0.151263, abs=1e-15)
    assert 0.441 * 0.343 == pytest.approx(0.151263, abs=1e-15)
    assert kendall_first_passage(b33, 3, 2) == 0


def _enumerate_first_passage(pmf, x, omega):
    w = pmf.weights.tolist()
    total = 0
    for ys in itertools.product(range(len(w)), repeat=omega):
        level = 0
        hit = None
        for n, y in enumerate(ys, 1):
            level += 1 - y
            if level >= x:
                hit = n
                break
        if hit == omega:
            prob = 1
            for y in ys:
                prob *= w[y]
            total += prob
    return total


def test_kendall_matches_enumeration_exact():
    p = binomial(3, 0.3, exact=True)
    K = kendall_table(p, 3, 8)
    for x in range(1, 4):
        for omega in range(1, 9):
            assert K[x, omega] == _enumerate_first_passage(p, x, omega)


def test_kendall_matches_enumeration_float():
    p = custom([0.5, 0.2, 0.0, 0.3])
    K = kendall_table(p, 3, 8)
    for x in range(1, 4):
        for omega in range(1, 9):
            assert K[x, omega] == pytest.approx(_enumerate_first_passage(p, x, omega), abs=1e-12)


def test_kendall_completeness_long_horizon(b33):
    cdf = first_passage_cdf(b33, 3, 2500)
    assert np.all(np.abs(cdf[1:] - 1) < 1e-8)


def test_ruin_infinite_geometric_closed_form():
    # downward-skip-free walk with geometric claims: P_0(T_0 < inf) = mu
    q = 0.3
    p = geometric(q, eps_mass=1e-15)
    val = ruin_infinite(RiskModel(p, 0))
    assert val.converged
    assert val.value == pytest.approx(3 / 7, abs=1e-9)
    dp = 1 - dp_survival(RiskModel(p, 0), 3000)
    assert val.value == pytest.approx(dp, abs=1e-9)


def test_ruin_infinite_vs_long_seal(b33):
    m = RiskModel(b33, 5)
    val = ruin_infinite(m)
    assert val.converged and val.abserr <= 1e-10
    assert val.value == pytest.approx(1 - seal_survival(m, 4000), abs=1e-8)


def test_ruin_infinite_vs_seal_at_400(b33):
    """Faithful check at t = 400; P_5(400 < T_0 < inf) is about 5.5e-4, so this fails."""
    m = RiskModel(b33, 5)
    assert ruin_infinite(m).value == pytest.approx(1 - seal_survival(m, 400), abs=1e-8)


def test_deficit_infinite_sums_to_ruin(b33):
    m = RiskModel(b33, 2)
    vec, sv = deficit_infinite(m, 2)
    assert sv.converged
    assert vec.sum() == pytest.approx(ruin_infinite(m).value, abs=1e-9)


def test_tail_certificate_bounds_actual_tail(b33):
    m = RiskModel(b33, 5)
    full = ruin_infinite(m).value
    for n in (50, 200, 800):
        from parisian._kernels import diag_series

        partial = (1 - 0.9) * diag_series(b33.weights, 5, n)[1:].sum()
        assert full - partial <= (1 - 0.9) * tail_certificate(b33, 5, n) + 1e-15


@pytest.mark.parametrize("pmf", [binomial(3, 0.3), poisson(0.7), custom([0.5, 0.2, 0.0, 0.3])], ids=str)
def test_seal_dp_crosscheck(pmf):
    for u in range(0, 6):
        m = RiskModel(pmf, u)
        np.testing.assert_allclose(seal_survival_series(m, 30), dp_survival_series(m, 30), atol=1e-12, rtol=0)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=5), st.integers(0, 6))
def test_seal_monotone(w, u):
    s = sum(w)
    p = custom([x / s for x in w])
    a = seal_survival_series(RiskModel(p, u), 25)
    b = seal_survival_series(RiskModel(p, u + 1), 25)
    assert np.all(np.diff(a) <= 1e-13)
    assert np.all(b >= a - 1e-13)
