from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parisian import (
    RiskModel,
    binomial,
    brute_force_parisian,
    custom,
    dp_parisian_survival,
    geometric,
    parisian_infinite_components,
    parisian_ruin,
    parisian_ruin_infinite,
    parisian_survival,
    parisian_survival_sweep,
    poisson,
    ruin_infinite,
    seal_survival,
)
from parisian.errors import DomainError, ResourceLimitError
from parisian.parisian import parisian_survival_series


def test_headline_value(b33):
    assert parisian_survival(RiskModel(b33, 5, 3), 20) == pytest.approx(0.9701426, abs=5e-7)


def test_ruin_is_complement(b33):
    m = RiskModel(b33, 4, 2)
    assert parisian_ruin(m, 15) == pytest.approx(1 - parisian_survival(m, 15), abs=1e-15)


def test_short_horizon_is_one(b33):
    # before zeta + 1 steps have passed no excursion can be long enough
    for zeta in (1, 3, 5):
        m = RiskModel(b33, 1, zeta)
        for t in range(1, zeta + 2):
            assert parisian_survival(m, t) == 1.0
        assert parisian_survival(m, zeta + 2) < 1.0


def test_large_zeta_is_one(b33):
    m = RiskModel(b33, 2, 40)
    assert parisian_survival(m, 30) == 1.0


def test_u_zero_rejected(b33):
    with pytest.raises(DomainError):
        parisian_survival(RiskModel(b33, 0, 3), 10)


def test_u_zero_sweep_is_flagged(b33):
    res = parisian_survival_sweep(RiskModel(b33, 5, 3), "u", range(0, 3), t=20)
    assert 0 in res.notes
    assert res.values[0] == pytest.approx(0.4093377, abs=1e-6)


def test_sweep_validation(b33):
    m = RiskModel(b33, 5, 3)
    with pytest.raises(DomainError):
        parisian_survival_sweep(m, "t", [])
    with pytest.raises(DomainError):
        parisian_survival_sweep(m, "t", [3, 2])
    with pytest.raises(DomainError):
        parisian_survival_sweep(m, "x", [1])


def test_sweep_axes_agree(b33):
    m = RiskModel(b33, 5, 3)
    by_t = parisian_survival_sweep(m, "t", range(1, 21)).values
    by_u = parisian_survival_sweep(m, "u", [5], t=20).values
    by_z = parisian_survival_sweep(m, "zeta", [3], t=20).values
    assert by_t[-1] == pytest.approx(by_u[0], abs=1e-15)
    assert by_t[-1] == pytest.approx(by_z[0], abs=1e-15)


@pytest.mark.parametrize("pmf", [binomial(3, 0.3), poisson(0.7), custom([0.5, 0.2, 0.0, 0.3])], ids=str)
def test_recursion_matches_dp(pmf):
    for u in (1, 3, 6):
        for zeta in (1, 2, 4):
            m = RiskModel(pmf, u, zeta)
            series = parisian_survival_series(m, 40)
            dp = np.array([dp_parisian_survival(m, t) for t in range(1, 41)])
            # truncated tail mass enters the two methods differently
            np.testing.assert_allclose(series[1:], dp, atol=1e-12 + 40 * pmf.tail_bound, rtol=0)


def test_seal_form_matches_ruin_form(b33):
    m = RiskModel(b33, 5, 3)
    for t in (10, 20, 40):
        assert parisian_survival(m, t, form="seal") == pytest.approx(parisian_survival(m, t), abs=1e-12)


def test_exact_rational_matches_brute_force():
    p = binomial(3, Fraction(3, 10), exact=True)
    m = RiskModel(p, 1, 2)
    v = parisian_survival(m, 9)
    assert isinstance(v, Fraction)
    assert v == brute_force_parisian(m, 9)


def test_brute_force_small_case(b33):
    m = RiskModel(b33, 1, 1)
    # tau >= 3 fails only when steps 1 and 2 are both at or below 0
    _, p1, p2, p3 = b33.weights
    # R_1 = 2 - Y_1; R_1 = 0 needs Y_2 >= 1, R_1 = -1 needs Y_2 >= 0
    bad = p2 * (p1 + p2 + p3) + p3
    assert brute_force_parisian(m, 3) == pytest.approx(1 - bad, abs=1e-15)
    assert parisian_survival(m, 3) == pytest.approx(1 - bad, abs=1e-15)


def test_brute_force_budget(b33):
    with pytest.raises(ResourceLimitError):
        brute_force_parisian(RiskModel(b33, 1, 1), 30, budget=1000, prune=False)


def test_brute_force_pruned_matches_plain(b33):
    m = RiskModel(b33, 2, 2)
    assert brute_force_parisian(m, 12, prune=True) == pytest.approx(brute_force_parisian(m, 12, prune=False), abs=1e-14)


def test_brute_force_unbounded_law():
    # lumping large claims keeps enumeration finite and exact
    m = RiskModel(poisson(0.6), 1, 2)
    assert brute_force_parisian(m, 9) == pytest.approx(parisian_survival(m, 9), abs=1e-11)


def test_sandwich_bounds(b33):
    # classical survival <= Parisian survival <= 1, and Parisian decreases in t
    for u in (1, 3, 5):
        for zeta in (1, 3):
            m = RiskModel(b33, u, zeta)
            series = parisian_survival_series(m, 60)
            for t in (5, 20, 60):
                assert seal_survival(m, t) - 1e-13 <= series[t] <= 1.0


def test_monotone_grid(b33):
    u_max, z_max, t_max = 8, 5, 30
    grid = np.empty((u_max, z_max, t_max))
    for u in range(1, u_max + 1):
        for z in range(1, z_max + 1):
            grid[u - 1, z - 1] = parisian_survival_series(RiskModel(b33, u, z), t_max)[1:]
    tol = 1e-13
    assert np.all(np.diff(grid, axis=0) >= -tol)
    assert np.all(np.diff(grid, axis=1) >= -tol)
    assert np.all(np.diff(grid, axis=2) <= tol)


def test_infinite_horizon_consistency(b33):
    m = RiskModel(b33, 5, 3)
    inf = parisian_ruin_infinite(m)
    assert inf.converged
    assert 1 - inf.value == pytest.approx(parisian_survival(m, 2000), abs=1e-6)


def test_infinite_below_classical(light_family):
    for pmf in light_family:
        m = RiskModel(pmf, 3, 2)
        comp = parisian_infinite_components(m)
        assert 0 <= comp.value <= comp.classical + 1e-12
        assert comp.classical == pytest.approx(ruin_infinite(m).value, abs=1e-9)


def test_infinite_zero_when_no_claims_above_one():
    m = RiskModel(custom([0.4, 0.6]), 1, 1)
    assert parisian_ruin_infinite(m).value == 0


def test_infinite_geometric_recursion():
    p = geometric(0.3, eps_mass=1e-15)
    m = RiskModel(p, 2, 2)
    assert 1 - parisian_ruin_infinite(m).value == pytest.approx(parisian_survival(m, 3000), abs=1e-7)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.integers(1, 20), min_size=2, max_size=4),
    st.integers(1, 2),
    st.integers(1, 3),
    st.integers(1, 9),
)
def test_recursion_matches_brute_force_property(w, u, zeta, t):
    s = sum(w)
    p = custom([x / s for x in w])
    m = RiskModel(p, u, zeta)
    assert parisian_survival(m, t) == pytest.approx(brute_force_parisian(m, t), abs=1e-12)
