import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parisian import RiskModel, binomial, cramer_root, custom, geometric
from parisian.asymptotics import (
    class_probe,
    cramer_C,
    cramer_C_ladder,
    cramer_parisian_limit,
    defect_check,
    deficit_D,
    deficit_D_literal,
    deficit_limit,
    f_transform_check,
    g_transform_check,
    heavy_K,
    heavy_limits,
    heavy_w,
    heavy_W_tail,
    heavy_W_tail_literal,
    kendall_transform_check,
    ladder_law,
    ladder_renewal,
    toy_heavy_pmf,
    wiener_hopf_check,
    wiener_hopf_literal,
)
from parisian.classical import deficit_infinite, ruin_infinite
from parisian.errors import DomainError

FRACTIONS = (0.1, 0.3, 0.5, 0.7, 0.9)


def test_ladder_law_closed_form(light_family):
    # downward-skip-free walk: h(l) = Fbar(l) / p_0
    for pmf in light_family:
        law = ladder_law(pmf)
        closed = law.closed_form()
        np.testing.assert_allclose(law.masses[: closed.size], closed[: law.masses.size], atol=1e-12)


def test_defect_identity(light_family):
    for pmf in light_family:
        assert defect_check(ladder_law(pmf)) <= 1e-10


def test_wiener_hopf_identity(light_family):
    for pmf in light_family:
        gamma = cramer_root(pmf)
        rows = wiener_hopf_check(ladder_law(pmf), [-gamma * f for f in FRACTIONS])
        assert max(r["abs_diff"] for r in rows) <= 1e-8


def test_wiener_hopf_literal_sign_fails(b33):
    # with e^{+theta l} on the left the identity does not hold
    rows = wiener_hopf_literal(ladder_law(b33), [-0.5, -1.0])
    assert min(r["abs_diff"] for r in rows) > 1e-2


def test_ladder_dp_matches_closed(light_family):
    for pmf in light_family:
        dp = ladder_law(pmf)
        closed = ladder_law(pmf, method="closed", l_max=dp.l_max)
        np.testing.assert_allclose(dp.masses, closed.masses, atol=1e-12)


def test_ladder_empty_when_claims_at_most_one():
    law = ladder_law(custom([0.4, 0.6]))
    assert law.defect == pytest.approx(1.0)
    assert law.masses.sum() == 0


def test_cramer_C_two_ways(light_family):
    for pmf in light_family:
        law = ladder_law(pmf)
        assert cramer_C(pmf) == pytest.approx(cramer_C_ladder(law), rel=1e-8)


def test_cramer_C_geometric_closed_form():
    # geometric(q) claims: P_u(T_0 < inf) = mu (q/(1-q))^u ... so C = mu
    q = 0.3
    p = geometric(q, eps_mass=1e-15)
    mu = q / (1 - q)
    assert cramer_root(p) == pytest.approx(math.log((1 - q) / q), rel=1e-10)
    assert cramer_C(p) == pytest.approx(mu, rel=1e-8)
    assert ruin_infinite(RiskModel(p, 6)).value == pytest.approx(mu * (q / (1 - q)) ** 6, rel=1e-7)


def test_ladder_renewal_matches_series(b33):
    psi, _ = ladder_renewal(ladder_law(b33), 12, 2)
    for u in (1, 5, 12):
        assert psi[u] == pytest.approx(ruin_infinite(RiskModel(b33, u)).value, abs=1e-10)


def test_deficit_limit_geometric():
    # memoryless claims: the deficit is geometric at every u
    q = 0.3
    pi = deficit_limit(geometric(q, eps_mass=1e-15))
    z = np.arange(pi.size)
    np.testing.assert_allclose(pi[:10], (1 - q) * q ** z[:10], atol=1e-9)
    vec, _ = deficit_infinite(RiskModel(geometric(q, eps_mass=1e-15), 12), 9, tol=1e-15)
    np.testing.assert_allclose(vec / vec.sum(), pi[:10] / pi[:10].sum(), atol=1e-6)


def test_deficit_limit_binomial(b33):
    pi = deficit_limit(b33)
    assert pi.sum() == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(pi, [0.90345, 0.09655], atol=1e-5)


@pytest.mark.parametrize("theta", [0.1, 0.5, 1.0])
def test_D_matches_deficit_transform(light_family, theta):
    for pmf in light_family:
        pi = deficit_limit(pmf)
        direct = float(pi @ np.exp(-theta * np.arange(pi.size)))
        assert deficit_D(pmf, theta) == pytest.approx(direct, abs=1e-8)


def test_D_literal_differs(b33):
    pi = deficit_limit(b33)
    direct = float(pi @ np.exp(-0.5 * np.arange(pi.size)))
    assert abs(deficit_D_literal(b33, 0.5) - direct) > 1e-2


@pytest.mark.parametrize("theta", [0.2, 0.5])
def test_f_transform(light_family, theta):
    for pmf in light_family:
        assert f_transform_check(pmf, theta)["abs_diff"] <= 1e-6


def test_kendall_transform(b33):
    for z in range(6):
        for theta in (0.2, 0.7):
            assert kendall_transform_check(b33, z, theta)["abs_diff"] <= 1e-8


def test_cramer_parisian_limit(b33):
    for zeta in (1, 3):
        rep = cramer_parisian_limit(RiskModel(b33, 1, zeta), u_grid=(5, 10, 20, 40))
        last = rep.diagnostics[-1]
        assert last["u"] == 40
        assert last["classical_rel_gap"] <= 0.02
        assert last["rel_gap"] <= 0.03
        assert 0 < rep.components["B"] <= 1
    assert rep.prefactor == pytest.approx(0.71551, abs=1e-4)


def test_cramer_methods_agree(b33):
    lad = cramer_parisian_limit(RiskModel(b33, 1, 2), u_grid=(5, 10))
    ser = cramer_parisian_limit(RiskModel(b33, 1, 2), u_grid=(5, 10), method="series")
    for a, b in zip(lad.diagnostics, ser.diagnostics):
        assert a["parisian_ruin"] == pytest.approx(b["parisian_ruin"], abs=1e-9)


def test_cramer_unknown_method(b33):
    with pytest.raises(DomainError):
        cramer_parisian_limit(RiskModel(b33, 1, 2), method="bogus")


def test_report_serialisation(b33):
    rep = cramer_parisian_limit(RiskModel(b33, 1, 2), u_grid=(5, 10))
    lines = [json.loads(x) for x in rep.to_json_lines().splitlines()]
    assert lines[0]["kind"] == "report"
    assert lines[0]["regime"] == "cramer"
    assert [r["u"] for r in lines[1:]] == [5, 10]
    csv_text = rep.to_csv()
    assert csv_text.startswith("key,value\n")
    assert "prefactor," + repr(rep.prefactor) in csv_text


# heavy tails


@pytest.fixture(scope="module")
def toy():
    return toy_heavy_pmf(0.2, 400)


def test_heavy_constants(toy):
    assert heavy_K(toy, 0.2) > 0
    with pytest.raises(DomainError):
        heavy_K(toy, 0.0)
    with pytest.raises(DomainError):
        heavy_K(toy, 5.0)


def test_W_tail_monotone(toy):
    law = ladder_law(toy, check=False)
    W = heavy_W_tail(law, 0.2, law.l_max + 1)
    assert W[0] == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(W) <= 1e-12)
    assert W[-1] >= -1e-12
    assert W[0] - W[-1] <= 1 + 1e-12


def test_W_literal_is_not_a_tail(toy):
    law = ladder_law(toy, check=False)
    lit = heavy_W_tail_literal(law, 0.2, 5)
    assert lit.min() < 0


def test_w_at_zero_is_mass(toy):
    law = ladder_law(toy, check=False)
    W = heavy_W_tail(law, 0.2, law.l_max + 1)
    assert heavy_w(W, 0.0) == pytest.approx(W[0] - W[-1], abs=1e-14)


@pytest.mark.parametrize("theta", [0.2, 0.5, 1.0])
def test_g_transform(toy, theta):
    law = ladder_law(toy, check=False)
    W = heavy_W_tail(law, 0.2, law.l_max + 1)
    assert g_transform_check(toy, W, theta)["abs_diff"] <= 1e-6


def test_heavy_limits_alpha_positive(toy):
    for zeta in (1, 3):
        rep = heavy_limits(RiskModel(toy, 1, zeta), 0.2, u_grid=(10, 20, 40, 80, 150))
        assert rep.regime == "subexp_alpha_pos"
        assert 0 < rep.components["B"] <= 1
        ratios = [d["parisian_ratio"] for d in rep.diagnostics]
        assert all(0 < r < 2 * rep.prefactor for r in ratios)
        assert ratios[-1] > ratios[0]
        # trend toward the prefactor
        gaps = [d["parisian_rel_gap"] for d in rep.diagnostics]
        assert gaps[-1] < gaps[0]


def test_heavy_limits_alpha_zero():
    pmf = toy_heavy_pmf(0.0, 2000, 3.5)
    rep = heavy_limits(RiskModel(pmf, 1, 3), 0.0, u_grid=(20, 40, 80))
    assert rep.regime == "subexp_alpha0"
    assert rep.components["B"] == 1.0
    mu = float(pmf.mean)
    assert rep.prefactor == pytest.approx(mu / (1 - mu))
    for d in rep.diagnostics:
        assert 0 < d["parisian_ratio"] <= d["classical_ratio"] + 1e-12


def test_heavy_limits_negative_alpha(b33):
    with pytest.raises(DomainError):
        heavy_limits(RiskModel(b33, 1, 1), -0.1)


def test_class_probe(toy):
    rows = class_probe(toy, 0.2)
    head, body = rows[0], rows[1:]
    assert head["target_L"] == pytest.approx(math.exp(0.2))
    # ratio_L approaches e^alpha from above for this family
    assert abs(body[-1]["ratio_L"] - head["target_L"]) < abs(body[0]["ratio_L"] - head["target_L"])


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.3))
def test_wiener_hopf_binomial_property(p):
    pmf = binomial(3, p)
    gamma = cramer_root(pmf)
    rows = wiener_hopf_check(ladder_law(pmf), [-gamma * f for f in FRACTIONS] + [-3.0])
    assert max(r["abs_diff"] for r in rows) <= 1e-8
