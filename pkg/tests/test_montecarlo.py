import math

import numpy as np
import pytest

from parisian import RiskModel, binomial, brute_force_parisian, custom, parisian_survival
from parisian import _kernels
from parisian._jit import NUMBA_AVAILABLE
from parisian.errors import DomainError
from parisian.montecarlo import (
    TABLE1_SCHEDULE,
    McConfig,
    McEstimate,
    mc_parisian_survival,
    mc_schedule,
    schedule_csv,
)


def test_schedule_constant():
    assert TABLE1_SCHEDULE[0] == 100 and TABLE1_SCHEDULE[-1] == 102400 and len(TABLE1_SCHEDULE) == 11


def test_config_validation(b33):
    m = RiskModel(b33, 5, 3)
    for bad in ({"paths": 0}, {"paths": 1.5}, {"horizon": 0}, {"seed": -1}, {"seed": 2**64}):
        kw = {"model": m, "horizon": 20, **bad}
        with pytest.raises(DomainError):
            McConfig(**kw)


def test_deterministic(b33):
    cfg = McConfig(RiskModel(b33, 5, 3), 20, 5000, 7)
    a, b = mc_parisian_survival(cfg), mc_parisian_survival(cfg)
    assert a.p_hat == b.p_hat and a.survivors == b.survivors
    c = mc_parisian_survival(McConfig(RiskModel(b33, 5, 3), 20, 5000, 8))
    assert c.p_hat != a.p_hat


def test_prefix_property(b33):
    # path i depends only on (seed, i, step): smaller runs are prefixes of larger ones
    m = RiskModel(b33, 2, 1)
    cdf = np.cumsum(b33.weights)
    key = _kernels.mix64(3)
    small = _kernels.mc_count(cdf, 2, 1, 15, 1000, key)
    big = _kernels.mc_count(cdf, 2, 1, 15, 1001, key)
    assert big - small in (0, 1)
    assert mc_parisian_survival(McConfig(m, 16, 1000, 3)).survivors == small


def test_short_horizon_always_survives(b33):
    est = mc_parisian_survival(McConfig(RiskModel(b33, 1, 5), 6, 2000, 1))
    assert est.p_hat == 1.0 and est.stderr == 0.0


def test_stderr_formula(b33):
    est = mc_parisian_survival(McConfig(RiskModel(b33, 5, 3), 20, 4000, 2))
    assert est.stderr == pytest.approx(math.sqrt(est.p_hat * (1 - est.p_hat) / 4000))


def test_agrees_with_brute_force():
    p = custom([0.4, 0.3, 0.2, 0.1])
    m = RiskModel(p, 1, 1)
    exact = brute_force_parisian(m, 10)
    est = mc_parisian_survival(McConfig(m, 10, 200_000, 11))
    assert abs(est.p_hat - exact) <= 4 * est.stderr


def test_covers():
    est = McEstimate(0.5, 0.01, 100, 0.0)
    assert est.covers(0.515) and not est.covers(0.53)


def test_schedule_and_csv(b33):
    m = RiskModel(b33, 5, 3)
    exact = float(parisian_survival(m, 20))
    rows = mc_schedule(m, 20, (100, 200, 400), seed=0, exact=exact)
    assert [r["description"] for r in rows] == ["MC 100", "MC 200", "MC 400"]
    assert all(r["abs_diff"] == abs(r["probability"] - exact) for r in rows)
    text = schedule_csv(rows, exact, 0.1, timing=False)
    lines = text.splitlines()
    assert lines[0] == "description,probability,time_sec,abs_diff"
    assert lines[1] == f"exact,{exact!r},,"
    assert len(lines) == 5
    with pytest.raises(DomainError):
        mc_schedule(m, 20, ())


def test_jit_and_numpy_streams_identical(b33):
    if not NUMBA_AVAILABLE:
        pytest.skip("numba missing")
    cdf = np.cumsum(b33.weights)
    key = _kernels.mix64(12345)
    a = _kernels._mc_count_jit(cdf, 5, 3, 19, 20_000, np.uint64(key))
    b = _kernels._mc_count_np(cdf, 5, 3, 19, 20_000, key)
    assert int(a) == int(b)
