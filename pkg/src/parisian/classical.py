"""Classical (non-Parisian) ruin for ``R_t = u + t - S_t``.

``T_0`` is the first ``n >= 1`` with ``R_n <= 0``. Everything here is built on
the convolution powers of the claim law, except :func:`dp_survival`, which
runs a forward recursion on the surplus level and serves as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .dist import Pmf, RiskModel, conv_table, cramer_root, phi
from .errors import DomainError, NoRootError

__all__ = [
    "SeriesValue",
    "DeficitLaw",
    "powers",
    "seal_survival",
    "seal_survival_series",
    "dp_survival",
    "dp_survival_series",
    "deficit_joint",
    "kendall_first_passage",
    "kendall_table",
    "first_passage_cdf",
    "ruin_infinite",
    "deficit_infinite",
    "tail_certificate",
]

DEFAULT_TOL = 1e-10
DEFAULT_K_MAX = 50_000


class SeriesValue(NamedTuple):
    """Value of a truncated infinite series.

    ``abserr`` is a certified bound when ``converged`` is True and a heuristic
    residual estimate otherwise.
    """

    value: float
    abserr: float
    converged: bool
    n_terms: int


def powers(pmf: Pmf, rows: int, width: int) -> np.ndarray:
    """Convolution table with at least ``rows + 1`` rows and ``width + 1`` columns.

    Columns past the largest reachable atom are zero-padded.
    """
    table = conv_table(pmf, rows, width)
    P = table.powers
    if P.shape[1] >= width + 1:
        return P
    pad = np.zeros((P.shape[0], width + 1 - P.shape[1]), dtype=P.dtype)
    return np.hstack([P, pad])


def _check_t(t) -> int:
    if int(t) != t or t < 0:
        raise DomainError(f"time horizon must be a non-negative integer, got {t!r}")
    return int(t)


def seal_survival_series(model: RiskModel, t_max: int) -> np.ndarray:
    """``out[t] = P_u(T_0 >= t + 1)`` for ``t = 0..t_max``."""
    t_max = _check_t(t_max)
    if t_max == 0:
        return np.ones(1, dtype=model.claims.weights.dtype)
    P = powers(model.claims, t_max, model.u + t_max)
    return _kernels.seal_series(P, model.u, t_max)


def seal_survival(model: RiskModel, t: int):
    """Finite-time classical survival ``P_u(T_0 >= t + 1)``; equals 1 at ``t = 0``."""
    return seal_survival_series(model, t)[-1]


def dp_survival_series(model: RiskModel, t_max: int) -> np.ndarray:
    """Oracle for :func:`seal_survival_series` by forward recursion on the surplus."""
    t_max = _check_t(t_max)
    return _kernels.dp_survival_series(model.claims.weights, model.u, t_max)


def dp_survival(model: RiskModel, t: int):
    return dp_survival_series(model, t)[-1]


@dataclass(frozen=True, eq=False)
class DeficitLaw:
    """Joint law ``q[s, z] = P_u(T_0 = s, -R_{T_0} = z)``; row 0 is unused and zero."""

    model: RiskModel
    entries: np.ndarray
    s_max: int
    z_max: int

    def __getitem__(self, key):
        return self.entries[key]

    def time_marginal(self) -> np.ndarray:
        """``sum_z q[s, z]`` over the stored deficits (complete once ``z_max >= M - u - 1``)."""
        return self.entries.sum(axis=1)

    def deficit_marginal(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    def total(self):
        return self.entries.sum()


def deficit_joint(model: RiskModel, s_max: int, z_max: int) -> DeficitLaw:
    """Fill the joint ruin-time / deficit law up to ``s_max`` and ``z_max``."""
    if int(s_max) != s_max or s_max < 1:
        raise DomainError(f"s_max must be a positive integer, got {s_max!r}")
    if int(z_max) != z_max or z_max < 0:
        raise DomainError(f"z_max must be a non-negative integer, got {z_max!r}")
    base = model.claims.weights
    P = powers(model.claims, max(s_max - 1, 1), model.u + s_max)
    q = _kernels.deficit_fill(P, base, model.u, int(s_max), int(z_max))
    q.flags.writeable = False
    return DeficitLaw(model, q, int(s_max), int(z_max))


def kendall_table(pmf: Pmf, x_max: int, omega_max: int) -> np.ndarray:
    """``K[x, w] = P(tau_x = w)`` for the walk ``n - S_n`` started at 0.

    Row 0 and column 0 are zero. Uses ``(x / w) P(S_w = w - x)``.
    """
    if x_max < 0 or omega_max < 0:
        raise DomainError("x_max and omega_max must be non-negative")
    P = powers(pmf, max(omega_max, 1), max(omega_max - 1, 0))
    K = np.zeros((x_max + 1, omega_max + 1), dtype=P.dtype)
    for x in range(1, x_max + 1):
        w = np.arange(x, omega_max + 1)
        if w.size:
            K[x, x:] = x * P[w, w - x] / w
    return K


def kendall_first_passage(pmf: Pmf, x: int, omega: int):
    """First-passage probability ``P(tau_x = omega)`` to level ``x`` of ``n - S_n``."""
    if int(x) != x or x < 1:
        raise DomainError(f"level x must be a positive integer, got {x!r}")
    if int(omega) != omega or omega < 1:
        raise DomainError(f"time omega must be a positive integer, got {omega!r}")
    if omega < x:
        return 0 * pmf.weights[0]
    P = powers(pmf, omega, omega - x)
    return x * P[omega, omega - x] / omega


def first_passage_cdf(pmf: Pmf, x_max: int, k: int) -> np.ndarray:
    """``out[x] = P(tau_x <= k)`` for ``x = 0..x_max`` (``out[0] = 1``)."""
    K = kendall_table(pmf, x_max, k)
    out = K.sum(axis=1)
    out[0] = 1
    return out


# ---------------------------------------------------------------------------
# infinite horizon


def tail_certificate(pmf: Pmf, u: int, n: int, gamma: float | None = None, grid: int = 256) -> float:
    """Bound on ``sum_{k > n} P(S_k - k >= u)``.

    Chernoff at rate ``beta`` in ``(0, gamma)`` gives terms below
    ``exp(-beta u + k phi(-beta))``; the geometric sum is minimised over a grid.
    """
    if gamma is None:
        gamma = cramer_root(pmf)
    betas = gamma * (np.arange(1, grid) / grid)
    best = math.inf
    for b in betas:
        e = phi(pmf, -b)
        if e >= 0:
            continue
        log_b = -b * u + (n + 1) * e - math.log1p(-math.exp(e))
        best = min(best, log_b)
    return math.exp(best) if best > -745 else 0.0


def _terms_for(pmf: Pmf, u: int, tol: float, gamma: float, k_cap: int) -> int:
    lo, hi = 0, 64
    while hi < k_cap and tail_certificate(pmf, u, hi, gamma) > tol:
        lo, hi = hi, hi * 2
    hi = min(hi, k_cap)
    if tail_certificate(pmf, u, hi, gamma) > tol:
        return k_cap
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_certificate(pmf, u, mid, gamma) <= tol:
            hi = mid
        else:
            lo = mid
    return hi


def _no_root_gamma(pmf: Pmf) -> float | None:
    try:
        return cramer_root(pmf)
    except NoRootError:
        return None


def ruin_infinite(model: RiskModel, tol: float = DEFAULT_TOL, k_max: int = DEFAULT_K_MAX) -> SeriesValue:
    """``P_u(T_0 < inf) = (1 - mu) sum_{k >= 1} P(S_k = u + k)``.

    With a Cramér root the number of terms is chosen so the certified tail
    bound is below ``tol``. Otherwise ``k_max`` terms are summed and the
    residual is a heuristic (last term times the number of terms so far).
    """
    model.require_net_profit()
    pmf = model.claims.as_float()
    mu = float(pmf.mean)
    if pmf.support_max == 0:
        return SeriesValue(0.0, 0.0, True, 0)
    gamma = _no_root_gamma(pmf) if pmf.support_max > 1 else math.inf
    if gamma == math.inf:
        # claims bounded by 1: S_k - k <= 0, ruin only via u = 0 paths of zero length
        return SeriesValue(0.0, 0.0, True, 0)
    if gamma is not None:
        n = _terms_for(pmf, model.u, tol / max(1 - mu, 1e-300), gamma, k_max)
    else:
        n = k_max
    diag = _kernels.diag_series(pmf.weights, model.u, n)
    partial = diag[1:].sum()
    value = (1 - mu) * partial
    if gamma is not None:
        err = (1 - mu) * tail_certificate(pmf, model.u, n, gamma)
        return SeriesValue(float(value), float(err), err <= tol, n)
    err = (1 - mu) * float(diag[-1]) * n
    return SeriesValue(float(value), err, False, n)


def deficit_infinite(
    model: RiskModel, z_max: int, tol: float = DEFAULT_TOL, s_cap: int = 20_000
) -> tuple[np.ndarray, SeriesValue]:
    """``m[z] = P_u(T_0 < inf, -R_{T_0} = z)`` for ``z <= z_max``.

    Sums the joint law over ruin times until the certified bound on
    ``P_u(s_max < T_0 < inf)`` is below ``tol``. Returns the vector and a
    :class:`SeriesValue` describing the truncation of its total.
    """
    model.require_net_profit()
    pmf = model.claims.as_float()
    if pmf.support_max <= 1:
        return np.zeros(z_max + 1), SeriesValue(0.0, 0.0, True, 0)
    gamma = _no_root_gamma(pmf)
    if gamma is None:
        s_max = s_cap
    else:
        s_max = max(1, _terms_for(pmf, model.u, tol, gamma, s_cap))
    law = deficit_joint(RiskModel(pmf, model.u, model.zeta), s_max, z_max)
    m = law.entries.sum(axis=0)
    if gamma is not None:
        err = tail_certificate(pmf, model.u, s_max, gamma)
        return m, SeriesValue(float(m.sum()), err, err <= tol, s_max)
    err = float(law.entries[-1].sum()) * s_max
    return m, SeriesValue(float(m.sum()), err, False, s_max)
