"""Parisian ruin: ruin is declared once the surplus has stayed at or below 0
for more than ``zeta`` consecutive periods.

``tau`` is the first ``n`` with ``R_n <= 0`` and ``n - sup{s < n: R_s > 0} > zeta``
(the supremum over an empty set is 0). Finite-horizon survival
``P_u(tau >= t)`` is computed by a recursion over the first classical ruin
time, its deficit, and the first-passage time back above 0; the sequence
``b(k) = P_1(tau >= k)`` is built first and reused for every ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import _kernels
from .classical import (
    SeriesValue,
    deficit_infinite,
    first_passage_cdf,
    kendall_table,
    powers,
    ruin_infinite,
)
from .dist import Pmf, RiskModel
from .errors import DomainError, ResourceLimitError

__all__ = [
    "ParisianTable",
    "SweepResult",
    "ParisianInfinite",
    "parisian_table",
    "parisian_survival",
    "parisian_ruin",
    "parisian_survival_series",
    "parisian_survival_sweep",
    "parisian_ruin_infinite",
    "parisian_infinite_components",
    "brute_force_parisian",
    "dp_parisian_survival",
]

DEFAULT_BUDGET = 2**26
U0_NOTE = (
    "u=0 reconstruction: recursion evaluated at u=0 with the clock idle at time 0 "
    "(first classical ruin at n >= 1, run length counted from time 0)"
)


@dataclass(eq=False)
class ParisianTable:
    """Shared state for finite-horizon Parisian quantities at one ``(claims, zeta)``.

    In the default ``"ruin"`` form the recursion runs on ``P_u(tau < t)`` with
    the classical term written as the sum over ``s`` of
    ``P_u(T_0 = s, no return within zeta)``; every term is non-negative, so
    survival probabilities at exactly 1 stay exactly 1. The ``"seal"`` form
    runs the literal survival recursion on top of the Seal-type formula.

    Attributes:
        claims: claim law.
        zeta: Parisian delay.
        horizon: largest ``t`` supported without a rebuild.
        form: ``"ruin"`` or ``"seal"``.
        base: ``P_1(tau < k)`` (ruin form) or ``P_1(tau >= k)`` (seal form), ``k = 0..horizon``.
    """

    claims: Pmf
    zeta: int
    horizon: int
    form: str
    base: np.ndarray
    kendall: np.ndarray
    values: dict = field(default_factory=dict)
    _parts: dict = field(default_factory=dict, repr=False)

    @property
    def depth(self) -> int:
        # largest first-ruin time the recursion needs
        return max(self.horizon - self.zeta - 1, 0)

    @property
    def base_survival(self) -> np.ndarray:
        """``b[k] = P_1(tau >= k)``."""
        return 1 - self.base if self.form == "ruin" else self.base

    def _one(self):
        return 1 if self.claims.exact else 1.0

    def _finish(self, x):
        return self._one() - x if self.form == "ruin" else x

    def parts(self, u: int):
        """Classical term and the (s, omega) weights for reserve ``u``."""
        got = self._parts.get(u)
        if got is None:
            got = _parts(self.claims, self.zeta, self.kendall, u, self.depth, self.form)
            self._parts[u] = got
        return got

    def _raw(self, u: int, t: int):
        if t <= self.zeta + 1:
            return self.base[0]
        if u == 1:
            return self.base[t]
        head, A = self.parts(u)
        return _kernels.parisian_tail(head, A, self.base, self.zeta, t)

    def series(self, u: int, t_max: int) -> np.ndarray:
        """``out[t] = P_u(tau >= t)`` for ``t = 0..t_max``."""
        if t_max > self.horizon:
            raise DomainError(f"t={t_max} beyond table horizon {self.horizon}")
        if u == 1:
            raw = self.base[: t_max + 1].copy()
        else:
            raw = np.empty(t_max + 1, dtype=self.base.dtype)
            raw[: min(t_max, self.zeta + 1) + 1] = self.base[0]
            if t_max > self.zeta + 1:
                head, A = self.parts(u)
                for t in range(self.zeta + 2, t_max + 1):
                    raw[t] = _kernels.parisian_tail(head, A, self.base, self.zeta, t)
        return self._finish(raw)

    def survival(self, u: int, t: int):
        key = (u, t)
        if key not in self.values:
            self.values[key] = self._finish(self._raw(u, t))
        return self.values[key]

    def ruin(self, u: int, t: int):
        """``P_u(tau < t)``."""
        raw = self._raw(u, t)
        return raw if self.form == "ruin" else self._one() - raw


def _parts(claims: Pmf, zeta: int, ken: np.ndarray, u: int, depth: int, form: str):
    P = powers(claims, max(depth, zeta, 1), u + depth + 1)
    z_top = max(zeta - 1, claims.support_max - 1, 0)
    q = _kernels.deficit_fill(P, claims.weights, u, depth, z_top if form == "ruin" else zeta - 1)
    A = np.zeros((depth + 1, zeta + 1), dtype=P.dtype)
    for w in range(1, zeta + 1):
        # A[s, w] = sum_{z < w} q(s, z) P(tau_{z+1} = w)
        A[:, w] = (q[:, :w] * ken[1 : w + 1, w][None, :]).sum(axis=1)
    if form == "seal":
        return _kernels.seal_series(P, u, depth), A
    # P(T_0 = s, -R = z) times the chance of not returning above 0 within zeta steps
    stay = np.ones(z_top + 1, dtype=P.dtype)
    stay[:zeta] = 1 - ken[1 : zeta + 1].sum(axis=1)
    lost = (q * stay[None, :]).sum(axis=1)
    head = np.cumsum(lost) if P.dtype != object else np.array(np.cumsum(lost), dtype=object)
    return head, A


_TABLES: dict[tuple[str, int, str], ParisianTable] = {}
FORMS = ("ruin", "seal")


def parisian_table(claims: Pmf, zeta: int, horizon: int, form: str = "ruin") -> ParisianTable:
    """Cached :class:`ParisianTable` covering ``t <= horizon``."""
    if int(zeta) != zeta or zeta < 1:
        raise DomainError(f"Parisian delay must be a positive integer, got {zeta!r}")
    if form not in FORMS:
        raise DomainError(f"unknown recursion form {form!r}")
    key = (claims.fingerprint, int(zeta), form)
    table = _TABLES.get(key)
    if table is not None and table.horizon >= horizon:
        return table
    horizon = max(horizon, zeta + 1)
    ken = kendall_table(claims, zeta, zeta)
    depth = horizon - zeta - 1
    init = 0 if form == "ruin" else 1
    if depth <= 0:
        b = np.array([init] * (horizon + 1), dtype=object if claims.exact else np.float64)
    else:
        head1, A1 = _parts(claims, zeta, ken, 1, depth, form)
        b = _kernels.parisian_base(head1, A1, zeta, horizon, init)
    b.flags.writeable = False
    table = ParisianTable(claims, int(zeta), int(horizon), form, b, ken)
    _TABLES[key] = table
    if len(_TABLES) > 64:
        _TABLES.pop(next(iter(_TABLES)))
    return table


def clear_caches() -> None:
    _TABLES.clear()


def _check_t(t) -> int:
    if int(t) != t or t < 1:
        raise DomainError(f"time horizon must be a positive integer, got {t!r}")
    return int(t)


def _check_u_positive(u: int) -> None:
    if u < 1:
        raise DomainError("Parisian recursion needs initial reserve u >= 1 (u=0 is available only in sweeps)")


def parisian_survival(model: RiskModel, t: int, form: str = "ruin"):
    """Finite-horizon Parisian survival ``P_u(tau >= t)``; 1 whenever ``t <= zeta + 1``."""
    t = _check_t(t)
    _check_u_positive(model.u)
    if t <= model.zeta + 1:
        return 1 if model.claims.exact else 1.0
    return parisian_table(model.claims, model.zeta, t, form).survival(model.u, t)


def parisian_ruin(model: RiskModel, t: int):
    """Finite-horizon Parisian ruin ``P_u(tau < t)`` at full relative precision."""
    t = _check_t(t)
    _check_u_positive(model.u)
    if t <= model.zeta + 1:
        return 0 if model.claims.exact else 0.0
    return parisian_table(model.claims, model.zeta, t).ruin(model.u, t)


def parisian_survival_series(model: RiskModel, t_max: int, form: str = "ruin") -> np.ndarray:
    """``out[t] = P_u(tau >= t)`` for ``t = 0..t_max`` (``out[0] = 1``)."""
    t_max = _check_t(t_max)
    _check_u_positive(model.u)
    return parisian_table(model.claims, model.zeta, t_max, form).series(model.u, t_max)


@dataclass(frozen=True)
class SweepResult:
    """One probability per grid point on the swept axis."""

    axis: str
    grid: tuple
    values: tuple
    fixed: dict
    notes: dict = field(default_factory=dict)

    def rows(self):
        return list(zip(self.grid, self.values))


def parisian_survival_sweep(model: RiskModel, axis: str, values: Iterable[int], t: int | None = None) -> SweepResult:
    """Sweep ``t``, ``u`` or ``zeta`` while the other two stay at the model's / given values.

    For ``axis="u"`` the grid may include 0; that point uses the documented
    reconstruction and is flagged in ``notes``.
    """
    grid = tuple(int(v) for v in values)
    if not grid:
        raise DomainError("sweep range is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("sweep range must be increasing")
    notes: dict = {}
    if axis == "t":
        for v in grid:
            _check_t(v)
        _check_u_positive(model.u)
        table = parisian_table(model.claims, model.zeta, max(grid))
        series = table.series(model.u, max(grid))
        out = tuple(series[v] for v in grid)
        fixed = {"u": model.u, "zeta": model.zeta}
    else:
        t = _check_t(t if t is not None else 1)
        if axis == "u":
            if grid[0] < 0:
                raise DomainError("initial reserve must be non-negative")
            table = parisian_table(model.claims, model.zeta, t)
            out = []
            for u in grid:
                out.append(table.survival(u, t))
                if u == 0:
                    notes[0] = U0_NOTE
            out = tuple(out)
            fixed = {"zeta": model.zeta, "t": t}
        elif axis == "zeta":
            _check_u_positive(model.u)
            if grid[0] < 1:
                raise DomainError("Parisian delay must be >= 1")
            out = tuple(parisian_survival(model.with_(zeta=z), t) for z in grid)
            fixed = {"u": model.u, "t": t}
        else:
            raise DomainError(f"unknown sweep axis {axis!r}")
    return SweepResult(axis, grid, out, fixed, notes)


# ---------------------------------------------------------------------------
# infinite horizon


@dataclass(frozen=True)
class ParisianInfinite:
    """Infinite-horizon Parisian ruin and its ingredients.

    Attributes:
        value: ``P_u(tau < inf)``.
        abserr: propagated truncation bound.
        classical: ``P_u(T_0 < inf)``.
        p1: ``P_1(tau < inf)``.
        recovery: ``sum_{z < zeta} P_u(T_0 < inf, -R_{T_0} = z) P(tau_{z+1} <= zeta)``.
        converged: every series met its tolerance with a certified bound.
    """

    value: float
    abserr: float
    classical: float
    p1: float
    recovery: float
    converged: bool

    def as_series_value(self) -> SeriesValue:
        return SeriesValue(self.value, self.abserr, self.converged, 0)


def _recovery(model: RiskModel, tol: float):
    cdf = first_passage_cdf(model.claims.as_float(), model.zeta, model.zeta)
    m, sv = deficit_infinite(model, model.zeta - 1, tol)
    return float(m @ cdf[1 : model.zeta + 1]), sv


def parisian_infinite_components(model: RiskModel, tol: float = 1e-10) -> ParisianInfinite:
    model.require_net_profit()
    _check_u_positive(model.u)
    m1 = model.with_(u=1)
    a1 = ruin_infinite(m1, tol)
    e1, s1 = _recovery(m1, tol)
    denom = 1.0 - e1
    if denom <= 0:
        raise DomainError("recovery probability from u=1 equals 1; Parisian ruin from u=1 is undefined")
    p1 = (a1.value - e1) / denom
    err1 = (a1.abserr + 2 * s1.abserr) / max(denom - s1.abserr, 1e-300)
    if model.u == 1:
        return ParisianInfinite(p1, err1, a1.value, p1, e1, a1.converged and s1.converged)
    au = ruin_infinite(model, tol)
    eu, su = _recovery(model, tol)
    value = au.value - (1 - p1) * eu
    err = au.abserr + su.abserr + err1 * eu
    return ParisianInfinite(value, err, au.value, p1, eu, au.converged and su.converged and a1.converged and s1.converged)


def parisian_ruin_infinite(model: RiskModel, tol: float = 1e-10) -> SeriesValue:
    """Infinite-horizon Parisian ruin probability ``P_u(tau < inf)``."""
    if model.claims.support_max <= 1:
        return SeriesValue(0.0, 0.0, True, 0)
    return parisian_infinite_components(model, tol).as_series_value()


# ---------------------------------------------------------------------------
# oracles


def _atoms(model: RiskModel, steps: int):
    """Claim atoms for enumeration; large claims are lumped when that is exact.

    Any claim of at least ``u + 2 steps + 1`` leaves the surplus too deep to
    return above 0 before the horizon, so all such claims act alike.
    """
    w = model.claims.weights
    cut = model.u + 2 * steps + 1
    lumped = False
    if model.claims.unbounded or cut < w.size - 1:
        lumped = True
        head = w[: min(cut, w.size)]
        rest = w[cut:].sum() if cut < w.size else 0
        tail = rest + (model.claims.tail_bound if not model.claims.exact else 0)
        ys = np.arange(head.size + 1) if tail else np.arange(head.size)
        ps = np.append(head, tail) if tail else head
        if tail:
            ys[-1] = cut
    else:
        ys = np.arange(w.size)
        ps = w
    keep = np.array([p != 0 for p in ps.tolist()], dtype=bool)
    ps = ps[keep]
    if ps.dtype != object:
        ps = ps.astype(np.float64)
    return ys[keep].astype(np.int64), ps, lumped


def brute_force_parisian(model: RiskModel, t: int, budget: int = DEFAULT_BUDGET, prune: bool | None = None):
    """``P_u(tau >= t)`` by enumerating every claim sequence of length ``t - 1``.

    Sequences are checked against the ruin-time definition one step at a
    time. With ``m`` claim atoms the plain enumeration needs ``m**(t-1) <=
    budget``. Beyond that (or for unbounded claims) states that are already
    certain to be ruined or to survive are cut off early and ``budget``
    limits the number of visited nodes instead.

    Rational pmfs return an exact :class:`fractions.Fraction`.
    """
    t = _check_t(t)
    steps = t - 1
    if steps <= model.zeta:
        return 1 if model.claims.exact else 1.0
    ys, ps, lumped = _atoms(model, steps)
    m = ys.size
    plain = steps * math.log(max(m, 1)) <= math.log(budget)
    if prune is None:
        prune = not plain
    if not plain and not prune:
        raise ResourceLimitError(f"{m}^{steps} claim sequences exceed the enumeration budget {budget}")
    cap = budget if prune and not plain else 1 << 62
    if model.claims.exact:
        return _brute_exact(ys, ps, model, steps, prune, cap)
    value, nodes = _kernels.brute_force(ys, ps, model.u, model.zeta, steps, prune, cap)
    if nodes < 0:
        raise ResourceLimitError(f"enumeration visited more than {budget} nodes")
    return float(value)


def _brute_exact(ys, ps, model, steps, prune, cap):
    radix = steps + 1
    if radix ** ys.size >= 1 << 62:
        raise ResourceLimitError("too many atoms for exact composition counting")
    (codes, counts), nodes = _kernels.brute_force_counts(ys, model.u, model.zeta, steps, radix, prune, cap)
    if nodes < 0:
        raise ResourceLimitError(f"enumeration visited more than {cap} nodes")
    fr = [x if isinstance(x, Fraction) else Fraction(x) for x in ps.tolist()]
    den = math.lcm(*(f.denominator for f in fr))
    nums = [f.numerator * (den // f.denominator) for f in fr]
    total = 0
    for code, count in zip(codes.tolist(), counts.tolist()):
        term = count
        used = 0
        for a in nums:
            c = code % radix
            code //= radix
            used += c
            if c:
                term *= a**c
        # sequences settled early by pruning carry fewer factors
        total += term * den ** (steps - used)
    return Fraction(total, den**steps)


def dp_parisian_survival(model: RiskModel, t: int):
    """Oracle: ``P_u(tau >= t)`` from a forward recursion on (surplus, run length)."""
    t = _check_t(t)
    return _kernels.parisian_dp(model.claims.weights, model.u, model.zeta, t - 1)
