"""Claim distributions on the non-negative integers and their algebra.

A :class:`Pmf` stores weights ``p_0, p_1, ...``. Infinite-support families are
cut where the cumulative mass first reaches ``1 - eps_mass``; the mass cut away
is kept in ``tail_bound`` and is *not* renormalised into the kept weights.

Exact-rational pmfs (``exact=True``) carry :class:`fractions.Fraction` weights
in an object array. They are meant for finite-support verification runs; all
finite-horizon routines accept them and stay exact.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from . import _kernels
from .errors import CramerConditionError, DivergenceError, DomainError, NoRootError, ResourceLimitError

DEFAULT_EPS_MASS = 1e-12
DEFAULT_MAX_CELLS = 60_000_000
TOL_ROOT = 1e-13

__all__ = [
    "Pmf",
    "ConvTable",
    "RiskModel",
    "make_pmf",
    "binomial",
    "negbinomial",
    "geometric",
    "poisson",
    "custom",
    "parse_dist",
    "conv_table",
    "phi",
    "phi_prime",
    "phi_derivative",
    "cramer_root",
    "phi_inverse",
    "integrated_tail",
]


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function on ``0, 1, 2, ...``.

    Attributes:
        weights: ``weights[n] = P(Y = n)``; read-only.
        tail_bound: mass beyond ``support_max`` that was truncated away.
        eps_mass: truncation tolerance declared at construction.
        unbounded: True for infinite-support families (support was truncated).
        label: human-readable description, e.g. ``"binomial(3, 0.3)"``.
        logpmf: for truncated families, the untruncated ``log p_n``; lets
            exponential moments at negative arguments see past the cut.
    """

    weights: np.ndarray
    tail_bound: float = 0.0
    eps_mass: float = DEFAULT_EPS_MASS
    unbounded: bool = False
    label: str = "custom"
    logpmf: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    _fingerprint: str = field(default="", init=False, repr=False)

    def __post_init__(self):
        w = self.weights
        if not isinstance(w, np.ndarray):
            w = np.asarray(w, dtype=object if any(isinstance(x, Fraction) for x in w) else np.float64)
        if w.ndim != 1 or w.size == 0:
            raise DomainError("pmf weights must be a non-empty 1-d sequence")
        # drop trailing zeros so support_max is the largest atom
        nz = np.flatnonzero(w != 0)
        if nz.size == 0:
            raise DomainError("pmf has no mass")
        w = w[: nz[-1] + 1].copy()
        if any(x < 0 or x > 1 for x in w.tolist()):
            raise DomainError("pmf weights must lie in [0, 1]")
        if self.tail_bound < 0:
            raise DomainError("tail_bound must be non-negative")
        if not self.unbounded and self.tail_bound != 0:
            raise DomainError("finite-support pmf must have tail_bound == 0")
        total = float(sum(w.tolist())) + self.tail_bound
        slack = max(self.eps_mass, 1e-15 * w.size)
        if not (1 - slack <= total <= 1 + slack):
            raise DomainError(f"pmf mass {total!r} not within {slack:g} of 1")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        if w.dtype == object:
            key = repr(tuple(w.tolist())).encode()
        else:
            key = w.tobytes()
        digest = hashlib.sha1(key + repr((self.tail_bound, self.unbounded)).encode()).hexdigest()
        object.__setattr__(self, "_fingerprint", digest[:16])

    @property
    def fingerprint(self) -> str:
        return self._fingerprint

    @property
    def exact(self) -> bool:
        return self.weights.dtype == object

    @property
    def support_max(self) -> int:
        return self.weights.size - 1

    @property
    def mean(self) -> float:
        n = np.arange(self.weights.size)
        if self.exact:
            return sum(int(k) * x for k, x in zip(n, self.weights.tolist()))
        return float(n @ self.weights)

    @property
    def p0(self) -> float:
        return self.weights[0]

    def as_float(self) -> "Pmf":
        if not self.exact:
            return self
        return Pmf(np.array([float(x) for x in self.weights]), self.tail_bound, self.eps_mass, self.unbounded, self.label,
                   self.logpmf)

    def float_weights(self) -> np.ndarray:
        return self.weights if not self.exact else np.array([float(x) for x in self.weights])

    def cdf(self, k: int) -> float:
        if k < 0:
            return 0.0
        return sum(self.weights[: k + 1].tolist())

    def sf(self, k: int | np.ndarray) -> np.ndarray:
        """Tail ``P(Y > k)`` including the truncated mass."""
        w = self.float_weights()
        tail = np.concatenate([np.cumsum(w[::-1])[::-1][1:], [0.0]]) + self.tail_bound
        k = np.asarray(k)
        out = np.where(k < 0, 1.0, tail[np.clip(k, 0, w.size - 1)])
        return np.where(k >= w.size, self.tail_bound, out)

    def __repr__(self) -> str:
        return f"Pmf({self.label}, support_max={self.support_max}, tail_bound={self.tail_bound:.3g})"


@dataclass(frozen=True)
class RiskModel:
    """Surplus ``R_t = u + t - S_t`` with i.i.d. claims and Parisian delay ``zeta``."""

    claims: Pmf
    u: int
    zeta: int = 1

    def __post_init__(self):
        if int(self.u) != self.u or self.u < 0:
            raise DomainError(f"initial reserve must be a non-negative integer, got {self.u!r}")
        if int(self.zeta) != self.zeta or self.zeta < 1:
            raise DomainError(f"Parisian delay must be a positive integer, got {self.zeta!r}")

    @property
    def mu(self) -> float:
        return self.claims.mean

    def require_net_profit(self) -> None:
        if self.mu >= 1:
            raise DomainError(f"infinite-horizon quantities need mean claim < 1, got {float(self.mu):.6g}")

    def with_(self, **changes) -> "RiskModel":
        from dataclasses import replace

        return replace(self, **changes)


# ---------------------------------------------------------------------------
# families


def _check_prob(name: str, p, open_left=True) -> None:
    if not (0 < p < 1) if open_left else not (0 <= p < 1):
        raise DomainError(f"{name} must lie in (0, 1), got {p!r}")


def _truncate(pmf_fn, sf_fn, eps_mass: float, label: str, logpmf=None, n_cap: int = 10_000_000) -> Pmf:
    if not eps_mass > 0:
        raise DomainError("eps_mass must be positive for infinite-support families")
    n = 64
    while True:
        k = np.arange(n)
        w = pmf_fn(k)
        cum = np.cumsum(w)
        hit = np.flatnonzero(cum >= 1 - eps_mass)
        if hit.size:
            cut = int(hit[0])
            w = w[: cut + 1]
            tail = float(sf_fn(cut))
            return Pmf(w, tail_bound=tail, eps_mass=eps_mass, unbounded=True, label=label, logpmf=logpmf)
        if n > n_cap:
            raise ResourceLimitError(f"{label}: more than {n_cap} atoms needed for eps_mass={eps_mass:g}")
        n *= 2


def binomial(n: int, p, *, exact: bool = False) -> Pmf:
    if int(n) != n or n < 1:
        raise DomainError(f"binomial n must be a positive integer, got {n!r}")
    _check_prob("binomial p", float(p))
    n = int(n)
    label = f"binomial({n}, {p})"
    if exact:
        q = Fraction(str(p)) if not isinstance(p, Fraction) else p
        w = [math.comb(n, k) * q**k * (1 - q) ** (n - k) for k in range(n + 1)]
        return Pmf(np.array(w, dtype=object), label=label)
    k = np.arange(n + 1)
    w = np.array([math.comb(n, int(j)) for j in k], dtype=float) * p**k * (1 - p) ** (n - k)
    return Pmf(w, label=label)


def negbinomial(r, p, convention: str = "a", *, eps_mass: float = DEFAULT_EPS_MASS) -> Pmf:
    """Negative binomial claims.

    Convention ``"a"``: ``P(Y=k) = C(k+r-1, k) p^r (1-p)^k`` (mean ``r(1-p)/p``).
    Convention ``"b"``: the same kernel with ``p`` and ``1-p`` swapped.
    """
    if not r > 0:
        raise DomainError(f"negbinomial r must be positive, got {r!r}")
    _check_prob("negbinomial p", p)
    convention = convention.lower()
    if convention not in ("a", "b"):
        raise DomainError(f"unknown negbinomial convention {convention!r}")
    success = p if convention == "a" else 1 - p
    dist = stats.nbinom(r, success)
    pmf = _truncate(dist.pmf, dist.sf, eps_mass, f"negbinomial({r}, {p}, {convention})", dist.logpmf)
    if convention == "a" and pmf.mean >= 1:
        warnings.warn(f"{pmf.label} has mean {pmf.mean:.4g} >= 1", stacklevel=2)
    return pmf


def geometric(q, *, eps_mass: float = DEFAULT_EPS_MASS) -> Pmf:
    """``p_n = (1 - q) q^n`` for ``n >= 0`` (mean ``q / (1 - q)``)."""
    _check_prob("geometric q", q)
    return _truncate(
        lambda k: (1 - q) * q ** k.astype(float),
        lambda k: q ** (k + 1.0),
        eps_mass,
        f"geometric({q})",
        lambda k: math.log1p(-q) + k * math.log(q),
    )


def poisson(lam, *, eps_mass: float = DEFAULT_EPS_MASS) -> Pmf:
    if not lam > 0:
        raise DomainError(f"poisson rate must be positive, got {lam!r}")
    dist = stats.poisson(lam)
    return _truncate(dist.pmf, dist.sf, eps_mass, f"poisson({lam})", dist.logpmf)


def custom(weights: Sequence, *, exact: bool = False, eps_mass: float = DEFAULT_EPS_MASS, label: str = "custom") -> Pmf:
    vals = list(weights)
    if any(float(x) < 0 for x in vals):
        raise DomainError("custom weights must be non-negative")
    if float(sum(vals)) > 1 + max(eps_mass, 1e-15 * len(vals)):
        raise DomainError("custom weights sum to more than 1")
    if exact:
        arr = np.array([x if isinstance(x, Fraction) else Fraction(str(x)) for x in vals], dtype=object)
    else:
        arr = np.asarray([float(x) for x in vals], dtype=np.float64)
    return Pmf(arr, eps_mass=eps_mass, label=label)


_FAMILIES = {
    "binomial": binomial,
    "negbinomial": negbinomial,
    "geometric": geometric,
    "poisson": poisson,
    "custom": custom,
}


def make_pmf(family: str, *params, eps_mass: float = DEFAULT_EPS_MASS, **kwargs) -> Pmf:
    """Build a pmf by family name, e.g. ``make_pmf("binomial", 3, 0.3)``."""
    try:
        fn = _FAMILIES[family]
    except KeyError:
        raise DomainError(f"unknown distribution family {family!r}") from None
    if family == "binomial":
        return fn(*params, **kwargs)
    return fn(*params, eps_mass=eps_mass, **kwargs)


def load_custom_csv(path: str | os.PathLike, **kwargs) -> Pmf:
    """Read rows ``n,p_n`` (a non-numeric header row is skipped)."""
    pairs: dict[int, str] = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                n = int(row[0])
            except ValueError:
                continue
            pairs[n] = row[1].strip()
    if not pairs:
        raise DomainError(f"{path}: no n,p_n rows")
    if min(pairs) < 0:
        raise DomainError(f"{path}: negative atom")
    vals = ["0"] * (max(pairs) + 1)
    for n, p in pairs.items():
        vals[n] = p
    exact = kwargs.pop("exact", False)
    seq = [Fraction(v) for v in vals] if exact else [float(v) for v in vals]
    return custom(seq, exact=exact, label=f"custom({Path(path).name})", **kwargs)


def parse_dist(spec: str, *, eps_mass: float = DEFAULT_EPS_MASS, nb_convention: str | None = None) -> Pmf:
    """Parse ``family:args`` strings such as ``binomial:3,0.3`` or ``custom:@claims.csv``."""
    family, _, rest = spec.partition(":")
    family = family.strip().lower()
    if not rest:
        raise DomainError(f"distribution spec {spec!r} has no parameters")
    if family == "custom":
        if rest.startswith("@"):
            return load_custom_csv(rest[1:], eps_mass=eps_mass)
        return custom([float(x) for x in rest.split(",")], eps_mass=eps_mass)
    parts = [x.strip() for x in rest.split(",") if x.strip()]
    try:
        if family == "binomial" and len(parts) == 2:
            return binomial(int(parts[0]), float(parts[1]))
        if family == "negbinomial" and len(parts) in (2, 3):
            conv = parts[2] if len(parts) == 3 else (nb_convention or "a")
            return negbinomial(float(parts[0]), _number(parts[1]), conv, eps_mass=eps_mass)
        if family == "geometric" and len(parts) == 1:
            return geometric(_number(parts[0]), eps_mass=eps_mass)
        if family == "poisson" and len(parts) == 1:
            return poisson(_number(parts[0]), eps_mass=eps_mass)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"bad parameters in {spec!r}: {exc}") from None
    raise DomainError(f"cannot parse distribution spec {spec!r}")


def _number(text: str) -> float:
    if "/" in text:
        return float(Fraction(text))
    return float(text)


# ---------------------------------------------------------------------------
# convolution powers


@dataclass(frozen=True, eq=False)
class ConvTable:
    """Convolution powers ``powers[t, j] = P(S_t = j)`` for ``t <= t_max, j <= width``.

    Columns beyond ``width`` are not stored; every stored entry is exact with
    respect to the (possibly truncated) base pmf because column ``j`` of row
    ``t + 1`` only depends on columns ``<= j`` of row ``t``.
    """

    base: Pmf
    powers: np.ndarray
    t_max: int
    width: int

    @property
    def truncation_error(self) -> np.ndarray:
        """Upper bound on the mass lost per row from truncating the base pmf."""
        t = np.arange(self.t_max + 1)
        return 1.0 - (1.0 - self.base.tail_bound) ** t

    def row(self, t: int) -> np.ndarray:
        return self.powers[t]

    def entry(self, t: int, j: int):
        if t < 0 or t > self.t_max:
            raise DomainError(f"row {t} outside table with t_max={self.t_max}")
        if j < 0:
            return 0
        if j > self.width:
            if j > t * self.base.support_max:
                return 0
            raise DomainError(f"column {j} beyond table width {self.width}")
        return self.powers[t, j]

    def covers(self, t_max: int, width: int) -> bool:
        return self.t_max >= t_max and self.width >= width


_TABLE_CACHE: dict[str, ConvTable] = {}
_CACHE_VERSION = 1


def _disk_cache_path(pmf: Pmf, t_max: int, width: int) -> Path | None:
    root = os.environ.get("PARISIAN_CACHE_DIR")
    if not root or pmf.exact:
        return None
    return Path(root) / f"convtable-v{_CACHE_VERSION}-{pmf.fingerprint}-{t_max}-{width}.npy"


def conv_table(pmf: Pmf, t_max: int, width: int | None = None, *, max_cells: int = DEFAULT_MAX_CELLS) -> ConvTable:
    """Convolution powers of ``pmf`` up to ``t_max`` (cached per distribution).

    ``width`` caps the stored columns; the default stores full rows.
    """
    if t_max < 0:
        raise DomainError("t_max must be non-negative")
    full = t_max * pmf.support_max
    width = full if width is None else min(int(width), full)
    width = max(width, 0)
    cached = _TABLE_CACHE.get(pmf.fingerprint)
    if cached is not None and cached.covers(t_max, width):
        return cached
    if cached is not None:
        # grow to the union so repeated sweeps converge on one table
        t_max = max(t_max, cached.t_max)
        width = min(max(width, cached.width), t_max * pmf.support_max)
    cells = (t_max + 1) * (width + 1)
    if cells > max_cells:
        raise ResourceLimitError(f"convolution table {t_max + 1}x{width + 1} exceeds cap of {max_cells} cells")
    path = _disk_cache_path(pmf, t_max, width)
    powers = None
    if path is not None and path.exists():
        try:
            powers = np.load(path)
        except (OSError, ValueError):
            powers = None
    if powers is None:
        powers = _kernels.conv_powers(pmf.weights, t_max, width)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp.npy")
            np.save(tmp, powers)
            os.replace(tmp, path)
    powers.flags.writeable = False
    table = ConvTable(pmf, powers, t_max, width)
    _TABLE_CACHE[pmf.fingerprint] = table
    if len(_TABLE_CACHE) > 32:
        _TABLE_CACHE.pop(next(iter(_TABLE_CACHE)))
    return table


def clear_caches() -> None:
    _TABLE_CACHE.clear()


# ---------------------------------------------------------------------------
# exponent function and its roots


def _log_terms(pmf: Pmf, beta: float) -> np.ndarray:
    """``log p_n - beta n`` over enough atoms that the neglected terms are negligible."""
    w = pmf.float_weights()
    with np.errstate(divide="ignore"):
        terms = np.log(w) - beta * np.arange(w.size)
    if beta >= 0 or not pmf.unbounded:
        return terms
    if pmf.logpmf is None:
        # only the truncated weights are known; demand visible decay at the cut
        tail = terms[-3:]
        if tail.size == 3 and np.all(np.isfinite(tail)) and tail[-1] >= tail[-2] - 1e-12:
            raise DivergenceError(f"E exp({-beta:g} Y) diverges for {pmf.label}")
        return terms
    n = max(2 * w.size, 64)
    while True:
        k = np.arange(n)
        with np.errstate(divide="ignore"):
            terms = pmf.logpmf(k) - beta * k
        peak = terms.max()
        # the last stretch must be decreasing and far below the peak
        if terms[-1] < peak - 45 and terms[-1] < terms[-2]:
            return terms
        # a flat or rising second half means the terms never die out
        slope = (terms[-1] - terms[n // 2]) / (n - 1 - n // 2)
        if n >= 1024 and not slope < -1e-9:
            raise DivergenceError(f"E exp({-beta:g} Y) diverges for {pmf.label}")
        if n > 1 << 24:
            raise DivergenceError(f"E exp({-beta:g} Y) diverges for {pmf.label}")
        n *= 2


def _log_mgf_neg(pmf: Pmf, beta: float) -> float:
    """``log E exp(-beta Y)``; raises :class:`DivergenceError` when it does not exist."""
    return float(logsumexp(_log_terms(pmf, beta)))


def phi(pmf: Pmf, beta: float) -> float:
    """Log moment generating function of one surplus increment, ``beta + log E e^{-beta Y}``."""
    return beta + _log_mgf_neg(pmf, beta)


def phi_prime(pmf: Pmf, beta: float) -> float:
    """Analytic derivative ``1 - E[Y e^{-beta Y}] / E[e^{-beta Y}]``."""
    terms = _log_terms(pmf, beta)
    terms = terms - terms.max()
    e = np.exp(terms)
    return 1.0 - float(np.arange(e.size) @ e) / float(e.sum())


def phi_derivative(pmf: Pmf, beta: float, h: float = 1e-3) -> float:
    """Central-difference derivative with one Richardson step (error O(h^4))."""

    def central(step):
        return (phi(pmf, beta + step) - phi(pmf, beta - step)) / (2 * step)

    d1 = central(h)
    d2 = central(h / 2)
    value = (4 * d2 - d1) / 3
    if not math.isfinite(value):
        raise DivergenceError(f"derivative of phi at {beta:g} is not finite")
    return value


def cramer_root(pmf: Pmf, *, tol: float = TOL_ROOT, beta_cap: float = 700.0) -> float:
    """Positive root ``gamma`` of ``phi(-gamma) = 0``.

    Brackets by doubling, bisects to ``tol``, then polishes with two Newton
    steps. Raises :class:`NoRootError` when no positive root exists (mean
    claim >= 1, claims bounded by 1, or an exponential moment blowing up
    before a sign change).
    """
    mean = float(pmf.mean)
    if mean >= 1:
        raise NoRootError(f"mean claim {mean:.6g} >= 1: no positive Cramér root")
    if pmf.support_max <= 1:
        raise NoRootError(f"{pmf.label}: claims bounded by 1, phi(-beta) < 0 for all beta > 0")

    def g(b):
        return phi(pmf, -b)

    def g_safe(b):
        # past the radius of convergence phi(-b) is +inf, which still brackets
        try:
            return g(b)
        except DivergenceError:
            return math.inf

    lo, hi = 0.0, 1.0
    while (val := g_safe(hi)) <= 0:
        lo, hi = hi, hi * 2
        if hi > beta_cap:
            raise NoRootError(f"{pmf.label}: no sign change of phi(-beta) below {beta_cap:g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        v = g_safe(mid)
        if v < 0:
            lo = mid
        else:
            hi, val = mid, v
    if not math.isfinite(val):
        raise NoRootError(f"{pmf.label}: exponential moments blow up before a root near beta = {hi:.6g}")
    gamma = 0.5 * (lo + hi)
    for _ in range(2):
        slope = -phi_prime(pmf, -gamma)
        if slope > 0:
            step = g(gamma) / slope
            if abs(step) < 10 * tol:
                gamma -= step
    deriv = phi_derivative(pmf, -gamma, h=min(1e-3, gamma / 4))
    if not math.isfinite(deriv) or deriv >= 0:
        raise CramerConditionError(f"phi'(-gamma) = {deriv!r} is not a finite negative number")
    return gamma


def phi_inverse(pmf: Pmf, theta: float, *, tol: float = TOL_ROOT) -> float:
    """The ``beta >= 0`` with ``phi(beta) = theta`` on the increasing branch."""
    if theta < 0:
        raise DomainError(f"phi_inverse needs theta >= 0, got {theta!r}")
    if float(pmf.mean) >= 1:
        raise DomainError("phi is not increasing at 0 when the mean claim is >= 1")
    if theta == 0:
        return 0.0
    hi = max(1.0, theta)
    while phi(pmf, hi) < theta:
        hi *= 2
        if hi > 1e12:
            raise DomainError(f"theta={theta!r} outside the range of phi")
    lo = 0.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if phi(pmf, mid) < theta:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    for _ in range(2):
        slope = phi_prime(pmf, beta)
        step = (phi(pmf, beta) - theta) / slope
        if abs(step) < 10 * tol * max(1.0, beta):
            beta -= step
    return beta


def integrated_tail(pmf: Pmf, k_max: int) -> np.ndarray:
    """``1 - F_I(k)`` for ``k = 0..k_max`` where ``F_I(k) = (1/mu) sum_{l<=k} P(Y > l)``.

    Computed as the reversed sum ``(1/mu) sum_{l>k} P(Y > l)`` to avoid
    cancellation in the far tail.
    """
    mu = float(pmf.mean)
    if mu <= 0:
        raise DomainError("integrated tail needs a positive mean")
    if k_max < 0:
        raise DomainError("k_max must be non-negative")
    n = max(k_max + 2, pmf.support_max + 1)
    tail = pmf.sf(np.arange(n))
    if pmf.tail_bound:
        tail = np.where(np.arange(n) >= pmf.support_max, 0.0, tail)
    rev = np.cumsum(tail[::-1])[::-1]  # rev[k] = sum_{l>=k} tail[l]
    out = np.append(rev[1:], 0.0)[: k_max + 1] / mu
    return out
