"""Large-reserve asymptotics of classical and Parisian ruin.

Light tails (Cramér): ``e^{gamma u} P_u(tau < inf) -> C B`` with
``B = 1 - (1 - P_1(tau < inf)) f(zeta)``.

Heavy tails: for ``alpha = 0`` the delay has no first-order effect and
``P_u(tau < inf) ~ mu / (1 - mu) * Fbar_I(u)``; for ``alpha > 0``,
``P_u(tau < inf) ~ B K Fbar(u)`` with ``g`` replacing ``f`` in ``B``.

Most quantities go through the strict ascending ladder of the dual walk
``X_n = S_n - n`` (increments ``Y - 1``). Its height law ``h`` is computed by
a first-passage recursion and checked against identities that hold for any
claim law; see :class:`LadderLaw`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .classical import first_passage_cdf, kendall_table
from .dist import Pmf, RiskModel, cramer_root, phi, phi_derivative, phi_inverse
from .errors import DivergenceError, DomainError, NoRootError

__all__ = [
    "LadderLaw",
    "AsymptoticsReport",
    "ladder_law",
    "ladder_renewal",
    "cramer_C",
    "cramer_C_ladder",
    "deficit_D",
    "deficit_limit",
    "f_sequence",
    "cramer_parisian_limit",
    "heavy_K",
    "heavy_W_tail",
    "heavy_w",
    "g_sequence",
    "heavy_limits",
    "class_probe",
    "wiener_hopf_check",
    "defect_check",
    "kendall_transform_check",
    "f_transform_check",
    "g_transform_check",
    "toy_heavy_pmf",
]

LADDER_TOL = 1e-13


# ---------------------------------------------------------------------------
# ladder heights of the dual walk


@dataclass(frozen=True, eq=False)
class LadderLaw:
    """Law of the first strict ascending ladder height of ``X_n = S_n - n``.

    Attributes:
        masses: ``masses[l] = P(H_1 = l, L_1 < inf)`` for ``l >= 1``; ``masses[0] = 0``.
        defect: ``1 - sum(masses)``, the chance ``X`` never rises above 0.
        truncation_mass: bound on the mass misassigned by the finite level range.
        pmf: claim law the walk is built from.
        steps: recursion steps performed.
    """

    masses: np.ndarray
    defect: float
    truncation_mass: float
    pmf: Pmf
    steps: int = 0

    @property
    def l_max(self) -> int:
        return self.masses.size - 1

    def mgf(self, theta: float) -> float:
        """``E[e^{theta H_1}; L_1 < inf]``."""
        l = np.arange(self.masses.size)
        return float(self.masses @ np.exp(theta * l))

    def tail(self) -> np.ndarray:
        """``out[x] = P(H_1 >= x, L_1 < inf)`` for ``x = 0..l_max + 1``."""
        rev = np.cumsum(self.masses[::-1])[::-1]
        return np.append(rev, 0.0)

    def closed_form(self) -> np.ndarray:
        """``P(Y > l) / p_0`` for ``l >= 1``: the height law of a downward skip-free walk."""
        p0 = float(self.pmf.p0)
        out = self.pmf.sf(np.arange(self.masses.size)) / p0
        out[0] = 0.0
        return out


def ladder_law(pmf: Pmf, l_max: int | None = None, *, tol_mass: float = LADDER_TOL, depth: int | None = None,
               max_steps: int = 2_000_000, check: bool = True, method: str = "dp") -> LadderLaw:
    """Ladder heights of ``S_n - n``.

    ``method="dp"`` runs a first-passage recursion: mass is tracked on levels
    ``-depth..0`` until what remains is below ``tol_mass``; mass pushed below
    ``-depth`` is counted as never returning, which is wrong by at most
    ``exp(-gamma (depth + 1))``. The depth grows like ``1/gamma``, so laws with
    a tiny Cramér root (heavy tails) should use ``method="closed"``, the
    skip-free formula ``P(Y > l) / p_0``.
    """
    if method not in ("dp", "closed"):
        raise DomainError(f"unknown ladder method {method!r}")
    pmf = pmf.as_float()
    mu = float(pmf.mean)
    if mu >= 1:
        raise DomainError(f"ladder law needs mean claim < 1, got {mu:.6g}")
    pmf = _tilt_extend(pmf, tol_mass)
    mu = float(pmf.mean)
    p0 = float(pmf.p0)
    if p0 <= 0:
        raise DomainError("ladder law needs P(Y = 0) > 0")
    m = pmf.support_max
    if m <= 1:
        h = np.zeros(max(m, 1) if l_max is None else l_max + 1)
        return LadderLaw(h, 1.0, 0.0, pmf, 0)
    if method == "closed":
        h = pmf.sf(np.arange(m)) / p0
        h[0] = 0.0
        trunc = float(pmf.tail_bound) / p0
        if l_max is not None:
            out = np.zeros(l_max + 1)
            n = min(l_max + 1, h.size)
            out[:n] = h[:n]
            trunc += float(h[n:].sum())
            h = out
        return LadderLaw(h, 1.0 - float(h.sum()), trunc, pmf, 0)
    try:
        gamma = cramer_root(pmf)
    except NoRootError:
        gamma = None
    if depth is None:
        if gamma is None:
            depth = 20_000
        else:
            depth = int(math.ceil(math.log(1.0 / tol_mass) / gamma)) + m
    h, escaped, remaining, steps = _kernels.ladder_dp(pmf.weights, int(depth), tol_mass, max_steps)
    return_bound = math.exp(-gamma * (depth + 1)) if gamma is not None else float("nan")
    trunc = remaining + (escaped * return_bound if gamma is not None else escaped)
    h = np.asarray(h, dtype=np.float64)
    if l_max is not None:
        out = np.zeros(l_max + 1)
        n = min(l_max + 1, h.size)
        out[:n] = h[:n]
        trunc += float(h[n:].sum())
        h = out
    defect = 1.0 - float(h.sum())
    law = LadderLaw(h, defect, float(trunc), pmf, int(steps))
    if check:
        if not trunc <= 1e-9:
            raise DomainError(f"ladder recursion left truncation mass {trunc:.3g}")
        gap = abs(defect - (1 - mu) / p0)
        if gap > 1e-9:
            raise DomainError(f"ladder defect {defect!r} differs from (1 - mu)/p0 by {gap:.3g}")
    return law


def _tilt_extend(pmf: Pmf, tol_mass: float, n_cap: int = 1_000_000) -> Pmf:
    """Lengthen a truncated infinite-support law until ``p_n e^{gamma n}`` is negligible.

    Transforms up to the Cramér root weight the far tail by ``e^{gamma n}``, so the
    truncation used for convolutions is too short for ladder quantities.
    """
    if not pmf.unbounded or pmf.logpmf is None:
        return pmf
    try:
        gamma = cramer_root(pmf)
    except NoRootError:
        return pmf
    target = math.log(tol_mass) - 6
    n = pmf.weights.size
    while n < n_cap:
        k = np.arange(n, 2 * n)
        lt = pmf.logpmf(k) + gamma * k
        ok = np.flatnonzero((lt < target) & (np.diff(lt, append=lt[-1] - 1) < 0))
        if ok.size:
            n = int(k[ok[0]]) + 1
            break
        n *= 2
    if n <= pmf.weights.size:
        return pmf
    w = np.exp(pmf.logpmf(np.arange(n)))
    return Pmf(w, tail_bound=max(0.0, 1 - float(w.sum())), eps_mass=pmf.eps_mass, unbounded=True,
               label=pmf.label, logpmf=pmf.logpmf)


def ladder_renewal(law: LadderLaw, u_max: int, z_max: int):
    """Classical ruin from the ladder renewal measure.

    Returns ``(psi, joint)`` with ``psi[u] = P_u(T_0 < inf)`` for
    ``u = 0..u_max`` (``u = 0`` means ``X_n >= 0`` for some ``n >= 1``, which is
    not a ladder event; ``psi[0]`` is left as nan) and
    ``joint[u, z] = P_u(T_0 < inf, -R_{T_0} = z)``.
    """
    h = law.masses
    L = law.l_max
    U = np.zeros(u_max + 1)
    U[0] = 1.0
    for v in range(1, u_max + 1):
        ls = np.arange(1, min(v, L) + 1)
        if ls.size:
            U[v] = h[ls] @ U[v - ls]
    tail = np.zeros(u_max + 2)
    ht = law.tail()
    n = min(ht.size, u_max + 2)
    tail[:n] = ht[:n]
    hz = np.zeros(u_max + z_max + 2)
    n = min(h.size, hz.size)
    hz[:n] = h[:n]
    psi = np.full(u_max + 1, np.nan)
    joint = np.zeros((u_max + 1, z_max + 1))
    zs = np.arange(z_max + 1)
    for u in range(1, u_max + 1):
        v = np.arange(u)
        psi[u] = U[:u] @ tail[u - v]
        joint[u] = U[:u] @ hz[(u - v)[:, None] + zs[None, :]]
    return psi, joint


# ---------------------------------------------------------------------------
# Cramér regime


def cramer_C(pmf: Pmf) -> float:
    """``C = (1 - mu) / (-phi'(-gamma))`` with a Richardson-extrapolated derivative."""
    gamma = cramer_root(pmf)
    deriv = phi_derivative(pmf, -gamma, h=min(1e-3, gamma / 4))
    return (1 - float(pmf.mean)) / (-deriv)


def cramer_C_ladder(law: LadderLaw, gamma: float | None = None) -> float:
    """``C`` from the ladder heights: ``defect / ((1 - e^{-gamma}) E[H e^{gamma H}; L < inf])``."""
    if gamma is None:
        gamma = cramer_root(law.pmf)
    l = np.arange(law.masses.size)
    moment = float(law.masses @ (l * np.exp(gamma * l)))
    return law.defect / ((1 - math.exp(-gamma)) * moment)


def deficit_D(pmf: Pmf, theta: float, gamma: float | None = None) -> float:
    """Limit transform ``sum_z pi(z) e^{-theta z}`` of the conditional deficit law.

    ``(1 - e^{phi(theta)}) (1 - e^{-gamma}) / ((1 - mu)(1 - e^{theta})(1 - e^{-(gamma + theta)}))``,
    continued by its limit ``1`` at ``theta = 0``.
    """
    if gamma is None:
        gamma = cramer_root(pmf)
    mu = float(pmf.mean)
    if abs(theta) < 1e-9:
        return 1.0
    if theta <= -gamma:
        raise DomainError(f"D(theta) needs theta > -gamma = {-gamma:g}")
    num = -math.expm1(phi(pmf, theta)) * -math.expm1(-gamma)
    den = (1 - mu) * -math.expm1(theta) * -math.expm1(-(gamma + theta))
    return num / den


def deficit_D_literal(pmf: Pmf, theta: float, gamma: float | None = None) -> float:
    """The same expression with ``phi(-theta)`` and ``1 - e^{-theta}`` (kept for comparison)."""
    if gamma is None:
        gamma = cramer_root(pmf)
    mu = float(pmf.mean)
    num = -math.expm1(phi(pmf, -theta)) * -math.expm1(-gamma)
    den = (1 - mu) * -math.expm1(-theta) * -math.expm1(-(gamma + theta))
    return num / den


def _conditional_deficit(law: LadderLaw, u: int, z_max: int) -> np.ndarray:
    psi, joint = ladder_renewal(law, u, z_max)
    return joint[u] / psi[u]


def deficit_limit(pmf: Pmf, z_max: int | None = None, tol: float = 1e-9, u_max: int = 512,
                  law: LadderLaw | None = None) -> np.ndarray:
    """``pi(z) = lim_u P_u(-R_{T_0} = z | T_0 < inf)`` for ``z <= z_max``.

    The conditional law is evaluated at ``u = 8, 16, ...`` until the sup-norm
    change drops below ``tol``; :class:`DivergenceError` if ``u_max`` is hit.
    """
    law = law or ladder_law(pmf)
    if z_max is None:
        z_max = max(law.l_max - 1, 0)
    u = 8
    prev = _conditional_deficit(law, u, z_max)
    while True:
        u *= 2
        if u > u_max:
            raise DivergenceError(f"conditional deficit law not settled by u = {u_max}")
        cur = _conditional_deficit(law, u, z_max)
        if np.max(np.abs(cur - prev)) < tol:
            return cur
        prev = cur


def f_sequence(pmf: Pmf, k_max: int, pi: np.ndarray | None = None) -> np.ndarray:
    """``f(k) = sum_z pi(z) P(tau_{z+1} <= k)`` for ``k = 0..k_max``."""
    if pi is None:
        pi = deficit_limit(pmf)
    return _mix_first_passage(pmf, pi, k_max)


def _mix_first_passage(pmf: Pmf, weights: np.ndarray, k_max: int) -> np.ndarray:
    zs = min(weights.size, k_max)
    if zs == 0:
        return np.zeros(k_max + 1)
    K = kendall_table(pmf.as_float(), zs, k_max)
    cdf = np.cumsum(K, axis=1)  # cdf[x, k] = P(tau_x <= k)
    return weights[:zs] @ cdf[1 : zs + 1]


@dataclass
class AsymptoticsReport:
    """Constants and a convergence table for one asymptotic regime.

    ``diagnostics`` rows hold ``u``, the exact quantity, the scaled ratio and
    its relative gap to the prefactor.
    """

    regime: str
    gamma_or_alpha: float
    prefactor: float
    components: dict
    diagnostics: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json_lines(self) -> str:
        head = {k: v for k, v in asdict(self).items() if k != "diagnostics"}
        lines = [json.dumps({"kind": "report", **_jsonable(head)}, sort_keys=True)]
        for row in self.diagnostics:
            lines.append(json.dumps({"kind": "diagnostic", **_jsonable(row)}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerow(["regime", self.regime])
        w.writerow(["gamma_or_alpha", repr(self.gamma_or_alpha)])
        w.writerow(["prefactor", repr(self.prefactor)])
        for k, v in self.components.items():
            if np.ndim(v) == 0:
                w.writerow([k, repr(float(v)) if isinstance(v, (float, np.floating)) else v])
        for note in self.notes:
            w.writerow(["note", note])
        if self.diagnostics:
            keys = list(self.diagnostics[0])
            w.writerow([])
            w.writerow(keys)
            for row in self.diagnostics:
                w.writerow([repr(row[k]) if isinstance(row[k], float) else row[k] for k in keys])
        return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _parisian_ladder(law: LadderLaw, zeta: int, u_grid, p1: float | None = None):
    """Parisian ruin via the ladder route for each ``u`` in the grid; returns (values, psi, p1)."""
    u_top = max(max(u_grid), 1)
    psi, joint = ladder_renewal(law, u_top, zeta - 1)
    rec = first_passage_cdf(law.pmf, zeta, zeta)[1 : zeta + 1]
    E = joint @ rec
    if p1 is None:
        p1 = (psi[1] - E[1]) / (1 - E[1])
    vals = np.array([psi[u] - (1 - p1) * E[u] for u in u_grid])
    return vals, psi, p1


def cramer_parisian_limit(model: RiskModel, u_grid=(5, 10, 20, 40), method: str = "ladder",
                          tol: float = 1e-10) -> AsymptoticsReport:
    """Cramér limit ``C B`` of ``e^{gamma u} P_u(tau < inf)`` and its convergence table.

    ``method="series"`` evaluates each grid point from convolution sums,
    ``"ladder"`` from the ladder renewal measure (much faster at large u).
    """
    model.require_net_profit()
    pmf = model.claims.as_float()
    gamma = cramer_root(pmf)
    C = cramer_C(pmf)
    law = ladder_law(pmf)
    C_lad = cramer_C_ladder(law, gamma)
    pi = deficit_limit(pmf, law=law)
    zeta = model.zeta
    f_z = float(_mix_first_passage(pmf, pi, zeta)[zeta])
    if method == "ladder":
        vals, psi, p1 = _parisian_ladder(law, zeta, u_grid)
        classical = [psi[u] for u in u_grid]
    elif method == "series":
        from .parisian import parisian_infinite_components

        comps = [parisian_infinite_components(RiskModel(pmf, u, zeta), tol) for u in u_grid]
        vals = [c.value for c in comps]
        classical = [c.classical for c in comps]
        p1 = comps[0].p1
    else:
        raise DomainError(f"unknown method {method!r}")
    B = 1 - (1 - p1) * f_z
    pref = C * B
    diag = []
    for u, v, c in zip(u_grid, vals, classical):
        scaled = math.exp(gamma * u) * float(v)
        diag.append({
            "u": int(u),
            "parisian_ruin": float(v),
            "scaled": scaled,
            "rel_gap": abs(scaled / pref - 1),
            "classical_scaled": math.exp(gamma * u) * float(c),
            "classical_rel_gap": abs(math.exp(gamma * u) * float(c) / C - 1),
        })
    comps = {"C": C, "C_ladder": C_lad, "f_zeta": f_z, "B": B, "P1_parisian": float(p1), "zeta": zeta,
             "pi": pi.tolist(), "D_samples": {str(th): deficit_D(pmf, th, gamma) for th in (0.1, 0.5, 1.0)}}
    return AsymptoticsReport("cramer", gamma, pref, comps, diag, [f"method={method}"])


# ---------------------------------------------------------------------------
# heavy tails


def _phi_neg_alpha(pmf: Pmf, alpha: float) -> float:
    try:
        return phi(pmf, -alpha)
    except DivergenceError as exc:
        raise DomainError(f"E exp({alpha:g} Y) is infinite: {exc}") from None


def heavy_K(pmf: Pmf, alpha: float) -> float:
    """``K = (1 - mu)(1 - e^{-alpha}) / (1 - e^{phi(-alpha)})^2``; needs ``phi(-alpha) < 0``."""
    if alpha <= 0:
        raise DomainError("K is defined for alpha > 0")
    e = _phi_neg_alpha(pmf, alpha)
    if e >= 0:
        raise DomainError(f"phi(-alpha) = {e:.6g} >= 0: no heavy-tail constant at this alpha")
    return (1 - float(pmf.mean)) * -math.expm1(-alpha) / math.expm1(e) ** 2


def heavy_W_tail(law: LadderLaw, alpha: float, k_max: int) -> np.ndarray:
    """``Wbar(k)`` for ``k = 0..k_max``: limiting ``P(-R_{T_0} >= k | T_0 < inf)`` when ``alpha > 0``.

    ``e^{-alpha k} [(1 - E[e^{alpha H}; L < inf]) + sum_{l > k} (e^{alpha l} - e^{alpha k}) h(l)] / defect``,
    which equals 1 at ``k = 0``.
    """
    if alpha <= 0:
        raise DomainError("W is defined for alpha > 0")
    pmf = law.pmf
    p0 = float(pmf.p0)
    e = _phi_neg_alpha(pmf, alpha)
    # 1 - E[e^{alpha H}; L < inf] in closed form
    one_minus_mgf = -math.expm1(e) / (p0 * -math.expm1(-alpha))
    h = law.masses
    l = np.arange(h.size)
    eh = h * np.exp(alpha * (l - l.max()))  # scaled to avoid overflow
    scale = math.exp(alpha * l.max())
    out = np.empty(k_max + 1)
    for k in range(k_max + 1):
        if k + 1 < h.size:
            s1 = float(eh[k + 1 :].sum()) * scale
            s2 = float(h[k + 1 :].sum())
        else:
            s1 = s2 = 0.0
        out[k] = math.exp(-alpha * k) * (one_minus_mgf + s1) / law.defect - s2 / law.defect
    return out


def heavy_W_tail_literal(law: LadderLaw, alpha: float, k_max: int) -> np.ndarray:
    """``e^{-alpha k}/(1 - mu) [-vphi(-alpha)/alpha + sum_{l>k}(e^{alpha l} - e^{alpha k}) h(l)]``

    with ``vphi(a) = e^{-a} E e^{aY} - 1``, evaluated as written (comparison only).
    """
    pmf = law.pmf
    mu = float(pmf.mean)
    w = pmf.float_weights()
    vphi = math.exp(alpha) * float(w @ np.exp(-alpha * np.arange(w.size))) - 1
    h = law.masses
    l = np.arange(h.size)
    out = np.empty(k_max + 1)
    for k in range(k_max + 1):
        s = float(((np.exp(alpha * l) - math.exp(alpha * k)) * h)[k + 1 :].sum())
        out[k] = math.exp(-alpha * k) / (1 - mu) * (-vphi / alpha + s)
    return out


def heavy_w(Wbar: np.ndarray, beta: float) -> float:
    """``sum_{k >= 1} e^{-beta (k - 1)} (Wbar(k - 1) - Wbar(k))`` over the stored range."""
    masses = Wbar[:-1] - Wbar[1:]
    return float(masses @ np.exp(-beta * np.arange(masses.size)))


def g_sequence(pmf: Pmf, Wbar: np.ndarray, k_max: int) -> np.ndarray:
    """``g(k) = sum_z (Wbar(z) - Wbar(z + 1)) P(tau_{z+1} <= k)``."""
    masses = Wbar[:-1] - Wbar[1:]
    return _mix_first_passage(pmf, masses, k_max)


def class_probe(pmf: Pmf, alpha: float, grid=None) -> list:
    """Finite-grid probe of the class conditions (sanity report only, never a proof).

    Rows: ``u``, ``Fbar(u-1)/Fbar(u)`` (tends to ``e^alpha``) and
    ``Fbar2(u)/Fbar(u)`` (tends to ``2 E e^{alpha Y}``).
    """
    w = pmf.float_weights()
    n = w.size
    if grid is None:
        grid = [g for g in (5, 10, 20, 40, 80, 160) if g < n // 2] or [max(1, n // 4)]
    sf = pmf.sf(np.arange(2 * n))
    w2 = np.convolve(w, w)
    sf2 = np.append(np.cumsum(w2[::-1])[::-1][1:], 0.0)
    rows = []
    for u in grid:
        rows.append({
            "u": int(u),
            "ratio_L": float(sf[u - 1] / sf[u]) if sf[u] > 0 else float("inf"),
            "ratio_S": float(sf2[u] / sf[u]) if sf[u] > 0 else float("inf"),
        })
    mgf = math.exp(phi(pmf, -alpha) + alpha) if alpha > 0 else 1.0
    return [{"target_L": math.exp(alpha), "target_S": 2 * mgf}] + rows


def heavy_limits(model: RiskModel, alpha: float, u_grid=(10, 20, 40, 80), tol: float = 1e-10,
                 k_max: int | None = None) -> AsymptoticsReport:
    """Constants of the heavy-tailed regime. Class membership is asserted by the caller.

    ``alpha == 0``: ``B = 1``, prefactor ``mu / (1 - mu)`` against ``Fbar_I(u)``.
    ``alpha > 0``: ``K``, ``Wbar``, ``g(zeta)`` and ``B = 1 - (1 - P_1) g(zeta)``;
    the prefactor is ``B K`` against ``Fbar(u)``.
    """
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha!r}")
    model.require_net_profit()
    pmf = model.claims.as_float()
    mu = float(pmf.mean)
    zeta = model.zeta
    law = ladder_law(pmf, check=False, method="closed")
    diag = []
    if alpha == 0:
        from .dist import integrated_tail

        pref = mu / (1 - mu)
        umax = max(u_grid)
        vals, psi, p1 = _parisian_ladder(law, zeta, u_grid)
        tail_i = integrated_tail(pmf, umax)
        for u, v in zip(u_grid, vals):
            base = float(tail_i[u])
            diag.append({"u": int(u), "tail": base, "classical_ratio": float(psi[u]) / base if base else math.inf,
                         "parisian_ratio": float(v) / base if base else math.inf})
        comps = {"B": 1.0, "mu": mu, "P1_parisian": float(p1), "zeta": zeta, "ladder_defect": law.defect}
        return AsymptoticsReport("subexp_alpha0", 0.0, pref, comps, diag,
                                 ["delay has no first-order effect: B = 1"])
    K = heavy_K(pmf, alpha)
    k_max = k_max if k_max is not None else max(law.l_max + 1, zeta + 1)
    Wbar = heavy_W_tail(law, alpha, k_max)
    g = g_sequence(pmf, Wbar, zeta)
    g_z = float(g[zeta])
    vals, psi, p1 = _parisian_ladder(law, zeta, u_grid)
    B = 1 - (1 - p1) * g_z
    pref = B * K
    sf = pmf.sf(np.arange(max(u_grid) + 1))
    for u, v in zip(u_grid, vals):
        base = float(sf[u])
        diag.append({"u": int(u), "tail": base, "classical_ratio": float(psi[u]) / base,
                     "parisian_ratio": float(v) / base,
                     "classical_rel_gap": abs(float(psi[u]) / base / K - 1),
                     "parisian_rel_gap": abs(float(v) / base / pref - 1)})
    comps = {"K": K, "B": B, "g_zeta": g_z, "P1_parisian": float(p1), "zeta": zeta,
             "W_mass": float(Wbar[0] - Wbar[-1]), "W_defect": float(Wbar[-1]),
             "Wbar_head": Wbar[: min(Wbar.size, 8)].tolist(), "class_probe": class_probe(pmf, alpha)}
    return AsymptoticsReport("subexp_alpha_pos", alpha, pref, comps, diag)


def toy_heavy_pmf(alpha: float = 0.2, n_max: int = 400, power: float = 3.0) -> Pmf:
    """``p_n`` proportional to ``e^{-alpha n} (n + 1)^{-power}`` on ``0..n_max``."""
    from .dist import custom

    n = np.arange(n_max + 1, dtype=float)
    w = np.exp(-alpha * n) * (n + 1) ** (-power)
    w /= w.sum()
    return custom(w, label=f"toy_heavy(alpha={alpha}, n_max={n_max}, power={power})")


# ---------------------------------------------------------------------------
# validators


def wiener_hopf_check(law: LadderLaw, thetas) -> list:
    """Compare ``1 - E[e^{-theta H}; L < inf]`` with ``(1 - e^{phi(theta)}) / ((1 - e^{theta}) p_0)``.

    Meant for ``theta < 0``; for finite support both sides are analytic in theta.
    """
    rows = []
    p0 = float(law.pmf.p0)
    for th in thetas:
        lhs = 1 - law.mgf(-th)
        rhs = -math.expm1(phi(law.pmf, th)) / (p0 * -math.expm1(th))
        rows.append({"theta": th, "lhs": lhs, "rhs": rhs, "abs_diff": abs(lhs - rhs)})
    return rows


def wiener_hopf_literal(law: LadderLaw, thetas) -> list:
    """``1 - E[e^{theta H}; L < inf]`` against the same right-hand side (comparison only)."""
    rows = []
    p0 = float(law.pmf.p0)
    for th in thetas:
        lhs = 1 - law.mgf(th)
        rhs = -math.expm1(phi(law.pmf, th)) / (p0 * -math.expm1(th))
        rows.append({"theta": th, "lhs": lhs, "rhs": rhs, "abs_diff": abs(lhs - rhs)})
    return rows


def defect_check(law: LadderLaw) -> float:
    """``|defect - (1 - mu) / p_0|``."""
    return abs(law.defect - (1 - float(law.pmf.mean)) / float(law.pmf.p0))


def _transform_horizon(theta: float, eps: float = 1e-16) -> int:
    return int(math.ceil(math.log(1 / eps) / theta)) + 1


def kendall_transform_check(pmf: Pmf, z: int, theta: float) -> dict:
    """``sum_k e^{-k theta} P(tau_{z+1} <= k)`` against ``e^{-Phi(theta)(z+1)} / (1 - e^{-theta})``."""
    k_max = _transform_horizon(theta)
    K = kendall_table(pmf.as_float(), z + 1, k_max)
    cdf = np.cumsum(K[z + 1])
    weights = np.exp(-theta * np.arange(k_max + 1))
    lhs = float(weights @ cdf) + math.exp(-theta * (k_max + 1)) / -math.expm1(-theta)
    rhs = math.exp(-phi_inverse(pmf, theta) * (z + 1)) / -math.expm1(-theta)
    return {"z": z, "theta": theta, "lhs": lhs, "rhs": rhs, "abs_diff": abs(lhs - rhs)}


def _seq_transform(seq: np.ndarray, limit: float, theta: float) -> float:
    k = np.arange(seq.size)
    return float(np.exp(-theta * k) @ seq) + limit * math.exp(-theta * seq.size) / -math.expm1(-theta)


def f_transform_check(pmf: Pmf, theta: float, pi: np.ndarray | None = None) -> dict:
    """``sum_k e^{-k theta} f(k)`` against ``e^{-Phi(theta)} D(Phi(theta)) / (1 - e^{-theta})``."""
    gamma = cramer_root(pmf)
    if pi is None:
        pi = deficit_limit(pmf)
    k_max = _transform_horizon(theta)
    f = f_sequence(pmf, k_max, pi)
    lhs = _seq_transform(f, float(pi.sum()), theta)
    beta = phi_inverse(pmf, theta)
    rhs = math.exp(-beta) / -math.expm1(-theta) * deficit_D(pmf, beta, gamma)
    return {"theta": theta, "lhs": lhs, "rhs": rhs, "abs_diff": abs(lhs - rhs)}


def g_transform_check(pmf: Pmf, Wbar: np.ndarray, theta: float) -> dict:
    """``sum_k e^{-k theta} g(k)`` against ``e^{-Phi(theta)} w(Phi(theta)) / (1 - e^{-theta})``."""
    k_max = _transform_horizon(theta)
    g = g_sequence(pmf, Wbar, k_max)
    mass = float(Wbar[0] - Wbar[-1])
    lhs = _seq_transform(g, mass, theta)
    beta = phi_inverse(pmf, theta)
    rhs = math.exp(-beta) / -math.expm1(-theta) * heavy_w(Wbar, beta)
    return {"theta": theta, "lhs": lhs, "rhs": rhs, "abs_diff": abs(lhs - rhs)}
