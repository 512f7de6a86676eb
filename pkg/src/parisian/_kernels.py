"""Hot inner loops, each as a compiled ``*_jit`` / plain-numpy ``*_np`` pair.

The public wrappers at the bottom pick the compiled version for float64 input
unless ``PARISIAN_JIT=0``; object (rational) input always takes the numpy path.
Both versions of a kernel must agree to rounding, and the Monte Carlo pair is
bit-identical by construction (same counter-based generator).

Index conventions used throughout:

* ``P[t, j]`` is the t-fold convolution power of the claim pmf at ``j``.
* ``base[y]`` is the claim pmf, ``M = len(base) - 1`` its largest atom.
"""

from __future__ import annotations

import numpy as np

from ._jit import njit, prange, use_jit

# ---------------------------------------------------------------------------
# convolution powers


@njit
def _conv_powers_jit(base, t_max, width):
    m = base.shape[0] - 1
    out = np.zeros((t_max + 1, width + 1))
    out[0, 0] = 1.0
    for t in range(1, t_max + 1):
        prev_hi = min(width, (t - 1) * m)
        hi = min(width, t * m)
        for j in range(hi + 1):
            s = 0.0
            c = 0.0
            for i in range(max(0, j - prev_hi), min(m, j) + 1):
                x = base[i] * out[t - 1, j - i]
                tt = s + x
                if abs(s) >= abs(x):
                    c += (s - tt) + x
                else:
                    c += (x - tt) + s
                s = tt
            out[t, j] = s + c
    return out


def _conv_powers_np(base, t_max, width):
    m = base.shape[0] - 1
    exact = base.dtype == object
    out = np.zeros((t_max + 1, width + 1), dtype=base.dtype)
    out[0, 0] = 1
    for t in range(1, t_max + 1):
        prev_hi = min(width, (t - 1) * m)
        hi = min(width, t * m)
        prev = out[t - 1, : prev_hi + 1]
        s = np.zeros(hi + 1, dtype=base.dtype)
        c = None if exact else np.zeros(hi + 1)
        for i in range(min(m, hi) + 1):
            n = min(prev_hi + 1, hi + 1 - i)
            x = np.zeros(hi + 1, dtype=base.dtype)
            x[i : i + n] = base[i] * prev[:n]
            if exact:
                s = s + x
            else:
                tt = s + x
                c += np.where(np.abs(s) >= np.abs(x), (s - tt) + x, (x - tt) + s)
                s = tt
        out[t, : hi + 1] = s if exact else s + c
    return out


def conv_powers(base: np.ndarray, t_max: int, width: int) -> np.ndarray:
    if use_jit(base):
        return _conv_powers_jit(base, t_max, width)
    return _conv_powers_np(base, t_max, width)


# ---------------------------------------------------------------------------
# Seal-type survival series


@njit
def _ballot_sums_jit(P, r_max):
    # I[r] = sum_{i<r} (r - i)/r * P[r, i]
    out = np.zeros(r_max + 1)
    for r in range(1, r_max + 1):
        s = 0.0
        c = 0.0
        for i in range(min(r - 1, P.shape[1] - 1) + 1):
            x = (r - i) * P[r, i]
            tt = s + x
            if abs(s) >= abs(x):
                c += (s - tt) + x
            else:
                c += (x - tt) + s
            s = tt
        out[r] = (s + c) / r
    return out


def _ballot_sums_np(P, r_max):
    out = np.zeros(r_max + 1, dtype=P.dtype)
    for r in range(1, r_max + 1):
        k = min(r - 1, P.shape[1] - 1) + 1
        out[r] = (np.arange(r, r - k, -1) * P[r, :k]).sum() / r
    return out


@njit
def _seal_series_jit(P, ballot, u, t_max):
    surv = np.ones(t_max + 1)
    diag = np.zeros(t_max + 1)
    for k in range(1, t_max + 1):
        diag[k] = P[k, u + k]
    for t in range(1, t_max + 1):
        s = 0.0
        c = 0.0
        for j in range(min(u + t - 1, P.shape[1] - 1) + 1):
            x = P[t, j]
            tt = s + x
            if abs(s) >= abs(x):
                c += (s - tt) + x
            else:
                c += (x - tt) + s
            s = tt
        for k in range(1, t):
            x = -diag[k] * ballot[t - k]
            tt = s + x
            if abs(s) >= abs(x):
                c += (s - tt) + x
            else:
                c += (x - tt) + s
            s = tt
        surv[t] = s + c
    return surv


def _seal_series_np(P, ballot, u, t_max):
    surv = np.zeros(t_max + 1, dtype=P.dtype)
    surv[0] = 1
    ks = np.arange(1, t_max + 1)
    diag = np.zeros(t_max + 1, dtype=P.dtype)
    diag[1:] = P[ks, u + ks]
    for t in range(1, t_max + 1):
        head = P[t, : min(u + t, P.shape[1])].sum()
        corr = (diag[1:t] * ballot[t - 1 : 0 : -1]).sum() if t > 1 else 0
        surv[t] = head - corr
    return surv


def seal_series(P: np.ndarray, u: int, t_max: int) -> np.ndarray:
    if use_jit(P):
        ballot = _ballot_sums_jit(P, t_max)
        return _seal_series_jit(P, ballot, u, t_max)
    ballot = _ballot_sums_np(P, t_max)
    return _seal_series_np(P, ballot, u, t_max)


# ---------------------------------------------------------------------------
# joint law of ruin time and deficit, convolution-only expression


@njit
def _deficit_fill_jit(P, base, u, s_max, z_max):
    m = base.shape[0] - 1
    q = np.zeros((s_max + 1, z_max + 1))
    if s_max >= 1:
        for z in range(z_max + 1):
            if u + 1 + z <= m:
                q[1, z] = base[u + 1 + z]
    for s in range(2, s_max + 1):
        lo = max(0, u + s - m)
        for n in range(lo, u + s - 1):
            killed = P[s - 1, n]
            if n > u:
                d = s - 1 + u - n
                acc = 0.0
                c = 0.0
                for k in range(1, n - u + 1):
                    r = s - 1 - k
                    x = d / r * P[r, r - d] * P[k, u + k]
                    tt = acc + x
                    if abs(acc) >= abs(x):
                        c += (acc - tt) + x
                    else:
                        c += (x - tt) + acc
                    acc = tt
                killed -= acc + c
            gap = u + s - n
            for z in range(min(z_max, m - gap) + 1):
                q[s, z] += killed * base[gap + z]
    return q


def _deficit_fill_np(P, base, u, s_max, z_max):
    m = base.shape[0] - 1
    q = np.zeros((s_max + 1, z_max + 1), dtype=P.dtype)
    if s_max >= 1:
        top = min(z_max, m - u - 1)
        if top >= 0:
            q[1, : top + 1] = base[u + 1 : u + 2 + top]
    for s in range(2, s_max + 1):
        lo = max(0, u + s - m)
        for n in range(lo, u + s - 1):
            killed = P[s - 1, n]
            if n > u:
                d = s - 1 + u - n
                ks = np.arange(1, n - u + 1)
                r = s - 1 - ks
                killed = killed - (d * P[r, r - d] * P[ks, u + ks] / r).sum()
            gap = u + s - n
            top = min(z_max, m - gap)
            if top >= 0:
                q[s, : top + 1] += killed * base[gap : gap + top + 1]
    return q


def deficit_fill(P: np.ndarray, base: np.ndarray, u: int, s_max: int, z_max: int) -> np.ndarray:
    if use_jit(P, base):
        return _deficit_fill_jit(P, base, u, s_max, z_max)
    return _deficit_fill_np(P, base, u, s_max, z_max)


# ---------------------------------------------------------------------------
# Parisian recursion


@njit
def _parisian_tail_jit(seal, A, b, zeta, t):
    acc = seal[t - zeta - 1]
    for s in range(1, t - zeta):
        for w in range(1, zeta + 1):
            a = A[s, w]
            if a != 0.0:
                acc += a * b[t - w - s]
    return acc


@njit
def _parisian_base_jit(seal1, A1, zeta, horizon, init):
    b = np.full(horizon + 1, init)
    for k in range(zeta + 2, horizon + 1):
        b[k] = _parisian_tail_jit(seal1, A1, b, zeta, k)
    return b


def _parisian_tail_np(seal, A, b, zeta, t):
    acc = seal[t - zeta - 1]
    n = t - zeta - 1
    for w in range(1, zeta + 1):
        # b index t - w - s for s = 1..n; smallest index is t - w - n >= 1
        idx = t - w - np.arange(1, n + 1)
        assert idx.size == 0 or idx[-1] >= 1
        acc = acc + (A[1 : n + 1, w] * b[idx]).sum()
    return acc


def _parisian_base_np(seal1, A1, zeta, horizon, init):
    b = np.full(horizon + 1, init, dtype=A1.dtype)
    for k in range(zeta + 2, horizon + 1):
        b[k] = _parisian_tail_np(seal1, A1, b, zeta, k)
    return b


def parisian_base(seal1: np.ndarray, A1: np.ndarray, zeta: int, horizon: int, init=1) -> np.ndarray:
    """Bottom-up ``b[k]`` for ``k <= horizon``; ``b[k] = init`` for ``k <= zeta + 1``.

    The same recursion serves the survival form (``seal1`` = classical
    survival, ``init = 1``) and the ruin form (``seal1`` = cumulative
    unrecovered ruin, ``init = 0``).
    """
    if use_jit(seal1, A1):
        return _parisian_base_jit(seal1, A1, zeta, horizon, float(init))
    return _parisian_base_np(seal1, A1, zeta, horizon, init)


def parisian_tail(seal: np.ndarray, A: np.ndarray, b: np.ndarray, zeta: int, t: int):
    if use_jit(seal, A, b):
        return _parisian_tail_jit(seal, A, b, zeta, t)
    return _parisian_tail_np(seal, A, b, zeta, t)


# ---------------------------------------------------------------------------
# forward DP on the surplus (classical survival oracle)


@njit
def _dp_survival_jit(base, u, t_max):
    m = base.shape[0] - 1
    top = u + t_max + 1
    dens = np.zeros(top + 1)  # dens[r] = P(R_k = r, no ruin so far), r >= 1
    nxt = np.zeros(top + 1)
    surv = np.ones(t_max + 1)
    if u == 0:
        # clock idle at time 0: one step from level 0
        dens[0] = 1.0
    else:
        dens[u] = 1.0
    for k in range(1, t_max + 1):
        nxt[:] = 0.0
        for r in range(top):
            w = dens[r]
            if w == 0.0:
                continue
            for y in range(min(m, r) + 1):
                # new level r + 1 - y must stay >= 1
                nxt[r + 1 - y] += w * base[y]
        dens, nxt = nxt, dens
        surv[k] = dens.sum()
    return surv


def _dp_survival_np(base, u, t_max):
    m = base.shape[0] - 1
    top = u + t_max + 1
    dens = np.zeros(top + 1, dtype=base.dtype)
    dens[u] = 1
    surv = np.zeros(t_max + 1, dtype=base.dtype)
    surv[0] = 1
    for k in range(1, t_max + 1):
        nxt = np.zeros(top + 1, dtype=base.dtype)
        for y in range(m + 1):
            # r + 1 - y >= 1  <=>  r >= y
            if y <= top - 1:
                nxt[1 : top + 1 - y] += base[y] * dens[y:top]
        dens = nxt
        surv[k] = dens.sum()
    return surv


def dp_survival_series(base: np.ndarray, u: int, t_max: int) -> np.ndarray:
    if use_jit(base):
        return _dp_survival_jit(base, u, t_max)
    return _dp_survival_np(base, u, t_max)


# ---------------------------------------------------------------------------
# Parisian survival by exhaustive enumeration and by augmented-chain DP


@njit
def _brute_force_jit(ys, ps, u, zeta, steps, prune, node_cap):
    # iterative depth-first enumeration of claim sequences; returns (mass, nodes)
    m = ys.shape[0]
    level = np.empty(steps + 1, dtype=np.int64)
    last = np.empty(steps + 1, dtype=np.int64)
    prob = np.empty(steps + 1)
    choice = np.zeros(steps + 1, dtype=np.int64)
    level[0] = u
    last[0] = 0
    prob[0] = 1.0
    total = 0.0
    comp = 0.0
    nodes = 0
    d = 0
    while d >= 0:
        c = choice[d]
        if c == m:
            choice[d] = 0
            d -= 1
            continue
        choice[d] = c + 1
        nodes += 1
        if nodes > node_cap:
            return total + comp, -1
        n = d + 1
        r = level[d] + 1 - ys[c]
        pr = prob[d] * ps[c]
        lst = n if r > 0 else last[d]
        if r <= 0 and n - lst > zeta:
            continue
        if n == steps:
            tt = total + pr
            comp += (total - tt) + pr if total >= pr else (pr - tt) + total
            total = tt
            continue
        if prune and r <= 0:
            deadline = lst + zeta + 1
            first_up = n + 1 - r
            if deadline <= steps and first_up > deadline:
                continue
            if deadline > steps and first_up > steps:
                tt = total + pr
                comp += (total - tt) + pr if total >= pr else (pr - tt) + total
                total = tt
                continue
        level[n] = r
        last[n] = lst
        prob[n] = pr
        d = n
    return total + comp, nodes


def _brute_force_np(ys, ps, u, zeta, steps, prune, node_cap, radix=0, chunk=1 << 21):
    """Breadth-first enumeration; ``radix > 0`` returns composition counts instead of mass."""
    m = ys.shape[0]
    nodes = 0
    done_mass = ps.dtype.type(0) if ps.dtype != object else 0
    done_codes = []
    weights = radix ** np.arange(m, dtype=np.int64) if radix else None

    def expand(level, last, prob, code, n0):
        nonlocal nodes, done_mass
        for n in range(n0, steps + 1):
            if level.size == 0:
                return
            if level.size * m > chunk and level.size > 1:
                half = level.size // 2
                for sl in (slice(None, half), slice(half, None)):
                    expand(level[sl], last[sl], None if prob is None else prob[sl],
                           None if code is None else code[sl], n)
                return
            nodes += level.size * m
            if nodes > node_cap:
                raise OverflowError
            level = (level[:, None] + 1 - ys[None, :]).ravel()
            last = np.repeat(last, m)
            if prob is not None:
                prob = (prob[:, None] * ps[None, :]).ravel()
            if code is not None:
                code = (code[:, None] + weights[None, :]).ravel()
            positive = level > 0
            last = np.where(positive, n, last)
            keep = positive | (n - last <= zeta)
            settled = np.zeros(level.shape, dtype=bool)
            if prune and n < steps:
                deadline = last + zeta + 1
                first_up = n + 1 - level
                keep &= positive | ~((deadline <= steps) & (first_up > deadline))
                settled = keep & ~positive & (deadline > steps) & (first_up > steps)
            if settled.any():
                if prob is not None:
                    done_mass = done_mass + prob[settled].sum()
                if code is not None:
                    done_codes.append(code[settled])
                keep &= ~settled
            level, last = level[keep], last[keep]
            prob = None if prob is None else prob[keep]
            code = None if code is None else code[keep]
        if prob is not None:
            done_mass = done_mass + prob.sum()
        if code is not None:
            done_codes.append(code)

    start_prob = None if radix else np.ones(1, dtype=ps.dtype)
    start_code = np.zeros(1, dtype=np.int64) if radix else None
    try:
        expand(np.array([u], dtype=np.int64), np.zeros(1, dtype=np.int64), start_prob, start_code, 1)
    except OverflowError:
        return None, -1
    if radix:
        codes = np.concatenate(done_codes) if done_codes else np.zeros(0, dtype=np.int64)
        uniq, counts = np.unique(codes, return_counts=True)
        return (uniq, counts), nodes
    return done_mass, nodes


def brute_force(ys: np.ndarray, ps: np.ndarray, u: int, zeta: int, steps: int, prune: bool = False,
                node_cap: int = 1 << 62):
    """Mass of claim sequences of length ``steps`` that avoid Parisian ruin.

    Returns ``(mass, nodes)``; ``nodes == -1`` signals the node cap was hit.
    """
    if steps == 0:
        return (1.0 if ps.dtype != object else 1), 0
    if use_jit(ps):
        total, nodes = _brute_force_jit(ys.astype(np.int64), ps, u, zeta, steps, prune, node_cap)
        return float(total), int(nodes)
    return _brute_force_np(ys.astype(np.int64), ps, u, zeta, steps, prune, node_cap)


def brute_force_counts(ys: np.ndarray, u: int, zeta: int, steps: int, radix: int, prune: bool = False,
                       node_cap: int = 1 << 62):
    """Surviving sequences grouped by composition code ``sum(radix**atom_index)``."""
    if steps == 0:
        return (np.zeros(1, dtype=np.int64), np.ones(1, dtype=np.int64)), 0
    dummy = np.ones(ys.shape[0])
    return _brute_force_np(ys.astype(np.int64), dummy, u, zeta, steps, prune, node_cap, radix=radix)


# ---------------------------------------------------------------------------
# diagonal of the convolution table, P[k, u + k], by a rolling row


@njit
def _diag_series_jit(base, u, k_max):
    m = base.shape[0] - 1
    width = u + k_max
    row = np.zeros(width + 1)
    nxt = np.zeros(width + 1)
    row[0] = 1.0
    out = np.zeros(k_max + 1)
    out[0] = 1.0 if u == 0 else 0.0
    hi = 0
    for k in range(1, k_max + 1):
        new_hi = min(width, hi + m)
        # non-negative terms: plain summation is already accurate to O(m eps)
        for j in range(new_hi + 1):
            nxt[j] = 0.0
        for i in range(m + 1):
            b = base[i]
            top = min(hi, new_hi - i)
            for j in range(top + 1):
                nxt[j + i] += b * row[j]
        row, nxt = nxt, row
        hi = new_hi
        out[k] = row[u + k] if u + k <= hi else 0.0
    return out


def _diag_series_np(base, u, k_max):
    m = base.shape[0] - 1
    width = u + k_max
    row = np.zeros(width + 1, dtype=base.dtype)
    row[0] = 1
    out = np.zeros(k_max + 1, dtype=base.dtype)
    out[0] = 1 if u == 0 else 0
    for k in range(1, k_max + 1):
        nxt = np.zeros(width + 1, dtype=base.dtype)
        for i in range(min(m, width) + 1):
            nxt[i:] += base[i] * row[: width + 1 - i]
        row = nxt
        out[k] = row[u + k]
    return out


def diag_series(base: np.ndarray, u: int, k_max: int) -> np.ndarray:
    """``out[k] = P(S_k = u + k)`` for ``k = 0..k_max``."""
    if use_jit(base):
        return _diag_series_jit(base, u, k_max)
    return _diag_series_np(base, u, k_max)


@njit
def _parisian_dp_jit(base, u, zeta, steps):
    # levels -zeta..u+steps; at or below -zeta recovery before ruin is impossible
    m = base.shape[0] - 1
    lo = -zeta
    size = u + steps - lo + 1
    mass = np.zeros((size, zeta + 1))
    nxt = np.zeros((size, zeta + 1))
    mass[u - lo, 0] = 1.0
    for _ in range(steps):
        nxt[:, :] = 0.0
        for i in range(size):
            for run in range(zeta + 1):
                w = mass[i, run]
                if w == 0.0:
                    continue
                for y in range(m + 1):
                    j = i + 1 - y
                    if j + lo > 0:
                        nxt[j, 0] += w * base[y]
                    elif run + 1 <= zeta:
                        nxt[max(j, 0), run + 1] += w * base[y]
        mass, nxt = nxt, mass
    return mass.sum()


def _parisian_dp_np(base, u, zeta, steps):
    m = base.shape[0] - 1
    lo = -zeta
    size = u + steps - lo + 1
    mass = np.zeros((size, zeta + 1), dtype=base.dtype)
    mass[u - lo, 0] = 1
    src = np.arange(size)
    for _ in range(steps):
        nxt = np.zeros_like(mass)
        total = mass.sum(axis=1)
        for y in range(m + 1):
            dst = src + 1 - y
            up = (dst + lo > 0) & (dst < size)
            np.add.at(nxt[:, 0], dst[up], base[y] * total[up])
            down = dst + lo <= 0
            tgt = np.maximum(dst[down], 0)
            for run in range(zeta):
                np.add.at(nxt[:, run + 1], tgt, base[y] * mass[down, run])
        mass = nxt
    return mass.sum()


def parisian_dp(base: np.ndarray, u: int, zeta: int, steps: int):
    if use_jit(base):
        return _parisian_dp_jit(base, u, zeta, steps)
    return _parisian_dp_np(base, u, zeta, steps)


# ---------------------------------------------------------------------------
# Monte Carlo: SplitMix64 finaliser used as a counter-based generator

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1


def mix64(x: int) -> int:
    """SplitMix64 finaliser on Python ints (used to derive stream keys)."""
    z = (x + _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


@njit
def _mix64_jit(x):
    z = x + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(parallel=True)
def _mc_count_jit(cdf, u, zeta, steps, paths, key):
    m = cdf.shape[0] - 1
    count = 0
    for i in prange(paths):
        pkey = _mix64_jit(key ^ _mix64_jit(np.uint64(i)))
        level = u
        last = 0
        alive = 1
        for n in range(1, steps + 1):
            x = _mix64_jit(pkey + np.uint64(n) * np.uint64(0x9E3779B97F4A7C15))
            v = np.float64(x >> np.uint64(11)) * (1.0 / 9007199254740992.0)
            y = np.searchsorted(cdf, v, side="right")
            if y > m:
                y = m
            level += 1 - y
            if level > 0:
                last = n
            elif n - last > zeta:
                alive = 0
                break
        count += alive
    return count


def _mix64_np(x):
    with np.errstate(over="ignore"):  # arithmetic is mod 2^64 by design
        z = x + np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


def _mc_count_np(cdf, u, zeta, steps, paths, key, chunk=1 << 16):
    m = cdf.shape[0] - 1
    count = 0
    with np.errstate(over="ignore"):
        for start in range(0, paths, chunk):
            idx = np.arange(start, min(paths, start + chunk), dtype=np.uint64)
            pkey = _mix64_np(np.uint64(key) ^ _mix64_np(idx))
            level = np.full(idx.shape, u, dtype=np.int64)
            last = np.zeros(idx.shape, dtype=np.int64)
            alive = np.ones(idx.shape, dtype=bool)
            for n in range(1, steps + 1):
                step = np.uint64((n * _GAMMA) & _MASK)
                x = _mix64_np(pkey + step)
                v = (x >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
                y = np.minimum(np.searchsorted(cdf, v, side="right"), m)
                level = np.where(alive, level + 1 - y, level)
                positive = level > 0
                last = np.where(alive & positive, n, last)
                alive &= positive | (n - last <= zeta)
            count += int(alive.sum())
    return count


def mc_count(cdf: np.ndarray, u: int, zeta: int, steps: int, paths: int, key: int) -> int:
    if steps <= 0:
        return paths
    if use_jit(cdf):
        return int(_mc_count_jit(cdf, u, zeta, steps, paths, np.uint64(key)))
    return _mc_count_np(cdf, u, zeta, steps, paths, key)


# ---------------------------------------------------------------------------
# first-passage DP for the dual walk (ladder heights)


@njit
def _ladder_dp_jit(base, depth, tol_mass, max_steps):
    m = base.shape[0] - 1
    v = np.zeros(depth + 1)  # v[i] = mass at level i - depth, levels -depth..0
    nxt = np.zeros(depth + 1)
    h = np.zeros(max(m, 1))  # h[l] for l = 1..m-1
    v[depth] = 1.0
    escaped = 0.0
    remaining = 1.0
    steps = 0
    while steps < max_steps and remaining > tol_mass:
        nxt[:] = 0.0
        for i in range(depth + 1):
            w = v[i]
            if w == 0.0:
                continue
            for y in range(m + 1):
                j = i + y - 1
                if j < 0:
                    escaped += w * base[y]
                elif j <= depth:
                    nxt[j] += w * base[y]
                else:
                    h[j - depth] += w * base[y]
        v, nxt = nxt, v
        remaining = v.sum()
        steps += 1
    return h, escaped, remaining, steps


def _ladder_dp_np(base, depth, tol_mass, max_steps):
    m = base.shape[0] - 1
    v = np.zeros(depth + 1)
    v[depth] = 1.0
    h = np.zeros(max(m, 1))
    escaped = 0.0
    remaining = 1.0
    steps = 0
    while steps < max_steps and remaining > tol_mass:
        nxt = np.zeros(depth + 1)
        escaped += base[0] * v[0]
        nxt[: depth] += base[0] * v[1:]
        for y in range(1, m + 1):
            shift = y - 1
            nxt[shift:] += base[y] * v[: depth + 1 - shift]
            if shift:
                # levels depth+1-shift..depth jump to heights 1..shift
                h[1 : shift + 1] += base[y] * v[depth + 1 - shift :]
        v = nxt
        remaining = v.sum()
        steps += 1
    return h, escaped, remaining, steps


def ladder_dp(base: np.ndarray, depth: int, tol_mass: float, max_steps: int):
    if use_jit(base):
        return _ladder_dp_jit(base, depth, tol_mass, max_steps)
    return _ladder_dp_np(base, depth, tol_mass, max_steps)
