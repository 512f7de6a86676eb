"""Command-line front end.

Subcommands: ``finite``, ``infinite``, ``asymptotic``, ``mc`` and ``table``.
At most one of ``--u``, ``--zeta``, ``--t`` may be a range ``a..b`` (or a
comma list); the command then emits one row per grid point.

Option values come from flags first, then ``PARISIAN_<NAME>`` environment
variables, then a JSON config file (``--config`` or ``PARISIAN_CONFIG``).

Exit codes: 0 success, 2 parse error, 3 domain error, 4 resource cap, 1 other.
Failures print a single JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings
from typing import Sequence

from . import __version__
from .asymptotics import cramer_parisian_limit, heavy_limits
from .dist import RiskModel, negbinomial, parse_dist, binomial
from .errors import DomainError, ParisianError, ResourceLimitError
from .montecarlo import TABLE1_SCHEDULE, McConfig, mc_parisian_survival, mc_schedule
from .parisian import (
    brute_force_parisian,
    dp_parisian_survival,
    parisian_infinite_components,
    parisian_survival,
    parisian_survival_sweep,
)

EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_RESOURCE = 4

DEFAULTS = {
    "dist": "binomial:3,0.3",
    "u": "5",
    "zeta": "3",
    "t": "20",
    "paths": "10000",
    "seed": "0",
    "format": "pretty",
    "precision": "7",
    "method": "recursion",
    "tol": "1e-10",
    "regime": "cramer",
    "alpha": "0",
    "u_grid": "5,10,20,40",
    "nb_convention": "both",
    "which": "1..8",
    "eps_mass": "1e-12",
}

# printed reference values for the reproduction tables
REFERENCE = {
    1: {20: 0.9701426},
    2: dict(zip(range(1, 27), [1.0] * 6 + [
        0.999812, 0.999191, 0.998085, 0.996537, 0.994616, 0.992394, 0.989939, 0.98731, 0.984558, 0.981723,
        0.978841, 0.975936, 0.973031, 0.970143, 0.967383, 0.964464, 0.961691, 0.95897, 0.956307, 0.953703])),
    3: dict(zip(range(0, 11), [0.409338, 0.62281, 0.780619, 0.880085, 0.938248, 0.970143, 0.98647, 0.994264,
                               0.997729, 0.999162, 0.9997118])),
    4: dict(zip(range(1, 11), [0.95027, 0.961821, 0.970143, 0.976467, 0.981427, 0.985393, 0.988605, 0.991226,
                               0.993376, 0.995142])),
    5: {20: 0.6706446},
    6: dict(zip(range(1, 27), [1.0] * 4 + [
        0.987374, 0.968487, 0.946513, 0.923035, 0.89889, 0.874715, 0.850903, 0.827691, 0.80521, 0.783532,
        0.762689, 0.742683, 0.723503, 0.705123, 0.687515, 0.6706446, 0.654478, 0.638979, 0.624113, 0.609847,
        0.596149, 0.582989])),
    7: dict(zip(range(0, 16), [0.255235, 0.350681, 0.441457, 0.525763, 0.602382, 0.6706446, 0.730356, 0.781706,
                               0.825173, 0.861426, 0.891247, 0.915461, 0.934881, 0.950278, 0.962353, 0.971725])),
    8: dict(zip(range(1, 16), [0.581143, 0.629553, 0.6706446, 0.706734, 0.739079, 0.768452, 0.79537, 0.820193,
                               0.843145, 0.864401, 0.884276, 0.903014, 0.920769, 0.937612, 0.95352])),
}

NB_SPEC = (3, 9 / 19)


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_PARSE, "ParseError", f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# option resolution


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PARSE, "ConfigError", f"cannot read config {path!r}: {exc}") from None
    if not isinstance(data, dict):
        raise CliError(EXIT_PARSE, "ConfigError", "config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


class Options:
    """Flag > ``PARISIAN_<NAME>`` > config file > built-in default."""

    def __init__(self, ns: argparse.Namespace, env=None):
        self.ns = ns
        self.env = os.environ if env is None else env
        self.config = _load_config(ns.config or self.env.get("PARISIAN_CONFIG"))
        self.stderr = sys.stderr

    def raw(self, name: str) -> str:
        val = getattr(self.ns, name, None)
        if val is not None:
            return str(val)
        env = self.env.get("PARISIAN_" + name.upper())
        if env is not None:
            return env
        if name in self.config:
            v = self.config[name]
            return ",".join(str(x) for x in v) if isinstance(v, list) else str(v)
        return DEFAULTS[name]

    def int(self, name: str) -> int:
        text = self.raw(name)
        try:
            return int(text)
        except ValueError:
            raise CliError(EXIT_PARSE, "ParseError", f"--{name.replace('_', '-')} expects an integer, got {text!r}") from None

    def float(self, name: str) -> float:
        text = self.raw(name)
        try:
            return float(text)
        except ValueError:
            raise CliError(EXIT_PARSE, "ParseError", f"--{name.replace('_', '-')} expects a number, got {text!r}") from None

    def grid(self, name: str) -> list[int]:
        return parse_range(self.raw(name), name)


def parse_range(text: str, name: str = "value") -> list[int]:
    """``"7"`` -> [7]; ``"1..5"`` -> [1..5]; ``"1,2,8"`` -> [1, 2, 8]. Must be non-empty and increasing."""
    text = str(text).strip()
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            out = list(range(int(a), int(b) + 1))
        else:
            out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(EXIT_PARSE, "ParseError", f"cannot parse {name} range {text!r}") from None
    if not out:
        raise CliError(EXIT_PARSE, "ParseError", f"{name} range {text!r} is empty")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise CliError(EXIT_PARSE, "ParseError", f"{name} range {text!r} is not increasing")
    return out


def _dist(opts: Options, spec: str | None = None):
    spec = spec or opts.raw("dist")
    conv = opts.raw("nb_convention")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return parse_dist(spec, eps_mass=opts.float("eps_mass"), nb_convention=conv if conv in ("a", "b") else None)
    except (DomainError, ValueError, OSError) as exc:
        raise CliError(EXIT_PARSE, "ParseError", f"bad --dist {spec!r}: {exc}") from None


def _axes(opts: Options, names: Sequence[str]) -> tuple[str | None, dict]:
    grids = {n: opts.grid(n) for n in names}
    swept = [n for n, g in grids.items() if len(g) > 1 or ".." in opts.raw(n)]
    if len(swept) > 1:
        raise CliError(EXIT_PARSE, "ParseError", f"only one axis may be a range, got {', '.join(swept)}")
    return (swept[0] if swept else None), grids


# ---------------------------------------------------------------------------
# output


def _fmt(x, precision: int) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{float(x):.{precision}g}"


def _full(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def render(header: Sequence[str], rows: Sequence[Sequence], fmt: str, precision: int) -> str:
    """CSV (full precision) or an aligned text table (``precision`` significant digits)."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_full(x) for x in r])
        return buf.getvalue()
    cells = [list(header)] + [[_fmt(x, precision) for x in r] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    lines = ["  ".join(c[i].ljust(widths[i]) for i in range(len(header))).rstrip() for c in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _finite_value(model: RiskModel, t: int, method: str):
    if method == "recursion":
        return float(parisian_survival(model, t))
    if method == "dp":
        return float(dp_parisian_survival(model, t))
    if method == "brute":
        return float(brute_force_parisian(model, t))
    raise CliError(EXIT_PARSE, "ParseError", f"unknown --method {method!r}")


def cmd_finite(opts: Options) -> str:
    pmf = _dist(opts)
    axis, g = _axes(opts, ("u", "zeta", "t"))
    method = opts.raw("method")
    fmt, prec = opts.raw("format"), opts.int("precision")
    u, z, t = g["u"][0], g["zeta"][0], g["t"][0]
    notes = {}
    if axis is None:
        axis, grid = "t", [t]
    else:
        grid = g[axis]
    if method == "recursion":
        model = RiskModel(pmf, max(u, 1) if axis == "u" else u, z)
        if axis == "u" or u == 0:
            sweep = parisian_survival_sweep(model, "u", grid if axis == "u" else [u], t)
            grid = list(sweep.grid) if axis == "u" else [t]
            values = list(sweep.values)
            notes = sweep.notes
        else:
            sweep = parisian_survival_sweep(model, axis, grid, t)
            values = list(sweep.values)
    else:
        values = []
        for v in grid:
            params = {"u": u, "zeta": z, "t": t, axis: v}
            values.append(_finite_value(RiskModel(pmf, params["u"], params["zeta"]), params["t"], method))
    values = [float(v) for v in values]
    if fmt == "pretty" and len(grid) == 1 and not notes:
        return _fmt(values[0], prec) + "\n"
    out = render([axis, "probability"], list(zip(grid, values)), fmt, prec)
    for k, note in notes.items():
        opts.stderr.write(f"note (u={k}): {note}\n")
    return out


def cmd_infinite(opts: Options) -> str:
    pmf = _dist(opts)
    axis, g = _axes(opts, ("u", "zeta"))
    fmt, prec = opts.raw("format"), opts.int("precision")
    tol = opts.float("tol")
    axis = axis or "u"
    rows = []
    for v in g[axis]:
        params = {"u": g["u"][0], "zeta": g["zeta"][0], axis: v}
        res = parisian_infinite_components(RiskModel(pmf, params["u"], params["zeta"]), tol)
        rows.append((v, res.value, res.abserr, res.classical))
    if fmt == "pretty" and len(rows) == 1:
        return _fmt(rows[0][1], prec) + "\n"
    return render([axis, "probability", "abserr", "classical"], rows, fmt, prec)


def cmd_asymptotic(opts: Options) -> str:
    pmf = _dist(opts)
    zeta = opts.int("zeta")
    grid = opts.grid("u_grid")
    regime = opts.raw("regime")
    model = RiskModel(pmf, grid[0], zeta)
    if regime == "cramer":
        rep = cramer_parisian_limit(model, u_grid=tuple(grid))
    elif regime == "heavy":
        rep = heavy_limits(model, opts.float("alpha"), u_grid=tuple(grid))
    else:
        raise CliError(EXIT_PARSE, "ParseError", f"unknown --regime {regime!r}")
    fmt, prec = opts.raw("format"), opts.int("precision")
    if fmt == "csv":
        return rep.to_csv()
    if fmt == "json":
        return rep.to_json_lines()
    lines = [f"regime          {rep.regime}", f"gamma_or_alpha  {_fmt(rep.gamma_or_alpha, prec)}",
             f"prefactor       {_fmt(rep.prefactor, prec)}"]
    for k, v in rep.components.items():
        if isinstance(v, (int, float)):
            lines.append(f"{k:<15} {_fmt(v, prec)}")
    out = "\n".join(lines) + "\n"
    if rep.diagnostics:
        keys = list(rep.diagnostics[0])
        out += "\n" + render(keys, [[d[k] for k in keys] for d in rep.diagnostics], "pretty", prec)
    return out


def cmd_mc(opts: Options) -> str:
    pmf = _dist(opts)
    fmt, prec = opts.raw("format"), opts.int("precision")
    seed = opts.int("seed")
    if opts.ns.schedule:
        u, z, t = opts.int("u"), opts.int("zeta"), opts.int("t")
        model = RiskModel(pmf, u, z)
        sched = TABLE1_SCHEDULE if opts.ns.schedule == "table1" else parse_range(opts.ns.schedule, "schedule")
        exact = float(parisian_survival(model, t)) if u >= 1 else None
        rows = mc_schedule(model, t, sched, seed, exact)
        timing = bool(opts.ns.timing)
        body = [[r["description"], r["probability"], r["stderr"], r["time_sec"] if timing else None, r["abs_diff"]]
                for r in rows]
        if exact is not None:
            body.insert(0, ["exact", exact, None, None, 0.0])
        return render(["description", "probability", "stderr", "time_sec", "abs_diff"], body, fmt, prec)
    axis, g = _axes(opts, ("u", "zeta", "t"))
    paths = opts.int("paths")
    axis = axis or "t"
    rows = []
    for v in g[axis]:
        p = {"u": g["u"][0], "zeta": g["zeta"][0], "t": g["t"][0], axis: v}
        est = mc_parisian_survival(McConfig(RiskModel(pmf, p["u"], p["zeta"]), p["t"], paths, seed))
        rows.append((v, est.p_hat, est.stderr))
    return render([axis, "probability", "stderr"], rows, fmt, prec)


# ---------------------------------------------------------------------------
# reproduction tables


def _nb_models(conventions):
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for c in conventions:
            out[c] = negbinomial(NB_SPEC[0], NB_SPEC[1], c)
    return out


def _timed(fn, *args):
    start = time.perf_counter()
    val = fn(*args)
    return val, time.perf_counter() - start


def _mc_table(label: str, model: RiskModel, t: int, seed: int, timing: bool, fmt: str, prec: int,
              reference: float | None) -> str:
    exact, dt = _timed(lambda: float(parisian_survival(model, t)))
    rows = [["exact", exact, None, dt if timing else None, 0.0, reference]]
    for r in mc_schedule(model, t, TABLE1_SCHEDULE, seed, exact):
        rows.append([r["description"], r["probability"], r["stderr"], r["time_sec"] if timing else None,
                     r["abs_diff"], None])
    return f"# {label}\n" + render(["description", "probability", "stderr", "time_sec", "abs_diff", "reference"],
                                   rows, fmt, prec)


def _sweep_values(pmf, axis, grid, u=5, zeta=3, t=20):
    model = RiskModel(pmf, u, zeta)
    res = parisian_survival_sweep(model, axis, grid, None if axis == "t" else t)
    return [float(v) for v in res.values], res.notes


SWEEPS = {2: ("t", range(1, 27)), 3: ("u", range(0, 11)), 4: ("zeta", range(1, 11)),
          6: ("t", range(1, 27)), 7: ("u", range(0, 16)), 8: ("zeta", range(1, 16))}

TITLES = {
    1: "Table 1: B(3,0.3), u=5, zeta=3, t=20; exact and MC",
    2: "Table 2: B(3,0.3), u=5, zeta=3; survival by horizon t",
    3: "Table 3: B(3,0.3), zeta=3, t=20; survival by initial reserve u",
    4: "Table 4: B(3,0.3), u=5, t=20; survival by delay zeta",
    5: "Table 5: NB(3,9/19), u=5, zeta=3, t=20; exact and MC",
    6: "Table 6: NB(3,9/19), u=5, zeta=3; survival by horizon t",
    7: "Table 7: NB(3,9/19), zeta=3, t=20; survival by initial reserve u",
    8: "Table 8: NB(3,9/19), u=5, t=20; survival by delay zeta",
}


def cmd_table(opts: Options) -> str:
    which = parse_range(opts.raw("which"), "which")
    if any(w < 1 or w > 8 for w in which):
        raise CliError(EXIT_PARSE, "ParseError", "--which selects tables among 1..8")
    conv = opts.raw("nb_convention")
    conventions = ("a", "b") if conv == "both" else (conv,)
    if any(c not in ("a", "b") for c in conventions):
        raise CliError(EXIT_PARSE, "ParseError", f"--nb-convention must be a, b or both, got {conv!r}")
    fmt, prec, seed = opts.raw("format"), opts.int("precision"), opts.int("seed")
    timing = bool(opts.ns.timing)
    bin_pmf = binomial(3, 0.3)
    nb = _nb_models(conventions) if any(w >= 5 for w in which) else {}
    parts = []
    for w in which:
        title = TITLES[w]
        ref = REFERENCE[w]
        if w == 1:
            parts.append(_mc_table(title, RiskModel(bin_pmf, 5, 3), 20, seed, timing, fmt, prec, ref[20]))
        elif w == 5:
            for c, pmf in nb.items():
                label = f"{title} [NB convention {c}, mean {float(pmf.mean):.4g}]"
                parts.append(_mc_table(label, RiskModel(pmf, 5, 3), 20, seed, timing, fmt, prec, ref[20]))
        else:
            axis, grid = SWEEPS[w]
            grid = list(grid)
            if w <= 4:
                vals, notes = _sweep_values(bin_pmf, axis, grid)
                rows = [[g, v, ref[g], abs(v - ref[g])] for g, v in zip(grid, vals)]
                header = [axis, "probability", "reference", "abs_diff"]
            else:
                cols = {}
                notes = {}
                for c, pmf in nb.items():
                    cols[c], n = _sweep_values(pmf, axis, grid)
                    notes.update(n)
                rows = [[g] + [cols[c][i] for c in nb] + [ref[g]] for i, g in enumerate(grid)]
                header = [axis] + [f"nb_{c}" for c in nb] + ["reference"]
            text = f"# {title}\n" + render(header, rows, fmt, prec)
            for k in sorted(notes):
                text += f"# note u={k}: {notes[k]}\n"
            parts.append(text)
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# parser and entry point


def _common(p: argparse.ArgumentParser, axes=("u", "zeta", "t")) -> None:
    p.add_argument("--dist", help="claim law, e.g. binomial:3,0.3 or negbinomial:3,9/19,b")
    for a in axes:
        p.add_argument(f"--{a}", help=f"{a} value or range a..b")
    p.add_argument("--format", choices=("csv", "pretty", "json"), default=None)
    p.add_argument("--precision", help="significant digits in pretty output (default 7)")
    p.add_argument("--nb-convention", dest="nb_convention", help="a or b for negbinomial specs without one")
    p.add_argument("--eps-mass", dest="eps_mass", help="truncation mass for infinite-support laws")
    p.add_argument("--config", help="JSON config file (lowest precedence)")
    p.add_argument("--out", help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="parisian", description="Parisian ruin probabilities for lattice risk processes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("finite", help="finite-horizon survival P_u(tau >= t)")
    _common(p)
    p.add_argument("--method", help="recursion (default), dp or brute")

    p = sub.add_parser("infinite", help="infinite-horizon Parisian ruin P_u(tau < inf)")
    _common(p, ("u", "zeta"))
    p.add_argument("--tol", help="certified truncation tolerance (default 1e-10)")

    p = sub.add_parser("asymptotic", help="Cramér or heavy-tail limits with diagnostics")
    _common(p, ("zeta",))
    p.add_argument("--regime", help="cramer (default) or heavy")
    p.add_argument("--alpha", help="tail rate for --regime heavy (default 0)")
    p.add_argument("--u-grid", dest="u_grid", help="diagnostic reserves, e.g. 5,10,20,40")

    p = sub.add_parser("mc", help="Monte Carlo estimate of P_u(tau >= t)")
    _common(p)
    p.add_argument("--paths", help="simulated paths (default 10000)")
    p.add_argument("--seed", help="64-bit seed (default 0)")
    p.add_argument("--schedule", help="path counts a..b / comma list, or 'table1' (100..102400 doubling)")
    p.add_argument("--timing", action="store_true", help="include wall-clock times")

    p = sub.add_parser("table", help="regenerate the reproduction tables 1-8")
    p.add_argument("--which", help="tables to emit, e.g. 1..4 or 2,5 (default 1..8)")
    p.add_argument("--nb-convention", dest="nb_convention", help="a, b or both (default both)")
    p.add_argument("--seed", help="MC seed (default 0)")
    p.add_argument("--timing", action="store_true", help="include wall-clock times (output no longer byte-stable)")
    p.add_argument("--format", choices=("csv", "pretty"), default=None)
    p.add_argument("--precision")
    p.add_argument("--config")
    p.add_argument("--out")
    return parser


COMMANDS = {"finite": cmd_finite, "infinite": cmd_infinite, "asymptotic": cmd_asymptotic, "mc": cmd_mc,
            "table": cmd_table}


def run(argv: Sequence[str] | None = None, env=None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, execute, write output; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        ns = build_parser().parse_args(list(argv) if argv is not None else None)
        opts = Options(ns, env)
        opts.stderr = stderr
        fmt = opts.raw("format")
        if fmt not in ("csv", "pretty", "json"):
            raise CliError(EXIT_PARSE, "ParseError", f"unknown --format {fmt!r}")
        text = COMMANDS[ns.command](opts)
        if getattr(ns, "out", None):
            with open(ns.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        return 0
    except CliError as exc:
        err = (exc.code, exc.kind, str(exc))
    except ResourceLimitError as exc:
        err = (EXIT_RESOURCE, type(exc).__name__, str(exc))
    except (ParisianError, ValueError) as exc:
        err = (EXIT_DOMAIN, type(exc).__name__, str(exc))
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    stderr.write(json.dumps({"error": err[1], "message": err[2], "exit": err[0]}) + "\n")
    return err[0]


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
