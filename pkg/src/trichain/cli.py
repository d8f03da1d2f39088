"""Command-line interface: sweeps, Monte Carlo overlays, degeneracy tables,
critical-field reports, and the one-shot reproduction battery.

Options may come from a flat key=value config file (--config); command-line
flags win over config values, which win over built-in defaults.  Grids use
the inclusive start:stop:step syntax, ring-size ranges use first..last.

Exit codes: 0 success, 1 usage error, 2 numeric or contract failure,
3 I/O failure.  TRICHAIN_WORKERS overrides the worker count for grid
sweeps.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import critical, enumeration, montecarlo, reproduce, sequences, svgplot, transfer
from .model import CASE_PRESETS, ChainSpec, ExchangeConstants, FieldPoint, exact_fraction

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise UsageError(message)


def parse_grid(text: str) -> np.ndarray:
    """Inclusive numeric grid: 'start:stop:step' or a single value.

    The endpoint is included whenever it lies within half a step of the
    last point.  An empty string is an empty grid.
    """
    if not str(text).strip():
        return np.empty(0)
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            start, stop, step = (float(p) for p in parts)
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"bad grid {text!r}; expected 'start:stop:step' or a number") from None
    if step <= 0 or stop < start:
        raise UsageError(f"bad grid {text!r}; need step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 0.5)) + 1
    return start + step * np.arange(count)


def parse_cells(text: str) -> list[int]:
    """Ring-size range: 'first..last' or a single integer."""
    raw = str(text)
    try:
        if ".." in raw:
            lo, hi = raw.split("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(raw)]
    except ValueError:
        raise UsageError(f"bad cell range {text!r}; expected 'first..last' or an integer") from None


def load_config(path: str) -> dict[str, str]:
    """Flat key=value lines; blank lines and #-comments ignored."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = body.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _resolve_exchange(opts: dict) -> tuple[str, ExchangeConstants]:
    case = opts.get("case")
    if case is not None:
        if case not in CASE_PRESETS:
            raise UsageError(f"unknown case {case!r}; choose from a, b, c, d")
        return case, CASE_PRESETS[case]
    triple = [opts.get(k) for k in ("j_d", "j", "j_t")]
    if any(v is None for v in triple):
        raise UsageError("give either --case or all three of --j-d, --j, --j-t")
    return "custom", ExchangeConstants(*(float(v) for v in triple))


def _out_dir(opts: dict) -> Path:
    path = Path(opts.get("out", "out"))
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {path}: {e}") from None
    return path


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from None
    print(f"wrote {path}")


def _formats(opts: dict) -> set[str]:
    raw = opts.get("formats", "csv")
    chosen = {part.strip() for part in raw.split(",") if part.strip()}
    bad = chosen - {"csv", "json", "svg"}
    if bad:
        raise UsageError(f"unknown output formats: {', '.join(sorted(bad))}")
    return chosen


def _grid_csv(h_grid, t_grid, values) -> str:
    """Matrix CSV: first row is the field grid, first column the temperature."""
    lines = ["T\\h," + ",".join(f"{h:.12g}" for h in h_grid)]
    for i, t in enumerate(t_grid):
        row = values[i * len(h_grid):(i + 1) * len(h_grid)]
        lines.append(f"{t:.12g}," + ",".join(f"{v:.12g}" for v in row))
    return "\n".join(lines) + "\n"


def cmd_thermo(opts: dict) -> int:
    label, ex = _resolve_exchange(opts)
    h_grid = parse_grid(opts.get("h", "0:4:0.01"))
    t_grid = parse_grid(opts.get("t", "0.25"))
    if h_grid.size == 0 or t_grid.size == 0:
        print("warning: empty grid, nothing to do", file=sys.stderr)
        return EXIT_OK
    formats = _formats(opts)
    out = _out_dir(opts)
    table = transfer.sweep(ex, h_grid, t_grid, workers=transfer.default_workers())
    stem = f"thermo_{label}"
    if "csv" in formats:
        _write(out / f"{stem}.csv", table.to_csv())
    if "json" in formats:
        _write(out / f"{stem}.json", table.to_json())
    if "svg" in formats:
        if t_grid.size <= 4:
            for i, t in enumerate(t_grid):
                sl = slice(i * h_grid.size, (i + 1) * h_grid.size)
                for column, name in ((table.m[sl], "m"), (table.s[sl], "s")):
                    series = [svgplot.Series(x=list(h_grid), y=list(column))]
                    svg = svgplot.line_plot_svg(
                        series, f"{name}(h) at T={t:g} ({label})", "h", name
                    )
                    _write(out / f"{stem}_{name}_T{t:g}.svg", svg)
        if t_grid.size > 1:
            _write(out / f"{stem}_m_grid.csv", _grid_csv(h_grid, t_grid, table.m))
            _write(out / f"{stem}_s_grid.csv", _grid_csv(h_grid, t_grid, table.s))
    return EXIT_OK


def cmd_mc(opts: dict) -> int:
    label, ex = _resolve_exchange(opts)
    h_grid = parse_grid(opts.get("h", "0.1:4:0.1"))
    t = float(opts.get("t", 0.25))
    n_cells = int(opts.get("cells", 100))
    params = montecarlo.McParams(
        sweeps=int(opts.get("sweeps", montecarlo.McParams.sweeps)),
        burn_in=int(opts.get("burn_in", montecarlo.McParams.burn_in)),
        seed=int(opts.get("seed", montecarlo.McParams.seed)),
        n_bins=int(opts.get("bins", montecarlo.McParams.n_bins)),
        anneal_steps=int(opts.get("anneal_steps", montecarlo.McParams.anneal_steps)),
        n_chains=int(opts.get("chains", montecarlo.McParams.n_chains)),
    )
    spec = ChainSpec(n_cells, ex)
    formats = _formats(opts)
    out = _out_dir(opts)
    results = montecarlo.mc_curve(spec, h_grid, t, params)
    stem = f"mc_{label}"
    if "csv" in formats:
        _write(out / f"{stem}.csv", montecarlo.curve_to_csv(h_grid, t, results))
    if "json" in formats:
        records = [
            {"h": float(h), "T": t, "m_mc": r.m_mean, "m_err": r.m_stderr,
             "e_mc": r.e_mean, "e_err": r.e_stderr, "acceptance": r.acceptance_rate}
            for h, r in zip(h_grid, results)
        ]
        _write(out / f"{stem}.json", json.dumps(records, indent=1))
    if "svg" in formats:
        exact_h = np.linspace(float(h_grid.min()), float(h_grid.max()), 241)
        exact = transfer.sweep(ex, exact_h, [t])
        series = [
            svgplot.Series(x=list(exact_h), y=list(exact.m), label="exact"),
            svgplot.Series(
                x=[float(h) for h in h_grid],
                y=[r.m_mean for r in results],
                y_err=[r.m_stderr for r in results],
                label="MC", marker=True,
            ),
        ]
        svg = svgplot.line_plot_svg(series, f"m(h) at T={t:g} ({label})", "h", "m")
        _write(out / f"{stem}_overlay.svg", svg)
    return EXIT_OK


def cmd_enumerate(opts: dict) -> int:
    label, ex = _resolve_exchange(opts)
    cells = parse_cells(opts.get("cells", "1..7"))
    plus_zero = str(opts.get("plus_zero", "false")).lower() in ("1", "true", "yes")
    h = exact_fraction(opts.get("h", 0))
    formats = _formats(opts)
    out = _out_dir(opts)
    reports = []
    for n in cells:
        if plus_zero:
            reports.append(enumeration.ground_states_plus_zero(ex, n))
        else:
            reports.append(enumeration.ground_states(ex, h, n))
    omegas = [r.omega for r in reports]
    matches = sequences.identify(omegas) if len(omegas) >= 4 else []
    tags = sorted({m.describe() for m in matches})
    est = enumeration.residual_entropy_estimate(omegas) if len(omegas) >= 3 else None

    header = f"{'n':>3} {'omega':>12} {'m_sum':>12}  e_min"
    print(header)
    for r in reports:
        print(f"{r.n_cells:>3} {r.omega:>12} {r.m_sum:>12}  {r.e_min}")
    if tags:
        print("identified:", ", ".join(tags))
    if est is not None:
        print(f"residual entropy per spin (tail ratio): {est:.6f}")

    stem = f"enumerate_{label}"
    payload = {
        "exchange": {"j_d": ex.j_d, "j": ex.j, "j_t": ex.j_t},
        "h": f"{h.numerator}/{h.denominator}",
        "plus_zero": plus_zero,
        "reports": [r.as_dict() for r in reports],
        "identified": tags,
        "residual_entropy_estimate": est,
    }
    if "json" in formats:
        _write(out / f"{stem}.json", json.dumps(payload, indent=1))
    if "csv" in formats:
        lines = ["n_cells,e_min,omega,m_sum"]
        for r in reports:
            d = r.as_dict()
            lines.append(f"{d['n_cells']},{d['e_min']},{d['omega']},{d['m_sum']}")
        _write(out / f"{stem}.csv", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_critical(opts: dict) -> int:
    label, ex = _resolve_exchange(opts)
    n_cells = int(opts.get("cells", 7))
    formats = _formats(opts)
    out = _out_dir(opts)
    points = critical.critical_fields(ex, n_cells)
    m0 = critical.residual_magnetization(ex, min(n_cells, 6) if n_cells >= 4 else 4)
    print(f"case {label}: m0 = {m0}")
    for p in points:
        print(
            f"  h_c = {p.h_c}  plateau {p.m_below} -> {p.m_above}  "
            f"m(h_c) = {p.m_at:.5f}  s(h_c) = {p.s_at:.5f}"
        )
    payload = {
        "case": label,
        "m0": float(m0),
        "transitions": [p.as_dict() for p in points],
    }
    if points:
        payload.update(points[0].as_dict())
    if "json" in formats:
        _write(out / f"critical_{label}.json", json.dumps(payload, indent=1))
    return EXIT_OK


def cmd_reproduce(opts: dict) -> int:
    out = _out_dir(opts)
    include_mc = str(opts.get("mc", "true")).lower() not in ("0", "false", "no")
    checks = reproduce.run_checks(include_mc=include_mc)
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        line = f"[{status}] {c.name}: {c.detail}"
        print(line)
        lines.append(line)
    n_pass = sum(c.passed for c in checks)
    summary = f"{n_pass}/{len(checks)} checks passed"
    print(summary)
    lines.append(summary)
    _write(out / "reproduce_summary.txt", "\n".join(lines) + "\n")
    _write(out / "reproduce.json", json.dumps(
        [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        indent=1,
    ))
    return EXIT_OK if n_pass == len(checks) else EXIT_NUMERIC


def _add_exchange_args(p: _Parser) -> None:
    p.add_argument("--case", choices=list(CASE_PRESETS), default=argparse.SUPPRESS,
                   help="reference coupling preset")
    p.add_argument("--j-d", dest="j_d", default=argparse.SUPPRESS,
                   help="triangle edge coupling")
    p.add_argument("--j", default=argparse.SUPPRESS, help="triangle base coupling")
    p.add_argument("--j-t", dest="j_t", default=argparse.SUPPRESS,
                   help="inter-triangle coupling")


def _add_common_args(p: _Parser) -> None:
    p.add_argument("--config", default=argparse.SUPPRESS,
                   help="key=value config file; flags override it")
    p.add_argument("--out", default=argparse.SUPPRESS, help="output directory (default: out)")
    p.add_argument("--formats", default=argparse.SUPPRESS,
                   help="comma list of csv,json,svg (default: csv)")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="trichain",
        description="Frustrated triangle-chain Ising model: exact thermodynamics, "
                    "exhaustive ground-state counting, and Monte Carlo overlays.",
        epilog="Environment: TRICHAIN_WORKERS sets the process count for grid "
               "sweeps (default 1). Exit codes: 0 ok, 1 usage, 2 numeric/contract, "
               "3 I/O.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("thermo",
                       help="exact f, s, m over an (h, T) grid")
    _add_exchange_args(p)
    _add_common_args(p)
    p.add_argument("--h", default=argparse.SUPPRESS, help="field grid start:stop:step")
    p.add_argument("--t", default=argparse.SUPPRESS,
                   help="temperature grid start:stop:step or a single value")
    p.set_defaults(func=cmd_thermo)

    p = sub.add_parser("mc",
                       help="Monte Carlo magnetization overlay against the exact curve")
    _add_exchange_args(p)
    _add_common_args(p)
    p.add_argument("--h", default=argparse.SUPPRESS, help="field grid start:stop:step")
    p.add_argument("--t", default=argparse.SUPPRESS, help="temperature")
    p.add_argument("--cells", default=argparse.SUPPRESS, help="ring size (default 100)")
    p.add_argument("--sweeps", default=argparse.SUPPRESS, help="measurement sweeps per chain")
    p.add_argument("--burn-in", dest="burn_in", default=argparse.SUPPRESS)
    p.add_argument("--seed", default=argparse.SUPPRESS, help="master seed")
    p.add_argument("--bins", default=argparse.SUPPRESS, help="bins for single-chain errors")
    p.add_argument("--anneal-steps", dest="anneal_steps", default=argparse.SUPPRESS)
    p.add_argument("--chains", default=argparse.SUPPRESS, help="independent chains per point")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("enumerate",
                       help="exact ground-state degeneracy tables")
    _add_exchange_args(p)
    _add_common_args(p)
    p.add_argument("--h", default=argparse.SUPPRESS,
                   help="exact rational field, e.g. 2/3 (default 0)")
    p.add_argument("--cells", default=argparse.SUPPRESS, help="ring sizes first..last")
    p.add_argument("--plus-zero", dest="plus_zero", default=argparse.SUPPRESS,
                   help="true: restrict the zero-field census to maximal magnetization")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("critical",
                       help="zero-temperature critical fields and residual magnetization")
    _add_exchange_args(p)
    _add_common_args(p)
    p.add_argument("--cells", default=argparse.SUPPRESS,
                   help="enumeration ring size (default 7)")
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("reproduce",
                       help="run the published-results battery and write a summary")
    _add_common_args(p)
    p.add_argument("--mc", default=argparse.SUPPRESS,
                   help="false: skip the Monte Carlo overlay checks")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        opts = dict()
        ns = vars(args)
        if "config" in ns:
            opts.update(load_config(ns["config"]))
        opts.update({k: v for k, v in ns.items() if k not in ("func", "command", "config")})
        return args.func(opts)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
