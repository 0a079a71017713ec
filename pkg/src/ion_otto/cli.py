#!/usr/bin/env python
"""Command-line entry point: cycle, sweep, figure, optimize and selftest.

Data (CSV or JSON) goes to stdout or --out; tagged status lines go to stderr.
Exit codes: 0 success, 1 invalid input or failed command, 2 selftest failure.
"""

import argparse
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from . import selftest
from .cycle import run_otto
from .model import Measure, ModelParams, ground_level
from .optimize import OptimizerJob, WmaxResult, run_job
from .sweep import (
    FIG2_BASE,
    Axis,
    CouplingRule,
    InvalidSweep,
    SweepSpec,
    figure_preset,
    rows_frame,
    run_sweep,
    write_frame,
)

DESCRIPTION = """
Measurement-based quantum Otto engine with two system ions, an ancilla ion and
one phonon mode.

  %(prog)s cycle    --bh 10 --bl 6 --j1 10 --j2 10 --k 0.1 --omega 1 --th 3.5 --measure e1
  %(prog)s sweep    --sweep b_low=5.05:9.95:50 [--rule critical] [--analytic-columns]
  %(prog)s figure   fig2a [parameter flags override the preset base]
  %(prog)s optimize --j1 1 --bl-grid 0.7:10:20 [--search lo:hi] [--analytic]
  %(prog)s selftest [--only CHECK ...]
"""

DEFAULTS: Dict[str, Any] = {
    "bh": FIG2_BASE.b_high,
    "bl": FIG2_BASE.b_low,
    "j1": FIG2_BASE.j1,
    "j2": FIG2_BASE.j2,
    "k": FIG2_BASE.k,
    "omega": FIG2_BASE.omega,
    "th": FIG2_BASE.t_hot,
    "measure": FIG2_BASE.measure.value,
    "format": "csv",
    "out": None,
    "workers": 1,
    "verbosity": 1,
    "sweep": None,
    "rule": None,
    "analytic_columns": False,
    "bl_grid": None,
    "search": None,
    "analytic": False,
}

FLOAT_KEYS = ("bh", "bl", "j1", "j2", "k", "omega", "th")
INT_KEYS = ("workers", "verbosity")
BOOL_KEYS = ("analytic_columns", "analytic")
TRUE_WORDS = ("1", "true", "yes", "on")
FALSE_WORDS = ("0", "false", "no", "off")

OPTIMIZE_COLUMNS = ["b_low", "b_high_star", "w_max", "eta_wmax", "ratio",
                    "one_minus_ratio", "one_minus_sqrt_ratio"]


class UsageError(ValueError):
    '''Command-line or config-file value that cannot be interpreted.'''
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with 1 on usage errors; 2 belongs to selftest."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class CliConfig:
    command: str
    params: ModelParams
    fmt: str = "csv"
    out: Optional[Path] = None
    workers: int = 1
    verbosity: int = 1
    sweep: Optional[Tuple[Axis, float, float, int]] = None
    rule: Optional[CouplingRule] = None
    analytic_columns: bool = False
    figure: Optional[str] = None
    bl_grid: Optional[Tuple[float, float, int]] = None
    search: Optional[Tuple[float, float]] = None
    analytic: bool = False
    only: Tuple[str, ...] = ()


def _log(verbosity: int, level: int, tag: str, message: str) -> None:
    if verbosity >= level:
        print(f"[{tag}] {message}", file=sys.stderr)


def _convert(key: str, value: Any) -> Any:
    if value is None or not isinstance(value, str):
        return value
    text = value.strip()
    try:
        if key in FLOAT_KEYS:
            return float(text)
        if key in INT_KEYS:
            return int(text)
    except ValueError:
        raise UsageError(f"Cannot read '{text}' as a value for {key}") from None
    if key in BOOL_KEYS:
        if text.lower() in TRUE_WORDS:
            return True
        if text.lower() in FALSE_WORDS:
            return False
        raise UsageError(f"Cannot read '{text}' as true/false for {key}")
    return text


def load_config(path: Path) -> Dict[str, Any]:
    """Read `key = value` lines; keys are flag names without the leading dashes.

    Raises:
        UsageError: for a missing file, a malformed line, an unknown key or a bad value.
    """
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"Cannot read config file {path}: {exc.strerror}") from None

    values = {}
    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{number}: unknown key '{key}'")
        try:
            values[key] = _convert(key, value)
        except UsageError as exc:
            raise UsageError(f"{path}:{number}: {exc}") from None
    return values


def _split(text: str, parts: int, what: str) -> List[str]:
    fields = text.split(":")
    if len(fields) != parts:
        raise UsageError(f"{what} must have {parts} ':'-separated fields, got '{text}'")
    return fields


def parse_sweep(text: str) -> Tuple[Axis, float, float, int]:
    """'b_low=5:9:10' -> (Axis.B_LOW, 5.0, 9.0, 10)."""
    if "=" not in text:
        raise UsageError(f"--sweep must look like axis=start:stop:steps, got '{text}'")
    name, span = text.split("=", 1)
    try:
        axis = Axis(name.strip().lower())
    except ValueError:
        known = ", ".join(a.value for a in Axis)
        raise UsageError(f"Unknown sweep axis '{name}' (known: {known})") from None
    start, stop, steps = _split(span, 3, "--sweep range")
    try:
        return axis, float(start), float(stop), int(steps)
    except ValueError:
        raise UsageError(f"Cannot read sweep range '{span}'") from None


def parse_grid(text: str) -> Tuple[float, float, int]:
    start, stop, steps = _split(text, 3, "--bl-grid")
    try:
        return float(start), float(stop), int(steps)
    except ValueError:
        raise UsageError(f"Cannot read --bl-grid '{text}'") from None


def parse_search(text: str) -> Tuple[float, float]:
    lo, hi = _split(text, 2, "--search")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise UsageError(f"Cannot read --search '{text}'") from None


def resolve_config(args: argparse.Namespace) -> CliConfig:
    """Defaults, then the --config file, then explicit flags."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(load_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value

    if merged["format"] not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got '{merged['format']}'")
    if merged["workers"] < 1:
        raise UsageError(f"--workers must be >= 1, got {merged['workers']}")

    params = ModelParams(b_high=merged["bh"], b_low=merged["bl"], j1=merged["j1"], j2=merged["j2"],
                         k=merged["k"], omega=merged["omega"], t_hot=merged["th"],
                         measure=Measure.parse(merged["measure"]))
    rule = None
    if merged["rule"] is not None:
        try:
            rule = CouplingRule(str(merged["rule"]).lower())
        except ValueError:
            raise UsageError(f"Unknown rule '{merged['rule']}' (known: critical)") from None

    return CliConfig(
        command=args.command,
        params=params,
        fmt=merged["format"],
        out=Path(merged["out"]) if merged["out"] else None,
        workers=merged["workers"],
        verbosity=merged["verbosity"],
        sweep=parse_sweep(merged["sweep"]) if merged["sweep"] else None,
        rule=rule,
        analytic_columns=bool(merged["analytic_columns"]),
        figure=getattr(args, "figure_id", None),
        bl_grid=parse_grid(merged["bl_grid"]) if merged["bl_grid"] else None,
        search=parse_search(merged["search"]) if merged["search"] else None,
        analytic=bool(merged["analytic"]),
        only=tuple(getattr(args, "only", None) or ()),
    )


def _emit(config: CliConfig, text: str) -> None:
    if config.out is None:
        sys.stdout.write(text)
        return
    config.out.write_text(text)
    _log(config.verbosity, 1, "OK", f"Wrote {config.out}")


def cycle_frame(p: ModelParams) -> pd.DataFrame:
    """One flat record with every CycleResult field."""
    r = run_otto(p)
    record = {
        "axis": "none", "b_low": p.b_low, "b_high": p.b_high, "j1": p.j1, "j2": p.j2, "k": p.k,
        "omega": p.omega, "t_hot": p.t_hot, "measure": p.measure.value,
        "q_hot": r.q_hot, "w1": r.w1, "q_cold": r.q_cold, "w2": r.w2, "w_net": r.w_net,
        "eta": r.eta, "s_vn": r.entropy_heating, "regime": r.regime.value, "error": "",
    }
    for i, value in enumerate(r.pops_hot.p, start=1):
        record[f"pops_hot_{i}"] = value
    for i, value in enumerate(r.pops_cold.p, start=1):
        record[f"pops_cold_{i}"] = value
    record["entropy_system"] = r.entropy_system
    record["ground_high"] = ground_level(p.b_high, p.j1)
    record["ground_low"] = ground_level(p.b_low, p.j1)
    record["inverted_fields"] = r.inverted_fields
    return pd.DataFrame([record], columns=list(record))


def wmax_frame(results: Sequence[WmaxResult]) -> pd.DataFrame:
    records = [[r.b_low, r.b_high_star, r.w_max, r.eta_at_wmax, r.ratio,
                r.one_minus_ratio, r.one_minus_sqrt_ratio] for r in results]
    return pd.DataFrame(records, columns=OPTIMIZE_COLUMNS)


def _run_cycle(config: CliConfig) -> int:
    p = config.params
    if p.inverted_fields:
        _log(config.verbosity, 2, "WARN", f"b_high={p.b_high} < b_low={p.b_low}: inverted fields")
    frame = cycle_frame(p)
    _emit(config, write_frame(frame, config.fmt))
    _log(config.verbosity, 1, "DONE", f"Cycle at b_high={p.b_high}, b_low={p.b_low}: {frame.at[0, 'regime']}")
    return 0


def _sweep_out(config: CliConfig, spec: SweepSpec) -> int:
    rows = run_sweep(spec, workers=config.workers, progress=config.verbosity >= 3,
                     analytic=config.analytic_columns)
    for row in rows:
        if row.error:
            _log(config.verbosity, 2, "WARN", f"{spec.axis.value}={getattr(row, spec.axis.value)}: {row.error}")
    inverted = sum(1 for row in rows if row.inverted_fields)
    if inverted:
        _log(config.verbosity, 2, "WARN", f"{inverted} rows have b_high < b_low: inverted fields")
    frame = rows_frame(rows, analytic=config.analytic_columns, flags=config.fmt == "json")
    _emit(config, write_frame(frame, config.fmt))
    failed = sum(1 for row in rows if row.error)
    _log(config.verbosity, 1, "DONE", f"{len(rows)} rows over {spec.axis.value}, {failed} with errors")
    return 0


def _run_sweep(config: CliConfig) -> int:
    if config.sweep is None:
        raise UsageError("sweep needs --sweep axis=start:stop:steps")
    axis, start, stop, steps = config.sweep
    return _sweep_out(config, SweepSpec(config.params, axis, start, stop, steps, config.rule).validate())


def _optimize_out(config: CliConfig, job: OptimizerJob) -> int:
    mode = "closed form" if job.analytic else "numeric"
    _log(config.verbosity, 1, "INFO", f"Maximizing W over b_high at {job.steps} b_low values ({mode})")
    results = run_job(job, progress=config.verbosity >= 3)
    for r in results:
        if r.boundary:
            _log(config.verbosity, 2, "WARN", f"b_low={r.b_low}: maximum on the search boundary")
    _emit(config, write_frame(wmax_frame(results), config.fmt))
    _log(config.verbosity, 1, "DONE", f"{len(results)} optimizer rows")
    return 0


def _run_figure(config: CliConfig) -> int:
    preset = figure_preset(config.figure, base=config.params)
    _log(config.verbosity, 1, "INFO", f"Figure {config.figure}")
    if isinstance(preset, OptimizerJob):
        return _optimize_out(config, replace(preset, search=config.search, analytic=config.analytic))
    return _sweep_out(config, preset)


def _run_optimize(config: CliConfig) -> int:
    if config.bl_grid is None:
        raise UsageError("optimize needs --bl-grid start:stop:steps")
    start, stop, steps = config.bl_grid
    if steps < 1:
        raise InvalidSweep(f"--bl-grid needs at least one point, got {steps}")
    job = OptimizerJob(config.params, b_low_start=start, b_low_stop=stop, steps=steps,
                       search=config.search, analytic=config.analytic)
    return _optimize_out(config, job)


def _run_selftest(config: CliConfig) -> int:
    table = selftest.run_checks(config.only or None)
    print(table.to_string(index=False))
    if selftest.all_passed(table):
        _log(config.verbosity, 1, "OK", f"{len(table)} checks passed")
        return 0
    failed = ", ".join(table.loc[table["status"] == "fail", "check"])
    _log(config.verbosity, 0, "FAIL", f"Failed checks: {failed}")
    return 2


COMMANDS = {
    "cycle": _run_cycle,
    "sweep": _run_sweep,
    "figure": _run_figure,
    "optimize": _run_optimize,
    "selftest": _run_selftest,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model parameters (k_B T and every field in energy units)")
    group.add_argument("--bh", type=float, help="Hot-stroke field B_H (default 10)")
    group.add_argument("--bl", type=float, help="Cold-stroke field B_L (default 6)")
    group.add_argument("--j1", type=float, help="Ion 1 - ion 2 exchange (default 10)")
    group.add_argument("--j2", type=float, help="Ion 2 - ancilla exchange (default 10)")
    group.add_argument("--k", type=float, help="Ion-phonon coupling (default 0.1)")
    group.add_argument("--omega", type=float, help="Phonon frequency (default 1)")
    group.add_argument("--th", type=float, help="Hot-bath temperature k_B T_H (default 3.5)")
    group.add_argument("--measure", type=str, help="Cooling projection basis: e1 or e3 (default e1)")

    parser.add_argument("--config", type=Path, help="File of 'key = value' lines; flags override it")
    parser.add_argument("--out", type=str, help="Output file (default: standard output)")
    parser.add_argument("--format", type=str, choices=["csv", "json"], help="Output format (default csv)")
    parser.add_argument("--verbosity", "-v", type=int,
                        help="0 errors only, 1 summary, 2 warnings, 3 progress bars (default 1)")


def create_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ion_otto", description=DESCRIPTION,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    cycle = commands.add_parser("cycle", help="One engine cycle, printed as a single record")
    _add_common(cycle)

    sweep = commands.add_parser("sweep", help="Sweep one parameter on a linear grid")
    _add_common(sweep)
    sweep.add_argument("--sweep", type=str, help="axis=start:stop:steps, axis one of "
                       + ", ".join(a.value for a in Axis))
    sweep.add_argument("--rule", type=str, help="'critical' pins b_low = j1/2 at every point")
    sweep.add_argument("--workers", type=int, help="Worker processes (default 1)")
    sweep.add_argument("--analytic-columns", dest="analytic_columns", action="store_true", default=None,
                       help="Append closed-form eta_analytic and w_analytic columns")

    figure = commands.add_parser("figure", help="Regenerate a figure's data set")
    _add_common(figure)
    figure.add_argument("figure_id", type=str, help="fig2a, fig2b, fig3a, ..., fig10b")
    figure.add_argument("--workers", type=int, help="Worker processes (default 1)")
    figure.add_argument("--analytic-columns", dest="analytic_columns", action="store_true", default=None,
                        help="Append closed-form eta_analytic and w_analytic columns")
    figure.add_argument("--search", type=str, help="lo:hi b_high search interval for fig10a/fig10b")
    figure.add_argument("--analytic", action="store_true", default=None,
                        help="Use the closed-form W for fig10a/fig10b")

    optimize = commands.add_parser("optimize", help="Efficiency at maximum work along a b_low grid")
    _add_common(optimize)
    optimize.add_argument("--bl-grid", dest="bl_grid", type=str, help="start:stop:steps of b_low")
    optimize.add_argument("--search", type=str, help="lo:hi b_high search interval")
    optimize.add_argument("--analytic", action="store_true", default=None, help="Use the closed-form W")

    check = commands.add_parser("selftest", help="Run the acceptance checks")
    check.add_argument("--only", action="append", help="Run only this check (repeatable)")
    check.add_argument("--verbosity", "-v", type=int, help="0 errors only, 1 summary (default 1)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = resolve_config(args)
        return COMMANDS[config.command](config)
    except (ValueError, ArithmeticError) as exc:
        _log(0, 0, "FAIL", str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
