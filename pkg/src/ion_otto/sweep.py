"""Single-axis parameter sweeps, figure presets and flat CSV/JSON records."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from .analytic import analytic_eta, analytic_work
from .cycle import run_otto
from .model import Measure, ModelParams, critical_field
from .optimize import OptimizerJob

CSV_COLUMNS = [
    "axis", "b_low", "b_high", "j1", "j2", "k", "omega", "t_hot", "measure",
    "q_hot", "w1", "q_cold", "w2", "w_net", "eta", "s_vn", "regime", "error",
]
ANALYTIC_COLUMNS = ["eta_analytic", "w_analytic"]
JSON_COLUMNS = ["inverted_fields"]
FLOAT_FORMAT = "%.12g"
PRESET_MARGIN = 0.05

FIG2_BASE = ModelParams(b_high=10.0, b_low=6.0, j1=10.0, j2=10.0, k=0.1, omega=1.0, t_hot=3.5,
                        measure=Measure.E1)


class UnknownFigure(ValueError):
    '''No preset exists for the requested figure id.'''
    pass


class InvalidSweep(ValueError):
    '''Sweep needs at least two steps and distinct endpoints.'''
    pass


class Axis(Enum):
    B_LOW = "b_low"
    B_HIGH = "b_high"
    J1 = "j1"
    J2 = "j2"
    K = "k"
    T_HOT = "t_hot"


class CouplingRule(Enum):
    """Constraint applied after the axis value: 'critical' pins b_low = j1/2."""
    CRITICAL = "critical"


@dataclass(frozen=True)
class SweepSpec:
    base: ModelParams
    axis: Axis
    start: float
    stop: float
    steps: int
    rule: Optional[CouplingRule] = None

    def validate(self) -> "SweepSpec":
        if int(self.steps) != self.steps or self.steps < 2:
            raise InvalidSweep(f"steps must be an integer >= 2, got {self.steps}")
        if self.start == self.stop:
            raise InvalidSweep(f"start and stop must differ, both are {self.start}")
        return self

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.steps))

    def point(self, value: float) -> ModelParams:
        params = replace(self.base, **{self.axis.value: float(value)})
        if self.rule is CouplingRule.CRITICAL:
            params = replace(params, b_low=critical_field(params.j1))
        return params


@dataclass(frozen=True)
class SweepRow:
    """One grid point: parameters, cycle scalars and optional closed-form columns."""
    axis: str
    b_low: float
    b_high: float
    j1: float
    j2: float
    k: float
    omega: float
    t_hot: float
    measure: str
    q_hot: Optional[float] = None
    w1: Optional[float] = None
    q_cold: Optional[float] = None
    w2: Optional[float] = None
    w_net: Optional[float] = None
    eta: Optional[float] = None
    s_vn: Optional[float] = None
    regime: str = ""
    error: str = ""
    eta_analytic: Optional[float] = None
    w_analytic: Optional[float] = None
    inverted_fields: bool = False


def _analytic_columns(p: ModelParams) -> Tuple[Optional[float], Optional[float]]:
    """Closed-form eta and W where the weak-coupling limit applies."""
    if p.j2 != 0 or p.measure is not Measure.E1 or not p.b_high > p.b_low >= critical_field(p.j1):
        return None, None
    try:
        return analytic_eta(p.j1, p.b_high, p.b_low, p.t_hot), analytic_work(p.j1, p.b_high, p.b_low, p.t_hot)
    except (ValueError, ArithmeticError):
        return None, None


def evaluate_point(axis: str, p: ModelParams, analytic: bool = False) -> SweepRow:
    """Run one cycle; any model or numerical error is recorded in the row instead of raised."""
    row = SweepRow(axis=axis, b_low=p.b_low, b_high=p.b_high, j1=p.j1, j2=p.j2, k=p.k,
                   omega=p.omega, t_hot=p.t_hot, measure=p.measure.value,
                   inverted_fields=p.inverted_fields)
    try:
        result = run_otto(p)
    except (ValueError, ArithmeticError) as exc:
        return replace(row, error=f"{type(exc).__name__}: {exc}")

    eta_analytic, w_analytic = _analytic_columns(p) if analytic else (None, None)
    return replace(row, q_hot=result.q_hot, w1=result.w1, q_cold=result.q_cold, w2=result.w2,
                   w_net=result.w_net, eta=result.eta, s_vn=result.entropy_heating,
                   regime=result.regime.value, eta_analytic=eta_analytic, w_analytic=w_analytic)


def _evaluate_job(job: Tuple[str, ModelParams, bool]) -> SweepRow:
    return evaluate_point(*job)


def run_sweep(spec: SweepSpec, workers: int = 1, progress: bool = False,
              analytic: bool = False) -> List[SweepRow]:
    """Evaluate every grid point of `spec`; rows come back in axis order.

    With workers > 1 the points are spread over a process pool; the output is
    identical to the sequential run.
    """
    spec.validate()
    jobs = [(spec.axis.value, spec.point(value), analytic) for value in spec.values()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(tqdm(pool.map(_evaluate_job, jobs), total=len(jobs),
                             desc=spec.axis.value, disable=not progress))
    else:
        rows = [_evaluate_job(job) for job in tqdm(jobs, desc=spec.axis.value, disable=not progress)]
    return rows


class Figure(Enum):
    FIG2A = "fig2a"
    FIG2B = "fig2b"
    FIG3A = "fig3a"
    FIG3B = "fig3b"
    FIG4 = "fig4"
    FIG5 = "fig5"
    FIG6 = "fig6"
    FIG7 = "fig7"
    FIG8 = "fig8"
    FIG9A = "fig9a"
    FIG9B = "fig9b"
    FIG10A = "fig10a"
    FIG10B = "fig10b"


def _above_critical(base: ModelParams, steps: int = 100) -> SweepSpec:
    return SweepSpec(base, Axis.B_LOW, critical_field(base.j1) + PRESET_MARGIN,
                     base.b_high - PRESET_MARGIN, steps)


def _b_high_sweep(base: ModelParams) -> SweepSpec:
    base = replace(base, b_low=6.0)
    return SweepSpec(base, Axis.B_HIGH, base.b_low + PRESET_MARGIN, 30.0, 100)


def figure_preset(figure: Union[str, Figure], base: ModelParams = FIG2_BASE) -> Union[SweepSpec, OptimizerJob]:
    """Parameter set and abscissa of a figure; `base` defaults to the Fig. 2 parameters.

    Figures that fix a parameter (fig5's J2, fig7's J2, fig10's J1, b_low=6 of
    fig4/fig9b) override it on top of `base`.

    Raises:
        UnknownFigure: for an id that has no preset.
    """
    try:
        figure = Figure(figure.lower()) if isinstance(figure, str) else Figure(figure)
    except ValueError:
        known = ", ".join(f.value for f in Figure)
        raise UnknownFigure(f"Unknown figure '{figure}' (known: {known})") from None

    if figure in (Figure.FIG2A, Figure.FIG3A, Figure.FIG3B, Figure.FIG9A):
        return _above_critical(replace(base, measure=Measure.E1))
    if figure is Figure.FIG2B:
        return SweepSpec(replace(base, measure=Measure.E3), Axis.B_LOW, PRESET_MARGIN,
                         critical_field(base.j1) - PRESET_MARGIN, 100)
    if figure in (Figure.FIG4, Figure.FIG9B):
        return _b_high_sweep(replace(base, measure=Measure.E1))
    if figure is Figure.FIG5:
        return SweepSpec(replace(base, j2=0.1, b_low=6.0), Axis.J1, 0.0, 10.0, 101)
    if figure is Figure.FIG6:
        return SweepSpec(base, Axis.J1, 0.1, 19.9, 100, CouplingRule.CRITICAL)
    if figure is Figure.FIG7:
        return SweepSpec(replace(base, j2=0.0), Axis.J1, 0.1, 19.9, 100, CouplingRule.CRITICAL)
    if figure is Figure.FIG8:
        return SweepSpec(base, Axis.J2, 0.0, 10.0, 51, CouplingRule.CRITICAL)
    if figure is Figure.FIG10A:
        return OptimizerJob(replace(base, j1=1.0), b_low_start=0.7, b_low_stop=10.0, steps=20)
    return OptimizerJob(replace(base, j1=10.0), b_low_start=6.0, b_low_stop=20.0, steps=15)


def rows_frame(rows: List[SweepRow], analytic: bool = False, flags: bool = False) -> pd.DataFrame:
    """Row table; `flags` appends the boolean columns that only the JSON records carry."""
    columns = CSV_COLUMNS + (ANALYTIC_COLUMNS if analytic else []) + (JSON_COLUMNS if flags else [])
    return pd.DataFrame([asdict(row) for row in rows], columns=columns)


def write_frame(frame: pd.DataFrame, fmt: str = "csv") -> str:
    """Serialize a record table: CSV with 12 significant digits, or a JSON array of objects."""
    if fmt == "json":
        return frame.to_json(orient="records", double_precision=15) + "\n"
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")


def to_csv(rows: List[SweepRow], analytic: bool = False) -> str:
    """Header plus one line per row; missing eta and error-row results are empty fields."""
    return write_frame(rows_frame(rows, analytic=analytic), "csv")


def to_json(rows: List[SweepRow], analytic: bool = False) -> str:
    return write_frame(rows_frame(rows, analytic=analytic, flags=True), "json")
