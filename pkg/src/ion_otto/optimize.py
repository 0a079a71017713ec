"""Efficiency at maximum work: maximize W over b_high for fixed b_low, j1, t_hot.

W(b_high) is only empirically unimodal, so a 129-point grid brackets the best
point first and a golden-section search refines inside the bracket.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .analytic import analytic_eta, analytic_work
from .cycle import run_otto
from .model import ModelParams, critical_field

GRID_POINTS = 129
REL_TOL = 1e-6
LO_OFFSET = 1e-6

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


class EmptyInterval(ValueError):
    '''Search interval is empty or lies below the engine domain.'''
    pass


class NoPositiveWork(ArithmeticError):
    '''W <= 0 everywhere in the search interval.'''
    pass


@dataclass(frozen=True)
class WmaxResult:
    b_low: float
    b_high_star: float
    w_max: float
    eta_at_wmax: float
    ratio: float
    boundary: bool

    @property
    def one_minus_ratio(self) -> float:
        return 1.0 - self.ratio

    @property
    def one_minus_sqrt_ratio(self) -> float:
        return 1.0 - math.sqrt(self.ratio)


@dataclass(frozen=True)
class OptimizerJob:
    """A Wmax curve: one maximization per b_low value on a linear grid."""
    base: ModelParams
    b_low_start: float
    b_low_stop: float
    steps: int
    search: Optional[Tuple[float, float]] = None
    analytic: bool = False

    def b_low_grid(self) -> np.ndarray:
        return np.linspace(self.b_low_start, self.b_low_stop, self.steps)


def default_search(b_low: float, j1: float, t_hot: float) -> Tuple[float, float]:
    lo = max(b_low, critical_field(j1)) + LO_OFFSET
    hi = 10.0 * max(b_low, j1, t_hot)
    return lo, hi


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float) -> Tuple[float, float]:
    """Golden-section search for the maximum of f on [a, b]; returns (x, f(x))."""
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)

    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    return (c, yc) if yc > yd else (d, yd)


def _objectives(p: ModelParams, analytic: bool) -> Tuple[Callable[[float], float], Callable[[float], float]]:
    if analytic:
        return (lambda bh: analytic_work(p.j1, bh, p.b_low, p.t_hot),
                lambda bh: analytic_eta(p.j1, bh, p.b_low, p.t_hot))

    def work(bh: float) -> float:
        return run_otto(replace(p, b_high=bh)).w_net

    def eta(bh: float) -> float:
        value = run_otto(replace(p, b_high=bh)).eta
        return math.nan if value is None else value

    return work, eta


def maximize_work_over_bh(p: ModelParams, search: Optional[Tuple[float, float]] = None,
                          analytic: bool = False) -> WmaxResult:
    """Locate b_high maximizing W at fixed b_low, j1, t_hot and report eta there.

    `p.b_high` is ignored. W comes from run_otto, or from the closed form when
    `analytic` is set.

    Raises:
        EmptyInterval: if hi <= lo or lo lies below max(b_low, j1/2).
        NoPositiveWork: if W <= 0 on every grid point.
    """
    lo, hi = search if search is not None else default_search(p.b_low, p.j1, p.t_hot)
    floor = max(p.b_low, critical_field(p.j1))
    if not hi > lo:
        raise EmptyInterval(f"Search interval ({lo}, {hi}) is empty")
    if lo < floor:
        raise EmptyInterval(f"Search interval starts at {lo}, below max(b_low, j1/2) = {floor}")

    work, eta = _objectives(p, analytic)
    grid = np.linspace(lo, hi, GRID_POINTS)
    values = np.array([work(float(x)) for x in grid])
    if not np.any(values > 0):
        raise NoPositiveWork(f"W <= 0 for all b_high in ({lo}, {hi}) at b_low={p.b_low}, j1={p.j1}")

    best = int(np.argmax(values))
    boundary = best in (0, GRID_POINTS - 1)
    left = float(grid[max(best - 1, 0)])
    right = float(grid[min(best + 1, GRID_POINTS - 1)])
    x_star, w_star = golden_section_max(work, left, right, REL_TOL * (hi - lo))
    if w_star < values[best]:
        x_star, w_star = float(grid[best]), float(values[best])

    return WmaxResult(
        b_low=p.b_low,
        b_high_star=x_star,
        w_max=w_star,
        eta_at_wmax=eta(x_star),
        ratio=p.b_low / x_star,
        boundary=boundary,
    )


def eta_wmax_curve(p: ModelParams, b_low_grid: Sequence[float],
                   search: Optional[Tuple[float, float]] = None, analytic: bool = False,
                   progress: bool = False) -> List[WmaxResult]:
    """One WmaxResult per b_low; j1 and t_hot come from `p`."""
    results = []
    for b_low in tqdm(list(b_low_grid), desc="eta_Wmax", disable=not progress):
        b_low = float(b_low)
        if b_low < critical_field(p.j1):
            raise EmptyInterval(f"b_low={b_low} lies below the critical field {critical_field(p.j1)}")
        results.append(maximize_work_over_bh(replace(p, b_low=b_low), search=search, analytic=analytic))
    return results


def run_job(job: OptimizerJob, progress: bool = False) -> List[WmaxResult]:
    return eta_wmax_curve(job.base, job.b_low_grid(), search=job.search,
                          analytic=job.analytic, progress=progress)
