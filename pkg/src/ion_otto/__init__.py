"""Measurement-based quantum Otto engine on a trapped-ion chain."""

from .analytic import analytic_eta, analytic_work
from .cycle import CycleResult, Regime, run_otto
from .model import Measure, ModelParams, critical_field
from .optimize import OptimizerJob, WmaxResult, eta_wmax_curve, maximize_work_over_bh
from .sweep import Axis, CouplingRule, Figure, SweepSpec, figure_preset, run_sweep

__all__ = [
    "analytic_eta",
    "analytic_work",
    "CycleResult",
    "Regime",
    "run_otto",
    "Measure",
    "ModelParams",
    "critical_field",
    "OptimizerJob",
    "WmaxResult",
    "eta_wmax_curve",
    "maximize_work_over_bh",
    "Axis",
    "CouplingRule",
    "Figure",
    "SweepSpec",
    "figure_preset",
    "run_sweep",
]
