"""Closed forms of the weak-coupling limit (k -> 0, j2 = 0).

With x = 2*b_high/t_hot and y = j1/t_hot:

    Z   = cosh(x) + cosh(y)
    f1  = 1 - sinh(x)/Z
    f2  = (j1/(2*b_high)) * sinh(y)/Z
    W   = c * (b_high - b_low) * f1
    eta = (1 - b_low/b_high) * f1/(f1 - f2) = W / (c * b_high * (f1 - f2))

Work prefactor c. The printed closed form for W carries c = 1. Summing the
heat and work strokes directly with the four H_S energies and Boltzmann
occupations gives Q_H + Q_L = 2 (b_high - b_low) f1, and Q_H = 2 b_high (f1 - f2).
`oracle_work` is that direct sum; it agrees with c = 2 to rounding, so
WORK_PREFACTOR = 2. The efficiency does not depend on c.

cosh/sinh are evaluated with the largest exponent factored out, so large
fields or small temperatures do not overflow.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .cycle import measurement_populations, stroke_energetics
from .model import Measure, critical_field, system_eigensystem
from .thermo import Populations

WORK_PREFACTOR = 2.0
MAX_EXPONENT = 700.0


class OutOfEngineDomain(ValueError):
    '''Closed forms are only valid for b_high > b_low >= j1/2.'''
    pass


@dataclass(frozen=True)
class AnalyticPoint:
    z: float
    f1: float
    f2: float
    w: float
    eta: float


def _scaled_cosh(x: float, shift: float) -> float:
    return 0.5 * (math.exp(x - shift) + math.exp(-x - shift))


def _scaled_sinh(x: float, shift: float) -> float:
    return 0.5 * (math.exp(x - shift) - math.exp(-x - shift))


def analytic_f1_f2(j1: float, b_high: float, t_hot: float) -> Tuple[float, float, float]:
    """Return (f1, f2, z) for the given coupling, hot field and temperature."""
    if not t_hot > 0 or not b_high > 0:
        raise OutOfEngineDomain(f"Need t_hot > 0 and b_high > 0, got t_hot={t_hot}, b_high={b_high}")
    x = 2.0 * b_high / t_hot
    y = j1 / t_hot
    shift = max(abs(x), abs(y))
    z_scaled = _scaled_cosh(x, shift) + _scaled_cosh(y, shift)
    # 1 - sinh(x)/Z written without the cancellation
    f1 = (math.exp(-x - shift) + _scaled_cosh(y, shift)) / z_scaled
    f2 = (j1 / (2.0 * b_high)) * _scaled_sinh(y, shift) / z_scaled
    z = z_scaled * math.exp(shift) if shift < MAX_EXPONENT else math.inf
    return f1, f2, z


def _check_domain(j1: float, b_high: float, b_low: float) -> None:
    if not b_high >= b_low >= critical_field(j1):
        raise OutOfEngineDomain(
            f"Closed forms need b_high >= b_low >= j1/2, got b_high={b_high}, b_low={b_low}, j1={j1}")


def analytic_eta(j1: float, b_high: float, b_low: float, t_hot: float) -> float:
    """Weak-coupling efficiency (1 - b_low/b_high) f1/(f1 - f2).

    Raises:
        OutOfEngineDomain: outside b_high >= b_low >= j1/2.
        ZeroDivisionError: if f1 == f2.
    """
    _check_domain(j1, b_high, b_low)
    f1, f2, _ = analytic_f1_f2(j1, b_high, t_hot)
    if f1 == f2:
        raise ZeroDivisionError(f"f1 == f2 == {f1:.6g}; efficiency undefined")
    return (1.0 - b_low / b_high) * f1 / (f1 - f2)


def analytic_work(j1: float, b_high: float, b_low: float, t_hot: float) -> float:
    """Weak-coupling work output WORK_PREFACTOR (b_high - b_low) f1."""
    _check_domain(j1, b_high, b_low)
    f1, _, _ = analytic_f1_f2(j1, b_high, t_hot)
    return WORK_PREFACTOR * (b_high - b_low) * f1


def analytic_point(j1: float, b_high: float, b_low: float, t_hot: float) -> AnalyticPoint:
    f1, f2, z = analytic_f1_f2(j1, b_high, t_hot)
    return AnalyticPoint(z=z, f1=f1, f2=f2,
                         w=analytic_work(j1, b_high, b_low, t_hot),
                         eta=analytic_eta(j1, b_high, b_low, t_hot))


def boltzmann_populations(b: float, j1: float, t: float) -> Populations:
    """Scalar Boltzmann occupations of the H_S levels at field b and temperature t."""
    energies, _ = system_eigensystem(b, j1)
    weights = np.exp(-(energies - energies.min()) / t)
    return Populations(tuple(weights / weights.sum()))


def oracle_work(j1: float, b_high: float, b_low: float, t_hot: float) -> float:
    """Work output from the stroke sums with Boltzmann occupations and |E1> measurement."""
    e_high, _ = system_eigensystem(b_high, j1)
    e_low, _ = system_eigensystem(b_low, j1)
    strokes = stroke_energetics(boltzmann_populations(b_high, j1, t_hot),
                                measurement_populations(Measure.E1), e_high, e_low)
    return strokes.w_net
