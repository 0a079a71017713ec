import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ion_otto.model import Measure, ModelParams  # noqa: E402


@pytest.fixture
def fig2_params() -> ModelParams:
    """B_H=10, B_L=6, J1=J2=10, k=0.1, omega=1, k_B T_H=3.5, |E1> measurement."""
    return ModelParams(b_high=10.0, b_low=6.0, j1=10.0, j2=10.0, k=0.1, omega=1.0, t_hot=3.5,
                       measure=Measure.E1)


@pytest.fixture
def weak_params() -> ModelParams:
    """Weak-coupling limit where the closed forms hold."""
    return ModelParams(b_high=10.0, b_low=6.0, j1=10.0, j2=0.0, k=1e-6, omega=1.0, t_hot=3.5)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
