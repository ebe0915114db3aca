import numpy as np
import pytest

from fdmlink.loss import LossModel
from fdmlink.synthesis import FilterSpec, synthesize


@pytest.fixture(scope="session")
def design_a():
    """20 MHz pass / 50 MHz stop, 8 pF pin + 10 pF shunt, 4.7 uH coupling."""
    return synthesize(
        FilterSpec(f_mod=20e6, f_stop=50e6, c_io=8e-12, shunt_c=10e-12, xm_inductance=4.7e-6)
    )


@pytest.fixture(scope="session")
def design_b():
    """50 MHz pass / 20 MHz stop, 8 pF pin, 1.0 uH coupling."""
    return synthesize(FilterSpec(f_mod=50e6, f_stop=20e6, c_io=8e-12, xm_inductance=1.0e-6))


@pytest.fixture(scope="session")
def q40():
    return LossModel()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260814)
