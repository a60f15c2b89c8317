import numpy as np
import pytest

from pdscatter import (
    Candidate2D,
    DataMatrix,
    EllipticalModel,
    WeightSpec,
    c_constants,
    default_cutoff,
    normal_law,
)


@pytest.fixture(scope="session")
def law():
    return normal_law()


@pytest.fixture(scope="session")
def w1_default():
    return WeightSpec(order=1, cutoff=default_cutoff(2), steepness=2.0)


@pytest.fixture(scope="session")
def w2_default():
    return WeightSpec(order=2, cutoff=default_cutoff(2), steepness=2.0)


@pytest.fixture(scope="session")
def consts_d2(w2_default):
    # shared across modules: d=2 constants at the benchmark parameters
    return c_constants(2, w2_default)


@pytest.fixture(scope="session")
def model2(law):
    return EllipticalModel([0.0, 0.0], np.eye(2), law)


@pytest.fixture(scope="session")
def data40():
    rng = np.random.default_rng(424242)
    return DataMatrix(rng.standard_normal((40, 2)))


@pytest.fixture(scope="session")
def exact2d():
    return Candidate2D(refine=True)
