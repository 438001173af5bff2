import numpy as np
import pytest

from sqlab import (
    BallFamily,
    GridSpec,
    HolderClassSpec,
    MorreyParams,
    SampledField,
    TimeLadder,
    WeightSpec,
)


@pytest.fixture
def grid257():
    return GridSpec(1, 4.0, 257)


@pytest.fixture
def grid65():
    return GridSpec(1, 4.0, 65)


@pytest.fixture
def grid2d():
    return GridSpec(2, 2.0, 33)


@pytest.fixture
def ladder_small(grid65):
    return TimeLadder(grid65.spacing, 2.0, 5)


@pytest.fixture
def dict_spec():
    return HolderClassSpec(0.5, 33, "dictionary")


@pytest.fixture
def lp_spec():
    return HolderClassSpec(0.5, 33, "lp")


@pytest.fixture
def power_weight():
    return WeightSpec.power(0.5)


@pytest.fixture
def morrey_half():
    return MorreyParams(2.0, 0.5)


@pytest.fixture
def dyadic_family(grid257):
    return BallFamily.dyadic(grid257)


@pytest.fixture
def smooth_field(grid65):
    x = grid65.axis
    return SampledField(grid65, np.exp(-(x**2)) * np.sin(3.0 * x) * (np.abs(x) < 3.0))
