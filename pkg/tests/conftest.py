import numpy as np
import pytest

import mskp


@pytest.fixture(scope="session")
def halfline_op():
    return mskp.make_operator(mskp.OperatorSpec("indicator", 1, set=mskp.halfline(0.0)))


@pytest.fixture(scope="session")
def orth_pi(halfline_op):
    return mskp.orthogonal(halfline_op.domain)


@pytest.fixture()
def step_m():
    """The three-piece step input held on [0, 3]."""
    return mskp.CadlagPath.step([0.0, 1.0, 2.0], [[1.0], [-2.0], [0.5]], horizon=3.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
