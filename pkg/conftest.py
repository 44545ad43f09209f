import numpy as np
import pytest


@pytest.fixture(autouse=True)
def _numpy_legacy_scalar_repr():
    # Doctests expect numpy 1.x scalar reprs (``True`` rather than ``np.True_``).
    if int(np.__version__.split('.')[0]) >= 2:
        opts = np.get_printoptions()
        np.set_printoptions(legacy='1.25')
        yield
        np.set_printoptions(**opts)
    else:
        yield
