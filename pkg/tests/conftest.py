import os
import sys

import numpy as np
import pytest

# allow running the suite from a source checkout without installation
_SRC = os.path.join(os.path.dirname(__file__), os.pardir, "src")
if os.path.isdir(_SRC):
    try:
        import cosserat  # noqa: F401
    except ImportError:
        sys.path.insert(0, os.path.abspath(_SRC))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_rotation(rng):
    from cosserat.tensors import exp_so3

    w = rng.uniform(-1.0, 1.0, size=3)
    w *= rng.uniform(0.0, 2.9) / max(np.linalg.norm(w), 1e-12)
    return exp_so3(w)
