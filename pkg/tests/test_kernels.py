"""Agreement between the numpy kernels and the compiled core.

The compiled extension is optional; these tests are skipped when only
the numpy backend is available.
"""

import numpy as np
import pytest

from cosserat import _kernels
from cosserat._kernels import _numpy as knp

_core = pytest.importorskip(
    "cosserat._kernels._core", reason="compiled kernel core not built"
)

PARAMS_P2 = (1.3, 0.7, 1.9, 1.1, 1.2, 0.9, 0.6, 2.0, 0.3, 0.2, 0.1)
PARAMS_P4 = (1.3, 0.7, 1.9, 1.1, 1.2, 0.9, 0.6, 4.0, 0.0, 0.0, 0.0)
PARAMS_P3 = (0.8, 1.7, 0.9, 0.7, 1.4, 1.1, 1.3, 3.0, 0.0, 0.0, 0.0)


@pytest.fixture
def batch(rng):
    n = 257
    w = rng.standard_normal((n, 3))
    r = knp.exp_so3_batch(w)
    return {
        "w": w,
        "r": r,
        "f": np.eye(3) + 0.4 * rng.standard_normal((n, 3, 3)),
        "dr": rng.standard_normal((n, 3, 3, 3)),
        "e": 0.5 * rng.standard_normal((n, 3, 3)),
        "k": 0.5 * rng.standard_normal((n, 3, 3)),
    }


def test_backend_is_reported():
    assert _kernels.backend_name() in ("numpy", "compiled")
    assert _kernels.numpy_backend() is knp


def test_strain_and_stretch(batch):
    assert np.allclose(
        knp.strain_batch(batch["r"], batch["f"]),
        _core.strain_batch(batch["r"], batch["f"]),
        atol=1e-15,
    )
    assert np.allclose(
        knp.stretch_batch(batch["r"], batch["f"]),
        _core.stretch_batch(batch["r"], batch["f"]),
        atol=1e-15,
    )


@pytest.mark.parametrize("project", [True, False])
def test_slices(batch, project):
    a = knp.slices_batch(batch["r"], batch["dr"], project)
    b = _core.slices_batch(batch["r"], batch["dr"], project)
    assert np.allclose(a, b, atol=1e-15)


def test_dislocation(batch):
    s = knp.slices_batch(batch["r"], batch["dr"])
    assert np.allclose(
        knp.dislocation_from_slices(s), _core.dislocation_from_slices(s), atol=1e-15
    )


def test_measures(batch):
    e1, k1 = knp.measures_batch(batch["r"], batch["f"], batch["dr"])
    e2, k2 = _core.measures_batch(batch["r"], batch["f"], batch["dr"])
    assert np.allclose(e1, e2, atol=1e-15)
    assert np.allclose(k1, k2, atol=1e-15)


@pytest.mark.parametrize("params", [PARAMS_P2, PARAMS_P3, PARAMS_P4])
def test_energy_density(batch, params):
    a = knp.energy_density(batch["e"], batch["k"], *params)
    b = _core.energy_density(batch["e"], batch["k"], *params)
    assert np.allclose(a, b, rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("params", [PARAMS_P2, PARAMS_P3, PARAMS_P4])
def test_energy_derivs(batch, params):
    de1, dk1 = knp.energy_derivs(batch["e"], batch["k"], *params)
    de2, dk2 = _core.energy_derivs(batch["e"], batch["k"], *params)
    assert np.allclose(de1, de2, atol=1e-14)
    assert np.allclose(dk1, dk2, atol=1e-14)


def test_energy_derivs_at_zero_curvature(batch):
    z = np.zeros_like(batch["k"])
    for params in (PARAMS_P2, PARAMS_P3, PARAMS_P4):
        de1, dk1 = knp.energy_derivs(batch["e"], z, *params)
        de2, dk2 = _core.energy_derivs(batch["e"], z, *params)
        assert np.allclose(dk1, dk2, atol=1e-15)
        assert np.allclose(de1, de2, atol=1e-15)


def test_exp_and_retraction(batch):
    assert np.allclose(
        knp.exp_so3_batch(batch["w"]), _core.exp_so3_batch(batch["w"]), atol=1e-15
    )
    small = 1e-6 * batch["w"]
    assert np.allclose(
        knp.exp_so3_batch(small), _core.exp_so3_batch(small), atol=1e-16
    )
    assert np.allclose(
        knp.rotate_step_batch(batch["r"], 0.1 * batch["w"]),
        _core.rotate_step_batch(batch["r"], 0.1 * batch["w"]),
        atol=1e-15,
    )


def test_axl_skew(batch):
    assert np.allclose(
        knp.axl_skew_mat_batch(batch["f"]), _core.axl_skew_mat_batch(batch["f"]), atol=1e-15
    )


def test_noncontiguous_input(batch):
    r_t = batch["r"].transpose(0, 2, 1)  # non-contiguous view
    assert not r_t.flags["C_CONTIGUOUS"]
    assert np.allclose(
        _core.strain_batch(r_t, batch["f"]),
        knp.strain_batch(r_t, batch["f"]),
        atol=1e-15,
    )


def test_forced_numpy_backend():
    import os
    import subprocess
    import sys

    env = dict(os.environ, COSSERAT_FORCE_NUMPY="1")
    out = subprocess.run(
        [sys.executable, "-c", "import cosserat; print(cosserat.backend_name())"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_benchmark_smoke():
    import os
    import subprocess
    import sys

    path = os.path.abspath(
        os.path.join(os.path.dirname(__file__), os.pardir, "benchmarks", "bench_kernels.py")
    )
    out = subprocess.run(
        [sys.executable, path, "--nodes", "500", "--repeats", "2"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert "kernel benchmark" in out.stdout
    assert "energy_density" in out.stdout
