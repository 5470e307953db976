"""Analytic test fields on a grid.

Twist fields (rotation about a fixed axis growing linearly along one
coordinate) have closed-form curvature measures and exactly skew
finite-difference slices, which makes them the work-horse of the
identity suites.  The random smooth fields are low-amplitude Fourier
rotation-vector fields whose exact wryness is available through the
right Jacobian, so discretization errors can be measured directly.
"""

from __future__ import annotations

import numpy as np

from .fields import Grid, RotationField, VectorField
from .tensors import exp_so3, right_jacobian_so3

__all__ = [
    "RandomRotationVectorField",
    "perturbed_state",
    "random_smooth_rotation_field",
    "random_smooth_vector_field",
    "twist_rotation",
    "twist_rotation_field",
]

_AXIS = {"x": 0, "y": 1, "z": 2}


def twist_rotation(x, rate: float, axis: int = 2, along: int = 0) -> np.ndarray:
    """Rotation about ``e_axis`` by ``rate * x[along]``."""
    w = np.zeros(3)
    w[axis] = rate * float(np.asarray(x)[along])
    return exp_so3(w)


def twist_rotation_field(
    grid: Grid, rate: float, axis: int = 2, along: int = 0
) -> RotationField:
    """Nodal twist field ``exp(rate * x_along * anti(e_axis))``."""
    coords = grid.coords()
    t = rate * coords[..., along]
    ct, st = np.cos(t), np.sin(t)
    data = np.zeros(grid.shape + (3, 3))
    i, j = [(1, 2), (2, 0), (0, 1)][axis]
    data[..., axis, axis] = 1.0
    data[..., i, i] = ct
    data[..., j, j] = ct
    data[..., i, j] = -st
    data[..., j, i] = st
    return RotationField(grid, data)


class RandomRotationVectorField:
    """Smooth random rotation-vector field ``w(x)`` with analytic gradient.

    A handful of sine modes with bounded amplitude and wavenumber; small
    amplitudes keep the symmetric finite-difference residue of the
    rotation slices well below the curvature scale.
    """

    def __init__(self, rng, n_modes: int = 3, amplitude: float = 0.05, wavenumber: float = 0.6):
        self.amps = amplitude / n_modes * rng.standard_normal((n_modes, 3))
        self.waves = wavenumber * rng.standard_normal((n_modes, 3))
        self.phases = rng.uniform(0.0, 2.0 * np.pi, size=n_modes)

    def value(self, x) -> np.ndarray:
        """Rotation vector at one point or a batch of points (...,3)."""
        x = np.asarray(x, dtype=float)
        phase = np.einsum("mk,...k->...m", self.waves, x) + self.phases
        return np.einsum("...m,mi->...i", np.sin(phase), self.amps)

    def gradient(self, x) -> np.ndarray:
        """d w_i / d x_j at one point or a batch of points."""
        x = np.asarray(x, dtype=float)
        phase = np.einsum("mk,...k->...m", self.waves, x) + self.phases
        return np.einsum("...m,mi,mj->...ij", np.cos(phase), self.amps, self.waves)

    def rotation(self, x) -> np.ndarray:
        return exp_so3(self.value(x))

    def wryness(self, x) -> np.ndarray:
        """Exact wryness at one point via the right Jacobian."""
        j = right_jacobian_so3(self.value(x))
        return j @ self.gradient(x)

    def rotation_field(self, grid: Grid) -> RotationField:
        from ._kernels import exp_so3_batch

        w = self.value(grid.coords().reshape(-1, 3))
        data = exp_so3_batch(w)
        return RotationField(grid, data.reshape(grid.shape + (3, 3)))

    def wryness_field(self, grid: Grid) -> np.ndarray:
        coords = grid.coords().reshape(-1, 3)
        data = np.array([self.wryness(p) for p in coords])
        return data.reshape(grid.shape + (3, 3))


def random_smooth_rotation_field(
    grid: Grid,
    rng,
    n_modes: int = 3,
    amplitude: float = 0.05,
    wavenumber: float = 0.6,
) -> RotationField:
    """Sample a gentle random rotation field on the grid."""
    return RandomRotationVectorField(
        rng, n_modes=n_modes, amplitude=amplitude, wavenumber=wavenumber
    ).rotation_field(grid)


def random_smooth_vector_field(
    grid: Grid, rng, n_modes: int = 3, amplitude: float = 0.1, wavenumber: float = 0.8
) -> VectorField:
    """Smooth random displacement-like field (sum of sine modes)."""
    amps = amplitude / n_modes * rng.standard_normal((n_modes, 3))
    waves = wavenumber * rng.standard_normal((n_modes, 3))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_modes)
    coords = grid.coords()
    phase = np.einsum("mk,...k->...m", waves, coords) + phases
    data = np.einsum("...m,mi->...i", np.sin(phase), amps)
    return VectorField(grid, data)


def perturbed_state(grid: Grid, rng, amp_phi: float = 0.05, amp_rot: float = 0.1):
    """Random admissible-looking state: identity map + bump, rotations near id."""
    from ._kernels import exp_so3_batch

    phi = grid.identity_map()
    bump = random_smooth_vector_field(grid, rng, amplitude=amp_phi)
    phi = VectorField(grid, phi.data + bump.data)
    w = random_smooth_vector_field(grid, rng, amplitude=amp_rot)
    rot = exp_so3_batch(w.data.reshape(-1, 3)).reshape(grid.shape + (3, 3))
    return phi, RotationField(grid, rot)
