"""External loading potential and the total energy functional.

The discrete functional integrates the stored energy density of the
nodal strain/curvature measures with trapezoidal weights and subtracts
the loading potential; both use exactly the same quadrature so the
minimizer sees one consistent objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _kernels as K
from .fields import (
    BoundaryPartition,
    Grid,
    Mat3Field,
    RotationField,
    VectorField,
    fd_derivative,
    surface_weights,
    volume_weights,
)
from .materials import MaterialParams, check_definiteness

__all__ = [
    "LoadSet",
    "Problem",
    "energy_breakdown",
    "enforce_admissible",
    "potential_pi",
    "total_energy",
]


@dataclass
class LoadSet:
    """Body/surface forces and couple-type loads; None means absent.

    Surface loads are stored as full nodal fields; only their values on
    the traction faces enter the surface integrals.
    """

    body_force: VectorField | None = None
    traction: VectorField | None = None
    body_couple: Mat3Field | None = None
    surface_couple: Mat3Field | None = None

    def is_zero(self) -> bool:
        return all(
            f is None
            for f in (self.body_force, self.traction, self.body_couple, self.surface_couple)
        )

    def check_grid(self, grid: Grid):
        for f in (self.body_force, self.traction, self.body_couple, self.surface_couple):
            if f is not None and f.grid != grid:
                raise ValueError("load field grid does not match the problem grid")


@dataclass
class Problem:
    """Domain, boundary split, loads, Dirichlet data and material."""

    grid: Grid
    partition: BoundaryPartition
    material: MaterialParams
    loads: LoadSet = dc_field(default_factory=LoadSet)
    phi_d: VectorField | None = None
    rot_d: RotationField | None = None

    def __post_init__(self):
        if self.partition.grid != self.grid:
            raise ValueError("boundary partition grid does not match problem grid")
        self.loads.check_grid(self.grid)
        for f in (self.phi_d, self.rot_d):
            if f is not None and f.grid != self.grid:
                raise ValueError("Dirichlet data grid does not match problem grid")

    def validate(self):
        self.material.validate()
        report = check_definiteness(
            self.material.moduli, self.material.curvature, self.material.chiral
        )
        if not report.definite:
            raise ValueError(
                "material parameters are not positive definite:\n" + report.to_text()
            )
        if self.partition.dirichlet_faces:
            if self.phi_d is None:
                raise ValueError("Dirichlet faces declared but no deformation data given")


def _chiral_coeffs(mat: MaterialParams):
    ch = mat.chiral
    if ch.is_zero():
        return 0.0, 0.0, 0.0
    if mat.curvature.p != 2.0:
        raise ValueError("chiral coupling is only defined for the quadratic case p = 2")
    f = 2.0 * mat.moduli.mu * mat.curvature.L_c
    return (
        f * np.sqrt(ch.beta1),
        f * np.sqrt(ch.beta2),
        f * np.sqrt(ch.beta3),
    )


def _param_tuple(mat: MaterialParams):
    m, c = mat.moduli, mat.curvature
    s1, s2, s3 = _chiral_coeffs(mat)
    return (m.mu, m.mu_c, m.kappa, c.a1, c.a2, c.a3, c.L_c, c.p, s1, s2, s3)


def _fd_stack(phi_data: np.ndarray, rot_data: np.ndarray, grid: Grid):
    h = grid.spacing
    n = grid.n_nodes
    f = np.stack(
        [fd_derivative(phi_data, axis, h[axis]) for axis in range(3)], axis=-1
    ).reshape(n, 3, 3)
    dr = np.stack(
        [fd_derivative(rot_data, axis, h[axis]) for axis in range(3)], axis=-1
    ).reshape(n, 3, 3, 3)
    return f, dr


def nodal_measures(phi_data: np.ndarray, rot_data: np.ndarray, grid: Grid):
    """Flat per-node strain and dislocation measures (E, K), plus context.

    Returns (e, k, u, slices_raw) with shapes (n,3,3), (n,3,3), (n,3,3),
    (n,3,3,3); the raw slices are needed by the gradient assembly.
    """
    f, dr = _fd_stack(phi_data, rot_data, grid)
    r = rot_data.reshape(grid.n_nodes, 3, 3)
    u = K.stretch_batch(r, f)
    e = u - np.eye(3)
    raw = K.slices_batch(r, dr, project=False)
    s = 0.5 * (raw - np.swapaxes(raw, -3, -2))
    k = K.dislocation_from_slices(s)
    return e, k, u, raw


def _as_fields(phi, rot, grid):
    phi_data = phi.data if isinstance(phi, VectorField) else np.asarray(phi, float)
    rot_data = rot.data if isinstance(rot, RotationField) else np.asarray(rot, float)
    if phi_data.shape != grid.shape + (3,) or rot_data.shape != grid.shape + (3, 3):
        raise ValueError("state shapes do not match the problem grid")
    return phi_data, rot_data


def potential_pi(phi, rot, loads: LoadSet, partition: BoundaryPartition) -> float:
    """External loading potential, linear in u = phi - x and in R."""
    grid = partition.grid
    phi_data, rot_data = _as_fields(phi, rot, grid)
    loads.check_grid(grid)
    if loads.is_zero():
        return 0.0
    wq = volume_weights(grid)
    ws = surface_weights(grid, partition.traction_faces)
    u = phi_data - grid.coords()
    total = 0.0
    if loads.body_force is not None:
        total += float(np.sum(wq * np.sum(loads.body_force.data * u, axis=-1)))
    if loads.traction is not None:
        total += float(np.sum(ws * np.sum(loads.traction.data * u, axis=-1)))
    if loads.body_couple is not None:
        total += float(
            np.sum(wq * np.sum(loads.body_couple.data * rot_data, axis=(-2, -1)))
        )
    if loads.surface_couple is not None:
        total += float(
            np.sum(ws * np.sum(loads.surface_couple.data * rot_data, axis=(-2, -1)))
        )
    return total


def stored_energy(phi, rot, prob: Problem) -> float:
    """Volume integral of the stored energy density."""
    phi_data, rot_data = _as_fields(phi, rot, prob.grid)
    f, dr = _fd_stack(phi_data, rot_data, prob.grid)
    e, k = K.measures_batch(rot_data.reshape(-1, 3, 3), f, dr)
    w = K.energy_density(e, k, *_param_tuple(prob.material))
    wq = volume_weights(prob.grid).reshape(-1)
    return float(wq @ w)


def total_energy(phi, rot, prob: Problem) -> float:
    """Discrete energy functional: stored energy minus loading potential."""
    value = stored_energy(phi, rot, prob) - potential_pi(
        phi, rot, prob.loads, prob.partition
    )
    if not np.isfinite(value):
        raise FloatingPointError("energy evaluated to a non-finite value")
    return value


def energy_breakdown(phi, rot, prob: Problem) -> dict:
    """Labeled energy/potential parts for reporting."""
    phi_data, rot_data = _as_fields(phi, rot, prob.grid)
    grid = prob.grid
    mat = prob.material
    e, k, _, _ = nodal_measures(phi_data, rot_data, grid)
    mu, mu_c, kappa, a1, a2, a3, lc, p, s1, s2, s3 = _param_tuple(mat)
    wq = volume_weights(grid).reshape(-1)
    w_mp = K.energy_density(e, np.zeros_like(k), mu, mu_c, kappa, a1, a2, a3, lc, p, 0, 0, 0)
    w_cv = K.energy_density(np.zeros_like(e), k, mu, 0.0, 0.0, a1, a2, a3, lc, p, 0, 0, 0)
    w_ch = K.energy_density(e, k, 0.0, 0.0, 0.0, a1, a2, a3, 0.0, p, s1, s2, s3)
    parts = {
        "W_mp": float(wq @ w_mp),
        "W_curv": float(wq @ w_cv),
        "W_chiral": float(wq @ w_ch),
    }
    loads, partition = prob.loads, prob.partition
    ws = surface_weights(grid, partition.traction_faces)
    wv = volume_weights(grid)
    u = phi_data - grid.coords()
    parts["Pi_f"] = (
        float(np.sum(wv * np.sum(loads.body_force.data * u, axis=-1)))
        if loads.body_force is not None
        else 0.0
    )
    parts["Pi_N"] = (
        float(np.sum(ws * np.sum(loads.traction.data * u, axis=-1)))
        if loads.traction is not None
        else 0.0
    )
    parts["Pi_M"] = (
        float(np.sum(wv * np.sum(loads.body_couple.data * rot_data, axis=(-2, -1))))
        if loads.body_couple is not None
        else 0.0
    )
    parts["Pi_Mc"] = (
        float(np.sum(ws * np.sum(loads.surface_couple.data * rot_data, axis=(-2, -1))))
        if loads.surface_couple is not None
        else 0.0
    )
    parts["Pi"] = parts["Pi_f"] + parts["Pi_N"] + parts["Pi_M"] + parts["Pi_Mc"]
    parts["I"] = parts["W_mp"] + parts["W_curv"] + parts["W_chiral"] - parts["Pi"]
    return parts


def enforce_admissible(
    phi: VectorField,
    rot: RotationField,
    prob: Problem,
    relaxed: bool = False,
):
    """Project a state onto the admissible set by overwriting Dirichlet nodes.

    In relaxed mode only the deformation is constrained; the rotations
    stay untouched everywhere.
    """
    mask = prob.partition.dirichlet_mask()
    phi_out = phi.copy()
    rot_out = rot.copy()
    if not mask.any():
        return phi_out, rot_out
    if prob.phi_d is None:
        raise ValueError("Dirichlet nodes present but deformation data missing")
    phi_out.data[mask] = prob.phi_d.data[mask]
    if not relaxed:
        if prob.rot_d is None:
            raise ValueError("Dirichlet nodes present but rotation data missing")
        rot_out.data[mask] = prob.rot_d.data[mask]
    return phi_out, rot_out
