"""Strain and curvature measures of the micropolar kinematics.

Pointwise: ``strain`` builds (F, U, E) from a rotation and a deformation
gradient.  Field level: the curvature routines derive all five measures
from the skew-projected slices ``skew(R^T d_k R)`` of a rotation field,
so the measures are exactly consistent with one another; the raw
curl-based dislocation tensor is kept separately as an independent
cross-check route.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (
    Grid,
    Mat3Field,
    RotationField,
    Ten3Field,
    VectorField,
    curl_matrix,
    fd_derivative,
    grad_vector,
)
from .tensors import ANTI_E

__all__ = [
    "CurvatureState",
    "StrainState",
    "curvature_dislocation",
    "curvature_frak",
    "curvature_gamma",
    "curvature_ktilde",
    "curvature_state",
    "curvature_torsion",
    "dislocation_direct",
    "full_state",
    "rotation_slices",
    "strain",
]

# Symmetric residue of R^T d_k R beyond this signals a non-rotation field
# or a grid far too coarse for the rotation variation; legitimate
# second-order one-sided boundary stencils leave O(h^3 theta^4) residue,
# e.g. ~1e-4 for a twist of 0.7/length on an 8^3 grid.
DEFAULT_SKEW_TOL = 1e-3


@dataclass
class StrainState:
    """Deformation gradient, first stretch tensor and strain measure.

    Members are ``(..., 3, 3)`` arrays; pointwise use has no leading axes.
    """

    f: np.ndarray
    u: np.ndarray
    e: np.ndarray


@dataclass
class CurvatureState:
    """All five curvature measures of one rotation field (or one node).

    ``frak`` and ``ktilde``/``torsion`` are third-order ``(..., 3, 3, 3)``;
    ``gamma`` and ``dislocation`` are second-order ``(..., 3, 3)``.
    """

    frak: np.ndarray
    ktilde: np.ndarray
    gamma: np.ndarray
    dislocation: np.ndarray
    torsion: np.ndarray


def strain(r: np.ndarray, f: np.ndarray) -> StrainState:
    """Strain measure ``E = R^T F - id`` together with F and ``U = R^T F``."""
    r = np.asarray(r, dtype=float)
    f = np.asarray(f, dtype=float)
    u = np.swapaxes(r, -2, -1) @ f
    return StrainState(f=f, u=u, e=u - np.eye(3))


def rotation_slices(
    r: RotationField,
    skew_tol: float = DEFAULT_SKEW_TOL,
    project: bool = True,
) -> np.ndarray:
    """Slices ``S_k = R^T d_k R`` of a rotation field, shape (...,3,3,3).

    The last axis indexes k.  With ``project`` the slices are replaced by
    their skew parts, which removes the O(h^2) symmetric discretization
    noise.  Raises when the symmetric residue exceeds ``skew_tol``.
    """
    h = r.grid.spacing
    raw = np.empty(r.grid.shape + (3, 3, 3))
    for k in range(3):
        dk = fd_derivative(r.data, k, h[k])
        raw[..., k] = np.swapaxes(r.data, -2, -1) @ dk
    residue = 0.5 * np.abs(raw + np.swapaxes(raw, -3, -2)).max()
    if residue > skew_tol:
        raise ValueError(
            f"rotation slices have symmetric residue {residue:.3e} > {skew_tol:.1e}; "
            "grid too coarse for this rotation field"
        )
    if not project:
        return raw
    return 0.5 * (raw - np.swapaxes(raw, -3, -2))


def _gamma_from_slices(s: np.ndarray) -> np.ndarray:
    """Wryness from skew slices: column k is the axial vector of S_k."""
    gamma = np.empty(s.shape[:-3] + (3, 3))
    gamma[..., 0, :] = s[..., 2, 1, :]
    gamma[..., 1, :] = s[..., 0, 2, :]
    gamma[..., 2, :] = s[..., 1, 0, :]
    return gamma


def _dislocation_from_slices(s: np.ndarray) -> np.ndarray:
    """Dislocation density from slices: ``-sum_k S_k x e_k``."""
    return -np.einsum("...ijk,kjm->...im", s, ANTI_E)


def _maybe_node(data: np.ndarray, node):
    return data if node is None else data[tuple(node)]


def curvature_frak(r: RotationField, node=None, skew_tol: float = DEFAULT_SKEW_TOL):
    """Third-order curvature tensor ``R^T Grad R`` (skew-projected slices)."""
    s = rotation_slices(r, skew_tol=skew_tol)
    return _maybe_node(s, node)


def curvature_ktilde(r: RotationField, node=None, skew_tol: float = DEFAULT_SKEW_TOL):
    """Contortion tensor: transpose of the third-order curvature in (2,3)."""
    s = rotation_slices(r, skew_tol=skew_tol)
    return _maybe_node(np.swapaxes(s, -2, -1), node)


def curvature_gamma(r: RotationField, node=None, skew_tol: float = DEFAULT_SKEW_TOL):
    """Wryness tensor ``axl(R^T d_k R) (x) e_k``."""
    s = rotation_slices(r, skew_tol=skew_tol)
    return _maybe_node(_gamma_from_slices(s), node)


def curvature_dislocation(r: RotationField, node=None, skew_tol: float = DEFAULT_SKEW_TOL):
    """Dislocation density tensor ``R^T Curl R`` via the slice route."""
    s = rotation_slices(r, skew_tol=skew_tol)
    return _maybe_node(_dislocation_from_slices(s), node)


def curvature_torsion(r: RotationField, node=None, skew_tol: float = DEFAULT_SKEW_TOL):
    """Torsion tensor: contortion minus the third-order curvature."""
    s = rotation_slices(r, skew_tol=skew_tol)
    return _maybe_node(np.swapaxes(s, -2, -1) - s, node)


def curvature_state(r: RotationField, node=None, skew_tol: float = DEFAULT_SKEW_TOL) -> CurvatureState:
    """All five curvature measures from one pass over the slices."""
    s = rotation_slices(r, skew_tol=skew_tol)
    ktilde = np.swapaxes(s, -2, -1)
    state = CurvatureState(
        frak=s,
        ktilde=ktilde,
        gamma=_gamma_from_slices(s),
        dislocation=_dislocation_from_slices(s),
        torsion=ktilde - s,
    )
    if node is not None:
        idx = tuple(node)
        state = CurvatureState(
            frak=state.frak[idx],
            ktilde=state.ktilde[idx],
            gamma=state.gamma[idx],
            dislocation=state.dislocation[idx],
            torsion=state.torsion[idx],
        )
    return state


def dislocation_direct(r: RotationField) -> np.ndarray:
    """Dislocation density via the raw row-wise curl, ``R^T Curl R``.

    Independent of the slice route (no skew projection); the two agree
    to O(h^2), which is the basis of the field-level consistency tests.
    """
    curl = curl_matrix(Mat3Field(r.grid, r.data))
    return np.einsum("...mi,...mj->...ij", r.data, curl.data)


def full_state(phi: VectorField, r: RotationField, skew_tol: float = DEFAULT_SKEW_TOL):
    """Per-node strain and curvature state of a deformation/rotation pair."""
    if phi.grid != r.grid:
        raise ValueError("deformation and rotation fields live on different grids")
    f = grad_vector(phi)
    return strain(r.data, f.data), curvature_state(r, skew_tol=skew_tol)
