"""Conversions among the five curvature representations.

The representations are the third-order rotation-gradient tensor, the
contortion tensor (its transpose in the last two legs), the wryness
tensor, the dislocation density tensor and the torsion tensor.  Each
directed conversion is the closed-form expression from the summary
table, implemented independently rather than composed through a hub
representation, so every entry can be checked on its own.  All
functions accept batched arrays with leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensors import EPS, ID3

__all__ = [
    "CurvatureMeasure",
    "REPRESENTATIONS",
    "SECOND_ORDER",
    "THIRD_ORDER",
    "convert",
    "convert_array",
    "nye_forward",
    "nye_inverse",
    "wryness_to_contortion_via_dislocation",
]

ROTATION_GRADIENT = "rotation_gradient"
CONTORTION = "contortion"
WRYNESS = "wryness"
DISLOCATION = "dislocation"
TORSION = "torsion"

REPRESENTATIONS = (ROTATION_GRADIENT, CONTORTION, WRYNESS, DISLOCATION, TORSION)
SECOND_ORDER = frozenset({WRYNESS, DISLOCATION})
THIRD_ORDER = frozenset({ROTATION_GRADIENT, CONTORTION, TORSION})


def _tr(m):
    return np.trace(m, axis1=-2, axis2=-1)[..., None, None]


def _mt(m):
    return np.swapaxes(m, -2, -1)


def _t23(t):
    return np.swapaxes(t, -2, -1)


def _t13(t):
    return np.swapaxes(t, -3, -1)


def _t12(t):
    return np.swapaxes(t, -3, -2)


def _ddot_eps(t):
    return np.einsum("...irs,rsj->...ij", t, EPS)


def _eps_mat(m):
    return np.einsum("ijk,...kn->...ijn", EPS, m)


def _mat_eps(m):
    return np.einsum("...ik,kmn->...imn", m, EPS)


def nye_forward(gamma: np.ndarray) -> np.ndarray:
    """Dislocation density from wryness: ``-gamma^T + tr(gamma) id``."""
    gamma = np.asarray(gamma, dtype=float)
    return -_mt(gamma) + _tr(gamma) * ID3


def nye_inverse(kbar: np.ndarray) -> np.ndarray:
    """Wryness from dislocation density: ``-kbar^T + tr(kbar)/2 id``."""
    kbar = np.asarray(kbar, dtype=float)
    return -_mt(kbar) + 0.5 * _tr(kbar) * ID3


def wryness_to_contortion_via_dislocation(gamma: np.ndarray) -> np.ndarray:
    """Alternative wryness -> contortion route through the dislocation tensor.

    Algebraically identical to the direct table entry; kept so the two
    routes can be compared numerically in the identity suite.
    """
    k = nye_forward(gamma)
    return _mat_eps(k) + _eps_mat(_mt(k)) - 0.5 * _tr(k) * EPS


_CONVERSIONS = {
    (ROTATION_GRADIENT, CONTORTION): _t23,
    (ROTATION_GRADIENT, WRYNESS): lambda g: (
        _mt(_ddot_eps(g)) - 0.5 * _tr(_ddot_eps(g)) * ID3
    ),
    (ROTATION_GRADIENT, DISLOCATION): lambda g: -_ddot_eps(g),
    (ROTATION_GRADIENT, TORSION): lambda g: _t23(g) - g,
    (CONTORTION, ROTATION_GRADIENT): _t23,
    (CONTORTION, WRYNESS): lambda k: (
        _mt(_ddot_eps(_t23(k))) - 0.5 * _tr(_ddot_eps(_t23(k))) * ID3
    ),
    (CONTORTION, DISLOCATION): lambda k: -_ddot_eps(_t23(k)),
    (CONTORTION, TORSION): lambda k: k - _t23(k),
    (WRYNESS, ROTATION_GRADIENT): lambda g: -_eps_mat(g),
    (WRYNESS, CONTORTION): lambda g: (
        -_mat_eps(_mt(g)) - _eps_mat(g) + _tr(g)[..., None] * EPS
    ),
    (WRYNESS, DISLOCATION): nye_forward,
    (WRYNESS, TORSION): lambda g: -_mat_eps(_mt(g)) + _tr(g)[..., None] * EPS,
    (DISLOCATION, ROTATION_GRADIENT): lambda k: (
        _eps_mat(_mt(k)) - 0.5 * _tr(k)[..., None] * EPS
    ),
    (DISLOCATION, CONTORTION): lambda k: (
        _mat_eps(k) + _eps_mat(_mt(k)) - 0.5 * _tr(k)[..., None] * EPS
    ),
    (DISLOCATION, WRYNESS): nye_inverse,
    (DISLOCATION, TORSION): _mat_eps,
    (TORSION, ROTATION_GRADIENT): lambda t: 0.5 * (_t12(t) - t - _t13(t)),
    (TORSION, CONTORTION): lambda t: 0.5 * (t + _t12(t) - _t13(t)),
    (TORSION, WRYNESS): lambda t: (
        -0.5 * _mt(_ddot_eps(t)) + 0.25 * _tr(_ddot_eps(t)) * ID3
    ),
    (TORSION, DISLOCATION): lambda t: 0.5 * _ddot_eps(t),
}


def convert_array(value: np.ndarray, rep_from: str, rep_to: str) -> np.ndarray:
    """Convert raw curvature data between representations (batched)."""
    for rep in (rep_from, rep_to):
        if rep not in REPRESENTATIONS:
            raise ValueError(f"unknown curvature representation {rep!r}")
    value = np.asarray(value, dtype=float)
    if rep_from == rep_to:
        return value.copy()
    return _CONVERSIONS[(rep_from, rep_to)](value)


@dataclass(frozen=True)
class CurvatureMeasure:
    """A curvature value tagged with its representation.

    Second-order representations carry a (3,3) payload, third-order a
    (3,3,3) payload; the rotation-gradient payload must have skew slices.
    """

    rep: str
    value: np.ndarray

    def __post_init__(self):
        if self.rep not in REPRESENTATIONS:
            raise ValueError(f"unknown curvature representation {self.rep!r}")
        value = np.asarray(self.value, dtype=float)
        want = (3, 3) if self.rep in SECOND_ORDER else (3, 3, 3)
        if value.shape != want:
            raise ValueError(f"{self.rep} payload must have shape {want}, got {value.shape}")
        if not np.all(np.isfinite(value)):
            raise ValueError("curvature payload contains non-finite values")
        if self.rep == ROTATION_GRADIENT:
            residue = np.abs(value + np.swapaxes(value, 0, 1)).max()
            if residue > 1e-8 * max(1.0, np.abs(value).max()):
                raise ValueError(
                    f"rotation-gradient payload has non-skew slices (residue {residue:.3e})"
                )
        value.setflags(write=False)
        object.__setattr__(self, "value", value)


def convert(measure: CurvatureMeasure, rep_to: str) -> CurvatureMeasure:
    """Convert a tagged curvature measure to another representation."""
    return CurvatureMeasure(rep_to, convert_array(measure.value, measure.rep, rep_to))
