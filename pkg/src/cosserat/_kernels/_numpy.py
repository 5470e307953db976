"""Vectorized numpy implementation of the per-node hot kernels.

All functions take flat batches: rotations ``(n, 3, 3)``, tangent
vectors ``(n, 3)``, slice stacks ``(n, 3, 3, 3)`` with the derivative
direction last.  The compiled extension mirrors this module exactly;
agreement between the two backends is asserted in the test suite.
"""

from __future__ import annotations

import numpy as np

_ID3 = np.eye(3)

# anti(e_k) stacked on the first axis
_ANTI_E = np.zeros((3, 3, 3))
_ANTI_E[0, 1, 2] = -1.0
_ANTI_E[0, 2, 1] = 1.0
_ANTI_E[1, 0, 2] = 1.0
_ANTI_E[1, 2, 0] = -1.0
_ANTI_E[2, 0, 1] = -1.0
_ANTI_E[2, 1, 0] = 1.0


def _dev_sym(m):
    s = 0.5 * (m + np.swapaxes(m, -2, -1))
    tr = np.trace(m, axis1=-2, axis2=-1)
    return s - (tr[..., None, None] / 3.0) * _ID3


def _skew(m):
    return 0.5 * (m - np.swapaxes(m, -2, -1))


def _tr(m):
    return np.trace(m, axis1=-2, axis2=-1)


def strain_batch(r: np.ndarray, f: np.ndarray) -> np.ndarray:
    """E = R^T F - id per node."""
    return np.einsum("nji,njk->nik", r, f) - _ID3


def stretch_batch(r: np.ndarray, f: np.ndarray) -> np.ndarray:
    """U = R^T F per node."""
    return np.einsum("nji,njk->nik", r, f)


def slices_batch(r: np.ndarray, dr: np.ndarray, project: bool = True) -> np.ndarray:
    """Slices S_k = R^T dR_k, optionally skew-projected; dr is (n,3,3,3)."""
    raw = np.einsum("nmi,nmjk->nijk", r, dr)
    if project:
        return 0.5 * (raw - np.swapaxes(raw, -3, -2))
    return raw


def dislocation_from_slices(s: np.ndarray) -> np.ndarray:
    """K = -sum_k S_k anti(e_k)."""
    return -np.einsum("nijk,kjm->nim", s, _ANTI_E)


def measures_batch(r: np.ndarray, f: np.ndarray, dr: np.ndarray):
    """Fused strain + dislocation measures (E, K) for the energy path."""
    e = strain_batch(r, f)
    s = slices_batch(r, dr, project=True)
    return e, dislocation_from_slices(s)


def energy_density(e, k, mu, mu_c, kappa, a1, a2, a3, lc, p, s1, s2, s3):
    """Total density per node; s1..s3 are the chiral coefficients 2 mu L sqrt(beta)."""
    dse = _dev_sym(e)
    ske = _skew(e)
    tre = _tr(e)
    dsk = _dev_sym(k)
    skk = _skew(k)
    trk = _tr(k)
    w = (
        mu * np.sum(dse * dse, axis=(-2, -1))
        + mu_c * np.sum(ske * ske, axis=(-2, -1))
        + 0.5 * kappa * tre**2
    )
    b = (
        a1 * np.sum(dsk * dsk, axis=(-2, -1))
        + a2 * np.sum(skk * skk, axis=(-2, -1))
        + a3 * trk**2
    )
    w = w + mu * lc**p * b ** (0.5 * p)
    if s1 != 0.0 or s2 != 0.0 or s3 != 0.0:
        w = w + (
            s1 * np.sum(dse * dsk, axis=(-2, -1))
            + s2 * np.sum(ske * skk, axis=(-2, -1))
            + s3 * tre * trk
        )
    return w


def energy_derivs(e, k, mu, mu_c, kappa, a1, a2, a3, lc, p, s1, s2, s3):
    """(dW/dE, dW/dK) per node for the total density."""
    dse = _dev_sym(e)
    ske = _skew(e)
    tre = _tr(e)
    dsk = _dev_sym(k)
    skk = _skew(k)
    trk = _tr(k)
    de = 2.0 * mu * dse + 2.0 * mu_c * ske + kappa * tre[..., None, None] * _ID3
    db = 2.0 * (a1 * dsk + a2 * skk + a3 * trk[..., None, None] * _ID3)
    if p == 2.0:
        dk = mu * lc**2 * db
    else:
        b = (
            a1 * np.sum(dsk * dsk, axis=(-2, -1))
            + a2 * np.sum(skk * skk, axis=(-2, -1))
            + a3 * trk**2
        )
        factor = np.where(b > 0.0, np.where(b > 0.0, b, 1.0) ** (0.5 * p - 1.0), 0.0)
        dk = mu * lc**p * 0.5 * p * factor[..., None, None] * db
    if s1 != 0.0 or s2 != 0.0 or s3 != 0.0:
        de = de + s1 * dsk + s2 * skk + s3 * trk[..., None, None] * _ID3
        dk = dk + s1 * dse + s2 * ske + s3 * tre[..., None, None] * _ID3
    return de, dk


def exp_so3_batch(w: np.ndarray) -> np.ndarray:
    """Rodrigues formula per node, series for small angles."""
    w = np.asarray(w, dtype=float)
    tsq = np.sum(w * w, axis=-1)
    small = tsq < 1e-8
    t = np.sqrt(np.where(small, 1.0, tsq))
    a = np.where(small, 1.0 - tsq / 6.0 + tsq**2 / 120.0, np.sin(t) / t)
    b = np.where(small, 0.5 - tsq / 24.0 + tsq**2 / 720.0, (1.0 - np.cos(t)) / np.where(small, 1.0, tsq))
    s = np.zeros(w.shape[:-1] + (3, 3))
    s[..., 0, 1] = -w[..., 2]
    s[..., 0, 2] = w[..., 1]
    s[..., 1, 0] = w[..., 2]
    s[..., 1, 2] = -w[..., 0]
    s[..., 2, 0] = -w[..., 1]
    s[..., 2, 1] = w[..., 0]
    return _ID3 + a[..., None, None] * s + b[..., None, None] * (s @ s)


def rotate_step_batch(r: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Right-trivialized retraction R <- R exp(anti(w)) per node."""
    return r @ exp_so3_batch(w)


def axl_skew_mat_batch(a: np.ndarray) -> np.ndarray:
    """axl(skew(A)) per node."""
    s = 0.5 * (a - np.swapaxes(a, -2, -1))
    return np.stack([s[..., 2, 1], s[..., 0, 2], s[..., 1, 0]], axis=-1)
