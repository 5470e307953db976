"""Exact algebra on 3-vectors, 3x3 matrices and 3x3x3 tensors.

Everything in this module is a pure function of small numpy arrays:
decompositions, axial-vector maps, cross and double-dot products,
third-order transposes, the SO(3) exponential/logarithm, and the polar
decomposition.  These are the building blocks for the micropolar strain
and curvature measures and double as slow-but-obvious reference
implementations for the batched kernels.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "EPS",
    "ID3",
    "anti",
    "axl",
    "ddot",
    "dev",
    "eps",
    "eps_times_mat",
    "exp_so3",
    "is_rotation",
    "log_so3",
    "mat_cross_vec",
    "mat_times_eps",
    "norm_sq",
    "polar_rotation",
    "right_jacobian_so3",
    "rotation_defect",
    "skew",
    "sym",
    "ten3_cross_vec",
    "ten3_transpose",
    "trace",
]

ID3 = np.eye(3)

# Third-order alternator, eps[0,1,2] = +1 and alternating.
EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPS[_i, _j, _k] = 1.0
    EPS[_i, _k, _j] = -1.0
EPS.setflags(write=False)

# anti(e_k) stacked as ANTI_E[k] for fixed-axis cross products.
ANTI_E = np.stack([
    np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
    np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
    np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
])
ANTI_E.setflags(write=False)

_TRANSPOSE_PAIRS = {"2.3": (-2, -1), "1.3": (-3, -1), "1.2": (-3, -2)}


def eps() -> np.ndarray:
    """The alternator tensor as a read-only (3,3,3) array."""
    return EPS


def dev(m: np.ndarray) -> np.ndarray:
    """Deviatoric part ``m - tr(m)/3 * id``. Batched over leading dims."""
    m = np.asarray(m, dtype=float)
    tr = np.trace(m, axis1=-2, axis2=-1)
    return m - (tr[..., None, None] / 3.0) * ID3


def sym(m: np.ndarray) -> np.ndarray:
    """Symmetric part of a matrix (batched)."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + np.swapaxes(m, -2, -1))


def skew(m: np.ndarray) -> np.ndarray:
    """Skew-symmetric part of a matrix (batched)."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m - np.swapaxes(m, -2, -1))


def trace(m: np.ndarray):
    """Matrix trace; returns a float for a single 3x3 argument."""
    t = np.trace(np.asarray(m, dtype=float), axis1=-2, axis2=-1)
    return float(t) if np.ndim(t) == 0 else t


def norm_sq(t: np.ndarray) -> float:
    """Squared Frobenius norm over all components of a vector, Mat3 or Ten3."""
    t = np.asarray(t, dtype=float)
    return float(np.sum(t * t))


def axl(s: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Axial vector of a skew matrix, ``anti(axl(s)) = s``.

    Rejects input whose symmetric part exceeds ``tol`` in absolute value;
    the curvature pipeline skew-projects before calling this.
    """
    s = np.asarray(s, dtype=float)
    defect = np.abs(s + np.swapaxes(s, -2, -1)).max()
    if defect > 2.0 * tol:
        raise ValueError(
            f"axl: input is not skew-symmetric (defect {defect:.3e} > tol {tol:.1e})"
        )
    return np.stack([s[..., 2, 1], s[..., 0, 2], s[..., 1, 0]], axis=-1)


def anti(w: np.ndarray) -> np.ndarray:
    """Skew matrix of a vector so that ``anti(w) @ v = cross(w, v)``."""
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.shape[:-1] + (3, 3))
    out[..., 0, 1] = -w[..., 2]
    out[..., 0, 2] = w[..., 1]
    out[..., 1, 0] = w[..., 2]
    out[..., 1, 2] = -w[..., 0]
    out[..., 2, 0] = -w[..., 1]
    out[..., 2, 1] = w[..., 0]
    return out


def ddot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Double dot product of third-order tensors, ``(a:b)_ij = a_irs b_rsj``."""
    return np.einsum("...irs,...rsj->...ij", a, b)


def mat_cross_vec(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``m x v`` with the cross product acting on the second leg of m."""
    return np.asarray(m, dtype=float) @ anti(v)


def ten3_cross_vec(t: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``t x v`` with the cross product acting on the last leg of t."""
    return np.einsum("...ijl,...lk->...ijk", t, anti(v))


def eps_times_mat(g: np.ndarray) -> np.ndarray:
    """Product alternator*matrix: ``(eps g)_ijn = eps_ijk g_kn``."""
    return np.einsum("ijk,...kn->...ijn", EPS, g)


def mat_times_eps(k: np.ndarray) -> np.ndarray:
    """Product matrix*alternator: ``(k eps)_imn = k_ik eps_kmn``."""
    return np.einsum("...ik,kmn->...imn", k, EPS)


def ten3_transpose(t: np.ndarray, pair: str) -> np.ndarray:
    """Transpose a Ten3 in one index pair, ``pair`` one of '2.3', '1.3', '1.2'."""
    try:
        a, b = _TRANSPOSE_PAIRS[pair]
    except KeyError:
        raise ValueError(f"unknown transpose pair {pair!r}") from None
    return np.swapaxes(np.asarray(t, dtype=float), a, b)


def exp_so3(w: np.ndarray) -> np.ndarray:
    """Rotation matrix ``exp(anti(w))`` via the Rodrigues formula."""
    w = np.asarray(w, dtype=float)
    tsq = float(w @ w)
    if tsq < 1e-8:
        # series for sin(t)/t and (1-cos t)/t^2
        a = 1.0 - tsq / 6.0 + tsq * tsq / 120.0
        b = 0.5 - tsq / 24.0 + tsq * tsq / 720.0
    else:
        t = np.sqrt(tsq)
        a = np.sin(t) / t
        b = (1.0 - np.cos(t)) / tsq
    s = anti(w)
    return ID3 + a * s + b * (s @ s)


def log_so3(r: np.ndarray, angle_cut: float = np.pi - 1e-6) -> np.ndarray:
    """Rotation vector of ``r``; inverse of :func:`exp_so3`.

    Only defined for rotation angles below ``pi``; rejects angles at or
    beyond ``angle_cut`` where the branch becomes ambiguous.
    """
    r = np.asarray(r, dtype=float)
    c = np.clip((np.trace(r) - 1.0) / 2.0, -1.0, 1.0)
    theta = float(np.arccos(c))
    v = 0.5 * np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    if theta > 2.7:
        # arccos loses ~1/sin(theta) precision here; |v| = sin(theta)
        theta = float(np.pi - np.arcsin(min(float(np.linalg.norm(v)), 1.0)))
    if theta >= angle_cut:
        raise ValueError(
            f"log_so3: rotation angle {theta:.8f} >= cutoff {angle_cut:.8f}"
        )
    if theta < 1e-4:
        # theta/sin(theta) series; v already carries sin(theta)*axis
        t2 = theta * theta
        return v * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0)
    if theta > np.pi - 1e-3:
        # near pi the skew part is tiny; recover the axis from r + r^T
        q = np.diag(r) - c
        n = np.sqrt(np.maximum(q / (1.0 - c), 0.0))
        # fix signs from the (still informative) skew part
        signs = np.sign(v)
        signs[signs == 0.0] = 1.0
        n *= signs
        n /= np.linalg.norm(n)
        return theta * n
    return v * (theta / np.sin(theta))


def right_jacobian_so3(w: np.ndarray) -> np.ndarray:
    """Right Jacobian J(w) with ``exp(anti(w))^T d/ds exp(anti(w+s d)) = anti(J d)``.

    Used to differentiate rotation-vector fields exactly.
    """
    w = np.asarray(w, dtype=float)
    tsq = float(w @ w)
    s = anti(w)
    if tsq < 1e-8:
        a = 0.5 - tsq / 24.0
        b = 1.0 / 6.0 - tsq / 120.0
    else:
        t = np.sqrt(tsq)
        a = (1.0 - np.cos(t)) / tsq
        b = (t - np.sin(t)) / (tsq * t)
    return ID3 - a * s + b * (s @ s)


def polar_rotation(f: np.ndarray, max_iter: int = 100, tol: float = 1e-15) -> np.ndarray:
    """Orthogonal factor of the polar decomposition ``f = r u``.

    Newton/Heron iteration ``x <- (g x + (g x)^-T)/2`` with determinant
    scaling; no eigenvalue solver needed for the 3x3 case.  Requires
    ``det f > 0``.
    """
    f = np.asarray(f, dtype=float)
    d = float(np.linalg.det(f))
    if not d > 0.0:
        raise ValueError(f"polar_rotation: det f = {d:.3e} is not positive")
    x = f.copy()
    for _ in range(max_iter):
        g = abs(float(np.linalg.det(x))) ** (-1.0 / 3.0)
        xg = g * x
        x_next = 0.5 * (xg + np.linalg.inv(xg).T)
        if np.abs(x_next - x).max() <= tol * max(1.0, np.abs(x).max()):
            x = x_next
            break
        x = x_next
    return x


def rotation_defect(r: np.ndarray) -> float:
    """Max-abs deviation of ``r`` from SO(3): orthogonality and det."""
    r = np.asarray(r, dtype=float)
    ortho = np.abs(np.swapaxes(r, -2, -1) @ r - ID3).max()
    det = np.abs(np.linalg.det(r) - 1.0).max()
    return float(max(ortho, det))


def is_rotation(r: np.ndarray, tol: float = 1e-12) -> bool:
    """True when ``r`` is proper orthogonal to within ``tol``."""
    return rotation_defect(r) <= tol
