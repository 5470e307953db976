"""Energy densities, their derivatives, and parameter diagnostics.

The stored energy splits into a stretch part (quadratic in the strain
measure E), a curvature part (a power p/2 of an isotropic quadratic
form in the dislocation density K) and, for chiral materials with
p = 2, sign-indefinite cross terms coupling E and K.  All densities
accept single (3,3) tensors or batches with leading axes and return
floats resp. arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .tensors import ID3, log_so3, polar_rotation

__all__ = [
    "ChiralParams",
    "Condition",
    "CurvatureParams",
    "DefinitenessReport",
    "GammaCurvatureParams",
    "IsotropicModuli",
    "MaterialParams",
    "b_quadratic",
    "check_definiteness",
    "coercivity_constants",
    "coupling_geodesic",
    "coupling_polar",
    "dw_dE",
    "dw_dK",
    "negative_energy_witness",
    "w_chiral",
    "w_curv",
    "w_curv_gamma",
    "w_linearized",
    "w_mp",
    "w_total",
]


@dataclass(frozen=True)
class IsotropicModuli:
    """Shear modulus, bulk modulus and couple modulus (stress units)."""

    mu: float
    kappa: float
    mu_c: float

    def validate(self):
        for name in ("mu", "kappa", "mu_c"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"modulus {name} must be positive")


@dataclass(frozen=True)
class CurvatureParams:
    """Dimensionless weights a1..a3, internal length L_c and exponent p."""

    a1: float
    a2: float
    a3: float
    L_c: float
    p: float = 2.0

    def validate(self):
        if not (self.a1 > 0.0 and self.a2 > 0.0 and self.a3 > 0.0):
            raise ValueError("curvature weights a1, a2, a3 must be positive")
        if not self.L_c > 0.0:
            raise ValueError("internal length L_c must be positive")
        if not self.p >= 2.0:
            raise ValueError("curvature exponent p must be >= 2")


@dataclass(frozen=True)
class ChiralParams:
    """Strain-curvature coupling weights; zero means achiral."""

    beta1: float = 0.0
    beta2: float = 0.0
    beta3: float = 0.0

    def validate(self):
        if not (self.beta1 >= 0.0 and self.beta2 >= 0.0 and self.beta3 >= 0.0):
            raise ValueError("chiral weights beta1..beta3 must be non-negative")

    def is_zero(self) -> bool:
        return self.beta1 == 0.0 and self.beta2 == 0.0 and self.beta3 == 0.0


@dataclass(frozen=True)
class GammaCurvatureParams:
    """Weights of the curvature quadratic expressed in the wryness tensor."""

    b1: float
    b2: float
    b3: float

    @classmethod
    def from_curvature(cls, c: CurvatureParams) -> "GammaCurvatureParams":
        # tr K = 2 tr Gamma maps the trace weight to 4 a3
        return cls(b1=c.a1, b2=c.a2, b3=4.0 * c.a3)


@dataclass(frozen=True)
class MaterialParams:
    """Full parameter block: moduli + curvature + optional chiral part."""

    moduli: IsotropicModuli
    curvature: CurvatureParams
    chiral: ChiralParams = dc_field(default_factory=ChiralParams)

    def validate(self):
        self.moduli.validate()
        self.curvature.validate()
        self.chiral.validate()
        if not self.chiral.is_zero() and self.curvature.p != 2.0:
            raise ValueError("chiral coupling requires the quadratic case p = 2")


# ---------------------------------------------------------------------------
# orthogonal split helpers (batched)

def _dev_sym(m):
    s = 0.5 * (m + np.swapaxes(m, -2, -1))
    tr = np.trace(m, axis1=-2, axis2=-1)
    return s - (tr[..., None, None] / 3.0) * ID3


def _skew(m):
    return 0.5 * (m - np.swapaxes(m, -2, -1))


def _tr(m):
    return np.trace(m, axis1=-2, axis2=-1)


def _nsq(m):
    return np.sum(m * m, axis=(-2, -1))


def _dot(a, b):
    return np.sum(a * b, axis=(-2, -1))


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _chiral_coeffs(m: IsotropicModuli, c: CurvatureParams, ch: ChiralParams):
    f = 2.0 * m.mu * c.L_c
    return (
        f * math.sqrt(ch.beta1),
        f * math.sqrt(ch.beta2),
        f * math.sqrt(ch.beta3),
    )


# ---------------------------------------------------------------------------
# densities

def w_mp(e: np.ndarray, m: IsotropicModuli):
    """Stretch energy ``mu|dev sym E|^2 + mu_c|skew E|^2 + kappa/2 (tr E)^2``."""
    e = np.asarray(e, dtype=float)
    return _scalar(
        m.mu * _nsq(_dev_sym(e))
        + m.mu_c * _nsq(_skew(e))
        + 0.5 * m.kappa * _tr(e) ** 2
    )


def b_quadratic(k: np.ndarray, a1: float, a2: float, a3: float):
    """Isotropic quadratic form ``a1|dev sym K|^2 + a2|skew K|^2 + a3 (tr K)^2``."""
    k = np.asarray(k, dtype=float)
    return _scalar(a1 * _nsq(_dev_sym(k)) + a2 * _nsq(_skew(k)) + a3 * _tr(k) ** 2)


def w_curv(k: np.ndarray, c: CurvatureParams, mu: float):
    """Curvature energy ``mu L_c^p B(K)^(p/2)``."""
    b = b_quadratic(k, c.a1, c.a2, c.a3)
    return _scalar(mu * c.L_c**c.p * np.asarray(b) ** (0.5 * c.p))


def w_curv_gamma(
    gamma: np.ndarray, g: GammaCurvatureParams, L_c: float, p: float, mu: float
):
    """Curvature energy written in the wryness tensor.

    With weights ``(a1, a2, 4 a3)`` this equals ``w_curv`` composed with
    Nye's formula exactly.
    """
    b = b_quadratic(gamma, g.b1, g.b2, g.b3)
    return _scalar(mu * L_c**p * np.asarray(b) ** (0.5 * p))


def _require_quadratic(c: CurvatureParams, ch: ChiralParams):
    if not ch.is_zero() and c.p != 2.0:
        raise ValueError("chiral coupling is only defined for the quadratic case p = 2")


def w_chiral(
    e: np.ndarray, k: np.ndarray, m: IsotropicModuli, c: CurvatureParams, ch: ChiralParams
):
    """Chiral cross energy coupling strain and dislocation density (p = 2)."""
    _require_quadratic(c, ch)
    e = np.asarray(e, dtype=float)
    k = np.asarray(k, dtype=float)
    s1, s2, s3 = _chiral_coeffs(m, c, ch)
    return _scalar(
        s1 * _dot(_dev_sym(e), _dev_sym(k))
        + s2 * _dot(_skew(e), _skew(k))
        + s3 * _tr(e) * _tr(k)
    )


def w_total(
    e: np.ndarray,
    k: np.ndarray,
    m: IsotropicModuli,
    c: CurvatureParams,
    ch: ChiralParams | None = None,
):
    """Total stored energy density; chiral part included when ch is nonzero."""
    ch = ch or ChiralParams()
    _require_quadratic(c, ch)
    out = np.asarray(w_mp(e, m)) + np.asarray(w_curv(k, c, m.mu))
    if not ch.is_zero():
        out = out + np.asarray(w_chiral(e, k, m, c, ch))
    return _scalar(out)


def w_linearized(
    grad_u: np.ndarray,
    a: np.ndarray,
    curl_a: np.ndarray,
    m: IsotropicModuli,
    c: CurvatureParams,
    ch: ChiralParams | None = None,
):
    """Quadratic small-strain energy in (grad u, A, Curl A) with skew A.

    This is the total quadratic density evaluated at the infinitesimal
    measures (grad u - A, Curl A); the chiral skew cross term therefore
    couples ``skew(grad u - A)``, which is what makes the defect against
    the finite-rotation density third order in the amplitude.
    """
    ch = ch or ChiralParams()
    if c.p != 2.0:
        raise ValueError("the quadratic linearization requires p = 2")
    grad_u = np.asarray(grad_u, dtype=float)
    a = np.asarray(a, dtype=float)
    curl_a = np.asarray(curl_a, dtype=float)
    sym_residue = np.abs(a + np.swapaxes(a, -2, -1)).max()
    if sym_residue > 1e-10:
        raise ValueError(
            f"infinitesimal microrotation must be skew (residue {sym_residue:.3e})"
        )
    eps_bar = grad_u - a
    curv = m.mu * c.L_c**2 * np.asarray(b_quadratic(curl_a, c.a1, c.a2, c.a3))
    out = np.asarray(w_mp(eps_bar, m)) + curv
    if not ch.is_zero():
        s1, s2, s3 = _chiral_coeffs(m, c, ch)
        out = out + (
            s1 * _dot(_dev_sym(grad_u), _dev_sym(curl_a))
            + s2 * _dot(_skew(eps_bar), _skew(curl_a))
            + s3 * _tr(grad_u) * _tr(curl_a)
        )
    return _scalar(out)


def coupling_polar(u: np.ndarray, mu_c: float) -> float:
    """Rotational coupling ``mu_c |polar(U) - id|^2`` (single tensor)."""
    r = polar_rotation(np.asarray(u, dtype=float))
    return mu_c * float(np.sum((r - ID3) ** 2))


def coupling_geodesic(u: np.ndarray, mu_c: float) -> float:
    """Squared geodesic rotational coupling ``mu_c |log(polar(U))|^2``.

    The norm is the Frobenius norm of the matrix logarithm, i.e. twice
    the squared rotation angle, matching the shared quadratic expansion
    of all rotational couplings.
    """
    r = polar_rotation(np.asarray(u, dtype=float))
    w = log_so3(r)
    return mu_c * 2.0 * float(w @ w)


# ---------------------------------------------------------------------------
# derivatives

def _db_quadratic(k, a1, a2, a3):
    return 2.0 * (
        a1 * _dev_sym(k)
        + a2 * _skew(k)
        + a3 * _tr(k)[..., None, None] * ID3
    )


def dw_dE(
    e: np.ndarray,
    k: np.ndarray,
    m: IsotropicModuli,
    c: CurvatureParams,
    ch: ChiralParams | None = None,
) -> np.ndarray:
    """Derivative of the total density in the strain argument."""
    ch = ch or ChiralParams()
    _require_quadratic(c, ch)
    e = np.asarray(e, dtype=float)
    k = np.asarray(k, dtype=float)
    out = (
        2.0 * m.mu * _dev_sym(e)
        + 2.0 * m.mu_c * _skew(e)
        + m.kappa * _tr(e)[..., None, None] * ID3
    )
    if not ch.is_zero():
        s1, s2, s3 = _chiral_coeffs(m, c, ch)
        out = out + (
            s1 * _dev_sym(k)
            + s2 * _skew(k)
            + s3 * _tr(k)[..., None, None] * ID3
        )
    return out


def dw_dK(
    e: np.ndarray,
    k: np.ndarray,
    m: IsotropicModuli,
    c: CurvatureParams,
    ch: ChiralParams | None = None,
) -> np.ndarray:
    """Derivative of the total density in the dislocation argument.

    For p > 2 the derivative at K = 0 is zero (the density is
    O(|K|^p)), which removes the B^(p/2-1) singularity.
    """
    ch = ch or ChiralParams()
    _require_quadratic(c, ch)
    e = np.asarray(e, dtype=float)
    k = np.asarray(k, dtype=float)
    b = np.asarray(b_quadratic(k, c.a1, c.a2, c.a3))
    if c.p == 2.0:
        factor = np.ones_like(b)
    else:
        factor = np.where(b > 0.0, b, 1.0) ** (0.5 * c.p - 1.0)
        factor = np.where(b > 0.0, factor, 0.0)
    out = (
        m.mu * c.L_c**c.p * 0.5 * c.p * factor[..., None, None]
        * _db_quadratic(k, c.a1, c.a2, c.a3)
    )
    if not ch.is_zero():
        s1, s2, s3 = _chiral_coeffs(m, c, ch)
        out = out + (
            s1 * _dev_sym(e)
            + s2 * _skew(e)
            + s3 * _tr(e)[..., None, None] * ID3
        )
    return out


# ---------------------------------------------------------------------------
# diagnostics

@dataclass(frozen=True)
class Condition:
    """One definiteness inequality with its margin (lhs - rhs)."""

    name: str
    satisfied: bool
    margin: float


@dataclass(frozen=True)
class DefinitenessReport:
    conditions: tuple

    @property
    def definite(self) -> bool:
        return all(c.satisfied for c in self.conditions)

    def to_text(self) -> str:
        width = max(len(c.name) for c in self.conditions)
        lines = [
            f"{c.name:<{width}}  {'ok' if c.satisfied else 'FAIL':<4}  margin = {c.margin:+.6g}"
            for c in self.conditions
        ]
        verdict = "positive definite" if self.definite else "NOT positive definite"
        return "\n".join(lines + [f"overall: {verdict}"])

    def to_machine(self) -> str:
        lines = [
            f"condition.{c.name.replace(' ', '_')} = {int(c.satisfied)} {c.margin:.17g}"
            for c in self.conditions
        ]
        lines.append(f"definite = {int(self.definite)}")
        return "\n".join(lines)


def check_definiteness(
    m: IsotropicModuli, c: CurvatureParams, ch: ChiralParams | None = None
) -> DefinitenessReport:
    """Screen a parameter set for pointwise positive definiteness.

    Never raises: invalid parameters produce failing entries.
    """
    ch = ch or ChiralParams()
    conds = [
        Condition("mu > 0", m.mu > 0.0, m.mu),
        Condition("kappa > 0", m.kappa > 0.0, m.kappa),
        Condition("mu_c > 0", m.mu_c > 0.0, m.mu_c),
        Condition("L_c > 0", c.L_c > 0.0, c.L_c),
        Condition("p >= 2", c.p >= 2.0, c.p - 2.0),
        Condition("beta1 >= 0", ch.beta1 >= 0.0, ch.beta1),
        Condition("beta2 >= 0", ch.beta2 >= 0.0, ch.beta2),
        Condition("beta3 >= 0", ch.beta3 >= 0.0, ch.beta3),
        Condition("a1 > beta1", c.a1 > ch.beta1, c.a1 - ch.beta1),
    ]
    if m.mu_c > 0.0:
        margin2 = c.a2 - (m.mu / m.mu_c) * ch.beta2
    else:
        margin2 = -math.inf
    conds.append(Condition("a2 > (mu/mu_c) beta2", margin2 > 0.0, margin2))
    if m.kappa > 0.0:
        margin3 = c.a3 - (m.mu / m.kappa) * ch.beta3
    else:
        margin3 = -math.inf
    conds.append(Condition("a3 > (mu/kappa) beta3", margin3 > 0.0, margin3))
    return DefinitenessReport(tuple(conds))


def coercivity_constants(m: IsotropicModuli, c: CurvatureParams):
    """Exact coercivity constants (c1, c2, c3).

    c1 bounds the curvature quadratic form by |K|^2, c2 bounds the
    stretch energy by |E|^2, and c3 = mu L_c^p c1^(p/2) bounds the
    curvature energy by |K|^p.  The values are the exact minima over
    the three orthogonal subspaces, not conservative estimates.
    """
    c1 = min(c.a1, c.a2, 3.0 * c.a3)
    c2 = min(m.mu, m.mu_c, 1.5 * m.kappa)
    c3 = m.mu * c.L_c**c.p * c1 ** (0.5 * c.p)
    return c1, c2, c3


def _block_matrices(m: IsotropicModuli, c: CurvatureParams, ch: ChiralParams):
    """Exact 2x2 quadratic-form blocks of the chiral energy.

    Blocks act on (|part E|, |part K|) for the deviatoric, skew and
    spherical subspaces.  Note the spherical block carries kappa/2, so
    the screening inequality on a3 is necessary but not sharp.
    """
    s1, s2, s3 = _chiral_coeffs(m, c, ch)
    lc2 = m.mu * c.L_c**2
    dev_block = np.array([[m.mu, 0.5 * s1], [0.5 * s1, lc2 * c.a1]])
    skew_block = np.array([[m.mu_c, 0.5 * s2], [0.5 * s2, lc2 * c.a2]])
    # spherical parts: tr E = sqrt(3) x, tr K = sqrt(3) y for unit norms
    sph_block = np.array(
        [[0.5 * m.kappa * 3.0, 0.5 * s3 * 3.0], [0.5 * s3 * 3.0, lc2 * c.a3 * 3.0]]
    )
    return dev_block, skew_block, sph_block


def negative_energy_witness(
    m: IsotropicModuli, c: CurvatureParams, ch: ChiralParams
):
    """Search for (E, K) with negative total energy.

    Examines the three 2x2 subspace blocks of the quadratic chiral
    energy; when one is indefinite, its negative eigenvector gives an
    explicit witness pair.  Returns (E, K, value) or None.
    """
    if c.p != 2.0:
        raise ValueError("witness search applies to the quadratic case p = 2")
    dev_dir = np.zeros((3, 3))
    dev_dir[0, 1] = dev_dir[1, 0] = 1.0 / math.sqrt(2.0)
    skew_dir = np.zeros((3, 3))
    skew_dir[0, 1] = -1.0 / math.sqrt(2.0)
    skew_dir[1, 0] = 1.0 / math.sqrt(2.0)
    sph_dir = ID3 / math.sqrt(3.0)
    best = None
    for block, direction in zip(
        _block_matrices(m, c, ch), (dev_dir, skew_dir, sph_dir)
    ):
        evals, evecs = np.linalg.eigh(block)
        if evals[0] < 0.0:
            x, y = evecs[:, 0]
            e = x * direction
            k = y * direction
            value = w_total(e, k, m, c, ch)
            if best is None or value < best[2]:
                best = (e, k, value)
    return best
