"""Identity suites: algebraic and field-level consistency checks.

Each check reports its worst error and a tolerance: exact algebraic
identities must hold to near rounding (1e-8 with wide margin), while
field-based identities involve finite differences and are held to a
second-order C*h^2 budget, so their reported errors shrink about 4x
when the node count per axis doubles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import curvature as atlas
from .curvature import CurvatureMeasure, REPRESENTATIONS, convert, convert_array
from .fields import Grid, VectorField, curl_matrix, grad_rotation, grad_vector
from .kinematics import curvature_state, dislocation_direct
from .synthetic import RandomRotationVectorField, random_smooth_vector_field, twist_rotation_field
from .tensors import anti, axl, ddot, dev, eps, norm_sq, skew, sym, trace

__all__ = ["IdentityResult", "run_identities"]

ANALYTIC_TOL = 1e-8
FIELD_TOL_SCALE = 1.0  # tolerance C*h^2 for second-order field identities


@dataclass(frozen=True)
class IdentityResult:
    name: str
    error: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.error <= self.tol


def _rand_skew(rng):
    return anti(rng.standard_normal(3))


def _max_over(samples, fn) -> float:
    return max(fn(s) for s in samples)


def run_identities(seed: int = 0, n_samples: int = 50, grid_n: int = 9) -> list:
    """Run the full identity suite; deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    results = []

    # --- algebraic identities on random tensors -------------------------
    mats = [rng.standard_normal((3, 3)) for _ in range(n_samples)]
    skews = [_rand_skew(rng) for _ in range(n_samples)]
    vecs = [rng.standard_normal(3) for _ in range(n_samples)]

    results.append(IdentityResult(
        "axl/anti mutual inverse",
        max(
            _max_over(skews, lambda s: np.abs(anti(axl(s)) - s).max()),
            _max_over(vecs, lambda v: np.abs(axl(anti(v)) - v).max()),
        ),
        ANALYTIC_TOL,
    ))
    results.append(IdentityResult(
        "axial norm halving |axl S|^2 = |S|^2/2",
        _max_over(skews, lambda s: abs(norm_sq(axl(s)) - 0.5 * norm_sq(s))),
        ANALYTIC_TOL,
    ))
    results.append(IdentityResult(
        "orthogonal split |M|^2 = |dev sym|^2 + |skew|^2 + tr^2/3",
        _max_over(
            mats,
            lambda m: abs(
                norm_sq(m)
                - norm_sq(dev(sym(m)))
                - norm_sq(skew(m))
                - trace(m) ** 2 / 3.0
            ),
        ),
        ANALYTIC_TOL,
    ))
    results.append(IdentityResult(
        "Nye round trip",
        _max_over(
            mats,
            lambda g: max(
                np.abs(atlas.nye_inverse(atlas.nye_forward(g)) - g).max(),
                np.abs(atlas.nye_forward(atlas.nye_inverse(g)) - g).max(),
            ),
        ),
        ANALYTIC_TOL,
    ))

    def nye_norm_err(g):
        k = atlas.nye_forward(g)
        return max(
            abs(norm_sq(k) - norm_sq(g) - trace(g) ** 2),
            abs(norm_sq(g) - norm_sq(k) + 0.25 * trace(k) ** 2),
            abs(trace(k) - 2.0 * trace(g)),
            np.abs(skew(k) - skew(g)).max(),
            np.abs(dev(sym(k)) + dev(sym(g))).max(),
        )

    results.append(IdentityResult(
        "norm/trace relations of the Nye pair",
        _max_over(mats, nye_norm_err),
        ANALYTIC_TOL,
    ))

    # --- atlas closure ---------------------------------------------------
    def closure_err(g):
        worst = 0.0
        for rep_a in REPRESENTATIONS:
            start = CurvatureMeasure(rep_a, convert_array(g, "wryness", rep_a))
            for rep_b in REPRESENTATIONS:
                mid = convert(start, rep_b)
                for rep_c in REPRESENTATIONS:
                    two_leg = convert(mid, rep_c).value
                    direct = convert(start, rep_c).value
                    worst = max(worst, np.abs(two_leg - direct).max())
        return worst

    results.append(IdentityResult(
        "atlas composition closure (all triples)",
        _max_over(mats[: min(n_samples, 12)], closure_err),
        ANALYTIC_TOL,
    ))
    results.append(IdentityResult(
        "wryness->contortion: table entry vs Nye route",
        _max_over(
            mats,
            lambda g: np.abs(
                convert_array(g, "wryness", "contortion")
                - atlas.wryness_to_contortion_via_dislocation(g)
            ).max(),
        ),
        ANALYTIC_TOL,
    ))

    def torsion_err(g):
        frak = convert_array(g, "wryness", "rotation_gradient")
        tors = convert_array(g, "wryness", "torsion")
        ktilde = convert_array(g, "wryness", "contortion")
        kbar = convert_array(g, "wryness", "dislocation")
        t12 = np.swapaxes(tors, 0, 1)
        t13 = np.swapaxes(tors, 0, 2)
        return max(
            np.abs(ddot(tors, eps()) - 2.0 * kbar).max(),
            np.abs(tors + t12 - t13 - 2.0 * ktilde).max(),
            np.abs(ddot(frak, eps()) + kbar).max(),
            np.abs(tors - (ktilde - frak)).max(),
        )

    results.append(IdentityResult(
        "torsion contractions (T:eps = 2K etc.)",
        _max_over(mats, torsion_err),
        ANALYTIC_TOL,
    ))

    # --- field-based identities ------------------------------------------
    grid = Grid((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (grid_n, grid_n, grid_n))
    h_max = float(grid.spacing.max())
    field_tol = FIELD_TOL_SCALE * h_max**2

    theta = 0.7
    tw = twist_rotation_field(grid, theta)
    st = curvature_state(tw)
    gamma_exact = np.zeros((3, 3))
    gamma_exact[2, 0] = theta
    kbar_exact = np.zeros((3, 3))
    kbar_exact[0, 2] = -theta
    results.append(IdentityResult(
        "twist field: wryness matches closed form",
        float(np.abs(st.gamma - gamma_exact).max()),
        field_tol,
    ))
    results.append(IdentityResult(
        "twist field: dislocation matches closed form",
        float(np.abs(st.dislocation - kbar_exact).max()),
        field_tol,
    ))

    field_rng = np.random.default_rng(seed + 1)
    sampler = RandomRotationVectorField(field_rng, amplitude=0.05, wavenumber=0.6)
    rf = sampler.rotation_field(grid)
    state = curvature_state(rf)
    grad_r = grad_rotation(rf)
    results.append(IdentityResult(
        "random field: |Gamma|^2 = |Grad R|^2 / 2",
        abs(norm_sq(state.gamma) - 0.5 * norm_sq(grad_r.data)),
        field_tol,
    ))
    results.append(IdentityResult(
        "random field: direct curl dislocation vs Nye(wryness)",
        float(np.abs(dislocation_direct(rf) - atlas.nye_forward(state.gamma)).max()),
        field_tol,
    ))
    results.append(IdentityResult(
        "random field: rotation gradient contracts to dislocation",
        float(np.abs(
            np.einsum("...irs,rsj->...ij", state.frak, eps()) + state.dislocation
        ).max()),
        ANALYTIC_TOL,
    ))
    results.append(IdentityResult(
        "random field: exact wryness within O(h^2)",
        float(np.abs(state.gamma - sampler.wryness_field(grid)).max()),
        field_tol,
    ))

    v = random_smooth_vector_field(grid, field_rng, amplitude=0.3, wavenumber=1.0)
    curl_grad = curl_matrix(grad_vector(v))
    results.append(IdentityResult(
        "curl of a gradient field vanishes",
        float(np.abs(curl_grad.data).max()),
        ANALYTIC_TOL,
    ))

    affine = VectorField(
        grid, grid.coords() @ np.array([[1.0, 0.2, 0.0], [0.0, 1.0, -0.3], [0.1, 0.0, 1.0]]).T + 0.5
    )
    f = grad_vector(affine)
    a_mat = np.array([[1.0, 0.2, 0.0], [0.0, 1.0, -0.3], [0.1, 0.0, 1.0]])
    results.append(IdentityResult(
        "gradient exact on affine maps",
        float(np.abs(f.data - a_mat).max()),
        ANALYTIC_TOL,
    ))

    return results
