"""Line-oriented run configuration.

Format: one ``section.key = value`` assignment per line, ``#`` starts a
comment.  Values are whitespace-separated scalars or words; no quoting,
no nesting.  The builders below turn a parsed configuration into grid,
material, boundary, load and minimizer objects, validating parameter
invariants before any computation starts.

Recognized keys::

    grid.shape      = 9 9 9          # nodes per axis (>= 2)
    grid.origin     = 0 0 0
    grid.extent     = 1 1 1
    material.mu     = 1.0            # also: kappa, mu_c, a1, a2, a3,
    material.L_c    = 0.5            #       p, beta1, beta2, beta3
    boundary.dirichlet = xmin xmax   # faces; the rest carry tractions
    dirichlet.phi       = identity | file:PATH
    dirichlet.rotation  = identity | twist:RATE:AXIS:ALONG | file:PATH
    loads.body_force     = 0 0 0     # constant vector, or *_file = PATH
    loads.traction       = 0 0 0
    loads.body_couple    = 9 numbers, row-major
    loads.surface_couple = 9 numbers, row-major
    minimize.max_iterations / grad_tolerance / initial_step / armijo_c /
    minimize.backtrack_factor / max_backtracks / relaxed / seed
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field as dc_field

import numpy as np

from .fields import (
    FACES,
    BoundaryPartition,
    Grid,
    Mat3Field,
    RotationField,
    VectorField,
    read_field,
)
from .functional import LoadSet, Problem
from .materials import ChiralParams, CurvatureParams, IsotropicModuli, MaterialParams
from .minimize import MinimizeConfig
from .synthetic import twist_rotation_field

__all__ = ["RunConfig", "parse_config", "load_config"]

_AXIS_NAMES = {"x": 0, "y": 1, "z": 2}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Parsed key-value tree with typed accessors."""

    values: dict = dc_field(default_factory=dict)
    path: str = "<memory>"

    def get(self, key: str, default=None) -> str | None:
        return self.values.get(key, default)

    def get_float(self, key: str, default: float | None = None) -> float:
        raw = self.values.get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"{self.path}: missing required key {key}")
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{self.path}: key {key} is not a number: {raw!r}") from None

    def get_int(self, key: str, default: int | None = None) -> int:
        return int(round(self.get_float(key, None if default is None else float(default))))

    def get_bool(self, key: str, default: bool = False) -> bool:
        raw = self.values.get(key)
        if raw is None:
            return default
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{self.path}: key {key} is not a boolean: {raw!r}")

    def get_floats(self, key: str, count: int, default=None) -> np.ndarray:
        raw = self.values.get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"{self.path}: missing required key {key}")
            return np.asarray(default, dtype=float)
        parts = raw.split()
        if len(parts) != count:
            raise ConfigError(f"{self.path}: key {key} needs {count} numbers, got {len(parts)}")
        return np.array([float(p) for p in parts])


def parse_config(text: str, path: str = "<memory>") -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'section.key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or "." not in key:
            raise ConfigError(f"{path}:{lineno}: malformed key {key!r}")
        values[key] = value
    return RunConfig(values, path)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read(), path=str(path))


# ---------------------------------------------------------------------------
# builders

def build_grid(cfg: RunConfig) -> Grid:
    shape = cfg.get_floats("grid.shape", 3, default=(9, 9, 9))
    origin = cfg.get_floats("grid.origin", 3, default=(0.0, 0.0, 0.0))
    extent = cfg.get_floats("grid.extent", 3, default=(1.0, 1.0, 1.0))
    return Grid(tuple(origin), tuple(extent), tuple(int(n) for n in shape))


def build_material(cfg: RunConfig) -> MaterialParams:
    moduli = IsotropicModuli(
        mu=cfg.get_float("material.mu", 1.0),
        kappa=cfg.get_float("material.kappa", 1.0),
        mu_c=cfg.get_float("material.mu_c", 1.0),
    )
    curvature = CurvatureParams(
        a1=cfg.get_float("material.a1", 1.0),
        a2=cfg.get_float("material.a2", 1.0),
        a3=cfg.get_float("material.a3", 1.0),
        L_c=cfg.get_float("material.L_c", 1.0),
        p=cfg.get_float("material.p", 2.0),
    )
    chiral = ChiralParams(
        beta1=cfg.get_float("material.beta1", 0.0),
        beta2=cfg.get_float("material.beta2", 0.0),
        beta3=cfg.get_float("material.beta3", 0.0),
    )
    return MaterialParams(moduli, curvature, chiral)


def build_partition(cfg: RunConfig, grid: Grid) -> BoundaryPartition:
    raw = cfg.get("boundary.dirichlet", "")
    faces = tuple(raw.split()) if raw else ()
    unknown = set(faces) - set(FACES)
    if unknown:
        raise ConfigError(f"{cfg.path}: unknown boundary faces {sorted(unknown)}")
    return BoundaryPartition(grid, frozenset(faces))


def _base_dir(cfg: RunConfig) -> str:
    return os.path.dirname(cfg.path) if cfg.path not in ("<memory>",) else "."


def _dirichlet_phi(cfg: RunConfig, grid: Grid) -> VectorField:
    spec = cfg.get("dirichlet.phi", "identity")
    if spec == "identity":
        return grid.identity_map()
    if spec.startswith("file:"):
        f = read_field(os.path.join(_base_dir(cfg), spec[5:]))
        if not isinstance(f, VectorField) or f.grid != grid:
            raise ConfigError(f"{cfg.path}: dirichlet.phi file must be a vector field on the grid")
        return f
    raise ConfigError(f"{cfg.path}: unknown dirichlet.phi spec {spec!r}")


def _dirichlet_rotation(cfg: RunConfig, grid: Grid) -> RotationField:
    spec = cfg.get("dirichlet.rotation", "identity")
    if spec == "identity":
        return RotationField.identity(grid)
    if spec.startswith("twist:"):
        parts = spec.split(":")[1:]
        if len(parts) != 3 or parts[1] not in _AXIS_NAMES or parts[2] not in _AXIS_NAMES:
            raise ConfigError(
                f"{cfg.path}: twist spec must be twist:RATE:AXIS:ALONG, got {spec!r}"
            )
        rate = float(parts[0])
        return twist_rotation_field(grid, rate, axis=_AXIS_NAMES[parts[1]], along=_AXIS_NAMES[parts[2]])
    if spec.startswith("file:"):
        f = read_field(os.path.join(_base_dir(cfg), spec[5:]))
        if not isinstance(f, RotationField) or f.grid != grid:
            raise ConfigError(
                f"{cfg.path}: dirichlet.rotation file must be a rotation field on the grid"
            )
        return f
    raise ConfigError(f"{cfg.path}: unknown dirichlet.rotation spec {spec!r}")


def _load_vector(cfg: RunConfig, grid: Grid, key: str) -> VectorField | None:
    file_key = cfg.get(key + "_file")
    if file_key is not None:
        f = read_field(os.path.join(_base_dir(cfg), file_key))
        if not isinstance(f, VectorField) or f.grid != grid:
            raise ConfigError(f"{cfg.path}: {key}_file must be a vector field on the grid")
        return f
    if cfg.get(key) is None:
        return None
    v = cfg.get_floats(key, 3)
    if not v.any():
        return None
    return VectorField.constant(grid, v)


def _load_matrix(cfg: RunConfig, grid: Grid, key: str) -> Mat3Field | None:
    file_key = cfg.get(key + "_file")
    if file_key is not None:
        f = read_field(os.path.join(_base_dir(cfg), file_key))
        if not isinstance(f, Mat3Field) or f.grid != grid:
            raise ConfigError(f"{cfg.path}: {key}_file must be a mat3 field on the grid")
        return f
    if cfg.get(key) is None:
        return None
    v = cfg.get_floats(key, 9)
    if not v.any():
        return None
    return Mat3Field.constant(grid, v.reshape(3, 3))


def build_loads(cfg: RunConfig, grid: Grid) -> LoadSet:
    return LoadSet(
        body_force=_load_vector(cfg, grid, "loads.body_force"),
        traction=_load_vector(cfg, grid, "loads.traction"),
        body_couple=_load_matrix(cfg, grid, "loads.body_couple"),
        surface_couple=_load_matrix(cfg, grid, "loads.surface_couple"),
    )


def build_minimize_config(cfg: RunConfig, relaxed_override: bool | None = None) -> MinimizeConfig:
    relaxed = cfg.get_bool("minimize.relaxed", False)
    if relaxed_override is not None:
        relaxed = relaxed_override
    return MinimizeConfig(
        max_iterations=cfg.get_int("minimize.max_iterations", 20000),
        grad_tolerance=cfg.get_float("minimize.grad_tolerance", 1e-6),
        initial_step=cfg.get_float("minimize.initial_step", 1.0),
        armijo_c=cfg.get_float("minimize.armijo_c", 1e-4),
        backtrack_factor=cfg.get_float("minimize.backtrack_factor", 0.5),
        max_backtracks=cfg.get_int("minimize.max_backtracks", 60),
        relaxed_rotations=relaxed,
        random_seed=cfg.get_int("minimize.seed", 0),
    )


def build_problem(cfg: RunConfig) -> Problem:
    """Assemble and validate the full problem from a configuration."""
    grid = build_grid(cfg)
    material = build_material(cfg)
    material.validate()
    partition = build_partition(cfg, grid)
    loads = build_loads(cfg, grid)
    prob = Problem(
        grid,
        partition,
        material,
        loads=loads,
        phi_d=_dirichlet_phi(cfg, grid),
        rot_d=_dirichlet_rotation(cfg, grid),
    )
    prob.validate()
    return prob
