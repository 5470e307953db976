"""Structured-grid fields on a box domain.

A :class:`Grid` is a tensor-product node set on an axis-aligned box.
Nodal fields store their values with the three grid axes leading, e.g.
a vector field has ``data.shape == (n1, n2, n3, 3)``.  The module
provides second-order finite-difference gradient and row-wise curl
operators (central stencils inside, one-sided at the boundary), their
adjoints, trapezoidal volume/surface quadrature, a per-face boundary
partition, and the "COSSERAT-FIELD v1" text file format.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from .tensors import ANTI_E, rotation_defect

__all__ = [
    "FACES",
    "BoundaryPartition",
    "Grid",
    "Mat3Field",
    "RotationField",
    "Ten3Field",
    "VectorField",
    "curl_matrix",
    "fd_derivative",
    "fd_derivative_adjoint",
    "grad_rotation",
    "grad_vector",
    "integrate_surface",
    "integrate_volume",
    "read_field",
    "surface_weights",
    "volume_weights",
    "write_field",
]

FACES = ("xmin", "xmax", "ymin", "ymax", "zmin", "zmax")


@dataclass(frozen=True)
class Grid:
    """Axis-aligned box with ``shape[i] >= 2`` nodes per axis."""

    origin: tuple = (0.0, 0.0, 0.0)
    extent: tuple = (1.0, 1.0, 1.0)
    shape: tuple = (2, 2, 2)

    def __post_init__(self):
        if len(self.origin) != 3 or len(self.extent) != 3 or len(self.shape) != 3:
            raise ValueError("origin, extent and shape must have length 3")
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "extent", tuple(float(v) for v in self.extent))
        object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        if any(n < 2 for n in self.shape):
            raise ValueError(f"grid needs at least 2 nodes per axis, got {self.shape}")
        if any(e <= 0.0 for e in self.extent):
            raise ValueError(f"grid extents must be positive, got {self.extent}")

    @property
    def spacing(self) -> np.ndarray:
        return np.array(
            [self.extent[i] / (self.shape[i] - 1) for i in range(3)]
        )

    @property
    def n_nodes(self) -> int:
        n1, n2, n3 = self.shape
        return n1 * n2 * n3

    def axis_coords(self, axis: int) -> np.ndarray:
        return self.origin[axis] + np.linspace(0.0, self.extent[axis], self.shape[axis])

    def coords(self) -> np.ndarray:
        """Node positions, shape ``(n1, n2, n3, 3)``; cached and read-only."""
        return _grid_coords(self)

    def identity_map(self) -> "VectorField":
        """The reference placement ``x -> x``."""
        return VectorField(self, self.coords().copy())


@lru_cache(maxsize=64)
def _grid_coords(grid: "Grid") -> np.ndarray:
    xs = np.meshgrid(*(grid.axis_coords(a) for a in range(3)), indexing="ij")
    out = np.stack(xs, axis=-1)
    out.setflags(write=False)
    return out


def _check_field(grid: Grid, data: np.ndarray, tail: tuple) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    if data.shape != grid.shape + tail:
        raise ValueError(
            f"field data shape {data.shape} does not match grid {grid.shape} + {tail}"
        )
    if not np.all(np.isfinite(data)):
        raise ValueError("field data contains non-finite values")
    return data


@dataclass
class VectorField:
    grid: Grid
    data: np.ndarray  # (n1, n2, n3, 3)

    def __post_init__(self):
        self.data = _check_field(self.grid, self.data, (3,))

    @classmethod
    def constant(cls, grid: Grid, v) -> "VectorField":
        return cls(grid, np.broadcast_to(np.asarray(v, float), grid.shape + (3,)).copy())

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "VectorField":
        x = grid.coords().reshape(-1, 3)
        vals = np.array([fn(p) for p in x], dtype=float)
        return cls(grid, vals.reshape(grid.shape + (3,)))

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.data.copy())


@dataclass
class Mat3Field:
    grid: Grid
    data: np.ndarray  # (n1, n2, n3, 3, 3)

    def __post_init__(self):
        self.data = _check_field(self.grid, self.data, (3, 3))

    @classmethod
    def constant(cls, grid: Grid, m) -> "Mat3Field":
        return cls(grid, np.broadcast_to(np.asarray(m, float), grid.shape + (3, 3)).copy())

    def copy(self) -> "Mat3Field":
        return Mat3Field(self.grid, self.data.copy())


@dataclass
class Ten3Field:
    grid: Grid
    data: np.ndarray  # (n1, n2, n3, 3, 3, 3)

    def __post_init__(self):
        self.data = _check_field(self.grid, self.data, (3, 3, 3))


@dataclass
class RotationField:
    """Nodal SO(3) field; every node must pass the rotation check."""

    grid: Grid
    data: np.ndarray  # (n1, n2, n3, 3, 3)
    tol: float = 1e-12

    def __post_init__(self):
        self.data = _check_field(self.grid, self.data, (3, 3))
        defect = self.max_defect()
        if defect > self.tol:
            raise ValueError(
                f"rotation field violates SO(3) by {defect:.3e} (tol {self.tol:.1e})"
            )

    def max_defect(self) -> float:
        r = self.data.reshape(-1, 3, 3)
        ortho = np.abs(np.einsum("nji,njk->nik", r, r) - np.eye(3)).max()
        det = np.abs(np.linalg.det(r) - 1.0).max()
        return float(max(ortho, det))

    @classmethod
    def identity(cls, grid: Grid) -> "RotationField":
        data = np.broadcast_to(np.eye(3), grid.shape + (3, 3)).copy()
        return cls(grid, data)

    @classmethod
    def constant(cls, grid: Grid, r) -> "RotationField":
        r = np.asarray(r, dtype=float)
        if rotation_defect(r) > 1e-12:
            raise ValueError("constant rotation field needs a rotation matrix")
        return cls(grid, np.broadcast_to(r, grid.shape + (3, 3)).copy())

    @classmethod
    def from_function(cls, grid: Grid, fn, tol: float = 1e-12) -> "RotationField":
        x = grid.coords().reshape(-1, 3)
        vals = np.array([fn(p) for p in x], dtype=float)
        return cls(grid, vals.reshape(grid.shape + (3, 3)), tol=tol)

    def copy(self) -> "RotationField":
        return RotationField(self.grid, self.data.copy(), tol=self.tol)


# ---------------------------------------------------------------------------
# finite differences

def fd_derivative(data: np.ndarray, axis: int, h: float) -> np.ndarray:
    """d/dx along one grid axis: central inside, 3-point one-sided at the ends.

    Exact for quadratics at every node.  ``data`` may carry trailing
    component axes.
    """
    n = data.shape[axis]
    out = np.empty_like(data)
    src = np.moveaxis(data, axis, 0)
    dst = np.moveaxis(out, axis, 0)
    if n == 2:
        dst[0] = (src[1] - src[0]) / h
        dst[1] = (src[1] - src[0]) / h
        return out
    dst[1:-1] = (src[2:] - src[:-2]) / (2.0 * h)
    dst[0] = (-3.0 * src[0] + 4.0 * src[1] - src[2]) / (2.0 * h)
    dst[-1] = (3.0 * src[-1] - 4.0 * src[-2] + src[-3]) / (2.0 * h)
    return out


def fd_derivative_adjoint(data: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Transpose of :func:`fd_derivative` in the Euclidean node inner product."""
    n = data.shape[axis]
    out = np.zeros_like(data)
    src = np.moveaxis(data, axis, 0)
    dst = np.moveaxis(out, axis, 0)
    if n == 2:
        dst[0] = -(src[0] + src[1]) / h
        dst[1] = (src[0] + src[1]) / h
        return out
    # interior central stencil scatter
    dst[2:] += src[1:-1] / (2.0 * h)
    dst[:-2] -= src[1:-1] / (2.0 * h)
    # one-sided rows
    dst[0] += -3.0 * src[0] / (2.0 * h)
    dst[1] += 4.0 * src[0] / (2.0 * h)
    dst[2] += -src[0] / (2.0 * h)
    dst[-1] += 3.0 * src[-1] / (2.0 * h)
    dst[-2] += -4.0 * src[-1] / (2.0 * h)
    dst[-3] += src[-1] / (2.0 * h)
    return out


def grad_vector(phi: VectorField) -> Mat3Field:
    """Deformation gradient field: ``F_ab = d phi_a / d x_b``."""
    h = phi.grid.spacing
    cols = [fd_derivative(phi.data, axis, h[axis]) for axis in range(3)]
    return Mat3Field(phi.grid, np.stack(cols, axis=-1))


def grad_rotation(r: RotationField) -> Ten3Field:
    """Entrywise rotation gradient: ``(i,j,k) -> d R_ij / d x_k``."""
    h = r.grid.spacing
    slices = [fd_derivative(r.data, axis, h[axis]) for axis in range(3)]
    return Ten3Field(r.grid, np.stack(slices, axis=-1))


def curl_matrix(t: Mat3Field) -> Mat3Field:
    """Row-wise curl of a matrix field, ``-sum_k (d_k T) x e_k``."""
    h = t.grid.spacing
    out = np.zeros_like(t.data)
    for k in range(3):
        dk = fd_derivative(t.data, k, h[k])
        out -= dk @ ANTI_E[k]
    return Mat3Field(t.grid, out)


# ---------------------------------------------------------------------------
# quadrature

def _axis_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


@lru_cache(maxsize=64)
def volume_weights(grid: Grid) -> np.ndarray:
    """Trapezoidal product weights, shape ``(n1, n2, n3)``; sums to vol.

    Cached per grid; the returned array is read-only.
    """
    h = grid.spacing
    w1 = _axis_weights(grid.shape[0], h[0])
    w2 = _axis_weights(grid.shape[1], h[1])
    w3 = _axis_weights(grid.shape[2], h[2])
    out = w1[:, None, None] * w2[None, :, None] * w3[None, None, :]
    out.setflags(write=False)
    return out


def _face_index(face: str):
    axis = {"x": 0, "y": 1, "z": 2}[face[0]]
    side = 0 if face.endswith("min") else -1
    return axis, side


def surface_weights(grid: Grid, faces) -> np.ndarray:
    """2D trapezoidal weights summed over the given box faces.

    Shape ``(n1, n2, n3)``; nodes shared by two selected faces accumulate
    both contributions, so a constant integrates to the exact total area.
    """
    return _surface_weights_cached(grid, tuple(sorted(faces)))


@lru_cache(maxsize=64)
def _surface_weights_cached(grid: Grid, faces: tuple) -> np.ndarray:
    h = grid.spacing
    out = np.zeros(grid.shape)
    for face in faces:
        axis, side = _face_index(face)
        others = [a for a in range(3) if a != axis]
        wa = _axis_weights(grid.shape[others[0]], h[others[0]])
        wb = _axis_weights(grid.shape[others[1]], h[others[1]])
        w2d = wa[:, None] * wb[None, :]
        idx = [slice(None)] * 3
        idx[axis] = side
        out[tuple(idx)] += w2d
    out.setflags(write=False)
    return out


def integrate_volume(s: np.ndarray, grid: Grid) -> float:
    """Trapezoidal volume integral of a nodal scalar field."""
    s = np.asarray(s, dtype=float)
    if s.shape != grid.shape:
        raise ValueError(f"scalar field shape {s.shape} != grid shape {grid.shape}")
    return float(np.sum(volume_weights(grid) * s))


def integrate_surface(s: np.ndarray, grid: Grid, faces) -> float:
    """Surface integral of a nodal scalar field over a set of box faces."""
    faces = tuple(faces)
    if not faces:
        return 0.0
    s = np.asarray(s, dtype=float)
    if s.shape != grid.shape:
        raise ValueError(f"scalar field shape {s.shape} != grid shape {grid.shape}")
    return float(np.sum(surface_weights(grid, faces) * s))


# ---------------------------------------------------------------------------
# boundary partition

@dataclass(frozen=True)
class BoundaryPartition:
    """Per-face Dirichlet/traction split of the box boundary.

    Node tags are expanded from the face designation; a node shared
    between a Dirichlet and a traction face is tagged Dirichlet.
    """

    grid: Grid
    dirichlet_faces: frozenset = dc_field(default_factory=frozenset)

    def __post_init__(self):
        faces = frozenset(self.dirichlet_faces)
        unknown = faces - set(FACES)
        if unknown:
            raise ValueError(f"unknown boundary faces: {sorted(unknown)}")
        object.__setattr__(self, "dirichlet_faces", faces)

    @property
    def traction_faces(self) -> tuple:
        return tuple(f for f in FACES if f not in self.dirichlet_faces)

    def boundary_mask(self) -> np.ndarray:
        m = np.zeros(self.grid.shape, dtype=bool)
        for face in FACES:
            axis, side = _face_index(face)
            idx = [slice(None)] * 3
            idx[axis] = side
            m[tuple(idx)] = True
        return m

    def dirichlet_mask(self) -> np.ndarray:
        m = np.zeros(self.grid.shape, dtype=bool)
        for face in self.dirichlet_faces:
            axis, side = _face_index(face)
            idx = [slice(None)] * 3
            idx[axis] = side
            m[tuple(idx)] = True
        return m

    def traction_mask(self) -> np.ndarray:
        return self.boundary_mask() & ~self.dirichlet_mask()


# ---------------------------------------------------------------------------
# field files: "COSSERAT-FIELD v1"

_KIND_BY_TYPE = {
    VectorField: ("vector", (3,)),
    RotationField: ("rotation", (3, 3)),
    Mat3Field: ("mat3", (3, 3)),
    Ten3Field: ("ten3", (3, 3, 3)),
}
_KIND_TAIL = {"vector": (3,), "rotation": (3, 3), "mat3": (3, 3), "ten3": (3, 3, 3)}


def write_field(path, field) -> None:
    """Write a nodal field as COSSERAT-FIELD v1 text.

    One line per node in x-fastest order, components in row-major order,
    17 significant digits.
    """
    kind, tail = _KIND_BY_TYPE[type(field)]
    grid = field.grid
    n1, n2, n3 = grid.shape
    ncomp = int(np.prod(tail))
    # x-fastest: z slowest, then y, then x
    flat = np.transpose(
        field.data.reshape(grid.shape + (ncomp,)), (2, 1, 0, 3)
    ).reshape(-1, ncomp)
    with open(path, "w") as fh:
        fh.write("COSSERAT-FIELD v1\n")
        fh.write(f"grid {n1} {n2} {n3}\n")
        ox, oy, oz = grid.origin
        ex, ey, ez = grid.extent
        fh.write(f"box {ox:.17g} {oy:.17g} {oz:.17g} {ex:.17g} {ey:.17g} {ez:.17g}\n")
        fh.write(f"kind {kind}\n")
        for row in flat:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_field(path, rotation_tol: float = 1e-12):
    """Read a COSSERAT-FIELD v1 file into the matching field type."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "COSSERAT-FIELD v1":
            raise ValueError(f"{path}: not a COSSERAT-FIELD v1 file (got {header!r})")
        toks = fh.readline().split()
        if len(toks) != 4 or toks[0] != "grid":
            raise ValueError(f"{path}: malformed grid line")
        shape = tuple(int(t) for t in toks[1:])
        toks = fh.readline().split()
        if len(toks) != 7 or toks[0] != "box":
            raise ValueError(f"{path}: malformed box line")
        origin = tuple(float(t) for t in toks[1:4])
        extent = tuple(float(t) for t in toks[4:7])
        toks = fh.readline().split()
        if len(toks) != 2 or toks[0] != "kind" or toks[1] not in _KIND_TAIL:
            raise ValueError(f"{path}: malformed kind line")
        kind = toks[1]
        vals = np.loadtxt(fh, ndmin=2)
    grid = Grid(origin, extent, shape)
    tail = _KIND_TAIL[kind]
    ncomp = int(np.prod(tail))
    if vals.shape != (grid.n_nodes, ncomp):
        raise ValueError(
            f"{path}: expected {grid.n_nodes} x {ncomp} values, got {vals.shape}"
        )
    n1, n2, n3 = shape
    data = np.transpose(vals.reshape(n3, n2, n1, ncomp), (2, 1, 0, 3))
    data = data.reshape(shape + tail)
    if kind == "vector":
        return VectorField(grid, data)
    if kind == "rotation":
        return RotationField(grid, data, tol=rotation_tol)
    if kind == "mat3":
        return Mat3Field(grid, data)
    return Ten3Field(grid, data)
