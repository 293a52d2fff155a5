"""Grid geometry, scalar fields, region masks and plug-in contour extraction."""

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import ndimage

from src.errors import GeometryError, InvalidFieldError


class GridGeometry(BaseModel):
    """Rectangular lattice of ny rows by nx columns; row i has y = origin_y + i * spacing_y."""

    model_config = ConfigDict(frozen=True)

    nx: int = Field(ge=2, description="Cell count along x (columns)")
    ny: int = Field(ge=2, description="Cell count along y (rows)")
    spacing_x: float = Field(default=1.0, gt=0.0)
    spacing_y: float = Field(default=1.0, gt=0.0)
    origin_x: float = Field(default=0.0, description="x of the center of cell (0, 0)")
    origin_y: float = Field(default=0.0, description="y of the center of cell (0, 0)")

    @classmethod
    def square(cls, pixels: int, extent: float) -> "GridGeometry":
        """pixels x pixels cells covering [0, extent]², cell centers at half-pixel offsets."""
        h = extent / pixels
        return cls(nx=pixels, ny=pixels, spacing_x=h, spacing_y=h, origin_x=h / 2, origin_y=h / 2)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def x_coords(self) -> np.ndarray:
        return self.origin_x + self.spacing_x * np.arange(self.nx)

    def y_coords(self) -> np.ndarray:
        return self.origin_y + self.spacing_y * np.arange(self.ny)

    def extent(self) -> tuple[float, float, float, float]:
        """(left, right, bottom, top) of the cell edges, for heat maps."""
        hx, hy = self.spacing_x / 2, self.spacing_y / 2
        x, y = self.x_coords(), self.y_coords()
        return (x[0] - hx, x[-1] + hx, y[0] - hy, y[-1] + hy)


def _as_grid(geometry: GridGeometry, values, name: str, dtype=float) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    if arr.size != geometry.size:
        raise GeometryError(
            f"{name} has {arr.size} entries but the {geometry.ny}x{geometry.nx} grid needs {geometry.size}"
        )
    arr = arr.reshape(geometry.shape).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    """One real value per cell, row-major, with an optional validity mask (True = inside S)."""

    geometry: GridGeometry
    values: np.ndarray
    mask: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "values", _as_grid(self.geometry, self.values, "values"))
        if self.mask is not None:
            object.__setattr__(self, "mask", _as_grid(self.geometry, self.mask, "mask", dtype=bool))

    @property
    def valid(self) -> np.ndarray:
        """Boolean (ny, nx) array of masked-in cells."""
        if self.mask is None:
            return np.ones(self.geometry.shape, dtype=bool)
        return self.mask

    def with_mask(self, mask: Optional[np.ndarray]) -> "ScalarField":
        return ScalarField(self.geometry, self.values, mask)

    def require_finite(self) -> None:
        bad = ~np.isfinite(self.values) & self.valid
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise InvalidFieldError(
                f"field has {int(bad.sum())} non-finite value(s) on masked-in cells, first at row {i}, col {j}"
            )


@dataclass(frozen=True, eq=False)
class FieldStack:
    """n co-registered fields (observations or residuals), shape (n, ny, nx)."""

    geometry: GridGeometry
    values: np.ndarray
    mask: Optional[np.ndarray] = None

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim == 2:
            arr = arr.reshape((arr.shape[0],) + self.geometry.shape) if arr.shape[1] == self.geometry.size else arr
        if arr.ndim != 3 or arr.shape[1:] != self.geometry.shape:
            raise GeometryError(
                f"stack of shape {arr.shape} does not match grid {self.geometry.ny}x{self.geometry.nx}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if self.mask is not None:
            object.__setattr__(self, "mask", _as_grid(self.geometry, self.mask, "mask", dtype=bool))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def valid(self) -> np.ndarray:
        if self.mask is None:
            return np.ones(self.geometry.shape, dtype=bool)
        return self.mask

    def flat(self) -> np.ndarray:
        """(n, L) view, row-major over cells."""
        return self.values.reshape(self.n, self.geometry.size)

    def layer(self, j: int) -> ScalarField:
        return ScalarField(self.geometry, self.values[j], self.mask)


@dataclass(frozen=True, eq=False)
class RegionMask:
    """Boolean subset of the grid; set operations are cellwise."""

    geometry: GridGeometry
    inside: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "inside", _as_grid(self.geometry, self.inside, "inside", dtype=bool))

    @classmethod
    def empty(cls, geometry: GridGeometry) -> "RegionMask":
        return cls(geometry, np.zeros(geometry.shape, dtype=bool))

    @classmethod
    def full(cls, geometry: GridGeometry) -> "RegionMask":
        return cls(geometry, np.ones(geometry.shape, dtype=bool))

    @property
    def count(self) -> int:
        return int(self.inside.sum())

    def _check(self, other: "RegionMask") -> None:
        if other.geometry != self.geometry:
            raise GeometryError("region masks live on different grids")

    def issubset(self, other: "RegionMask") -> bool:
        self._check(other)
        return not bool((self.inside & ~other.inside).any())

    def __and__(self, other: "RegionMask") -> "RegionMask":
        self._check(other)
        return RegionMask(self.geometry, self.inside & other.inside)

    def __or__(self, other: "RegionMask") -> "RegionMask":
        self._check(other)
        return RegionMask(self.geometry, self.inside | other.inside)

    def __sub__(self, other: "RegionMask") -> "RegionMask":
        self._check(other)
        return RegionMask(self.geometry, self.inside & ~other.inside)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RegionMask):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(self.inside, other.inside)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ContourSet:
    """
    Interpolated crossing points of a field at ``source_level``.

    Point k sits on the edge between flat cells ``cells[k, 0]`` and
    ``cells[k, 1]`` with convex weights ``weights[k]``. ``segments`` holds
    marching-squares connectivity as pairs of point indices.
    """

    geometry: GridGeometry
    source_level: float
    points: np.ndarray
    cells: np.ndarray
    weights: np.ndarray
    segments: np.ndarray = dc_field(default_factory=lambda: np.empty((0, 2), dtype=int))

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    def polylines(self) -> list[np.ndarray]:
        """Each segment as a (2, 2) array of physical coordinates."""
        return [self.points[s] for s in self.segments]


# ──────────────────────────── Operations ────────────────────────────


def excursion_set(field: ScalarField, c: float) -> RegionMask:
    """Cells of S where the field is at or above c (weak inequality)."""
    field.require_finite()
    return RegionMask(field.geometry, (field.values >= c) & field.valid)


def _edge_crossings(field: ScalarField, c: float):
    """Crossing edges as (flat_a, flat_b, t) for horizontal then vertical edges."""
    g = field.geometry
    v = field.values
    ok = field.valid
    flat = np.arange(g.size).reshape(g.shape)
    above = v >= c

    out = []
    for a_sl, b_sl in (
        ((slice(None), slice(None, -1)), (slice(None), slice(1, None))),   # along x
        ((slice(None, -1), slice(None)), (slice(1, None), slice(None))),   # along y
    ):
        cross = ok[a_sl] & ok[b_sl] & (above[a_sl] != above[b_sl])
        va, vb = v[a_sl][cross], v[b_sl][cross]
        t = (c - va) / (vb - va)
        out.append((flat[a_sl][cross], flat[b_sl][cross], t, cross))
    return out


def extract_boundary(field: ScalarField, c: float) -> ContourSet:
    """
    Marching-squares pass over (field - c) on the cell-center lattice.

    One point per edge whose endpoints fall on different sides of c (ties
    count as inside). Edges touching a masked-out cell are skipped.
    """
    field.require_finite()
    g = field.geometry
    (ha, hb, ht, hcross), (va, vb, vt, vcross) = _edge_crossings(field, c)

    def coords(a, b, t):
        ia, ja = np.divmod(a, g.nx)
        ib, jb = np.divmod(b, g.nx)
        x = g.origin_x + g.spacing_x * (ja + t * (jb - ja))
        y = g.origin_y + g.spacing_y * (ia + t * (ib - ia))
        return np.column_stack([x, y])

    a = np.concatenate([ha, va]).astype(int)
    b = np.concatenate([hb, vb]).astype(int)
    t = np.concatenate([ht, vt])
    points = coords(a, b, t) if a.size else np.empty((0, 2))
    cells = np.column_stack([a, b]) if a.size else np.empty((0, 2), dtype=int)
    weights = np.column_stack([1.0 - t, t]) if a.size else np.empty((0, 2))

    segments = _march(field, c, hcross, vcross, n_h=ha.size)
    return ContourSet(g, float(c), points, cells, weights, segments)


# Edges adjacent to each square corner: 0 bottom, 1 right, 2 top, 3 left.
_CORNER_EDGES = ((0, 3), (0, 1), (1, 2), (2, 3))


def _march(field: ScalarField, c: float, hcross, vcross, n_h: int) -> np.ndarray:
    """Connect crossing points square by square; saddles use the 4-corner average."""
    ny, nx = field.geometry.shape
    hidx = np.full((ny, nx - 1), -1)
    hidx[hcross] = np.arange(n_h)
    vidx = np.full((ny - 1, nx), -1)
    vidx[vcross] = n_h + np.arange(int(vcross.sum()))

    ok = field.valid
    full = ok[:-1, :-1] & ok[:-1, 1:] & ok[1:, 1:] & ok[1:, :-1]
    edges = np.stack(
        [hidx[:-1, :], vidx[:, 1:], hidx[1:, :], vidx[:, :-1]], axis=-1
    )  # (ny-1, nx-1, 4)
    edges = edges[full]
    hits = (edges >= 0).sum(axis=1)

    pairs = np.sort(edges[hits == 2], axis=1)[:, 2:]
    segs = [pairs]

    if (hits == 4).any():
        v = field.values
        corners = np.stack([v[:-1, :-1], v[:-1, 1:], v[1:, 1:], v[1:, :-1]], axis=-1)[full]
        for e, q in zip(edges[hits == 4], corners[hits == 4]):
            center_inside = q.mean() >= c
            # cut off the corners whose side differs from the center
            cut = [k for k in range(4) if (q[k] >= c) != center_inside]
            segs.append(np.array([[e[_CORNER_EDGES[k][0]], e[_CORNER_EDGES[k][1]]] for k in cut]))

    return np.concatenate(segs).astype(int) if segs else np.empty((0, 2), dtype=int)


def boundary_cells(field: ScalarField, c: float) -> RegionMask:
    """Masked-in cells touching a crossing edge (the adjacent-cells discretization)."""
    field.require_finite()
    g = field.geometry
    inside = np.zeros(g.size, dtype=bool)
    for a, b, _, _ in _edge_crossings(field, c):
        inside[a] = True
        inside[b] = True
    return RegionMask(g, inside.reshape(g.shape))


def interpolate_on_contour(field: ScalarField, contour: ContourSet) -> np.ndarray:
    """Weight-convex combination of the two flanking cell values at each contour point."""
    if field.geometry != contour.geometry:
        raise GeometryError("contour was extracted on a different grid than the field")
    if contour.is_empty:
        return np.empty(0)
    flat = field.values.ravel()
    return (flat[contour.cells] * contour.weights).sum(axis=1)


def interpolate_stack(stack: FieldStack, contour: ContourSet) -> np.ndarray:
    """interpolate_on_contour applied to every layer; returns (P, n)."""
    if stack.geometry != contour.geometry:
        raise GeometryError("contour was extracted on a different grid than the stack")
    flat = stack.flat()
    return (
        flat[:, contour.cells[:, 0]] * contour.weights[:, 0]
        + flat[:, contour.cells[:, 1]] * contour.weights[:, 1]
    ).T


def inner_boundary(region: RegionMask, valid: Optional[np.ndarray] = None) -> RegionMask:
    """Cells of the region with an 8-neighbor inside S but outside the region."""
    valid = np.ones(region.geometry.shape, dtype=bool) if valid is None else valid
    outside = valid & ~region.inside
    touch = ndimage.binary_dilation(outside, structure=ndimage.generate_binary_structure(2, 2))
    return RegionMask(region.geometry, region.inside & touch)
