"""Geometric resampling engine: affine resampling, displacement-field
upsampling, and dense warping.

Conventions shared by all functions here:

* Backward mapping: the output voxel at x is read from the input at the
  inverse-transformed position, so no holes appear.
* Transforms act about the volume's geometric center c = (shape - 1) / 2
  in voxel coordinates; the output grid equals the input grid.
* A positive rotation angle about an axis rotates the next axis toward the
  one after it (x toward y for a z rotation; right-handed).
* Reads outside the grid return the pad constant (0 by default), blended
  in by trilinear weights at the boundary.
* Label maps are only ever resampled with nearest-neighbor and pad label 0.

A displacement field is a plain float array of shape (nx, ny, nz, 3) holding
per-voxel offsets in voxel units: warped(x) = input(x + field(x)).
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.ndimage import map_coordinates

from .volume import LabelMap, Shape3, Volume

DisplacementField = np.ndarray


class InterpMode(Enum):
    TRILINEAR = "trilinear"
    NEAREST = "nearest"


_MODE_ORDER = {InterpMode.TRILINEAR: 1, InterpMode.NEAREST: 0}


def _cos_deg(deg: float) -> float:
    # exact at quadrant angles so axis-aligned rotations are lossless
    r = deg % 360.0
    if r == 0.0:
        return 1.0
    if r in (90.0, 270.0):
        return 0.0
    if r == 180.0:
        return -1.0
    return math.cos(math.radians(deg))


def _sin_deg(deg: float) -> float:
    r = deg % 360.0
    if r in (0.0, 180.0):
        return 0.0
    if r == 90.0:
        return 1.0
    if r == 270.0:
        return -1.0
    return math.sin(math.radians(deg))


@dataclass(frozen=True)
class AffineTransform:
    """3x3 linear map applied about the volume center in voxel coordinates."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (3, 3):
            raise ValueError(f"affine matrix must be 3x3, got {m.shape}")
        if abs(np.linalg.det(m)) <= 1e-9:
            raise ValueError("non-invertible transform")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "AffineTransform":
        return cls(np.eye(3))

    @classmethod
    def rotation_xyz(cls, angles_deg) -> "AffineTransform":
        """Compose elementary rotations in fixed order Rx . Ry . Rz."""
        ax, ay, az = (float(a) for a in angles_deg)
        cx, sx = _cos_deg(ax), _sin_deg(ax)
        cy, sy = _cos_deg(ay), _sin_deg(ay)
        cz, sz = _cos_deg(az), _sin_deg(az)
        rx = np.array([[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]])
        ry = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
        rz = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
        return cls(rx @ ry @ rz)

    @classmethod
    def scaling(cls, factors) -> "AffineTransform":
        return cls(np.diag([float(f) for f in factors]))

    def inverse(self) -> "AffineTransform":
        return AffineTransform(np.linalg.inv(self.matrix))


def _affine_coords(shape: Shape3, matrix: np.ndarray) -> np.ndarray:
    """Sampling positions for output(x) = input(matrix^-1 (x - c) + c)."""
    inv = np.linalg.inv(matrix)
    c = (np.asarray(shape, dtype=np.float64) - 1.0) / 2.0
    grids = np.meshgrid(*[np.arange(n, dtype=np.float64) for n in shape], indexing="ij")
    pts = np.stack([g.reshape(-1) for g in grids])
    coords = inv @ (pts - c[:, None]) + c[:, None]
    return coords.reshape(3, *shape)


def _sample(data: np.ndarray, coords: np.ndarray, mode: InterpMode, pad: float) -> np.ndarray:
    # compute in float64; grid-constant pads with cval beyond the grid
    out = map_coordinates(
        data.astype(np.float64, copy=False),
        coords,
        order=_MODE_ORDER[mode],
        mode="grid-constant",
        cval=float(pad),
    )
    return out


def resample_affine(
    vol: Volume,
    t: AffineTransform,
    mode: InterpMode = InterpMode.TRILINEAR,
    pad_value: float = 0.0,
) -> Volume:
    """Resample a volume through an affine transform about its center."""
    coords = _affine_coords(vol.shape, t.matrix)
    out = _sample(vol.data, coords, mode, pad_value)
    return replace(vol, data=out.astype(np.float32))


def resample_labels_affine(labels: LabelMap, t: AffineTransform) -> LabelMap:
    """Nearest-neighbor affine resampling of a label map, padding label 0."""
    coords = _affine_coords(labels.shape, t.matrix)
    out = _sample(labels.data, coords, InterpMode.NEAREST, 0.0)
    return replace(labels, data=out.astype(np.uint8))


def bspline_upsample(coarse: np.ndarray, target_shape: Shape3) -> DisplacementField:
    """Upsample a coarse control grid of 3-vectors to a dense field.

    Control points are spaced uniformly across the target extent including
    both boundaries (control g sits at g * (n - 1) / (G - 1) along an axis
    with G control points). Each displacement component is interpolated by
    a separable cubic spline through the control values, so constants and
    linear ramps in the control grid are reproduced exactly on the dense
    grid (up to roundoff).
    """
    coarse = np.asarray(coarse, dtype=np.float64)
    if coarse.ndim != 4 or coarse.shape[-1] != 3:
        raise ValueError(f"control grid must be (G, G, G, 3), got {coarse.shape}")
    if any(g < 2 for g in coarse.shape[:3]):
        raise ValueError(f"control grid needs >= 2 points per axis, got {coarse.shape[:3]}")
    if not np.isfinite(coarse).all():
        raise ValueError("non-finite control displacement")
    target_shape = tuple(int(n) for n in target_shape)

    field = coarse
    for axis in range(3):
        n = target_shape[axis]
        g = field.shape[axis]
        ctrl = np.linspace(0.0, n - 1.0, g)
        spline = CubicSpline(ctrl, field, axis=axis, bc_type="natural")
        field = spline(np.arange(n, dtype=np.float64))
    return field


def _warp_coords(shape: Shape3, field: DisplacementField) -> np.ndarray:
    field = np.asarray(field, dtype=np.float64)
    if field.shape != tuple(shape) + (3,):
        raise ValueError(f"field shape {field.shape} does not match volume {tuple(shape)}")
    if not np.isfinite(field).all():
        raise ValueError("non-finite displacement")
    grids = np.meshgrid(*[np.arange(n, dtype=np.float64) for n in shape], indexing="ij")
    return np.stack([g + field[..., a] for a, g in enumerate(grids)])


def warp(
    vol: Volume,
    field: DisplacementField,
    mode: InterpMode = InterpMode.TRILINEAR,
    pad_value: float = 0.0,
) -> Volume:
    """Warp a volume by a dense displacement field: out(x) = in(x + field(x))."""
    coords = _warp_coords(vol.shape, field)
    out = _sample(vol.data, coords, mode, pad_value)
    return replace(vol, data=out.astype(np.float32))


def warp_labels(labels: LabelMap, field: DisplacementField) -> LabelMap:
    """Nearest-neighbor warp of a label map, padding label 0."""
    coords = _warp_coords(labels.shape, field)
    out = _sample(labels.data, coords, InterpMode.NEAREST, 0.0)
    return replace(labels, data=out.astype(np.uint8))
