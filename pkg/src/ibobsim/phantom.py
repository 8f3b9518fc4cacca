"""Crossed-cylinder human phantom, scenario handling and voxelization.

The body is a vertical torso cylinder crossed by a horizontal arm
cylinder, each a muscle core wrapped in a skin shell. The paper-style
transmitter sits on the +x side of the torso at `implant_depth_m` below
the outer skin surface; receiver distances are measured along the +x ray
from the surface point through the transmitter.

All dimensions default to documented assumptions (see README) and are
configurable; none are prescribed by the source material.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .curves import Scenario
from .errors import PlacementError, ResourceError

# Voxel material ids ("muscle" is the configurable interior tissue).
AIR = 0
SKIN = 1
MUSCLE = 2
ELECTRODE_POS = 3
ELECTRODE_NEG = 4
ELECTRODE_SENSE = 5

MATERIAL_NAMES = {
    AIR: "air",
    SKIN: "skin",
    MUSCLE: "muscle",
    ELECTRODE_POS: "electrode+",
    ELECTRODE_NEG: "electrode-",
    ELECTRODE_SENSE: "electrode~",
}

ELECTRODE_IDS = (ELECTRODE_POS, ELECTRODE_NEG, ELECTRODE_SENSE)
SOURCE_ELECTRODE_IDS = (ELECTRODE_POS, ELECTRODE_NEG)

DEFAULT_VOXEL_BUDGET = 2**24

_AXES = {"x": 0, "y": 1, "z": 2}

_RAW_MAGIC = b"IBOBVOX1"
_RAW_HEADER = struct.Struct("<3I4d")  # nx, ny, nz, spacing, origin x/y/z


@dataclass(frozen=True)
class PhantomModel:
    """Crossed-cylinder body geometry and transmitter placement."""

    torso_radius_m: float = 0.15
    torso_length_m: float = 0.6
    torso_axis: str = "z"
    arm_radius_m: float = 0.05
    arm_length_m: float = 0.6
    arm_axis: str = "y"
    arm_offset_m: float = 0.2        # arm axis height along the torso axis
    skin_thickness_m: float = 0.002  # 0 disables the skin shell
    interior_tissue: str = "muscle"
    implant_depth_m: float = 0.03    # Tx depth below the outer skin surface
    air_pocket_radius_m: float = 0.01  # lossless gap around the RF Tx

    def __post_init__(self):
        dims = (
            self.torso_radius_m, self.torso_length_m,
            self.arm_radius_m, self.arm_length_m,
            self.implant_depth_m,
        )
        for v in dims:
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"phantom dimensions must be positive, got {v!r}")
        for v in (self.skin_thickness_m, self.air_pocket_radius_m):
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"thickness/radius must be >= 0, got {v!r}")
        if self.torso_axis not in _AXES or self.arm_axis not in _AXES:
            raise ValueError("axes must be one of 'x', 'y', 'z'")
        if self.torso_axis == self.arm_axis:
            raise ValueError("torso and arm axes must differ")
        if self.skin_thickness_m >= min(self.torso_radius_m, self.arm_radius_m):
            raise ValueError("skin thickness must be smaller than the smallest radius")
        if self.implant_depth_m <= self.skin_thickness_m:
            raise ValueError("implant depth must exceed the skin thickness")
        if self.implant_depth_m >= self.torso_radius_m:
            raise ValueError("implant depth must be smaller than the torso radius")
        if self.air_pocket_radius_m > self.implant_depth_m - self.skin_thickness_m:
            raise ValueError("air pocket must stay below the skin layer")

    def tx_position_m(self) -> tuple[float, float, float]:
        """Transmitter location on the +x ray through the torso."""
        return (self.torso_radius_m - self.implant_depth_m, 0.0, 0.0)

    def surface_x_m(self) -> float:
        """x of the outer skin surface on the receiver ray."""
        return self.torso_radius_m

    def bounding_box_m(self):
        """Axis-aligned bounds of the two cylinders (unpadded)."""
        lo = [0.0, 0.0, 0.0]
        hi = [0.0, 0.0, 0.0]
        for cyl in self._cylinders():
            clo, chi = cyl.bounds()
            for a in range(3):
                lo[a] = min(lo[a], clo[a])
                hi[a] = max(hi[a], chi[a])
        return tuple(lo), tuple(hi)

    def _cylinders(self) -> tuple["_Cylinder", ...]:
        torso = _Cylinder(
            axis=_AXES[self.torso_axis],
            center=(0.0, 0.0, 0.0),
            radius=self.torso_radius_m,
            length=self.torso_length_m,
        )
        arm_center = [0.0, 0.0, 0.0]
        arm_center[_AXES[self.torso_axis]] = self.arm_offset_m
        arm = _Cylinder(
            axis=_AXES[self.arm_axis],
            center=tuple(arm_center),
            radius=self.arm_radius_m,
            length=self.arm_length_m,
        )
        return torso, arm


@dataclass(frozen=True)
class _Cylinder:
    axis: int
    center: tuple[float, float, float]
    radius: float
    length: float

    def bounds(self):
        lo, hi = [], []
        for a in range(3):
            half = self.length / 2.0 if a == self.axis else self.radius
            lo.append(self.center[a] - half)
            hi.append(self.center[a] + half)
        return lo, hi

    def mask(self, axes: list[np.ndarray], shrink: float) -> np.ndarray:
        """Boolean occupancy on the voxel lattice, shrunk radially and axially."""
        r = self.radius - shrink
        half = self.length / 2.0 - shrink
        if r <= 0 or half <= 0:
            return np.zeros(tuple(len(ax) for ax in axes), dtype=bool)
        perp = [a for a in range(3) if a != self.axis]
        d0 = axes[perp[0]] - self.center[perp[0]]
        d1 = axes[perp[1]] - self.center[perp[1]]
        shape0 = [1, 1, 1]
        shape0[perp[0]] = len(d0)
        shape1 = [1, 1, 1]
        shape1[perp[1]] = len(d1)
        radial = (d0.reshape(shape0) ** 2 + d1.reshape(shape1) ** 2) <= r * r
        ax = np.abs(axes[self.axis] - self.center[self.axis]) <= half
        shape_ax = [1, 1, 1]
        shape_ax[self.axis] = len(ax)
        return radial & ax.reshape(shape_ax)


def default_phantom() -> PhantomModel:
    """Documented default: 0.15 m torso, 0.05 m arm, 2 mm skin, 30 mm implant."""
    return PhantomModel()


class CouplerMode(Enum):
    GALVANIC_PAIR = "galvanic"
    CAPACITIVE_SINGLE = "capacitive"


@dataclass(frozen=True)
class CouplerSpec:
    """Electrode geometry for the galvanic Tx pair or the capacitive Rx plate."""

    mode: CouplerMode
    electrode_size_m: float
    position_m: tuple[float, float, float]
    excitation_v: float = 1.0
    separation_m: float = 0.0   # center-to-center spacing of the galvanic pair
    axis: str = "x"             # pair axis; "x" stacks the pair radially

    def __post_init__(self):
        if not (math.isfinite(self.electrode_size_m) and self.electrode_size_m > 0):
            raise ValueError("electrode size must be positive")
        if not (math.isfinite(self.excitation_v) and self.excitation_v > 0):
            raise ValueError("excitation must be positive")
        if self.axis not in _AXES:
            raise ValueError("axis must be one of 'x', 'y', 'z'")
        if self.mode is CouplerMode.GALVANIC_PAIR and self.separation_m <= self.electrode_size_m:
            raise ValueError("galvanic pair separation must exceed the electrode size")


def default_tx_coupler(
    phantom: PhantomModel,
    excitation_v: float = 1.0,
    electrode_size_m: float = 0.004,
    separation_m: float = 0.03,
) -> CouplerSpec:
    """Galvanic pair at the implant point, stacked along the outward ray."""
    return CouplerSpec(
        mode=CouplerMode.GALVANIC_PAIR,
        electrode_size_m=electrode_size_m,
        position_m=phantom.tx_position_m(),
        excitation_v=excitation_v,
        separation_m=separation_m,
        axis="x",
    )


@dataclass(frozen=True, eq=False)
class VoxelGrid:
    """Immutable uniform voxel map with Dirichlet bookkeeping.

    material carries tissue and electrode tags; base_material keeps the
    tissue that sits under each electrode (used for admittances). Voxel
    (i, j, k) is centered at origin_m + (i, j, k) * spacing_m.
    """

    spacing_m: float
    origin_m: tuple[float, float, float]
    material: np.ndarray
    base_material: np.ndarray = None
    dirichlet_mask: np.ndarray = None
    dirichlet_v: np.ndarray = None

    def __post_init__(self):
        if not (math.isfinite(self.spacing_m) and self.spacing_m > 0):
            raise ValueError("spacing must be positive")
        mat = np.ascontiguousarray(self.material, dtype=np.uint8)
        if mat.ndim != 3 or min(mat.shape) < 8:
            raise ValueError(f"grid dims must be 3-D with every side >= 8, got {mat.shape}")
        base = self.base_material
        if base is None:
            base = mat.copy()
            base[np.isin(mat, ELECTRODE_IDS)] = AIR
        base = np.ascontiguousarray(base, dtype=np.uint8)
        mask = self.dirichlet_mask
        mask = np.zeros(mat.shape, dtype=bool) if mask is None else np.ascontiguousarray(mask, dtype=bool)
        vals = self.dirichlet_v
        vals = np.zeros(mat.shape, dtype=np.complex128) if vals is None else np.ascontiguousarray(vals, dtype=np.complex128)
        if base.shape != mat.shape or mask.shape != mat.shape or vals.shape != mat.shape:
            raise ValueError("material, base_material and dirichlet arrays must share a shape")
        for arr in (mat, base, mask, vals):
            arr.flags.writeable = False
        object.__setattr__(self, "material", mat)
        object.__setattr__(self, "base_material", base)
        object.__setattr__(self, "dirichlet_mask", mask)
        object.__setattr__(self, "dirichlet_v", vals)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.material.shape

    @property
    def voxel_count(self) -> int:
        return int(self.material.size)

    def axis_centers_m(self, axis: int) -> np.ndarray:
        return self.origin_m[axis] + self.spacing_m * np.arange(self.dims[axis])

    def nearest_index(self, position_m) -> tuple[int, int, int]:
        """Index of the voxel whose center is closest (ties round half up)."""
        idx = []
        for a in range(3):
            q = (position_m[a] - self.origin_m[a]) / self.spacing_m
            idx.append(int(math.floor(q + 0.5)))
        return tuple(idx)

    def contains_index(self, idx) -> bool:
        return all(0 <= idx[a] < self.dims[a] for a in range(3))

    def center_of(self, idx) -> tuple[float, float, float]:
        return tuple(self.origin_m[a] + self.spacing_m * idx[a] for a in range(3))

    def cube_indices(self, center_m, size_m) -> list[tuple[int, int, int]]:
        """Voxels whose centers fall strictly inside the cube; never empty.

        A cube smaller than one voxel snaps to the nearest voxel center.
        Raises PlacementError when the cube lies outside the grid.
        """
        half = size_m / 2.0 * (1.0 - 1e-9)
        ranges = []
        for a in range(3):
            lo = int(math.ceil((center_m[a] - half - self.origin_m[a]) / self.spacing_m - 1e-12))
            hi = int(math.floor((center_m[a] + half - self.origin_m[a]) / self.spacing_m + 1e-12))
            ranges.append((lo, hi))
        if any(lo > hi for lo, hi in ranges):
            idx = self.nearest_index(center_m)
            if not self.contains_index(idx):
                raise PlacementError(
                    f"coupler at {tuple(center_m)} m is beyond grid bounds (voxel {idx})"
                )
            return [idx]
        out = []
        for i in range(ranges[0][0], ranges[0][1] + 1):
            for j in range(ranges[1][0], ranges[1][1] + 1):
                for k in range(ranges[2][0], ranges[2][1] + 1):
                    if not self.contains_index((i, j, k)):
                        raise PlacementError(
                            f"coupler at {tuple(center_m)} m extends beyond grid bounds "
                            f"(voxel ({i}, {j}, {k}))"
                        )
                    out.append((i, j, k))
        return out

    def has_tissue(self) -> bool:
        return bool(np.isin(self.base_material, (SKIN, MUSCLE)).any())

    def to_bytes(self) -> bytes:
        """Flat binary export: magic, dims, spacing, origin, one id byte per voxel."""
        nx, ny, nz = self.dims
        header = _RAW_MAGIC + _RAW_HEADER.pack(nx, ny, nz, self.spacing_m, *self.origin_m)
        return header + self.material.tobytes(order="C")

    def save_raw(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())


def read_raw_grid(data: bytes):
    """Inverse of VoxelGrid.to_bytes; returns (dims, spacing, origin, material)."""
    if data[: len(_RAW_MAGIC)] != _RAW_MAGIC:
        raise ValueError("not an ibobsim voxel export")
    off = len(_RAW_MAGIC)
    nx, ny, nz, spacing, ox, oy, oz = _RAW_HEADER.unpack_from(data, off)
    body = np.frombuffer(data, dtype=np.uint8, offset=off + _RAW_HEADER.size)
    if body.size != nx * ny * nz:
        raise ValueError("voxel payload size does not match header dims")
    return (nx, ny, nz), spacing, (ox, oy, oz), body.reshape((nx, ny, nz))


def voxelize(
    phantom: PhantomModel,
    spacing_m: float,
    padding_m: float,
    scenario: Scenario = Scenario.IN_BODY,
    *,
    bounds_m=None,
    voxel_budget: int = DEFAULT_VOXEL_BUDGET,
) -> VoxelGrid:
    """Discretize the phantom on a uniform lattice.

    Voxel centers sit at (k + 1/2) * spacing on a world-fixed lattice, so
    centers never coincide with the round-valued phantom surfaces and the
    same world position classifies identically in grids of any extent.
    Voxels take the innermost region containing their center (muscle core
    over skin shell over air); the skin shell is widened to one voxel
    spacing when the grid is too coarse to resolve it, so the body always
    keeps a closed skin before air. The outer voxel shell is grounded
    (Dirichlet 0 V). FREE_SPACE scenarios keep the identical lattice with
    every voxel set to air.
    """
    if not (math.isfinite(spacing_m) and spacing_m > 0):
        raise ValueError("spacing must be positive")
    if padding_m < 5 * spacing_m:
        raise ValueError(f"padding {padding_m!r} must be at least 5 voxels ({5 * spacing_m!r} m)")

    if bounds_m is None:
        lo, hi = phantom.bounding_box_m()
        bounds_m = tuple((lo[a] - padding_m, hi[a] + padding_m) for a in range(3))

    k_lo = [int(math.floor(bounds_m[a][0] / spacing_m - 0.5)) for a in range(3)]
    k_hi = [int(math.ceil(bounds_m[a][1] / spacing_m - 0.5)) for a in range(3)]
    dims = tuple(k_hi[a] - k_lo[a] + 1 for a in range(3))
    if min(dims) < 8:
        raise ValueError(f"grid dims {dims} too small; enlarge bounds or refine spacing")
    count = dims[0] * dims[1] * dims[2]
    if count > voxel_budget:
        raise ResourceError(f"grid of {count} voxels exceeds the budget of {voxel_budget}")
    origin = tuple((k_lo[a] + 0.5) * spacing_m for a in range(3))
    # integer-first center coordinates: identical floats for identical
    # world positions independent of the grid extent
    axes = [(np.arange(k_lo[a], k_hi[a] + 1) + 0.5) * spacing_m for a in range(3)]

    material = np.full(dims, AIR, dtype=np.uint8)
    if scenario is Scenario.IN_BODY:
        t_skin = phantom.skin_thickness_m
        t_eff = max(t_skin, spacing_m) if t_skin > 0 else 0.0
        for cyl in phantom._cylinders():
            material[cyl.mask(axes, 0.0)] = SKIN
        for cyl in phantom._cylinders():
            material[cyl.mask(axes, t_eff)] = MUSCLE

    mask = np.zeros(dims, dtype=bool)
    for a in range(3):
        sl = [slice(None)] * 3
        sl[a] = 0
        mask[tuple(sl)] = True
        sl[a] = dims[a] - 1
        mask[tuple(sl)] = True
    values = np.zeros(dims, dtype=np.complex128)

    return VoxelGrid(
        spacing_m=spacing_m,
        origin_m=origin,
        material=material,
        base_material=material.copy(),
        dirichlet_mask=mask,
        dirichlet_v=values,
    )


def _check_interior(grid: VoxelGrid, voxels, what: str) -> None:
    for idx in voxels:
        if any(idx[a] in (0, grid.dims[a] - 1) for a in range(3)):
            raise PlacementError(f"{what} voxel {idx} touches the grounded grid boundary")


def _check_material(grid: VoxelGrid, voxels, allowed, what: str) -> None:
    for idx in voxels:
        m = int(grid.material[idx])
        if m not in allowed:
            names = "/".join(MATERIAL_NAMES[a] for a in allowed)
            raise PlacementError(
                f"{what} voxel {idx} is {MATERIAL_NAMES.get(m, m)}, expected {names}"
            )


def place_coupler(grid: VoxelGrid, spec: CouplerSpec) -> VoxelGrid:
    """Return a new grid with the coupler's electrode voxels marked.

    Galvanic pairs become Dirichlet sources at +excitation_v (electrode on
    the + side of the pair axis) and -excitation_v. Capacitive plates are
    tagged for sensing only and do not constrain the solve (high-impedance
    probe semantics).
    """
    material = np.array(grid.material)
    base = np.array(grid.base_material)
    mask = np.array(grid.dirichlet_mask)
    values = np.array(grid.dirichlet_v)

    if spec.mode is CouplerMode.GALVANIC_PAIR:
        unit = [0.0, 0.0, 0.0]
        unit[_AXES[spec.axis]] = 1.0
        halfsep = spec.separation_m / 2.0
        pos_center = tuple(spec.position_m[a] + halfsep * unit[a] for a in range(3))
        neg_center = tuple(spec.position_m[a] - halfsep * unit[a] for a in range(3))
        pos_voxels = grid.cube_indices(pos_center, spec.electrode_size_m)
        neg_voxels = grid.cube_indices(neg_center, spec.electrode_size_m)
        if set(pos_voxels) & set(neg_voxels):
            raise PlacementError("galvanic electrodes overlap; increase separation or refine the grid")
        _check_interior(grid, pos_voxels + neg_voxels, "galvanic electrode")
        allowed = (SKIN, MUSCLE) if grid.has_tissue() else (AIR,)
        _check_material(grid, pos_voxels + neg_voxels, allowed, "galvanic electrode")
        for idx in pos_voxels:
            material[idx] = ELECTRODE_POS
            mask[idx] = True
            values[idx] = complex(spec.excitation_v, 0.0)
        for idx in neg_voxels:
            material[idx] = ELECTRODE_NEG
            mask[idx] = True
            values[idx] = complex(-spec.excitation_v, 0.0)
        marked = pos_voxels + neg_voxels
    else:
        voxels = grid.cube_indices(spec.position_m, spec.electrode_size_m)
        _check_interior(grid, voxels, "capacitive electrode")
        _check_material(grid, voxels, (AIR,), "capacitive electrode")
        for idx in voxels:
            material[idx] = ELECTRODE_SENSE
        marked = voxels

    new = VoxelGrid(
        spacing_m=grid.spacing_m,
        origin_m=grid.origin_m,
        material=material,
        base_material=base,
        dirichlet_mask=mask,
        dirichlet_v=values,
    )
    _check_adjacency(new, marked)
    return new


def _check_adjacency(grid: VoxelGrid, voxels) -> None:
    """Every electrode voxel must face at least one non-electrode voxel."""
    offsets = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
    for idx in voxels:
        ok = False
        for off in offsets:
            nb = (idx[0] + off[0], idx[1] + off[1], idx[2] + off[2])
            if grid.contains_index(nb) and int(grid.material[nb]) not in ELECTRODE_IDS:
                ok = True
                break
        if not ok:
            raise PlacementError(f"electrode voxel {idx} is fully surrounded by electrodes")
