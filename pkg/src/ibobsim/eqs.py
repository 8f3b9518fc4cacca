"""Electro-quasistatic finite-difference solver for the HBC channel.

At 21 MHz the body is electrically small, so the potential obeys a
complex-conductivity Laplace equation  div((sigma + j*w*EPS0*eps') grad
phi) = 0  with Dirichlet electrodes and a grounded outer boundary. The
discretization conserves flux: face admittances are harmonic means of the
voxel admittances on either side.

The capacitive receiver is an ideal high-impedance probe, so a single
solve serves every receiver distance of a sweep. Reciprocity is not
guaranteed by this probe model (voltage-driven source, zero-current
probe) and is deliberately not asserted anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .constants import EPS0
from .curves import CurveSource, PathLossCurve, Scenario
from .errors import ConvergenceError, PlacementError, ProbeError, SetupError
from .phantom import (
    AIR,
    DEFAULT_VOXEL_BUDGET,
    MUSCLE,
    SKIN,
    SOURCE_ELECTRODE_IDS,
    CouplerMode,
    CouplerSpec,
    PhantomModel,
    VoxelGrid,
    place_coupler,
    voxelize,
)
from .tissues import ComplexPermittivity, Frequency, complex_permittivity, default_tissue_library

SCHEME_JACOBI = "jacobi"
SCHEME_SOR = "sor"


@dataclass(frozen=True)
class SolverSettings:
    """Iteration controls. SOR with omega=1.8 is the default; Jacobi is the
    slower, embarrassingly parallel fallback. Both are deterministic here."""

    tol: float = 1e-6
    max_iter: int = 50_000
    scheme: str = SCHEME_SOR
    omega: float = 1.8

    def __post_init__(self):
        if not (0.0 < self.tol < 1.0):
            raise ValueError(f"tol must be in (0, 1), got {self.tol!r}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.scheme not in (SCHEME_JACOBI, SCHEME_SOR):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not (0.0 < self.omega < 2.0):
            raise ValueError(f"omega must be in (0, 2), got {self.omega!r}")


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Solved complex potential on a voxel grid."""

    grid: VoxelGrid
    phi: np.ndarray
    iterations: int
    final_residual: float
    residual_history: tuple[float, ...]


def _admittances(grid: VoxelGrid, materials: Mapping[int, ComplexPermittivity], f: Frequency):
    lut = np.zeros(256, dtype=np.complex128)
    present = np.unique(grid.base_material)
    w = f.omega
    for mid in present:
        if int(mid) not in materials:
            raise SetupError(f"no permittivity given for material id {int(mid)}")
        eps = materials[int(mid)]
        lut[mid] = complex(eps.sigma_eff, w * EPS0 * eps.eps_r_real)
    return lut[grid.base_material]


def solve_potential(
    grid: VoxelGrid,
    materials: Mapping[int, ComplexPermittivity],
    f: Frequency,
    settings: SolverSettings = SolverSettings(),
) -> ComplexField:
    """Iterate to the discrete-conservation residual target.

    The residual is max |sum_f y_f (phi_nb - phi_v)| / (|sum_f y_f| * Vref)
    over free voxels, with Vref the largest Dirichlet magnitude. Raises
    ConvergenceError (carrying the final residual) when max_iter runs out.
    """
    fixed = grid.dirichlet_mask
    if not fixed.any():
        raise SetupError("grid has no Dirichlet voxels; place electrodes first")
    vref = float(np.abs(grid.dirichlet_v[fixed]).max())
    if vref == 0.0:
        raise SetupError("all Dirichlet values are 0 V; no driven electrode present")

    yv = _admittances(grid, materials, f)
    yx, yy, yz = _kernels.face_admittances(yv)
    den = _kernels.admittance_sum(yx, yy, yz, grid.dims)

    phi = np.zeros(grid.dims, dtype=np.complex128)
    phi[fixed] = grid.dirichlet_v[fixed]

    history: list[float] = []
    if settings.scheme == SCHEME_JACOBI:
        phi_new = phi.copy()
        for it in range(1, settings.max_iter + 1):
            res = _kernels.jacobi_sweep(phi, phi_new, yx, yy, yz, den, fixed, vref)
            phi, phi_new = phi_new, phi
            history.append(res)
            if res <= settings.tol:
                return ComplexField(grid, phi, it, res, tuple(history))
    else:
        for it in range(1, settings.max_iter + 1):
            _kernels.sor_color_sweep(phi, yx, yy, yz, den, fixed, settings.omega, 0)
            _kernels.sor_color_sweep(phi, yx, yy, yz, den, fixed, settings.omega, 1)
            res = _kernels.residual_inf(phi, yx, yy, yz, den, fixed, vref)
            history.append(res)
            if res <= settings.tol:
                return ComplexField(grid, phi, it, res, tuple(history))

    raise ConvergenceError(
        f"no convergence to {settings.tol} after {settings.max_iter} iterations "
        f"(residual {history[-1]:.3e})",
        residual=history[-1],
        iterations=settings.max_iter,
    )


def probe_voltage(field: ComplexField, rx: CouplerSpec) -> complex:
    """Average potential over the probe plate, relative to solver ground.

    Zero-current probe: the plate does not load the field. Probing a region
    fully inside one source electrode returns its drive voltage exactly;
    a region that only partially overlaps a source electrode is rejected.
    """
    grid = field.grid
    try:
        voxels = grid.cube_indices(rx.position_m, rx.electrode_size_m)
    except PlacementError as exc:
        raise ProbeError(str(exc)) from None
    n_src = sum(1 for idx in voxels if int(grid.material[idx]) in SOURCE_ELECTRODE_IDS)
    if 0 < n_src < len(voxels):
        raise ProbeError(
            f"probe at {tuple(rx.position_m)} m partially overlaps a source electrode"
        )
    acc = 0.0 + 0.0j
    for idx in voxels:
        acc += field.phi[idx]
    return acc / len(voxels)


@dataclass(frozen=True)
class HbcSweepResult:
    curve: PathLossCurve
    iterations: int
    final_residual: float


def _scenario_materials(phantom: PhantomModel, f: Frequency, tissues) -> dict:
    lib = default_tissue_library() if tissues is None else tissues
    from .tissues import FREE_SPACE

    materials = {AIR: FREE_SPACE}
    for mid, name in ((SKIN, "skin"), (MUSCLE, phantom.interior_tissue)):
        if name not in lib:
            raise SetupError(f"tissue {name!r} missing from the tissue library")
        materials[mid] = complex_permittivity(lib[name], f)
    return materials


def hbc_sweep(
    phantom: PhantomModel,
    tx: CouplerSpec,
    rx_distances_m,
    f: Frequency,
    scenario: Scenario,
    settings: SolverSettings = SolverSettings(),
    *,
    spacing_m: float = 0.01,
    padding_m: float | None = None,
    rx_electrode_size_m: float = 0.02,
    tissues=None,
    voxel_budget: int = DEFAULT_VOXEL_BUDGET,
) -> HbcSweepResult:
    """Solve one scenario and probe the receiver positions.

    Case FREE_SPACE keeps the identical lattice and coupler but removes all
    tissue, matching the equal-geometry comparison scenario. Distance d is
    measured from the outer skin surface to the inner face of the receiver
    plate along +x.
    """
    distances = [float(d) for d in rx_distances_m]
    if not distances or distances[0] != 0.0:
        raise ValueError("rx distances must start at 0")
    if any(b <= a for a, b in zip(distances, distances[1:])):
        raise ValueError("rx distances must be strictly increasing")
    if tx.mode is not CouplerMode.GALVANIC_PAIR:
        raise SetupError("HBC transmitter must be a galvanic pair")

    if padding_m is None:
        padding_m = 10.0 * spacing_m
    lo, hi = phantom.bounding_box_m()
    surface_x = phantom.surface_x_m()
    xmax = surface_x + distances[-1] + rx_electrode_size_m + padding_m
    bounds = (
        (lo[0] - padding_m, max(hi[0] + padding_m, xmax)),
        (lo[1] - padding_m, hi[1] + padding_m),
        (lo[2] - padding_m, hi[2] + padding_m),
    )
    grid = voxelize(
        phantom, spacing_m, padding_m, scenario, bounds_m=bounds, voxel_budget=voxel_budget
    )
    grid = place_coupler(grid, tx)
    materials = _scenario_materials(phantom, f, tissues)
    field = solve_potential(grid, materials, f, settings)

    samples = []
    v_tx = abs(tx.excitation_v)
    for d in distances:
        rx = CouplerSpec(
            mode=CouplerMode.CAPACITIVE_SINGLE,
            electrode_size_m=rx_electrode_size_m,
            position_m=(surface_x + d + rx_electrode_size_m / 2.0, 0.0, 0.0),
            excitation_v=tx.excitation_v,
        )
        try:
            v_rx = abs(probe_voltage(field, rx))
        except ProbeError as exc:
            raise ProbeError(f"at rx distance {d} m: {exc}") from None
        if v_rx == 0.0:
            raise ConvergenceError(
                f"probe voltage underflowed to 0 at rx distance {d} m; refine the grid"
            )
        samples.append((d, 20.0 * math.log10(v_tx / v_rx)))

    curve = PathLossCurve(
        band=f, scenario=scenario, samples=tuple(samples), source=CurveSource.SIMULATED
    )
    return HbcSweepResult(curve, field.iterations, field.final_residual)


def hbc_path_loss_sweep(
    phantom: PhantomModel,
    tx: CouplerSpec,
    rx_distances_m,
    f: Frequency,
    scenario: Scenario,
    settings: SolverSettings = SolverSettings(),
    **kwargs,
) -> PathLossCurve:
    """Path-loss curve 20*log10(|V_tx| / |V_rx(d)|) for one scenario."""
    return hbc_sweep(phantom, tx, rx_distances_m, f, scenario, settings, **kwargs).curve
