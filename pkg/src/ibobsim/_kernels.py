"""Numba kernels for the complex-admittance Laplace solver.

The grid is uniform, so the voxel spacing cancels out of the face
conductances and every kernel works directly with face admittances
(yx[i,j,k] couples voxel (i,j,k) to (i+1,j,k), and so on). Only interior
voxels are updated; the outer shell and Dirichlet voxels stay fixed.

Parallelism is over voxels of one checkerboard color (SOR) or over the
whole previous iterate (Jacobi), so every cell's update reads values no
other thread writes; together with the exact max-reductions this keeps
results bit-identical regardless of thread count or scheduling.
"""

import numba
import numpy as np


@numba.njit(cache=True, parallel=True)
def jacobi_sweep(phi, phi_new, yx, yy, yz, den, fixed, vref):
    """One Jacobi iteration; returns the normalized residual of `phi`.

    For Jacobi the residual |sum_f y_f (phi_nb - phi_v)| equals
    |den|*|phi_new - phi|, so the residual of the incoming iterate comes
    for free as max |phi_new - phi| / vref.
    """
    nx, ny, nz = phi.shape
    res = 0.0
    for i in numba.prange(1, nx - 1):
        local = 0.0
        for j in range(1, ny - 1):
            for k in range(1, nz - 1):
                if fixed[i, j, k]:
                    continue
                num = (
                    yx[i - 1, j, k] * phi[i - 1, j, k]
                    + yx[i, j, k] * phi[i + 1, j, k]
                    + yy[i, j - 1, k] * phi[i, j - 1, k]
                    + yy[i, j, k] * phi[i, j + 1, k]
                    + yz[i, j, k - 1] * phi[i, j, k - 1]
                    + yz[i, j, k] * phi[i, j, k + 1]
                )
                v = num / den[i, j, k]
                phi_new[i, j, k] = v
                r = abs(v - phi[i, j, k])
                if r > local:
                    local = r
        res = max(res, local)
    return res / vref


@numba.njit(cache=True, parallel=True)
def sor_color_sweep(phi, yx, yy, yz, den, fixed, omega, parity):
    """In-place SOR update of one checkerboard color ((i+j+k) % 2 == parity).

    Cells of one color only read the other color, so the parallel update
    is race-free and order-independent.
    """
    nx, ny, nz = phi.shape
    for i in numba.prange(1, nx - 1):
        for j in range(1, ny - 1):
            k0 = 1 + ((i + j + 1 + parity) & 1)
            for k in range(k0, nz - 1, 2):
                if fixed[i, j, k]:
                    continue
                num = (
                    yx[i - 1, j, k] * phi[i - 1, j, k]
                    + yx[i, j, k] * phi[i + 1, j, k]
                    + yy[i, j - 1, k] * phi[i, j - 1, k]
                    + yy[i, j, k] * phi[i, j + 1, k]
                    + yz[i, j, k - 1] * phi[i, j, k - 1]
                    + yz[i, j, k] * phi[i, j, k + 1]
                )
                phi[i, j, k] += omega * (num / den[i, j, k] - phi[i, j, k])


@numba.njit(cache=True, parallel=True)
def residual_inf(phi, yx, yy, yz, den, fixed, vref):
    """max |sum_f y_f (phi_nb - phi_v)| / (|den_v| * vref) over free voxels."""
    nx, ny, nz = phi.shape
    res = 0.0
    for i in numba.prange(1, nx - 1):
        local = 0.0
        for j in range(1, ny - 1):
            for k in range(1, nz - 1):
                if fixed[i, j, k]:
                    continue
                num = (
                    yx[i - 1, j, k] * phi[i - 1, j, k]
                    + yx[i, j, k] * phi[i + 1, j, k]
                    + yy[i, j - 1, k] * phi[i, j - 1, k]
                    + yy[i, j, k] * phi[i, j + 1, k]
                    + yz[i, j, k - 1] * phi[i, j, k - 1]
                    + yz[i, j, k] * phi[i, j, k + 1]
                )
                r = abs(num - den[i, j, k] * phi[i, j, k]) / abs(den[i, j, k])
                if r > local:
                    local = r
        res = max(res, local)
    return res / vref


def face_admittances(yv: np.ndarray):
    """Harmonic-mean face admittances from per-voxel admittances."""
    yx = 2.0 * yv[:-1, :, :] * yv[1:, :, :] / (yv[:-1, :, :] + yv[1:, :, :])
    yy = 2.0 * yv[:, :-1, :] * yv[:, 1:, :] / (yv[:, :-1, :] + yv[:, 1:, :])
    yz = 2.0 * yv[:, :, :-1] * yv[:, :, 1:] / (yv[:, :, :-1] + yv[:, :, 1:])
    return yx, yy, yz


def admittance_sum(yx, yy, yz, shape):
    den = np.zeros(shape, dtype=np.complex128)
    den[:-1, :, :] += yx
    den[1:, :, :] += yx
    den[:, :-1, :] += yy
    den[:, 1:, :] += yy
    den[:, :, :-1] += yz
    den[:, :, 1:] += yz
    return den
