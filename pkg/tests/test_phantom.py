import math

import numpy as np
import pytest

from ibobsim.curves import Scenario
from ibobsim.errors import PlacementError, ResourceError
from ibobsim.phantom import (
    AIR,
    ELECTRODE_NEG,
    ELECTRODE_POS,
    ELECTRODE_SENSE,
    MUSCLE,
    SKIN,
    CouplerMode,
    CouplerSpec,
    PhantomModel,
    default_phantom,
    default_tx_coupler,
    place_coupler,
    read_raw_grid,
    voxelize,
)


def small_phantom() -> PhantomModel:
    return PhantomModel(
        torso_radius_m=0.06,
        torso_length_m=0.2,
        arm_radius_m=0.02,
        arm_length_m=0.18,
        arm_offset_m=0.06,
        skin_thickness_m=0.004,
        implant_depth_m=0.02,
        air_pocket_radius_m=0.008,
    )


def degenerate_phantom() -> PhantomModel:
    # radii collapsed to epsilon: voxelizes to pure air
    return PhantomModel(
        torso_radius_m=1e-6,
        torso_length_m=1e-6,
        arm_radius_m=1e-6,
        arm_length_m=1e-6,
        arm_offset_m=0.0,
        skin_thickness_m=1e-7,
        implant_depth_m=5e-7,
        air_pocket_radius_m=0.0,
    )


class TestPhantomModel:
    def test_default_passes_invariants(self):
        p = default_phantom()
        assert p.torso_radius_m == 0.15
        assert p.skin_thickness_m < min(p.torso_radius_m, p.arm_radius_m)
        assert p.implant_depth_m > p.skin_thickness_m

    def test_tx_position_on_outward_ray(self):
        p = default_phantom()
        assert p.tx_position_m() == (0.12, 0.0, 0.0)
        assert p.surface_x_m() == 0.15

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(skin_thickness_m=0.06),            # thicker than arm radius
            dict(implant_depth_m=0.001),            # shallower than skin
            dict(implant_depth_m=0.2),              # deeper than torso radius
            dict(air_pocket_radius_m=0.029),        # pocket pokes through skin
            dict(torso_axis="y"),                   # same as arm axis
            dict(torso_radius_m=-0.1),
        ],
    )
    def test_invalid_dimensions_rejected(self, kwargs):
        with pytest.raises(ValueError):
            PhantomModel(**kwargs)


class TestVoxelize:
    def test_default_contains_skin_and_muscle(self):
        grid = voxelize(default_phantom(), 0.005, 0.025)
        mats = set(np.unique(grid.material))
        assert SKIN in mats and MUSCLE in mats and AIR in mats

    def test_degenerate_phantom_all_air(self):
        grid = voxelize(degenerate_phantom(), 0.01, 0.05)
        assert set(np.unique(grid.material)) == {AIR}

    def test_freespace_scenario_has_no_tissue(self):
        grid = voxelize(small_phantom(), 0.01, 0.05, Scenario.FREE_SPACE)
        assert set(np.unique(grid.material)) == {AIR}
        assert not grid.has_tissue()

    def test_idempotent(self):
        a = voxelize(small_phantom(), 0.01, 0.05)
        b = voxelize(small_phantom(), 0.01, 0.05)
        assert a.dims == b.dims
        assert np.array_equal(a.material, b.material)

    def test_skin_shell_closed_at_coarse_spacing(self):
        # 5 mm spacing > 2 mm skin: the snap rule must still give a closed
        # one-voxel shell; entering the body along any grid ray hits skin
        # before muscle.
        grid = voxelize(default_phantom(), 0.005, 0.025)
        mat = grid.material
        for axis in range(3):
            moved = np.moveaxis(mat, axis, 0)
            n = moved.shape[0]
            flat = moved.reshape(n, -1)
            for col in range(flat.shape[1]):
                line = flat[:, col]
                body = np.nonzero(line != AIR)[0]
                if body.size == 0:
                    continue
                assert line[body[0]] == SKIN, f"axis {axis} col {col} enters at muscle"
                assert line[body[-1]] == SKIN, f"axis {axis} col {col} exits at muscle"

    def test_tissue_volume_converges_to_cylinder(self):
        # arm fully inside the torso core, so the analytic union volume is
        # just the torso cylinder; halving the spacing tightens the census.
        p = PhantomModel(
            torso_radius_m=0.1,
            torso_length_m=0.2,
            arm_radius_m=0.03,
            arm_length_m=0.08,
            arm_offset_m=0.0,
            skin_thickness_m=0.002,
            implant_depth_m=0.02,
            air_pocket_radius_m=0.0,
        )
        analytic = math.pi * p.torso_radius_m**2 * p.torso_length_m
        errors = []
        for spacing in (0.01, 0.005):
            grid = voxelize(p, spacing, 5 * spacing)
            tissue = int(np.isin(grid.material, (SKIN, MUSCLE)).sum())
            errors.append(abs(tissue * spacing**3 - analytic) / analytic)
        assert errors[1] <= 0.05
        assert errors[1] <= errors[0] + 0.01

    def test_doubling_padding_only_adds_air(self):
        a = voxelize(small_phantom(), 0.01, 0.05)
        b = voxelize(small_phantom(), 0.01, 0.10)
        for mid in (SKIN, MUSCLE):
            assert (a.material == mid).sum() == (b.material == mid).sum()
        assert (b.material == AIR).sum() > (a.material == AIR).sum()

    def test_voxel_budget_enforced(self):
        with pytest.raises(ResourceError):
            voxelize(default_phantom(), 0.002, 0.01, voxel_budget=10_000)

    def test_padding_must_cover_five_voxels(self):
        with pytest.raises(ValueError):
            voxelize(small_phantom(), 0.01, 0.03)

    def test_boundary_shell_grounded(self):
        grid = voxelize(small_phantom(), 0.01, 0.05)
        assert grid.dirichlet_mask[0, :, :].all()
        assert grid.dirichlet_mask[-1, :, :].all()
        assert grid.dirichlet_mask[:, 0, :].all()
        assert grid.dirichlet_mask[:, :, -1].all()
        assert not grid.dirichlet_mask[1:-1, 1:-1, 1:-1].any()
        assert np.all(grid.dirichlet_v == 0)

    def test_grid_arrays_immutable(self):
        grid = voxelize(small_phantom(), 0.01, 0.05)
        with pytest.raises(ValueError):
            grid.material[0, 0, 0] = SKIN


class TestPlaceCoupler:
    def test_galvanic_pair_marks_two_disjoint_clusters(self):
        p = small_phantom()
        grid = voxelize(p, 0.01, 0.05)
        placed = place_coupler(grid, default_tx_coupler(p, separation_m=0.02))
        n_pos = int((placed.material == ELECTRODE_POS).sum())
        n_neg = int((placed.material == ELECTRODE_NEG).sum())
        assert n_pos >= 1 and n_neg >= 1
        assert placed.dirichlet_mask[placed.material == ELECTRODE_POS].all()
        assert np.all(placed.dirichlet_v[placed.material == ELECTRODE_POS] == 1.0)
        assert np.all(placed.dirichlet_v[placed.material == ELECTRODE_NEG] == -1.0)
        # original untouched
        assert not np.isin(grid.material, (ELECTRODE_POS, ELECTRODE_NEG)).any()

    def test_base_material_remembers_tissue(self):
        p = small_phantom()
        placed = place_coupler(voxelize(p, 0.01, 0.05), default_tx_coupler(p))
        under = placed.base_material[np.isin(placed.material, (ELECTRODE_POS, ELECTRODE_NEG))]
        assert set(np.unique(under)) <= {SKIN, MUSCLE}

    def test_capacitive_rx_at_zero_distance_touches_skin(self):
        p = small_phantom()
        grid = voxelize(p, 0.01, 0.05)
        rx = CouplerSpec(
            mode=CouplerMode.CAPACITIVE_SINGLE,
            electrode_size_m=0.02,
            position_m=(p.surface_x_m() + 0.01, 0.0, 0.0),
        )
        placed = place_coupler(grid, rx)
        sense = np.argwhere(placed.material == ELECTRODE_SENSE)
        assert len(sense) >= 1
        adjacent_skin = False
        for idx in sense:
            i, j, k = idx
            for di, dj, dk in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)):
                nb = (i + di, j + dj, k + dk)
                if placed.contains_index(nb) and placed.material[nb] == SKIN:
                    adjacent_skin = True
        assert adjacent_skin

    def test_capacitive_rx_must_sit_in_air(self):
        p = small_phantom()
        grid = voxelize(p, 0.01, 0.05)
        rx = CouplerSpec(
            mode=CouplerMode.CAPACITIVE_SINGLE,
            electrode_size_m=0.02,
            position_m=(0.0, 0.0, 0.0),
        )
        with pytest.raises(PlacementError) as err:
            place_coupler(grid, rx)
        assert "voxel" in str(err.value)

    def test_rx_beyond_grid_bounds(self):
        p = small_phantom()
        grid = voxelize(p, 0.01, 0.05)
        rx = CouplerSpec(
            mode=CouplerMode.CAPACITIVE_SINGLE,
            electrode_size_m=0.02,
            position_m=(5.0, 0.0, 0.0),
        )
        with pytest.raises(PlacementError):
            place_coupler(grid, rx)

    def test_galvanic_in_free_space_grid_allowed(self):
        p = small_phantom()
        grid = voxelize(p, 0.01, 0.05, Scenario.FREE_SPACE)
        placed = place_coupler(grid, default_tx_coupler(p))
        assert (placed.material == ELECTRODE_POS).any()

    def test_galvanic_must_sit_in_tissue_when_body_present(self):
        p = small_phantom()
        grid = voxelize(p, 0.01, 0.05)
        tx = CouplerSpec(
            mode=CouplerMode.GALVANIC_PAIR,
            electrode_size_m=0.004,
            separation_m=0.02,
            position_m=(p.surface_x_m() + 0.03, 0.0, 0.0),  # in air
        )
        with pytest.raises(PlacementError) as err:
            place_coupler(grid, tx)
        assert "air" in str(err.value)

    def test_separation_must_exceed_size(self):
        with pytest.raises(ValueError):
            CouplerSpec(
                mode=CouplerMode.GALVANIC_PAIR,
                electrode_size_m=0.02,
                separation_m=0.01,
                position_m=(0, 0, 0),
            )


class TestRawExport:
    def test_round_trip(self):
        grid = voxelize(small_phantom(), 0.01, 0.05)
        dims, spacing, origin, material = read_raw_grid(grid.to_bytes())
        assert dims == grid.dims
        assert spacing == grid.spacing_m
        assert origin == pytest.approx(grid.origin_m)
        assert np.array_equal(material, grid.material)

    def test_save_raw(self, tmp_path):
        grid = voxelize(small_phantom(), 0.01, 0.05)
        path = tmp_path / "grid.vox"
        grid.save_raw(path)
        dims, _, _, material = read_raw_grid(path.read_bytes())
        assert dims == grid.dims
        assert np.array_equal(material, grid.material)
