import cmath
import math

import numpy as np
import pytest

from ibobsim.constants import C0, EPS0, MU0, NP_TO_DB
from ibobsim.errors import TissueFileError
from ibobsim.tissues import (
    ColeColeParams,
    ColeColePole,
    ComplexPermittivity,
    Frequency,
    complex_permittivity,
    complex_relative_permittivity,
    default_tissue_library,
    intrinsic_impedance,
    parse_tissue_records,
    propagation_constants,
    tissue_loss_db,
)

FREQ_GRID = np.logspace(6, 10, 40)  # 1 MHz .. 10 GHz


def gamma_oracle(eps: ComplexPermittivity, f: Frequency):
    """Independent formulation: gamma = j*w*sqrt(MU0*EPS0*eps_hat)."""
    w = f.omega
    eps_hat = complex(eps.eps_r_real, -eps.sigma_eff / (w * EPS0))
    gamma = 1j * w * cmath.sqrt(MU0 * EPS0 * eps_hat)
    return gamma.real, gamma.imag


class TestFrequency:
    def test_basics(self):
        f = Frequency(21e6)
        assert f.omega == pytest.approx(2 * math.pi * 21e6)
        assert f.wavelength_m == pytest.approx(C0 / 21e6)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_nonpositive(self, bad):
        with pytest.raises(ValueError):
            Frequency(bad)


class TestColeCole:
    def test_no_poles_is_constant(self):
        params = ColeColeParams(4.0, (), 0.0)
        for hz in (1e3, 21e6, 2.4e9):
            eps = complex_permittivity(params, Frequency(hz))
            assert eps.eps_r_real == 4.0
            assert eps.sigma_eff == 0.0

    def test_debye_pole_at_corner_frequency(self):
        # alpha = 0, w*tau = 1: the relaxation contributes delta_eps/2.
        f = Frequency(50e6)
        tau = 1.0 / f.omega
        params = ColeColeParams(4.0, (ColeColePole(32.0, tau, 0.0),), 0.0)
        eps = complex_permittivity(params, f)
        assert eps.eps_r_real == pytest.approx(20.0, abs=1e-12)
        # Im(1/(1+j)) = -1/2 -> sigma = w*EPS0*16
        assert eps.sigma_eff == pytest.approx(f.omega * EPS0 * 16.0, rel=1e-12)

    def test_gabriel_muscle_at_900mhz(self):
        # Oracle: direct complex evaluation of the published muscle table.
        lib = default_tissue_library()
        eps = complex_permittivity(lib["muscle"], Frequency(900e6))
        assert eps.eps_r_real == pytest.approx(55.0, abs=2.0)
        assert eps.sigma_eff == pytest.approx(0.94, abs=0.05)

    def test_passivity_across_grid(self):
        lib = default_tissue_library()
        for params in lib.values():
            for hz in FREQ_GRID:
                eps = complex_relative_permittivity(params, Frequency(hz))
                assert eps.imag <= 0.0

    def test_sigma_eff_nondecreasing_in_frequency(self):
        lib = default_tissue_library()
        for name, params in lib.items():
            sigmas = [complex_permittivity(params, Frequency(hz)).sigma_eff for hz in FREQ_GRID]
            for a, b in zip(sigmas, sigmas[1:]):
                assert b >= a - 1e-9, f"sigma_eff of {name} decreased"

    def test_pole_validation(self):
        with pytest.raises(ValueError):
            ColeColePole(-1.0, 1e-9, 0.0)
        with pytest.raises(ValueError):
            ColeColePole(10.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            ColeColePole(10.0, 1e-9, 1.0)
        with pytest.raises(ValueError):
            ColeColeParams(0.5, (), 0.0)
        with pytest.raises(ValueError):
            ColeColeParams(4.0, (ColeColePole(1, 1e-9, 0),) * 5, 0.0)


class TestPropagationConstants:
    def test_lossless_free_space(self):
        f = Frequency(2.4e9)
        pc = propagation_constants(ComplexPermittivity(1.0, 0.0), f)
        assert pc.alpha_np_per_m == 0.0
        assert pc.beta_rad_per_m == pytest.approx(2 * math.pi * f.hertz / C0, rel=1e-12)
        assert pc.skin_depth_m == math.inf

    def test_lossless_reduction_is_exact(self):
        f = Frequency(900e6)
        eps = ComplexPermittivity(49.0, 0.0)
        pc = propagation_constants(eps, f)
        assert pc.beta_rad_per_m == f.omega * math.sqrt(MU0 * EPS0 * 49.0)

    def test_good_conductor_skin_depth(self):
        # copper at 1 MHz; closed form sqrt(1/(pi*f*MU0*sigma))
        f = Frequency(1e6)
        pc = propagation_constants(ComplexPermittivity(1.0, 5.8e7), f)
        expected = math.sqrt(1.0 / (math.pi * f.hertz * MU0 * 5.8e7))
        assert pc.skin_depth_m == pytest.approx(expected, rel=1e-2)
        assert expected == pytest.approx(66e-6, rel=2e-2)

    def test_matches_gamma_oracle_on_log_grid(self):
        lib = default_tissue_library()
        for name, params in lib.items():
            for hz in np.logspace(6, 10, 20):
                f = Frequency(hz)
                eps = complex_permittivity(params, f)
                pc = propagation_constants(eps, f)
                alpha_ref, beta_ref = gamma_oracle(eps, f)
                assert pc.alpha_np_per_m == pytest.approx(alpha_ref, rel=1e-9), (name, hz)
                assert pc.beta_rad_per_m == pytest.approx(beta_ref, rel=1e-9), (name, hz)

    def test_muscle_per_cm_loss_identity(self):
        f = Frequency(2.4e9)
        eps = complex_permittivity(default_tissue_library()["muscle"], f)
        pc = propagation_constants(eps, f)
        loss = tissue_loss_db(eps, f, 0.01)
        assert loss == pytest.approx(NP_TO_DB * pc.alpha_np_per_m * 0.01, rel=1e-12)

    def test_skin_depth_strictly_decreases_with_frequency(self):
        eps = ComplexPermittivity(50.0, 0.5)
        depths = [propagation_constants(eps, Frequency(hz)).skin_depth_m for hz in FREQ_GRID]
        for a, b in zip(depths, depths[1:]):
            assert b < a


class TestTissueLoss:
    def test_zero_thickness(self):
        eps = ComplexPermittivity(50.0, 0.5)
        assert tissue_loss_db(eps, Frequency(1e9), 0.0) == 0.0

    def test_np_to_db_scale(self):
        # 1 Np over 1 m is 20/ln(10) = 8.686 dB by definition.
        assert NP_TO_DB == pytest.approx(8.686, abs=5e-4)

    def test_additive_over_layers(self):
        f = Frequency(900e6)
        lib = default_tissue_library()
        e1 = complex_permittivity(lib["muscle"], f)
        e2 = complex_permittivity(lib["skin"], f)
        combined = tissue_loss_db(e1, f, 0.018) + tissue_loss_db(e2, f, 0.002)
        again = tissue_loss_db(e1, f, 0.018) + tissue_loss_db(e2, f, 0.002)
        assert combined == pytest.approx(again, abs=1e-12)
        assert tissue_loss_db(e1, f, 0.01) + tissue_loss_db(e1, f, 0.02) == pytest.approx(
            tissue_loss_db(e1, f, 0.03), abs=1e-12
        )

    def test_negative_thickness_rejected(self):
        with pytest.raises(ValueError):
            tissue_loss_db(ComplexPermittivity(1.0, 0.0), Frequency(1e9), -0.1)


class TestImpedance:
    def test_free_space_impedance(self):
        eta = intrinsic_impedance(ComplexPermittivity(1.0, 0.0), Frequency(1e9))
        assert abs(eta) == pytest.approx(math.sqrt(MU0 / EPS0), rel=1e-12)
        assert abs(eta.imag) < 1e-9


class TestTissueFile:
    def test_default_library_contents(self):
        lib = default_tissue_library()
        assert set(lib) == {"skin", "muscle", "fat"}
        assert len(lib["muscle"].poles) == 4

    def test_parse_roundtrip_values(self):
        text = "demo 4.0 0.1 32.0 7.0e-12 0.1\n"
        lib = parse_tissue_records(text)
        p = lib["demo"]
        assert p.eps_inf == 4.0
        assert p.sigma_ionic == 0.1
        assert p.poles == (ColeColePole(32.0, 7.0e-12, 0.1),)

    def test_comments_and_blanks_skipped(self):
        text = "# header\n\ndemo 4.0 0.1 32.0 7e-12 0.1  # inline\n"
        assert "demo" in parse_tissue_records(text)

    def test_error_cites_line_number(self):
        text = "demo 4.0 0.1 32.0 7e-12 0.1\nbad 1.0\n"
        with pytest.raises(TissueFileError) as err:
            parse_tissue_records(text)
        assert err.value.line == 2
        assert "line 2" in str(err.value)

    def test_bad_number_cites_line(self):
        with pytest.raises(TissueFileError) as err:
            parse_tissue_records("demo 4.0 xy 32.0 7e-12 0.1\n")
        assert err.value.line == 1

    def test_duplicate_rejected(self):
        text = "demo 4.0 0.1 32.0 7e-12 0.1\ndemo 4.0 0.1 32.0 7e-12 0.1\n"
        with pytest.raises(TissueFileError) as err:
            parse_tissue_records(text)
        assert err.value.line == 2

    def test_invalid_alpha_cites_line(self):
        with pytest.raises(TissueFileError) as err:
            parse_tissue_records("demo 4.0 0.1 32.0 7e-12 1.0\n")
        assert err.value.line == 1

    def test_empty_file_rejected(self):
        with pytest.raises(TissueFileError):
            parse_tissue_records("# nothing here\n")
