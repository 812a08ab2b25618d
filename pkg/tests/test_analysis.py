import numpy as np
import pytest

from dcaasim.analysis import (
    NullCurveSpec,
    NullSearchError,
    _first_null,
    branch_value,
    dcaa_resolution,
    null_directions,
    numerical_resolution_oracle,
    supa_beamwidth,
    upa_resolution,
    write_resolution_csv,
)
from dcaasim.response import kpc_array_factor, supa_array_factor


class TestNullDirections:
    def test_u1_first_nulls_flat_panel(self):
        m = 8
        for p, sign in ((1, 1.0), (-1, -1.0)):
            got = null_directions(NullCurveSpec("supa-u1", p, m), "theta", 0.0)
            np.testing.assert_allclose(got, [sign * np.arcsin(0.25)], atol=1e-12)

    def test_u2_elevation_nulls_along_boresight_azimuth(self):
        # fixing azimuth at the yaw, elevation nulls sit at pitch +- arcsin(2q/m)
        m, yaw, pitch = 8, 0.3, 0.4
        for q in (1, -1):
            got = null_directions(
                NullCurveSpec("supa-u2", q, m, yaw=yaw, pitch=pitch), "phi", yaw
            )
            np.testing.assert_allclose(got, [pitch + np.arcsin(2.0 * q / m)], atol=1e-12)

    def test_kpc_azimuth_null(self):
        got = null_directions(NullCurveSpec("kpc-azimuth", 1, 16), "theta", 0.0)
        np.testing.assert_allclose(got, [np.arcsin(0.125)], atol=1e-12)

    def test_kpc_elevation_null(self):
        got = null_directions(
            NullCurveSpec("kpc-elevation", 2, 16, sin_theta_q=0.25), "phi", 0.0
        )
        np.testing.assert_allclose(got, [np.arcsin(0.5)], atol=1e-12)

    def test_empty_when_out_of_range(self):
        got = null_directions(NullCurveSpec("supa-u1", 4, 8), "theta", 1.2)
        assert got.size == 0

    def test_order_validation(self):
        with pytest.raises(ValueError):
            NullCurveSpec("supa-u1", 0, 8)
        with pytest.raises(ValueError):
            NullCurveSpec("supa-u1", 5, 8)
        with pytest.raises(ValueError):
            NullCurveSpec("bogus", 1, 8)


class TestSupaBeamwidth:
    def test_flat_panel_m16(self):
        dphi, dtheta = supa_beamwidth(16, 0.0)
        assert dphi == pytest.approx(2.0 * np.arcsin(0.125))
        assert dtheta == pytest.approx(2.0 * np.arcsin(0.125))
        assert np.degrees(dphi) == pytest.approx(14.3615, abs=1e-3)

    def test_pitched_panel_m16(self):
        dphi, dtheta = supa_beamwidth(16, np.radians(60.0))
        assert dphi == pytest.approx(2.0 * np.arcsin(0.25))
        assert np.degrees(dphi) == pytest.approx(28.955, abs=1e-2)
        assert dtheta == pytest.approx(2.0 * np.arcsin(0.125))

    def test_elevation_width_independent_of_pitch(self):
        widths = [supa_beamwidth(16, np.radians(v))[1] for v in range(0, 81, 10)]
        np.testing.assert_allclose(widths, widths[0], atol=1e-15)

    def test_undefined_azimuth_error(self):
        with pytest.raises(ValueError):
            supa_beamwidth(16, np.arccos(0.1))


class TestDcaaResolution:
    def test_elevation_resolution_uniform(self):
        for az, el in [(0.0, 0.0), (0.7, 0.3), (-0.5, 1.0)]:
            res = dcaa_resolution(16, az, el)
            assert res.gamma_v == pytest.approx(np.arcsin(0.125))

    def test_azimuth_resolution_at_60_degrees(self):
        res = dcaa_resolution(16, 0.2, np.radians(60.0))
        assert res.gamma_h == pytest.approx(np.arcsin(0.25))
        assert np.degrees(res.gamma_h) == pytest.approx(14.4775, abs=1e-3)

    def test_azimuth_resolution_constant_in_azimuth(self):
        vals = [dcaa_resolution(16, az, 0.5).gamma_h for az in np.linspace(-1.2, 1.2, 7)]
        np.testing.assert_allclose(vals, vals[0], atol=1e-15)

    def test_undefined_azimuth_flag(self):
        res = dcaa_resolution(16, 0.0, np.arccos(0.05))
        assert not res.defined_h
        assert res.defined_v


class TestUpaResolution:
    def test_origin_limit(self):
        res, _terms = upa_resolution(16, 1e-9, 1e-9)
        assert res.gamma_h == pytest.approx(np.arcsin(0.125), abs=1e-8)
        assert res.gamma_v == pytest.approx(np.arcsin(0.125), abs=1e-8)

    def test_undefined_branch(self):
        # peak exists but both azimuth nulls are out of range
        el = np.arccos(0.1)
        az = np.arcsin(0.01)
        res, terms = upa_resolution(16, az, el)
        assert not res.defined_h
        assert terms.phi_above.size == 0 and terms.phi_below.size == 0

    def test_no_peak_case(self):
        res, terms = upa_resolution(16, np.radians(80.0), np.radians(75.0))
        assert not res.defined_h and not res.defined_v
        assert terms.branch == "no-peak"

    def test_branch_value_consistency_on_grid(self):
        grid = np.radians(np.linspace(3.0, 62.0, 12))
        for az in grid:
            for el in grid:
                res, terms = upa_resolution(16, az, el)
                if res.defined_v:
                    assert branch_value(terms) == pytest.approx(res.gamma_v, abs=1e-12)

    def test_null_sets_nonempty_when_defined(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            az = rng.uniform(0.05, 1.2)
            el = rng.uniform(0.05, 1.2)
            res, terms = upa_resolution(16, az, el)
            if res.defined_v:
                assert terms.theta_above.size and terms.theta_below.size
            if res.defined_h:
                assert terms.phi_above.size and terms.phi_below.size

    def test_quadrant_reflection(self):
        plus, _ = upa_resolution(16, 0.4, 0.3)
        minus, _ = upa_resolution(16, -0.4, -0.3)
        assert plus.gamma_h == pytest.approx(minus.gamma_h, abs=1e-14)
        assert plus.gamma_v == pytest.approx(minus.gamma_v, abs=1e-14)


class TestNumericalOracle:
    def test_dcaa_boresight_matches_closed_form(self):
        m = 16
        beam = lambda p, t: supa_array_factor(m, 0.0, 0.0, p, t)
        res = numerical_resolution_oracle(beam, 0.0, 0.0, m)
        assert res.gamma_v == pytest.approx(np.arcsin(2.0 / m), abs=1e-6)
        assert res.gamma_h == pytest.approx(np.arcsin(2.0 / m), abs=1e-6)

    def test_kpc_center_codeword_matches_closed_form(self):
        m = 16
        beam = lambda p, t: kpc_array_factor(m, 0.0, 0.0, p, t)
        res = numerical_resolution_oracle(beam, 0.0, 0.0, m)
        closed, _ = upa_resolution(m, 1e-12, 1e-12)
        assert res.gamma_v == pytest.approx(closed.gamma_v, abs=1e-6)
        assert res.gamma_h == pytest.approx(closed.gamma_h, abs=1e-6)

    def test_null_symmetry_about_symmetric_peak(self):
        m = 16
        beam = lambda p, t: supa_array_factor(m, 0.0, 0.0, p, t)
        cut = lambda t: beam(np.zeros_like(t), t)
        hi = _first_null(cut, 0.0, +1.0, 1e-8 * m * m, 2e-4, 1e-10, np.pi / 2)
        lo = _first_null(cut, 0.0, -1.0, 1e-8 * m * m, 2e-4, 1e-10, np.pi / 2)
        assert hi + lo == pytest.approx(0.0, abs=1e-9)

    def test_search_failure(self):
        flat = lambda p, t: np.ones_like(p) + 0j
        with pytest.raises(NullSearchError):
            numerical_resolution_oracle(flat, 0.0, 0.0, 16)

    @pytest.mark.parametrize("m", [8, 16])
    def test_dcaa_theorem_consistency_grid(self, m):
        grid = np.radians(np.linspace(4.0, 36.0, 4))
        for az in grid:
            for el in grid:
                beam = lambda p, t: supa_array_factor(m, az, el, p, t)
                oracle = numerical_resolution_oracle(beam, az, el, m)
                closed = dcaa_resolution(m, az, el)
                assert oracle.gamma_v == pytest.approx(closed.gamma_v, abs=1e-6)
                assert oracle.gamma_h == pytest.approx(closed.gamma_h, abs=1e-6)

    def test_upa_oracle_consistency_random(self):
        m = 16
        rng = np.random.default_rng(11)
        for _ in range(10):
            az = np.radians(rng.uniform(5.0, 35.0))
            el = np.radians(rng.uniform(5.0, 35.0))
            sp, st, ct = np.sin(az), np.sin(el), np.cos(el)
            beam = lambda p, t: kpc_array_factor(m, sp, st, p, t)
            oracle = numerical_resolution_oracle(beam, np.arcsin(sp / ct), el, m)
            closed, _ = upa_resolution(m, az, el)
            assert oracle.gamma_v == pytest.approx(closed.gamma_v, abs=1e-6)
            assert oracle.gamma_h == pytest.approx(closed.gamma_h, abs=1e-6)


class TestComparativeProperties:
    def test_dcaa_azimuth_resolution_monotone_in_elevation(self):
        els = np.radians(np.linspace(0.0, 80.0, 17))
        vals = [dcaa_resolution(16, 0.0, el).gamma_h for el in els]
        assert np.all(np.diff(vals) >= -1e-15)

    def test_upa_azimuth_resolution_monotone_in_azimuth(self):
        # monotone while the bracketing nulls stay inside the visible domain
        # (the wrapped-null region bordering the undefined zone is excluded)
        els = np.radians([10.0, 30.0, 50.0])
        for el in els:
            azs = np.radians(np.linspace(2.0, 55.0, 12))
            gammas = []
            for az in azs:
                res, terms = upa_resolution(16, az, el)
                if res.defined_h and abs(terms.phi_above[0]) <= np.pi / 2 + 1e-12:
                    gammas.append(res.gamma_h)
            assert len(gammas) >= 3
            assert np.all(np.diff(gammas) >= -1e-12)

    def test_dcaa_dominates_upa_azimuth_resolution(self):
        grid = np.radians(np.linspace(3.0, 60.0, 10))
        for az in grid:
            for el in grid:
                upa, _ = upa_resolution(16, az, el)
                dcaa = dcaa_resolution(16, az, el)
                if upa.defined_h and dcaa.defined_h:
                    assert dcaa.gamma_h <= upa.gamma_h + 1e-12


class TestResolutionExport:
    def test_csv_schema(self, tmp_path):
        rows = [dcaa_resolution(16, 0.1, 0.2), dcaa_resolution(16, 0.0, np.arccos(0.05))]
        path = tmp_path / "res.csv"
        write_resolution_csv(path, rows)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "phi_deg,theta_deg,gamma_v_deg,gamma_h_deg,defined_v,defined_h"
        assert len(lines) == 3
        assert lines[2].endswith(",1,0")
