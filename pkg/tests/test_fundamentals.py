import numpy as np
import pytest

from dcaasim.fundamentals import (
    DIRECTIVE_DCAA,
    ISOTROPIC,
    Direction,
    ElementPattern,
    Orientation,
    dirichlet_kernel,
    element_gain,
    rotation_matrix,
    side_vectors,
    wave_vector,
)


class TestDirectionTypes:
    def test_direction_bounds(self):
        Direction(0.5, -0.5)
        with pytest.raises(ValueError):
            Direction(2.0, 0.0)
        with pytest.raises(ValueError):
            Direction(0.0, -2.0)

    def test_orientation_pitch_strictly_inside(self):
        Orientation(1.0, 1.5)
        with pytest.raises(ValueError):
            Orientation(0.0, np.pi / 2)

    def test_from_degrees(self):
        d = Direction.from_degrees(30.0, -45.0)
        assert d.azimuth == pytest.approx(np.radians(30.0))
        assert d.elevation == pytest.approx(np.radians(-45.0))


class TestWaveVector:
    def test_components(self):
        k = wave_vector(0.3, -0.2)
        expected = -np.array(
            [np.cos(-0.2) * np.cos(0.3), np.cos(-0.2) * np.sin(0.3), np.sin(-0.2)]
        )
        np.testing.assert_allclose(k, expected, atol=1e-15)

    def test_unit_norm_grid(self):
        az, el = np.meshgrid(
            np.linspace(-np.pi / 2, np.pi / 2, 21), np.linspace(-np.pi / 2, np.pi / 2, 21)
        )
        k = wave_vector(az, el)
        np.testing.assert_allclose(np.linalg.norm(k, axis=-1), 1.0, atol=1e-12)


class TestRotationMatrix:
    def test_zero_angles_identity(self):
        np.testing.assert_allclose(rotation_matrix(0.0, 0.0), np.eye(3), atol=1e-15)

    def test_quarter_turn_about_z(self):
        out = rotation_matrix(np.pi / 2, 0.0) @ np.array([1.0, 0.0, 0.0])
        np.testing.assert_allclose(out, [0.0, 1.0, 0.0], atol=1e-15)

    def test_side_vectors_orthonormal_at_sample_orientation(self):
        # yaw 29 deg, pitch 45 deg
        r = rotation_matrix(np.radians(29.0), np.radians(45.0))
        u1 = r @ np.array([0.0, 1.0, 0.0])
        u2 = r @ np.array([0.0, 0.0, 1.0])
        assert abs(u1 @ u2) < 1e-12
        assert np.linalg.norm(u1) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(u2) == pytest.approx(1.0, abs=1e-12)

    def test_side_vector_closed_forms(self):
        yaw, pitch = 0.7, -0.4
        r = rotation_matrix(yaw, pitch)
        u1, u2 = side_vectors(yaw, pitch)
        np.testing.assert_allclose(u1, [-np.sin(yaw), np.cos(yaw), 0.0], atol=1e-15)
        np.testing.assert_allclose(r @ [0, 1, 0], u1, atol=1e-15)
        np.testing.assert_allclose(r @ [0, 0, 1], u2, atol=1e-15)

    def test_orthogonal_unit_determinant_over_grid(self):
        yaws = np.linspace(-np.pi / 2, np.pi / 2, 20)
        pitches = np.linspace(-1.5, 1.5, 20)
        for yaw in yaws:
            for pitch in pitches:
                r = rotation_matrix(yaw, pitch)
                np.testing.assert_allclose(r.T @ r, np.eye(3), atol=1e-12)
                assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)

    def test_pitch_domain_error(self):
        with pytest.raises(ValueError):
            rotation_matrix(0.0, np.pi / 2)


class TestDirichletKernel:
    def test_zero_argument(self):
        assert dirichlet_kernel(0.0, 8) == pytest.approx(1.0)

    def test_first_null(self):
        assert abs(dirichlet_kernel(2.0 / 8.0, 8)) < 1e-12

    def test_even_integer_limit(self):
        assert dirichlet_kernel(2.0, 8) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("m", [4, 8, 16])
    def test_bounded_by_one_with_equality_only_at_even_integers(self, m):
        x = np.linspace(-4.0, 4.0, 40001)
        mags = np.abs(dirichlet_kernel(x, m))
        assert mags.max() <= 1.0 + 1e-12
        near_one = x[mags > 1.0 - 1e-9]
        assert np.all(np.abs(near_one - 2.0 * np.round(near_one / 2.0)) < 1e-3)

    def test_hermitian_symmetry(self):
        x = np.linspace(-3.0, 3.0, 1001)
        np.testing.assert_allclose(
            dirichlet_kernel(-x, 8), np.conj(dirichlet_kernel(x, 8)), atol=1e-12
        )

    def test_sum_form_agrees_near_singularity(self):
        # just outside the singular guard, ratio and sum forms must agree
        x = 2.0 + 1e-7
        m = 8
        expected = np.exp(1j * np.pi * np.arange(m) * x).sum() / m
        assert dirichlet_kernel(x, m) == pytest.approx(expected, abs=1e-9)

    def test_invalid_m(self):
        with pytest.raises(ValueError):
            dirichlet_kernel(0.1, 0)


class TestElementGain:
    def test_isotropic_everywhere(self):
        assert element_gain(ISOTROPIC, 1.2, -0.7) == 1.0
        np.testing.assert_array_equal(
            element_gain(ISOTROPIC, np.zeros(5), np.linspace(-1, 1, 5)), np.ones(5)
        )

    def test_boresight_zero_db(self):
        assert element_gain(ElementPattern(), 0.0, 0.0) == pytest.approx(1.0)

    def test_boresight_directive_gain(self):
        # 12.79 dB peak gain -> 10^1.279 linear
        assert element_gain(DIRECTIVE_DCAA, 0.0, 0.0) == pytest.approx(19.010782799233)

    def test_monotone_decay_until_floor(self):
        pat = ElementPattern(a0_db=5.0, theta_3db=0.4, phi_3db=0.4)
        offs = np.linspace(0.0, np.pi / 2, 200)
        along_phi = element_gain(pat, offs, 0.0)
        along_theta = element_gain(pat, 0.0, offs)
        for g in (along_phi, along_theta):
            assert g[0] == g.max()
            assert np.all(np.diff(g) <= 1e-15)
        floor = 10.0 ** ((pat.a0_db - pat.a_max_db) / 10.0)
        assert along_phi[-1] == pytest.approx(floor)

    def test_invalid_pattern(self):
        with pytest.raises(ValueError):
            ElementPattern(theta_3db=0.0)
        with pytest.raises(ValueError):
            ElementPattern(a_max_db=-1.0)
