import math
from unittest import TestCase

import numpy as np
import pytest
from scipy import stats

import scalelab
from scalelab import testfn
from scalelab.polynomial import Polynomial

POINTS_D3 = np.array(
    [[0.1, -0.3, 0.2], [1.0, 0.4, -0.7], [-0.6, 0.0, 1.3], [0.25, 0.25, 0.25]]
)
MOMENTA_D3 = np.array(
    [[1.2, 0.3, -0.4], [2.0, 1.5, 0.1], [0.7, -0.2, 0.6], [3.0, 0.0, 2.5]]
)


def sample_function():
    """A complex, off-centre, anisotropic packet with a polynomial prefactor."""
    poly = Polynomial(3, (((0, 0, 0), 1.0), ((1, 0, 1), 0.5 - 0.2j), ((0, 2, 0), 0.3)))
    return scalelab.TestFunction.gaussian(
        3,
        widths=(1.0, 1.5, 0.8),
        center=(0.2, -0.1, 0.3),
        modulation=(0.5, -0.4, 0.1),
        amplitude=0.7 + 0.2j,
        poly=poly,
    )


def grid_fourier(f, p, half_width=9.0, points=121):
    """Brute-force transform on a tensor grid (d=2)."""
    axis = np.linspace(-half_width, half_width, points)
    step = axis[1] - axis[0]
    grid = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1)
    values = f.evaluate(grid)
    covariant = scalelab.utils.lower_index(p)
    phase = np.exp(1j * grid @ covariant)
    return np.sum(values * phase) * step**2


class TestGaussianPacket(TestCase):
    def test_evaluate_closed_form(self):
        f = scalelab.TestFunction.gaussian(3, widths=2.0, center=(1.0, 0.0, 0.0))
        x = np.array([1.5, 0.5, -0.5])
        expected = math.exp(-0.5 * 4.0 * 0.75)
        assert f.evaluate(x) == pytest.approx(expected)

    def test_invalid_widths(self):
        with pytest.raises(scalelab.DomainError):
            scalelab.TestFunction.gaussian(3, widths=(1.0, -1.0, 1.0))
        with pytest.raises(scalelab.DomainError):
            testfn.GaussianPacket(3, width_matrix=np.diag([1.0, 1.0, 0.0]))
        with pytest.raises(scalelab.DomainError):
            testfn.GaussianPacket(3, width_matrix=[[1.0, 0.5, 0], [0, 1, 0], [0, 0, 1]])

    def test_polynomial_degree_cap(self):
        poly = Polynomial(3, (((9, 0, 0), 1.0),))
        with pytest.raises(scalelab.DomainError):
            testfn.GaussianPacket(3, poly=poly)
        assert testfn.GaussianPacket(3, poly=poly, max_degree=9).poly.degree == 9

    def test_dimension_checks(self):
        with pytest.raises(scalelab.DomainError):
            scalelab.TestFunction.gaussian(5)
        with pytest.raises(scalelab.DomainError):
            scalelab.TestFunction.gaussian(3) + scalelab.TestFunction.gaussian(4)

    def test_momentum_scale(self):
        f = scalelab.TestFunction.gaussian(3, widths=(1.0, 2.0, 3.0), modulation=(0, 4, 0))
        assert f.momentum_scale == pytest.approx(3.0 + 4.0)


class TestOperations(TestCase):
    def setUp(self):
        self.f = sample_function()

    def test_scale(self):
        lam = 0.37
        scaled = scalelab.scale(self.f, lam)
        np.testing.assert_allclose(
            scaled.evaluate(POINTS_D3), self.f.evaluate(POINTS_D3 / lam), rtol=1e-12
        )
        packet = scaled.terms[0]
        np.testing.assert_allclose(packet.widths, np.array([1.0, 1.5, 0.8]) / lam)
        np.testing.assert_allclose(packet.center, np.array([0.2, -0.1, 0.3]) * lam)

    def test_scale_rejects_nonpositive(self):
        for lam in (0.0, -1.0, math.inf):
            with pytest.raises(scalelab.DomainError):
                scalelab.scale(self.f, lam)

    def test_translate(self):
        shift = np.array([0.4, -1.0, 0.25])
        moved = scalelab.translate(self.f, shift)
        np.testing.assert_allclose(
            moved.evaluate(POINTS_D3), self.f.evaluate(POINTS_D3 - shift), rtol=1e-12
        )

    def test_boost(self):
        matrix = testfn.lorentz_boost(3, 0.6) @ testfn.spatial_rotation(3, 0.3)
        boosted = scalelab.boost(self.f, matrix)
        inverse = np.linalg.inv(matrix)
        np.testing.assert_allclose(
            boosted.evaluate(POINTS_D3),
            self.f.evaluate(POINTS_D3 @ inverse.T),
            rtol=1e-10,
        )

    def test_boost_rejects_non_lorentz(self):
        with pytest.raises(scalelab.DomainError):
            scalelab.boost(self.f, np.diag([1.0, 2.0, 1.0]))
        with pytest.raises(scalelab.DomainError):
            scalelab.boost(self.f, np.diag([-1.0, 1.0, 1.0]))

    def test_derivative_matches_finite_difference(self):
        step = 1e-5
        for axis in range(3):
            offset = np.zeros(3)
            offset[axis] = step
            numeric = (
                self.f.evaluate(POINTS_D3 + offset) - self.f.evaluate(POINTS_D3 - offset)
            ) / (2 * step)
            np.testing.assert_allclose(
                scalelab.derivative(self.f, axis).evaluate(POINTS_D3),
                numeric,
                rtol=1e-6,
                atol=1e-9,
            )
        with pytest.raises(scalelab.DomainError):
            scalelab.derivative(self.f, 3)

    def test_conjugate(self):
        np.testing.assert_allclose(
            scalelab.conjugate(self.f).evaluate(POINTS_D3),
            np.conj(self.f.evaluate(POINTS_D3)),
        )

    def test_fourier_of_operations(self):
        """Transforms follow the exact covariance rules."""
        f = self.f
        lam = 0.5
        np.testing.assert_allclose(
            scalelab.fourier(scalelab.scale(f, lam), MOMENTA_D3),
            lam**3 * f.fourier(lam * MOMENTA_D3),
            rtol=1e-10,
        )
        shift = np.array([0.3, 0.2, -0.1])
        covariant = scalelab.utils.lower_index(MOMENTA_D3)
        np.testing.assert_allclose(
            scalelab.translate(f, shift).fourier(MOMENTA_D3),
            np.exp(1j * covariant @ shift) * f.fourier(MOMENTA_D3),
            rtol=1e-10,
        )
        for axis in range(3):
            np.testing.assert_allclose(
                scalelab.derivative(f, axis).fourier(MOMENTA_D3),
                -1j * covariant[:, axis] * f.fourier(MOMENTA_D3),
                rtol=1e-9,
            )

    def test_fourier_against_grid(self):
        poly = Polynomial(2, (((0, 0), 1.0), ((1, 1), 0.4j), ((2, 0), -0.3)))
        f = scalelab.TestFunction.gaussian(
            2,
            widths=(1.2, 0.9),
            center=(0.3, -0.2),
            modulation=(0.4, 0.1),
            amplitude=1.0 - 0.5j,
            poly=poly,
        )
        for p in ([0.5, 0.2], [1.3, -0.8], [-0.4, 0.6]):
            p = np.array(p)
            assert f.fourier(p) == pytest.approx(grid_fourier(f, p), rel=1e-9, abs=1e-12)

    def test_linear_combination(self):
        g = scalelab.TestFunction.gaussian(3, widths=2.0)
        combination = 2.0 * self.f - g
        np.testing.assert_allclose(
            combination.evaluate(POINTS_D3),
            2.0 * self.f.evaluate(POINTS_D3) - g.evaluate(POINTS_D3),
        )
        np.testing.assert_allclose(
            combination.fourier(MOMENTA_D3),
            2.0 * self.f.fourier(MOMENTA_D3) - g.fourier(MOMENTA_D3),
        )


class TestReality(TestCase):
    def test_plain_gaussian_is_real(self):
        assert scalelab.TestFunction.gaussian(3, widths=2.0, center=(1, 0, 0)).is_real()

    def test_modulated_gaussian_is_not_real(self):
        assert not scalelab.TestFunction.gaussian(3, modulation=(0, 1, 0)).is_real()

    def test_cosine_modulation_is_real(self):
        f = scalelab.TestFunction.gaussian(3, modulation=(0, 1, 0))
        assert (f + scalelab.conjugate(f)).is_real()

    def test_imaginary_amplitude_is_not_real(self):
        assert not scalelab.TestFunction.gaussian(3, amplitude=1j).is_real()


class TestEffectiveSupport(TestCase):
    def test_support_contains_the_mass(self):
        f = scalelab.TestFunction.gaussian(3, widths=(1.0, 2.0, 4.0), center=(1, 2, 3))
        (ellipsoid,) = scalelab.effective_support(f, 1e-8)
        assert ellipsoid.center == (1.0, 2.0, 3.0)
        radii = np.array(ellipsoid.radii)
        # tail of the chi-square law with 3 degrees of freedom
        radius = math.sqrt(stats.chi2.isf(1e-8, 3))
        np.testing.assert_allclose(radii, radius / np.array([1.0, 2.0, 4.0]))

    def test_support_scales(self):
        f = scalelab.TestFunction.gaussian(3, widths=1.5, center=(0.5, 0, 0))
        (base,) = scalelab.effective_support(f)
        (scaled,) = scalelab.effective_support(scalelab.scale(f, 0.1))
        np.testing.assert_allclose(scaled.radii, 0.1 * np.array(base.radii))
        np.testing.assert_allclose(scaled.center, 0.1 * np.array(base.center))

    def test_invalid_eps(self):
        with pytest.raises(scalelab.DomainError):
            scalelab.effective_support(scalelab.TestFunction.gaussian(3), 0.0)

    def test_polynomial_prefactor_keeps_the_mass_inside(self):
        eps = 1e-3
        poly = Polynomial(2, (((0, 0), 1.0), ((1, 1), 1.0)))
        f = scalelab.TestFunction.gaussian(2, widths=(1.0, 2.0), poly=poly)
        (ellipsoid,) = scalelab.effective_support(f, eps)
        plain = scalelab.TestFunction.gaussian(2, widths=(1.0, 2.0))
        (plain,) = scalelab.effective_support(plain, eps)
        assert all(r > p for r, p in zip(ellipsoid.radii, plain.radii))

        x0, x1 = np.meshgrid(np.linspace(-12.0, 12.0, 961), np.linspace(-6.0, 6.0, 481))
        mass = np.abs(f.evaluate(np.stack([x0, x1], axis=-1)))
        outside = (x0 / ellipsoid.radii[0]) ** 2 + (x1 / ellipsoid.radii[1]) ** 2 > 1
        assert np.sum(mass[outside]) <= eps * np.sum(mass)

    def test_ellipsoid_containment(self):
        outer = scalelab.Ellipsoid((0, 0, 0), (2, 2, 2))
        assert outer.contains(scalelab.Ellipsoid((0, 0, 0), (1, 1, 1)))
        assert not outer.contains(scalelab.Ellipsoid((1.5, 0, 0), (1, 1, 1)))
        parts = [
            scalelab.Ellipsoid((0, 0, 0), (1, 1, 1)),
            scalelab.Ellipsoid((3, 0, 0), (1, 1, 1)),
        ]
        bounding = scalelab.Ellipsoid.bounding(parts)
        assert all(bounding.contains(part) for part in parts)


def test_record_round_trip():
    f = sample_function()
    assert scalelab.TestFunction.from_record(3, f.to_record()) == f


def test_from_config_record():
    f = scalelab.TestFunction.from_record(
        3,
        {
            "widths": [1.0, 2.0, 2.0],
            "center": [0.0, 1.0, 0.0],
            "poly": [{"exponents": [0, 1, 0], "coefficient": [0.0, 1.0]}],
        },
    )
    (packet,) = f.terms
    assert packet.widths == (1.0, 2.0, 2.0)
    assert packet.poly == Polynomial(3, (((0, 1, 0), 1j),))


@pytest.mark.parametrize("dim, rapidity", [(2, 0.3), (3, -1.1), (4, 2.0)])
def test_lorentz_boost_preserves_metric(dim, rapidity):
    matrix = testfn.lorentz_boost(dim, rapidity)
    np.testing.assert_allclose(
        matrix.T @ scalelab.utils.minkowski_metric(dim) @ matrix,
        scalelab.utils.minkowski_metric(dim),
        atol=1e-12,
    )
    assert testfn.check_lorentz(matrix, dim) is not None
