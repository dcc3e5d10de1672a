import math

import numpy as np
import pytest
from scipy import integrate

import scalelab
from scalelab import quadrature


def test_settings_refinement():
    settings = quadrature.QuadratureSettings(radial_nodes=64, planar_nodes=32, lebedev_order=23)
    refined = settings.refined()
    assert refined.radial_nodes == 128
    assert refined.planar_nodes == 64
    assert refined.lebedev_order == 35
    assert quadrature.refined_lebedev_order(131) == 131


def test_default_settings():
    defaults = quadrature.DEFAULT_SETTINGS
    assert (defaults.radial_nodes, defaults.planar_nodes) == (256, 74)
    assert defaults.lebedev_order == 35
    points, _ = integrate.lebedev_rule(defaults.lebedev_order)
    assert points.shape == (3, 434)
    points, _ = integrate.lebedev_rule(13)
    assert points.shape == (3, 74)
    refined = defaults.refined()
    assert (refined.radial_nodes, refined.planar_nodes) == (512, 148)


def test_settings_validation():
    with pytest.raises(scalelab.DomainError):
        quadrature.QuadratureSettings(lebedev_order=33)
    with pytest.raises(scalelab.DomainError):
        quadrature.QuadratureSettings(radial_nodes=2)
    with pytest.raises(scalelab.DomainError):
        quadrature.QuadratureSettings(rtol=0.0)


def test_settings_record_round_trip():
    settings = quadrature.QuadratureSettings(radial_nodes=32, rtol=1e-6)
    assert quadrature.QuadratureSettings.from_record(settings.to_record()) == settings
    assert quadrature.QuadratureSettings.from_record(None) == quadrature.DEFAULT_SETTINGS


@pytest.mark.parametrize("spatial_dim, size, area", [(2, 16, 2 * math.pi), (3, 23, 4 * math.pi)])
def test_angular_rule(spatial_dim, size, area):
    directions, weights = quadrature.angular_rule(spatial_dim, size)
    assert directions.shape == (len(weights), spatial_dim)
    np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)
    assert weights.sum() == pytest.approx(area)
    # odd moments vanish, second moments are area / spatial_dim
    assert directions[:, 0] @ weights == pytest.approx(0.0, abs=1e-13)
    assert directions[:, 0] ** 2 @ weights == pytest.approx(area / spatial_dim)


def test_radial_rule():
    radii, weights = quadrature.radial_rule(64, 1.0)
    assert np.all(radii > 0)
    assert np.exp(-(radii**2)) @ weights == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-10)


@pytest.mark.parametrize(
    "dim, expected",
    [(3, 1 / (8 * math.sqrt(math.pi))), (4, 1 / (8 * math.pi**2))],
)
def test_massless_shell_integral(dim, expected):
    def integrand(momenta):
        return np.exp(-np.sum(momenta[:, 1:] ** 2, axis=1)).astype(complex)

    result = quadrature.shell_integral(dim, 0.0, integrand, 1.0)
    assert result.value == pytest.approx(expected, rel=1e-10)
    assert result.abs_error < 1e-8 * result.magnitude


def test_line_shell_integral():
    mass = 0.7

    def integrand(momenta):
        return np.exp(-momenta[:, 1] ** 2 - 0.3j * momenta[:, 1])

    result = quadrature.shell_integral(2, mass, integrand, 1.0)
    real, _ = integrate.quad(
        lambda p: math.exp(-(p**2)) * math.cos(0.3 * p) / math.hypot(p, mass),
        -math.inf,
        math.inf,
    )
    assert result.value.real == pytest.approx(real / (4 * math.pi), rel=1e-8)
    assert result.value.imag == pytest.approx(0.0, abs=1e-10)


def test_shell_density_integrates_to_shell_integral():
    def integrand(momenta):
        return np.exp(-np.sum(momenta**2, axis=1) / 2).astype(complex)

    total = quadrature.shell_integral(4, 1.0, integrand, 1.0)
    radii, weights = quadrature.radial_rule(256, 1.0)
    density = quadrature.shell_density(4, 1.0, integrand, radii)
    assert weights @ density == pytest.approx(total.value, rel=1e-8)


def test_invalid_shell_integrals():
    def integrand(momenta):
        return np.ones(len(momenta), dtype=complex)

    with pytest.raises(scalelab.DomainError):
        quadrature.shell_integral(2, 0.0, integrand, 1.0)
    with pytest.raises(scalelab.DomainError):
        quadrature.shell_integral(3, 1.0, integrand, 0.0)


def test_unresolved_integrand_raises():
    settings = quadrature.QuadratureSettings(
        radial_nodes=4, planar_nodes=4, rtol=1e-12, max_refinements=0
    )

    def integrand(momenta):
        radius = np.linalg.norm(momenta[:, 1:], axis=1)
        return np.cos(40 * radius) * np.exp(-(radius**2) / 100) + 0j

    with pytest.raises(scalelab.NumericalError) as excinfo:
        quadrature.shell_integral(3, 1.0, integrand, 1.0, settings)
    assert excinfo.value.diagnostics["dim"] == 3
